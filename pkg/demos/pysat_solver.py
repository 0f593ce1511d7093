#!/usr/bin/env python3
"""DIMACS solver front end over python-sat, printing standard s/v lines.

    pip install python-sat
    TRIFF_SAT_SOLVER=demos/pysat_solver.py pytest tests/test_acceptance.py
"""
import argparse
import sys

from pysat.formula import CNF
from pysat.solvers import Solver


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("cnf")
    parser.add_argument("--solver", default="cadical195", help="python-sat solver name")
    args = parser.parse_args()
    cnf = CNF(from_file=args.cnf)
    with Solver(name=args.solver, bootstrap_with=cnf.clauses) as solver:
        if not solver.solve():
            print("s UNSATISFIABLE")
            return 20
        model = solver.get_model()
    print("s SATISFIABLE")
    print("v " + " ".join(map(str, model)) + " 0")
    return 10


if __name__ == "__main__":
    sys.exit(main())
