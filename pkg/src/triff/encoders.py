"""Constraint models for "is there a (b, k)-hash code with m words of length n".

Two output formats:

* DIMACS CNF with a one-hot cell encoding and single-polarity Tseitin
  auxiliaries.  Variables are numbered: all cell variables ``v[i][j][s]``
  row-major, then pair variables ``e[p][q][j]`` (p < q in combination order),
  then subset variables ``a[t][j]`` (t in combination order), then, with
  symmetry breaking, prefix-equality variables ``q[i][j]``.
* SMT-LIB2 with one integer constant per cell.

Symmetry breaking (opt-in) adds the normal form used by the native search:
row 0 is all zeros, row 1 is ``0..01..1`` and rows 1.. are in lexicographic
order.  Every code has an equivalent in this form, so satisfiability is kept.

Both documents embed their variable map in comment lines, so a document
read back from disk can decode a solver model without a side channel.
"""
from __future__ import annotations

import itertools
import os
import re
import subprocess
import tempfile
from dataclasses import dataclass, field
from math import comb
from pathlib import Path

from . import dpll
from ._sexpr import SexprError, Sym, read_all
from .hashcore import Code, CodeError, CodeParams, Word, first_violation

SOLVER_ENV = "TRIFF_SAT_SOLVER"


class EncodingError(ValueError):
    pass


class DecodeError(ValueError):
    pass


@dataclass(frozen=True)
class ConstraintDocument:
    kind: str  # "cnf" | "smtlib2"
    params: CodeParams
    m: int
    text: str
    varmap: dict = field(repr=False)  # (row, col, sym) -> id for cnf, (row, col) -> name for smt
    aux: dict = field(default_factory=dict, repr=False)  # id -> ("e", p, q, j) | ("a", t, j) | ("q", i, j)

    @property
    def num_vars(self) -> int:
        return len(self.varmap) + len(self.aux)


def _check_size(params: CodeParams, m: int) -> None:
    if m < params.k:
        raise EncodingError(f"need m >= k, got m={m}, k={params.k}")


def dimacs_counts(params: CodeParams, m: int, symmetry_break: bool = False) -> tuple[int, int]:
    """(variables, clauses) of :func:`emit_dimacs`."""
    b, k, n = params.b, params.k, params.n
    pairs, subsets = comb(m, 2), comb(m, k)
    num_vars = m * n * b + pairs * n + subsets * n
    num_clauses = (
        m * n * (1 + comb(b, 2))  # exactly-one per cell
        + pairs * n * b  # e -> symbols differ
        + subsets * n * comb(k, 2)  # a -> every pair differs
        + subsets  # some column works for the subset
    )
    if symmetry_break:
        lex_pairs = max(m - 2, 0)
        num_vars += lex_pairs * (n - 1)
        num_clauses += (
            n  # row 0 is zero
            + n + (n - 1)  # row 1 is 0..01..1
            + lex_pairs * (n * comb(b, 2) + (n - 1) * b)
        )
    return num_vars, num_clauses


def _header(kind: str, params: CodeParams, m: int, symmetry_break: bool) -> str:
    tail = " symmetry-break" if symmetry_break else ""
    return f"triff {kind} b={params.b} k={params.k} n={params.n} m={m}{tail}"


def emit_dimacs(params: CodeParams, m: int, symmetry_break: bool = False) -> ConstraintDocument:
    _check_size(params, m)
    b, k, n = params.b, params.k, params.n

    def v(i, j, s):
        return 1 + (i * n + j) * b + s

    varmap = {(i, j, s): v(i, j, s) for i in range(m) for j in range(n) for s in range(b)}
    nxt = m * n * b + 1
    aux: dict[int, tuple] = {}
    e: dict[tuple[int, int, int], int] = {}
    for p, q in itertools.combinations(range(m), 2):
        for j in range(n):
            e[p, q, j] = nxt
            aux[nxt] = ("e", p, q, j)
            nxt += 1
    a: dict[tuple[tuple[int, ...], int], int] = {}
    for t in itertools.combinations(range(m), k):
        for j in range(n):
            a[t, j] = nxt
            aux[nxt] = ("a", t, j)
            nxt += 1

    clauses: list[list[int]] = []
    for i in range(m):
        for j in range(n):
            clauses.append([v(i, j, s) for s in range(b)])
            for s, r in itertools.combinations(range(b), 2):
                clauses.append([-v(i, j, s), -v(i, j, r)])
    for (p, q, j), ev in e.items():
        for s in range(b):
            clauses.append([-ev, -v(p, j, s), -v(q, j, s)])
    for (t, j), av in a.items():
        for p, q in itertools.combinations(t, 2):
            clauses.append([-av, e[p, q, j]])
    for t in itertools.combinations(range(m), k):
        clauses.append([a[t, j] for j in range(n)])

    if symmetry_break:
        clauses.extend([v(0, j, 0)] for j in range(n))
        clauses.extend([v(1, j, 0), v(1, j, 1)] for j in range(n))
        clauses.extend([-v(1, j, 1), v(1, j + 1, 1)] for j in range(n - 1))
        for i in range(1, m - 1):
            # q[j]: rows i and i+1 agree on columns 0..j; only the forcing direction is needed
            q = {}
            for j in range(n - 1):
                q[j] = nxt
                aux[nxt] = ("q", i, j)
                nxt += 1
            for j in range(n):
                guard = [] if j == 0 else [-q[j - 1]]
                for lo, hi in itertools.combinations(range(b), 2):
                    clauses.append(guard + [-v(i, j, hi), -v(i + 1, j, lo)])
                if j < n - 1:
                    for s in range(b):
                        clauses.append(guard + [-v(i, j, s), -v(i + 1, j, s), q[j]])

    num_vars = nxt - 1
    assert (num_vars, len(clauses)) == dimacs_counts(params, m, symmetry_break)
    lines = ["c " + _header("dimacs", params, m, symmetry_break)]
    for (i, j, s), vid in varmap.items():
        lines.append(f"c map v {vid} row {i} col {j} sym {s}")
    for vid, info in aux.items():
        if info[0] == "e":
            lines.append(f"c aux e {vid} pair {info[1]} {info[2]} col {info[3]}")
        elif info[0] == "a":
            lines.append(f"c aux a {vid} subset {','.join(map(str, info[1]))} col {info[2]}")
        else:
            lines.append(f"c aux q {vid} rows {info[1]} {info[1] + 1} col {info[2]}")
    lines.append(f"p cnf {num_vars} {len(clauses)}")
    lines.extend(" ".join(map(str, c)) + " 0" for c in clauses)
    return ConstraintDocument("cnf", params, m, "\n".join(lines) + "\n", varmap, aux)


def _cell(i: int, j: int) -> str:
    return f"x_{i}_{j}"


def _lex_leq(i: int, n: int, j: int = 0) -> str:
    """Row i is lexicographically <= row i+1 from column j on."""
    x, y = _cell(i, j), _cell(i + 1, j)
    if j == n - 1:
        return f"(<= {x} {y})"
    return f"(or (< {x} {y}) (and (= {x} {y}) {_lex_leq(i, n, j + 1)}))"


def emit_smtlib(params: CodeParams, m: int, symmetry_break: bool = False) -> ConstraintDocument:
    _check_size(params, m)
    b, k, n = params.b, params.k, params.n
    varmap = {(i, j): _cell(i, j) for i in range(m) for j in range(n)}
    lines = ["; " + _header("smtlib2", params, m, symmetry_break)]
    lines.extend(f"; map {name} row {i} col {j}" for (i, j), name in varmap.items())
    lines.extend(f"(declare-const {name} Int)" for name in varmap.values())
    lines.extend(f"(assert (and (<= 0 {name}) (<= {name} {b - 1})))" for name in varmap.values())
    for t in itertools.combinations(range(m), k):
        cols = [f"(distinct {' '.join(_cell(i, j) for i in t)})" for j in range(n)]
        body = cols[0] if n == 1 else f"(or {' '.join(cols)})"
        lines.append(f"(assert {body})")
    if symmetry_break:
        lines.extend(f"(assert (= {_cell(0, j)} 0))" for j in range(n))
        lines.extend(f"(assert (<= {_cell(1, j)} 1))" for j in range(n))
        lines.extend(f"(assert (<= {_cell(1, j)} {_cell(1, j + 1)}))" for j in range(n - 1))
        lines.extend(f"(assert {_lex_leq(i, n)})" for i in range(1, m - 1))
    lines += ["(check-sat)", "(get-model)"]
    return ConstraintDocument("smtlib2", params, m, "\n".join(lines) + "\n", varmap)


# -- reading documents back -------------------------------------------------------

_HEADER = re.compile(r"triff (dimacs|smtlib2) b=(\d+) k=(\d+) n=(\d+) m=(\d+)")


def load_document(text: str) -> ConstraintDocument:
    """Rebuild a document (with its variable map) from emitted text."""
    match = _HEADER.search(text.split("\n", 1)[0])
    if not match:
        raise DecodeError("first line is not a triff document header")
    kind, b, k, n, m = match.group(1), *map(int, match.groups()[1:])
    params = CodeParams(b, k, n)
    if kind == "dimacs":
        varmap, aux = {}, {}
        for line in text.splitlines():
            parts = line.split()
            if parts[:3] == ["c", "map", "v"]:
                varmap[int(parts[5]), int(parts[7]), int(parts[9])] = int(parts[3])
            elif parts[:3] == ["c", "aux", "e"]:
                aux[int(parts[3])] = ("e", int(parts[5]), int(parts[6]), int(parts[8]))
            elif parts[:3] == ["c", "aux", "a"]:
                t = tuple(int(x) for x in parts[5].split(","))
                aux[int(parts[3])] = ("a", t, int(parts[7]))
            elif parts[:3] == ["c", "aux", "q"]:
                aux[int(parts[3])] = ("q", int(parts[5]), int(parts[8]))
        return ConstraintDocument("cnf", params, m, text, varmap, aux)
    varmap = {}
    for line in text.splitlines():
        parts = line.split()
        if parts[:2] == [";", "map"]:
            varmap[int(parts[4]), int(parts[6])] = parts[2]
    return ConstraintDocument("smtlib2", params, m, text, varmap)


def parse_dimacs(text: str) -> tuple[int, list[list[int]]]:
    """Parse DIMACS CNF, checking the header counts against the body."""
    header = None
    clauses: list[list[int]] = []
    current: list[int] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf" or header is not None:
                raise EncodingError(f"line {lineno}: bad problem line {line!r}")
            header = (int(parts[2]), int(parts[3]))
            continue
        if header is None:
            raise EncodingError(f"line {lineno}: clause before problem line")
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(current)
                current = []
            else:
                if abs(lit) > header[0]:
                    raise EncodingError(f"line {lineno}: literal {lit} exceeds {header[0]} variables")
                current.append(lit)
    if current:
        raise EncodingError("last clause is not 0-terminated")
    if header is None:
        raise EncodingError("missing problem line")
    if len(clauses) != header[1]:
        raise EncodingError(f"header declares {header[1]} clauses, body has {len(clauses)}")
    return header[0], clauses


_SMT_COMMANDS = {"declare-const", "assert", "check-sat", "get-model"}


@dataclass
class SmtProblem:
    constants: list[str]
    assertions: list


def parse_smtlib(text: str) -> SmtProblem:
    """Validate and parse the SMT-LIB2 subset written by :func:`emit_smtlib`."""
    try:
        exprs = read_all(text)
    except SexprError as exc:
        raise EncodingError(str(exc)) from exc
    constants: list[str] = []
    assertions = []
    tail = []
    for expr in exprs:
        if not isinstance(expr, list) or not expr or not isinstance(expr[0], Sym):
            raise EncodingError("top-level item is not a command")
        cmd = expr[0].text
        if cmd not in _SMT_COMMANDS:
            raise EncodingError(f"command {cmd!r} outside the supported subset")
        if tail and cmd in ("declare-const", "assert"):
            raise EncodingError(f"{cmd} after check-sat")
        if cmd == "declare-const":
            if len(expr) != 3 or str(expr[2]) != "Int":
                raise EncodingError("declare-const must declare an Int")
            name = str(expr[1])
            if name in constants:
                raise EncodingError(f"constant {name} declared twice")
            constants.append(name)
        elif cmd == "assert":
            if len(expr) != 2:
                raise EncodingError("assert takes one term")
            _check_term(expr[1], set(constants))
            assertions.append(expr[1])
        else:
            tail.append(cmd)
    if tail != ["check-sat", "get-model"]:
        raise EncodingError("document must end with (check-sat) (get-model)")
    return SmtProblem(constants, assertions)


_BOOL_OPS = {"and", "or", "not", "=", "distinct", "<=", "<", ">=", ">"}


def _check_term(term, names: set[str]) -> None:
    if isinstance(term, Sym):
        if term.text not in names and not term.text.isdigit():
            raise EncodingError(f"unknown symbol {term.text!r} at offset {term.pos}")
        return
    if not term or not isinstance(term[0], Sym) or term[0].text not in _BOOL_OPS:
        raise EncodingError("unsupported term")
    for arg in term[1:]:
        _check_term(arg, names)


def _smt_eval(term, env: dict[str, int]):
    if isinstance(term, Sym):
        return int(term.text) if term.text.isdigit() else env[term.text]
    op, args = term[0].text, [_smt_eval(a, env) for a in term[1:]]
    if op == "and":
        return all(args)
    if op == "or":
        return any(args)
    if op == "not":
        return not args[0]
    if op == "=":
        return all(x == args[0] for x in args[1:])
    if op == "distinct":
        return len(set(args)) == len(args)
    pairs = zip(args, args[1:])
    if op == "<=":
        return all(x <= y for x, y in pairs)
    if op == "<":
        return all(x < y for x, y in pairs)
    if op == ">=":
        return all(x >= y for x, y in pairs)
    return all(x > y for x, y in pairs)


def _symbols(term) -> set[str]:
    if isinstance(term, Sym):
        return set() if term.text.isdigit() else {term.text}
    out: set[str] = set()
    for arg in term[1:]:
        out |= _symbols(arg)
    return out


def _bounds(term) -> tuple[str, int, int] | None:
    """Recognise ``(and (<= lo x) (<= x hi))``."""
    if not isinstance(term, list) or len(term) != 3 or str(term[0]) != "and":
        return None
    lo, hi = term[1], term[2]
    try:
        if str(lo[0]) == str(hi[0]) == "<=" and str(lo[2]) == str(hi[1]):
            return str(lo[2]), int(str(lo[1])), int(str(hi[2]))
    except (IndexError, TypeError, ValueError):
        return None
    return None


def smt_find_model(text: str) -> dict[str, int] | None:
    """Finite-domain model search for the emitted SMT-LIB2 subset.

    Every constant needs a bounds assertion; the search assigns constants in
    declaration order and checks each assertion as soon as its constants are
    all bound.  Exponential, meant for toy instances only.
    """
    problem = parse_smtlib(text)
    domains: dict[str, range] = {}
    rest = []
    for term in problem.assertions:
        bnd = _bounds(term)
        if bnd is not None:
            name, lo, hi = bnd
            old = domains.get(name, range(lo, hi + 1))
            domains[name] = range(max(old.start, lo), min(old.stop, hi + 1))
        else:
            rest.append(term)
    missing = [c for c in problem.constants if c not in domains]
    if missing:
        raise EncodingError(f"constants without finite bounds: {missing}")
    order = problem.constants
    pos = {c: i for i, c in enumerate(order)}
    ready: list[list] = [[] for _ in order]
    for term in rest:
        syms = _symbols(term)
        ready[max(pos[s] for s in syms) if syms else 0].append(term)
    env: dict[str, int] = {}

    def assign(i: int) -> bool:
        if i == len(order):
            return True
        name = order[i]
        for val in domains[name]:
            env[name] = val
            if all(_smt_eval(t, env) for t in ready[i]) and assign(i + 1):
                return True
        del env[name]
        return False

    return dict(env) if assign(0) else None


def format_smt_model(model: dict[str, int]) -> str:
    body = "\n".join(f"  (define-fun {k} () Int {v})" for k, v in model.items())
    return f"sat\n(\n{body}\n)\n"


def format_cnf_model(assignment: dict[int, bool]) -> str:
    lits = [v if val else -v for v, val in sorted(assignment.items())]
    return "s SATISFIABLE\nv " + " ".join(map(str, lits)) + " 0\n"


# -- decoding -------------------------------------------------------------------


def _parse_cnf_model(text: str) -> dict[int, bool]:
    status = None
    values: dict[int, bool] = {}
    for line in text.splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "s":
            status = parts[1].rstrip(":") if len(parts) > 1 else ""
        elif parts[0] == "v":
            for tok in parts[1:]:
                lit = int(tok)
                if lit:
                    values[abs(lit)] = lit > 0
    if status == "UNSATISFIABLE" or not values:
        raise DecodeError("no model present")
    if status not in (None, "SATISFIABLE"):
        raise DecodeError(f"unexpected solver status {status!r}")
    return values


_DEFINE = re.compile(r"\(define-fun\s+(\S+)\s+\(\)\s+Int\s+(\(-\s*\d+\)|-?\d+)\s*\)")


def _parse_smt_model(text: str) -> dict[str, int]:
    if re.search(r"^\s*unsat\b", text, re.M):
        raise DecodeError("no model present")
    model = {}
    for name, val in _DEFINE.findall(text):
        model[name] = int(val.replace("(", "").replace(")", "").replace(" ", ""))
    if not model:
        raise DecodeError("no model present")
    return model


def decode_assignment(doc: ConstraintDocument, model: str) -> Code:
    """Turn solver output into a verified code; any inconsistency is an error."""
    params, m = doc.params, doc.m
    rows = [[None] * params.n for _ in range(m)]
    if doc.kind == "cnf":
        values = _parse_cnf_model(model)
        for i in range(m):
            for j in range(params.n):
                on = [s for s in range(params.b) if values.get(doc.varmap[i, j, s], False)]
                if len(on) != 1:
                    raise DecodeError(f"cell ({i},{j}) has {len(on)} true symbol variables")
                rows[i][j] = on[0]
    else:
        values = _parse_smt_model(model)
        for (i, j), name in doc.varmap.items():
            if name not in values:
                raise DecodeError(f"model has no value for {name}")
            rows[i][j] = values[name]
    try:
        code = Code(params, tuple(Word(tuple(r), params.b) for r in rows))
    except CodeError as exc:
        raise DecodeError(f"decoded matrix is not a code: {exc}") from exc
    bad = first_violation(code)
    if bad is not None:
        raise DecodeError(f"decoded code fails verification at rows {bad}; encoder bug")
    return code


def forced_assignment(doc: ConstraintDocument, code: Code) -> str:
    """Solver-style model text that sets every variable by its definition."""
    if len(code) != doc.m or code.params != doc.params:
        raise EncodingError("code does not match document size/parameters")
    rows = [w.symbols for w in code.words]
    if doc.kind == "smtlib2":
        return format_smt_model({name: rows[i][j] for (i, j), name in doc.varmap.items()})
    values = {vid: rows[i][j] == s for (i, j, s), vid in doc.varmap.items()}
    for vid, info in doc.aux.items():
        if info[0] == "e":
            _, p, q, j = info
            values[vid] = rows[p][j] != rows[q][j]
        elif info[0] == "a":
            _, t, j = info
            values[vid] = len({rows[i][j] for i in t}) == len(t)
        else:
            _, i, j = info
            values[vid] = rows[i][: j + 1] == rows[i + 1][: j + 1]
    return format_cnf_model(values)


# -- solving -------------------------------------------------------------------------


def solve_with_dpll(doc: ConstraintDocument) -> str:
    """Solve a CNF document with the bundled toy DPLL; returns solver-style output."""
    num_vars, clauses = parse_dimacs(doc.text)
    result = dpll.solve(num_vars, clauses)
    if result is None:
        return "s UNSATISFIABLE\n"
    return format_cnf_model(result)


def solve_smt_finite(doc: ConstraintDocument) -> str:
    model = smt_find_model(doc.text)
    return "unsat\n" if model is None else format_smt_model(model)


def check_cnf_model(doc: ConstraintDocument, model: str) -> bool:
    """True iff the model satisfies every clause of the document."""
    _, clauses = parse_dimacs(doc.text)
    values = _parse_cnf_model(model)
    return all(any(values.get(abs(l), False) == (l > 0) for l in c) for c in clauses)


@dataclass(frozen=True)
class ExternalResult:
    status: str  # "sat" | "unsat" | "unknown"
    output: str
    returncode: int


def run_external_solver(
    doc: ConstraintDocument, solver: str | None = None, timeout: float | None = None
) -> ExternalResult:
    """Run a DIMACS solver executable (default: ``$TRIFF_SAT_SOLVER``) on the document."""
    if doc.kind != "cnf":
        raise EncodingError("external solvers take DIMACS documents")
    solver = solver or os.environ.get(SOLVER_ENV)
    if not solver:
        raise EncodingError(f"no solver configured; set {SOLVER_ENV}")
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "instance.cnf"
        path.write_text(doc.text)
        proc = subprocess.run(
            [solver, str(path)], capture_output=True, text=True, timeout=timeout, check=False
        )
    status = "unknown"
    for line in proc.stdout.splitlines():
        if line.startswith("s ") and line[2:].split():
            # some solvers append the instance path: "s UNSATISFIABLE: x.cnf"
            word = line[2:].split()[0].rstrip(":")
            status = {"SATISFIABLE": "sat", "UNSATISFIABLE": "unsat"}.get(word, "unknown")
    return ExternalResult(status, proc.stdout, proc.returncode)
