"""Command-line front end: ``triff <subcommand> ...``.

Exit codes: 0 success or a positive answer, 10 "does not exist" / UNSAT /
negative answer, 20 budget exceeded, 1 usage or input error, 2 a
verification failure.  Results go to stdout, diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import bounds, encoders, ledger, searcher
from .hashcore import CodeError, CodeParams, first_violation, format_code, read_code, \
    relation_R, witness_family, write_code
from .msolab import formulas, game, structures, types

OK, NO, BUDGET, USAGE, VERIFY = 0, 10, 20, 1, 2
DEFAULT_LEDGER = "triff-ledger.txt"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _params(args) -> CodeParams:
    return CodeParams(args.b, args.k, args.n)


def _config(args) -> searcher.SearchConfig:
    return searcher.SearchConfig(
        max_nodes=args.budget_nodes,
        max_seconds=args.budget_secs,
        symmetry=args.symmetry,
        deterministic=args.deterministic,
        threads=args.threads,
    )


def _stats(v: searcher.SearchVerdict) -> str:
    s = v.stats
    return f"nodes={s.nodes} elapsed={s.elapsed:.3f}s peak_depth={s.peak_depth}"


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


# -- subcommands ---------------------------------------------------------------


def cmd_verify(args) -> int:
    code = read_code(args.codefile)
    bad = first_violation(code)
    if bad is None:
        print(f"k-hash: yes ({len(code)} words, {code.params})")
        return OK
    rows = ", ".join(str(code.words[i]) for i in bad)
    print(f"k-hash: no (unhashed: {rows})")
    return VERIFY


def cmd_search(args) -> int:
    params, config = _params(args), _config(args)
    verdict = searcher.search_exact(params, args.size, config)
    if isinstance(verdict, searcher.Found):
        code = verdict.code
        if first_violation(code) is not None:
            print("certificate failed independent verification", file=sys.stderr)
            return VERIFY
        print(f"found: {len(code)} words ({_stats(verdict)})")
        text = format_code(code, f"{len(code)}-word ({params.b},{params.k})-hash code")
        if args.out:
            _emit(text, args.out)
            print(f"certificate: {args.out}")
        else:
            sys.stdout.write(text)
        if args.prove_optimal:
            nxt = searcher.search_exact(params, args.size + 1, config)
            if isinstance(nxt, searcher.ExhaustedNoSolution):
                print(f"optimal: yes (size {args.size + 1} exhausted, {_stats(nxt)})")
            elif isinstance(nxt, searcher.Found):
                print(f"optimal: no (size {args.size + 1} exists)")
            else:
                print(f"optimal: unknown (budget exceeded, {_stats(nxt)})")
                return BUDGET
        return OK
    if isinstance(verdict, searcher.ExhaustedNoSolution):
        print(f"none: no {args.size}-word code exists for {params} ({_stats(verdict)})")
        return NO
    print(f"budget exceeded ({_stats(verdict)})")
    return BUDGET


def cmd_maxsize(args) -> int:
    params = _params(args)
    res = searcher.max_size(params, _config(args))
    print(f"{params}: lower={res.lower} upper={res.upper} status={res.status}")
    cert = args.out
    if cert is None and args.ledger and res.lower > 0:
        cert = str(Path(args.ledger).parent / f"cert-{params.b}-{params.k}-{params.n}.txt")
    if cert and res.certificate is not None:
        write_code(res.certificate, cert, f"{res.lower}-word certificate, status {res.status}")
        print(f"certificate: {cert}")
    if args.ledger:
        entry = ledger.LedgerEntry((params.b, params.k, params.n), res.lower, res.upper,
                                   res.status, "search", cert or "")
        ledger.ledger_add(args.ledger, entry)
        print(f"ledger: {args.ledger}")
    return OK if res.status == "exact" else BUDGET


def cmd_encode(args) -> int:
    params = _params(args)
    emit = encoders.emit_dimacs if args.format == "dimacs" else encoders.emit_smtlib
    doc = emit(params, args.size, symmetry_break=args.symmetry_break)
    _emit(doc.text, args.out)
    if args.out:
        print(f"wrote {args.format} document: {doc.num_vars} variables -> {args.out}")
    return OK


def cmd_decode(args) -> int:
    doc = encoders.load_document(Path(args.doc).read_text(encoding="utf-8"))
    model = Path(args.model).read_text(encoding="utf-8")
    try:
        code = encoders.decode_assignment(doc, model)
    except encoders.DecodeError as exc:
        if str(exc) == "no model present":
            print("unsat: no model present")
            return NO
        print(f"decode failed: {exc}", file=sys.stderr)
        return VERIFY
    _emit(format_code(code, "decoded from solver model"), args.out)
    if args.out:
        print(f"decoded {len(code)} words -> {args.out}")
    return OK


def cmd_bounds(args) -> int:
    profile = bounds.BoundProfile(args.C_upper, args.C_improved, args.C_lower)
    print(f"{'n':>4} {'classic_upper':>16} {'improved_upper':>16} {'km_lower':>16}")
    for n in args.n:
        row = profile.evaluate(n)
        print(f"{n:>4} {row['classic_upper']:>16.6g} {row['improved_upper']:>16.6g} "
              f"{row['km_lower']:>16.6g}")
    return OK


def cmd_witness(args) -> int:
    x, y, z = witness_family(args.n, args.ell)
    print(f"X {x}\nY {y}\nZ {z}")
    print(f"R: {'true' if relation_R(x, y, z) else 'false'}")
    return OK


def cmd_ef(args) -> int:
    left = structures.load_structure(args.left)
    right = structures.load_structure(args.right)
    winner, trace = game.ef_game_search(left, right, args.rank)
    equivalent = types.ef_equivalent(left, right, args.rank)
    if equivalent != (winner == "Bob"):
        print("rank types and game search disagree", file=sys.stderr)
        return VERIFY
    print(f"equivalent at rank {args.rank}: {'yes' if equivalent else 'no'} (winner: {winner})")
    if args.trace:
        print(trace)
    return OK if equivalent else NO


def cmd_mso_eval(args) -> int:
    s = structures.load_structure(args.structure)
    text = args.formula
    if text.startswith("@"):
        text = Path(text[1:]).read_text(encoding="utf-8")
    value = formulas.evaluate(s, formulas.parse_formula(text, s.branching))
    print("true" if value else "false")
    return OK if value else NO


def cmd_ledger(args) -> int:
    path = args.file
    if args.action == "show":
        entries = ledger.ledger_load(path)
        if not entries:
            print(f"{path}: empty ledger")
        for e in entries:
            print(e.format())
        return OK
    if args.action == "add":
        missing = [f for f in ("b", "k", "n", "lower", "upper", "status", "method")
                   if getattr(args, f) is None]
        if missing:
            raise UsageError(f"triff ledger: error: add needs --{' --'.join(missing)}")
        entry = ledger.LedgerEntry((args.b, args.k, args.n), args.lower, args.upper,
                                   args.status, args.method, args.certificate or "")
        ledger.ledger_add(path, entry)
        print(f"added {entry.format()}")
        return OK
    entries = ledger.ledger_load(path)
    config = searcher.SearchConfig(max_seconds=args.budget_secs)
    issues = bounds.ledger_check(entries, recompute=args.recompute,
                                 base_dir=Path(path).parent, search_config=config)
    for issue in issues:
        print(issue)
    print(f"{len(entries)} entries, {len(issues)} issues")
    return VERIFY if issues else OK


# -- parser --------------------------------------------------------------------


def _add_params(p, size: bool = False) -> None:
    p.add_argument("--b", type=int, default=3, help="alphabet size (default 3)")
    p.add_argument("--k", type=int, default=3, help="hashing order (default 3)")
    p.add_argument("--n", type=int, required=True, help="word length")
    if size:
        p.add_argument("--size", type=int, required=True, help="number of codewords m")


def _add_budget(p) -> None:
    p.add_argument("--budget-nodes", type=int)
    p.add_argument("--budget-secs", type=float)
    p.add_argument("--symmetry", choices=[s.value for s in searcher.Symmetry], default="full")
    p.add_argument("--deterministic", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                   help="worker processes (default: all CPUs)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="triff", description="Hash codes, solver documents and finite MSO games.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify", help="check a code file")
    p.add_argument("codefile")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search", help="find a code of a given size")
    _add_params(p, size=True)
    _add_budget(p)
    p.add_argument("--prove-optimal", action="store_true",
                   help="also show that size+1 does not exist")
    p.add_argument("--out", help="write the certificate here instead of stdout")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("maxsize", help="largest code size")
    _add_params(p)
    _add_budget(p)
    p.add_argument("--out", help="certificate path")
    p.add_argument("--ledger", help="record the result in this ledger")
    p.set_defaults(func=cmd_maxsize)

    p = sub.add_parser("encode", help="write a CNF or SMT-LIB2 existence model")
    p.add_argument("--format", choices=["dimacs", "smtlib2"], required=True)
    _add_params(p, size=True)
    p.add_argument("--symmetry-break", action="store_true",
                   help="add normal-form constraints (zero first row, sorted rows)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="turn a solver model into a verified code")
    p.add_argument("--doc", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("bounds", help="evaluate the asymptotic bound formulas")
    p.add_argument("--n", type=int, nargs="+", required=True)
    p.add_argument("--C-upper", dest="C_upper", type=float, default=2.0)
    p.add_argument("--C-improved", dest="C_improved", type=float, default=1.0)
    p.add_argument("--C-lower", dest="C_lower", type=float, default=1.0)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("witness", help="print the binary witness triple")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("ef", help="decide rank-rho MSO equivalence of two structure files")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--trace", action="store_true", help="print an optimal game line")
    p.set_defaults(func=cmd_ef)

    p = sub.add_parser("mso-eval", help="evaluate a sentence on a structure file")
    p.add_argument("--structure", required=True)
    p.add_argument("--formula", required=True, help="formula text, or @path")
    p.set_defaults(func=cmd_mso_eval)

    p = sub.add_parser("ledger", help="results ledger")
    p.add_argument("action", choices=["show", "add", "check"])
    p.add_argument("--file", default=DEFAULT_LEDGER, help=f"default {DEFAULT_LEDGER}")
    for name in ("b", "k", "n", "lower", "upper"):
        p.add_argument(f"--{name}", type=int)
    p.add_argument("--status", choices=ledger.STATUSES)
    p.add_argument("--method", choices=ledger.METHODS)
    p.add_argument("--certificate")
    p.add_argument("--recompute", action="store_true", help="check: recompute exact values")
    p.add_argument("--budget-secs", type=float, default=600.0, help="check: search time limit")
    p.set_defaults(func=cmd_ledger)
    return parser


_INPUT_ERRORS = (
    CodeError,
    OSError,
    json.JSONDecodeError,
    encoders.EncodingError,
    encoders.DecodeError,
    structures.StructureError,
    formulas.FormulaError,
    ledger.LedgerError,
    ValueError,
)


def run(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except SystemExit as exc:  # --help
        return exc.code if isinstance(exc.code, int) else USAGE
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return USAGE
    except _INPUT_ERRORS as exc:
        print(f"triff: error: {exc}", file=sys.stderr)
        return USAGE


def main() -> None:
    sys.exit(run())
