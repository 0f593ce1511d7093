"""MSO formulas over words and trees: syntax, quantifier rank, evaluation.

Concrete syntax (s-expressions)::

    (and f ...)  (or f ...)  (not f)  (implies f g)  (iff f g)
    (exists1 x f)  (forall1 x f)  (existsS X f)  (forallS X f)
    (succ a x y)  (in x X)  (= x y)  (letter a x)

``(and)`` is true and ``(or)`` is false.  Names not bound by a quantifier
refer to the structure's constants and sets, or to the caller's assignment.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

from .._sexpr import SexprError, Sym, position, read_one
from .structures import LabStructure, RESERVED

EVAL_GUARD = 14


class FormulaError(ValueError):
    pass


class GuardError(FormulaError):
    pass


# -- syntax -----------------------------------------------------------------------------


@dataclass(frozen=True)
class Succ:
    a: int
    x: str
    y: str


@dataclass(frozen=True)
class In:
    x: str
    X: str


@dataclass(frozen=True)
class Eq:
    x: str
    y: str


@dataclass(frozen=True)
class Letter:
    a: str
    x: str


@dataclass(frozen=True)
class Not:
    f: "Formula"


@dataclass(frozen=True)
class And:
    args: tuple


@dataclass(frozen=True)
class Or:
    args: tuple


@dataclass(frozen=True)
class Implies:
    f: "Formula"
    g: "Formula"


@dataclass(frozen=True)
class Iff:
    f: "Formula"
    g: "Formula"


@dataclass(frozen=True)
class Quant:
    op: str  # exists1 | forall1 | existsS | forallS
    var: str
    body: "Formula"

    @property
    def is_set(self) -> bool:
        return self.op.endswith("S")

    @property
    def is_exists(self) -> bool:
        return self.op.startswith("exists")


Formula = Union[Succ, In, Eq, Letter, Not, And, Or, Implies, Iff, Quant]
_QUANTS = ("exists1", "forall1", "existsS", "forallS")


def parse_formula(text: str, branching: int | None = None) -> Formula:
    """Parse the s-expression syntax; errors carry the source offset."""
    try:
        expr = read_one(text)
    except SexprError as exc:
        raise FormulaError(str(exc)) from None
    return _build(expr, {}, branching, len(text))


def _err(msg: str, expr) -> FormulaError:
    return FormulaError(f"{msg} (at offset {position(expr)})")


def _name(expr, scope, want: str) -> str:
    if not isinstance(expr, Sym):
        raise _err(f"expected a {want} name", expr)
    name = expr.text
    if name in RESERVED:
        raise _err(f"reserved word {name!r} used as a name", expr)
    bound = scope.get(name)
    if bound is not None and bound != want:
        raise _err(f"{name!r} is bound as a {bound} variable, used as a {want}", expr)
    return name


def _build(expr, scope: dict[str, str], branching, end) -> Formula:
    if not isinstance(expr, list):
        raise _err(f"expected a formula, got {expr.text!r}", expr)
    if not expr or not isinstance(expr[0], Sym):
        raise _err("empty or malformed form", expr)
    head, args = expr[0].text, expr[1:]

    def arity(k):
        if len(args) != k:
            raise _err(f"{head} takes {k} arguments, got {len(args)}", expr)

    if head in ("and", "or"):
        subs = tuple(_build(a, scope, branching, end) for a in args)
        return And(subs) if head == "and" else Or(subs)
    if head == "not":
        arity(1)
        return Not(_build(args[0], scope, branching, end))
    if head in ("implies", "iff"):
        arity(2)
        f, g = (_build(a, scope, branching, end) for a in args)
        return Implies(f, g) if head == "implies" else Iff(f, g)
    if head in _QUANTS:
        arity(2)
        sort = "set" if head.endswith("S") else "point"
        if not isinstance(args[0], Sym) or args[0].text in RESERVED:
            raise _err(f"{head} needs a variable name", expr)
        var = args[0].text
        inner = dict(scope)
        inner[var] = sort
        return Quant(head, var, _build(args[1], inner, branching, end))
    if head == "succ":
        arity(3)
        if not isinstance(args[0], Sym) or not args[0].text.isdigit():
            raise _err("successor index must be a non-negative integer", args[0])
        a = int(args[0].text)
        if branching is not None and a >= branching:
            raise _err(f"unknown successor index {a}", args[0])
        return Succ(a, _name(args[1], scope, "point"), _name(args[2], scope, "point"))
    if head == "in":
        arity(2)
        return In(_name(args[0], scope, "point"), _name(args[1], scope, "set"))
    if head == "=":
        arity(2)
        return Eq(_name(args[0], scope, "point"), _name(args[1], scope, "point"))
    if head == "letter":
        arity(2)
        if not isinstance(args[0], Sym):
            raise _err("letter needs a letter symbol", args[0])
        return Letter(args[0].text, _name(args[1], scope, "point"))
    raise _err(f"unknown form {head!r}", expr)


def to_text(f: Formula) -> str:
    if isinstance(f, Succ):
        return f"(succ {f.a} {f.x} {f.y})"
    if isinstance(f, In):
        return f"(in {f.x} {f.X})"
    if isinstance(f, Eq):
        return f"(= {f.x} {f.y})"
    if isinstance(f, Letter):
        return f"(letter {f.a} {f.x})"
    if isinstance(f, Not):
        return f"(not {to_text(f.f)})"
    if isinstance(f, (And, Or)):
        head = "and" if isinstance(f, And) else "or"
        return "(" + " ".join([head, *map(to_text, f.args)]) + ")"
    if isinstance(f, Implies):
        return f"(implies {to_text(f.f)} {to_text(f.g)})"
    if isinstance(f, Iff):
        return f"(iff {to_text(f.f)} {to_text(f.g)})"
    return f"({f.op} {f.var} {to_text(f.body)})"


def quantifier_rank(f: Formula) -> int:
    if isinstance(f, Quant):
        return 1 + quantifier_rank(f.body)
    if isinstance(f, Not):
        return quantifier_rank(f.f)
    if isinstance(f, (And, Or)):
        return max((quantifier_rank(g) for g in f.args), default=0)
    if isinstance(f, (Implies, Iff)):
        return max(quantifier_rank(f.f), quantifier_rank(f.g))
    return 0


def free_names(f: Formula, bound: frozenset = frozenset()) -> set[str]:
    if isinstance(f, Quant):
        return free_names(f.body, bound | {f.var})
    if isinstance(f, Not):
        return free_names(f.f, bound)
    if isinstance(f, (And, Or)):
        return set().union(*(free_names(g, bound) for g in f.args)) if f.args else set()
    if isinstance(f, (Implies, Iff)):
        return free_names(f.f, bound) | free_names(f.g, bound)
    if isinstance(f, Succ):
        names = {f.x, f.y}
    elif isinstance(f, In):
        names = {f.x, f.X}
    elif isinstance(f, Eq):
        names = {f.x, f.y}
    else:
        names = {f.x}
    return names - bound


# -- evaluation ---------------------------------------------------------------------------


def evaluate(
    s: LabStructure,
    f: Formula | str,
    assignment: Mapping[str, object] | None = None,
    guard: int = EVAL_GUARD,
) -> bool:
    """Tarskian truth of f in s; set quantifiers range over all subsets.

    ``assignment`` maps free names to an element (index or label) or to a
    collection of elements (a set value).  Structure constants and sets are
    available by name.
    """
    if isinstance(f, str):
        f = parse_formula(f, s.branching)
    if s.size > guard:
        raise GuardError(f"domain of {s.size} elements exceeds evaluation guard {guard}")
    points: dict[str, int] = dict(s.constants)
    sets: dict[str, int] = dict(s.sets)
    for name, value in (assignment or {}).items():
        if isinstance(value, (set, frozenset, list, tuple)):
            sets[name] = s.mask_of(value)
            points.pop(name, None)
        else:
            points[name] = s.element(value)
            sets.pop(name, None)
    fn = _compile(f, s, {}, points, sets)
    return bool(fn([None] * _depth(f)))


def _depth(f: Formula) -> int:
    if isinstance(f, Quant):
        return 1 + _depth(f.body)
    if isinstance(f, Not):
        return _depth(f.f)
    if isinstance(f, (And, Or)):
        return max((_depth(g) for g in f.args), default=0)
    if isinstance(f, (Implies, Iff)):
        return max(_depth(f.f), _depth(f.g))
    return 0


def _compile(f, s: LabStructure, scope, points, sets):
    """Compile to a closure over a slot list; scope maps bound names to (sort, slot)."""

    def point(name):
        if name in scope:
            sort, slot = scope[name]
            if sort != "point":
                raise FormulaError(f"{name!r} is a set variable used as a point")
            return lambda env: env[slot]
        if name in points:
            v = points[name]
            return lambda env: v
        raise FormulaError(f"unbound point name {name!r}")

    def setv(name):
        if name in scope:
            sort, slot = scope[name]
            if sort != "set":
                raise FormulaError(f"{name!r} is a point variable used as a set")
            return lambda env: env[slot]
        if name in sets:
            v = sets[name]
            return lambda env: v
        raise FormulaError(f"unbound set name {name!r}")

    if isinstance(f, Succ):
        if f.a >= s.branching:
            raise FormulaError(f"unknown successor index {f.a}")
        child = s.successor_table()[f.a]
        tx, ty = point(f.x), point(f.y)
        return lambda env: child[tx(env)] == ty(env)
    if isinstance(f, In):
        tx, tX = point(f.x), setv(f.X)
        return lambda env: (tX(env) >> tx(env)) & 1 == 1
    if isinstance(f, Eq):
        tx, ty = point(f.x), point(f.y)
        return lambda env: tx(env) == ty(env)
    if isinstance(f, Letter):
        tx = point(f.x)
        letters = s.letters
        if letters is None:
            return lambda env: False
        return lambda env: letters[tx(env)] == f.a
    if isinstance(f, Not):
        g = _compile(f.f, s, scope, points, sets)
        return lambda env: not g(env)
    if isinstance(f, And):
        gs = [_compile(g, s, scope, points, sets) for g in f.args]
        return lambda env: all(g(env) for g in gs)
    if isinstance(f, Or):
        gs = [_compile(g, s, scope, points, sets) for g in f.args]
        return lambda env: any(g(env) for g in gs)
    if isinstance(f, Implies):
        g, h = _compile(f.f, s, scope, points, sets), _compile(f.g, s, scope, points, sets)
        return lambda env: (not g(env)) or h(env)
    if isinstance(f, Iff):
        g, h = _compile(f.f, s, scope, points, sets), _compile(f.g, s, scope, points, sets)
        return lambda env: g(env) == h(env)
    slot = len(scope)
    inner = dict(scope)
    inner[f.var] = ("set" if f.is_set else "point", slot)
    body = _compile(f.body, s, inner, points, sets)
    values = range(1 << s.size) if f.is_set else range(s.size)
    if f.is_exists:
        def run(env):
            for v in values:
                env[slot] = v
                if body(env):
                    return True
            return False
    else:
        def run(env):
            for v in values:
                env[slot] = v
                if not body(env):
                    return False
            return True
    return run


# -- random sentences -----------------------------------------------------------------------


@dataclass(frozen=True)
class Vocabulary:
    constants: tuple[str, ...] = ()
    sets: tuple[str, ...] = ()
    letters: tuple[str, ...] = ()
    branching: int = 1


def vocabulary_of(*structures: LabStructure) -> Vocabulary:
    """Shared vocabulary; letters are the union of letters used."""
    first = structures[0]
    letters = sorted({a for s in structures if s.letters for a in s.letters})
    return Vocabulary(first.constant_names, first.set_names, tuple(letters), first.branching)


def sample_sentences(vocab: Vocabulary, rho: int, count: int, seed: int = 0,
                     max_size: int = 9) -> list[Formula]:
    """Pseudo-random sentences of quantifier rank <= rho, deterministic in seed."""
    rng = random.Random(seed)
    taken = set(vocab.constants) | set(vocab.sets)

    def fresh(prefix: str, i: int) -> str:
        name = f"{prefix}{i}"
        while name in taken:
            name = "_" + name
        return name

    def atom(points, setnames):
        kinds = ["eq"] * 2 + ["succ"] * 3
        if vocab.letters:
            kinds += ["letter"] * 3
        if setnames:
            kinds += ["in"] * 3
        kind = rng.choice(kinds)
        if kind == "eq":
            return Eq(rng.choice(points), rng.choice(points))
        if kind == "succ":
            return Succ(rng.randrange(vocab.branching), rng.choice(points), rng.choice(points))
        if kind == "letter":
            return Letter(rng.choice(vocab.letters), rng.choice(points))
        return In(rng.choice(points), rng.choice(setnames))

    def gen(budget, points, setnames, size):
        if budget > 0 and (not points or rng.random() < 0.45):
            is_set = bool(points) and rng.random() < 0.4
            op = rng.choice(("existsS", "forallS") if is_set else ("exists1", "forall1"))
            if is_set:
                var = fresh("X", len(setnames))
                body = gen(budget - 1, points, setnames + [var], size - 1)
            else:
                var = fresh("x", len(points))
                body = gen(budget - 1, points + [var], setnames, size - 1)
            return Quant(op, var, body)
        if not points:
            return And(()) if rng.random() < 0.5 else Or(())
        if size <= 1 or rng.random() < 0.35:
            return atom(points, setnames)
        r = rng.random()
        if r < 0.2:
            return Not(gen(budget, points, setnames, size - 1))
        left = gen(budget, points, setnames, size // 2)
        right = gen(budget, points, setnames, size // 2)
        if r < 0.5:
            return And((left, right))
        if r < 0.8:
            return Or((left, right))
        if r < 0.9:
            return Implies(left, right)
        return Iff(left, right)

    consts = list(vocab.constants)
    return [gen(rho, consts, list(vocab.sets), max_size) for _ in range(count)]


def sentence_agreement(a: LabStructure, b: LabStructure, sentences: Sequence[Formula],
                       guard: int = EVAL_GUARD) -> list[Formula]:
    """Sentences on which the two structures disagree."""
    return [f for f in sentences if evaluate(a, f, guard=guard) != evaluate(b, f, guard=guard)]
