"""Rank-rho MSO types (Hintikka types) of finite structures.

The rank-0 type is the atomic diagram of the designated elements and sets.
The rank-rho type is the pair (types of all one-point expansions, types of
all one-set expansions) at rank rho-1.  Two structures agree on every
sentence of quantifier rank <= rho exactly when their rank-rho types are
equal.
"""
from __future__ import annotations

from dataclasses import dataclass

from .formulas import GuardError
from .structures import LabStructure, StructureError

MAX_DOMAIN = 8  # for rank >= 2
MAX_DOMAIN_RANK1 = 16
MAX_WORK = 5_000_000


class VocabularyError(StructureError):
    pass


@dataclass(frozen=True)
class RankType:
    rank: int
    payload: object  # atomic diagram (rank 0) or (frozenset, frozenset)

    def __str__(self) -> str:
        if self.rank == 0:
            return f"RankType(0, {self.payload})"
        pts, sts = self.payload
        return f"RankType({self.rank}, {len(pts)} point / {len(sts)} set extensions)"


def check_guard(s: LabStructure, rho: int, max_domain: int = MAX_DOMAIN,
                max_work: int = MAX_WORK) -> None:
    if rho < 0:
        raise ValueError("rank must be >= 0")
    n = s.size
    if rho >= 2 and n > max_domain:
        raise GuardError(f"domain {n} exceeds {max_domain} for rank {rho}")
    if rho == 1 and n > MAX_DOMAIN_RANK1:
        raise GuardError(f"domain {n} exceeds {MAX_DOMAIN_RANK1} for rank 1")
    if rho >= 2 and (n + 2**n) ** (rho - 1) * (n + 2 ** (len(s.constants) + rho)) > max_work:
        raise GuardError(f"rank {rho} on {n} elements exceeds the work guard {max_work}")


def atomic_diagram(child, letters, pts: tuple[int, ...], sets: tuple[int, ...]) -> tuple:
    """Canonical atomic facts about the designated points and sets."""
    k = len(pts)
    eq = tuple((i, j) for i in range(k) for j in range(i + 1, k) if pts[i] == pts[j])
    succ = tuple(
        (a, i, j)
        for a, row in enumerate(child)
        for i in range(k)
        for j in range(k)
        if row[pts[i]] == pts[j]
    )
    lets = None if letters is None else tuple(letters[p] for p in pts)
    mem = tuple(tuple((X >> p) & 1 for p in pts) for X in sets)
    return (eq, succ, lets, mem)


class _TypeEngine:
    def __init__(self, s: LabStructure):
        self.s = s
        self.n = s.size
        self.child = s.successor_table()
        self.letters = s.letters
        self.memo: dict = {}

    def diagram(self, pts, sets):
        return atomic_diagram(self.child, self.letters, pts, sets)

    def payload(self, pts: tuple[int, ...], sets: tuple[int, ...], r: int):
        key = (pts, sets, r)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        if r == 0:
            val = self.diagram(pts, sets)
        else:
            point_ext = frozenset(self.payload(pts + (x,), sets, r - 1) for x in range(self.n))
            if r == 1:
                # a rank-0 type sees a new set only through which designated points it holds
                distinct = sorted(set(pts))
                masks = []
                for bits in range(1 << len(distinct)):
                    mask = 0
                    for i, p in enumerate(distinct):
                        if (bits >> i) & 1:
                            mask |= 1 << p
                    masks.append(mask)
                set_ext = frozenset(self.diagram(pts, sets + (m,)) for m in masks)
            else:
                set_ext = frozenset(
                    self.payload(pts, sets + (m,), r - 1) for m in range(1 << self.n)
                )
            val = (point_ext, set_ext)
        self.memo[key] = val
        return val


def rank_type(s: LabStructure, rho: int, max_domain: int = MAX_DOMAIN,
              max_work: int = MAX_WORK) -> RankType:
    check_guard(s, rho, max_domain, max_work)
    engine = _TypeEngine(s)
    pts = tuple(e for _, e in s.constants)
    sets = tuple(m for _, m in s.sets)
    return RankType(rho, engine.payload(pts, sets, rho))


def check_vocabulary(a: LabStructure, b: LabStructure) -> None:
    if a.vocabulary_key() != b.vocabulary_key():
        raise VocabularyError(
            "structures have different vocabularies: "
            f"{a.vocabulary_key()} vs {b.vocabulary_key()}"
        )


def ef_equivalent(a: LabStructure, b: LabStructure, rho: int, **guards) -> bool:
    """True iff a and b agree on all MSO sentences of quantifier rank <= rho."""
    check_vocabulary(a, b)
    return rank_type(a, rho, **guards) == rank_type(b, rho, **guards)
