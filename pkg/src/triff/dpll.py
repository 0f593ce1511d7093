"""A small DPLL solver for cross-checking encodings on toy instances.

Unit propagation plus branching on the most frequent unassigned variable.
No clause learning, so keep it to a few hundred variables.
"""
from __future__ import annotations

from collections import Counter
from typing import Sequence


def solve(num_vars: int, clauses: Sequence[Sequence[int]]) -> dict[int, bool] | None:
    """Return a satisfying assignment ``{var: value}`` or ``None`` if UNSAT."""
    clauses = [tuple(c) for c in clauses]
    if any(not c for c in clauses):
        return None
    watch: dict[int, list[int]] = {}
    for ci, clause in enumerate(clauses):
        for lit in clause:
            if not 1 <= abs(lit) <= num_vars:
                raise ValueError(f"literal {lit} outside 1..{num_vars}")
            watch.setdefault(lit, []).append(ci)
    value: dict[int, bool] = {}

    def lit_true(lit: int) -> bool | None:
        v = value.get(abs(lit))
        if v is None:
            return None
        return v if lit > 0 else not v

    def propagate(trail: list[int], queue: list[int]) -> bool:
        while queue:
            lit = queue.pop()
            # clauses containing -lit may have become unit or empty
            for ci in watch.get(-lit, ()):
                unassigned = None
                count = 0
                sat = False
                for other in clauses[ci]:
                    t = lit_true(other)
                    if t:
                        sat = True
                        break
                    if t is None:
                        count += 1
                        unassigned = other
                if sat:
                    continue
                if count == 0:
                    return False
                if count == 1:
                    value[abs(unassigned)] = unassigned > 0
                    trail.append(abs(unassigned))
                    queue.append(unassigned)
        return True

    def assign(lit: int, trail: list[int]) -> bool:
        value[abs(lit)] = lit > 0
        trail.append(abs(lit))
        return propagate(trail, [lit])

    def undo(trail: list[int]) -> None:
        for var in trail:
            del value[var]

    def pick() -> int | None:
        counts: Counter[int] = Counter()
        for clause in clauses:
            if any(lit_true(lit) for lit in clause):
                continue
            for lit in clause:
                if abs(lit) not in value:
                    counts[lit] += 1
        if not counts:
            return None
        return counts.most_common(1)[0][0]

    def search() -> bool:
        lit = pick()
        if lit is None:
            return all(any(lit_true(l) for l in c) for c in clauses)
        for choice in (lit, -lit):
            trail: list[int] = []
            if assign(choice, trail) and search():
                return True
            undo(trail)
        return False

    root: list[int] = []
    units = [c[0] for c in clauses if len(c) == 1]
    for u in units:
        t = lit_true(u)
        if t is False:
            return None
        if t is None and not assign(u, root):
            return None
    if not search():
        return None
    return {v: value.get(v, False) for v in range(1, num_vars + 1)}
