"""Exhaustive Ehrenfeucht-Fraisse game search for MSO.

Alice (spoiler) picks, each round, a structure and either an element (point
move) or a subset (set move); Bob (duplicator) answers in the other
structure.  Bob wins when the designated elements, chosen points and chosen
sets form a partial isomorphism after the last round.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .structures import LabStructure
from .types import check_guard, check_vocabulary


@dataclass(frozen=True)
class Round:
    kind: str  # "point" | "set"
    side: str  # structure Alice played in: "A" | "B"
    choice: object  # element label, or sorted list of labels
    response: object

    def __str__(self) -> str:
        other = "B" if self.side == "A" else "A"
        return (f"Alice {self.kind} move in {self.side}: {self.choice!r}; "
                f"Bob answers in {other}: {self.response!r}")


@dataclass(frozen=True)
class GameTrace:
    rounds: tuple[Round, ...]
    winner: str
    rank: int

    def __str__(self) -> str:
        lines = [f"{self.rank}-round MSO game, winner: {self.winner}"]
        lines += [f"  {i + 1}. {r}" for i, r in enumerate(self.rounds)]
        return "\n".join(lines)


@dataclass
class _Side:
    s: LabStructure
    child: list = field(init=False)

    def __post_init__(self):
        self.child = self.s.successor_table()


def is_partial_isomorphism(A: _Side, pa, Xa, B: _Side, pb, Xb) -> bool:
    """Checks equality, successor, letter and membership facts pairwise."""
    la, lb = A.s.letters, B.s.letters
    for i in range(len(pa)):
        x, y = pa[i], pb[i]
        if la is not None and la[x] != lb[y]:
            return False
        for S, T in zip(Xa, Xb):
            if ((S >> x) & 1) != ((T >> y) & 1):
                return False
        for j in range(len(pa)):
            if (x == pa[j]) != (y == pb[j]):
                return False
            for a in range(len(A.child)):
                if (A.child[a][x] == pa[j]) != (B.child[a][y] == pb[j]):
                    return False
    return True


class _Game:
    def __init__(self, a: LabStructure, b: LabStructure, prune_final_sets: bool):
        self.A, self.B = _Side(a), _Side(b)
        self.prune = prune_final_sets
        self.memo: dict = {}

    def _set_moves(self, side: _Side, pts, r):
        if r == 1 and self.prune:
            # in the last round only the chosen set's trace on designated points matters
            distinct = sorted(set(pts))
            for bits in range(1 << len(distinct)):
                yield sum(1 << p for i, p in enumerate(distinct) if (bits >> i) & 1)
        else:
            yield from range(1 << side.s.size)

    def moves(self, pos, r):
        """Alice's moves as (kind, side, choice, follow-up builder over responses)."""
        pa, Xa, pb, Xb = pos
        for x in range(self.A.s.size):
            yield ("point", "A", x, [((pa + (x,), Xa, pb + (y,), Xb), y) for y in range(self.B.s.size)])
        for y in range(self.B.s.size):
            yield ("point", "B", y, [((pa + (x,), Xa, pb + (y,), Xb), x) for x in range(self.A.s.size)])
        for X in self._set_moves(self.A, pa, r):
            yield ("set", "A", X, [((pa, Xa + (X,), pb, Xb + (Y,)), Y) for Y in self._set_moves(self.B, pb, r)])
        for Y in self._set_moves(self.B, pb, r):
            yield ("set", "B", Y, [((pa, Xa + (X,), pb, Xb + (Y,)), X) for X in self._set_moves(self.A, pa, r)])

    def bob_wins(self, pos, r) -> bool:
        key = (pos, r)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        pa, Xa, pb, Xb = pos
        if not is_partial_isomorphism(self.A, pa, Xa, self.B, pb, Xb):
            result = False
        elif r == 0:
            result = True
        else:
            result = all(
                any(self.bob_wins(nxt, r - 1) for nxt, _ in responses)
                for _, _, _, responses in self.moves(pos, r)
            )
        self.memo[key] = result
        return result

    def describe(self, side: str, kind: str, value) -> object:
        s = self.A.s if side == "A" else self.B.s
        return s.labels[value] if kind == "point" else s.members(value)

    def line(self, pos, r) -> list[Round]:
        rounds: list[Round] = []
        while r > 0:
            pa, Xa, pb, Xb = pos
            if not is_partial_isomorphism(self.A, pa, Xa, self.B, pb, Xb):
                break
            bob = self.bob_wins(pos, r)
            chosen = None
            for kind, side, choice, responses in self.moves(pos, r):
                winning = [(nxt, resp) for nxt, resp in responses if self.bob_wins(nxt, r - 1)]
                if bob:
                    chosen = (kind, side, choice, *winning[0])
                    break
                if not responses:
                    chosen = (kind, side, choice, None, None)
                    break
                if not winning:
                    # show a response that survives the round when one exists
                    alive = [(nxt, resp) for nxt, resp in responses if is_partial_isomorphism(
                        self.A, nxt[0], nxt[1], self.B, nxt[2], nxt[3])]
                    chosen = (kind, side, choice, *(alive or responses)[0])
                    break
            kind, side, choice, nxt, resp = chosen
            other = "B" if side == "A" else "A"
            answer = None if nxt is None else self.describe(other, kind, resp)
            rounds.append(Round(kind, side, self.describe(side, kind, choice), answer))
            if nxt is None:
                break  # Bob has no legal answer
            pos, r = nxt, r - 1
        return rounds


def ef_game_search(a: LabStructure, b: LabStructure, rho: int,
                   prune_final_sets: bool = True, **guards) -> tuple[str, GameTrace]:
    """Solve the rho-round MSO game; returns the winner and one optimal line.

    With ``prune_final_sets`` the last-round set moves are restricted to
    subsets of the designated points, which is exact because the final
    partial-isomorphism check sees nothing else of a set.
    """
    check_vocabulary(a, b)
    for s in (a, b):
        check_guard(s, rho, **guards)
    game = _Game(a, b, prune_final_sets)
    start = (tuple(e for _, e in a.constants), tuple(m for _, m in a.sets),
             tuple(e for _, e in b.constants), tuple(m for _, m in b.sets))
    winner = "Bob" if game.bob_wins(start, rho) else "Alice"
    return winner, GameTrace(tuple(game.line(start, rho)), winner, rho)
