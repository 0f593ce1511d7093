"""Finite structures: words and truncated b-ary trees with named expansions.

Elements are indexed ``0 .. size-1``.  For words the index is the position;
for trees it is breadth-first order (root first, then children in successor
order).  Designated sets are stored as bitmasks over element indices.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

RESERVED = frozenset(
    {"and", "or", "not", "implies", "iff", "exists1", "forall1", "existsS", "forallS",
     "succ", "in", "=", "letter"}
)


class StructureError(ValueError):
    pass


@dataclass(frozen=True)
class LabStructure:
    shape: str  # "word" | "tree"
    branching: int
    labels: tuple[str, ...]
    edges: tuple[frozenset, ...]  # edges[a] = {(parent, child)} for successor a
    letters: tuple[str, ...] | None = None
    constants: tuple[tuple[str, int], ...] = ()
    sets: tuple[tuple[str, int], ...] = ()

    def __post_init__(self) -> None:
        n = len(self.labels)
        if self.shape not in ("word", "tree"):
            raise StructureError(f"unknown shape {self.shape!r}")
        if len(self.edges) != self.branching:
            raise StructureError("need one edge set per successor relation")
        if self.letters is not None and len(self.letters) != n:
            raise StructureError("letters must cover every element")
        names = [c for c, _ in self.constants] + [v for v, _ in self.sets]
        if len(set(names)) != len(names):
            raise StructureError(f"duplicate names in {names}")
        for name in names:
            if name in RESERVED or not name or name[0] in "()0123456789":
                raise StructureError(f"illegal name {name!r}")
        for name, elem in self.constants:
            if not 0 <= elem < n:
                raise StructureError(f"constant {name} names no element")
        for name, mask in self.sets:
            if mask < 0 or mask >> n:
                raise StructureError(f"set {name} is not a subset of the domain")
        if self.shape == "tree":
            known = set(self.labels)
            for lab in self.labels:
                if lab and lab[:-1] not in known:
                    raise StructureError(f"tree domain not prefix-closed at {lab!r}")

    # -- lookup ------------------------------------------------------------------

    @property
    def size(self) -> int:
        return len(self.labels)

    def element(self, ref: int | str) -> int:
        """Element index from an index (words) or a label."""
        if isinstance(ref, int) and self.shape == "word":
            if not 0 <= ref < self.size:
                raise StructureError(f"position {ref} outside word of length {self.size}")
            return ref
        try:
            return self.labels.index(str(ref))
        except ValueError:
            raise StructureError(f"no element labelled {ref!r}") from None

    def mask_of(self, elems: Iterable[int | str]) -> int:
        mask = 0
        for e in elems:
            mask |= 1 << self.element(e)
        return mask

    def members(self, mask: int) -> list[str]:
        return [self.labels[i] for i in range(self.size) if (mask >> i) & 1]

    @property
    def constant_names(self) -> tuple[str, ...]:
        return tuple(c for c, _ in self.constants)

    @property
    def set_names(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.sets)

    def successor_table(self) -> list[list[int]]:
        """child[a][x] = successor of x along a, or -1."""
        table = [[-1] * self.size for _ in range(self.branching)]
        for a, edges in enumerate(self.edges):
            for p, c in edges:
                table[a][p] = c
        return table

    # -- expansions ---------------------------------------------------------------

    def with_constant(self, name: str, elem: int | str) -> LabStructure:
        return replace(self, constants=self.constants + ((name, self.element(elem)),))

    def with_set(self, name: str, elems: Iterable[int | str] | int) -> LabStructure:
        mask = elems if isinstance(elems, int) else self.mask_of(elems)
        return replace(self, sets=self.sets + ((name, mask),))

    def vocabulary_key(self) -> tuple:
        return (self.branching, self.constant_names, self.set_names, self.letters is not None)


def word_structure(
    letters: str | Sequence | None = None,
    length: int | None = None,
    constants: Mapping[str, int] | None = None,
    sets: Mapping[str, Iterable[int]] | None = None,
) -> LabStructure:
    """A word with positions 0..L-1 and the successor relation succ_0."""
    if letters is not None:
        letter_tuple = tuple(str(a) for a in letters)
        if length is not None and length != len(letter_tuple):
            raise StructureError("length disagrees with letters")
        length = len(letter_tuple)
    else:
        letter_tuple = None
        if length is None:
            raise StructureError("give letters or a length")
    if length < 0:
        raise StructureError("negative length")
    base = LabStructure(
        "word",
        1,
        tuple(str(i) for i in range(length)),
        (frozenset((i, i + 1) for i in range(length - 1)),),
        letter_tuple,
    )
    return _expand(base, constants, sets)


def product_structure(words: Sequence[str | Sequence[int]], **kwargs) -> LabStructure:
    """Word over the product alphabet; letter i joins the i-th symbols, e.g. "012"."""
    from ..hashcore import product_word

    letters = ["".join(map(str, t)) for t in product_word(words)]
    return word_structure(letters, **kwargs)


def tree_nodes(b: int, depth: int) -> list[str]:
    nodes = [""]
    for d in range(1, depth + 1):
        nodes.extend("".join(map(str, t)) for t in itertools.product(range(b), repeat=d))
    return nodes


def tree_structure(
    b: int,
    depth: int,
    constants: Mapping[str, str] | None = None,
    sets: Mapping[str, Iterable[str]] | None = None,
    letters: Mapping[str, str] | None = None,
) -> LabStructure:
    """All b-ary strings of length <= depth, successors succ_0..succ_{b-1}, root constant."""
    if b < 1 or b > 10:
        raise StructureError("tree branching must be between 1 and 10")
    if depth < 0:
        raise StructureError("negative depth")
    nodes = tree_nodes(b, depth)
    return _tree_from_nodes(b, nodes, constants, sets, letters)


def _tree_from_nodes(b, nodes, constants=None, sets=None, letters=None) -> LabStructure:
    index = {lab: i for i, lab in enumerate(nodes)}
    edges = tuple(
        frozenset((index[lab[:-1]], i) for i, lab in enumerate(nodes) if lab and lab[-1] == str(a))
        for a in range(b)
    )
    letter_tuple = None
    if letters is not None:
        missing = [lab for lab in nodes if lab not in letters]
        if missing:
            raise StructureError(f"letters missing for nodes {missing[:3]}")
        letter_tuple = tuple(str(letters[lab]) for lab in nodes)
    base = LabStructure("tree", b, tuple(nodes), edges, letter_tuple, (("root", 0),))
    return _expand(base, constants, sets)


def _expand(base: LabStructure, constants, sets) -> LabStructure:
    s = base
    for name, elem in (constants or {}).items():
        s = s.with_constant(name, elem)
    for name, elems in (sets or {}).items():
        s = s.with_set(name, elems)
    return s


def restrict(s: LabStructure, j: int) -> LabStructure:
    """Restriction of a tree structure to the root plus the nodes starting with j.

    Constants outside the subtree are dropped; sets are intersected with it.
    """
    if s.shape != "tree":
        raise StructureError("restrict needs a tree structure")
    if not 0 <= j < s.branching:
        raise StructureError(f"branch {j} outside 0..{s.branching - 1}")
    keep = [i for i, lab in enumerate(s.labels) if lab == "" or lab[0] == str(j)]
    new_index = {old: new for new, old in enumerate(keep)}
    edges = tuple(
        frozenset((new_index[p], new_index[c]) for p, c in es if p in new_index and c in new_index)
        for es in s.edges
    )
    letters = None if s.letters is None else tuple(s.letters[i] for i in keep)
    constants = tuple((name, new_index[e]) for name, e in s.constants if e in new_index)
    sets = []
    for name, mask in s.sets:
        new_mask = 0
        for old, new in new_index.items():
            if (mask >> old) & 1:
                new_mask |= 1 << new
        sets.append((name, new_mask))
    return LabStructure("tree", s.branching, tuple(s.labels[i] for i in keep), edges, letters,
                        constants, tuple(sets))


# -- structure files (JSON) ------------------------------------------------------------


def structure_to_dict(s: LabStructure) -> dict:
    def ref(i):
        return i if s.shape == "word" else s.labels[i]

    out: dict = {"shape": s.shape}
    if s.shape == "word":
        out["length"] = s.size
        if s.letters is not None:
            out["letters"] = list(s.letters)
    else:
        out["b"] = s.branching
        out["nodes"] = list(s.labels)
        if s.letters is not None:
            out["letters"] = dict(zip(s.labels, s.letters))
    out["constants"] = {n: ref(e) for n, e in s.constants if not (s.shape == "tree" and n == "root")}
    out["sets"] = {n: [ref(i) for i in range(s.size) if (m >> i) & 1] for n, m in s.sets}
    return out


def structure_from_dict(data: Mapping) -> LabStructure:
    try:
        shape = data["shape"]
        if shape == "word":
            letters = data.get("letters")
            s = word_structure(letters, None if letters is not None else int(data["length"]))
        elif shape == "tree":
            b = int(data["b"])
            if "nodes" in data:
                nodes = sorted(data["nodes"], key=lambda lab: (len(lab), lab))
                s = _tree_from_nodes(b, nodes, letters=data.get("letters"))
            else:
                s = tree_structure(b, int(data["depth"]), letters=data.get("letters"))
        else:
            raise StructureError(f"unknown shape {shape!r}")
    except KeyError as exc:
        raise StructureError(f"structure file missing field {exc.args[0]!r}") from None
    return _expand(s, data.get("constants"), data.get("sets"))


def load_structure(path: str | Path) -> LabStructure:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise StructureError(f"{path}: {exc}") from None
    return structure_from_dict(data)


def save_structure(s: LabStructure, path: str | Path) -> None:
    Path(path).write_text(json.dumps(structure_to_dict(s), indent=2) + "\n", encoding="utf-8")
