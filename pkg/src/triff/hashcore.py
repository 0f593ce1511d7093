"""Codewords, codes and the (b, k)-hashing predicate.

A k-tuple of words over ``{0, ..., b-1}`` is *hashed* when some coordinate
carries k pairwise distinct symbols.  A code is a (b, k)-hash code when every
k distinct codewords are hashed.

Also here: the ternary-to-binary block embedding (0 -> 00, 1 -> 01, 2 -> 10),
the block relation on binary words it induces, and the witness word families
used to show that relation is not a finite union of special relations.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence


class CodeError(ValueError):
    """Raised for malformed words, codes, parameters or code files."""


@dataclass(frozen=True)
class CodeParams:
    b: int
    k: int
    n: int

    def __post_init__(self) -> None:
        for name in ("b", "k", "n"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool):
                raise CodeError(f"{name} must be an integer, got {value!r}")
        if self.b < 2:
            raise CodeError(f"alphabet size b must be >= 2, got {self.b}")
        if not 2 <= self.k <= self.b:
            raise CodeError(f"need 2 <= k <= b, got k={self.k}, b={self.b}")
        if self.n < 1:
            raise CodeError(f"word length n must be >= 1, got {self.n}")

    @property
    def num_words(self) -> int:
        return self.b**self.n

    def __str__(self) -> str:
        return f"b={self.b} k={self.k} n={self.n}"


@dataclass(frozen=True, order=True)
class Word:
    """A word over ``{0, ..., b-1}``; ordering is lexicographic on symbols."""

    symbols: tuple[int, ...]
    b: int = field(compare=False)

    def __post_init__(self) -> None:
        symbols = tuple(self.symbols)
        object.__setattr__(self, "symbols", symbols)
        for s in symbols:
            if not isinstance(s, int) or not 0 <= s < self.b:
                raise CodeError(f"symbol {s!r} outside alphabet 0..{self.b - 1}")

    @classmethod
    def parse(cls, text: str, b: int) -> Word:
        if b > 10:
            raise CodeError("digit notation only covers alphabets with b <= 10")
        if not text.isdigit() and text != "":
            raise CodeError(f"word {text!r} is not a digit string")
        return cls(tuple(int(ch) for ch in text), b)

    def __len__(self) -> int:
        return len(self.symbols)

    def __str__(self) -> str:
        if self.b <= 10:
            return "".join(map(str, self.symbols))
        return ",".join(map(str, self.symbols))

    @property
    def index(self) -> int:
        """Position of the word in the lexicographic list of all b**n words."""
        idx = 0
        for s in self.symbols:
            idx = idx * self.b + s
        return idx

    @property
    def packed(self) -> tuple[int, ...]:
        """Per-symbol coordinate bitmasks: entry s has bit i set iff symbol i is s."""
        masks = [0] * self.b
        for i, s in enumerate(self.symbols):
            masks[s] |= 1 << i
        return tuple(masks)


def as_word(w: Word | str | Sequence[int], b: int) -> Word:
    if isinstance(w, Word):
        if w.b != b:
            raise CodeError(f"word {w} has alphabet {w.b}, expected {b}")
        return w
    if isinstance(w, str):
        return Word.parse(w, b)
    return Word(tuple(w), b)


def diff_mask(x: Word, y: Word) -> int:
    """Bit i set iff x and y differ at coordinate i.

    Python integers are unbounded, so no chunking is needed for long words.
    """
    if len(x) != len(y):
        raise CodeError("words of different lengths")
    mask = 0
    for i, (a, c) in enumerate(zip(x.symbols, y.symbols)):
        if a != c:
            mask |= 1 << i
    return mask


def is_hashed(words: Sequence[Word | str | Sequence[int]], params: CodeParams) -> bool:
    """True iff some coordinate holds k pairwise distinct symbols."""
    if len(words) != params.k:
        raise CodeError(f"expected {params.k} words, got {len(words)}")
    ws = [as_word(w, params.b) for w in words]
    for w in ws:
        if len(w) != params.n:
            raise CodeError(f"word {w} has length {len(w)}, expected {params.n}")
    common = (1 << params.n) - 1
    for x, y in itertools.combinations(ws, 2):
        common &= diff_mask(x, y)
        if not common:
            return False
    return common != 0


@dataclass(frozen=True)
class Code:
    """A duplicate-free set of words, stored in ascending lexicographic order."""

    params: CodeParams
    words: tuple[Word, ...]

    def __post_init__(self) -> None:
        ws = tuple(sorted(as_word(w, self.params.b) for w in self.words))
        for w in ws:
            if len(w) != self.params.n:
                raise CodeError(f"word {w} has length {len(w)}, expected {self.params.n}")
        for a, c in zip(ws, ws[1:]):
            if a == c:
                raise CodeError(f"duplicate codeword {a}")
        object.__setattr__(self, "words", ws)

    @classmethod
    def from_strings(cls, params: CodeParams, words: Iterable[str]) -> Code:
        return cls(params, tuple(Word.parse(w, params.b) for w in words))

    def __len__(self) -> int:
        return len(self.words)

    def __iter__(self):
        return iter(self.words)

    def strings(self) -> list[str]:
        return [str(w) for w in self.words]


def first_violation(code: Code) -> tuple[int, ...] | None:
    """Lexicographically smallest k-tuple of word indices that is not hashed.

    ``None`` means the code is a (b, k)-hash code (vacuously so below k words).
    """
    k = code.params.k
    ws = code.words
    if len(ws) < k:
        return None
    masks = {
        (i, j): diff_mask(ws[i], ws[j]) for i, j in itertools.combinations(range(len(ws)), 2)
    }
    for tup in itertools.combinations(range(len(ws)), k):
        common = -1
        for pair in itertools.combinations(tup, 2):
            common &= masks[pair]
            if not common:
                return tup
    return None


def is_hash_code(code: Code) -> bool:
    return first_violation(code) is None


# -- code files -------------------------------------------------------------


def format_code(code: Code, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.extend(f"# {line}" for line in comment.splitlines())
    lines.append(str(code.params))
    lines.extend(code.strings())
    return "\n".join(lines) + "\n"


def parse_code(text: str) -> Code:
    params = None
    words: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if params is None:
            try:
                fields = dict(tok.split("=", 1) for tok in line.split())
                params = CodeParams(int(fields["b"]), int(fields["k"]), int(fields["n"]))
            except (KeyError, ValueError) as exc:
                raise CodeError(f"line {lineno}: expected header 'b=<b> k=<k> n=<n>'") from exc
            continue
        words.append(line)
    if params is None:
        raise CodeError("missing header 'b=<b> k=<k> n=<n>'")
    try:
        return Code.from_strings(params, words)
    except CodeError as exc:
        raise CodeError(f"invalid code: {exc}") from exc


def read_code(path: str | Path) -> Code:
    return parse_code(Path(path).read_text(encoding="utf-8"))


def write_code(code: Code, path: str | Path, comment: str | None = None) -> None:
    Path(path).write_text(format_code(code, comment), encoding="utf-8")


# -- ternary/binary embedding -------------------------------------------------

_BLOCKS = {0: "00", 1: "01", 2: "10"}
_UNBLOCK = {v: k for k, v in _BLOCKS.items()}
_T_PRIME_BLOCKS = frozenset(_BLOCKS.values())


def ternary_to_binary(word: str | Sequence[int]) -> str:
    """0 -> 00, 1 -> 01, 2 -> 10, concatenated."""
    out = []
    for s in word:
        s = int(s)
        if s not in _BLOCKS:
            raise CodeError(f"symbol {s!r} is not ternary")
        out.append(_BLOCKS[s])
    return "".join(out)


def binary_to_ternary(bits: str) -> str:
    if len(bits) % 2:
        raise CodeError(f"binary word of odd length {len(bits)}")
    out = []
    for pos in range(0, len(bits), 2):
        block = bits[pos : pos + 2]
        if block not in _UNBLOCK:
            # 1-based position as users count it
            raise CodeError(f"block {block!r} at position {pos + 1} is not in {{00,01,10}}")
        out.append(str(_UNBLOCK[block]))
    return "".join(out)


def relation_R(x: str, y: str, z: str) -> bool:
    """Block relation on binary words.

    True iff x, y, z lie in ``{00,01,10}*`` and at some odd 1-based position i
    the blocks ``x_i x_{i+1}``, ``y_i y_{i+1}``, ``z_i z_{i+1}`` are exactly
    ``{00, 01, 10}``.
    """
    if not len(x) == len(y) == len(z):
        raise CodeError("relation_R needs three words of equal length")
    if len(x) % 2:
        raise CodeError("relation_R needs words of even length")
    for w in (x, y, z):
        if set(w) - {"0", "1"}:
            raise CodeError(f"{w!r} is not a binary word")
    blocks = [[w[p : p + 2] for p in range(0, len(w), 2)] for w in (x, y, z)]
    if any(bl not in _T_PRIME_BLOCKS for row in blocks for bl in row):
        return False
    return any({a, c, d} == _T_PRIME_BLOCKS for a, c, d in zip(*blocks))


def witness_family(n: int, ell: int) -> tuple[str, str, str]:
    """The triple (00)^n 01 (00)^(l-n-1), (10)^n 00 (00)^(l-n-1), (10)^n 10 (00)^(l-n-1)."""
    if not 0 <= n < ell:
        raise CodeError(f"need 0 <= n < ell, got n={n}, ell={ell}")
    tail = "00" * (ell - n - 1)
    return (
        "00" * n + "01" + tail,
        "10" * n + "00" + tail,
        "10" * n + "10" + tail,
    )


def product_word(words: Sequence[str | Sequence[int]]) -> list[tuple[int, ...]]:
    """Zip k equal-length words into one word over the product alphabet."""
    seqs = [tuple(int(s) for s in w) for w in words]
    if len({len(s) for s in seqs}) > 1:
        raise CodeError("product_word needs words of equal length")
    return list(zip(*seqs)) if seqs else []
