"""Exact search for (b, k)-hash codes.

The search is a depth-first enumeration of codes as increasing sequences of
word indices (lexicographic order).  Candidate sets are Python integers used
as bitsets over all ``b**n`` words; adding a word intersects the candidate set
with the words that keep every new k-subset hashed.

Symmetry levels, weakest to strongest:

``none``
    plain enumeration.
``fix-first-row``
    the all-zero word is a codeword (per-coordinate relabelling).
``fix-first-row+row-lex``
    additionally the second-smallest codeword is non-decreasing
    (coordinate permutations fix the zero word).
``full``
    additionally the second codeword is ``0^(n-w) 1^w`` where ``w`` is the
    minimum distance of the code, and every pair of codewords is at distance
    at least ``w``.  Any code is equivalent to one of this form: move a pair
    at minimum distance to ``0^n`` and ``0^(n-w) 1^w``; every other word then
    has weight >= w and is therefore larger than the second row.
"""
from __future__ import annotations

import enum
import itertools
import multiprocessing as mp
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .hashcore import Code, CodeError, CodeParams, Word

_CLOCK_EVERY = 1024


class Symmetry(str, enum.Enum):
    NONE = "none"
    FIRST_ROW = "fix-first-row"
    ROW_LEX = "fix-first-row+row-lex"
    FULL = "full"


@dataclass(frozen=True)
class SearchConfig:
    max_nodes: int | None = None
    max_seconds: float | None = None
    symmetry: Symmetry = Symmetry.FULL
    deterministic: bool = True
    threads: int = 1

    def __post_init__(self) -> None:
        if self.max_nodes is not None and self.max_nodes <= 0:
            raise ValueError("max_nodes must be positive")
        if self.max_seconds is not None and self.max_seconds <= 0:
            raise ValueError("max_seconds must be positive")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        object.__setattr__(self, "symmetry", Symmetry(self.symmetry))


@dataclass
class SearchStats:
    nodes: int = 0
    elapsed: float = 0.0
    peak_depth: int = 0


@dataclass(frozen=True)
class SearchVerdict:
    stats: SearchStats


@dataclass(frozen=True)
class Found(SearchVerdict):
    code: Code = field(kw_only=True)


@dataclass(frozen=True)
class ExhaustedNoSolution(SearchVerdict):
    pass


@dataclass(frozen=True)
class BudgetExceeded(SearchVerdict):
    pass


class _OutOfBudget(Exception):
    pass


class _Cancelled(Exception):
    pass


class CandidateTable:
    """Read-only tables over the lexicographic list of all words."""

    def __init__(self, params: CodeParams):
        self.params = params
        b, n = params.b, params.n
        self.words = list(itertools.product(range(b), repeat=n))
        self.size = len(self.words)
        self.all_bits = (1 << self.size) - 1
        # avoid[c][S]: words whose symbol at coordinate c is not in symbol set S
        by_symbol = [[0] * b for _ in range(n)]
        for idx, w in enumerate(self.words):
            for c, s in enumerate(w):
                by_symbol[c][s] |= 1 << idx
        self.avoid = []
        for c in range(n):
            row = []
            for sset in range(1 << b):
                bits = 0
                for s in range(b):
                    if not (sset >> s) & 1:
                        bits |= by_symbol[c][s]
                row.append(bits)
            self.avoid.append(row)
        self._compat: dict[tuple[int, ...], int] = {}
        self._far: dict[tuple[int, int], int] = {}

    def index(self, symbols) -> int:
        return Word(tuple(symbols), self.params.b).index

    def compat(self, group: tuple[int, ...]) -> int:
        """Words x such that ``group + (x,)`` is hashed (group has k-1 words)."""
        bits = self._compat.get(group)
        if bits is None:
            ws = [self.words[i] for i in group]
            bits = 0
            for c in range(self.params.n):
                col = [w[c] for w in ws]
                if len(set(col)) == len(col):
                    sset = 0
                    for s in col:
                        sset |= 1 << s
                    bits |= self.avoid[c][sset]
            self._compat[group] = bits
        return bits

    def far(self, idx: int, dist: int) -> int:
        """Words at Hamming distance >= dist from word idx."""
        key = (idx, dist)
        bits = self._far.get(key)
        if bits is None:
            w = self.words[idx]
            bits = 0
            for j, v in enumerate(self.words):
                if sum(a != c for a, c in zip(w, v)) >= dist:
                    bits |= 1 << j
            self._far[key] = bits
        return bits


def _subtrees(table: CandidateTable, symmetry: Symmetry) -> list[tuple[tuple[int, ...], int]]:
    """Forced code prefixes (as word indices) with their minimum-distance filter."""
    n = table.params.n
    if symmetry is Symmetry.NONE:
        return [((i,), 0) for i in range(table.size)]
    if symmetry is Symmetry.FIRST_ROW:
        return [((0, j), 0) for j in range(1, table.size)]
    if symmetry is Symmetry.ROW_LEX:
        out = []
        for j, w in enumerate(table.words):
            if j and all(a <= c for a, c in zip(w, w[1:])):
                out.append(((0, j), 0))
        return out
    return [((0, table.index([0] * (n - w) + [1] * w)), w) for w in range(1, n + 1)]


class _Dfs:
    def __init__(self, table, m, max_nodes, deadline, cancel=None):
        self.t = table
        self.k = table.params.k
        self.m = m
        self.max_nodes = max_nodes
        self.deadline = deadline
        self.cancel = cancel
        self.nodes = 0
        self.peak = 0

    def _extend(self, rows: list[int], cand: int, x: int, dist: int) -> int:
        """Candidate set after appending x to rows (x not yet in rows)."""
        cand &= ~((2 << x) - 1)
        if dist:
            cand &= self.t.far(x, dist)
        need = self.m - len(rows) - 1
        for group in itertools.combinations(rows, self.k - 2):
            cand &= self.t.compat(group + (x,))
            if cand.bit_count() < need:
                break
        return cand

    def run(self, prefix: tuple[int, ...], dist: int) -> list[int] | None:
        rows: list[int] = []
        cand = self.t.all_bits
        for x in prefix:
            if not (cand >> x) & 1:
                return None
            cand = self._extend(rows, cand, x, dist)
            rows.append(x)
        return self._dfs(rows, cand, dist)

    def _tick(self) -> None:
        self.nodes += 1
        if self.max_nodes is not None and self.nodes > self.max_nodes:
            raise _OutOfBudget
        if self.nodes % _CLOCK_EVERY == 0:
            if self.deadline is not None and time.monotonic() > self.deadline:
                raise _OutOfBudget
            if self.cancel is not None and self.cancel.is_set():
                raise _Cancelled

    def _dfs(self, rows: list[int], cand: int, dist: int) -> list[int] | None:
        self._tick()
        depth = len(rows)
        if depth > self.peak:
            self.peak = depth
        if depth >= self.m:
            return list(rows)
        while cand:
            if depth + cand.bit_count() < self.m:
                return None
            x = (cand & -cand).bit_length() - 1
            cand &= cand - 1
            child = self._extend(rows, cand, x, dist)
            if depth + 1 + child.bit_count() < self.m:
                continue
            rows.append(x)
            found = self._dfs(rows, child, dist)
            rows.pop()
            if found is not None:
                return found
        return None


@dataclass
class _SubResult:
    status: str  # "found" | "exhausted" | "budget" | "cancelled"
    nodes: int
    peak: int
    rows: list[int] | None = None


def _run_subtree(table, m, prefix, dist, max_nodes, deadline, cancel=None) -> _SubResult:
    dfs = _Dfs(table, m, max_nodes, deadline, cancel)
    try:
        rows = dfs.run(prefix, dist)
    except _OutOfBudget:
        nodes = dfs.nodes if max_nodes is None else min(dfs.nodes, max_nodes)
        return _SubResult("budget", nodes, dfs.peak)
    except _Cancelled:
        return _SubResult("cancelled", dfs.nodes, dfs.peak)
    if rows is None:
        return _SubResult("exhausted", dfs.nodes, dfs.peak)
    return _SubResult("found", dfs.nodes, dfs.peak, rows)


# worker-process state
_W: dict = {}


def _worker_init(params: CodeParams, cancel) -> None:
    _W["table"] = CandidateTable(params)
    _W["cancel"] = cancel


def _worker_run(m, prefix, dist, max_nodes, deadline) -> _SubResult:
    return _run_subtree(_W["table"], m, prefix, dist, max_nodes, deadline, _W["cancel"])


def _monotonic_deadline(config: SearchConfig) -> float | None:
    if config.max_seconds is None:
        return None
    return time.monotonic() + config.max_seconds


def search_exact(
    params: CodeParams,
    m: int,
    config: SearchConfig = SearchConfig(),
    table: CandidateTable | None = None,
) -> SearchVerdict:
    """Decide whether a (b, k)-hash code with exactly m words exists."""
    if m < 1:
        raise ValueError("target size m must be >= 1")
    start = time.monotonic()
    if m > params.num_words:
        return ExhaustedNoSolution(SearchStats(0, time.monotonic() - start, 0))
    if m == 1:
        code = Code(params, (Word((0,) * params.n, params.b),))
        return Found(SearchStats(1, time.monotonic() - start, 1), code=code)
    if table is None:
        table = CandidateTable(params)
    subtrees = _subtrees(table, config.symmetry)
    deadline = _monotonic_deadline(config)
    if config.threads > 1 and len(subtrees) > 1:
        results = _run_parallel(params, m, subtrees, config, deadline)
    else:
        results = _run_serial(table, m, subtrees, config, deadline)
    return _merge(params, table, results, config, start)


def _run_serial(table, m, subtrees, config, deadline):
    remaining = config.max_nodes
    for prefix, dist in subtrees:
        res = _run_subtree(table, m, prefix, dist, remaining, deadline)
        yield res
        if res.status != "exhausted":
            return
        if remaining is not None:
            remaining -= res.nodes


def _run_parallel(params, m, subtrees, config, deadline):
    ctx = mp.get_context("fork") if "fork" in mp.get_all_start_methods() else mp.get_context()
    cancel = ctx.Manager().Event() if not config.deterministic else None
    workers = min(config.threads, len(subtrees), os.cpu_count() or 1)
    with ProcessPoolExecutor(workers, mp_context=ctx, initializer=_worker_init,
                             initargs=(params, cancel)) as pool:
        futures = [
            pool.submit(_worker_run, m, prefix, dist, config.max_nodes, deadline)
            for prefix, dist in subtrees
        ]
        try:
            if config.deterministic:
                # adopt subtree results strictly in order so the outcome matches a serial run
                spent = 0
                for fut in futures:
                    res = fut.result()
                    limit = None if config.max_nodes is None else config.max_nodes - spent
                    if limit is not None and res.nodes > limit:
                        yield _SubResult("budget", limit, res.peak)
                        return
                    spent += res.nodes
                    yield res
                    if res.status != "exhausted":
                        return
            else:
                spent = 0
                pending = set(futures)
                from concurrent.futures import FIRST_COMPLETED, wait

                while pending:
                    done, pending = wait(pending, return_when=FIRST_COMPLETED)
                    for fut in done:
                        res = fut.result()
                        spent += res.nodes
                        if config.max_nodes is not None and spent > config.max_nodes:
                            res = _SubResult("budget", res.nodes, res.peak)
                        yield res
                        if res.status != "exhausted":
                            cancel.set()
                            return
        finally:
            for fut in futures:
                fut.cancel()


def _merge(params, table, results, config, start) -> SearchVerdict:
    stats = SearchStats()
    outcome = "exhausted"
    rows = None
    for res in results:
        stats.nodes += res.nodes
        stats.peak_depth = max(stats.peak_depth, res.peak)
        if res.status != "exhausted":
            outcome, rows = res.status, res.rows
            break
    stats.elapsed = time.monotonic() - start
    if outcome == "found":
        code = Code(params, tuple(Word(table.words[i], params.b) for i in rows))
        return Found(stats, code=code)
    if outcome == "exhausted":
        return ExhaustedNoSolution(stats)
    return BudgetExceeded(stats)


# -- maximum size -------------------------------------------------------------


@dataclass(frozen=True)
class MaxSizeResult:
    lower: int
    upper: int
    status: str  # "exact" | "bounded"
    certificate: Code
    verdicts: tuple[SearchVerdict, ...] = ()


def counting_upper_bound(params: CodeParams) -> int:
    """floor((k-1) * (b/(k-1))**n): every product of (k-1)-symbol sets holds <= k-1 words."""
    b, k, n = params.b, params.k, params.n
    return min(b**n, (k - 1) * b**n // (k - 1) ** n)


def max_size(params: CodeParams, config: SearchConfig = SearchConfig()) -> MaxSizeResult:
    """Largest hash code size by calling :func:`search_exact` with growing targets."""
    table = CandidateTable(params)
    verdicts = []
    best = None
    m = 1
    cap = counting_upper_bound(params)
    while True:
        if m > cap:
            return MaxSizeResult(m - 1, m - 1, "exact", best, tuple(verdicts))
        verdict = search_exact(params, m, config, table)
        verdicts.append(verdict)
        if isinstance(verdict, Found):
            best = verdict.code
            m += 1
        elif isinstance(verdict, ExhaustedNoSolution):
            return MaxSizeResult(m - 1, m - 1, "exact", best, tuple(verdicts))
        else:
            return MaxSizeResult(m - 1, cap, "bounded", best, tuple(verdicts))


# -- brute-force oracle ---------------------------------------------------------

BRUTE_FORCE_GUARD = 12


def brute_force_max(params: CodeParams) -> tuple[int, Code]:
    """Exact maximum by subset enumeration; independent of the search machinery.

    Subsets are grown word by word and a branch is abandoned as soon as it
    contains an unhashed k-subset, since every superset inherits it.
    """
    if params.num_words > BRUTE_FORCE_GUARD:
        raise CodeError(
            f"brute force needs b**n <= {BRUTE_FORCE_GUARD}, got {params.num_words}"
        )
    words = list(itertools.product(range(params.b), repeat=params.n))
    k = params.k

    def hashed(group) -> bool:
        return any(len(set(column)) == k for column in zip(*group))

    best: list[tuple[int, ...]] = []

    def grow(chosen: list[tuple[int, ...]], start: int) -> None:
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
        for i in range(start, len(words)):
            w = words[i]
            if all(hashed(g + (w,)) for g in itertools.combinations(chosen, k - 1)):
                chosen.append(w)
                grow(chosen, i + 1)
                chosen.pop()

    grow([], 0)
    return len(best), Code(params, tuple(Word(w, params.b) for w in best))


# -- canonical form -------------------------------------------------------------


def _normalize_columns(rows: list[tuple[int, ...]], n: int):
    """Relabel each column by first occurrence, then sort the columns."""
    cols = []
    for c in range(n):
        seen: dict[int, int] = {}
        cols.append(tuple(seen.setdefault(r[c], len(seen)) for r in rows))
    cols.sort()
    return tuple(cols)


def canonicalize(code: Code) -> Code:
    """Canonical representative under row and coordinate permutations and
    per-coordinate alphabet relabellings.

    For a fixed row order the smallest matrix (read row by row) is obtained
    by relabelling every column by first occurrence and sorting the columns.
    Row orders are built one row at a time, keeping only prefixes whose
    normalized form is minimal; the first t rows of the optimum must
    themselves be optimal, so the pruning is exact.
    """
    params = code.params
    n = params.n
    rows = [w.symbols for w in code.words]
    if not rows:
        return code
    m = len(rows)
    frontier = [()]
    for _ in range(m):
        best_key = None
        survivors = []
        for order in frontier:
            for r in range(m):
                if r in order:
                    continue
                nxt = order + (r,)
                key = _normalize_columns([rows[i] for i in nxt], n)
                if best_key is None or key < best_key:
                    best_key, survivors = key, []
                if key == best_key:
                    survivors.append(nxt)
        frontier = survivors
    cols = _normalize_columns([rows[i] for i in frontier[0]], n)
    new_rows = [tuple(col[r] for col in cols) for r in range(m)]
    return Code(params, tuple(Word(r, params.b) for r in new_rows))
