"""Asymptotic bound formulas for T_{3,3}(n) and ledger consistency checks.

The multiplicative constants in these bounds are not known numerically;
they are inputs here.  The defaults are illustrative only.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .hashcore import CodeError, CodeParams, first_violation, read_code


def _check(n, C) -> None:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if C <= 0:
        raise ValueError(f"constant must be positive, got {C}")


def classic_upper(n: int, C: float = 2.0) -> float:
    """C * (3/2)**n."""
    _check(n, C)
    return C * 1.5**n


def improved_upper(n: int, C: float = 1.0) -> float:
    """C * n**(-2/5) * (3/2)**n."""
    _check(n, C)
    return C * n ** (-0.4) * 1.5**n


def km_lower(n: int, C: float = 1.0) -> float:
    """C * (9/5)**(n/4), the rate of the length-4 construction."""
    _check(n, C)
    return C * 1.8 ** (n / 4)


@dataclass(frozen=True)
class BoundProfile:
    C_upper: float = 2.0
    C_improved: float = 1.0
    C_lower: float = 1.0

    def __post_init__(self) -> None:
        if min(self.C_upper, self.C_improved, self.C_lower) <= 0:
            raise ValueError("bound constants must be positive")

    def evaluate(self, n: int) -> dict[str, float]:
        return {
            "classic_upper": classic_upper(n, self.C_upper),
            "improved_upper": improved_upper(n, self.C_improved),
            "km_lower": km_lower(n, self.C_lower),
        }


@dataclass(frozen=True)
class LedgerIssue:
    key: tuple[int, int, int]
    problem: str

    def __str__(self) -> str:
        return f"{','.join(map(str, self.key))}: {self.problem}"


def ledger_check(entries, recompute: bool = False, base_dir: str | Path | None = None,
                 search_config=None) -> list[LedgerIssue]:
    """Consistency report for ledger entries; problems are reported, not raised.

    Checks lower <= upper, exact => lower == upper, certificates re-verify and
    carry ``lower`` words, and (with ``recompute``) exact values against the
    brute-force oracle when it applies, otherwise against the native search.
    """
    from .searcher import BRUTE_FORCE_GUARD, SearchConfig, brute_force_max, max_size

    issues: list[LedgerIssue] = []
    base = Path(base_dir) if base_dir is not None else Path.cwd()
    for entry in entries:
        key = entry.key
        if entry.lower > entry.upper:
            issues.append(LedgerIssue(key, f"lower {entry.lower} exceeds upper {entry.upper}"))
        if entry.status == "exact" and entry.lower != entry.upper:
            issues.append(LedgerIssue(key, "status exact but lower != upper"))
        if entry.certificate:
            path = Path(entry.certificate)
            if not path.is_absolute():
                path = base / path
            try:
                code = read_code(path)
            except (OSError, CodeError) as exc:
                issues.append(LedgerIssue(key, f"certificate unreadable: {exc}"))
            else:
                if (code.params.b, code.params.k, code.params.n) != key:
                    issues.append(LedgerIssue(key, f"certificate parameters {code.params} differ"))
                elif first_violation(code) is not None:
                    issues.append(LedgerIssue(key, "certificate fails verification"))
                elif len(code) != entry.lower:
                    issues.append(LedgerIssue(key, f"certificate has {len(code)} words, lower is {entry.lower}"))
        elif entry.lower > 0:
            issues.append(LedgerIssue(key, "missing certificate"))
        if recompute and entry.status == "exact":
            params = CodeParams(*key)
            if params.num_words <= BRUTE_FORCE_GUARD:
                value = brute_force_max(params)[0]
            else:
                res = max_size(params, search_config or SearchConfig())
                value = res.lower if res.status == "exact" else None
            if value is None:
                issues.append(LedgerIssue(key, "recomputation did not finish"))
            elif value != entry.lower:
                issues.append(LedgerIssue(key, f"recomputed {value}, ledger says {entry.lower}"))
    return issues
