"""Results ledger: one text file, header ``triff-ledger v1``, one entry per line.

Entry lines are ``b,k,n`` followed by ``field=value`` tokens (shell quoting
for values with spaces)::

    triff-ledger v1
    3,3,4 lower=9 upper=9 status=exact method=search certificate=c334.txt timestamp=2026-01-01T00:00:00+00:00
"""
from __future__ import annotations

import contextlib
import datetime as _dt
import fcntl
import os
import shlex
from dataclasses import dataclass, replace
from pathlib import Path

HEADER = "triff-ledger v1"
STATUSES = ("exact", "bounded")
METHODS = ("oracle", "search", "external-solver")
_FIELDS = ("lower", "upper", "status", "method", "certificate", "timestamp")


class LedgerError(ValueError):
    pass


@dataclass(frozen=True)
class LedgerEntry:
    key: tuple[int, int, int]
    lower: int
    upper: int
    status: str
    method: str
    certificate: str = ""
    timestamp: str = ""

    def __post_init__(self) -> None:
        label = ",".join(map(str, self.key))
        if self.lower > self.upper:
            raise LedgerError(f"{label}: lower {self.lower} > upper {self.upper}")
        if self.status not in STATUSES:
            raise LedgerError(f"{label}: unknown status {self.status!r}")
        if self.status == "exact" and self.lower != self.upper:
            raise LedgerError(f"{label}: exact entry needs lower == upper")
        if self.method not in METHODS:
            raise LedgerError(f"{label}: unknown method {self.method!r}")
        if self.lower > 0 and not self.certificate:
            raise LedgerError(f"{label}: certificate required when lower > 0")

    def format(self) -> str:
        parts = [",".join(map(str, self.key))]
        for name in _FIELDS:
            value = str(getattr(self, name))
            parts.append(f"{name}={shlex.quote(value)}")
        return " ".join(parts)


def now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).replace(microsecond=0).isoformat()


def parse_ledger(text: str) -> list[LedgerEntry]:
    lines = text.splitlines()
    if not lines or not text.strip():
        return []
    if lines[0].strip() != HEADER:
        raise LedgerError(f"line 1: expected header {HEADER!r}")
    entries: dict[tuple[int, int, int], LedgerEntry] = {}
    for lineno, line in enumerate(lines[1:], 2):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        try:
            tokens = shlex.split(line)
        except ValueError as exc:
            raise LedgerError(f"line {lineno}: {exc}") from exc
        label = tokens[0]
        try:
            key = tuple(int(x) for x in label.split(","))
            if len(key) != 3:
                raise ValueError
        except ValueError:
            raise LedgerError(f"line {lineno}: bad key {label!r}") from None
        fields = {}
        for tok in tokens[1:]:
            name, sep, value = tok.partition("=")
            if not sep or name not in _FIELDS:
                raise LedgerError(f"line {lineno}: entry {label}: bad field {tok!r}")
            fields[name] = value
        try:
            entry = LedgerEntry(
                key,
                int(fields["lower"]),
                int(fields["upper"]),
                fields["status"],
                fields["method"],
                fields.get("certificate", ""),
                fields.get("timestamp", ""),
            )
        except KeyError as exc:
            raise LedgerError(f"line {lineno}: entry {label}: missing field {exc.args[0]}") from None
        except ValueError as exc:
            raise LedgerError(f"line {lineno}: entry {label}: {exc}") from None
        entries[key] = entry
    return sorted(entries.values(), key=lambda e: e.key)


def format_ledger(entries) -> str:
    body = [e.format() for e in sorted(entries, key=lambda e: e.key)]
    return "\n".join([HEADER, *body]) + "\n"


def ledger_load(path: str | Path) -> list[LedgerEntry]:
    path = Path(path)
    if not path.exists():
        return []
    return parse_ledger(path.read_text(encoding="utf-8"))


@contextlib.contextmanager
def _locked(path: Path):
    lock_path = path.with_name(path.name + ".lock")
    fd = os.open(lock_path, os.O_CREAT | os.O_RDWR)
    try:
        try:
            fcntl.flock(fd, fcntl.LOCK_EX | fcntl.LOCK_NB)
        except BlockingIOError:
            raise LedgerError(f"ledger {path} is locked by another writer") from None
        yield
    finally:
        os.close(fd)


def ledger_save(path: str | Path, entries) -> None:
    path = Path(path)
    with _locked(path):
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_text(format_ledger(entries), encoding="utf-8")
        tmp.replace(path)


def ledger_add(path: str | Path, entry: LedgerEntry) -> list[LedgerEntry]:
    """Insert or replace the entry for ``entry.key``."""
    if not entry.timestamp:
        entry = replace(entry, timestamp=now())
    entries = {e.key: e for e in ledger_load(path)}
    entries[entry.key] = entry
    out = sorted(entries.values(), key=lambda e: e.key)
    ledger_save(path, out)
    return out
