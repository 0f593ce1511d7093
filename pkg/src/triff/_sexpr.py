"""Minimal s-expression reader shared by the SMT-LIB2 and formula parsers."""
from __future__ import annotations

import re
from dataclasses import dataclass

_TOKEN = re.compile(r"\s+|;[^\n]*|\(|\)|[^\s();]+")


class SexprError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at offset {pos})")
        self.pos = pos


@dataclass(frozen=True)
class Sym:
    """An atom together with its source offset."""

    text: str
    pos: int

    def __str__(self) -> str:
        return self.text


def tokenize(text: str) -> list[tuple[str, int]]:
    out = []
    for match in _TOKEN.finditer(text):
        tok = match.group()
        if tok.isspace() or tok.startswith(";"):
            continue
        out.append((tok, match.start()))
    return out


def read_all(text: str) -> list:
    """Parse every top-level expression; lists become Python lists of Sym/list."""
    tokens = tokenize(text)
    pos = 0
    exprs = []

    def read():
        nonlocal pos
        if pos >= len(tokens):
            raise SexprError("unexpected end of input", len(text))
        tok, off = tokens[pos]
        pos += 1
        if tok == "(":
            items = []
            while True:
                if pos >= len(tokens):
                    raise SexprError("unexpected end of input, missing ')'", len(text))
                if tokens[pos][0] == ")":
                    pos += 1
                    return items
                items.append(read())
        if tok == ")":
            raise SexprError("unexpected ')'", off)
        return Sym(tok, off)

    while pos < len(tokens):
        exprs.append(read())
    return exprs


def read_one(text: str):
    exprs = read_all(text)
    if len(exprs) != 1:
        raise SexprError(f"expected exactly one expression, found {len(exprs)}", 0)
    return exprs[0]


def position(expr) -> int:
    while isinstance(expr, list):
        if not expr:
            return 0
        expr = expr[0]
    return expr.pos
