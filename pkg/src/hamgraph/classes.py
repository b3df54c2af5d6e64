"""Degree-2 class symbols and integer combinations of them."""

from __future__ import annotations

import re

TAU0 = ("tau0",)
TAUINF = ("tauinf",)
TAUH = ("tauh",)


def sigma(i: int, j: int) -> tuple:
    return ("s", i, j)


def is_sigma(sym) -> bool:
    return sym[0] == "s"


def sym_name(sym) -> str:
    if sym[0] == "s":
        return f"s({sym[1]},{sym[2]})"
    return sym[0]


def _sym_order(sym):
    rank = {"tau0": 0, "tauinf": 1, "tauh": 2, "s": 3}[sym[0]]
    return (rank,) + tuple(sym[1:])


def cls(*pairs) -> dict:
    """cls((2, sigma(1,1)), (-1, TAUH)) -> {sigma(1,1): 2, TAUH: -1}"""
    out = {}
    for c, s in pairs:
        out[s] = out.get(s, 0) + c
    return {s: c for s, c in out.items() if c}


def add(*classes) -> dict:
    out = {}
    for c in classes:
        for s, v in c.items():
            out[s] = out.get(s, 0) + v
    return {s: v for s, v in out.items() if v}


def scale(c: dict, k: int) -> dict:
    return {s: v * k for s, v in c.items() if v * k}


def gen(sym) -> dict:
    return {sym: 1}


def format_class(c: dict) -> str:
    if not c:
        return "0"
    parts = []
    for s in sorted(c, key=_sym_order):
        v = c[s]
        name = sym_name(s)
        mag = abs(v)
        term = name if mag == 1 else f"{mag}*{name}"
        if not parts:
            parts.append(term if v > 0 else f"-{term}")
        else:
            parts.append(("+ " if v > 0 else "- ") + term)
    return " ".join(parts)


_TERM = re.compile(r"\s*([+-])?\s*(?:(\d+)\s*\*?\s*)?(tau0|tauinf|tauh|s\(\s*(\d+)\s*,\s*(\d+)\s*\))\s*")


def parse_class(text: str) -> dict:
    """Inverse of format_class, e.g. "tauinf - 2*s(1,1)"."""
    text = text.strip()
    if text == "0":
        return {}
    pos = 0
    out = {}
    first = True
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or (not first and not m.group(1)):
            raise ValueError(f"cannot parse class near {text[pos:]!r}")
        sign = -1 if m.group(1) == "-" else 1
        coef = int(m.group(2)) if m.group(2) else 1
        if m.group(4):
            sym = sigma(int(m.group(4)), int(m.group(5)))
        else:
            sym = (m.group(3),)
        out[sym] = out.get(sym, 0) + sign * coef
        pos = m.end()
        first = False
    return {s: v for s, v in out.items() if v}
