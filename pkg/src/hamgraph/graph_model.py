"""Labelled graphs of Hamiltonian circle actions on 4-manifolds.

The canonical object is the extended graph: two extremal fixed components
(fat surfaces or isolated points) joined by ``k`` chains of labelled edges.
Every edge carries a label ``m`` (the order of the stabilizer) and a length
(difference of moment values).  All numbers are exact Fractions.

Public indices are 1-based: chain ``i`` in ``1..k``, edge ``j`` in
``1..l_i`` counted from the minimum upwards.  Interior vertex ``(i, j)``
sits between edges ``j`` and ``j+1`` of chain ``i``.
"""

from __future__ import annotations

import itertools
import json
import logging
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterator

log = logging.getLogger(__name__)

_RATIONAL = re.compile(r"^-?[0-9]+(/[1-9][0-9]*)?$")


class GraphError(ValueError):
    """Parse or construction failure; ``code`` is machine readable."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


def parse_rational(text, path: str = "") -> Fraction:
    if isinstance(text, bool):
        raise GraphError("malformed_rational", f"{path}: expected a rational, got {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str) or not _RATIONAL.match(text.strip()):
        raise GraphError("malformed_rational", f"{path}: malformed rational {text!r}")
    return Fraction(text.strip())


def fmt_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------- data types


@dataclass(frozen=True)
class Extreme:
    fat: bool
    height: Fraction
    area: Fraction | None = None


@dataclass(frozen=True)
class Edge:
    m: int
    length: Fraction

    @property
    def size(self) -> Fraction:
        return self.length / self.m


@dataclass(frozen=True)
class Violation:
    code: str
    message: str

    def __str__(self):
        return f"{self.code}: {self.message}"


@dataclass(frozen=True)
class Skeleton:
    """Height-free part of a graph: what the cohomology ring sees."""

    genus: int
    fat_min: bool
    fat_max: bool
    labels: tuple  # tuple of label tuples, one per chain
    e_min: Fraction
    e_max: Fraction

    @property
    def k(self) -> int:
        return len(self.labels)

    @property
    def fat_count(self) -> int:
        return int(self.fat_min) + int(self.fat_max)

    def ell(self, i: int) -> int:
        return len(self.labels[i - 1])

    def m(self, i: int, j: int) -> int:
        return self.labels[i - 1][j - 1]

    def components(self) -> list:
        comps = ["min"]
        for i, lab in enumerate(self.labels, 1):
            comps += [("v", i, j) for j in range(1, len(lab))]
        comps.append("max")
        return comps

    def is_fat(self, comp) -> bool:
        return (comp == "min" and self.fat_min) or (comp == "max" and self.fat_max)

    @property
    def iso(self) -> int:
        return sum(len(lab) - 1 for lab in self.labels) + (not self.fat_min) + (not self.fat_max)

    def boundary_below(self, i: int) -> int:
        """Signed label m_{i,0} under the boundary conventions."""
        if self.fat_min:
            return 0
        if i == 1:
            return -self.m(2, 1)
        if i == 2:
            return -self.m(1, 1)
        return -self.m(1, 1) * self.m(2, 1)

    def boundary_above(self, i: int) -> int:
        """Signed label m_{i,l_i+1}."""
        if self.fat_max:
            return 0
        other = 2 if i == 1 else 1
        return -self.m(other, self.ell(other))

    def extended_label(self, i: int, j: int) -> int:
        if j == 0:
            return self.boundary_below(i)
        if j == self.ell(i) + 1:
            return self.boundary_above(i)
        return self.m(i, j)

    def weights(self, comp) -> tuple:
        if comp == "min":
            return (self.m(1, 1), self.m(2, 1))
        if comp == "max":
            return (-self.m(1, self.ell(1)), -self.m(2, self.ell(2)))
        _, i, j = comp
        return (-self.m(i, j), self.m(i, j + 1))


@dataclass(frozen=True)
class ExtendedGraph:
    genus: int
    min: Extreme
    max: Extreme
    chains: tuple  # tuple of tuples of Edge
    flipped: bool = False

    # -- shape
    @property
    def k(self) -> int:
        return len(self.chains)

    @property
    def fat_count(self) -> int:
        return int(self.min.fat) + int(self.max.fat)

    @property
    def height(self) -> Fraction:
        return self.max.height - self.min.height

    def ell(self, i: int) -> int:
        return len(self.chains[i - 1])

    def m(self, i: int, j: int) -> int:
        return self.chains[i - 1][j - 1].m

    def labels(self) -> tuple:
        return tuple(tuple(e.m for e in ch) for ch in self.chains)

    @property
    def iso(self) -> int:
        return sum(len(ch) - 1 for ch in self.chains) + (not self.min.fat) + (not self.max.fat)

    def vertex_height(self, i: int, j: int) -> Fraction:
        """Height of v_{i,j}; j = 0 is the minimum, j = l_i the maximum."""
        return self.min.height + sum((e.length for e in self.chains[i - 1][:j]), Fraction(0))

    def interior_vertices(self) -> Iterator[tuple]:
        for i, ch in enumerate(self.chains, 1):
            for j in range(1, len(ch)):
                yield i, j

    def components(self) -> list:
        return ["min"] + [("v", i, j) for i, j in self.interior_vertices()] + ["max"]

    def skeleton(self) -> Skeleton:
        return _skeleton(self)

    def __str__(self):
        return format_graph(self)


@lru_cache(maxsize=16384)
def _skeleton(g: ExtendedGraph) -> Skeleton:
    e_min, e_max = extremal_self_intersections(g)
    return Skeleton(g.genus, g.min.fat, g.max.fat, g.labels(), e_min, e_max)


def _sort_key(chain) -> tuple:
    return (-chain[0].m, tuple(e.m for e in chain), tuple(e.length for e in chain))


# ------------------------------------------------------------ canonical form


@dataclass(frozen=True)
class ChainMap:
    """How chains moved under canonicalization.

    ``new_index[i-1]`` is the new 1-based index of old chain ``i`` or None
    when the chain was dropped as redundant.  ``reversed`` means the graph
    was turned upside down (edge ``j`` of a chain became ``l - j + 1``).
    """

    new_index: tuple
    reversed: bool

    def edge(self, i: int, j: int, ell: int):
        ni = self.new_index[i - 1]
        if ni is None:
            return None
        return (ni, ell - j + 1 if self.reversed else j)


def _reverse(g: ExtendedGraph) -> ExtendedGraph:
    top = g.max.height
    lo = Extreme(g.max.fat, top - g.max.height, g.max.area)
    hi = Extreme(g.min.fat, top - g.min.height, g.min.area)
    chains = tuple(tuple(reversed(ch)) for ch in g.chains)
    return ExtendedGraph(g.genus, lo, hi, chains, g.flipped)


def canonicalize_tracked(g: ExtendedGraph, warn: bool = False) -> tuple:
    """Return (canonical graph, ChainMap)."""
    if g.min.height != 0:
        if warn:
            log.warning("minimum height %s translated to 0", fmt_rational(g.min.height))
        d = g.min.height
        g = replace(g, min=replace(g.min, height=Fraction(0)), max=replace(g.max, height=g.max.height - d))
    rev = False
    one_fat = g.fat_count == 1
    if (one_fat and g.min.fat) or (not one_fat and g.flipped):
        g = _reverse(g)
        g = replace(g, flipped=not g.flipped)
        rev = True
    chains = list(enumerate(g.chains, 1))
    if g.fat_count >= 1:
        while len(chains) > 2:
            trivial = [n for n, (_, ch) in enumerate(chains) if len(ch) == 1 and ch[0].m == 1]
            if not trivial:
                break
            del chains[trivial[-1]]
        while len(chains) < 2:
            chains.append((None, (Edge(1, g.height),)))
    order = sorted(range(len(chains)), key=lambda n: _sort_key(chains[n][1]))
    new_index = [None] * len(g.chains)
    for pos, n in enumerate(order, 1):
        old = chains[n][0]
        if old is not None:
            new_index[old - 1] = pos
    out = replace(g, chains=tuple(chains[n][1] for n in order))
    return out, ChainMap(tuple(new_index), rev)


def canonicalize(g: ExtendedGraph, warn: bool = False) -> ExtendedGraph:
    return canonicalize_tracked(g, warn)[0]


# ----------------------------------------------------------------- invariants


def interior_weight_sums(g: ExtendedGraph) -> tuple:
    """(sum of y_p e_p, sum of e_p) over interior isolated fixed points."""
    sy = Fraction(0)
    se = Fraction(0)
    for i, j in g.interior_vertices():
        e = Fraction(1, g.m(i, j) * g.m(i, j + 1))
        sy += g.vertex_height(i, j) * e
        se += e
    return sy, se


def extremal_self_intersections(g: ExtendedGraph) -> tuple:
    """(e_min, e_max) from heights, areas and interior weights."""
    sy, se = interior_weight_sums(g)
    h = g.height
    if h <= 0:
        raise GraphError("degenerate_height", "maximum must lie above minimum")
    a_min = g.min.area if g.min.fat else Fraction(0)
    a_max = g.max.area if g.max.fat else Fraction(0)
    e_min = (sy - se * g.min.height + a_min - se * h - a_max) / h
    e_max = -se - e_min
    return e_min, e_max


def validate(g: ExtendedGraph) -> list:
    """Every violated invariant, as a list of Violation (empty when valid)."""
    out = []

    def bad(code, msg):
        out.append(Violation(code, msg))

    if g.genus < 0:
        bad("genus_negative", "genus must be non-negative")
    for name, ex in (("min", g.min), ("max", g.max)):
        if ex.fat and (ex.area is None or ex.area <= 0):
            bad("area_not_positive", f"{name}: area must be positive")
        if not ex.fat and ex.area is not None:
            bad("area_on_isolated", f"{name}: isolated extreme carries an area")
    if g.min.height != 0:
        bad("min_height_nonzero", "minimum height must be 0")
    if g.genus > 0 and g.fat_count != 2:
        bad("genus_needs_two_fat", "positive genus requires two fixed surfaces")
    if g.fat_count == 1 and not g.max.fat:
        bad("fat_not_max", "a single fixed surface must be the maximum")
    if g.k < 2:
        bad("k_lt_2", "k >= 2 required")
    if g.fat_count == 0 and g.k != 2:
        bad("k_not_2", "without fixed surfaces there must be exactly two chains")
    h = g.height
    if h <= 0:
        bad("degenerate_height", "maximum must lie above minimum")
    shape_ok = True
    for i, ch in enumerate(g.chains, 1):
        if not ch:
            bad("empty_chain", f"chain {i} has no edges")
            shape_ok = False
            continue
        for j, e in enumerate(ch, 1):
            if not isinstance(e.m, int) or e.m < 1:
                bad("label_not_positive", f"edge ({i},{j}) label must be >= 1")
                shape_ok = False
            if e.length <= 0:
                bad("length_not_positive", f"edge ({i},{j}) length must be positive")
            if e.m == 1 and 1 < j < len(ch):
                bad("label1_interior", f"edge ({i},{j}) has label 1 away from the chain ends")
        for j in range(1, len(ch)):
            if gcd(ch[j - 1].m, ch[j].m) != 1:
                bad("labels_not_coprime", f"adjacent labels not coprime at ({i},{j}): {ch[j-1].m}, {ch[j].m}")
        total = sum((e.length for e in ch), Fraction(0))
        if total != h:
            bad("chain_sum", f"chain {i} lengths sum to {fmt_rational(total)}, expected {fmt_rational(h)}")
        if g.min.fat and ch[0].m != 1:
            bad("fat_edge_label", f"chain {i} leaves the fat minimum with label {ch[0].m}")
        if g.max.fat and ch[-1].m != 1:
            bad("fat_edge_label", f"chain {i} reaches the fat maximum with label {ch[-1].m}")
    if g.fat_count == 1 and g.max.fat and not g.min.fat:
        for i in range(3, g.k + 1):
            if g.chains[i - 1] and g.m(i, 1) != 1:
                bad("extra_min_weight", f"chain {i} leaves the isolated minimum with label {g.m(i, 1)}")
    order_ok = all(_sort_key(a) <= _sort_key(b) for a, b in zip(g.chains, g.chains[1:]) if a and b)
    if not order_ok:
        bad("chain_order", "chains are not in canonical order")
    if out or not shape_ok:
        return out
    sk = g.skeleton()
    for i in range(1, g.k + 1):
        for j in range(1, g.ell(i) + 1):
            num = sk.extended_label(i, j - 1) + sk.extended_label(i, j + 1)
            if num % g.m(i, j):
                bad("self_intersection_fraction",
                    f"edge ({i},{j}) has non-integral self-intersection -{num}/{g.m(i, j)}")
    e_min, e_max = sk.e_min, sk.e_max
    for name, ex, e, chain_end in (("min", g.min, e_min, 1), ("max", g.max, e_max, -1)):
        if ex.fat:
            if e.denominator != 1:
                bad("e_consistency", f"e_{name} = {fmt_rational(e)} is not an integer")
        else:
            if chain_end == 1:
                want = Fraction(-1, g.m(1, 1) * g.m(2, 1))
            else:
                want = Fraction(-1, g.m(1, g.ell(1)) * g.m(2, g.ell(2)))
            if e != want:
                bad("e_consistency", f"e_{name} = {fmt_rational(e)}, expected {fmt_rational(want)}")
    return out


def is_valid(g: ExtendedGraph) -> bool:
    return not validate(g)


def ephemeral_edges(g) -> frozenset:
    if g.fat_count == 1 and g.m(2, 1) >= 2:
        return frozenset((i, 1) for i in range(3, g.k + 1))
    return frozenset()


def betti_numbers(g) -> tuple:
    """Ordinary Betti numbers b_0..b_4 of the underlying manifold."""
    b2 = g.iso - 2 + 2 * g.fat_count
    return (1, 2 * g.genus, b2, 2 * g.genus, 1)


def poincare_rank(g, q: int) -> int:
    """Rank of the equivariant cohomology in degree q."""
    if q < 0:
        return 0
    b = betti_numbers(g)
    return sum(b[d] for d in range(q % 2, min(q, 4) + 1, 2))


def isotropy_weights(g: ExtendedGraph) -> tuple:
    """Sorted multiset of unordered weight pairs at isolated fixed points."""
    sk_pairs = []
    if not g.min.fat:
        sk_pairs.append((g.m(1, 1), g.m(2, 1)))
    for i, j in g.interior_vertices():
        sk_pairs.append((-g.m(i, j), g.m(i, j + 1)))
    if not g.max.fat:
        sk_pairs.append((-g.m(1, g.ell(1)), -g.m(2, g.ell(2))))
    if g.flipped:
        sk_pairs = [(-a, -b) for a, b in sk_pairs]
    return tuple(sorted(tuple(sorted(p)) for p in sk_pairs))


def negate_weights(w: tuple) -> tuple:
    return tuple(sorted(tuple(sorted((-a, -b))) for a, b in w))


# ----------------------------------------------------------------- dull graph


@dataclass(frozen=True)
class DullGraph:
    genus: int
    min: tuple  # ("fat", e) or ("iso",)
    max: tuple
    chains: tuple  # sorted tuple of (core labels, attachment)

    def swapped(self) -> "DullGraph":
        return canonical_dull(self.genus, self.max, self.min,
                              [_swap_component(c) for c in self.chains])

    def __str__(self):
        def mk(x):
            return f"fat(e={x[1]})" if x[0] == "fat" else "isolated"
        parts = [f"genus={self.genus}", f"min={mk(self.min)}", f"max={mk(self.max)}"]
        for core, att in self.chains:
            parts.append(f"[{','.join(map(str, core))}]@{att}")
        return " ".join(parts)


def _swap_component(c):
    core, att = c
    att = {"min": "max", "max": "min"}.get(att, att)
    return (tuple(reversed(core)), att)


def _norm_component(core, att):
    core = tuple(core)
    if att == "free":
        core = min(core, tuple(reversed(core)))
    return (core, att)


def canonical_dull(genus, lo, hi, comps) -> DullGraph:
    return DullGraph(genus, lo, hi, tuple(sorted(_norm_component(c, a) for c, a in comps)))


def chain_core(labels: tuple):
    """(core, attachment) of an extended chain, or None for a bare [1]."""
    if labels == (1,):
        return None
    lo = 1 if labels[0] == 1 else 0
    hi = len(labels) - 1 if labels[-1] == 1 else len(labels)
    core = tuple(labels[lo:hi])
    if lo == 0 and hi == len(labels):
        att = "both"
    elif lo == 0:
        att = "min"
    elif hi == len(labels):
        att = "max"
    else:
        att = "free"
    return core, att


def dull_components(g) -> list:
    """[(core, attachment, chain index)] for every chain that survives."""
    labels = g.labels
    labels = labels() if callable(labels) else labels
    out = []
    for i, lab in enumerate(labels, 1):
        c = chain_core(lab)
        if c is not None:
            out.append((c[0], c[1], i))
    return out


def dull(g) -> DullGraph:
    """Forget heights and areas; accepts an ExtendedGraph or a Skeleton."""
    sk = g.skeleton() if isinstance(g, ExtendedGraph) else g

    def marker(fat, e):
        if fat:
            if e.denominator != 1:
                raise GraphError("e_consistency", "fat extreme with non-integral self-intersection")
            return ("fat", int(e))
        return ("iso",)

    return canonical_dull(sk.genus, marker(sk.fat_min, sk.e_min), marker(sk.fat_max, sk.e_max),
                          [(c, a) for c, a, _ in dull_components(sk)])


# ------------------------------------------------------------ decorated input


@dataclass(frozen=True)
class DecoratedGraph:
    genus: int
    min: Extreme
    max: Extreme
    vertices: tuple  # (id, height)
    edges: tuple  # (lower-or-any id, other id, label, size or None)


def build_extended(d: DecoratedGraph) -> ExtendedGraph:
    """Complete a decorated graph with label-1 edges into an extended graph."""
    heights = {"min": d.min.height, "max": d.max.height}
    for vid, y in d.vertices:
        if vid in heights:
            raise GraphError("duplicate_vertex", f"vertex id {vid!r} repeated")
        if not d.min.height < y < d.max.height:
            raise GraphError("height_out_of_range", f"vertex {vid!r} not strictly between the extremes")
        heights[vid] = y
    up = {}
    down = {}
    for a, b, m, size in d.edges:
        if a not in heights or b not in heights:
            raise GraphError("unknown_vertex", f"edge {a!r}-{b!r} references an unknown vertex")
        if m < 2:
            raise GraphError("decorated_label", "decorated edges carry labels >= 2")
        if heights[a] > heights[b]:
            a, b = b, a
        length = heights[b] - heights[a]
        if length <= 0:
            raise GraphError("flat_edge", f"edge {a!r}-{b!r} joins vertices at equal height")
        if size is not None and size * m != length:
            raise GraphError("size_conflict",
                             f"edge {a!r}-{b!r}: label {m} times size {fmt_rational(size)} != length {fmt_rational(length)}")
        for ex, name in ((d.min, "min"), (d.max, "max")):
            if ex.fat and name in (a, b):
                raise GraphError("fat_edge_label", "only label-1 edges meet a fixed surface")
        if a != "min" and a in up:
            raise GraphError("vertex_degree", f"vertex {a!r} has two edges going up")
        if b != "max" and b in down:
            raise GraphError("vertex_degree", f"vertex {b!r} has two edges going down")
        up.setdefault(a, []).append((b, m))
        down.setdefault(b, []).append((a, m))
    starts = [(b, m) for b, m in up.get("min", [])]
    chains = []

    def follow(v, first):
        edges = list(first)
        while v != "max" and v in up:
            (w, m), = up[v]
            edges.append(Edge(m, heights[w] - heights[v]))
            v = w
        if v != "max":
            edges.append(Edge(1, d.max.height - heights[v]))
        return edges

    for b, m in starts:
        chains.append(follow(b, [Edge(m, heights[b] - d.min.height)]))
    for vid, y in d.vertices:
        if vid not in down:
            chains.append(follow(vid, [Edge(1, y - d.min.height)]))
    g = ExtendedGraph(d.genus, d.min, d.max, tuple(tuple(c) for c in chains))
    return canonicalize(g)


def forget_trivial(g: ExtendedGraph) -> DecoratedGraph:
    """Decorated view: drop label-1 edges."""
    verts = []
    edges = []
    vid = {}
    for i, j in g.interior_vertices():
        vid[(i, j)] = f"v{i}_{j}"
        verts.append((vid[(i, j)], g.vertex_height(i, j)))
    for i, ch in enumerate(g.chains, 1):
        for j, e in enumerate(ch, 1):
            if e.m >= 2:
                a = "min" if j == 1 else vid[(i, j - 1)]
                b = "max" if j == len(ch) else vid[(i, j)]
                edges.append((a, b, e.m, None))
    return DecoratedGraph(g.genus, g.min, g.max, tuple(verts), tuple(edges))


# -------------------------------------------------------------- file format


def _parse_extreme(obj, path) -> Extreme:
    if not isinstance(obj, dict):
        raise GraphError("syntax", f"{path}: expected an object")
    fat = obj.get("fat")
    if not isinstance(fat, bool):
        raise GraphError("syntax", f"{path}.fat: expected a boolean")
    if "height" not in obj:
        raise GraphError("syntax", f"{path}.height: missing")
    h = parse_rational(obj["height"], f"{path}.height")
    area = None
    if fat:
        if "area" not in obj:
            raise GraphError("syntax", f"{path}.area: required for a fat extreme")
        area = parse_rational(obj["area"], f"{path}.area")
        if area <= 0:
            raise GraphError("area_not_positive", f"{path}.area: area must be positive")
    elif "area" in obj:
        raise GraphError("syntax", f"{path}.area: only fat extremes carry an area")
    return Extreme(fat, h, area)


def graph_from_obj(obj) -> ExtendedGraph:
    if not isinstance(obj, dict):
        raise GraphError("syntax", "top level: expected an object")
    genus = obj.get("genus", 0)
    if not isinstance(genus, int) or isinstance(genus, bool) or genus < 0:
        raise GraphError("syntax", "genus: expected a non-negative integer")
    lo = _parse_extreme(obj.get("min"), "min")
    hi = _parse_extreme(obj.get("max"), "max")
    if "chains" not in obj:
        if "vertices" in obj or "edges" in obj:
            return build_extended(decorated_from_obj(obj))
        raise GraphError("syntax", "chains: missing")
    chains = []
    for i, ch in enumerate(obj["chains"]):
        path = f"chains[{i}]"
        if not isinstance(ch, dict) or not isinstance(ch.get("edges"), list):
            raise GraphError("syntax", f"{path}.edges: expected a list")
        edges = []
        for j, e in enumerate(ch["edges"]):
            p = f"{path}.edges[{j}]"
            if not isinstance(e, dict):
                raise GraphError("syntax", f"{p}: expected an object")
            m = e.get("m")
            if not isinstance(m, int) or isinstance(m, bool) or m < 1:
                raise GraphError("syntax", f"{p}.m: expected an integer >= 1")
            if "len" not in e:
                raise GraphError("syntax", f"{p}.len: missing")
            length = parse_rational(e["len"], f"{p}.len")
            if length <= 0:
                raise GraphError("length_not_positive", f"{p}.len: length must be positive")
            edges.append(Edge(m, length))
        chains.append(tuple(edges))
    return ExtendedGraph(genus, lo, hi, tuple(chains), bool(obj.get("flipped", False)))


def decorated_from_obj(obj) -> DecoratedGraph:
    lo = _parse_extreme(obj.get("min"), "min")
    hi = _parse_extreme(obj.get("max"), "max")
    verts = []
    for n, v in enumerate(obj.get("vertices", [])):
        verts.append((str(v["id"]), parse_rational(v["height"], f"vertices[{n}].height")))
    edges = []
    for n, e in enumerate(obj.get("edges", [])):
        size = parse_rational(e["size"], f"edges[{n}].size") if "size" in e else None
        edges.append((str(e["from"]), str(e["to"]), int(e["m"]), size))
    return DecoratedGraph(int(obj.get("genus", 0)), lo, hi, tuple(verts), tuple(edges))


def parse_graph(text: str) -> ExtendedGraph:
    """Parse the JSON graph format exactly as written (no validation)."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphError("syntax", f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return graph_from_obj(obj)


def _extreme_obj(ex: Extreme) -> dict:
    d = {"fat": ex.fat, "height": fmt_rational(ex.height)}
    if ex.fat:
        d["area"] = fmt_rational(ex.area)
    return d


def graph_to_obj(g: ExtendedGraph) -> dict:
    d = {
        "genus": g.genus,
        "min": _extreme_obj(g.min),
        "max": _extreme_obj(g.max),
        "chains": [{"edges": [{"m": e.m, "len": fmt_rational(e.length)} for e in ch]} for ch in g.chains],
    }
    if g.flipped:
        d["flipped"] = True
    return d


def dump_graph(g: ExtendedGraph) -> str:
    return json.dumps(graph_to_obj(g), indent=2)


def format_graph(g: ExtendedGraph) -> str:
    def ex(e):
        if e.fat:
            return f"fat(h={fmt_rational(e.height)}, a={fmt_rational(e.area)})"
        return f"point(h={fmt_rational(e.height)})"
    chains = " ".join(
        "[" + ",".join(f"{e.m}:{fmt_rational(e.length)}" for e in ch) + "]" for ch in g.chains)
    flag = " flipped" if g.flipped else ""
    return f"g={g.genus} min={ex(g.min)} max={ex(g.max)} chains {chains}{flag}"


def make_graph(genus, lo, hi, chains, canonical=True) -> ExtendedGraph:
    """Convenience constructor.

    ``lo``/``hi`` are ``None`` for an isolated extreme or the area of a fat
    one; ``chains`` are lists of ``(label, length)`` pairs.  The top height
    is the common chain length.
    """
    chains = tuple(tuple(Edge(int(m), Fraction(x)) for m, x in ch) for ch in chains)
    h = sum((e.length for e in chains[0]), Fraction(0))
    g = ExtendedGraph(
        genus,
        Extreme(lo is not None, Fraction(0), None if lo is None else Fraction(lo)),
        Extreme(hi is not None, h, None if hi is None else Fraction(hi)),
        chains,
    )
    return canonicalize(g) if canonical else g


# --------------------------------------------------------------- enumeration


def _chain_shapes(max_len, max_label, first_free, last_free, need_first1, need_last1):
    """Label sequences allowed by the chain rules.

    ``need_first1``: the bottom edge must have label 1 (fat minimum).
    ``first_free``: the bottom edge may carry any label.
    """
    out = []
    for ell in range(1, max_len + 1):
        for labs in itertools.product(range(1, max_label + 1), repeat=ell):
            if any(x == 1 for x in labs[1:-1]):
                continue
            if need_first1 and labs[0] != 1:
                continue
            if need_last1 and labs[-1] != 1:
                continue
            if not first_free and labs[0] != 1:
                continue
            if not last_free and labs[-1] != 1:
                continue
            if any(gcd(a, b) != 1 for a, b in zip(labs, labs[1:])):
                continue
            out.append(labs)
    return out


def _grid(hi: Fraction, den: int) -> list:
    pts = set()
    for d in range(1, den + 1):
        for n in range(1, int(hi * d) + 1):
            x = Fraction(n, d)
            if 0 < x < hi:
                pts.add(x)
    return sorted(pts)


def _height_choices(labels, grid):
    """Strictly increasing interior heights for each chain, all combos."""
    per_chain = [list(itertools.combinations(grid, len(lab) - 1)) for lab in labels]
    return itertools.product(*per_chain)


def _skeletons(max_edges, max_label):
    """(genus, fat_min, fat_max, label tuples) in a deterministic order."""
    configs = [(0, True, True), (1, True, True), (0, False, True), (0, False, False)]
    for genus, fmin, fmax in configs:
        if fmin and fmax:
            shapes = _chain_shapes(max_edges, max_label, False, False, True, True)
        elif fmax:
            shapes = _chain_shapes(max_edges, max_label, True, False, False, True)
        else:
            shapes = _chain_shapes(max_edges, max_label, True, True, False, False)
        shapes.sort(key=lambda lab: (len(lab), lab))
        seen = set()
        for combo in _multisets(shapes, max_edges):
            k = len(combo)
            if k < 2 or (not fmin and not fmax and k != 2):
                continue
            if (fmin or fmax) and k > 2 and (1,) in combo:
                continue
            ordered = tuple(sorted(combo, key=lambda lab: (-lab[0], lab)))
            if fmax and not fmin and any(lab[0] != 1 for lab in ordered[2:]):
                continue
            if ordered in seen:
                continue
            seen.add(ordered)
            yield genus, fmin, fmax, ordered


def _multisets(items, budget, start=0):
    """Multisets of items (as tuples) whose total length is <= budget."""
    yield ()
    for n in range(start, len(items)):
        size = len(items[n])
        if size > budget:
            break
        for rest in _multisets(items, budget - size, n):
            yield (items[n],) + rest


_TOP_HEIGHTS = (1, 2, 3)
_AREA_MAX = 2


def _skeleton_ok(genus, fmin, fmax, labels) -> bool:
    sk = Skeleton(genus, fmin, fmax, labels, Fraction(0), Fraction(0))
    for i in range(1, sk.k + 1):
        for j in range(1, sk.ell(i) + 1):
            if (sk.extended_label(i, j - 1) + sk.extended_label(i, j + 1)) % sk.m(i, j):
                return False
    return True


def enumerate_graphs(max_edges: int, max_label: int, max_denominator: int) -> Iterator[ExtendedGraph]:
    """Every valid canonical graph within the bounds on a small rational grid.

    Grid: top height in {1, 2, 3}; interior heights and fat areas are
    positive rationals with denominator <= max_denominator, areas <= 2.
    """
    areas = [a for a in _grid(Fraction(_AREA_MAX + 1), max_denominator) if a <= _AREA_MAX]
    area_set = set(areas)
    seen = set()
    for genus, fmin, fmax, labels in _skeletons(max_edges, max_label):
        if not _skeleton_ok(genus, fmin, fmax, labels):
            continue
        eps = [[Fraction(1, lab[j] * lab[j + 1]) for j in range(len(lab) - 1)] for lab in labels]
        se = sum((sum(c, Fraction(0)) for c in eps), Fraction(0))
        if not fmin:
            e_lo = Fraction(-1, labels[0][0] * labels[1][0])
        if not fmax:
            e_hi = Fraction(-1, labels[0][-1] * labels[1][-1])
        for top in _TOP_HEIGHTS:
            h = Fraction(top)
            grid = _grid(h, max_denominator)
            for ys in _height_choices(labels, grid):
                sy = sum((y * e for yy, c in zip(ys, eps) for y, e in zip(yy, c)), Fraction(0))
                base = sy - se * h  # e_min * h = base + a_min - a_max
                if fmin:
                    candidates = []
                    for a_min in areas:
                        lo_e = (base + a_min - _AREA_MAX) / h
                        hi_e = (base + a_min) / h
                        for e in range(_ceil(lo_e), _ceil(hi_e)):
                            a_max = base + a_min - e * h
                            if a_max in area_set:
                                candidates.append((a_min, a_max))
                elif fmax:
                    a_max = base - e_lo * h
                    candidates = [(None, a_max)] if a_max in area_set else []
                else:
                    if base != e_lo * h or -se - e_lo != e_hi:
                        continue
                    candidates = [(None, None)]
                if not candidates:
                    continue
                chains = []
                for lab, yy in zip(labels, ys):
                    pts = (Fraction(0),) + yy + (h,)
                    chains.append(tuple(Edge(m, pts[n + 1] - pts[n]) for n, m in enumerate(lab)))
                chains = tuple(chains)
                for a_min, a_max in candidates:
                    g = ExtendedGraph(genus, Extreme(fmin, Fraction(0), a_min),
                                      Extreme(fmax, h, a_max), chains)
                    g = canonicalize(g)
                    if g in seen or validate(g):
                        continue
                    seen.add(g)
                    yield g


def _ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)
