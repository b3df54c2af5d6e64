"""Minimal models, equivariant blowups and blowdowns on extended graphs.

Blowup types follow the generator transport table:

* ``I``   at an interior isolated point: a new edge of label ``a+b``
  between the edges of labels ``a`` and ``b``;
* ``II``  at a point of a fixed surface: a new chain ``[1, 1]`` whose edge
  next to the surface is exceptional; the surface loses area ``lam`` and its
  self-intersection drops by one;
* ``III`` at an isolated extreme with weights ``a > b``: the chain carrying
  ``a`` gains an exceptional edge of label ``a - b`` at that end;
* ``IV``  at an isolated extreme with weights ``1, 1``: the point becomes a
  fixed sphere of area ``lam`` and self-intersection ``-1``.

Sites are named ``interior(i,j)``, ``isolated_extreme(min|max)`` (types III
and IV) and ``fat_to_edge(min|max)`` (type II).  Blowdown is the inverse
move; it is computed directly and then confirmed by replaying the blowup.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import gcd

from .classes import TAU0, TAUH, TAUINF, gen, sigma
from .graph_model import (
    DecoratedGraph,
    Edge,
    ExtendedGraph,
    Extreme,
    GraphError,
    build_extended,
    canonicalize,
    canonicalize_tracked,
    ephemeral_edges,
    fmt_rational,
    validate,
)
from .localization import self_intersection


class SurgeryError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


# ------------------------------------------------------------ toric models


def _primitive(dx: Fraction, dy: Fraction) -> tuple:
    """(primitive integer direction, affine length) of a rational vector."""
    den = dx.denominator * dy.denominator // gcd(dx.denominator, dy.denominator)
    ix, iy = int(dx * den), int(dy * den)
    d = gcd(ix, iy)
    return (ix // d, iy // d), Fraction(d, den)


def toric_projection(vertices, m: int, n: int) -> ExtendedGraph:
    """Extended graph of the circle ``s -> (s^m, s^n)`` inside a toric action.

    ``vertices`` is a Delzant polygon listed counterclockwise.
    """
    vs = [(Fraction(x), Fraction(y)) for x, y in vertices]
    nv = len(vs)
    hts = [m * x + n * y for x, y in vs]
    edges = []
    for a in range(nv):
        b = (a + 1) % nv
        (px, py), length = _primitive(vs[b][0] - vs[a][0], vs[b][1] - vs[a][1])
        edges.append((a, b, abs(m * px + n * py), length))
    lo, hi = min(hts), max(hts)
    fixed = [(a, b, L) for a, b, lab, L in edges if lab == 0]
    lo_area = hi_area = None
    owner = {}
    for a, b, L in fixed:
        if hts[a] == lo:
            lo_area = L
            owner[a] = owner[b] = "min"
        else:
            hi_area = L
            owner[a] = owner[b] = "max"
    for a in range(nv):
        if a in owner:
            continue
        if hts[a] == lo:
            owner[a] = "min"
        elif hts[a] == hi:
            owner[a] = "max"
        else:
            owner[a] = f"p{a}"
    verts = tuple((owner[a], hts[a] - lo) for a in range(nv) if owner[a] not in ("min", "max"))
    dec_edges = tuple((owner[a], owner[b], lab, L) for a, b, lab, L in edges if lab >= 2)
    d = DecoratedGraph(
        0,
        Extreme(lo_area is not None, Fraction(0), lo_area),
        Extreme(hi_area is not None, hi - lo, hi_area),
        verts,
        dec_edges,
    )
    return build_extended(d)


def minimal_cp2(m: int, n: int, lam) -> ExtendedGraph:
    lam = Fraction(lam)
    if gcd(m, n) != 1:
        raise SurgeryError("gcd", f"gcd({m},{n}) must be 1")
    if lam <= 0:
        raise SurgeryError("size", "lambda must be positive")
    return toric_projection([(0, 0), (lam, 0), (0, lam)], m, n)


def minimal_hirzebruch(N: int, m: int, n: int, beta, f) -> ExtendedGraph:
    beta, f = Fraction(beta), Fraction(f)
    if gcd(m, n) != 1:
        raise SurgeryError("gcd", f"gcd({m},{n}) must be 1")
    if N < 0:
        raise SurgeryError("twist", "N must be non-negative")
    if not (beta >= f > 0) or beta - N * f / 2 <= 0:
        raise SurgeryError("size", "need beta >= f > 0 and beta - N f/2 > 0")
    poly = [(0, 0), (beta + N * f / 2, 0), (beta - N * f / 2, f), (0, f)]
    return toric_projection(poly, m, n)


def minimal_ruled(genus: int, fiber_size, base_size, e_min: int) -> ExtendedGraph:
    f, b = Fraction(fiber_size), Fraction(base_size)
    if genus < 0 or f <= 0 or b <= 0:
        raise SurgeryError("size", "genus must be >= 0 and sizes positive")
    a_min = b + e_min * f / 2
    a_max = b - e_min * f / 2
    if a_min <= 0 or a_max <= 0:
        raise SurgeryError("size", "derived fixed-surface area is not positive")
    g = ExtendedGraph(genus, Extreme(True, Fraction(0), a_min), Extreme(True, f, a_max),
                      ((Edge(1, f),), (Edge(1, f),)))
    return canonicalize(g)


@dataclass(frozen=True)
class MinimalModelId:
    kind: str
    params: tuple

    CP2 = "CP2"
    HIRZEBRUCH = "Hirzebruch"
    RULED = "Ruled"

    def build(self) -> ExtendedGraph:
        if self.kind == self.CP2:
            return minimal_cp2(*self.params)
        if self.kind == self.HIRZEBRUCH:
            return minimal_hirzebruch(*self.params)
        return minimal_ruled(*self.params)

    def __str__(self):
        return f"{self.kind}({', '.join(fmt_rational(p) if isinstance(p, Fraction) else str(p) for p in self.params)})"

    def to_obj(self) -> dict:
        return {"kind": self.kind,
                "params": [fmt_rational(p) if isinstance(p, Fraction) else p for p in self.params]}


def _label_profile(g: ExtendedGraph) -> tuple:
    return (g.fat_count, tuple(sorted(e.m for ch in g.chains for e in ch if e.m >= 2)))


def _try(model: MinimalModelId, g: ExtendedGraph):
    try:
        return model if model.build() == g else None
    except (SurgeryError, GraphError, ValueError):
        return None


def recognize(g: ExtendedGraph):
    """The minimal model whose constructor reproduces ``g`` exactly, or None."""
    h = g.height
    if g.fat_count == 2 and g.labels() == ((1,), (1,)):
        beta = (g.min.area + g.max.area) / 2
        e = (g.min.area - g.max.area) / h
        if e.denominator != 1:
            return None
        e = int(e)
        if g.genus == 0:
            hit = _try(MinimalModelId(MinimalModelId.HIRZEBRUCH, (abs(e), 0, 1 if e >= 0 else -1, beta, h)), g)
            if hit:
                return hit
        return _try(MinimalModelId(MinimalModelId.RULED, (g.genus, h, beta, e)), g)
    if g.genus != 0:
        return None
    profile = _label_profile(g)
    labels = {e.m for ch in g.chains for e in ch} | {1}
    signed = sorted({0} | {s * x for x in labels for s in (1, -1)}, key=lambda x: (x < 0, abs(x)))
    pairs = sorted(itertools.product(signed, signed), key=lambda p: ((p[0] < 0) + (p[1] < 0), abs(p[0]) + abs(p[1]), -p[0], -p[1]))
    # Hirzebruch surfaces first, then the projective plane
    sizes = {e.length / e.m for ch in g.chains for e in ch}
    for ex in (g.min, g.max):
        if ex.fat:
            sizes.add(ex.area)
    for m, n in pairs:
        if gcd(m, n) != 1:
            continue
        n_range = {0}
        if m:
            n_range = {(n - s * x) // m for x in labels | {0} for s in (1, -1)
                       if (n - s * x) % m == 0 and (n - s * x) // m >= 0}
        for N in sorted(n_range):
            labs = [abs(m), abs(n - m * N), abs(m), abs(n)]
            fat = labs.count(0)
            if fat > 2 or (fat, tuple(sorted(x for x in labs if x >= 2))) != profile:
                continue
            for f in sorted(sizes):
                for beta in _hirz_betas(m, n, N, f, h):
                    hit = _try(MinimalModelId(MinimalModelId.HIRZEBRUCH, (N, m, n, beta, f)), g)
                    if hit:
                        return hit
    for m, n in pairs:
        if gcd(m, n) != 1:
            continue
        labs = [abs(m), abs(n), abs(m - n)]
        fat = labs.count(0)
        if fat > 1 or (fat, tuple(sorted(x for x in labs if x >= 2))) != profile:
            continue
        spread = max(0, m, n) - min(0, m, n)
        hit = _try(MinimalModelId(MinimalModelId.CP2, (m, n, h / spread)), g)
        if hit:
            return hit
    return None


def _hirz_betas(m, n, N, f, h):
    # vertex heights are const + coef * beta
    consts = [Fraction(0), m * N * f / 2, -m * N * f / 2 + n * f, n * f]
    coefs = [0, m, m, 0]
    out = set()
    for a in range(4):
        for b in range(4):
            if coefs[a] != coefs[b]:
                beta = (h - consts[a] + consts[b]) / (coefs[a] - coefs[b])
                if beta > 0:
                    out.add(beta)
    return sorted(out)


# ----------------------------------------------------------------- sites


@dataclass(frozen=True)
class Site:
    kind: str  # interior | isolated_extreme | fat_to_edge | fat_to_isolated
    end: str | None = None
    i: int | None = None
    j: int | None = None

    def __str__(self):
        if self.kind == "interior":
            return f"interior({self.i},{self.j})"
        return f"{self.kind}({self.end})"


@dataclass(frozen=True)
class Target:
    kind: str  # edge | fat_extreme
    end: str | None = None
    i: int | None = None
    j: int | None = None

    def __str__(self):
        if self.kind == "edge":
            return f"edge({self.i},{self.j})"
        return f"fat_extreme({self.end})"


_SITE_RE = re.compile(r"^\s*(\w+)\s*\(\s*([^)]*)\)\s*$")


def parse_site(text: str) -> Site:
    m = _SITE_RE.match(text)
    if not m:
        raise SurgeryError("syntax", f"cannot parse site {text!r}")
    kind, args = m.group(1).lower(), [a.strip() for a in m.group(2).split(",")]
    aliases = {"interior": "interior", "isolatedextreme": "isolated_extreme",
               "isolated_extreme": "isolated_extreme", "fattoedge": "fat_to_edge",
               "fat_to_edge": "fat_to_edge", "fattoisolated": "fat_to_isolated",
               "fat_to_isolated": "fat_to_isolated"}
    if kind not in aliases:
        raise SurgeryError("syntax", f"unknown site kind {kind!r}")
    kind = aliases[kind]
    if kind == "interior":
        return Site("interior", i=int(args[0]), j=int(args[1]))
    return Site(kind, end=args[0].lower())


def parse_target(text: str) -> Target:
    m = _SITE_RE.match(text)
    if not m:
        raise SurgeryError("syntax", f"cannot parse target {text!r}")
    kind, args = m.group(1).lower(), [a.strip() for a in m.group(2).split(",")]
    if kind == "edge":
        return Target("edge", i=int(args[0]), j=int(args[1]))
    if kind in ("fat_extreme", "fatextreme", "fat"):
        return Target("fat_extreme", end=args[0].lower())
    raise SurgeryError("syntax", f"unknown target kind {kind!r}")


# ------------------------------------------------------------ tagged form


@dataclass
class _Work:
    """Mutable graph whose edges carry identity tags."""

    genus: int
    lo: list  # [fat, area]
    hi: list
    chains: list  # lists of [m, length, tag]
    flipped: bool

    @classmethod
    def of(cls, g: ExtendedGraph):
        chains = [[[e.m, e.length, ("e", i, j)] for j, e in enumerate(ch, 1)]
                  for i, ch in enumerate(g.chains, 1)]
        return cls(g.genus, [g.min.fat, g.min.area], [g.max.fat, g.max.area], chains, g.flipped)

    def graph(self) -> ExtendedGraph:
        chains = tuple(tuple(Edge(m, L) for m, L, _ in ch) for ch in self.chains)
        h = sum((L for _, L, _ in self.chains[0]), Fraction(0))
        return ExtendedGraph(self.genus, Extreme(self.lo[0], Fraction(0), self.lo[1] if self.lo[0] else None),
                             Extreme(self.hi[0], h, self.hi[1] if self.hi[0] else None), chains, self.flipped)

    def finish(self):
        """(canonical graph, map from tags to new (i, j) or None)."""
        raw = self.graph()
        g, cmap = canonicalize_tracked(raw)
        where = {}
        for i, ch in enumerate(self.chains, 1):
            for j, (_, _, tag) in enumerate(ch, 1):
                where[tag] = cmap.edge(i, j, len(ch))
        return g, where, cmap.reversed


@dataclass(frozen=True)
class BlowupRecord:
    site: Site
    lam: Fraction
    type: str  # I, II, III or IV
    before: ExtendedGraph = field(repr=False)
    after: ExtendedGraph = field(repr=False)
    generator_map: tuple = field(repr=False)  # ((old symbol, new class dict), ...)
    exceptional: dict = field(repr=False)
    exceptional_feature: Target = None

    def to_obj(self) -> dict:
        return {"site": str(self.site), "lambda": fmt_rational(self.lam), "type": self.type}

    def __str__(self):
        return f"type {self.type} blowup at {self.site} with size {fmt_rational(self.lam)}"


def _assert_valid(g: ExtendedGraph, what: str):
    bad = validate(g)
    if bad:
        raise SurgeryError("invalid_blowup", f"{what} produced an invalid graph: {bad[0]}")


def _weights_at(g: ExtendedGraph, end: str) -> tuple:
    if end == "min":
        return g.m(1, 1), g.m(2, 1)
    return g.m(1, g.ell(1)), g.m(2, g.ell(2))


def blowup(g: ExtendedGraph, site: Site, lam) -> tuple:
    """Return (blown-up canonical graph, BlowupRecord)."""
    lam = Fraction(lam)
    if lam <= 0:
        raise SurgeryError("invalid_lambda", "invalid λ-blowup: λ must be positive")
    w = _Work.of(g)
    too_big = SurgeryError("invalid_lambda", f"invalid λ-blowup: λ={fmt_rational(lam)} too large at {site}")
    if site.kind == "interior":
        i, j = site.i, site.j
        if not (1 <= i <= g.k and 1 <= j < g.ell(i)):
            raise SurgeryError("site_mismatch", f"site mismatch: no interior vertex ({i},{j})")
        ch = w.chains[i - 1]
        a, b = ch[j - 1][0], ch[j][0]
        if not (a * lam < ch[j - 1][1] and b * lam < ch[j][1]):
            raise too_big
        ch[j - 1][1] -= a * lam
        ch[j][1] -= b * lam
        ch.insert(j, [a + b, (a + b) * lam, "E"])
        btype = "I"
    elif site.kind == "fat_to_edge":
        ex = w.lo if site.end == "min" else w.hi
        if not ex[0]:
            raise SurgeryError("site_mismatch", f"site mismatch: the {site.end} is not a fixed surface")
        h = g.height
        if not (lam < h and lam < ex[1]):
            raise too_big
        ex[1] -= lam
        new = [[1, h - lam, "N"], [1, lam, "E"]] if site.end == "max" else [[1, lam, "E"], [1, h - lam, "N"]]
        w.chains.append(new)
        btype = "II"
    elif site.kind == "isolated_extreme":
        ex = w.lo if site.end == "min" else w.hi
        if ex[0]:
            raise SurgeryError("site_mismatch", f"site mismatch: the {site.end} is a fixed surface")
        a, b = _weights_at(g, site.end)
        if a == b == 1:
            pos = 0 if site.end == "min" else -1
            if any(not lam < ch[pos][1] for ch in w.chains):
                raise too_big
            for ch in w.chains:
                ch[pos][1] -= lam
            ex[0], ex[1] = True, lam
            btype = "IV"
        else:
            big, small = (1, 2) if a > b else (2, 1)
            pos = 0 if site.end == "min" else -1
            a, b = max(a, b), min(a, b)
            for n, ch in enumerate(w.chains, 1):
                need = a * lam if n == big else b * lam
                if not need < ch[pos][1]:
                    raise too_big
            for n, ch in enumerate(w.chains, 1):
                ch[pos][1] -= a * lam if n == big else b * lam
            e = [a - b, (a - b) * lam, "E"]
            if site.end == "min":
                w.chains[big - 1].insert(0, e)
            else:
                w.chains[big - 1].append(e)
            btype = "III"
    elif site.kind == "fat_to_isolated":
        raise SurgeryError("site_mismatch", "site mismatch: a blowup never removes a fixed surface")
    else:
        raise SurgeryError("site_mismatch", f"unknown site {site}")
    new, where, rev = w.finish()
    _assert_valid(new, "blowup")
    gmap, exc, feature = _transport(g, new, where, rev, btype, site)
    rec = BlowupRecord(site, lam, btype, g, new, gmap, exc, feature)
    return new, rec


def _transport(old: ExtendedGraph, new: ExtendedGraph, where: dict, rev: bool, btype: str, site: Site):
    def end_sym(end):
        if rev:
            end = "max" if end == "min" else "min"
        return TAU0 if end == "min" else TAUINF

    out = []
    if old.min.fat:
        out.append((TAU0, gen(end_sym("min"))))
    if old.max.fat:
        out.append((TAUINF, gen(end_sym("max"))))
    out.append((TAUH, gen(TAUH)))
    for i in range(1, old.k + 1):
        for j in range(1, old.ell(i) + 1):
            pos = where.get(("e", i, j))
            out.append((sigma(i, j), gen(sigma(*pos)) if pos else gen(TAUH)))
    if btype == "IV":
        exc = gen(end_sym(site.end))
        feature = Target("fat_extreme", end=("max" if site.end == "min" else "min") if rev else site.end)
    else:
        pos = where["E"]
        exc = gen(sigma(*pos))
        feature = Target("edge", i=pos[0], j=pos[1])
    return tuple(out), exc, feature


def transport_generators(rec: BlowupRecord) -> tuple:
    """(old generator -> new class dict, exceptional class)."""
    return dict(rec.generator_map), rec.exceptional


# -------------------------------------------------------------- blowdown


def blowdown_targets(g: ExtendedGraph) -> list:
    """Every feature that can be blown down, highest first."""
    sk = g.skeleton()
    eph = ephemeral_edges(g)
    out = []
    for end, ex, e in (("max", g.max, sk.e_max), ("min", g.min, sk.e_min)):
        if ex.fat and e == -1 and g.genus == 0:
            out.append(((-ex.height, -ex.height, 0, 0), Target("fat_extreme", end=end)))
    for i in range(1, g.k + 1):
        for j in range(1, g.ell(i) + 1):
            if (i, j) in eph:
                continue
            if self_intersection(sk, i, j) == -1:
                top, bot = g.vertex_height(i, j), g.vertex_height(i, j - 1)
                out.append(((-top, -bot, i, j), Target("edge", i=i, j=j)))
    out.sort(key=lambda x: x[0])
    return [t for _, t in out]


def _inverse(g: ExtendedGraph, t: Target) -> tuple:
    """(graph before the blowup, candidate sites, lambda, type)."""
    w = _Work.of(g)
    if t.kind == "fat_extreme":
        ex = w.lo if t.end == "min" else w.hi
        sk = g.skeleton()
        e = sk.e_min if t.end == "min" else sk.e_max
        if not ex[0] or e != -1 or g.genus != 0:
            raise SurgeryError("not_blowdownable", f"not blowdownable: {t} (e = {fmt_rational(e) if ex[0] else 'n/a'})")
        lam = ex[1]
        other = w.hi if t.end == "min" else w.lo
        if not other[0] and g.k != 2:
            raise SurgeryError("not_blowdownable", f"not blowdownable: {t} would leave {g.k} chains between points")
        pos = 0 if t.end == "min" else -1
        for ch in w.chains:
            ch[pos][1] += lam
        ex[0], ex[1] = False, None
        return w, lam, "IV", [Site("isolated_extreme", end=x) for x in ("min", "max")]
    i, j = t.i, t.j
    if not (1 <= i <= g.k and 1 <= j <= g.ell(i)):
        raise SurgeryError("not_blowdownable", f"not blowdownable: no edge ({i},{j})")
    if (i, j) in ephemeral_edges(g):
        raise SurgeryError("not_blowdownable", f"not blowdownable: edge ({i},{j}) is ephemeral")
    sk = g.skeleton()
    si = self_intersection(sk, i, j)
    if si != -1:
        raise SurgeryError("not_blowdownable", f"not blowdownable: edge ({i},{j}) has self-intersection {si}")
    ch = w.chains[i - 1]
    ell = len(ch)
    mj, L = ch[j - 1][0], ch[j - 1][1]
    lam = L / mj
    if 1 < j < ell:
        del ch[j - 1]
        ch[j - 2][1] += ch[j - 2][0] * lam
        ch[j - 1][1] += ch[j - 1][0] * lam
        return w, lam, "I", [Site("interior", i=a, j=b) for a in range(1, g.k + 1) for b in range(1, 8)]
    if ell == 1:
        raise SurgeryError("not_blowdownable", f"not blowdownable: edge ({i},{j}) spans the whole chain")
    end = "min" if j == 1 else "max"
    ex = w.lo if end == "min" else w.hi
    if ex[0]:
        # type II: chain [1, 1] collapses to [1]
        if ell != 2:
            raise SurgeryError("not_blowdownable", f"not blowdownable: unexpected chain at edge ({i},{j})")
        ex[1] += lam
        del w.chains[i - 1]
        if len(w.chains) < 2:
            h = g.height
            w.chains.append([[1, h, "N"]])
        return w, lam, "II", [Site("fat_to_edge", end=end)]
    # type III: the new extreme sits on the partner chain
    pos = 0 if end == "min" else -1
    if end == "min":
        del ch[0]
    else:
        del ch[-1]
    b = _partner_weight(g, i, end)
    for n, other in enumerate(w.chains, 1):
        other[pos][1] += (other[pos][0] if n == i else b) * lam
    return w, lam, "III", [Site("isolated_extreme", end=x) for x in ("min", "max")]


def _partner_weight(g: ExtendedGraph, i: int, end: str) -> int:
    if end == "min":
        if i == 1:
            return g.m(2, 1)
        if i == 2:
            return g.m(1, 1)
        return g.m(1, 1)
    return g.m(2, g.ell(2)) if i == 1 else g.m(1, g.ell(1))


def blowdown(g: ExtendedGraph, target: Target) -> tuple:
    """Return (blown-down canonical graph, the BlowupRecord that undoes it)."""
    w, lam, btype, sites = _inverse(g, target)
    before = canonicalize(w.graph())
    if validate(before):
        raise SurgeryError("not_blowdownable", f"not blowdownable: {target} gives an invalid graph "
                                               f"({validate(before)[0]})")
    for s in sites:
        if s.kind == "interior" and not (s.i <= before.k and s.j < before.ell(s.i)):
            continue
        try:
            after, rec = blowup(before, s, lam)
        except SurgeryError:
            continue
        if after == g and rec.exceptional_feature == target:
            return before, rec
    for s in sites:
        if s.kind == "interior" and not (s.i <= before.k and s.j < before.ell(s.i)):
            continue
        try:
            after, rec = blowup(before, s, lam)
        except SurgeryError:
            continue
        if after == g:
            return before, rec
    raise SurgeryError("not_blowdownable", f"not blowdownable: {target} has no matching blowup")


def reduce_to_minimal(g: ExtendedGraph) -> tuple:
    """(MinimalModelId, records) with records ordered from the model up to g."""
    records = []
    cur = g
    while True:
        targets = blowdown_targets(cur)
        done = False
        for t in targets:
            try:
                cur, rec = blowdown(cur, t)
            except SurgeryError:
                continue
            records.append(rec)
            done = True
            break
        if not done:
            break
    model = recognize(cur)
    if model is None:
        raise SurgeryError("irreducible", f"irreducible non-minimal graph: {cur}")
    return model, list(reversed(records))


def replay(model: MinimalModelId, records) -> ExtendedGraph:
    g = model.build()
    for rec in records:
        g, _ = blowup(g, rec.site, rec.lam)
    return g
