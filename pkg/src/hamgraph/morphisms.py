"""Flip maps between presentations, dull-graph matching and weak isomorphisms.

A ``GeneratorMap`` sends every degree-2 generator of a source graph to an
integer class of a target graph, together with the sign ``eps`` by which
the circle parameter is twisted.  Every map built here is verified on
construction: the chain relations map to zero, ``pi*(t)`` maps to
``eps * pi*(t)``, all generator intersections are preserved and the
induced matrix on the degree-2 lattice is unimodular.

Cohomology is always read from the stored orientation of a graph; the
``flipped`` flag is provenance only.  A one-fat graph turned upside down
is re-normalized by a second full flip, so its full flip is the identity
with ``eps = 1`` and its symplectic flip is ``-id`` with ``eps = -1``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from fractions import Fraction

from . import intlinalg
from .classes import TAU0, TAUH, TAUINF, add, format_class, gen, is_sigma, scale, sigma, sym_name
from .cohomology import chain_relation, normal_form, pi_star_t
from .graph_model import (
    DullGraph,
    Edge,
    ExtendedGraph,
    _reverse,
    canonicalize_tracked,
    dull,
    dull_components,
    isotropy_weights,
    negate_weights,
    validate,
)
from .localization import generators, intersect


class MorphismError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


def apply_map(images: dict, c: dict) -> dict:
    return add(*[scale(images[s], v) for s, v in c.items()])


@dataclass(frozen=True)
class GeneratorMap:
    source: ExtendedGraph = field(repr=False)
    target: ExtendedGraph = field(repr=False)
    images: tuple  # ((symbol, class dict), ...)
    eps: int
    name: str

    def as_dict(self) -> dict:
        return dict(self.images)

    def __call__(self, c: dict) -> dict:
        return apply_map(self.as_dict(), c)

    def matrix(self) -> list:
        """Columns are normal forms of the images of the source lifts."""
        from .cohomology import quotient

        q = quotient(self.source.skeleton())
        tgt = self.target.skeleton()
        cols = [normal_form(tgt, self(lift)) for lift in q.lifts]
        return [list(r) for r in zip(*cols)] if cols else []

    def problems(self) -> list:
        src, tgt = self.source.skeleton(), self.target.skeleton()
        out = []
        imgs = self.as_dict()
        syms = generators(src)
        if set(imgs) != set(syms):
            return ["the map is not defined on exactly the source generators"]
        for i in range(1, src.k + 1):
            if any(normal_form(tgt, self(chain_relation(src, i)))):
                out.append(f"chain relation {i} does not map to zero")
        if normal_form(tgt, self(pi_star_t(src))) != normal_form(tgt, scale(pi_star_t(tgt), self.eps)):
            out.append("pi*(t) is not sent to eps * pi*(t)")
        for n, x in enumerate(syms):
            for y in syms[n:]:
                if intersect(tgt, imgs[x], imgs[y]) != intersect(src, gen(x), gen(y)):
                    out.append(f"intersection {sym_name(x)}.{sym_name(y)} not preserved")
        mat = self.matrix()
        if len(mat) != len(mat[0]) if mat else False:
            out.append("degree-2 ranks differ")
        elif mat and abs(intlinalg.det_int(mat)) != 1:
            out.append("induced degree-2 matrix is not unimodular")
        return out

    def verify(self) -> "GeneratorMap":
        bad = self.problems()
        if bad:
            raise MorphismError("map_not_verified", f"{self.name}: {bad[0]}")
        return self

    def format(self) -> str:
        lines = [f"{self.name} (eps = {self.eps:+d})"]
        for s, c in self.images:
            lines.append(f"  {sym_name(s)} -> {format_class(c)}")
        return "\n".join(lines)

    def to_obj(self) -> dict:
        return {"name": self.name, "eps": self.eps,
                "images": {sym_name(s): format_class(c) for s, c in self.images}}


def compose(second: GeneratorMap, first: GeneratorMap, name: str | None = None) -> GeneratorMap:
    imgs = tuple((s, second(c)) for s, c in first.images)
    return GeneratorMap(first.source, second.target, imgs, first.eps * second.eps,
                        name or f"{second.name} o {first.name}")


def identity_map(g: ExtendedGraph, target: ExtendedGraph | None = None, name="identity") -> GeneratorMap:
    return GeneratorMap(g, target or g, tuple((s, gen(s)) for s in generators(g)), 1, name)


def _relabel(raw: ExtendedGraph, images: dict, eps: int):
    """Canonicalize ``raw`` and rewrite target symbols accordingly."""
    g, cmap = canonicalize_tracked(raw)

    def move(s):
        if s == TAUH:
            return TAUH
        if s in (TAU0, TAUINF):
            if cmap.reversed:
                return TAUINF if s == TAU0 else TAU0
            return s
        i, j = s[1], s[2]
        return sigma(*cmap.edge(i, j, len(raw.chains[i - 1])))

    new = {s: {move(t): v for t, v in c.items()} for s, c in images.items()}
    return g, new, (-eps if cmap.reversed else eps)


def _flip_images(g: ExtendedGraph, sign: int) -> dict:
    imgs = {}
    if g.min.fat:
        imgs[TAU0] = {TAUINF: sign}
    if g.max.fat:
        imgs[TAUINF] = {TAU0: sign}
    imgs[TAUH] = {TAUH: sign}
    for i in range(1, g.k + 1):
        ell = g.ell(i)
        for j in range(1, ell + 1):
            imgs[sigma(i, j)] = {sigma(i, ell - j + 1): sign}
    return imgs


def _ordered(g: ExtendedGraph, imgs: dict) -> tuple:
    return tuple((s, imgs[s]) for s in generators(g))


def full_flip(g: ExtendedGraph) -> tuple:
    raw = _reverse(g)
    out, imgs, eps = _relabel(raw, _flip_images(g, 1), -1)
    m = GeneratorMap(g, out, _ordered(g, imgs), eps, "full_flip").verify()
    return out, m


def symplectic_flip(g: ExtendedGraph) -> tuple:
    raw = _reverse(g)
    out, imgs, eps = _relabel(raw, _flip_images(g, -1), 1)
    m = GeneratorMap(g, out, _ordered(g, imgs), eps, "symplectic_flip").verify()
    return out, m


# ------------------------------------------------------------ partial flip


def flippable(g: ExtendedGraph, i: int) -> bool:
    ch = g.chains[i - 1]
    if len(ch) == 1:
        return ch[0].m == 1
    return ch[0].m == 1 and ch[-1].m == 1


def _fit_heights(rev_heights: list, weights: list, target: Fraction, h: Fraction) -> list:
    """Increasing heights in (0, h) with sum(y * e) == target."""
    val = sum(y * e for y, e in zip(rev_heights, weights))
    total = sum(weights) * h
    if val == target:
        return rev_heights
    if target < val:
        s = target / val
        return [y * s for y in rev_heights]
    s = (total - target) / (total - val)
    return [h - (h - y) * s for y in rev_heights]


@dataclass(frozen=True)
class PartialFlip:
    graph: ExtendedGraph
    map: GeneratorMap
    adjustment: str  # none | area_min | area_max | rescaled


def partial_flip_detail(g: ExtendedGraph, i: int) -> PartialFlip:
    if not 1 <= i <= g.k:
        raise MorphismError("no_chain", f"no chain {i}")
    if not flippable(g, i):
        raise MorphismError("chain_not_flippable",
                            f"chain not flippable: chain {i} must begin and end with label 1")
    ch = g.chains[i - 1]
    ell = len(ch)
    if ell == 1:
        return PartialFlip(g, identity_map(g, name=f"partial_flip(chain {i})").verify(), "none")
    h = g.height
    new = list(reversed(ch))
    labels = [e.m for e in new]
    weights = [Fraction(1, labels[j] * labels[j + 1]) for j in range(ell - 1)]
    old_y = [sum((e.length for e in ch[:j + 1]), Fraction(0)) for j in range(ell - 1)]
    old_val = sum(y * Fraction(1, ch[j].m * ch[j + 1].m) for j, y in enumerate(old_y))
    rev_y = [sum((e.length for e in new[:j + 1]), Fraction(0)) for j in range(ell - 1)]
    new_val = sum(y * e for y, e in zip(rev_y, weights))
    delta = new_val - old_val
    lo, hi = g.min, g.max
    adjustment = "none"
    ys = rev_y
    if delta:
        # e_min stays fixed when a_min - a_max moves by -delta
        if lo.fat and lo.area - delta > 0:
            lo = replace(lo, area=lo.area - delta)
            adjustment = "area_min"
        elif hi.fat and hi.area + delta > 0:
            hi = replace(hi, area=hi.area + delta)
            adjustment = "area_max"
        else:
            ys = _fit_heights(rev_y, weights, old_val, h)
            adjustment = "rescaled"
    pts = [Fraction(0)] + ys + [h]
    new_chain = tuple(Edge(m, pts[j + 1] - pts[j]) for j, m in enumerate(labels))
    chains = list(g.chains)
    chains[i - 1] = new_chain
    raw = replace(g, min=lo, max=hi, chains=tuple(chains))
    bad = validate(canonicalize_tracked(raw)[0])
    if bad:
        raise MorphismError("flip_invalid", f"partial flip produced an invalid graph: {bad[0]}")
    imgs = {s: gen(s) for s in generators(g)}
    imgs[sigma(i, 1)] = add(*[{sigma(i, s): labels[s - 1]} for s in range(1, ell)])
    imgs[sigma(i, ell)] = add(*[{sigma(i, s): labels[s - 1]} for s in range(2, ell + 1)])
    for j in range(2, ell):
        imgs[sigma(i, j)] = {sigma(i, ell - j + 1): -1}
    out, imgs, eps = _relabel(raw, imgs, 1)
    m = GeneratorMap(g, out, _ordered(g, imgs), eps, f"partial_flip(chain {i})").verify()
    return PartialFlip(out, m, adjustment)


def partial_flip(g: ExtendedGraph, i: int) -> tuple:
    d = partial_flip_detail(g, i)
    return d.graph, d.map


# ---------------------------------------------------------- dull matching


@dataclass(frozen=True)
class DullMatching:
    swapped: bool
    pairs: tuple  # ((index in d1.chains, index in d2.chains, reversed), ...)


def dull_isomorphic(d1: DullGraph, d2: DullGraph):
    """A matching of canonical dull graphs, or None."""
    if d1.genus != d2.genus:
        return None
    for swapped in (False, True):
        a = d1.swapped() if swapped else d1
        if (a.min, a.max) != (d2.min, d2.max) or len(a.chains) != len(d2.chains):
            continue
        src = list(d1.chains)
        used = [False] * len(d2.chains)
        pairs = []
        ok = True
        for n, comp in enumerate(src):
            core, att = comp
            if swapped:
                core = tuple(reversed(core))
                att = {"min": "max", "max": "min"}.get(att, att)
            hit = None
            for m, (c2, a2) in enumerate(d2.chains):
                if used[m] or a2 != att:
                    continue
                if c2 == core:
                    hit = (m, False)
                    break
                if att == "free" and c2 == tuple(reversed(core)):
                    hit = (m, True)
                    break
            if hit is None:
                ok = False
                break
            used[hit[0]] = True
            pairs.append((n, hit[0], hit[1]))
        if ok:
            return DullMatching(swapped, tuple(pairs))
    return None


def dull_witness(d1: DullGraph, d2: DullGraph) -> str:
    if d1.genus != d2.genus:
        return "genus"
    if sorted([d1.min, d1.max]) != sorted([d2.min, d2.max]):
        return "extreme markers"
    return "label multiset"


@dataclass(frozen=True)
class WeakIsoVerdict:
    isomorphic: bool
    witness: str | None = None
    factors: tuple = ()
    composite: GeneratorMap | None = None

    def format(self) -> str:
        if not self.isomorphic:
            return f"not isomorphic: {self.witness}"
        names = [f.name for f in self.factors] or ["identity"]
        return "isomorphic via: " + ", ".join(names)

    def to_obj(self) -> dict:
        if not self.isomorphic:
            return {"isomorphic": False, "witness": self.witness}
        return {"isomorphic": True, "factors": [f.name for f in self.factors],
                "map": self.composite.to_obj()}


def _flip_plan(cur: ExtendedGraph, target: ExtendedGraph):
    """Chains of ``cur`` to flip so that its labels match ``target``."""
    want = Counter(target.labels())
    have = Counter(cur.labels())
    plan = []
    need_flip = Counter()
    for lab in set(have) | set(want):
        rev = tuple(reversed(lab))
        if rev == lab or lab > rev:
            continue
        # class {lab, rev}: counts must balance by flipping
        a, b = have[lab], have[rev]
        x, y = want[lab], want[rev]
        if a + b != x + y:
            return None
        if a > x:
            need_flip[lab] += a - x
        elif b > y:
            need_flip[rev] += b - y
    for i, lab in reversed(list(enumerate(cur.labels(), 1))):
        if need_flip[lab] > 0:
            plan.append(i)
            need_flip[lab] -= 1
    return plan


def weak_isomorphisms(g1: ExtendedGraph, g2: ExtendedGraph) -> WeakIsoVerdict:
    d1, d2 = dull(g1), dull(g2)
    if g1.genus != g2.genus:
        return WeakIsoVerdict(False, "genus")
    match = dull_isomorphic(d1, d2)
    if match is None:
        return WeakIsoVerdict(False, dull_witness(d1, d2))
    factors = []
    cur = g1
    if match.swapped:
        cur, f = symplectic_flip(cur)
        factors.append(f)
    plan = _flip_plan(cur, g2)
    if plan is None:
        return WeakIsoVerdict(False, "chain structure")
    for lab in [cur.labels()[i - 1] for i in plan]:
        # indices move after each flip, so locate the chain again by labels
        idx = max(n for n, x in enumerate(cur.labels(), 1) if x == lab)
        if not flippable(cur, idx):
            return WeakIsoVerdict(False, "chain structure")
        cur, f = partial_flip(cur, idx)
        factors.append(f)
    if cur.skeleton() != g2.skeleton():
        return WeakIsoVerdict(False, "extremal self-intersections")
    last = identity_map(cur, g2, name="rescale")
    composite = identity_map(g1, g1)
    for f in factors:
        composite = compose(f, composite)
    composite = compose(last, composite, name=" o ".join(f.name for f in reversed(factors)) or "identity")
    composite.verify()
    return WeakIsoVerdict(True, None, tuple(factors), composite)


# ---------------------------------------------------------------- obstruction


@dataclass(frozen=True)
class Obstruction:
    obstructed: bool
    reason: str | None = None

    def format(self) -> str:
        if self.obstructed:
            return f"equivariant diffeomorphism obstructed: {self.reason}"
        return "not obstructed (this does not prove an equivariant diffeomorphism exists)"


def diffeo_obstruction(g1: ExtendedGraph, g2: ExtendedGraph) -> Obstruction:
    census = lambda g: (g.iso, g.fat_count, g.genus)
    if census(g1) != census(g2):
        return Obstruction(True, "fixed-point census")
    w1, w2 = isotropy_weights(g1), isotropy_weights(g2)
    if w1 != w2 and w1 != negate_weights(w2):
        return Obstruction(True, "weight multisets")
    return Obstruction(False)
