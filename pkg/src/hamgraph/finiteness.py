"""Explicit constants for the finiteness argument and the fiber-class test.

All areas are in 1/2pi units: the area of a class ``x`` is ``<x, w>`` and
``<w, w>`` is twice the symplectic volume.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .classes import TAU0, TAUH, TAUINF, gen, sigma
from .cohomology import first_chern_class, pontryagin_number
from .graph_model import ExtendedGraph, betti_numbers, canonicalize, fmt_rational
from .localization import intersect, omega_pairing, omega_square
from .surgery import MinimalModelId, reduce_to_minimal


def b2(g) -> int:
    """Rank of the ordinary H^2 of the manifold."""
    return betti_numbers(g)[2]


def max_edges_bound(g) -> int:
    """N: bounds edges plus fat vertices of any graph on the same manifold."""
    b = b2(g)
    return max(b + 2, 2 * b - 2)


@dataclass(frozen=True)
class ModelAreas:
    model: MinimalModelId
    blowups: int
    fiber: Fraction
    base: Fraction


def model_areas(g: ExtendedGraph) -> ModelAreas:
    """Fiber and (largest) base areas of the ruled surface the graph blows down to.

    A projective plane of size lam blown up at least once is a ruled
    surface with base area lam; lam also bounds the fiber.  The plane itself
    is not ruled; both areas are reported as lam.
    """
    model, records = reduce_to_minimal(g)
    if model.kind == MinimalModelId.CP2:
        lam = Fraction(model.params[2])
        fiber = lam - records[0].lam if records else lam
        return ModelAreas(model, len(records), fiber, lam)
    if model.kind == MinimalModelId.HIRZEBRUCH:
        twist, _, _, beta, f = model.params
    else:
        _, f, beta, twist = model.params
    f, beta = Fraction(f), Fraction(beta)
    return ModelAreas(model, len(records), f, beta + abs(twist) * f / 2)


@dataclass(frozen=True)
class BoundReport:
    N: int
    C_h: Fraction
    C: Fraction
    A: int
    c1_omega: Fraction
    omega_omega: Fraction
    areas: ModelAreas

    @property
    def y_bound(self) -> Fraction:
        """Upper bound on -<y, y> summed over the generators."""
        return self.N * self.C * self.C - self.A

    def format(self) -> str:
        return "\n".join([
            f"N={self.N}",
            f"C_h={fmt_rational(self.C_h)}",
            f"C={fmt_rational(self.C)}",
            f"A={self.A}",
            f"<c1,w>={fmt_rational(self.c1_omega)}",
            f"<w,w>={fmt_rational(self.omega_omega)}",
            f"model={self.areas.model} after {self.areas.blowups} blowups, "
            f"w(F)={fmt_rational(self.areas.fiber)}, w(B)={fmt_rational(self.areas.base)}",
            f"box: 0 <= <x,w> <= {fmt_rational(self.C)}, 0 <= -<y,y> <= {fmt_rational(self.y_bound)}",
        ])

    def to_obj(self) -> dict:
        return {
            "N": self.N, "C_h": fmt_rational(self.C_h), "C": fmt_rational(self.C), "A": self.A,
            "c1_omega": fmt_rational(self.c1_omega), "omega_omega": fmt_rational(self.omega_omega),
            "model": self.areas.model.to_obj(), "blowups": self.areas.blowups,
            "fiber_area": fmt_rational(self.areas.fiber), "base_area": fmt_rational(self.areas.base),
            "y_bound": fmt_rational(self.y_bound),
        }


def fiber_bound(genus: int, n: int, areas: ModelAreas) -> Fraction:
    """C_h: (2g + N) w(F) for positive genus, N max(w(F), w(B)) for genus zero."""
    if genus > 0:
        return (2 * genus + n) * areas.fiber
    return n * max(areas.fiber, areas.base)


def bound_constants(g: ExtendedGraph) -> BoundReport:
    g = canonicalize(g)
    n = max_edges_bound(g)
    areas = model_areas(g)
    c_h = fiber_bound(g.genus, n, areas)
    c1w = omega_pairing(g, first_chern_class(g))
    return BoundReport(n, c_h, c1w + c_h, pontryagin_number(g), c1w, omega_square(g), areas)


# ------------------------------------------------------------- the box


def omitted_classes(g: ExtendedGraph) -> list:
    """z_i: first edges of chains i >= 3 below a lone fat maximum."""
    if g.fat_count == 1 and g.max.fat:
        return [sigma(i, 1) for i in range(3, g.k + 1)]
    return []


def xi_classes(g: ExtendedGraph) -> list:
    """x_0, x_inf (when fat) and the edge classes other than the z_i."""
    g = canonicalize(g)
    out = ([TAU0] if g.min.fat else []) + ([TAUINF] if g.max.fat else [])
    skip = set(omitted_classes(g))
    out += [sigma(i, j) for i in range(1, g.k + 1) for j in range(1, g.ell(i) + 1) if sigma(i, j) not in skip]
    return out


@dataclass(frozen=True)
class BoxEntry:
    sym: tuple
    square: int  # <x, x>
    area: Fraction  # <x, w>
    y_square: Fraction  # <y, y> for x = y + r w


@dataclass(frozen=True)
class BoxReport:
    bounds: BoundReport
    entries: tuple
    square_sum: int
    xh_term: Fraction

    @property
    def squares_match(self) -> bool:
        return self.square_sum == self.bounds.A

    @property
    def areas_in_box(self) -> bool:
        return all(0 <= e.area <= self.bounds.C for e in self.entries)

    @property
    def hodge_ok(self) -> bool:
        return all(e.y_square <= 0 for e in self.entries)

    @property
    def y_in_box(self) -> bool:
        return all(-e.y_square <= self.bounds.y_bound for e in self.entries)

    @property
    def xh_ok(self) -> bool:
        return self.xh_term <= self.bounds.C_h


def xh_term(g: ExtendedGraph) -> Fraction:
    """Area of (2g + k - 2) x_h minus the z_i."""
    g = canonicalize(g)
    total = (2 * g.genus + g.k - 2) * omega_pairing(g, gen(TAUH))
    return total - sum((omega_pairing(g, gen(z)) for z in omitted_classes(g)), Fraction(0))


def box_check(g: ExtendedGraph) -> BoxReport:
    g = canonicalize(g)
    bounds = bound_constants(g)
    ww = bounds.omega_omega
    entries = []
    for s in xi_classes(g):
        sq = int(intersect(g.skeleton(), gen(s), gen(s)))
        area = omega_pairing(g, gen(s))
        entries.append(BoxEntry(s, sq, area, sq - area * area / ww))
    return BoxReport(bounds, tuple(entries), sum(e.square for e in entries), xh_term(g))


# ------------------------------------------------------ fiber classes


@dataclass(frozen=True)
class FiberVerdict:
    kind: str  # "Fiber", "Base" or "Neither"
    violated: str | None = None

    def format(self) -> str:
        return self.kind if self.violated is None else f"{self.kind} ({self.violated} violated)"


def recognize_fiber_class(p: int, q: int, genus: int, trivial: bool) -> FiberVerdict:
    """Classify A = p B + q F in a ruled surface over a genus-g base.

    B is the base class of the trivial bundle (B.B = 0) or the section of
    self-intersection 1 of the non-trivial one.  Conditions: A.A = 0,
    c1(A) = 2 and positive area.
    """
    bb = 0 if trivial else 1
    square = p * p * bb + 2 * p * q
    c1 = (2 - 2 * genus + bb) * p + 2 * q
    if p < 0 and q <= 0 or p <= 0 and q < 0 or p == q == 0:
        return FiberVerdict("Neither", "omega-positivity")
    if square != 0:
        return FiberVerdict("Neither", "self-intersection")
    if c1 != 2:
        return FiberVerdict("Neither", "first Chern class")
    if (p, q) == (0, 1):
        return FiberVerdict("Fiber")
    if (p, q) == (1, 0) and genus == 0 and trivial:
        return FiberVerdict("Base")
    return FiberVerdict("Neither", "omega-positivity")
