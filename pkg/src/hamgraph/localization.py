"""Restriction of equivariant classes to the fixed set, and ABBV integration.

Restrictions are homogeneous.  A class of degree ``2d`` restricts to

* ``c * t**d`` at an isolated fixed point (stored as the Fraction ``c``);
* ``a * t**d + b * [S] t**(d-1)`` on a fixed surface ``S`` (stored as the
  pair ``(a, b)``), using ``[S]**2 = 0``.

Integration over the manifold is the sum over fixed components of the
restriction times the inverse equivariant Euler class, which for a
degree ``2d`` class yields a single monomial ``c * t**(d-2)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .classes import TAU0, TAUH, TAUINF, format_class, sigma, sym_name
from .graph_model import ExtendedGraph, Skeleton


class LocalizationError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


def skeleton_of(g) -> Skeleton:
    return g.skeleton() if isinstance(g, ExtendedGraph) else g


def comp_name(comp) -> str:
    if comp in ("min", "max"):
        return comp
    return f"v({comp[1]},{comp[2]})"


# ---------------------------------------------------------------- values


@dataclass(frozen=True)
class RestrictionTuple:
    """Values of one homogeneous class of degree ``2 * degree`` on every component."""

    degree: int
    values: tuple  # ((comp, value), ...) in component order

    def as_dict(self) -> dict:
        return dict(self.values)

    def __getitem__(self, comp):
        return self.as_dict()[comp]

    def _combine(self, other, op):
        if self.degree != other.degree:
            raise LocalizationError("degree_mismatch", "cannot add classes of different degrees")
        out = []
        for (c, a), (c2, b) in zip(self.values, other.values):
            if isinstance(a, tuple):
                out.append((c, (op(a[0], b[0]), op(a[1], b[1]))))
            else:
                out.append((c, op(a, b)))
        return RestrictionTuple(self.degree, tuple(out))

    def __add__(self, other):
        return self._combine(other, lambda x, y: x + y)

    def __sub__(self, other):
        return self._combine(other, lambda x, y: x - y)

    def scale(self, k) -> "RestrictionTuple":
        k = Fraction(k)
        return RestrictionTuple(self.degree, tuple(
            (c, (k * v[0], k * v[1]) if isinstance(v, tuple) else k * v) for c, v in self.values))

    def __mul__(self, other):
        out = []
        for (c, a), (_, b) in zip(self.values, other.values):
            if isinstance(a, tuple):
                out.append((c, (a[0] * b[0], a[0] * b[1] + a[1] * b[0])))
            else:
                out.append((c, a * b))
        return RestrictionTuple(self.degree + other.degree, tuple(out))

    def zero_at(self, comp) -> bool:
        v = self.as_dict()[comp]
        return v == (0, 0) if isinstance(v, tuple) else v == 0

    def is_zero(self) -> bool:
        return all(self.zero_at(c) for c, _ in self.values)

    def format(self) -> str:
        return ", ".join(f"{comp_name(c)}: {format_value(v, self.degree)}" for c, v in self.values)


def _mono(coef, power, base="t") -> str:
    if coef == 0:
        return ""
    if power == 0:
        return str(coef)
    tt = base if power == 1 else f"{base}^{power}"
    if coef == 1:
        return tt
    if coef == -1:
        return f"-{tt}"
    return f"{coef}*{tt}"


def format_value(v, degree: int) -> str:
    if isinstance(v, tuple):
        a, b = v
        parts = [p for p in (_mono(a, degree), _mono(b, degree - 1) and _surface_term(b, degree - 1)) if p]
        return " + ".join(parts).replace("+ -", "- ") if parts else "0"
    return _mono(v, degree) or "0"


def _surface_term(b, power) -> str:
    if power == 0:
        return f"{b}[S]" if b != 1 else "[S]"
    return f"{b}[S]*{_mono(1, power)}"


def unit_tuple(g) -> RestrictionTuple:
    sk = skeleton_of(g)
    return RestrictionTuple(0, tuple(
        (c, (Fraction(1), Fraction(0)) if sk.is_fat(c) else Fraction(1)) for c in sk.components()))


# ---------------------------------------------------------- generator data


def generators(g) -> list:
    """All degree-2 generator symbols of the graph, in a fixed order."""
    sk = skeleton_of(g)
    out = []
    if sk.fat_min:
        out.append(TAU0)
    if sk.fat_max:
        out.append(TAUINF)
    out.append(TAUH)
    for i in range(1, sk.k + 1):
        for j in range(1, sk.ell(i) + 1):
            out.append(sigma(i, j))
    return out


def _check_symbol(sk: Skeleton, sym):
    ok = (sym == TAUH or (sym == TAU0 and sk.fat_min) or (sym == TAUINF and sk.fat_max)
          or (sym[0] == "s" and 1 <= sym[1] <= sk.k and 1 <= sym[2] <= sk.ell(sym[1])))
    if not ok:
        raise LocalizationError("unknown_symbol", f"{sym_name(sym)} is not a generator of this graph")


def generator_value(sk: Skeleton, sym, comp):
    """Restriction of one generator to one component."""
    fat = sk.is_fat(comp)
    zero = (Fraction(0), Fraction(0)) if fat else Fraction(0)
    if sym == TAU0:
        return (Fraction(-1), sk.e_min) if comp == "min" else zero
    if sym == TAUINF:
        return (Fraction(1), sk.e_max) if comp == "max" else zero
    if sym == TAUH:
        if fat:
            return (Fraction(0), Fraction(1))
        if comp == "min":
            return Fraction(-sk.m(1, 1) * sk.m(2, 1))
        if comp == "max":
            return Fraction(sk.m(1, sk.ell(1)) * sk.m(2, sk.ell(2)))
        return zero
    _, i, j = sym
    ell = sk.ell(i)
    lower = "min" if j == 1 else ("v", i, j - 1)
    upper = "max" if j == ell else ("v", i, j)
    if comp == lower:
        return (Fraction(0), Fraction(1)) if fat else Fraction(sk.extended_label(i, j - 1))
    if comp == upper:
        return (Fraction(0), Fraction(1)) if fat else Fraction(-sk.extended_label(i, j + 1))
    return zero


def restrict(g, c) -> RestrictionTuple:
    """Restriction tuple of a degree-2 class, or of a product of classes.

    ``c`` is a class dict or a list/tuple of class dicts (their product).
    """
    sk = skeleton_of(g)
    if isinstance(c, (list, tuple)):
        out = unit_tuple(sk)
        for factor in c:
            out = out * restrict(sk, factor)
        return out
    for sym in c:
        _check_symbol(sk, sym)
    vals = []
    for comp in sk.components():
        fat = sk.is_fat(comp)
        acc = (Fraction(0), Fraction(0)) if fat else Fraction(0)
        for sym, coef in c.items():
            v = generator_value(sk, sym, comp)
            acc = (acc[0] + coef * v[0], acc[1] + coef * v[1]) if fat else acc + coef * v
        vals.append((comp, acc))
    return RestrictionTuple(1, tuple(vals))


def euler_inverse(g, comp):
    """Inverse equivariant Euler class at a component.

    Isolated: the coefficient ``c`` of ``t**-2``.  Surface: ``(a, b)`` for
    ``a / t + b [S] / t**2``.
    """
    sk = skeleton_of(g)
    if comp == "min":
        if sk.fat_min:
            return (Fraction(-1), -sk.e_min)
        return Fraction(1, sk.m(1, 1) * sk.m(2, 1))
    if comp == "max":
        if sk.fat_max:
            return (Fraction(1), -sk.e_max)
        return Fraction(1, sk.m(1, sk.ell(1)) * sk.m(2, sk.ell(2)))
    _, i, j = comp
    return Fraction(-1, sk.m(i, j) * sk.m(i, j + 1))


def integrate(g, r: RestrictionTuple) -> dict:
    """ABBV integral as a Laurent polynomial ``{power: coefficient}``."""
    sk = skeleton_of(g)
    total = Fraction(0)
    for comp, v in r.values:
        e = euler_inverse(sk, comp)
        if isinstance(v, tuple):
            total += v[0] * e[1] + v[1] * e[0]
        else:
            total += v * e
    power = r.degree - 2
    if power < 0 and total != 0:
        raise LocalizationError("localization_residue",
                                f"negative powers of t do not cancel (residue {total})")
    if total.denominator != 1:
        raise LocalizationError("localization_residue", f"non-integral integral {total}")
    return {power: total} if total else {}


def integrate_number(g, r: RestrictionTuple) -> int:
    if r.degree != 2:
        raise LocalizationError("degree_mismatch", "only top-degree classes integrate to numbers")
    return int(integrate(g, r).get(0, 0))


def intersect_abbv(g, a: dict, b: dict) -> int:
    sk = skeleton_of(g)
    return integrate_number(sk, restrict(sk, a) * restrict(sk, b))


# ------------------------------------------------------- intersection table


def self_intersection(sk: Skeleton, i: int, j: int) -> int:
    num = sk.extended_label(i, j - 1) + sk.extended_label(i, j + 1)
    if num % sk.m(i, j):
        raise LocalizationError("table_fraction", f"self-intersection of s({i},{j}) is not integral")
    return -num // sk.m(i, j)


def _pair(sk: Skeleton, x, y) -> int:
    if x[0] != "s" and y[0] == "s":
        x, y = y, x
    if x == TAU0 or x == TAUINF:
        if y == x:
            return int(sk.e_min if x == TAU0 else sk.e_max)
        return 0 if y in (TAU0, TAUINF) else 1
    if x == TAUH:
        if y == TAUH:
            out = 0
            if not sk.fat_min:
                out += sk.m(1, 1) * sk.m(2, 1)
            if not sk.fat_max:
                out += sk.m(1, sk.ell(1)) * sk.m(2, sk.ell(2))
            return out
        return 1
    # x is a sphere class
    _, i, j = x
    ell = sk.ell(i)
    if y == TAU0:
        return int(j == 1)
    if y == TAUINF:
        return int(j == ell)
    if y == TAUH:
        out = 0
        if j == 1 and not sk.fat_min:
            out -= sk.extended_label(i, 0)
        if j == ell and not sk.fat_max:
            out -= sk.extended_label(i, ell + 1)
        return out
    _, i2, j2 = y
    if (i, j) == (i2, j2):
        return self_intersection(sk, i, j)
    out = 0
    if i == i2:
        return int(abs(j - j2) == 1)
    # distinct chains meet only at isolated extremes
    if j == 1 and j2 == 1 and not sk.fat_min:
        out += Fraction(sk.extended_label(i, 0) * sk.extended_label(i2, 0), sk.m(1, 1) * sk.m(2, 1))
    if j == ell and j2 == sk.ell(i2) and not sk.fat_max:
        out += Fraction(sk.extended_label(i, ell + 1) * sk.extended_label(i2, j2 + 1),
                        sk.m(1, sk.ell(1)) * sk.m(2, sk.ell(2)))
    return int(out)


def generator_pairing(g, x, y) -> int:
    """Intersection number of two generator symbols from closed-form tables."""
    sk = skeleton_of(g)
    _check_symbol(sk, x)
    _check_symbol(sk, y)
    return _pair(sk, x, y)


def intersect(g, a: dict, b: dict) -> int:
    sk = skeleton_of(g)
    return sum(ca * cb * generator_pairing(sk, x, y) for x, ca in a.items() for y, cb in b.items())


def intersection_matrix(g, syms=None) -> list:
    sk = skeleton_of(g)
    syms = generators(sk) if syms is None else syms
    return [[generator_pairing(sk, x, y) for y in syms] for x in syms]


# ------------------------------------------------ zero length and labels


def zero_length(g, c: dict) -> int:
    r = restrict(g, c)
    return sum(1 for comp, _ in r.values if r.zero_at(comp))


def class_label(g, c: dict) -> Fraction:
    """Label of a class supported on exactly two fixed components."""
    sk = skeleton_of(g)
    if len(c) == 1 and next(iter(c)) in (TAU0, TAUINF) and abs(next(iter(c.values()))) == 1:
        return Fraction(0)
    r = restrict(sk, c)
    support = [comp for comp, _ in r.values if not r.zero_at(comp)]
    if len(support) != 2:
        raise LocalizationError("label_undefined",
                                f"{format_class(c)} is supported on {len(support)} components")
    cc = integrate_number(sk, r * r)
    if cc == 0:
        raise LocalizationError("label_undefined", f"{format_class(c)} has zero self-intersection")
    num = Fraction(0)
    for comp in support:
        w = Fraction(0) if sk.is_fat(comp) else abs(r[comp])
        s = -1 if comp in ("min", "max") else 1
        num += s * w
    return -num / cc


# ------------------------------------------------------- symplectic class


def omega_restriction(g: ExtendedGraph) -> RestrictionTuple:
    """Equivariant symplectic class in 1/2pi units.

    It restricts to ``H(F) t`` at a fixed component ``F`` of height ``H(F)``,
    plus ``area * [S]`` on a fixed surface.
    """
    sk = g.skeleton()
    vals = []
    for comp in sk.components():
        if comp in ("min", "max"):
            ex = g.min if comp == "min" else g.max
            vals.append((comp, (ex.height, ex.area) if ex.fat else ex.height))
        else:
            vals.append((comp, g.vertex_height(comp[1], comp[2])))
    return RestrictionTuple(1, tuple(vals))


def omega_pairing(g: ExtendedGraph, c: dict) -> Fraction:
    """Symplectic area of a degree-2 class, (1/2pi) times the integral of c w."""
    sk = g.skeleton()
    r = restrict(sk, c) * omega_restriction(g)
    return _integrate_rational(sk, r)


def omega_square(g: ExtendedGraph) -> Fraction:
    """(1/4pi^2) times the integral of w^2, twice the symplectic volume."""
    w = omega_restriction(g)
    return _integrate_rational(g.skeleton(), w * w)


def _integrate_rational(sk, r: RestrictionTuple) -> Fraction:
    total = Fraction(0)
    for comp, v in r.values:
        e = euler_inverse(sk, comp)
        total += v[0] * e[1] + v[1] * e[0] if isinstance(v, tuple) else v * e
    return total
