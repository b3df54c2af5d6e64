"""Generators and relations for the even equivariant cohomology.

Degree-2 generators are ``tau0`` (fat minimum only), ``tauinf`` (fat
maximum only), ``tauh`` and one sphere class ``s(i,j)`` per edge.  The
linear relations say that ``tauh`` equals the label-weighted sum of the
sphere classes along every chain.  Product relations are the pairs of
generators whose restrictions to the fixed set multiply to zero, plus one
triple for the projective plane.

The class ``pi_star_t`` (the image of the equivariant parameter) is
determined by requiring its restriction to be ``t`` on every fixed
component; integer coefficients are found by exact lattice solving.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import intlinalg
from .classes import TAU0, TAUH, TAUINF, add, format_class, gen, sigma, sym_name
from .graph_model import ExtendedGraph, Skeleton, poincare_rank
from .localization import (
    generator_value,
    generators,
    integrate_number,
    intersect,
    restrict,
    skeleton_of,
)

log = logging.getLogger(__name__)


class CohomologyError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


def chain_relation(sk: Skeleton, i: int) -> dict:
    """tauh - sum_j m_{i,j} s(i,j), which vanishes."""
    out = {TAUH: 1}
    for j in range(1, sk.ell(i) + 1):
        out[sigma(i, j)] = -sk.m(i, j)
    return out


def _support(sk: Skeleton, sym) -> frozenset:
    r = restrict(sk, gen(sym))
    return frozenset(c for c, _ in r.values if not r.zero_at(c))


def vanishing_pairs(sk: Skeleton) -> list:
    """Unordered generator pairs (with squares) whose product restricts to zero."""
    syms = generators(sk)
    out = []
    for n, x in enumerate(syms):
        for y in syms[n:]:
            if restrict(sk, [gen(x), gen(y)]).is_zero():
                out.append((x, y))
    return out


def cp2_triple(sk: Skeleton) -> tuple:
    if sk.fat_count:
        return (TAUINF, sigma(1, 1), sigma(2, 1))
    return (sigma(1, 1), sigma(2, 1), sigma(2, 2))


@dataclass(frozen=True)
class Presentation:
    skeleton: Skeleton
    generators: tuple
    linear: tuple  # class dicts equal to zero
    products: tuple  # tuples of symbols whose product is zero
    pi_star_t: dict
    is_cp2: bool

    def format(self) -> str:
        lines = ["generators: " + ", ".join(sym_name(s) for s in self.generators)]
        lines.append("linear relations:")
        lines += [f"  {format_class(r)} = 0" for r in self.linear]
        lines.append("product relations:")
        lines += ["  " + "*".join(sym_name(s) for s in p) + " = 0" for p in self.products]
        nf = normal_form(self.skeleton, self.pi_star_t)
        lines.append(f"pi*(t) = {format_class(self.pi_star_t)}")
        lines.append("pi*(t) normal form: " + format_coordinates(self.skeleton, nf))
        return "\n".join(lines)

    def to_obj(self) -> dict:
        return {
            "generators": [sym_name(s) for s in self.generators],
            "linear": [format_class(r) for r in self.linear],
            "products": [[sym_name(s) for s in p] for p in self.products],
            "pi_star_t": format_class(self.pi_star_t),
            "pi_star_t_normal_form": [str(x) for x in normal_form(self.skeleton, self.pi_star_t)],
            "basis": basis_names(self.skeleton),
        }


def is_cp2(g: ExtendedGraph) -> bool:
    from .surgery import MinimalModelId, reduce_to_minimal

    model, history = reduce_to_minimal(g)
    return model.kind == MinimalModelId.CP2 and not history


def presentation(g: ExtendedGraph) -> Presentation:
    sk = skeleton_of(g)
    products = [p for p in vanishing_pairs(sk)]
    cp2 = is_cp2(g) if isinstance(g, ExtendedGraph) else sk.iso - 2 + 2 * sk.fat_count == 1
    if cp2:
        products.append(cp2_triple(sk))
    return Presentation(
        sk,
        tuple(generators(sk)),
        tuple(chain_relation(sk, i) for i in range(1, sk.k + 1)),
        tuple(products),
        pi_star_t(sk),
        cp2,
    )


# ------------------------------------------------------- module structure


@dataclass(frozen=True)
class BCoefficients:
    """pi*(t) = tauinf - tau0 + tauh_coef * tauh - sum b[i,j] s(i,j)."""

    values: tuple  # ((i, j), b) pairs
    tauh_coef: int
    corrected: tuple  # chains whose b's satisfy the gcd relation with the opposite sign

    def as_dict(self) -> dict:
        return dict(self.values)


def _point_eqs(sk: Skeleton, fixed: dict, unknowns: list):
    """Rows/rhs of 'restriction of fixed - sum b s equals t everywhere'."""
    rows, rhs = [], []
    r0 = restrict(sk, fixed)
    for comp, v in r0.values:
        vals = [generator_value(sk, u, comp) for u in unknowns]
        if sk.is_fat(comp):
            if v[0] != 1:
                raise CohomologyError("oracle", "fixed part does not restrict to t on a surface")
            rows.append([-x[1] for x in vals])
            rhs.append(-v[1])
        else:
            rows.append([-x for x in vals])
            rhs.append(1 - v)
    return rows, rhs


@lru_cache(maxsize=4096)
def b_coefficients(g) -> BCoefficients:
    sk = skeleton_of(g)
    if sk.fat_min:
        c = int(sk.e_min)
    elif sk.e_min.denominator == 1:
        c = int(sk.e_min)
    else:
        c = 0
    fixed = add(gen(TAUINF) if sk.fat_max else {}, {TAU0: -1} if sk.fat_min else {}, {TAUH: c})
    unknowns = [sigma(i, j) for i in range(1, sk.k + 1) for j in range(1, sk.ell(i) + 1)]
    rows, rhs = _point_eqs(sk, fixed, unknowns)
    # normalization: chains leaving a fixed surface (or the extra chains at an
    # isolated minimum) start with b = 0
    pinned = [i for i in range(1, sk.k + 1) if sk.fat_min or (sk.fat_max and i >= 3)]
    extra_rows = [[int(u == sigma(i, 1)) for u in unknowns] for i in pinned]
    x = None
    if any(Fraction(v).denominator != 1 for v in rhs):
        raise CohomologyError("oracle", "non-integral right-hand side")
    rhs = [int(v) for v in rhs]
    rows = [[int(v) for v in r] for r in rows]
    if extra_rows:
        x = intlinalg.solve_int(rows + extra_rows, rhs + [0] * len(extra_rows))
        if x is None:
            log.info("normalized b-coefficients unavailable; solving without pins")
    if x is None:
        x = intlinalg.solve_int(rows, rhs)
    if x is None:
        raise CohomologyError("no_sign_assignment", "no integral pi*(t) passes the restriction oracle")
    vals = tuple(((u[1], u[2]), b) for u, b in zip(unknowns, x))
    bd = dict(vals)
    corrected = []
    for i in range(1, sk.k + 1):
        for j in range(2, sk.ell(i) + 1):
            lhs = bd[(i, j)] * sk.m(i, j - 1) - bd[(i, j - 1)] * sk.m(i, j)
            if abs(lhs) != 1:
                raise CohomologyError("oracle", f"gcd relation fails on chain {i}")
            if lhs == -1:
                corrected.append(i)
                break
    return BCoefficients(vals, c, tuple(corrected))


def pi_star_t(g) -> dict:
    sk = skeleton_of(g)
    b = b_coefficients(sk)
    out = {TAUH: b.tauh_coef}
    if sk.fat_max:
        out[TAUINF] = 1
    if sk.fat_min:
        out[TAU0] = -1
    for (i, j), v in b.values:
        out[sigma(i, j)] = out.get(sigma(i, j), 0) - v
    return {s: v for s, v in out.items() if v}


def restricts_to_t(g, c: dict) -> bool:
    r = restrict(g, c)
    for comp, v in r.values:
        if isinstance(v, tuple):
            if v != (1, 0):
                return False
        elif v != 1:
            return False
    return True


# ------------------------------------------------------------ normal form


@dataclass(frozen=True)
class Quotient:
    """Coordinates on the degree-2 lattice modulo the linear relations."""

    syms: tuple
    phi: tuple  # one row per coordinate, aligned with syms
    names: tuple
    lifts: tuple  # class dicts mapping to the unit coordinate vectors


def _pivot_preference(sk: Skeleton) -> list:
    pref = [TAUH]
    pref += [sigma(i, 1) for i in range(3, sk.k + 1)]
    if sk.k >= 2:
        pref += [sigma(2, 1), sigma(2, sk.ell(2)), sigma(1, 1), sigma(1, sk.ell(1))]
    pref += [sigma(i, j) for i in (2, 1) if i <= sk.k for j in range(1, sk.ell(i) + 1)]
    return pref


@lru_cache(maxsize=4096)
def quotient(g) -> Quotient:
    sk = skeleton_of(g)
    syms = generators(sk)
    idx = {s: n for n, s in enumerate(syms)}
    n = len(syms)
    rels = []
    for i in [1] + list(range(3, sk.k + 1)) + ([2] if sk.k >= 2 else []):
        r = chain_relation(sk, i)
        rels.append([r.get(s, 0) for s in syms])
    pivots = []
    leftover = []
    pref = _pivot_preference(sk)
    done = []
    for row in rels:
        for p, prow in done:
            if row[p]:
                f = row[p] * prow[p]
                row = [a - f * b for a, b in zip(row, prow)]
        choice = next((idx[s] for s in pref if s in idx and abs(row[idx[s]]) == 1
                       and idx[s] not in pivots), None)
        if choice is None:
            if any(row):
                leftover.append(row)
            continue
        if row[choice] == -1:
            row = [-a for a in row]
        for m, (p, prow) in enumerate(done):
            if prow[choice]:
                f = prow[choice]
                done[m] = (p, [a - f * b for a, b in zip(prow, row)])
        leftover = [[a - lr[choice] * b for a, b in zip(lr, row)] for lr in leftover]
        done.append((choice, row))
        pivots.append(choice)
    free = [c for c in range(n) if c not in pivots]
    # coordinate of a class on the free symbols after substituting pivots
    sub_rows = []
    for c in free:
        prow = [0] * n
        prow[c] = 1
        for p, row in done:
            prow[p] = -row[c]
        sub_rows.append(prow)
    if leftover and any(any(r) for r in leftover):
        small = [[r[c] for c in free] for r in leftover if any(r)]
        phi_small, lifts_small = intlinalg.quotient_map(small, len(free))
        phi = [[sum(ps[a] * sub_rows[a][col] for a in range(len(free))) for col in range(n)]
               for ps in phi_small]
        lifts = [{syms[free[a]]: v for a, v in enumerate(lv) if v} for lv in lifts_small]
        names = [f"q{a + 1}" for a in range(len(phi))]
    else:
        phi = sub_rows
        lifts = [gen(syms[c]) for c in free]
        names = [sym_name(syms[c]) for c in free]
    return Quotient(tuple(syms), tuple(tuple(r) for r in phi), tuple(names), tuple(lifts))


def basis_names(g) -> list:
    return list(quotient(skeleton_of(g)).names)


def normal_form(g, c: dict) -> tuple:
    q = quotient(skeleton_of(g))
    idx = {s: n for n, s in enumerate(q.syms)}
    for s in c:
        if s not in idx:
            raise CohomologyError("unknown_symbol", f"{sym_name(s)} is not a generator of this graph")
    out = []
    for row in q.phi:
        v = sum(row[idx[s]] * coef for s, coef in c.items())
        out.append(int(v) if Fraction(v).denominator == 1 else Fraction(v))
    return tuple(out)


def from_normal_form(g, coords) -> dict:
    q = quotient(skeleton_of(g))
    return add(*[{s: v * x for s, v in lift.items()} for lift, x in zip(q.lifts, coords)])


def equal(g, a: dict, b: dict) -> bool:
    return normal_form(g, a) == normal_form(g, b)


def format_coordinates(g, coords) -> str:
    """Coordinates against the basis, e.g. ``s(1,1) - 2*s(2,2)``."""
    terms = []
    for name, v in zip(basis_names(g), coords):
        if not v:
            continue
        mag = abs(v)
        t = name if mag == 1 else f"{mag}*{name}"
        if terms:
            terms.append(("+ " if v > 0 else "- ") + t)
        else:
            terms.append(t if v > 0 else f"-{t}")
    return " ".join(terms) or "0"


# ------------------------------------------------------------ degree four


def degree4_rank(g) -> int:
    """Rank of the span of restrictions of products of two generators."""
    sk = skeleton_of(g)
    syms = generators(sk)
    vecs = []
    for x, y in itertools.combinations_with_replacement(syms, 2):
        r = restrict(sk, [gen(x), gen(y)])
        vec = []
        for _, v in r.values:
            vec += list(v) if isinstance(v, tuple) else [v]
        vecs.append(vec)
    return intlinalg.rank_q(vecs)


# ---------------------------------------------------------- chern classes


@dataclass(frozen=True)
class ChernData:
    c1: dict
    c1sq_minus_2c2: int
    euler: int
    eqc3_residual: int  # (k-2) tauh^2 - sum of the extra chain squares

    @property
    def eqc3_holds(self) -> bool:
        return self.eqc3_residual == 0


def first_chern_class(g) -> dict:
    sk = skeleton_of(g)
    out = {TAUH: -(2 * sk.genus + sk.k - 2)}
    if sk.fat_min:
        out[TAU0] = 1
    if sk.fat_max:
        out[TAUINF] = 1
    for i in range(1, sk.k + 1):
        for j in range(1, sk.ell(i) + 1):
            out[sigma(i, j)] = 1
    return {s: v for s, v in out.items() if v}


def extra_chain_classes(sk: Skeleton) -> list:
    """Sphere classes of the first edges of chains 3..k when only the maximum is fat."""
    if sk.fat_count == 1:
        return [sigma(i, 1) for i in range(3, sk.k + 1)]
    return []


def pontryagin_number(g) -> int:
    """Integral of c1^2 - 2 c2 from the class expression."""
    sk = skeleton_of(g)
    syms = [s for s in generators(sk) if s != TAUH]
    total = sum(intersect(sk, gen(s), gen(s)) for s in syms)
    return total - (sk.k - 2) * intersect(sk, gen(TAUH), gen(TAUH))


def pontryagin_number_local(g) -> int:
    """Same number from the fixed-point data alone."""
    sk = skeleton_of(g)
    total = Fraction(0)
    for comp in sk.components():
        if sk.is_fat(comp):
            sign = -1 if comp == "min" else 1
            e = sk.e_min if comp == "min" else sk.e_max
            # (1 t^2 + 2 sign e [S] t) * (sign/t - e [S]/t^2)
            total += -e + 2 * sign * e * sign
        else:
            w1, w2 = sk.weights(comp)
            total += Fraction(w1 * w1 + w2 * w2, w1 * w2)
    return int(total)


def chern_classes(g) -> ChernData:
    sk = skeleton_of(g)
    res = (sk.k - 2) * intersect(sk, gen(TAUH), gen(TAUH)) - sum(
        intersect(sk, gen(s), gen(s)) for s in extra_chain_classes(sk))
    euler = sk.iso + sk.fat_count * (2 - 2 * sk.genus)
    return ChernData(first_chern_class(sk), pontryagin_number(sk), euler, res)


def c1_local(sk: Skeleton, comp):
    """Expected restriction of c1 at a component from the fixed-point data."""
    if sk.is_fat(comp):
        e = sk.e_min if comp == "min" else sk.e_max
        return (Fraction(-1 if comp == "min" else 1), 2 - 2 * sk.genus + e)
    w1, w2 = sk.weights(comp)
    return Fraction(-w1 - w2)
