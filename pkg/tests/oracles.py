"""Independent reference computations used by the test-suite.

Nothing here calls the code under test for the quantity being checked;
shared plumbing (restrictions, integer linear algebra) is reused.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np
import sympy

from hamgraph import intlinalg
from hamgraph.cohomology import normal_form, pi_star_t, quotient
from hamgraph.localization import intersect, restrict


def _flat(r) -> list:
    out = []
    for _, v in r.values:
        out += [int(x) for x in v] if isinstance(v, tuple) else [int(v)]
    return out


def _lattice(vectors):
    """Column basis of the Z-span of the given integer vectors."""
    mat = [list(r) for r in zip(*vectors)]
    h, _, piv = intlinalg._col_echelon(mat)
    return [[h[r][c] for c in range(len(piv))] for r in range(len(h))]


def _monomials(r, d):
    return list(itertools.combinations_with_replacement(range(r), d))


class RingData:
    """Restriction images of a basis of H2 and of its degree 4 and 6 monomials.

    ``adapted`` is a unimodular change of basis whose first column is pi, so
    pi spans the radical of the intersection form in the first coordinate.
    """

    def __init__(self, sk):
        self.lifts = list(quotient(sk).lifts)
        r = self.r = len(self.lifts)
        self.pi = [int(x) for x in normal_form(sk, pi_star_t(sk))]
        self.gram = [[int(intersect(sk, a, b)) for b in self.lifts] for a in self.lifts]
        self.tensor = {}
        self.n = {}
        for d in (2, 3):
            keys = list(itertools.product(range(r), repeat=d))
            vecs = {k: _flat(restrict(sk, [self.lifts[i] for i in k])) for k in _monomials(r, d)}
            basis = _lattice(list(vecs.values()))
            coords = {k: intlinalg.solve_int(basis, v) for k, v in vecs.items()}
            self.n[d] = len(basis[0])
            self.tensor[d] = np.array([coords[tuple(sorted(k))] for k in keys], dtype=np.int64).reshape((r,) * d + (self.n[d],))
        _, u, _ = intlinalg._col_echelon([self.pi])
        ut = [list(row) for row in zip(*u)]
        self.adapted = np.array(intlinalg.inverse_unimodular(ut), dtype=np.int64)
        assert list(self.adapted[:, 0]) == self.pi or list(-self.adapted[:, 0]) == self.pi
        if list(self.adapted[:, 0]) != self.pi:
            self.adapted[:, 0] *= -1
        p = self.adapted
        self.gram_adapted = (p.T @ np.array(self.gram, dtype=np.int64) @ p)[1:, 1:]

    def monomial_matrix(self, d):
        """Rows: coordinates of the sorted degree-d monomials of the basis."""
        t = self.tensor[d]
        return np.array([t[k] for k in _monomials(self.r, d)], dtype=np.int64)


@lru_cache(maxsize=None)
def ring_data(sk) -> RingData:
    return RingData(sk)


class _Target:
    """Precomputed solver for Y = Phi X with Phi unimodular, X the source monomials."""

    def __init__(self, x):
        # x: K x n matrix (rows are monomial coordinates)
        mx = sympy.Matrix(x.tolist())
        rows = []
        for k in range(mx.rows):
            trial = rows + [k]
            if mx.extract(trial, list(range(mx.cols))).rank() == len(trial):
                rows = trial
            if len(rows) == mx.cols:
                break
        assert len(rows) == mx.cols
        xs = mx.extract(rows, list(range(mx.cols)))
        self.rows = rows
        self.det = int(xs.det())
        self.adj = np.array(xs.adjugate().tolist(), dtype=np.int64)
        self.x = x

    def accepts(self, y):
        """Mask over the batch y (B x K x n) of those related to x by a unimodular Phi."""
        # row form: y_k = x_k Psi with Psi = xs^-1 ys
        num = self.adj @ y[:, self.rows, :]
        ok = np.all(num % self.det == 0, axis=(1, 2))
        idx = np.nonzero(ok)[0]
        psi = num[idx] // self.det
        good = np.all(np.rint(self.x.astype(float) @ psi.astype(float)).astype(np.int64) == y[idx], axis=(1, 2))
        idx, psi = idx[good], psi[good]
        if len(idx):
            dets = np.rint(np.linalg.det(psi.astype(float))).astype(np.int64)
            idx = idx[np.abs(dets) == 1]
        out = np.zeros(len(y), dtype=bool)
        out[idx] = True
        return out


@lru_cache(maxsize=None)
def _source(sk, d) -> _Target:
    return _Target(ring_data(sk).monomial_matrix(d))


def _images(t: RingData, a_old, d):
    """Monomial coordinates of the images, batched: B x K x n.

    Float matmuls are exact here: every entry stays far below 2**53.
    """
    a = a_old.astype(float)
    tens = t.tensor[d].astype(float)
    r, n = t.r, t.n[d]
    # contract the first tensor slot with column a of A, then the remaining slots
    u = np.matmul(np.swapaxes(a, 1, 2), tens.reshape(r, -1)).reshape((len(a), r) + (r,) * (d - 1) + (n,))
    out = []
    for k in _monomials(r, d):
        v = u[:, k[0]]
        for pos in k[1:]:
            v = np.einsum("bl...,bl->b...", v, a[:, :, pos])
        out.append(v)
    return np.rint(np.stack(out, axis=1)).astype(np.int64)


def _isometries(gs, gt, sign, box):
    """Unimodular integer matrices in the box with M^T gt M = sign * gs."""
    n = len(gs)
    if n == 0:
        yield np.zeros((0, 0), dtype=np.int64)
        return
    vecs = np.array(list(itertools.product(range(-box, box + 1), repeat=n)), dtype=np.int64)
    gv = vecs @ gt
    norms = np.einsum("vi,vi->v", gv, vecs)
    by_col = [np.nonzero(norms == sign * gs[a][a])[0] for a in range(n)]

    def rec(chosen):
        a = len(chosen)
        if a == n:
            m = vecs[chosen].T
            if abs(round(np.linalg.det(m.astype(float)))) == 1:
                yield m
            return
        for v in by_col[a]:
            if all(gv[v] @ vecs[w] == sign * gs[a][b] for b, w in enumerate(chosen)):
                yield from rec(chosen + [v])

    yield from rec([])


def brute_force_weak_iso(g1, g2, box: int = 2, lift_box: int = 4):
    """Matrix on H2 of a weak ring isomorphism found by bounded search, or None.

    The search runs in the adapted bases: the first basis vector is pi, the
    rest span a complement on which the intersection form is nondegenerate.
    A candidate sends pi to eps * pi, acts on the complement by an isometry
    (up to a global sign) with entries in the box, and adds multiples of pi
    bounded by ``lift_box``.  It is accepted when the degree 4 and degree 6 monomials
    of the images differ from the source monomials by a unimodular change of
    lattice basis.
    """
    s, t = ring_data(g1.skeleton()), ring_data(g2.skeleton())
    r = s.r
    if r != t.r:
        return None
    n = r - 1
    src = {d: _source(g1.skeleton(), d) for d in (2, 3)}
    lifts = np.array(list(itertools.product(range(-lift_box, lift_box + 1), repeat=n)), dtype=np.int64).reshape(-1, n)
    inv_s = np.array(intlinalg.inverse_unimodular(s.adapted.tolist()), dtype=np.int64)
    gs = s.gram_adapted.tolist()
    gt = t.gram_adapted
    for sign in (1, -1):
        for bar in _isometries(gs, gt, sign, box):
            for eps in (1, -1):
                a_new = np.zeros((len(lifts), r, r), dtype=np.int64)
                a_new[:, 0, 0] = eps
                a_new[:, 0, 1:] = lifts
                a_new[:, 1:, 1:] = bar
                a_old = t.adapted @ a_new @ inv_s
                ok = src[2].accepts(_images(t, a_old, 2))
                for b in np.nonzero(ok)[0]:
                    one = a_old[b : b + 1]
                    if src[3].accepts(_images(t, one, 3))[0]:
                        return one[0].tolist()
    return None
