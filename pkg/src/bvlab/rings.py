"""Small graded rings with known syzygies, used to exercise the Koszul engine."""
from __future__ import annotations

from itertools import combinations_with_replacement

import numpy as np

from .ffield import FMatrix, PrimeField, Solver, rref
from .koszul import GradedRingData


def rational_normal_curve_ring(n: int, p: int, top: int = 3) -> GradedRingData:
    """Section ring of O(n) on the projective line: R_q = binary forms of degree qn."""
    if n < 1:
        raise ValueError("degree must be >= 1")
    dims = tuple(q * n + 1 for q in range(top + 1))
    mu = {}
    for q in range(1, top):
        t = np.zeros((n + 1, dims[q], dims[q + 1]), dtype=np.int64)
        for i in range(n + 1):
            for j in range(dims[q]):
                t[i, j, i + j] = 1
        mu[q] = t
    return GradedRingData(PrimeField(p), dims, mu, label=f"rnc({n})")


def _monomial_values(points: np.ndarray, q: int, p: int) -> np.ndarray:
    r1 = points.shape[1]
    rows = []
    for mono in combinations_with_replacement(range(r1), q):
        v = np.ones(points.shape[0], dtype=np.int64)
        for k in mono:
            v = v * points[:, k] % p
        rows.append(v)
    return np.array(rows, dtype=np.int64)


def point_set_ring(points, p: int, top: int = 3) -> GradedRingData:
    """Homogeneous coordinate ring of a finite set of points in P^r, truncated at ``top``.

    Degree-q elements are their value vectors on the points (one fixed affine
    representative each); products are pointwise.  V = R_1 is the space of
    linear forms, so the points must span P^r.
    """
    pts = np.mod(np.asarray(points, dtype=np.int64), p)
    r1 = pts.shape[1]
    bases = [np.ones((1, pts.shape[0]), dtype=np.int64)]
    for q in range(1, top + 1):
        red, piv = rref(FMatrix(p, _monomial_values(pts, q, p)))
        bases.append(red.to_numpy()[: len(piv)])
    V = pts.T.copy()  # linear forms x_0..x_r as value vectors
    if len(bases[1]) != r1:
        raise ValueError("points do not span projective space")
    bases[1] = V
    dims = tuple(len(b) for b in bases)
    mu = {}
    for q in range(1, top):
        solver = Solver(p, bases[q + 1])
        prods = np.array([v * s % p for v in V for s in bases[q]], dtype=np.int64)
        mu[q] = solver.coords(prods).reshape(r1, dims[q], dims[q + 1])
    return GradedRingData(PrimeField(p), dims, mu, label=f"points({pts.shape[0]} in P^{r1 - 1})")


def random_point_set_ring(r: int, npoints: int, p: int, rng: np.random.Generator, top: int = 3) -> GradedRingData:
    while True:
        pts = rng.integers(0, p, size=(npoints, r + 1))
        try:
            return point_set_ring(pts, p, top)
        except ValueError:
            continue
