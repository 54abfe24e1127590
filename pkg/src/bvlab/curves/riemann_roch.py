"""Riemann-Roch spaces on elliptic curves by pole-bounded linear algebra.

Regular functions on the affine curve are written A(x) + B(x) y and stored as
coefficient vectors indexed by pole order at infinity: slot 2k holds x^k and
slot 2k + 3 holds x^k y (slot 1 is always empty).  A space L(D) is returned
as numerators F in L(N.O) over a fixed denominator h that is a product of
vertical lines (x - x0)^e, so that every f in L(D) equals F / h.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from ..ffield import FMatrix, kernel_matrix
from .elliptic import INFINITY, ECPoint, EllipticCurve


# -- pole-order vectors -------------------------------------------------------

def dimension_of_pole_space(n: int) -> int:
    """dim L(n.O): 0 for n < 0, 1 for n in {0, 1}, n for n >= 1."""
    if n < 0:
        return 0
    return max(n, 1)


def pole_orders(n: int) -> list[int]:
    return [k for k in range(n + 1) if k != 1]


def split_xy(vec: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Pole-order vector -> coefficient arrays (A, B) of A(x) + B(x) y."""
    A = vec[0::2]
    B = vec[3::2]
    return A, B


def join_xy(A: np.ndarray, B: np.ndarray, length: int) -> np.ndarray:
    out = np.zeros(length, dtype=np.int64)
    for arr, sl in ((A, out[0::2]), (B, out[3::2])):
        k = min(len(arr), len(sl))
        if np.any(arr[k:]):
            raise ValueError("product exceeds the target pole order")
        sl[:k] = arr[:k]
    return out


def _polymul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    if len(a) == 0 or len(b) == 0:
        return np.zeros(0, dtype=np.int64)
    # coefficients < p and lengths < 10^3 keep the convolution inside int64 for p ~ 10^4;
    # use object arithmetic for larger primes
    if p < 2**20:
        return np.convolve(a, b) % p
    return np.array(np.convolve(a.astype(object), b.astype(object)) % p, dtype=np.int64)


def _padd(a, b, p):
    n = max(len(a), len(b))
    out = np.zeros(n, dtype=np.int64)
    out[: len(a)] += a
    out[: len(b)] += b
    return out % p


def multiply(E: EllipticCurve, u: np.ndarray, v: np.ndarray, length: int) -> np.ndarray:
    """Product of two pole-order vectors, reduced by y^2 = x^3 + ax + b."""
    p = E.p
    A1, B1 = split_xy(u)
    A2, B2 = split_xy(v)
    cubic = np.array([E.b, E.a, 0, 1], dtype=np.int64)
    A = _padd(_polymul(A1, A2, p), _polymul(_polymul(B1, B2, p), cubic, p), p)
    B = _padd(_polymul(A1, B2, p), _polymul(B1, A2, p), p)
    return join_xy(A, B, length)


def evaluate(E: EllipticCurve, vec: np.ndarray, P: ECPoint) -> int:
    """Value of the regular function at a finite point."""
    p = E.p
    A, B = split_xy(vec)
    xa = 0
    for c in A[::-1]:
        xa = (xa * P.x + int(c)) % p
    xb = 0
    for c in B[::-1]:
        xb = (xb * P.x + int(c)) % p
    return (xa + xb * P.y) % p


def evaluation_matrix(E: EllipticCurve, n: int, points: Iterable[ECPoint]) -> np.ndarray:
    """Rows: points; columns: pole-order slots 0..n."""
    rows = []
    for P in points:
        row = np.zeros(n + 1, dtype=np.int64)
        for k in pole_orders(n):
            e = np.zeros(n + 1, dtype=np.int64)
            e[k] = 1
            row[k] = evaluate(E, e, P)
        rows.append(row)
    return np.array(rows, dtype=np.int64).reshape(-1, n + 1)


def derivation(E: EllipticCurve, vec: np.ndarray, length: int) -> np.ndarray:
    """dF / omega_0 for the invariant differential omega_0 = dx / 2y.

    D(F) = 2y F_x + (3x^2 + a) F_y; D raises pole order by one.
    """
    p = E.p
    A, B = split_xy(vec)
    dA = (A[1:] * np.arange(1, len(A))) % p if len(A) > 1 else np.zeros(0, dtype=np.int64)
    dB = (B[1:] * np.arange(1, len(B))) % p if len(B) > 1 else np.zeros(0, dtype=np.int64)
    # F = A + B y:  F_x = A' + B' y,  F_y = B
    # D(F) = 2y(A' + B'y) + (3x^2 + a) B = 2B'(x^3+ax+b) + (3x^2+a)B + 2A' y
    cubic = np.array([E.b, E.a, 0, 1], dtype=np.int64)
    quad = np.array([E.a, 0, 3], dtype=np.int64)
    newA = _padd(2 * _polymul(dB, cubic, p), _polymul(quad, B, p), p)
    newB = (2 * dA) % p
    return join_xy(newA, newB, length)


# -- local expansions ---------------------------------------------------------

def _ser_mul(s, t, m, p):
    out = [0] * m
    for i, a in enumerate(s[:m]):
        if a:
            for j in range(m - i):
                out[i + j] = (out[i + j] + a * t[j]) % p
    return out


def local_expansion(E: EllipticCurve, P: ECPoint, m: int) -> tuple[list[int], list[int]]:
    """Power series of x and y to order m in a uniformizer at the finite point P."""
    p = E.p
    if P.y % p:
        # u = x - x0; y^2 = c0 + c1 u + c2 u^2 + u^3
        x0, y0 = P.x, P.y
        c = [E.rhs(x0), (3 * x0 * x0 + E.a) % p, (3 * x0) % p, 1] + [0] * m
        xs = [x0, 1] + [0] * m
        ys = [y0] + [0] * m
        inv2y = pow(2 * y0, -1, p)
        for k in range(1, m):
            acc = c[k] - sum(ys[i] * ys[k - i] for i in range(1, k))
            ys[k] = acc * inv2y % p
        return xs[:m], ys[:m]
    # 2-torsion point: u = y, x = x0 + w(y) with f'(x0) w + 3 x0 w^2 + w^3 = y^2
    x0 = P.x
    fp = (3 * x0 * x0 + E.a) % p
    inv = pow(fp, -1, p)
    w = [0] * m
    y2 = [0] * m
    if m > 2:
        y2[2] = 1
    for _ in range(m):
        w2 = _ser_mul(w, w, m, p)
        w3 = _ser_mul(w2, w, m, p)
        w = [(y2[k] - 3 * x0 * w2[k] - w3[k]) * inv % p for k in range(m)]
    xs = [(x0 + w[0]) % p] + w[1:]
    ys = [0, 1][:m] + [0] * max(0, m - 2)
    return xs, ys


def vanishing_conditions(E: EllipticCurve, n: int, P: ECPoint, order: int) -> np.ndarray:
    """Linear conditions on L(n.O) for vanishing to the given order at P."""
    if order <= 0:
        return np.zeros((0, n + 1), dtype=np.int64)
    p = E.p
    xs, ys = local_expansion(E, P, order)
    one = [1] + [0] * (order - 1)
    xpow = [one]
    rows = np.zeros((order, n + 1), dtype=np.int64)
    for k in pole_orders(n):
        i, j = (k // 2, 0) if k % 2 == 0 else ((k - 3) // 2, 1)
        while len(xpow) <= i:
            xpow.append(_ser_mul(xpow[-1], xs, order, p))
        s = xpow[i] if j == 0 else _ser_mul(xpow[i], ys, order, p)
        rows[:, k] = s
    return rows


# -- divisors and L(D) --------------------------------------------------------

@dataclass(frozen=True)
class DivisorE:
    terms: tuple[tuple[ECPoint, int], ...] = ()

    def __post_init__(self):
        c = Counter()
        for P, k in self.terms:
            c[P] += int(k)
        merged = tuple(sorted(((P, k) for P, k in c.items() if k), key=lambda t: (t[0].is_infinity, t[0].x or 0, t[0].y or 0)))
        object.__setattr__(self, "terms", merged)

    @classmethod
    def of(cls, *terms) -> "DivisorE":
        return cls(tuple(terms))

    @property
    def degree(self) -> int:
        return sum(k for _, k in self.terms)

    def mult(self, P: ECPoint) -> int:
        return dict(self.terms).get(P, 0)

    def __add__(self, other: "DivisorE") -> "DivisorE":
        return DivisorE(self.terms + other.terms)

    def __neg__(self) -> "DivisorE":
        return DivisorE(tuple((P, -k) for P, k in self.terms))

    def __sub__(self, other: "DivisorE") -> "DivisorE":
        return self + (-other)

    def __mul__(self, k: int) -> "DivisorE":
        return DivisorE(tuple((P, k * m) for P, m in self.terms))

    __rmul__ = __mul__

    def group_sum(self, E: EllipticCurve) -> ECPoint:
        return E.sum(E.mul(k, P) for P, k in self.terms)


@dataclass(frozen=True)
class RRSpace:
    """Basis of L(D): functions numerator_k / denominator."""

    curve: EllipticCurve
    divisor: DivisorE
    pole_bound: int
    denominator: tuple[tuple[int, int], ...]  # (x0, exponent)
    numerators: np.ndarray = field(compare=False)

    @property
    def dimension(self) -> int:
        return self.numerators.shape[0]

    def denominator_value(self, P: ECPoint) -> int:
        p = self.curve.p
        v = 1
        for x0, e in self.denominator:
            v = v * pow((P.x - x0) % p, e, p) % p
        return v

    def evaluate(self, k: int, P: ECPoint) -> int:
        """Value of the k-th basis function at a finite point off the denominator."""
        den = self.denominator_value(P)
        if den == 0:
            raise ZeroDivisionError("point lies on the denominator")
        return evaluate(self.curve, self.numerators[k], P) * pow(den, -1, self.curve.p) % self.curve.p

    def evaluation_row(self, P: ECPoint) -> np.ndarray:
        return np.array([self.evaluate(k, P) for k in range(self.dimension)], dtype=np.int64)


def rr_space(E: EllipticCurve, D: DivisorE) -> RRSpace:
    """Basis of L(D) = {f : div f + D >= 0} (together with 0)."""
    p = E.p
    n_inf = D.mult(INFINITY)
    # exponent of the vertical line x - x0 needed to clear the poles over x0
    need: dict[int, int] = {}
    for P, k in D.terms:
        if P.is_infinity or k <= 0:
            continue
        e = -(-k // 2) if P.y % p == 0 else k
        need[P.x] = max(need.get(P.x, 0), e)
    denom = tuple(sorted(need.items()))
    N = n_inf + 2 * sum(e for _, e in denom)
    # points where the numerator F = f h must vanish, with the required order
    required: dict[ECPoint, int] = {}
    for x0, e in denom:
        for P in _fibre(E, x0):
            zero = 2 * e if P.y % p == 0 else e
            required[P] = zero - D.mult(P)
    for P, k in D.terms:
        if not P.is_infinity and k < 0 and P not in required:
            required[P] = -k
    if N < 0:
        return RRSpace(E, D, N, denom, np.zeros((0, 0), dtype=np.int64))
    conds = [vanishing_conditions(E, N, P, m) for P, m in sorted(required.items(), key=lambda t: (t[0].x, t[0].y)) if m > 0]
    # slot 1 does not exist: force it to zero
    slot1 = np.zeros((1, N + 1), dtype=np.int64)
    if N >= 1:
        slot1[0, 1] = 1
    M = np.vstack([slot1] + conds) if conds else slot1
    numerators = kernel_matrix(FMatrix(E.field, M))
    return RRSpace(E, D, N, denom, numerators)


def _fibre(E: EllipticCurve, x0: int) -> list[ECPoint]:
    P = E.lift_x(x0)
    if P is None:
        raise ValueError("no point over this x-coordinate")
    return [P] if P.y == 0 else [P, E.neg(P)]


def expected_dimension(E: EllipticCurve, D: DivisorE) -> int:
    """Riemann-Roch on genus one: deg D for deg D >= 1; 0 or 1 in degree 0."""
    d = D.degree
    if d > 0:
        return d
    if d < 0:
        return 0
    return 1 if D.group_sum(E).is_infinity else 0
