"""Short Weierstrass curves y^2 = x^3 + ax + b over F_p and their group law."""
from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..counting import factorize
from ..ffield import PrimeField

MAX_POINT_COUNT_PRIME = 10**6


class NoTorsionFound(RuntimeError):
    pass


@dataclass(frozen=True)
class ECPoint:
    x: int | None = None
    y: int | None = None

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def to_json(self):
        return None if self.is_infinity else [self.x, self.y]

    @classmethod
    def from_json(cls, data):
        return INFINITY if data is None else cls(int(data[0]), int(data[1]))

    def __repr__(self):
        return "O" if self.is_infinity else f"({self.x}, {self.y})"


INFINITY = ECPoint()


@lru_cache(maxsize=8)
def _square_table(p: int) -> np.ndarray:
    sq = np.zeros(p, dtype=bool)
    sq[(np.arange(p, dtype=np.int64) ** 2) % p] = True
    return sq


@dataclass(frozen=True)
class EllipticCurve:
    field: PrimeField
    a: int
    b: int

    def __post_init__(self):
        p = self.field.p
        object.__setattr__(self, "a", self.a % p)
        object.__setattr__(self, "b", self.b % p)
        if (4 * self.a**3 + 27 * self.b**2) % p == 0:
            raise ValueError("singular curve")

    @property
    def p(self) -> int:
        return self.field.p

    def rhs(self, x: int) -> int:
        return (x * x * x + self.a * x + self.b) % self.p

    def contains(self, P: ECPoint) -> bool:
        return P.is_infinity or (P.y * P.y - self.rhs(P.x)) % self.p == 0

    def neg(self, P: ECPoint) -> ECPoint:
        return P if P.is_infinity else ECPoint(P.x, (-P.y) % self.p)

    def add(self, P: ECPoint, Q: ECPoint) -> ECPoint:
        p = self.p
        if P.is_infinity:
            return Q
        if Q.is_infinity:
            return P
        if P.x == Q.x and (P.y + Q.y) % p == 0:
            return INFINITY
        if P == Q:
            lam = (3 * P.x * P.x + self.a) * pow(2 * P.y, -1, p) % p
        else:
            lam = (Q.y - P.y) * pow(Q.x - P.x, -1, p) % p
        x3 = (lam * lam - P.x - Q.x) % p
        return ECPoint(x3, (lam * (P.x - x3) - P.y) % p)

    def sub(self, P: ECPoint, Q: ECPoint) -> ECPoint:
        return self.add(P, self.neg(Q))

    def mul(self, k: int, P: ECPoint) -> ECPoint:
        if k < 0:
            return self.mul(-k, self.neg(P))
        R = INFINITY
        while k:
            if k & 1:
                R = self.add(R, P)
            P = self.add(P, P)
            k >>= 1
        return R

    def sum(self, points) -> ECPoint:
        R = INFINITY
        for P in points:
            R = self.add(R, P)
        return R

    def order_of(self, P: ECPoint, multiple: int) -> int:
        """Exact order of P, given any multiple of it (e.g. the group order)."""
        if not self.mul(multiple, P).is_infinity:
            raise ValueError("multiple does not annihilate the point")
        n = multiple
        for q in factorize(multiple):
            while n % q == 0 and self.mul(n // q, P).is_infinity:
                n //= q
        return n

    def has_exact_order(self, P: ECPoint, d: int) -> bool:
        if not self.mul(d, P).is_infinity:
            return False
        return all(not self.mul(d // q, P).is_infinity for q in factorize(d)) if d > 1 else P.is_infinity

    def count_points(self) -> int:
        """Naive count of E(F_p), point at infinity included."""
        p = self.p
        if p > MAX_POINT_COUNT_PRIME:
            raise ValueError(f"naive point count is limited to p <= {MAX_POINT_COUNT_PRIME}")
        x = np.arange(p, dtype=np.int64)
        r = (x * x % p * x + self.a * x + self.b) % p
        sq = _square_table(p)
        return int(1 + np.sum(np.where(r == 0, 1, np.where(sq[r], 2, 0))))

    def lift_x(self, x: int) -> ECPoint | None:
        r = self.rhs(x)
        y = self.field.sqrt(r)
        return None if y is None else ECPoint(x % self.p, y)

    def random_point(self, rng: random.Random) -> ECPoint:
        while True:
            P = self.lift_x(rng.randrange(self.p))
            if P is not None:
                return P if rng.randrange(2) else self.neg(P)

    def line(self, P: ECPoint, Q: ECPoint, R: ECPoint) -> int:
        """Value at R of the line through P and Q (tangent if P == Q).

        Vertical lines are x - x_P; the line through O and anything is 1.
        """
        p = self.p
        if P.is_infinity or Q.is_infinity:
            return 1
        if P.x == Q.x and (P.y + Q.y) % p == 0:
            return (R.x - P.x) % p
        if P == Q:
            lam = (3 * P.x * P.x + self.a) * pow(2 * P.y, -1, p) % p
        else:
            lam = (Q.y - P.y) * pow(Q.x - P.x, -1, p) % p
        return (R.y - P.y - lam * (R.x - P.x)) % p

    def miller(self, n: int, T: ECPoint, Q: ECPoint) -> int:
        """f_{n,T}(Q) where div f_{n,T} = n(T) - ([n]T) - (n-1)(O).

        For T of order n this is the function with divisor n(T) - n(O),
        normalised by Miller's recursion.  Q must avoid the multiples of T.
        """
        p = self.p
        f = 1
        R = T
        for bit in bin(n)[3:]:
            R2 = self.add(R, R)
            num = self.line(R, R, Q)
            den = 1 if R2.is_infinity else (Q.x - R2.x) % p
            f = f * f % p * num % p * pow(den, -1, p) % p
            R = R2
            if bit == "1":
                R2 = self.add(R, T)
                num = self.line(R, T, Q)
                den = 1 if R2.is_infinity else (Q.x - R2.x) % p
                f = f * num % p * pow(den, -1, p) % p
                R = R2
        if f == 0:
            raise ZeroDivisionError("evaluation point meets the support of the Miller function")
        return f

    def to_json(self):
        return {"p": self.p, "a": self.a, "b": self.b}


def ec_with_torsion(p: int, d: int, seed: int, max_curves: int = 2000) -> tuple[EllipticCurve, ECPoint]:
    """A curve over F_p with a rational point of exact order d, deterministic in seed."""
    if p < 101:
        raise ValueError("p must be at least 101")
    if d < 2:
        raise ValueError("torsion order must be >= 2")
    F = PrimeField(p)
    rng = random.Random(f"ec:{p}:{d}:{seed}")
    for _ in range(max_curves):
        a, b = rng.randrange(p), rng.randrange(p)
        if (4 * a**3 + 27 * b * b) % p == 0:
            continue
        E = EllipticCurve(F, a, b)
        N = E.count_points()
        if N % d:
            continue
        for _ in range(30):
            Q = E.mul(N // d, E.random_point(rng))
            if E.has_exact_order(Q, d):
                return E, Q
    raise NoTorsionFound(f"no curve over F_{p} with a point of order {d} after {max_curves} tries")
