"""Arithmetic functions and torsion-curve counts.

Everything here is exact integer arithmetic.  The count of curves in |L|
whose restricted bundle has order dividing l is C(2l^2 - 2, g); Moebius
inversion over the divisors of l isolates the curves of exact order l.
"""
from __future__ import annotations

import threading
from itertools import combinations
from math import comb, lcm, prod

import numpy as np

DEFAULT_BUDGET = 10**7


class BudgetExceeded(RuntimeError):
    pass


class NegativeLower(ValueError):
    pass


def factorize(n: int) -> dict[int, int]:
    if n < 1:
        raise ValueError("n must be positive")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def divisors(n: int) -> list[int]:
    divs = [1]
    for q, e in factorize(n).items():
        divs = [d * q**k for d in divs for k in range(e + 1)]
    return sorted(divs)


class ArithmeticCache:
    """Memo tables for mu(n) and sigma_k(n), safe to share between threads."""

    def __init__(self):
        self._lock = threading.Lock()
        self._mu: dict[int, int] = {}
        self._sigma: dict[tuple[int, int], int] = {}

    def moebius(self, n: int) -> int:
        with self._lock:
            if n in self._mu:
                return self._mu[n]
        value = _moebius(n)
        with self._lock:
            self._mu[n] = value
        return value

    def sigma(self, k: int, n: int) -> int:
        with self._lock:
            if (k, n) in self._sigma:
                return self._sigma[(k, n)]
        value = _sigma(k, n)
        with self._lock:
            self._sigma[(k, n)] = value
        return value


def _moebius(n: int) -> int:
    if n < 1:
        raise ValueError("moebius needs n >= 1")
    f = factorize(n)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def _sigma(k: int, n: int) -> int:
    if n < 1 or k < 0:
        raise ValueError("sigma needs n >= 1, k >= 0")
    return prod((q ** (k * (e + 1)) - 1) // (q**k - 1) if k else e + 1 for q, e in factorize(n).items())


_CACHE = ArithmeticCache()


def moebius(n: int) -> int:
    return _CACHE.moebius(n)


def sigma(k: int, n: int) -> int:
    """Sum of d**k over the divisors d of n."""
    return _CACHE.sigma(k, n)


def binom_conv(a: int, b: int) -> int:
    """Binomial coefficient with C(a, b) = 0 whenever b > a."""
    if b < 0:
        raise NegativeLower(f"lower index must be >= 0, got {b}")
    if b > a:
        return 0
    return comb(a, b)


def torsion_points(level: int) -> int:
    """Number of points in T_l meet Gamma, i.e. T_l . Gamma = 2l^2 - 2."""
    return 2 * level * level - 2


def bv_count(level: int, genus: int) -> int:
    """Curves C in |L| with eta_C^l trivial: C(2l^2 - 2, g)."""
    return binom_conv(torsion_points(level), genus)


def exact_order_count(level: int, genus: int) -> int:
    """Curves with eta_C of order exactly l."""
    return sum(moebius(level // d) * binom_conv(torsion_points(d), genus) for d in divisors(level))


def exact_order_points(level: int) -> dict[int, int]:
    """f(d): points of T_l meet Gamma whose fibre carries a bundle of exact order d.

    Moebius inversion of sum_{e | d} f(e) = 2d^2 - 2 over the divisors of l.
    """
    return {
        d: sum(moebius(d // e) * torsion_points(e) for e in divisors(d))
        for d in divisors(level)
    }


def _labelled_orders(level: int) -> list[int]:
    return [d for d, k in sorted(exact_order_points(level).items()) for _ in range(k)]


def brute_force_exact_order(
    level: int, genus: int, budget: int = DEFAULT_BUDGET, method: str = "subsets"
) -> int:
    """Count g-subsets of the labelled points whose orders have lcm exactly l.

    ``method="subsets"`` walks every subset; ``method="compositions"`` walks
    order-multiplicity vectors and weights them by products of binomials.
    """
    total = bv_count(level, genus)
    if method == "subsets":
        if total > budget:
            raise BudgetExceeded(f"C({torsion_points(level)}, {genus}) = {total} exceeds budget {budget}")
        orders = _labelled_orders(level)
        return sum(1 for sub in combinations(orders, genus) if lcm(*sub) == level) if genus else int(level == 1)
    if method == "compositions":
        f = sorted(exact_order_points(level).items())
        count = 0

        def walk(idx, left, acc, weight):
            nonlocal count
            if idx == len(f):
                if left == 0 and acc == level:
                    count += weight
                return
            d, avail = f[idx]
            for k in range(min(avail, left) + 1):
                walk(idx + 1, left - k, lcm(acc, d) if k else acc, weight * comb(avail, k))

        walk(0, genus, 1, 1)
        return count
    raise ValueError(f"unknown method {method!r}")


def sigma2_table(nmax: int) -> np.ndarray:
    """sigma_2(n) for 0 <= n <= nmax by a divisor sieve (entry 0 unused)."""
    out = np.zeros(nmax + 1, dtype=np.int64)
    for d in range(1, nmax + 1):
        out[d::d] += d * d
    return out


def sigma2_inequality(nmax: int) -> bool:
    """True iff sigma_2(n) < 2 n^2 for every 2 <= n <= nmax."""
    if nmax < 2:
        raise ValueError("nmax must be >= 2")
    s = sigma2_table(nmax)
    n = np.arange(nmax + 1, dtype=np.int64)
    return bool(np.all(s[2:] < 2 * n[2:] ** 2))
