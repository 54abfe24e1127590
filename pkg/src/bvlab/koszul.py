"""Koszul differentials, Koszul cohomology dimensions and Betti tables of a truncated graded ring."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np

from .ffield import FMatrix, PrimeField, mat_rank


class DegreeUnavailable(ValueError):
    pass


class UnknownEntries(ValueError):
    pass


class _Unknown:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNKNOWN"

    def __reduce__(self):
        return (_Unknown, ())


UNKNOWN = _Unknown()


@dataclass(frozen=True)
class GradedRingData:
    """R_0..R_top with tensors mu[q][i, j, k]: coefficient of R_{q+1} basis k in v_i * s_j.

    V = R_1 carries the basis fixed by mu; mu[0] is implied by R_0 = F . 1.
    """

    field: PrimeField
    dims: tuple[int, ...]
    mu: dict = field(compare=False)
    label: str = ""

    def __post_init__(self):
        if self.dims[0] != 1:
            raise ValueError("R_0 must be one-dimensional")
        n = self.dims[1]
        for q, t in self.mu.items():
            if t.shape != (n, self.dims[q], self.dims[q + 1]):
                raise ValueError(f"mu[{q}] has shape {t.shape}, expected {(n, self.dims[q], self.dims[q + 1])}")

    @property
    def n_plus_1(self) -> int:
        return self.dims[1]

    @property
    def p(self) -> int:
        return self.field.p

    def tensor(self, q: int) -> np.ndarray:
        if q == 0:
            return np.eye(self.n_plus_1, dtype=np.int64).reshape(self.n_plus_1, 1, self.n_plus_1)
        if q not in self.mu or q + 1 >= len(self.dims):
            raise DegreeUnavailable(f"multiplication V x R_{q} -> R_{q + 1} is not available")
        return self.mu[q]

    def dim(self, q: int) -> int:
        if q < 0:
            return 0
        if q >= len(self.dims):
            raise DegreeUnavailable(f"R_{q} is not available")
        return self.dims[q]

    def change_basis(self, A: np.ndarray) -> "GradedRingData":
        """The same ring with V = R_1 rebased to w_i = sum_j A[i, j] v_j."""
        p = self.p
        A = np.mod(np.asarray(A, dtype=np.int64), p)
        if mat_rank(FMatrix(p, A)) != self.n_plus_1:
            raise ValueError("change of basis must be invertible")
        mu = {}
        for q, t in self.mu.items():
            t2 = _mix(A, t, p)
            if q == 1:
                t2 = _mix(A, t2.transpose(1, 0, 2), p).transpose(1, 0, 2)
            mu[q] = t2
        return GradedRingData(self.field, self.dims, mu, self.label)

    def to_json(self) -> dict:
        return {"prime": self.p, "dims": list(self.dims)}


def _mix(A: np.ndarray, t: np.ndarray, p: int) -> np.ndarray:
    """sum_a A[i, a] t[a, ...] mod p, safe against int64 overflow."""
    out = np.zeros(t.shape, dtype=np.int64)
    for a in range(A.shape[1]):
        out = (out + np.multiply.outer(A[:, a], t[a]) % p) % p
    return out


@lru_cache(maxsize=256)
def exterior_basis(n: int, p: int) -> tuple[tuple[int, ...], ...]:
    """Lexicographically ordered p-subsets of range(n)."""
    if p < 0 or p > n:
        return ()
    return tuple(combinations(range(n), p))


@lru_cache(maxsize=256)
def _subset_index(n: int, p: int) -> dict:
    return {I: k for k, I in enumerate(exterior_basis(n, p))}


def koszul_differential(ring: GradedRingData, p: int, q: int) -> FMatrix:
    """Matrix of d: wedge^p V (x) R_q -> wedge^(p-1) V (x) R_(q+1).

    Columns are indexed by (I, s) and rows by (J, t), both with the wedge
    index varying slowest.
    """
    n = ring.n_plus_1
    if p < 0 or p > n:
        raise DegreeUnavailable(f"p = {p} outside 0..{n}")
    if q < 0:
        return FMatrix.zeros(ring.field, comb(n, p - 1) * ring.dim(q + 1) if p >= 1 else 0, 0)
    rq, rq1 = ring.dim(q), ring.dim(q + 1)
    src = exterior_basis(n, p)
    if p == 0:
        return FMatrix.zeros(ring.field, 0, len(src) * rq)
    mu = ring.tensor(q)
    tgt = _subset_index(n, p - 1)
    M = np.zeros((len(tgt) * rq1, len(src) * rq), dtype=np.int64)
    pr = ring.p
    neg = (-mu) % pr
    for c, I in enumerate(src):
        cols = slice(c * rq, (c + 1) * rq)
        for j, i in enumerate(I):
            r = tgt[I[:j] + I[j + 1:]]
            block = mu[i] if j % 2 == 0 else neg[i]
            M[r * rq1: (r + 1) * rq1, cols] = block.T
    return FMatrix(ring.field, M)


def _rank(ring: GradedRingData, p: int, q: int, backend: str) -> int:
    n = ring.n_plus_1
    if p < 1 or p > n or q < 0:
        return 0
    m = koszul_differential(ring, p, q)
    if m.rows == 0 or m.cols == 0:
        return 0
    return mat_rank(m, backend=backend)


def exterior_tensor_dim(ring: GradedRingData, p: int, q: int) -> int:
    n = ring.n_plus_1
    if p < 0 or p > n or q < 0:
        return 0
    return comb(n, p) * ring.dim(q)


def koszul_dim(ring: GradedRingData, p: int, q: int, backend: str = "auto") -> int:
    """dim K_{p,q} = dim(wedge^p V (x) R_q) - rank d_{p,q} - rank d_{p+1,q-1}."""
    if q + 1 >= len(ring.dims):
        raise DegreeUnavailable(f"K_{{{p},{q}}} needs R_{q + 1}")
    return exterior_tensor_dim(ring, p, q) - _rank(ring, p, q, backend) - _rank(ring, p + 1, q - 1, backend)


@dataclass
class BettiTable:
    entries: dict  # (p, q) -> int or UNKNOWN
    meta: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.entries.get(key, 0)

    def __eq__(self, other):
        return isinstance(other, BettiTable) and self.entries == other.entries

    @property
    def columns(self) -> list[int]:
        return sorted({p for p, _ in self.entries})

    @property
    def rows(self) -> list[int]:
        return sorted({q for _, q in self.entries})

    def row(self, q: int, ps=None) -> list:
        ps = self.columns if ps is None else ps
        return [self.entries.get((p, q), 0) for p in ps]

    def known(self) -> bool:
        return all(v is not UNKNOWN for v in self.entries.values())

    def triples(self) -> list:
        return [[p, q, (None if v is UNKNOWN else v)] for (p, q), v in sorted(self.entries.items(), key=lambda t: (t[0][1], t[0][0]))]

    def render(self) -> str:
        ps = self.columns
        w = max([len(str(v)) for v in self.entries.values() if v is not UNKNOWN] + [3])
        lines = ["q\\p " + " ".join(f"{p:>{w}}" for p in ps)]
        for q in self.rows:
            cells = []
            for p in ps:
                v = self.entries.get((p, q), 0)
                cells.append(f"{'?' if v is UNKNOWN else ('-' if v == 0 else v):>{w}}")
            lines.append(f"{q:>3} " + " ".join(cells))
        return "\n".join(lines)


def betti_table(ring: GradedRingData, pmax: int | None = None, threads: int = 1, backend: str = "auto") -> BettiTable:
    """K_{p,q} for q in {0, 1, 2} and 0 <= p <= pmax; needs R_0..R_3."""
    n = ring.n_plus_1
    pmax = n if pmax is None else pmax
    if not 0 <= pmax <= n:
        raise ValueError(f"pmax must lie in 0..{n}")
    if len(ring.dims) < 4:
        raise DegreeUnavailable("Betti rows 0..2 need R_0..R_3")
    # every rank needed, computed once: d_{p,q} for q in {0,1,2}
    keys = sorted({(p, q) for p in range(1, pmax + 2) for q in range(3) if p <= n})
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            ranks = dict(zip(keys, pool.map(lambda k: _rank(ring, k[0], k[1], backend), keys)))
    else:
        ranks = {k: _rank(ring, k[0], k[1], backend) for k in keys}
    entries = {}
    for p in range(pmax + 1):
        for q in range(3):
            entries[(p, q)] = exterior_tensor_dim(ring, p, q) - ranks.get((p, q), 0) - ranks.get((p + 1, q - 1), 0)
    return BettiTable(entries, {"n_plus_1": n, "dims": list(ring.dims)})


def naturality(table: BettiTable, ps=None, skip_unknown: bool = False) -> bool:
    """True iff b_{p,2} * b_{p+1,1} = 0 for every p in range.

    Pairs touching an UNKNOWN entry raise UnknownEntries, or are skipped
    when ``skip_unknown`` is set.
    """
    ps = table.columns if ps is None else list(ps)
    for p in ps:
        if p + 1 not in ps and (p + 1, 1) not in table.entries:
            continue
        a, b = table[(p, 2)], table[(p + 1, 1)]
        if a is UNKNOWN or b is UNKNOWN:
            if skip_unknown:
                continue
            raise UnknownEntries(f"entry at ({p},2) or ({p + 1},1) is unknown")
        if a * b:
            return False
    return True


def euler_characteristic(ring: GradedRingData, k: int) -> tuple[int, int]:
    """Both sides of sum_j (-1)^j dim(wedge^j V (x) R_(k-j)) = sum_p (-1)^p dim K_{p,k-p}."""
    n = ring.n_plus_1
    lhs = sum((-1) ** j * exterior_tensor_dim(ring, j, k - j) for j in range(0, min(k, n) + 1))
    rhs = 0
    for p in range(0, min(k, n) + 1):
        q = k - p
        # K_{p,q} with q = k - p; the rank of d_{p,q} needs R_{q+1}, absent for q = top
        if q + 1 < len(ring.dims):
            dim = koszul_dim(ring, p, q)
        else:
            dim = _cokernel_top(ring, p, q)
        rhs += (-1) ** p * dim
    return lhs, rhs


def _cokernel_top(ring: GradedRingData, p: int, q: int) -> int:
    # only p = 0 reaches the top weight for k <= len(dims) - 1: K_{0,q} = R_q / V R_{q-1}
    if p != 0:
        raise DegreeUnavailable(f"K_{{{p},{q}}} needs R_{q + 1}")
    return exterior_tensor_dim(ring, 0, q) - _rank(ring, 1, q - 1, "auto")
