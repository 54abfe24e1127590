"""Exact linear algebra over a prime field F_p.

Matrices are stored densely as read-only ``int64`` numpy arrays with every
entry reduced into ``[0, p)``.  The dense row reduction below is the
baseline; when python-flint is importable, ranks of large matrices are
delegated to ``nmod_mat``.  Both paths return the same numbers because rank
and reduced row echelon form do not depend on the algorithm.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

try:  # optional fast path
    import flint
except ImportError:  # pragma: no cover - exercised only without flint
    flint = None

DEFAULT_PRIME = 10007

# Below this many entries the pure numpy path is at least as fast as a
# round trip through flint.
_FLINT_THRESHOLD = 4096


class NotInSpan(ValueError):
    """Raised by :func:`express_in_basis` when a vector lies outside the span."""


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def default_prime() -> int:
    """The prime used when none is given: ``$BV_PRIME`` or 10007."""
    return int(os.environ.get("BV_PRIME", DEFAULT_PRIME))


@dataclass(frozen=True)
class PrimeField:
    p: int = DEFAULT_PRIME

    def __post_init__(self):
        if not (2 < self.p < 2**31) or not is_prime(self.p):
            raise ValueError(f"modulus must be an odd prime below 2**31, got {self.p}")

    def __call__(self, x: int) -> int:
        return int(x) % self.p

    def inv(self, x: int) -> int:
        x %= self.p
        if x == 0:
            raise ZeroDivisionError("inverse of 0 in F_p")
        return pow(x, -1, self.p)

    def sqrt(self, x: int) -> int | None:
        """Some square root of x, or None if x is a non-residue."""
        return self.root(x, 2)

    def root(self, x: int, k: int) -> int | None:
        """Smallest k-th root of x in [0, p), or None."""
        p = self.p
        x %= p
        if x == 0:
            return 0
        from math import gcd

        g = gcd(k, p - 1)
        if pow(x, (p - 1) // g, p) != 1:
            return None
        if g == 1:
            return pow(x, pow(k, -1, p - 1), p)
        from sympy.ntheory.residue_ntheory import nthroot_mod

        return int(nthroot_mod(x, k, p))

    def is_square(self, x: int) -> bool:
        x %= self.p
        return x == 0 or pow(x, (self.p - 1) // 2, self.p) == 1


class FMatrix:
    """Immutable dense matrix over F_p."""

    __slots__ = ("field", "_a")

    def __init__(self, field: PrimeField | int, entries, shape: tuple[int, int] | None = None):
        if isinstance(field, int):
            field = PrimeField(field)
        a = np.array(entries, dtype=np.int64)
        if shape is not None:
            a = a.reshape(shape)
        if a.ndim != 2:
            if a.size == 0 and shape is None:
                a = a.reshape(0, 0)
            else:
                raise ValueError("FMatrix needs a 2-dimensional array")
        a = np.mod(a, field.p)
        a.setflags(write=False)
        self.field = field
        self._a = a

    @classmethod
    def zeros(cls, field, rows: int, cols: int) -> "FMatrix":
        return cls(field, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, field, n: int) -> "FMatrix":
        return cls(field, np.eye(n, dtype=np.int64))

    @classmethod
    def random(cls, field, rows: int, cols: int, rng: np.random.Generator) -> "FMatrix":
        f = field if isinstance(field, PrimeField) else PrimeField(field)
        return cls(f, rng.integers(0, f.p, size=(rows, cols)))

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._a.shape

    def to_numpy(self) -> np.ndarray:
        return self._a.copy()

    def __getitem__(self, idx):
        return self._a[idx]

    def __eq__(self, other):
        return (
            isinstance(other, FMatrix)
            and self.p == other.p
            and self.shape == other.shape
            and bool(np.array_equal(self._a, other._a))
        )

    def __hash__(self):
        return hash((self.p, self.shape, self._a.tobytes()))

    def __repr__(self):
        return f"FMatrix(p={self.p}, shape={self.shape})"

    def transpose(self) -> "FMatrix":
        return FMatrix(self.field, self._a.T)

    T = property(transpose)

    def __matmul__(self, other: "FMatrix") -> "FMatrix":
        if self.p != other.p:
            raise ValueError("field mismatch")
        return FMatrix(self.field, _matmul_mod(self._a, other._a, self.p))

    def apply(self, v: Sequence[int]) -> np.ndarray:
        """Matrix-vector product, reduced mod p."""
        v = np.mod(np.asarray(v, dtype=np.int64), self.p)
        return _matmul_mod(self._a, v.reshape(-1, 1), self.p).ravel()


def _matmul_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    # Split b into 16-bit halves so partial sums stay below 2**63 for any
    # inner dimension we meet here (p < 2**31).
    if a.shape[1] == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    if a.shape[1] * (p - 1) * (p - 1) < 2**62:
        return (a @ b) % p
    lo = b & 0xFFFF
    hi = b >> 16
    r_lo = _chunked_dot(a, lo, p)
    r_hi = _chunked_dot(a, hi, p)
    return (r_lo + (r_hi * 65536) % p) % p


def _chunked_dot(a, b, p):
    step = max(1, 2**62 // ((p - 1) * 65535 + 1))
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for k in range(0, a.shape[1], step):
        out = (out + a[:, k:k + step] @ b[k:k + step]) % p
    return out


def _rref(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form; pivot = first nonzero row in each column."""
    a = a.copy()
    m, n = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r] = (a[r] * pow(int(a[r, c]), -1, p)) % p
        col = a[:, c].copy()
        col[r] = 0
        rows = np.flatnonzero(col)
        if rows.size:
            a[rows] = (a[rows] - np.outer(col[rows], a[r])) % p
        pivots.append(c)
        r += 1
    return a, pivots


def _dense_rank(a: np.ndarray, p: int) -> int:
    """Forward elimination only; same pivot rule as :func:`_rref`."""
    a = a.copy()
    m, n = a.shape
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r] = (a[r] * pow(int(a[r, c]), -1, p)) % p
        below = r + 1 + np.flatnonzero(a[r + 1:, c])
        if below.size:
            a[below] = (a[below] - np.outer(a[below, c], a[r])) % p
        r += 1
    return r


def _flint_mat(a: np.ndarray, p: int):
    m, n = a.shape
    return flint.nmod_mat(m, n, a.ravel().tolist(), p)


def mat_rank(m: FMatrix, backend: str = "auto") -> int:
    """Rank over F_p.

    ``backend`` is ``"dense"`` (numpy elimination), ``"flint"`` or ``"auto"``.
    """
    a = m._a
    if a.size == 0:
        return 0
    if a.shape[0] > a.shape[1]:
        a = a.T
    if backend == "auto":
        backend = "flint" if flint is not None and a.size >= _FLINT_THRESHOLD else "dense"
    if backend == "flint":
        if flint is None:
            raise RuntimeError("python-flint is not installed")
        return int(_flint_mat(a, m.p).rank())
    if backend != "dense":
        raise ValueError(f"unknown backend {backend!r}")
    return _dense_rank(a, m.p)


def rref(m: FMatrix) -> tuple[FMatrix, list[int]]:
    red, piv = _rref(m._a, m.p)
    return FMatrix(m.field, red), piv


def mat_kernel_basis(m: FMatrix) -> list[np.ndarray]:
    """Basis of the right kernel, one vector per free column of the RREF.

    The basis is canonical: vector k has a 1 in the k-th free column and
    zeros in every other free column.
    """
    p = m.p
    n = m.cols
    if m.rows == 0:
        return [np.eye(n, dtype=np.int64)[i] for i in range(n)]
    red, piv = _rref(m._a, p)
    free = [c for c in range(n) if c not in set(piv)]
    basis = []
    for f in free:
        v = np.zeros(n, dtype=np.int64)
        v[f] = 1
        for r, c in enumerate(piv):
            v[c] = (-red[r, f]) % p
        basis.append(v)
    return basis


def kernel_matrix(m: FMatrix) -> np.ndarray:
    """Kernel basis stacked as rows (shape ``(nullity, cols)``)."""
    ker = mat_kernel_basis(m)
    if not ker:
        return np.zeros((0, m.cols), dtype=np.int64)
    return np.vstack(ker)


class Solver:
    """Coordinates with respect to a fixed linearly independent family.

    Building the solver costs one elimination; each call afterwards is a
    small back-substitution, which is what the multiplication tables need.
    """

    def __init__(self, field: PrimeField | int, basis: Sequence[Sequence[int]] | np.ndarray):
        if isinstance(field, int):
            field = PrimeField(field)
        self.field = field
        b = np.mod(np.asarray(basis, dtype=np.int64), field.p)
        if b.ndim == 1:
            b = b.reshape(0, 0) if b.size == 0 else b.reshape(1, -1)
        self.k, self.n = b.shape
        p = field.p
        # Row reduce [B^T | I]: gives pivot rows of B^T and the transform.
        aug = np.hstack([b.T, np.eye(self.n, dtype=np.int64)]) if self.k else np.eye(self.n, dtype=np.int64)
        red, piv = _rref(aug, p)
        piv = [c for c in piv if c < self.k]
        if len(piv) != self.k:
            raise ValueError("basis vectors are linearly dependent")
        self._transform = red[:, self.k:]
        self._rank = self.k

    def coords(self, vectors: np.ndarray) -> np.ndarray:
        """Coordinates for each row of ``vectors``; raises NotInSpan."""
        p = self.field.p
        v = np.mod(np.atleast_2d(np.asarray(vectors, dtype=np.int64)), p)
        t = _matmul_mod(self._transform, v.T, p)
        if np.any(t[self._rank:]):
            raise NotInSpan("vector is not in the span of the basis")
        return t[: self._rank].T.copy()


def express_in_basis(v: Sequence[int], basis: Sequence[Sequence[int]], field: PrimeField | int) -> np.ndarray:
    """Coordinates c with sum(c_i * basis_i) == v, or raise NotInSpan."""
    if isinstance(field, int):
        field = PrimeField(field)
    v = np.asarray(v, dtype=np.int64)
    if len(basis) == 0:
        if np.any(np.mod(v, field.p)):
            raise NotInSpan("nonzero vector and empty basis")
        return np.zeros(0, dtype=np.int64)
    return Solver(field, basis).coords(v)[0]


def stack(blocks: Iterable[np.ndarray], cols: int) -> np.ndarray:
    rows = [np.atleast_2d(b) for b in blocks]
    if not rows:
        return np.zeros((0, cols), dtype=np.int64)
    return np.vstack(rows)
