"""Integral lattices with ordered bases.

The named lattices are the rank-2 Barth-Verra lattice ``upsilon`` on (L, eta),
the rank-3 elliptic lattice ``omega`` on (E, Gamma, eta) and the rank-3
hyperelliptic lattice on (L, eta, E).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence


class LatticeError(ValueError):
    pass


class UnknownName(LatticeError):
    pass


class ParameterOutOfRange(LatticeError):
    pass


class LatticeMismatch(LatticeError):
    pass


class NotAnEmbedding(LatticeError):
    pass


class DegenerateLattice(LatticeError):
    pass


def _as_matrix(rows) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(x) for x in row) for row in rows)


@dataclass(frozen=True)
class Lattice:
    basis_labels: tuple[str, ...]
    gram: tuple[tuple[int, ...], ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "basis_labels", tuple(self.basis_labels))
        object.__setattr__(self, "gram", _as_matrix(self.gram))
        n = len(self.basis_labels)
        if len(self.gram) != n or any(len(r) != n for r in self.gram):
            raise LatticeError("Gram matrix size does not match the basis")
        for i in range(n):
            for j in range(i):
                if self.gram[i][j] != self.gram[j][i]:
                    raise LatticeError("Gram matrix is not symmetric")

    @property
    def rank(self) -> int:
        return len(self.basis_labels)

    @property
    def is_even(self) -> bool:
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    def __getattr__(self, label):
        # lattice.E, lattice.Gamma, ... for basis vectors
        labels = object.__getattribute__(self, "basis_labels")
        if label in labels:
            return self.basis_vector(label)
        raise AttributeError(label)

    def basis_vector(self, label: str) -> "LatticeClass":
        i = self.basis_labels.index(label)
        return LatticeClass(self, tuple(int(k == i) for k in range(self.rank)))

    def element(self, *coords: int, **named: int) -> "LatticeClass":
        if named:
            if coords:
                raise TypeError("give coordinates either positionally or by label")
            unknown = set(named) - set(self.basis_labels)
            if unknown:
                raise LatticeError(f"unknown basis labels {sorted(unknown)}")
            coords = tuple(named.get(lab, 0) for lab in self.basis_labels)
        return LatticeClass(self, tuple(coords))

    def zero(self) -> "LatticeClass":
        return LatticeClass(self, (0,) * self.rank)

    def to_dict(self) -> dict:
        return {"name": self.name, "basis": list(self.basis_labels), "gram": [list(r) for r in self.gram]}


@dataclass(frozen=True)
class LatticeClass:
    lattice: Lattice
    coords: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))
        if len(self.coords) != self.lattice.rank:
            raise LatticeError("coordinate vector has the wrong length")

    def _check(self, other: "LatticeClass"):
        if not isinstance(other, LatticeClass):
            return NotImplemented
        if other.lattice != self.lattice:
            raise LatticeMismatch("classes live in different lattices")

    def __add__(self, other):
        self._check(other)
        return LatticeClass(self.lattice, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        self._check(other)
        return LatticeClass(self.lattice, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        return LatticeClass(self.lattice, tuple(-a for a in self.coords))

    def __mul__(self, k: int):
        return LatticeClass(self.lattice, tuple(k * a for a in self.coords))

    __rmul__ = __mul__

    def __matmul__(self, other):
        return pair(self, other)

    def square(self) -> int:
        return pair(self, self)

    def __str__(self):
        terms = []
        for c, lab in zip(self.coords, self.lattice.basis_labels):
            if c == 0:
                continue
            coef = "" if c == 1 else "-" if c == -1 else str(c)
            terms.append(f"{coef}{lab}")
        return " + ".join(terms).replace("+ -", "- ") if terms else "0"


def named_lattice(name: str, g_or_i: int) -> Lattice:
    """Named lattices: ``upsilon`` (g), ``omega`` (g), ``hyperelliptic`` (i)."""
    if name == "upsilon":
        g = g_or_i
        if g < 3:
            raise ParameterOutOfRange("upsilon needs g >= 3")
        return Lattice(("L", "eta"), ((2 * g - 2, 0), (0, -4)), name=f"upsilon({g})")
    if name == "omega":
        g = g_or_i
        if g < 3:
            raise ParameterOutOfRange("omega needs g >= 3")
        # the Gram matrix does not depend on g; g only enters through L = Gamma + gE
        return Lattice(("E", "Gamma", "eta"), ((0, 1, 0), (1, -2, 0), (0, 0, -4)), name=f"omega({g})")
    if name == "hyperelliptic":
        i = g_or_i
        if i < 1:
            raise ParameterOutOfRange("hyperelliptic needs i >= 1")
        return Lattice(
            ("L", "eta", "E"),
            ((4 * i + 8, 0, 2), (0, -4, 0), (2, 0, 0)),
            name=f"hyperelliptic({i})",
        )
    raise UnknownName(f"unknown lattice {name!r}")


def pair(x: LatticeClass, y: LatticeClass) -> int:
    if x.lattice != y.lattice:
        raise LatticeMismatch("classes live in different lattices")
    G = x.lattice.gram
    n = len(G)
    return sum(x.coords[i] * G[i][j] * y.coords[j] for i in range(n) for j in range(n))


def det(matrix: Sequence[Sequence[int]]) -> int:
    """Integer determinant by fraction-free Bareiss elimination."""
    a = [list(map(int, r)) for r in matrix]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def discriminant(l: Lattice) -> int:
    return det(l.gram)


def signature(l: Lattice) -> tuple[int, int]:
    """(positives, negatives) by exact symmetric elimination over Q."""
    a = [[Fraction(x) for x in row] for row in l.gram]
    n = len(a)
    pos = neg = 0
    for k in range(n):
        if a[k][k] == 0:
            # Pick up a nonzero diagonal by a congruence x_k += x_j.
            j = next((j for j in range(k + 1, n) if a[j][j] != 0), None)
            if j is not None:
                a[k], a[j] = a[j], a[k]
                for row in a:
                    row[k], row[j] = row[j], row[k]
            else:
                j = next((j for j in range(k + 1, n) if a[k][j] != 0), None)
                if j is None:
                    raise DegenerateLattice("Gram matrix is singular")
                for c in range(n):
                    a[k][c] += a[j][c]
                for r in range(n):
                    a[r][k] += a[r][j]
        piv = a[k][k]
        for i in range(k + 1, n):
            f = a[i][k] / piv
            if f:
                for j in range(k, n):
                    a[i][j] -= f * a[k][j]
                for r in range(k, n):
                    a[r][i] -= f * a[r][k]
        if piv > 0:
            pos += 1
        else:
            neg += 1
    return pos, neg


def even_unimodular_obstruction(sig: tuple[int, int]) -> bool:
    """True when no even unimodular lattice of this signature can exist.

    Even unimodular lattices have signature divisible by 8.
    """
    positives, negatives = sig
    return (positives - negatives) % 8 != 0


def elementary_divisors(matrix: Sequence[Sequence[int]]) -> list[int]:
    """Nonzero diagonal of the Smith normal form, in divisibility order."""
    a = [list(map(int, r)) for r in matrix]
    m = len(a)
    n = len(a[0]) if m else 0
    divisors = []
    t = 0
    while t < min(m, n):
        entries = [(abs(a[i][j]), i, j) for i in range(t, m) for j in range(t, n) if a[i][j]]
        if not entries:
            break
        _, i, j = min(entries)
        a[t], a[i] = a[i], a[t]
        for row in a:
            row[t], row[j] = row[j], row[t]
        while True:
            done = True
            for i in range(t + 1, m):
                q = a[i][t] // a[t][t]
                if q:
                    for c in range(t, n):
                        a[i][c] -= q * a[t][c]
                if a[i][t]:
                    done = False
                    a[t], a[i] = a[i], a[t]
            for j in range(t + 1, n):
                q = a[t][j] // a[t][t]
                if q:
                    for r in range(t, m):
                        a[r][j] -= q * a[r][t]
                if a[t][j]:
                    done = False
                    for row in a:
                        row[t], row[j] = row[j], row[t]
            if not done:
                continue
            # the pivot must also divide the whole remaining block
            bad = next(
                ((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if a[i][j] % a[t][t]),
                None,
            )
            if bad is None:
                break
            for c in range(t, n):
                a[t][c] += a[bad[0]][c]
        divisors.append(abs(a[t][t]))
        t += 1
    return divisors


@dataclass(frozen=True)
class LatticeEmbedding:
    """Map ``source -> target``; column k holds the image of source basis vector k."""

    source: Lattice
    target: Lattice
    matrix: tuple[tuple[int, ...], ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "matrix", _as_matrix(self.matrix))
        if len(self.matrix) != self.target.rank or any(len(r) != self.source.rank for r in self.matrix):
            raise NotAnEmbedding("matrix shape must be (target rank, source rank)")

    @classmethod
    def from_images(cls, source: Lattice, images: Sequence[LatticeClass], name: str = ""):
        target = images[0].lattice
        cols = [img.coords for img in images]
        rows = tuple(tuple(col[r] for col in cols) for r in range(target.rank))
        return cls(source, target, rows, name=name)

    def __call__(self, x: LatticeClass) -> LatticeClass:
        if x.lattice != self.source:
            raise LatticeMismatch("class is not in the source lattice")
        M = self.matrix
        return LatticeClass(
            self.target,
            tuple(sum(M[r][c] * x.coords[c] for c in range(self.source.rank)) for r in range(self.target.rank)),
        )

    def preserves_pairing(self) -> bool:
        s = self.source
        for i, j in product(range(s.rank), repeat=2):
            xi = self(s.basis_vector(s.basis_labels[i]))
            xj = self(s.basis_vector(s.basis_labels[j]))
            if pair(xi, xj) != s.gram[i][j]:
                return False
        return True


def is_primitive(e: LatticeEmbedding) -> bool:
    """Torsion-free cokernel, certified by unit elementary divisors."""
    if not e.preserves_pairing():
        raise NotAnEmbedding("the map does not preserve the pairing")
    divs = elementary_divisors(e.matrix)
    if len(divs) != e.source.rank:
        raise NotAnEmbedding("the map is not injective")
    return all(d == 1 for d in divs)


def discriminant_certificate(source: Lattice) -> bool:
    """Primitivity of ``source`` inside *any* even lattice, from its discriminant.

    If the image has index k in its saturation, the saturation has
    discriminant disc/k^2 and the same signature.  The certificate holds when
    every k > 1 leads to a unimodular even lattice that the mod-8 rule
    forbids.  Returns False when the argument is inconclusive.
    """
    d = discriminant(source)
    sig = signature(source)
    k = 2
    while k * k <= abs(d):
        if d % (k * k) == 0:
            if abs(d // (k * k)) != 1 or not even_unimodular_obstruction(sig):
                return False
        k += 1
    return True


def upsilon_to_omega(g: int) -> LatticeEmbedding:
    """L -> Gamma + gE, eta -> eta."""
    up, om = named_lattice("upsilon", g), named_lattice("omega", g)
    return LatticeEmbedding.from_images(up, [om.Gamma + g * om.E, om.eta], name="upsilon-omega")


def upsilon_to_hyperelliptic(i: int) -> LatticeEmbedding:
    """L -> L, eta -> eta, for g = 2i + 5."""
    up, hy = named_lattice("upsilon", 2 * i + 5), named_lattice("hyperelliptic", i)
    return LatticeEmbedding.from_images(up, [hy.L, hy.eta], name="upsilon-hyperelliptic")


def kummer_section_lattice() -> Lattice:
    """Span of E, Gamma, T_1 in the Kummer surface's Picard group."""
    # T_1 is a section (T_1.E = 1, T_1^2 = -2) disjoint from Gamma.
    return Lattice(("E", "Gamma", "T1"), ((0, 1, 1), (1, -2, 0), (1, 0, -2)), name="kummer-span")


def omega_to_kummer(g: int) -> LatticeEmbedding:
    """E -> E, Gamma -> Gamma, eta -> T_1 - 2E - Gamma."""
    om, ku = named_lattice("omega", g), kummer_section_lattice()
    return LatticeEmbedding.from_images(om, [ku.E, ku.Gamma, ku.T1 - 2 * ku.E - ku.Gamma], name="omega-kummer")


def orthogonal_sum(a: Lattice, b: Lattice) -> Lattice:
    n, m = a.rank, b.rank
    gram = [list(r) + [0] * m for r in a.gram] + [[0] * n + list(r) for r in b.gram]
    labels = tuple(f"a.{x}" for x in a.basis_labels) + tuple(f"b.{x}" for x in b.basis_labels)
    return Lattice(labels, gram)
