"""Global sections of H_C^q on a nodal model and the multiplication tables."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..ffield import FMatrix, PrimeField, Solver, kernel_matrix


class DimensionMismatch(RuntimeError):
    pass


class DegenerateConfiguration(RuntimeError):
    pass


def expected_h0(g: int, q: int) -> int:
    """h^0(C, q H_C) for a non-special bundle of degree 2g - 2 (q = 1: g - 1)."""
    if q == 0:
        return 1
    if q == 1:
        return g - 1
    return q * (2 * g - 2) - g + 1


class NodalModel:
    """Interface shared by the curve models.

    A model describes H^0(C, qH_C) as the kernel of a gluing matrix on an
    ambient space of sections over the normalisation, and knows how to
    multiply ambient vectors.
    """

    genus: int
    prime: int

    def ambient_dim(self, q: int) -> int:
        raise NotImplementedError

    def gluing_matrix(self, q: int) -> np.ndarray:
        raise NotImplementedError

    def multiply(self, q1: int, u: np.ndarray, q2: int, v: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def unit(self) -> np.ndarray:
        """The constant section 1 in degree 0."""
        raise NotImplementedError

    def manifest(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class SectionBasis:
    degree: int
    basis: np.ndarray  # rows: sections in ambient coordinates
    node_values: np.ndarray  # gluing matrix applied to the basis (all zero)

    @property
    def dimension(self) -> int:
        return self.basis.shape[0]


def global_sections(model: NodalModel, q: int, check: bool = True) -> SectionBasis:
    if not 0 <= q <= 4:
        raise ValueError("only degrees 0..4 are built")
    if q == 0:
        b = model.unit().reshape(1, -1)
        return SectionBasis(0, b, np.zeros((0, 1), dtype=np.int64))
    G = model.gluing_matrix(q)
    if G.shape[0] == 0:
        basis = np.eye(model.ambient_dim(q), dtype=np.int64)
    else:
        basis = kernel_matrix(FMatrix(model.prime, G))
    if check and basis.shape[0] != expected_h0(model.genus, q):
        raise DimensionMismatch(
            f"h0(qH) = {basis.shape[0]} in degree {q}, expected {expected_h0(model.genus, q)}"
        )
    node_values = (G @ basis.T) % model.prime if G.shape[0] else np.zeros((0, basis.shape[0]), dtype=np.int64)
    return SectionBasis(q, basis, node_values)


def multiplication_tensor(model: NodalModel, left: SectionBasis, right: SectionBasis, target: SectionBasis) -> np.ndarray:
    """T[i, j] = coordinates of left_i * right_j in the target basis.

    Raises NotInSpan when a product leaves H^0 of the target degree.
    """
    solver = Solver(model.prime, target.basis)
    products = np.array(
        [
            model.multiply(left.degree, u, right.degree, v)
            for u in left.basis
            for v in right.basis
        ],
        dtype=np.int64,
    ).reshape(left.dimension * right.dimension, -1)
    coords = solver.coords(products) if products.size else np.zeros((0, target.dimension), dtype=np.int64)
    return coords.reshape(left.dimension, right.dimension, target.dimension)


def section_ring(model: NodalModel, top: int = 3):
    """Truncated section ring R_0..R_top of H_C with its multiplication tensors."""
    from ..koszul import GradedRingData

    R = [global_sections(model, q) for q in range(top + 1)]
    mu = {q: multiplication_tensor(model, R[1], R[q], R[q + 1]) for q in range(1, top)}
    return GradedRingData(PrimeField(model.prime), tuple(r.dimension for r in R), mu, label=getattr(model, "kind", ""))
