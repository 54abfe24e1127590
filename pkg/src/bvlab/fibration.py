"""Section arithmetic on the elliptic K3 with Picard lattice omega(g).

The Mordell-Weil group is infinite cyclic with generator T_1 = 2E + Gamma + eta;
its multiples are T_m = 2m^2 E + Gamma + m eta and Gamma is the zero section.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .counting import divisors, exact_order_points, torsion_points
from .lattice import Lattice, LatticeClass, named_lattice, pair


class GenusMismatch(ValueError):
    pass


class BoundTooSmall(ValueError):
    pass


@dataclass(frozen=True)
class SectionClass:
    g: int
    m: int

    @property
    def lattice(self) -> Lattice:
        return named_lattice("omega", self.g)

    @property
    def cls(self) -> LatticeClass:
        return self.lattice.element(2 * self.m * self.m, 1, self.m)

    def __str__(self):
        return f"T_{self.m} = {self.cls}"


def section_class(g: int, m: int) -> SectionClass:
    if g < 3:
        raise ValueError("genus must be >= 3")
    return SectionClass(g, m)


def _same_genus(a: SectionClass, b: SectionClass):
    if a.g != b.g:
        raise GenusMismatch(f"sections on omega({a.g}) and omega({b.g})")


def mw_add(a: SectionClass, b: SectionClass) -> SectionClass:
    _same_genus(a, b)
    return SectionClass(a.g, a.m + b.m)


def intersect_sections(a: SectionClass, b: SectionClass) -> int:
    _same_genus(a, b)
    return pair(a.cls, b.cls)


def kummer_class(m: int, g: int = 3) -> LatticeClass:
    """2m(m-1)E + (1-m)Gamma + m T_1, checked against T_m."""
    om = named_lattice("omega", g)
    t1 = section_class(g, 1).cls
    cls = 2 * m * (m - 1) * om.E + (1 - m) * om.Gamma + m * t1
    expected = section_class(g, m).cls
    if cls != expected:  # pragma: no cover - would mean the relation is wrong
        raise AssertionError(f"Kummer relation fails for m={m}: {cls} != {expected}")
    return cls


def intersection_table(g: int, m: int) -> dict:
    """Pairings of T_m against E, Gamma, eta, T_1 and itself."""
    om = named_lattice("omega", g)
    t = section_class(g, m)
    t1 = section_class(g, 1)
    return {
        "E": pair(t.cls, om.E),
        "Gamma": pair(t.cls, om.Gamma),
        "eta": pair(t.cls, om.eta),
        "T_1": intersect_sections(t1, t),
        "self": pair(t.cls, t.cls),
    }


def apriori_bounds(target: LatticeClass, nef: LatticeClass) -> list[int] | None:
    """Coordinate bounds for R with R^2 >= -2 and 0 <= R.h <= target.h.

    Needs h^2 > 0 and a hyperbolic lattice, so that h-perp is negative
    definite (Hodge index).  Returns None when no finite bound follows.
    """
    G = np.array(target.lattice.gram, dtype=float)
    h = np.array(nef.coords, dtype=float)
    hh = float(h @ G @ h)
    if hh <= 0:
        return None
    t = float(pair(target, nef))
    if t < 0:
        return [0] * len(h)
    n = len(h)
    # Basis of h-perp and the positive form -G on it.
    gh = G @ h
    _, _, vt = np.linalg.svd(gh.reshape(1, -1))
    perp = vt[1:].T  # columns span h-perp
    B = -(perp.T @ G @ perp)
    if n > 1 and np.min(np.linalg.eigvalsh(B)) <= 0:
        return None
    radius = math.sqrt(2.0 + t * t / hh)
    Binv = np.linalg.inv(B) if n > 1 else np.zeros((0, 0))
    alpha_max = t / hh
    bounds = []
    for j in range(n):
        fj = perp[j, :]
        dual = math.sqrt(max(float(fj @ Binv @ fj), 0.0)) if n > 1 else 0.0
        bounds.append(math.floor(alpha_max * abs(h[j]) + radius * dual + 1e-6) + 1)
    return bounds


def default_bound(target: LatticeClass) -> int:
    return 4 * (max(abs(c) for c in target.coords) + 1)


def decomposition_search(
    target: LatticeClass,
    nef: LatticeClass | Sequence[LatticeClass],
    bound: int | None = None,
) -> list[tuple[LatticeClass, LatticeClass]]:
    """Candidate splittings target = R + (target - R) passing the effectivity sieve.

    Both parts must have square >= -2 and nonnegative pairing with every
    supplied nef class; R = 0 and R = target are excluded and each unordered
    pair appears once.  An empty list certifies that the sieve admits no
    decomposition.  A nonempty list only names candidates.
    """
    nefs = [nef] if isinstance(nef, LatticeClass) else list(nef)
    if bound is None:
        bound = default_bound(target)
    n = target.lattice.rank
    lo, hi = [-bound] * n, [bound] * n
    for h in nefs:
        b = apriori_bounds(target, h)
        if b is None:
            continue
        if any(x > bound for x in b):
            raise BoundTooSmall(f"a-priori coefficient bounds {b} exceed bound={bound}")
        lo = [max(l, -x) for l, x in zip(lo, b)]
        hi = [min(u, x) for u, x in zip(hi, b)]

    G = np.array(target.lattice.gram, dtype=np.int64)
    T = np.array(target.coords, dtype=np.int64)
    axes = [np.arange(l, u + 1, dtype=np.int64) for l, u in zip(lo, hi)]
    R = np.stack([a.ravel() for a in np.meshgrid(*axes, indexing="ij")], axis=1)
    S = T - R
    keep = np.einsum("ij,jk,ik->i", R, G, R) >= -2
    keep &= np.einsum("ij,jk,ik->i", S, G, S) >= -2
    for h in nefs:
        gh = G @ np.array(h.coords, dtype=np.int64)
        keep &= R @ gh >= 0
        keep &= S @ gh >= 0
    keep &= np.any(R != 0, axis=1) & np.any(S != 0, axis=1)
    out = []
    seen = set()
    for r in R[keep]:
        r = tuple(int(x) for x in r)
        s = tuple(int(a - b) for a, b in zip(target.coords, r))
        key = min(r, s), max(r, s)
        if key in seen:
            continue
        seen.add(key)
        out.append((target.lattice.element(*key[0]), target.lattice.element(*key[1])))
    return out


@dataclass(frozen=True)
class TorsionFiberModel:
    """Points of T_l meet Gamma, grouped by the exact order of eta on the fibre."""

    level: int
    exact_order_counts: dict

    def check(self) -> bool:
        f = self.exact_order_counts
        if f.get(1, 0) != 0:
            return False
        for d in divisors(self.level):
            if sum(f.get(e, 0) for e in divisors(d)) != torsion_points(d):
                return False
        return True

    @property
    def total(self) -> int:
        return sum(self.exact_order_counts.values())


def fiber_torsion_model(level: int) -> TorsionFiberModel:
    if level < 2:
        raise ValueError("level must be >= 2")
    f = {d: k for d, k in exact_order_points(level).items() if d > 1}
    return TorsionFiberModel(level, f)


def mukai_moduli_dim(g: int) -> int:
    """Dimension v^2 + 2 of the moduli of sheaves with Mukai vector (0, H, *), H^2 = 2g - 2."""
    if g < 2:
        raise ValueError("genus must be >= 2")
    return (2 * g - 2) + 2


__all__ = [
    "BoundTooSmall",
    "GenusMismatch",
    "SectionClass",
    "TorsionFiberModel",
    "apriori_bounds",
    "decomposition_search",
    "fiber_torsion_model",
    "intersect_sections",
    "intersection_table",
    "kummer_class",
    "mukai_moduli_dim",
    "mw_add",
    "section_class",
]
