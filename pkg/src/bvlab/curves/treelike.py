"""The tree-like curve C = Gamma + E_1 + ... + E_g.

Gamma is a projective line with marked points u_1..u_g; E_i is an elliptic
curve glued to Gamma at its point z_i.  The paracanonical bundle H_C has
degree g - 2 on Gamma and is O(w_i) on E_i, where w_i = z_i + t_i for a point
t_i of exact order d_i; eta_C is trivial on Gamma and O(w_i - z_i) on E_i.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from math import lcm

import numpy as np

from ..ffield import PrimeField, Solver
from .elliptic import ECPoint, EllipticCurve, ec_with_torsion
from .riemann_roch import DivisorE, RRSpace, multiply, rr_space
from .sections import DegenerateConfiguration, NodalModel

MAX_DEGREE = 4


@dataclass(frozen=True)
class EllipticTail:
    curve: EllipticCurve
    torsion: ECPoint  # t_i
    node: ECPoint  # z_i
    spine_point: int  # u_i
    order: int

    @property
    def bundle_point(self) -> ECPoint:  # w_i
        return self.curve.add(self.node, self.torsion)


class TreelikeModel(NodalModel):
    kind = "treelike"

    def __init__(self, genus: int, prime: int, tails: list[EllipticTail], seed: int | None = None):
        if len(tails) != genus:
            raise ValueError("need one elliptic tail per unit of genus")
        self.genus = genus
        self.prime = prime
        self.field = PrimeField(prime)
        self.tails = tuple(tails)
        self.seed = seed
        self._validate()
        self._rr: dict[tuple[int, int], RRSpace] = {}
        self._solvers: dict[tuple[int, int], Solver] = {}

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(t.order for t in self.tails)

    @property
    def level(self) -> int:
        return lcm(*self.orders)

    @property
    def nodes(self) -> int:
        return len(self.tails)

    def node_is_disconnecting(self, i: int) -> bool:
        # the dual graph is a star on Gamma: removing any edge isolates E_i
        return 0 <= i < self.nodes

    def eta_order(self) -> int:
        """Order of eta_C: lcm over the tails of the order of w_i - z_i."""
        orders = []
        for t in self.tails:
            E = t.curve
            diff = E.sub(t.bundle_point, t.node)
            orders.append(E.order_of(diff, t.order))
        return lcm(*orders)

    def degrees(self) -> dict:
        return {"spine": self.genus - 2, "tails": [1] * self.genus, "total": 2 * self.genus - 2}

    def _validate(self):
        us = [t.spine_point for t in self.tails]
        if len(set(us)) != len(us):
            raise DegenerateConfiguration("coincident spine points")
        for t in self.tails:
            E = t.curve
            w = t.bundle_point
            if t.order < 2:
                raise DegenerateConfiguration("eta must be nontrivial on every tail")
            if not E.has_exact_order(t.torsion, t.order):
                raise DegenerateConfiguration("torsion point has the wrong order")
            if w.is_infinity or t.node.is_infinity or w == t.node:
                raise DegenerateConfiguration("w_i = z_i or a point at infinity")
            if w.y == 0 or t.node == E.neg(w):
                raise DegenerateConfiguration("w_i is 2-torsion or z_i = -w_i")

    def rr(self, i: int, q: int) -> RRSpace:
        key = (i, q)
        if key not in self._rr:
            t = self.tails[i]
            self._rr[key] = rr_space(t.curve, DivisorE.of((t.bundle_point, q)))
        return self._rr[key]

    def _solver(self, i: int, q: int) -> Solver:
        if (i, q) not in self._solvers:
            self._solvers[(i, q)] = Solver(self.prime, self.rr(i, q).numerators)
        return self._solvers[(i, q)]

    def _layout(self, q: int) -> list[int]:
        sizes = [q * (self.genus - 2) + 1] + [self.rr(i, q).dimension for i in range(self.genus)]
        return list(np.cumsum([0] + sizes))

    def ambient_dim(self, q: int) -> int:
        return self._layout(q)[-1]

    def unit(self) -> np.ndarray:
        # spine constant 1, every tail constant 1 (L(0) = constants)
        return np.ones(1 + self.genus, dtype=np.int64)

    def gluing_matrix(self, q: int) -> np.ndarray:
        p = self.prime
        off = self._layout(q)
        M = np.zeros((self.genus, off[-1]), dtype=np.int64)
        for i, t in enumerate(self.tails):
            u = t.spine_point
            M[i, : off[1]] = [pow(u, k, p) for k in range(off[1])]
            M[i, off[i + 1]: off[i + 2]] = (-self.rr(i, q).evaluation_row(t.node)) % p
        return M

    def _split(self, q: int, v: np.ndarray) -> list[np.ndarray]:
        off = self._layout(q) if q else list(range(self.genus + 2))
        return [v[off[k]: off[k + 1]] for k in range(self.genus + 1)]

    def multiply(self, q1, u, q2, v):
        p = self.prime
        q = q1 + q2
        if q > MAX_DEGREE:
            raise ValueError("degree too large")
        if q1 == 0 or q2 == 0:
            c, w, qw = (u, v, q2) if q1 == 0 else (v, u, q1)
            parts = self._split(qw, w)
            return np.concatenate([(int(c[k]) * parts[k]) % p for k in range(self.genus + 1)])
        pu, pv = self._split(q1, u), self._split(q2, v)
        spine = np.convolve(pu[0], pv[0]) % p
        out = [spine]
        for i in range(self.genus):
            A, B, T = self.rr(i, q1), self.rr(i, q2), self.rr(i, q)
            fu = (pu[i + 1] @ A.numerators) % p
            fv = (pv[i + 1] @ B.numerators) % p
            prod = multiply(self.tails[i].curve, fu, fv, T.pole_bound + 1)
            out.append(self._solver(i, q).coords(prod)[0])
        return np.concatenate(out) % p

    def manifest(self) -> dict:
        return {
            "kind": self.kind,
            "genus": self.genus,
            "level": self.level,
            "prime": self.prime,
            "seed": self.seed,
            "orders": list(self.orders),
            "components": [
                {
                    "a": t.curve.a,
                    "b": t.curve.b,
                    "t": t.torsion.to_json(),
                    "z": t.node.to_json(),
                    "u": t.spine_point,
                    "order": t.order,
                }
                for t in self.tails
            ],
        }

    @classmethod
    def from_manifest(cls, data: dict) -> "TreelikeModel":
        F = PrimeField(int(data["prime"]))
        tails = []
        for c in data["components"]:
            E = EllipticCurve(F, int(c["a"]), int(c["b"]))
            tails.append(
                EllipticTail(E, ECPoint.from_json(c["t"]), ECPoint.from_json(c["z"]), int(c["u"]), int(c["order"]))
            )
        return cls(int(data["genus"]), F.p, tails, seed=data.get("seed"))


def build_treelike_model(g: int, orders, p: int, seed: int, retries: int = 20) -> TreelikeModel:
    """Sample a tree-like model; degenerate draws are re-seeded with seed + 1, ..."""
    if g < 3:
        raise ValueError("genus must be >= 3")
    orders = tuple(int(d) for d in orders)
    if len(orders) != g or any(d < 2 for d in orders):
        raise ValueError("need g orders, each >= 2")
    last = None
    for attempt in range(retries):
        s = seed + attempt
        rng = random.Random(f"treelike:{g}:{p}:{s}")
        us = rng.sample(range(p), g)
        tails = []
        try:
            for i, d in enumerate(orders):
                E, t = ec_with_torsion(p, d, seed=s * 1009 + i)
                z = E.random_point(rng)
                tails.append(EllipticTail(E, t, z, us[i], d))
            return TreelikeModel(g, p, tails, seed=s)
        except DegenerateConfiguration as exc:
            last = exc
    raise DegenerateConfiguration(f"no valid configuration after {retries} seeds: {last}")
