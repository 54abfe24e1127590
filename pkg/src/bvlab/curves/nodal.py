"""An irreducible curve of arithmetic genus g with g - 1 nodes on an elliptic normalisation.

Let nu: E -> C glue p_j to q_j (j = 1..g-1) and let eta be the torsion bundle
with nu^* eta = O(t - O) for a point t of exact order l.  When
sum(p_j + q_j) + t = O, the pullback of H = omega_C + eta is O(d.O) with
d = 2g - 2, trivialised by the function G whose divisor is
sum(p_j + q_j) + t - (d + 1).O.  A section of qH is then a function P in
L(q d.O) with

    P(q_j) = Lambda_j^q P(p_j),   Lambda_j = -c_j DG(q_j) / DG(p_j),

where DG = dG / omega_0 and c_j is the gluing constant of eta at the j-th
node, pinned down by c_j^l = f_l(p_j) / f_l(q_j) for the Miller function f_l.
With l = 1 (t = O, c_j = 1) the same recipe gives the canonical ring.
"""
from __future__ import annotations

import random

import numpy as np

from ..ffield import PrimeField
from .elliptic import INFINITY, ECPoint, EllipticCurve, ec_with_torsion
from .riemann_roch import DivisorE, derivation, evaluate, evaluation_matrix, multiply, rr_space
from .sections import DegenerateConfiguration, NodalModel

MAX_DEGREE = 4


class IrreducibleNodalModel(NodalModel):
    kind = "nodal"

    def __init__(
        self,
        genus: int,
        curve: EllipticCurve,
        torsion: ECPoint,
        level: int,
        pairs: list[tuple[ECPoint, ECPoint]],
        gluing: list[int] | None = None,
        seed: int | None = None,
    ):
        if genus < 3:
            raise ValueError("genus must be >= 3")
        if len(pairs) != genus - 1:
            raise ValueError("need g - 1 node pairs")
        self.genus = genus
        self.curve = curve
        self.prime = curve.p
        self.field = curve.field
        self.torsion = torsion
        self.level = level
        self.pairs = tuple(pairs)
        self.seed = seed
        self.d = 2 * genus - 2
        self._validate()
        self.G = self._trivialising_function()
        self.gluing = tuple(gluing) if gluing is not None else self._gluing_constants()
        self._check_gluing()
        self.multipliers = self._multipliers()

    @property
    def nodes(self) -> int:
        return len(self.pairs)

    def node_is_disconnecting(self, i: int) -> bool:
        return False  # one component: every node is non-separating

    def _points(self) -> list[ECPoint]:
        return [P for pq in self.pairs for P in pq]

    def _validate(self):
        E, t, l = self.curve, self.torsion, self.level
        if l < 1 or not E.has_exact_order(t, l):
            raise DegenerateConfiguration("t does not have the stated order")
        pts = self._points()
        if len(set(pts)) != len(pts) or any(P.is_infinity for P in pts):
            raise DegenerateConfiguration("node points must be distinct and finite")
        multiples = {E.mul(k, t) for k in range(l)}
        if any(P in multiples for P in pts):
            raise DegenerateConfiguration("a node point is a multiple of t")
        if not E.sum(pts + [t]).is_infinity:
            raise DegenerateConfiguration("node points do not satisfy sum(p + q) + t = O")

    def _trivialising_function(self) -> np.ndarray:
        E = self.curve
        D = DivisorE.of((INFINITY, self.d + 1), *[(P, -1) for P in self._points()])
        if not self.torsion.is_infinity:
            D = D - DivisorE.of((self.torsion, 1))
        space = rr_space(E, D)
        if space.dimension != 1 or space.denominator:
            raise DegenerateConfiguration("the trivialising function is not unique")
        return space.numerators[0]

    def _gluing_constants(self) -> tuple[int, ...]:
        if self.level == 1:
            return (1,) * self.nodes
        E, F = self.curve, self.field
        out = []
        for P, Q in self.pairs:
            ratio = E.miller(self.level, self.torsion, P) * F.inv(E.miller(self.level, self.torsion, Q)) % F.p
            c = F.root(ratio, self.level)
            if c is None:
                raise DegenerateConfiguration("gluing constant has no l-th root in F_p")
            out.append(c)
        return tuple(out)

    def _check_gluing(self):
        E, F, l = self.curve, self.field, self.level
        for (P, Q), c in zip(self.pairs, self.gluing):
            if l == 1:
                ok = c % F.p == 1
            else:
                ok = pow(c, l, F.p) * E.miller(l, self.torsion, Q) % F.p == E.miller(l, self.torsion, P)
            if not ok:
                raise DegenerateConfiguration("gluing constants do not make eta^l trivial")

    def _multipliers(self) -> tuple[int, ...]:
        E, F = self.curve, self.field
        dG = derivation(E, self.G, self.d + 3)
        out = []
        for (P, Q), c in zip(self.pairs, self.gluing):
            gp, gq = evaluate(E, dG, P), evaluate(E, dG, Q)
            if gp == 0 or gq == 0:
                raise DegenerateConfiguration("dG vanishes at a node point")
            out.append((-c * gq * F.inv(gp)) % F.p)
        return tuple(out)

    def eta_order(self) -> int:
        """Order of eta: the order of t, confirmed against the gluing data."""
        E = self.curve
        return E.order_of(self.torsion, self.level) if self.level > 1 else 1

    def degrees(self) -> dict:
        return {"normalisation": self.d, "total": self.d}

    def ambient_dim(self, q: int) -> int:
        return q * self.d + 1

    def unit(self) -> np.ndarray:
        return np.ones(1, dtype=np.int64)

    def gluing_matrix(self, q: int) -> np.ndarray:
        p = self.prime
        n = q * self.d
        Ep = evaluation_matrix(self.curve, n, [P for P, _ in self.pairs])
        Eq = evaluation_matrix(self.curve, n, [Q for _, Q in self.pairs])
        lam = np.array([pow(m, q, p) for m in self.multipliers], dtype=np.int64).reshape(-1, 1)
        rows = (Eq - (lam * Ep) % p) % p
        slot1 = np.zeros((1, n + 1), dtype=np.int64)
        slot1[0, 1] = 1
        return np.vstack([slot1, rows])

    def multiply(self, q1, u, q2, v):
        p = self.prime
        q = q1 + q2
        if q > MAX_DEGREE:
            raise ValueError("degree too large")
        if q1 == 0:
            return (int(u[0]) * np.asarray(v)) % p
        if q2 == 0:
            return (int(v[0]) * np.asarray(u)) % p
        return multiply(self.curve, np.asarray(u), np.asarray(v), q * self.d + 1)

    def manifest(self) -> dict:
        return {
            "kind": self.kind,
            "genus": self.genus,
            "level": self.level,
            "prime": self.prime,
            "seed": self.seed,
            "curve": {"a": self.curve.a, "b": self.curve.b},
            "t": self.torsion.to_json(),
            "pairs": [[P.to_json(), Q.to_json()] for P, Q in self.pairs],
            "gluing": list(self.gluing),
        }

    @classmethod
    def from_manifest(cls, data: dict) -> "IrreducibleNodalModel":
        F = PrimeField(int(data["prime"]))
        E = EllipticCurve(F, int(data["curve"]["a"]), int(data["curve"]["b"]))
        pairs = [(ECPoint.from_json(a), ECPoint.from_json(b)) for a, b in data["pairs"]]
        return cls(
            int(data["genus"]),
            E,
            ECPoint.from_json(data["t"]),
            int(data["level"]),
            pairs,
            gluing=[int(c) for c in data["gluing"]],
            seed=data.get("seed"),
        )


def _has_gluing_root(E: EllipticCurve, t: ECPoint, level: int, P: ECPoint, Q: ECPoint) -> bool:
    """Whether the pair (P, Q) admits a gluing constant for eta over F_p."""
    if level == 1:
        return True
    F = E.field
    try:
        ratio = E.miller(level, t, P) * F.inv(E.miller(level, t, Q)) % F.p
    except ZeroDivisionError:
        return False
    return F.root(ratio, level) is not None


def _sample(g: int, level: int, p: int, s: int, tries: int = 200) -> IrreducibleNodalModel:
    rng = random.Random(f"nodal:{g}:{level}:{p}:{s}")
    if level == 1:
        E, _ = ec_with_torsion(p, 2, seed=s)
        t = INFINITY
    else:
        E, t = ec_with_torsion(p, level, seed=s)
    # each pair is redrawn until eta can be glued over F_p at that node;
    # the last q is forced by sum(p_j + q_j) + t = O
    pairs: list[tuple[ECPoint, ECPoint]] = []
    for j in range(g - 1):
        for _ in range(tries):
            P = E.random_point(rng)
            if j < g - 2:
                Q = E.random_point(rng)
            else:
                Q = E.neg(E.sum([x for pq in pairs for x in pq] + [P, t]))
            if Q.is_infinity or P == Q:
                continue
            if _has_gluing_root(E, t, level, P, Q):
                pairs.append((P, Q))
                break
        else:
            raise DegenerateConfiguration("no node pair admits a gluing constant")
    return IrreducibleNodalModel(g, E, t, level, pairs, seed=s)


def build_nodal_model(g: int, level: int, p: int, seed: int, retries: int = 20) -> IrreducibleNodalModel:
    """Sample the irreducible model; degenerate draws are re-seeded with seed + 1, ..."""
    if g < 3:
        raise ValueError("genus must be >= 3")
    if level < 1:
        raise ValueError("level must be >= 1")
    last = None
    for attempt in range(retries):
        try:
            return _sample(g, level, p, seed + attempt)
        except (DegenerateConfiguration, ZeroDivisionError) as exc:
            last = exc
    raise DegenerateConfiguration(f"no valid configuration after {retries} seeds: {last}")
