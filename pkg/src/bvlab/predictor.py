"""Closed-form Betti tables for paracanonical curves, slope arithmetic, and verdicts."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .koszul import UNKNOWN, BettiTable
from .lattice import named_lattice, pair


class NonIntegralFormula(ArithmeticError):
    pass


class RangeMismatch(ValueError):
    pass


class Verdict(str, enum.Enum):
    MATCH = "MATCH"
    JUMPED = "JUMPED"
    VIOLATION = "VIOLATION"


@dataclass
class PredictedTable:
    genus: int
    parity: str
    table: BettiTable

    @property
    def i(self) -> int:
        return (self.genus - 5) // 2 if self.parity == "odd" else (self.genus - 6) // 2

    def __getitem__(self, key):
        return self.table[key]

    def unknown_cells(self) -> list[tuple[int, int]]:
        return sorted(k for k, v in self.table.entries.items() if v is UNKNOWN)


def _integer(x: Fraction, where: str) -> int:
    if x.denominator != 1:
        raise NonIntegralFormula(f"{where} evaluates to {x}")
    if x < 0:
        raise NonIntegralFormula(f"{where} is negative: {x}")
    return int(x)


def _skeleton(g: int) -> dict:
    # columns 0..g-1 (p up to dim V), rows 0..2, with the trivial row 0
    entries = {(p, q): 0 for p in range(g) for q in range(3)}
    entries[(0, 0)] = 1
    return entries


def predicted_odd(g: int) -> PredictedTable:
    """Table of a general paracanonical curve of odd genus g = 2i + 5.

    g = 5 (i = 0) is accepted as well; the same formulas then give the
    row-2 entries 2, 8, 5 at p = 0, 1, 2.
    """
    if g < 5 or g % 2 == 0:
        raise ValueError("odd genus >= 5 expected")
    i = (g - 5) // 2
    e = _skeleton(g)
    for p in range(1, i + 1):
        e[(p, 1)] = _integer(Fraction(p * (2 * i - 2 * p + 1), 2 * i + 3) * comb(2 * i + 4, p + 1), f"b_{p},1")
    for p in range(i, 2 * i + 3):
        e[(p, 2)] = _integer(Fraction((p + 1) * (2 * p - 2 * i + 1), 2 * i + 3) * comb(2 * i + 4, p + 2), f"b_{p},2")
    return PredictedTable(g, "odd", BettiTable(e, {"genus": g, "parity": "odd", "i": i}))


def predicted_even(g: int) -> PredictedTable:
    """Table of a general paracanonical curve of even genus g = 2i + 6, with b_{i+1,1} = b_{i,2} unknown."""
    if g < 8 or g % 2:
        raise ValueError("even genus >= 8 expected")
    i = (g - 6) // 2
    e = _skeleton(g)
    for p in range(1, i + 1):
        e[(p, 1)] = _integer(comb(2 * i + 5, p + 1) * Fraction(p * (i - p + 1), i + 2), f"b_{p},1")
    for p in range(i + 1, 2 * i + 4):
        e[(p, 2)] = _integer(comb(2 * i + 5, p + 2) * Fraction((p + 1) * (p - i), i + 2), f"b_{p},2")
    e[(i + 1, 1)] = UNKNOWN
    e[(i, 2)] = UNKNOWN
    return PredictedTable(g, "even", BettiTable(e, {"genus": g, "parity": "even", "i": i}))


def predicted(g: int) -> PredictedTable:
    return predicted_odd(g) if g % 2 else predicted_even(g)


def slope_check(i: int) -> tuple[int, int]:
    """Slopes of the twisted kernel bundles on a curve D of genus 2i + 3.

    M_K on D has rank g(D) - 1 and degree -(2g(D) - 2); C restricts to D with
    degree H.L = 2g - 2 computed in the Barth-Verra lattice of genus 2i + 5.
    Returns (mu(wedge^(i-1) M^v (x) (C - K)), mu(wedge^i M (x) (2K - C))).
    """
    if i < 1:
        raise ValueError("i >= 1 expected")
    g, gD = 2 * i + 5, 2 * i + 3
    lat = named_lattice("upsilon", g)
    deg_C = pair(lat.L, lat.L + lat.eta)
    deg_K = 2 * gD - 2
    mu_M = Fraction(-deg_K, gD - 1)
    # wedge^k of a bundle of slope s has slope k s; a twist adds its degree
    s1 = (i - 1) * -mu_M + (deg_C - deg_K)
    s2 = i * mu_M + (2 * deg_K - deg_C)
    if s1.denominator != 1 or s2.denominator != 1:
        raise NonIntegralFormula("slopes are not integral")
    return int(s1), int(s2)


def compare(pred: PredictedTable, computed: BettiTable) -> Verdict:
    """MATCH, JUMPED (every known entry >= prediction, one strictly) or VIOLATION."""
    known = {k: v for k, v in pred.table.entries.items() if v is not UNKNOWN}
    missing = [k for k in known if k not in computed.entries]
    if missing:
        raise RangeMismatch(f"computed table lacks cells {sorted(missing)}")
    if computed.meta.get("genus", pred.genus) != pred.genus:
        raise RangeMismatch("genus differs")
    diff = [computed.entries[k] - v for k, v in known.items()]
    if any(d < 0 for d in diff):
        return Verdict.VIOLATION
    if any(d > 0 for d in diff):
        return Verdict.JUMPED
    return Verdict.MATCH
