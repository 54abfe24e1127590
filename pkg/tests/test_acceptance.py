"""One test per acceptance criterion, each checked at its tolerance and time limit."""
import json
import subprocess
import sys
from math import comb
from pathlib import Path

import numpy as np
import pytest

from bvlab.cli import main
from bvlab.counting import (
    binom_conv,
    brute_force_exact_order,
    bv_count,
    divisors,
    exact_order_count,
    moebius,
    sigma2_inequality,
)
from bvlab.fibration import decomposition_search, intersect_sections, kummer_class, section_class
from bvlab.koszul import euler_characteristic, koszul_differential, koszul_dim
from bvlab.lattice import (
    discriminant,
    even_unimodular_obstruction,
    is_primitive,
    named_lattice,
    pair,
    upsilon_to_hyperelliptic,
    upsilon_to_omega,
)
from bvlab.pipeline import compute_table, verify_report
from bvlab.predictor import Verdict
from bvlab.rings import random_point_set_ring, rational_normal_curve_ring

from oracles import koszul_dim_oracle, rnc_betti_row1, treelike_betti

HERE = Path(__file__).parent
P = 10007


def test_criterion_01_counting_equivalence(criterion):
    with criterion(1, "brute force = Moebius count, l in {2,3,4}, 2 <= g <= 5", 5):
        for level in (2, 3, 4):
            for g in range(2, 6):
                assert brute_force_exact_order(level, g) == exact_order_count(level, g)
        assert brute_force_exact_order(2, 3) == 20
        assert brute_force_exact_order(4, 3) == 4040
        assert bv_count(2, 7) == 0


def test_criterion_02_moebius_partition(criterion):
    with criterion(2, "sum over d | l of exact counts = C(2l^2-2, g); positivity", 1):
        for level in range(1, 13):
            for g in range(0, 21):
                parts = sum(exact_order_count(d, g) if d > 1 else binom_conv(0, g) for d in divisors(level))
                assert parts == comb(2 * level * level - 2, g)
                if level >= 2 and g >= 1 and 2 * level * level - 2 >= g:
                    assert exact_order_count(level, g) > 0


def test_criterion_03_lattices(criterion):
    with criterion(3, "discriminants, primitive embeddings, mod-8 obstruction, H^2", 1):
        assert all(discriminant(named_lattice("omega", g)) == 4 for g in range(3, 51))
        assert all(is_primitive(upsilon_to_omega(g)) for g in range(3, 51))
        assert all(is_primitive(upsilon_to_hyperelliptic(i)) for i in range(1, 23))
        assert even_unimodular_obstruction((1, 2)) is True
        for g in range(3, 51):
            up = named_lattice("upsilon", g)
            assert pair(up.L + up.eta, up.L + up.eta) == 2 * g - 6


def test_criterion_04_mordell_weil(criterion):
    with criterion(4, "section identities |m| <= 100, Kummer relation, empty decompositions", 2):
        om = named_lattice("omega", 7)
        t1 = section_class(7, 1)
        for m in range(-100, 101):
            t = section_class(7, m)
            assert pair(t.cls, t.cls) == -2
            assert pair(t.cls, om.E) == 1
            assert pair(t.cls, om.Gamma) == 2 * m * m - 2
            assert intersect_sections(t1, t) == 2 * (m - 1) ** 2 - 2
            assert kummer_class(m, 7) == t.cls
        up = named_lattice("upsilon", 7)
        for c in range(-5, 6):
            if c:
                assert decomposition_search(c * up.eta, up.L) == []
        for m in range(1, 7):
            assert decomposition_search(section_class(7, m).cls, [om.E, om.Gamma + 7 * om.E]) == []


def test_criterion_05_sigma2(criterion):
    with criterion(5, "sigma_2(n) < 2 n^2 for 2 <= n <= 10^5", 5):
        assert sigma2_inequality(10**5)


def test_criterion_06_koszul_oracle(criterion):
    with criterion(6, "rational normal curves vs oracle, twisted cubic, d o d = 0, Euler identity", 10):
        for n in (2, 3, 4):
            ring = rational_normal_curve_ring(n, P)
            mu = {q: ring.tensor(q).tolist() for q in ring.mu}
            computed = [koszul_dim(ring, p, 1) for p in range(1, n)]
            oracle = [koszul_dim_oracle(ring.dims, mu, n + 1, p, 1, P) for p in range(1, n)]
            assert computed == oracle == rnc_betti_row1(n)
        cubic = rational_normal_curve_ring(3, P)
        assert (koszul_dim(cubic, 1, 1), koszul_dim(cubic, 2, 1)) == (3, 2)
        rng = np.random.default_rng(6)
        for _ in range(50):
            r = int(rng.integers(1, 4))
            ring = random_point_set_ring(r, int(rng.integers(r + 1, r + 7)), P, rng)
            for q in (0, 1):
                for p in range(2, ring.n_plus_1 + 1):
                    comp = koszul_differential(ring, p - 1, q + 1) @ koszul_differential(ring, p, q)
                    assert not np.any(comp.to_numpy())
            for k in range(4):
                lhs, rhs = euler_characteristic(ring, k)
                assert lhs == rhs


def test_criterion_07_genus_seven(criterion):
    with criterion(7, "verify (g, l, p) = (7, 3, 10007), seed 1: MATCH", 10):
        comp = compute_table("nodal", 7, 3, P, seed=1)
        report, verdict = verify_report(comp, 3, P, 1)
        table = comp.table
        assert verdict is Verdict.MATCH
        assert table.row(1, [1, 2, 3, 4]) == [3, 0, 0, 0]
        assert table.row(2, [1, 2, 3, 4]) == [8, 27, 24, 7]
        assert table[(2, 1)] == 0 and table[(0, 2)] == 0


@pytest.mark.slow
def test_criterion_08_genus_nine_and_eight(criterion):
    with criterion(8, "(9,3): K_3,1 = K_1,2 = 0; (8,3): K_0,2 = K_3,1 = 0, b_1,2 = b_2,1; tree-like b_2,1 > 0", 60):
        nine = compute_table("nodal", 9, 3, P, seed=1).table
        assert nine[(3, 1)] == 0 and nine[(1, 2)] == 0
        eight = compute_table("nodal", 8, 3, P, seed=1).table
        assert eight[(0, 2)] == 0 and eight[(3, 1)] == 0
        assert eight[(1, 2)] == eight[(2, 1)]
        # nonvanishing of b_2,1 is checked on the tree-like degeneration, whose
        # table is the closed form in the oracle (b_2,1 = 2 C(6, 3) = 40)
        tree = compute_table("treelike", 8, 3, P, seed=1).table
        assert tree[(2, 1)] == treelike_betti(8)[(2, 1)] > 0


def test_criterion_09_property_suites(criterion):
    modules = [
        "test_ffield.py",
        "test_lattice.py",
        "test_counting.py",
        "test_fibration.py",
        "test_curves.py",
        "test_koszul.py",
        "test_predictor.py",
    ]
    with criterion(9, "module property suites", 30):
        res = subprocess.run(
            [sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", *modules],
            cwd=HERE,
            capture_output=True,
            text=True,
        )
        assert res.returncode == 0, res.stdout[-2000:]
    # the moebius roundtrip for n <= 200 is repeated here exhaustively
    for n in range(1, 201):
        f = {d: (7 * d * d + 3) % 101 - 50 for d in divisors(n)}
        G = {d: sum(f[e] for e in divisors(d)) for d in divisors(n)}
        assert sum(moebius(n // d) * G[d] for d in divisors(n)) == f[n]


def test_criterion_10_reproducibility(criterion, tmp_path, capsys):
    runs = [
        ["count", "--level", "4", "--genus", "3", "--exact-order", "--brute-force"],
        ["lattice", "--check-embedding", "upsilon-omega", "--genus", "9"],
        ["mw", "--genus", "5", "--m", "4", "--search"],
        ["predict", "--genus", "10"],
        ["compute", "--genus", "7", "--level", "3", "--prime", "10007", "--seed", "1"],
        ["verify", "--genus", "7", "--level", "3", "--prime", "10007", "--seed", "1"],
        ["verify", "--genus", "7", "--level", "3", "--prime", "10007", "--model", "treelike", "--csv"],
    ]
    with criterion(10, "replayed manifests reproduce byte-identical output", 120):
        for k, argv in enumerate(runs):
            out = tmp_path / f"run{k}.out"
            code = main(argv + ["--out", str(out)])
            manifest = Path(str(out) + ".manifest.json")
            assert main(["replay", str(manifest)]) == 0
            replayed = capsys.readouterr().out
            assert replayed.encode() == out.read_bytes()
            assert json.loads(manifest.read_text())["exit_code"] == code
