from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bvlab.counting import (
    ArithmeticCache,
    BudgetExceeded,
    NegativeLower,
    binom_conv,
    brute_force_exact_order,
    bv_count,
    divisors,
    exact_order_count,
    moebius,
    sigma,
    sigma2_inequality,
    sigma2_table,
)

from oracles import exact_order_by_product


def test_moebius_values():
    assert [moebius(n) for n in (1, 2, 4, 6, 12, 30, 105)] == [1, -1, 0, 1, 0, -1, -1]
    assert moebius(12) == 0 and moebius(30) == -1


def test_sigma_values():
    assert sigma(2, 4) == 21
    assert sigma(0, 1) == 1
    assert sigma(0, 12) == 6
    for p in (2, 3, 5, 7, 101, 10007):
        assert sigma(2, p) == 1 + p * p


def test_cache_bounds():
    cache = ArithmeticCache()
    for n in range(2, 300):
        assert cache.moebius(n) in (-1, 0, 1)
        for k in range(4):
            assert cache.sigma(k, n) >= n**k + 1
            assert cache.sigma(k, n) == sum(d**k for d in range(1, n + 1) if n % d == 0)


def test_binom_conv():
    assert binom_conv(6, 7) == 0
    assert binom_conv(9, 0) == 1
    assert binom_conv(16, 7) == 11440
    with pytest.raises(NegativeLower):
        binom_conv(3, -1)


def test_counts():
    assert bv_count(2, 7) == 0
    assert bv_count(3, 7) == 11440
    assert bv_count(2, 3) == 20
    assert exact_order_count(4, 3) == 4040
    assert exact_order_count(3, 7) == 11440
    for g in range(1, 8):
        assert exact_order_count(2, g) == comb(6, g)


@pytest.mark.parametrize("level", [2, 3, 4])
@pytest.mark.parametrize("genus", [2, 3, 4, 5])
def test_brute_force_agrees(level, genus):
    expected = exact_order_count(level, genus)
    assert brute_force_exact_order(level, genus) == expected
    assert brute_force_exact_order(level, genus, method="compositions") == expected


def test_brute_force_spots():
    assert brute_force_exact_order(2, 3) == 20
    assert brute_force_exact_order(4, 3) == 4040
    assert brute_force_exact_order(6, 2) == exact_order_count(6, 2)
    # labels taken from (Z/l)^2 instead of the Moebius inversion
    for level, genus in [(2, 3), (3, 2), (4, 2), (6, 2), (3, 3)]:
        assert exact_order_by_product(level, genus) == exact_order_count(level, genus)


def test_brute_force_budget_and_method():
    with pytest.raises(BudgetExceeded):
        brute_force_exact_order(6, 5, budget=1000)
    assert brute_force_exact_order(6, 5, method="compositions") == exact_order_count(6, 5)
    with pytest.raises(ValueError):
        brute_force_exact_order(2, 3, method="guess")


@settings(max_examples=50)
@given(st.integers(1, 200), st.data())
def test_moebius_inversion_roundtrip(n, data):
    ds = divisors(n)
    f = {d: data.draw(st.integers(-10**6, 10**6)) for d in ds}
    G = {d: sum(f[e] for e in divisors(d)) for d in ds}
    assert all(sum(moebius(d // e) * G[e] for e in divisors(d)) == f[d] for d in ds)


def test_partition_identity_and_positivity():
    for level in range(2, 13):
        for g in range(0, 21):
            total = sum(exact_order_count(d, g) if d > 1 else binom_conv(0, g) for d in divisors(level))
            assert total == bv_count(level, g)
            if g >= 1 and 2 * level * level - 2 >= g:
                assert exact_order_count(level, g) > 0
            assert exact_order_count(level, g) >= 0


def test_sigma2():
    assert sigma2_inequality(10)
    assert sigma(2, 2) == 5 < 8
    table = sigma2_table(500)
    assert all(table[n] == sigma(2, n) for n in range(1, 501))
    with pytest.raises(ValueError):
        sigma2_inequality(1)
