import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bvlab.counting import divisors
from bvlab.fibration import (
    BoundTooSmall,
    GenusMismatch,
    apriori_bounds,
    decomposition_search,
    fiber_torsion_model,
    intersect_sections,
    intersection_table,
    kummer_class,
    mukai_moduli_dim,
    mw_add,
    section_class,
)
from bvlab.lattice import named_lattice, pair


def test_section_examples():
    om = named_lattice("omega", 7)
    assert section_class(7, 1).cls == 2 * om.E + om.Gamma + om.eta
    assert section_class(7, 0).cls == om.Gamma
    t3 = section_class(7, 3).cls
    assert t3 == 18 * om.E + om.Gamma + 3 * om.eta and pair(t3, t3) == -2


def test_mw_add_examples():
    t1, t2 = section_class(5, 1), section_class(5, 2)
    assert mw_add(t1, t1) == t2
    assert mw_add(t2, section_class(5, 0)) == t2
    assert mw_add(t2, section_class(5, -2)).m == 0
    with pytest.raises(GenusMismatch):
        mw_add(t1, section_class(6, 1))
    with pytest.raises(GenusMismatch):
        intersect_sections(t1, section_class(6, 1))


def test_intersection_examples():
    g = 4
    assert intersect_sections(section_class(g, 2), section_class(g, 0)) == 6
    assert intersect_sections(section_class(g, 1), section_class(g, 1)) == -2
    assert intersect_sections(section_class(g, 1), section_class(g, 4)) == 16


@pytest.mark.parametrize("g", [3, 7, 12])
def test_mordell_weil_identities(g):
    om = named_lattice("omega", g)
    for m in range(-100, 101):
        t = section_class(g, m)
        row = intersection_table(g, m)
        assert row["self"] == pair(t.cls, t.cls) == -2
        assert row["E"] == 1
        assert row["Gamma"] == 2 * m * m - 2
        assert row["T_1"] == 2 * (m - 1) ** 2 - 2
        assert pair(t.cls, om.E) == 1


def test_kummer_relation():
    om = named_lattice("omega", 3)
    assert kummer_class(1) == section_class(3, 1).cls
    assert kummer_class(2) == 4 * om.E - om.Gamma + 2 * section_class(3, 1).cls
    for m in range(-50, 51):
        assert kummer_class(m) == section_class(3, m).cls


@settings(max_examples=80)
@given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6), st.integers(-10**6, 10**6))
def test_group_law(a, b, c):
    T = lambda m: section_class(9, m)
    assert mw_add(T(a), T(b)).m == a + b
    assert mw_add(T(a), T(b)) == mw_add(T(b), T(a))
    assert mw_add(mw_add(T(a), T(b)), T(c)) == mw_add(T(a), mw_add(T(b), T(c)))


@pytest.mark.parametrize("g", [3, 7, 11])
def test_multiples_of_eta_admit_no_decomposition(g):
    up = named_lattice("upsilon", g)
    for c in range(-5, 6):
        if c:
            assert decomposition_search(c * up.eta, up.L) == []


@pytest.mark.parametrize("g", [3, 7, 11])
def test_sections_admit_no_decomposition(g):
    om = named_lattice("omega", g)
    nefs = [om.E, om.Gamma + g * om.E]
    for m in range(1, 7):
        assert decomposition_search(section_class(g, m).cls, nefs) == []


def test_reducible_class_is_found():
    om = named_lattice("omega", 5)
    found = decomposition_search(2 * om.E, om.E)
    assert (om.E, om.E) in found


def test_bound_too_small():
    om = named_lattice("omega", 5)
    target = section_class(5, 6).cls
    assert max(apriori_bounds(target, om.Gamma + 5 * om.E)) > 3
    with pytest.raises(BoundTooSmall):
        decomposition_search(target, om.Gamma + 5 * om.E, bound=3)


def test_fiber_model_examples():
    assert fiber_torsion_model(2).exact_order_counts == {2: 6}
    assert fiber_torsion_model(4).exact_order_counts == {2: 6, 4: 24}
    six = fiber_torsion_model(6)
    assert six.exact_order_counts == {2: 6, 3: 16, 6: 48} and six.total == 70
    with pytest.raises(ValueError):
        fiber_torsion_model(1)


def test_fiber_model_partial_sums():
    for level in range(2, 61):
        model = fiber_torsion_model(level)
        assert model.check()
        assert model.total == 2 * level * level - 2
        f = model.exact_order_counts
        for d in divisors(level):
            assert sum(f.get(e, 0) for e in divisors(d)) == 2 * d * d - 2


def test_mukai_dimension():
    assert [mukai_moduli_dim(g) for g in (7, 2, 11)] == [14, 4, 22]
    with pytest.raises(ValueError):
        mukai_moduli_dim(1)
