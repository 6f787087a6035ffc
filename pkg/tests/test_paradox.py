import numpy as np
import pytest

from oracle_grid import grid_min_defect, r1_defects
from ulam_lab.groups import (
    FiniteGroup,
    FreeGroup,
    IntegerLattice,
    ProbMeasure,
    Word,
    l1_distance,
    translate_measure,
)
from ulam_lab.paradox import (
    ParadoxicalDecomposition,
    mean_coefficient,
    min_invariance_defect,
    standard_f2_decomposition,
    tarski_defect,
    tarski_defect_sweep,
)


def dirichlet_measure(support, rng):
    return ProbMeasure(tuple(support), rng.dirichlet(np.ones(len(support))))


def test_standard_decomposition_verifies_on_ball():
    dec = standard_f2_decomposition()
    report = dec.verify_on_ball(2, 4)
    assert report == {
        "pieces_disjoint": True,
        "translates_a_disjoint": True,
        "translates_a_cover": True,
        "translates_b_disjoint": True,
        "translates_b_cover": True,
    }


def test_classify_first_letter():
    dec = standard_f2_decomposition()
    assert dec.classify(Word()) is None
    assert dec.classify(Word.parse("a")) == "A1"
    assert dec.classify(Word.parse("Ab")) == "A2"
    assert dec.classify(Word.parse("ba")) == "B1"
    assert dec.classify(Word.parse("Ba")) == "B2"


def test_translate_masses_sum_to_two():
    dec = standard_f2_decomposition()
    rng = np.random.default_rng(12)
    ball = FreeGroup(2).ball(3)
    for _ in range(5):
        mu = dirichlet_measure(ball, rng)
        mass_a = sum(
            mean_coefficient(mu, s, p) for s, p in zip(dec.translates_s, dec.pieces_a)
        )
        mass_b = sum(
            mean_coefficient(mu, t, p) for t, p in zip(dec.translates_t, dec.pieces_b)
        )
        assert mass_a == pytest.approx(1.0, abs=1e-12)
        assert mass_b == pytest.approx(1.0, abs=1e-12)
        piece_mass = sum(
            mean_coefficient(mu, Word(), p) for p in dec.pieces_a + dec.pieces_b
        )
        assert piece_mass <= 1.0 + 1e-12


def test_tarski_defect_point_mass():
    assert tarski_defect(ProbMeasure.point_mass(Word())) == pytest.approx(2.0)


def test_tarski_defect_uniform_pair():
    mu = ProbMeasure.uniform([Word(), Word.parse("a")])
    assert tarski_defect(mu) == pytest.approx(1.5)


def test_tarski_defect_matches_mean_coefficients():
    dec = standard_f2_decomposition()
    rng = np.random.default_rng(30)
    mu = dirichlet_measure(FreeGroup(2).ball(3), rng)
    e = Word()
    expected = sum(
        abs(mean_coefficient(mu, s, p) - mean_coefficient(mu, e, p))
        for s, p in zip(
            dec.translates_s + dec.translates_t, dec.pieces_a + dec.pieces_b
        )
    )
    assert tarski_defect(mu, dec) == pytest.approx(expected, abs=1e-12)


def test_tarski_defect_requires_words():
    with pytest.raises(ValueError):
        tarski_defect(ProbMeasure.point_mass(3))


def test_defect_sweep_lower_bound_and_determinism():
    ball = FreeGroup(2).ball(4)
    values = tarski_defect_sweep(ball, 2000, seed=9)
    assert values.shape == (2000,)
    assert float(values.min()) >= 1.0 - 1e-12
    again = tarski_defect_sweep(ball, 2000, seed=9)
    assert np.array_equal(values, again)


def test_decomposition_validation_and_custom_labels():
    with pytest.raises(ValueError):
        ParadoxicalDecomposition(
            pieces_a=(lambda w: True,),
            pieces_b=(lambda w: True,),
            translates_s=(Word(), Word.parse("a")),
            translates_t=(Word(),),
        )
    dec = standard_f2_decomposition()
    assert dec.labels_a == ("A1", "A2") and dec.labels_b == ("B1", "B2")


def test_min_invariance_defect_f2_closed_form():
    # the LP optimum on the r-ball is the uniform-ball defect 2*3^r/(2*3^r - 1)
    f2 = FreeGroup(2)
    for r in (1, 2, 3):
        res = min_invariance_defect(f2, r)
        expected = 2 * 3**r / (2 * 3**r - 1)
        assert res.value == pytest.approx(expected, abs=1e-9)
        assert res.value >= 1.0 - 1e-9
        assert isinstance(res.measure, ProbMeasure)
        assert set(res.measure.support) == set(f2.ball(r))
        assert res.lp_iterations > 0


def test_min_invariance_defect_lattice_matches_box():
    z1 = IntegerLattice(1)
    for r in (1, 2, 3):
        res = min_invariance_defect(z1, r)
        assert res.value == pytest.approx(2 / (2 * r + 1), abs=1e-9)
    z2 = IntegerLattice(2)
    for r in (1, 2):
        res = min_invariance_defect(z2, r)
        assert res.value == pytest.approx(2 / (2 * r + 1), abs=1e-9)
        # the uniform box achieves the optimum
        box = ProbMeasure.uniform(z2.ball(r))
        worst = max(
            l1_distance(translate_measure(z2, s, box), box) for s in z2.generators()
        )
        assert worst == pytest.approx(res.value, abs=1e-12)


def test_min_invariance_defect_validation():
    with pytest.raises(ValueError):
        min_invariance_defect(FreeGroup(2), 6)
    with pytest.raises(ValueError):
        min_invariance_defect(IntegerLattice(2), 9)
    with pytest.raises(ValueError):
        min_invariance_defect(FiniteGroup.cyclic(4), 1)
    with pytest.raises(ValueError):
        min_invariance_defect(FreeGroup(2), -1)


def test_r1_defect_formula_matches_group_machinery():
    f2 = FreeGroup(2)
    ball = f2.ball(1)  # (e, a, a^-1, b, b^-1) in shortlex order
    rng = np.random.default_rng(77)
    a, b = f2.generators()
    for _ in range(20):
        w = rng.dirichlet(np.ones(5))
        mu = ProbMeasure(tuple(ball), w)
        d_a, d_b = r1_defects(w)
        assert l1_distance(translate_measure(f2, a, mu), mu) == pytest.approx(d_a, abs=1e-12)
        assert l1_distance(translate_measure(f2, b, mu), mu) == pytest.approx(d_b, abs=1e-12)


def test_grid_oracle_agrees_with_lp_at_radius_one():
    res = min_invariance_defect(FreeGroup(2), 1)
    value, weights = grid_min_defect(0.05)
    assert value == pytest.approx(res.value, abs=1e-9)
    assert weights.sum() == pytest.approx(1.0)
