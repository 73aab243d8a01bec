import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hecke_density.core import (
    Branch,
    FactorKind,
    LocalFactor,
    SatakeTuple,
    TWO_PI,
    constraint_residual,
    factor_degree,
    from_free_angles,
    is_tempered,
    local_factor,
    mu,
    mu_expanded,
    mu_of_angles,
    rho1_of_angles,
    spin_root_angles,
    std_root_angles,
    validate,
)
from conftest import bulk_angles, random_tuple

ANGLES = st.floats(min_value=0.0, max_value=TWO_PI, exclude_max=True)


def genus_and_angles(max_genus=4):
    return st.integers(1, max_genus).flatmap(
        lambda g: st.tuples(st.just(g), st.lists(ANGLES, min_size=g, max_size=g))
    )


class TestFromFreeAngles:
    def test_identity_configuration(self):
        t = from_free_angles(2, (0.0, 0.0), Branch.PLUS)
        assert t.params == (1 + 0j, 1 + 0j, 1 + 0j)

    def test_forced_square_root(self):
        t = from_free_angles(1, (-2 * math.pi / 3,), Branch.PLUS)
        assert t.angles[0] == pytest.approx(math.pi / 3)
        a0, a1 = t.params
        assert abs(a0**2 * a1 - 1) < 1e-15

    def test_branch_selects_root(self):
        plus = from_free_angles(2, (math.pi, 0.0), Branch.PLUS)
        minus = from_free_angles(2, (math.pi, 0.0), Branch.MINUS)
        assert plus.params[0] == pytest.approx(-1j)
        assert minus.params[0] == pytest.approx(1j)
        for t in (plus, minus):
            assert abs(t.params[0] ** 2 + 1) < 1e-15

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            from_free_angles(2, (0.0,), Branch.PLUS)

    def test_genus_zero_rejected(self):
        with pytest.raises(ValueError):
            SatakeTuple(0, (0.0,))

    @given(genus_and_angles())
    @settings(max_examples=200, deadline=None)
    def test_output_always_validates(self, ga):
        g, angles = ga
        for branch in Branch:
            assert validate(from_free_angles(g, angles, branch), 1e-12) == []


class TestValidate:
    def test_all_ones_clean(self):
        assert validate(from_free_angles(2, (0.0, 0.0)), 1e-12) == []

    def test_detuned_a0_flagged(self):
        report = validate(SatakeTuple(2, (0.1, 0.0, 0.0)), 1e-12)
        assert any("central constraint" in r for r in report)


class TestMu:
    def test_all_ones_g2(self):
        assert mu(from_free_angles(2, (0.0, 0.0))) == 4.0

    def test_g1_two_cos_theta(self):
        # (a_0, a_1) = (e^{i pi/3}, e^{-2i pi/3}): mu = 2 cos(pi/3) = 1
        t = from_free_angles(1, (-2 * math.pi / 3,), Branch.PLUS)
        assert mu(t) == pytest.approx(1.0, abs=1e-12)

    def test_vanishing_factor(self):
        t = from_free_angles(2, (math.pi, 0.0), Branch.MINUS)
        assert t.params[0] == pytest.approx(1j)
        assert mu(t) == pytest.approx(0.0, abs=1e-12)

    def test_imaginary_residue_raises(self):
        with pytest.raises(ValueError, match="imaginary"):
            mu(SatakeTuple(2, (0.7, 0.0, 0.0)))

    def test_expanded_all_ones(self):
        assert mu_expanded(from_free_angles(2, (0.0, 0.0))) == 4.0
        assert mu_expanded(from_free_angles(1, (0.0,))) == 2.0

    @given(genus_and_angles())
    @settings(max_examples=300, deadline=None)
    def test_product_and_sum_forms_agree(self, ga):
        g, angles = ga
        t = from_free_angles(g, angles)
        assert mu(t) == pytest.approx(mu_expanded(t), abs=1e-10)


def test_bulk_invariants_over_random_tuples():
    # >= 10^4 tuples across genus 1..4: constraint, the two mu forms, the
    # 2^g cap, and |mu|^2 = prod(2 + 2 cos theta_i)
    rng = np.random.default_rng(101)
    for g in (1, 2, 3, 4):
        ang = bulk_angles(rng, 3000, g)
        assert constraint_residual(ang).max() <= 1e-10
        mus = mu_of_angles(ang)
        assert np.abs(mus).max() <= 2.0**g + 1e-9
        sq = np.prod(2.0 + 2.0 * np.cos(ang[:, 1:]), axis=1)
        assert np.abs(mus**2 - sq).max() <= 1e-10 * (2.0 ** (2 * g))
        for i in range(0, 3000, 100):
            t = SatakeTuple(g, tuple(ang[i]))
            assert mu(t) == pytest.approx(mu_expanded(t), abs=1e-10)
            assert mu(t) == pytest.approx(float(mus[i]), abs=1e-10)


class TestLocalFactor:
    def test_g1_all_ones_spin(self):
        f = local_factor(from_free_angles(1, (0.0,)), FactorKind.SPIN)
        assert f.degree == 2
        assert all(abs(r - 1) < 1e-15 for r in f.roots)

    def test_g1_all_ones_std(self):
        f = local_factor(from_free_angles(1, (0.0,)), FactorKind.STD)
        assert f.degree == 3
        assert all(abs(r - 1) < 1e-15 for r in f.roots)

    def test_degrees(self):
        for g in (1, 2, 3, 4):
            t = from_free_angles(g, [0.5] * g)
            assert local_factor(t, FactorKind.SPIN).degree == 2**g
            assert local_factor(t, FactorKind.STD).degree == 2 * g + 1
            assert factor_degree(FactorKind.SPIN, g) == 2**g
            assert factor_degree(FactorKind.STD, g) == 2 * g + 1

    def test_spin_root_product_is_one(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            t = random_tuple(rng, 2)
            prod = np.prod(local_factor(t, FactorKind.SPIN).roots)
            assert abs(prod - 1.0) < 1e-10

    def test_std_contains_one(self):
        rng = np.random.default_rng(8)
        t = random_tuple(rng, 3)
        roots = local_factor(t, FactorKind.STD).roots
        assert any(abs(r - 1.0) < 1e-15 for r in roots)

    @given(genus_and_angles(3))
    @settings(max_examples=150, deadline=None)
    def test_conjugation_closed(self, ga):
        g, angles = ga
        t = from_free_angles(g, angles)
        for kind in FactorKind:
            roots = list(local_factor(t, kind).roots)
            for r in roots:
                assert min(abs(r.conjugate() - q) for q in roots) < 1e-10

    def test_wrong_root_count_rejected(self):
        with pytest.raises(ValueError):
            LocalFactor(FactorKind.SPIN, 2, (1 + 0j,))


class TestIsTempered:
    def test_angle_tuples_always_tempered(self):
        assert is_tempered(from_free_angles(2, (1.0, 2.0)))

    def test_recorded_unit_magnitudes(self):
        t = SatakeTuple(1, (0.0, 0.0), magnitudes=(1.0, 1.0))
        assert is_tempered(t)

    def test_recorded_off_magnitude(self):
        t = SatakeTuple(1, (0.0, 0.0), magnitudes=(1.1, 1.0))
        assert not is_tempered(t, 1e-6)


class TestVectorKernels:
    def test_match_scalar_path(self):
        rng = np.random.default_rng(9)
        for g in (1, 2, 4):
            ang = bulk_angles(rng, 20, g)
            for i in range(20):
                t = SatakeTuple(g, tuple(ang[i]))
                assert mu_of_angles(ang[i]) == pytest.approx(mu(t), abs=1e-12)
                rho1 = 1.0 + 2.0 * sum(math.cos(a) for a in t.angles[1:])
                assert rho1_of_angles(ang[i]) == pytest.approx(rho1, abs=1e-12)
                spin = np.exp(1j * spin_root_angles(ang[i]))
                expected = local_factor(t, FactorKind.SPIN).roots
                # multisets agree up to float wobble in the angle sums
                for z in spin:
                    assert min(abs(z - w) for w in expected) < 1e-12
                std = np.exp(1j * std_root_angles(ang[i]))
                assert abs(std[0] - 1.0) < 1e-15
                assert len(std) == 2 * g + 1

    def test_angle_normalization(self):
        t = SatakeTuple(1, (-1.0, 9.0))
        assert all(0.0 <= a < TWO_PI for a in t.angles)
        assert cmath.exp(1j * t.angles[0]) == pytest.approx(cmath.exp(-1j), abs=1e-12)
