import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from hecke_density.core import Branch, FactorKind, from_free_angles, mu
from hecke_density.density import sieve
from hecke_density.series import log_local
from hecke_density.sim import (
    SamplerKind,
    SamplerSpec,
    build_assignment,
    satotate_exceed_measure,
)
from hecke_density.verify import (
    Mode,
    SatakeAssignment,
    exceptional_set,
    extremal_tuple,
    lemma_ineq_check,
    lfunc_sharpness_harness,
    log_L_decomposition,
    theorem1_bound,
    theorem2_bound,
    verify_theorem,
)

TWO_PI = 2.0 * math.pi
ANGLES = st.floats(min_value=0.0, max_value=TWO_PI, exclude_max=True)


class TestLemmaIneq:
    def test_all_ones_equality(self):
        res = lemma_ineq_check(from_free_angles(2, (0.0, 0.0)), 4.0)
        assert res.applicable
        assert res.lhs == 5.0
        assert res.rhs == pytest.approx(5.0, abs=1e-12)

    def test_g1_boundary_case(self):
        t = from_free_angles(1, (-2 * math.pi / 3,), Branch.PLUS)
        res = lemma_ineq_check(t, 1.0)
        assert res.applicable
        assert res.lhs == pytest.approx(0.0, abs=1e-12)
        assert res.rhs == pytest.approx(0.0, abs=1e-12)

    def test_not_applicable_below_threshold(self):
        t = from_free_angles(2, (math.pi, 0.0))  # mu = 0
        res = lemma_ineq_check(t, 0.5)
        assert not res.applicable

    @given(
        st.integers(1, 4).flatmap(
            lambda g: st.tuples(st.just(g), st.lists(ANGLES, min_size=g, max_size=g))
        ),
        st.floats(min_value=0.001, max_value=1.0),
    )
    @settings(max_examples=300, deadline=None)
    def test_holds_when_applicable(self, ga, frac):
        g, angles = ga
        t = from_free_angles(g, angles)
        m = abs(mu(t))
        assume(m > 1e-9)
        res = lemma_ineq_check(t, frac * m)
        assert res.applicable
        assert res.lhs >= res.rhs - 1e-9

    def test_c_validation(self):
        with pytest.raises(ValueError):
            lemma_ineq_check(from_free_angles(1, (0.0,)), 0.0)


class TestExtremalTuple:
    def test_c_max_is_all_ones(self):
        t = extremal_tuple(2, 4.0)
        assert t.params == (1 + 0j, 1 + 0j, 1 + 0j)
        assert mu(t) == 4.0

    def test_tiny_c_angle_near_pi(self):
        t = extremal_tuple(1, 1e-6)
        assert t.angles[1] == pytest.approx(math.pi, abs=1e-2)
        assert mu(t) == pytest.approx(1e-6, abs=1e-9)

    def test_right_angle_family(self):
        t = extremal_tuple(3, 2**1.5)
        assert t.angles[1] == pytest.approx(math.pi / 2, abs=1e-12)
        assert mu(t) == pytest.approx(2**1.5, abs=1e-12)

    def test_equality_attained_on_grid(self):
        for g in (1, 2, 3, 4):
            for c in np.geomspace(1e-4, 2.0**g, 32):
                t = extremal_tuple(g, float(c))
                assert abs(abs(mu(t)) - c) <= 1e-9
                res = lemma_ineq_check(t, float(c))
                assert abs(res.lhs - res.rhs) <= 1e-9
                # |mu| sits within float noise of c itself, so test
                # applicability a hair below the knife edge
                shaved = max(float(c) - 1e-9, float(c) / 2)
                assert lemma_ineq_check(t, shaved).applicable

    def test_range_validation(self):
        with pytest.raises(ValueError):
            extremal_tuple(2, 0.0)
        with pytest.raises(ValueError):
            extremal_tuple(2, 4.0001)


class TestBoundFormulas:
    def test_theorem1_values(self):
        assert theorem1_bound(2, 2.0) == 0.75
        assert theorem1_bound(1, 1.0) == 1.0
        assert theorem1_bound(2, 4.0) == 0.375

    def test_theorem1_is_exactly_3_over_2c_at_genus_2(self):
        for c in np.linspace(0.01, 16.0, 1001):
            assert theorem1_bound(2, float(c)) == 3.0 / (2.0 * float(c))

    def test_theorem2_values(self):
        assert theorem2_bound(4.0) == 0.5
        assert theorem2_bound(1e-12) == pytest.approx(1.0, abs=1e-12)

    def test_crossover_at_12_fifths(self):
        c = 12.0 / 5.0
        assert theorem1_bound(2, c) == 0.625
        assert theorem2_bound(c) == 0.625
        for cc in np.linspace(0.05, 16.0, 2001):
            cc = float(cc)
            if cc >= c:
                assert theorem1_bound(2, cc) <= theorem2_bound(cc) + 1e-15
            else:
                assert theorem1_bound(2, cc) >= theorem2_bound(cc) - 1e-15

    def test_validation(self):
        with pytest.raises(ValueError):
            theorem1_bound(0, 1.0)
        with pytest.raises(ValueError):
            theorem2_bound(-1.0)


@pytest.fixture(scope="module")
def small_table():
    return sieve(2000)


@pytest.fixture(scope="module")
def st_assignment(small_table):
    return build_assignment(SamplerSpec(SamplerKind.SATO_TATE_G1, 1, seed=9), small_table)


class TestExceptionalSet:
    def test_constant_all_ones_all_in(self, small_table):
        A = build_assignment(
            SamplerSpec(SamplerKind.EXTREMAL_CONSTANT, 2, c=4.0), small_table
        )
        assert exceptional_set(A, 4.0, Mode.ABS).count == len(small_table)
        assert exceptional_set(A, 4.1, Mode.ABS).count == 0

    def test_monotone_in_c(self, st_assignment):
        for mode in Mode:
            prev = None
            for c in (0.5, 1.0, 1.5, 1.9):
                S = exceptional_set(st_assignment, c, mode)
                if prev is not None:
                    assert not np.any(S.membership & ~prev)  # S_c' subset of S_c
                prev = S.membership

    def test_signed_subset_of_abs(self, st_assignment):
        for c in (0.5, 1.0, 1.5):
            signed = exceptional_set(st_assignment, c, Mode.SIGNED)
            absolute = exceptional_set(st_assignment, c, Mode.ABS)
            assert not np.any(signed.membership & ~absolute.membership)

    def test_satotate_frequency_matches_measure(self, table_1e5):
        A = build_assignment(SamplerSpec(SamplerKind.SATO_TATE_G1, 1, seed=9), table_1e5)
        for c in (1.0, 1.5):
            S = exceptional_set(A, c, Mode.ABS)
            q = satotate_exceed_measure(c)
            sigma = math.sqrt(q * (1 - q) / len(table_1e5))
            assert abs(S.count / len(table_1e5) - q) <= 3 * sigma


class TestVerifyTheorem:
    def test_satotate_positive_margin(self, st_assignment):
        rep = verify_theorem(st_assignment, 1.0, Mode.ABS)
        assert rep.bound == 1.0
        assert rep.margin > 0
        assert not rep.extrapolation
        assert rep.diagnostics["kind"] == "std"

    def test_constant_extremal_flagged_divergent(self, small_table):
        # rho(p) = 5 for every p: the linear sum R(s) grows like
        # 5 log 1/(s-1); the bound is honestly exceeded and the report
        # records the divergence instead of failing
        A = build_assignment(
            SamplerSpec(SamplerKind.EXTREMAL_CONSTANT, 2, c=4.0), small_table
        )
        rep = verify_theorem(A, 4.0, Mode.ABS)
        assert rep.estimate.max_dirichlet == 1.0
        assert rep.bound == 0.375
        assert rep.margin < 0
        assert rep.diagnostics["monotone_growth"]
        assert rep.diagnostics["growth"] > 1.0

    def test_empty_set_margin_equals_bound(self, small_table):
        A = build_assignment(
            SamplerSpec(SamplerKind.EXTREMAL_CONSTANT, 2, c=1.0), small_table
        )
        rep = verify_theorem(A, 3.9, Mode.ABS)  # mu = 1 everywhere < 3.9
        assert rep.estimate.max_dirichlet == 0.0
        assert rep.margin == rep.bound

    def test_signed_mode_genus_flagging(self, st_assignment, small_table):
        rep = verify_theorem(st_assignment, 1.0, Mode.SIGNED)
        assert rep.extrapolation  # genus 1 for a genus-2 statement
        assert rep.diagnostics["kind"] == "spin"
        A2 = build_assignment(
            SamplerSpec(SamplerKind.UNIFORM_TORUS, 2, seed=4), small_table
        )
        assert not verify_theorem(A2, 1.0, Mode.SIGNED).extrapolation

    def test_witnesses(self, st_assignment):
        rep = verify_theorem(st_assignment, 1.5, Mode.ABS, include_witnesses=True)
        assert rep.witnesses is not None
        assert len(rep.witnesses) == rep.estimate.natural_ratios[-1] * len(st_assignment)
        for p, m in rep.witnesses[:10]:
            assert abs(m) >= 1.5


class TestLogLDecomposition:
    def test_matches_scalar_sum(self, small_table):
        A = build_assignment(SamplerSpec(SamplerKind.UNIFORM_TORUS, 2, seed=11), small_table)
        for kind in FactorKind:
            for s in (1.01, 2.0):
                dec = log_L_decomposition(A, kind, s)
                scalar = math.fsum(
                    log_local(A.tuple_at(i), kind, int(p), s)[0]
                    for i, p in enumerate(small_table.primes)
                )
                assert dec.log_l == pytest.approx(scalar, abs=1e-11)

    def test_remainder_within_cap(self, small_table):
        specs = [
            SamplerSpec(SamplerKind.SATO_TATE_G1, 1, seed=5),
            SamplerSpec(SamplerKind.UNIFORM_TORUS, 2, seed=6),
            SamplerSpec(SamplerKind.ANGLE_FAMILY, 1),
        ]
        for spec in specs:
            A = build_assignment(spec, small_table)
            for kind in FactorKind:
                for s in (1.01, 1.1, 2.0):
                    dec = log_L_decomposition(A, kind, s)
                    assert abs(dec.remainder) <= dec.remainder_cap

    def test_all_ones_g1_std_closed_form(self, small_table):
        A = build_assignment(SamplerSpec(SamplerKind.EXTREMAL_CONSTANT, 1, c=2.0), small_table)
        dec = log_L_decomposition(A, FactorKind.STD, 2.0)
        closed = -3.0 * math.fsum(
            math.log(1.0 - float(p) ** -2.0) for p in small_table.primes
        )
        assert dec.log_l == pytest.approx(closed, abs=1e-11)

    def test_single_prime_table(self):
        table = sieve(2)
        A = build_assignment(SamplerSpec(SamplerKind.EXTREMAL_CONSTANT, 1, c=2.0), table)
        dec = log_L_decomposition(A, FactorKind.STD, 2.0)
        assert dec.log_l == pytest.approx(-3.0 * math.log(0.75), abs=1e-12)
        assert abs(dec.remainder) <= dec.remainder_cap

    def test_s_validation(self, st_assignment):
        with pytest.raises(ValueError):
            log_L_decomposition(st_assignment, FactorKind.SPIN, 1.0)


class TestSharpnessHarness:
    def test_degenerate_c_rejected(self, small_table):
        with pytest.raises(ValueError):
            lfunc_sharpness_harness(0.0, small_table)

    def test_balanced_construction(self, table_1e5):
        rep = lfunc_sharpness_harness(1.0, table_1e5)
        assert rep.bound == 0.5
        assert rep.off_set_cap == rep.on_set_floor == rep.ceiling == 1.0
        assert rep.modulus == 3 and rep.residue == 1
        assert rep.density_headline == pytest.approx(0.5, abs=0.02)
        assert rep.max_abs_l < 10.0
        # D > C variant must grow monotonically as s drops toward 1
        assert rep.variant_monotone_growth
        assert rep.variant_l_values[-1] > rep.variant_l_values[0]

    def test_scales_linearly_in_C(self, small_table):
        a = lfunc_sharpness_harness(1.0, small_table)
        b = lfunc_sharpness_harness(2.0, small_table)
        for x, y in zip(a.l_values, b.l_values):
            assert y == pytest.approx(2.0 * x, rel=1e-12)


def test_assignment_validation(small_table):
    with pytest.raises(ValueError):
        SatakeAssignment(genus=2, table=small_table, angles=np.zeros((3, 3)))
    A = build_assignment(SamplerSpec(SamplerKind.UNIFORM_TORUS, 2, seed=1), small_table)
    assert A.validate(1e-10) == []
    bad = SatakeAssignment(
        genus=1, table=small_table, angles=np.full((len(small_table), 2), 0.3)
    )
    assert bad.validate(1e-10) != []


def test_tuple_at_round_trip(small_table):
    A = build_assignment(SamplerSpec(SamplerKind.UNIFORM_TORUS, 3, seed=2), small_table)
    t = A.tuple_at(5)
    assert t.genus == 3
    assert mu(t) == pytest.approx(float(A.mu_values[5]), abs=1e-10)
