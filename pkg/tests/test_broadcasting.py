import math

import numpy as np
import pytest

from vbroadcast import broadcasting as bc
from vbroadcast.channels import (
    ChoiOperator,
    canonical_broadcast_choi,
    depolarizing_choi,
    gamma_operator,
    marginal_choi,
)
from vbroadcast.diamond import half_diamond_distance
from vbroadcast.sdp import SolverConfig


class TestOverheadOfMap:
    def test_physical_channel_costs_one(self):
        res = bc.overhead_of_map(depolarizing_choi(0.5, 2))
        assert res.status == "optimal"
        assert abs(res.nu - 1.0) <= 1e-6
        assert res.decomposition.y <= 1e-6

    def test_channel_mixture_costs_one(self):
        j = ChoiOperator(0.5 * depolarizing_choi(0.0, 2).op
                         + 0.5 * depolarizing_choi(1.0, 2).op, 2, (2,))
        res = bc.overhead_of_map(j)
        assert abs(res.nu - 1.0) <= 1e-6

    def test_canonical_broadcaster_is_bounded_by_optimum(self):
        res = bc.overhead_of_map(canonical_broadcast_choi(2, 0.0))
        assert res.status == "optimal"
        assert res.certificate.passed
        # a particular broadcasting map can never beat the optimum over all
        assert res.nu >= 5.0 / 3.0 - 1e-6


class TestExactOverhead:
    def test_qubit_value(self):
        res = bc.exact_overhead(2)
        assert abs(res.nu - 5.0 / 3.0) <= 1e-6
        assert abs(res.s - 25.0 / 9.0) <= 1e-5
        assert not res.sample_efficient

    def test_decomposition_is_broadcasting(self):
        res = bc.exact_overhead(2)
        res.decomposition.validate(tol=1e-6)
        diff = res.decomposition.difference()
        g = gamma_operator(2)
        assert np.linalg.norm(marginal_choi(diff, 1).op - g) <= 1e-5
        assert np.linalg.norm(marginal_choi(diff, 2).op - g) <= 1e-5


class TestApproxOverhead:
    def test_zero_thresholds_reduce_to_exact(self):
        res = bc.approx_overhead((0.0, 0.0), 2)
        assert abs(res.nu - 5.0 / 3.0) <= 1e-6

    def test_max_noise_is_free(self):
        delta = (2 ** 2 - 1) / 2 ** 2   # 0.75: the fully depolarizing point
        res = bc.approx_overhead((delta, delta), 2)
        assert abs(res.nu - 1.0) <= 1e-6

    def test_figure_read_budget_point(self):
        res = bc.approx_overhead((0.12, 0.12), 2)
        assert abs(res.nu - math.sqrt(1.8)) <= 0.03

    def test_marginal_errors_respect_thresholds(self):
        thr = 0.2
        res = bc.approx_overhead((thr, thr), 2)
        diff = res.decomposition.difference()
        g = gamma_operator(2)
        for m in (1, 2):
            phi = ChoiOperator(marginal_choi(diff, drop=3 - m).op - g, 2, (2,))
            val = half_diamond_distance(phi, lower_bound_samples=1).value
            assert val <= thr + 1e-5

    def test_threshold_validation(self):
        with pytest.raises(ValueError):
            bc.approx_overhead((1.5, 0.0), 2)


class TestDepolarizingReduction:
    def test_zero_noise_is_exact(self):
        assert abs(bc.approx_overhead_depolarizing(0.0, 2).nu - 5.0 / 3.0) <= 1e-6

    def test_matches_full_formulation(self):
        full = bc.approx_overhead((0.12, 0.12), 2).nu
        red = bc.approx_overhead_depolarizing(0.12, 2).nu
        assert abs(full - red) <= 1e-5

    def test_noise_clamp_beyond_depolarizing(self):
        res = bc.approx_overhead_depolarizing(0.9, 2)   # t clamps at 1
        assert res.t == 1.0
        assert abs(res.nu - 1.0) <= 1e-6


class TestFixedMarginalOverhead:
    def test_full_noise_costs_one(self):
        assert abs(bc.depolarizing_overhead(1.0, 2).nu - 1.0) <= 1e-7

    def test_zero_noise_matches_exact(self):
        assert abs(bc.depolarizing_overhead(0.0, 2).nu - 5.0 / 3.0) <= 1e-6

    def test_monotone_sample(self):
        z3 = bc.depolarizing_overhead(0.3, 2).nu
        z1 = bc.depolarizing_overhead(0.1, 2).nu
        z0 = bc.depolarizing_overhead(0.0, 2).nu
        assert z3 <= z1 + 1e-6 <= z0 + 2e-6


class TestMinError:
    def test_channel_budget_anchor(self):
        p = bc.min_error(1.0, 2)
        assert abs(p.mu - 0.25) <= 1e-4
        assert abs(p.t - 1.0 / 3.0) <= 1e-3

    def test_exact_budget_needs_no_error(self):
        for d in (2, 3):
            gamma = ((3 * d - 1) / (d + 1)) ** 2
            p = bc.min_error(gamma, d)
            assert p.mu <= 1e-5

    def test_budget_below_one_infeasible(self):
        p = bc.min_error(0.8, 2)
        assert p.status == "primal_infeasible_certificate"
        assert math.isnan(p.mu)

    def test_budget_constraint_active(self):
        p = bc.min_error(1.8, 2)
        assert (p.decomposition.nu) ** 2 <= 1.8 + 1e-6

    def test_inverse_consistency(self):
        for gamma in (1.2, 1.5, 1.8, 2.0):
            mu = bc.min_error(gamma, 2).mu
            s = bc.approx_overhead_depolarizing(mu, 2).s
            assert s <= gamma + 1e-4


class TestExplicitConstruction:
    def test_reference_numbers_at_budget_two(self):
        dec, delta, rep = bc.discard_prepare_point(2.0, 2)
        assert abs(dec.x - (math.sqrt(2) + 1) / 2) <= 1e-12
        assert abs(dec.y - (math.sqrt(2) - 1) / 2) <= 1e-12
        assert abs(dec.nu - math.sqrt(2)) <= 1e-12
        assert abs(delta - 0.75 * (3 - math.sqrt(2)) / 4) <= 1e-12
        assert abs(rep["t"] - (3 - math.sqrt(2)) / 4) <= 1e-12

    def test_budget_one_is_physical(self):
        dec, delta, rep = bc.discard_prepare_point(1.0, 2)
        assert dec.y == 0.0
        assert np.linalg.norm(dec.j2.op) <= 1e-12
        assert abs(delta - 0.75 * 0.5) <= 1e-12

    def test_budget_nine_is_exact(self):
        d = 2
        dec, delta, rep = bc.discard_prepare_point(9.0, d)
        assert abs(delta) <= 1e-12
        diff = dec.difference()
        g = gamma_operator(d)
        assert np.linalg.norm(marginal_choi(diff, 1).op - g) <= 1e-12
        assert np.linalg.norm(marginal_choi(diff, 2).op - g) <= 1e-12

    def test_marginals_are_depolarizing(self):
        d = 3
        gamma = 1.5
        dec, _, rep = bc.discard_prepare_point(gamma, d)
        assert rep["marginal1_residual"] <= 1e-12
        assert rep["marginal2_residual"] <= 1e-12
        lam = depolarizing_choi(rep["t"], d).op
        got = marginal_choi(dec.difference(), drop=2).op
        np.testing.assert_allclose(got, lam, atol=1e-12)

    def test_range_validation(self):
        with pytest.raises(ValueError):
            bc.discard_prepare_point(0.5, 2)
        with pytest.raises(ValueError):
            bc.discard_prepare_point(9.5, 2)


class TestUpperBound:
    def test_dimension_free_cap(self):
        # large-d limit of the coefficient is 1
        assert abs(bc.min_error_upper_bound(2.0, 10 ** 3)
                   - (3 - math.sqrt(2)) / 4) <= 1e-5

    def test_exact_budget_gives_zero(self):
        assert bc.min_error_upper_bound(9.0, 5) == 0.0
        assert bc.min_error_upper_bound(16.0, 5) == 0.0

    def test_qubit_value_and_ordering(self):
        bound = bc.min_error_upper_bound(1.8, 2)
        assert abs(bound - 0.75 * (3 - math.sqrt(1.8)) / 4) <= 1e-12
        assert bc.min_error(1.8, 2).mu <= bound + 1e-6

    def test_budget_below_one_rejected(self):
        with pytest.raises(ValueError):
            bc.min_error_upper_bound(0.5, 2)


def test_overhead_result_decomposition_invariants():
    res = bc.approx_overhead((0.1, 0.1), 2)
    report = res.decomposition.validate(tol=1e-6)
    assert report["min_eig_j1"] >= -1e-6
    assert abs(res.nu - res.decomposition.nu) <= 1e-7
    assert res.s == res.nu ** 2


def test_tight_config_threading():
    cfg = SolverConfig(tol_gap=1e-9, tol_feas=1e-9)
    res = bc.depolarizing_overhead(1.0, 2, config=cfg)
    assert abs(res.nu - 1.0) <= 1e-8
