import math

import numpy as np
import pytest

from vbroadcast import simulator as sim
from vbroadcast.broadcasting import discard_prepare_point
from vbroadcast.channels import (
    BroadcastDecomposition,
    ChoiOperator,
    apply_choi,
    choi_of_map,
    depolarizing_choi,
    marginal_choi,
)

PAULI_Z = np.diag([1.0, -1.0])
KET0 = np.diag([1.0, 0.0]).astype(complex)


def trivial_decomposition(d=2):
    """rho -> rho (x) I/d as the positive part with weight one."""
    j1 = choi_of_map(lambda m: np.kron(m, np.eye(d) / d), d, (d, d))
    j2 = ChoiOperator(np.zeros((d ** 3, d ** 3)), d, (d, d))
    return BroadcastDecomposition(j1=j1, j2=j2, x=1.0, y=0.0)


class TestRequiredSamples:
    def test_reference_value(self):
        hb = sim.required_samples(2.0, 1.0, 0.1, 0.05)
        assert hb.n == math.ceil(400 * math.log(40))
        assert hb.n == 1476

    def test_budget_scales_with_nu_squared(self):
        # the pre-ceiling budget scales exactly by 4; the integer counts match
        # up to the two rounding operations
        raw = lambda nu: 2.0 ** 2 * nu ** 2 / 0.1 ** 2 * math.log(2 / 0.05)
        n1 = sim.required_samples(2.0, 1.0, 0.1, 0.05).n
        n2 = sim.required_samples(2.0, 2.0, 0.1, 0.05).n
        assert raw(2.0) == 4.0 * raw(1.0)
        assert n2 == math.ceil(4.0 * raw(1.0))
        assert abs(n2 - 4 * n1) <= 3

    def test_exact_virtual_broadcast_loses_to_naive(self):
        # nu = 5/3 against the two-receiver split cost nu_eff = sqrt(2)
        budget_exact = sim.required_samples(2.0, 5.0 / 3.0, 0.1, 0.05).n
        budget_naive = sim.required_samples(2.0, math.sqrt(2.0), 0.1, 0.05).n
        assert budget_exact / budget_naive >= (25.0 / 9.0) / 2.0 - 1e-3
        assert budget_exact > budget_naive

    def test_input_validation(self):
        with pytest.raises(ValueError):
            sim.required_samples(-1.0, 1.0, 0.1, 0.05)
        with pytest.raises(ValueError):
            sim.required_samples(1.0, 1.0, 0.1, 1.5)


class TestObservable:
    def test_degenerate_merging(self):
        obs = sim.Observable.from_matrix(np.diag([1.0, 1.0, -1.0]))
        assert obs.values.tolist() == [-1.0, 1.0]
        assert obs.range_m == 2.0
        np.testing.assert_allclose(sum(obs.projectors), np.eye(3), atol=1e-12)

    def test_probabilities(self):
        obs = sim.Observable.from_matrix(PAULI_Z)
        probs = obs.outcome_probabilities(np.eye(2) / 2)
        np.testing.assert_allclose(probs, [0.5, 0.5], atol=1e-12)

    def test_negative_probability_guard(self):
        obs = sim.Observable.from_matrix(PAULI_Z)
        bad_state = np.diag([1.15, -0.15])
        with pytest.raises(ValueError, match="negative outcome probability"):
            obs.outcome_probabilities(bad_state)


class TestRunProtocol:
    def test_identity_observable_is_deterministic(self):
        dec = trivial_decomposition()
        obs = sim.Observable.from_matrix(np.eye(2))
        est = sim.run_protocol(dec, KET0, obs, marginal=1, shots=100, seed=5)
        assert est.mean == 1.0
        assert est.n_plus == 100 and est.n_minus == 0

    def test_explicit_point_statistics(self):
        dec, delta, _ = discard_prepare_point(2.0, 2)
        obs = sim.Observable.from_matrix(PAULI_Z)
        t = (3 - math.sqrt(2)) / 4
        expected = 1.0 - t
        est = sim.run_protocol(dec, KET0, obs, marginal=1, shots=10 ** 5, seed=42)
        se = est.sample_std / math.sqrt(est.shots)
        assert abs(est.mean - expected) <= 4 * se

    def test_bias_respects_diamond_bound(self):
        dec, delta, _ = discard_prepare_point(2.0, 2)
        obs = sim.Observable.from_matrix(PAULI_Z)
        analytic = sim.protocol_expectation(dec, KET0, obs, marginal=1)
        truth = float(np.real(np.trace(obs.op @ KET0)))
        assert abs(analytic - truth) <= sim.bias_bound(obs, delta) + 1e-12

    def test_unbiasedness_identity(self):
        # estimator expectation == Tr[O marginal(E(rho))], computed two ways
        rng = np.random.default_rng(51)
        from vbroadcast.broadcasting import approx_overhead
        from vbroadcast.linalg import random_density

        dec = approx_overhead((0.2, 0.2), 2).decomposition
        obs = sim.Observable.from_matrix(PAULI_Z)
        for _ in range(3):
            rho = random_density(2, rng)
            analytic = sim.protocol_expectation(dec, rho, obs, marginal=2)
            diff = marginal_choi(dec.difference(), drop=1)
            direct = float(np.real(np.trace(obs.op @ apply_choi(diff, rho))))
            assert abs(analytic - direct) <= 1e-12

    def test_seed_determinism(self):
        dec, _, _ = discard_prepare_point(1.5, 2)
        obs = sim.Observable.from_matrix(PAULI_Z)
        a = sim.run_protocol(dec, KET0, obs, marginal=1, shots=5000, seed=11)
        b = sim.run_protocol(dec, KET0, obs, marginal=1, shots=5000, seed=11)
        assert a == b
        c = sim.run_protocol(dec, KET0, obs, marginal=1, shots=5000, seed=12)
        assert c.mean != a.mean

    def test_convergence_over_many_seeds(self):
        dec, _, _ = discard_prepare_point(2.0, 2)
        obs = sim.Observable.from_matrix(PAULI_Z)
        expected = sim.protocol_expectation(dec, KET0, obs, marginal=1)
        hits = 0
        reps, shots = 100, 10 ** 6
        for seed in range(reps):
            est = sim.run_protocol(dec, KET0, obs, marginal=1, shots=shots, seed=seed)
            se = est.sample_std / math.sqrt(shots)
            hits += abs(est.mean - expected) <= 5 * se
        assert hits >= 99

    def test_weight_mismatch_guard(self):
        dec, _, _ = discard_prepare_point(2.0, 2)
        bad = BroadcastDecomposition(j1=dec.j1, j2=dec.j2, x=1.0, y=0.0)
        obs = sim.Observable.from_matrix(PAULI_Z)
        with pytest.raises(ValueError, match="weight"):
            sim.run_protocol(bad, KET0, obs, marginal=1, shots=10, seed=0)

    def test_non_physical_branch_guard(self):
        d = 2
        t = -0.3
        j1 = choi_of_map(
            lambda m: np.kron(apply_choi(depolarizing_choi(t, d), m), np.eye(d) / d),
            d, (d, d))
        dec = BroadcastDecomposition(
            j1=j1, j2=ChoiOperator(np.zeros((8, 8)), d, (d, d)), x=1.0, y=0.0)
        obs = sim.Observable.from_matrix(PAULI_Z)
        with pytest.raises(ValueError, match="negative outcome probability"):
            sim.run_protocol(dec, KET0, obs, marginal=1, shots=10, seed=0)


class TestNaiveBaseline:
    def test_identity_observable(self):
        obs = sim.Observable.from_matrix(np.eye(2))
        est = sim.naive_baseline(KET0, obs, shots=100, seed=3)
        assert est.mean == 1.0
        assert est.scale == 1.0

    def test_maximally_mixed_z(self):
        obs = sim.Observable.from_matrix(PAULI_Z)
        est = sim.naive_baseline(np.eye(2) / 2, obs, shots=10 ** 5, seed=4)
        se = est.sample_std / math.sqrt(est.shots)
        assert abs(est.mean) <= 4 * se

    def test_variance_overhead_vs_naive(self):
        # population second moments: virtual nu^2 * E[lambda^2] vs naive E[lambda^2]
        dec, _, _ = discard_prepare_point(2.0, 2)
        obs = sim.Observable.from_matrix(PAULI_Z)
        rho = np.eye(2) / 2
        est = sim.run_protocol(dec, rho, obs, marginal=1, shots=10 ** 5, seed=21)
        base = sim.naive_baseline(rho, obs, shots=10 ** 5, seed=22)
        m2v = est.sample_std ** 2 + est.mean ** 2
        m2n = base.sample_std ** 2 + base.mean ** 2
        # closed form: every outcome is +-nu for the protocol, +-1 for naive
        assert abs(m2v / m2n - dec.nu ** 2) <= 0.1 * dec.nu ** 2


def test_protocol_estimate_fields():
    dec, _, _ = discard_prepare_point(1.5, 2)
    obs = sim.Observable.from_matrix(PAULI_Z)
    est = sim.run_protocol(dec, KET0, obs, marginal=2, shots=1000, seed=9)
    assert est.n_plus + est.n_minus == est.shots == 1000
    assert est.scale == dec.nu
    assert est.seed == 9
