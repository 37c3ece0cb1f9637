import numpy as np
import pytest

from vbroadcast.channels import (
    ChoiOperator,
    apply_choi,
    choi_of_map,
    depolarizing_choi,
    gamma_operator,
    identity_choi,
    replacement_choi,
)
from vbroadcast.diamond import half_diamond_distance, lower_bound_by_states
from vbroadcast.linalg import haar_unitary, min_eigenvalue, random_hermitian

D2 = 2


def hermitian_difference_choi(d, rng, scale=0.3):
    """Random traceless-ish Hermitian Choi difference of two channel-like maps."""
    h = scale * random_hermitian(d * d, rng)
    # remove the output-trace part so the map is trace annihilating, as a
    # difference of TP maps would be
    from vbroadcast.linalg import partial_trace

    marg = partial_trace(h, (d, d), drop=1)
    h = h - np.kron(marg, np.eye(d)) / d
    return ChoiOperator(h, d, (d,))


class TestClosedForms:
    @pytest.mark.parametrize("d", [2, 3])
    def test_identity_minus_replacement(self, d):
        phi = ChoiOperator(gamma_operator(d) - replacement_choi(d).op, d, (d,))
        res = half_diamond_distance(phi, lower_bound_samples=4)
        assert abs(res.value - (1 - 1 / d ** 2)) <= 1e-7
        assert res.certificate.passed

    def test_zero_map(self):
        phi = ChoiOperator(np.zeros((4, 4)), D2, (D2,))
        res = half_diamond_distance(phi, lower_bound_samples=4)
        assert abs(res.value) <= 1e-7
        assert abs(res.lower_bound) <= 1e-12

    @pytest.mark.parametrize("t,expected", [(0.4, 0.30), (-0.5, 0.375), (1.0, 0.75)])
    def test_depolarizing_difference(self, t, expected):
        phi = ChoiOperator(depolarizing_choi(t, D2).op - gamma_operator(D2), D2, (D2,))
        res = half_diamond_distance(phi, lower_bound_samples=4)
        assert abs(res.value - expected) <= 1e-6


class TestLowerBound:
    def test_maximally_entangled_candidate_is_tight_for_replacement(self):
        d = 2
        phi = ChoiOperator(gamma_operator(d) - replacement_choi(d).op, d, (d,))
        lb = lower_bound_by_states(phi, samples=1, seed=0)
        assert abs(lb - (1 - 1 / d ** 2)) <= 1e-12

    def test_zero_map_gives_zero(self):
        phi = ChoiOperator(np.zeros((4, 4)), D2, (D2,))
        assert lower_bound_by_states(phi, samples=8, seed=1) == 0.0

    def test_never_exceeds_sdp_value(self):
        rng = np.random.default_rng(41)
        for k in range(4):
            phi = hermitian_difference_choi(D2, rng)
            res = half_diamond_distance(phi, lower_bound_samples=64, seed=100 + k)
            assert res.lower_bound <= res.value + 1e-6

    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(42)
        phi = hermitian_difference_choi(D2, rng)
        a = lower_bound_by_states(phi, samples=32, seed=7)
        b = lower_bound_by_states(phi, samples=32, seed=7)
        assert a == b


class TestNormProperties:
    def test_scaling_homogeneity(self):
        rng = np.random.default_rng(43)
        phi = hermitian_difference_choi(D2, rng)
        base = half_diamond_distance(phi, lower_bound_samples=1).value
        for c in (-2.0, 0.5, 3.0):
            scaled = ChoiOperator(c * phi.op, D2, (D2,))
            val = half_diamond_distance(scaled, lower_bound_samples=1).value
            assert abs(val - abs(c) * base) <= 1e-7

    def test_triangle_inequality(self):
        rng = np.random.default_rng(44)
        for _ in range(3):
            a = hermitian_difference_choi(D2, rng)
            b = hermitian_difference_choi(D2, rng)
            ab = ChoiOperator(a.op + b.op, D2, (D2,))
            va = half_diamond_distance(a, lower_bound_samples=1).value
            vb = half_diamond_distance(b, lower_bound_samples=1).value
            vab = half_diamond_distance(ab, lower_bound_samples=1).value
            assert vab <= va + vb + 1e-7

    def test_unitary_invariance(self):
        rng = np.random.default_rng(45)
        phi = hermitian_difference_choi(D2, rng)
        u = haar_unitary(D2, rng)
        v = haar_unitary(D2, rng)
        conj = choi_of_map(
            lambda m: u @ apply_choi(phi, v @ m @ v.conj().T) @ u.conj().T,
            D2, (D2,))
        val = half_diamond_distance(phi, lower_bound_samples=1).value
        val_c = half_diamond_distance(conj, lower_bound_samples=1).value
        assert abs(val - val_c) <= 1e-7


class TestWitness:
    def test_witness_feasibility(self):
        d = 2
        phi = ChoiOperator(depolarizing_choi(0.6, d).op - gamma_operator(d), d, (d,))
        res = half_diamond_distance(phi, lower_bound_samples=1)
        z = res.witness_z
        assert min_eigenvalue(z) >= -1e-7
        assert min_eigenvalue(z - phi.op) >= -1e-7
        from vbroadcast.linalg import partial_trace

        cap = np.linalg.eigvalsh(partial_trace(z, (d, d), drop=1))[-1]
        assert cap <= res.value + 1e-6

    def test_value_dominates_lower_bound(self):
        d = 2
        phi = ChoiOperator(gamma_operator(d) - replacement_choi(d).op, d, (d,))
        res = half_diamond_distance(phi, lower_bound_samples=16)
        assert res.value >= res.lower_bound - 1e-6


def test_rejects_two_output_choi():
    j = choi_of_map(lambda m: np.kron(m, np.eye(2) / 2), 2, (2, 2))
    with pytest.raises(ValueError):
        half_diamond_distance(j)


def test_identity_choi_sanity():
    # distance between identity and itself is zero
    phi = ChoiOperator(identity_choi(2).op - gamma_operator(2), 2, (2,))
    assert abs(half_diamond_distance(phi, lower_bound_samples=1).value) <= 1e-8
