"""Dense backend: gate application, expectations, sampling, reductions."""
import numpy as np
import pytest

from vqsim import gates
from vqsim import statevector as sv
from vqsim.circuits import Circuit, Op, const

from conftest import random_bound_circuit, random_density


def ghz(n: int) -> sv.StateVector:
    ops = [Op("h", (0,))] + [Op("cnot", (q, q + 1)) for q in range(n - 1)]
    return sv.simulate(Circuit(n, tuple(ops)))


class TestApplyGate:
    def test_cnot_flips_target_when_control_set(self):
        state = sv.from_amplitudes([0, 0, 1, 0])  # |10>
        out = sv.apply_gate(state, gates.CNOT, [0, 1])
        np.testing.assert_allclose(out.amplitudes, [0, 0, 0, 1], atol=1e-14)

    def test_hadamard_makes_plus(self):
        out = sv.apply_gate(sv.zero_state(1), gates.H, [0])
        np.testing.assert_allclose(out.amplitudes, [1, 1] / np.sqrt(2), atol=1e-14)

    def test_ghz_circuit(self):
        state = ghz(3)
        expected = np.zeros(8)
        expected[0] = expected[7] = 1 / np.sqrt(2)
        np.testing.assert_allclose(state.amplitudes, expected, atol=1e-14)

    def test_rejects_repeated_targets(self):
        with pytest.raises(ValueError, match="repeated"):
            sv.apply_gate(sv.zero_state(2), gates.CNOT, [0, 0])

    def test_rejects_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension"):
            sv.apply_gate(sv.zero_state(2), gates.H, [0, 1])

    def test_norm_preserved_across_random_sequences(self, rng):
        for _ in range(10):
            n = int(rng.integers(1, 6))
            state = sv.simulate(random_bound_circuit(n, 6, rng))
            assert abs(np.linalg.norm(state.amplitudes) - 1.0) < 1e-9

    def test_gate_then_adjoint_restores_state(self, rng):
        state = sv.simulate(random_bound_circuit(3, 4, rng))
        u = gates.random_unitary(4, rng)
        back = sv.apply_gate(sv.apply_gate(state, u, [0, 2]), u.conj().T, [0, 2])
        np.testing.assert_allclose(back.amplitudes, state.amplitudes, atol=1e-10)

    def test_qubit0_is_most_significant_bit(self):
        out = sv.apply_gate(sv.zero_state(3), gates.X, [0])
        assert np.argmax(np.abs(out.amplitudes)) == 4  # |100> = index 4


class TestExpectation:
    def test_z_on_ground(self):
        assert sv.expectation(sv.zero_state(1), sv.Observable.single("Z")) == pytest.approx(1.0)

    def test_ry_rotation_gives_cos(self):
        state = sv.apply_gate(sv.zero_state(1), gates.ry(np.pi / 3), [0])
        assert sv.expectation(state, sv.Observable.single("Z")) == pytest.approx(0.5)

    def test_ghz_zz_correlation(self):
        # brute-force 8-dim contraction as the independent oracle
        state = ghz(3)
        mat = gates.pauli_string_matrix("ZZI")
        oracle = np.vdot(state.amplitudes, mat @ state.amplitudes).real
        assert sv.expectation(state, sv.Observable.single("ZZI")) == pytest.approx(oracle)
        assert oracle == pytest.approx(1.0)

    def test_weighted_sum_matches_dense_matrix(self, rng):
        obs = sv.Observable(((0.4, "XZY"), (-0.9, "ZIX"), (0.2, "III")))
        mat = 0.4 * gates.pauli_string_matrix("XZY") - 0.9 * gates.pauli_string_matrix("ZIX")
        mat += 0.2 * np.eye(8)
        for _ in range(5):
            state = sv.simulate(random_bound_circuit(3, 4, rng))
            oracle = np.vdot(state.amplitudes, mat @ state.amplitudes).real
            assert sv.expectation(state, obs) == pytest.approx(oracle, abs=1e-12)

    def test_bounded_by_coefficient_sum(self, rng):
        obs = sv.Observable(((0.4, "XZ"), (-0.9, "ZY")))
        for _ in range(20):
            state = sv.simulate(random_bound_circuit(2, 3, rng))
            assert abs(sv.expectation(state, obs)) <= 1.3 + 1e-12

    def test_width_mismatch_rejected(self):
        with pytest.raises(ValueError, match="width"):
            sv.expectation(sv.zero_state(2), sv.Observable.single("Z"))


class TestSampling:
    def test_deterministic_outcome_has_zero_stderr(self):
        mean, err = sv.sample_expectation(sv.zero_state(1), "Z", 500, 3)
        assert (mean, err) == (1.0, 0.0)

    def test_x_eigenstate_after_basis_change(self):
        plus = sv.apply_gate(sv.zero_state(1), gates.H, [0])
        mean, err = sv.sample_expectation(plus, "X", 100, 3)
        assert (mean, err) == (1.0, 0.0)

    def test_plus_state_z_statistics(self):
        plus = sv.apply_gate(sv.zero_state(1), gates.H, [0])
        mean, err = sv.sample_expectation(plus, "Z", 1024, 11)
        assert abs(mean) < 4 / 32
        assert err == pytest.approx(1 / 32, rel=0.05)

    def test_seed_reproducibility(self):
        plus = sv.apply_gate(sv.zero_state(1), gates.H, [0])
        a = sv.sample_expectation(plus, "Z", 300, 42)
        b = sv.sample_expectation(plus, "Z", 300, 42)
        assert a == b

    def test_zero_shots_rejected(self):
        with pytest.raises(ValueError):
            sv.sample_expectation(sv.zero_state(1), "Z", 0, 1)

    def test_consistency_with_exact_expectation(self, rng):
        # 5-sigma coverage over seeded trials at 1e5 shots
        hits = 0
        trials = 100
        for t in range(trials):
            state = sv.simulate(random_bound_circuit(3, 3, rng))
            pauli = ["XIZ", "ZYI", "XYZ"][t % 3]
            exact = sv.expectation(state, sv.Observable.single(pauli))
            mean, err = sv.sample_expectation(state, pauli, 100_000, t)
            if err == 0.0 or abs(mean - exact) < 5 * err:
                hits += 1
        assert hits >= 99


class TestReductions:
    def test_ghz_single_qubit_is_maximally_mixed(self):
        rho = sv.partial_trace(ghz(3), [0])
        np.testing.assert_allclose(rho.entries, np.eye(2) / 2, atol=1e-12)

    def test_product_state_reduction(self):
        state = sv.from_amplitudes([0, 1, 0, 0])  # |01>
        rho = sv.partial_trace(state, [1])
        np.testing.assert_allclose(rho.entries, [[0, 0], [0, 1]], atol=1e-14)

    def test_keep_everything_is_pure_projector(self):
        bell = sv.simulate(Circuit(2, (Op("h", (0,)), Op("cnot", (0, 1)))))
        rho = sv.partial_trace(bell, [0, 1])
        np.testing.assert_allclose(
            rho.entries, np.outer(bell.amplitudes, bell.amplitudes.conj()), atol=1e-14
        )

    def test_empty_keep_rejected(self):
        with pytest.raises(ValueError):
            sv.partial_trace(ghz(3), [])

    def test_product_cut_is_pure(self, rng):
        left = random_bound_circuit(2, 3, rng)
        a = sv.simulate(left).amplitudes
        b = sv.simulate(random_bound_circuit(2, 3, rng)).amplitudes
        product = sv.from_amplitudes(np.kron(a, b))
        rho = sv.partial_trace(product, [0, 1])
        assert sv.von_neumann_entropy(rho) < 1e-9


class TestEntropies:
    def test_maximally_mixed_qubit(self):
        rho = sv.DensityMatrix(2, np.eye(2, dtype=complex) / 2)
        assert sv.von_neumann_entropy(rho) == pytest.approx(np.log(2))
        assert sv.renyi2_entropy(rho) == pytest.approx(np.log(2))

    def test_pure_state_zero_entropy(self):
        rho = sv.DensityMatrix(2, np.diag([1.0, 0.0]).astype(complex))
        assert sv.von_neumann_entropy(rho) == pytest.approx(0.0, abs=1e-12)
        assert sv.renyi2_entropy(rho) == pytest.approx(0.0, abs=1e-12)

    def test_diag_three_quarters(self):
        rho = sv.DensityMatrix(2, np.diag([0.75, 0.25]).astype(complex))
        expected = -(0.75 * np.log(0.75) + 0.25 * np.log(0.25))
        assert sv.von_neumann_entropy(rho) == pytest.approx(expected, abs=1e-9)
        assert expected == pytest.approx(0.562335, abs=1e-6)
        assert sv.renyi2_entropy(rho) == pytest.approx(-np.log(10 / 16), abs=1e-12)

    def test_renyi_below_von_neumann(self, rng):
        for _ in range(1000):
            dim = int(rng.integers(2, 5))
            rho = sv.DensityMatrix(dim, random_density(dim, rng))
            assert sv.renyi2_entropy(rho) <= sv.von_neumann_entropy(rho) + 1e-9

    def test_non_hermitian_rejected(self):
        with pytest.raises(ValueError, match="Hermitian"):
            sv.DensityMatrix(2, np.array([[0.5, 0.5], [0.0, 0.5]], dtype=complex))


class TestBlochVector:
    def test_ground_state_points_up(self):
        rho = sv.partial_trace(sv.zero_state(1), [0])
        assert sv.bloch_vector(rho) == pytest.approx((0, 0, 1))

    def test_completely_mixed_is_origin(self):
        rho = sv.DensityMatrix(2, np.eye(2, dtype=complex) / 2)
        assert sv.bloch_vector(rho) == pytest.approx((0, 0, 0))

    def test_plus_state_points_x(self):
        plus = sv.apply_gate(sv.zero_state(1), gates.H, [0])
        rho = sv.partial_trace(plus, [0])
        assert sv.bloch_vector(rho) == pytest.approx((1, 0, 0), abs=1e-12)

    def test_norm_bounded(self, rng):
        for _ in range(50):
            rho = sv.DensityMatrix(2, random_density(2, rng))
            assert np.linalg.norm(sv.bloch_vector(rho)) <= 1 + 1e-9

    def test_wrong_dimension_rejected(self):
        with pytest.raises(ValueError):
            sv.bloch_vector(sv.DensityMatrix(4, np.eye(4, dtype=complex) / 4))


class TestMaskedGates:
    def test_mcz_phases_all_ones(self):
        state = sv.from_amplitudes(np.ones(8) / np.sqrt(8))
        out = sv.apply_phase_on_ones(state, [0, 1, 2], -1.0)
        assert out.amplitudes[-1] == pytest.approx(-1 / np.sqrt(8))
        np.testing.assert_allclose(out.amplitudes[:-1], state.amplitudes[:-1])

    def test_mcx_flips_only_when_controls_set(self):
        state = sv.from_amplitudes([0, 0, 0, 0, 0, 0, 1, 0])  # |110>
        out = sv.apply_multicontrolled_x(state, [0, 1], 2)
        assert np.argmax(np.abs(out.amplitudes)) == 7
