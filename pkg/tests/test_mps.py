"""MPS backend against the dense oracle, truncation ledger, gauge checks."""
import numpy as np
import pytest

from vqsim import gates, mps
from vqsim import statevector as sv
from vqsim.circuits import Circuit, Op, const

from conftest import random_bound_circuit


def dense_bond_entropy(state: sv.StateVector, cut: int) -> float:
    # stated oracle: partial trace over the smaller side, then the spectrum
    n = state.n_qubits
    keep = list(range(cut)) if cut <= n - cut else list(range(cut, n))
    rho = sv.partial_trace(state, keep)
    return sv.von_neumann_entropy(rho)


def ghz_circuit(n: int) -> Circuit:
    ops = [Op("h", (0,))] + [Op("cnot", (q, q + 1)) for q in range(n - 1)]
    return Circuit(n, tuple(ops))


class TestGroundState:
    def test_all_entropies_zero(self):
        state = mps.mps_from_ground(3)
        np.testing.assert_allclose(mps.all_bond_entropies(state), 0.0)

    def test_single_site_shape(self):
        state = mps.mps_from_ground(1)
        assert state.tensors[0].shape == (1, 2, 1)

    def test_large_chain_is_cheap(self):
        state = mps.mps_from_ground(50)
        assert state.bond_dimensions() == [1] * 49

    def test_zero_qubits_rejected(self):
        with pytest.raises(ValueError):
            mps.mps_from_ground(0)


class TestTwoQubitGate:
    def test_bell_pair_schmidt_values(self):
        state = mps.mps_from_ground(2)
        mps.mps_apply_one_qubit(state, gates.H, 0)
        mps.mps_apply_two_qubit(state, gates.CNOT, 0, mps.TruncationPolicy(chi_max=2))
        np.testing.assert_allclose(
            mps.schmidt_values(state, 1), [1 / np.sqrt(2)] * 2, atol=1e-12
        )
        assert mps.fidelity_lower_bound(state) == 1.0

    def test_bell_truncated_to_product_costs_quarter(self):
        state = mps.mps_from_ground(2)
        mps.mps_apply_one_qubit(state, gates.H, 0)
        mps.mps_apply_two_qubit(state, gates.CNOT, 0, mps.TruncationPolicy(chi_max=1))
        assert state.ledger.per_gate_fidelities[-1] == pytest.approx(0.25)
        assert mps.fidelity_lower_bound(state) == pytest.approx(0.25)

    def test_two_independent_truncations_multiply(self):
        state = mps.mps_from_ground(4)
        policy = mps.TruncationPolicy(chi_max=1)
        for pair in ((0, 1), (2, 3)):
            mps.mps_apply_one_qubit(state, gates.H, pair[0])
            mps.mps_apply_two_qubit(state, gates.CNOT, pair[0], policy)
        assert mps.fidelity_lower_bound(state) == pytest.approx(0.0625)

    def test_identity_gate_records_unit_fidelity(self):
        state = mps.mps_from_ground(2)
        mps.mps_apply_two_qubit(state, np.eye(4, dtype=complex), 0, mps.TruncationPolicy())
        assert state.ledger.per_gate_fidelities == [1.0]

    def test_nonunitary_gate_rejected(self):
        state = mps.mps_from_ground(2)
        bad = np.eye(4, dtype=complex)
        bad[0, 0] = 2.0
        with pytest.raises(ValueError, match="unitary"):
            mps.mps_apply_two_qubit(state, bad, 0, mps.TruncationPolicy())

    def test_singular_values_stay_normalized(self, rng):
        circ = random_bound_circuit(5, 6, rng)
        state = mps.simulate(circ, mps.TruncationPolicy(chi_max=3))
        for lam in state.singular_values:
            assert abs((lam**2).sum() - 1.0) < 1e-8


class TestNonadjacentGate:
    def test_cnot_0_2_on_basis_state(self):
        circ = Circuit(3, (Op("x", (0,)),))
        state = mps.simulate(circ, mps.TruncationPolicy())
        mps.mps_apply_nonadjacent(state, gates.CNOT, (0, 2), mps.TruncationPolicy())
        out = mps.mps_to_statevector(state)
        assert np.argmax(np.abs(out.amplitudes)) == 0b101

    def test_long_range_cz_matches_dense(self):
        n = 6
        ops = [Op("h", (q,)) for q in range(n)] + [Op("cz", (0, n - 1))]
        circ = Circuit(n, tuple(ops))
        dense = sv.simulate(circ)
        state = mps.simulate(circ, mps.TruncationPolicy())
        out = mps.mps_to_statevector(state)
        assert abs(abs(np.vdot(dense.amplitudes, out.amplitudes)) - 1) < 1e-8

    def test_adjacent_pair_reduces_to_plain_update(self):
        a = mps.mps_from_ground(3)
        b = mps.mps_from_ground(3)
        mps.mps_apply_one_qubit(a, gates.H, 0)
        mps.mps_apply_one_qubit(b, gates.H, 0)
        mps.mps_apply_nonadjacent(a, gates.CNOT, (0, 1), mps.TruncationPolicy())
        mps.mps_apply_two_qubit(b, gates.CNOT, 0, mps.TruncationPolicy())
        np.testing.assert_allclose(
            mps.mps_to_statevector(a).amplitudes,
            mps.mps_to_statevector(b).amplitudes,
            atol=1e-12,
        )

    def test_reversed_pair_applies_flipped_gate(self):
        circ = Circuit(2, (Op("x", (1,)),))
        state = mps.simulate(circ, mps.TruncationPolicy())
        mps.mps_apply_nonadjacent(state, gates.CNOT, (1, 0), mps.TruncationPolicy())
        out = mps.mps_to_statevector(state)
        assert np.argmax(np.abs(out.amplitudes)) == 0b11

    def test_same_index_rejected(self):
        state = mps.mps_from_ground(3)
        with pytest.raises(ValueError):
            mps.mps_apply_nonadjacent(state, gates.CNOT, (1, 1), mps.TruncationPolicy())


class TestBondEntropy:
    def test_ghz_every_bond_log2(self):
        state = mps.simulate(ghz_circuit(3), mps.TruncationPolicy())
        np.testing.assert_allclose(mps.all_bond_entropies(state), np.log(2), atol=1e-12)

    def test_matches_dense_oracle_on_random_circuit(self, rng):
        n = 8
        circ = random_bound_circuit(n, 8, rng)
        dense = sv.simulate(circ)
        state = mps.simulate(circ, mps.TruncationPolicy())
        for k in range(1, n):
            assert mps.bond_entropy(state, k) == pytest.approx(
                dense_bond_entropy(dense, k), abs=1e-7
            )

    def test_bond_range_checked(self):
        state = mps.mps_from_ground(3)
        with pytest.raises(ValueError):
            mps.bond_entropy(state, 0)
        with pytest.raises(ValueError):
            mps.bond_entropy(state, 3)


class TestFidelityLedger:
    def test_untruncated_run_is_exactly_one(self, rng):
        circ = random_bound_circuit(6, 6, rng)
        state = mps.simulate(circ, mps.TruncationPolicy(chi_max=8))
        assert mps.fidelity_lower_bound(state) == 1.0

    def test_truncation_monotone_in_chi(self, rng):
        circ = random_bound_circuit(6, 8, rng)
        bounds = []
        for chi in (8, 4, 2, 1):
            state = mps.simulate(circ, mps.TruncationPolicy(chi_max=chi))
            bounds.append(mps.fidelity_lower_bound(state))
        assert all(b1 >= b2 - 1e-12 for b1, b2 in zip(bounds, bounds[1:]))

    def test_reliability_flag(self, rng):
        circ = random_bound_circuit(8, 10, rng)
        good = mps.simulate(circ, mps.TruncationPolicy(chi_max=16))
        bad = mps.simulate(circ, mps.TruncationPolicy(chi_max=2))
        assert mps.is_reliable(good)
        assert not mps.is_reliable(bad)

    def test_bound_actually_lower_bounds_overlap(self, rng):
        circ = random_bound_circuit(6, 8, rng)
        exact = sv.simulate(circ)
        state = mps.simulate(circ, mps.TruncationPolicy(chi_max=3))
        overlap = abs(np.vdot(exact.amplitudes, mps.mps_to_statevector(state).amplitudes)) ** 2
        assert mps.fidelity_lower_bound(state) <= overlap + 1e-9


class TestContraction:
    def test_ground_contracts_to_zero_ket(self):
        out = mps.mps_to_statevector(mps.mps_from_ground(4))
        assert out.amplitudes[0] == pytest.approx(1.0)

    def test_ghz_roundtrip(self):
        out = mps.mps_to_statevector(mps.simulate(ghz_circuit(5), mps.TruncationPolicy()))
        dense = sv.simulate(ghz_circuit(5))
        assert abs(abs(np.vdot(out.amplitudes, dense.amplitudes)) - 1) < 1e-12

    def test_random_circuit_roundtrip(self, rng):
        circ = random_bound_circuit(10, 6, rng)
        out = mps.mps_to_statevector(mps.simulate(circ, mps.TruncationPolicy(chi_max=1024)))
        dense = sv.simulate(circ)
        assert abs(abs(np.vdot(out.amplitudes, dense.amplitudes)) - 1) < 1e-7

    def test_size_cap(self):
        with pytest.raises(ValueError):
            mps.mps_to_statevector(mps.mps_from_ground(21))


class TestGauge:
    def test_recanonicalization_preserves_entropies(self, rng):
        circ = random_bound_circuit(7, 7, rng)
        state = mps.simulate(circ, mps.TruncationPolicy(chi_max=6))
        before = mps.all_bond_entropies(state)
        after = mps.all_bond_entropies(mps.recanonicalize(state))
        np.testing.assert_allclose(before, after, atol=1e-9)

    def test_recanonicalization_preserves_the_state(self, rng):
        circ = random_bound_circuit(6, 5, rng)
        state = mps.simulate(circ, mps.TruncationPolicy())
        a = mps.mps_to_statevector(state).amplitudes
        b = mps.mps_to_statevector(mps.recanonicalize(state)).amplitudes
        assert abs(abs(np.vdot(a, b)) - 1) < 1e-10
