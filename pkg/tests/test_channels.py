"""Noise channels, PTM algebra, inverse maps, deconvolution."""
import numpy as np
import pytest

from vqsim import channels as ch
from vqsim import gates
from vqsim.circuits import Circuit, Op, const

from conftest import random_density

NAMED_GRID = [
    ("bit_flip", [{"p": p} for p in np.linspace(0.0, 0.45, 10)]),
    ("phase_flip", [{"p": p} for p in np.linspace(0.0, 0.45, 10)]),
    ("bit_phase_flip", [{"p": p} for p in np.linspace(0.0, 0.45, 10)]),
    ("depolarizing", [{"p": p} for p in np.linspace(0.0, 0.9, 10)]),
    (
        "pauli",
        [
            {"p_x": px, "p_y": 0.05, "p_z": 0.12}
            for px in np.linspace(0.0, 0.3, 10)
        ],
    ),
    ("amplitude_damping", [{"gamma": g} for g in np.linspace(0.0, 0.9, 10)]),
    (
        "generalized_ad",
        [{"gamma": g, "p": 0.7} for g in np.linspace(0.0, 0.9, 10)],
    ),
    ("two_kraus", [{"alpha": a, "beta": 0.4} for a in np.linspace(0.0, 0.7, 10)]),
    (
        "decoherence",
        [
            {"t": t, "T1": 35.91e-6, "T2": 25.11e-6}
            for t in np.linspace(10e-9, 400e-9, 10)
        ],
    ),
]


class TestMakeChannel:
    def test_bit_flip_zero_probability_is_identity(self, rng):
        chan = ch.make_channel("bit_flip", p=0.0)
        rho = random_density(2, rng)
        np.testing.assert_allclose(chan.apply(rho), rho, atol=1e-14)

    def test_two_kraus_with_equal_angles_is_bit_flip(self, rng):
        alpha = 0.6
        two = ch.make_channel("two_kraus", alpha=alpha, beta=alpha)
        flip = ch.make_channel("bit_flip", p=np.sin(alpha) ** 2)
        rho = random_density(2, rng)
        np.testing.assert_allclose(two.apply(rho), flip.apply(rho), atol=1e-12)

    def test_decoherence_parameters_from_relaxation_times(self):
        t, t1, t2 = 40e-9, 35.91e-6, 25.11e-6
        gamma, p = ch.decoherence_parameters(t, t1, t2)
        assert gamma == pytest.approx(1 - np.exp(-t / t1), abs=1e-15)
        assert p == pytest.approx(0.5 * (1 - np.exp(-(t / t2 - t / (2 * t1)))), abs=1e-15)
        chan = ch.make_channel("decoherence", t=t, T1=t1, T2=t2)
        assert chan.params["gamma"] == pytest.approx(gamma)

    def test_decoherence_is_damping_after_dephasing(self, rng):
        chan = ch.make_channel("decoherence", t=100e-9, T1=30e-6, T2=20e-6)
        dephase = ch.make_channel("phase_flip", p=chan.params["p"])
        damp = ch.make_channel("amplitude_damping", gamma=chan.params["gamma"])
        rho = random_density(2, rng)
        np.testing.assert_allclose(
            chan.apply(rho), damp.apply(dephase.apply(rho)), atol=1e-12
        )

    def test_unphysical_relaxation_times_rejected(self):
        with pytest.raises(ValueError, match="T2"):
            ch.make_channel("decoherence", t=1e-9, T1=1e-6, T2=3e-6)

    def test_out_of_range_probability_rejected(self):
        with pytest.raises(ValueError):
            ch.make_channel("bit_flip", p=1.5)

    def test_kraus_completeness_enforced(self):
        with pytest.raises(ValueError):
            ch.KrausChannel((gates.I2 * 0.5,))


class TestPtm:
    def test_bit_flip_ptm(self):
        gamma = ch.ptm_of(ch.make_channel("bit_flip", p=0.2))
        np.testing.assert_allclose(gamma, np.diag([1, 1, 0.6, 0.6]), atol=1e-12)

    def test_damping_at_zero_is_identity(self):
        gamma = ch.ptm_of(ch.make_channel("amplitude_damping", gamma=0.0))
        np.testing.assert_allclose(gamma, np.eye(4), atol=1e-12)

    def test_depolarizing_ptm(self):
        gamma = ch.ptm_of(ch.make_channel("depolarizing", p=0.3))
        np.testing.assert_allclose(gamma, np.diag([1, 0.7, 0.7, 0.7]), atol=1e-12)

    def test_trace_preserving_first_row(self, rng):
        for kind, grid in NAMED_GRID:
            gamma = ch.ptm_of(ch.make_channel(kind, **grid[3]))
            np.testing.assert_allclose(gamma[0], [1, 0, 0, 0], atol=1e-12)


class TestInversion:
    def test_bit_flip_closed_form_weights(self):
        inv = ch.invert_channel(ch.make_channel("bit_flip", p=0.25))
        weights = sorted(
            (s, float((a @ a.conj().T)[0, 0].real)) for s, a in inv.terms
        )
        assert weights[0][0] == -1 and weights[0][1] == pytest.approx(0.5)
        assert weights[1][0] == 1 and weights[1][1] == pytest.approx(1.5)

    def test_depolarizing_inverse_formula(self, rng):
        p = 0.3
        inv = ch.invert_channel(ch.make_channel("depolarizing", p=p))
        obs = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        obs = (obs + obs.conj().T).astype(complex)
        expected = (obs - p / 2 * np.trace(obs) * np.eye(2)) / (1 - p)
        np.testing.assert_allclose(inv.apply(obs), expected, atol=1e-12)

    def test_singular_flip_rejected(self):
        with pytest.raises(ValueError, match="singular"):
            ch.invert_channel(ch.make_channel("bit_flip", p=0.5))

    @pytest.mark.parametrize("kind,grid", NAMED_GRID)
    def test_closed_form_matches_numeric_ptm_inverse(self, kind, grid):
        for params in grid:
            chan = ch.make_channel(kind, **params)
            gamma = ch.ptm_of(chan)
            if abs(np.linalg.det(gamma)) <= 1e-12:
                continue
            inv = ch.invert_channel(chan)
            np.testing.assert_allclose(
                ch.ptm_of(inv), np.linalg.inv(gamma), atol=1e-9
            )

    @pytest.mark.parametrize("kind,grid", NAMED_GRID)
    def test_inverse_is_not_completely_positive(self, kind, grid):
        # nontrivial channels: skip the identity end of each grid
        for params in grid[1:]:
            chan = ch.make_channel(kind, **params)
            if abs(np.linalg.det(ch.ptm_of(chan))) <= 1e-12:
                continue
            assert ch.invert_channel(chan).has_negative_term()

    def test_generic_choi_path_matches_closed_form(self, rng):
        chan = ch.make_channel("pauli", p_x=0.08, p_y=0.1, p_z=0.05)
        generic = ch.KrausChannel(chan.kraus_ops)  # kind forgotten -> numeric path
        inv_closed = ch.invert_channel(chan)
        inv_generic = ch.invert_channel(generic)
        np.testing.assert_allclose(
            ch.ptm_of(inv_generic), ch.ptm_of(inv_closed), atol=1e-9
        )


class TestAdjoint:
    def test_pauli_generated_maps_are_self_adjoint(self):
        inv = ch.invert_channel(ch.make_channel("bit_flip", p=0.2))
        adj = ch.adjoint(inv)
        for (s1, a1), (s2, a2) in zip(inv.terms, adj.terms):
            assert s1 == s2
            np.testing.assert_allclose(a1, a2, atol=1e-14)

    def test_damping_inverse_transposes_offdiagonal_kraus(self):
        inv = ch.invert_channel(ch.make_channel("amplitude_damping", gamma=0.4))
        adj = ch.adjoint(inv)
        np.testing.assert_allclose(adj.terms[1][1], inv.terms[1][1].conj().T, atol=1e-14)
        assert not np.allclose(inv.terms[1][1], adj.terms[1][1])

    def test_double_adjoint_is_identity_transform(self):
        chan = ch.make_channel("generalized_ad", gamma=0.3, p=0.6)
        twice = ch.adjoint(ch.adjoint(chan))
        for a, (sign, b) in zip(chan.kraus_ops, twice.terms):
            assert sign == 1
            np.testing.assert_allclose(a, b, atol=1e-14)

    def test_adjoint_ptm_is_transpose(self):
        chan = ch.make_channel("amplitude_damping", gamma=0.35)
        np.testing.assert_allclose(
            ch.ptm_of(ch.adjoint(chan)), ch.ptm_of(chan).T, atol=1e-12
        )


class TestQuantumEstimator:
    def test_sigma_z_axes(self):
        np.testing.assert_allclose(ch.quantum_estimator(gates.Z, "z"), 3 * gates.Z, atol=1e-14)
        np.testing.assert_allclose(ch.quantum_estimator(gates.Z, "x"), 0 * gates.Z, atol=1e-14)

    def test_identity_reconstructs_to_one(self, rng):
        rho = random_density(2, rng)
        total = sum(
            np.trace(ch.quantum_estimator(gates.I2, ax) @ rho).real / 3
            for ax in ("x", "y", "z")
        )
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_reconstruction_matches_trace(self, rng):
        obs = (gates.X + gates.Z) / 2
        for _ in range(20):
            rho = random_density(2, rng)
            total = sum(
                np.trace(ch.quantum_estimator(obs, ax) @ rho).real / 3
                for ax in ("x", "y", "z")
            )
            assert total == pytest.approx(np.trace(obs @ rho).real, abs=1e-10)


class TestDeconvolution:
    def test_depolarizing_rescale(self):
        chan = ch.make_channel("depolarizing", p=0.2)
        mit, _ = ch.deconvolve_observable(gates.X, {"x": 0.4}, chan)
        assert mit == pytest.approx(0.5)

    def test_amplitude_damping_z_shift(self):
        chan = ch.make_channel("amplitude_damping", gamma=0.5)
        mit, _ = ch.deconvolve_observable(gates.Z, {"z": 0.75}, chan)
        assert mit == pytest.approx(0.5)

    def test_flip_along_measurement_axis_is_transparent(self):
        chan = ch.make_channel("bit_flip", p=0.3)
        mit, _ = ch.deconvolve_observable(gates.X, {"x": 0.62}, chan)
        assert mit == pytest.approx(0.62)

    def test_missing_required_axis_raises(self):
        chan = ch.make_channel("depolarizing", p=0.2)
        with pytest.raises(ValueError, match="sigma_y"):
            ch.deconvolve_observable(gates.Y, {"x": 0.1}, chan)

    def test_stderr_scales_by_axis_multiplier(self):
        p = 0.2
        chan = ch.make_channel("depolarizing", p=p)
        _, err = ch.deconvolve_observable(
            gates.X, {"x": 0.4}, chan, stderrs={"x": 0.01}
        )
        assert err == pytest.approx(0.01 / (1 - p))

    @pytest.mark.parametrize("kind,grid", NAMED_GRID)
    def test_roundtrip_recovers_ideal_on_random_densities(self, kind, grid, rng):
        for params in grid:
            chan = ch.make_channel(kind, **params)
            if abs(np.linalg.det(ch.ptm_of(chan))) <= 1e-12:
                continue
            for _ in range(20):
                rho = random_density(2, rng)
                obs = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
                obs = (obs + obs.conj().T).astype(complex)
                noisy = ch.pauli_means_exact(chan.apply(rho))
                mit, _ = ch.deconvolve_observable(obs, noisy, chan)
                assert mit == pytest.approx(np.trace(obs @ rho).real, abs=1e-9)

    def test_depolarizing_commutes_with_unitaries(self, rng):
        chan = ch.make_channel("depolarizing", p=0.3)
        for _ in range(20):
            u = gates.random_unitary(2, rng)
            rho = random_density(2, rng)
            a = chan.apply(u @ rho @ u.conj().T)
            b = u @ chan.apply(rho) @ u.conj().T
            np.testing.assert_allclose(a, b, atol=1e-10)

    def test_composed_depolarizing_strength(self, rng):
        p1, p2 = 0.1, 0.25
        composed = ch.compose(
            ch.make_channel("depolarizing", p=p2), ch.make_channel("depolarizing", p=p1)
        )
        total = ch.make_channel("depolarizing", p=1 - (1 - p1) * (1 - p2))
        rho = random_density(2, rng)
        np.testing.assert_allclose(composed.apply(rho), total.apply(rho), atol=1e-12)

    def test_repeated_decoherence_closed_form_matches_generic(self, rng):
        chan = ch.make_channel("decoherence", t=50e-9, T1=30e-6, T2=22e-6)
        g, p = chan.params["gamma"], chan.params["p"]
        for m in (1, 3, 7):
            rho = random_density(2, rng)
            noisy = ch.pauli_means_exact(chan.apply_n(rho, m))
            closed = ch.repeated_decoherence_means(noisy, g, p, m)
            ideal = ch.pauli_means_exact(rho)
            for ax in "xyz":
                assert closed[ax] == pytest.approx(ideal[ax], abs=1e-9)
            mit, _ = ch.deconvolve_observable(gates.Z, noisy, chan, repetitions=m)
            assert mit == pytest.approx(ideal["z"], abs=1e-9)


class TestSelfConsistencyRun:
    @staticmethod
    def ry_prep(theta: float) -> Circuit:
        return Circuit(1, (Op("ry", (0,), const(theta)),))

    def test_zero_noise_channel_is_transparent(self):
        chan = ch.make_channel("pauli", p_x=0.0, p_y=0.0, p_z=0.0)
        rec = ch.self_consistency_run(chan, self.ry_prep(0.8), gates.Z, None)
        assert rec.mitigated == pytest.approx(rec.ideal, abs=1e-12)
        assert rec.noisy["z"] == pytest.approx(rec.ideal, abs=1e-12)

    def test_exact_mode_recovers_ideal(self):
        chan = ch.make_channel("pauli", p_x=0.1, p_y=0.05, p_z=0.2)
        for theta in np.linspace(0, 2 * np.pi, 9):
            rec = ch.self_consistency_run(chan, self.ry_prep(theta), gates.Z, None)
            assert rec.mitigated == pytest.approx(rec.ideal, abs=1e-9)

    def test_sampled_sweep_tracks_ideal_within_scaled_stderr(self):
        chan = ch.make_channel("pauli", p_x=0.1, p_y=0.05, p_z=0.2)
        for i, theta in enumerate(np.linspace(0, 2 * np.pi, 15)):
            rec = ch.self_consistency_run(
                chan, self.ry_prep(theta), gates.Z, shots=20_000, rng=100 + i
            )
            slack = max(5 * rec.mitigated_stderr, 1e-6)
            assert abs(rec.mitigated - rec.ideal) < slack

    def test_decoherence_depth_sweep_decays_and_mitigates(self):
        chan = ch.make_channel("decoherence", t=40e-9, T1=35.91e-6, T2=25.11e-6)
        g, p = chan.params["gamma"], chan.params["p"]
        prep = Circuit(1, (Op("h", (0,)),))
        contraction = (1 - 2 * p) * np.sqrt(1 - g)
        for depth in (1, 50, 200):
            rec = ch.self_consistency_run(chan, prep, gates.X, None, repetitions=depth)
            assert rec.noisy["x"] == pytest.approx(contraction**depth, abs=1e-10)
            assert rec.mitigated == pytest.approx(1.0, abs=1e-8)

    def test_multi_qubit_preparation_rejected(self):
        chan = ch.make_channel("bit_flip", p=0.1)
        prep = Circuit(2, (Op("h", (0,)),))
        with pytest.raises(ValueError):
            ch.self_consistency_run(chan, prep, gates.Z, None)
