"""Single-qubit noise channels, Pauli transfer matrix algebra, inverse maps
and expectation-value deconvolution.

A channel is stored as Kraus operators; inverse maps are signed operator
sums (weights folded into the operators, signs +-1), since the inverse of a
nontrivial channel is never completely positive.  Deconvolution rewrites
the target observable with the adjoint inverse map and evaluates it on the
noisy state, recovering the ideal expectation value as classical
post-processing.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import cos, exp, sin, sqrt
from typing import TYPE_CHECKING, Sequence

import numpy as np

from . import gates

if TYPE_CHECKING:
    from .circuits.core import Circuit

SIGMA = (gates.I2, gates.X, gates.Y, gates.Z)
AXES = ("x", "y", "z")
SINGULAR_DET_TOL = 1e-12


@dataclass(frozen=True)
class KrausChannel:
    kraus_ops: tuple[np.ndarray, ...]
    kind: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        total = sum(a.conj().T @ a for a in self.kraus_ops)
        if np.max(np.abs(total - np.eye(2))) > 1e-10:
            raise ValueError("Kraus operators do not resolve the identity")

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return sum(a @ rho @ a.conj().T for a in self.kraus_ops)

    def apply_n(self, rho: np.ndarray, m: int) -> np.ndarray:
        for _ in range(m):
            rho = self.apply(rho)
        return rho


@dataclass(frozen=True)
class SignedOperatorSum:
    """Hermiticity-preserving map sum_k s_k A_k (.) A_k^dagger with s_k = +-1."""

    terms: tuple[tuple[int, np.ndarray], ...]

    def __post_init__(self):
        for sign, _ in self.terms:
            if sign not in (-1, 1):
                raise ValueError("signs must be +-1")

    def apply(self, op: np.ndarray) -> np.ndarray:
        return sum(s * a @ op @ a.conj().T for s, a in self.terms)

    def has_negative_term(self) -> bool:
        return any(s == -1 for s, _ in self.terms)


def make_channel(kind: str, **params) -> KrausChannel:
    """Named single-qubit channels.

    Kinds: bit_flip(p), phase_flip(p), bit_phase_flip(p), depolarizing(p),
    pauli(p_x, p_y, p_z), amplitude_damping(gamma), generalized_ad(gamma, p),
    two_kraus(alpha, beta), decoherence(t, T1, T2).
    """
    if kind in ("bit_flip", "phase_flip", "bit_phase_flip"):
        p = _prob(params["p"])
        sigma = {"bit_flip": gates.X, "phase_flip": gates.Z, "bit_phase_flip": gates.Y}[kind]
        ops = (sqrt(1 - p) * gates.I2, sqrt(p) * sigma)
        return KrausChannel(ops, kind, dict(params))
    if kind == "depolarizing":
        p = _prob(params["p"])
        ops = (
            sqrt(1 - 3 * p / 4) * gates.I2,
            sqrt(p) / 2 * gates.X,
            sqrt(p) / 2 * gates.Y,
            sqrt(p) / 2 * gates.Z,
        )
        return KrausChannel(ops, kind, dict(params))
    if kind == "pauli":
        px, py, pz = (_prob(params[k]) for k in ("p_x", "p_y", "p_z"))
        p0 = 1.0 - px - py - pz
        if p0 < -1e-12:
            raise ValueError("Pauli probabilities must sum to at most 1")
        p0 = max(p0, 0.0)
        ops = (
            sqrt(p0) * gates.I2,
            sqrt(px) * gates.X,
            sqrt(py) * gates.Y,
            sqrt(pz) * gates.Z,
        )
        return KrausChannel(ops, kind, dict(params))
    if kind == "amplitude_damping":
        g = params["gamma"]
        if not 0.0 <= g < 1.0:
            raise ValueError("gamma must lie in [0, 1)")
        v0 = np.array([[1, 0], [0, sqrt(1 - g)]], dtype=complex)
        v1 = np.array([[0, sqrt(g)], [0, 0]], dtype=complex)
        return KrausChannel((v0, v1), kind, dict(params))
    if kind == "generalized_ad":
        g, p = params["gamma"], _prob(params["p"])
        if not 0.0 <= g < 1.0:
            raise ValueError("gamma must lie in [0, 1)")
        a0 = sqrt(p) * np.array([[1, 0], [0, sqrt(1 - g)]], dtype=complex)
        a1 = sqrt(p) * np.array([[0, sqrt(g)], [0, 0]], dtype=complex)
        a2 = sqrt(1 - p) * np.array([[sqrt(1 - g), 0], [0, 1]], dtype=complex)
        a3 = sqrt(1 - p) * np.array([[0, 0], [sqrt(g), 0]], dtype=complex)
        return KrausChannel((a0, a1, a2, a3), kind, dict(params))
    if kind == "two_kraus":
        al, be = params["alpha"], params["beta"]
        a1 = np.array([[cos(al), 0], [0, cos(be)]], dtype=complex)
        a2 = np.array([[0, sin(be)], [sin(al), 0]], dtype=complex)
        return KrausChannel((a1, a2), kind, dict(params))
    if kind == "decoherence":
        t, t1, t2 = params["t"], params["T1"], params["T2"]
        if min(t, t1, t2) <= 0:
            raise ValueError("t, T1 and T2 must be positive")
        if t2 > 2 * t1 + 1e-12:
            raise ValueError("physical decoherence requires T2 <= 2 T1")
        gamma, p = decoherence_parameters(t, t1, t2)
        dephase = make_channel("phase_flip", p=p)
        damp = make_channel("amplitude_damping", gamma=gamma)
        combined = compose(damp, dephase)  # dephasing first, then damping
        return KrausChannel(combined.kraus_ops, kind, dict(params, gamma=gamma, p=p))
    raise ValueError(f"unknown channel kind {kind!r}")


def decoherence_parameters(t: float, t1: float, t2: float) -> tuple[float, float]:
    """(gamma, p) of the damping/dephasing pair for an idle time t."""
    gamma = 1.0 - exp(-t / t1)
    p = 0.5 * (1.0 - exp(-(t / t2 - t / (2 * t1))))
    return gamma, p


def _prob(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} outside [0, 1]")
    return float(p)


def compose(outer: KrausChannel, inner: KrausChannel) -> KrausChannel:
    """Channel applying `inner` first, then `outer`."""
    ops = tuple(a @ b for a in outer.kraus_ops for b in inner.kraus_ops)
    return KrausChannel(ops, "custom", {})


def compose_maps(outer: SignedOperatorSum, inner: SignedOperatorSum) -> SignedOperatorSum:
    terms = tuple(
        (so * si, ao @ ai) for so, ao in outer.terms for si, ai in inner.terms
    )
    return SignedOperatorSum(terms)


def ptm_of(channel: KrausChannel | SignedOperatorSum) -> np.ndarray:
    """Gamma_ij = (1/2) Tr[sigma_i Phi(sigma_j)] over the (I, X, Y, Z) basis."""
    gamma = np.empty((4, 4))
    for j in range(4):
        image = channel.apply(SIGMA[j])
        for i in range(4):
            gamma[i, j] = 0.5 * np.trace(SIGMA[i] @ image).real
    return gamma


def apply_map_from_ptm(gamma: np.ndarray, op: np.ndarray) -> np.ndarray:
    coeffs = np.array([0.5 * np.trace(SIGMA[i] @ op) for i in range(4)])
    out_coeffs = gamma @ coeffs
    return sum(out_coeffs[i] * SIGMA[i] for i in range(4))


def _sum_from_choi(gamma: np.ndarray) -> SignedOperatorSum:
    """Signed operator sum of an arbitrary Hermiticity-preserving PTM.

    Eigendecomposition of the Choi matrix; eigenvector k reshaped is the
    operator, the eigenvalue's sign is the weight's sign.
    """
    basis = [np.zeros((2, 2), dtype=complex) for _ in range(4)]
    for k, (i, j) in enumerate([(0, 0), (0, 1), (1, 0), (1, 1)]):
        basis[k][i, j] = 1.0
    choi = np.zeros((4, 4), dtype=complex)
    for k, (i, j) in enumerate([(0, 0), (0, 1), (1, 0), (1, 1)]):
        image = apply_map_from_ptm(gamma, basis[k])
        choi += np.kron(image, basis[k])
    evals, evecs = np.linalg.eigh(choi)
    terms = []
    for lam, vec in zip(evals, evecs.T):
        if abs(lam) < 1e-12:
            continue
        a = sqrt(abs(lam)) * vec.reshape(2, 2)
        terms.append((1 if lam > 0 else -1, a))
    return SignedOperatorSum(tuple(terms))


def invert_channel(channel: KrausChannel) -> SignedOperatorSum:
    """Linear inverse of the channel as a signed operator sum.

    Closed forms for the named kinds; any other channel goes through numeric
    PTM inversion and a Choi reconstruction.  Raises for singular channels
    (|det Gamma| <= 1e-12, e.g. a flip channel at p = 1/2).
    """
    gamma = ptm_of(channel)
    det = np.linalg.det(gamma)
    if abs(det) <= SINGULAR_DET_TOL:
        raise ValueError(f"channel is singular (|det Gamma| = {abs(det):.3e})")
    kind, params = channel.kind, channel.params
    if kind in ("bit_flip", "phase_flip", "bit_phase_flip"):
        p = params["p"]
        sigma = {"bit_flip": gates.X, "phase_flip": gates.Z, "bit_phase_flip": gates.Y}[kind]
        b0, b1 = (1 - p) / (1 - 2 * p), p / (1 - 2 * p)
        return SignedOperatorSum(((1, sqrt(b0) * gates.I2), (-1, sqrt(b1) * sigma)))
    if kind == "depolarizing":
        p = params["p"]
        b0 = (4 - p) / (4 * (1 - p))
        b = p / (4 * (1 - p))
        return SignedOperatorSum(
            ((1, sqrt(b0) * gates.I2),)
            + tuple((-1, sqrt(b) * s) for s in (gates.X, gates.Y, gates.Z))
        )
    if kind == "pauli":
        px, py, pz = params["p_x"], params["p_y"], params["p_z"]
        a = 1 - 2 * (py + pz)
        b = 1 - 2 * (px + pz)
        c = 1 - 2 * (px + py)
        betas = (
            (1 + 1 / a + 1 / b + 1 / c) / 4,
            (1 + 1 / a - 1 / b - 1 / c) / 4,
            (1 - 1 / a + 1 / b - 1 / c) / 4,
            (1 - 1 / a - 1 / b + 1 / c) / 4,
        )
        terms = tuple(
            (1 if beta >= 0 else -1, sqrt(abs(beta)) * s)
            for beta, s in zip(betas, SIGMA)
            if abs(beta) > 1e-15
        )
        return SignedOperatorSum(terms)
    if kind == "amplitude_damping":
        g = params["gamma"]
        k0 = np.array([[1, 0], [0, 1 / sqrt(1 - g)]], dtype=complex)
        k1 = np.array([[0, sqrt(g / (1 - g))], [0, 0]], dtype=complex)
        return SignedOperatorSum(((1, k0), (-1, k1)))
    if kind == "generalized_ad":
        g, p = params["gamma"], params["p"]
        b0 = sqrt(p) * np.array([[1, 0], [0, 1 / sqrt(1 - g)]], dtype=complex)
        b1 = sqrt(p) * np.array([[0, sqrt(g / (1 - g))], [0, 0]], dtype=complex)
        b2 = sqrt(1 - p) * np.array([[1 / sqrt(1 - g), 0], [0, 1]], dtype=complex)
        b3 = sqrt(1 - p) * np.array([[0, 0], [sqrt(g / (1 - g)), 0]], dtype=complex)
        return SignedOperatorSum(((1, b0), (-1, b1), (1, b2), (-1, b3)))
    if kind == "two_kraus":
        al, be = params["alpha"], params["beta"]
        h = 2.0 / (cos(2 * al) + cos(2 * be))
        if h <= 0:
            raise ValueError("two-Kraus channel not invertible for these angles")
        b1 = sqrt(h) * np.array([[cos(be), 0], [0, cos(al)]], dtype=complex)
        b2 = sqrt(h) * np.array([[0, sin(be)], [sin(al), 0]], dtype=complex)
        return SignedOperatorSum(((1, b1), (-1, b2)))
    if kind == "decoherence":
        g, p = params["gamma"], params["p"]
        inv_damp = invert_channel(make_channel("amplitude_damping", gamma=g))
        inv_dephase = invert_channel(make_channel("phase_flip", p=p))
        # N = damp o dephase, hence N^-1 = dephase^-1 o damp^-1
        return compose_maps(inv_dephase, inv_damp)
    return _sum_from_choi(np.linalg.inv(gamma))


def adjoint(m: SignedOperatorSum | KrausChannel) -> SignedOperatorSum:
    """Replace every operator by its conjugate transpose, signs preserved.

    The adjoint of a non-unital channel is not trace preserving, so channel
    adjoints come back as plain (all-positive) operator sums.
    """
    if isinstance(m, KrausChannel):
        return SignedOperatorSum(tuple((1, a.conj().T) for a in m.kraus_ops))
    return SignedOperatorSum(tuple((s, a.conj().T) for s, a in m.terms))


def quantum_estimator(obs: np.ndarray, axis: str) -> np.ndarray:
    """(3 Tr[O sigma_a]/2) sigma_a + (Tr O / 2) I for axis a in {x, y, z}.

    Averaging its expectation over the three axes with weight 1/3 reproduces
    <O> on any state.
    """
    sigma = {"x": gates.X, "y": gates.Y, "z": gates.Z}[axis]
    return (1.5 * np.trace(obs @ sigma).real) * sigma + (
        0.5 * np.trace(obs).real
    ) * gates.I2


def _adjoint_inverse_ptm(channel: KrausChannel, repetitions: int = 1) -> np.ndarray:
    """PTM of the adjoint inverse of `repetitions` applications of the channel."""
    gamma = ptm_of(channel)
    gamma_m = np.linalg.matrix_power(gamma, repetitions)
    if abs(np.linalg.det(gamma_m)) <= SINGULAR_DET_TOL:
        raise ValueError("repeated channel is singular; cannot deconvolve")
    return np.linalg.inv(gamma_m).T


def deconvolve_observable(
    obs: np.ndarray,
    noisy_means: dict[str, float],
    channel: KrausChannel,
    stderrs: dict[str, float] | None = None,
    repetitions: int = 1,
) -> tuple[float, float]:
    """Noise-free <O> from noisy Pauli means via the adjoint inverse map.

    <O> = Tr O / 2 + (1/2) sum_a Tr[O sigma_a] <adj-inv(sigma_a)>_noisy.
    Axes whose coefficient vanishes may be omitted from `noisy_means`.
    Returns (mean, stderr); the stderr combines the per-axis noisy errors
    with the same linear weights that scale the means.
    """
    if obs.shape != (2, 2):
        raise ValueError("deconvolution handles single-qubit observables")
    gam_hat_inv = _adjoint_inverse_ptm(channel, repetitions)
    mean = 0.5 * np.trace(obs).real
    var = 0.0
    for a, axis in enumerate(AXES, start=1):
        weight = 0.5 * np.trace(obs @ SIGMA[a]).real
        if abs(weight) < 1e-14:
            continue
        # adj-inv(sigma_a) = sum_i Gamma^hat-inv[i, a] sigma_i
        coeffs = gam_hat_inv[:, a]
        mean += weight * coeffs[0]
        for b, baxis in enumerate(AXES, start=1):
            if abs(coeffs[b]) < 1e-14:
                continue
            if baxis not in noisy_means or noisy_means[baxis] is None:
                raise ValueError(f"deconvolution needs the noisy <sigma_{baxis}> estimate")
            mean += weight * coeffs[b] * noisy_means[baxis]
            if stderrs is not None:
                var += (weight * coeffs[b] * stderrs.get(baxis, 0.0)) ** 2
    return float(mean), float(np.sqrt(var))


def observable_mean_from_paulis(obs: np.ndarray, means: dict[str, float]) -> float:
    """<O> assembled from single-qubit Pauli means (no deconvolution)."""
    total = 0.5 * np.trace(obs).real
    for i, a in enumerate(AXES, start=1):
        w = 0.5 * np.trace(obs @ SIGMA[i]).real
        if abs(w) > 1e-14:
            total += w * means[a]
    return float(total)


def repeated_decoherence_means(
    noisy: dict[str, float], gamma: float, p: float, m: int
) -> dict[str, float]:
    """Closed-form deconvolution of m stacked decoherence channels."""
    contr = ((1 - 2 * p) * sqrt(1 - gamma)) ** m
    gz = (1 - gamma) ** m
    out = {}
    if "x" in noisy:
        out["x"] = noisy["x"] / contr
    if "y" in noisy:
        out["y"] = noisy["y"] / contr
    if "z" in noisy:
        out["z"] = (noisy["z"] - 1 + gz) / gz
    return out


# --- end-to-end self-consistency simulation -------------------------------


def _density_from_circuit(prep: "Circuit") -> np.ndarray:
    from . import statevector as sv

    if prep.n_qubits != 1:
        raise ValueError("self-consistency runs use single-qubit preparations")
    psi = sv.simulate(prep).amplitudes
    return np.outer(psi, psi.conj())


def pauli_means_exact(rho: np.ndarray) -> dict[str, float]:
    return {a: float(np.trace(SIGMA[i] @ rho).real) for i, a in enumerate(AXES, start=1)}


def sample_pauli_means(
    rho: np.ndarray, shots: int, rng: np.random.Generator
) -> tuple[dict[str, float], dict[str, float]]:
    """Binomial sampling of the three Pauli means on a 1-qubit density."""
    means, errs = {}, {}
    for i, a in enumerate(AXES, start=1):
        p_plus = min(max((1.0 + np.trace(SIGMA[i] @ rho).real) / 2.0, 0.0), 1.0)
        ups = rng.binomial(shots, p_plus)
        outcomes_mean = (2.0 * ups - shots) / shots
        var = 1.0 - outcomes_mean**2  # population variance of +-1 outcomes
        means[a] = float(outcomes_mean)
        errs[a] = float(np.sqrt(max(var, 0.0) / shots))
    return means, errs


@dataclass
class DeconvolutionRecord:
    ideal: float
    noisy: dict[str, float]
    stderrs: dict[str, float]
    mitigated: float
    mitigated_stderr: float
    shots: int | None
    repetitions: int

    def to_dict(self) -> dict:
        return {
            "ideal": self.ideal,
            "noisy": self.noisy,
            "stderrs": self.stderrs,
            "mitigated": self.mitigated,
            "mitigated_stderr": self.mitigated_stderr,
            "shots": self.shots,
            "repetitions": self.repetitions,
        }


def self_consistency_run(
    channel: KrausChannel,
    state_prep: "Circuit",
    obs: np.ndarray,
    shots: int | None,
    rng: np.random.Generator | int | None = None,
    repetitions: int = 1,
) -> DeconvolutionRecord:
    """Prepare, apply the channel `repetitions` times, estimate, deconvolve.

    shots=None runs in exact mode (noisy means read off the density matrix);
    otherwise Pauli means are sampled with the given generator.
    """
    rho = _density_from_circuit(state_prep)
    ideal = float(np.trace(obs @ rho).real)
    noisy_rho = channel.apply_n(rho, repetitions)
    if shots is None:
        noisy = pauli_means_exact(noisy_rho)
        errs = {a: 0.0 for a in AXES}
    else:
        if isinstance(rng, (int, np.integer)) or rng is None:
            rng = np.random.default_rng(rng)
        noisy, errs = sample_pauli_means(noisy_rho, shots, rng)
    mitigated, mit_err = deconvolve_observable(
        obs, noisy, channel, stderrs=errs, repetitions=repetitions
    )
    return DeconvolutionRecord(ideal, noisy, errs, mitigated, mit_err, shots, repetitions)
