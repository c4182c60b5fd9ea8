"""Randomness witnesses: expressibility (KL against the Haar fidelity law)
and the half-chain Schmidt-spectrum distance to a Haar-random ensemble.
"""
from __future__ import annotations

import numpy as np
from scipy.stats import ks_2samp

from .. import statevector as sv
from ..circuits.core import Circuit
from ..rng import stream
from .haar import haar_schmidt_samples

__all__ = [
    "expressibility",
    "expressibility_from_fidelities",
    "spectrum_distribution_distance",
]

DEFAULT_BINS = 75
DEFAULT_SAMPLES = 5000
SMOOTHING = 1e-12


def _log_haar_bin_masses(n: int, bins: int) -> np.ndarray:
    """log of integral_{bin} (N-1)(1-F)^(N-2) dF, evaluated in log space.

    The cumulative mass above F = a is (1-a)^(N-1); high-F bins underflow in
    linear arithmetic for N = 2^n even at modest n, so the bin mass
    (1-a)^(N-1) - (1-b)^(N-1) is assembled from logs.
    """
    edges = np.linspace(0.0, 1.0, bins + 1)
    big = 2**n - 1
    out = np.empty(bins)
    for i in range(bins):
        a, b = edges[i], edges[i + 1]
        log_upper = big * np.log1p(-a)
        if b >= 1.0:
            out[i] = log_upper
            continue
        ratio = big * (np.log1p(-b) - np.log1p(-a))
        out[i] = log_upper + np.log1p(-np.exp(ratio))
    return out


def expressibility_from_fidelities(fids: np.ndarray, n: int, bins: int = DEFAULT_BINS) -> float:
    """KL divergence (nats) of the fidelity histogram from the Haar law.

    Empty histogram bins get an additive 1e-12 smoothing; the Haar reference
    P(F) = (N-1)(1-F)^(N-2) is handled in log space so its tail bins never
    underflow to zero.
    """
    fids = np.asarray(fids, dtype=float)
    counts, _ = np.histogram(np.clip(fids, 0.0, 1.0), bins=bins, range=(0.0, 1.0))
    p_hat = counts / counts.sum() + SMOOTHING
    log_q = _log_haar_bin_masses(n, bins)
    return float(np.sum(p_hat * (np.log(p_hat) - log_q)))


def circuit_fidelity_samples(
    circuit: Circuit,
    samples: int,
    rng: np.random.Generator,
    angle_range: tuple[float, float] = (0.0, np.pi),
) -> np.ndarray:
    """|<psi(v1)|psi(v2)>|^2 over pairs of uniform feature+parameter draws."""
    compiled = sv.CompiledCircuit(circuit)
    n_f, n_t = circuit.n_features(), circuit.n_trainable()
    lo, hi = angle_range

    def draw_state() -> np.ndarray:
        x = rng.uniform(lo, hi, n_f)
        t = rng.uniform(lo, hi, n_t)
        return compiled.tensor(features=x, params=t).reshape(-1)

    out = np.empty(samples)
    for i in range(samples):
        a, b = draw_state(), draw_state()
        out[i] = abs(np.vdot(a, b)) ** 2
    return out


def expressibility(
    circuit: Circuit,
    samples: int = DEFAULT_SAMPLES,
    bins: int = DEFAULT_BINS,
    seed: int = 0,
    angle_range: tuple[float, float] = (0.0, np.pi),
) -> float:
    """Fidelity-distribution KL divergence of the circuit ensemble (lower =
    more expressible)."""
    if samples < 10 * bins:
        raise ValueError("need at least 10 samples per histogram bin")
    rng = stream(seed, 0)
    fids = circuit_fidelity_samples(circuit, samples, rng, angle_range)
    return expressibility_from_fidelities(fids, circuit.n_qubits, bins)


def circuit_schmidt_samples(
    circuit: Circuit,
    samples: int,
    rng: np.random.Generator,
    cut: int | None = None,
    angle_range: tuple[float, float] = (0.0, np.pi),
) -> np.ndarray:
    """Pooled squared Schmidt values at the centre cut over random draws."""
    compiled = sv.CompiledCircuit(circuit)
    n = circuit.n_qubits
    cut = cut if cut is not None else n // 2
    n_f, n_t = circuit.n_features(), circuit.n_trainable()
    lo, hi = angle_range
    pools = []
    for _ in range(samples):
        x = rng.uniform(lo, hi, n_f)
        t = rng.uniform(lo, hi, n_t)
        psi = compiled.tensor(features=x, params=t).reshape(2**cut, -1)
        pools.append(np.linalg.svd(psi, compute_uv=False) ** 2)
    return np.concatenate(pools)


def spectrum_distribution_distance(
    circuit: Circuit,
    samples: int,
    seed: int = 0,
    cut: int | None = None,
    haar_samples: int | None = None,
    angle_range: tuple[float, float] = (0.0, np.pi),
) -> float:
    """Two-sample KS distance between the circuit's pooled half-chain
    Schmidt spectrum and that of same-size Haar states."""
    if samples < 10:
        raise ValueError("need at least 10 sample runs")
    n = circuit.n_qubits
    cut = cut if cut is not None else n // 2
    rng = stream(seed, 0)
    circuit_pool = circuit_schmidt_samples(circuit, samples, rng, cut, angle_range)
    haar_rng = stream(seed, 1)
    haar_pool = haar_schmidt_samples(n, haar_samples or samples, haar_rng, cut)
    return float(ks_2samp(circuit_pool, haar_pool).statistic)
