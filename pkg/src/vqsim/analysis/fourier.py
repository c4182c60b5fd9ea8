"""Fourier structure of data-encoding circuits and the spectrum-based
generalization bound.

Encoding gates exp(-i x_i H) contribute the pairwise eigenvalue differences
of H (times the coordinate's unit vector) to the frequency spectrum; gates
compose by Minkowski sum.  A model whose integer spectrum is bounded by
L_max is reconstructed exactly by a DFT over >= 2 L_max + 1 equispaced
samples of one period.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import log, sqrt
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "fourier_spectrum",
    "fourier_coefficients",
    "SpectrumReport",
    "generalization_bound",
    "BoundReport",
]

MERGE_TOL = 1e-9


def _merged(values: set[tuple[float, ...]]) -> set[tuple[float, ...]]:
    """Deduplicate frequency vectors within the merge tolerance."""
    out: list[np.ndarray] = []
    for v in sorted(values):
        vec = np.array(v)
        if not any(np.max(np.abs(vec - w)) < MERGE_TOL for w in out):
            out.append(vec)
    return {tuple(np.round(v / MERGE_TOL) * MERGE_TOL) for v in out}


def fourier_spectrum(encoding: Sequence[tuple[int, Sequence[float]]]) -> set[tuple[float, ...]]:
    """Accessible frequency vectors of an encoding strategy.

    `encoding` lists (coordinate index, generator eigenvalues) per encoding
    gate; each gate contributes all pairwise eigenvalue differences along
    its coordinate, and gates combine by Minkowski sum.
    """
    if not encoding:
        return {()}
    dim = max(idx for idx, _ in encoding) + 1
    total = {tuple(np.zeros(dim))}
    for idx, eigs in encoding:
        eigs = list(eigs)
        diffs = sorted({a - b for a, b in product(eigs, eigs)})
        gate_freqs = set()
        for d in diffs:
            vec = np.zeros(dim)
            vec[idx] = d
            gate_freqs.add(tuple(vec))
        total = {_add(a, b) for a in total for b in gate_freqs}
        total = _merged(total)
    return total


def _add(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


@dataclass
class SpectrumReport:
    frequencies: list[int]
    coefficients: dict[int, complex]
    residual: float

    def coefficient_norm(self) -> float:
        return float(np.sqrt(sum(abs(c) ** 2 for c in self.coefficients.values())))

    def nonzero_frequencies(self, tol: float = 1e-10) -> list[int]:
        return [w for w in self.frequencies if abs(self.coefficients[w]) >= tol]


def fourier_coefficients(
    model: Callable[[float], float],
    l_max: int,
    samples: int | None = None,
    residual_tol: float = 1e-6,
) -> SpectrumReport:
    """DFT coefficients c_w of f(x) = sum_w c_w exp(-i w x), |w| <= l_max.

    Samples the 2pi-periodic model on an equispaced grid of at least
    2 l_max + 1 points; a few extra bins are always sampled so energy beyond
    l_max (aliasing / out-of-band content) is detected and reported, and an
    error is raised when it exceeds `residual_tol`.
    """
    if l_max < 0:
        raise ValueError("l_max must be non-negative")
    margin = 4
    k = max(samples or 0, 2 * l_max + 1 + 2 * margin)
    xs = 2 * np.pi * np.arange(k) / k
    values = np.array([model(float(x)) for x in xs])
    # with the e^{-iwx} convention, c_w = (1/K) sum_j f(x_j) e^{+i w x_j}
    raw = {
        w: complex(np.mean(values * np.exp(1j * w * xs)))
        for w in range(-(k // 2), k // 2 + 1)
    }
    in_band = {w: raw[w] for w in range(-l_max, l_max + 1)}
    residual = sqrt(sum(abs(c) ** 2 for w, c in raw.items() if abs(w) > l_max))
    if residual > residual_tol:
        raise ValueError(
            f"spectral weight {residual:.3e} beyond |w| = {l_max}; "
            "the model is not band-limited as declared"
        )
    return SpectrumReport(sorted(in_band), in_band, residual)


@dataclass
class BoundReport:
    spectrum_size: int
    sample_size: int
    lipschitz: float
    obs_norm: float
    loss_range: float
    confidence: float
    bound_value: float

    def to_dict(self) -> dict:
        return self.__dict__.copy()


def generalization_bound(
    spectrum_size: int,
    sample_size: int,
    lipschitz: float,
    obs_norm: float,
    loss_range: float,
    confidence: float,
) -> BoundReport:
    """4 |O| L sqrt(|Omega|/m) + 3 c sqrt(log(2/delta) / 2m)."""
    if min(spectrum_size, sample_size, lipschitz, obs_norm, loss_range) <= 0:
        raise ValueError("all bound inputs must be positive")
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence delta must lie in (0, 1)")
    first = 4.0 * obs_norm * lipschitz * sqrt(spectrum_size / sample_size)
    second = 3.0 * loss_range * sqrt(log(2.0 / confidence) / (2.0 * sample_size))
    return BoundReport(
        spectrum_size,
        sample_size,
        lipschitz,
        obs_norm,
        loss_range,
        confidence,
        first + second,
    )
