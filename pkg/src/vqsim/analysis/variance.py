"""Gradient-statistics experiments for flat-landscape diagnostics.

`gradient_variance_experiment` measures the empirical mean and variance of a
partial derivative of a Pauli cost over uniform parameter draws of a deep
layered circuit, the regime where both circuit halves scramble well enough
that the variance approaches 2^(2n) / (2 (2^n + 1)(2^(2n) - 1)).

`toy_cost_variances` builds the tensor-product RX ansatz whose global and
local costs have the closed-form gradient variances (1/8)(3/8)^(n-1) and
1/(8 n^2): the textbook exponential-versus-polynomial contrast.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import pi

import numpy as np

from .. import statevector as sv
from ..circuits.core import Circuit, Op, trainable
from ..rng import stream

__all__ = [
    "deep_random_circuit",
    "two_design_gradient_variance",
    "gradient_variance_experiment",
    "toy_cost_variances",
    "GradientStats",
]

def deep_random_circuit(n: int, layers: int) -> Circuit:
    """Layered scrambler: per-qubit RY then RZ, then a linear CNOT chain.

    With uniformly random angles and depth of order a few times n, both
    halves around any middle parameter behave as approximate 2-designs.
    """
    ops: list[Op] = []
    k = 0
    for _ in range(layers):
        for q in range(n):
            ops.append(Op("ry", (q,), trainable(k)))
            k += 1
            ops.append(Op("rz", (q,), trainable(k)))
            k += 1
        for q in range(n - 1):
            ops.append(Op("cnot", (q, q + 1)))
    return Circuit(n, tuple(ops))


def two_design_gradient_variance(n: int) -> float:
    """Closed-form Var[dC/dt] when both circuit halves are 2-designs."""
    d = 2**n
    return d**2 / (2.0 * (d + 1) * (d**2 - 1))


@dataclass
class GradientStats:
    mean: float
    variance: float
    stderr_mean: float
    samples: int


def gradient_variance_experiment(
    circuit: Circuit,
    cost_pauli: str,
    samples: int,
    seed: int,
    probe_indices: list[int] | None = None,
) -> dict[int, GradientStats]:
    """Empirical gradient statistics per probed parameter index.

    Parameters are drawn from Unif[0, 2pi); gradients use the exact shift
    rule evaluated on the dense backend.  Defaults to probing the middle
    parameter, where both circuit halves are deepest.
    """
    p = circuit.n_trainable()
    probe_indices = probe_indices if probe_indices is not None else [p // 2]
    compiled = sv.CompiledCircuit(circuit)
    obs = sv.Observable.single(cost_pauli)

    # shifted evaluation: adjust the probed slot's parameter copy
    out: dict[int, GradientStats] = {}
    for index in probe_indices:
        occurrences = circuit.trainable_occurrences(index)
        scales = [circuit.ops[pos].slot.scale for pos in occurrences]
        if any(circuit.ops[pos].gate not in ("rx", "ry", "rz") for pos in occurrences):
            raise ValueError(f"parameter {index} is not shift-compatible")
        rng = stream(seed, 1000 + index)
        grads = np.empty(samples)
        for m in range(samples):
            params = rng.uniform(0.0, 2 * pi, p)
            g = 0.0
            for scale in scales:  # library ansatz: one occurrence per slot
                shifted = params.copy()
                shifted[index] = params[index] + pi / 2 / scale
                c_plus = sv.expectation(compiled.state(params=shifted), obs)
                shifted[index] = params[index] - pi / 2 / scale
                c_minus = sv.expectation(compiled.state(params=shifted), obs)
                g += scale * 0.5 * (c_plus - c_minus)
            grads[m] = g
        mean = float(grads.mean())
        variance = float(grads.var())
        out[index] = GradientStats(mean, variance, float(np.sqrt(variance / samples)), samples)
    return out


def _toy_circuit(n: int) -> Circuit:
    return Circuit(n, tuple(Op("rx", (q,), trainable(q)) for q in range(n)))


def toy_cost_variances(n: int, samples: int, seed: int) -> dict:
    """Analytic and empirical Var[dC/dt_1] of the global and local toy costs.

    Global cost 1 - |<0...0|psi>|^2, local cost 1 - mean_i p_i(0); gradients
    are measured with the shift rule on the simulated circuit.
    """
    if n < 1:
        raise ValueError("need at least one qubit")
    circuit = _toy_circuit(n)
    compiled = sv.CompiledCircuit(circuit)
    rng = stream(seed, 0)

    def costs(params: np.ndarray) -> tuple[float, float]:
        psi = compiled.tensor(params=params)
        probs = np.abs(psi) ** 2
        global_cost = 1.0 - float(probs.reshape(-1)[0])
        locals_ = [
            float(probs.sum(axis=tuple(a for a in range(n) if a != q))[0])
            for q in range(n)
        ]
        return global_cost, 1.0 - float(np.mean(locals_))

    grads_g = np.empty(samples)
    grads_l = np.empty(samples)
    for m in range(samples):
        params = rng.uniform(0.0, 2 * pi, n)
        plus, minus = params.copy(), params.copy()
        plus[0] += pi / 2
        minus[0] -= pi / 2
        gp, lp = costs(plus)
        gm, lm = costs(minus)
        grads_g[m] = 0.5 * (gp - gm)
        grads_l[m] = 0.5 * (lp - lm)

    analytic_global = (1.0 / 8.0) * (3.0 / 8.0) ** (n - 1)
    analytic_local = 1.0 / (8.0 * n**2)
    return {
        "global": {
            "analytic": analytic_global,
            "empirical": float(grads_g.var()),
            "mean": float(grads_g.mean()),
            "stderr_mean": float(grads_g.std() / np.sqrt(samples)),
        },
        "local": {
            "analytic": analytic_local,
            "empirical": float(grads_l.var()),
            "mean": float(grads_l.mean()),
            "stderr_mean": float(grads_l.std() / np.sqrt(samples)),
        },
        "samples": samples,
    }
