"""Phase-encoded artificial neuron: closed-form activation and its circuit.

The neuron compares an input phase vector theta against a weight vector phi
through the squared overlap of the corresponding phase-encoded states.  An
ancilla-controlled flip turns that overlap into a firing probability.
"""
from __future__ import annotations

import numpy as np

from .core import Circuit, Op
from .encoding import phase_encoding

__all__ = ["neuron_activation_closed_form", "neuron_circuit", "neuron_firing_probability"]


def neuron_activation_closed_form(theta, phi) -> float:
    """|<psi_w|psi_i>|^2 = 1/2^n + (1/2^(2n-1)) sum_{i<j} cos(d_j - d_i), d = theta - phi."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if theta.shape != phi.shape:
        raise ValueError("input and weight vectors must have equal length")
    d = len(theta)
    if d < 2 or (d & (d - 1)) != 0:
        raise ValueError("vector length must be a power of two (>= 2)")
    diff = theta - phi
    # the double sum is |sum_k e^{i diff_k}|^2 expanded; evaluate it directly
    amp = np.exp(1j * diff).sum() / d
    return float(abs(amp) ** 2)


def neuron_circuit(theta, phi) -> Circuit:
    """(n+1)-qubit circuit whose ancilla fires with the closed-form probability.

    Layout: U_i loads the input phases, U_w = X^n H^n U(phi)^dagger rotates the
    weight state onto |1...1>, and a multi-controlled NOT copies the surviving
    amplitude onto the ancilla (last qubit).
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if theta.shape != phi.shape:
        raise ValueError("input and weight vectors must have equal length")
    d = len(theta)
    n = int(np.log2(d))
    if 2**n != d:
        raise ValueError("vector length must be a power of two")
    total = n + 1
    ops = []

    def widened(circ: Circuit) -> tuple[Op, ...]:
        return circ.ops  # encoding circuits only touch qubits 0..n-1

    # the adjoint of the full encoding is H^n U(phi)^dagger, i.e. the weight
    # block minus its final X layer
    ops += widened(phase_encoding(theta))
    ops += widened(phase_encoding(phi).adjoint())
    ops += [Op("x", (q,)) for q in range(n)]
    ops.append(Op("mcx", tuple(range(n)) + (n,)))
    return Circuit(total, tuple(ops))


def neuron_firing_probability(theta, phi) -> float:
    """P(ancilla = 1) from a dense simulation of the neuron circuit."""
    from .. import statevector as sv

    circ = neuron_circuit(theta, phi)
    state = sv.simulate(circ)
    probs = np.abs(state.tensor()) ** 2
    # marginal of the ancilla (last axis) being |1>
    return float(probs.sum(axis=tuple(range(circ.n_qubits - 1)))[1])
