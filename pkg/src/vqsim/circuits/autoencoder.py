"""Two-qubit autoencoder circuits: trash-qubit training and the
compute-uncompute fidelity check.

Qubit 0 carries the compressed information, qubit 1 is the trash system
driven towards |0>.  The encoder is the 6-parameter block
[RY, RY, CNOT, RY, RY, CNOT, RY, RY].
"""
from __future__ import annotations

import numpy as np

from .core import Circuit, Op, trainable
from .encoding import phase_feature_map

TRASH_QUBIT = 1
N_ENCODER_PARAMS = 6


def encoder_circuit() -> Circuit:
    ops = []
    k = 0
    for layer in range(2):
        ops += [Op("ry", (0,), trainable(k)), Op("ry", (1,), trainable(k + 1))]
        ops.append(Op("cnot", (0, 1)))
        k += 2
    ops += [Op("ry", (0,), trainable(k)), Op("ry", (1,), trainable(k + 1))]
    return Circuit(2, tuple(ops))


def autoencoder_circuits() -> dict[str, Circuit]:
    """`train`: P(x) then E(theta) on 2 qubits; measure Z on the trash qubit.

    `fidelity`: 3-qubit compute-uncompute circuit.  P(x) E(theta) acts on
    (0, 1); the decoder E(theta)^dagger and P(x)^dagger act on (0, 2) with a
    fresh trash qubit, so the probability of reading |00> on (0, 2),
    marginalized over the old trash qubit, equals Tr[rho_x eta_x].
    """
    prep = phase_feature_map(4)
    enc = encoder_circuit()
    train = prep + enc

    def remap(circ: Circuit, mapping: dict[int, int], width: int) -> Circuit:
        ops = [Op(op.gate, tuple(mapping[t] for t in op.targets), op.slot) for op in circ.ops]
        return Circuit(width, tuple(ops))

    fid_ops = remap(train, {0: 0, 1: 1}, 3).ops
    uncompute = (enc.adjoint() + prep.adjoint())
    fid_ops += remap(uncompute, {0: 0, 1: 2}, 3).ops
    return {"train": train, "fidelity": Circuit(3, fid_ops)}


def trash_expectation(x, theta) -> float:
    """<Z> on the trash qubit after encoding sample x."""
    from .. import statevector as sv

    circ = autoencoder_circuits()["train"].bind(features=x, params=theta)
    state = sv.simulate(circ)
    obs = sv.Observable.single("IZ" if TRASH_QUBIT == 1 else "ZI")
    return sv.expectation(state, obs)


def compute_uncompute_fidelity(x, theta) -> float:
    """Tr[rho_x eta_x]: probability of |00> on qubits (0, 2) of the fidelity circuit."""
    from .. import statevector as sv

    circ = autoencoder_circuits()["fidelity"].bind(features=x, params=theta)
    state = sv.simulate(circ)
    probs = np.abs(state.tensor()) ** 2
    return float(probs[0, :, 0].sum())


def postselected_fidelity(x, theta) -> float:
    """Compute-uncompute fidelity with the trash branch post-selected on |0>.

    Dense-mode variant of the statistical post-selection used when sampling:
    project the encoded state onto trash=|0>, renormalize, decode, and
    compare with the input state.
    """
    from .. import statevector as sv

    prep = phase_feature_map(4).bind(features=x)
    enc = encoder_circuit().bind(params=theta)
    encoded = sv.simulate(prep + enc)
    psi = encoded.tensor().copy()
    psi[:, 1] = 0.0
    norm = np.linalg.norm(psi)
    if norm < 1e-12:
        raise ValueError("post-selection on trash=|0> has vanishing probability")
    projected = sv.StateVector(2, (psi / norm).reshape(-1))
    decoded = sv.apply_circuit(projected, enc.adjoint())
    reference = sv.simulate(prep)
    return sv.fidelity(reference, decoded)
