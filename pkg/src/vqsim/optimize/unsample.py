"""Variational unsampling: train a layered circuit mapping a target state
to |1...1>, either with one global cost or qubit-by-qubit.

The ansatz is cycles of per-qubit RY rotations and an entangling network
(all-to-all or nearest-neighbour CNOTs), with a closing rotation layer; the
final single-qubit stage of the local scheme is a general 3-angle rotation.
Each seeded run draws a few independent starting points and keeps the best
optimum, which is how zeroth-order optimizers cope with the occasional
local minimum of the fidelity landscape.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import statevector as sv
from ..circuits.core import Circuit, Op, trainable
from ..rng import stream
from .optimizers import OptimizerConfig, TrainRun, minimize

__all__ = ["unsampling_ansatz", "unsample_global", "unsample_local", "LocalUnsampleRun"]

DEFAULT_RESTARTS = 4


def _entangler_ops(qubits: list[int], scheme: str) -> list[Op]:
    if scheme == "a2a":
        return [
            Op("cnot", (qubits[a], qubits[b]))
            for a in range(len(qubits))
            for b in range(a + 1, len(qubits))
        ]
    if scheme == "nn":
        return [Op("cnot", (qubits[a], qubits[a + 1])) for a in range(len(qubits) - 1)]
    raise ValueError(f"unknown entangling scheme {scheme!r}")


def unsampling_ansatz(
    n: int, cycles: int, scheme: str, qubits: list[int] | None = None, first_slot: int = 0
) -> Circuit:
    """R(t_0) then `cycles` blocks of [entangler, R(t_c)] on the given qubits."""
    qubits = qubits if qubits is not None else list(range(n))
    ops: list[Op] = []
    k = first_slot
    for q in qubits:
        ops.append(Op("ry", (q,), trainable(k)))
        k += 1
    for _ in range(cycles):
        ops += _entangler_ops(qubits, scheme)
        for q in qubits:
            ops.append(Op("ry", (q,), trainable(k)))
            k += 1
    return Circuit(n, tuple(ops))


def _u3_stage(n: int, qubit: int, first_slot: int) -> Circuit:
    ops = (
        Op("rz", (qubit,), trainable(first_slot)),
        Op("ry", (qubit,), trainable(first_slot + 1)),
        Op("rz", (qubit,), trainable(first_slot + 2)),
    )
    return Circuit(n, ops)


def _qubit_one_probability(psi: np.ndarray, qubit: int, n: int) -> float:
    probs = np.abs(psi) ** 2
    axes = tuple(q for q in range(n) if q != qubit)
    return float(probs.sum(axis=axes)[1])


def unsample_global(
    target_state: sv.StateVector,
    cycles: int,
    config: OptimizerConfig,
    scheme: str = "a2a",
    restarts: int = DEFAULT_RESTARTS,
) -> TrainRun:
    """Minimize 1 - |<1...1| V(t) |target>|^2 over all angles at once."""
    n = target_state.n_qubits
    ansatz = unsampling_ansatz(n, cycles, scheme)
    compiled = sv.CompiledCircuit(ansatz)
    p = ansatz.n_trainable()
    rng = stream(config.seed, 1)
    initial = target_state.tensor()

    def cost(params: np.ndarray) -> float:
        out = compiled.tensor(params=params, initial=initial)
        return 1.0 - float(abs(out.reshape(-1)[-1]) ** 2)

    best: TrainRun | None = None
    for _ in range(restarts):
        x0 = rng.uniform(0.0, 2 * np.pi, p)
        run = minimize(cost, x0, config)
        if best is None or run.best_loss < best.best_loss:
            best = run
        if best.best_loss < 1e-6:
            break
    if best.best_loss > 1e-6:
        polish = minimize(cost, best.final_params, config)
        if polish.best_loss < best.best_loss:
            best = polish
    best.metric_traces["final_fidelity"] = [1.0 - best.best_loss]
    return best


@dataclass
class LocalUnsampleRun:
    layer_runs: list[TrainRun]
    final_params: list[np.ndarray]
    total_fidelity: float


def _run_local(
    target_tensor: np.ndarray,
    n: int,
    cycles: list[int],
    scheme: str,
    config: OptimizerConfig,
    rng: np.random.Generator,
) -> LocalUnsampleRun:
    state = target_tensor
    layer_runs: list[TrainRun] = []
    final_params: list[np.ndarray] = []
    for j in range(n - 1):
        qubits = list(range(j, n))
        layer = unsampling_ansatz(n, cycles[j], scheme, qubits=qubits)
        compiled = sv.CompiledCircuit(layer)
        p = layer.n_trainable()
        # random start for the first layer; later layers start at the
        # identity so their initial cost equals the previous layer's end
        x0 = rng.uniform(0.0, 2 * np.pi, p) if j == 0 else np.zeros(p)
        frozen = state

        def cost(params: np.ndarray, compiled=compiled, frozen=frozen, q=j) -> float:
            out = compiled.tensor(params=params, initial=frozen)
            return 1.0 - _qubit_one_probability(out, q, n)

        run = minimize(cost, x0, config)
        layer_runs.append(run)
        final_params.append(run.final_params)
        state = compiled.tensor(params=run.final_params, initial=frozen)

    stage = sv.CompiledCircuit(_u3_stage(n, n - 1, 0))

    def last_cost(params: np.ndarray) -> float:
        out = stage.tensor(params=params, initial=state)
        return 1.0 - _qubit_one_probability(out, n - 1, n)

    run = minimize(last_cost, np.zeros(3), config)
    layer_runs.append(run)
    final_params.append(run.final_params)
    state = stage.tensor(params=run.final_params, initial=state)
    fid = float(abs(state.reshape(-1)[-1]) ** 2)
    return LocalUnsampleRun(layer_runs, final_params, fid)


def unsample_local(
    target_state: sv.StateVector,
    structure: str,
    config: OptimizerConfig,
    scheme: str = "nn",
    restarts: int = DEFAULT_RESTARTS,
) -> LocalUnsampleRun:
    """Sequential qubit-by-qubit unsampling.

    `structure` gives the cycle count of each of the n-1 shrinking layers
    (e.g. "321" for n = 4); the last stage is always the fixed 3-angle
    rotation on the remaining qubit.  Layer j minimizes the infidelity of
    qubit j alone with earlier layers frozen.
    """
    n = target_state.n_qubits
    if len(structure) != n - 1:
        raise ValueError(f"structure must list {n - 1} cycle counts for {n} qubits")
    cycles = [int(c) for c in structure]
    rng = stream(config.seed, 1)
    tensor = target_state.tensor()
    best: LocalUnsampleRun | None = None
    for _ in range(restarts):
        result = _run_local(tensor, n, cycles, scheme, config, rng)
        if best is None or result.total_fidelity > best.total_fidelity:
            best = result
        if best.total_fidelity > 1.0 - 1e-6:
            break
    return best
