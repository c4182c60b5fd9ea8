"""Training procedures: autoencoder, single-qubit classifier, phase neuron,
and the kernel ridge baseline.  Synthetic dataset generators used by the
tests and the CLI live here too.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .. import statevector as sv
from ..circuits.autoencoder import (
    autoencoder_circuits,
    compute_uncompute_fidelity,
)
from ..circuits.core import Circuit
from ..circuits.encoding import phase_feature_map
from ..circuits.neuron import neuron_activation_closed_form
from ..rng import stream
from . import losses
from .gradients import parameter_shift_gradient
from .optimizers import OptimizerConfig, TrainRun, minimize

TRASH_PAULI = "IZ"  # qubit 1 is the trash system


# --- autoencoder -----------------------------------------------------------


def _trash_z(train_circuit: Circuit, x: np.ndarray, theta: np.ndarray) -> float:
    state = sv.simulate(train_circuit.bind(features=x, params=theta))
    return sv.expectation(state, sv.Observable.single(TRASH_PAULI))


def train_autoencoder(
    dataset: Sequence[np.ndarray],
    config: OptimizerConfig,
    batch_size: int | None = 20,
    validation: Sequence[np.ndarray] | None = None,
) -> TrainRun:
    """Minimize the trash-qubit MAE (1/m) sum |1 - <Z_B>| over the 6 encoder angles.

    Gradient-based optimizers differentiate the smooth equivalent
    mean(1 - <Z_B>) with the shift rule on mini-batches.  Reports the mean
    compute-uncompute fidelity on the validation set (when given) in the
    run's metric traces.
    """
    data = [np.asarray(x, dtype=float) for x in dataset]
    if not data:
        raise ValueError("empty dataset")
    train_circ = autoencoder_circuits()["train"]
    obs = sv.Observable.single(TRASH_PAULI)
    rng = stream(config.seed, 2)
    batch_size = min(batch_size or len(data), len(data))

    def full_loss(theta: np.ndarray) -> float:
        return losses.mae_trash([_trash_z(train_circ, x, theta) for x in data])

    def batch_gradient(theta: np.ndarray) -> np.ndarray:
        idx = rng.choice(len(data), size=batch_size, replace=False)
        grads = np.zeros_like(theta)
        for i in idx:
            # d/dtheta |1 - <Z>| = -d<Z>/dtheta because <Z> <= 1
            grads -= parameter_shift_gradient(train_circ, obs, theta, features=data[i])
        return grads / batch_size

    x0 = rng.uniform(0.0, 2 * np.pi, train_circ.n_trainable())
    run = minimize(full_loss, x0, config, grad=batch_gradient)
    if validation is not None:
        fids = [compute_uncompute_fidelity(x, run.final_params) for x in validation]
        run.metric_traces["validation_fidelity"] = [float(np.mean(fids))]
    return run


def synthetic_phase_family(m: int, seed: int) -> list[np.ndarray]:
    """Rank-two family of 4-phase vectors (0, 0, t, t), t uniform in [0, pi]."""
    rng = stream(seed, 3)
    ts = rng.uniform(0.0, np.pi, m)
    return [np.array([0.0, 0.0, t, t]) for t in ts]


# --- single-qubit classifier ------------------------------------------------


def _as_density(x) -> np.ndarray:
    arr = np.asarray(x, dtype=complex)
    if arr.shape == (2,):
        return np.outer(arr, arr.conj())
    if arr.shape == (2, 2):
        return arr
    raise ValueError("classifier inputs must be single-qubit states or densities")


def classifier_probability(rho: np.ndarray, alpha: float, gamma: float) -> float:
    """p0 = <0| U rho U^dagger |0> for the 2-angle rotation (beta fixed to 0)."""
    from ..gates import u3

    u = u3(alpha, 0.0, gamma)
    return float((u @ rho @ u.conj().T)[0, 0].real)


def train_classifier(
    inputs: Sequence,
    labels: Sequence[int],
    config: OptimizerConfig,
) -> TrainRun:
    """Cross-entropy training of the single-qubit classifier U(alpha, gamma).

    Decision rule: predict class 0 when p0 >= 1/2.  Reports accuracy on the
    training inputs in the metric traces.
    """
    rhos = [_as_density(x) for x in inputs]
    y = np.asarray(labels, dtype=int)
    if set(np.unique(y)) - {0, 1}:
        raise ValueError("labels must be 0/1")
    if len(np.unique(y)) < 2:
        raise ValueError("degenerate dataset: only one class present")

    def loss(params: np.ndarray) -> float:
        p1 = [1.0 - classifier_probability(r, params[0], params[1]) for r in rhos]
        return losses.crossentropy(p1, y)

    def accuracy(params: np.ndarray) -> float:
        preds = [
            0 if classifier_probability(r, params[0], params[1]) >= 0.5 else 1
            for r in rhos
        ]
        return float(np.mean(np.array(preds) == y))

    rng = stream(config.seed, 4)
    x0 = rng.uniform(0.0, np.pi, 2)
    run = minimize(loss, x0, config)
    run.metric_traces["accuracy"] = [accuracy(run.final_params)]
    return run


def bloch_cluster_dataset(
    m: int, seed: int, spread: float = 0.25
) -> tuple[list[np.ndarray], np.ndarray]:
    """Separable synthetic clusters near |0> (label 0) and |1> (label 1)."""
    rng = stream(seed, 5)
    states, labels = [], []
    for _ in range(m):
        label = int(rng.integers(0, 2))
        theta = rng.normal(0.0 if label == 0 else np.pi, spread)
        phi_angle = rng.uniform(0.0, 2 * np.pi)
        state = np.array(
            [np.cos(theta / 2), np.exp(1j * phi_angle) * np.sin(theta / 2)]
        )
        states.append(state)
        labels.append(label)
    return states, np.array(labels)


# --- phase neuron -----------------------------------------------------------


def _embed_neuron_input(x: np.ndarray, d: int, bias_slot: bool) -> np.ndarray:
    """Pad features into phase slots: leading reference 0, trailing bias slot."""
    x = np.asarray(x, dtype=float)
    padded = np.zeros(d)
    stop = d - 1 if bias_slot else d
    width = min(len(x), stop - 1)
    padded[1 : 1 + width] = x[:width]
    return padded


def neuron_predictor(
    weights: np.ndarray, d: int, bias: float | None
) -> Callable[[np.ndarray], float]:
    """Activation as a function of a raw feature vector."""
    phi = np.zeros(d)
    use_bias = bias is not None
    stop = d - 1 if use_bias else d
    phi[1:stop] = weights
    if use_bias:
        phi[-1] = bias

    def activation(x: np.ndarray) -> float:
        theta = _embed_neuron_input(x, d, use_bias)
        return neuron_activation_closed_form(theta, phi)

    return activation


def train_neuron(
    dataset: Sequence[tuple[np.ndarray, float]],
    config: OptimizerConfig,
    loss_spec: losses.LossSpec,
    n_qubits: int | None = None,
    bias: float | None = None,
) -> TrainRun:
    """SPSA (or any zeroth-order) minimization over the weight phases.

    Inputs are embedded as (0, x_1, ..., x_k[, bias]) so the first phase is
    the fixed reference; with `bias` set, the final phase is pinned to it.
    `thresholded_mse` trains the decision rule directly; `mse` matches raw
    activations (recognition tasks).
    """
    xs = [np.asarray(x, dtype=float) for x, _ in dataset]
    ys = np.array([y for _, y in dataset], dtype=float)
    if n_qubits is None:
        need = max(len(x) for x in xs) + 1 + (1 if bias is not None else 0)
        n_qubits = int(np.ceil(np.log2(need)))
    d = 2**n_qubits
    n_weights = (d - 1 if bias is None else d - 2)

    def activations(weights: np.ndarray) -> np.ndarray:
        predict = neuron_predictor(weights, d, bias)
        return np.array([predict(x) for x in xs])

    if loss_spec.kind == "thresholded_mse":

        def loss(weights: np.ndarray) -> float:
            return losses.thresholded_mse(activations(weights), ys, loss_spec.threshold)

    elif loss_spec.kind == "mse":

        def loss(weights: np.ndarray) -> float:
            return losses.mse(activations(weights), ys)

    else:
        raise ValueError("neuron training supports mse or thresholded_mse losses")

    rng = stream(config.seed, 6)
    x0 = rng.uniform(0.0, np.pi, n_weights)
    run = minimize(loss, x0, config)
    if loss_spec.kind == "thresholded_mse":
        acts = activations(run.final_params)
        preds = (acts > loss_spec.threshold).astype(float)
        run.metric_traces["accuracy"] = [float(np.mean(preds == ys))]
    return run


def two_cluster_angles(m: int, seed: int) -> list[tuple[np.ndarray, float]]:
    """Two separable clusters in [0, pi/2]^2; label 1 where the activation
    difference theta_2 - theta_1 sits near the firing window."""
    rng = stream(seed, 7)
    data = []
    for _ in range(m):
        label = float(rng.integers(0, 2))
        if label == 1.0:
            base = rng.uniform(0.1, 0.35)
            point = np.array([base, base + rng.uniform(1.15, 1.35)])
        else:
            base = rng.uniform(0.2, 0.9)
            point = np.array([base, base + rng.uniform(-0.15, 0.25)])
        data.append((np.clip(point, 0.0, np.pi / 2), label))
    return data


def concentric_rings(m: int, seed: int) -> list[tuple[np.ndarray, float]]:
    """Inner disc (label 1) versus outer ring (label 0) around a common centre."""
    rng = stream(seed, 8)
    centre = np.array([0.8, 0.8])
    data = []
    for _ in range(m):
        label = float(rng.integers(0, 2))
        radius = rng.uniform(0.0, 0.12) if label == 1.0 else rng.uniform(0.55, 0.72)
        angle = rng.uniform(0.0, 2 * np.pi)
        point = centre + radius * np.array([np.cos(angle), np.sin(angle)])
        data.append((np.clip(point, 0.0, np.pi / 2), label))
    return data


# --- kernel ridge regression -------------------------------------------------


@dataclass
class KernelRidgeModel:
    alphas: np.ndarray
    train_inputs: list
    kernel: Callable
    condition: float

    def predict(self, x) -> float:
        k = np.array([self.kernel(x, xi) for xi in self.train_inputs])
        return float(k @ self.alphas)


def quantum_kernel(feature_circuit: Circuit) -> Callable:
    """State-overlap kernel kappa(x, x') = |<phi(x)|phi(x')>|^2."""

    def kernel(x, xp) -> float:
        a = sv.simulate(feature_circuit.bind(features=np.atleast_1d(x)))
        b = sv.simulate(feature_circuit.bind(features=np.atleast_1d(xp)))
        return sv.fidelity(a, b)

    return kernel


def kernel_ridge_fit(
    train_inputs: Sequence,
    train_targets: Sequence[float],
    feature_circuit: Circuit | None,
    regularization: float,
) -> KernelRidgeModel:
    """Solve (K + lambda I) alpha = y with the quantum-overlap kernel.

    feature_circuit=None falls back to the plain inner-product kernel.
    Raises when the kernel matrix is not symmetric PSD within 1e-8, and
    reports the condition number of the regularized system.
    """
    if regularization <= 0:
        raise ValueError("regularization must be positive")
    y = np.asarray(train_targets, dtype=float)
    if feature_circuit is None:
        kernel = lambda a, b: float(np.dot(np.atleast_1d(a), np.atleast_1d(b)))
    else:
        kernel = quantum_kernel(feature_circuit)
    m = len(train_inputs)
    gram = np.empty((m, m))
    for i in range(m):
        for j in range(i, m):
            gram[i, j] = gram[j, i] = kernel(train_inputs[i], train_inputs[j])
    if np.max(np.abs(gram - gram.T)) > 1e-8:
        raise ValueError("kernel matrix is not symmetric")
    if np.linalg.eigvalsh(gram).min() < -1e-8:
        raise ValueError("kernel matrix is not positive semidefinite")
    system = gram + regularization * np.eye(m)
    condition = float(np.linalg.cond(system))
    if condition > 1e12:
        raise ValueError(f"ill-conditioned kernel system (condition ~ {condition:.2e})")
    alphas = np.linalg.solve(system, y)
    return KernelRidgeModel(alphas, list(train_inputs), kernel, condition)
