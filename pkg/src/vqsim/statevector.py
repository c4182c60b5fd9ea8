"""Exact dense simulation of n-qubit pure states.

Convention used throughout the package: qubit 0 is the most significant
bit of the computational-basis index, so |q0 q1 ... q_{n-1}> maps to index
sum_i q_i * 2^(n-1-i).  Reshaping amplitudes to [2]*n puts qubit i on axis i.

States are values: every operation returns a fresh StateVector and never
mutates its input, so (state, seed) jobs can run concurrently without locks.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np

from . import gates

if TYPE_CHECKING:
    from .circuits.core import Circuit

# 2^24 complex doubles is about 256 MB; beyond that dense simulation is a bug,
# not a feature.
MAX_DENSE_QUBITS = 24

NORM_TOL = 1e-10


@dataclass(frozen=True)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.n_qubits < 1 or self.n_qubits > MAX_DENSE_QUBITS:
            raise ValueError(f"n_qubits must be in [1, {MAX_DENSE_QUBITS}]")
        if self.amplitudes.shape != (2**self.n_qubits,):
            raise ValueError("amplitude vector has wrong length")
        norm = np.linalg.norm(self.amplitudes)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized: |norm - 1| = {abs(norm - 1.0):.3e}")

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape([2] * self.n_qubits)


@dataclass(frozen=True)
class Observable:
    """Real-weighted sum of Pauli strings over {I, X, Y, Z}."""

    terms: tuple[tuple[float, str], ...]

    def __post_init__(self):
        if not self.terms:
            raise ValueError("observable needs at least one term")
        width = len(self.terms[0][1])
        for coeff, pauli in self.terms:
            if not isinstance(coeff, (int, float)) or isinstance(coeff, bool):
                raise ValueError("coefficients must be real numbers")
            if len(pauli) != width:
                raise ValueError("all Pauli strings must have the same length")
            if any(c not in "IXYZ" for c in pauli):
                raise ValueError(f"bad Pauli string {pauli!r}")

    @property
    def width(self) -> int:
        return len(self.terms[0][1])

    @staticmethod
    def single(pauli: str) -> "Observable":
        return Observable(((1.0, pauli),))


@dataclass(frozen=True)
class DensityMatrix:
    dim: int
    entries: np.ndarray

    def __post_init__(self):
        if self.entries.shape != (self.dim, self.dim):
            raise ValueError("entries shape does not match dim")
        if np.max(np.abs(self.entries - self.entries.conj().T)) > 1e-10:
            raise ValueError("density matrix not Hermitian")
        if abs(np.trace(self.entries).real - 1.0) > 1e-10:
            raise ValueError("density matrix trace != 1")
        if np.linalg.eigvalsh(self.entries).min() < -1e-10:
            raise ValueError("density matrix has a negative eigenvalue")

    def purity(self) -> float:
        return float(np.trace(self.entries @ self.entries).real)


def zero_state(n: int) -> StateVector:
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = 1.0
    return StateVector(n, amps)


def from_amplitudes(amps: Sequence[complex]) -> StateVector:
    amps = np.asarray(amps, dtype=complex)
    n = int(np.log2(len(amps)))
    if 2**n != len(amps):
        raise ValueError("amplitude count must be a power of two")
    return StateVector(n, amps / np.linalg.norm(amps))


def _apply_gate_raw(psi: np.ndarray, gate: np.ndarray, targets: list[int], n: int) -> np.ndarray:
    """Kernel on the [2]*n tensor; no validation, used by the compiled paths."""
    k = len(targets)
    # tensordot puts the k output axes first, then the untouched qubits in order
    psi = np.tensordot(
        gate.reshape([2] * (2 * k)), psi, axes=(list(range(k, 2 * k)), targets)
    )
    current = targets + [q for q in range(n) if q not in targets]
    return np.transpose(psi, [current.index(q) for q in range(n)])


def apply_gate(state: StateVector, gate: np.ndarray, targets: Sequence[int]) -> StateVector:
    """Apply a k-qubit unitary to the given target qubits."""
    targets = list(targets)
    _check_targets(state.n_qubits, targets)
    k = len(targets)
    if gate.shape != (2**k, 2**k):
        raise ValueError(f"gate dimension {gate.shape} does not match {k} targets")
    psi = _apply_gate_raw(state.tensor(), gate, targets, state.n_qubits)
    return StateVector(state.n_qubits, np.ascontiguousarray(psi).reshape(-1))


def _check_targets(n: int, targets: Sequence[int]) -> None:
    if len(set(targets)) != len(targets):
        raise ValueError(f"repeated target index in {targets}")
    for t in targets:
        if not 0 <= t < n:
            raise ValueError(f"target {t} out of range for {n} qubits")


def apply_phase_on_ones(state: StateVector, targets: Sequence[int], phase: complex) -> StateVector:
    """Multiply amplitudes whose targets are all |1> by `phase` (masked diagonal)."""
    targets = list(targets)
    _check_targets(state.n_qubits, targets)
    psi = state.tensor().copy()
    idx = [slice(None)] * state.n_qubits
    for t in targets:
        idx[t] = 1
    psi[tuple(idx)] *= phase
    return StateVector(state.n_qubits, psi.reshape(-1))


def apply_multicontrolled_x(state: StateVector, controls: Sequence[int], target: int) -> StateVector:
    _check_targets(state.n_qubits, list(controls) + [target])
    psi = state.tensor().copy()
    idx0 = [slice(None)] * state.n_qubits
    for c in controls:
        idx0[c] = 1
    idx1 = list(idx0)
    idx0[target] = 0
    idx1[target] = 1
    a, b = psi[tuple(idx0)].copy(), psi[tuple(idx1)].copy()
    psi[tuple(idx0)], psi[tuple(idx1)] = b, a
    return StateVector(state.n_qubits, psi.reshape(-1))


def _run_ops_raw(psi: np.ndarray, ops, n: int) -> np.ndarray:
    """Evolve a [2]*n tensor through bound ops without per-op validation."""
    for op in ops:
        kind, targets = op.gate, list(op.targets)
        if kind == "mcz" or kind == "cp":
            factor = -1.0 if kind == "mcz" else np.exp(1j * op.slot.constant_value())
            psi = psi.copy()
            idx = [slice(None)] * n
            for t in targets:
                idx[t] = 1
            psi[tuple(idx)] *= factor
        elif kind == "mcx":
            psi = psi.copy()
            idx0 = [slice(None)] * n
            for c in targets[:-1]:
                idx0[c] = 1
            idx1 = list(idx0)
            idx0[targets[-1]], idx1[targets[-1]] = 0, 1
            a, b = psi[tuple(idx0)].copy(), psi[tuple(idx1)].copy()
            psi[tuple(idx0)], psi[tuple(idx1)] = b, a
        else:
            angle = op.slot.constant_value() if op.slot is not None else None
            psi = _apply_gate_raw(psi, gates.gate_matrix(kind, angle), targets, n)
    return psi


def simulate(circuit: "Circuit") -> StateVector:
    """Run a fully bound circuit on |0...0>."""
    n = circuit.n_qubits
    psi = np.zeros([2] * n, dtype=complex)
    psi[(0,) * n] = 1.0
    psi = _run_ops_raw(psi, circuit.ops, n)
    return StateVector(n, np.ascontiguousarray(psi).reshape(-1))


class CompiledCircuit:
    """Slot resolution done once; repeated evaluation runs the raw kernel.

    For training loops and sampling scans, where the same circuit is bound
    thousands of times with fresh angles.
    """

    def __init__(self, circuit: "Circuit"):
        self.n_qubits = circuit.n_qubits
        self.plan = []
        for op in circuit.ops:
            slot = op.slot
            if slot is None:
                resolver = None
            elif slot.kind == "const":
                value = slot.constant_value()
                resolver = (lambda f, p, v=value: v)
            elif slot.kind == "feature":
                resolver = (lambda f, p, i=slot.value, s=slot.scale: s * f[i])
            elif slot.kind == "train":
                resolver = (lambda f, p, i=slot.value, s=slot.scale: s * p[i])
            else:
                i, j = slot.value
                resolver = (lambda f, p, i=i, j=j, s=slot.scale: s * f[i] * f[j])
            self.plan.append((op.gate, list(op.targets), resolver))

    def tensor(self, features=None, params=None, initial: np.ndarray | None = None) -> np.ndarray:
        n = self.n_qubits
        if initial is None:
            psi = np.zeros([2] * n, dtype=complex)
            psi[(0,) * n] = 1.0
        else:
            psi = initial.reshape([2] * n)
        for kind, targets, resolver in self.plan:
            angle = resolver(features, params) if resolver is not None else None
            if kind == "mcz" or kind == "cp":
                factor = -1.0 if kind == "mcz" else np.exp(1j * angle)
                psi = psi.copy()
                idx = [slice(None)] * n
                for t in targets:
                    idx[t] = 1
                psi[tuple(idx)] *= factor
            elif kind == "mcx":
                psi = psi.copy()
                idx0 = [slice(None)] * n
                for c in targets[:-1]:
                    idx0[c] = 1
                idx1 = list(idx0)
                idx0[targets[-1]], idx1[targets[-1]] = 0, 1
                a, b = psi[tuple(idx0)].copy(), psi[tuple(idx1)].copy()
                psi[tuple(idx0)], psi[tuple(idx1)] = b, a
            else:
                psi = _apply_gate_raw(psi, gates.gate_matrix(kind, angle), targets, n)
        return psi

    def state(self, features=None, params=None, initial: np.ndarray | None = None) -> StateVector:
        psi = self.tensor(features, params, initial)
        return StateVector(self.n_qubits, np.ascontiguousarray(psi).reshape(-1))


def apply_circuit(state: StateVector, circuit: "Circuit") -> StateVector:
    psi = _run_ops_raw(state.tensor(), circuit.ops, circuit.n_qubits)
    return StateVector(circuit.n_qubits, np.ascontiguousarray(psi).reshape(-1))


def expectation(state: StateVector, obs: Observable) -> float:
    """<psi| sum_k gamma_k sigma^(k) |psi>."""
    if obs.width != state.n_qubits:
        raise ValueError(
            f"observable width {obs.width} does not match {state.n_qubits} qubits"
        )
    total = 0.0
    for coeff, pauli in obs.terms:
        total += coeff * _pauli_expectation(state, pauli)
    return float(total)


def _pauli_expectation(state: StateVector, pauli: str) -> float:
    psi = state.tensor()
    for q, c in enumerate(pauli):
        if c != "I":
            psi = _apply_gate_raw(psi, gates.PAULIS[c], [q], state.n_qubits)
    return float(np.vdot(state.amplitudes, psi.reshape(-1)).real)


def sample_expectation(
    state: StateVector,
    pauli: str,
    shots: int,
    rng: np.random.Generator | int,
) -> tuple[float, float]:
    """Estimate <pauli> by Z-basis sampling after a per-qubit change of basis.

    Returns (mean, stderr) with stderr = sqrt(empirical variance / shots);
    deterministic for a fixed generator or seed.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    if len(pauli) != state.n_qubits:
        raise ValueError("Pauli string width mismatch")
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(int(rng))
    rotated = state
    for q, c in enumerate(pauli):
        if c in ("X", "Y"):
            rotated = apply_gate(rotated, gates.BASIS_CHANGE[c], [q])
    probs = np.abs(rotated.amplitudes) ** 2
    probs = probs / probs.sum()
    draws = rng.choice(len(probs), size=shots, p=probs)
    # outcome = product of (-1)^bit over the non-identity sites
    signs = np.ones(shots)
    n = state.n_qubits
    for q, c in enumerate(pauli):
        if c != "I":
            bits = (draws >> (n - 1 - q)) & 1
            signs *= 1.0 - 2.0 * bits
    mean = float(signs.mean())
    var = float(signs.var())  # population variance of the +-1 outcomes
    return mean, float(np.sqrt(var / shots))


def partial_trace(state: StateVector, keep: Iterable[int]) -> DensityMatrix:
    """Reduced density matrix of the kept qubits (ascending order)."""
    keep = sorted(set(keep))
    if not keep:
        raise ValueError("keep set must be nonempty")
    _check_targets(state.n_qubits, keep)
    n = state.n_qubits
    rest = [q for q in range(n) if q not in keep]
    psi = state.tensor().transpose(keep + rest).reshape(2 ** len(keep), -1)
    rho = psi @ psi.conj().T
    return DensityMatrix(2 ** len(keep), rho)


def schmidt_values(state: StateVector, cut: int) -> np.ndarray:
    """Singular values across the ordered bipartition [0..cut-1 | cut..n-1]."""
    if not 1 <= cut <= state.n_qubits - 1:
        raise ValueError("cut must split the chain in two nonempty parts")
    mat = state.amplitudes.reshape(2**cut, -1)
    return np.linalg.svd(mat, compute_uv=False)


EIG_FLOOR = 1e-14  # below double-precision truncation noise; avoids log(0)


def entropy_from_probabilities(p: np.ndarray) -> float:
    p = np.asarray(p, dtype=float)
    p = p[p > EIG_FLOOR]
    return float(-(p * np.log(p)).sum()) if p.size else 0.0


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """-sum lambda log lambda in nats (natural base)."""
    return entropy_from_probabilities(np.linalg.eigvalsh(rho.entries))


def renyi2_entropy(rho: DensityMatrix) -> float:
    """-log Tr[rho^2]; lower-bounds the Von Neumann entropy."""
    return float(-np.log(rho.purity()))


def bloch_vector(rho: DensityMatrix) -> tuple[float, float, float]:
    if rho.dim != 2:
        raise ValueError("Bloch vector is defined for a single qubit only")
    r = tuple(float(np.trace(gates.PAULIS[c] @ rho.entries).real) for c in "XYZ")
    return r


def fidelity(a: StateVector, b: StateVector) -> float:
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def states_close(a: np.ndarray, b: np.ndarray, tol: float = 1e-10) -> bool:
    """Equality up to global phase."""
    return bool(abs(abs(np.vdot(a, b)) - 1.0) < tol)
