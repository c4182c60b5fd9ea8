"""Matrix-product-state circuit evolution with controlled truncation.

The chain is kept in canonical form: site tensors B_i (chi_l, 2, chi_r) are
right-canonical and the stored singular values at every internal bond are
the Schmidt values of the global state.  Two-qubit gates are applied with
the inversion-free update: after the SVD of the wavefunction patch, the
right tensor is the top rows of V^dagger and the left tensor is recovered by
contracting the gate patch against them, so no singular value is ever
divided out.

Bond entropies therefore cost nothing beyond a lookup, at any time.
Truncation at each two-qubit gate appends (retained weight)^2 to a fidelity
ledger whose running product lower-bounds the squared overlap with the
exact state.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Sequence

import numpy as np

from . import gates
from .statevector import StateVector, entropy_from_probabilities

if TYPE_CHECKING:
    from .circuits.core import Circuit

DEFAULT_CHI_MAX = 4096
RELIABLE_INFIDELITY = 1e-4  # runs beyond this truncation loss are flagged


@dataclass(frozen=True)
class TruncationPolicy:
    chi_max: int = DEFAULT_CHI_MAX
    rel_cutoff: float = 1e-9

    def __post_init__(self):
        if self.chi_max < 1:
            raise ValueError("chi_max must be >= 1")
        if not 0.0 <= self.rel_cutoff < 1.0:
            raise ValueError("rel_cutoff must lie in [0, 1)")


@dataclass
class FidelityLedger:
    per_gate_fidelities: list[float] = field(default_factory=list)
    running_product: float = 1.0

    def record(self, f: float) -> None:
        if not 0.0 < f <= 1.0:
            raise ValueError(f"per-gate fidelity {f} outside (0, 1]")
        self.per_gate_fidelities.append(f)
        self.running_product *= f


class MPSState:
    """Right-canonical MPS with per-bond singular values and a truncation ledger.

    Truncating a bond perturbs the canonical conditions at the other bonds,
    so a state marks itself stale after any genuine truncation and is
    re-canonicalized lazily before the next singular-value read; stored
    spectra therefore always are the Schmidt values of the current state.
    """

    def __init__(self, tensors: list[np.ndarray], singular_values: list[np.ndarray]):
        self.n_qubits = len(tensors)
        self.tensors = tensors
        # singular_values[k] belongs to bond e_k between sites k-1 and k
        # (1-based bonds); index 0 and n are fixed boundary bonds.
        if len(singular_values) != self.n_qubits - 1:
            raise ValueError("expected one singular-value list per internal bond")
        self.singular_values = singular_values
        self.ledger = FidelityLedger()
        self.stale = False

    def copy(self) -> "MPSState":
        out = MPSState(
            [t.copy() for t in self.tensors], [s.copy() for s in self.singular_values]
        )
        out.ledger = FidelityLedger(
            list(self.ledger.per_gate_fidelities), self.ledger.running_product
        )
        out.stale = self.stale
        return out

    def refresh(self) -> None:
        """Restore canonical form in place if a truncation left it stale."""
        if self.stale:
            fresh = recanonicalize(self)
            self.tensors = fresh.tensors
            self.singular_values = fresh.singular_values
            self.stale = False

    def bond_dimensions(self) -> list[int]:
        return [len(s) for s in self.singular_values]

    def _left_lambda(self, site: int) -> np.ndarray:
        if site == 0:
            return np.ones(1)
        return self.singular_values[site - 1]


def mps_from_ground(n: int) -> MPSState:
    """Product state |0>^n with all bonds trivial."""
    if n < 1:
        raise ValueError("need at least one qubit")
    tensors = []
    for _ in range(n):
        t = np.zeros((1, 2, 1), dtype=complex)
        t[0, 0, 0] = 1.0
        tensors.append(t)
    return MPSState(tensors, [np.ones(1) for _ in range(n - 1)])


def mps_apply_one_qubit(mps: MPSState, gate: np.ndarray, site: int) -> MPSState:
    """Absorb a single-qubit unitary into the local tensor (exact, no ledger entry)."""
    if gate.shape != (2, 2):
        raise ValueError("expected a 2x2 gate")
    mps.tensors[site] = np.einsum("st,atb->asb", gate, mps.tensors[site])
    return mps


def mps_apply_two_qubit(
    mps: MPSState, gate: np.ndarray, site: int, policy: TruncationPolicy
) -> MPSState:
    """Contract-SVD-retruncate update on sites (site, site+1)."""
    n = mps.n_qubits
    if not 0 <= site < n - 1:
        raise ValueError(f"site {site} has no right neighbour in a {n}-qubit chain")
    if gate.shape != (4, 4):
        raise ValueError("expected a 4x4 gate")
    if np.linalg.norm(gate.conj().T @ gate - np.eye(4)) > 1e-8:
        raise ValueError("two-qubit gate is not unitary")

    b1, b2 = mps.tensors[site], mps.tensors[site + 1]
    chi_l, chi_r = b1.shape[0], b2.shape[2]
    # patch without the left bond weights; gate acts on the two physical legs
    patch = np.tensordot(b1, b2, axes=(2, 0))  # (chi_l, 2, 2, chi_r)
    patch = np.einsum(
        "stuv,auvb->astb", gate.reshape(2, 2, 2, 2), patch, optimize=True
    )
    lam_l = mps._left_lambda(site)
    theta = lam_l[:, None, None, None] * patch
    mat = theta.reshape(chi_l * 2, 2 * chi_r)
    u, s, vh = np.linalg.svd(mat, full_matrices=False)

    total = float((s**2).sum())
    keep = int(np.count_nonzero(s >= policy.rel_cutoff * s[0]))
    keep = max(1, min(keep, policy.chi_max))
    retained = float((s[:keep] ** 2).sum())
    fid = 1.0 if keep == len(s) else (retained / total) ** 2
    mps.ledger.record(fid)
    # discarding real weight perturbs the Schmidt spectra stored at the
    # other bonds at order sqrt(weight); flag the state for lazy regauging
    if total - retained > 1e-20:
        mps.stale = True

    lam_new = s[:keep] / np.sqrt(retained)
    new_b2 = vh[:keep].reshape(keep, 2, chi_r)
    # left tensor without inverting lam_l: contract the gate patch with the
    # new right tensor, then renormalize by the retained weight
    new_b1 = np.tensordot(patch, new_b2.conj(), axes=([2, 3], [1, 2]))
    new_b1 = np.ascontiguousarray(new_b1) / np.sqrt(retained)

    mps.tensors[site] = new_b1
    mps.tensors[site + 1] = np.ascontiguousarray(new_b2)
    mps.singular_values[site] = lam_new
    return mps


def mps_apply_nonadjacent(
    mps: MPSState, gate: np.ndarray, pair: tuple[int, int], policy: TruncationPolicy
) -> MPSState:
    """Long-range two-qubit gate via SWAP routing to adjacency and back.

    Every SWAP runs through the same truncation policy and ledger, so routing
    cost is accounted for honestly.
    """
    i, j = pair
    if i == j:
        raise ValueError("pair must address two distinct qubits")
    n = mps.n_qubits
    if not (0 <= i < n and 0 <= j < n):
        raise ValueError("pair indices out of range")
    if abs(i - j) == 1:
        if i < j:
            return mps_apply_two_qubit(mps, gate, i, policy)
        flipped = gates.SWAP @ gate @ gates.SWAP
        return mps_apply_two_qubit(mps, flipped, j, policy)
    lo, hi = min(i, j), max(i, j)
    # bubble the far qubit next to the near one
    for k in range(hi - 1, lo, -1):
        mps_apply_two_qubit(mps, gates.SWAP, k, policy)
    routed = (lo, lo + 1) if i < j else (lo + 1, lo)
    mps_apply_nonadjacent(mps, gate, routed, policy)
    for k in range(lo + 1, hi):
        mps_apply_two_qubit(mps, gates.SWAP, k, policy)
    return mps


def bond_entropy(mps: MPSState, bond: int) -> float:
    """Von Neumann entropy (nats) at internal bond e_bond, bond in 1..n-1."""
    if not 1 <= bond <= mps.n_qubits - 1:
        raise ValueError(f"bond must be in 1..{mps.n_qubits - 1}")
    mps.refresh()
    lam = mps.singular_values[bond - 1]
    return entropy_from_probabilities(lam**2)


def all_bond_entropies(mps: MPSState) -> np.ndarray:
    mps.refresh()
    return np.array([bond_entropy(mps, k) for k in range(1, mps.n_qubits)])


def schmidt_values(mps: MPSState, bond: int) -> np.ndarray:
    if not 1 <= bond <= mps.n_qubits - 1:
        raise ValueError(f"bond must be in 1..{mps.n_qubits - 1}")
    mps.refresh()
    return mps.singular_values[bond - 1].copy()


def fidelity_lower_bound(mps: MPSState) -> float:
    """Product of per-gate truncation fidelities; 1 iff nothing was discarded."""
    return mps.ledger.running_product


def is_reliable(mps: MPSState, threshold: float = RELIABLE_INFIDELITY) -> bool:
    return 1.0 - fidelity_lower_bound(mps) <= threshold


def mps_to_statevector(mps: MPSState) -> StateVector:
    """Full contraction; capped at 20 qubits."""
    if mps.n_qubits > 20:
        raise ValueError("dense contraction capped at 20 qubits")
    acc = mps.tensors[0].reshape(2, -1)  # boundary bond is 1
    for t in mps.tensors[1:]:
        acc = np.tensordot(acc, t, axes=(1, 0))
        acc = acc.reshape(-1, t.shape[2])
    amps = acc.reshape(-1)
    return StateVector(mps.n_qubits, amps / np.linalg.norm(amps))


def recanonicalize(mps: MPSState) -> MPSState:
    """Rebuild the canonical form from scratch (QR sweep right, SVD sweep left).

    Pure gauge operation: no truncation, ledger untouched.  Used to verify
    that bond entropies are independent of the canonicalization path.
    """
    n = mps.n_qubits
    tensors = [t.copy() for t in mps.tensors]
    # left-to-right QR sweep: make every tensor left-canonical
    for i in range(n - 1):
        chi_l, _, chi_r = tensors[i].shape
        q, r = np.linalg.qr(tensors[i].reshape(chi_l * 2, chi_r))
        tensors[i] = q.reshape(chi_l, 2, q.shape[1])
        tensors[i + 1] = np.tensordot(r, tensors[i + 1], axes=(1, 0))
    # right-to-left SVD sweep: collect singular values, leave B-form behind
    new_svals: list[np.ndarray] = [None] * (n - 1)
    for i in range(n - 1, 0, -1):
        chi_l, _, chi_r = tensors[i].shape
        u, s, vh = np.linalg.svd(tensors[i].reshape(chi_l, 2 * chi_r), full_matrices=False)
        norm = np.linalg.norm(s)
        new_svals[i - 1] = s / norm
        tensors[i] = vh.reshape(len(s), 2, chi_r)
        carry = u * s / norm
        tensors[i - 1] = np.tensordot(tensors[i - 1], carry, axes=(2, 0))
    out = MPSState(tensors, new_svals)
    out.ledger = FidelityLedger(
        list(mps.ledger.per_gate_fidelities), mps.ledger.running_product
    )
    return out


def simulate(circuit: "Circuit", policy: TruncationPolicy | None = None) -> MPSState:
    """Evolve |0...0> through a fully bound circuit of 1- and 2-qubit gates."""
    policy = policy or TruncationPolicy()
    mps = mps_from_ground(circuit.n_qubits)
    apply_circuit(mps, circuit, policy)
    return mps


def apply_circuit(mps: MPSState, circuit: "Circuit", policy: TruncationPolicy) -> MPSState:
    for op in circuit.ops:
        angle = op.slot.constant_value() if op.slot is not None else None
        _apply_op(mps, op.gate, op.targets, angle, policy)
    return mps


def _apply_op(
    mps: MPSState,
    kind: str,
    targets: Sequence[int],
    angle: float | None,
    policy: TruncationPolicy,
) -> None:
    if len(targets) == 1:
        if kind == "cp":
            mat = gates.phase(angle)
        elif kind == "mcz":
            mat = gates.Z
        else:
            mat = gates.gate_matrix(kind, angle)
        mps_apply_one_qubit(mps, mat, targets[0])
        return
    if len(targets) == 2:
        if kind == "cp":
            mat = gates.cp(angle)
        elif kind == "mcz":
            mat = gates.CZ
        elif kind == "mcx":
            mat = gates.CNOT
        else:
            mat = gates.gate_matrix(kind, angle)
        mps_apply_nonadjacent(mps, mat, (targets[0], targets[1]), policy)
        return
    raise ValueError(f"MPS backend supports 1- and 2-qubit gates, got {kind} on {targets}")
