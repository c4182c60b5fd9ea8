"""Phase encoding of real vectors and hypergraph-state preparation.

Both families load a length-2^n vector into the phases of the uniform
superposition: arbitrary angles for phase encoding, +-1 signs for
hypergraph states.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Circuit, Op, const, feature

__all__ = [
    "phase_encoding",
    "phase_feature_map",
    "BinaryPattern",
    "hypergraph_state_circuit",
]


def _is_power_of_two(d: int) -> bool:
    return d >= 1 and (d & (d - 1)) == 0


def _ones_positions(index: int, n: int) -> list[int]:
    """Qubits set to 1 in basis state `index` (qubit 0 = most significant bit)."""
    return [q for q in range(n) if (index >> (n - 1 - q)) & 1]


def _imprint_phase(n: int, index: int, slot) -> list[Op]:
    """Ops multiplying amplitude of |index> by exp(i*angle), via X-conjugated cp."""
    ones = _ones_positions(index, n)
    zeros = [q for q in range(n) if q not in ones]
    ops = [Op("x", (q,)) for q in zeros]
    ops.append(Op("cp", tuple(range(n)), slot))
    ops += [Op("x", (q,)) for q in zeros]
    return ops


def phase_encoding(values) -> Circuit:
    """Prepare (1/sqrt d) sum_k exp(i theta_k)|k> up to a global phase.

    Uses the reduced construction with relative phases theta_k - theta_0,
    which leaves |0...0> untouched and skips gates for vanishing phases.
    """
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        raise ValueError("phase values must be finite")
    d = len(values)
    if not _is_power_of_two(d) or d < 2:
        raise ValueError("need a power-of-two number of phases (>= 2)")
    n = int(np.log2(d))
    ops = [Op("h", (q,)) for q in range(n)]
    rel = values - values[0]
    for k in range(1, d):
        if rel[k] == 0.0:
            continue
        ops += _imprint_phase(n, k, const(rel[k]))
    return Circuit(n, tuple(ops))


def phase_feature_map(d: int) -> Circuit:
    """Slot-parameterized phase encoding with one feature index per phase.

    Imprints every phase including |0...0>, so each angle is a plain feature
    reference; the resulting state differs from `phase_encoding` by a global
    phase only.
    """
    if not _is_power_of_two(d) or d < 2:
        raise ValueError("need a power-of-two dimension (>= 2)")
    n = int(np.log2(d))
    ops = [Op("h", (q,)) for q in range(n)]
    for k in range(d):
        ops += _imprint_phase(n, k, feature(k))
    return Circuit(n, tuple(ops))


@dataclass(frozen=True)
class BinaryPattern:
    """Length-2^n vector of +-1 signs with its decimal label.

    The label reads the sign string most-significant-bit first:
    bit j of the string is 0 for +1 and 1 for -1.
    """

    bits: tuple[int, ...]

    def __post_init__(self):
        if not _is_power_of_two(len(self.bits)):
            raise ValueError("pattern length must be a power of two")
        if any(b not in (-1, 1) for b in self.bits):
            raise ValueError("pattern entries must be +-1")

    @property
    def label_integer(self) -> int:
        d = len(self.bits)
        return sum((1 << (d - 1 - j)) for j, b in enumerate(self.bits) if b == -1)

    @staticmethod
    def from_label(label: int, d: int) -> "BinaryPattern":
        if not 0 <= label < (1 << d):
            raise ValueError("label out of range for pattern length")
        bits = tuple(-1 if (label >> (d - 1 - j)) & 1 else 1 for j in range(d))
        return BinaryPattern(bits)

    def state_vector(self) -> np.ndarray:
        return np.array(self.bits, dtype=complex) / np.sqrt(len(self.bits))


def hypergraph_state_circuit(pattern: BinaryPattern) -> Circuit:
    """Prepare (1/sqrt d) sum_j b_j |j> with H^n plus multi-controlled Z gates.

    Iterates over hyper-edge orders P = 1..n; whenever basis state j with
    popcount P still carries the wrong sign, a C^(P-1)Z on its support fixes
    it and flips every state whose support contains that edge.  The sign of
    |0...0> is a pure global phase, so patterns are normalized to b_0 = +1
    and prepared up to that phase.
    """
    d = len(pattern.bits)
    n = int(np.log2(d))
    work = pattern.bits[0] * np.array(pattern.bits, dtype=int)
    ops = [Op("h", (q,)) for q in range(n)]
    supports = [frozenset(_ones_positions(j, n)) for j in range(d)]
    for p in range(1, n + 1):
        for j in range(d):
            if len(supports[j]) == p and work[j] == -1:
                edge = supports[j]
                ops.append(Op("mcz", tuple(sorted(edge))))
                for k in range(d):
                    if edge <= supports[k]:
                        work[k] = -work[k]
    return Circuit(n, tuple(ops))
