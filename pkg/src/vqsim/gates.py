"""Gate matrices and Pauli helpers shared by all backends."""
from __future__ import annotations

from math import cos, sin, pi

import numpy as np

SQRT2_INV = 1.0 / np.sqrt(2.0)

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) * SQRT2_INV
S = np.array([[1, 0], [0, 1j]], dtype=complex)
SDG = S.conj().T

CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
CZ = np.diag([1, 1, 1, -1]).astype(complex)
SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)

PAULIS = {"I": I2, "X": X, "Y": Y, "Z": Z}

# Change of basis so that a Z-basis measurement reads out the given Pauli.
BASIS_CHANGE = {"I": I2, "Z": I2, "X": H, "Y": H @ SDG}


def rx(theta: float) -> np.ndarray:
    c, s = cos(theta / 2), sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def ry(theta: float) -> np.ndarray:
    c, s = cos(theta / 2), sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz(theta: float) -> np.ndarray:
    return np.array(
        [[np.exp(-1j * theta / 2), 0], [0, np.exp(1j * theta / 2)]], dtype=complex
    )


def phase(theta: float) -> np.ndarray:
    return np.array([[1, 0], [0, np.exp(1j * theta)]], dtype=complex)


def crz(theta: float) -> np.ndarray:
    return np.diag(
        [1, 1, np.exp(-1j * theta / 2), np.exp(1j * theta / 2)]
    ).astype(complex)


def cp(theta: float) -> np.ndarray:
    return np.diag([1, 1, 1, np.exp(1j * theta)]).astype(complex)


def u3(theta: float, phi: float, lam: float) -> np.ndarray:
    """General single-qubit rotation (up to global phase)."""
    c, s = cos(theta / 2), sin(theta / 2)
    return np.array(
        [
            [c, -np.exp(1j * lam) * s],
            [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c],
        ],
        dtype=complex,
    )


def pauli_string_matrix(pauli: str) -> np.ndarray:
    """Dense matrix of a tensor product of single-qubit Paulis."""
    out = PAULIS[pauli[0]]
    for c in pauli[1:]:
        out = np.kron(out, PAULIS[c])
    return out


def is_unitary(mat: np.ndarray, tol: float = 1e-8) -> bool:
    d = mat.shape[0]
    return bool(np.linalg.norm(mat.conj().T @ mat - np.eye(d)) <= tol)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(m)
    return q * (np.diag(r) / np.abs(np.diag(r)))


_GATE_ARITY = {
    "h": 1,
    "x": 1,
    "rx": 1,
    "ry": 1,
    "rz": 1,
    "cnot": 2,
    "cz": 2,
    "crz": 2,
    "cp": None,  # phase on the all-ones subspace of any number of qubits
    "mcz": None,
    "mcx": None,
}

_PARAMETRIC = {"rx", "ry", "rz", "crz", "cp"}

_FIXED = {"h": H, "x": X, "cnot": CNOT, "cz": CZ}
_ROTATIONS = {"rx": rx, "ry": ry, "rz": rz, "crz": crz}


def gate_arity(kind: str) -> int | None:
    """Number of qubits the gate acts on, or None for variable arity."""
    try:
        return _GATE_ARITY[kind]
    except KeyError:
        raise ValueError(f"unknown gate kind {kind!r}") from None


def is_parametric(kind: str) -> bool:
    return kind in _PARAMETRIC


def gate_matrix(kind: str, angle: float | None = None) -> np.ndarray:
    """Dense matrix for fixed-arity gates; masked gates are handled by backends."""
    if kind in _FIXED:
        return _FIXED[kind]
    if kind in _ROTATIONS:
        return _ROTATIONS[kind](angle)
    if kind == "cp" or kind == "mcz" or kind == "mcx":
        raise ValueError(f"{kind} has no fixed-size matrix; apply by index masking")
    raise ValueError(f"unknown gate kind {kind!r}")
