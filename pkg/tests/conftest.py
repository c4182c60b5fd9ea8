import numpy as np
import pytest

from vqsim.circuits import Circuit, Op, const


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_bound_circuit(n: int, depth: int, rng, long_range: bool = False) -> Circuit:
    """Random layered circuit with bound angles, used across backends."""
    ops = []
    for _ in range(depth):
        for q in range(n):
            kind = ["rx", "ry", "rz"][rng.integers(0, 3)]
            ops.append(Op(kind, (q,), const(rng.uniform(0, 2 * np.pi))))
        if n >= 2:
            for q in range(n - 1):
                ops.append(Op("cnot", (q, q + 1)))
            if long_range and n >= 3 and rng.random() < 0.5:
                i = int(rng.integers(0, n - 2))
                j = int(rng.integers(i + 2, n))
                ops.append(Op("cz", (i, j)))
    return Circuit(n, tuple(ops))


def random_density(dim: int, rng) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real
