"""Entanglement statistics of uniformly random pure states.

The expected bipartite entropy of a Haar-random state (the Page value) is
evaluated exactly by compensated summation at desk scale and through the
truncated-harmonic-number expansion H_n = ln n + gamma + 1/2n - eps_n,
0 <= eps_n <= 1/8n^2, once the subsystem dimensions overflow 2^24 terms.
"""
from __future__ import annotations

from math import fsum, log

import numpy as np

EULER_MASCHERONI = 0.57721566490153286060651209
EXACT_SUM_LIMIT = 2**24


def _harmonic(n: int) -> float:
    return log(n) + EULER_MASCHERONI + 1.0 / (2.0 * n) - 1.0 / (12.0 * n**2)


def page_value(n_a: int, n_b: int) -> float:
    """Expected entanglement entropy (nats) of an n_a|n_b qubit bipartition.

    Requires n_a <= n_b; sum_{j=d_b+1}^{d_a d_b} 1/j - (d_a - 1)/(2 d_b).
    """
    if n_a < 1 or n_b < n_a:
        raise ValueError("need 1 <= n_a <= n_b")
    d_a, d_b = 2**n_a, 2**n_b
    if d_a * d_b <= EXACT_SUM_LIMIT:
        tail = fsum(1.0 / j for j in range(d_b + 1, d_a * d_b + 1))
    else:
        tail = _harmonic(d_a * d_b) - _harmonic(d_b)
    return tail - (d_a - 1) / (2.0 * d_b)


def max_bond_page_value(n: int) -> float:
    """Page value of the most entangled cut of an n-qubit chain."""
    return page_value(n // 2, n - n // 2)


def chain_page_values(n: int) -> np.ndarray:
    """Page value for every ordered cut e_1..e_{n-1} of an n-qubit chain."""
    return np.array(
        [page_value(min(k, n - k), max(k, n - k)) for k in range(1, n)]
    )


def total_page_entropy(n: int) -> float:
    """Sum of the Page values over all ordered cuts."""
    return float(chain_page_values(n).sum())


def haar_state(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniformly random pure state: normalized i.i.d. complex normal entries."""
    v = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    return v / np.linalg.norm(v)


def haar_fidelity_samples(n: int, m: int, rng: np.random.Generator) -> np.ndarray:
    """|<psi_1|psi_2>|^2 for m independent pairs of Haar states."""
    out = np.empty(m)
    for i in range(m):
        a, b = haar_state(n, rng), haar_state(n, rng)
        out[i] = abs(np.vdot(a, b)) ** 2
    return out


def haar_schmidt_samples(n: int, m: int, rng: np.random.Generator, cut: int | None = None) -> np.ndarray:
    """Pooled squared Schmidt values of the half-chain cut over m Haar states."""
    cut = cut if cut is not None else n // 2
    pools = []
    for _ in range(m):
        mat = haar_state(n, rng).reshape(2**cut, -1)
        s = np.linalg.svd(mat, compute_uv=False)
        pools.append(s**2)
    return np.concatenate(pools)
