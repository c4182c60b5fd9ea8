"""Entanglement production scans over random QNN instances.

For each of M draws, inputs and angles are sampled uniformly and the circuit
is evolved layer by layer on the MPS backend, snapshotting every bond
entropy after each layer; one draw therefore covers all depths up to L_max.
Draws whose truncation infidelity exceeds the reliability threshold are
excluded and counted.

Derived metrics reduce a profile to the summary quantities: total chain
entropy, layers-to-90%-of-Haar, normalized maximum bond entropy, the
entangling speed (origin-constrained slope of S-normalized versus L/n in
its linear window), and the alternated/sequential contrast.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import mps
from .. import statevector as sv
from ..circuits.ansatz import AnsatzSpec, build_ansatz, parameter_count
from ..rng import stream
from .haar import chain_page_values, max_bond_page_value, total_page_entropy

__all__ = [
    "EntanglementProfile",
    "entanglement_scan",
    "derived_metrics",
    "entangling_speed",
    "normalized_entanglement_points",
]


@dataclass
class EntanglementProfile:
    n_qubits: int
    layers: list[int]
    mean: np.ndarray  # (len(layers), n_qubits - 1)
    std: np.ndarray
    samples: int
    seed: int
    excluded: list[int] = field(default_factory=list)  # per layer
    mode: str = "alternated"

    def total_entropy(self) -> np.ndarray:
        """S_tot(L) = sum_k mean S(e_k)."""
        return self.mean.sum(axis=1)

    def max_entropy(self) -> np.ndarray:
        return self.mean.max(axis=1)

    def to_rows(self) -> list[dict]:
        rows = []
        for li, layer in enumerate(self.layers):
            for bond in range(self.n_qubits - 1):
                rows.append(
                    {
                        "L": layer,
                        "bond": bond + 1,
                        "mean": float(self.mean[li, bond]),
                        "std": float(self.std[li, bond]),
                        "samples": self.samples - self.excluded[li],
                        "seed": self.seed,
                    }
                )
        return rows


def _uniform_angles(rng: np.random.Generator, count: int, high: float = np.pi) -> np.ndarray:
    return rng.uniform(0.0, high, count)


def entanglement_scan(
    feature: AnsatzSpec,
    var: AnsatzSpec,
    mode: str,
    n: int,
    l_max: int,
    samples: int,
    seed: int,
    policy: mps.TruncationPolicy | None = None,
    backend: str = "mps",
) -> EntanglementProfile:
    """Mean/std of every bond entropy at depths 1..l_max over `samples` draws.

    Inputs and parameters are drawn from Unif[0, pi], one RNG stream per
    draw.  With the default alternated mode, the sequential mode, or either
    backend, a draw is evolved incrementally so all depths share it.
    """
    if mode not in ("alternated", "sequential"):
        raise ValueError(f"unknown mode {mode!r}")
    policy = policy or mps.TruncationPolicy()
    n_feat = parameter_count(feature.kind, feature.topology, n)
    p_var = parameter_count(var.kind, var.topology, n)
    fmap = build_ansatz(AnsatzSpec(feature.kind, feature.topology, n), role="feature")
    vblocks = [
        build_ansatz(AnsatzSpec(var.kind, var.topology, n), first_slot=layer * p_var)
        for layer in range(l_max)
    ]

    acc = np.zeros((l_max, n - 1))
    acc2 = np.zeros((l_max, n - 1))
    excluded = np.zeros(l_max, dtype=int)
    kept = np.zeros(l_max, dtype=int)
    for draw in range(samples):
        rng = stream(seed, draw)
        x = _uniform_angles(rng, n_feat)
        theta = _uniform_angles(rng, l_max * p_var)
        snapshots = _evolve_with_snapshots(
            fmap, vblocks, x, theta, mode, n, l_max, policy, backend
        )
        for li, (ents, reliable) in enumerate(snapshots):
            if not reliable:
                excluded[li] += 1
                continue
            kept[li] += 1
            acc[li] += ents
            acc2[li] += ents**2
    kept_safe = np.maximum(kept, 1)[:, None]
    mean = acc / kept_safe
    var_ = np.maximum(acc2 / kept_safe - mean**2, 0.0)
    return EntanglementProfile(
        n_qubits=n,
        layers=list(range(1, l_max + 1)),
        mean=mean,
        std=np.sqrt(var_),
        samples=samples,
        seed=seed,
        excluded=excluded.tolist(),
        mode=mode,
    )


def _bound_layer(block, x, theta):
    return block.bind(features=x, params=theta)


def _evolve_with_snapshots(fmap, vblocks, x, theta, mode, n, l_max, policy, backend):
    """Per-layer (bond entropies, reliable) snapshots for a single draw."""
    out = []
    if backend == "mps":
        state = mps.mps_from_ground(n)
        if mode == "alternated":
            for block in vblocks:
                mps.apply_circuit(state, _bound_layer(fmap, x, theta), policy)
                mps.apply_circuit(state, _bound_layer(block, x, theta), policy)
                out.append((mps.all_bond_entropies(state), mps.is_reliable(state)))
        else:
            # incremental trick for the sequential layout: depth L is
            # (L x fmap)(L x vblocks), so each extra layer inserts one fmap
            # *before* the variational stack; evolve the fmap prefix state
            # separately and replay the variational stack on a copy.
            prefix = mps.mps_from_ground(n)
            for depth in range(1, l_max + 1):
                mps.apply_circuit(prefix, _bound_layer(fmap, x, theta), policy)
                replay = prefix.copy()
                for block in vblocks[:depth]:
                    mps.apply_circuit(replay, _bound_layer(block, x, theta), policy)
                out.append((mps.all_bond_entropies(replay), mps.is_reliable(replay)))
        return out
    if backend != "dense":
        raise ValueError(f"unknown backend {backend!r}")
    if mode == "alternated":
        state = sv.zero_state(n)
        for block in vblocks:
            state = sv.apply_circuit(state, _bound_layer(fmap, x, theta))
            state = sv.apply_circuit(state, _bound_layer(block, x, theta))
            out.append((_dense_bond_entropies(state), True))
    else:
        prefix = sv.zero_state(n)
        for depth in range(1, l_max + 1):
            prefix = sv.apply_circuit(prefix, _bound_layer(fmap, x, theta))
            replay = prefix
            for block in vblocks[:depth]:
                replay = sv.apply_circuit(replay, _bound_layer(block, x, theta))
            out.append((_dense_bond_entropies(replay), True))
    return out


def _dense_bond_entropies(state: sv.StateVector) -> np.ndarray:
    return np.array(
        [
            sv.entropy_from_probabilities(sv.schmidt_values(state, cut) ** 2)
            for cut in range(1, state.n_qubits)
        ]
    )


@dataclass
class DerivedMetrics:
    total_entropy: np.ndarray
    layers_to_haar: int | None
    normalized_max: np.ndarray
    entangling_speed: float | None
    haar_total: float
    haar_max: float

    def to_dict(self) -> dict:
        return {
            "total_entropy": self.total_entropy.tolist(),
            "layers_to_haar": self.layers_to_haar,
            "normalized_max": self.normalized_max.tolist(),
            "entangling_speed": self.entangling_speed,
            "haar_total": self.haar_total,
            "haar_max": self.haar_max,
        }


def derived_metrics(profile: EntanglementProfile) -> DerivedMetrics:
    n = profile.n_qubits
    s_tot = profile.total_entropy()
    haar_tot = total_page_entropy(n)
    haar_max = max_bond_page_value(n)
    crossing = None
    for layer, value in zip(profile.layers, s_tot):
        if value >= 0.9 * haar_tot:
            crossing = layer
            break
    s_norm = profile.max_entropy() / haar_max
    speed = None
    try:
        speed = entangling_speed([profile])
    except ValueError:
        pass
    return DerivedMetrics(s_tot, crossing, s_norm, speed, haar_tot, haar_max)


def normalized_entanglement_points(
    profiles: list[EntanglementProfile],
) -> tuple[np.ndarray, np.ndarray]:
    """(L/n, normalized max bond entropy) pooled over profiles."""
    xs, ys = [], []
    for prof in profiles:
        haar_max = max_bond_page_value(prof.n_qubits)
        for layer, value in zip(prof.layers, prof.max_entropy()):
            xs.append(layer / prof.n_qubits)
            ys.append(value / haar_max)
    return np.array(xs), np.array(ys)


def entangling_speed(
    profiles: list[EntanglementProfile], linear_window: float = 0.5
) -> float:
    """Slope of normalized entropy versus L/n, fit through the origin.

    Only points still in the linear regime (normalized entropy <= window)
    participate; at least two are required.
    """
    xs, ys = normalized_entanglement_points(profiles)
    mask = ys <= linear_window
    if mask.sum() < 2:
        raise ValueError("fewer than 2 points in the linear window; cannot fit")
    x, y = xs[mask], ys[mask]
    return float((x * y).sum() / (x * x).sum())


def alternated_sequential_contrast(
    alternated: EntanglementProfile, sequential: EntanglementProfile
) -> np.ndarray:
    """Delta S-bar(L) = (S_alt - S_seq) / ((S_alt + S_seq)/2) at the central bond."""
    if alternated.n_qubits != sequential.n_qubits:
        raise ValueError("profiles must share the qubit count")
    centre = (alternated.n_qubits - 1) // 2  # bond index of the equal split
    s_alt = alternated.mean[:, centre]
    s_seq = sequential.mean[:, centre]
    return (s_alt - s_seq) / ((s_alt + s_seq) / 2.0)
