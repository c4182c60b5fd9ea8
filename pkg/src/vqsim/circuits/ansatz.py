"""Ansatz zoo: hardware-efficient templates, feature maps, entangling
topologies and layered QNN composition.

Canonical gate content (pinned by the per-layer parameter counts):

* circuit1 -- per-qubit RY then RZ, no entangler (2n parameters)
* circuit2 -- per-qubit RY then a CNOT network over the topology (n)
* circuit3 -- per-qubit RY then a CRZ network over the topology
  (n + #edges: 2n-1 linear, 2n circular, (n^2+n)/2 full)
* zz_feature_map -- H layer, per-qubit RZ(2 x_i), then ZZ interactions with
  angle (2 x_i)(2 x_j) over the topology (n feature indices)

Every template can play either role in a QNN: as a feature map its angles
reference input features, as a variational form they reference trainables.
ZZ(phi) = exp(-i phi Z.Z / 2) is realised as CNOT - RZ(phi) - CNOT so the
circuit stays inside the serializable gate vocabulary.
"""
from __future__ import annotations

from dataclasses import dataclass

from .core import Circuit, Op, Slot, feature, feature_product, trainable

KINDS = ("circuit1", "circuit2", "circuit3", "zz_feature_map", "phase_encoding", "custom")
TOPOLOGIES = ("linear", "circular", "full")


@dataclass(frozen=True)
class AnsatzSpec:
    kind: str
    topology: str = "linear"
    n_qubits: int = 2

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown ansatz kind {self.kind!r}")
        if self.topology not in TOPOLOGIES:
            raise ValueError(f"unknown topology {self.topology!r}")


def topology_edges(topology: str, n: int) -> list[tuple[int, int]]:
    """Ordered qubit pairs of the entangling network."""
    if n < 2:
        raise ValueError("entangling topologies need n >= 2")
    if topology == "linear":
        return [(i, i + 1) for i in range(n - 1)]
    if topology == "circular":
        return [(i, i + 1) for i in range(n - 1)] + [(n - 1, 0)]
    if topology == "full":
        return [(i, j) for i in range(n) for j in range(i + 1, n)]
    raise ValueError(f"unknown topology {topology!r}")


def parameter_count(kind: str, topology: str, n: int) -> int:
    """Angles consumed by one layer of the template."""
    if kind == "circuit1":
        return 2 * n
    if kind in ("circuit2", "zz_feature_map"):
        return n
    if kind == "circuit3":
        return n + len(topology_edges(topology, n))
    raise ValueError(f"no parameter-count rule for {kind!r}")


def entangling_layer(
    topology: str, gate: str, n: int, role: str = "train", first_slot: int = 0
) -> Circuit:
    """Two-qubit network over the topology; CRZ edges consume angle slots."""
    if gate not in ("cnot", "cz", "crz"):
        raise ValueError("entangling gate must be cnot, cz or crz")
    ops = []
    for k, (i, j) in enumerate(topology_edges(topology, n)):
        slot = _slot(role, first_slot + k) if gate == "crz" else None
        ops.append(Op(gate, (i, j), slot))
    return Circuit(n, tuple(ops))


def _slot(role: str, index: int, scale: float = 1.0) -> Slot:
    if role == "train":
        return trainable(index, scale)
    if role == "feature":
        return feature(index, scale)
    raise ValueError(f"slot role must be train or feature, got {role!r}")


def _zz_interaction(i: int, j: int, slot: Slot) -> list[Op]:
    return [Op("cnot", (i, j)), Op("rz", (j,), slot), Op("cnot", (i, j))]


def build_ansatz(spec: AnsatzSpec, role: str = "train", first_slot: int = 0) -> Circuit:
    """One layer of the requested template.

    `role` decides whether angles reference trainable or feature indices,
    starting at `first_slot`.  Stacked variational layers pass fresh offsets;
    feature maps keep offset 0 so inputs are shared across repetitions.
    """
    n = spec.n_qubits
    if n < 2 and spec.kind != "circuit1":
        raise ValueError("templates with entanglers need n >= 2")
    ops: list[Op] = []
    if spec.kind == "circuit1":
        ops += [Op("ry", (q,), _slot(role, first_slot + q)) for q in range(n)]
        ops += [Op("rz", (q,), _slot(role, first_slot + n + q)) for q in range(n)]
        return Circuit(n, tuple(ops))
    if spec.kind == "circuit2":
        ops += [Op("ry", (q,), _slot(role, first_slot + q)) for q in range(n)]
        return Circuit(n, tuple(ops)) + entangling_layer(spec.topology, "cnot", n)
    if spec.kind == "circuit3":
        ops += [Op("ry", (q,), _slot(role, first_slot + q)) for q in range(n)]
        ent = entangling_layer(spec.topology, "crz", n, role, first_slot=first_slot + n)
        return Circuit(n, tuple(ops)) + ent
    if spec.kind == "zz_feature_map":
        if role != "feature":
            raise ValueError("zz_feature_map only makes sense as a feature map")
        ops += [Op("h", (q,)) for q in range(n)]
        ops += [Op("rz", (q,), feature(first_slot + q, scale=2.0)) for q in range(n)]
        for i, j in topology_edges(spec.topology, n):
            ops += _zz_interaction(i, j, feature_product(first_slot + i, first_slot + j, scale=4.0))
        return Circuit(n, tuple(ops))
    raise ValueError(f"build_ansatz cannot build kind {spec.kind!r}")


def build_qnn(
    feature_map: AnsatzSpec,
    var_form: AnsatzSpec,
    layers: int,
    mode: str = "alternated",
) -> Circuit:
    """Layered QNN.

    alternated:  F(x) V(t_1) F(x) V(t_2) ... -- the data-reuploading layout
    sequential:  F(x) ... F(x) V(t_1) ... V(t_L)

    Feature slots are shared across repetitions (same x each time); each
    variational block gets fresh trainable indices.  For a single layer the
    two modes produce gate-identical circuits.
    """
    if layers < 1:
        raise ValueError("need at least one layer")
    if feature_map.n_qubits != var_form.n_qubits:
        raise ValueError("feature map and variational form must share n_qubits")
    if mode not in ("alternated", "sequential"):
        raise ValueError(f"unknown mode {mode!r}")
    n = feature_map.n_qubits
    p = parameter_count(var_form.kind, var_form.topology, n)
    fmap = build_ansatz(feature_map, role="feature")
    blocks = [build_ansatz(var_form, first_slot=layer * p) for layer in range(layers)]
    circ = Circuit(n)
    if mode == "alternated":
        for block in blocks:
            circ = circ + fmap + block
    else:
        for _ in range(layers):
            circ = circ + fmap
        for block in blocks:
            circ = circ + block
    return circ
