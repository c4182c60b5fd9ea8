from .core import Circuit, Op, Slot, const, feature, feature_product, trainable
from .ansatz import (
    AnsatzSpec,
    build_ansatz,
    build_qnn,
    entangling_layer,
    parameter_count,
    topology_edges,
)
from .encoding import BinaryPattern, hypergraph_state_circuit, phase_encoding, phase_feature_map
from .neuron import neuron_activation_closed_form, neuron_circuit, neuron_firing_probability
from .autoencoder import (
    autoencoder_circuits,
    compute_uncompute_fidelity,
    encoder_circuit,
    postselected_fidelity,
    trash_expectation,
)

__all__ = [
    "Circuit",
    "Op",
    "Slot",
    "const",
    "feature",
    "feature_product",
    "trainable",
    "AnsatzSpec",
    "build_ansatz",
    "build_qnn",
    "entangling_layer",
    "parameter_count",
    "topology_edges",
    "BinaryPattern",
    "hypergraph_state_circuit",
    "phase_encoding",
    "phase_feature_map",
    "neuron_activation_closed_form",
    "neuron_circuit",
    "neuron_firing_probability",
    "autoencoder_circuits",
    "compute_uncompute_fidelity",
    "encoder_circuit",
    "postselected_fidelity",
    "trash_expectation",
]
