from .haar import (
    chain_page_values,
    haar_fidelity_samples,
    haar_schmidt_samples,
    haar_state,
    max_bond_page_value,
    page_value,
    total_page_entropy,
)
from .entanglement import (
    DerivedMetrics,
    EntanglementProfile,
    alternated_sequential_contrast,
    derived_metrics,
    entangling_speed,
    entanglement_scan,
    normalized_entanglement_points,
)
from .randomness import (
    expressibility,
    expressibility_from_fidelities,
    spectrum_distribution_distance,
)
from .variance import (
    GradientStats,
    deep_random_circuit,
    gradient_variance_experiment,
    toy_cost_variances,
    two_design_gradient_variance,
)
from .fourier import (
    BoundReport,
    SpectrumReport,
    fourier_coefficients,
    fourier_spectrum,
    generalization_bound,
)
from .neuron_noise import mean_activation_under_jitter, neuron_noise_resilience

__all__ = [
    "chain_page_values",
    "haar_fidelity_samples",
    "haar_schmidt_samples",
    "haar_state",
    "max_bond_page_value",
    "page_value",
    "total_page_entropy",
    "DerivedMetrics",
    "EntanglementProfile",
    "alternated_sequential_contrast",
    "derived_metrics",
    "entangling_speed",
    "entanglement_scan",
    "normalized_entanglement_points",
    "expressibility",
    "expressibility_from_fidelities",
    "spectrum_distribution_distance",
    "GradientStats",
    "deep_random_circuit",
    "gradient_variance_experiment",
    "toy_cost_variances",
    "two_design_gradient_variance",
    "BoundReport",
    "SpectrumReport",
    "fourier_coefficients",
    "fourier_spectrum",
    "generalization_bound",
    "mean_activation_under_jitter",
    "neuron_noise_resilience",
]
