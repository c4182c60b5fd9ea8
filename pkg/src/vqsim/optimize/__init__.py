from .gradients import parameter_shift_grad, parameter_shift_gradient, shift_hessian_diag
from .losses import LossSpec, crossentropy, mae_trash, mse, thresholded_mse
from .optimizers import OptimizerConfig, TrainRun, minimize
from .training import (
    KernelRidgeModel,
    bloch_cluster_dataset,
    classifier_probability,
    concentric_rings,
    kernel_ridge_fit,
    neuron_predictor,
    quantum_kernel,
    synthetic_phase_family,
    train_autoencoder,
    train_classifier,
    train_neuron,
    two_cluster_angles,
)
from .unsample import LocalUnsampleRun, unsample_global, unsample_local, unsampling_ansatz

__all__ = [
    "parameter_shift_grad",
    "parameter_shift_gradient",
    "shift_hessian_diag",
    "LossSpec",
    "crossentropy",
    "mae_trash",
    "mse",
    "thresholded_mse",
    "OptimizerConfig",
    "TrainRun",
    "minimize",
    "KernelRidgeModel",
    "bloch_cluster_dataset",
    "classifier_probability",
    "concentric_rings",
    "kernel_ridge_fit",
    "neuron_predictor",
    "quantum_kernel",
    "synthetic_phase_family",
    "train_autoencoder",
    "train_classifier",
    "train_neuron",
    "two_cluster_angles",
    "LocalUnsampleRun",
    "unsample_global",
    "unsample_local",
    "unsampling_ansatz",
]
