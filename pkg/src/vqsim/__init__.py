"""vqsim: simulation and analysis toolkit for variational quantum circuits.

Exact state-vector and matrix-product-state backends, a serializable
circuit IR with an ansatz zoo, shift-rule gradients and training loops,
entanglement/randomness/Fourier diagnostics, and single-qubit noise
deconvolution, tied together by a batch experiment CLI.
"""

__version__ = "0.1.0"

from . import analysis, channels, circuits, dataio, gates, mps, optimize, rng, statevector

__all__ = [
    "__version__",
    "analysis",
    "channels",
    "circuits",
    "dataio",
    "gates",
    "mps",
    "optimize",
    "rng",
    "statevector",
]
