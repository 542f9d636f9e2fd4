"""Statevector simulator and experiment harness for a stride-flexible
quantum convolutional neural network."""

from .encoding import (
    FixedPointAngle,
    ImageTensor,
    KernelWeights,
    QramTable,
    angle_of,
    normalize,
)
from .layers import (
    ConvConfig,
    FcWeights,
    FeatureMap,
    PoolConfig,
    classify,
    conv_layer,
    decode_feature,
    fc_layer,
    pool_layer,
)
from .qae import QaeResult, qae_estimate
from .statevector import (
    Circuit,
    QubitBudgetError,
    RegisterError,
    RegisterLayout,
    Statevector,
    init_state,
)

__version__ = "0.1.0"

__all__ = [
    "Circuit",
    "ConvConfig",
    "FcWeights",
    "FeatureMap",
    "FixedPointAngle",
    "ImageTensor",
    "KernelWeights",
    "PoolConfig",
    "QaeResult",
    "QramTable",
    "QubitBudgetError",
    "RegisterError",
    "RegisterLayout",
    "Statevector",
    "angle_of",
    "classify",
    "conv_layer",
    "decode_feature",
    "fc_layer",
    "init_state",
    "normalize",
    "pool_layer",
    "qae_estimate",
]
