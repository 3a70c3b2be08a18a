from core.gp.gp_model import (
    JITTER_LADDER,
    GpInputError,
    GpModel,
    SingularKernelError,
    Warp,
    WarpDomainError,
    apply_warp,
    fit,
    log_marginal_likelihood,
    predict,
    predict_many,
)
from core.gp.output_transform import OutputTransform

__all__ = [
    "JITTER_LADDER",
    "GpInputError",
    "GpModel",
    "OutputTransform",
    "SingularKernelError",
    "Warp",
    "WarpDomainError",
    "apply_warp",
    "fit",
    "log_marginal_likelihood",
    "predict",
    "predict_many",
]
