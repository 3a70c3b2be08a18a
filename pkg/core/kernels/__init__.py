from core.kernels.arc_kernel import (
    ArcGeometry,
    ArcKernel,
    ArcParams,
    Embedding,
    Kernel,
    KernelParamsError,
    PlainGeometry,
    PlainKernel,
    PlainParams,
    arc_distance,
    arc_kernel,
    embed,
    gram,
    plain_kernel,
)
from core.kernels.base_covariance import BaseCovariance, NegativeDistanceError, base_kappa
from core.kernels.property_checks import KernelPropertySuite, PropertyResult, all_passed

__all__ = [
    "ArcGeometry",
    "ArcKernel",
    "ArcParams",
    "BaseCovariance",
    "Embedding",
    "Kernel",
    "KernelPropertySuite",
    "KernelParamsError",
    "NegativeDistanceError",
    "PlainGeometry",
    "PlainKernel",
    "PlainParams",
    "PropertyResult",
    "all_passed",
    "arc_distance",
    "arc_kernel",
    "base_kappa",
    "embed",
    "gram",
    "plain_kernel",
]
