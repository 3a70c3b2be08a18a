# core/gp/output_transform.py
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from core.gp.gp_model import Warp, apply_warp


@dataclass(frozen=True)
class OutputTransform:
    """Warp followed by standardization: z = (w(y) - shift) / scale.

    Hyperparameter inference and acquisition work on z; predictions are mapped back
    with `to_warped` and, for error metrics, `to_original`.
    """
    warp: Warp
    shift: float
    scale: float

    @classmethod
    def fit(cls, raw_targets: np.ndarray, warp: Warp = Warp.IDENTITY) -> "OutputTransform":
        warped = apply_warp(raw_targets, warp)
        scale = float(np.std(warped)) if warped.shape[0] > 1 else 1.0
        if not np.isfinite(scale) or scale < 1e-12:
            scale = 1.0
        return cls(warp=Warp(warp), shift=float(np.mean(warped)), scale=scale)

    def forward(self, raw_targets: np.ndarray) -> np.ndarray:
        return (apply_warp(raw_targets, self.warp) - self.shift) / self.scale

    def to_warped(self, mean: np.ndarray, variance: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        return self.shift + self.scale * mean, self.scale ** 2 * variance

    def to_original(self, warped_mean: np.ndarray, warped_variance: np.ndarray) -> np.ndarray:
        """Point prediction in the original output space (lognormal mean for the log warp)."""
        if self.warp == Warp.LOG:
            return np.exp(warped_mean + 0.5 * warped_variance)
        return np.asarray(warped_mean, dtype=float)
