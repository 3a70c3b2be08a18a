from core.optimization.acquisition import expected_improvement, integrated_ei, per_sample_ei
from core.optimization.bo_loop import (
    BoSettings,
    BoState,
    EmptyHistoryError,
    GridExhaustedError,
    Observation,
    create_state,
    decode,
    export_history_csv,
    history_frame,
    impute_failure,
    run_loop,
    suggest,
)
from core.optimization.sobol_grid import SOBOL_MAX_DIM, SobolDimensionError, sobol_grid
from core.optimization.surrogates import ArcSurrogate, FeatureSurrogate, Surrogate, SurrogateSettings

__all__ = [
    "SOBOL_MAX_DIM",
    "ArcSurrogate",
    "BoSettings",
    "BoState",
    "EmptyHistoryError",
    "FeatureSurrogate",
    "GridExhaustedError",
    "Observation",
    "SobolDimensionError",
    "Surrogate",
    "SurrogateSettings",
    "create_state",
    "decode",
    "expected_improvement",
    "export_history_csv",
    "history_frame",
    "impute_failure",
    "integrated_ei",
    "per_sample_ei",
    "run_loop",
    "sobol_grid",
    "suggest",
]
