# config/app_config.py
import os
from dataclasses import dataclass, field

from dotenv import load_dotenv

load_dotenv()

_PACKAGE_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def _env_bool(name: str, default: bool) -> bool:
    return os.getenv(name, str(default)).strip().lower() in ("1", "true", "yes")


@dataclass
class LoggingSettings:
    """Logging settings."""
    level: str = field(default_factory=lambda: os.getenv("LOG_LEVEL", "INFO"))
    log_to_file: bool = field(default_factory=lambda: _env_bool("LOG_TO_FILE", False))
    log_dir: str = field(default_factory=lambda: os.getenv("LOG_DIR", "logs"))


@dataclass
class InferenceDefaults:
    """Hyperparameter inference defaults."""
    burn_in: int = field(default_factory=lambda: int(os.getenv("INFER_BURN_IN", "50")))
    thin: int = field(default_factory=lambda: int(os.getenv("INFER_THIN", "2")))
    n_samples: int = field(default_factory=lambda: int(os.getenv("INFER_SAMPLES", "10")))
    slice_width: float = field(default_factory=lambda: float(os.getenv("SLICE_WIDTH", "1.0")))
    max_stepout: int = field(default_factory=lambda: int(os.getenv("SLICE_MAX_STEPOUT", "10")))
    noise_floor: float = 1e-8


@dataclass
class OptimizationDefaults:
    """Bayesian-optimization loop defaults."""
    grid_size: int = field(default_factory=lambda: int(os.getenv("BO_GRID_SIZE", "2000")))
    init_count: int = field(default_factory=lambda: int(os.getenv("BO_INIT_COUNT", "5")))


@dataclass
class BenchDefaults:
    """Benchmark harness defaults."""
    max_workers: int = field(default_factory=lambda: int(os.getenv("BENCH_MAX_WORKERS", "1")))
    asset_dir: str = field(
        default_factory=lambda: os.getenv("ASSET_DIR", os.path.join(_PACKAGE_ROOT, "assets"))
    )
    defaults_dir: str = os.path.join(_PACKAGE_ROOT, "config", "defaults")

    @property
    def objective_asset(self) -> str:
        return os.path.join(self.asset_dir, "synthetic_objective.json")


@dataclass
class AppConfig:
    """Application configuration."""
    logging: LoggingSettings = field(default_factory=LoggingSettings)
    inference: InferenceDefaults = field(default_factory=InferenceDefaults)
    optimization: OptimizationDefaults = field(default_factory=OptimizationDefaults)
    bench: BenchDefaults = field(default_factory=BenchDefaults)


config = AppConfig()
