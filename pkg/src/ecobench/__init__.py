"""Eco-efficiency ranking of countries from export complexity and pollution data."""

__version__ = "0.1.0"

from .complexity import compute_eci, compute_rca, log_rca  # noqa: E402
from .dea import DeaInstance, score_all, translate_outputs  # noqa: E402
from .errors import EcobenchError, NumericalError, StageError, ValidationError  # noqa: E402
from .ingest import build_panel, load_environment, load_exports, load_metadata  # noqa: E402
from .networks import benchmark_network, threshold_network  # noqa: E402
from .pipeline import RunConfig, load_config, run_pipeline  # noqa: E402
from .similarity import build_similarity_vectors, correlation_matrix  # noqa: E402

__all__ = [
    "DeaInstance", "EcobenchError", "NumericalError", "RunConfig", "StageError",
    "ValidationError", "benchmark_network", "build_panel", "build_similarity_vectors",
    "compute_eci", "compute_rca", "correlation_matrix", "load_config", "load_environment",
    "load_exports", "load_metadata", "log_rca", "run_pipeline", "score_all",
    "threshold_network", "translate_outputs",
]
