from pspline_marginal.core.exceptions import (
    ConfigurationError,
    DataSchemaError,
    DomainError,
    NumericalError,
    PsplineMarginalError,
    ReductionError,
    ShapeError,
    SingularSystemError,
    TuningError,
)
from pspline_marginal.core.log import configure_logging, logger

__all__ = [
    "ConfigurationError",
    "DataSchemaError",
    "DomainError",
    "NumericalError",
    "PsplineMarginalError",
    "ReductionError",
    "ShapeError",
    "SingularSystemError",
    "TuningError",
    "configure_logging",
    "logger",
]
