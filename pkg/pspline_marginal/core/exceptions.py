from typing import Optional


class PsplineMarginalError(Exception):
    pass


class ConfigurationError(PsplineMarginalError, ValueError):
    pass


class ShapeError(PsplineMarginalError, ValueError):
    pass


class DomainError(PsplineMarginalError, ValueError):
    pass


class DataSchemaError(PsplineMarginalError, ValueError):
    pass


class SingularSystemError(PsplineMarginalError):
    def __init__(self, message: str, condition: Optional[float] = None) -> None:
        super().__init__(message)
        self.condition = condition


class NumericalError(PsplineMarginalError):
    def __init__(self, message: str, iteration: Optional[int] = None) -> None:
        super().__init__(message)
        self.iteration = iteration


class TuningError(PsplineMarginalError):
    pass


class ReductionError(PsplineMarginalError):
    pass
