from enum import Enum
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator


class SelectionMetric(str, Enum):
    SS = "ss"
    LOGLIK = "loglik"
    AUC = "auc"

    @property
    def maximize(self) -> bool:
        return self is not SelectionMetric.SS


class Lambda2Rule(str, Enum):
    FIFTY_PERCENT = "fifty"
    BEST_FIT2 = "best"


class LambdaGrid(BaseModel):
    model_config = ConfigDict(frozen=True)

    values: List[float]

    @field_validator("values")
    @classmethod
    def _check_values(cls, values: List[float]) -> List[float]:
        if not values:
            raise ValueError("lambda grid must not be empty")
        if any(not np.isfinite(value) or value < 0 for value in values):
            raise ValueError("lambda grid values must be finite and non-negative")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("lambda grid must be strictly increasing")
        return values

    @classmethod
    def linspace(cls, start: float, stop: float, step: float) -> "LambdaGrid":
        count = int(round((stop - start) / step)) + 1
        return cls(values=[float(value) for value in np.round(start + step * np.arange(count), 10)])

    @classmethod
    def default_lambda1(cls) -> "LambdaGrid":
        return cls.linspace(0.0, 100.0, 1.0)

    @classmethod
    def default_lambda2(cls) -> "LambdaGrid":
        return cls.linspace(0.0, 50.0, 0.5)

    def __len__(self) -> int:
        return len(self.values)


class TracePoint(BaseModel):
    stage: str
    lambda_: float = Field(alias="lambda")
    fold: Optional[int] = None
    metric: str
    value: Optional[float] = None

    model_config = ConfigDict(populate_by_name=True)


class TuningReport(BaseModel):
    schema_version: int = 1
    mode: str
    lambda1a: Optional[float] = None
    lambda1b: Optional[float] = None
    lambda2: Optional[float] = None
    metric: str
    selection_rule: Optional[Lambda2Rule] = None
    cv_folds: Optional[int] = None
    excluded: List[float] = Field(default_factory=list)
    traces: List[TracePoint] = Field(default_factory=list)
