from typing import Any, Dict, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from pspline_marginal.core import env
from pspline_marginal.models.contracts import NewtonConfig
from pspline_marginal.models.marginal import DEFAULT_SIGMA_K
from pspline_marginal.reduction.reduce import ReductionMethod
from pspline_marginal.simulation.config import FitRecipe, SimConfig
from pspline_marginal.tuning.contracts import Lambda2Rule, LambdaGrid, SelectionMetric


class _StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ExecutionConfig(_StrictModel):
    output_dir: str = env.PSPLINE_MARGINAL_OUTPUT_DIR
    threads: int = Field(default=env.PSPLINE_MARGINAL_THREADS, ge=1)
    log_level: str = env.PSPLINE_MARGINAL_LOG_LEVEL


class GridConfig(_StrictModel):
    start: float = Field(default=0.0, ge=0)
    stop: float
    step: float = Field(gt=0)

    def to_grid(self) -> LambdaGrid:
        return LambdaGrid.linspace(self.start, self.stop, self.step)


def _default_grid1() -> GridConfig:
    return GridConfig(start=0.0, stop=100.0, step=1.0)


def _default_grid2() -> GridConfig:
    return GridConfig(start=0.0, stop=50.0, step=0.5)


class DataConfig(_StrictModel):
    h_csv: str
    v_csv: str
    h_manifest: Optional[str] = None
    v_manifest: Optional[str] = None
    reduction: ReductionMethod = ReductionMethod.LINEAR_PREDICTOR
    trim_lower: Optional[float] = Field(default=None, ge=0, le=1)
    trim_upper: Optional[float] = Field(default=None, ge=0, le=1)

    @model_validator(mode="after")
    def _check_trim(self) -> "DataConfig":
        if (self.trim_lower is None) != (self.trim_upper is None):
            raise ValueError("trim_lower and trim_upper must be given together")
        return self

    @property
    def trims(self) -> bool:
        return self.trim_lower is not None


class ModelConfig(_StrictModel):
    px: int = Field(default=8, ge=3)
    pz: int = Field(default=8, ge=3)
    degree: int = Field(default=3, ge=1)
    interaction: bool = True
    binary: bool = True
    sigma_k: float = Field(default=DEFAULT_SIGMA_K, gt=0)
    lambda1_v: float = Field(default=1.0, ge=0)
    newton: NewtonConfig = Field(default_factory=NewtonConfig)


class SelectionConfig(_StrictModel):
    metric: SelectionMetric = SelectionMetric.SS
    folds: int = Field(default=10, ge=2)
    rule: Lambda2Rule = Lambda2Rule.FIFTY_PERCENT
    seed: int = Field(default=0, ge=0)
    lambda1_grid: GridConfig = Field(default_factory=_default_grid1)
    lambda2_grid: GridConfig = Field(default_factory=_default_grid2)


class SimulateConfig(_StrictModel):
    execution: ExecutionConfig = Field(default_factory=ExecutionConfig)
    sim: SimConfig = Field(default_factory=SimConfig)
    recipe: FitRecipe = Field(default_factory=FitRecipe)
    single: bool = False
    preset: Optional[Literal["continuous", "binary"]] = None


class TuneConfig(_StrictModel):
    execution: ExecutionConfig = Field(default_factory=ExecutionConfig)
    mode: Literal["simulation", "cv"] = "simulation"
    sim: SimConfig = Field(default_factory=SimConfig)
    data: Optional[DataConfig] = None
    model: ModelConfig = Field(default_factory=ModelConfig)
    selection: SelectionConfig = Field(default_factory=SelectionConfig)

    @model_validator(mode="after")
    def _check_mode(self) -> "TuneConfig":
        if self.mode == "cv" and self.data is None:
            raise ValueError("cv mode needs --h-csv and --v-csv")
        if self.mode == "simulation" and self.data is not None:
            raise ValueError("the truth-based search runs on simulated data only; use --mode cv for CSV inputs")
        return self


class FitConfig(_StrictModel):
    execution: ExecutionConfig = Field(default_factory=ExecutionConfig)
    data: DataConfig
    model: ModelConfig = Field(default_factory=ModelConfig)
    selection: SelectionConfig = Field(default_factory=SelectionConfig)
    lambda1: Optional[float] = Field(default=None, ge=0)
    lambda2: Optional[float] = Field(default=None, ge=0)
    tune: bool = False

    @model_validator(mode="after")
    def _check_lambdas(self) -> "FitConfig":
        if not self.tune and (self.lambda1 is None or self.lambda2 is None):
            raise ValueError("give --lambda1 and --lambda2, or pass --tune to select them by cross-validation")
        return self


class ReduceConfig(_StrictModel):
    execution: ExecutionConfig = Field(default_factory=ExecutionConfig)
    data: DataConfig
    newton: NewtonConfig = Field(default_factory=NewtonConfig)


def merge_config(flags: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(flags)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = merge_config(merged[key], value)
        else:
            merged[key] = value
    return merged


def audit_dump(config: BaseModel) -> Dict[str, Any]:
    # 输出目录、线程数、日志级别不进入报告
    return config.model_dump(mode="json", exclude={"execution"})


def grid_pair(selection: SelectionConfig) -> Tuple[LambdaGrid, LambdaGrid]:
    return selection.lambda1_grid.to_grid(), selection.lambda2_grid.to_grid()
