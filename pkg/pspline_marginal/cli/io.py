import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from pspline_marginal.core.exceptions import DataSchemaError
from pspline_marginal.reduction.reduce import CovariateBlock

SCHEMA_VERSION = 1


class BlockManifest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    x: List[str] = Field(min_length=1)
    z: List[str] = Field(default_factory=list)


@dataclass(frozen=True)
class CohortData:
    """A cohort either pre-reduced (``x``/``z`` set) or raw (covariate blocks set)."""

    y: np.ndarray
    x: Optional[np.ndarray] = None
    z: Optional[np.ndarray] = None
    x_block: Optional[CovariateBlock] = None
    z_block: Optional[CovariateBlock] = None

    @property
    def is_reduced(self) -> bool:
        return self.x is not None


def _read_json_file(path: str) -> Dict[str, Any]:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def load_manifest(path: str) -> BlockManifest:
    try:
        return BlockManifest.model_validate(_read_json_file(path))
    except (ValidationError, json.JSONDecodeError) as error:
        raise DataSchemaError(f"invalid block manifest {path}: {error}") from error


def _numeric_frame(path: str, frame: pd.DataFrame) -> pd.DataFrame:
    numeric = frame.apply(pd.to_numeric, errors="coerce")
    bad = numeric.isna()
    if bad.to_numpy().any():
        row, column = np.argwhere(bad.to_numpy())[0]
        raise DataSchemaError(
            f"{path}: row {row + 2} column {frame.columns[column]!r} is missing or not numeric "
            f"(value {frame.iat[row, column]!r})"
        )
    return numeric.astype(float)


def _check_columns(path: str, frame: pd.DataFrame, required: List[str]) -> None:
    missing = [name for name in required if name not in frame.columns]
    if missing:
        raise DataSchemaError(f"{path}: missing column(s) {missing}; header is {list(frame.columns)}")


def _check_binary(path: str, y: np.ndarray) -> None:
    bad = np.flatnonzero((y != 0.0) & (y != 1.0))
    if bad.size:
        raise DataSchemaError(f"{path}: row {bad[0] + 2} column 'y' must be 0 or 1, got {y[bad[0]]!r}")


def load_cohort(
    path: str,
    manifest_path: Optional[str] = None,
    *,
    with_z: bool,
    binary: bool,
) -> CohortData:
    frame = pd.read_csv(path, dtype=str, keep_default_na=False, na_values=[""])
    if manifest_path is None:
        expected = ["x", "z", "y"] if with_z else ["x", "y"]
        if list(frame.columns) != expected:
            raise DataSchemaError(
                f"{path}: expected header {','.join(expected)} (or pass a block manifest), "
                f"got {','.join(frame.columns)}"
            )
    else:
        manifest = load_manifest(manifest_path)
        if with_z and not manifest.z:
            raise DataSchemaError(f"{manifest_path}: horizontal manifest needs a non-empty 'z' block")
        _check_columns(path, frame, ["y", *manifest.x, *manifest.z])

    numeric = _numeric_frame(path, frame)
    y = numeric["y"].to_numpy()
    if binary:
        _check_binary(path, y)

    if manifest_path is None:
        return CohortData(
            y=y,
            x=numeric["x"].to_numpy(),
            z=numeric["z"].to_numpy() if with_z else None,
        )
    return CohortData(
        y=y,
        x_block=CovariateBlock(values=numeric[manifest.x].to_numpy(), names=list(manifest.x)),
        z_block=(
            CovariateBlock(values=numeric[manifest.z].to_numpy(), names=list(manifest.z))
            if with_z
            else None
        ),
    )


def write_csv(frame: pd.DataFrame, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, lineterminator="\n", encoding="utf-8")
    return path


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(key): _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if np.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def write_json(payload: Dict[str, Any], path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    document = {"schema_version": SCHEMA_VERSION, **_jsonable(payload)}
    path.write_text(json.dumps(document, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    return path
