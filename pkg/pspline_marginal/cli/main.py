import argparse
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd
from pydantic import ValidationError

from pspline_marginal.cli.application import (
    build_horizontal_problem,
    estimate_vertical,
    prepare_data,
    run_application_fit,
    tune_penalties,
)
from pspline_marginal.cli.config import (
    FitConfig,
    ReduceConfig,
    SimulateConfig,
    TuneConfig,
    audit_dump,
    grid_pair,
    merge_config,
)
from pspline_marginal.cli.io import write_csv, write_json
from pspline_marginal.core.exceptions import (
    ConfigurationError,
    DataSchemaError,
    DomainError,
    NumericalError,
    ReductionError,
    ShapeError,
    SingularSystemError,
    TuningError,
)
from pspline_marginal.core.log import configure_logging, logger
from pspline_marginal.models.contracts import ModelId
from pspline_marginal.simulation.batch import BatchResult, compare_single, prepare_problem, run_batch
from pspline_marginal.simulation.generate import generate
from pspline_marginal.simulation.presets import get_preset
from pspline_marginal.spline.basis import BasisConvention
from pspline_marginal.tuning.contracts import TuningReport
from pspline_marginal.tuning.search import sequential_search, tune_batch

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _read_json_file(path: str) -> Dict[str, Any]:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _add_common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--output-dir", help="Directory for reports (default: $PSPLINE_MARGINAL_OUTPUT_DIR)")
    parser.add_argument("--config", help="JSON file whose values override the flags")
    parser.add_argument("--threads", type=int, help="Maximum worker threads")
    parser.add_argument("--log-level", help="loguru level for stderr logging")


def _add_sim_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--interaction", action=argparse.BooleanOptionalAction, default=None)
    parser.add_argument("--n", dest="n_h", type=int)
    parser.add_argument("--sigma", dest="sigma_noise", type=float)
    parser.add_argument("--px", type=int)
    parser.add_argument("--pz", type=int)
    parser.add_argument("--binary", action="store_true", default=None)
    parser.add_argument("--nrep", type=int)
    parser.add_argument("--nsim", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--sigma-k", dest="sigma_k", type=float)
    parser.add_argument("--basis", choices=[convention.value for convention in BasisConvention])


def _add_data_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--h-csv")
    parser.add_argument("--v-csv")
    parser.add_argument("--h-manifest")
    parser.add_argument("--v-manifest")
    parser.add_argument("--method", dest="reduction", choices=["linear_predictor", "pca"])
    parser.add_argument("--trim-lower", type=float)
    parser.add_argument("--trim-upper", type=float)


def _add_model_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--px", type=int)
    parser.add_argument("--pz", type=int)
    parser.add_argument("--interaction", action=argparse.BooleanOptionalAction, default=None)
    parser.add_argument("--binary", action=argparse.BooleanOptionalAction, default=None)
    parser.add_argument("--sigma-k", dest="sigma_k", type=float)
    parser.add_argument("--lambda1-v", dest="lambda1_v", type=float)
    parser.add_argument("--metric", choices=["ss", "loglik", "auc"])
    parser.add_argument("--folds", type=int)
    parser.add_argument("--rule", choices=["fifty", "best"])
    parser.add_argument("--seed", type=int)


def _build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="pspline-marginal")
    subparsers = parser.add_subparsers(dest="command", required=True)

    simulate_parser = subparsers.add_parser("simulate", help="Run a simulation batch of Fit0/Fit1/Fit2")
    _add_common_arguments(simulate_parser)
    _add_sim_arguments(simulate_parser)
    simulate_parser.add_argument("--lambda1a", type=float)
    simulate_parser.add_argument("--lambda1b", type=float)
    simulate_parser.add_argument("--lambda2", type=float)
    simulate_parser.add_argument("--single", action="store_true", default=None)
    simulate_parser.add_argument("--preset", choices=["continuous", "binary"])

    tune_parser = subparsers.add_parser("tune", help="Select penalty weights")
    _add_common_arguments(tune_parser)
    tune_parser.add_argument("--mode", choices=["simulation", "cv"])
    _add_data_arguments(tune_parser)
    tune_parser.add_argument("--n", dest="n_h", type=int)
    tune_parser.add_argument("--sigma", dest="sigma_noise", type=float)
    tune_parser.add_argument("--nrep", type=int)
    tune_parser.add_argument("--nsim", type=int)
    _add_model_arguments(tune_parser)

    fit_parser = subparsers.add_parser("fit", help="Fit Fit0/Fit1/Fit2 on horizontal data against the vertical marginal")
    _add_common_arguments(fit_parser)
    _add_data_arguments(fit_parser)
    _add_model_arguments(fit_parser)
    fit_parser.add_argument("--lambda1", type=float)
    fit_parser.add_argument("--lambda2", type=float)
    fit_parser.add_argument("--tune", action="store_true", default=None)

    reduce_parser = subparsers.add_parser("reduce", help="Reduce covariate blocks to scalar x and z")
    _add_common_arguments(reduce_parser)
    _add_data_arguments(reduce_parser)
    return parser


def _pick(args: argparse.Namespace, *names: str) -> Dict[str, Any]:
    return {name: getattr(args, name) for name in names if getattr(args, name, None) is not None}


def _resolve(args: argparse.Namespace, flags: Dict[str, Any], model_class):
    flags["execution"] = _pick(args, "output_dir", "threads", "log_level")
    overrides = _read_json_file(args.config) if args.config else {}
    config = model_class.model_validate(merge_config(flags, overrides))
    configure_logging(config.execution.log_level)
    return config


def _data_flags(args: argparse.Namespace) -> Dict[str, Any]:
    return _pick(args, "h_csv", "v_csv", "h_manifest", "v_manifest", "reduction", "trim_lower", "trim_upper")


def _model_flags(args: argparse.Namespace) -> Dict[str, Any]:
    return {
        "model": _pick(args, "px", "pz", "interaction", "binary", "sigma_k", "lambda1_v"),
        "selection": _pick(args, "metric", "folds", "rule", "seed"),
    }


def _batch_rows(index: int, result: BatchResult) -> List[Dict[str, Any]]:
    config = result.config
    return [
        {
            "row": index,
            "interaction": config.interaction,
            "n_h": config.n_h,
            "sigma": config.sigma_noise,
            "px": config.px,
            "pz": config.pz,
            "nrep": config.nrep,
            "binary": config.binary,
            "model": row.model.value,
            "metric": row.metric,
            "mean": row.mean,
            "n_ok": row.n_ok,
            "n_failed": row.n_failed,
            "n_flagged": row.n_flagged,
        }
        for row in result.rows
    ]


def _curve_rows(index: int, result: BatchResult) -> List[Dict[str, Any]]:
    rows = []
    for model, curve in result.curves.items():
        for x, truth, estimate in zip(curve.x_test, result.true_marginal.theta, curve.theta):
            rows.append({"row": index, "model": model.value, "x": x, "theta_true": truth, "theta_hat": estimate})
    return rows


def _simulate(args: argparse.Namespace) -> int:
    flags = {
        "sim": _pick(args, "interaction", "n_h", "sigma_noise", "px", "pz", "binary", "nrep", "nsim", "seed", "sigma_k", "basis"),
        "recipe": _pick(args, "lambda1a", "lambda1b", "lambda2"),
        **_pick(args, "single", "preset"),
    }
    config = _resolve(args, flags, SimulateConfig)
    output_dir = Path(config.execution.output_dir)
    threads = config.execution.threads

    if config.single:
        comparison = compare_single(config.sim, config.recipe)
        slices = pd.DataFrame(
            [
                {"z": piece.z, "x": x, "truth": truth, **{model.value: piece.fitted[model][i] for model in piece.fitted}}
                for piece in comparison.slices
                for i, (x, truth) in enumerate(zip(piece.x, piece.truth))
            ]
        )
        curves = pd.DataFrame(
            {
                "x": comparison.true_marginal.x_test,
                "theta_true": comparison.true_marginal.theta,
                **{model.value: fit.marginal.theta for model, fit in comparison.fits.items()},
            }
        )
        outputs = [
            write_json(
                {"command": "simulate", "config": audit_dump(config), "scores": {m.value: s for m, s in comparison.scores.items()}},
                output_dir / "single.json",
            ),
            write_csv(slices, output_dir / "slices.csv"),
            write_csv(curves, output_dir / "marginal_curves.csv"),
        ]
        print(json.dumps({"command": "simulate", "outputs": [str(path) for path in outputs]}, ensure_ascii=False, indent=2))
        return EXIT_OK

    if config.preset:
        plan = [
            (row.sim_config(nsim=config.sim.nsim, seed=config.sim.seed), row.recipe())
            for row in get_preset(config.preset)
        ]
    else:
        plan = [(config.sim, config.recipe)]

    results = [run_batch(sim, recipe, threads=threads) for sim, recipe in plan]
    batch_rows = [row for index, result in enumerate(results) for row in _batch_rows(index, result)]
    curve_rows = [row for index, result in enumerate(results) for row in _curve_rows(index, result)]
    report = {
        "command": "simulate",
        "config": audit_dump(config),
        "batches": [
            {
                "sim": result.config.model_dump(mode="json"),
                "recipe": result.recipe.model_dump(mode="json"),
                "means": {
                    model.value: {row.metric: row.mean for row in result.rows if row.model is model}
                    for model in ModelId
                },
                "n_failed": {row.model.value: row.n_failed for row in result.rows},
            }
            for result in results
        ],
    }
    outputs = [
        write_csv(pd.DataFrame(batch_rows), output_dir / "batch.csv"),
        write_json(report, output_dir / "batch.json"),
        write_csv(pd.DataFrame(curve_rows), output_dir / "marginal_curves.csv"),
    ]
    if all(row["n_ok"] == 0 for row in batch_rows):
        logger.error("Every replicate fit failed")
        return EXIT_NUMERICAL
    summary = {
        "command": "simulate",
        "outputs": [str(path) for path in outputs],
        "means": [batch["means"] for batch in report["batches"]],
    }
    print(json.dumps(summary, ensure_ascii=False, indent=2))
    return EXIT_OK


def _trace_frame(report: TuningReport) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {"stage": point.stage, "lambda": point.lambda_, "fold": point.fold, "metric": point.metric, "value": point.value}
            for point in report.traces
        ],
        columns=["stage", "lambda", "fold", "metric", "value"],
    ).astype({"fold": "Int64"})


def _tune(args: argparse.Namespace) -> int:
    data = _data_flags(args)
    flags = {**_pick(args, "mode"), **_model_flags(args)}
    if data:
        flags["data"] = data
    else:
        flags["sim"] = _pick(
            args, "interaction", "n_h", "sigma_noise", "px", "pz", "binary", "nrep", "nsim", "seed", "sigma_k", "basis"
        )
    config = _resolve(args, flags, TuneConfig)
    threads = config.execution.threads
    payload: Dict[str, Any] = {"command": "tune", "config": audit_dump(config)}

    if config.mode == "cv":
        prepared = prepare_data(config.data, binary=config.model.binary, newton=config.model.newton)
        problem = build_horizontal_problem(prepared, config.model, estimate_vertical(prepared, config.model))
        report = tune_penalties(problem, config.selection, threads=threads)
    else:
        grid1, grid2 = grid_pair(config.selection)
        if config.sim.nsim == 1:
            dataset = generate(config.sim)
            report = sequential_search(prepare_problem(config.sim, dataset), dataset.truth, grid1, grid2, threads=threads)
        else:
            batch = tune_batch(config.sim, grid1, grid2, threads=threads)
            first = next(item for item in batch.reports if item is not None)
            report = first.model_copy(
                update={"lambda1a": batch.lambda1a, "lambda1b": batch.lambda1b, "lambda2": batch.lambda2}
            )
            payload["replicates"] = [
                None if item is None else {"lambda1a": item.lambda1a, "lambda1b": item.lambda1b, "lambda2": item.lambda2}
                for item in batch.reports
            ]

    payload["report"] = report.model_dump(mode="json", by_alias=True)
    output_dir = Path(config.execution.output_dir)
    outputs = [
        write_json(payload, output_dir / "tuning.json"),
        write_csv(_trace_frame(report), output_dir / "trace.csv"),
    ]
    summary = {
        "command": "tune",
        "outputs": [str(path) for path in outputs],
        "lambda1a": report.lambda1a,
        "lambda1b": report.lambda1b,
        "lambda2": report.lambda2,
    }
    print(json.dumps(summary, ensure_ascii=False, indent=2))
    return EXIT_OK


def _fit(args: argparse.Namespace) -> int:
    flags = {"data": _data_flags(args), **_model_flags(args), **_pick(args, "lambda1", "lambda2", "tune")}
    config = _resolve(args, flags, FitConfig)
    outcome = run_application_fit(
        config.data,
        config.model,
        config.selection,
        lambda1=config.lambda1,
        lambda2=config.lambda2,
        tune=config.tune,
        threads=config.execution.threads,
    )
    target = outcome.problem.target
    columns = {"x": target.x_test}
    for model_id, fit in outcome.fits.items():
        if fit is not None:
            columns[f"theta_h_{model_id.value.lower()}"] = fit.marginal.theta
    columns["theta_v"] = target.theta

    payload = {"command": "fit", "config": audit_dump(config), "fits": outcome.summaries}
    if outcome.tuning is not None:
        payload["tuning"] = outcome.tuning.model_dump(mode="json", by_alias=True, exclude={"traces"})
    output_dir = Path(config.execution.output_dir)
    outputs = [
        write_json(payload, output_dir / "fit.json"),
        write_csv(pd.DataFrame(columns), output_dir / "marginal.csv"),
    ]
    summary = {
        "command": "fit",
        "outputs": [str(path) for path in outputs],
        "marginal_ss": {
            name: (entry["marginal_ss"] if entry is not None else None)
            for name, entry in outcome.summaries.items()
            if name in {model.value for model in ModelId}
        },
    }
    print(json.dumps(summary, ensure_ascii=False, indent=2))
    return EXIT_OK


def _reduce(args: argparse.Namespace) -> int:
    config = _resolve(args, {"data": _data_flags(args)}, ReduceConfig)
    if config.data.h_manifest is None:
        raise ConfigurationError("reduce needs --h-manifest naming the x and z covariate blocks")
    prepared = prepare_data(config.data, binary=config.data.reduction.value == "linear_predictor", newton=config.newton)
    output_dir = Path(config.execution.output_dir)
    outputs = [
        write_csv(pd.DataFrame({"x": prepared.x_h, "z": prepared.z_h, "y": prepared.y_h}), output_dir / "reduced_h.csv"),
        write_csv(pd.DataFrame({"x": prepared.x_v, "y": prepared.y_v}), output_dir / "reduced_v.csv"),
        write_json({"command": "reduce", "config": audit_dump(config), "reduction": prepared.summary}, output_dir / "reduce.json"),
    ]
    summary = {
        "command": "reduce",
        "outputs": [str(path) for path in outputs],
        "removed": prepared.summary.get("trim", {}).get("removed", 0),
    }
    print(json.dumps(summary, ensure_ascii=False, indent=2))
    return EXIT_OK


COMMANDS = {
    "simulate": _simulate,
    "tune": _tune,
    "fit": _fit,
    "reduce": _reduce,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handler = COMMANDS.get(args.command)
    if handler is None:
        raise SystemExit(f"Unsupported command: {args.command}")
    try:
        return handler(args)
    except (ConfigurationError, ValidationError, json.JSONDecodeError) as error:
        logger.error("Invalid configuration: {}", error)
        return EXIT_CONFIG
    except (DataSchemaError, DomainError, ShapeError, OSError) as error:
        logger.error("Invalid input data: {}", error)
        return EXIT_DATA
    except (SingularSystemError, NumericalError, TuningError, ReductionError) as error:
        logger.error("Numerical failure: {}", error)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    raise SystemExit(main())
