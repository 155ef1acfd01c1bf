from pspline_marginal.simulation.batch import (
    BatchResult,
    BatchRow,
    SingleComparison,
    compare_single,
    evaluate_replicate,
    prepare_problem,
    run_batch,
)
from pspline_marginal.simulation.config import FitRecipe, SimConfig
from pspline_marginal.simulation.generate import (
    ApplicationPair,
    SimDataset,
    gen_binary,
    gen_linear,
    generate,
    generate_application_pair,
    regular_grid,
    replicate_rng,
)
from pspline_marginal.simulation.metrics import (
    ss_fitted,
    ss_marginal,
    sum_of_squares,
    weighted_sum_of_squares,
    wss_fitted,
    wss_marginal,
)
from pspline_marginal.simulation.presets import BINARY_ROWS, CONTINUOUS_ROWS, PresetRow, get_preset
from pspline_marginal.simulation.surfaces import surface_additive, surface_interaction

__all__ = [
    "ApplicationPair",
    "BINARY_ROWS",
    "BatchResult",
    "BatchRow",
    "CONTINUOUS_ROWS",
    "FitRecipe",
    "PresetRow",
    "SimConfig",
    "SimDataset",
    "SingleComparison",
    "compare_single",
    "evaluate_replicate",
    "gen_binary",
    "gen_linear",
    "generate",
    "generate_application_pair",
    "get_preset",
    "prepare_problem",
    "regular_grid",
    "replicate_rng",
    "run_batch",
    "ss_fitted",
    "ss_marginal",
    "sum_of_squares",
    "surface_additive",
    "surface_interaction",
    "weighted_sum_of_squares",
    "wss_fitted",
    "wss_marginal",
]
