"""Reference simulation grids with tuned penalty weights and reference means.

Continuous rows use ``p = 8`` at ``n_h = 100`` and ``p = 18`` at ``n_h = 400``.
Every row smooths marginals with a kernel bandwidth of 0.05.
Reference means are ``(Fit0, Fit1, Fit2)`` averaged over 100 replicates.
"""

from dataclasses import dataclass
from typing import Dict, List, Tuple

from pspline_marginal.core.exceptions import ConfigurationError
from pspline_marginal.simulation.config import FitRecipe, SimConfig

Triple = Tuple[float, float, float]
PRESET_SIGMA_K = 0.05


@dataclass(frozen=True)
class PresetRow:
    interaction: bool
    n_h: int
    px: int
    sigma_noise: float = 0.2
    nrep: int = 1
    binary: bool = False
    # (lambda1a, lambda1b, lambda2)
    lambdas: Triple = (0.5, 0.5, 2.0)
    reference_fitted: Triple = (0.0, 0.0, 0.0)
    reference_marginal: Triple = (0.0, 0.0, 0.0)
    sigma_k: float = PRESET_SIGMA_K

    def sim_config(self, *, nsim: int, seed: int) -> SimConfig:
        return SimConfig(
            n_h=self.n_h,
            sigma_noise=self.sigma_noise,
            interaction=self.interaction,
            px=self.px,
            pz=self.px,
            nrep=self.nrep,
            nsim=nsim,
            seed=seed,
            binary=self.binary,
            sigma_k=self.sigma_k,
        )

    def recipe(self) -> FitRecipe:
        lambda1a, lambda1b, lambda2 = self.lambdas
        return FitRecipe(lambda1a=lambda1a, lambda1b=lambda1b, lambda2=lambda2)


CONTINUOUS_ROWS: List[PresetRow] = [
    PresetRow(True, 100, 8, 0.2, lambdas=(0.1, 0.1, 0.2), reference_fitted=(6.55, 4.74, 4.71), reference_marginal=(0.94, 0.98, 0.73)),
    PresetRow(True, 100, 8, 0.5, lambdas=(0.3, 0.3, 0.6), reference_fitted=(19.95, 7.73, 7.34), reference_marginal=(1.71, 1.51, 0.74)),
    PresetRow(True, 100, 8, 1.0, lambdas=(0.9, 0.9, 1.8), reference_fitted=(70.26, 15.41, 13.20), reference_marginal=(4.93, 3.53, 0.76)),
    PresetRow(True, 400, 18, 0.2, lambdas=(2.0, 2.0, 2.3), reference_fitted=(20.64, 9.07, 8.99), reference_marginal=(0.32, 0.40, 0.22)),
    PresetRow(True, 400, 18, 0.5, lambdas=(6.0, 6.0, 7.0), reference_fitted=(88.66, 13.18, 12.53), reference_marginal=(0.56, 0.67, 0.20)),
    PresetRow(True, 400, 18, 1.0, lambdas=(18.0, 18.0, 21.0), reference_fitted=(333.85, 23.46, 20.32), reference_marginal=(1.34, 1.22, 0.16)),
    PresetRow(False, 100, 8, 0.2, lambdas=(0.1, 0.1, 0.5), reference_fitted=(0.68, 0.54, 0.45), reference_marginal=(0.81, 0.95, 0.53)),
    PresetRow(False, 100, 8, 0.5, lambdas=(0.3, 0.3, 1.5), reference_fitted=(4.23, 3.04, 2.08), reference_marginal=(1.89, 2.13, 0.58)),
    PresetRow(False, 100, 8, 1.0, lambdas=(0.9, 0.9, 4.5), reference_fitted=(16.84, 10.47, 5.88), reference_marginal=(4.77, 4.73, 0.48)),
    PresetRow(False, 400, 18, 0.2, lambdas=(4.3, 6.0, 1.0), reference_fitted=(1.56, 0.75, 0.68), reference_marginal=(0.75, 0.83, 0.67)),
    PresetRow(False, 400, 18, 0.5, lambdas=(13.0, 18.0, 3.0), reference_fitted=(8.98, 3.43, 2.67), reference_marginal=(0.90, 1.10, 0.64)),
    PresetRow(False, 400, 18, 1.0, lambdas=(36.0, 54.0, 9.0), reference_fitted=(37.76, 11.65, 8.19), reference_marginal=(1.95, 2.35, 0.62)),
]

BINARY_ROWS: List[PresetRow] = [
    PresetRow(False, 100, 4, nrep=4, binary=True, lambdas=(0.06, 0.23, 8.94), reference_fitted=(16.76, 11.86, 9.22), reference_marginal=(1.37, 1.32, 0.99)),
    PresetRow(False, 100, 8, nrep=4, binary=True, lambdas=(0.21, 0.22, 8.92), reference_fitted=(16.50, 10.34, 8.66), reference_marginal=(1.14, 1.21, 0.83)),
    PresetRow(False, 400, 8, nrep=2, binary=True, lambdas=(0.28, 0.30, 18.86), reference_fitted=(17.75, 12.85, 9.26), reference_marginal=(0.85, 1.00, 0.49)),
    PresetRow(False, 400, 18, nrep=2, binary=True, lambdas=(6.34, 7.06, 18.98), reference_fitted=(37.99, 12.32, 9.13), reference_marginal=(0.77, 0.90, 0.47)),
    PresetRow(False, 900, 8, nrep=1, binary=True, lambdas=(0.25, 0.33, 20.82), reference_fitted=(17.94, 12.62, 9.14), reference_marginal=(0.76, 0.88, 0.46)),
    PresetRow(True, 100, 8, nrep=8, binary=True, lambdas=(0.71, 0.67, 13.06), reference_fitted=(83.63, 32.44, 30.79), reference_marginal=(0.85, 0.72, 0.34)),
    PresetRow(True, 400, 8, nrep=2, binary=True, lambdas=(0.62, 0.59, 15.98), reference_fitted=(74.55, 22.98, 20.71), reference_marginal=(0.65, 0.56, 0.24)),
    PresetRow(True, 900, 8, nrep=1, binary=True, lambdas=(0.57, 0.59, 18.46), reference_fitted=(73.20, 22.48, 20.18), reference_marginal=(0.54, 0.45, 0.21)),
]

PRESETS: Dict[str, List[PresetRow]] = {
    "continuous": CONTINUOUS_ROWS,
    "binary": BINARY_ROWS,
}


def get_preset(name: str) -> List[PresetRow]:
    try:
        return PRESETS[name]
    except KeyError as error:
        raise ConfigurationError(
            f"unknown preset {name!r}, expected one of {sorted(PRESETS)}"
        ) from error
