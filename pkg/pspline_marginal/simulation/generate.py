from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from pspline_marginal.core.exceptions import ConfigurationError
from pspline_marginal.models.logistic import expit
from pspline_marginal.models.marginal import (
    MarginalCurve,
    equidistant_test_points,
    true_marginal_oracle,
)
from pspline_marginal.simulation.config import SimConfig
from pspline_marginal.simulation.surfaces import get_surface

LOGIT_RANGE = (-2.5, 2.5)


@dataclass(frozen=True)
class SimDataset:
    x: np.ndarray
    z: np.ndarray
    y: np.ndarray
    # 线性情形为 y_true，二分类情形为真实概率 theta(x, z)
    truth: np.ndarray
    theta_true_marginal: MarginalCurve
    binary: bool
    nrep: int = 1

    @property
    def n_h(self) -> int:
        return self.x.shape[0]


def replicate_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))


def regular_grid(n_h: int) -> Tuple[np.ndarray, np.ndarray]:
    side = int(round(np.sqrt(n_h)))
    if side * side != n_h:
        raise ConfigurationError(f"n_h={n_h} is not a perfect square")
    # 包含两端点 0 与 1
    axis = np.linspace(0.0, 1.0, side)
    x, z = np.meshgrid(axis, axis, indexing="ij")
    return x.ravel(), z.ravel()


def default_logit_scale(surface, x: np.ndarray, z: np.ndarray) -> Tuple[float, float]:
    values = surface(x, z)
    lo, hi = float(values.min()), float(values.max())
    if hi == lo:
        return 0.0, 0.0
    slope = (LOGIT_RANGE[1] - LOGIT_RANGE[0]) / (hi - lo)
    return LOGIT_RANGE[0] - slope * lo, slope


def probability_surface(config: SimConfig):
    surface = get_surface(config.interaction)
    a, b = config.logit_scale or default_logit_scale(surface, *regular_grid(config.n_h))

    def theta(x, z):
        return expit(a + b * surface(x, z))

    return theta


def gen_linear(config: SimConfig, *, replicate: int = 0) -> SimDataset:
    if config.binary:
        raise ConfigurationError("gen_linear called with a binary configuration")
    surface = get_surface(config.interaction)
    x, z = regular_grid(config.n_h)
    y_true = surface(x, z)
    rng = replicate_rng(config.seed, replicate)
    y = y_true + rng.normal(0.0, config.sigma_noise, size=config.n_h)
    marginal = true_marginal_oracle(surface, equidistant_test_points(config.n_test), config.m_z)
    return SimDataset(x=x, z=z, y=y, truth=y_true, theta_true_marginal=marginal, binary=False)


def gen_binary(config: SimConfig, *, replicate: int = 0) -> SimDataset:
    if not config.binary:
        raise ConfigurationError("gen_binary called with a continuous configuration")
    theta = probability_surface(config)
    x, z = regular_grid(config.n_h)
    theta_true = theta(x, z)
    rng = replicate_rng(config.seed, replicate)
    y = (rng.uniform(0.0, 1.0, size=config.n_h) < theta_true).astype(float)
    marginal = true_marginal_oracle(theta, equidistant_test_points(config.n_test), config.m_z)
    return SimDataset(
        x=x,
        z=z,
        y=y,
        truth=theta_true,
        theta_true_marginal=marginal,
        binary=True,
        nrep=config.nrep,
    )


def generate(config: SimConfig, *, replicate: int = 0) -> SimDataset:
    if config.binary:
        return gen_binary(config, replicate=replicate)
    return gen_linear(config, replicate=replicate)


@dataclass(frozen=True)
class ApplicationPair:
    x_h: np.ndarray
    z_h: np.ndarray
    y_h: np.ndarray
    x_v: np.ndarray
    y_v: np.ndarray
    theta_marginal: Callable[[np.ndarray], np.ndarray]


def generate_application_pair(
    *,
    n_v: int = 6024,
    n_h: int = 1456,
    interaction: bool = True,
    binary: bool = True,
    sigma_noise: float = 0.2,
    seed: int = 0,
    logit_scale: Optional[Tuple[float, float]] = None,
) -> ApplicationPair:
    """Synthetic horizontal/vertical cohorts with covariates drawn uniformly on the unit square.

    The vertical cohort only keeps x; its response is generated from the same
    surface, so the marginal of x is shared by both cohorts.
    """
    surface = get_surface(interaction)
    rng = replicate_rng(seed, 0)
    x_h, z_h = rng.uniform(size=n_h), rng.uniform(size=n_h)
    x_v, z_v = rng.uniform(size=n_v), rng.uniform(size=n_v)

    if binary:
        a, b = logit_scale or default_logit_scale(surface, *regular_grid(400))

        def response(x, z):
            return expit(a + b * surface(x, z))

        y_h = (rng.uniform(size=n_h) < response(x_h, z_h)).astype(float)
        y_v = (rng.uniform(size=n_v) < response(x_v, z_v)).astype(float)
    else:
        response = surface
        y_h = surface(x_h, z_h) + rng.normal(0.0, sigma_noise, size=n_h)
        y_v = surface(x_v, z_v) + rng.normal(0.0, sigma_noise, size=n_v)

    def theta_marginal(xs):
        return true_marginal_oracle(response, xs).theta

    return ApplicationPair(x_h=x_h, z_h=z_h, y_h=y_h, x_v=x_v, y_v=y_v, theta_marginal=theta_marginal)
