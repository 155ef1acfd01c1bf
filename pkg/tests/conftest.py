import numpy as np
import pandas as pd
from _pytest.fixtures import fixture

from pspline_marginal.models.marginal import build_kernel, equidistant_test_points
from pspline_marginal.simulation.config import SimConfig
from pspline_marginal.simulation.generate import generate_application_pair
from pspline_marginal.spline.basis import BasisSpec, eval_basis
from pspline_marginal.spline.design import build_interaction_design, build_roughness


@fixture(scope="function")
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@fixture(scope="function")
def small_linear_config() -> SimConfig:
    return SimConfig(n_h=100, sigma_noise=0.2, interaction=True, px=6, pz=6, nsim=2, seed=7, m_z=500)


@fixture(scope="function")
def small_binary_config() -> SimConfig:
    return SimConfig(
        n_h=100, interaction=False, px=5, pz=5, nrep=2, nsim=2, seed=11, binary=True, m_z=500
    )


@fixture(scope="function")
def interaction_problem_parts(rng):
    x = rng.uniform(size=60)
    z = rng.uniform(size=60)
    design = build_interaction_design(
        eval_basis(BasisSpec(num_basis=4), x), eval_basis(BasisSpec(num_basis=4), z)
    )
    kernel = build_kernel(x, equidistant_test_points(12), 0.15)
    return x, z, design, build_roughness(design.layout), kernel


@fixture(scope="function")
def application_csvs(tmp_path):
    pair = generate_application_pair(n_v=1500, n_h=400, interaction=True, binary=True, seed=5)
    h_csv = tmp_path / "h.csv"
    v_csv = tmp_path / "v.csv"
    pd.DataFrame({"x": pair.x_h, "z": pair.z_h, "y": pair.y_h}).to_csv(h_csv, index=False)
    pd.DataFrame({"x": pair.x_v, "y": pair.y_v}).to_csv(v_csv, index=False)
    return h_csv, v_csv, pair
