"""Two-bump test surfaces on the unit square, with sigma_x = 0.3 and sigma_z = 0.4."""

import numpy as np

SIGMA_X = 0.3
SIGMA_Z = 0.4

_SCALE = 1.0 / (np.pi * SIGMA_X * SIGMA_Z)


def surface_additive(x, z):
    # 第一项的两个平方都以 x 为变量，与公式原文一致
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    first = 0.75 * _SCALE * np.exp(-((x - 0.2) ** 2) / SIGMA_X**2 - ((x - 0.3) ** 2) / SIGMA_Z**2)
    second = 0.45 * _SCALE * np.exp(-((z - 0.7) ** 2) / SIGMA_X**2 - ((z - 0.8) ** 2) / SIGMA_Z**2)
    return first + second


def surface_interaction(x, z):
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    first = 0.75 * _SCALE * np.exp(-((x - 0.2) ** 2) / SIGMA_X**2 - ((z - 0.3) ** 2) / SIGMA_Z**2)
    second = 0.45 * _SCALE * np.exp(-((x - 0.7) ** 2) / SIGMA_X**2 - ((z - 0.8) ** 2) / SIGMA_Z**2)
    return first + second


def get_surface(interaction: bool):
    return surface_interaction if interaction else surface_additive
