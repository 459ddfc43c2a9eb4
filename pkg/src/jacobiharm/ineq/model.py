"""Uniform access to spherical functions and Plancherel densities.

The inequality checks run either on a bare Jacobi setting or on a
Damek-Ricci space; both are reduced here to a phi-grid evaluator, a
density and its logarithm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..damek_ricci import (
    DRParams,
    dr_log_plancherel_density,
    dr_plancherel_density,
    dr_spherical_phi_grid,
    dr_to_jacobi,
)
from ..specfun import JacobiParams, jacobi_phi_grid, log_plancherel_density, plancherel_density


@dataclass(frozen=True)
class SpectralModel:
    params: object
    jacobi: JacobiParams
    phi_grid: Callable
    density: Callable
    log_density: Callable
    Q: float  # rho for Jacobi, the homogeneous dimension for Damek-Ricci
    large_order: float  # log-slope of the density at infinity

    @property
    def is_damek_ricci(self) -> bool:
        return isinstance(self.params, DRParams)


def spectral_model(params) -> SpectralModel:
    if isinstance(params, SpectralModel):
        return params
    if isinstance(params, DRParams):
        return SpectralModel(
            params, dr_to_jacobi(params),
            lambda lam, t: dr_spherical_phi_grid(params, lam, t),
            lambda lam: dr_plancherel_density(params, lam),
            lambda lam: dr_log_plancherel_density(params, lam),
            params.Q, float(params.d - 1),
        )
    if isinstance(params, JacobiParams):
        return SpectralModel(
            params, params,
            lambda lam, t: jacobi_phi_grid(params, lam, t),
            lambda lam: plancherel_density(params, lam),
            lambda lam: log_plancherel_density(params, lam),
            params.rho, 2 * params.alpha + 1,
        )
    raise TypeError(f"expected JacobiParams or DRParams, got {type(params).__name__}")


def energy(F, model: SpectralModel, lam):
    """``|F(lam)|^2 * density(lam)`` evaluated in log space (no overflow at huge lam)."""
    lam = np.asarray(lam, dtype=float)
    exact = getattr(F, "energy_density", None)
    if exact is not None:
        return np.asarray(exact(lam), dtype=float)
    mag = np.abs(np.asarray(F(lam)))
    pos = (mag > 0) & (lam > 0)
    out = np.zeros(lam.shape)
    if np.any(pos):
        out[pos] = np.exp(2 * np.log(mag[pos]) + model.log_density(lam[pos]))
    return out


TWO_PI = 2 * math.pi
