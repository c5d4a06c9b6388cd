"""J2 yield surface, loading classification, hardening stages, and radial return.

In uniaxial strain the deviator is fully determined by S11 (S22 = S33 =
-S11/2), so the yield surface reduces to the pair of points |S11| = 2 sigma_y/3
and the whole plastic machinery works on one scalar.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .material import MaterialProperties

__all__ = [
    "PlasticState",
    "LoadingClass",
    "deviatoric_invariant",
    "effective_stress",
    "yield_function",
    "classify_loading",
    "plastic_source_coefficient",
    "radial_return",
    "radial_return_arrays",
    "hardening_lookup",
    "advance_stage",
]

# Relative slack when deciding whether a stress sits on the yield surface.
_SURFACE_TOL = 1e-12

_TWO_OVER_SQRT3 = 2.0 / math.sqrt(3.0)


@dataclass(frozen=True)
class PlasticState:
    """Per-cell yield-surface radius (in S11 measure), accumulated effective
    plastic strain, and active hardening stage."""

    yield_radius: float
    eff_plastic_strain: float = 0.0
    stage: int = 0

    def __post_init__(self):
        if not self.yield_radius > 0.0:
            raise ValueError("yield_radius must be positive")
        if self.eff_plastic_strain < 0.0:
            raise ValueError("eff_plastic_strain must be non-negative")
        if self.stage < 0:
            raise ValueError("stage must be non-negative")

    @staticmethod
    def initial(mat: MaterialProperties) -> "PlasticState":
        return PlasticState(yield_radius=2.0 * mat.initial_yield / 3.0)


class LoadingClass(enum.Enum):
    ELASTIC = "elastic"
    UNLOADING_OR_NEUTRAL = "unloading_or_neutral"
    PLASTIC_LOADING = "plastic_loading"

    @property
    def gamma(self) -> int:
        return 1 if self is LoadingClass.PLASTIC_LOADING else 0


def deviatoric_invariant(s11):
    """s = S_mn S_mn for the 1-D traceless deviator: 1.5 S11^2."""
    s11 = np.asarray(s11, dtype=float)
    out = 1.5 * s11 * s11
    return out if out.ndim else float(out)


def effective_stress(s11):
    """sigma_bar = sqrt(1.5 S_mn S_mn) = 1.5 |S11|."""
    s11 = np.asarray(s11, dtype=float)
    out = 1.5 * np.abs(s11)
    return out if out.ndim else float(out)


def yield_function(s11, sigma_y):
    """F = 0.5 S_mn S_mn - sigma_y^2/3 = 0.75 S11^2 - sigma_y^2/3.

    Negative inside the yield surface, zero on it (|S11| = 2 sigma_y/3).
    """
    if np.any(np.asarray(sigma_y) <= 0.0):
        raise ValueError("sigma_y must be positive")
    s11 = np.asarray(s11, dtype=float)
    out = 0.75 * s11 * s11 - np.asarray(sigma_y, dtype=float) ** 2 / 3.0
    return out if out.ndim else float(out)


def classify_loading(s11: float, ds11: float, plastic: PlasticState) -> LoadingClass:
    """Loading switch: elastic strictly inside the surface; on the surface,
    plastic loading iff d(S_mn S_mn) > 0, i.e. S11 * dS11 > 0."""
    r = plastic.yield_radius
    if abs(s11) < r * (1.0 - _SURFACE_TOL):
        return LoadingClass.ELASTIC
    if s11 * ds11 > 0.0:
        return LoadingClass.PLASTIC_LOADING
    return LoadingClass.UNLOADING_OR_NEUTRAL


def plastic_source_coefficient(gamma, mat: MaterialProperties, modulus):
    """(4/3) mu (1 - gamma/(1 + B/(3 mu))); 4 mu/3 when gamma = 0."""
    modulus = np.asarray(modulus, dtype=float)
    if np.any(modulus < 0.0):
        raise ValueError("hardening modulus must be non-negative")
    mu = mat.shear_modulus
    gamma = np.asarray(gamma, dtype=float)
    out = (4.0 / 3.0) * mu * (1.0 - gamma / (1.0 + modulus / (3.0 * mu)))
    return out if out.ndim else float(out)


def radial_return_arrays(s_trial, radius, modulus, mu):
    """Vectorized correction: pull |S| exceeding the radius back toward it.

    Returns (s_corrected, new_radius, d_eps_plastic).  With B = 0 the stress
    is pinned exactly at the radius; with B > 0 the radius grows (hardening).
    """
    s_trial = np.asarray(s_trial, dtype=float)
    radius = np.asarray(radius, dtype=float)
    modulus = np.asarray(modulus, dtype=float)
    over = np.abs(s_trial) > radius
    pullback = (np.abs(s_trial) - radius) / (1.0 + modulus / (3.0 * mu))
    s_corr = np.where(over, s_trial - np.sign(s_trial) * pullback, s_trial)
    new_radius = np.where(over, np.abs(s_corr), radius)
    d_eps = np.where(over, (np.abs(s_trial) - np.abs(s_corr)) / (2.0 * mu) * _TWO_OVER_SQRT3, 0.0)
    return s_corr, new_radius, d_eps


def hardening_lookup(plastic: PlasticState, mat: MaterialProperties) -> tuple[float, float]:
    """(sigma_y, B) of the active hardening stage."""
    stages = mat.hardening_stages
    if plastic.stage >= len(stages):
        raise ValueError(f"stage {plastic.stage} out of bounds for {len(stages)} stages")
    st = stages[plastic.stage]
    return st.yield_stress, st.modulus


def advance_stage(plastic: PlasticState, mat: MaterialProperties, s11: float) -> PlasticState:
    """Advance the stage index while the effective stress has reached the next
    stage's yield stress.  The stage never goes backwards."""
    sig = effective_stress(s11)
    stage = plastic.stage
    stages = mat.hardening_stages
    while stage + 1 < len(stages) and sig >= stages[stage + 1].yield_stress:
        stage += 1
    if stage == plastic.stage:
        return plastic
    return replace(plastic, stage=stage)


def radial_return(s_trial: float, plastic: PlasticState,
                  mat: MaterialProperties) -> tuple[float, PlasticState]:
    """Predictor/corrector step for one cell.

    Applied only when the trial stress violates the current yield surface;
    otherwise the state passes through unchanged.  The yield radius trails the
    corrected stress and the effective plastic strain accumulates the 1-D
    measure of the stress pullback.
    """
    sigma_y, modulus = hardening_lookup(plastic, mat)
    s_corr, new_radius, d_eps = radial_return_arrays(
        s_trial, plastic.yield_radius, modulus, mat.shear_modulus)
    new = replace(plastic,
                  yield_radius=float(new_radius),
                  eff_plastic_strain=plastic.eff_plastic_strain + float(d_eps))
    new = advance_stage(new, mat, float(s_corr))
    return float(s_corr), new
