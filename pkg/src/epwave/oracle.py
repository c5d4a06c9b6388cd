"""Closed-form validation targets.

Everything here is independent of the solver: linearized wave speeds,
d'Alembert translation, the uniaxial-strain stress-strain curve, the Hugoniot
elastic limit, and impedance-based plateau predictions for the symmetric
impact.  These are the numbers the numerical runs are checked against.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .material import MaterialProperties, density_from_pressure

__all__ = [
    "PlateauPrediction",
    "linear_wave_speed",
    "dalembert",
    "uniaxial_strain_stress",
    "hugoniot_elastic_limit",
    "impact_plateaus",
]


@dataclass(frozen=True)
class PlateauPrediction:
    """Piecewise-constant target states for the two-wave impact structure."""

    precursor_particle_velocity: float
    precursor_axial_stress: float     # T11 [Pa], tension positive
    precursor_density: float
    plateau_particle_velocity: float
    plateau_axial_stress: float
    plateau_pressure: float
    plateau_density: float
    elastic_only: bool = False


def linear_wave_speed(mat: MaterialProperties, beta, modulus=0.0):
    """Speed of the linearized system about the rest state.

    Deliberately a second, independent evaluation of the same physics as
    material.general_wave_speed; the two are cross-checked in tests.
    """
    beta = np.asarray(beta, dtype=float)
    modulus = np.asarray(modulus, dtype=float)
    if np.any(modulus < 0.0):
        raise ValueError("hardening modulus must be non-negative")
    K = mat.bulk_modulus
    mu = mat.shear_modulus
    reduction = 1.0 - beta / (1.0 + modulus / (3.0 * mu))
    c = np.sqrt((K + (4.0 / 3.0) * mu * reduction) / mat.rest_density)
    return c if c.ndim else float(c)


def dalembert(profile, c: float, x, t: float):
    """Right-travelling solution of the linear wave equation: g(x - c t)."""
    return profile(np.asarray(x, dtype=float) - c * t)


def _yield_strain(mat: MaterialProperties) -> float:
    # first yield in uniaxial strain: |S11| = 2 sigma_y0 / 3 at eps1 = sigma_y0/(2 mu)
    return mat.initial_yield / (2.0 * mat.shear_modulus)


def uniaxial_strain_stress(eps1, mat: MaterialProperties):
    """Axial stress magnitude on the monotone uniaxial-strain loading branch.

    Slope K + 4 mu/3 below the yield strain, K above it (perfect plasticity);
    continuous at the knee.
    """
    eps1 = np.asarray(eps1, dtype=float)
    if np.any(eps1 < 0.0):
        raise ValueError("monotone loading branch needs eps1 >= 0")
    K = mat.bulk_modulus
    mu = mat.shear_modulus
    e_star = _yield_strain(mat)
    elastic = (K + 4.0 * mu / 3.0) * eps1
    plastic = K * eps1 + 2.0 * mat.initial_yield / 3.0
    out = np.where(eps1 <= e_star, elastic, plastic)
    return out if out.ndim else float(out)


def hugoniot_elastic_limit(mat: MaterialProperties) -> float:
    """Axial stress at first yield in uniaxial strain: (K + 4 mu/3) sigma_y0/(2 mu)."""
    K = mat.bulk_modulus
    mu = mat.shear_modulus
    return (K + 4.0 * mu / 3.0) * mat.initial_yield / (2.0 * mu)


def impact_plateaus(v_impact: float, mat: MaterialProperties) -> PlateauPrediction:
    """Impedance prediction for a symmetric impact at v_impact.

    The interface moves at v_impact/2.  An elastic precursor carries the jump
    up to the Hugoniot elastic limit at impedance rho0 c_e; the plastic wave
    carries the remainder at rho0 c_p with the deviator pinned at -2 sigma_y0/3.
    Below the precursor jump the prediction collapses to a single elastic wave.
    """
    if v_impact <= 0.0:
        raise ValueError("v_impact must be positive")
    rho0 = mat.rest_density
    c_e = math.sqrt((mat.bulk_modulus + 4.0 * mat.shear_modulus / 3.0) / rho0)
    c_p = math.sqrt(mat.bulk_modulus / rho0)
    hel = hugoniot_elastic_limit(mat)
    v_int = 0.5 * v_impact
    dv_precursor = hel / (rho0 * c_e)

    if v_int <= dv_precursor:
        # single elastic wave
        t11 = -rho0 * c_e * v_int
        frac = (4.0 * mat.shear_modulus / 3.0) / (mat.bulk_modulus + 4.0 * mat.shear_modulus / 3.0)
        s11 = t11 * frac
        p = s11 - t11
        rho = density_from_pressure(p, mat)
        return PlateauPrediction(
            precursor_particle_velocity=v_int,
            precursor_axial_stress=t11,
            precursor_density=rho,
            plateau_particle_velocity=v_int,
            plateau_axial_stress=t11,
            plateau_pressure=p,
            plateau_density=rho,
            elastic_only=True,
        )

    s11_yield = -2.0 * mat.initial_yield / 3.0
    p_prec = s11_yield + hel          # p = S11 - T11 with T11 = -HEL
    rho_prec = density_from_pressure(p_prec, mat)
    t11_plateau = -(hel + rho0 * c_p * (v_int - dv_precursor))
    p_plateau = s11_yield - t11_plateau
    rho_plateau = density_from_pressure(p_plateau, mat)
    return PlateauPrediction(
        precursor_particle_velocity=dv_precursor,
        precursor_axial_stress=-hel,
        precursor_density=rho_prec,
        plateau_particle_velocity=v_int,
        plateau_axial_stress=t11_plateau,
        plateau_pressure=p_plateau,
        plateau_density=rho_plateau,
    )
