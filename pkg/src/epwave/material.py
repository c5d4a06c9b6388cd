"""Material constants, logarithmic equation of state, and closed-form wave speeds.

The metal is characterized by its elastic moduli, a reference density, and a
staircase of isotropic-hardening stages.  Pressure closes the system through
p = k ln(rho/rho0) + p0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "HardeningStage",
    "MaterialProperties",
    "copper",
    "pressure_from_density",
    "density_from_pressure",
    "elastic_wave_speed",
    "plastic_wave_speed_perfect",
    "general_wave_speed",
]

# Default hardening modulus for config stages that omit one.  This is a
# documented artifact default (gives visibly distinct plateau speeds), not a
# measured copper constant.
DEFAULT_STAGE_MODULUS = 1.0e10

# Allowed mismatch between the stored bulk modulus and the one implied by
# (E, mu); Table-1 copper is internally inconsistent at the ~0.6% level.
_ELASTIC_CONSISTENCY_TOL = 0.02


@dataclass(frozen=True)
class HardeningStage:
    """One plateau of the discretized hardening curve."""

    yield_stress: float   # effective (von Mises) yield stress [Pa]
    modulus: float        # linear hardening modulus B for this stage [Pa]


@dataclass(frozen=True)
class MaterialProperties:
    """Elastic/plastic constants and EOS reference state for one metal.

    Immutable after construction; safe to share across threads.
    """

    bulk_modulus: float       # k [Pa]
    shear_modulus: float      # mu [Pa]
    youngs_modulus: float     # E [Pa]
    rest_density: float       # rho0 [kg/m^3]
    initial_yield: float      # sigma_y0 [Pa]
    hardening_stages: tuple[HardeningStage, ...] = ()
    reference_pressure: float = 0.0   # p0 [Pa]; zero-stress initial state

    def __post_init__(self):
        for name in ("bulk_modulus", "shear_modulus", "youngs_modulus",
                     "rest_density", "initial_yield"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be strictly positive")
        if not math.isfinite(self.reference_pressure):
            raise ValueError("reference_pressure must be finite")

        stages = self.hardening_stages
        if not stages:
            stages = (HardeningStage(self.initial_yield, 0.0),)
            object.__setattr__(self, "hardening_stages", stages)
        if abs(stages[0].yield_stress - self.initial_yield) > 1e-9 * self.initial_yield:
            raise ValueError("first hardening stage must start at initial_yield")
        for st in stages:
            if st.modulus < 0.0:
                raise ValueError("hardening modulus must be non-negative")
        ys = [st.yield_stress for st in stages]
        if any(b <= a for a, b in zip(ys, ys[1:])):
            raise ValueError("hardening stages must be strictly ascending in yield stress")

        # nu derived from (E, mu) instead of stored, to avoid inconsistent triples
        nu = self.poisson_ratio
        k_implied = self.youngs_modulus / (3.0 * (1.0 - 2.0 * nu))
        if abs(self.bulk_modulus - k_implied) / self.bulk_modulus > _ELASTIC_CONSISTENCY_TOL:
            raise ValueError(
                "inconsistent elastic constants: bulk modulus implied by (E, mu) "
                f"is {k_implied:.4g}, stored {self.bulk_modulus:.4g}"
            )

    @property
    def poisson_ratio(self) -> float:
        return self.youngs_modulus / (2.0 * self.shear_modulus) - 1.0

    @property
    def stage_yields(self) -> np.ndarray:
        return np.array([st.yield_stress for st in self.hardening_stages])

    @property
    def stage_moduli(self) -> np.ndarray:
        return np.array([st.modulus for st in self.hardening_stages])


def copper(hardening_stages: tuple[HardeningStage, ...] = ()) -> MaterialProperties:
    """Copper constants: k=140 GPa, mu=45 GPa, E=122 GPa, rho0=8930, sigma_y=90 MPa."""
    return MaterialProperties(
        bulk_modulus=1.40e11,
        shear_modulus=4.5e10,
        youngs_modulus=1.22e11,
        rest_density=8930.0,
        initial_yield=9.0e7,
        hardening_stages=hardening_stages,
    )


def pressure_from_density(rho, mat: MaterialProperties):
    """p = k ln(rho/rho0) + p0.  Strictly increasing in rho."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0.0):
        raise ValueError("density must be strictly positive")
    p = mat.bulk_modulus * np.log(rho / mat.rest_density) + mat.reference_pressure
    return p if p.ndim else float(p)


def density_from_pressure(p, mat: MaterialProperties):
    """Analytic inverse of the EOS: rho = rho0 exp((p - p0)/k)."""
    p = np.asarray(p, dtype=float)
    rho = mat.rest_density * np.exp((p - mat.reference_pressure) / mat.bulk_modulus)
    return rho if rho.ndim else float(rho)


def elastic_wave_speed(mat: MaterialProperties) -> float:
    """Uniaxial-strain elastic speed sqrt((k + 4mu/3)/rho0)."""
    return math.sqrt((mat.bulk_modulus + 4.0 * mat.shear_modulus / 3.0) / mat.rest_density)


def plastic_wave_speed_perfect(mat: MaterialProperties) -> float:
    """Perfect-plasticity wave speed sqrt(k/rho0)."""
    return math.sqrt(mat.bulk_modulus / mat.rest_density)


def general_wave_speed(mat: MaterialProperties, beta, modulus=0.0):
    """sqrt((k + (4/3) mu (1 - beta/(1 + B/(3 mu)))) / rho0).

    beta = 0 recovers the elastic speed; beta = 1, B = 0 the perfect-plastic one.
    Accepts array-valued beta/modulus.
    """
    beta = np.asarray(beta, dtype=float)
    modulus = np.asarray(modulus, dtype=float)
    if np.any(modulus < 0.0):
        raise ValueError("hardening modulus must be non-negative")
    mu = mat.shear_modulus
    radicand = (mat.bulk_modulus
                + (4.0 / 3.0) * mu * (1.0 - beta / (1.0 + modulus / (3.0 * mu))))
    c = np.sqrt(radicand / mat.rest_density)
    return c if c.ndim else float(c)
