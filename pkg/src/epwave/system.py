"""State representations, flux, source, Jacobian, and eigenvalues of the 1-D system.

The conserved vector is U = (rho, rho v, rho S11); the flux is
E = (rho v, rho v^2 + p - S11, rho S11 v) with p from the logarithmic EOS,
and the only source sits in the deviatoric-transport component.

All functions are pure and accept stacked states of shape (..., 3), so the
solver can evaluate a whole mesh level in one call.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .material import MaterialProperties, pressure_from_density

__all__ = [
    "DegenerateStateError",
    "PrimitiveState",
    "ConservedState",
    "to_conserved",
    "to_primitive",
    "flux",
    "source",
    "jacobian",
    "eigenvalues",
    "max_signal_speed",
]


class DegenerateStateError(ValueError):
    """Raised for states with non-positive density."""


@dataclass(frozen=True)
class PrimitiveState:
    """(rho, v, S11) at a point."""

    rho: float
    v: float
    s11: float

    def __post_init__(self):
        if not self.rho > 0.0:
            raise DegenerateStateError(f"rho must be positive, got {self.rho}")
        if not np.all(np.isfinite([self.rho, self.v, self.s11])):
            raise ValueError("primitive state fields must be finite")


@dataclass(frozen=True)
class ConservedState:
    """(rho, rho v, rho S11) at a point."""

    u1: float
    u2: float
    u3: float

    def __post_init__(self):
        if not self.u1 > 0.0:
            raise DegenerateStateError(f"u1 must be positive, got {self.u1}")
        if not np.all(np.isfinite([self.u1, self.u2, self.u3])):
            raise ValueError("conserved state fields must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.u1, self.u2, self.u3])


def to_conserved(s: PrimitiveState) -> ConservedState:
    return ConservedState(s.rho, s.rho * s.v, s.rho * s.s11)


def to_primitive(u: ConservedState) -> PrimitiveState:
    return PrimitiveState(u.u1, u.u2 / u.u1, u.u3 / u.u1)


def _split(U):
    U = np.asarray(U, dtype=float)
    r = U[..., 0]
    if np.any(r <= 0.0):
        raise DegenerateStateError("non-positive density in state vector")
    return r, U[..., 1] / r, U[..., 2] / r


def flux(U, mat: MaterialProperties) -> np.ndarray:
    """Flux E(U); shape matches the input (..., 3)."""
    rho, v, s11 = _split(U)
    p = pressure_from_density(rho, mat)
    return np.stack([rho * v, rho * v * v + p - s11, rho * s11 * v], axis=-1)


def source(U, dv_dx, mat: MaterialProperties, gamma, modulus) -> np.ndarray:
    """H(U) = (0, 0, (4/3) mu rho (1 - gamma/(1 + B/(3 mu))) dv/dx)."""
    rho, _, _ = _split(U)
    gamma = np.asarray(gamma, dtype=float)
    modulus = np.asarray(modulus, dtype=float)
    if np.any(modulus < 0.0):
        raise ValueError("hardening modulus must be non-negative")
    mu = mat.shear_modulus
    coeff = (4.0 / 3.0) * mu * (1.0 - gamma / (1.0 + modulus / (3.0 * mu)))
    s3 = coeff * rho * np.asarray(dv_dx, dtype=float)
    out = np.zeros(np.broadcast(rho, s3).shape + (3,))
    out[..., 2] = s3
    return out


def jacobian(U, mat: MaterialProperties) -> np.ndarray:
    """dE/dU in conservative variables; shape (..., 3, 3)."""
    rho, v, s11 = _split(U)
    k = mat.bulk_modulus
    shape = rho.shape + (3, 3)
    A = np.zeros(shape)
    A[..., 0, 1] = 1.0
    A[..., 1, 0] = -v * v + k / rho + s11 / rho
    A[..., 1, 1] = 2.0 * v
    A[..., 1, 2] = -1.0 / rho
    A[..., 2, 0] = -v * s11
    A[..., 2, 1] = s11
    A[..., 2, 2] = v
    return A


def _char_speed(rho, mat: MaterialProperties, beta, modulus):
    mu = mat.shear_modulus
    beta = np.asarray(beta, dtype=float)
    modulus = np.asarray(modulus, dtype=float)
    radicand = (mat.bulk_modulus
                + (4.0 / 3.0) * mu * (1.0 - beta / (1.0 + modulus / (3.0 * mu))))
    return np.sqrt(radicand / rho)


def eigenvalues(s: PrimitiveState, mat: MaterialProperties, beta, modulus=0.0):
    """Characteristic speeds (v - c, v, v + c), sorted ascending."""
    c = _char_speed(s.rho, mat, beta, modulus)
    return (s.v - c, s.v, s.v + c)


def max_signal_speed(U, mat: MaterialProperties, beta, modulus) -> float:
    """max over cells of |v| + c, with per-cell loading flag and stage modulus."""
    U = np.asarray(U, dtype=float)
    if U.size == 0:
        raise ValueError("max_signal_speed needs at least one state")
    rho, v, _ = _split(U)
    c = _char_speed(rho, mat, beta, modulus)
    return float(np.max(np.abs(v) + c))
