"""Space-time CESE scheme on a staggered 1-D mesh.

Nodes alternate between two families: cell edges (cells+1 nodes, including the
domain boundaries) and cell centers (cells nodes).  Each marching step advances
the complementary family by dt/2; a new node is determined by the space-time
flux balance over its conservation element, whose bottom is covered by the two
parent solution elements.  The implicit source contribution at the new node is
resolved with Newton's method; spatial derivatives follow the a-eps scheme
(eps = 0.5) with re-weighting damping.

Stability requires c_max * dt <= dx, i.e. a CFL number at most one with the
full time step dt and the per-family node spacing dx.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .constitutive import plastic_source_coefficient, radial_return_arrays
from .material import MaterialProperties
from .system import flux, jacobian, source, max_signal_speed

__all__ = [
    "NodeSolution",
    "MeshLevel",
    "SolverParams",
    "GhostNode",
    "StepError",
    "CFLViolationError",
    "NewtonConvergenceError",
    "node_derived_quantities",
    "march_node",
    "reweight",
    "step",
    "run",
    "compute_cfl",
]

LOG = logging.getLogger(__name__)

# Slack on the on-surface test used when classifying loading from floats.
_SURFACE_TOL = 1e-9


class StepError(RuntimeError):
    """A marching step could not be completed."""


class CFLViolationError(StepError):
    pass


class NewtonConvergenceError(StepError):
    pass


@dataclass(frozen=True)
class NodeSolution:
    """Conserved triple and its spatial derivative at one mesh node."""

    u: np.ndarray    # shape (3,)
    ux: np.ndarray   # shape (3,)

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        ux = np.asarray(self.ux, dtype=float)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "ux", ux)
        if u.shape != (3,) or ux.shape != (3,):
            raise ValueError("NodeSolution needs 3-component u and ux")
        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(ux))):
            raise ValueError("NodeSolution components must be finite")
        if u[0] <= 0.0:
            raise ValueError("non-positive density in NodeSolution")


@dataclass(frozen=True)
class GhostNode:
    """Boundary parent synthesized by a boundary policy."""

    u: np.ndarray
    ux: np.ndarray
    gamma: int = 0
    yield_radius: float | None = None   # None: inherit from the edge node
    eps_plastic: float | None = None
    stage: int | None = None


@dataclass
class MeshLevel:
    """One time level of the staggered mesh, plus per-cell plastic history."""

    x: np.ndarray            # node positions, strictly increasing, uniform
    u: np.ndarray            # (N, 3) conserved triples
    ux: np.ndarray           # (N, 3) spatial derivatives
    yield_radius: np.ndarray
    eps_plastic: np.ndarray
    stage: np.ndarray        # int, index into hardening stages
    gamma: np.ndarray        # int, last loading switch per node
    t: float
    dx: float
    dt: float
    x_min: float
    x_max: float

    def __post_init__(self):
        if self.dx <= 0.0 or self.dt <= 0.0:
            raise ValueError("dx and dt must be positive")
        if len(self.x) < 3:
            raise ValueError("mesh needs at least 3 nodes")
        if np.any(self.u[:, 0] <= 0.0):
            raise ValueError("non-positive density on mesh level")

    @property
    def n_nodes(self) -> int:
        return len(self.x)

    def is_edge_family(self) -> bool:
        return abs(self.x[0] - self.x_min) < 0.25 * self.dx

    def primitives(self):
        rho = self.u[:, 0]
        return rho, self.u[:, 1] / rho, self.u[:, 2] / rho


@dataclass(frozen=True)
class SolverParams:
    """Scheme knobs.  epsilon of the a-eps derivative update is fixed at 0.5."""

    alpha: float = 1.0
    newton_tol: float = 1e-10
    newton_max_iter: int = 25
    source_mode: str = "radial_return"   # or "direct"
    cfl_limit: float = 0.95

    EPSILON = 0.5

    def __post_init__(self):
        if self.alpha < 0.0:
            raise ValueError("alpha must be non-negative")
        if self.newton_tol <= 0.0:
            raise ValueError("newton_tol must be positive")
        if not 0.0 < self.cfl_limit <= 1.0:
            raise ValueError("cfl_limit must be in (0, 1]")
        if self.source_mode not in ("direct", "radial_return"):
            raise ValueError(f"unknown source_mode {self.source_mode!r}")


# ---------------------------------------------------------------------------
# In-element derived quantities
# ---------------------------------------------------------------------------

def _derived_arrays(U, Ux, mat, gamma, modulus):
    """Per-node f, fx, ut, ft (and source, dv/dx) from the linear SE expansion."""
    F = flux(U, mat)
    A = jacobian(U, mat)
    Fx = np.einsum("...ij,...j->...i", A, Ux)
    rho = U[..., 0]
    v = U[..., 1] / rho
    vx = (Ux[..., 1] - v * Ux[..., 0]) / rho
    S = source(U, vx, mat, gamma, modulus)
    Ut = -Fx + S
    Ft = np.einsum("...ij,...j->...i", A, Ut)
    return F, Fx, Ut, Ft, S, vx


def node_derived_quantities(n: NodeSolution, mat: MaterialProperties,
                            gamma: int, modulus: float):
    """(f, fx, ut, ft) for one node; ut satisfies ut + fx = s exactly."""
    F, Fx, Ut, Ft, _, _ = _derived_arrays(n.u, n.ux, mat, gamma, modulus)
    return F, Fx, Ut, Ft


# ---------------------------------------------------------------------------
# Re-weighting
# ---------------------------------------------------------------------------

def reweight(x_minus, x_plus, alpha: float):
    """W = (|x+|^a x- + |x-|^a x+) / (|x+|^a + |x-|^a); mean for alpha = 0.

    Both-zero inputs return 0 by convention.
    """
    xm = np.asarray(x_minus, dtype=float)
    xp = np.asarray(x_plus, dtype=float)
    if alpha == 0.0:
        out = 0.5 * (xm + xp)
        return out if out.ndim else float(out)
    am = np.abs(xm) ** alpha
    ap = np.abs(xp) ** alpha
    den = am + ap
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(den > 0.0, (ap * xm + am * xp) / np.where(den > 0.0, den, 1.0), 0.0)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# Marching kernel
# ---------------------------------------------------------------------------

def _march_arrays(UL, UxL, gL, BL, UR, UxR, gR, BR,
                  gamma_new, B_new, dt, dx, params, mat):
    """Advance one set of new nodes from their left/right parents.

    Returns (U_new, Ux_new, newton_iterations, S_parent_avg, St_parent_avg).
    """
    FL, _, UtL, FtL, SL, _ = _derived_arrays(UL, UxL, mat, gL, BL)
    FR, _, UtR, FtR, SR, _ = _derived_arrays(UR, UxR, mat, gR, BR)

    pL = (dx / 4.0) * UxL + (dt / dx) * FL + (dt * dt / (4.0 * dx)) * FtL
    pR = (dx / 4.0) * UxR + (dt / dx) * FR + (dt * dt / (4.0 * dx)) * FtR

    rhs = 0.5 * (UL + UR + (dt / 4.0) * (SL + SR) + pL - pR)

    # parents advanced to the new time level along their SE expansions
    upL = UL + (dt / 2.0) * UtL
    upR = UR + (dt / 2.0) * UtR

    # dv/dx for the implicit source: centered difference of the time-advanced
    # parent velocities, which keeps the Newton system 3x3 and local
    vL = upL[..., 1] / upL[..., 0]
    vR = upR[..., 1] / upR[..., 0]
    vx_new = (vR - vL) / dx

    coeff = plastic_source_coefficient(gamma_new, mat, B_new)
    j20 = -(dt / 4.0) * coeff * vx_new

    U = rhs.copy()
    scale = np.linalg.norm(rhs, axis=-1) + 1e-300
    iters = 0
    for iters in range(params.newton_max_iter + 1):
        R = U - rhs
        R[..., 2] -= (dt / 4.0) * coeff * U[..., 0] * vx_new
        resid = np.max(np.abs(R), axis=-1) / scale
        worst = float(np.max(resid))
        if worst <= params.newton_tol:
            break
        if iters == params.newton_max_iter:
            idx = int(np.argmax(resid))
            raise NewtonConvergenceError(
                f"source Newton solve stalled at node {idx}: residual {worst:.3e} "
                f"after {iters} iterations (tol {params.newton_tol:.1e})")
        dU = -R
        dU[..., 2] = -R[..., 2] + j20 * R[..., 0]
        U = U + dU

    if np.any(U[..., 0] <= 0.0):
        idx = int(np.argmin(U[..., 0]))
        raise StepError(f"non-positive density {U[idx, 0]:.3e} at new node {idx}")

    # a-eps derivative update with re-weighting
    ux_plus = (upR - U) / (dx / 2.0)
    ux_minus = (U - upL) / (dx / 2.0)
    Ux = reweight(ux_minus, ux_plus, params.alpha)

    S_par = 0.5 * (UL[..., 2] / UL[..., 0] + UR[..., 2] / UR[..., 0])
    StL = (UtL[..., 2] - (UL[..., 2] / UL[..., 0]) * UtL[..., 0]) / UL[..., 0]
    StR = (UtR[..., 2] - (UR[..., 2] / UR[..., 0]) * UtR[..., 0]) / UR[..., 0]
    St_par = 0.5 * (StL + StR)
    return U, Ux, iters, S_par, St_par


def march_node(left: NodeSolution, right: NodeSolution, params: SolverParams,
               mat: MaterialProperties, dt: float, dx: float,
               gamma_left: int = 0, gamma_right: int = 0, gamma_new: int = 0,
               modulus: float = 0.0) -> NodeSolution:
    """Advance a single new node from two adjacent parents (test-scale API)."""
    B = np.array([modulus])
    U, Ux, _, _, _ = _march_arrays(
        left.u[None, :], left.ux[None, :], np.array([gamma_left]), B,
        right.u[None, :], right.ux[None, :], np.array([gamma_right]), B,
        np.array([gamma_new]), B, dt, dx, params, mat)
    return NodeSolution(U[0], Ux[0])


# ---------------------------------------------------------------------------
# Level marching
# ---------------------------------------------------------------------------

def compute_cfl(level: MeshLevel, mat: MaterialProperties) -> float:
    modulus = mat.stage_moduli[level.stage]
    return max_signal_speed(level.u, mat, level.gamma, modulus) * level.dt / level.dx


def _ghost_parent(ghost: GhostNode, edge_idx: int, level: MeshLevel):
    r = level.yield_radius[edge_idx] if ghost.yield_radius is None else ghost.yield_radius
    e = level.eps_plastic[edge_idx] if ghost.eps_plastic is None else ghost.eps_plastic
    s = level.stage[edge_idx] if ghost.stage is None else ghost.stage
    return np.asarray(ghost.u, dtype=float), np.asarray(ghost.ux, dtype=float), ghost.gamma, r, e, s


def step(level: MeshLevel, bc, params: SolverParams, mat: MaterialProperties) -> MeshLevel:
    """March one half time step dt/2 onto the complementary node family."""
    cfl = compute_cfl(level, mat)
    if cfl > params.cfl_limit * (1.0 + 1e-12):
        raise CFLViolationError(
            f"CFL {cfl:.3f} exceeds limit {params.cfl_limit:.3f} at t={level.t:.3e}")

    dt, dx = level.dt, level.dx
    moduli_table = mat.stage_moduli
    yields_table = mat.stage_yields

    if level.is_edge_family():
        # edges -> centers: every new node has two interior parents
        sel_L = slice(None, -1)
        sel_R = slice(1, None)
        UL, UxL = level.u[sel_L], level.ux[sel_L]
        UR, UxR = level.u[sel_R], level.ux[sel_R]
        gL, gR = level.gamma[sel_L], level.gamma[sel_R]
        rL, rR = level.yield_radius[sel_L], level.yield_radius[sel_R]
        eL, eR = level.eps_plastic[sel_L], level.eps_plastic[sel_R]
        stL, stR = level.stage[sel_L], level.stage[sel_R]
        x_new = 0.5 * (level.x[:-1] + level.x[1:])
    else:
        # centers -> edges: boundary nodes need one ghost parent each
        ghost_l, ghost_r = bc.ghosts(level, mat)
        gl = _ghost_parent(ghost_l, 0, level)
        gr = _ghost_parent(ghost_r, level.n_nodes - 1, level)
        UL = np.vstack([gl[0][None, :], level.u])
        UxL = np.vstack([gl[1][None, :], level.ux])
        UR = np.vstack([level.u, gr[0][None, :]])
        UxR = np.vstack([level.ux, gr[1][None, :]])
        gL = np.concatenate([[gl[2]], level.gamma])
        gR = np.concatenate([level.gamma, [gr[2]]])
        rL = np.concatenate([[gl[3]], level.yield_radius])
        rR = np.concatenate([level.yield_radius, [gr[3]]])
        eL = np.concatenate([[gl[4]], level.eps_plastic])
        eR = np.concatenate([level.eps_plastic, [gr[4]]])
        stL = np.concatenate([[gl[5]], level.stage]).astype(int)
        stR = np.concatenate([level.stage, [gr[5]]]).astype(int)
        x_new = np.concatenate([[level.x_min], 0.5 * (level.x[:-1] + level.x[1:]),
                                [level.x_max]])

    # plastic history handed to the new node: interpolated between the parents.
    # History is a material field moving at the particle speed, which is tiny
    # against the mesh speed dx/dt; a max-combine here would let hardening
    # outrun the wave front and pre-harden virgin material.
    radius0 = 0.5 * (rL + rR)
    eps0 = 0.5 * (eL + eR)
    # stage is a pure function of how far the surface has hardened
    stage0 = np.clip(np.searchsorted(yields_table, 1.5 * radius0, side="right") - 1,
                     0, None)
    B_stage = moduli_table[stage0]

    direct = params.source_mode == "direct"
    BL = moduli_table[stL]
    BR = moduli_table[stR]

    if direct:
        # classify the new node from the parent-level state and its trend;
        # marching and post-step both use this switch (no re-classification
        # inside Newton, to avoid chattering)
        S_par = 0.5 * (UL[:, 2] / UL[:, 0] + UR[:, 2] / UR[:, 0])
        _, _, _, _, _, vxL = _derived_arrays(UL, UxL, mat, gL, BL)
        _, _, _, _, _, vxR = _derived_arrays(UR, UxR, mat, gR, BR)
        vx_par = 0.5 * (vxL + vxR)
        # the elastic trial rate (4/3) mu dv/dx is the trend signal: it is
        # steady across a compacting front, unlike the realized dS11/dt which
        # chatters once the switch starts acting
        St_trial = (4.0 / 3.0) * mat.shear_modulus * vx_par
        # extrapolate the parent deviator over the half step so the switch
        # engages on the step that reaches the surface, not one step late
        S_pred = S_par + (dt / 2.0) * St_trial
        on_surface = np.abs(S_pred) >= radius0 * (1.0 - _SURFACE_TOL)
        gamma_new = (on_surface & (S_par * St_trial > 0.0)).astype(int)
        g_march_L, g_march_R = gL, gR
    else:
        gamma_new = np.zeros(len(radius0), dtype=int)
        zeros = np.zeros_like(gL)
        g_march_L, g_march_R = zeros, zeros

    U, Ux, _, S_par, St_par = _march_arrays(
        UL, UxL, g_march_L, BL, UR, UxR, g_march_R, BR,
        gamma_new, B_stage, dt, dx, params, mat)

    if direct:
        S_new = U[:, 2] / U[:, 0]
        plastic = gamma_new == 1
        grow = np.maximum(np.abs(S_new) - radius0, 0.0)
        radius = np.where(plastic, np.maximum(radius0, np.abs(S_new)), radius0)
        with np.errstate(divide="ignore", invalid="ignore"):
            d_eps = np.where(plastic & (B_stage > 0.0),
                             1.5 * grow / np.where(B_stage > 0.0, B_stage, 1.0), 0.0)
        eps = eps0 + d_eps
        sig_eff = 1.5 * np.abs(S_new)
        stage = np.maximum(stage0,
                           np.clip(np.searchsorted(yields_table, sig_eff, side="right") - 1,
                                   0, None))
        St_new = (S_new - S_par) / (dt / 2.0)
        post = ((np.abs(S_new) >= radius * (1.0 - _SURFACE_TOL))
                & (S_new * St_new > 0.0)).astype(int)
        n_flip = int(np.sum(post != gamma_new))
        if n_flip:
            LOG.debug("loading switch disagrees post-step at %d of %d nodes (t=%.3e)",
                      n_flip, len(post), level.t)
    else:
        S_tr = U[:, 2] / U[:, 0]
        S_corr, radius, d_eps = radial_return_arrays(
            S_tr, radius0, B_stage, mat.shear_modulus)
        gamma_new = (np.abs(S_tr) > radius0).astype(int)
        U[:, 2] = U[:, 0] * S_corr
        eps = eps0 + d_eps
        sig_eff = 1.5 * np.abs(S_corr)
        stage = np.maximum(stage0,
                           np.clip(np.searchsorted(yields_table, sig_eff, side="right") - 1,
                                   0, None))

    return MeshLevel(x=x_new, u=U, ux=Ux,
                     yield_radius=radius, eps_plastic=eps,
                     stage=stage.astype(int), gamma=gamma_new,
                     t=level.t + dt / 2.0, dx=dx, dt=dt,
                     x_min=level.x_min, x_max=level.x_max)


def run(initial: MeshLevel, t_end: float, bc, params: SolverParams,
        mat: MaterialProperties, callback=None, snapshot_every: int = 0):
    """March until the first level with t >= t_end.

    The callback, when given with a positive snapshot_every, receives
    (level, step_index) at step 0 and every snapshot_every-th step after.
    Returns (final_level, steps_taken, cfl_max).
    """
    if t_end < initial.t:
        raise ValueError("t_end precedes the initial time")
    level = initial
    steps = 0
    cfl_max = 0.0
    if callback is not None and snapshot_every > 0:
        callback(level, steps)
    eps = 1e-9 * level.dt
    while level.t < t_end - eps:
        cfl_max = max(cfl_max, compute_cfl(level, mat))
        level = step(level, bc, params, mat)
        steps += 1
        if callback is not None and snapshot_every > 0 and steps % snapshot_every == 0:
            callback(level, steps)
    return level, steps, cfl_max
