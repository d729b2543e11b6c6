"""IMEX time integration of the coupled field/front system.

Advection (front-fixing terms, H) is integrated explicitly; diffusion (G,
stiff because the hatted diffusivities are huge) implicitly via tridiagonal
solves.  The scheme is the implicit-explicit midpoint pair with one implicit
stage and two explicit stages, combined order 2:

    stage:   u(2) = u^n + dt/2 * H(u^n) + dt/2 * G(u(2))
    update:  u^{n+1} = u^n + dt * H(u(2)) + dt * G(u(2))

Fronts advance with the same explicit-midpoint staging: consumption speeds
are evaluated on the stage fields at the half-step geometry and applied over
the full step.  The implicit stage freezes the layer widths at their
step-start values, which keeps the solve linear and tridiagonal; the O(dt)
geometry lag is absorbed by the explicit part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np
from scipy.linalg.lapack import dgtsv

from .pde_core import (
    Diffusivities,
    FrontState,
    LayerFields,
    StefanConstants,
    apply_inner_bcs,
    apply_outer_bcs,
    front_velocities,
    inner_advection_coeff,
    outer_advection_coeff,
    split_rhs_interior,
)
from .materials import SwellingRatios

__all__ = [
    "ImexTableau",
    "MIDPOINT_122",
    "NondimModel",
    "StepCounters",
    "TridiagonalError",
    "solve_tridiagonal",
    "select_dt",
    "imex_midpoint_step",
    "refresh_state",
]


class TridiagonalError(RuntimeError):
    """Raised when the tridiagonal elimination hits a zero pivot."""


@dataclass(frozen=True)
class ImexTableau:
    """Butcher coefficients of a DIRK-IMEX pair.

    a_implicit is lower triangular (diagonal allowed), a_explicit strictly
    lower triangular, and each weight vector sums to one.
    """

    a_implicit: tuple[tuple[float, ...], ...]
    a_explicit: tuple[tuple[float, ...], ...]
    w_implicit: tuple[float, ...]
    w_explicit: tuple[float, ...]
    order: int

    def __post_init__(self):
        nu = len(self.w_implicit)
        if len(self.w_explicit) != nu or len(self.a_implicit) != nu or len(self.a_explicit) != nu:
            raise ValueError("tableau parts must share the stage count")
        for i in range(nu):
            for j in range(nu):
                if j >= i and self.a_explicit[i][j] != 0.0:
                    raise ValueError("explicit tableau must be strictly lower triangular")
                if j > i and self.a_implicit[i][j] != 0.0:
                    raise ValueError("implicit tableau must be lower triangular")
        for name, w in (("implicit", self.w_implicit), ("explicit", self.w_explicit)):
            if not math.isclose(sum(w), 1.0, rel_tol=0.0, abs_tol=1e-14):
                raise ValueError(f"{name} weights must sum to 1, got {sum(w)}")

    @property
    def stages(self) -> int:
        return len(self.w_implicit)


# Implicit-Explicit Midpoint(1,2,2): one implicit stage at the half step,
# two explicit stages, combined order 2.
MIDPOINT_122 = ImexTableau(
    a_implicit=((0.0, 0.0), (0.0, 0.5)),
    a_explicit=((0.0, 0.0), (0.5, 0.0)),
    w_implicit=(0.0, 1.0),
    w_explicit=(0.0, 1.0),
    order=2,
)


def solve_tridiagonal(sub, diag, sup, rhs) -> np.ndarray:
    """Solve a tridiagonal system (sub/super diagonals one shorter than diag).

    Backed by the LAPACK dgtsv elimination; its info code names the row of a
    zero pivot, which is surfaced in the error.
    """
    diag = np.asarray(diag, dtype=float)
    sub = np.asarray(sub, dtype=float)
    sup = np.asarray(sup, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    n = diag.size
    if sub.size != n - 1 or sup.size != n - 1 or rhs.size != n:
        raise ValueError("inconsistent tridiagonal system sizes")
    _, _, _, x, info = dgtsv(sub, diag, sup, rhs, 0, 0, 0, 0)
    if info != 0:
        if info > 0:
            raise TridiagonalError(f"zero pivot at row {info - 1}")
        raise TridiagonalError(f"bad argument {-info} to the tridiagonal solver")
    return x


@dataclass(frozen=True)
class NondimModel:
    """Everything the stepper needs besides the state itself."""

    d_hat: Diffusivities
    sc: StefanConstants
    sw: SwellingRatios          # swelling ratios used by the front kinematics
    n_z: int
    n_y: int
    forcing_hat: Callable[[float], tuple[float, float, float]]
    scheme: str = "upwind"

    @property
    def dz(self) -> float:
        return 1.0 / self.n_z

    @property
    def dy(self) -> float:
        return 1.0 / self.n_y

    @cached_property
    def z_interior(self) -> np.ndarray:
        return np.arange(1, self.n_z) * self.dz

    @cached_property
    def y_interior(self) -> np.ndarray:
        return np.arange(1, self.n_y) * self.dy


@dataclass
class StepCounters:
    """Diagnostic clamp totals accumulated over a run."""

    velocity_clamps: int = 0
    field_clamps: int = 0

    def merge(self, other: "StepCounters") -> None:
        self.velocity_clamps += other.velocity_clamps
        self.field_clamps += other.field_clamps


def select_dt(fs: FrontState, dz: float, dy: float, cfl_target: float,
              dt_max: float, omega_p: float) -> float:
    """Advective CFL step bound; diffusion imposes none (it is implicit).

    The outer advection speed peaks at z=1 with |gamma_dot - beta_dot|/width;
    the inner speed is linear in y with endpoint values b_dot/width and
    (1+omega_p)*a_dot/width.
    """
    fs.validate(strict=True)
    c_outer = abs(fs.gamma_dot - fs.beta_dot) / (fs.beta - fs.gamma)
    c_inner = max(abs(fs.b_dot), (1.0 + omega_p) * abs(fs.a_dot)) / (fs.a - fs.beta)
    dt = dt_max
    if c_outer > 0.0:
        dt = min(dt, cfl_target * dz / c_outer)
    if c_inner > 0.0:
        dt = min(dt, cfl_target * dy / c_inner)
    return dt


def _clamp_fields(fields: LayerFields) -> int:
    """Floor negative concentrations at zero; returns how many nodes clipped."""
    clipped = 0
    for arr in (fields.S, fields.W, fields.O, fields.G):
        if arr.min() < 0.0:
            mask = arr < 0.0
            clipped += int(np.count_nonzero(mask))
            arr[mask] = 0.0
    return clipped


def refresh_state(fields: LayerFields, fs: FrontState, model: NondimModel,
                  forcing_values: tuple[float, float, float]) -> tuple[FrontState, int]:
    """Re-establish boundary values and velocities after the interior moved.

    Order matters: the Dirichlet pins S(1)=0 and G(1)=0 feed the Stefan
    gradients, the velocities feed the Robin solves, and the Robin-updated
    O(1) feeds the interface copy G(0).
    """
    fields.S[-1] = 0.0
    fields.G[-1] = 0.0
    vel, clamped = front_velocities(fields, fs, model.sc, model.dz, model.dy, model.sw)
    fs = fs.with_velocities(vel)
    apply_outer_bcs(fields, fs, model.d_hat, forcing_values, model.sc, model.dz)
    apply_inner_bcs(fields)
    return fs, clamped


def _implicit_stage_solve(u: np.ndarray, h_int: np.ndarray, half_dt: float,
                          d_hat: float, width: float, dx: float,
                          left: float, right: float) -> np.ndarray:
    """Solve v = u + half_dt*(H + L v) on the interior with fixed end values."""
    alpha = half_dt * d_hat / (width * dx) ** 2
    n_int = u.size - 2
    rhs = u[1:-1] + half_dt * h_int
    rhs[0] += alpha * left
    rhs[-1] += alpha * right
    sol = solve_tridiagonal(
        np.full(n_int - 1, -alpha),
        np.full(n_int, 1.0 + 2.0 * alpha),
        np.full(n_int - 1, -alpha),
        rhs,
    )
    out = np.empty_like(u)
    out[0] = left
    out[-1] = right
    out[1:-1] = sol
    return out


def _explicit_parts(fields: LayerFields, fs: FrontState, model: NondimModel):
    """Interior advection arrays for all four species.

    The outer advection speed is species-independent, so it is computed once
    and shared across S, W and O.
    """
    c_out = np.asarray(outer_advection_coeff(model.z_interior, fs))
    c_in = np.asarray(inner_advection_coeff(model.y_interior, fs, model.sw.omega_p))
    width_out = fs.beta - fs.gamma
    width_in = fs.a - fs.beta
    h_s, _ = split_rhs_interior(fields.S, model.d_hat.d_s, width_out, c_out,
                                model.dz, model.scheme)
    h_w, _ = split_rhs_interior(fields.W, model.d_hat.d_w, width_out, c_out,
                                model.dz, model.scheme)
    h_o, _ = split_rhs_interior(fields.O, model.d_hat.d_o, width_out, c_out,
                                model.dz, model.scheme)
    h_g, _ = split_rhs_interior(fields.G, model.d_hat.d_g, width_in, c_in,
                                model.dy, model.scheme)
    return h_s, h_w, h_o, h_g


def imex_midpoint_step(fields: LayerFields, fs: FrontState, tau: float, dt: float,
                       model: NondimModel, counters: StepCounters | None = None,
                       freeze_fronts: bool = False) -> tuple[LayerFields, FrontState]:
    """One step of the implicit-explicit midpoint rule on the coupled system.

    With ``freeze_fronts`` the stored front velocities are kept as imposed
    coefficients and the geometry never moves; used by the convergence
    battery to test the operators on manufactured problems.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    if counters is None:
        counters = StepCounters()

    half = 0.5 * dt
    h1 = _explicit_parts(fields, fs, model)
    forcing_mid = model.forcing_hat(tau + half)

    # Stage at tau + dt/2: explicit half-step of H, implicit half-step of the
    # diffusion, layer widths frozen at the step-start geometry.
    outer_w = fs.beta - fs.gamma
    inner_w = fs.a - fs.beta
    stage = LayerFields(
        S=_implicit_stage_solve(fields.S, h1[0], half, model.d_hat.d_s, outer_w,
                                model.dz, forcing_mid[0], 0.0),
        W=_implicit_stage_solve(fields.W, h1[1], half, model.d_hat.d_w, outer_w,
                                model.dz, forcing_mid[1], float(fields.W[-1])),
        O=_implicit_stage_solve(fields.O, h1[2], half, model.d_hat.d_o, outer_w,
                                model.dz, forcing_mid[2], float(fields.O[-1])),
        G=_implicit_stage_solve(fields.G, h1[3], half, model.d_hat.d_g, inner_w,
                                model.dy, float(fields.G[0]), 0.0),
    )
    counters.field_clamps += _clamp_fields(stage)

    # Diffusion at the stage comes from the stage identity
    # G(u2) = 2*(u2 - u^n)/dt - H(u^n); re-evaluating the operator after the
    # boundary refresh below would amplify any boundary adjustment by the
    # stiff factor dt*D/(width*dx)^2.
    g2 = tuple(2.0 * (s[1:-1] - u[1:-1]) / dt - h
               for s, u, h in zip((stage.S, stage.W, stage.O, stage.G),
                                  (fields.S, fields.W, fields.O, fields.G), h1))

    if freeze_fronts:
        fs_mid = fs
    else:
        fs_mid = fs.advanced(half, model.sw)
        fs_mid, clamped = refresh_state(stage, fs_mid, model, forcing_mid)
        counters.velocity_clamps += clamped

    # Full update: advection evaluated on the refreshed stage state at the
    # midpoint geometry, diffusion from the stage identity above.
    h2 = _explicit_parts(stage, fs_mid, model)
    new = fields.copy()
    for arr, h, g in zip((new.S, new.W, new.O, new.G), h2, g2):
        arr[1:-1] += dt * (h + g)
    counters.field_clamps += _clamp_fields(new)

    forcing_end = model.forcing_hat(tau + dt)
    if freeze_fronts:
        new.S[0], new.W[0], new.O[0] = forcing_end
        new.S[-1] = 0.0
        new.G[-1] = 0.0
        return new, fs

    # fronts advance over the full step at the stage velocities
    fs_new = FrontState.from_consumption(
        fs.a + dt * fs_mid.a_dot,
        fs.b + dt * fs_mid.b_dot,
        model.sw,
        a_dot=fs_mid.a_dot,
        b_dot=fs_mid.b_dot,
    )
    fs_new, clamped = refresh_state(new, fs_new, model, forcing_end)
    counters.velocity_clamps += clamped
    return new, fs_new
