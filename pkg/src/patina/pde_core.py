"""Non-dimensional, front-fixed transport equations of the two-layer patina.

Physical picture (x grows into the metal, x = 0 at the original surface):

    air | brochantite | cuprite | copper
        gamma(t)    beta(t)    a(t)

a is the copper consumption depth, b the cuprite consumption; swelling
pushes the outer surface outward, gamma_dot = -(omega_p*a_dot +
omega_b*b_dot) and beta = b - omega_p*a.  Each layer is mapped onto a fixed
unit interval: z in [0,1] spans brochantite (z=0 at gamma, z=1 at beta) and
carries SO2 (S), water (W) and oxygen (O); y in [0,1] spans cuprite (y=0 at
beta, y=1 at a) and carries oxygen (G).  The mapping turns front motion into
advection with the coefficients q(z) and f(y) below.

Outer species u in {S, W, O}:

    du/dtau = D/(beta-gamma)^2 u_zz - (gamma_dot/(beta-gamma) + q(z)) u_z

with S(0)=S_a, S(1)=0, W(0)=W_a, O(0)=O_a and Robin conditions at z=1 for W
and O carrying the reaction sinks.  Inner oxygen:

    dG/dtau = D_g/(a-beta)^2 G_yy + (omega_p*a_dot/(a-beta) - f(y)) G_y

with G(0) = O at beta, G(1) = 0.  The two Stefan conditions set the front
speeds from one-sided boundary gradients:

    b_dot = -Omega_s/(beta-gamma) * S_z(1)
    a_dot = -Omega_g/(a-beta)    * G_y(1)

All quantities here are dimensionless; lengths scale by lambda, time by
t_r, concentrations by their reference values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .materials import MaterialTable, SwellingRatios

__all__ = [
    "Scales",
    "Diffusivities",
    "FrontState",
    "LayerFields",
    "StefanConstants",
    "FrontVelocities",
    "stefan_constants",
    "rescale_coeff_q",
    "rescale_coeff_f",
    "outer_advection_coeff",
    "inner_advection_coeff",
    "outer_split_rhs",
    "inner_split_rhs",
    "boundary_gradient",
    "front_velocities",
    "apply_outer_bcs",
    "apply_inner_bcs",
    "BoundaryConditionError",
]


class BoundaryConditionError(RuntimeError):
    """Raised when a Robin boundary solve degenerates."""


@dataclass(frozen=True)
class Scales:
    """Reference scales that non-dimensionalize the model.

    lam: length (cm), t_r: time (s), the rest concentrations (g/cm3).
    g_r must equal o_r so the oxygen handoff at beta is a plain value copy.
    """

    lam: float
    t_r: float
    s_r: float
    w_r: float
    o_r: float
    g_r: float

    def __post_init__(self):
        for name in ("lam", "t_r", "s_r", "w_r", "o_r", "g_r"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"scale {name} must be positive, got {value}")
        if self.g_r != self.o_r:
            raise ValueError("g_r must equal o_r (interface condition is a value copy)")


@dataclass(frozen=True)
class Diffusivities:
    """Dimensional diffusivities in cm2/s."""

    d_g: float
    d_s: float
    d_o: float
    d_w: float

    def __post_init__(self):
        for name in ("d_g", "d_s", "d_o", "d_w"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"diffusivity {name} must be positive, got {value}")

    def hatted(self, scales: Scales) -> "Diffusivities":
        """Non-dimensional forms D_hat = (t_r/lam^2) * D."""
        factor = scales.t_r / scales.lam**2
        return Diffusivities(self.d_g * factor, self.d_s * factor,
                             self.d_o * factor, self.d_w * factor)


class FrontVelocities(NamedTuple):
    a_dot: float
    b_dot: float
    gamma_dot: float
    beta_dot: float


@dataclass(frozen=True)
class FrontState:
    """The four moving quantities and their velocities (non-dimensional).

    a: copper consumption; b: cuprite consumption; beta = b - omega_p*a is
    the cuprite/brochantite boundary; gamma = -(omega_p*a + omega_b*b) the
    outer surface.  Strict ordering gamma < beta < a must hold.
    """

    a: float
    b: float
    beta: float
    gamma: float
    a_dot: float = 0.0
    b_dot: float = 0.0
    beta_dot: float = 0.0
    gamma_dot: float = 0.0

    @classmethod
    def from_consumption(cls, a: float, b: float, sw: SwellingRatios,
                         a_dot: float = 0.0, b_dot: float = 0.0,
                         strict: bool = True) -> "FrontState":
        """Kinematically consistent state from the two consumptions."""
        if a < 0.0 or b < 0.0:
            raise ValueError(f"consumptions must be non-negative, got a={a}, b={b}")
        fs = cls(
            a=a,
            b=b,
            beta=b - sw.omega_p * a,
            gamma=-(sw.omega_p * a + sw.omega_b * b),
            a_dot=a_dot,
            b_dot=b_dot,
            beta_dot=b_dot - sw.omega_p * a_dot,
            gamma_dot=-(sw.omega_p * a_dot + sw.omega_b * b_dot),
        )
        fs.validate(strict=strict)
        return fs

    def validate(self, strict: bool = True) -> None:
        if strict:
            if not (self.gamma < self.beta < self.a):
                raise ValueError(
                    f"front ordering gamma < beta < a violated: "
                    f"gamma={self.gamma!r} beta={self.beta!r} a={self.a!r}"
                )
        elif not (self.gamma <= self.beta <= self.a):
            raise ValueError(
                f"front ordering gamma <= beta <= a violated: "
                f"gamma={self.gamma!r} beta={self.beta!r} a={self.a!r}"
            )

    def advanced(self, dt: float, sw: SwellingRatios) -> "FrontState":
        """Consumptions moved by dt at the stored velocities; geometry rederived."""
        return FrontState.from_consumption(
            self.a + dt * self.a_dot,
            self.b + dt * self.b_dot,
            sw,
            a_dot=self.a_dot,
            b_dot=self.b_dot,
        )

    def with_velocities(self, vel: FrontVelocities) -> "FrontState":
        return replace(self, a_dot=vel.a_dot, b_dot=vel.b_dot,
                       beta_dot=vel.beta_dot, gamma_dot=vel.gamma_dot)

    def scaled(self, factor: float) -> "FrontState":
        """All positions multiplied by factor (e.g. lambda to re-dimensionalize)."""
        return FrontState(self.a * factor, self.b * factor,
                          self.beta * factor, self.gamma * factor,
                          self.a_dot, self.b_dot, self.beta_dot, self.gamma_dot)


@dataclass
class LayerFields:
    """Gridded non-dimensional concentrations on the two unit intervals.

    S, W, O live on the outer grid (length n_z+1), G on the inner grid
    (length n_y+1).
    """

    S: np.ndarray
    W: np.ndarray
    O: np.ndarray
    G: np.ndarray

    def copy(self) -> "LayerFields":
        return LayerFields(self.S.copy(), self.W.copy(), self.O.copy(), self.G.copy())

    def min_value(self) -> float:
        return float(min(self.S.min(), self.W.min(), self.O.min(), self.G.min()))


@dataclass(frozen=True)
class StefanConstants:
    """Dimensionless groups of the interface conditions.

    omega_s drives the cuprite-consumption Stefan condition, omega_g the
    copper-consumption one; gamma_w and gamma_o are the reaction-sink
    coefficients of the water and oxygen Robin conditions at beta.
    """

    omega_s: float
    omega_g: float
    gamma_w: float
    gamma_o: float


def stefan_constants(mat: MaterialTable, d_hat: Diffusivities,
                     scales: Scales) -> StefanConstants:
    """Interface constants from materials, hatted diffusivities and scales."""
    return StefanConstants(
        omega_s=2.0 * mat.n_b * d_hat.d_s * (mat.M_p / mat.M_s) * (scales.s_r / mat.rho_p),
        omega_g=4.0 * mat.n_p * d_hat.d_g * (mat.M_c / mat.M_o) * (scales.g_r / mat.rho_c),
        gamma_w=1.5 / mat.n_b * (mat.M_w / mat.M_p) * (mat.rho_p / scales.w_r),
        gamma_o=0.75 / mat.n_b * (mat.M_o / mat.M_p) * (mat.rho_p / scales.o_r),
    )


def _outer_width(fs: FrontState) -> float:
    width = fs.beta - fs.gamma
    if width == 0.0:
        raise ValueError("degenerate brochantite layer: beta == gamma")
    return width


def _inner_width(fs: FrontState) -> float:
    width = fs.a - fs.beta
    if width == 0.0:
        raise ValueError("degenerate cuprite layer: a == beta")
    return width


def rescale_coeff_q(z, fs: FrontState):
    """Front-fixing advection coefficient of the outer map, q(z)."""
    width = _outer_width(fs)
    return (np.asarray(z) * (fs.gamma_dot - fs.beta_dot) - fs.gamma_dot) / width


def rescale_coeff_f(y, fs: FrontState):
    """Front-fixing advection coefficient of the inner map, f(y)."""
    width = _inner_width(fs)
    return (np.asarray(y) * (fs.beta_dot - fs.a_dot) - fs.beta_dot) / width


def outer_advection_coeff(z, fs: FrontState):
    """Total advection speed of the outer equations at grid coordinate z."""
    return fs.gamma_dot / _outer_width(fs) + rescale_coeff_q(z, fs)


def inner_advection_coeff(y, fs: FrontState, omega_p: float):
    """Total advection speed of the inner equation at grid coordinate y.

    The inner equation reads dG/dtau = diffusion + A(y) G_y; in standard
    advection form (dG/dtau + c G_y = diffusion) the speed is c = -A(y).
    """
    return rescale_coeff_f(y, fs) - omega_p * fs.a_dot / _inner_width(fs)


def _upwind_gradient(u: np.ndarray, c: np.ndarray, dx: float,
                     scheme: str) -> np.ndarray:
    """First derivative at interior nodes, biased against the flow for 'upwind'."""
    if scheme == "central":
        return (u[2:] - u[:-2]) / (2.0 * dx)
    if scheme != "upwind":
        raise ValueError(f"unknown advection scheme {scheme!r}")
    backward = (u[1:-1] - u[:-2]) / dx
    forward = (u[2:] - u[1:-1]) / dx
    return np.where(c > 0.0, backward, forward)


def split_rhs_interior(u: np.ndarray, d_hat: float, width: float, c: np.ndarray,
                       dx: float, scheme: str) -> tuple[np.ndarray, np.ndarray]:
    """Advection (H) and diffusion (G) right-hand sides at the interior nodes.

    ``c`` is the precomputed advection speed on the interior grid; the hot
    loop shares it across the three outer species.
    """
    if u.ndim != 1 or u.size < 3:
        raise ValueError(f"field must be a 1-D array with at least 3 nodes, got shape {u.shape}")
    if c.shape != u[1:-1].shape:
        raise ValueError("advection coefficient grid does not match the field grid")
    h = -c * _upwind_gradient(u, c, dx, scheme)
    g = d_hat / (width * dx) ** 2 * (u[2:] - 2.0 * u[1:-1] + u[:-2])
    return h, g


def _full(interior: np.ndarray) -> np.ndarray:
    out = np.zeros(interior.size + 2)
    out[1:-1] = interior
    return out


def outer_split_rhs(u: np.ndarray, d_hat: float, fs: FrontState, dz: float,
                    scheme: str = "upwind") -> tuple[np.ndarray, np.ndarray]:
    """Explicit (advection) and implicit (diffusion) parts for an outer species.

    Returns full-length arrays with zeros in the boundary slots; only
    interior nodes carry the split right-hand side.
    """
    width = _outer_width(fs)
    z_int = np.arange(1, u.size - 1) * dz
    c = np.asarray(outer_advection_coeff(z_int, fs))
    h, g = split_rhs_interior(u, d_hat, width, c, dz, scheme)
    return _full(h), _full(g)


def inner_split_rhs(g_field: np.ndarray, d_hat_g: float, fs: FrontState, dy: float,
                    omega_p: float, scheme: str = "upwind") -> tuple[np.ndarray, np.ndarray]:
    """Explicit/implicit split for the inner oxygen field."""
    width = _inner_width(fs)
    y_int = np.arange(1, g_field.size - 1) * dy
    c = np.asarray(inner_advection_coeff(y_int, fs, omega_p))
    h, g = split_rhs_interior(g_field, d_hat_g, width, c, dy, scheme)
    return _full(h), _full(g)


def boundary_gradient(u: np.ndarray, dx: float) -> float:
    """Second-order one-sided derivative at the last node, exact for quadratics."""
    return float((3.0 * u[-1] - 4.0 * u[-2] + u[-3]) / (2.0 * dx))


def front_velocities(fields: LayerFields, fs: FrontState, sc: StefanConstants,
                     dz: float, dy: float,
                     sw: SwellingRatios) -> tuple[FrontVelocities, int]:
    """Front speeds from the two Stefan conditions.

    b_dot comes from the SO2 gradient at beta, a_dot from the inner oxygen
    gradient at a; both use the one-sided second-order stencil.  Transiently
    negative speeds (discretization noise; the reactions are irreversible)
    are clamped to zero and counted.  Returns (velocities, clamp count).
    """
    outer_width = _outer_width(fs)
    inner_width = _inner_width(fs)

    b_dot = -sc.omega_s / outer_width * boundary_gradient(fields.S, dz)
    a_dot = -sc.omega_g / inner_width * boundary_gradient(fields.G, dy)

    clamped = 0
    if b_dot < 0.0:
        b_dot = 0.0
        clamped += 1
    if a_dot < 0.0:
        a_dot = 0.0
        clamped += 1

    gamma_dot = -(sw.omega_p * a_dot + sw.omega_b * b_dot)
    beta_dot = b_dot - sw.omega_p * a_dot
    return FrontVelocities(a_dot, b_dot, gamma_dot, beta_dot), clamped


def _solve_robin_node(u: np.ndarray, d_hat: float, width: float, dz: float,
                      gamma_dot: float, b_dot: float, sink_coeff: float,
                      species: str) -> float:
    """Boundary value at z=1 from D/(width) u_z = (gamma_dot - b_dot) u - sink_coeff*b_dot.

    The one-sided stencil makes the condition linear in the unknown u[-1]:
    k*(3 u[-1] - 4 u[-2] + u[-3]) = (gamma_dot - b_dot) u[-1] - sink_coeff*b_dot
    with k = D/(2 dz width).  Negative solutions are clamped to zero.
    """
    k = d_hat / (2.0 * dz * width)
    denom = 3.0 * k - (gamma_dot - b_dot)
    if abs(denom) < 1e-300 or not math.isfinite(denom):
        raise BoundaryConditionError(
            f"singular Robin coefficient for {species}: dz={dz}, "
            f"gamma_dot={gamma_dot}, b_dot={b_dot}, k={k}"
        )
    value = (k * (4.0 * u[-2] - u[-3]) - sink_coeff * b_dot) / denom
    return max(value, 0.0)


def apply_outer_bcs(fields: LayerFields, fs: FrontState, d_hat: Diffusivities,
                    forcing_values: tuple[float, float, float],
                    sc: StefanConstants, dz: float) -> None:
    """Refresh all outer boundary nodes in place.

    Dirichlet at z=0 (environment values, already non-dimensional) and
    S(1)=0; Robin solves for W(1) and O(1) using the current velocities
    stored in ``fs``.
    """
    s_a, w_a, o_a = forcing_values
    fields.S[0] = s_a
    fields.W[0] = w_a
    fields.O[0] = o_a
    fields.S[-1] = 0.0

    width = _outer_width(fs)
    fields.W[-1] = _solve_robin_node(fields.W, d_hat.d_w, width, dz,
                                     fs.gamma_dot, fs.b_dot, sc.gamma_w, "W")
    fields.O[-1] = _solve_robin_node(fields.O, d_hat.d_o, width, dz,
                                     fs.gamma_dot, fs.b_dot, sc.gamma_o, "O")


def apply_inner_bcs(fields: LayerFields) -> None:
    """Inner oxygen boundary nodes: G(1)=0 and the value handoff G(0)=O(beta)."""
    fields.G[-1] = 0.0
    fields.G[0] = fields.O[-1]
