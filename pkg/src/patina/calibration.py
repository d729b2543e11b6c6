"""Least-squares fit of the diffusivities to measured patina thicknesses.

The data are a handful of total-thickness measurements; the objective is the
std-weighted sum of squared deviations of the simulated total thickness
(a - gamma, what a cross-section actually shows) at the measurement times.
Parameters are searched in log10 space with a Nelder-Mead simplex; box
bounds are enforced by reflecting the coordinates back into the box, so the
objective is continuous and the reported optimum always lies inside.

With total thickness alone the four diffusivities are not identifiable: the
water field never feeds back (hence the D_w = D_s tie), the oxygen field
stays near its boundary value for any plausible D_o, and D_g trades off
against D_s along a flat valley (both layers grow like sqrt(t)).  The
default initial guess therefore comes from a closed-form quasi-steady
estimate (``reduced_model_initial_guess``) that fits the sqrt(t) amplitude
and assigns a configurable share of the patina to the oxide layer.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import optimize

from .materials import swelling_ratios
from .pde_core import Diffusivities, stefan_constants
from .simulation import SimulationConfig, SimulationError, run

__all__ = [
    "ThicknessMeasurement",
    "CalibrationResult",
    "MEASUREMENTS_CSV_HEADER",
    "load_measurements",
    "predict_total_thickness",
    "residual",
    "reduced_model_initial_guess",
    "calibrate",
]

log = logging.getLogger("patina.calibration")

MEASUREMENTS_CSV_HEADER = ("time_hours", "thickness_cm", "std_cm")

PARAM_NAMES = ("d_g", "d_s", "d_o", "d_w")


@dataclass(frozen=True)
class ThicknessMeasurement:
    """Measured mean patina thickness and its standard deviation, in cm."""

    time_hours: float
    mean_cm: float
    std_cm: float

    def __post_init__(self):
        if self.time_hours <= 0.0:
            raise ValueError(f"measurement time must be positive, got {self.time_hours}")
        if self.mean_cm <= 0.0:
            raise ValueError(f"measured thickness must be positive, got {self.mean_cm}")
        if self.std_cm < 0.0:
            raise ValueError(f"standard deviation must be non-negative, got {self.std_cm}")


def load_measurements(path) -> tuple[ThicknessMeasurement, ...]:
    """Read a ``time_hours,thickness_cm,std_cm`` CSV (# comments allowed)."""
    rows: list[ThicknessMeasurement] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        lines = [(n, ln) for n, ln in enumerate(fh, start=1)
                 if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ValueError(f"{path}: empty measurements file")
    header = tuple(h.strip() for h in lines[0][1].strip().split(","))
    if header != MEASUREMENTS_CSV_HEADER:
        raise ValueError(f"{path}: bad header; expected {','.join(MEASUREMENTS_CSV_HEADER)!r}")
    for lineno, line in lines[1:]:
        parts = next(csv.reader([line]))
        if len(parts) != 3:
            raise ValueError(f"{path}: line {lineno}: expected 3 fields")
        try:
            rows.append(ThicknessMeasurement(*(float(p) for p in parts)))
        except ValueError as exc:
            raise ValueError(f"{path}: line {lineno}: {exc}") from exc
    if not rows:
        raise ValueError(f"{path}: no measurement rows")
    return tuple(rows)


def predict_total_thickness(d: Diffusivities, cfg: SimulationConfig,
                            times_hours) -> np.ndarray:
    """Simulated total thickness (cm) at the given hours, one run."""
    times = np.asarray(times_hours, dtype=float)
    horizon = max(cfg.horizon_hours, float(times.max()))
    out = run(replace(cfg, diffusivities=d, horizon_hours=horizon))
    return out.thickness_at(times)


def _weights(measurements, weighting: str) -> np.ndarray:
    if weighting == "std":
        # fall back to the mean where no std is available
        return np.array([m.std_cm if m.std_cm > 0.0 else m.mean_cm
                         for m in measurements])
    if weighting == "raw":
        return np.ones(len(measurements))
    raise ValueError(f"unknown weighting {weighting!r}; expected 'std' or 'raw'")


def residual(d: Diffusivities, measurements, cfg: SimulationConfig,
             weighting: str = "std") -> float:
    """Sum of squared weighted deviations; infinite when the run fails."""
    if not measurements:
        raise ValueError("measurements must be non-empty")
    times = np.array([m.time_hours for m in measurements])
    means = np.array([m.mean_cm for m in measurements])
    w = _weights(measurements, weighting)
    try:
        pred = predict_total_thickness(d, cfg, times)
    except (SimulationError, ValueError) as exc:
        log.warning("residual evaluation rejected at %s: %s", d, exc)
        return math.inf
    return float(np.sum(((pred - means) / w) ** 2))


def reduced_model_initial_guess(measurements, cfg: SimulationConfig,
                                oxide_share: float = 0.1) -> Diffusivities:
    """Warm start from the quasi-steady sqrt(t) growth law.

    Quasi-steady profiles make both layers grow like sqrt(t):
    total(t) ~ (c_p + (1+omega_b)*k_b) * sqrt(tau) with
    b = k_b*sqrt(tau) set by Omega_s and the oxide thickness c_p*sqrt(tau)
    set by Omega_g through c_p^2 + k_b*c_p = 2*(1+omega_p)*Omega_g.  The
    amplitude is fitted to the measurements by weighted least squares, the
    oxide share of the total is fixed at ``oxide_share``, and the two Stefan
    groups are inverted for D_s and D_g.  D_o keeps its configured value
    (no measurable effect) and D_w ties to D_s.
    """
    if not 0.0 < oxide_share < 1.0:
        raise ValueError("oxide_share must lie in (0, 1)")
    sw = swelling_ratios(cfg.materials)
    scales = cfg.scales
    mat = cfg.materials

    # Weighted LS amplitude of total_nd = C*sqrt(tau) (tau in units of t_r).
    tau = np.array([m.time_hours * 3600.0 / scales.t_r for m in measurements])
    totals_nd = np.array([m.mean_cm / scales.lam for m in measurements])
    w = _weights(measurements, "std") / scales.lam
    amplitude = float(np.sum(totals_nd * np.sqrt(tau) / w**2) / np.sum(tau / w**2))

    c_p = oxide_share * amplitude
    k_b = (1.0 - oxide_share) * amplitude / (1.0 + sw.omega_b)

    from .simulation import _build_model  # boundary values at t = 0

    s_hat, _, o_hat = _build_model(cfg).forcing_hat(0.0)
    if s_hat <= 0.0 or o_hat <= 0.0:
        raise ValueError("reduced-model guess needs nonzero SO2 and O2 forcing")

    omega_s = k_b**2 * (1.0 + sw.omega_b) / (2.0 * s_hat)
    omega_g = (c_p**2 + k_b * c_p) / (2.0 * (1.0 + sw.omega_p) * o_hat)

    # Invert the Stefan groups at unit hatted diffusivity to get D_s, D_g.
    unit = Diffusivities(1.0, 1.0, 1.0, 1.0).hatted(scales)
    ref = stefan_constants(mat, unit, scales)
    d_s = omega_s / ref.omega_s
    d_g = omega_g / ref.omega_g
    return Diffusivities(d_g=d_g, d_s=d_s, d_o=cfg.diffusivities.d_o, d_w=d_s)


@dataclass(frozen=True)
class CalibrationResult:
    """Fit outcome: best diffusivities, objective value, per-point comparison."""

    diffusivities: Diffusivities
    residual: float
    times_hours: tuple[float, ...]
    measured_cm: tuple[float, ...]
    predicted_cm: tuple[float, ...]
    evaluations: int
    converged: bool


def _reflect_into(x: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Fold unconstrained coordinates into [lo, hi] by reflection at the walls."""
    span = hi - lo
    t = np.mod(x - lo, 2.0 * span)
    return lo + (span - np.abs(t - span))


def _to_diffusivities(log_params: np.ndarray, tie_dw_ds: bool) -> Diffusivities:
    d = 10.0 ** log_params
    if tie_dw_ds:
        return Diffusivities(d_g=d[0], d_s=d[1], d_o=d[2], d_w=d[1])
    return Diffusivities(d_g=d[0], d_s=d[1], d_o=d[2], d_w=d[3])


def calibrate(initial: Diffusivities, bounds: tuple[float, float],
              measurements, cfg: SimulationConfig, *,
              tie_dw_ds: bool = True, budget: int = 200,
              spread_tol: float = 1e-3, simplex_steps=0.25,
              weighting: str = "std") -> CalibrationResult:
    """Nelder-Mead over log10 diffusivities with reflective box bounds.

    Stops when the simplex spread drops below ``spread_tol`` in log space or
    when the evaluation ``budget`` is exhausted (best-so-far returned with
    ``converged=False``).  ``simplex_steps`` sets the initial simplex extent
    in decades, a scalar or one value per free parameter; a small step
    effectively holds a parameter that the data carry no information about.
    """
    lo, hi = bounds
    if not (0.0 < lo < hi):
        raise ValueError(f"bounds must satisfy 0 < lo < hi, got {bounds}")
    if not measurements:
        raise ValueError("measurements must be non-empty")
    llo, lhi = math.log10(lo), math.log10(hi)
    init = [initial.d_g, initial.d_s, initial.d_o] + ([] if tie_dw_ds else [initial.d_w])
    for value in init:
        if not (lo <= value <= hi):
            raise ValueError(f"initial diffusivity {value} outside bounds {bounds}")
    x0 = np.log10(np.array(init))

    def objective(x: np.ndarray) -> float:
        folded = _reflect_into(x, llo, lhi)
        d = _to_diffusivities(folded, tie_dw_ds)
        return residual(d, measurements, cfg, weighting=weighting)

    # Deterministic initial simplex, a fixed number of decades per coordinate.
    n = x0.size
    steps = np.broadcast_to(np.asarray(simplex_steps, dtype=float), (n,))
    if np.any(steps <= 0.0):
        raise ValueError("simplex_steps must be positive")
    simplex = np.tile(x0, (n + 1, 1))
    for k in range(n):
        simplex[k + 1, k] += steps[k]

    result = optimize.minimize(
        objective, x0, method="Nelder-Mead",
        options=dict(
            initial_simplex=simplex,
            maxfev=budget,
            xatol=spread_tol,
            fatol=math.inf,     # spread-only stopping
            adaptive=False,
        ),
    )
    best = _to_diffusivities(_reflect_into(result.x, llo, lhi), tie_dw_ds)
    times = tuple(m.time_hours for m in measurements)
    predicted = predict_total_thickness(best, cfg, times)
    return CalibrationResult(
        diffusivities=best,
        residual=float(result.fun),
        times_hours=times,
        measured_cm=tuple(m.mean_cm for m in measurements),
        predicted_cm=tuple(float(p) for p in predicted),
        evaluations=int(result.nfev),
        converged=bool(result.success),
    )
