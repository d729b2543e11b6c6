"""Physical constants and stoichiometry of the copper -> cuprite -> brochantite chain.

Two instantaneous reactions drive the patina:

    2 Cu + 1/2 O2                      -> Cu2O            (cuprite)
    2 Cu2O + SO2 + 3 H2O + 3/2 O2      -> Cu4SO4(OH)6     (brochantite)

Consuming a thickness of the parent phase produces a larger thickness of the
product phase (swelling).  This module houses the material table (mass
densities in g/cm3, molar masses in g/mol, layer porosities), the two
swelling ratios, layer-thickness bookkeeping and the per-area mole-balance
report used as the stoichiometry oracle: for any kinematically consistent
front state, two copper moles are wasted per cuprite mole formed and two
cuprite moles are wasted per brochantite mole formed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace, fields as dataclass_fields

__all__ = [
    "MaterialTable",
    "SwellingRatios",
    "MoleReport",
    "LayerThicknesses",
    "DEFAULT_MATERIALS",
    "swelling_ratios",
    "layer_thicknesses",
    "mole_balance",
    "load_material_overrides",
]


@dataclass(frozen=True)
class MaterialTable:
    """Densities (g/cm3), molar masses (g/mol) and layer porosities.

    Defaults are solid handbook values for copper, cuprite, brochantite and
    SO2.  Water and O2 molar masses are standard constants.  Porosities
    default to 1.0: the diffusivities are calibrated quantities that absorb
    the pore structure together with the finite reaction time.
    """

    rho_c: float = 8.94     # copper mass density
    M_c: float = 63.55      # copper molar mass
    rho_p: float = 6.00     # cuprite (Cu2O)
    M_p: float = 143.09
    rho_b: float = 3.97     # brochantite (Cu4SO4(OH)6)
    M_b: float = 452.3
    rho_s: float = 1.46     # SO2 (unused by the equations, kept for completeness)
    M_s: float = 64.07
    M_w: float = 18.015     # water
    M_o: float = 32.00      # O2
    n_b: float = 1.0        # brochantite-layer porosity, in (0, 1]
    n_p: float = 1.0        # cuprite-layer porosity, in (0, 1]

    def __post_init__(self):
        for name in ("rho_c", "M_c", "rho_p", "M_p", "rho_b", "M_b",
                     "rho_s", "M_s", "M_w", "M_o"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"material parameter {name} must be positive, got {value}")
        for name in ("n_b", "n_p"):
            value = getattr(self, name)
            if not (0.0 < value <= 1.0):
                raise ValueError(f"porosity {name} must lie in (0, 1], got {value}")

    @property
    def mu_c(self) -> float:
        """Copper molar density, mol/cm3."""
        return self.rho_c / self.M_c

    @property
    def mu_p(self) -> float:
        """Cuprite molar density, mol/cm3."""
        return self.rho_p / self.M_p

    @property
    def mu_b(self) -> float:
        """Brochantite molar density, mol/cm3."""
        return self.rho_b / self.M_b


DEFAULT_MATERIALS = MaterialTable()


@dataclass(frozen=True)
class SwellingRatios:
    """Volume expansion ratios of the two conversions.

    omega_p: cuprite gained per copper consumed, mu_c/(2*mu_p) - 1.
    omega_b: brochantite gained per cuprite consumed, mu_p/(2*mu_b) - 1.
    """

    omega_p: float
    omega_b: float

    def scaled(self, p_scale: float = 1.0, b_scale: float = 1.0) -> "SwellingRatios":
        """Scaled copy; used only by the validation fault-injection switch."""
        return SwellingRatios(self.omega_p * p_scale, self.omega_b * b_scale)


def swelling_ratios(mat: MaterialTable) -> SwellingRatios:
    """Expansion ratios from the molar densities of the three solids."""
    return SwellingRatios(
        omega_p=mat.mu_c / (2.0 * mat.mu_p) - 1.0,
        omega_b=mat.mu_p / (2.0 * mat.mu_b) - 1.0,
    )


@dataclass(frozen=True)
class LayerThicknesses:
    """Cuprite thickness, brochantite thickness and total patina thickness."""

    h_p: float
    h_b: float
    total: float


def _check_ordering(fs) -> None:
    if not (fs.gamma <= fs.beta <= fs.a):
        raise ValueError(
            f"front ordering gamma <= beta <= a violated: "
            f"gamma={fs.gamma!r} beta={fs.beta!r} a={fs.a!r}"
        )


def layer_thicknesses(fs) -> LayerThicknesses:
    """Layer thicknesses of a front state, in whatever length unit it carries.

    h_p = a - beta (cuprite), h_b = beta - gamma (brochantite),
    total = a - gamma.  Rejects states violating gamma <= beta <= a.
    """
    _check_ordering(fs)
    return LayerThicknesses(h_p=fs.a - fs.beta, h_b=fs.beta - fs.gamma, total=fs.a - fs.gamma)


@dataclass(frozen=True)
class MoleReport:
    """Per-unit-area mole counts (mol/cm2) and the two stoichiometric ratios.

    Ratios are NaN when the corresponding product count is zero.
    """

    copper_wasted: float
    cuprite_formed: float
    cuprite_wasted: float
    brochantite_formed: float
    ratio_copper_cuprite: float
    ratio_cuprite_brochantite: float

    def max_ratio_deviation(self) -> float:
        """Largest relative deviation of the defined ratios from 2."""
        devs = [abs(r / 2.0 - 1.0)
                for r in (self.ratio_copper_cuprite, self.ratio_cuprite_brochantite)
                if math.isfinite(r)]
        return max(devs) if devs else math.nan


def mole_balance(fs, mat: MaterialTable) -> MoleReport:
    """Stoichiometry oracle over a front state with lengths in cm.

    Counts are taken from the geometry, not from the closed forms, so a
    simulation whose front kinematics disagree with the material table is
    detected: gross cuprite formed is the retained layer (a - beta) plus the
    consumed thickness b, and brochantite formed is the layer (beta - gamma)
    times its molar density.  For consistent states these equal
    (1 + omega_p)*a*mu_p and b*mu_p/2 and both ratios are exactly 2.
    """
    _check_ordering(fs)
    if fs.a < 0.0 or fs.b < 0.0:
        raise ValueError(f"consumptions must be non-negative, got a={fs.a}, b={fs.b}")

    copper_wasted = fs.a * mat.mu_c
    cuprite_formed = ((fs.a - fs.beta) + fs.b) * mat.mu_p
    cuprite_wasted = fs.b * mat.mu_p
    brochantite_formed = (fs.beta - fs.gamma) * mat.mu_b

    ratio_cc = copper_wasted / cuprite_formed if cuprite_formed > 0.0 else math.nan
    ratio_cb = cuprite_wasted / brochantite_formed if brochantite_formed > 0.0 else math.nan
    return MoleReport(
        copper_wasted=copper_wasted,
        cuprite_formed=cuprite_formed,
        cuprite_wasted=cuprite_wasted,
        brochantite_formed=brochantite_formed,
        ratio_copper_cuprite=ratio_cc,
        ratio_cuprite_brochantite=ratio_cb,
    )


_OVERRIDE_KEYS = {f.name for f in dataclass_fields(MaterialTable)}


def load_material_overrides(path, base: MaterialTable = DEFAULT_MATERIALS) -> MaterialTable:
    """Material table from a plain ``key = value`` override file.

    Keys must be field names of :class:`MaterialTable` (rho_c, M_c, ...,
    n_b, n_p); unknown keys are an error.  Blank lines and ``#`` comments
    are ignored.  Unlisted keys keep the values of ``base``.
    """
    updates: dict[str, float] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}: line {lineno}: expected 'key = value', got {raw!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in _OVERRIDE_KEYS:
                raise ValueError(f"{path}: line {lineno}: unknown material key {key!r}")
            try:
                updates[key] = float(value.strip())
            except ValueError as exc:
                raise ValueError(f"{path}: line {lineno}: bad number {value.strip()!r}") from exc
    return replace(base, **updates)
