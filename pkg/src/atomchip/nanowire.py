"""Size-dependent resistivity and current limits of nanofabricated gold wires."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .domain import CONSTANTS, RHO_AU_300K

__all__ = [
    "WireElectrical",
    "GOLD",
    "fs_resistivity",
    "max_safe_current",
    "ScalingReport",
    "current_density_scaling_check",
    "ANCHOR_SMALL",
    "ANCHOR_LARGE",
]

#: Calibration anchor (side, current): a 20 nm square wire sustains 0.5 mA.
ANCHOR_SMALL = (20e-9, 0.5e-3)
#: Check anchor: a 100 nm square wire sustains about 5 mA.
ANCHOR_LARGE = (100e-9, 5e-3)


@dataclass(frozen=True)
class WireElectrical:
    """Electrical parameters of a polycrystalline wire.

    Parameters
    ----------
    bulk_rho : float
        Bulk resistivity at 300 K (Ohm m).
    mean_free_path : float
        Electron mean free path (m).
    specularity : float
        Fraction of specular surface reflections, 0..1.
    temp_coefficient : float
        Linear temperature coefficient of the bulk resistivity (1/K).
    oxide_thickness : float
        Insulating layer between wire and substrate (m); sets the heat-spreading width.
    """

    bulk_rho: float = RHO_AU_300K
    mean_free_path: float = 40e-9
    specularity: float = 0.0
    temp_coefficient: float = 3.4e-3
    oxide_thickness: float = 100e-9

    def __post_init__(self):
        if not (self.bulk_rho > 0 and self.mean_free_path >= 0):
            raise ValueError("bulk_rho must be positive and mean_free_path non-negative")
        if not 0 <= self.specularity <= 1:
            raise ValueError("specularity must lie in [0, 1]")

    def rho(self, w: float, h: float, T: float = 300.0) -> float:
        """Resistivity of a ``w`` by ``h`` wire at temperature ``T``."""
        return fs_resistivity(w, h, self) * (1 + self.temp_coefficient * (T - 300.0))


GOLD = WireElectrical()


def fs_resistivity(w: float, h: float, el: WireElectrical = GOLD) -> float:
    """Approximate Fuchs-Sondheimer resistivity (Ohm m).

    ``rho_b (1 + 3/8 (1 - p) l (1/w + 1/h))`` with mean free path ``l`` and
    specularity ``p``.
    """
    if not (w > 0 and h > 0):
        raise ValueError("w and h must be positive")
    corr = 0.375 * (1 - el.specularity) * el.mean_free_path * (1 / w + 1 / h)
    return el.bulk_rho * (1 + corr)


def _spreading(w: float, h: float, el: WireElectrical) -> float:
    return math.sqrt(w * h * (w + 2 * el.oxide_thickness) / fs_resistivity(w, h, el))


def _density(w: float, h: float, el: WireElectrical) -> float:
    return w * h * el.bulk_rho / fs_resistivity(w, h, el)


_MODELS = {"heat_spreading": _spreading, "current_density": _density}


def max_safe_current(w: float, h: float, el: WireElectrical = GOLD, model: str = "heat_spreading") -> float:
    """Largest current the wire is taken to sustain (A).

    Both models have one constant, fixed by the 20 nm / 0.5 mA anchor.

    ``"heat_spreading"`` (default)
        Joule power per length ``I^2 rho / (w h)`` balanced against a
        fixed temperature rise across the oxide under a footprint
        ``w + 2 t_ox``: ``I = C sqrt(w h (w + 2 t_ox) / rho(w, h))``.
    ``"current_density"``
        Constant current density scaled by the resistivity ratio:
        ``I = J (rho_b / rho(w, h)) w h``.  This grows much faster than the
        100 nm / 5 mA check allows and is kept for comparison.
    """
    if not (w > 0 and h > 0):
        raise ValueError("w and h must be positive")
    try:
        shape = _MODELS[model]
    except KeyError:
        raise ValueError(f"model must be one of {sorted(_MODELS)}") from None
    side, current = ANCHOR_SMALL
    return current * shape(w, h, el) / shape(side, side, el)


@dataclass(frozen=True)
class ScalingReport:
    """Gradient of a side guide whose wire cross-section tracks the trap height."""

    d: float
    gradient_constant_j: float
    gradient_constant_j_half_d: float
    current_max: float
    gradient_max: float
    current_density: float

    @property
    def constant_j_ratio(self) -> float:
        """Gradient ratio when ``d`` halves at fixed current density."""
        return self.gradient_constant_j_half_d / self.gradient_constant_j

    @property
    def gain(self) -> float:
        """Gradient at the safe current relative to the constant-density one."""
        return self.gradient_max / self.gradient_constant_j


def _gradient(I: float, r: float) -> float:
    return CONSTANTS.mu0 * I / (2 * math.pi * r * r)


def current_density_scaling_check(d: float, current_density: float | None = None,
                                  el: WireElectrical = GOLD) -> ScalingReport:
    """Trap gradient at height ``d`` above a square wire of side ``d``.

    At fixed current density ``J`` the current ``J d^2`` falls as ``d^2`` and
    the gradient ``mu0 I / (2 pi d^2)`` stays constant.  The report also
    gives the gradient at :func:`max_safe_current` for the same wire.

    Parameters
    ----------
    d : float
        Trap distance from the wire axis and wire side (m).
    current_density : float, optional
        Reference density (A/m^2); defaults to that of the 20 nm anchor.
    """
    if not d > 0:
        raise ValueError("d must be positive")
    if current_density is None:
        side, current = ANCHOR_SMALL
        current_density = current / side**2
    J = current_density
    g_full = _gradient(J * d * d, d)
    g_half = _gradient(J * (d / 2) ** 2, d / 2)
    Imax = max_safe_current(d, d, el)
    return ScalingReport(d, g_full, g_half, Imax, _gradient(Imax, d), J)
