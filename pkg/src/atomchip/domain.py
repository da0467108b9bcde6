"""Shared vocabulary: physical constants, atom species, wire geometry and units.

Everything inside the package is SI.  Laboratory units (um, nm, mA, uK, G)
are handled only at the I/O boundary through :func:`convert_units`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType

import numpy as np
from scipy import constants as _sc

__all__ = [
    "CONSTANTS",
    "PhysicalConstants",
    "AtomSpecies",
    "RB87",
    "WireGeometry",
    "Layer",
    "LayerStack",
    "SI_SIO2_STACK",
    "ConductivityTensor",
    "TrapContext",
    "RHO_AU_300K",
    "magnetic_moment",
    "convert_units",
    "PhysicsDomainError",
]


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA constants (SI) as shipped with scipy."""

    mu0: float = _sc.mu_0
    hbar: float = _sc.hbar
    kB: float = _sc.k
    c: float = _sc.c
    eps0: float = _sc.epsilon_0
    muB: float = _sc.physical_constants["Bohr magneton"][0]

    def __post_init__(self):
        for name in ("mu0", "hbar", "kB", "c", "eps0", "muB"):
            if not getattr(self, name) > 0:
                raise ValueError(f"constant {name} must be positive")


CONSTANTS = PhysicalConstants()

#: Bulk gold resistivity at 300 K, 2.21 uOhm cm.
RHO_AU_300K = 2.21e-8


class PhysicsDomainError(ValueError):
    """A physically meaningful evaluation failure (no barrier, point inside a conductor, ...)."""


def _parse_state(label: str) -> tuple[int, int]:
    body = label.strip().lstrip("|").rstrip(">").replace(" ", "")
    try:
        F_str, m_str = body.split(",")
        F, mF = int(F_str), int(m_str)
    except ValueError:
        raise ValueError(f"cannot parse hyperfine state label {label!r}; use '|F,mF>'") from None
    if abs(mF) > F:
        raise ValueError(f"state {label!r} has |mF| > F")
    return F, mF


@dataclass(frozen=True)
class AtomSpecies:
    """Ground-state alkali atom as seen by the trap formulas.

    Parameters
    ----------
    mass : float
        Atomic mass in kg.
    gF : float
        Hyperfine Lande factor of the trapped manifold.
    F : int
        Total angular momentum of the trapped manifold.
    mF : float
        Zeeman sublevel of the trapped state.
    alpha0 : float
        Static polarizability *volume* in m^3 (``alpha / 4 pi eps0``).
    state_labels : tuple of str
        Qubit pair, e.g. ``("|2,2>", "|2,1>")``.

    Notes
    -----
    Moments are stored as magnitudes: ``muA = |gF * mF| * muB``.  A low-field
    seeking state therefore always has ``muA > 0`` and feels ``V = muA * |B|``.
    """

    name: str
    mass: float
    gF: float
    F: int
    mF: float
    alpha0: float
    state_labels: tuple[str, str] = ("|2,2>", "|2,1>")

    def __post_init__(self):
        if self.mass <= 0:
            raise ValueError("mass must be positive")
        if self.alpha0 <= 0:
            raise ValueError("alpha0 must be positive")
        if abs(self.mF) > self.F:
            raise ValueError("|mF| must not exceed F")
        if abs(self.gF * self.mF) > 2:
            raise ValueError("|muA| must not exceed 2 muB")
        for label in self.state_labels:
            _parse_state(label)

    @property
    def muA(self) -> float:
        """Magnetic moment of the trapped state along the trap-bottom field (J/T)."""
        return abs(self.gF * self.mF) * CONSTANTS.muB

    def transverse_moment(self) -> float:
        """Spin-flip matrix element ``muB gF <F, mF-1| F_perp |F, mF>`` (J/T).

        ``F_perp`` is one Cartesian component perpendicular to the
        quantization axis; ``<m-1|F_x|m> = sqrt(F(F+1) - m(m-1)) / 2``.
        """
        F, m = self.F, abs(self.mF)
        return abs(self.gF) * CONSTANTS.muB * 0.5 * math.sqrt(F * (F + 1) - m * (m - 1))

    def with_state(self, label: str) -> "AtomSpecies":
        F, mF = _parse_state(label)
        if F != self.F:
            raise ValueError(f"state {label} is outside the F={self.F} manifold")
        return AtomSpecies(self.name, self.mass, self.gF, F, mF, self.alpha0, self.state_labels)


RB87 = AtomSpecies(
    name="Rb87",
    mass=1.44316e-25,
    gF=0.5,
    F=2,
    mF=2,
    alpha0=47.3e-30,  # 47.3e-24 cm^3
    state_labels=("|2,2>", "|2,1>"),
)


def magnetic_moment(species: AtomSpecies, state: str) -> float:
    """Moment ``gF * mF * muB`` of a Zeeman sublevel along the field (J/T).

    Parameters
    ----------
    species : AtomSpecies
    state : str
        One of ``species.state_labels``, written ``'|F,mF>'``.
    """
    normalized = {s.replace(" ", ""): s for s in species.state_labels}
    if state.replace(" ", "") not in normalized:
        raise ValueError(
            f"unknown state {state!r} for {species.name}; known: {species.state_labels}"
        )
    F, mF = _parse_state(state)
    if F != species.F:
        raise ValueError(f"state {state!r} is outside the F={species.F} manifold")
    return species.gF * mF * CONSTANTS.muB


@dataclass(frozen=True)
class WireGeometry:
    """Rectangular wire along x, width ``w`` along y, thickness ``h`` along z.

    Coordinates used by the noise code are relative to the wire center.
    """

    w: float
    h: float
    L: float

    def __post_init__(self):
        if not (self.w > 0 and self.h > 0 and self.L > 0):
            raise ValueError("w, h and L must be positive")
        if self.L < 10 * max(self.w, self.h):
            raise ValueError("long-wire formulas need L >= 10 max(w, h)")

    @property
    def radius(self) -> float:
        """Cylinder radius used by the Casimir-Polder wire model."""
        return self.h / 2

    def point_above(self, d: float, x: float = 0.0, y: float = 0.0) -> np.ndarray:
        """Position a height ``d`` above the top face, relative to the center."""
        return np.array([x, y, self.h / 2 + d], dtype=float)

    def contains(self, p) -> bool:
        x, y, z = p
        return abs(x) <= self.L / 2 and abs(y) <= self.w / 2 and abs(z) <= self.h / 2

    def gap(self, p) -> float:
        """Euclidean distance from ``p`` to the wire volume (0 inside)."""
        x, y, z = p
        dx = max(abs(x) - self.L / 2, 0.0)
        dy = max(abs(y) - self.w / 2, 0.0)
        dz = max(abs(z) - self.h / 2, 0.0)
        return math.sqrt(dx * dx + dy * dy + dz * dz)


@dataclass(frozen=True)
class Layer:
    eps: float
    thickness: float | None  # None: semi-infinite

    def __post_init__(self):
        if not self.eps >= 1:
            raise ValueError("dielectric constant must be >= 1")
        if self.thickness is not None and not self.thickness > 0:
            raise ValueError("finite layers need positive thickness")


@dataclass(frozen=True)
class LayerStack:
    """Planar substrate, top layer first; the last layer is semi-infinite."""

    layers: tuple[Layer, ...]

    def __post_init__(self):
        if not self.layers:
            raise ValueError("empty layer stack")
        *upper, bottom = self.layers
        if bottom.thickness is not None:
            raise ValueError("the bottom layer must be semi-infinite")
        if any(layer.thickness is None for layer in upper):
            raise ValueError("only the bottom layer may be semi-infinite")


#: 100 nm SiO2 (eps 4) on a Si wafer (eps 12).
SI_SIO2_STACK = LayerStack((Layer(4.0, 100e-9), Layer(12.0, None)))


@dataclass(frozen=True)
class ConductivityTensor:
    """Diagonal conductivity in the wire frame (S/m) at temperature ``T`` (K)."""

    sxx: float
    syy: float
    szz: float
    T: float = 300.0

    def __post_init__(self):
        if min(self.sxx, self.syy, self.szz) < 0:
            raise ValueError("conductivities must be non-negative")
        if self.sxx <= 0:
            raise ValueError("the wire axis must conduct (sxx > 0)")
        if self.T < 0:
            raise ValueError("temperature must be non-negative")

    @classmethod
    def isotropic(cls, sigma: float, T: float = 300.0) -> "ConductivityTensor":
        return cls(sigma, sigma, sigma, T)

    @property
    def diag(self) -> np.ndarray:
        return np.array([self.sxx, self.syy, self.szz])


@dataclass(frozen=True)
class TrapContext:
    """Operating point of a trap.

    ``d`` is measured from the top of the wire for noise, from the chip
    surface for the Casimir-Polder/tunneling scenario (see each function).
    """

    d: float
    I: float = 0.0
    B0: float = 0.0
    omega0f: float = 0.0
    trap_frequencies: tuple[float, float, float] = (0.0, 0.0, 0.0)
    mu: float = 0.0
    N: int = 1

    def __post_init__(self):
        if not self.d > 0:
            raise ValueError("d must be positive")
        if self.I < 0 or self.B0 < 0:
            raise ValueError("I and B0 must be non-negative")
        if self.N < 1:
            raise ValueError("N must be >= 1")


# ---------------------------------------------------------------------------
# units

_UNITS = MappingProxyType(
    {
        # length
        "m": ("length", 1.0),
        "mm": ("length", 1e-3),
        "um": ("length", 1e-6),
        "nm": ("length", 1e-9),
        # current
        "A": ("current", 1.0),
        "mA": ("current", 1e-3),
        "uA": ("current", 1e-6),
        # temperature, and energy expressed as a temperature
        "K": ("temperature", 1.0),
        "mK": ("temperature", 1e-3),
        "uK": ("temperature", 1e-6),
        "J": ("energy", 1.0),
        # field
        "T": ("field", 1.0),
        "G": ("field", 1e-4),
        "mG": ("field", 1e-7),
        # polarizability volume; C m^2/V is the SI polarizability
        "m3": ("polarizability", 1.0),
        "cm3": ("polarizability", 1e-6),
        "C m2/V": ("polarizability", 1.0 / (4 * math.pi * _sc.epsilon_0)),
        # time, frequency
        "s": ("time", 1.0),
        "ms": ("time", 1e-3),
        "Hz": ("frequency", 1.0),
        "kHz": ("frequency", 1e3),
        "MHz": ("frequency", 1e6),
        # resistivity
        "Ohm m": ("resistivity", 1.0),
        "uOhm cm": ("resistivity", 1e-8),
    }
)
_ALIASES = {"μm": "um", "μA": "uA", "μK": "uK", "µm": "um", "µA": "uA", "µK": "uK"}


def _lookup(unit: str) -> tuple[str, float]:
    unit = _ALIASES.get(unit, unit)
    try:
        return _UNITS[unit]
    except KeyError:
        raise ValueError(f"unsupported unit {unit!r}") from None


def convert_units(value, from_unit: str, to_unit: str):
    """Convert ``value`` between supported units.

    Temperatures convert to energies through ``kB`` (``1 uK -> kB * 1e-6 J``);
    every other pair must share a dimension.
    """
    dim_a, fa = _lookup(from_unit)
    dim_b, fb = _lookup(to_unit)
    value = np.asarray(value, dtype=float) if not np.isscalar(value) else float(value)
    if dim_a == dim_b:
        return value * (fa / fb)
    if {dim_a, dim_b} == {"temperature", "energy"}:
        if dim_a == "temperature":
            return value * fa * CONSTANTS.kB / fb
        return value * fa / CONSTANTS.kB / fb
    raise ValueError(f"cannot convert {from_unit!r} ({dim_a}) to {to_unit!r} ({dim_b})")
