"""Side-guide microtrap above a thin wire on a layered chip.

The wire runs along x with its center at ``(y, z) = (0, h/2)``; ``z = 0`` is
the top of the planar stack.  A uniform bias along y cancels the wire field
at height ``d``, a uniform Ioffe field ``B0`` along x lifts the minimum, and
the axial confinement is a fixed harmonic term.  Gravity is neglected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .casimir_polder import CpModel
from .domain import CONSTANTS, RB87, SI_SIO2_STACK, AtomSpecies, LayerStack, TrapContext, WireGeometry
from .tunneling import SurfaceTunneling, surface_tunneling_rate, thomas_fermi_density

__all__ = ["SideGuideTrap", "RB87_SCATTERING_LENGTH", "CP_MODES", "MAJORANA_REFERENCE_LIFETIME"]

#: s-wave scattering length of Rb-87 in |2,2> (about 99 Bohr radii).
RB87_SCATTERING_LENGTH = 5.24e-9

#: Fixed reference lifetime drawn alongside tunneling curves (s).
MAJORANA_REFERENCE_LIFETIME = 2.0

CP_MODES = ("none", "wire", "surface", "combined")


@dataclass(frozen=True)
class SideGuideTrap:
    """Wire-plus-bias trap at height ``d`` above the chip surface.

    Parameters
    ----------
    d : float
        Trap height above the top of the planar stack (m).
    I : float
        Wire current (A).
    geom : WireGeometry
        Wire cross-section; ``w >= h`` is required so the CP cylinder stays
        inside the rectangular footprint.
    B0 : float
        Ioffe field at the trap bottom (T).
    omega_axial : float
        Axial angular frequency (rad/s).
    cp_mode : str
        One of ``"none"``, ``"wire"``, ``"surface"``, ``"combined"``.
    cp_scale : float
        Multiplier on the attraction.
    """

    d: float
    I: float
    geom: WireGeometry
    B0: float
    omega_axial: float
    cp_mode: str = "combined"
    cp_scale: float = 1.0
    stack: LayerStack = SI_SIO2_STACK
    species: AtomSpecies = RB87

    def __post_init__(self):
        if self.geom.w < self.geom.h:
            raise ValueError("the trap model needs w >= h")
        if not self.d > self.geom.h:
            raise ValueError("the trap must sit above the wire top")
        if not (self.I > 0 and self.B0 > 0 and self.omega_axial > 0):
            raise ValueError("I, B0 and omega_axial must be positive")
        if self.cp_mode not in CP_MODES:
            raise ValueError(f"cp_mode must be one of {CP_MODES}")

    @property
    def r0(self) -> float:
        """Distance from the wire axis to the trap center."""
        return self.d - self.geom.h / 2

    @property
    def bias(self) -> float:
        return CONSTANTS.mu0 * self.I / (2 * math.pi * self.r0)

    @property
    def gradient(self) -> float:
        return CONSTANTS.mu0 * self.I / (2 * math.pi * self.r0**2)

    def frequencies(self) -> tuple[float, float, float]:
        """Harmonic frequencies (x, y, z) at the trap center (rad/s)."""
        w_perp = self.gradient * math.sqrt(self.species.muA / (self.species.mass * self.B0))
        return (self.omega_axial, w_perp, w_perp)

    def cp_model(self) -> CpModel | None:
        if self.cp_mode == "none":
            return None
        return CpModel(
            self.geom,
            self.stack,
            self.species.alpha0,
            surface=self.cp_mode in ("surface", "combined"),
            wire=self.cp_mode in ("wire", "combined"),
            scale=self.cp_scale,
        )

    def magnetic(self, x, y, z):
        """Zeeman energy plus axial confinement (J)."""
        y = np.asarray(y, dtype=float)
        zc = np.asarray(z, dtype=float) - self.geom.h / 2
        r2 = y * y + zc * zc
        k = CONSTANTS.mu0 * self.I / (2 * math.pi)
        By = self.bias - k * zc / r2
        Bz = k * y / r2
        B = np.sqrt(self.B0**2 + By**2 + Bz**2)
        m = self.species.mass
        return self.species.muA * B + 0.5 * m * self.omega_axial**2 * np.asarray(x, dtype=float) ** 2

    def potential(self, x, y, z):
        U = self.magnetic(x, y, z)
        cp = self.cp_model()
        if cp is not None:
            U = U + cp(y, z)
        return U

    def floor(self, y: float) -> float:
        """Height of the material below lateral position ``y``."""
        return self.geom.h if abs(y) <= self.geom.w / 2 else 0.0

    def context(self, N: int) -> TrapContext:
        return TrapContext(d=self.d, I=self.I, B0=self.B0, trap_frequencies=self.frequencies(), N=N)

    def tunneling(self, N: int = 1000, scattering_length: float = RB87_SCATTERING_LENGTH,
                  **kwargs) -> SurfaceTunneling:
        """Loss rate of an ``N``-atom cloud to the chip by tunneling."""
        density = thomas_fermi_density(self.context(N), self.species, scattering_length)
        return surface_tunneling_rate(self.potential, density, self.floor, **kwargs)
