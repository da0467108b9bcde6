"""Retarded Casimir-Polder attraction from a layered chip and a conducting wire.

Heights are measured from the top of the uppermost planar layer.  The wire
is modelled as a perfectly conducting cylinder of radius ``a = h/2`` lying
on that surface, its axis at height ``a``.  The total potential is the
pairwise-additive sum of the planar and cylinder terms.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .domain import CONSTANTS, LayerStack, PhysicsDomainError, WireGeometry

__all__ = [
    "RetardationWarning",
    "CpModel",
    "BarrierModification",
    "layer_factor",
    "cylinder_factor",
    "planar_cp",
    "cylinder_cp",
    "combined_cp",
    "cp_modified_barrier",
    "PAA_BIAS",
]

#: Known overestimate of the summed single-layer model versus the exact
#: Si + SiO2 bilayer result (fractional range), kept as metadata.
PAA_BIAS = (0.08, 0.15)

#: Heights below this are outside the retarded regime.
RETARDATION_LIMIT = 100e-9


class RetardationWarning(UserWarning):
    """Evaluation below ~100 nm, where the retarded long-distance form is unreliable."""


def _prefactor(alpha0: float) -> float:
    return CONSTANTS.hbar * CONSTANTS.c * alpha0 / (2 * math.pi)


def layer_factor(eps: float, phi: float = 1.0) -> float:
    """Single-layer limit ``F = (3/4) (eps - 1)/(eps + 1) phi``; ``eps = inf`` is a perfect conductor."""
    if eps < 1:
        raise ValueError("eps must be >= 1")
    ratio = 1.0 if math.isinf(eps) else (eps - 1) / (eps + 1)
    return 0.75 * ratio * phi


# seam of the cylinder factor: log asymptote below Q_LO, linear fit above Q_HI
_Q_LO, _Q_HI = 0.1, 0.2


def _f_log(q):
    return -2.0 / (3.0 * np.log(q))


def _f_lin(q):
    return 0.53 * q + 0.22


def _seam_slopes() -> tuple[float, float]:
    f0, f1 = _f_log(_Q_LO), _f_lin(_Q_HI)
    delta = (f1 - f0) / (_Q_HI - _Q_LO)
    d0 = 2.0 / (3.0 * _Q_LO * math.log(_Q_LO) ** 2)
    d1 = 0.53
    a, b = d0 / delta, d1 / delta
    if a * a + b * b > 9.0:  # Fritsch-Carlson monotonicity limiter
        tau = 3.0 / math.hypot(a, b)
        d0, d1 = tau * d0, tau * d1
    return d0, d1


_D0, _D1 = _seam_slopes()


def cylinder_factor(q):
    """Dimensionless factor ``F(a/R)`` of the conducting-cylinder potential.

    ``0.53 q + 0.22`` for ``q >= 0.2``, ``-2 / (3 ln q)`` for ``q <= 0.1`` and a
    monotone cubic Hermite bridge in between.
    """
    q = np.asarray(q, dtype=float)
    if np.any((q <= 0) | (q > 1)):
        raise ValueError("a/R must lie in (0, 1]")
    out = np.empty_like(q)
    lo = q <= _Q_LO
    hi = q >= _Q_HI
    mid = ~(lo | hi)
    out[lo] = _f_log(q[lo])
    out[hi] = _f_lin(q[hi])
    if np.any(mid):
        hstep = _Q_HI - _Q_LO
        t = (q[mid] - _Q_LO) / hstep
        h00 = 2 * t**3 - 3 * t**2 + 1
        h10 = t**3 - 2 * t**2 + t
        h01 = -2 * t**3 + 3 * t**2
        h11 = t**3 - t**2
        out[mid] = h00 * _f_log(_Q_LO) + h10 * hstep * _D0 + h01 * _f_lin(_Q_HI) + h11 * hstep * _D1
    return out if out.ndim else float(out)


def _check_height(zmin: float, warn: bool):
    if warn and zmin < RETARDATION_LIMIT:
        warnings.warn(
            f"Casimir-Polder evaluated {zmin * 1e9:.0f} nm from a surface; the retarded form "
            "assumed here needs distances well above 100 nm",
            RetardationWarning,
            stacklevel=3,
        )


def planar_cp(z, stack: LayerStack, alpha0: float, phi: float = 1.0, warn: bool = True):
    """Potential above a planar layer stack (J).

    Each layer contributes as if alone: a finite layer of thickness ``t``
    whose top lies a depth ``D`` below the reference plane gives
    ``-(hbar c alpha0 / 2 pi) F_eps [(z + D)^-4 - (z + D + t)^-4]`` and the
    semi-infinite bottom layer gives ``-(hbar c alpha0 / 2 pi) F_eps (z + D)^-4``.
    """
    z = np.asarray(z, dtype=float)
    if np.any(z <= 0):
        raise PhysicsDomainError("planar Casimir-Polder needs z > 0 (above the stack)")
    _check_height(float(np.min(z)), warn)
    C = _prefactor(alpha0)
    U = np.zeros_like(z)
    depth = 0.0
    for layer in stack.layers:
        F = layer_factor(layer.eps, phi)
        if layer.thickness is None:
            U -= C * F / (z + depth) ** 4
        else:
            U -= C * F * ((z + depth) ** -4.0 - (z + depth + layer.thickness) ** -4.0)
            depth += layer.thickness
    return U if U.ndim else float(U)


def cylinder_cp(R, a: float, alpha0: float, warn: bool = True):
    """Potential at distance ``R`` from the axis of a conducting cylinder of radius ``a`` (J).

    ``-(hbar c alpha0 / 2 pi) F(a/R) / (R - a)^4``.
    """
    R = np.asarray(R, dtype=float)
    if not a > 0:
        raise ValueError("cylinder radius must be positive")
    if np.any(R <= a):
        raise PhysicsDomainError("point lies inside the cylinder (R <= a)")
    _check_height(float(np.min(R)) - a, warn)
    U = -_prefactor(alpha0) * cylinder_factor(a / R) / (R - a) ** 4
    return U if np.ndim(U) else float(U)


def combined_cp(x, y, z, geom: WireGeometry, stack: LayerStack, alpha0: float, warn: bool = True):
    """Planar plus cylinder potential at lab position ``(x, y, z)`` (J).

    The infinite wire runs along x, so ``x`` does not enter.
    """
    del x
    a = geom.radius
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    inside_wire = (np.abs(y) <= geom.w / 2) & (z <= geom.h)
    if np.any(inside_wire) or np.any(z <= 0):
        raise PhysicsDomainError("position lies inside the chip or the wire")
    R = np.hypot(y, z - a)
    return planar_cp(z, stack, alpha0, warn=warn) + cylinder_cp(R, a, alpha0, warn=warn)


@dataclass(frozen=True)
class CpModel:
    """Switchable sum of surface and wire attraction.

    Parameters
    ----------
    geom : WireGeometry
    stack : LayerStack
    alpha0 : float
        Polarizability volume (m^3).
    surface, wire : bool
        Which contributions to include.
    scale : float
        Overall multiplier (used for sensitivity studies).
    """

    geom: WireGeometry
    stack: LayerStack
    alpha0: float
    surface: bool = True
    wire: bool = True
    scale: float = 1.0
    metadata: dict = field(default_factory=lambda: {"paa_bias": PAA_BIAS})

    def __call__(self, y, z):
        y = np.asarray(y, dtype=float)
        z = np.asarray(z, dtype=float)
        U = np.zeros(np.broadcast(y, z).shape)
        if self.scale == 0 or self.alpha0 == 0:
            return U
        if self.surface:
            U = U + planar_cp(z, self.stack, self.alpha0, warn=False)
        if self.wire:
            a = self.geom.radius
            U = U + cylinder_cp(np.hypot(y, z - a), a, self.alpha0, warn=False)
        return self.scale * U

    def calF(self, z, y: float = 0.0):
        """``-U (2 pi / hbar c alpha0) z^4`` along a vertical line."""
        z = np.asarray(z, dtype=float)
        return -self(y, z) * z**4 / _prefactor(self.alpha0)


@dataclass(frozen=True)
class BarrierModification:
    z: np.ndarray
    U: np.ndarray
    height: float
    turning_points: tuple[float, ...]
    survives: bool


def cp_modified_barrier(z, magnetic, cp, energy: float) -> BarrierModification:
    """Add an attraction to a magnetic potential sampled along a line towards the chip.

    Parameters
    ----------
    z : array_like
        Increasing heights (m).
    magnetic : array_like
        Magnetic potential at ``z`` (J).
    cp : array_like or callable
        Attraction at ``z`` (J), or a callable of ``z``.
    energy : float
        Atom energy (J) used for the turning points and the survival test.

    Returns
    -------
    BarrierModification
        ``height`` is the maximum of the summed potential between the chip
        and the magnetic trap minimum; ``survives`` tells whether it exceeds
        ``energy``; turning points are the crossings of ``energy`` around it.
    """
    z = np.asarray(z, dtype=float)
    Um = np.asarray(magnetic, dtype=float)
    Uc = np.asarray(cp(z) if callable(cp) else cp, dtype=float)
    U = Um + Uc
    itrap = int(np.argmin(Um))
    ibar = int(np.argmax(U[: itrap + 1]))
    height = float(U[ibar])
    survives = height > energy
    tps: tuple[float, ...] = ()
    if survives:
        lo = np.flatnonzero(U[:ibar] <= energy)
        hi = np.flatnonzero(U[ibar:itrap + 1] <= energy)
        pts = []
        if lo.size:
            i = lo[-1]
            pts.append(float(np.interp(energy, [U[i], U[i + 1]], [z[i], z[i + 1]])))
        if hi.size:
            i = ibar + hi[0]
            pts.append(float(np.interp(energy, [U[i], U[i - 1]], [z[i], z[i - 1]])))
        tps = tuple(pts)
    return BarrierModification(z, U, height, tps, survives)
