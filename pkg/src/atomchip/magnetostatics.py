"""Closed-form wire potentials: crossing-wire barrier and snake-wire lattice.

Also home of the order-0 and order-1 modified Bessel functions of the
second kind used by the lattice and corrugation formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domain import CONSTANTS, AtomSpecies, TrapContext

__all__ = [
    "BarrierProfile",
    "LatticeSpec",
    "x_wire_barrier",
    "barrier_profile",
    "bessel_K0",
    "bessel_K1",
    "lattice_amplitude",
    "lattice_trap_frequency",
]

_EULER = 0.57721566490153286061
_EPS = 1e-16


# ---------------------------------------------------------------------------
# modified Bessel functions K0, K1


def _k01_series(x: float) -> tuple[float, float]:
    """Power series for (K0, K1), accurate for 0 < x < 2."""
    q = 0.25 * x * x
    lnx2 = math.log(0.5 * x)
    # K0 = -(ln(x/2) + gamma) I0 + sum H_k q^k / (k!)^2
    # K1 = 1/x + ln(x/2) I1 - (x/4) sum (psi(k+1) + psi(k+2)) q^k / (k!(k+1)!)
    term0 = 1.0  # q^k / (k!)^2
    term1 = 1.0  # q^k / (k!(k+1)!)
    harm = 0.0  # H_k
    i0 = s0 = i1 = s1 = 0.0
    for k in range(200):
        if k > 0:
            term0 *= q / (k * k)
            term1 *= q / (k * (k + 1))
            harm += 1.0 / k
        psi1 = -_EULER + harm
        psi2 = psi1 + 1.0 / (k + 1)
        i0 += term0
        s0 += harm * term0
        i1 += term1
        s1 += (psi1 + psi2) * term1
        if term0 < _EPS * i0 and term1 < _EPS * i1:
            break
    k0 = -(lnx2 + _EULER) * i0 + s0
    k1 = 1.0 / x + lnx2 * (0.5 * x * i1) - 0.25 * x * s1
    return k0, k1


def _k01_steed(x: float) -> tuple[float, float]:
    """Steed's continued fraction (Temme's normalization) for x >= 2."""
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = delh = d
    q1, q2 = 0.0, 1.0
    a1 = 0.25
    q = c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, 100000):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1, q2 = q2, qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < _EPS:
            break
    else:  # pragma: no cover - converges in < 100 terms for x >= 2
        raise ArithmeticError("K1 continued fraction failed to converge")
    h = a1 * h
    k0 = math.sqrt(math.pi / (2.0 * x)) * math.exp(-x) / s
    k1 = k0 * (x + 0.5 - h) / x
    return k0, k1


def _k01(x: float) -> tuple[float, float]:
    x = float(x)
    if not x > 0 or math.isnan(x):
        raise ValueError(f"modified Bessel K needs a positive argument, got {x}")
    if math.isinf(x):
        return 0.0, 0.0
    return _k01_series(x) if x < 2.0 else _k01_steed(x)


def _apply(fn, u):
    if np.ndim(u) == 0:
        return fn(u)
    arr = np.asarray(u, dtype=float)
    return np.fromiter((fn(v) for v in arr.ravel()), float, arr.size).reshape(arr.shape)


def bessel_K1(u):
    """Modified Bessel function of the second kind, order one.

    Series expansion below ``u = 2`` and Steed's continued fraction above,
    both accurate to a few ulp over ``[1e-4, 700]``.

    Parameters
    ----------
    u : float or array_like
        Strictly positive argument.

    Raises
    ------
    ValueError
        If any ``u <= 0``.
    """
    return _apply(lambda v: _k01(v)[1], u)


def bessel_K0(u):
    """Modified Bessel function of the second kind, order zero."""
    return _apply(lambda v: _k01(v)[0], u)


# ---------------------------------------------------------------------------
# crossing-wire barrier


@dataclass(frozen=True)
class BarrierProfile:
    """Sampled crossing-wire barrier ``V(x)`` at height ``z``."""

    x: np.ndarray
    V: np.ndarray
    z: float
    I: float
    B0: float
    muA: float

    @property
    def height(self) -> float:
        """Barrier excess above the guide bottom ``muA * B0`` (J)."""
        return self.muA * CONSTANTS.mu0 * self.I / (2 * math.pi * self.z)

    @property
    def full_width_half_max(self) -> float:
        """The Lorentzian excess has FWHM ``2 z``."""
        return 2.0 * self.z


def x_wire_barrier(x, ctx: TrapContext, species: AtomSpecies):
    """Potential along a guide crossed by a current-carrying wire a height ``ctx.d`` below.

    ``V(x) = muA B0 + (muA mu0 I / 2 pi) z / (z^2 + x^2)`` with ``z = ctx.d``.

    Parameters
    ----------
    x : float or array_like
        Position along the guide (m), measured from the crossing point.
    ctx : TrapContext
        Uses ``d`` (height), ``I`` (crossing-wire current) and ``B0``.
    species : AtomSpecies

    Returns
    -------
    float or ndarray
        Potential energy in J.
    """
    z = ctx.d
    if not z > 0:
        raise ValueError("the crossing wire must sit a positive distance below the guide")
    muA = species.muA
    x = np.asarray(x, dtype=float) if np.ndim(x) else float(x)
    return muA * ctx.B0 + muA * CONSTANTS.mu0 * ctx.I / (2 * math.pi) * z / (z * z + x * x)


def barrier_profile(x, ctx: TrapContext, species: AtomSpecies) -> BarrierProfile:
    x = np.asarray(x, dtype=float)
    return BarrierProfile(x, x_wire_barrier(x, ctx, species), ctx.d, ctx.I, ctx.B0, species.muA)


# ---------------------------------------------------------------------------
# snake-wire lattice


@dataclass(frozen=True)
class LatticeSpec:
    """Sinusoidally bent wire: period ``wavelength``, center displacement amplitude ``delta_y``.

    Parameters
    ----------
    wavelength : float
        Lattice period along the wire (m).
    delta_y : float
        Amplitude of the wire-center meander (m); must stay below a tenth of
        the period for the first-order field expansion to hold.
    I : float
        Wire current (A).
    z : float
        Atom height above the wire (m).
    """

    wavelength: float
    delta_y: float
    I: float
    z: float

    def __post_init__(self):
        if not self.wavelength > 0:
            raise ValueError("wavelength must be positive")
        if self.delta_y < 0 or self.I < 0:
            raise ValueError("delta_y and I must be non-negative")
        if not self.z > 0:
            raise ValueError("z must be positive")
        if self.delta_y >= 0.1 * self.wavelength:
            raise ValueError("meander amplitude must be < wavelength / 10")

    @property
    def k(self) -> float:
        return 2 * math.pi / self.wavelength


def lattice_amplitude(spec: LatticeSpec, species: AtomSpecies) -> float:
    """Lattice depth ``V0 = muA mu0 I k^2 delta_y K1(k z)`` (J).

    The potential along the wire is ``V0 cos(k x)``.
    """
    if spec.delta_y == 0 or spec.I == 0:
        return 0.0
    k = spec.k
    return species.muA * CONSTANTS.mu0 * spec.I * k * k * spec.delta_y * bessel_K1(k * spec.z)


def lattice_trap_frequency(spec: LatticeSpec, species: AtomSpecies) -> float:
    """Longitudinal angular frequency ``sqrt(V0 k^2 / m)`` of one lattice site."""
    V0 = lattice_amplitude(spec, species)
    if not V0 > 0:
        raise ValueError("lattice depth is zero: the bent wire does not trap")
    return math.sqrt(V0 * spec.k**2 / species.mass)
