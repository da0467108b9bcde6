"""Potential corrugation from wire-edge roughness.

Spectral conventions
--------------------
An edge profile is stored by its positive-k coefficients ``c_k`` on the grid
``k_n = 2 pi n / L``, ``n = 1 .. floor(L / lambda_min)``.  The real profile
is the conjugate-symmetric synthesis ``f(x) = 2 Re sum_k c_k exp(i k x)``.
``RoughnessModel.rms`` is the one-sided sum ``sqrt(sum |c_k|^2)``, which is
the ``delta y_c^rms`` entering the analytic rms law; the spatial rms of the
synthesized profile is ``sqrt(2)`` times larger.

The field amplitude per mode is ``(i I mu0 / 2 pi) k |k| c_k K1(|k| z)``.
Writing ``k |k|`` rather than ``k^2`` keeps the synthesized field real for
the negative-k partners; for ``k > 0`` the two agree.  Heights ``z`` are
measured from the wire center.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma

from . import kernels
from .domain import CONSTANTS, WireGeometry
from .magnetostatics import bessel_K1

__all__ = [
    "RoughnessModel",
    "CorrugationSpectrum",
    "synth_roughness",
    "current_response",
    "delta_b_spectrum",
    "corrugation_rms",
    "rms_prefactor",
    "biot_savart_oracle",
]


@dataclass(frozen=True)
class RoughnessModel:
    """Power-law edge roughness ``c_k = dy0 (k0/k)^alpha exp(i phi_k)``.

    Attributes
    ----------
    delta_y0 : float
        Amplitude at the reference wavevector ``k0`` (m).
    k0 : float
    alpha : float
        Spectral exponent, 0 (white) to 1 (1/f).
    L : float
        Length of the sampled wire; sets the grid spacing ``2 pi / L``.
    lambda_min : float
        Shortest wavelength kept.
    phases : ndarray
        Phase of each mode of the wire-center displacement.
    anti_phases : ndarray or None
        Phases of an optional width modulation ``(dy+ - dy-)/2`` with the same
        amplitude spectrum scaled by ``anti_fraction``.
    anti_fraction : float
    """

    delta_y0: float
    k0: float
    alpha: float
    L: float
    lambda_min: float
    phases: np.ndarray
    anti_phases: np.ndarray | None = None
    anti_fraction: float = 0.0
    sym_fraction: float = 1.0
    _k: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 0 <= self.alpha <= 1:
            raise ValueError("alpha must lie in [0, 1]")
        if not (self.L > 0 and 0 < self.lambda_min):
            raise ValueError("L and lambda_min must be positive")
        n = int(math.floor(self.L / self.lambda_min * (1 + 1e-12)))
        if n < 1:
            raise ValueError("empty k grid: lambda_min must not exceed L")
        object.__setattr__(self, "_k", 2 * math.pi / self.L * np.arange(1, n + 1))
        if len(self.phases) != n:
            raise ValueError(f"expected {n} phases, got {len(self.phases)}")
        if self.anti_phases is not None and len(self.anti_phases) != n:
            raise ValueError("anti_phases must match the k grid")

    @property
    def k(self) -> np.ndarray:
        return self._k

    @property
    def amplitudes(self) -> np.ndarray:
        """``|c_k|`` of the wire-center displacement."""
        return self.sym_fraction * self.delta_y0 * (self.k0 / self.k) ** self.alpha

    @property
    def rms(self) -> float:
        """One-sided rms ``sqrt(sum |c_k|^2)`` (m)."""
        return float(np.sqrt(np.sum(self.amplitudes**2)))

    def coefficients(self) -> np.ndarray:
        """Complex ``c_k`` of the wire center ``(dy+ + dy-)/2``."""
        return self.amplitudes * np.exp(1j * np.asarray(self.phases))

    def anti_coefficients(self) -> np.ndarray:
        """Complex coefficients of the half-width modulation ``(dy+ - dy-)/2``."""
        if self.anti_phases is None or self.anti_fraction == 0:
            return np.zeros(len(self.k), dtype=complex)
        amp = self.anti_fraction * self.delta_y0 * (self.k0 / self.k) ** self.alpha
        return amp * np.exp(1j * np.asarray(self.anti_phases))

    def _synth(self, coeffs, x, derivative=False):
        x = np.asarray(x, dtype=float)
        c = coeffs * (1j * self.k if derivative else 1.0)
        return 2 * np.real(np.exp(1j * np.multiply.outer(x, self.k)) @ c)

    def center(self, x) -> np.ndarray:
        """Wire-center displacement ``dy_c(x)`` (m)."""
        return self._synth(self.coefficients(), x)

    def edges(self, x) -> tuple[np.ndarray, np.ndarray]:
        """Edge displacements ``(dy+, dy-)`` (m)."""
        c = self.center(x)
        a = self._synth(self.anti_coefficients(), x)
        return c + a, c - a

    @classmethod
    def single_mode(cls, amplitude: float, wavelength: float, phase: float = 0.0,
                    anti_amplitude: float = 0.0, anti_phase: float = 0.0) -> "RoughnessModel":
        """One sinusoidal mode ``dy_c = 2 amplitude cos(k x + phase)``.

        ``anti_amplitude`` adds a width modulation of the same wavelength.
        """
        k = 2 * math.pi / wavelength
        ref = amplitude if amplitude > 0 else anti_amplitude
        return cls(
            delta_y0=ref,
            k0=k,
            alpha=0.0,
            L=wavelength,
            lambda_min=wavelength,
            phases=np.array([phase]),
            anti_phases=np.array([anti_phase]),
            anti_fraction=anti_amplitude / ref if ref else 0.0,
            sym_fraction=amplitude / ref if ref else 0.0,
        )


def synth_roughness(rms_target: float, alpha: float, L: float, lambda_min: float,
                    seed: int | None = 0, k0: float | None = None) -> RoughnessModel:
    """Random-phase power-law roughness scaled to a given one-sided rms.

    Parameters
    ----------
    rms_target : float
        Desired ``sqrt(sum |c_k|^2)`` (m).
    alpha : float
        Spectral exponent in [0, 1].
    L, lambda_min : float
        Wire length and shortest wavelength (m).
    seed : int, optional
        Seed for ``numpy.random.default_rng``.
    k0 : float, optional
        Reference wavevector; defaults to the first grid mode ``2 pi / L``.
    """
    if rms_target < 0:
        raise ValueError("rms_target must be non-negative")
    if lambda_min >= L:
        raise ValueError("empty k grid: lambda_min must be smaller than L")
    n = int(math.floor(L / lambda_min * (1 + 1e-12)))
    k = 2 * math.pi / L * np.arange(1, n + 1)
    kref = k[0] if k0 is None else k0
    shape = (kref / k) ** alpha
    dy0 = rms_target / math.sqrt(float(np.sum(shape**2)))
    phases = np.random.default_rng(seed).uniform(0.0, 2 * math.pi, n)
    return RoughnessModel(dy0, kref, alpha, L, lambda_min, phases)


# ---------------------------------------------------------------------------
# transverse current


def _cosh_ratio(k, y, w):
    """``cosh(k y) / cosh(k w / 2)`` evaluated without overflow."""
    ak = np.abs(k)
    ay = np.abs(y)
    return np.exp(ak * (ay - w / 2)) * (1 + np.exp(-2 * ak * ay)) / (1 + np.exp(-ak * w))


def _sinh_ratio(k, y, w):
    """``sinh(k y) / sinh(k w / 2)``, tending to ``2 y / w`` as ``k -> 0``."""
    ak = np.abs(k)
    ay = np.abs(y)
    small = ak * w < 1e-6
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        big = np.exp(ak * (ay - w / 2)) * (-np.expm1(-2 * ak * ay)) / (-np.expm1(-ak * w))
    out = np.where(small, 2 * ay / w, big)
    return np.sign(y) * out


def current_response(roughness: RoughnessModel, geom: WireGeometry, x, y, I: float = 1.0,
                     part: str = "sym") -> np.ndarray:
    """Transverse current density ``dJ_y(x, y)`` (A/m^2) induced by edge roughness.

    The symmetric part ``i J0 k c_k cosh(k y)/cosh(k w/2)`` comes from the
    wire-center meander; the antisymmetric part ``i J0 k a_k sinh(k y)/sinh(k w/2)``
    comes from width modulation ``a_k``.  Both follow the edges exactly at
    ``y = +-w/2``.

    Parameters
    ----------
    x, y : array_like
        Broadcastable positions (m); ``y`` from the wire axis.
    I : float
        Total current; ``J0 = I / (w h)``.
    part : {"sym", "anti", "full"}
    """
    if part not in ("sym", "anti", "full"):
        raise ValueError("part must be 'sym', 'anti' or 'full'")
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    J0 = I / (geom.w * geom.h)
    k = roughness.k
    phase = np.exp(1j * np.multiply.outer(x, k))
    out = np.zeros(x.shape)
    if part in ("sym", "full"):
        prof = _cosh_ratio(k, y[..., None], geom.w)
        out += 2 * np.real(np.sum(1j * J0 * k * roughness.coefficients() * prof * phase, axis=-1))
    if part in ("anti", "full"):
        prof = _sinh_ratio(k, y[..., None], geom.w)
        out += 2 * np.real(np.sum(1j * J0 * k * roughness.anti_coefficients() * prof * phase, axis=-1))
    return out


# ---------------------------------------------------------------------------
# field spectrum


@dataclass(frozen=True)
class CorrugationSpectrum:
    """Field corrugation above the wire center at height ``z``.

    Attributes
    ----------
    k : ndarray
        Positive wavevectors (1/m).
    amplitudes : ndarray
        Complex one-sided ``dB_x(k)`` (T).
    x : ndarray
        Uniform samples over one period (m).
    field : ndarray
        Real ``dB_x(x)`` (T).
    B0 : float
        Unperturbed wire field ``mu0 I / 2 pi z`` (T).
    """

    k: np.ndarray
    amplitudes: np.ndarray
    x: np.ndarray
    field: np.ndarray
    B0: float

    @property
    def relative(self) -> np.ndarray:
        return self.field / self.B0

    @property
    def spectral_rms(self) -> float:
        """``sqrt(2 sum |dB_k|^2)``, the spatial rms of the synthesized field."""
        return float(np.sqrt(2 * np.sum(np.abs(self.amplitudes) ** 2)))

    @property
    def spatial_rms(self) -> float:
        return float(np.sqrt(np.mean(self.field**2)))

    def evaluate(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return 2 * np.real(np.exp(1j * np.multiply.outer(x, self.k)) @ self.amplitudes)


def delta_b_spectrum(roughness: RoughnessModel, I: float, z: float) -> CorrugationSpectrum:
    """Field corrugation ``dB_x`` along the wire at height ``z`` above its center.

    Parameters
    ----------
    roughness : RoughnessModel
    I : float
        Wire current (A).
    z : float
        Height above the wire center (m).
    """
    if not z > 0:
        raise ValueError("z must be positive")
    k = roughness.k
    amps = 1j * I * CONSTANTS.mu0 / (2 * math.pi) * k * np.abs(k) * roughness.coefficients() * bessel_K1(k * z)
    n = len(k)
    M = 1 << max(6, int(math.ceil(math.log2(4 * n + 2))))
    spec = np.zeros(M // 2 + 1, dtype=complex)
    spec[1:n + 1] = M * amps
    x = np.arange(M) * roughness.L / M
    field_x = np.fft.irfft(spec, n=M)
    B0 = CONSTANTS.mu0 * I / (2 * math.pi * z) if I else 1.0
    return CorrugationSpectrum(k, amps, x, field_x, B0)


def rms_prefactor(roughness: RoughnessModel) -> float:
    """``A(alpha)`` of the rms law, using the exact finite sum over the grid."""
    a = roughness.alpha
    s = float(np.sum(roughness.k ** (-2 * a)))
    return math.sqrt((roughness.L / math.pi) / s * (1 + math.pi / 4 * (3 - 2 * a)) * gamma(3 - 2 * a))


def corrugation_rms(roughness: RoughnessModel, z: float) -> float:
    """Relative field roughness ``dB_rms / B0 = A(alpha) dy_rms / (2 z)^(3/2 - alpha)``.

    Warns when ``z >= L / 10``, where the sum-to-integral step behind the law
    is no longer accurate.
    """
    if not z > 0:
        raise ValueError("z must be positive")
    if z >= roughness.L / 10:
        warnings.warn(
            f"z = {z:.3g} m is not small compared with the wire length {roughness.L:.3g} m",
            RuntimeWarning,
            stacklevel=2,
        )
    if roughness.rms == 0:
        return 0.0
    return rms_prefactor(roughness) * roughness.rms / (2 * z) ** (1.5 - roughness.alpha)


# ---------------------------------------------------------------------------
# direct Biot-Savart integration


def biot_savart_oracle(roughness: RoughnessModel, geom: WireGeometry, I: float, z: float,
                       x_obs, cells_per_wavelength: int = 32, extent: float | None = None,
                       ny: int = 8, nz: int = 4, part: str = "full") -> np.ndarray:
    """``dB_x`` at ``(x_obs, 0, z)`` by direct volume integration of the transverse current.

    The wire cross-section between the displaced edges ``dy-(x)`` and
    ``dy+(x)`` is sampled with Gauss-Legendre nodes (``ny`` across,
    ``nz`` through the thickness) and midpoint cells along x, and
    ``mu0/4pi int dJ_y (z - z') / R^3 dV`` is summed.

    Parameters
    ----------
    roughness : RoughnessModel
        Supplies both the edges and the current via :func:`current_response`.
    z : float
        Observation height above the wire center (m).
    x_obs : array_like
        Observation positions along the wire (m).
    cells_per_wavelength : int
        Cells per shortest wavelength; fewer than 8 is rejected.
    extent : float, optional
        Half-length of the integrated segment beyond the observation range;
        defaults to ``50 z``.

    Raises
    ------
    ValueError
        If the grid under-resolves the shortest wavelength.
    """
    if cells_per_wavelength < 8:
        raise ValueError("the grid must resolve the shortest wavelength with >= 8 cells")
    x_obs = np.atleast_1d(np.asarray(x_obs, dtype=float))
    X = 50 * z if extent is None else extent
    lam = 2 * math.pi / roughness.k.max()
    dx = lam / cells_per_wavelength
    lo, hi = x_obs.min() - X, x_obs.max() + X
    ncell = int(math.ceil((hi - lo) / dx))
    xs = lo + (np.arange(ncell) + 0.5) * (hi - lo) / ncell
    wx = np.full(ncell, (hi - lo) / ncell)
    gy, gwy = np.polynomial.legendre.leggauss(ny)
    gz, gwz = np.polynomial.legendre.leggauss(nz)
    up, dn = roughness.edges(xs)
    top = geom.w / 2 + up
    bot = -geom.w / 2 + dn
    half = 0.5 * (top - bot)
    mid = 0.5 * (top + bot)
    ys = mid[:, None] + half[:, None] * gy[None, :]
    wy = half[:, None] * gwy[None, :]
    zs = 0.5 * geom.h * gz
    wz = 0.5 * geom.h * gwz
    jy = current_response(roughness, geom, xs[:, None], ys, I, part=part)
    total = kernels.transverse_field(
        x_obs, float(z), xs, wx, np.ascontiguousarray(ys), np.ascontiguousarray(wy), zs, wz,
        np.ascontiguousarray(jy),
    )
    return CONSTANTS.mu0 / (4 * math.pi) * total
