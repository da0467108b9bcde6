"""Thermal (Johnson) magnetic noise above a rectangular, possibly anisotropic wire.

Positions are Cartesian ``(x, y, z)`` relative to the wire center, with the
wire along x, its width along y and its thickness along z.  The quantization
axis of the trapped atom is x (the Ioffe field of a side guide), so noise
along x dephases and noise along y, z flips spins.

The two-point noise tensor in the quasi-static, high-temperature limit is

    S_ij(x1, x2) = kB T mu0^2 / (4 pi^2) * B_ij,
    B_ij = eps_ilm eps_jnp sigma_mp X_ln,
    X_ij = 1/2 int_V (x1 - x')_i (x2 - x')_j / (|x1 - x'|^3 |x2 - x'|^3) dx',

with ``S`` the two-sided spectral density (T^2 s), so that a golden-rule
rate is ``mu^2 S / hbar^2``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from . import kernels
from .domain import (
    CONSTANTS,
    RHO_AU_300K,
    AtomSpecies,
    ConductivityTensor,
    PhysicsDomainError,
    TrapContext,
    WireGeometry,
    magnetic_moment,
)

__all__ = [
    "GeometryFactors",
    "NoiseSpectrum",
    "RateReport",
    "QuasiStaticWarning",
    "geometry_factors",
    "b_tensor",
    "y_tilde",
    "power_spectrum",
    "spin_flip_rate",
    "spin_decoherence_rate",
    "spatial_decoherence_rate",
    "heating_rate",
    "suppression_ratio",
    "skin_depth",
    "bloch_gruneisen",
    "alloy_noise_ratio",
    "gate_ops_figure_of_merit",
    "rate_report",
    "trap_center",
]

_LEVI = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    _LEVI[_i, _j, _k] = 1.0
    _LEVI[_i, _k, _j] = -1.0


class QuasiStaticWarning(UserWarning):
    """The skin depth is not much larger than the trap height and wire thickness."""


# ---------------------------------------------------------------------------
# geometry factors


@dataclass(frozen=True)
class GeometryFactors:
    """Geometry tensor ``X_ij`` (1/m) for a pair of points and a wire volume."""

    X: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    geom: WireGeometry
    error: float = 0.0
    extent: float = 0.0

    @property
    def Xxx(self) -> float:
        return float(self.X[0, 0])

    @property
    def Xyy(self) -> float:
        return float(self.X[1, 1])

    @property
    def Xzz(self) -> float:
        return float(self.X[2, 2])

    @property
    def diagonal(self) -> np.ndarray:
        return np.diag(self.X).copy()


def _graded_breaks(lo: float, hi: float, foci, gap: float) -> np.ndarray:
    """Panel boundaries on [lo, hi] that double in size away from each focus."""
    pts = [lo, hi]
    span = hi - lo
    for f in foci:
        f = min(max(f, lo), hi)
        pts.append(f)
        step = gap
        while step < 2 * span:
            pts.extend((f - step, f + step))
            step *= 2
    b = np.unique(np.clip(pts, lo, hi))
    return b[np.concatenate([[True], np.diff(b) > 1e-12 * max(span, gap)])]


def _nodes(breaks: np.ndarray, order: int):
    t, w = np.polynomial.legendre.leggauss(order)
    a, b = breaks[:-1, None], breaks[1:, None]
    half = 0.5 * (b - a)
    xs = (a + half * (t[None, :] + 1)).ravel()
    ws = (half * w[None, :]).ravel()
    return np.ascontiguousarray(xs), np.ascontiguousarray(ws)


def _refine(breaks: np.ndarray) -> np.ndarray:
    mids = 0.5 * (breaks[:-1] + breaks[1:])
    return np.sort(np.concatenate([breaks, mids]))


def geometry_factors(p1, p2, geom: WireGeometry, rtol: float = 1e-6, extent: float | None = None,
                     max_refine: int = 4) -> GeometryFactors:
    """Geometry tensor ``X_ij`` between two points outside the wire.

    The box is integrated with tensor-product Gauss-Legendre rules on panels
    graded geometrically around the projections of the two points.  The
    estimate of orders 8 and 12 are compared and the panels are halved until
    they agree to ``rtol`` relative to the largest diagonal element.

    Parameters
    ----------
    p1, p2 : array_like
        Points relative to the wire center (m).
    geom : WireGeometry
    rtol : float
        Target relative accuracy.
    extent : float, optional
        Half-length of the integrated wire segment around the points.
        Defaults to ``min(L/2, max(100 g, 10 w))`` with ``g`` the smaller
        point-to-wire distance; the neglected tails scale as ``(g/extent)^3``.
    """
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    g1, g2 = geom.gap(p1), geom.gap(p2)
    if g1 <= 0 or g2 <= 0:
        raise PhysicsDomainError("geometry factors need both points outside the conductor")
    gap = min(g1, g2)
    xc = 0.5 * (p1[0] + p2[0])
    half_len = extent if extent is not None else min(geom.L / 2, max(100 * gap, 10 * geom.w))
    xlo, xhi = max(-geom.L / 2, xc - half_len), min(geom.L / 2, xc + half_len)
    bx = _graded_breaks(xlo, xhi, (p1[0], p2[0]), gap)
    by = _graded_breaks(-geom.w / 2, geom.w / 2, (p1[1], p2[1]), gap)
    bz = _graded_breaks(-geom.h / 2, geom.h / 2, (p1[2], p2[2]), gap)
    err = math.inf
    X = None
    for _ in range(max_refine + 1):
        lo = kernels.geometry_tensor(p1, p2, *_nodes(bx, 8), *_nodes(by, 8), *_nodes(bz, 8))
        X = kernels.geometry_tensor(p1, p2, *_nodes(bx, 12), *_nodes(by, 12), *_nodes(bz, 12))
        scale = np.max(np.abs(np.diag(X)))
        err = float(np.max(np.abs(X - lo)) / scale) if scale > 0 else 0.0
        if err < rtol:
            break
        bx, by, bz = _refine(bx), _refine(by), _refine(bz)
    return GeometryFactors(X, p1, p2, geom, err, half_len)


# ---------------------------------------------------------------------------
# spectra


def b_tensor(sigma: ConductivityTensor, X: GeometryFactors) -> np.ndarray:
    """``B_ij = eps_ilm eps_jnp sigma_mp X_ln`` for the aligned diagonal conductivity (S/m^2).

    Above the center of a long wire only the diagonal survives:
    ``B_xx = s_zz X_yy + s_yy X_zz`` and cyclic.
    """
    s = np.diag(sigma.diag)
    return np.einsum("ilm,jnp,mp,ln->ij", _LEVI, _LEVI, s, X.X)


def y_tilde(sigma: ConductivityTensor, X: GeometryFactors) -> np.ndarray:
    """``B_ij / sigma_xx`` (1/m)."""
    return b_tensor(sigma, X) / sigma.sxx


@dataclass(frozen=True)
class NoiseSpectrum:
    """Cross-spectral density tensor ``S_ij(x1, x2)`` in T^2 s."""

    S: np.ndarray
    T: float
    sigma: ConductivityTensor
    omega: float
    factors: GeometryFactors
    diagnostics: dict = field(default_factory=dict)

    @property
    def parallel(self) -> float:
        return float(self.S[0, 0])

    @property
    def perpendicular(self) -> float:
        return float(self.S[1, 1] + self.S[2, 2])


def skin_depth(sigma0: float, omega: float) -> float:
    """Electromagnetic skin depth ``sqrt(2 / (sigma0 mu0 omega))`` (m)."""
    if not (sigma0 > 0 and omega > 0):
        raise ValueError("sigma0 and omega must be positive")
    return math.sqrt(2.0 / (sigma0 * CONSTANTS.mu0 * omega))


def power_spectrum(p1, p2, omega: float, sigma: ConductivityTensor, geom: WireGeometry,
                   factors: GeometryFactors | None = None) -> NoiseSpectrum:
    """Low-frequency magnetic noise tensor between two points (T^2 s).

    ``S_ij = kB T mu0^2 B_ij / (4 pi^2)``, flat in frequency.  A
    :class:`QuasiStaticWarning` is issued when the skin depth at ``omega`` is
    below ten times the larger of the point height and the wire thickness.
    """
    X = factors if factors is not None else geometry_factors(p1, p2, geom)
    diag: dict = {}
    if omega > 0:
        delta = skin_depth(sigma.sxx, omega)
        d = max(geom.gap(X.p1), geom.gap(X.p2))
        diag["skin_depth"] = delta
        if delta <= 10 * max(d, geom.h):
            warnings.warn(
                f"skin depth {delta:.3g} m is not much larger than max(d, h) = {max(d, geom.h):.3g} m",
                QuasiStaticWarning,
                stacklevel=2,
            )
    S = CONSTANTS.kB * sigma.T * CONSTANTS.mu0**2 / (4 * math.pi**2) * b_tensor(sigma, X)
    return NoiseSpectrum(S, sigma.T, sigma, omega, X, diag)


# ---------------------------------------------------------------------------
# rates


def trap_center(ctx: TrapContext, geom: WireGeometry) -> np.ndarray:
    """Trap center a height ``ctx.d`` above the top face of the wire."""
    return geom.point_above(ctx.d)


def _larmor(ctx: TrapContext, species: AtomSpecies) -> float:
    if ctx.omega0f > 0:
        return ctx.omega0f
    return abs(species.gF) * CONSTANTS.muB * ctx.B0 / CONSTANTS.hbar


def spin_flip_rate(ctx: TrapContext, species: AtomSpecies, sigma: ConductivityTensor,
                   geom: WireGeometry) -> float:
    """Noise-driven loss rate from the trapped Zeeman state (1/s).

    ``(mu_perp / hbar)^2 (S_yy + S_zz)`` at the trap center, with
    ``mu_perp = muB gF <m-1|F_perp|m>``.  The symmetric off-diagonal noise
    does not enter; its size relative to the diagonal is checked and must
    stay below 1e-3 on the symmetry plane of the wire.
    """
    p = trap_center(ctx, geom)
    spec = power_spectrum(p, p, _larmor(ctx, species), sigma, geom)
    S = spec.S
    if abs(p[1]) < 1e-15 and abs(p[0]) < 1e-15:
        off = max(abs(S[0, 1]), abs(S[0, 2]), abs(S[1, 2]))
        scale = np.max(np.abs(np.diag(S)))
        if scale > 0 and off > 1e-3 * scale:
            raise ArithmeticError(f"off-diagonal noise {off / scale:.2e} of the diagonal above the wire center")
    mu_perp = species.transverse_moment()
    return (mu_perp / CONSTANTS.hbar) ** 2 * (S[1, 1] + S[2, 2])


def spin_decoherence_rate(ctx: TrapContext, species: AtomSpecies, sigma: ConductivityTensor,
                          geom: WireGeometry, states: tuple[str, str] | None = None) -> float:
    """Dephasing rate of a superposition of two Zeeman states (1/s).

    ``dmu^2 S_xx / (2 hbar^2)`` with ``dmu`` the difference of the two moments.
    """
    a, b = states if states is not None else species.state_labels
    dmu = magnetic_moment(species, a) - magnetic_moment(species, b)
    if dmu == 0:
        return 0.0
    p = trap_center(ctx, geom)
    S = power_spectrum(p, p, 0.0, sigma, geom).S
    return dmu**2 * S[0, 0] / (2 * CONSTANTS.hbar**2)


def _parallel_moment(species: AtomSpecies) -> float:
    return magnetic_moment(species, species.state_labels[0])


def spatial_decoherence_rate(p1, p2, ctx: TrapContext, species: AtomSpecies,
                             sigma: ConductivityTensor, geom: WireGeometry) -> float:
    """Dephasing rate between two cloud components at ``p1`` and ``p2`` (1/s).

    ``mu^2 (S11 + S22 - 2 S12) / (2 hbar^2)`` with the parallel noise ``S_xx``.
    Points are relative to the wire center.
    """
    del ctx
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    if np.allclose(p1, p2, rtol=0, atol=0):
        return 0.0
    S11 = power_spectrum(p1, p1, 0.0, sigma, geom).S[0, 0]
    S22 = power_spectrum(p2, p2, 0.0, sigma, geom).S[0, 0]
    S12 = power_spectrum(p1, p2, 0.0, sigma, geom).S[0, 0]
    mu = _parallel_moment(species)
    return mu**2 * max(S11 + S22 - 2 * S12, 0.0) / (2 * CONSTANTS.hbar**2)


_AXES = {"x": 0, "y": 1, "z": 2}


def _transition_weights(t: np.ndarray, final: int) -> np.ndarray:
    """``sqrt(pi) psi_0 psi_f`` in oscillator units, divided by the Gauss-Hermite weight."""
    if final == 1:
        return math.sqrt(2.0) * t
    if final == 2:
        return (2 * t * t - 1) / math.sqrt(2.0)
    raise ValueError("only transitions 0->1 and 0->2 are modeled")


def heating_rate(ctx: TrapContext, species: AtomSpecies, sigma: ConductivityTensor, geom: WireGeometry,
                 transition: int = 1, axis: str = "z", order: int = 12,
                 spectrum=None) -> float:
    """Vibrational excitation rate ``0 -> transition`` along one trap axis (1/s).

    ``(mu/hbar)^2 int int psi_f psi_0 (s1) psi_f psi_0 (s2) S_xx(s1, s2) ds1 ds2``
    with harmonic-oscillator states of ``ctx.trap_frequencies[axis]``,
    evaluated by a Gauss-Hermite product rule.

    Parameters
    ----------
    transition : {1, 2}
        Final vibrational level.
    axis : {"x", "y", "z"}
    order : int
        Gauss-Hermite order per coordinate.
    spectrum : callable, optional
        ``spectrum(p1, p2) -> S_xx`` overriding the wire noise (used for
        checks with synthetic correlation functions).
    """
    if transition not in (1, 2):
        raise ValueError("only transitions to the first two excited levels are modeled")
    k = _AXES[axis]
    omega = ctx.trap_frequencies[k]
    if not omega > 0:
        raise ValueError("trap frequency along the heating axis must be positive")
    ell = math.sqrt(CONSTANTS.hbar / (species.mass * omega))
    t, w = np.polynomial.hermite.hermgauss(order)
    m = _transition_weights(t, transition) * w
    center = trap_center(ctx, geom)
    if spectrum is None:
        def spectrum(a, b):
            return power_spectrum(a, b, 0.0, sigma, geom).S[0, 0]

    pts = []
    keep = np.zeros(order, dtype=bool)
    for n, ti in enumerate(t):
        p = center.copy()
        p[k] += ell * ti
        pts.append(p)
        # nodes inside material or with negligible weight carry no probability
        keep[n] = geom.gap(p) > 0 and w[n] > 1e-14 * w.max()
    M = np.zeros((order, order))
    for i in range(order):
        for j in range(i, order):
            if keep[i] and keep[j]:
                M[i, j] = M[j, i] = spectrum(pts[i], pts[j])
    total = float(m @ M @ m) / math.pi
    mu = _parallel_moment(species)
    return (mu / CONSTANTS.hbar) ** 2 * max(total, 0.0)


# ---------------------------------------------------------------------------
# materials


def suppression_ratio(sigma: ConductivityTensor, X: GeometryFactors) -> float:
    """Parallel-noise reduction of an anisotropic conductor versus an isotropic one of conductivity ``sigma_xx``.

    ``(s_zz X_yy + s_yy X_zz) / (s_xx (X_yy + X_zz))``.
    """
    a, b = sigma.szz / sigma.sxx, sigma.syy / sigma.sxx
    return (a * X.Xyy + b * X.Xzz) / (X.Xyy + X.Xzz)


def bloch_gruneisen(T: float, debye_temp: float) -> float:
    """Dimensionless Bloch-Gruneisen phonon resistivity, ``(T/Theta)^5 J5(Theta/T)``."""
    if T <= 0:
        return 0.0
    # the integrand decays as x^5 exp(-x); nothing is left beyond x = 200
    upper = min(debye_temp / T, 200.0)

    def integrand(x):
        if x < 1e-8:
            return x**3
        return x**5 * math.exp(-x) / math.expm1(-x) ** 2

    val, _ = quad(integrand, 0.0, upper, limit=200, epsabs=0.0, epsrel=1e-12)
    return (T / debye_temp) ** 5 * val


def alloy_noise_ratio(T: float, rho0: float, debye_temp: float = 215.0,
                      rho_ref: float = RHO_AU_300K) -> float:
    """Thermal noise ``T / rho(T)`` relative to a conductor of ``rho_ref`` at 300 K.

    ``rho(T) = rho0 + rho_ph(T)`` where the phonon part follows the
    Bloch-Gruneisen form with the given Debye temperature and equals
    ``rho_ref`` at 300 K.  Values below 1 mean less noise.
    """
    if not T > 0:
        raise ValueError("T must be positive")
    if rho0 < 0:
        raise ValueError("rho0 must be non-negative")
    scale = rho_ref / bloch_gruneisen(300.0, debye_temp)
    rho = rho0 + scale * bloch_gruneisen(T, debye_temp)
    return (T / rho) / (300.0 / rho_ref)


# ---------------------------------------------------------------------------
# report


@dataclass(frozen=True)
class RateReport:
    """Loss and decoherence rates of one trap design (1/s)."""

    spin_flip: float
    spin_decoherence: float
    spatial_decoherence: float = 0.0
    heating01: float = 0.0
    heating02: float = 0.0
    tunneling: float = 0.0

    def __post_init__(self):
        for name in ("spin_flip", "spin_decoherence", "spatial_decoherence", "heating01", "heating02", "tunneling"):
            v = getattr(self, name)
            if not v >= 0:
                raise ValueError(f"{name} must be a non-negative rate")

    @property
    def lifetimes(self) -> dict[str, float]:
        out = {}
        for name in ("spin_flip", "spin_decoherence", "spatial_decoherence", "heating01", "heating02", "tunneling"):
            v = getattr(self, name)
            out[name] = math.inf if v == 0 else 1.0 / v
        return out


def gate_ops_figure_of_merit(report: RateReport, gate_time: float) -> float:
    """Number of gates that fit in the shortest of the spin-flip, spin-decoherence and tunneling lifetimes."""
    if not gate_time > 0:
        raise ValueError("gate time must be positive")
    rates = (report.spin_flip, report.spin_decoherence, report.tunneling)
    if any(math.isinf(r) for r in rates):
        return 0.0
    worst = max(rates)
    return math.inf if worst == 0 else 1.0 / worst / gate_time


def rate_report(ctx: TrapContext, species: AtomSpecies, sigma: ConductivityTensor, geom: WireGeometry,
                tunneling: float = 0.0, heating: bool = False, separation: float | None = None) -> RateReport:
    """Collect the noise-driven rates at the trap center of ``ctx``.

    Parameters
    ----------
    tunneling : float
        Externally computed tunneling loss rate.
    heating : bool
        Also evaluate the 0->1 and 0->2 heating rates along z (slower).
    separation : float, optional
        Evaluate spatial decoherence for two components split by this
        distance along the wire.
    """
    sf = spin_flip_rate(ctx, species, sigma, geom)
    sd = spin_decoherence_rate(ctx, species, sigma, geom)
    sp = 0.0
    if separation:
        c = trap_center(ctx, geom)
        p2 = c + np.array([separation, 0.0, 0.0])
        sp = spatial_decoherence_rate(c, p2, ctx, species, sigma, geom)
    h1 = h2 = 0.0
    if heating:
        h1 = heating_rate(ctx, species, sigma, geom, 1)
        h2 = heating_rate(ctx, species, sigma, geom, 2)
    return RateReport(sf, sd, sp, h1, h2, tunneling)
