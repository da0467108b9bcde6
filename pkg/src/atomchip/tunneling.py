"""WKB tunneling: crossing-wire barrier control, lattice resolution and loss to the surface.

Conventions
-----------
``TunnelResult.action`` is the full exponent, ``P = exp(-action)``.  For a
sampled potential :func:`wkb_probability` uses the textbook transmission
exponent ``2 * int kappa dx``; the crossing-wire control curves use the
single-pass exponent ``int kappa dx`` (see :func:`crossing_probability`).
Both are selectable through ``exponent_factor``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .domain import CONSTANTS, AtomSpecies, PhysicsDomainError, TrapContext
from .magnetostatics import LatticeSpec, lattice_amplitude

__all__ = [
    "TunnelResult",
    "DensityProfile",
    "SurfaceTunneling",
    "wkb_probability",
    "wkb_action",
    "de_broglie_wavelength",
    "crossing_probability",
    "crossing_current_for_probability",
    "current_sensitivity",
    "resolution_height",
    "thomas_fermi_density",
    "surface_tunneling_rate",
]

_GL_X, _GL_W = np.polynomial.legendre.leggauss(10)
_ROOT_RTOL = 1e-10


@dataclass(frozen=True)
class TunnelResult:
    """Outcome of one WKB barrier evaluation.

    Attributes
    ----------
    probability : float
        ``exp(-action)``, in ``[0, 1]``.
    turning_points : tuple of float
        ``(x1, x2)`` with ``x1 < x2``; empty when the energy clears the barrier.
    action : float
        Exponent of the tunneling probability (dimensionless, >= 0).
    """

    probability: float
    turning_points: tuple[float, ...]
    action: float


# ---------------------------------------------------------------------------
# action integral


def _refine_root(fun, a: float, b: float, E: float) -> float:
    fa = float(fun(a)) - E
    fb = float(fun(b)) - E
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    scale = max(abs(a), abs(b), abs(b - a))
    return brentq(lambda s: float(fun(s)) - E, a, b, xtol=_ROOT_RTOL * scale, rtol=4 * np.finfo(float).eps)


_HALF = 0.5 * (_GL_X + 1.0)  # Gauss-Legendre nodes on [0, 1]
_HW = 0.5 * _GL_W


def _panel_nodes(a, b, kind: str):
    """Nodes and weights on panels ``[a_i, b_i]`` (arrays of shape (n, 10)).

    ``kind`` marks which end is a turning point; there the substitution
    ``x = x_t + (b - a) s^2`` (or a cosine map for both ends) removes the
    square-root cusp of the integrand.
    """
    a = np.asarray(a, dtype=float)[:, None]
    L = np.asarray(b, dtype=float)[:, None] - a
    s = _HALF[None, :]
    if kind == "left":
        return a + L * s * s, _HW * 2 * L * s
    if kind == "right":
        return a + L - L * s * s, _HW * 2 * L * s
    if kind == "both":
        return a + 0.5 * L * (1 - np.cos(np.pi * s)), _HW * 0.5 * L * np.pi * np.sin(np.pi * s)
    return a + L * s, _HW * L * np.ones_like(s)


def wkb_action(fun: Callable, x1: float, x2: float, E: float, m: float, breaks=None,
               closed: tuple[bool, bool] = (True, True)) -> float:
    """``(1/hbar) * int_{x1}^{x2} sqrt(2 m (V - E)) dx`` by composite Gauss-Legendre.

    Parameters
    ----------
    fun : callable
        Vectorized potential ``V(x)`` in J.
    x1, x2 : float
        Integration limits.
    breaks : array_like, optional
        Interior panel boundaries (e.g. sample nodes of an interpolant).  Panels
        are also subdivided so that none is wider than 1/64 of the interval.
    closed : (bool, bool)
        Whether ``x1`` / ``x2`` are turning points (``V = E``) needing the
        endpoint substitution.
    """
    if x2 <= x1:
        return 0.0
    inner = np.linspace(x1, x2, 65)[1:-1]
    if breaks is not None:
        b = np.asarray(breaks, dtype=float)
        inner = np.union1d(inner, b[(b > x1) & (b < x2)])
    edges = np.concatenate([[x1], inner, [x2]])
    lo, hi = edges[:-1], edges[1:]
    parts = []
    first = "left" if closed[0] else "mid"
    last = "right" if closed[1] else "mid"
    parts.append(_panel_nodes(lo[:1], hi[:1], first))
    if len(lo) > 2:
        parts.append(_panel_nodes(lo[1:-1], hi[1:-1], "mid"))
    parts.append(_panel_nodes(lo[-1:], hi[-1:], last))
    xs = np.concatenate([p[0].ravel() for p in parts])
    ws = np.concatenate([p[1].ravel() for p in parts])
    v = np.asarray(fun(xs), dtype=float) - E
    return float(np.sum(ws * np.sqrt(np.clip(2 * m * v, 0.0, None)))) / CONSTANTS.hbar


def wkb_probability(x, V, E: float, m: float, exponent_factor: float = 2.0) -> TunnelResult:
    """WKB tunneling probability through a sampled one-dimensional barrier.

    The samples are joined by a monotone cubic (PCHIP) interpolant, the
    turning points around the global maximum are root-found on it and the
    action is integrated between them.

    Parameters
    ----------
    x : array_like
        Strictly increasing sample positions (m).
    V : array_like
        Potential energy at ``x`` (J).
    E : float
        Particle energy (J).
    m : float
        Particle mass (kg).
    exponent_factor : float
        ``P = exp(-exponent_factor * int kappa dx)``.  The default 2 is the
        standard transmission exponent.

    Returns
    -------
    TunnelResult
    """
    x = np.asarray(x, dtype=float)
    V = np.asarray(V, dtype=float)
    if x.ndim != 1 or x.shape != V.shape or x.size < 3:
        raise ValueError("x and V must be matching 1-D arrays with at least 3 samples")
    if np.any(np.diff(x) <= 0):
        raise ValueError("x must be strictly increasing")
    imax = int(np.argmax(V))
    if V[imax] <= E:
        return TunnelResult(1.0, (), 0.0)
    below = V <= E
    left = np.nonzero(below[:imax])[0]
    right = np.nonzero(below[imax:])[0]
    if left.size == 0 or right.size == 0:
        raise PhysicsDomainError("the sampled grid does not enclose the barrier: V > E at an edge")
    il = left[-1]
    ir = imax + right[0]
    spline = PchipInterpolator(x, V)
    x1 = _refine_root(spline, x[il], x[il + 1], E)
    x2 = _refine_root(spline, x[ir - 1], x[ir], E)
    if ir - il - 1 < 50:
        warnings.warn(
            f"only {ir - il - 1} samples between the turning points; refine the grid",
            RuntimeWarning,
            stacklevel=2,
        )
    action = exponent_factor * wkb_action(spline, x1, x2, E, m, breaks=x[il + 1:ir])
    return TunnelResult(math.exp(-action), (x1, x2), action)


def de_broglie_wavelength(E: float, m: float) -> float:
    """``h / sqrt(2 m E)`` for a free particle of kinetic energy ``E``."""
    if not E > 0:
        raise ValueError("energy must be positive")
    return 2 * math.pi * CONSTANTS.hbar / math.sqrt(2 * m * E)


# ---------------------------------------------------------------------------
# crossing-wire barrier control


def _default_energy(ctx: TrapContext) -> float:
    return ctx.mu if ctx.mu > 0 else CONSTANTS.kB * 1e-6


def _crossing_half_action(I: float, z: float, E: float, species: AtomSpecies) -> float:
    """``(1/hbar) int_0^{x_E} kappa dx`` for the Lorentzian barrier excess."""
    A = species.muA * CONSTANTS.mu0 * I / (2 * math.pi)
    if A / z <= E:
        return 0.0
    xE = math.sqrt(A * z / E - z * z)

    def excess(x):
        return A * z / (z * z + np.asarray(x) ** 2)

    return wkb_action(excess, 0.0, xE, E, species.mass, closed=(False, True))


def crossing_probability(I: float, d: float, E: float, species: AtomSpecies,
                         exponent_factor: float = 1.0) -> float:
    """Probability to pass the crossing-wire barrier at current ``I`` and height ``d``.

    ``E`` is the kinetic energy above the guide bottom.  The exponent is
    ``exponent_factor * (1/hbar) int sqrt(2m(V - E)) dx`` over the full
    barrier; the default factor 1 keeps the single-pass form used for the
    current-control curves.
    """
    if not d > 0:
        raise ValueError("d must be positive")
    return math.exp(-exponent_factor * 2.0 * _crossing_half_action(I, d, E, species))


def crossing_current_for_probability(P: float, d: float, E: float, species: AtomSpecies,
                                     exponent_factor: float = 1.0) -> float:
    """Crossing-wire current at which the passage probability equals ``P``."""
    if not 0 < P <= 1:
        raise ValueError("P must lie in (0, 1]")
    I_min = 2 * math.pi * d * E / (species.muA * CONSTANTS.mu0)
    target = -math.log(P) / (2.0 * exponent_factor)
    if target == 0.0:
        return I_min

    def f(I):
        return _crossing_half_action(I, d, E, species) - target

    hi = I_min
    for _ in range(80):
        hi *= 1.5
        if f(hi) > 0:
            break
    else:
        raise PhysicsDomainError(f"no current up to {hi:.3g} A reaches P={P} at d={d:.3g} m")
    return brentq(f, I_min, hi, xtol=1e-14 * hi, rtol=1e-12)


def current_sensitivity(d: float, P_from: float, P_to: float, ctx: TrapContext,
                        species: AtomSpecies, exponent_factor: float = 1.0) -> float:
    """Fractional current change ``(I_from - I_to) / I_from`` that moves ``P_from`` to ``P_to``.

    The atom energy is ``ctx.mu`` when positive, otherwise ``kB * 1 uK``.

    Parameters
    ----------
    d : float
        Height of the guide above the crossing wire (m).
    P_from, P_to : float
        Passage probabilities, ``0 < P_from <= P_to <= 1``.
    """
    if not (0 < P_from <= P_to <= 1):
        raise ValueError("need 0 < P_from <= P_to <= 1")
    if P_from == P_to:
        return 0.0
    E = _default_energy(ctx)
    I_from = crossing_current_for_probability(P_from, d, E, species, exponent_factor)
    I_to = crossing_current_for_probability(P_to, d, E, species, exponent_factor)
    return (I_from - I_to) / I_from


# ---------------------------------------------------------------------------
# lattice resolution


def resolution_height(wavelength: float, I: float, eta: float, species: AtomSpecies,
                      delta_y: float | None = None) -> float:
    """Largest height at which a bent-wire lattice still separates neighbouring sites.

    Requires ``V0 >= (eta^2 / 16) hbar^2 k^2 / m``, i.e. the lattice depth
    holds at least ``eta/2`` longitudinal quanta in the barrier.

    Parameters
    ----------
    wavelength : float
        Lattice period (m).
    I : float
        Wire current (A).
    eta : float
        Required barrier-to-quantum ratio.
    delta_y : float, optional
        Meander amplitude; defaults to ``wavelength / 20``.

    Returns
    -------
    float
        Height in m, or 0 when the criterion cannot be met even at 1e-6 wavelengths.
    """
    if not (wavelength > 0 and I > 0 and eta > 0):
        raise ValueError("wavelength, I and eta must be positive")
    dy = wavelength / 20 if delta_y is None else delta_y
    k = 2 * math.pi / wavelength
    need = eta**2 / 16 * CONSTANTS.hbar**2 * k**2 / species.mass

    def f(logz):
        return math.log(lattice_amplitude(LatticeSpec(wavelength, dy, I, math.exp(logz)), species) / need)

    lo = math.log(wavelength * 1e-6)
    if f(lo) < 0:
        return 0.0
    hi = math.log(wavelength)
    while f(hi) > 0:
        hi += 1.0
    return math.exp(brentq(f, lo, hi, xtol=1e-13))


# ---------------------------------------------------------------------------
# density


@dataclass(frozen=True)
class DensityProfile:
    """Trapped-cloud density on a rectangular grid around the trap center.

    Attributes
    ----------
    axes : tuple of ndarray
        Offsets from ``center`` along x, y, z (m).
    n : ndarray
        Density on the grid (1/m^3).
    N : int
    mu : float
        Chemical potential above the trap bottom (J); for a single atom the
        zero-point energy.
    omegas : tuple of float
        Harmonic frequencies (rad/s).
    mass : float
    g : float
        Contact coupling ``4 pi hbar^2 a / m``; 0 for a single atom.
    center : tuple of float
        Trap center in lab coordinates (m).
    """

    axes: tuple[np.ndarray, np.ndarray, np.ndarray]
    n: np.ndarray
    N: int
    mu: float
    omegas: tuple[float, float, float]
    mass: float
    g: float
    center: tuple[float, float, float] = (0.0, 0.0, 0.0)

    @property
    def is_thomas_fermi(self) -> bool:
        return self.g > 0

    @property
    def radii(self) -> np.ndarray:
        """Thomas-Fermi radii, or oscillator lengths for a single atom."""
        w = np.asarray(self.omegas)
        if self.is_thomas_fermi:
            return np.sqrt(2 * self.mu / (self.mass * w**2))
        return np.sqrt(CONSTANTS.hbar / (self.mass * w))

    def integral(self) -> float:
        """Grid integral of ``n`` (should equal ``N``)."""
        ax, ay, az = self.axes
        return float(np.trapezoid(np.trapezoid(np.trapezoid(self.n, az, axis=2), ay, axis=1), ax))

    def column_probability(self, x, y):
        """``(1/N) int n dz`` at offsets ``(x, y)`` from the center (1/m^2), closed form."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.is_thomas_fermi:
            wx, wy, wz = self.omegas
            u = self.mu - 0.5 * self.mass * (wx**2 * x**2 + wy**2 * y**2)
            u = np.clip(u, 0.0, None)
            col = (4.0 / 3.0) * u * np.sqrt(2 * u / (self.mass * wz**2)) / self.g
            return col / self.N
        ax, ay, _ = self.radii
        return np.exp(-(x / ax) ** 2 - (y / ay) ** 2) / (math.pi * ax * ay)

    def mean_vz2(self) -> float:
        """Mean squared transverse velocity ``(hbar w_z / 2 + 2 mu / 7 [TF]) / m``."""
        e = 0.5 * CONSTANTS.hbar * self.omegas[2]
        if self.is_thomas_fermi:
            e += 2.0 * self.mu / 7.0
        return e / self.mass


def thomas_fermi_density(ctx: TrapContext, species: AtomSpecies, scattering_length: float,
                         points: int = 97, center: tuple[float, float, float] | None = None) -> DensityProfile:
    """Density of ``ctx.N`` atoms in the harmonic trap ``ctx.trap_frequencies``.

    ``N > 1`` gives the Thomas-Fermi inverted parabola with the chemical
    potential fixed by normalization; ``N = 1`` gives the harmonic
    ground-state Gaussian.

    Parameters
    ----------
    ctx : TrapContext
        Uses ``trap_frequencies`` (rad/s) and ``N``.
    scattering_length : float
        s-wave scattering length (m); ignored for ``N = 1``.
    points : int
        Grid points per axis.
    center : tuple, optional
        Lab-frame trap center; defaults to ``(0, 0, ctx.d)``.
    """
    w = np.asarray(ctx.trap_frequencies, dtype=float)
    if w.shape != (3,) or np.any(w <= 0):
        raise ValueError("trap frequencies must be three positive numbers")
    m = species.mass
    hbar = CONSTANTS.hbar
    c = (0.0, 0.0, ctx.d) if center is None else tuple(center)
    if ctx.N == 1:
        a = np.sqrt(hbar / (m * w))
        axes = tuple(np.linspace(-5 * ai, 5 * ai, points) for ai in a)
        X, Y, Z = np.meshgrid(*axes, indexing="ij")
        n = np.exp(-(X / a[0]) ** 2 - (Y / a[1]) ** 2 - (Z / a[2]) ** 2) / (math.pi**1.5 * np.prod(a))
        return DensityProfile(axes, n, 1, 0.5 * hbar * float(w.sum()), tuple(w), m, 0.0, c)
    if not scattering_length > 0:
        raise ValueError("Thomas-Fermi profile needs a positive scattering length")
    wbar = float(np.prod(w) ** (1 / 3))
    abar = math.sqrt(hbar / (m * wbar))
    mu = 0.5 * hbar * wbar * (15 * ctx.N * scattering_length / abar) ** 0.4
    g = 4 * math.pi * hbar**2 * scattering_length / m
    R = np.sqrt(2 * mu / (m * w**2))
    axes = tuple(np.linspace(-Ri, Ri, points) for Ri in R)
    X, Y, Z = np.meshgrid(*axes, indexing="ij")
    V = 0.5 * m * (w[0] ** 2 * X**2 + w[1] ** 2 * Y**2 + w[2] ** 2 * Z**2)
    n = np.clip(mu - V, 0.0, None) / g
    return DensityProfile(axes, n, ctx.N, mu, tuple(w), m, g, c)


# ---------------------------------------------------------------------------
# loss to the surface


@dataclass(frozen=True)
class SurfaceTunneling:
    """Result of :func:`surface_tunneling_rate`.

    ``barrier_free`` counts populated columns in which the potential never
    rises above the chemical potential on the way down to the material;
    each contributes its full attempt rate.
    """

    rate: float
    columns: int
    barrier_free: int
    forbidden: int
    diagnostics: dict = field(default_factory=dict)

    @property
    def lifetime(self) -> float:
        return math.inf if self.rate == 0 else 1.0 / self.rate


def _first_crossing(U, start, stop, step, E, above: bool):
    """First index from ``start`` towards ``stop`` where U > E (above) or U < E."""
    idx = range(start, stop, step)
    for i in idx:
        if (U[i] > E) if above else (U[i] < E):
            return i
    return None


def surface_tunneling_rate(potential: Callable, density: DensityProfile,
                           floor: Callable[[float], float] = lambda y: 0.0, *,
                           n_radial: int = 16, n_angular: int = 12, nz: int = 800,
                           z_top: float | None = None) -> SurfaceTunneling:
    """Loss rate of a trapped cloud by tunneling down to the chip.

    For each column ``(x, y)`` the WKB exponent ``2 int kappa dz`` is taken
    between the turning points below the cloud, ``U(z1) = U(z2) = E`` with
    ``E = U(center) + mu``, and the column is weighted by
    ``P(x, y) = (1/N) int n dz`` and the attempt frequency
    ``sqrt(<v_z^2>) / 2L`` with ``L`` the width of the classically allowed
    well.  Atoms reaching the material surface are lost, so without an
    attractive surface potential the outer turning point is the surface.
    Columns without any barrier lose atoms once per classical round trip
    from the cloud center to the surface.

    Parameters
    ----------
    potential : callable
        ``U(x, y, z)`` in J, vectorized over ``z``.
    density : DensityProfile
        Cloud density; its column weights and radii set the integration area.
    floor : callable
        Height of the material surface below lateral position ``y`` (m).
    n_radial, n_angular : int
        Gauss-Legendre orders of the column integration over one quadrant of
        the cloud footprint.  The potential must be even in x and y.
    nz : int
        Samples per column used to bracket turning points.
    z_top : float, optional
        Upper end of each column; defaults to ``center + 3 * (center - floor)``.
    """
    cx, cy, cz = density.center
    E = float(potential(cx, cy, np.array([cz]))[0]) + density.mu
    Rx, Ry, _ = density.radii
    if not density.is_thomas_fermi:
        Rx, Ry = 4 * Rx, 4 * Ry
    vz = math.sqrt(density.mean_vz2())
    m = density.mass

    rho, wr = np.polynomial.legendre.leggauss(n_radial)
    rho, wr = 0.5 * (rho + 1), 0.5 * wr
    th, wt = np.polynomial.legendre.leggauss(n_angular)
    th, wt = 0.25 * math.pi * (th + 1), 0.25 * math.pi * wt

    total = 0.0
    columns = barrier_free = forbidden = 0
    worst = math.inf
    for i in range(n_radial):
        for j in range(n_angular):
            x = Rx * rho[i] * math.cos(th[j])
            y = Ry * rho[i] * math.sin(th[j])
            weight = 4 * Rx * Ry * rho[i] * wr[i] * wt[j] * float(density.column_probability(x, y))
            if weight <= 0:
                continue
            columns += 1
            zf = floor(cy + y)
            top = z_top if z_top is not None else cz + 3 * (cz - zf)
            # dense near the surface, where the attraction varies fastest
            s = np.linspace(0.0, 1.0, nz)
            zs = zf + (top - zf) * s**2
            zs[0] = zf + 1e-3 * (cz - zf)
            col = lambda zz, x=x, y=y: potential(cx + x, cy + y, np.asarray(zz, dtype=float))  # noqa: E731
            U = col(zs)
            ic = int(np.searchsorted(zs, cz))
            win = (zs > zf + 0.5 * (cz - zf)) & (zs < cz + 0.5 * (cz - zf))
            iw = int(np.flatnonzero(win)[np.argmin(U[win])])
            if U[iw] >= E:
                forbidden += 1
                continue
            i1 = _first_crossing(U, iw, -1, -1, E, above=True)
            iu = _first_crossing(U, iw, nz, 1, E, above=True)
            z_up = top if iu is None else _refine_root(col, zs[iu - 1], zs[iu], E)
            if i1 is None:
                # no barrier: atoms fall from the cloud center to the surface,
                # starting with the thermal/zero-point speed
                barrier_free += 1
                path = np.append(zs[zs < cz], cz)
                U0 = float(col(np.array([cz]))[0])
                v = np.sqrt(np.maximum(vz * vz + 2 * (U0 - col(path)) / m, vz * vz))
                total += weight / (2 * np.trapezoid(1.0 / v, path))
                continue
            z1 = _refine_root(col, zs[i1], zs[i1 + 1], E)
            i2 = _first_crossing(U, i1, -1, -1, E, above=False)
            if i2 is None:
                z2, closed_low = zs[0], False  # barrier reaches the surface: absorbed on contact
            else:
                z2, closed_low = _refine_root(col, zs[i2], zs[i2 + 1], E), True
            S = 2.0 * wkb_action(col, z2, z1, E, m, breaks=zs, closed=(closed_low, True))
            worst = min(worst, S)
            omega_r = vz / (2 * (z_up - z1))
            total += weight * omega_r * math.exp(-S)
    diag = {"energy": E, "min_action": worst, "omega_scale": vz}
    return SurfaceTunneling(total, columns, barrier_free, forbidden, diag)
