import csv
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from atomchip.domain import CONSTANTS, RB87, TrapContext
from atomchip.magnetostatics import (
    LatticeSpec,
    barrier_profile,
    bessel_K0,
    bessel_K1,
    lattice_amplitude,
    lattice_trap_frequency,
    x_wire_barrier,
)

TABLE = Path(__file__).parent / "data" / "bessel_k_table.csv"


def _table():
    with TABLE.open() as fh:
        rows = list(csv.DictReader(fh))
    return [(float(r["u"]), float(r["K0"]), float(r["K1"]), float(r["K2"])) for r in rows]


def test_k1_at_one():
    assert bessel_K1(1.0) == pytest.approx(0.6019072302, abs=1e-10)


def test_k1_against_high_precision_table():
    worst = 0.0
    for u, k0, k1, _ in _table():
        worst = max(worst, abs(bessel_K1(u) / k1 - 1), abs(bessel_K0(u) / k0 - 1))
    assert worst < 1e-10


def test_k1_matches_scipy_independently():
    from scipy.special import k1

    u = np.logspace(-4, math.log10(50), 301)
    assert np.max(np.abs(bessel_K1(u) / k1(u) - 1)) < 1e-10


def test_k1_asymptotic_form_at_three():
    approx = math.exp(-3) / 3 * math.sqrt(1 + math.pi * 3 / 2)
    assert abs(approx / bessel_K1(3.0) - 1) < 0.05


def test_k1_small_argument_divergence():
    for u in (1e-4, 1e-5, 1e-6):
        assert bessel_K1(u) * u == pytest.approx(1.0, rel=1e-6)


def test_k1_rejects_nonpositive():
    with pytest.raises(ValueError):
        bessel_K1(0.0)
    with pytest.raises(ValueError):
        bessel_K1(np.array([1.0, -1.0]))


def test_recurrence_with_independent_k0_k2():
    # K0 + K2 = -2 K1'
    for u, k0, _, k2 in _table():
        if not 1e-3 <= u <= 40:
            continue
        h = 1e-3 * min(u, 1.0)
        f = [bessel_K1(u + j * h) for j in (-2, -1, 1, 2)]
        deriv = (f[0] - 8 * f[1] + 8 * f[2] - f[3]) / (12 * h)
        assert abs((k0 + k2) + 2 * deriv) / (k0 + k2) < 1e-8


def _ctx(I=1e-3, d=1e-6, B0=1e-4):
    return TrapContext(d=d, I=I, B0=B0)


def test_zero_current_is_flat():
    x = np.linspace(-10e-6, 10e-6, 11)
    V = x_wire_barrier(x, _ctx(I=0.0), RB87)
    np.testing.assert_allclose(V, RB87.muA * 1e-4, rtol=1e-15)


def test_barrier_halves_at_x_equal_z():
    ctx = _ctx(d=1.5e-6)
    base = RB87.muA * ctx.B0
    ex0 = x_wire_barrier(0.0, ctx, RB87) - base
    exz = x_wire_barrier(ctx.d, ctx, RB87) - base
    assert exz == pytest.approx(ex0 / 2, rel=1e-12)


def test_barrier_closed_form_and_shape():
    ctx = _ctx(d=2e-6)
    x = np.linspace(-20e-6, 20e-6, 401)
    prof = barrier_profile(x, ctx, RB87)
    excess = prof.V - RB87.muA * ctx.B0
    expected = RB87.muA * CONSTANTS.mu0 * ctx.I / (2 * math.pi) * ctx.d / (ctx.d**2 + x**2)
    np.testing.assert_allclose(excess, expected, rtol=1e-14)
    np.testing.assert_allclose(prof.V, prof.V[::-1], rtol=1e-15)
    assert int(np.argmax(prof.V)) == 200
    assert prof.height == pytest.approx(excess[200], rel=1e-14)
    far = x_wire_barrier(1.0, ctx, RB87)
    assert far == pytest.approx(RB87.muA * ctx.B0, rel=1e-6)


def test_barrier_integral_of_excess():
    ctx = _ctx(d=1e-6)
    base = RB87.muA * ctx.B0
    val, _ = quad(lambda x: x_wire_barrier(x, ctx, RB87) - base, -np.inf, np.inf, epsrel=1e-12)
    assert val == pytest.approx(RB87.muA * CONSTANTS.mu0 * ctx.I / 2, rel=1e-9)


@pytest.mark.parametrize("z", [1e-6, 2e-6])
def test_barrier_half_width_in_quoted_range(z):
    fwhm = barrier_profile(np.array([0.0]), _ctx(d=z), RB87).full_width_half_max
    assert 2e-6 <= fwhm <= 4e-6


def test_barrier_rejects_zero_height():
    class Flat:
        d = 0.0
        I = 1e-3
        B0 = 1e-4

    with pytest.raises(ValueError):
        x_wire_barrier(0.0, Flat(), RB87)


def test_lattice_zero_for_straight_wire():
    assert lattice_amplitude(LatticeSpec(1e-6, 0.0, 5e-3, 1e-6), RB87) == 0.0


def test_lattice_decreasing_in_height():
    zs = np.linspace(0.1e-6, 5e-6, 50)
    V = [lattice_amplitude(LatticeSpec(1e-6, 50e-9, 5e-3, z), RB87) for z in zs]
    assert np.all(np.diff(V) < 0)


@given(st.floats(0.1, 10), st.floats(0.1, 10))
def test_lattice_linear_in_current_and_amplitude(a, b):
    s = LatticeSpec(1e-6, 10e-9, 1e-3, 1e-6)
    v = lattice_amplitude(s, RB87)
    s2 = LatticeSpec(1e-6, 10e-9 * min(a, 9.9), 1e-3 * b, 1e-6)
    assert lattice_amplitude(s2, RB87) == pytest.approx(v * min(a, 9.9) * b, rel=1e-12)


def test_lattice_rejects_large_meander():
    with pytest.raises(ValueError):
        LatticeSpec(1e-6, 0.1e-6, 1e-3, 1e-6)


def test_lattice_frequency_scalings():
    s = LatticeSpec(1e-6, 10e-9, 1e-3, 1e-6)
    w = lattice_trap_frequency(s, RB87)
    w4 = lattice_trap_frequency(LatticeSpec(1e-6, 40e-9, 1e-3, 1e-6), RB87)
    assert w4 == pytest.approx(2 * w, rel=1e-12)
    V0 = lattice_amplitude(s, RB87)
    assert w == pytest.approx(math.sqrt(V0 * s.k**2 / RB87.mass), rel=1e-14)
    # k -> 2k at fixed V0 doubles omega
    assert math.sqrt(V0 * (2 * s.k) ** 2 / RB87.mass) == pytest.approx(2 * w)


def test_lattice_frequency_rejects_zero_depth():
    with pytest.raises(ValueError):
        lattice_trap_frequency(LatticeSpec(1e-6, 0.0, 1e-3, 1e-6), RB87)
