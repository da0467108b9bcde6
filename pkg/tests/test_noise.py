import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from atomchip.domain import CONSTANTS, RB87, RHO_AU_300K, ConductivityTensor, TrapContext, WireGeometry, magnetic_moment
from atomchip.noise import (
    QuasiStaticWarning,
    RateReport,
    alloy_noise_ratio,
    b_tensor,
    gate_ops_figure_of_merit,
    geometry_factors,
    heating_rate,
    power_spectrum,
    rate_report,
    skin_depth,
    spatial_decoherence_rate,
    spin_decoherence_rate,
    spin_flip_rate,
    suppression_ratio,
)

S_AU = 1 / RHO_AU_300K
GOLD = ConductivityTensor.isotropic(S_AU)
NANO = WireGeometry(50e-9, 50e-9, 1e-3)
FIG7 = WireGeometry(10e-6, 2.15e-6, 1e-2)


def _centre_factors(geom, d):
    p = geom.point_above(d)
    return geometry_factors(p, p, geom)


def test_square_wire_symmetry():
    # rotating the point by 90 degrees about the axis of a square wire swaps yy and zz
    side = geometry_factors([0.0, 0.2e-6, 0.0], [0.0, 0.2e-6, 0.0], NANO)
    top = geometry_factors([0.0, 0.0, 0.2e-6], [0.0, 0.0, 0.2e-6], NANO)
    assert side.Xyy == pytest.approx(top.Xzz, rel=1e-6)
    assert side.Xzz == pytest.approx(top.Xyy, rel=1e-6)
    assert side.Xxx == pytest.approx(top.Xxx, rel=1e-6)


def test_wide_thick_slab_approaches_half_space():
    d = 1e-6
    slab = WireGeometry(2e-3, 200e-6, 1e-1)
    X = geometry_factors(slab.point_above(d), slab.point_above(d), slab, extent=5e-3)
    expected = np.array([1, 1, 2]) * math.pi / (8 * d)
    np.testing.assert_allclose(X.diagonal, expected, rtol=0.01)


def test_points_inside_rejected():
    from atomchip.domain import PhysicsDomainError

    with pytest.raises(PhysicsDomainError):
        geometry_factors([0, 0, 0], [0, 0, 0], NANO)


def test_factors_symmetric_under_point_exchange():
    a = np.array([0.0, 0.1e-6, 0.4e-6])
    b = np.array([0.3e-6, -0.05e-6, 0.5e-6])
    np.testing.assert_allclose(geometry_factors(a, b, NANO).X, geometry_factors(b, a, NANO).X.T, rtol=1e-6,
                               atol=1e-9 * np.max(abs(geometry_factors(a, a, NANO).X)))


def test_only_yy_drops_when_wire_widens():
    narrow = _centre_factors(WireGeometry(30e-6, 1e-6, 1e-2), 5e-6)
    wide = _centre_factors(WireGeometry(200e-6, 1e-6, 1e-2), 5e-6)
    assert narrow.Xyy < 0.9 * wide.Xyy
    assert narrow.Xxx == pytest.approx(wide.Xxx, rel=0.10)
    assert narrow.Xzz == pytest.approx(wide.Xzz, rel=0.10)


def test_b_tensor_isotropic_and_limits():
    X = _centre_factors(NANO, 0.5e-6)
    B = b_tensor(GOLD, X)
    assert B[0, 0] == pytest.approx(S_AU * (X.Xyy + X.Xzz), rel=1e-12)
    assert B[1, 1] == pytest.approx(S_AU * (X.Xxx + X.Xzz), rel=1e-12)
    B0 = b_tensor(ConductivityTensor(S_AU, 0.0, 0.0), X)
    assert B0[0, 0] == 0.0


def test_spectrum_linear_in_temperature_and_zero_at_zero():
    p = NANO.point_above(0.5e-6)
    cold = power_spectrum(p, p, 0.0, ConductivityTensor.isotropic(S_AU, 0.0), NANO).S
    assert np.all(cold == 0)
    a = power_spectrum(p, p, 0.0, ConductivityTensor.isotropic(S_AU, 150.0), NANO).S
    b = power_spectrum(p, p, 0.0, ConductivityTensor.isotropic(S_AU, 300.0), NANO).S
    np.testing.assert_allclose(b, 2 * a)


def test_resistive_alloy_scales_spectrum():
    p = NANO.point_above(0.5e-6)
    a = power_spectrum(p, p, 0.0, GOLD, NANO).S
    b = power_spectrum(p, p, 0.0, ConductivityTensor.isotropic(S_AU / 70), NANO).S
    np.testing.assert_allclose(b, a / 70, rtol=1e-12)


def test_quasi_static_warning_for_thick_conductor():
    thick = WireGeometry(1e-3, 100e-6, 1e-1)
    p = thick.point_above(1e-6)
    with pytest.warns(QuasiStaticWarning):
        power_spectrum(p, p, 2 * math.pi * 1e6, GOLD, thick)


def test_skin_depth_values():
    assert skin_depth(S_AU, 2 * math.pi * 1e6) == pytest.approx(70e-6, rel=0.15)
    graphite = skin_depth(1e5, 2 * math.pi * 1e6)
    assert 0.3e-3 < graphite < 3e-3
    assert skin_depth(S_AU, 4.0) == pytest.approx(0.5 * skin_depth(S_AU, 1.0), rel=1e-14)
    with pytest.raises(ValueError):
        skin_depth(0.0, 1.0)


def test_spin_flip_zero_at_zero_temperature():
    ctx = TrapContext(d=0.5e-6, B0=1e-4)
    assert spin_flip_rate(ctx, RB87, ConductivityTensor.isotropic(S_AU, 0.0), NANO) == 0.0


def test_rates_linear_in_temperature_and_conductivity():
    ctx = TrapContext(d=0.5e-6, B0=1e-4)
    base = spin_flip_rate(ctx, RB87, GOLD, NANO)
    assert spin_flip_rate(ctx, RB87, ConductivityTensor.isotropic(S_AU, 600.0), NANO) == pytest.approx(2 * base)
    assert spin_flip_rate(ctx, RB87, ConductivityTensor.isotropic(2 * S_AU), NANO) == pytest.approx(2 * base)


def test_nanowire_spin_flip_regression():
    ctx = TrapContext(d=0.5e-6, B0=1e-4)
    assert 1 / spin_flip_rate(ctx, RB87, GOLD, NANO) == pytest.approx(4.05, rel=0.02)


def test_identical_states_do_not_dephase():
    ctx = TrapContext(d=0.5e-6, B0=1e-4)
    assert spin_decoherence_rate(ctx, RB87, GOLD, NANO, states=("|2,2>", "|2,2>")) == 0.0


def test_quasi_one_dimensional_decoherence_slope():
    ctx = TrapContext(d=5e-6)
    rs = np.geomspace(1e2, 1e4, 5)
    rates = [spin_decoherence_rate(ctx, RB87, ConductivityTensor(S_AU, S_AU / r, S_AU / r), FIG7) for r in rs]
    slope = np.polyfit(np.log(rs), np.log(rates), 1)[0]
    assert slope == pytest.approx(-1.0, abs=0.1)


def test_layered_conductor_barely_helps():
    ctx = TrapContext(d=5e-6)
    iso = spin_decoherence_rate(ctx, RB87, GOLD, FIG7)
    lay = [spin_decoherence_rate(ctx, RB87, ConductivityTensor(S_AU, S_AU, S_AU / r), FIG7) for r in (10, 1e4)]
    assert 0.8 < lay[1] / iso < lay[0] / iso < 1


def test_suppression_ratio_limits():
    X = _centre_factors(FIG7, 5e-6)
    assert suppression_ratio(GOLD, X) == 1.0
    layered = suppression_ratio(ConductivityTensor(S_AU, S_AU, S_AU * 1e-6), X)
    assert layered == pytest.approx(1 / (1 + X.Xyy / X.Xzz), rel=0.05)
    quasi = suppression_ratio(ConductivityTensor(S_AU, S_AU / 1000, S_AU / 1000), X)
    assert 0.5e-3 <= quasi <= 2e-3


def test_spatial_decoherence_zero_monotone_and_limit():
    ctx = TrapContext(d=0.5e-6)
    c = NANO.point_above(0.5e-6)
    assert spatial_decoherence_rate(c, c, ctx, RB87, GOLD, NANO) == 0.0
    seps = [0.1e-6, 0.3e-6, 1e-6, 3e-6, 10e-6, 50e-6]
    g = [spatial_decoherence_rate(c, c + [s, 0, 0], ctx, RB87, GOLD, NANO) for s in seps]
    assert all(b >= a for a, b in zip(g, g[1:]))
    S11 = power_spectrum(c, c, 0.0, GOLD, NANO).S[0, 0]
    mu = magnetic_moment(RB87, "|2,2>")
    assert g[-1] == pytest.approx(mu**2 * 2 * S11 / (2 * CONSTANTS.hbar**2), rel=1e-3)


def test_uniform_noise_drives_no_dipole_transition():
    ctx = TrapContext(d=0.5e-6, trap_frequencies=(0.0, 0.0, 2 * math.pi * 1e4))
    rate = heating_rate(ctx, RB87, GOLD, NANO, spectrum=lambda a, b: 1e-20)
    assert rate == pytest.approx(0.0, abs=1e-12 * (magnetic_moment(RB87, "|2,2>") / CONSTANTS.hbar) ** 2 * 1e-20)


def test_heating_linear_in_temperature():
    ctx = TrapContext(d=0.5e-6, trap_frequencies=(0.0, 0.0, 2 * math.pi * 1e4))
    a = heating_rate(ctx, RB87, ConductivityTensor.isotropic(S_AU, 150.0), NANO)
    b = heating_rate(ctx, RB87, GOLD, NANO)
    assert b == pytest.approx(2 * a, rel=1e-10)


def test_heating_matches_taylor_expansion_for_tight_trap():
    omega = 2 * math.pi * 1e6
    ctx = TrapContext(d=0.5e-6, trap_frequencies=(0.0, 0.0, omega))
    ell = math.sqrt(CONSTANTS.hbar / (RB87.mass * omega))
    c = NANO.point_above(0.5e-6)
    e = np.array([0.0, 0.0, 1.0])
    h = 20e-9

    def S(a, b):
        return power_spectrum(c + a * e, c + b * e, 0.0, GOLD, NANO).S[0, 0]

    mixed = (S(h, h) - S(h, -h) - S(-h, h) + S(-h, -h)) / (4 * h * h)
    mu = magnetic_moment(RB87, "|2,2>")
    taylor = (mu / CONSTANTS.hbar) ** 2 * ell**2 / 2 * mixed
    assert heating_rate(ctx, RB87, GOLD, NANO) == pytest.approx(taylor, rel=0.10)


def test_heating_rejects_unknown_transition():
    ctx = TrapContext(d=0.5e-6, trap_frequencies=(0.0, 0.0, 1e4))
    with pytest.raises(ValueError):
        heating_rate(ctx, RB87, GOLD, NANO, transition=3)


def test_alloy_noise_limits():
    pure = [alloy_noise_ratio(T, 0.0) for T in (100.0, 30.0, 10.0)]
    assert pure[0] < pure[1] < pure[2]
    assert alloy_noise_ratio(1e-3, 1e-6) < alloy_noise_ratio(1.0, 1e-6) < 1e-3
    assert alloy_noise_ratio(300.0, 0.0) == pytest.approx(1.0)


def test_silver_gold_alloy_at_liquid_helium():
    ratio = alloy_noise_ratio(4.2, RHO_AU_300K, debye_temp=215.0)
    assert 1 / ratio == pytest.approx(70, rel=0.05)


def test_gate_ops_division_and_minimum():
    assert gate_ops_figure_of_merit(RateReport(0.1, 0.1, tunneling=0.1), 1e-3) == pytest.approx(1e4)
    worse = RateReport(0.1, 10.0, tunneling=0.1)
    assert gate_ops_figure_of_merit(worse, 1e-3) == pytest.approx(100)
    with pytest.raises(ValueError):
        gate_ops_figure_of_merit(worse, 0.0)
    with pytest.raises(ValueError):
        RateReport(-1.0, 0.0)


def test_rate_report_collects_channels():
    ctx = TrapContext(d=0.5e-6, B0=1e-4, trap_frequencies=(0.0, 0.0, 2 * math.pi * 1e4))
    rep = rate_report(ctx, RB87, GOLD, NANO, tunneling=1e-3, heating=True, separation=1e-6)
    assert rep.spin_flip == pytest.approx(spin_flip_rate(ctx, RB87, GOLD, NANO))
    assert rep.heating01 > 0 and rep.heating02 > 0 and rep.spatial_decoherence > 0
    assert rep.lifetimes["tunneling"] == pytest.approx(1e3)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.2e-6, 2e-6), st.floats(1.2, 3.0))
def test_noise_falls_with_height(d, factor):
    ctx1, ctx2 = TrapContext(d=d, B0=1e-4), TrapContext(d=d * factor, B0=1e-4)
    assert spin_flip_rate(ctx2, RB87, GOLD, NANO) < spin_flip_rate(ctx1, RB87, GOLD, NANO)
