import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from atomchip.domain import CONSTANTS, RB87, PhysicsDomainError, TrapContext
from atomchip.magnetostatics import LatticeSpec, lattice_amplitude, lattice_trap_frequency
from atomchip.traps import RB87_SCATTERING_LENGTH, SideGuideTrap
from atomchip.domain import WireGeometry
from atomchip.tunneling import (
    crossing_current_for_probability,
    crossing_probability,
    current_sensitivity,
    de_broglie_wavelength,
    resolution_height,
    thomas_fermi_density,
    wkb_probability,
)

KB_UK = CONSTANTS.kB * 1e-6
M = RB87.mass


def test_flat_potential_below_energy_gives_unity():
    x = np.linspace(0, 1e-6, 100)
    res = wkb_probability(x, np.full_like(x, 0.5 * KB_UK), KB_UK, M)
    assert res.probability == 1.0 and res.turning_points == () and res.action == 0.0


def test_square_barrier_matches_closed_form():
    U, E, a = 2 * KB_UK, KB_UK, 1e-6
    x = np.arange(-1e-6, 2e-6, 0.3e-9)
    V = np.where((x >= 0) & (x <= a), U, 0.0)
    res = wkb_probability(x, V, E, M)
    exact = 2 * a * math.sqrt(2 * M * (U - E)) / CONSTANTS.hbar
    assert res.action == pytest.approx(exact, rel=1e-3)
    assert res.probability == pytest.approx(math.exp(-exact), rel=5e-2)
    x1, x2 = res.turning_points
    assert x1 < 0.5 * a < x2


def test_turning_points_bracket_maximum_and_solve_v_equals_e():
    x = np.linspace(-5e-6, 5e-6, 2001)
    V = 3 * KB_UK / (1 + (x / 1e-6) ** 2)
    res = wkb_probability(x, V, KB_UK, M)
    x1, x2 = res.turning_points
    expected = math.sqrt(2) * 1e-6
    assert x1 == pytest.approx(-expected, rel=1e-6)
    assert x2 == pytest.approx(expected, rel=1e-6)
    assert 0 <= res.probability <= 1 and res.action >= 0


def test_de_broglie_scale_at_one_microkelvin():
    assert de_broglie_wavelength(KB_UK, M) == pytest.approx(0.33e-6, rel=0.02)


def test_barrier_touching_grid_edge_rejected():
    x = np.linspace(0, 1e-6, 200)
    with pytest.raises(PhysicsDomainError):
        wkb_probability(x, np.linspace(3, 0, 200) * KB_UK, KB_UK, M)


def test_under_resolved_barrier_warns():
    x = np.linspace(-5e-6, 5e-6, 41)
    V = 3 * KB_UK / (1 + (x / 1e-6) ** 2)
    with pytest.warns(RuntimeWarning, match="samples between"):
        wkb_probability(x, V, KB_UK, M)


def test_sensitivity_identity():
    ctx = TrapContext(d=1e-6)
    assert current_sensitivity(1e-6, 0.01, 0.01, ctx, RB87) == 0.0


def test_sensitivity_rejects_bad_order():
    with pytest.raises(ValueError):
        current_sensitivity(1e-6, 0.1, 0.01, TrapContext(d=1e-6), RB87)


def test_sensitivity_anchor_values():
    ctx = TrapContext(d=1e-6)
    assert current_sensitivity(10e-6, 1e-3, 0.1, ctx, RB87) < 0.05
    assert current_sensitivity(1e-6, 1e-3, 0.1, ctx, RB87) > 0.10


def test_probability_strictly_decreasing_in_current():
    E = KB_UK
    I0 = crossing_current_for_probability(0.5, 2e-6, E, RB87)
    Is = I0 * np.linspace(1.0, 3.0, 25)
    P = [crossing_probability(I, 2e-6, E, RB87) for I in Is]
    assert np.all(np.diff(P) < 0)


def test_current_for_probability_round_trip():
    E = KB_UK
    I = crossing_current_for_probability(1e-3, 1e-6, E, RB87)
    assert crossing_probability(I, 1e-6, E, RB87) == pytest.approx(1e-3, rel=1e-8)


def test_exponent_factor_two_equals_factor_one_at_double_height():
    ctx = TrapContext(d=1e-6)
    a = current_sensitivity(1e-6, 1e-3, 0.1, ctx, RB87, exponent_factor=2.0)
    b = current_sensitivity(2e-6, 1e-3, 0.1, ctx, RB87, exponent_factor=1.0)
    assert a == pytest.approx(b, rel=1e-6)


def test_resolution_anchor_heights():
    for I in (0.5e-3, 5e-3):
        assert 0 < resolution_height(1e-6, I, 2.0, RB87) <= 2.0e-6
    ratio = resolution_height(1e-6, 50e-3, 2.0, RB87) / resolution_height(1e-6, 0.05e-3, 2.0, RB87)
    assert ratio == pytest.approx(2.0, rel=0.3)


def test_resolution_boundary_consistency():
    lam, I, eta = 1e-6, 5e-3, 2.0
    d = resolution_height(lam, I, eta, RB87)
    spec = LatticeSpec(lam, lam / 20, I, d)
    V0 = lattice_amplitude(spec, RB87)
    need = eta**2 / 16 * CONSTANTS.hbar**2 * spec.k**2 / M
    assert V0 == pytest.approx(need, rel=1e-9)
    w = lattice_trap_frequency(spec, RB87)
    # 2 V0 = eta hbar omega / 2 on the boundary, and strictly larger just below it
    assert 2 * V0 == pytest.approx(0.5 * eta * CONSTANTS.hbar * w, rel=1e-8)
    inner = LatticeSpec(lam, lam / 20, I, 0.9 * d)
    assert 2 * lattice_amplitude(inner, RB87) > 0.5 * eta * CONSTANTS.hbar * lattice_trap_frequency(inner, RB87)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.1e-3, 20e-3), st.floats(1.05, 3.0))
def test_resolution_monotone_in_current(I, factor):
    assert resolution_height(1e-6, I * factor, 2.0, RB87) > resolution_height(1e-6, I, 2.0, RB87)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.5, 20.0), st.floats(1.05, 3.0))
def test_resolution_decreasing_in_eta(eta, factor):
    assert resolution_height(1e-6, 5e-3, eta * factor, RB87) < resolution_height(1e-6, 5e-3, eta, RB87)


def test_resolution_unbounded_demand_gives_zero():
    assert resolution_height(1e-6, 5e-3, 1e12, RB87) == 0.0


def _nanowire_guide(d=0.5e-6, **kw):
    geom = WireGeometry(50e-9, 50e-9, 1e-3)
    return SideGuideTrap(d, 40e-6, geom, 2e-6, 2 * math.pi * 50, **kw)


def test_single_atom_density_is_ground_state_gaussian():
    ctx = TrapContext(d=1e-6, trap_frequencies=(100.0, 2e3, 3e3), N=1)
    dens = thomas_fermi_density(ctx, RB87, RB87_SCATTERING_LENGTH)
    assert not dens.is_thomas_fermi
    np.testing.assert_allclose(dens.radii, np.sqrt(CONSTANTS.hbar / (M * np.array([100.0, 2e3, 3e3]))))
    assert dens.integral() == pytest.approx(1.0, rel=1e-6)


def test_thomas_fermi_normalization():
    dens = thomas_fermi_density(_nanowire_guide().context(1000), RB87, RB87_SCATTERING_LENGTH)
    assert dens.is_thomas_fermi
    assert dens.integral() == pytest.approx(1000, rel=1e-3)
    assert np.all(dens.n >= 0)


def test_thomas_fermi_chemical_potential_regression():
    dens = thomas_fermi_density(_nanowire_guide().context(1000), RB87, RB87_SCATTERING_LENGTH)
    assert dens.mu / KB_UK == pytest.approx(1.0204012, rel=1e-6)


def test_density_rejects_bad_frequencies():
    with pytest.raises(ValueError):
        thomas_fermi_density(TrapContext(d=1e-6, N=10), RB87, RB87_SCATTERING_LENGTH)


def test_no_attraction_and_high_barrier_is_effectively_stable():
    assert _nanowire_guide(cp_mode="none").tunneling(1000).lifetime > 1e4


def test_loss_rate_grows_with_attraction_strength():
    rates = [_nanowire_guide(cp_scale=s).tunneling(1000).rate for s in (0.5, 1.0, 2.0)]
    assert rates[0] < rates[1] < rates[2]


def test_barrier_free_columns_flagged():
    res = _nanowire_guide(d=0.2e-6).tunneling(1000)
    assert res.barrier_free > 0
    assert res.lifetime < 1e-3


def test_cp_barrier_reduction_turns_infinite_lifetime_finite():
    bare = _nanowire_guide(cp_mode="none").tunneling(1000).lifetime
    with_cp = _nanowire_guide().tunneling(1000).lifetime
    assert bare > 1e10 and with_cp < 1e4
