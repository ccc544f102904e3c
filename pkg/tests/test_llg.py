import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nandspin.constants import CONSTANTS
from nandspin.errors import ConfigurationError, InputDomainError
from nandspin.llg import (AnisotropyKind, FreeLayerParams, TorqueDrive, anisotropy_energy, integrate_step,
                          llg_rhs, settled_crossing, simulate_switching, stt_efficiency, thermal_tilt, unit)

PERP = FreeLayerParams(Ms=1.1e6, alpha=0.02, t_F=1.1e-9, area=np.pi * 20e-9 ** 2,
                       anisotropy_kind="perpendicular")
INPLANE = FreeLayerParams(Ms=1.1e6, alpha=0.02, t_F=1.1e-9, area=60e-9 * 40e-9,
                          anisotropy_kind="in-plane", easy_axis=(1.0, 0.0, 0.0), demag_field=1e5)

unit_vectors = st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)).filter(
    lambda v: np.linalg.norm(v) > 0.1).map(unit)


@given(st.floats(-1, 1), st.floats(0.05, 0.95), st.floats(1.0, 4.0))
def test_stt_efficiency_between_parallel_and_antiparallel_values(c, P, lam):
    phi = stt_efficiency(c, P, lam)
    assert P - 1e-12 <= phi <= P * lam * lam + 1e-12


@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(0.05, 0.95), st.floats(1.0, 4.0))
def test_stt_efficiency_decreases_toward_parallel(a, b, P, lam):
    lo, hi = sorted((a, b))
    assert stt_efficiency(hi, P, lam) <= stt_efficiency(lo, P, lam) + 1e-12


def test_stt_efficiency_domain():
    with pytest.raises(InputDomainError):
        stt_efficiency(1.2, 0.6, 1.3)
    with pytest.raises(InputDomainError):
        stt_efficiency(0.0, 0.6, 0.9)


def test_anisotropy_field_from_barrier():
    hk = 2 * 40 * CONSTANTS.kB * 300 / (CONSTANTS.mu0 * PERP.Ms * PERP.volume)
    assert PERP.anisotropy_field() == pytest.approx(hk, rel=1e-12)


@settings(max_examples=60)
@given(unit_vectors, st.floats(-5e11, 5e11), st.floats(-5e11, 5e11))
def test_rhs_is_tangent_to_sphere(m, j_stt, j_she):
    drive = TorqueDrive(J_stt=j_stt, J_she=j_she, sigma_she=(0.0, 1.0, 0.0))
    assert abs(m @ llg_rhs(m, drive, PERP)) < 1e-6 * np.linalg.norm(llg_rhs(m, drive, PERP)) + 1e-3


@settings(max_examples=40)
@given(unit_vectors, st.floats(1e9, 5e11), st.sampled_from([-1.0, 1.0]))
def test_stt_term_matches_closed_form(m, j, sign):
    j *= sign
    p = np.array([0.0, 0.0, 1.0])
    drive = TorqueDrive(m_p=tuple(p))
    a = PERP.alpha
    b = PERP.torque_prefactor() * stt_efficiency(float(np.clip(m @ p, -1, 1)), drive.P, drive.Lambda) * j
    expect = (-b * np.cross(m, np.cross(m, p)) + a * b * np.cross(m, p)) / (1 + a * a)
    base = llg_rhs(m, drive, PERP)
    got = llg_rhs(m, drive.with_currents(J_stt=j), PERP) - base
    assert np.allclose(got, expect, rtol=1e-9, atol=1e-12 * np.linalg.norm(base) + 1e-9 * abs(b))


def test_precession_period_matches_larmor_frequency():
    m0 = unit([np.sin(0.02), 0.0, np.cos(0.02)])
    res = simulate_switching(m0, TorqueDrive(), PERP, 1e-9, 0.5e-12)
    mx = res.trajectory[:, 0]
    ups = np.flatnonzero((mx[:-1] < 0) & (mx[1:] >= 0))
    t_up = res.times[ups] - mx[ups] * (res.times[ups + 1] - res.times[ups]) / (mx[ups + 1] - mx[ups])
    period = float(np.mean(np.diff(t_up)))
    omega = CONSTANTS.gamma * CONSTANTS.mu0 * PERP.anisotropy_field() * np.cos(0.02) / (1 + PERP.alpha ** 2)
    assert period == pytest.approx(2 * np.pi / omega, rel=2e-3)


@pytest.mark.parametrize("fl", [PERP, INPLANE], ids=["perpendicular", "in-plane"])
def test_damping_relaxes_energy_and_preserves_norm(fl):
    m0 = unit(fl.easy + np.array([0.3, 0.4, 0.2]))
    res = simulate_switching(m0, TorqueDrive(m_p=tuple(fl.easy)), fl, 1e-9, 1e-12)
    e = np.array([anisotropy_energy(m, fl) for m in res.trajectory])
    assert np.all(np.diff(e) <= 1e-12 * abs(e[0]))
    assert np.max(np.abs(np.linalg.norm(res.trajectory, axis=1) - 1)) < 1e-12


def test_stt_switches_antiparallel_to_parallel():
    j = 1.5e11
    m0 = thermal_tilt(-PERP.easy, PERP)
    res = simulate_switching(m0, TorqueDrive(J_stt=j), PERP, 10e-9, 1e-12)
    assert res.switch_time is not None
    assert res.final @ PERP.easy > 0.9


def test_sot_with_bias_field_switches_perpendicular_layer():
    hk = PERP.anisotropy_field()
    drive = TorqueDrive(J_she=-3e12, sigma_she=(0.0, 1.0, 0.0), H_ext=(0.05 * hk, 0.0, 0.0))
    m0 = thermal_tilt(PERP.easy, PERP)
    relax = drive.with_currents()
    both = [simulate_switching(m0, [(0.0, d), (1e-9, relax)], PERP, 5e-9, 1e-12).final @ PERP.easy
            for d in (drive, drive.with_currents(J_she=3e12))]
    assert min(both) < -0.9 < 0.9 < max(both)


def test_dt_limit_enforced():
    with pytest.raises(ConfigurationError):
        integrate_step(PERP.easy, TorqueDrive(), PERP, 3e-12)


def test_settled_crossing_interpolates_last_entry():
    t = np.array([0.0, 1.0, 2.0, 3.0, 4.0])
    s = np.array([0.0, 1.0, 0.5, 0.8, 1.0])
    assert settled_crossing(t, s, 1.0) == pytest.approx(3.5)
    assert settled_crossing(t, -s, 1.0) is None


@given(unit_vectors)
def test_thermal_tilt_reaches_cone(m):
    out = thermal_tilt(m, PERP)
    angle = np.arccos(min(1.0, abs(out @ PERP.easy)))
    assert angle >= PERP.thermal_cone_angle - 1e-9
    assert np.sign(out @ PERP.easy) == np.sign(m @ PERP.easy) or abs(m @ PERP.easy) < 1e-12


def test_in_plane_tilt_stays_in_plane():
    out = thermal_tilt(INPLANE.easy, INPLANE)
    assert abs(out[2]) < 1e-12


def test_free_layer_validation():
    with pytest.raises(ConfigurationError):
        FreeLayerParams(Ms=1e6, alpha=1.5, t_F=1e-9, area=1e-15, anisotropy_kind=AnisotropyKind.PERPENDICULAR)
    with pytest.raises(ConfigurationError):
        FreeLayerParams(Ms=1e6, alpha=0.01, t_F=1e-9, area=1e-15, anisotropy_kind="perpendicular",
                        easy_axis=(1.0, 1.0, 0.0))
