"""Cross-module invariants: physics properties and design-level orderings."""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nandspin.designs import DesignDescriptor, DesignKind, build_design
from nandspin.devices import (HeavyMetalStrip, MtjParams, Polarity, TransistorParams, heavy_metal_resistance,
                              mtj_conductance, transistor_current)
from nandspin.experiments import backup_metrics, compare_designs
from nandspin.llg import llg_rhs, simulate_switching, thermal_tilt, unit
from nandspin.modes import Mode, NvffSession
from nandspin.nand_spin import DeviceKind, make_device

NFET = TransistorParams(Polarity.NFET, W=300e-9)
PFET = TransistorParams(Polarity.PFET, W=400e-9, Vth=-0.45)


@settings(max_examples=100)
@given(st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)).filter(lambda v: np.linalg.norm(v) > 0.1),
       st.floats(-1e12, 1e12), st.floats(-1e12, 1e12), st.sampled_from(list(DeviceKind)))
def test_rhs_orthogonal_to_m(v, jstt, jshe, kind):
    dev = make_device(kind, "y")
    m = unit(v)
    dm = llg_rhs(m, dev.drive(dev.mtj1, jstt, jshe), dev.mtj1.layer)
    assert abs(m @ dm) <= 1e-10 * np.linalg.norm(dm) + 1e-300


def _min_switching_density(b, dev, from_ap: bool) -> float:
    m0 = thermal_tilt(-b.m_p if from_ap else b.m_p, b.layer)
    sign = 1.0 if from_ap else -1.0

    def margin(j):
        r = simulate_switching(m0, dev.drive(b, J_stt=sign * j), b.layer, 5e-9, 2e-12, record_every=50)
        return 0.5 if r.switch_time is not None else -0.5

    lo, hi = 1e9, 1e13
    for _ in range(40):
        mid = np.sqrt(lo * hi)
        lo, hi = (lo, mid) if margin(mid) > 0 else (mid, hi)
    return hi


def test_stt_threshold_asymmetry_tracks_lambda_squared():
    dev = make_device(DeviceKind.P_TYPE, "y")
    b = dev.mtj1
    j_ap_p = _min_switching_density(b, dev, True)
    j_p_ap = _min_switching_density(b, dev, False)
    assert j_ap_p < j_p_ap
    assert j_p_ap / j_ap_p == pytest.approx(dev.Lambda ** 2, rel=0.25)


@given(st.floats(0.0, 1.5), st.floats(0.0, 1.5))
def test_ap_resistance_falls_with_bias_and_p_resistance_does_not(a, b):
    p = MtjParams(area=1.6e-15)
    lo, hi = sorted((a, b))
    if hi - lo > 1e-6:
        assert 1 / mtj_conductance(-1.0, hi, p) < 1 / mtj_conductance(-1.0, lo, p)
    assert mtj_conductance(1.0, hi, p) == mtj_conductance(1.0, lo, p)


@given(st.floats(0.0, 1.1), st.floats(0.0, 1.1), st.floats(0.0, 1.1))
def test_transistor_current_monotone_in_gate_drive(a, b, vds):
    lo, hi = sorted((a, b))
    assert transistor_current(NFET, lo, vds) <= transistor_current(NFET, hi, vds)
    assert abs(transistor_current(PFET, -lo, -vds)) <= abs(transistor_current(PFET, -hi, -vds))


@settings(max_examples=100)
@given(st.floats(1e-8, 1e-6), st.floats(1e-8, 1e-6), st.floats(1e-9, 1e-8), st.floats(1e-7, 1e-5),
       st.sampled_from(["x", "y"]))
def test_strip_resistance_matches_rho_l_over_a(w, l, d, rho, orient):
    r = heavy_metal_resistance(HeavyMetalStrip(w, l, d, rho, orient))
    expect = rho * l / (w * d) if orient == "y" else rho * w / (l * d)
    assert r == pytest.approx(expect, rel=1e-12)


def test_identical_runs_are_bit_identical():
    def run():
        s = NvffSession(build_design(DesignDescriptor(kind=DesignKind.I_Y)))
        return s.run(Mode.ACTIVE, 1).trace

    a, b = run(), run()
    assert np.array_equal(a.v, b.v) and np.array_equal(a.m, b.m) and np.array_equal(a.e_cum, b.e_cum)


@pytest.fixture(scope="module")
def comparison():
    reps = compare_designs([DesignDescriptor(kind=DesignKind(k)) for k in ("p-y", "i-y", "p-x", "i-x")])
    return {r.design: r for r in reps}


@pytest.mark.parametrize("geometry", ["x", "y"])
def test_perpendicular_backup_cheaper_than_in_plane(comparison, geometry):
    p = comparison[f"p-{geometry}"].metric("backup").energy
    i = comparison[f"i-{geometry}"].metric("backup").energy
    assert p < i


@pytest.mark.parametrize("kind", ["p", "i"])
def test_x_type_erase_slower_than_y_type(comparison, kind):
    x = comparison[f"{kind}-x"].metric("erase").delay
    y = comparison[f"{kind}-y"].metric("erase").delay
    assert x > y


@pytest.mark.parametrize("kind,limit", [("p-x", 0.05), ("i-x", 0.05), ("p-y", 0.10), ("i-y", 0.10)])
def test_program_delay_symmetric_between_bits(kind, limit):
    d = [backup_metrics(DesignDescriptor(kind=DesignKind(kind)), data=b).delay for b in (0, 1)]
    assert abs(d[0] - d[1]) / np.mean(d) < limit
