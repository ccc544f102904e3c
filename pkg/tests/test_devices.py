import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nandspin.devices import (HeavyMetalStrip, MtjParams, Polarity, TransistorParams, channel_current,
                              heavy_metal_resistance, mtj_conductance, node_capacitance, transistor_current)
from nandspin.errors import ConfigurationError, InputDomainError

NFET = TransistorParams(Polarity.NFET, W=300e-9)
PFET = TransistorParams(Polarity.PFET, W=400e-9, Vth=-0.45)


def test_mtj_resistance_from_ra_and_area():
    p = MtjParams(area=1.6e-15, RA=5e-12, TMR0=1.2)
    assert p.R_P == pytest.approx(3125.0, rel=1e-12)
    assert p.R_AP0 == pytest.approx(6875.0, rel=1e-12)


def test_tmr_halves_at_roll_off_voltage():
    p = MtjParams(area=1.6e-15)
    g_ap = mtj_conductance(-1.0, p.Vh, p)
    assert 1.0 / g_ap / p.R_P - 1.0 == pytest.approx(p.TMR0 / 2, rel=1e-12)


def test_conductance_rejects_bad_angle():
    with pytest.raises(InputDomainError):
        mtj_conductance(1.5, 0.0, MtjParams(area=1e-15))


@given(st.floats(-1, 1), st.floats(-1.5, 1.5))
def test_conductance_bounded_by_p_and_ap(c, v):
    p = MtjParams(area=1.6e-15)
    g = mtj_conductance(c, v, p)
    assert mtj_conductance(-1.0, v, p) - 1e-18 <= g <= p.G_P + 1e-18


def test_strip_resistance_follows_current_axis():
    y = HeavyMetalStrip(w=60e-9, l=40e-9, d=5e-9, rho=1e-6, orientation="y")
    x = HeavyMetalStrip(w=60e-9, l=40e-9, d=5e-9, rho=1e-6, orientation="x")
    assert heavy_metal_resistance(y) == pytest.approx(1e-6 * 40e-9 / (60e-9 * 5e-9))
    assert heavy_metal_resistance(x) == pytest.approx(1e-6 * 60e-9 / (40e-9 * 5e-9))


def test_strip_rejects_zero_dimension():
    with pytest.raises(ConfigurationError):
        HeavyMetalStrip(w=0.0, l=1e-9, d=1e-9)


def test_transistor_off_below_threshold():
    assert transistor_current(NFET, 0.3, 1.0) == 0.0
    assert transistor_current(PFET, -0.3, -1.0) == 0.0


def test_saturation_current_alpha_power():
    vov = 1.1 - 0.45
    expect = NFET.beta * vov ** NFET.alpha_sat * (1 + NFET.lambda_ch * 1.1)
    assert transistor_current(NFET, 1.1, 1.1) == pytest.approx(expect, rel=1e-12)


def test_pfet_mirrors_nfet():
    n = TransistorParams(Polarity.NFET, W=400e-9)
    p = TransistorParams(Polarity.PFET, W=400e-9, Vth=-0.45)
    assert transistor_current(p, -1.0, -0.7) == pytest.approx(-transistor_current(n, 1.0, 0.7))


@given(st.floats(0.0, 1.1), st.floats(-1.1, 1.1))
def test_current_zero_at_zero_vds_and_sign_follows_vds(vg, vds):
    i = transistor_current(NFET, vg, vds)
    assert transistor_current(NFET, vg, 0.0) == 0.0
    assert i * vds >= 0.0


@given(st.floats(0.46, 1.1), st.floats(0.0, 1.1), st.floats(0.0, 1.1))
def test_current_monotone_in_vds(vgs, a, b):
    lo, hi = sorted((a, b))
    assert channel_current(1e-3, 0.45, 1.3, 0.1, vgs, lo) <= channel_current(1e-3, 0.45, 1.3, 0.1, vgs, hi) + 1e-18


@settings(max_examples=50)
@given(st.floats(0.5, 1.1), st.floats(0.0, 1.1))
def test_current_continuous_across_source_drain_swap(vg, vs):
    # node-voltage view: drain and source swap roles without a jump
    eps = 1e-9
    left = transistor_current(NFET, vg - vs, eps)
    right = transistor_current(NFET, vg - vs, -eps)
    assert abs(left - right) < 1e-9


def test_node_capacitance_sums_gates():
    c = node_capacitance([NFET, PFET], C_par=1e-15)
    assert c == pytest.approx(1e-15 + NFET.gate_capacitance + PFET.gate_capacitance)


def test_transistor_validation():
    with pytest.raises(ConfigurationError):
        TransistorParams(Polarity.NFET, W=-1.0)
    with pytest.raises(ConfigurationError):
        TransistorParams(Polarity.NFET, W=1e-7, alpha_sat=2.5)
