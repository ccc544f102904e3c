import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nandspin.designs import DesignKind
from nandspin.errors import InputDomainError, PreconditionError
from nandspin.experiments import nominal_erase_current
from nandspin.modes import default_erase_width
from nandspin.nand_spin import (DeviceKind, MtjState, StoredBit, decode_state, erase_pulse, make_device,
                                program_pulse, terminal_currents_to_densities)

STATES = [MtjState.P, MtjState.AP]
ERASE_CURRENT = {}


def erase_current(kind: DesignKind) -> float:
    if kind not in ERASE_CURRENT:
        ERASE_CURRENT[kind] = nominal_erase_current(kind)
    return ERASE_CURRENT[kind]


@pytest.mark.parametrize("s1,s2,bit", [("AP", "AP", "erased"), ("AP", "P", "1"), ("P", "AP", "0"),
                                       ("P", "P", "invalid")])
def test_decode_table(s1, s2, bit):
    dev = make_device(DeviceKind.P_TYPE, "y").with_states(MtjState(s1), MtjState(s2))
    assert decode_state(dev) is StoredBit(bit)


def test_tilted_midway_layer_is_invalid():
    dev = make_device(DeviceKind.P_TYPE, "y")
    dev = dev.with_magnetizations([1.0, 0.0, 0.0], dev.mtj2.m)
    assert decode_state(dev) is StoredBit.INVALID


@settings(max_examples=8, deadline=None)
@given(st.sampled_from([DesignKind.P_Y, DesignKind.P_X, DesignKind.I_Y, DesignKind.I_X]),
       st.sampled_from(STATES), st.sampled_from(STATES))
def test_erase_reaches_antiparallel_from_any_state(kind, s1, s2):
    dev = make_device(kind.device_kind, kind.geometry).with_states(s1, s2)
    out = erase_pulse(dev, erase_current(kind), default_erase_width(kind))
    assert decode_state(out) is StoredBit.ERASED


def test_weak_erase_leaves_parallel_layer():
    dev = make_device(DeviceKind.P_TYPE, "y").with_states(MtjState.P, MtjState.P)
    assert decode_state(erase_pulse(dev, 10e-6, 1e-9)) is StoredBit.INVALID


@pytest.mark.parametrize("branch,bit", [("mtj1", StoredBit.BIT0), ("mtj2", StoredBit.BIT1)])
def test_program_sets_one_layer_parallel(branch, bit):
    dev = make_device(DeviceKind.P_TYPE, "y").with_states(MtjState.AP, MtjState.AP)
    assert decode_state(program_pulse(dev, branch, 80e-6, 3e-9)) is bit


def test_program_needs_erased_device():
    dev = make_device(DeviceKind.P_TYPE, "y").with_states(MtjState.P, MtjState.AP)
    with pytest.raises(PreconditionError):
        program_pulse(dev, "mtj2", 80e-6, 1e-9)
    with pytest.raises(InputDomainError):
        program_pulse(dev.with_states(MtjState.AP, MtjState.AP), "mtj3", 80e-6, 1e-9)


def test_current_densities_keep_sign():
    dev = make_device(DeviceKind.I_TYPE, "x")
    j_she, j1, j2 = terminal_currents_to_densities(dev, -1e-4, 2e-5, 0.0)
    assert j_she == pytest.approx(-1e-4 / dev.strip.cross_section)
    assert j1 == pytest.approx(2e-5 / dev.mtj1.layer.area) and j2 == 0.0


def test_spin_polarization_lies_in_plane_and_normal_to_current():
    for g in ("x", "y"):
        dev = make_device(DeviceKind.I_TYPE, g)
        assert abs(dev.sigma @ dev.strip.current_axis) < 1e-12
        assert abs(dev.sigma[2]) < 1e-12
        assert np.linalg.norm(dev.sigma) == pytest.approx(1.0)
