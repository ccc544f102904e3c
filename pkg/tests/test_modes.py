import numpy as np
import pytest

from nandspin.designs import DesignDescriptor, DesignKind, build_design
from nandspin.errors import SequencingError
from nandspin.experiments import full_cycle
from nandspin.modes import Mode, ModeTiming, NvffSession, concat_traces, default_erase_width, latched_bit

PY = DesignDescriptor(kind=DesignKind.P_Y)


def session(d=PY, timing=None):
    return NvffSession(build_design(d), timing)


@pytest.mark.parametrize("order", [
    [Mode.BACKUP],
    [Mode.RESTORE],
    [Mode.ACTIVE, Mode.RESTORE],
    [Mode.ACTIVE, Mode.BACKUP, Mode.BACKUP],
    [Mode.ACTIVE, Mode.BACKUP, Mode.STANDBY, Mode.BACKUP],
])
def test_illegal_mode_orders_raise(order):
    s = session()
    with pytest.raises(SequencingError):
        for mode in order:
            s.run(mode, 1)


@pytest.mark.parametrize("data", [0, 1])
def test_p_y_cycle_stages(data):
    s = session()
    act = s.run(Mode.ACTIVE, data)
    assert act.ok and act.details["stored"] == "erased" and act.details["latched"] == data
    bak = s.run(Mode.BACKUP)
    assert bak.ok and bak.details["stored"] == str(data)
    sby = s.run(Mode.STANDBY)
    assert sby.details["stored"] == str(data)
    assert abs(sby.energy) < 1e-16                                # supply is gated off
    rst = s.run(Mode.RESTORE)
    assert rst.ok and rst.details["restored"] == data and latched_bit(rst.state) == data
    assert all(r.energy is None or r.energy >= 0 for r in s.history)


def test_repeated_active_then_backup():
    s = session()
    s.run(Mode.ACTIVE, 1)
    s.run(Mode.ACTIVE, 0)
    bak = s.run(Mode.BACKUP)
    assert bak.ok and bak.details["stored"] == "0"


def test_backup_without_erase_is_flagged():
    # a pulse far too short to erase leaves one layer parallel from power-up
    s = session(timing=ModeTiming(erase_width=20e-12))
    act = s.run(Mode.ACTIVE, 1)
    assert not act.ok
    assert not s.run(Mode.BACKUP).ok


@pytest.mark.parametrize("offset", [-0.1, 0.1])
def test_restore_tolerates_latch_offset(offset):
    s = session(timing=ModeTiming(restore_offset=offset))
    for mode in (Mode.ACTIVE, Mode.BACKUP, Mode.STANDBY):
        s.run(mode, 1)
    assert s.run(Mode.RESTORE).details["restored"] == 1


def test_baseline_surrogate_cycle():
    rep = full_cycle(DesignDescriptor(kind=DesignKind.BASELINE), 1, keep_traces=False)
    assert rep.ok
    assert [m.operation for m in rep.metrics] == ["backup", "restore"]


def test_cycle_trace_time_axis_is_increasing():
    rep = full_cycle(PY, 1)
    tr = rep.trace()
    assert np.all(np.diff(tr.t) > 0)
    stages = sum(r.trace.e_cum[-1] - r.trace.e_cum[0] for r in rep.results.values())
    assert tr.e_cum[-1] - tr.e_cum[0] == pytest.approx(stages, rel=1e-9)


def test_concat_without_shift_keeps_times():
    rep = full_cycle(PY, 0)
    a = rep.results[Mode.ACTIVE].trace
    joined = concat_traces([a, a], shift=True)
    assert joined.t[-1] == pytest.approx(2 * a.t[-1])
    assert len(joined.t) == 2 * len(a.t) - 1


def test_default_erase_widths():
    assert default_erase_width(DesignKind.P_Y) < default_erase_width(DesignKind.I_X) < \
        default_erase_width(DesignKind.I_Y)
    assert ModeTiming(erase_width=3e-9).erase_width_for(DesignKind.P_Y) == 3e-9
