import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nandspin.designs import DesignDescriptor, DesignKind
from nandspin.errors import ConfigurationError
from nandspin.experiments import (NM, VariationSpec, backup_metrics, compare_designs, comparison_table,
                                  monte_carlo, sample_variation, sweep_p2, sweep_vff_area, transistor_names,
                                  vff_sizes)

PY = DesignDescriptor(kind=DesignKind.P_Y)


def test_backup_metrics_reports_write_current_and_latch():
    res = backup_metrics(PY, data=0)
    assert res.ok and res.details["stored"] == "0"
    assert 60e-6 < res.details["iw"] < 100e-6
    assert res.details["qc"] > 1.0 and res.details["qt"] < 0.3


def test_comparison_table_layout():
    reps = compare_designs([PY, DesignDescriptor(kind=DesignKind.I_X)])
    table = comparison_table(reps)
    assert table[0] == ["metric", "p-y", "i-x"]
    assert [r[0] for r in table[1:]] == ["erase_delay_ns", "erase_energy_fJ", "backup_delay_ns",
                                          "backup_energy_fJ", "restore_delay_ns", "restore_energy_fJ"]
    assert all(cell for row in table[1:] for cell in row)


def test_compare_defaults_to_the_four_proposed_designs():
    assert len(compare_designs(None)) == 4


def test_sweep_p2_validates_widths():
    with pytest.raises(ConfigurationError):
        sweep_p2(PY, [2000 * NM, 1000 * NM])
    with pytest.raises(ConfigurationError):
        sweep_p2(PY, [0.0, 1000 * NM])
    with pytest.raises(ConfigurationError):
        sweep_p2(DesignDescriptor(kind=DesignKind.BASELINE), [1000 * NM])


def test_sweep_p2_points_follow_width_order():
    pts = sweep_p2(PY, [1000 * NM, 2000 * NM])
    assert [p.p2_W for p in pts] == [1000 * NM, 2000 * NM]
    assert all(p.ok for p in pts)


def test_vff_sweep_band_spans_p2_widths():
    pts = sweep_vff_area(PY, vff_sizes([1.0]), p2_widths=[1000 * NM, 2000 * NM])
    (p,) = pts
    lo, hi, elo, ehi = p.band
    assert lo <= p.delay <= hi and elo <= p.energy <= ehi


def test_vff_sizes_scale_both_devices():
    assert vff_sizes([1.0, 0.6]) == [(400 * NM, 300 * NM), (pytest.approx(240 * NM), pytest.approx(180 * NM))]


@settings(max_examples=30)
@given(st.integers(0, 2 ** 32 - 1))
def test_variation_draw_is_seed_deterministic(seed):
    names = transistor_names(PY)
    a = sample_variation(names, VariationSpec(), np.random.default_rng(seed))
    b = sample_variation(names, VariationSpec(), np.random.default_rng(seed))
    assert a == b
    assert set(a) == set(names) | {"MTJ1", "MTJ2"}
    assert all(v[1] > 0 for v in a.values())


def test_zero_sigma_means_nominal():
    v = VariationSpec(sigma_vth=0, sigma_w_rel=0, sigma_ra_rel=0, sigma_tmr_rel=0)
    draw = sample_variation(transistor_names(PY), v, np.random.default_rng(3))
    assert all(x == (0.0, 1.0) for k, x in draw.items() if not k.startswith("MTJ"))
    assert draw["MTJ1"] == draw["MTJ2"] == (1.0, 1.0)


def test_monte_carlo_reproducible_and_order_independent():
    spec = VariationSpec(rng_seed=11, n_runs=4)
    a = monte_carlo(PY, spec, workers=1)
    b = monte_carlo(PY, spec, workers=2)
    assert a.runs == b.runs
    assert [r.index for r in a.runs] == [0, 1, 2, 3]
    c = monte_carlo(PY, VariationSpec(rng_seed=12, n_runs=4), workers=1)
    assert c.runs != a.runs


def test_single_run_has_zero_spread():
    rep = monte_carlo(PY, VariationSpec(n_runs=1), workers=1)
    assert rep.std("iw") == 0.0 and rep.std("qt") == 0.0
    assert rep.success_rate == 1.0
