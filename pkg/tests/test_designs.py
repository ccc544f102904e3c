import pytest

from nandspin.designs import K_DRIVE, PROPOSED_KINDS, DesignDescriptor, DesignKind, build_design
from nandspin.errors import ConfigurationError
from nandspin.experiments import NM, transistor_names


@pytest.mark.parametrize("kind", list(DesignKind))
def test_every_kind_builds_a_valid_netlist(kind):
    c = build_design(DesignDescriptor(kind=kind))
    c.netlist.validate()
    assert len(c.netlist.layers) == 2 and c.vdd == pytest.approx(1.1)


def test_proposed_designs_share_one_strip_and_one_erase_path():
    c = build_design(DesignDescriptor(kind=DesignKind.P_Y))
    names = {t.name for t in c.netlist.transistors}
    assert {"P2", "N2", "N1", "N3", "N4"} <= names
    strips = {l.sot_resistor for l in c.netlist.layers}
    assert strips == {"ns.hm_b"}
    halves = [r.R for r in c.netlist.resistors if r.name.startswith("ns.hm")]
    assert sum(halves) == pytest.approx(c.device.strip_resistance)


def test_p2_defaults_and_override():
    assert DesignDescriptor(kind=DesignKind.P_X).effective_p2_W == pytest.approx(2000 * NM)
    assert DesignDescriptor(kind=DesignKind.I_Y).effective_p2_W == pytest.approx(1000 * NM)
    d = DesignDescriptor().with_p2(1500 * NM)
    p2 = next(t for t in build_design(d).netlist.transistors if t.name == "P2")
    assert p2.params.W == pytest.approx(1500 * NM)


def test_vff_resize_reaches_latch_devices():
    d = DesignDescriptor().with_vff(240 * NM, 180 * NM)
    widths = {t.name: t.params.W for t in build_design(d).netlist.transistors}
    assert widths["N5"] == pytest.approx(180 * NM) and widths["N6"] == pytest.approx(180 * NM)


def test_variation_perturbs_named_elements():
    names = transistor_names(DesignDescriptor())
    var = {n: (0.0, 1.0) for n in names}
    var["N3"] = (0.05, 1.1)
    var["MTJ2"] = (1.2, 0.9)
    c = build_design(DesignDescriptor(variation=var))
    n3 = next(t for t in c.netlist.transistors if t.name == "N3")
    base = next(t for t in build_design(DesignDescriptor()).netlist.transistors if t.name == "N3")
    assert n3.params.W == pytest.approx(base.params.W * 1.1)
    assert n3.params.Vth == pytest.approx(base.params.Vth + 0.05)
    assert c.device.mtj2.mtj.RA == pytest.approx(build_design(DesignDescriptor()).device.mtj2.mtj.RA * 1.2)


def test_shipped_drive_strength_is_the_calibrated_one():
    t = build_design(DesignDescriptor()).netlist.transistors[0]
    assert t.params.k_drive == K_DRIVE


def test_descriptor_rejects_nonpositive_widths():
    with pytest.raises(ConfigurationError):
        DesignDescriptor(vff_nfet_W=0.0)
    with pytest.raises(ConfigurationError):
        DesignDescriptor(p2_W=-1.0)
    with pytest.raises(ValueError):
        DesignDescriptor(kind="z-z")


def test_proposed_kinds_exclude_baseline():
    assert DesignKind.BASELINE not in PROPOSED_KINDS and len(PROPOSED_KINDS) == 4
