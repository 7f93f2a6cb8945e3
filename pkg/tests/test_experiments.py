import math
from dataclasses import replace

import numpy as np
import pytest

from bandgap_esd.entanglement import DEFAULT_INIT
from bandgap_esd.experiments import (
    DETUNING_GRID,
    GAMMA2_GRID,
    PRESET_NAMES,
    PRESETS,
    DensityProfile,
    DensityScan,
    Scenario,
    SweepSpec,
    check_orderings,
    esd_table,
    interior_minima,
    preset,
    preset_scenarios,
    run_concurrence,
    run_density_profile,
    run_preset,
    run_surface,
    sweep_onsets,
)
from bandgap_esd.errors import InvalidParameters
from bandgap_esd.spectral import SpectralDensity, validate
from bandgap_esd.table import Table, format_value, read_csv, to_csv, write_text


@pytest.fixture(scope="module")
def report():
    return check_orderings()


# --- presets ------------------------------------------------------------------------


def test_preset_names():
    assert set(PRESET_NAMES) == {"fig1a", "fig1b", "fig2a", "fig2b", "fig3", "fig4", "fig5", "fig6"}


def test_preset_fig1a_parameters():
    sw = preset("fig1a")
    assert sw.axis == "gamma2_half" and sw.values == (1.0, 2.0, 9.0)
    s = sw.base
    assert (s.sd.w1, s.sd.w2, s.sd.gamma1 / 2, s.delta) == (1.1, 0.1, 10.0, 0.0)
    assert s.init == DEFAULT_INIT and s.init.beta == math.sqrt(3) / 2


def test_preset_fig1b_is_far_detuned():
    assert preset("fig1b").base.delta == 10.0


def test_preset_fig4_is_one_lorentzian():
    sd = preset("fig4").base.sd
    assert (sd.w1, sd.w2, sd.gamma1 / 2) == (1.0, 0.0, 10.0)
    assert preset("fig4").values == DETUNING_GRID


def test_preset_fig3_pairs():
    pairs = [(s.sd.gamma1 / 2, s.sd.gamma2 / 2) for s in preset("fig3")]
    assert pairs == [(11.0, 1.0), (1.1, 0.1), (0.11, 0.01)]


def test_detuning_and_gamma2_grids():
    assert len(DETUNING_GRID) == 41 and DETUNING_GRID[-1] == 10.0
    assert len(GAMMA2_GRID) == 33 and GAMMA2_GRID[0] == 1.0 and GAMMA2_GRID[-1] == 9.0


def test_unknown_preset_lists_names():
    with pytest.raises(KeyError, match="fig1a"):
        preset("fig7")


def test_all_preset_parameters_validate():
    for s in preset_scenarios():
        assert validate(s.sd).ok
        s.validate()
    names = [s.name for s in preset_scenarios()]
    assert len(names) == len(set(names))


# --- drivers ------------------------------------------------------------------------


def test_run_concurrence_fig1a_member():
    tab = run_concurrence(preset("fig1a").scenarios()[0])
    c = np.asarray(tab.column("concurrence"))
    assert c[0] == pytest.approx(math.sqrt(3) / 2, abs=1e-15)
    assert c[-1] == 0.0


def test_run_concurrence_weak_never_dies():
    c = np.asarray(run_concurrence(preset("fig3")[0]).column("concurrence"))
    assert c.min() > 0


def test_run_concurrence_uncoupled_is_constant():
    s = Scenario("custom", SpectralDensity.from_half_widths(1.1, 0.1, 10, 1), rabi=0.0, grid_points=51)
    c = np.asarray(run_concurrence(s).column("concurrence"))
    assert np.allclose(c, math.sqrt(3) / 2, atol=1e-12)


def test_surface_slices_equal_standalone_runs():
    sw = replace(preset("fig5"), values=(0.0, 3.0, 7.5))
    surf = run_surface(sw)
    axis = np.asarray(surf.column("axis_value"))
    assert list(np.unique(axis)) == [0.0, 3.0, 7.5]
    for s, v in zip(sw.scenarios(), sw.values):
        ref = run_concurrence(s)
        m = axis == v
        assert np.array_equal(np.asarray(surf.column("t"))[m], ref.column("t"))
        assert np.array_equal(np.asarray(surf.column("concurrence"))[m], ref.column("concurrence"))


def test_single_value_surface_reduces_to_run_concurrence():
    sw = replace(preset("fig4"), values=(2.0,))
    surf = run_surface(sw)
    ref = run_concurrence(sw.scenarios()[0])
    assert np.array_equal(surf.column("concurrence"), ref.column("concurrence"))


def test_surface_parallel_matches_serial():
    sw = replace(preset("fig4"), values=(0.0, 5.0))
    assert to_csv(run_surface(sw, jobs=2)) == to_csv(run_surface(sw))


def test_sweep_rejects_unsorted_values():
    with pytest.raises(InvalidParameters):
        run_surface(replace(preset("fig4"), values=(1.0, 0.5)))


def test_density_profile_fig6():
    prof = preset("fig6")
    tab = run_density_profile(prof.models, prof.deltas)
    assert tab.columns == ("delta", "density_one_lorentzian", "density_gap")
    d = np.asarray(tab.column("delta"))
    one = np.asarray(tab.column("density_one_lorentzian"))
    gap = np.asarray(tab.column("density_gap"))
    pos = d >= 0
    assert np.all(np.diff(one[pos]) < 0)
    assert gap[np.argmin(np.abs(d))] == pytest.approx(0.02, abs=1e-15)
    assert abs(d[pos][np.argmax(gap[pos])] - 3.07) <= 0.025  # grid step 0.025


def test_esd_table_columns_and_empty_fields():
    tab = esd_table(preset("fig3"))
    assert tab.columns == ("gamma2_half", "delta", "esd_onset", "trapped_value")
    assert tab.column("esd_onset")[0] is None
    assert tab.column("trapped_value")[1] is None
    lines = to_csv(tab).splitlines()
    assert lines[1].split(",")[2] == ""


def test_preset_output_is_deterministic():
    assert to_csv(run_preset("fig3")) == to_csv(run_preset("fig3"))


def test_preset_manifest_comments():
    text = to_csv(run_preset("fig1a"))
    assert text.startswith("# ")
    assert "# gamma1_half=10.0\n" in text
    header = [ln for ln in text.splitlines() if not ln.startswith("#")][0]
    assert header == "scenario,t,concurrence"


# --- checks -------------------------------------------------------------------------


def test_all_checks_pass(report):
    assert [r.name for r in report] == [
        "fig1a_ordering",
        "fig1b_ordering",
        "fig2_monotonicity",
        "fig3_regimes",
        "fig4_monotone",
        "fig5_turning_point",
    ]
    assert all(r.passed for r in report), [r.line() for r in report if not r.passed]


def test_empty_preset_set_gives_empty_report():
    assert check_orderings({}) == []


def test_perturbed_fig1_reports_violating_pair():
    swapped = replace(preset("fig1a"), base=replace(preset("fig1a").base, delta=10.0))
    (res,) = check_orderings({"fig1a": swapped})
    assert not res.passed
    assert "gamma2_half=1.0" in res.detail and "gamma2_half=2.0" in res.detail


def test_out_of_range_gamma2_is_reported_not_raised():
    bad = replace(preset("fig1a"), values=(1.0, 2.0, 25.0))  # gamma2 > gamma1
    (res,) = check_orderings({"fig1a": bad})
    assert not res.passed and "invalid input" in res.detail


def test_perturbed_fig2_fails():
    flat = DensityScan(preset("fig2a").base, (1.0, 1.0 + 1e-18, 2.0))
    (res,) = check_orderings({"fig2a": flat, "fig2b": preset("fig2b")})
    assert not res.passed


def test_fig5_minimum_location():
    onsets = sweep_onsets(preset("fig5"))
    (k,) = interior_minima(onsets)
    assert 3.0 < DETUNING_GRID[k] < 4.0


def test_interior_minima():
    assert interior_minima([3, 2, 1, 2, 3]) == [2]
    assert interior_minima([1, 2, 3]) == []
    assert interior_minima([2, 1, 2, 1, 2]) == [1, 3]


# --- table ----------------------------------------------------------------------------


def test_format_value_round_trips():
    for x in (0.1, 1 / 3, 1e-300, 2.0**0.5):
        assert float(format_value(x)) == x
    assert format_value(None) == "" and format_value(float("nan")) == ""


def test_csv_round_trip():
    tab = Table(("a", "b"), [[0.1, 2.5], [None, 1 / 3]], comments=[("k", 1.0)])
    text = to_csv(tab)
    assert "\r" not in text and text.endswith("\n")
    comments, header, rows = read_csv(text)
    assert header == ["a", "b"] and rows[0][1] == "" and float(rows[1][1]) == 1 / 3


def test_ragged_table_rejected():
    with pytest.raises(ValueError):
        Table(("a", "b"), [[1], [1, 2]])


def test_write_text_atomic(tmp_path):
    path = tmp_path / "out.csv"
    write_text("x\n1\n", str(path))
    assert path.read_text() == "x\n1\n"
    assert [p.name for p in tmp_path.iterdir()] == ["out.csv"]


def test_density_profile_rejects_invalid_model():
    with pytest.raises(InvalidParameters):
        run_density_profile([("bad", SpectralDensity(1.5, 0.1, 20, 2))], [0.0])


def test_presets_are_registered_objects():
    assert isinstance(PRESETS["fig6"], DensityProfile)
    assert isinstance(PRESETS["fig5"], SweepSpec)
