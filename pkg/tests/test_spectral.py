import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bandgap_esd.errors import DomainError, InvalidParameters
from bandgap_esd.spectral import (
    SpectralDensity,
    critical_detuning_numeric,
    critical_detuning_paper,
    critical_detuning_stationary,
    density_at_detuning,
    density_from_pseudomodes,
    derive_pseudomode_params,
    evaluate_density,
    golden_section_max,
    is_perfect_gap,
    validate,
)

FIG1 = SpectralDensity.from_half_widths(1.1, 0.1, 10, 1)
PERFECT = SpectralDensity.from_half_widths(1.1, 0.1, 11, 1)
PERFECT_STRONG = SpectralDensity.from_half_widths(1.1, 0.1, 0.11, 0.01)
ONE = SpectralDensity.one_lorentzian(20.0)


@st.composite
def valid_densities(draw, allow_one=True):
    """Random valid two-Lorentzian densities (plus the one-Lorentzian case)."""
    if allow_one and draw(st.booleans()):
        return SpectralDensity.one_lorentzian(draw(st.floats(0.01, 100)), draw(st.floats(-5, 5)))
    gamma1 = draw(st.floats(0.01, 100))
    gamma2 = gamma1 * draw(st.floats(0.01, 0.99))
    w2_max = gamma2 / (gamma1 - gamma2)  # w2/(1+w2) <= gamma2/gamma1
    w2 = w2_max * draw(st.floats(0.001, 1.0))
    return SpectralDensity(1.0 + w2, w2, gamma1, gamma2, draw(st.floats(-5, 5)))


# --- validate -------------------------------------------------------------------


def test_validate_fig1_passes():
    assert validate(FIG1).ok


def test_validate_one_lorentzian_passes():
    assert validate(SpectralDensity.from_half_widths(1.0, 0.0, 10, 0)).ok


def test_validate_weight_sum_violation():
    res = validate(SpectralDensity.from_half_widths(1.5, 0.1, 10, 1))
    assert not res.ok
    assert "weight-sum" in res.kinds()


@pytest.mark.parametrize(
    "sd, kind",
    [
        (SpectralDensity(1.1, 0.1, 2.0, 20.0), "width-order"),
        (SpectralDensity(1.1, 0.1, 20.0, 20.0), "width-order"),
        (SpectralDensity(1.1, 0.1, 20.0, -1.0), "width-order"),
        (SpectralDensity(1.5, 0.5, 20.0, 2.0), "positivity"),
    ],
)
def test_validate_reports_kind(sd, kind):
    assert kind in validate(sd).kinds()


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_validate_non_finite_is_its_own_class(bad):
    res = validate(SpectralDensity(1.1, 0.1, bad, 2.0))
    assert res.kinds() == ["non-finite"]


def test_validate_never_raises_on_garbage():
    assert not validate(SpectralDensity("x", 0.1, 20.0, 2.0)).ok


@given(valid_densities())
def test_positivity_condition_matches_grid_scan(sd):
    assert validate(sd).ok
    x = np.linspace(-10 * sd.gamma1, 10 * sd.gamma1, 10_000)
    d = evaluate_density(sd, sd.omega_c + x)
    assert np.all(d >= -1e-12 * np.max(np.abs(d)))


def test_positivity_violation_shows_negative_density():
    sd = SpectralDensity(1.5, 0.5, 20.0, 2.0)
    assert "positivity" in validate(sd).kinds()
    assert evaluate_density(sd, sd.omega_c) < 0


# --- evaluate_density ------------------------------------------------------------


def test_density_at_center_fig1():
    # 4 W1/G1 - 4 W2/G2 = 0.22 - 0.20
    assert evaluate_density(FIG1, 0.0) == pytest.approx(0.02, abs=1e-15)


def test_density_at_center_perfect_gap_is_zero():
    assert evaluate_density(PERFECT, 0.0) == 0.0


def test_density_one_lorentzian_peak():
    assert evaluate_density(ONE, 0.0) == pytest.approx(0.2, abs=1e-15)


def test_density_vectorised_matches_scalar():
    xs = np.linspace(-5, 5, 11)
    vec = evaluate_density(FIG1, xs)
    assert np.array_equal(vec, [evaluate_density(FIG1, x) for x in xs])


@given(valid_densities(), st.floats(0, 1000))
def test_density_even_in_detuning(sd, x):
    assert density_at_detuning(sd, x) == density_at_detuning(sd, -x)


@given(valid_densities(), st.floats(0, 1000))
def test_density_even_about_center(sd, x):
    sd0 = SpectralDensity(sd.w1, sd.w2, sd.gamma1, sd.gamma2, 0.0)
    assert evaluate_density(sd0, x) == evaluate_density(sd0, -x)


# --- perfect gap -------------------------------------------------------------------


@pytest.mark.parametrize(
    "sd, expected",
    [(PERFECT, True), (FIG1, False), (PERFECT_STRONG, True), (ONE, False)],
)
def test_is_perfect_gap(sd, expected):
    assert is_perfect_gap(sd) is expected


def test_is_perfect_gap_rejects_missing_second_width():
    with pytest.raises(InvalidParameters):
        is_perfect_gap(SpectralDensity(1.1, 0.1, 20.0, 0.0))


@given(st.floats(0.01, 100), st.floats(0.01, 0.99))
def test_perfect_gap_implies_zero_density_and_rate(gamma1, ratio):
    gamma2 = gamma1 * ratio
    w2 = gamma2 / (gamma1 - gamma2)
    sd = SpectralDensity(1.0 + w2, w2, gamma1, gamma2)
    if not validate(sd).ok or not is_perfect_gap(sd):
        return  # roundoff moved the draw off the gap
    assert abs(evaluate_density(sd, 0.0)) <= 1e-12 * (1 + sd.w1 / sd.gamma1)
    assert derive_pseudomode_params(sd).gamma1_prime <= 1e-12 * (1 + sd.w1 * sd.gamma2)


# --- pseudomode parameters ------------------------------------------------------------


def test_pseudomode_params_fig1():
    pm = derive_pseudomode_params(FIG1)
    assert pm.gamma1_prime == pytest.approx(0.2, abs=1e-14)
    assert pm.gamma2_prime == pytest.approx(21.8, abs=1e-14)
    assert pm.v == pytest.approx(math.sqrt(0.11) * 9, rel=1e-15)
    assert pm.v == pytest.approx(2.98496, abs=1e-5)


def test_pseudomode_params_perfect_gap():
    pm = derive_pseudomode_params(PERFECT)
    assert pm.gamma1_prime == 0.0
    assert pm.gamma2_prime == pytest.approx(24.0, abs=1e-14)
    assert pm.v == pytest.approx(3.31662, abs=1e-5)


def test_pseudomode_params_one_lorentzian():
    pm = derive_pseudomode_params(SpectralDensity.from_half_widths(1, 0, 10, 0))
    assert (pm.gamma1_prime, pm.gamma2_prime, pm.v) == (0.0, 20.0, 0.0)


def test_pseudomode_params_require_valid():
    with pytest.raises(InvalidParameters):
        derive_pseudomode_params(SpectralDensity(1.5, 0.1, 20.0, 2.0))


@given(valid_densities())
def test_pseudomode_invariants(sd):
    pm = derive_pseudomode_params(sd)
    assert pm.gamma1_prime >= 0.0
    assert pm.gamma2_prime > 0.0
    assert pm.v >= 0.0
    assert (pm.v == 0.0) == (sd.w2 == 0.0)


@given(valid_densities())
@settings(max_examples=50)
def test_density_round_trip_through_pseudomodes(sd):
    pm = derive_pseudomode_params(sd)
    w = sd.omega_c + np.linspace(-10 * sd.gamma1, 10 * sd.gamma1, 2001)
    direct = evaluate_density(sd, w)
    rebuilt = density_from_pseudomodes(pm, w, sd.omega_c)
    scale = 4 * sd.w1 / sd.gamma1
    assert np.max(np.abs(direct - rebuilt)) <= 1e-10 * scale


def test_pseudomode_poles_are_lorentzian_poles():
    from bandgap_esd.spectral import pseudomode_block

    ev = np.sort_complex(np.linalg.eigvals(pseudomode_block(derive_pseudomode_params(FIG1))))
    assert np.allclose(ev, [-10j, -1j], atol=1e-12)


# --- critical detuning -------------------------------------------------------------------


def test_critical_detuning_paper_value():
    assert critical_detuning_paper(FIG1) == pytest.approx(3.53, abs=0.005)


def test_critical_detuning_paper_hand_arithmetic():
    num = 400 * math.sqrt(0.2) - 4 * math.sqrt(22)
    den = 4 * math.sqrt(1.1) * (math.sqrt(20) - math.sqrt(2))
    assert critical_detuning_paper(FIG1) == pytest.approx(math.sqrt(num / den), rel=1e-14)


def test_critical_detuning_paper_requires_two_lorentzians():
    with pytest.raises(DomainError):
        critical_detuning_paper(ONE)


def test_critical_detuning_paper_negative_radicand():
    # wide, shallow dip: G2^2 sqrt(W1 G1) dominates the numerator
    sd = SpectralDensity(1.001, 0.001, 20.0, 19.0)
    assert validate(sd).ok
    with pytest.raises(DomainError):
        critical_detuning_paper(sd)


def _grid_oracle(sd, step=1e-4):
    """Independent maximiser: dense grid plus parabola through the top three samples."""
    d = np.arange(0.0, 5 * sd.gamma1, step)
    g1, g2 = sd.gamma1, sd.gamma2
    vals = sd.w1 * g1 / (d**2 + g1**2 / 4) - sd.w2 * g2 / (d**2 + g2**2 / 4)
    i = int(np.argmax(vals))
    y0, y1, y2 = vals[i - 1 : i + 2]
    return d[i] + step * 0.5 * (y0 - y2) / (y0 - 2 * y1 + y2)


@pytest.mark.parametrize("sd", [FIG1, PERFECT], ids=["fig5", "perfect-gap"])
def test_critical_detuning_numeric_matches_grid_oracle(sd):
    assert critical_detuning_numeric(sd) == pytest.approx(_grid_oracle(sd), abs=1e-6)


@pytest.mark.parametrize("sd", [FIG1, PERFECT], ids=["fig5", "perfect-gap"])
def test_critical_detuning_numeric_matches_stationary_point(sd):
    assert critical_detuning_numeric(sd) == pytest.approx(critical_detuning_stationary(sd), abs=1e-6)


def test_critical_detuning_numeric_fig5_value():
    assert critical_detuning_numeric(FIG1) == pytest.approx(3.0715, abs=1e-4)


def test_critical_detuning_formulas_disagree():
    assert critical_detuning_paper(FIG1) - critical_detuning_numeric(FIG1) > 0.4


def test_critical_detuning_numeric_one_lorentzian_is_zero():
    assert critical_detuning_numeric(ONE) == 0.0


def test_critical_detuning_numeric_perfect_gap_interior():
    d = critical_detuning_numeric(PERFECT)
    assert 0.0 < d < 5 * PERFECT.gamma1


@given(valid_densities(allow_one=False))
@settings(max_examples=40)
def test_numeric_maximiser_dominates_verification_grid(sd):
    d_star = critical_detuning_numeric(sd)
    grid = np.linspace(0.0, 5 * sd.gamma1, 5001)
    best = density_at_detuning(sd, d_star)
    assert np.all(density_at_detuning(sd, grid) <= best * (1 + 1e-12) + 1e-15)


def test_golden_section_on_parabola():
    x = golden_section_max(lambda t: -(t - 0.3) ** 2, -2.0, 5.0, 1e-10)
    assert x == pytest.approx(0.3, abs=1e-8)
