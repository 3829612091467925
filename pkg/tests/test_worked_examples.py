"""Hand-checkable input/output pairs across the modules."""

import cmath
import json
import math

import numpy as np
import pytest

from zlab.cli import main
from zlab.errors import DomainError
from zlab.experiments import (
    TWO_OVER_PI,
    ShiftGrid,
    certified_M,
    convexity_check,
    density_measure,
    growth_exponent_fit,
    lemma1_parameters,
    phase_lower_bound,
    sine_phase_average,
    translate_search,
    z_universality_search,
)
from zlab.special import (
    chi_factor,
    hardy_z,
    log_gamma,
    riemann_siegel_theta,
    zeta,
)
from zlab.targets import LineSegment, TargetFunction
from zlab.zeros import estimate_N, window_zero_count


def _stirling_log_gamma(z):
    # enough terms for |z| > 200
    s = (z - 0.5) * cmath.log(z) - z + 0.5 * math.log(2 * math.pi)
    return s + 1 / (12 * z) - 1 / (360 * z ** 3) + 1 / (1260 * z ** 5)


def test_log_gamma_against_recurrence():
    z = 0.25 + 50j
    ref = _stirling_log_gamma(z + 200) - sum(cmath.log(z + k) for k in range(200))
    assert abs(complex(log_gamma(z)) - ref) <= 1e-10


def test_functional_equation_at_minus_one():
    assert abs(chi_factor(2) * zeta(-1) - math.pi ** 2 / 6) <= 1e-10
    assert zeta(-1) == pytest.approx(-1 / 12, abs=1e-12)


def test_chi_modulus_grows_like_a_power():
    s = 0.25 + 1000j
    assert math.log(abs(chi_factor(s))) == pytest.approx(0.25 * math.log(1000 / (2 * math.pi)), rel=0.02)


def test_theta_first_root_and_expansion():
    assert abs(riemann_siegel_theta(17.8455995)) < 1e-6
    t = 1000.0
    direct = complex(log_gamma(0.25 + 0.5j * t)).imag - 0.5 * t * math.log(math.pi)
    assert float(riemann_siegel_theta(t)) == pytest.approx(direct, abs=1e-8)


def test_hardy_z_at_zero_is_zeta_half():
    assert hardy_z(0.0) == pytest.approx(-1.4603545088095868, abs=1e-10)


def test_counting_main_term():
    assert 28.9 <= estimate_N(100) <= 29.1
    assert 0 < estimate_N(14.13) < 2
    assert 0 < estimate_N(2)


def test_window_counts_small_windows():
    assert window_zero_count(1e3, 1e-9).observed == 0
    assert window_zero_count(1e3, 1.0).observed in range(4)


def test_sine_phase_examples():
    assert sine_phase_average(0, 1e-9, 0, 1e3).computed["value"] <= 1e-9
    a = sine_phase_average(0, 1, 0.3, 1e4).computed["value"]
    b = sine_phase_average(0, 1, 0.3 + math.pi, 1e4).computed["value"]
    assert a == pytest.approx(b, abs=1e-10)
    rec = sine_phase_average(0, 1, 0, 1e6)
    assert abs(rec.computed["deviation"]) <= 0.03


def test_sine_phase_via_cli(capsys):
    assert main(["lemma2", "--T", "1000000"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert abs(rec["computed"]["deviation"]) <= 0.03


def test_phase_bound_examples():
    at = LineSegment(0.5, 1e5, 1.0)
    assert phase_lower_bound(TargetFunction.constant(0, 1), at) == 0
    one = phase_lower_bound(TargetFunction.constant(1, 1), at)
    assert abs(one - TWO_OVER_PI) <= 0.05
    minus = phase_lower_bound(TargetFunction.constant(-1, 1), at)
    assert minus == pytest.approx(one, abs=1e-10)


def test_convexity_parameters():
    p = lemma1_parameters(0.5, 1.0, math.exp(10), 1.0)
    assert (p.r, p.sigma2, p.D) == (40, 3.5, 0.25)
    assert lemma1_parameters(1.0, 1.0, math.e, 1.0).sigma2 == 3.0
    assert lemma1_parameters(0.75, 4.0, math.e, 1.0).D == pytest.approx(2 / 3)
    with pytest.raises(DomainError):
        lemma1_parameters(0.4, 1.0, math.e, 1.0)


def test_convexity_at_a_thousand():
    M = certified_M(lemma1_parameters(0.75, 1.0, math.e, 2.0, t0=1000))
    rec = convexity_check(lemma1_parameters(0.75, 1.0, M, 2.0, t0=1000))
    assert rec.verdict == "pass"


def test_growth_just_left_of_the_line():
    rec = growth_exponent_fit(0.49, 1.0, [1e2, 1e3, 1e4])
    assert abs(rec.computed["slope"] - 0.01) <= 0.1


def test_search_recovers_a_planted_translate():
    grid = ShiftGrid(500, 600)
    T0 = float(grid.points()[37])
    rec = translate_search(TargetFunction.zeta_translate(0.75, T0, 1.0), LineSegment(0.75, 0, 1.0), grid)
    assert rec.computed["min"] <= 1e-6
    assert rec.computed["argmin_T"] == T0


@pytest.mark.slow
def test_search_for_small_means():
    # [1e2, 3e3] stands in for [1e2, 1e5] to keep the run short
    rec = translate_search(TargetFunction.constant(0, 1), LineSegment(0.75, 0, 1.0), ShiftGrid(100, 3000))
    assert rec.computed["min"] < 0.5 * rec.computed["median"]


def test_sup_search_for_a_constant():
    rec = translate_search(TargetFunction.constant(1, 0.3), LineSegment(0.75, 0, 0.3),
                           ShiftGrid(1000, 1100), norm="sup")
    assert rec.computed["min"] < rec.computed["median"]


def test_density_extremes():
    f = TargetFunction.constant(1, 0.25)
    seg = LineSegment(0.25, 0, 0.25)
    assert density_measure(f, seg, 0, 100, 0.25).computed["fraction"] == 0
    assert density_measure(f, seg, 1e6, 100, 0.25).computed["fraction"] == 1


def test_z_search_examples():
    grid = ShiftGrid(1000, 1100)
    zero = z_universality_search(TargetFunction.constant(0, 1), 1.0, grid, "Z")
    assert zero.computed["min"] > 0
    T0 = float(grid.points()[50])
    planted = z_universality_search(TargetFunction.abs_zeta(T0, 1.0), 1.0, grid, "absZ")
    assert planted.computed["min"] <= 1e-6 and planted.computed["argmin_T"] == T0


@pytest.mark.slow
def test_loglog_normalisation_gets_closer_to_one():
    # [1e3, 1.5e3] stands in for the longer grid
    grid = ShiftGrid(1000, 1500)
    one = TargetFunction.constant(1, 1)
    plain = z_universality_search(one, 1.0, grid, "absZ").computed["min"]
    scaled = z_universality_search(one, 1.0, grid, "loglog-normalized-abs").computed["min"]
    assert scaled < plain
