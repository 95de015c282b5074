"""Phase assembly: folding, classification, free energy, boundary curves."""

import math

import pytest

from copolem.deloc_var import DelocParams, F_of_rho
from copolem.lattice_entropy import model_constants
from copolem.percolation import RhoStarEstimate
from copolem.phase import (
    BETA_CAP,
    CurvePoint,
    PhasePoint,
    alpha_star_p,
    beta_c_envelope,
    classify,
    fold_phase_point,
    free_energy,
    second_curve_lower,
    sweep,
)

LOG5_HALF = 0.5 * math.log(5.0)


def test_fold_branches():
    f = fold_phase_point(PhasePoint(2.0, 1.0, 0.7))
    assert (f.alpha, f.beta, f.p, f.shift, f.swapped) == (2.0, 1.0, 0.7, 0.0,
                                                          False)
    assert f.regime == "supercritical"

    f = fold_phase_point(PhasePoint(0.5, 2.0, 0.3))
    assert (f.alpha, f.beta, f.shift, f.swapped) == (2.0, 0.5, 0.0, True)
    assert f.p == pytest.approx(0.7)

    f = fold_phase_point(PhasePoint(-1.0, -3.0, 0.7))
    assert (f.alpha, f.beta, f.p, f.swapped) == (3.0, 1.0, 0.7, False)
    assert f.shift == pytest.approx(-2.0)

    f = fold_phase_point(PhasePoint(-3.0, -1.0, 0.3))
    assert (f.alpha, f.beta, f.swapped) == (3.0, 1.0, True)
    assert f.p == pytest.approx(0.7) and f.shift == pytest.approx(-2.0)

    assert fold_phase_point(PhasePoint(1.0, 0.0, 0.6447)).regime == \
        "supercritical"
    assert fold_phase_point(PhasePoint(1.0, 0.0, 0.64)).regime == \
        "subcritical"


def test_point_guards():
    with pytest.raises(ValueError):
        PhasePoint(1.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        PhasePoint(math.inf, 0.0, 0.5)


def test_classify_fold_invariance():
    a = classify(-9.0, -8.8, 0.3)
    b = classify(9.0, 8.8, 0.7)
    assert a.state == b.state == "Localized"
    assert a.gap == pytest.approx(b.gap, abs=1e-12)


def test_free_energy_supercritical_values():
    r = free_energy(0.5, -0.5, 0.7)
    assert r.verdict.state == "Delocalized" and not r.is_bound
    assert r.value == pytest.approx(0.25 + LOG5_HALF, abs=1e-12)

    r = free_energy(9.0, 8.8, 0.7)
    assert r.verdict.state == "Localized" and r.is_bound
    assert r.value == pytest.approx(4.5 + LOG5_HALF, abs=1e-12)

    # reflected point: value picks up the additive fold shift
    r = free_energy(-1.0, -0.6, 0.3)
    assert r.regime == "supercritical" and r.folded.p == pytest.approx(0.7)
    assert r.value == pytest.approx(-0.8 + 0.5 + LOG5_HALF, abs=1e-12)
    assert r.verdict.state == "Undecided" and r.is_bound


def test_free_energy_subcritical_value():
    r = free_energy(1.0, 0.5, 0.3, rho=lambda p: 0.6)
    assert r.regime == "subcritical"
    assert r.value == pytest.approx(
        F_of_rho(DelocParams(1.0, 0.5, 0.6)), abs=1e-12)
    assert r.verdict.state == "Localized" and r.is_bound


def test_gamma_mixture_improves_localized_bound():
    plain = free_energy(9.0, 8.9, 0.7)
    mixed = free_energy(9.0, 8.9, 0.7, gamma=0.1)
    assert plain.verdict.state == "Localized"
    assert mixed.value > plain.value + 1e-5
    with pytest.raises(ValueError):
        free_energy(9.0, 8.9, 0.7, gamma=1.5)


def test_rho_resolution_guards():
    with pytest.raises(ValueError):
        classify(1.0, 0.5, 0.3)
    est = RhoStarEstimate(p=0.5, steps=200, replicas=2, mean=0.8,
                          stderr=0.01, seed=0)
    with pytest.raises(ValueError):
        classify(1.0, 0.5, 0.3, rho=est)
    # a bare float is refused once the fold swaps the density
    with pytest.raises(ValueError):
        classify(0.2, 0.5, 0.4, rho=0.6)
    with pytest.raises(ValueError):
        classify(1.0, 0.5, 0.3, rho=1.2)
    v = classify(1.0, 0.5, 0.3, rho=lambda p: 0.55)
    assert v.state in ("Localized", "Delocalized", "Undecided")


def test_envelope_rigorous_edges():
    cp = beta_c_envelope(2.0)
    assert cp.beta_lower == pytest.approx(math.log(2.0 - math.exp(-2.0)),
                                          abs=1e-12)
    assert cp.beta_upper == pytest.approx(2.0)
    assert cp.beta_estimate is None

    cp5 = beta_c_envelope(5.0)
    assert cp5.beta_upper <= min(5.0, BETA_CAP) + 1e-12
    assert cp5.beta_lower < cp5.beta_upper

    pinch = beta_c_envelope(0.0)
    assert pinch.beta_lower == pinch.beta_upper == 0.0

    with pytest.raises(ValueError):
        beta_c_envelope(-0.1)
    with pytest.raises(ValueError):
        CurvePoint(alpha=1.0, beta_lower=0.5, beta_upper=0.4)


def test_envelope_mc_pin():
    pinch = beta_c_envelope(0.0, mc=dict(L=80, replicas=4))
    assert pinch.beta_estimate == 0.0 and pinch.beta_estimate_err > 0.0

    cp = beta_c_envelope(2.0, mc=dict(L=80, replicas=12), seed=0)
    assert cp.beta_lower <= cp.beta_estimate <= cp.beta_upper
    assert cp.beta_estimate == pytest.approx(1.118583756046855, abs=1e-9)
    assert 0.0 < cp.beta_estimate_err < 0.5


def test_axis_departure_contrast():
    mc = model_constants()
    assert alpha_star_p(1e-6) == pytest.approx(mc.alpha0, abs=1e-6)
    assert alpha_star_p(1.0 - 1e-6) == pytest.approx(mc.alpha1, abs=1e-6)
    assert alpha_star_p(0.5) == pytest.approx(0.138005939, abs=1e-8)
    with pytest.raises(ValueError):
        alpha_star_p(0.0)
    with pytest.raises(ValueError):
        alpha_star_p(1.0)


def test_second_curve_formula():
    assert second_curve_lower(0.0) == 0.0
    assert second_curve_lower(1.0) == pytest.approx(
        math.log(2.0 - math.exp(-1.0)), abs=1e-15)
    assert second_curve_lower(10.0) < math.log(2.0)
    assert second_curve_lower(50.0) <= math.log(2.0)
    with pytest.raises(ValueError):
        second_curve_lower(-0.2)


def test_sweep_ordering_and_threads():
    cells = sweep((0.0, 1.0), (-1.0, 0.0), (2, 3), 0.7)
    assert len(cells) == 6
    assert [(c.alpha, c.beta) for c in cells] == [
        (0.0, -1.0), (0.0, -0.5), (0.0, 0.0),
        (1.0, -1.0), (1.0, -0.5), (1.0, 0.0)]
    assert all(c.regime == "supercritical" for c in cells)

    threaded = sweep((0.0, 1.0), (-1.0, 0.0), (2, 3), 0.7, threads=2)
    assert threaded == cells

    square = sweep((0.0, 1.0), (-1.0, 0.0), 2, 0.7)
    assert len(square) == 4


def test_sweep_guards():
    with pytest.raises(ValueError):
        sweep((0.0, 1.0), (0.0, 1.0), 0, 0.7)
    with pytest.raises(ValueError):
        sweep((0.0, 1.0), (0.0, 1.0), 2, 0.7, threads=0)
    with pytest.raises(ValueError):
        sweep((1.0, 0.0), (0.0, 1.0), 2, 0.7)


def test_sweep_auto_rho_deterministic():
    args = ((0.5, 1.0), (-0.5, 0.0), 2, 0.3)
    first = sweep(*args, seed=3)
    second = sweep(*args, seed=3)
    assert first == second
    assert all(c.regime == "subcritical" for c in first)
