"""Block free energies and the two localization criteria."""

import math

import pytest

from copolem.lattice_entropy import LOG95_HALF, kappa_diag
from copolem.block_fe import (
    BoundPhiSource,
    CriterionVerdict,
    MCPhiSource,
    MU_STRATEGY,
    S_diag,
    criterion_pointwise,
    criterion_supercritical,
    psi_diag,
    psi_offdiag,
)

LOG5_HALF = 0.5 * math.log(5.0)


def test_psi_diag_closed_form():
    for a in (2.0, 2.5, 4.0):
        assert psi_diag("AA", a, 1.0, -0.5) == pytest.approx(
            0.5 + kappa_diag(a), abs=1e-12)
        assert psi_diag("BB", a, 1.0, -0.5) == pytest.approx(
            -0.25 + kappa_diag(a), abs=1e-12)
    with pytest.raises(ValueError):
        psi_diag("AB", 2.5, 1.0, 0.0)
    with pytest.raises(ValueError):
        psi_diag("AA", 1.5, 1.0, 0.0)


def test_S_diag_peaks_at_a_star():
    val, arg = S_diag("AA", 1.2, 0.3)
    assert arg == 2.5
    assert val == pytest.approx(0.6 + LOG5_HALF, abs=1e-12)
    val, arg = S_diag("BB", 1.2, 0.3)
    assert val == pytest.approx(0.15 + LOG5_HALF, abs=1e-12)
    # the diagonal crossing entropy is maximal exactly at 5/2
    assert psi_diag("AA", 2.5, 1.2, 0.3) >= psi_diag("AA", 2.3, 1.2, 0.3)
    assert psi_diag("AA", 2.5, 1.2, 0.3) >= psi_diag("AA", 2.8, 1.2, 0.3)


def test_offdiag_bracket_and_no_detour_collapse():
    # deep in the delocalized corner no interface detour helps: the
    # returned optimum collapses onto the plain crossing
    bf = psi_offdiag("AB", 2.5, 1.0, -2.0)
    psi0 = 0.5 * 1.0 + kappa_diag(2.5)
    assert bf.lower == pytest.approx(psi0, abs=1e-10)
    assert bf.lower <= bf.upper + 1e-12
    assert bf.value == pytest.approx(bf.lower, abs=1e-12)


def test_offdiag_detour_pays_when_opposite_reward_is_large():
    bf = psi_offdiag("BA", 2.5, 2.0, 1.0)
    psi0 = 0.5 * 1.0 + kappa_diag(2.5)
    assert bf.lower > psi0 + 1e-6
    assert bf.b_star > 0.0
    assert bf.a1_star > 0.0


def test_offdiag_guards():
    with pytest.raises(ValueError):
        psi_offdiag("AA", 2.5, 1.0, 0.0)
    with pytest.raises(ValueError):
        psi_offdiag("AB", 1.9, 1.0, 0.0)


def test_offdiag_probes_strategy_ray():
    # the lower phi envelope spikes at exactly mu = 9/8; the off-diagonal
    # supremum must see it even though no scan grid hits a single point
    al, be = 9.0, 8.9
    ab = psi_offdiag("AB", 2.5, al, be)
    s_aa = S_diag("AA", al, be)[0]
    assert ab.lower > s_aa + 1e-5
    assert ab.a1_star == pytest.approx(MU_STRATEGY * ab.b_star, rel=1e-6)


def test_criterion_agreement_at_a_star():
    # the pointwise test at the diagonal maximizer is the supercritical
    # test in disguise
    for al, be in ((1.0, 0.5), (2.0, -1.0), (3.0, 3.0), (0.2, 0.1)):
        cs = criterion_supercritical(al, be)
        cp = criterion_pointwise(2.5, al, BoundPhiSource(al, be))
        assert cs.verdict == cp.verdict
        assert cs.sup_lower == pytest.approx(cp.sup_lower, abs=1e-9)
        assert cs.sup_upper == pytest.approx(cp.sup_upper, abs=1e-9)
        assert cs.threshold == pytest.approx(LOG95_HALF, abs=1e-12)


def test_criterion_verdict_fields_consistent():
    cv = criterion_supercritical(1.0, 0.5)
    assert isinstance(cv, CriterionVerdict)
    assert cv.sup_lower <= cv.sup_upper + 1e-12
    assert cv.verdict in ("Localized", "Delocalized", "Undecided")
    if cv.verdict == "Localized":
        assert cv.sup_lower > cv.threshold
    elif cv.verdict == "Delocalized":
        assert cv.sup_upper <= cv.threshold
    else:
        assert cv.sup_lower <= cv.threshold < cv.sup_upper


def test_criterion_strong_coupling_localizes():
    cv = criterion_supercritical(9.0, 8.8)
    assert cv.verdict == "Localized"
    # the deciding ray is the pair-block strategy one
    assert cv.mu_lower == pytest.approx(MU_STRATEGY, abs=1e-12)


def test_criterion_weak_coupling_delocalizes():
    cv = criterion_supercritical(0.5, -0.5)
    assert cv.verdict == "Delocalized"
    assert cv.sup_upper <= LOG95_HALF


def test_criterion_undecided_band_exists():
    cv = criterion_supercritical(2.0, 2.0)
    assert cv.verdict == "Undecided"


def test_pointwise_threshold_moves_with_a():
    # a barely above 2 makes dipping nearly free: the threshold drops
    lo = criterion_pointwise(2.05, 0.5, BoundPhiSource(0.5, 0.5))
    hi = criterion_pointwise(4.0, 0.5, BoundPhiSource(0.5, 0.5))
    assert lo.threshold < hi.threshold


def test_mc_source_point_and_fallback():
    src = MCPhiSource(1.0, -0.5, L=40, replicas=4, seed=0, mu_max=2.0)
    pt = src.point(1.5)
    assert pt is not None
    assert src.point(3.0) == pytest.approx(
        0.5 * (src.lower(3.0) + src.upper(3.0)), abs=1e-12)


def test_mc_source_tightens_verdicts():
    # Monte Carlo point values can only shrink the undecided band
    cv_b = criterion_supercritical(2.0, 2.0)
    cv_m = criterion_supercritical(2.0, 2.0,
                                   MCPhiSource(2.0, 2.0, L=80, replicas=6,
                                               seed=0))
    assert cv_b.verdict == "Undecided"
    assert cv_m.point_sup is not None
    assert cv_b.sup_lower <= cv_m.point_sup + 0.35
