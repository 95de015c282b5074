"""End-to-end acceptance checks, one named test per criterion.

Run with -v to get a pass/fail line per criterion.  The Monte Carlo
criteria (03, 04, 07, 10) dominate the runtime; the whole file takes a
few minutes on one core.
"""

import csv
import io
import math
import time

import pytest

from helpers import dense_F

from copolem.block_fe import BoundPhiSource, criterion_pointwise, \
    criterion_supercritical, psi_diag, psi_offdiag
from copolem.cli import main
from copolem.deloc_var import DelocParams, F_of_rho, solve_deloc
from copolem.interface_fe import InterfaceParams, phi_interface, \
    replica_seed
from copolem.lattice_entropy import kappa_hat, model_constants
from copolem.percolation import estimate_pc, rho_star, _lp_frequencies
from copolem.phase import BETA_CAP, alpha_star_p, beta_c_envelope, \
    classify, second_curve_lower

LOG5_HALF = 0.5 * math.log(5.0)

CONE_ALPHAS = (0.5, 1.0, 1.5, 2.0, 2.5)
CONE_SLOPES = (-1.0, -0.5, 0.0, 0.5, 1.0)
MU_GRID = (1.5, 2.0, 3.0)

VAR_ALPHAS = (0.5, 1.0, 1.5, 2.0, 2.5)
VAR_CONTRASTS = (0.1, 0.4, 0.8, 1.2, 1.5)
VAR_RHOS = (0.25, 0.5, 0.75)


def var_grid():
    for al in VAR_ALPHAS:
        for C in VAR_CONTRASTS:
            for rho in VAR_RHOS:
                yield al, al - C, rho


def test_criterion_01_constants(capsys):
    t0 = time.monotonic()
    assert main(["constants"]) == 0
    elapsed = time.monotonic() - t0
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    table = {r[0]: r[1] for r in rows[1:]}
    assert float(table["kappa_star"]) == pytest.approx(LOG5_HALF,
                                                       abs=1e-12)
    assert float(table["a_star"]) == 2.5
    assert float(table["mu_sup_value"]) == pytest.approx(0.16, abs=0.005)
    assert float(table["mu_sup"]) == pytest.approx(2.12, abs=0.01)
    assert float(table["alpha0"]) == pytest.approx(0.125, abs=0.002)
    assert float(table["alpha1"]) == pytest.approx(0.154, abs=0.002)
    assert elapsed < 1.0


def test_criterion_02_oracle_equivalence():
    from copolem.path_oracle import verify_kacomb_asymptotics
    from copolem.lattice_entropy import kappa
    t0 = time.monotonic()
    for a in (2.0, 2.5, 3.0):
        res = verify_kacomb_asymptotics(a, 1.0, L_values=(20, 40, 80))
        unr = verify_kacomb_asymptotics(a, 1.0, L_values=(20, 40, 80),
                                        restricted=False)
        cf = kappa(a, 1.0)
        assert abs(res.extrapolated - cf) / cf < 0.005
        # the corridor restriction must not move the limit rate
        assert abs(res.extrapolated - unr.extrapolated) \
            / unr.extrapolated < 0.002
    assert time.monotonic() - t0 < 30.0


def test_criterion_03_interface_exactness():
    t0 = time.monotonic()
    for al in (1.0, 2.0):
        for mu in MU_GRID:
            q = phi_interface(InterfaceParams(al, -1.0, mu), L=400,
                              replicas=100, seed=0)
            exact = 0.5 * al + kappa_hat(q.mu_realized)
            assert abs(q.mean - exact) <= 3.0 * q.stderr, \
                "alpha=%g mu=%g: mean %.6f vs exact %.6f (se %.5f)" % (
                    al, mu, q.mean, exact, q.stderr)
    assert time.monotonic() - t0 < 300.0


def test_criterion_04_bound_sandwich():
    violations = []
    for al in CONE_ALPHAS:
        for t in CONE_SLOPES:
            for mu in MU_GRID:
                q = phi_interface(InterfaceParams(al, t * al, mu),
                                  L=200, replicas=40, seed=0)
                if q.lower_bound > q.mean + 3.0 * q.stderr:
                    violations.append((al, t * al, mu, "lower"))
                if q.mean - 3.0 * q.stderr > q.upper_bound:
                    violations.append((al, t * al, mu, "upper"))
    assert violations == []


def test_criterion_05_variational_solver():
    t0 = time.monotonic()
    for al, be, rho in var_grid():
        sol = solve_deloc(DelocParams(al, be, rho))
        assert abs(sol.residual1) < 1e-10 and abs(sol.residual2) < 1e-10
        ia = 0.5 * al + 0.5 * math.log(sol.x_bar / (sol.x_bar - 2.0))
        ib = 0.5 * be + 0.5 * math.log(sol.y_bar / (sol.y_bar - 2.0))
        assert abs(sol.F - ia) < 1e-9 and abs(sol.F - ib) < 1e-9
        assert abs(sol.F - dense_F(al, be, rho)) <= 1e-5
    for al in VAR_ALPHAS:
        for C in VAR_CONTRASTS:
            be = al - C
            lo = F_of_rho(DelocParams(al, be, 1e-8))
            hi = F_of_rho(DelocParams(al, be, 1.0 - 1e-8))
            assert abs(lo - (0.5 * be + LOG5_HALF)) <= 1e-3
            assert abs(hi - (0.5 * al + LOG5_HALF)) <= 1e-3
    assert time.monotonic() - t0 < 10.0


def test_criterion_06_symmetries():
    for al, be, rho in var_grid():
        F = F_of_rho(DelocParams(al, be, rho))
        swap = F_of_rho(DelocParams(be, al, 1.0 - rho))
        shift = 0.5 * (al + be) + F_of_rho(DelocParams(-be, -al, rho))
        assert abs(F - swap) < 1e-10
        assert abs(F - shift) < 1e-10


def test_criterion_07_percolation():
    t0 = time.monotonic()
    grid = [round(0.58 + 0.01 * i, 2) for i in range(15)]
    est = estimate_pc(grid, steps=2000, replicas=20, seed=0)
    assert 0.61 <= est.value <= 0.68

    r3 = rho_star(0.3, steps=1000, replicas=10, seed=0)
    r5 = rho_star(0.5, steps=1000, replicas=10, seed=0)
    r7 = rho_star(0.7, steps=1000, replicas=10, seed=0)
    assert r5.mean >= r3.mean - 2.0 * (r3.stderr + r5.stderr)
    assert r7.mean >= r5.mean - 2.0 * (r5.stderr + r7.stderr)

    # coupled densities share one uniform field: per-realization maxima
    # are nondecreasing in p pointwise, not just on average
    for r in range(2):
        rs = replica_seed(0, r)
        prev = None
        for p in (0.3, 0.5, 0.7):
            cur = _lp_frequencies(p, 500, rs, [250, 500])
            if prev is not None:
                assert all(c >= q - 1e-12 for c, q in zip(cur, prev))
            prev = cur
    assert time.monotonic() - t0 < 600.0


def test_criterion_08_criteria_consistency():
    for i in range(20):
        al = 0.25 + (5.0 - 0.25) * i / 19.0
        for j in range(20):
            be = al * (-1.0 + 2.0 * j / 19.0)
            src = BoundPhiSource(al, be)
            cs = criterion_supercritical(al, be, src)
            cp = criterion_pointwise(2.5, al, src)
            assert cs.verdict == cp.verdict
            assert abs(cs.sup_lower - cp.sup_lower) <= 1e-9
            # sup_upper is +inf when the rigorous upper bound diverges;
            # inf == inf counts as agreement, inf - inf would be nan.
            assert cs.sup_upper == cp.sup_upper or \
                abs(cs.sup_upper - cp.sup_upper) <= 1e-9
            assert abs(cs.threshold - cp.threshold) <= 1e-12

    for al in (0.02, 0.05, 0.08, 0.11, 0.12):
        v = classify(al, al, 0.3, rho=0.55)
        assert v.state == "Delocalized", "diagonal alpha=%g: %s" % (
            al, v.state)

    for al, be in ((BETA_CAP, BETA_CAP), (10.0, BETA_CAP), (12.0, 9.5)):
        assert classify(al, be, 0.7).state == "Localized"

    for al in (0.5, 1.0, 2.0, 3.0):
        be = second_curve_lower(al) - 0.01
        for a in (2.2, 2.5, 3.0, 4.0):
            gain = psi_offdiag("AB", a, al, be).upper \
                - psi_diag("AA", a, al, be)
            assert gain <= 1e-12, "a=%g alpha=%g: gain %.3e" % (a, al,
                                                                gain)


def test_criterion_09_axis_departure_limits():
    mc = model_constants()
    assert alpha_star_p(1e-6) == pytest.approx(mc.alpha0, abs=0.002)
    assert alpha_star_p(1.0 - 1e-6) == pytest.approx(mc.alpha1,
                                                     abs=0.002)


def test_criterion_10_curve_envelope():
    pts = []
    for i in range(51):
        al = 0.1 * i
        cp = beta_c_envelope(al, mc=dict(L=80, replicas=12), seed=0)
        assert cp.beta_lower == math.log(2.0 - math.exp(-al))
        assert cp.beta_lower <= cp.beta_upper
        assert cp.beta_upper <= BETA_CAP + 1e-12
        assert cp.beta_lower <= cp.beta_estimate <= cp.beta_upper
        pts.append(cp)
    e = [p.beta_estimate for p in pts]
    r = [p.beta_estimate_err for p in pts]
    for i in range(50):
        assert e[i + 1] >= e[i] - (r[i] + r[i + 1]), \
            "estimate drops at alpha=%.1f" % (0.1 * i)
    for i in range(1, 50):
        d2 = e[i + 1] - 2.0 * e[i] + e[i - 1]
        assert d2 <= r[i - 1] + 2.0 * r[i] + r[i + 1] + 1e-9, \
            "convex kink at alpha=%.1f" % (0.1 * i)
