"""Phase diagram assembly: fold, classify, free energies, and curves.

The model has two exact symmetries: swapping the two monomer couplings
while swapping the block density p for 1-p, and negating-and-exchanging
the couplings at the cost of an additive free energy shift of half their
sum.  Every (alpha, beta) therefore folds into the cone alpha >= |beta|,
and all evaluation happens on folded coordinates.

Above the percolation threshold an infinite all-A block path exists and
the phase test is the single-interface criterion against the plain
diagonal value alpha/2 + log(5)/2.  Below the threshold the best path
crosses A blocks with frequency rho* < 1, the delocalized free energy is
the variational value F(rho*), and the phase test becomes the block
criterion at the B-crossing time ratio y_bar of the variational
maximiser pair.

Curves: the localization boundary in beta at fixed alpha is bracketed by
a rigorous envelope (annealed lower edge, strategy-bound upper edge) and
pinned by an optional Monte Carlo point estimate; the density-dependent
coupling contrast where the subcritical boundary leaves the vertical
axis is found by bisecting a closed-form criterion gap.
"""

from __future__ import annotations

import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Tuple, Union

from ._optim import bisect_root, grow_upper, scan_then_golden
from .lattice_entropy import LOG95_HALF, kappa_hat_excess_sup
from .block_fe import (BoundPhiSource, CriterionVerdict, MCPhiSource,
                       MU_STRATEGY, PhiSource, criterion_pointwise,
                       criterion_supercritical, psi_offdiag)
from .deloc_var import A_STAR, DelocParams, F_of_rho, solve_deloc
from .percolation import RhoStarEstimate

__all__ = [
    "P_C_DEFAULT",
    "BETA_CAP",
    "PhasePoint",
    "FoldedPoint",
    "PhaseVerdict",
    "FreeEnergyResult",
    "CurvePoint",
    "SweepCell",
    "fold_phase_point",
    "classify",
    "free_energy",
    "beta_c_envelope",
    "alpha_star_p",
    "second_curve_lower",
    "sweep",
]

P_C_DEFAULT = 0.6447
LOG5_HALF = 0.5 * math.log(5.0)

# proved cap on the localization boundary: above this beta the strategy
# bound forces localization at every alpha in the cone
BETA_CAP = 8.0 * math.log(3.0)

RhoLike = Union[float, RhoStarEstimate, Callable[[float], float], None]


@dataclass(frozen=True)
class PhasePoint:
    """Coupling pair plus block density.  Any (alpha, beta) is accepted;
    evaluation folds it into the cone alpha >= |beta| first."""

    alpha: float
    beta: float
    p: float

    def __post_init__(self) -> None:
        if not 0.0 < self.p < 1.0:
            raise ValueError("block density p must lie in (0, 1)")
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise ValueError("couplings must be finite")

    @property
    def in_cone(self) -> bool:
        return self.alpha >= abs(self.beta)


@dataclass(frozen=True)
class FoldedPoint:
    """Cone representative of a phase point.

    f(original) = shift + f(folded); swapped records whether the density
    was exchanged for 1-p, in which case any measured crossing frequency
    must refer to the folded density.  Verdicts are invariant under the
    fold (the additive shift moves both sides of every criterion
    equally), so classification happens here directly.
    """

    alpha: float
    beta: float
    p: float
    shift: float
    swapped: bool
    regime: str

    def __post_init__(self) -> None:
        if self.alpha < abs(self.beta) - 1e-12:
            raise ValueError("folded point must lie in the cone")


def fold_phase_point(pt: PhasePoint, p_c: float = P_C_DEFAULT) -> FoldedPoint:
    """Map a phase point into the cone alpha >= |beta|.

    First the negate-and-exchange reflection (when alpha + beta < 0),
    which contributes the additive shift (alpha + beta)/2; then the
    coupling swap (when beta > alpha still), which exchanges the density
    for 1-p.  The regime flag compares the folded density against p_c.
    """
    a, b, p, shift = pt.alpha, pt.beta, pt.p, 0.0
    if a + b < 0.0:
        shift = 0.5 * (a + b)
        a, b = -b, -a
    swapped = False
    if b > a:
        a, b = b, a
        p = 1.0 - p
        swapped = True
    regime = "supercritical" if p >= p_c else "subcritical"
    return FoldedPoint(alpha=a, beta=b, p=p, shift=shift,
                       swapped=swapped, regime=regime)


@dataclass(frozen=True)
class PhaseVerdict:
    """Three-valued phase decision with provenance.

    gap is the margin that produced the decision: distance of the
    deciding bound from the threshold for Localized/Delocalized, and the
    open bracket width for Undecided (always positive there).  detail
    keeps the underlying criterion evaluation.
    """

    state: str
    evidence: str
    gap: float
    detail: CriterionVerdict

    def __post_init__(self) -> None:
        if self.state not in ("Localized", "Delocalized", "Undecided"):
            raise ValueError("unknown verdict state %r" % (self.state,))
        if self.state == "Undecided" and not self.gap > 0.0:
            raise ValueError("an undecided verdict must carry an open gap")


def _to_phase_verdict(cv: CriterionVerdict, label: str) -> PhaseVerdict:
    if cv.verdict == "Localized":
        if cv.mu_lower == MU_STRATEGY:
            which = "strategy interface bound (mu=%g)" % MU_STRATEGY
        else:
            which = "interface entropy lower bound (mu=%.6g)" % cv.mu_lower
        gap = cv.sup_lower - cv.threshold
    elif cv.verdict == "Delocalized":
        which = "annealed upper bound (mu=%.6g)" % cv.mu_upper
        gap = cv.threshold - cv.sup_upper
    else:
        which = "rigorous bounds straddle the threshold"
        gap = cv.sup_upper - cv.sup_lower
    return PhaseVerdict(state=cv.verdict, evidence="%s: %s" % (label, which),
                        gap=gap, detail=cv)


def _resolve_rho(rho: RhoLike, folded: FoldedPoint) -> float:
    """Turn the caller's crossing-frequency input into a number for the
    folded density, refusing silently mismatched measurements."""
    if rho is None:
        raise ValueError(
            "subcritical evaluation needs the A-crossing frequency: pass "
            "rho as a float in (0, 1), a RhoStarEstimate, or a callable "
            "density -> frequency")
    if callable(rho):
        value = float(rho(folded.p))
    elif isinstance(rho, RhoStarEstimate):
        if abs(rho.p - folded.p) > 1e-12:
            raise ValueError(
                "rho was measured at density %g but the point folds to "
                "density %g; re-measure there or pass a callable"
                % (rho.p, folded.p))
        value = rho.mean
    else:
        if folded.swapped:
            raise ValueError(
                "the point folds to density 1-p; pass rho for that "
                "density or a callable density -> frequency")
        value = float(rho)
    if not 0.0 < value < 1.0:
        raise ValueError("crossing frequency must lie in (0, 1)")
    return value


def _phi_source(folded: FoldedPoint, mc_phi: Optional[dict]) -> PhiSource:
    if mc_phi is None:
        return BoundPhiSource(folded.alpha, folded.beta)
    return MCPhiSource(folded.alpha, folded.beta, **mc_phi)


def _subcritical_y_bar(folded: FoldedPoint, rho_value: float) -> float:
    if folded.alpha == folded.beta:
        return A_STAR
    return solve_deloc(
        DelocParams(folded.alpha, folded.beta, rho_value)).y_bar


def classify(alpha: float, beta: float, p: float, *,
             rho: RhoLike = None, p_c: float = P_C_DEFAULT,
             mc_phi: Optional[dict] = None) -> PhaseVerdict:
    """Decide Localized / Delocalized / Undecided at one phase point.

    The point is folded into the cone; the density regime picks the
    criterion.  Supercritical: single-interface test against the plain
    diagonal value.  Subcritical: block test at the B-crossing ratio
    y_bar of the variational maximiser at frequency rho (the symmetric
    test at the A-ratio is implied by it, so only one is run).  rho is
    ignored in the supercritical regime.  mc_phi, when given, is a dict
    of MCPhiSource settings enabling Monte Carlo point values alongside
    the rigorous bounds.
    """
    folded = fold_phase_point(PhasePoint(alpha, beta, p), p_c)
    src = _phi_source(folded, mc_phi)
    if folded.regime == "supercritical":
        cv = criterion_supercritical(folded.alpha, folded.beta, src)
        return _to_phase_verdict(cv, "supercritical criterion")
    rho_value = _resolve_rho(rho, folded)
    y_bar = _subcritical_y_bar(folded, rho_value)
    cv = criterion_pointwise(y_bar, folded.beta, src)
    return _to_phase_verdict(
        cv, "block criterion at y=%.6g (rho=%.6g)" % (y_bar, rho_value))


# =====================================================================
# Free energy per regime
# =====================================================================

@dataclass(frozen=True)
class FreeEnergyResult:
    """Free energy value or rigorous lower bound at a phase point.

    is_bound is False only when the verdict is Delocalized, where the
    delocalized expression is the exact free energy.  When Localized (or
    Undecided) the reported value is still a true lower bound: the
    delocalized strategy is always available to the path.
    """

    value: float
    is_bound: bool
    verdict: PhaseVerdict
    regime: str
    folded: FoldedPoint


def _mixture_bound(folded: FoldedPoint, gamma: float,
                   src: PhiSource) -> float:
    """Lower bound on f from splitting crossings between plain diagonal
    A blocks and interface-detour AB crossings with pair fraction gamma.

    Positive pair fractions are attainable above the percolation
    threshold, but only existence is proved; the caller's gamma
    quantifies that assumption.  The AB branch uses the rigorous lower
    bracket of the off-diagonal block value, maximised over the
    crossing ratio.
    """
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must lie in (0, 1)")
    s_aa = 0.5 * folded.alpha + LOG5_HALF
    a_ab, s_ab = scan_then_golden(
        lambda a: psi_offdiag("AB", a, folded.alpha, folded.beta, src).lower,
        2.0 + 1e-6, 40.0, n=39, tol=1e-8)
    w_aa = (1.0 - gamma) * A_STAR
    w_ab = gamma * a_ab
    return (w_aa * s_aa + w_ab * s_ab) / (w_aa + w_ab)


def free_energy(alpha: float, beta: float, p: float, *,
                rho: RhoLike = None, p_c: float = P_C_DEFAULT,
                mc_phi: Optional[dict] = None,
                gamma: Optional[float] = None) -> FreeEnergyResult:
    """Quenched free energy at a phase point, or its best rigorous bound.

    Delocalized verdicts give exact values: the plain diagonal value in
    the supercritical regime, the variational value F(rho) in the
    subcritical one (both plus the fold shift).  Localized and Undecided
    verdicts return the same expressions flagged as lower bounds.  In
    the supercritical Localized case a strictly better bound mixing in
    AB interface crossings is used when the caller supplies the pair
    fraction gamma (only the existence of a positive fraction is proved,
    so no default is assumed).
    """
    folded = fold_phase_point(PhasePoint(alpha, beta, p), p_c)
    src = _phi_source(folded, mc_phi)
    if folded.regime == "supercritical":
        cv = criterion_supercritical(folded.alpha, folded.beta, src)
        verdict = _to_phase_verdict(cv, "supercritical criterion")
        s_aa = 0.5 * folded.alpha + LOG5_HALF
        value = s_aa
        if verdict.state == "Localized" and gamma is not None:
            value = max(s_aa, _mixture_bound(folded, gamma, src))
        return FreeEnergyResult(value=folded.shift + value,
                                is_bound=verdict.state != "Delocalized",
                                verdict=verdict, regime=folded.regime,
                                folded=folded)
    rho_value = _resolve_rho(rho, folded)
    F = F_of_rho(DelocParams(folded.alpha, folded.beta, rho_value))
    y_bar = _subcritical_y_bar(folded, rho_value)
    cv = criterion_pointwise(y_bar, folded.beta, src)
    verdict = _to_phase_verdict(
        cv, "block criterion at y=%.6g (rho=%.6g)" % (y_bar, rho_value))
    return FreeEnergyResult(value=folded.shift + F,
                            is_bound=verdict.state != "Delocalized",
                            verdict=verdict, regime=folded.regime,
                            folded=folded)


# =====================================================================
# Localization boundary in beta at fixed alpha
# =====================================================================

@dataclass(frozen=True)
class CurvePoint:
    """Rigorous envelope (and optional Monte Carlo pin) for the
    localization boundary at one alpha."""

    alpha: float
    beta_lower: float
    beta_upper: float
    beta_estimate: Optional[float] = None
    beta_estimate_err: Optional[float] = None

    def __post_init__(self) -> None:
        if self.beta_lower > self.beta_upper + 1e-12:
            raise ValueError("envelope inverted")
        if self.beta_upper > BETA_CAP + 1e-12:
            raise ValueError("upper envelope exceeds the proved cap")


def _bisect_boundary(is_high: Callable[[float], bool], lo: float,
                     hi: float, tol: float) -> float:
    """First point (to tol) where the predicate flips from False to True;
    assumes is_high(lo) is False and is_high(hi) is True."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if is_high(mid):
            hi = mid
        else:
            lo = mid
    return hi


def beta_c_envelope(alpha: float, *, mc: Optional[dict] = None,
                    seed: int = 0, tol: float = 1e-4) -> CurvePoint:
    """Envelope for the supercritical localization boundary at fixed alpha.

    beta_lower is the closed-form annealed edge log(2 - e^{-alpha}),
    below which delocalization is proved.  beta_upper bisects the first
    beta at which the rigorous lower-bound criterion certifies
    localization, capped by the cone edge and the proved global cap.
    With `mc` (MCPhiSource settings), beta_estimate bisects the Monte
    Carlo point criterion instead: a point estimate of the true
    boundary, not rigorous, reported with an empirical error bar from a
    reseeded re-evaluation.  Estimates that never cross inside the cone
    clip to the diagonal.
    """
    if alpha < 0.0:
        raise ValueError("alpha must be >= 0")
    lower = math.log(2.0 - math.exp(-alpha))
    cap = min(alpha, BETA_CAP)
    if cap <= lower + 1e-15:
        # degenerate at alpha = 0: the envelope pinches to a point
        est = 0.0 if mc is not None else None
        err = tol if mc is not None else None
        return CurvePoint(alpha=alpha, beta_lower=lower, beta_upper=cap,
                          beta_estimate=est, beta_estimate_err=err)

    def rigorously_localized(b: float) -> bool:
        return criterion_supercritical(alpha, b).verdict == "Localized"

    if rigorously_localized(cap):
        upper = _bisect_boundary(rigorously_localized, lower, cap, tol)
    else:
        upper = cap

    est = err = None
    if mc is not None:
        settings = dict(mc)
        settings.setdefault("seed", seed)

        def gap(b: float, settings=settings) -> float:
            src = MCPhiSource(alpha, b, **settings)
            cv = criterion_supercritical(alpha, b, src)
            return cv.point_sup - LOG95_HALF

        mc_tol = max(tol, 2e-3)
        g_lo, g_hi = gap(lower), gap(cap)
        if g_hi <= 0.0:
            # no crossing inside the cone: boundary sits on the diagonal
            est, err = cap, mc_tol
        else:
            lo_b, hi_b = lower, cap
            while hi_b - lo_b > mc_tol:
                mid = 0.5 * (lo_b + hi_b)
                if gap(mid) > 0.0:
                    hi_b = mid
                else:
                    lo_b = mid
            est = 0.5 * (lo_b + hi_b)
            slope = max((g_hi - g_lo) / (cap - lower), 0.05)
            reseeded = dict(settings)
            reseeded["seed"] = settings["seed"] + 101
            g_re = gap(est, settings=reseeded)
            err = max(mc_tol, abs(g_re) / slope, hi_b - lo_b)
    return CurvePoint(alpha=alpha, beta_lower=lower, beta_upper=upper,
                      beta_estimate=est, beta_estimate_err=err)


# =====================================================================
# Subcritical axis-departure contrast and second-curve bound
# =====================================================================

def _axis_criterion_gap(C: float, rho: float) -> float:
    """Signed criterion gap on the lower-half boundary at contrast C.

    On alpha >= 0 >= beta both interface bounds pinch, so the block
    criterion at y_bar(C, rho) is exactly the interface-entropy excess
    sup against the y-dependent threshold; positive means localized.
    Increasing in C: a larger contrast shrinks y_bar and lowers the
    threshold faster than the excess sup falls.
    """
    y = solve_deloc(DelocParams(C, 0.0, rho)).y_bar
    s = 0.5 * math.log(y / (y - 2.0)) - 0.5 * C
    w, _ = kappa_hat_excess_sup(s)
    thr = 0.5 * math.log(4.0 * (y - 2.0) * (y - 1.0) ** 2 / y)
    if math.isinf(w):
        return math.inf
    return w - thr


def alpha_star_p(rho: float, *, tol: float = 1e-8) -> float:
    """Contrast C* at which the subcritical boundary leaves the axis.

    For coupling contrasts below C* the whole lower-half segment beta <=
    0 <= alpha with alpha - beta = C is delocalized; above it the block
    criterion flips.  Found by bisecting the closed-form criterion gap,
    which is monotone in C, with the B-crossing ratio supplied by the
    variational solver at frequency rho.
    """
    if not 0.0 < rho < 1.0:
        raise ValueError("rho must lie in (0, 1)")

    def H(C: float) -> float:
        return _axis_criterion_gap(C, rho)

    lo = 1e-6
    h_lo = H(lo)
    if h_lo >= 0.0:
        raise RuntimeError("criterion gap not negative at C=%g (gap %g); "
                           "no bracket for the axis departure" % (lo, h_lo))
    hi = grow_upper(H, lo, 0.25, 8.0, factor=2.0)
    if hi is None:
        scan = ", ".join("H(%.3g)=%.4g" % (c, H(c))
                         for c in (0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 4.0, 8.0))
        raise RuntimeError("criterion gap never turns positive up to C=8; "
                           "scan: " + scan)
    return bisect_root(H, lo, hi, tol=tol)


def second_curve_lower(alpha: float) -> float:
    """Proved lower bound for the AB-localization curve inside the
    localized region: below log(2 - e^{-alpha}) the off-diagonal block
    value collapses to the diagonal one identically."""
    if alpha < 0.0:
        raise ValueError("alpha must be >= 0")
    return math.log(2.0 - math.exp(-alpha))


# =====================================================================
# Plane sweep
# =====================================================================

@dataclass(frozen=True)
class SweepCell:
    """One grid cell of a phase-plane sweep."""

    alpha: float
    beta: float
    regime: str
    state: str
    evidence: str
    gap: float


def _auto_rho(seed: int) -> Callable[[float], float]:
    """Memoized measured crossing frequency, shared across sweep cells."""
    from .percolation import rho_star
    memo: dict = {}
    lock = threading.Lock()

    def fn(p: float) -> float:
        key = round(p, 12)
        with lock:
            if key not in memo:
                memo[key] = rho_star(p, steps=1000, replicas=10,
                                     seed=seed).mean
            return memo[key]

    return fn


def sweep(alpha_range: Tuple[float, float], beta_range: Tuple[float, float],
          resolution: Union[int, Tuple[int, int]], p: float, *,
          rho: RhoLike = None,
          p_c: float = P_C_DEFAULT, threads: int = 1,
          seed: int = 0) -> list:
    """Classify a rectangular grid of coupling pairs at one density.

    resolution is the point count per axis (endpoints included), either
    one int for both axes or an (alpha, beta) pair.  Cells fold into the
    cone before evaluation, so the grid may span the whole plane; cells
    whose fold swaps the density are classified at 1-p.  With rho=None a
    measured crossing frequency is computed once per needed density and
    shared.  Output is row-major in (alpha, beta) regardless of thread
    count.
    """
    if isinstance(resolution, int):
        res_a = res_b = resolution
    else:
        res_a, res_b = resolution
    if res_a < 1 or res_b < 1:
        raise ValueError("resolution must be >= 1")
    if threads < 1:
        raise ValueError("threads must be >= 1")

    def axis(rng: Tuple[float, float], n: int) -> list:
        lo, hi = float(rng[0]), float(rng[1])
        if hi < lo:
            raise ValueError("range must be ordered (lo, hi)")
        if n == 1:
            return [lo]
        return [lo + (hi - lo) * i / (n - 1) for i in range(n)]

    rho_fn: RhoLike = rho
    if rho is None:
        rho_fn = _auto_rho(seed)

    cells = [(a, b)
             for a in axis(alpha_range, res_a)
             for b in axis(beta_range, res_b)]

    def run(cell: Tuple[float, float]) -> SweepCell:
        a, b = cell
        folded = fold_phase_point(PhasePoint(a, b, p), p_c)
        need_rho = None if folded.regime == "supercritical" else rho_fn
        v = classify(a, b, p, rho=need_rho, p_c=p_c)
        return SweepCell(alpha=a, beta=b, regime=folded.regime,
                         state=v.state, evidence=v.evidence, gap=v.gap)

    if threads == 1:
        return [run(c) for c in cells]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(run, cells))
