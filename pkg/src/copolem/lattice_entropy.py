"""Closed-form path entropies for the directed 2-d lattice model.

Paths take unit steps east, north, or south, never reversing a vertical
step immediately (no north-south or south-north adjacency).  Two entropy
densities drive everything downstream:

* ``kappa(a, b)``: entropy per step of paths that cross a block diagonally,
  making ``a*L`` steps from (0, 0) to (b*L, L) while staying in the
  vertical slab (-L, L].  Defined on DOM = {a >= 1 + b, b >= 0}.
* ``kappa_hat(mu)``: entropy per step of paths that run along a horizontal
  interface, making ``mu*L`` steps from (0, 0) to (L, 0) with no vertical
  restriction.

Both have explicit Stirling-type variational formulas whose maximisers
(the densities of up-runs and down-runs per column) solve quadratic
equations, so everything here is closed form up to 1-d searches.  The
convention 0*log(0) = 0 applies throughout and makes every boundary of
DOM finite.

``model_constants`` collects the handful of derived constants the phase
diagram is organized around: the maximal diagonal-crossing entropy
kappa(5/2, 1) = log(5)/2 at a* = 5/2, the slope constant log(9/5)/2, and
the two interface thresholds alpha0 ~ 0.125 and alpha1 ~ 0.154.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

from ._optim import bisect_root, golden_max, scan_then_golden

LOG5_HALF = 0.5 * math.log(5.0)
LOG95_HALF = 0.5 * math.log(9.0 / 5.0)

_DOM_TOL = 1e-12


def _xlogx(x: float) -> float:
    # 0 log 0 := 0; tolerate tiny negative round-off.
    if x > 0.0:
        return x * math.log(x)
    if x > -1e-9:
        return 0.0
    raise ValueError("xlogx of a negative argument: %r" % (x,))


def _check_dom(a: float, b: float) -> None:
    if not (b >= -_DOM_TOL and a >= 1.0 + b - _DOM_TOL):
        raise ValueError("(a, b) = (%g, %g) outside DOM {a >= 1 + b, b >= 0}" % (a, b))


def kappa_maximisers(a: float, b: float) -> Tuple[float, float]:
    """Optimal up-run and down-run column densities (delta, eps) for kappa.

    Closed-form roots of the stationarity conditions.  The b = 1 line is a
    removable 0/0 in the generic eps formula and is served by its own
    branch.
    """
    _check_dom(a, b)
    if b <= _DOM_TOL:
        return 0.0, 0.0
    disc = (a - b) * (a - b) + b * b - 1.0
    r = math.sqrt(max(disc, 0.0))
    if abs(b - 1.0) < 1e-12:
        delta = 0.5
        eps = (a - 2.0) / (2.0 * (a - 1.0))
        return delta, eps
    delta = b * ((a + 1.0) - r) / (2.0 * (1.0 + b))
    eps = b * (r - (a - 1.0)) / (2.0 * (1.0 - b))
    return delta, eps


def _f_ab(a: float, b: float, delta: float, eps: float) -> float:
    qp = 0.5 * (a + 1.0 - b)
    qm = 0.5 * (a - 1.0 - b)
    return (
        _xlogx(b)
        - 2.0 * _xlogx(delta)
        + _xlogx(qp)
        - _xlogx(qp - delta)
        - 2.0 * _xlogx(eps)
        - _xlogx(b - delta - eps)
        + _xlogx(qm)
        - _xlogx(qm - eps)
    )


def kappa(a: float, b: float) -> float:
    """Entropy per step of slab-confined block-crossing paths."""
    _check_dom(a, b)
    delta, eps = kappa_maximisers(a, b)
    return _f_ab(a, b, delta, eps) / a


def kappa_diag(a: float) -> float:
    """kappa(a, 1) through its simplified closed form.

    a * kappa(a, 1) = log 2 + (a log a - (a - 2) log(a - 2)) / 2, valid
    for a >= 2.  Kept separate from the generic route so the two can be
    cross-checked.
    """
    if a < 2.0 - _DOM_TOL:
        raise ValueError("kappa_diag needs a >= 2, got %g" % a)
    return (math.log(2.0) + 0.5 * (_xlogx(a) - _xlogx(a - 2.0))) / a


def kappa_diag_da(a: float) -> float:
    """d/da of kappa(a, 1): equals -log(2(a-2)) / a**2 for a > 2."""
    if a <= 2.0:
        raise ValueError("kappa_diag_da needs a > 2, got %g" % a)
    return -math.log(2.0 * (a - 2.0)) / (a * a)


def kappa_partials(a: float, b: float) -> Tuple[float, float]:
    """(d kappa/d a, d kappa/d b) on the interior of DOM.

    Envelope differentiation at the closed-form maximisers.  Raises on the
    boundary a = 1 + b or b = 0 where the logs degenerate.
    """
    _check_dom(a, b)
    if a - 1.0 - b <= 1e-9 or b <= 1e-9:
        raise ValueError("kappa_partials needs interior (a > 1 + b, b > 0)")
    delta, eps = kappa_maximisers(a, b)
    qp = 0.5 * (a + 1.0 - b)
    qm = 0.5 * (a - 1.0 - b)
    k = _f_ab(a, b, delta, eps) / a
    dk_da = -k / a + math.log(qp * qm / ((qp - delta) * (qm - eps))) / (2.0 * a)
    dk_db = math.log(
        b * b * (qp - delta) * (qm - eps) / ((b - delta - eps) ** 2 * qp * qm)
    ) / (2.0 * a)
    return dk_da, dk_db


def kappa_hat_maximiser(mu: float) -> float:
    """Common optimal run density for the interface entropy (delta = eps)."""
    if mu < 1.0 - _DOM_TOL:
        raise ValueError("kappa_hat needs mu >= 1, got %g" % mu)
    return 0.5 * (mu - math.sqrt((mu - 1.0) ** 2 + 1.0))


def kappa_hat(mu: float) -> float:
    """Entropy per step of interface-returning paths; kappa_hat(1) = 0."""
    if mu < 1.0 - _DOM_TOL:
        raise ValueError("kappa_hat needs mu >= 1, got %g" % mu)
    m = 0.5 * (mu - 1.0)
    d = kappa_hat_maximiser(mu)
    f = (
        -4.0 * _xlogx(d)
        - _xlogx(1.0 - 2.0 * d)
        - 2.0 * _xlogx(m - d)
        + 2.0 * _xlogx(m)
    )
    return f / mu


def kappa_hat_excess_sup(s: float, mu_hi: float = 1e6) -> Tuple[float, float]:
    """sup over mu >= 1 of mu * (kappa_hat(mu) - s), with its argmax.

    The objective is concave in mu (mu * kappa_hat(mu) is concave and the
    subtracted term is linear), so golden-section is safe.  For s <= 0 the
    objective grows like log(mu) and the supremum is +inf.
    """
    if s <= 0.0:
        return math.inf, math.inf

    def h(mu: float) -> float:
        return mu * (kappa_hat(mu) - s)

    mu_star, val = golden_max(h, 1.0, mu_hi, tol=1e-11)
    v1 = h(1.0)
    if v1 >= val:
        return v1, 1.0
    return val, mu_star


@dataclass(frozen=True)
class ModelConstants:
    """Derived constants of the block-entropy landscape."""

    a_star: float            # argmax of kappa(., 1)
    kappa_star: float        # kappa(a_star, 1) = log(5)/2
    dk_da_at_star: float     # d kappa/d a at (a_star, 1); zero
    b_slope_at_star: float   # a_star * d kappa/d b at (a_star, 1) = log(9/5)/2
    mu_sup: float            # argmax of mu * (kappa_hat(mu) - log(5)/2)
    mu_sup_value: float      # the corresponding supremum, about 0.16
    alpha0: float            # threshold where the shifted sup reaches log(9/5)/2
    alpha1: float            # threshold of the single-interface tangency equation


def _alpha1_rhs(t: float) -> float:
    e = math.exp(-t)
    return 0.5 * math.log(4.0 * e * (5.0 + e) ** 2 / (5.0 * (5.0 - e) ** 2))


@lru_cache(maxsize=1)
def model_constants() -> ModelConstants:
    """Compute the model constants from scratch (cached; runs in ~0.1 s)."""
    a_star = bisect_root(lambda a: -kappa_diag_da(a), 2.0 + 1e-9, 10.0, tol=1e-14)
    kappa_star = kappa(a_star, 1.0)
    dk_da, dk_db = kappa_partials(a_star, 1.0)
    mu_sup_value, mu_sup = kappa_hat_excess_sup(kappa_star)

    def g0(t: float) -> float:
        return kappa_hat_excess_sup(kappa_star - 0.5 * t)[0] - LOG95_HALF

    alpha0 = bisect_root(g0, 1e-6, 1.0, tol=1e-12)

    w = kappa_hat_excess_sup(kappa_star)[0]

    def g1(t: float) -> float:
        return w - _alpha1_rhs(t)

    alpha1 = bisect_root(g1, 1e-6, 1.0, tol=1e-12)

    return ModelConstants(
        a_star=a_star,
        kappa_star=kappa_star,
        dk_da_at_star=dk_da,
        b_slope_at_star=a_star * dk_db,
        mu_sup=mu_sup,
        mu_sup_value=mu_sup_value,
        alpha0=alpha0,
        alpha1=alpha1,
    )


def crossing_profile_sup(nu: float) -> Tuple[float, float]:
    """sup over admissible b of kappa(b * nu, 1 - b), with its argmax.

    nu is the steps-per-column-height aspect of a tilted crossing; the
    admissible range b in [2 / (nu + 1), 1] is exactly where the pair
    (b * nu, 1 - b) stays inside DOM.
    """
    if nu < 1.0 - _DOM_TOL:
        raise ValueError("crossing_profile_sup needs nu >= 1, got %g" % nu)
    b_lo = 2.0 / (nu + 1.0)
    if b_lo >= 1.0:
        return 1.0, kappa(nu, 0.0)

    def f(b: float) -> float:
        return kappa(b * nu, 1.0 - b)

    b_star, val = scan_then_golden(f, b_lo, 1.0, n=65, tol=1e-9)
    return b_star, val


def g_of_nu(nu: float) -> float:
    """Entropic gap nu * (log(5)/2 - sup_b kappa(b nu, 1 - b)).

    Strictly above log(9/5)/2 for all nu >= 1 and decreasing to it as
    nu grows; this gap is what keeps single diagonal crossings from
    beating pair-block strategies.
    """
    _, f_nu = crossing_profile_sup(nu)
    return nu * (LOG5_HALF - f_nu)
