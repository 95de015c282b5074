"""Delocalized-phase variational formula and its coupled maximiser system.

At A-crossing frequency rho the fully delocalized free energy per step is

    F(rho) = sup_{x,y >= 2} [rho x u(x) + (1-rho) y v(y)] / [rho x + (1-rho) y]

where x u(x) = alpha x / 2 + log 2 + [x log x - (x-2) log(x-2)] / 2 is the
value of diagonally crossing an A block in time ratio x (u peaks at
x = 5/2 with u = alpha/2 + log(5)/2), and v is the same form with beta.
Stationarity in (x, y) reduces to the coupled pair

    0 = log 2 + rho log(x-2) + (1-rho) log(y-2)
    0 = (alpha - beta) + log[ x (y-2) / (y (x-2)) ]

with C = alpha - beta >= 0.  The second equation eliminates y in closed
form, y(x) = 2 / (1 - e^{-C} (x-2)/x); substituted into the first it
leaves a strictly increasing function of log(x-2), so the root is unique
and safely bisectable.  For C >= log 5 and small rho the root runs away
(x unbounded); that branch is reported with y at its closed-form limit
2 / (1 - e^{-C}) and F at its limit value alpha/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ._optim import bisect_root
from .lattice_entropy import kappa_diag

__all__ = [
    "DelocParams",
    "DelocSolution",
    "u_of_x",
    "v_of_y",
    "solve_deloc",
    "F_of_rho",
]

A_STAR = 2.5
LOG5_HALF = 0.5 * math.log(5.0)

# bisection runs in t = log(x - 2); the cap mirrors an x ceiling of 1e12
# beyond which the runaway branch is declared
_T_LO = -60.0
_T_CAP = math.log(1e12)


def u_of_x(x: float, alpha: float) -> float:
    """Crossing value per step of an A block at time ratio x >= 2."""
    if x < 2.0:
        raise ValueError("u_of_x: x must be >= 2")
    return 0.5 * alpha + kappa_diag(x)


def v_of_y(y: float, beta: float) -> float:
    """Crossing value per step of a B block; same form as u_of_x."""
    if y < 2.0:
        raise ValueError("v_of_y: y must be >= 2")
    return 0.5 * beta + kappa_diag(y)


@dataclass(frozen=True)
class DelocParams:
    """Couplings and A-crossing frequency for the delocalized formula.

    rho is the asymptotic fraction of crossed blocks of type A.  The
    endpoint values rho = 0 and rho = 1 are accepted here because
    F_of_rho resolves them in closed form; solve_deloc itself requires
    the open interval.
    """

    alpha: float
    beta: float
    rho: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError("rho must lie in [0, 1]")
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise ValueError("couplings must be finite")

    @property
    def C(self) -> float:
        """Coupling contrast alpha - beta."""
        return self.alpha - self.beta


@dataclass(frozen=True)
class DelocSolution:
    """Maximisers and value of the delocalized variational formula.

    x_bar is +inf on the runaway branch (C >= log 5, rho small); there
    residual1 is NaN since the first stationarity equation has no finite
    root, while y_bar and F carry their closed-form limits.  Ordering on
    the regular branch: 2 < y_bar <= 5/2 <= x_bar, equalities iff C = 0.
    """

    x_bar: float
    y_bar: float
    F: float
    residual1: float
    residual2: float


def _y_minus_2(t: float, delta: float) -> float:
    # y(x) - 2 = 2 delta (x-2) / (x - delta (x-2)) at x = 2 + e^t,
    # written to stay exact when y hugs 2
    et = math.exp(t)
    return 2.0 * delta * et / (2.0 + (1.0 - delta) * et)


def _eq1(t: float, rho: float, delta: float) -> float:
    # log 2 + rho log(x-2) + (1-rho) log(y(x)-2) in t = log(x-2)
    return math.log(2.0) + rho * t + (1.0 - rho) * math.log(_y_minus_2(t, delta))


def solve_deloc(p: DelocParams) -> DelocSolution:
    """Solve the stationarity pair for the maximisers (x_bar, y_bar).

    Requires rho in (0, 1) and C = alpha - beta >= 0 (map C < 0 inputs
    through F(alpha,beta;rho) = F(beta,alpha;1-rho) instead).  The root
    of the first equation is bisected in log(x-2) after eliminating y;
    a coarse scan asserts the sign change is unique.  If no finite
    bracket exists below x = 1e12 the runaway branch is returned.
    """
    if not 0.0 < p.rho < 1.0:
        raise ValueError("solve_deloc needs rho in the open interval (0, 1)")
    C = p.C
    if C < 0.0:
        raise ValueError("solve_deloc needs alpha >= beta; use the swap "
                         "symmetry F(alpha,beta;rho) = F(beta,alpha;1-rho)")
    rho = p.rho

    if C == 0.0:
        # x = y and the first equation collapses to log 2 + log(x-2) = 0
        F = 0.5 * (rho * p.alpha + (1.0 - rho) * p.beta) + LOG5_HALF
        return DelocSolution(x_bar=A_STAR, y_bar=A_STAR, F=F,
                             residual1=0.0, residual2=0.0)

    delta = math.exp(-C)

    def f(t: float) -> float:
        return _eq1(t, rho, delta)

    if f(_T_CAP) < 0.0:
        # runaway branch: no finite maximiser in x below the cap
        y_bar = 2.0 / (1.0 - delta)
        residual2 = C + math.log((y_bar - 2.0) / y_bar)
        return DelocSolution(x_bar=math.inf, y_bar=y_bar, F=0.5 * p.alpha,
                             residual1=math.nan, residual2=residual2)

    # the derivative in t is bounded below by rho > 0, so there is exactly
    # one sign change; a coarse scan double-checks that before bisecting
    n = 65
    signs = 0
    prev = f(_T_LO)
    for i in range(1, n):
        t = _T_LO + (_T_CAP - _T_LO) * i / (n - 1)
        cur = f(t)
        if prev < 0.0 <= cur or prev <= 0.0 < cur:
            signs += 1
        prev = cur
    if signs > 1:
        raise RuntimeError("solve_deloc: multiple sign changes detected; "
                           "the stationarity equation is not monotone here")

    t_star = bisect_root(f, _T_LO, _T_CAP, tol=1e-14)
    xm2 = math.exp(t_star)
    ym2 = _y_minus_2(t_star, delta)
    x_bar = 2.0 + xm2
    y_bar = 2.0 + ym2

    residual1 = math.log(2.0) + rho * t_star + (1.0 - rho) * math.log(ym2)
    residual2 = C + math.log(x_bar) + math.log(ym2) - math.log(y_bar) - t_star

    wx = rho * x_bar
    wy = (1.0 - rho) * y_bar
    F = (wx * u_of_x(x_bar, p.alpha) + wy * v_of_y(y_bar, p.beta)) / (wx + wy)
    return DelocSolution(x_bar=x_bar, y_bar=y_bar, F=F,
                         residual1=residual1, residual2=residual2)


def F_of_rho(p: DelocParams) -> float:
    """Delocalized free energy F(alpha, beta; rho).

    Endpoints are closed forms (rho = 1 gives alpha/2 + log(5)/2, rho = 0
    gives beta/2 + log(5)/2); C < 0 inputs are folded through the swap
    symmetry so the solver only ever sees C >= 0.
    """
    if p.alpha < p.beta:
        return F_of_rho(DelocParams(p.beta, p.alpha, 1.0 - p.rho))
    if p.rho == 1.0:
        return 0.5 * p.alpha + LOG5_HALF
    if p.rho == 0.0:
        return 0.5 * p.beta + LOG5_HALF
    return solve_deloc(p).F
