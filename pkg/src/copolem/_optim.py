"""Small deterministic 1-d search utilities.

Hand-rolled so results are bit-reproducible across platforms and so the
tolerances stated in the public API are exactly the tolerances used.
"""

from __future__ import annotations

import math
from typing import Callable, Tuple

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
_INVPHI2 = (3.0 - math.sqrt(5.0)) / 2.0


def golden_max(f: Callable[[float], float], lo: float, hi: float,
               tol: float = 1e-9, maxiter: int = 200) -> Tuple[float, float]:
    """Golden-section maximization of a unimodal f on [lo, hi].

    Returns (x_max, f(x_max)). The interval is shrunk until its width is
    below tol * max(1, |x|).
    """
    a, b = float(lo), float(hi)
    if b < a:
        a, b = b, a
    h = b - a
    if h <= tol:
        x = 0.5 * (a + b)
        return x, f(x)
    c = a + _INVPHI2 * h
    d = a + _INVPHI * h
    fc, fd = f(c), f(d)
    for _ in range(maxiter):
        if h <= tol * max(1.0, abs(a) + abs(b)):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            h = b - a
            c = a + _INVPHI2 * h
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            h = b - a
            d = a + _INVPHI * h
            fd = f(d)
    if fc >= fd:
        return c, fc
    return d, fd


def scan_then_golden(f: Callable[[float], float], lo: float, hi: float,
                     n: int = 65, tol: float = 1e-9) -> Tuple[float, float]:
    """Coarse grid scan followed by golden-section refinement.

    The scan guards against picking a wrong branch when unimodality is not
    known a priori; golden-section then resolves the winning cell.
    """
    if hi <= lo:
        return lo, f(lo)
    xs = [lo + (hi - lo) * i / (n - 1) for i in range(n)]
    vals = [f(x) for x in xs]
    k = max(range(n), key=vals.__getitem__)
    a = xs[max(0, k - 1)]
    b = xs[min(n - 1, k + 1)]
    x, v = golden_max(f, a, b, tol=tol)
    if vals[k] > v:
        return xs[k], vals[k]
    return x, v


def bisect_root(f: Callable[[float], float], lo: float, hi: float,
                tol: float = 1e-12, maxiter: int = 200) -> float:
    """Bisection for a sign change of f on [lo, hi].

    Requires f(lo) and f(hi) to have opposite signs (zero counts as a
    sign). Returns the midpoint of the final bracket.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise ValueError("bisect_root: no sign change on [%g, %g]" % (lo, hi))
    a, b = float(lo), float(hi)
    for _ in range(maxiter):
        m = 0.5 * (a + b)
        if b - a <= tol * max(1.0, abs(m)):
            return m
        fm = f(m)
        if fm == 0.0:
            return m
        if flo * fm < 0.0:
            b = m
        else:
            a, flo = m, fm
    return 0.5 * (a + b)


def grow_upper(f: Callable[[float], float], lo: float, hi0: float,
               hi_cap: float, factor: float = 10.0) -> float | None:
    """Grow an upper bracket endpoint geometrically until f changes sign.

    Returns the first hi with sign(f(hi)) != sign(f(lo)), or None if the
    cap is reached without a sign change.
    """
    flo = f(lo)
    hi = hi0
    while hi <= hi_cap:
        if flo * f(hi) <= 0.0:
            return hi
        hi *= factor
    return None
