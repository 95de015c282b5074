"""Independent reference implementations used as test oracles.

Everything here favors obviousness over speed: explicit path
enumeration with pruning, dict-free recursion, dense-grid maximization.
None of it shares code with the package beyond closed-form arithmetic.
"""

import math

import numpy as np

_E, _N, _S = 0, 1, 2


def count_paths_brute(steps: int, end_x: int, end_y: int,
                      band=None) -> int:
    """Count E/N/S paths, no immediate N<->S reversal, to (end_x, end_y).

    band, when set, confines every visited height to (-band, band].
    """

    def ok(y):
        return band is None or -band < y <= band

    if not ok(0):
        return 0

    def rec(x, y, last, left):
        if left == 0:
            return 1 if (x == end_x and y == end_y) else 0
        need_e = end_x - x
        if need_e < 0 or need_e > left:
            return 0
        v = left - need_e
        dy = end_y - y
        if abs(dy) > v or (v - dy) % 2:
            return 0
        total = rec(x + 1, y, _E, left - 1)
        if last != _S and ok(y + 1):
            total += rec(x, y + 1, _N, left - 1)
        if last != _N and ok(y - 1):
            total += rec(x, y - 1, _S, left - 1)
        return total

    return rec(0, 0, _E, steps)


def logZ_brute(omega, alpha: float, beta: float, L: int) -> float:
    """Exact interface partition sum by full path enumeration.

    Step classification: an up-step into height y is upper iff y >= 1, a
    down-step into y iff y >= 0, an east step at y iff y >= 1.  Upper
    steps gain alpha on A monomers (omega 1), lower steps gain beta on B
    monomers (omega 0); everything else has weight 1.
    """
    steps = len(omega)
    ea, eb = math.exp(alpha), math.exp(beta)
    acc = [0.0]

    def wt(upper, i):
        if upper and omega[i] == 1:
            return ea
        if not upper and omega[i] == 0:
            return eb
        return 1.0

    def rec(x, y, last, i, w):
        left = steps - i
        if left == 0:
            if x == L and y == 0:
                acc[0] += w
            return
        need_e = L - x
        if need_e < 0 or need_e > left:
            return
        v = left - need_e
        if abs(y) > v or (v + y) % 2:
            return
        rec(x + 1, y, _E, i + 1, w * wt(y >= 1, i))
        if last != _S:
            rec(x, y + 1, _N, i + 1, w * wt(y + 1 >= 1, i))
        if last != _N:
            rec(x, y - 1, _S, i + 1, w * wt(y - 1 >= 0, i))

    rec(0, 0, _E, 0, 1.0)
    return math.log(acc[0])


# =====================================================================
# Percolation reference
# =====================================================================

def percolation_columns(rep_seed: int, p: float, steps: int):
    """Replay the documented per-replica draw layout, column by column.

    Column t draws 2t + 2 uniforms and writes rows [S - t, S + t + 1] of
    a (2S + 2)-slot indicator array; stale slots outside the window are
    unreachable at that column.
    """
    rng = np.random.default_rng(np.random.PCG64(rep_seed))
    S = steps
    bfull = np.zeros(2 * S + 2)
    cols = []
    for t in range(S):
        u = rng.random(2 * t + 2)
        bfull[S - t:S + t + 2] = u < p
        cols.append(bfull.copy())
    return cols


def lp_best_brute(columns, steps: int):
    """Best A-count after each move count, by enumerating all 2^steps
    up/down paths.  A move from slot q crosses columns[t][q + 1] going
    up and columns[t][q] going down."""
    best = [-1.0] * steps

    def rec(t, pos, acc):
        if t > 0 and acc > best[t - 1]:
            best[t - 1] = acc
        if t == steps:
            return
        col = columns[t]
        rec(t + 1, pos + 1, acc + col[pos + 1])
        rec(t + 1, pos - 1, acc + col[pos])

    rec(0, steps, 0.0)
    return best


# =====================================================================
# Dense-grid variational oracle
# =====================================================================

def _xlogx_vec(x):
    out = np.zeros_like(x)
    m = x > 0
    out[m] = x[m] * np.log(x[m])
    return out


def kappa_diag_vec(a):
    return (math.log(2.0) + 0.5 * (_xlogx_vec(a) - _xlogx_vec(a - 2.0))) / a


def dense_F(alpha: float, beta: float, rho: float) -> float:
    """Maximize the delocalized two-ratio average on refining log grids."""

    def scan(gx, gy):
        u = 0.5 * alpha + kappa_diag_vec(gx)
        v = 0.5 * beta + kappa_diag_vec(gy)
        wx = rho * gx
        wy = (1.0 - rho) * gy
        R = ((wx * u)[None, :] + (wy * v)[:, None]) / (wx[None, :]
                                                       + wy[:, None])
        iy, ix = np.unravel_index(int(np.argmax(R)), R.shape)
        return float(R[iy, ix]), float(gx[ix]), float(gy[iy])

    lo_x = lo_y = 1e-9
    hi_x = hi_y = 1e3
    best = -np.inf
    for widen in (3.0, 1.1, 1.01, None):
        gx = 2.0 + np.logspace(math.log10(lo_x), math.log10(hi_x), 400)
        gy = 2.0 + np.logspace(math.log10(lo_y), math.log10(hi_y), 400)
        val, bx, by = scan(gx, gy)
        best = max(best, val)
        if widen is None:
            break
        ox, oy = bx - 2.0, by - 2.0
        lo_x, hi_x = ox / widen, ox * widen
        lo_y, hi_y = oy / widen, oy * widen
    return best
