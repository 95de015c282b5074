"""Random block fields and the maximal A-crossing frequency rho_star(p).

Blocks tile the plane and are labelled A with probability p, independently.
A coarse-grained path hops between corners of the even sublattice: from
corner (i, j) the up move goes to (i+1, j+1) and crosses block (i, j),
the down move goes to (i+1, j-1) and crosses block (i, j-1).  Every move
consumes exactly one block, so A-blocks act as open bonds of the rotated
lattice and the model is directed bond percolation (threshold near 0.644).

rho_star(p) is the maximal asymptotic frequency of A-blocks along such a
path.  It is estimated by last-passage dynamic programming over the cone
of reachable corners, maximised over the end height, and averaged over
disorder replicas.  Finite-length values drift like O(1/N), so the
threshold estimator extrapolates linearly in 1/N over a ladder of lengths
before locating where the extrapolated value departs from 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .interface_fe import replica_seed

__all__ = [
    "BlockField",
    "RhoStarEstimate",
    "PcEstimate",
    "sample_field",
    "rho_star",
    "estimate_pc",
]

# memory guards: label grids and DP bands beyond these sizes are refused
_MAX_FIELD_CELLS = 200_000_000
_MAX_STEPS = 2_000_000


@dataclass(frozen=True)
class BlockField:
    """Window of i.i.d. Bernoulli(p) block labels, 1 = A and 0 = B.

    labels has shape (height, width); labels[j, i] is the block in
    column i, row j of the window.  The empirical A-fraction is checked
    to sit within 5 standard deviations of p, which catches seed
    plumbing mistakes while rejecting honest samples almost never.
    """

    width: int
    height: int
    labels: np.ndarray
    p: float
    seed: int

    def __post_init__(self) -> None:
        if self.labels.shape != (self.height, self.width):
            raise ValueError("labels shape does not match (height, width)")
        frac = float(self.labels.mean())
        slack = 5.0 / math.sqrt(self.width * self.height)
        if abs(frac - self.p) > slack:
            raise ValueError("empirical A-fraction %.6f strays more than "
                             "5/sqrt(cells) from p=%.6f" % (frac, self.p))

    @property
    def a_fraction(self) -> float:
        return float(self.labels.mean())


@dataclass(frozen=True)
class RhoStarEstimate:
    """Monte Carlo estimate of the maximal A-crossing frequency at density p."""

    p: float
    steps: int
    replicas: int
    mean: float
    stderr: float
    seed: int

    def __post_init__(self) -> None:
        if self.mean > 1.0 + 1e-12:
            raise ValueError("frequency estimate exceeds 1")
        if self.mean < self.p - 3.0 * self.stderr - 1e-12:
            # a straight path already achieves frequency ~ p, and the DP
            # maximum concentrates far above it; this can only be a bug
            raise ValueError("frequency estimate fell below p - 3*stderr")


@dataclass(frozen=True)
class PcEstimate:
    """Grid-resolution estimate of the directed percolation threshold.

    value is the largest grid density whose length-extrapolated crossing
    frequency stays below the plateau threshold; uncertainty is the grid
    spacing.  extrapolated carries the per-density extrapolated values,
    ladder the lengths used for the 1/N fit.  The fit order is a module
    choice, recorded in `method` so downstream consumers see it.
    """

    value: float
    uncertainty: float
    threshold: float
    p_values: Tuple[float, ...]
    extrapolated: Tuple[float, ...]
    ladder: Tuple[int, ...]
    replicas: int
    seed: int
    method: str = "linear fit in 1/N over the length ladder"


def sample_field(width: int, height: int, p: float, seed: int) -> BlockField:
    """Draw a width x height window of i.i.d. Bernoulli(p) block labels."""
    if width < 1 or height < 1:
        raise ValueError("field dimensions must be >= 1")
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    if width * height > _MAX_FIELD_CELLS:
        raise ValueError("field of %d cells exceeds the memory guard"
                         % (width * height))
    rng = np.random.default_rng(np.random.PCG64(replica_seed(seed, 0)))
    labels = (rng.random((height, width)) < p).astype(np.uint8)
    return BlockField(width=width, height=height, labels=labels, p=p, seed=seed)


def _lp_frequencies(p: float, steps: int, rep_seed: int,
                    checkpoints: Sequence[int]) -> list:
    """Best A-frequency at each checkpoint length, one disorder replica.

    Runs the last-passage recursion column by column.  Column t draws
    exactly 2t+2 uniforms for the block rows [-t-1, t] that the move
    from column t can consume, in a fixed order independent of p, so
    realizations at different densities share one uniform field (the
    monotone coupling device) and prefixes agree across lengths.
    """
    rng = np.random.default_rng(np.random.PCG64(rep_seed))
    S = steps
    T = np.full(2 * S + 1, -np.inf)
    T[S] = 0.0
    bfull = np.zeros(2 * S + 2)
    marks = set(checkpoints)
    out = {}
    for t in range(S):
        u = rng.random(2 * t + 2)
        bfull[S - t: S + t + 2] = u < p
        up = T + bfull[1:]
        dn = T + bfull[:-1]
        T[1:] = up[:-1]
        T[0] = dn[1]
        T[1:-1] = np.maximum(T[1:-1], dn[2:])
        n = t + 1
        if n in marks:
            out[n] = float(T.max()) / n
    return [out[n] for n in checkpoints]


def rho_star(p: float, steps: int, replicas: int, seed: int) -> RhoStarEstimate:
    """Estimate rho_star(p) by last-passage DP over `replicas` disorder draws."""
    if steps < 100:
        raise ValueError("steps must be >= 100")
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    if steps > _MAX_STEPS:
        raise ValueError("steps=%d exceeds the DP band memory guard" % steps)
    if replicas < 1:
        raise ValueError("replicas must be >= 1")
    vals = np.empty(replicas)
    for r in range(replicas):
        vals[r] = _lp_frequencies(p, steps, replica_seed(seed, r), [steps])[0]
    mean = float(vals.mean())
    stderr = float(vals.std(ddof=1) / math.sqrt(replicas)) if replicas > 1 else 0.0
    return RhoStarEstimate(p=p, steps=steps, replicas=replicas,
                           mean=mean, stderr=stderr, seed=seed)


def estimate_pc(p_values: Sequence[float], steps: int = 2000,
                replicas: int = 20, seed: int = 0,
                threshold: float = 1.0 - 1e-3) -> PcEstimate:
    """Locate the percolation threshold on a density grid.

    For each density the crossing frequency is measured at lengths
    steps//4, steps//2 and steps within a single DP pass per replica
    (prefixes are shared), the replica means are extrapolated linearly
    in 1/N, and the estimate is the largest grid density whose
    extrapolated value stays below `threshold`.  Grid spacing is the
    quoted uncertainty.  Raises if the whole grid sits at the plateau.
    """
    ps = sorted(float(q) for q in p_values)
    if len(ps) < 2:
        raise ValueError("need at least two grid densities")
    if len(set(ps)) != len(ps):
        raise ValueError("grid densities must be distinct")
    if ps[0] <= 0.0 or ps[-1] >= 1.0:
        raise ValueError("grid densities must lie in (0, 1)")
    if steps < 100:
        raise ValueError("steps must be >= 100")
    if steps > _MAX_STEPS:
        raise ValueError("steps=%d exceeds the DP band memory guard" % steps)

    ladder = sorted({max(100, steps // 4), max(100, steps // 2), steps})
    design = np.column_stack([np.ones(len(ladder)),
                              [1.0 / n for n in ladder]])
    extrapolated = []
    for p in ps:
        acc = np.zeros(len(ladder))
        for r in range(replicas):
            acc += _lp_frequencies(p, steps, replica_seed(seed, r), ladder)
        means = acc / replicas
        coef, *_ = np.linalg.lstsq(design, means, rcond=None)
        extrapolated.append(float(coef[0]))

    below = [i for i, v in enumerate(extrapolated) if v < threshold]
    if not below:
        raise ValueError("no grid density below the plateau threshold; "
                         "extend the grid toward smaller p")
    i_star = max(below)
    spacing = max(b - a for a, b in zip(ps, ps[1:]))
    return PcEstimate(value=ps[i_star], uncertainty=spacing,
                      threshold=threshold, p_values=tuple(ps),
                      extrapolated=tuple(extrapolated),
                      ladder=tuple(ladder), replicas=replicas, seed=seed)
