"""Penalized least squares on a two-point design.

The design has a single binary regressor x in {0, 1} with n replicate
observations at each level, entering only through the per-level means
ybar0 and ybar1.  The fit minimizes

    n * [(ybar0 - b0)^2 + (ybar1 - b0 - b1)^2] + n * C(b1),

    C(b1) = c0 * 1{b1 != 0} + c1 * |b1|,

where c0 is a fixed inclusion cost and c1 a proportional shrinkage cost.
Writing dhat = ybar1 - ybar0, the minimizer has a closed form.  A kept
slope is the soft-thresholded difference b1 = dhat -+ c1, costing
c0 + c1*|b1| on top of its residual; dropping the slope costs dhat^2 / 2
in residual instead.  Comparing the two branches, keeping wins exactly
when (|dhat| - c1)^2 / 2 >= c0, i.e. |dhat| >= c* with c* = c1 +
sqrt(2*c0).  Indifference at |dhat| = c* resolves to inclusion.  The intercept is always b0 = (ybar0 + ybar1 - b1) / 2, so
the fitted value at x = 1/2 equals the grand mean regardless of penalty.

``fit_oracle`` re-derives the same answer by brute-force grid search over
(b0, b1) and exists purely to cross-check the closed form.
"""

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PenaltyParams:
    """Inclusion and shrinkage costs defining C(b1).

    Args:
        c0: fixed cost charged whenever b1 != 0. Must be >= 0.
        c1: proportional cost c1 * |b1|. Must be >= 0.
    """

    c0: float = 0.0
    c1: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.c0) and self.c0 >= 0.0):
            raise ValueError(f"c0 must be a finite nonnegative real, got {self.c0}")
        if not (math.isfinite(self.c1) and self.c1 >= 0.0):
            raise ValueError(f"c1 must be a finite nonnegative real, got {self.c1}")


@dataclass(frozen=True)
class ModelParams:
    """True regression coefficients: f(x) = beta0 + beta1 * x."""

    beta0: float
    beta1: float

    def __post_init__(self):
        if not (math.isfinite(self.beta0) and math.isfinite(self.beta1)):
            raise ValueError(
                f"coefficients must be finite, got ({self.beta0}, {self.beta1})"
            )


@dataclass(frozen=True)
class Sample:
    """Per-level mean observations with n replicates at each x.

    For n = 1 this is exactly the pair of raw observations (y0, y1).
    """

    ybar0: float
    ybar1: float
    n: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.ybar0) and math.isfinite(self.ybar1)):
            raise ValueError(
                f"sample means must be finite, got ({self.ybar0}, {self.ybar1})"
            )
        if not (isinstance(self.n, int) and self.n >= 1):
            raise ValueError(f"n must be a positive integer, got {self.n!r}")

    @property
    def dhat(self) -> float:
        """Mean gap ybar1 - ybar0, the unpenalized slope estimate."""
        return self.ybar1 - self.ybar0


@dataclass(frozen=True)
class Estimate:
    """Fitted coefficients plus the inclusion flag for the slope."""

    b0: float
    b1: float
    included: bool

    def __post_init__(self):
        if not self.included and self.b1 != 0.0:
            raise ValueError(f"excluded estimate must have b1 = 0, got {self.b1}")


@dataclass(frozen=True)
class GridSpec:
    """Step size for the brute-force oracle grid.

    The grid ranges are derived from the inputs: b1 spans
    [dhat - 2*(c1+1), dhat + 2*(c1+1)] plus the exact point 0, and b0
    spans [min(ybar) - 2, max(ybar) + 2].  Both windows provably contain
    the closed-form minimizer.
    """

    step: float = 1e-3

    def __post_init__(self):
        if not (math.isfinite(self.step) and self.step > 0.0):
            raise ValueError(f"grid step must be positive, got {self.step}")


def selection_threshold(penalty: PenaltyParams) -> float:
    """Return c* = c1 + sqrt(2*c0), the inclusion cutoff on |dhat|.

    Keeping the slope costs c0 plus the shrinkage loss; dropping it costs
    dhat^2 / 2 of residual.  The kept branch wins iff
    (|dhat| - c1)^2 / 2 >= c0, and c* is where the two branches tie.
    """
    return penalty.c1 + math.sqrt(2.0 * penalty.c0)


def fit(sample: Sample, penalty: PenaltyParams) -> Estimate:
    """Closed-form minimizer of the penalized two-point problem.

    Args:
        sample: per-level means and replicate count.
        penalty: inclusion and shrinkage costs.

    Returns:
        The Estimate with b1 = dhat -+ c1 when |dhat| >= c* (ties kept)
        and b1 = 0 otherwise; b0 = (ybar0 + ybar1 - b1) / 2 always.
    """
    dhat = sample.dhat
    cstar = selection_threshold(penalty)
    if dhat >= cstar:
        b1 = dhat - penalty.c1
        included = True
    elif dhat <= -cstar:
        b1 = dhat + penalty.c1
        included = True
    else:
        b1 = 0.0
        included = False
    b0 = 0.5 * (sample.ybar0 + sample.ybar1 - b1)
    return Estimate(b0=b0, b1=b1, included=included)


def objective(sample: Sample, penalty: PenaltyParams, b0, b1):
    """Penalized residual sum of squares at (b0, b1).

    Returns n * [(ybar0 - b0)^2 + (ybar1 - b0 - b1)^2] + n * C(b1).
    Replicates enter through their means only: the within-level scatter
    adds a constant independent of (b0, b1), so it is dropped here; this
    shifts every objective value equally and cannot move the argmin.

    Accepts scalars or numpy arrays for b0, b1 (broadcasting).
    """
    r0 = sample.ybar0 - b0
    r1 = sample.ybar1 - b0 - b1
    cost = penalty.c0 * (b1 != 0.0) + penalty.c1 * np.abs(b1)
    return sample.n * (r0 * r0 + r1 * r1 + cost)


def rss_gap(sample: Sample, penalty: PenaltyParams) -> float:
    """Objective gain of the best nonzero slope, before the inclusion cost.

    Returns (|dhat| - c1)^2 / 2 when |dhat| >= c1 and zero otherwise: the
    soft-thresholded slope saves that much residual-plus-shrinkage over
    b1 = 0.  For c0 > 0, inclusion is optimal exactly when this gain
    covers c0 (ties included); at c0 = 0 the |dhat| >= c* comparison
    settles the boundary, since the gain vanishes identically on
    |dhat| <= c1 where exclusion still wins.
    """
    slack = max(abs(sample.dhat) - penalty.c1, 0.0)
    return 0.5 * slack * slack


def fit_oracle(sample: Sample, penalty: PenaltyParams, grid: GridSpec = GridSpec()) -> Estimate:
    """Brute-force grid minimizer of ``objective``, independent of ``fit``.

    Every candidate b1 on the grid (plus the exact point 0) is scored at
    its best grid b0.  For fixed b1 the objective is a strictly convex
    parabola in b0, so its minimum over a uniform b0 grid sits at one of
    the two grid points bracketing the parabola's vertex; only those two
    are evaluated, which equals the full b0 scan without the cost.  The
    b1 axis is scanned exhaustively with no use of the closed-form
    selection or shrinkage rules.

    Ties in the objective prefer a nonzero b1 (inclusion wins when the
    statistician is indifferent).

    Raises:
        ValueError: via GridSpec when the step is not positive.
    """
    step = grid.step
    dhat = sample.dhat

    half = 2.0 * (penalty.c1 + 1.0)
    m1 = int(math.ceil(2.0 * half / step)) + 1
    b1_cand = np.linspace(dhat - half, dhat + half, m1)
    b1_cand = np.append(b1_cand, 0.0)

    lo = min(sample.ybar0, sample.ybar1) - 2.0
    hi = max(sample.ybar0, sample.ybar1) + 2.0
    m0 = int(math.ceil((hi - lo) / step)) + 1
    h0 = (hi - lo) / (m0 - 1)

    # Grid b0 indices bracketing each candidate's vertex (ybar0+ybar1-b1)/2.
    vertex = 0.5 * (sample.ybar0 + sample.ybar1 - b1_cand)
    pos = np.clip((vertex - lo) / h0, 0.0, m0 - 1.0)
    i_lo = np.floor(pos).astype(int)
    i_hi = np.minimum(i_lo + 1, m0 - 1)
    b0_lo = lo + h0 * i_lo
    b0_hi = lo + h0 * i_hi

    f_lo = objective(sample, penalty, b0_lo, b1_cand)
    f_hi = objective(sample, penalty, b0_hi, b1_cand)
    take_hi = f_hi < f_lo
    best_b0 = np.where(take_hi, b0_hi, b0_lo)
    best_f = np.where(take_hi, f_hi, f_lo)

    fmin = best_f.min()
    at_min = np.flatnonzero(best_f == fmin)
    nonzero = at_min[b1_cand[at_min] != 0.0]
    k = int(nonzero[0]) if nonzero.size else int(at_min[0])

    b1 = float(b1_cand[k])
    return Estimate(b0=float(best_b0[k]), b1=b1, included=b1 != 0.0)
