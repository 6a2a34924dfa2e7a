"""Expected misreporting payoffs induced by the penalized two-point fit.

An agent with true binary attribute x files a report r.  The principal
fits the penalized two-point regression to noisy group means

    ybar_0 = beta0 + eps0,   ybar_1 = beta0 + beta1 + eps1,

then acts on the report with prediction b0 + b1*r, and the agent suffers
the quadratic loss (b0 + b1*r - beta0 - beta1*x)^2.  The prediction error

    err = beta1/2 - beta1*x + (eps0 + eps1)/2 + b1*(r - 1/2)

does not involve beta0 at all, so losses here are computed from
beta0-centered samples and invariance to beta0 is exact, not approximate.

Discrete noise: exact enumeration over the joint law of the two group
mean noises, summed with math.fsum.

Continuous noise (n = 1): eps0 is integrated by a Gauss rule matched to
the noise density, and the inner eps1 integral is evaluated in closed
form.  The selection rule makes b1 affine in eps1 on each of the three
branches cut at eps1 = e0 - beta1 -/+ c_star, so each branch contributes
a quadratic polynomial integrated via exact partial moments of the noise
density.  For uniform noise the outer axis is additionally split where a
branch cut crosses the support edge, which makes the outer integrand a
piecewise cubic that the Gauss rule integrates exactly.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .estimator import ModelParams, PenaltyParams, Sample, fit, selection_threshold
from .noise import (
    Gaussian,
    NoiseSpec,
    Uniform,
    UnsupportedNoiseError,
    is_discrete,
    joint_support,
    quadrature_nodes,
    sample_mean_distribution,
)

QUADRATURE_ORDER = 64
MC_DEFAULT_DRAWS = 10**6
MC_DEFAULT_SEED = 123456789


@dataclass(frozen=True)
class ReportPair:
    """True attribute x and filed report r, both bits."""

    x: int
    r: int

    def __post_init__(self):
        for name, v in (("x", self.x), ("r", self.r)):
            if v not in (0, 1):
                raise ValueError(f"{name} must be 0 or 1, got {v!r}")


@dataclass(frozen=True)
class PivotalStats:
    """Probability of the inclusion event and conditional moments on it.

    The conditional fields are None (absent, never NaN) when the pivotal
    event has probability zero.
    """

    pivot_prob: float
    cond_mean_b1: float | None
    cond_ic_statistic: float | None

    def __post_init__(self):
        if not (0.0 <= self.pivot_prob <= 1.0 + 1e-12):
            raise ValueError(f"pivot_prob must lie in [0, 1], got {self.pivot_prob}")
        if self.pivot_prob == 0.0:
            if self.cond_mean_b1 is not None or self.cond_ic_statistic is not None:
                raise ValueError("conditional fields must be None when pivot_prob = 0")


@dataclass(frozen=True)
class MonteCarloLoss:
    value: float
    std_error: float
    draws: int
    seed: int


def expected_loss(
    pair: ReportPair,
    model: ModelParams,
    noise: NoiseSpec,
    penalty: PenaltyParams,
    n: int,
    *,
    order: int = QUADRATURE_ORDER,
) -> float:
    """E[(b0 + b1*r - beta0 - beta1*x)^2] over the group-mean noise law."""
    if is_discrete(noise):
        terms = []
        for (e0, e1), prob in joint_support(noise, n):
            est = fit(Sample(ybar0=e0, ybar1=model.beta1 + e1, n=n), penalty)
            err = est.b0 + est.b1 * pair.r - model.beta1 * pair.x
            terms.append(prob * err * err)
        return math.fsum(terms)
    _require_unit_n(noise, n)
    s = pair.r - 0.5
    bx = model.beta1 * pair.x

    def coeffs(e0, p_br, q_br):
        c0 = 0.5 * model.beta1 - bx + 0.5 * e0 + s * p_br
        c1 = 0.5 + s * q_br
        return c0 * c0, 2.0 * c0 * c1, c1 * c1

    return _integrate_split(model.beta1, noise, penalty, order, coeffs)


def loss_gap(
    x: int,
    model: ModelParams,
    noise: NoiseSpec,
    penalty: PenaltyParams,
    n: int,
    *,
    order: int = QUADRATURE_ORDER,
) -> float:
    """Expected loss of deviating minus truth-telling for an agent of type x.

    Positive means truth is strictly better; negative means the deviation
    x -> 1-x pays, i.e. incentive compatibility fails at this model.
    """
    dev = expected_loss(ReportPair(x, 1 - x), model, noise, penalty, n, order=order)
    tru = expected_loss(ReportPair(x, x), model, noise, penalty, n, order=order)
    return dev - tru


def pivotal_stats(
    model: ModelParams, noise: NoiseSpec, penalty: PenaltyParams, n: int
) -> PivotalStats:
    """Inclusion probability and conditional moments, exact enumeration.

    The IC statistic is -beta1^2 + 2*beta1*eps0 + eps1^2 - eps0^2; its
    conditional sign decides whether the x=1 agent gains by misreporting.
    Boundary outcomes |beta1 + eps1 - eps0| = c_star count as pivotal,
    matching the fit's inclusion tie rule.
    """
    cstar = selection_threshold(penalty)
    b1 = model.beta1
    p_terms, b_terms, s_terms = [], [], []
    for (e0, e1), prob in joint_support(noise, n):
        dhat = b1 + e1 - e0
        if abs(dhat) < cstar:
            continue
        est = fit(Sample(ybar0=e0, ybar1=b1 + e1, n=n), penalty)
        stat = -b1 * b1 + 2.0 * b1 * e0 + e1 * e1 - e0 * e0
        p_terms.append(prob)
        b_terms.append(prob * est.b1)
        s_terms.append(prob * stat)
    pivot_prob = math.fsum(p_terms)
    if pivot_prob == 0.0:
        return PivotalStats(0.0, None, None)
    return PivotalStats(
        pivot_prob=pivot_prob,
        cond_mean_b1=math.fsum(b_terms) / pivot_prob,
        cond_ic_statistic=math.fsum(s_terms) / pivot_prob,
    )


def loss_gap_reduced(
    x: int,
    model: ModelParams,
    noise: NoiseSpec,
    penalty: PenaltyParams,
    n: int,
    *,
    order: int = QUADRATURE_ORDER,
) -> float:
    """The loss gap through its algebraic reduction to the pivotal event.

    Expanding the two squared losses, everything off the inclusion event
    cancels and the gap collapses to

        s * E[ b1 * (s*beta1 + eps0 + eps1) ],   s = 1 - 2x.

    Must agree with loss_gap; the pair is kept as a two-path cross-check.
    """
    if x not in (0, 1):
        raise ValueError(f"x must be 0 or 1, got {x!r}")
    s = 1.0 - 2.0 * x
    b1 = model.beta1
    if is_discrete(noise):
        terms = []
        for (e0, e1), prob in joint_support(noise, n):
            est = fit(Sample(ybar0=e0, ybar1=b1 + e1, n=n), penalty)
            if est.b1 == 0.0:
                continue
            terms.append(prob * s * est.b1 * (s * b1 + e0 + e1))
        return math.fsum(terms)
    _require_unit_n(noise, n)

    def coeffs(e0, p_br, q_br):
        # s * (p + q*t) * (K + t) with K = s*beta1 + e0, t the inner noise
        k = s * b1 + e0
        return s * p_br * k, s * (p_br + q_br * k), s * q_br

    return _integrate_split(b1, noise, penalty, order, coeffs)


def expected_loss_mc(
    pair: ReportPair,
    model: ModelParams,
    noise: NoiseSpec,
    penalty: PenaltyParams,
    n: int,
    draws: int = MC_DEFAULT_DRAWS,
    seed: int = MC_DEFAULT_SEED,
) -> MonteCarloLoss:
    """Monte Carlo cross-check of expected_loss with a recorded seed."""
    if not (isinstance(draws, int) and draws >= 2):
        raise ValueError(f"draws must be an integer >= 2, got {draws!r}")
    rng = np.random.default_rng(seed)
    if is_discrete(noise):
        dist = sample_mean_distribution(noise, n)
        vals = np.asarray(dist.values)
        probs = np.asarray(dist.probs)
        probs = probs / probs.sum()
        e0 = rng.choice(vals, size=draws, p=probs)
        e1 = rng.choice(vals, size=draws, p=probs)
    elif isinstance(noise, Gaussian):
        _require_unit_n(noise, n)
        e0 = rng.normal(0.0, noise.sigma, size=draws)
        e1 = rng.normal(0.0, noise.sigma, size=draws)
    elif isinstance(noise, Uniform):
        _require_unit_n(noise, n)
        e0 = rng.uniform(-noise.halfwidth, noise.halfwidth, size=draws)
        e1 = rng.uniform(-noise.halfwidth, noise.halfwidth, size=draws)
    else:
        raise UnsupportedNoiseError(f"cannot sample {type(noise).__name__} noise")
    cstar = selection_threshold(penalty)
    c1 = penalty.c1
    dhat = model.beta1 + e1 - e0
    b1 = np.where(
        dhat >= cstar, dhat - c1, np.where(dhat <= -cstar, dhat + c1, 0.0)
    )
    err = (
        0.5 * model.beta1
        - model.beta1 * pair.x
        + 0.5 * (e0 + e1)
        + (pair.r - 0.5) * b1
    )
    sq = err * err
    value = float(sq.mean())
    std_error = float(sq.std(ddof=1) / math.sqrt(draws))
    return MonteCarloLoss(value=value, std_error=std_error, draws=draws, seed=seed)


def _require_unit_n(noise, n):
    if n != 1:
        raise UnsupportedNoiseError(
            f"{type(noise).__name__} noise supports n = 1 only, got n = {n}"
        )


def _branch_segments(e0, beta1, penalty, noise):
    """Partition the inner eps1 axis into selection branches at a fixed e0.

    Returns (a, b, p_br, q_br) tuples with b1 = p_br + q_br*eps1 on [a, b].
    Endpoints are capped where the remaining density mass is negligible
    (Gaussian) or zero (uniform; the moment clip does the real cut).
    """
    cstar = selection_threshold(penalty)
    tlo = e0 - beta1 - cstar
    thi = e0 - beta1 + cstar
    if isinstance(noise, Gaussian):
        lo = min(-14.0 * noise.sigma, tlo - 1.0)
        hi = max(14.0 * noise.sigma, thi + 1.0)
    else:
        lo = min(-noise.halfwidth, tlo) - 1.0
        hi = max(noise.halfwidth, thi) + 1.0
    segs = (
        (lo, tlo, beta1 - e0 + penalty.c1, 1.0),
        (tlo, thi, 0.0, 0.0),
        (thi, hi, beta1 - e0 - penalty.c1, 1.0),
    )
    return [s for s in segs if s[0] < s[1]]


def _partial_moments(noise, a, b):
    """(M0, M1, M2) of the noise density over [a, b]."""
    if isinstance(noise, Gaussian):
        sig = noise.sigma
        za, zb = a / sig, b / sig
        fa = math.exp(-0.5 * za * za) / math.sqrt(2.0 * math.pi)
        fb = math.exp(-0.5 * zb * zb) / math.sqrt(2.0 * math.pi)
        m0 = float(ndtr(zb) - ndtr(za))
        m1 = sig * (fa - fb)
        m2 = sig * sig * m0 + sig * (a * fa - b * fb)
        return m0, m1, m2
    h = noise.halfwidth
    lo, hi = max(a, -h), min(b, h)
    if lo >= hi:
        return 0.0, 0.0, 0.0
    den = 2.0 * h
    return (
        (hi - lo) / den,
        (hi * hi - lo * lo) / (2.0 * den),
        (hi**3 - lo**3) / (3.0 * den),
    )


def _outer_nodes(beta1, noise, penalty, order):
    """Gauss nodes/weights for the outer eps0 axis against the noise law.

    Gaussian noise: the plain rule (the inner integral is analytic in e0).
    Uniform noise: the support is split where a branch cut crosses an edge
    of the inner support, because the inner integral has kinks in e0 there
    and is a cubic polynomial in between.
    """
    base = quadrature_nodes(noise, order)
    if isinstance(noise, Gaussian):
        return base
    h = noise.halfwidth
    cstar = selection_threshold(penalty)
    cuts = sorted(
        c
        for c in {beta1 + cstar - h, beta1 + cstar + h, beta1 - cstar - h, beta1 - cstar + h}
        if -h < c < h
    )
    edges = [-h, *cuts, h]
    nodes = []
    for aa, bb in zip(edges, edges[1:]):
        mid, half = 0.5 * (aa + bb), 0.5 * (bb - aa)
        scale = half / h
        nodes.extend((mid + pt * scale, wt * scale) for pt, wt in base)
    return nodes


def _integrate_split(beta1, noise, penalty, order, coeffs):
    """Outer Gauss rule x inner exact partial moments of a per-branch quadratic.

    coeffs(e0, p_br, q_br) -> (a0, a1, a2) gives the inner integrand
    a0 + a1*t + a2*t^2 on the branch where b1 = p_br + q_br*t.
    """
    outer = []
    for e0, w in _outer_nodes(beta1, noise, penalty, order):
        inner = []
        for a, b, p_br, q_br in _branch_segments(e0, beta1, penalty, noise):
            m0, m1, m2 = _partial_moments(noise, a, b)
            a0, a1, a2 = coeffs(e0, p_br, q_br)
            inner.append(a0 * m0 + a1 * m1 + a2 * m2)
        outer.append(w * math.fsum(inner))
    return math.fsum(outer)
