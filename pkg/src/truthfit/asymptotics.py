"""Large-sample behavior of the selection event under skewed two-point noise.

With group size n, each group's mean noise is an average of i.i.d. draws
that are -1 with probability p and d = p/(1-p) otherwise.  Conditioning
on the rare event that the regressor is selected, the joint empirical
frequencies of the paired draws concentrate on the distribution closest
in relative entropy to the unconditional product law pi subject to the
selection constraint.  This module computes that constrained minimizer
exactly, the implied limit of the conditional noise means, the closed
form frontier in (beta1, c0) below which misreporting still pays in the
large-n limit, and exact finite-n convergence probes.

Joint outcomes are indexed (eps1, eps0): "dm" is (d, -1), the outcome
that inflates the fitted slope, "md" is (-1, d), and so on.  The selected
event for the x=1 deviation is a lower tail for the frequency gap
theta = s_dm - s_md, with endpoints

    theta_l = (-sqrt(2 c0) - beta1) / (d + 1)
    theta_h = ( sqrt(2 c0) - beta1) / (d + 1)

dividing non-selection from the two selection tails.  The theta_h tail
carries all the limit probability; the finite-n probe reports both tails
so that domination is observable rather than assumed.
"""

import math
from dataclasses import dataclass

import numpy as np

from .noise import binomial_pmf

PROBE_MAX_N = 10**4
BISECTION_TOL = 1e-14


class ParameterDomainError(ValueError):
    """Raised when parameters leave the domain where a limit result applies."""


@dataclass(frozen=True)
class CompositeDistribution:
    """Product law pi of a paired draw (eps1, eps0) from the two-point noise."""

    pi_mm: float
    pi_md: float
    pi_dm: float
    pi_dd: float

    def __post_init__(self):
        probs = (self.pi_mm, self.pi_md, self.pi_dm, self.pi_dd)
        if not all(math.isfinite(q) and 0.0 < q < 1.0 for q in probs):
            raise ValueError(f"all four probabilities must lie in (0, 1), got {probs}")
        if abs(math.fsum(probs) - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {math.fsum(probs)}, not 1")
        p = math.sqrt(self.pi_mm)
        q = 1.0 - p
        checks = (
            ("pi_md", self.pi_md, p * q),
            ("pi_dm", self.pi_dm, p * q),
            ("pi_dd", self.pi_dd, q * q),
        )
        for name, got, want in checks:
            if abs(got - want) > 1e-12:
                raise ValueError(
                    f"{name} = {got} breaks the product structure (expected {want})"
                )
        if p <= 0.5:
            raise ValueError(f"success probability {p} must exceed 1/2 (so d > 1)")

    @classmethod
    def from_success_prob(cls, p: float) -> "CompositeDistribution":
        if not (math.isfinite(p) and 0.5 < p < 1.0):
            raise ValueError(f"p must lie in (1/2, 1), got {p}")
        q = 1.0 - p
        return cls(pi_mm=p * p, pi_md=p * q, pi_dm=p * q, pi_dd=q * q)

    @property
    def p(self) -> float:
        return math.sqrt(self.pi_mm)

    @property
    def d(self) -> float:
        p = self.p
        return p / (1.0 - p)


@dataclass(frozen=True)
class EmpiricalFrequencies:
    """A point on the simplex over the four joint outcomes."""

    s_mm: float
    s_md: float
    s_dm: float
    s_dd: float

    def __post_init__(self):
        freqs = (self.s_mm, self.s_md, self.s_dm, self.s_dd)
        if not all(math.isfinite(s) and s >= 0.0 for s in freqs):
            raise ValueError(f"frequencies must be finite and >= 0, got {freqs}")
        if abs(math.fsum(freqs) - 1.0) > 1e-12:
            raise ValueError(f"frequencies sum to {math.fsum(freqs)}, not 1")

    @property
    def gap(self) -> float:
        return self.s_dm - self.s_md


@dataclass(frozen=True)
class GapBounds:
    """Selection thresholds for the frequency gap s_dm - s_md."""

    theta_l: float
    theta_h: float

    def __post_init__(self):
        if not (self.theta_l < self.theta_h):
            raise ValueError(
                f"need theta_l < theta_h, got ({self.theta_l}, {self.theta_h})"
            )

    @classmethod
    def from_parameters(cls, beta1: float, c0: float, d: float) -> "GapBounds":
        root = math.sqrt(2.0 * c0)
        return cls(
            theta_l=(-root - beta1) / (d + 1.0), theta_h=(root - beta1) / (d + 1.0)
        )


def kl_divergence(s: EmpiricalFrequencies, pi: CompositeDistribution) -> float:
    """Relative entropy D(s || pi) with the 0*ln(0) = 0 convention."""
    pairs = (
        (s.s_mm, pi.pi_mm),
        (s.s_md, pi.pi_md),
        (s.s_dm, pi.pi_dm),
        (s.s_dd, pi.pi_dd),
    )
    total = math.fsum(sv * math.log(sv / pv) for sv, pv in pairs if sv > 0.0)
    return max(0.0, total)


def min_kl_at_gap(pi: CompositeDistribution, theta: float) -> EmpiricalFrequencies:
    """Minimize D(s || pi) subject to s_dm - s_md = theta on the simplex.

    The stationarity conditions force s_mm = d^2 * s_dd and
    s_dm * s_md = s_mm * s_dd, which reduce the problem to one scalar
    equation in w = s_dd:

        g(w) = (1 - d^2)^2 w^2 - 2 (1 + d^2) w + (1 - theta^2) = 0,

    g is strictly decreasing on the bracket (0, (1-|theta|)/(1+d^2)) with
    a sign change across it, so bisection is unconditionally convergent.
    """
    if not (math.isfinite(theta) and abs(theta) < 1.0):
        raise ParameterDomainError(f"theta must lie in (-1, 1), got {theta}")
    if theta == 0.0:
        return EmpiricalFrequencies(pi.pi_mm, pi.pi_md, pi.pi_dm, pi.pi_dd)
    dsq = pi.d * pi.d

    def g(w):
        return (1.0 - dsq) ** 2 * w * w - 2.0 * (1.0 + dsq) * w + (1.0 - theta * theta)

    lo, hi = 0.0, (1.0 - abs(theta)) / (1.0 + dsq)
    while hi - lo > BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        if g(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    w = 0.5 * (lo + hi)
    a = 1.0 - w * (1.0 + dsq)  # s_dm + s_md
    u = max(0.5 * (a + theta), 0.0)
    v = max(0.5 * (a - theta), 0.0)
    return EmpiricalFrequencies(s_mm=dsq * w, s_md=v, s_dm=u, s_dd=w)


def implied_means(s: EmpiricalFrequencies, d: float) -> tuple:
    """Noise means (eps0, eps1) implied by joint frequencies.

    Each marginal puts mass on {-1, d}: the mean is P(d)*(d+1) - 1.
    """
    eps1 = (s.s_dm + s.s_dd) * (d + 1.0) - 1.0
    eps0 = (s.s_md + s.s_dd) * (d + 1.0) - 1.0
    return eps0, eps1


def limit_conditional_means(beta1: float, c0: float, d: float) -> tuple:
    """Limits of the conditional noise means given selection, closed form.

    With q = sqrt(2 c0) - beta1 and m = d/(d-1):

        eps0 = -q/2 - m + sqrt(q^2/4 + m^2)
        eps1 = +q/2 - m + sqrt(q^2/4 + m^2)

    so eps1 - eps0 = q always: in the limit the selection boundary binds
    exactly.  Agrees with the means implied by min_kl_at_gap at theta_h.
    """
    _check_limit_args(beta1, c0, d)
    q = math.sqrt(2.0 * c0) - beta1
    m = d / (d - 1.0)
    root = math.sqrt(0.25 * q * q + m * m)
    return (-0.5 * q - m + root, 0.5 * q - m + root)


def limit_ic_violated(beta1: float, c0: float, d: float) -> bool:
    """Whether misreporting still pays in the large-n limit.

    Closed form beta1 < c0 / (sqrt(2 c0) + 2 d/(d-1)); equivalent to the
    IC statistic being positive at the limit conditional means.
    """
    _check_limit_args(beta1, c0, d)
    return beta1 < c0 / (math.sqrt(2.0 * c0) + 2.0 * d / (d - 1.0))


def ic_statistic(beta1: float, eps0: float, eps1: float) -> float:
    """-beta1^2 + 2*beta1*eps0 + eps1^2 - eps0^2; positive iff lying pays."""
    return -beta1 * beta1 + 2.0 * beta1 * eps0 + eps1 * eps1 - eps0 * eps0


@dataclass(frozen=True)
class ProbeRow:
    """Exact finite-n selection statistics for one group size.

    pivot_prob is the total selection probability; upper_prob and
    lower_prob split it across the two tails of beta1 + mean-noise gap.
    The conditional fields condition on the upper tail only (the one the
    limit analysis is about) and are None when that tail has no mass.
    loss_gap is the exact x=1 deviation margin over the full noise law.
    """

    n: int
    pivot_prob: float
    upper_prob: float
    lower_prob: float
    cond_eps0: float | None
    cond_eps1: float | None
    ic_statistic: float | None
    loss_gap: float
    trivial: bool


def finite_n_probe(beta1: float, c0: float, d: float, n_list) -> list:
    """Exact selection statistics for each group size in n_list.

    For group size n the two group mean noises take n+1 values each, so
    enumeration over pairs is O(n^2); it is organized as convolutions
    along the diagonals k1 - k0 of the binomial pair grid, since the
    fitted slope depends on the pair only through that difference.
    Group sizes above 10^4 are rejected.
    """
    if not (math.isfinite(beta1) and math.isfinite(c0) and c0 >= 0.0):
        raise ValueError(f"need finite beta1 and c0 >= 0, got ({beta1}, {c0})")
    if not (math.isfinite(d) and d > 1.0):
        raise ValueError(f"d must exceed 1, got {d}")
    sizes = sorted(set(n_list))
    for n in sizes:
        if not (isinstance(n, int) and 1 <= n <= PROBE_MAX_N):
            raise ValueError(f"group sizes must be integers in [1, {PROBE_MAX_N}], got {n!r}")
    return [_probe_row(beta1, c0, d, n) for n in sizes]


def _probe_row(beta1, c0, d, n):
    p = d / (1.0 + d)
    cstar = math.sqrt(2.0 * c0)
    k = np.arange(n + 1)
    w = binomial_pmf(n, p)  # k counts the -1 draws in a group
    mean = (-k + (n - k) * d) / n
    a = w * mean
    b = a * mean
    wr, ar, br = w[::-1], a[::-1], b[::-1]
    pj = np.convolve(w, wr)  # index n + j over the diagonal j = k1 - k0
    e1 = np.convolve(a, wr)
    e0 = np.convolve(w, ar)
    e1sq = np.convolve(b, wr)
    e0sq = np.convolve(w, br)
    j = np.arange(-n, n + 1)
    dhat = beta1 - j * (1.0 + d) / n
    upper = dhat >= cstar
    lower = dhat <= -cstar
    upper_prob = math.fsum(pj[upper])
    lower_prob = math.fsum(pj[lower])
    pivotal = upper | lower
    gap_terms = dhat[pivotal] * (-beta1 * pj[pivotal] + e0[pivotal] + e1[pivotal])
    loss_gap = -math.fsum(gap_terms)
    if upper_prob > 0.0:
        m0 = math.fsum(e0[upper]) / upper_prob
        m1 = math.fsum(e1[upper]) / upper_prob
        stat = (
            -beta1 * beta1
            + 2.0 * beta1 * m0
            + math.fsum(e1sq[upper]) / upper_prob
            - math.fsum(e0sq[upper]) / upper_prob
        )
    else:
        m0 = m1 = stat = None
    return ProbeRow(
        n=n,
        pivot_prob=upper_prob + lower_prob,
        upper_prob=upper_prob,
        lower_prob=lower_prob,
        cond_eps0=m0,
        cond_eps1=m1,
        ic_statistic=stat,
        loss_gap=loss_gap,
        trivial=(upper_prob + lower_prob) == 0.0,
    )


def _check_limit_args(beta1, c0, d):
    if not (math.isfinite(beta1) and beta1 > 0.0):
        raise ParameterDomainError(f"beta1 must be positive, got {beta1}")
    if not (math.isfinite(c0) and c0 > 0.0):
        raise ParameterDomainError(f"c0 must be positive, got {c0}")
    if not (math.isfinite(d) and d > 1.0):
        raise ParameterDomainError(f"d must exceed 1, got {d}")
    theta_h = GapBounds.from_parameters(beta1, c0, d).theta_h
    if not (-1.0 < theta_h < 1.0):
        raise ParameterDomainError(
            f"theta_h = (sqrt(2*c0) - beta1)/(d+1) = {theta_h} must lie in (-1, 1)"
        )
