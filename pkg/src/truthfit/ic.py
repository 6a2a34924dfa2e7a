"""Incentive-compatibility verdicts for the penalized two-point fit.

A deviation record compares the expected loss of lying with the expected
loss of truth-telling; the margin is loss(deviation) - loss(truth), so a
negative margin means misreporting strictly helps.  Verdicts are issued
at a fixed model, at a finite-support prior over models, and in bulk for
the symmetric-noise verification suite.  The skewed two-point (Bernoulli)
example additionally gets two closed-form violation regions: the plain
displayed inequalities and a refined variant that pins the pivotal event
to the single outcome (eps1, eps0) = (d, -1).  The two disagree on part
of the parameter plane; the exact enumeration is the ground truth and
callers can compare both flags against it.
"""

import math
from dataclasses import dataclass

from .estimator import ModelParams, PenaltyParams, selection_threshold
from .noise import NoiseSpec, Uniform, is_discrete, is_symmetric
from .payoff import ReportPair, expected_loss, pivotal_stats

TOL_EXACT = 1e-12
TOL_QUADRATURE = 1e-7

# the two binary deviations: true type x filing 1 - x
DEVIATIONS = ((1, 0), (0, 1))


@dataclass(frozen=True)
class DeviationRecord:
    x: int
    r: int
    loss_truth: float
    loss_deviation: float
    margin: float
    violated: bool
    trivial: bool


@dataclass(frozen=True)
class ICReport:
    """Per-deviation margins plus the overall verdict and the tolerance used."""

    deviations: tuple
    ic: bool
    tolerance: float


@dataclass(frozen=True)
class PriorOverBeta:
    """Finite-support prior over models, as (ModelParams, probability) atoms."""

    atoms: tuple

    def __post_init__(self):
        atoms = tuple((m, float(p)) for m, p in self.atoms)
        if not atoms:
            raise ValueError("prior needs at least one atom")
        for m, p in atoms:
            if not isinstance(m, ModelParams):
                raise ValueError(f"prior atom {m!r} is not a ModelParams")
            if not (math.isfinite(p) and p >= 0.0):
                raise ValueError(f"prior weight {p} must be finite and >= 0")
        mass = math.fsum(p for _, p in atoms)
        if abs(mass - 1.0) > 1e-12:
            raise ValueError(f"prior weights sum to {mass}, not 1")
        object.__setattr__(self, "atoms", atoms)


def backend_tolerance(noise: NoiseSpec) -> float:
    """Violation tolerance: exact enumeration vs quadrature-level."""
    return TOL_EXACT if is_discrete(noise) else TOL_QUADRATURE


def ic_at_beta(
    model: ModelParams, noise: NoiseSpec, penalty: PenaltyParams, n: int
) -> ICReport:
    """Check both binary deviations at a fixed model."""
    tol = backend_tolerance(noise)
    trivial = _never_pivotal(model, noise, penalty, n)
    records = []
    for x, r in DEVIATIONS:
        truth = expected_loss(ReportPair(x, x), model, noise, penalty, n)
        dev = expected_loss(ReportPair(x, r), model, noise, penalty, n)
        margin = dev - truth
        records.append(
            DeviationRecord(
                x=x,
                r=r,
                loss_truth=truth,
                loss_deviation=dev,
                margin=margin,
                violated=margin < -tol,
                trivial=trivial,
            )
        )
    return ICReport(
        deviations=tuple(records),
        ic=not any(rec.violated for rec in records),
        tolerance=tol,
    )


def ic_at_prior(
    prior: PriorOverBeta, noise: NoiseSpec, penalty: PenaltyParams, n: int
) -> ICReport:
    """Prior-weighted margins; a point-mass prior reproduces ic_at_beta bitwise."""
    tol = backend_tolerance(noise)
    per_beta = [ic_at_beta(m, noise, penalty, n) for m, _ in prior.atoms]
    weights = [p for _, p in prior.atoms]
    records = []
    for i, (x, r) in enumerate(DEVIATIONS):
        recs = [rep.deviations[i] for rep in per_beta]
        truth = math.fsum(w * rec.loss_truth for w, rec in zip(weights, recs))
        dev = math.fsum(w * rec.loss_deviation for w, rec in zip(weights, recs))
        margin = math.fsum(w * rec.margin for w, rec in zip(weights, recs))
        records.append(
            DeviationRecord(
                x=x,
                r=r,
                loss_truth=truth,
                loss_deviation=dev,
                margin=margin,
                violated=margin < -tol,
                trivial=all(rec.trivial for rec in recs),
            )
        )
    return ICReport(
        deviations=tuple(records),
        ic=not any(rec.violated for rec in records),
        tolerance=tol,
    )


def bernoulli_paper_region(beta1: float, c0: float, d: float) -> bool:
    """The displayed violation inequalities for the skewed two-point law.

    -(d+1) < sqrt(2*c0) - beta1 < d+1 and beta1 < d-1.  Known to overcover:
    it admits points whose pivotal event is larger than {(d, -1)} and where
    exact enumeration finds no violation; see bernoulli_refined_region.
    """
    _check_region_args(beta1, c0, d)
    gap = math.sqrt(2.0 * c0) - beta1
    return -(d + 1.0) < gap < (d + 1.0) and beta1 < d - 1.0


def bernoulli_refined_region(beta1: float, c0: float, d: float) -> bool:
    """Violation region with the pivotal event pinned to (eps1, eps0) = (d, -1).

    2*c0 > max(beta1^2, (d+1-beta1)^2) excludes every other outcome from
    the pivotal set, 2*c0 <= (beta1+d+1)^2 keeps (d, -1) itself pivotal,
    and beta1 < d-1 makes that outcome's IC statistic positive.
    """
    _check_region_args(beta1, c0, d)
    lo = max(beta1 * beta1, (d + 1.0 - beta1) ** 2)
    return lo < 2.0 * c0 <= (beta1 + d + 1.0) ** 2 and beta1 < d - 1.0


def bernoulli_violation_margin(beta1: float, c0: float, d: float) -> float:
    """Closed-form x=1 margin when the pivotal event is exactly {(d, -1)}.

    Equals -p(1-p) * (beta1+d+1) * (d-1-beta1): probability of the single
    pivotal outcome, times its coefficient b1 = beta1+d+1, times the value
    -beta1 + eps0 + eps1 = d-1-beta1 there.  Only meaningful where
    bernoulli_refined_region holds.
    """
    _check_region_args(beta1, c0, d)
    p = d / (1.0 + d)
    return -p * (1.0 - p) * (beta1 + d + 1.0) * (d - 1.0 - beta1)


@dataclass(frozen=True)
class SuiteReport:
    cases: int
    violations: int
    worst_margin: float | None
    tolerance: float


def symmetric_suite(noise_family, beta1_grid, penalty_grid, n: int = 1) -> SuiteReport:
    """Sweep ic_at_beta over symmetric laws x beta1 grid x penalty grid.

    Every spec must be symmetric about 0 (the suite exists to verify that
    symmetric noise never rewards misreporting); asymmetric input is an
    error, not a finding.
    """
    family = list(noise_family)
    for spec in family:
        if not is_symmetric(spec):
            raise ValueError(f"symmetric_suite requires symmetric noise, got {spec!r}")
    cases = 0
    violations = 0
    worst = None
    tol = TOL_EXACT
    for spec in family:
        tol = max(tol, backend_tolerance(spec))
        for beta1 in beta1_grid:
            model = ModelParams(beta0=0.0, beta1=float(beta1))
            for penalty in penalty_grid:
                report = ic_at_beta(model, spec, penalty, n)
                cases += 1
                for rec in report.deviations:
                    if worst is None or rec.margin < worst:
                        worst = rec.margin
                    if rec.violated:
                        violations += 1
    return SuiteReport(
        cases=cases, violations=violations, worst_margin=worst, tolerance=tol
    )


def _never_pivotal(model, noise, penalty, n) -> bool:
    """True when no noise outcome can make the report matter."""
    if is_discrete(noise):
        return pivotal_stats(model, noise, penalty, n).pivot_prob == 0.0
    cstar = selection_threshold(penalty)
    if isinstance(noise, Uniform):
        return abs(model.beta1) + 2.0 * noise.halfwidth < cstar
    return False  # Gaussian tails always reach the selection threshold


def _check_region_args(beta1, c0, d):
    if not (math.isfinite(beta1) and beta1 > 0.0):
        raise ValueError(f"beta1 must be positive, got {beta1}")
    if not (math.isfinite(c0) and c0 > 0.0):
        raise ValueError(f"c0 must be positive, got {c0}")
    if not (math.isfinite(d) and d > 1.0):
        raise ValueError(f"d must exceed 1, got {d}")
