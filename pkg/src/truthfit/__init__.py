"""Penalized two-point regression and the reporting incentives it creates.

The library answers three questions about a regression on one binary
regressor whose inclusion is charged a fixed cost c0 and a proportional
cost c1:

* what does the penalized fit look like (closed form plus a grid oracle),
* when does a self-reporting agent gain by misreporting the regressor,
  computed exactly for discrete noise and by boundary-split quadrature
  for continuous noise, and
* what survives as the group size grows, via relative-entropy limits and
  exact finite-n probes for the skewed two-point noise law.
"""

from .asymptotics import (
    CompositeDistribution,
    EmpiricalFrequencies,
    GapBounds,
    ParameterDomainError,
    ProbeRow,
    finite_n_probe,
    ic_statistic,
    implied_means,
    kl_divergence,
    limit_conditional_means,
    limit_ic_violated,
    min_kl_at_gap,
)
from .estimator import (
    Estimate,
    GridSpec,
    ModelParams,
    PenaltyParams,
    Sample,
    fit,
    fit_oracle,
    objective,
    rss_gap,
    selection_threshold,
)
from .ic import (
    DEVIATIONS,
    TOL_EXACT,
    TOL_QUADRATURE,
    DeviationRecord,
    ICReport,
    PriorOverBeta,
    SuiteReport,
    bernoulli_paper_region,
    bernoulli_refined_region,
    bernoulli_violation_margin,
    ic_at_beta,
    ic_at_prior,
    symmetric_suite,
)
from .noise import (
    Bernoulli,
    ContinuousDistribution,
    Degenerate,
    DiscreteDistribution,
    DiscreteMeanZero,
    Gaussian,
    NoiseGrammarError,
    Uniform,
    UnsupportedNoiseError,
    atoms_of,
    difference_distribution,
    is_discrete,
    is_symmetric,
    joint_support,
    parse_noise,
    quadrature_nodes,
    sample_mean_distribution,
)
from .payoff import (
    MonteCarloLoss,
    PivotalStats,
    ReportPair,
    expected_loss,
    expected_loss_mc,
    loss_gap,
    loss_gap_reduced,
    pivotal_stats,
)
from .regressor import PenalizedTwoPointRegressor

__version__ = "0.1.0"

__all__ = [
    "Bernoulli",
    "CompositeDistribution",
    "ContinuousDistribution",
    "DEVIATIONS",
    "Degenerate",
    "DeviationRecord",
    "DiscreteDistribution",
    "DiscreteMeanZero",
    "EmpiricalFrequencies",
    "Estimate",
    "GapBounds",
    "Gaussian",
    "GridSpec",
    "ICReport",
    "ModelParams",
    "MonteCarloLoss",
    "NoiseGrammarError",
    "ParameterDomainError",
    "PenaltyParams",
    "PenalizedTwoPointRegressor",
    "PivotalStats",
    "PriorOverBeta",
    "ProbeRow",
    "ReportPair",
    "Sample",
    "SuiteReport",
    "TOL_EXACT",
    "TOL_QUADRATURE",
    "Uniform",
    "UnsupportedNoiseError",
    "atoms_of",
    "bernoulli_paper_region",
    "bernoulli_refined_region",
    "bernoulli_violation_margin",
    "difference_distribution",
    "expected_loss",
    "expected_loss_mc",
    "finite_n_probe",
    "fit",
    "fit_oracle",
    "ic_at_beta",
    "ic_at_prior",
    "ic_statistic",
    "implied_means",
    "is_discrete",
    "is_symmetric",
    "joint_support",
    "kl_divergence",
    "limit_conditional_means",
    "limit_ic_violated",
    "loss_gap",
    "loss_gap_reduced",
    "min_kl_at_gap",
    "objective",
    "parse_noise",
    "pivotal_stats",
    "quadrature_nodes",
    "rss_gap",
    "sample_mean_distribution",
    "selection_threshold",
    "symmetric_suite",
]
