import math

import pytest

from truthfit import (
    Bernoulli,
    CompositeDistribution,
    EmpiricalFrequencies,
    GapBounds,
    ModelParams,
    ParameterDomainError,
    PenaltyParams,
    finite_n_probe,
    ic_statistic,
    implied_means,
    kl_divergence,
    limit_conditional_means,
    limit_ic_violated,
    loss_gap,
    min_kl_at_gap,
    pivotal_stats,
)
from .oracles import kl_grid_oracle, probe_enumeration

PI = CompositeDistribution.from_success_prob(0.75)


def test_composite_from_success_prob():
    assert PI.pi_mm == 0.5625
    assert PI.pi_md == 0.1875
    assert PI.pi_dm == 0.1875
    assert PI.pi_dd == 0.0625
    assert PI.p == 0.75
    assert PI.d == pytest.approx(3.0)


def test_composite_validation():
    with pytest.raises(ValueError):
        CompositeDistribution(0.5, 0.1, 0.1, 0.3)  # not a product law
    with pytest.raises(ValueError):
        CompositeDistribution(0.5625, 0.1875, 0.1875, 0.0624)  # mass off
    with pytest.raises(ValueError):
        CompositeDistribution.from_success_prob(0.4)
    with pytest.raises(ValueError):
        CompositeDistribution.from_success_prob(1.0)


def test_frequencies_validation():
    s = EmpiricalFrequencies(0.25, 0.25, 0.25, 0.25)
    assert s.gap == 0.0
    with pytest.raises(ValueError):
        EmpiricalFrequencies(0.5, 0.5, 0.25, -0.25)
    with pytest.raises(ValueError):
        EmpiricalFrequencies(0.5, 0.5, 0.5, 0.5)


def test_gap_bounds():
    gb = GapBounds.from_parameters(1.0, 8.0, 3.0)
    assert gb.theta_l == -1.25
    assert gb.theta_h == 0.75
    with pytest.raises(ValueError):
        GapBounds(theta_l=0.5, theta_h=0.5)


def test_kl_zero_at_reference():
    s = EmpiricalFrequencies(PI.pi_mm, PI.pi_md, PI.pi_dm, PI.pi_dd)
    assert kl_divergence(s, PI) == 0.0


def test_kl_point_mass():
    s = EmpiricalFrequencies(1.0, 0.0, 0.0, 0.0)
    assert kl_divergence(s, PI) == pytest.approx(math.log(1.0 / 0.5625), rel=1e-12)


def test_kl_nonnegative():
    s = EmpiricalFrequencies(0.1, 0.2, 0.3, 0.4)
    assert kl_divergence(s, PI) > 0.0


def test_min_kl_zero_gap_returns_reference():
    s = min_kl_at_gap(PI, 0.0)
    assert (s.s_mm, s.s_md, s.s_dm, s.s_dd) == (0.5625, 0.1875, 0.1875, 0.0625)
    assert kl_divergence(s, PI) == 0.0


def test_min_kl_flagship_root():
    # g(w) = 64 w^2 - 20 w + 0.4375 has exact root (20 - sqrt(288)) / 128
    s = min_kl_at_gap(PI, 0.75)
    assert abs(s.s_dd - (20.0 - math.sqrt(288.0)) / 128.0) <= 1e-13
    assert s.gap == pytest.approx(0.75, abs=1e-12)
    assert kl_divergence(s, PI) == pytest.approx(0.8035877925029541, rel=1e-12)


@pytest.mark.parametrize("p", [0.6, 0.75, 0.9])
@pytest.mark.parametrize("theta", [-0.9, -0.5, -0.1, 0.1, 0.3, 0.6, 0.9])
def test_min_kl_stationarity(p, theta):
    """The minimizer satisfies the constraint and both first-order
    identities: s_mm = d^2 s_dd and s_dm * s_md = s_mm * s_dd."""
    pi = CompositeDistribution.from_success_prob(p)
    s = min_kl_at_gap(pi, theta)
    d = pi.d
    assert abs(s.gap - theta) <= 1e-10
    assert abs(s.s_mm - d * d * s.s_dd) <= 1e-10
    assert abs(s.s_dm * s.s_md - s.s_mm * s.s_dd) <= 1e-10


def test_min_kl_even_in_theta_value():
    for theta in (0.25, 0.6, 0.9):
        lo = kl_divergence(min_kl_at_gap(PI, -theta), PI)
        hi = kl_divergence(min_kl_at_gap(PI, theta), PI)
        assert abs(lo - hi) <= 1e-12


def test_min_kl_monotone_in_gap_size():
    vals = [kl_divergence(min_kl_at_gap(PI, t), PI) for t in (0.1, 0.3, 0.5, 0.7, 0.9)]
    assert all(a < b for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize(
    "p,theta",
    [(0.75, 0.75), (0.75, -0.3), (0.6, 0.5), (0.9, 0.8), (0.85, -0.6)],
)
def test_min_kl_beats_grid_oracle(p, theta):
    pi = CompositeDistribution.from_success_prob(p)
    solved = kl_divergence(min_kl_at_gap(pi, theta), pi)
    gridded = kl_grid_oracle(pi, theta)
    # the grid can only land above the true minimum
    assert gridded >= solved - 1e-9
    assert gridded - solved <= 1e-4


def test_min_kl_rejects_unreachable_gap():
    with pytest.raises(ParameterDomainError):
        min_kl_at_gap(PI, 1.0)
    with pytest.raises(ParameterDomainError):
        min_kl_at_gap(PI, -1.5)


def test_limit_means_flagship():
    eps0, eps1 = limit_conditional_means(1.0, 8.0, 3.0)
    assert eps0 == pytest.approx(-0.8786796564403576, abs=1e-12)
    assert eps1 == pytest.approx(2.1213203435596424, abs=1e-12)


def test_limit_means_agree_with_kl_route():
    for beta1, c0, d in ((1.0, 8.0, 3.0), (0.5, 3.0, 2.0), (1.2, 6.0, 4.0)):
        pi = CompositeDistribution.from_success_prob(d / (1.0 + d))
        theta_h = (math.sqrt(2.0 * c0) - beta1) / (d + 1.0)
        s = min_kl_at_gap(pi, theta_h)
        eps0, eps1 = implied_means(s, d)
        c_eps0, c_eps1 = limit_conditional_means(beta1, c0, d)
        assert eps0 == pytest.approx(c_eps0, abs=1e-9)
        assert eps1 == pytest.approx(c_eps1, abs=1e-9)


def test_limit_means_difference_is_boundary_gap():
    for beta1, c0, d in ((1.0, 8.0, 3.0), (0.3, 1.0, 5.0), (2.0, 9.0, 1.5)):
        eps0, eps1 = limit_conditional_means(beta1, c0, d)
        q = math.sqrt(2.0 * c0) - beta1
        assert eps1 - eps0 == pytest.approx(q, abs=1e-12)


def test_limit_means_vanish_when_boundary_sits_at_beta1():
    # sqrt(2 c0) = beta1: selection costs nothing in the limit
    assert limit_conditional_means(2.0, 2.0, 3.0) == (0.0, 0.0)


@pytest.mark.parametrize(
    "args,needle",
    [
        ((-1.0, 8.0, 3.0), "beta1"),
        ((0.0, 8.0, 3.0), "beta1"),
        ((1.0, 0.0, 3.0), "c0"),
        ((1.0, 8.0, 1.0), "exceed 1"),
        ((20.0, 0.5, 3.0), "theta_h"),
        ((1.0, 12.5, 3.0), "theta_h"),
    ],
)
def test_limit_domain_errors(args, needle):
    with pytest.raises(ParameterDomainError, match=needle):
        limit_conditional_means(*args)
    with pytest.raises(ParameterDomainError, match=needle):
        limit_ic_violated(*args)


def test_limit_violation_threshold():
    # at c0 = 8, d = 3 the cutoff is beta1 = 8/7 exactly
    thr = 8.0 / 7.0
    assert limit_ic_violated(thr - 1e-6, 8.0, 3.0)
    assert not limit_ic_violated(thr + 1e-6, 8.0, 3.0)
    assert not limit_ic_violated(thr, 8.0, 3.0)
    assert limit_ic_violated(1.0, 8.0, 3.0)
    assert not limit_ic_violated(1.3, 8.0, 3.0)


def test_limit_violation_matches_statistic_sign():
    for d in (2.0, 3.0, 5.0):
        for c0 in (1.0, 4.0, 8.0, 12.0):
            for k in range(1, 20):
                beta1 = 0.2 * k
                theta_h = (math.sqrt(2.0 * c0) - beta1) / (d + 1.0)
                if not (-1.0 < theta_h < 1.0):
                    continue
                stat = ic_statistic(beta1, *limit_conditional_means(beta1, c0, d))
                if abs(stat) < 1e-9:
                    continue  # too close to the cutoff for a sign test
                assert limit_ic_violated(beta1, c0, d) == (stat > 0.0)


def test_probe_flagship_unit_n():
    (row,) = finite_n_probe(1.0, 8.0, 3.0, [1])
    assert row.n == 1
    assert row.pivot_prob == 0.1875
    assert row.upper_prob == 0.1875
    assert row.lower_prob == 0.0
    assert row.cond_eps0 == -1.0
    assert row.cond_eps1 == 3.0
    assert row.ic_statistic == 5.0
    assert row.loss_gap == -0.9375
    assert not row.trivial


@pytest.mark.parametrize("beta1,c0", [(1.0, 8.0), (0.9, 8.0), (1.4, 8.0)])
@pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
def test_probe_matches_direct_enumeration(beta1, c0, n):
    (row,) = finite_n_probe(beta1, c0, 3.0, [n])
    upper, lower, m0, m1, stat, gap = probe_enumeration(beta1, c0, 3.0, n)
    assert row.upper_prob == pytest.approx(upper, rel=1e-12, abs=1e-15)
    assert row.lower_prob == pytest.approx(lower, rel=1e-12, abs=1e-15)
    assert row.pivot_prob == pytest.approx(upper + lower, rel=1e-12, abs=1e-15)
    assert row.cond_eps0 == pytest.approx(m0, rel=1e-10, abs=1e-12)
    assert row.cond_eps1 == pytest.approx(m1, rel=1e-10, abs=1e-12)
    assert row.ic_statistic == pytest.approx(stat, rel=1e-10, abs=1e-12)
    assert row.loss_gap == pytest.approx(gap, rel=1e-10, abs=1e-15)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_probe_gap_equals_payoff_gap(n):
    (row,) = finite_n_probe(1.0, 8.0, 3.0, [n])
    direct = loss_gap(1, ModelParams(0.0, 1.0), Bernoulli(0.75), PenaltyParams(c0=8.0), n)
    assert row.loss_gap == pytest.approx(direct, rel=1e-12, abs=1e-15)
    ps = pivotal_stats(ModelParams(0.0, 1.0), Bernoulli(0.75), PenaltyParams(c0=8.0), n)
    assert row.pivot_prob == pytest.approx(ps.pivot_prob, rel=1e-12, abs=1e-15)


def test_probe_upper_tail_only_conditioning():
    # beta1 < 0 puts all selection mass in the lower tail: conditionals
    # are None but the row is not trivial
    (row,) = finite_n_probe(-1.0, 8.0, 3.0, [1])
    assert row.upper_prob == 0.0
    assert row.lower_prob == 0.1875
    assert row.cond_eps0 is None
    assert row.cond_eps1 is None
    assert row.ic_statistic is None
    assert not row.trivial


def test_probe_trivial_when_threshold_unreachable():
    (row,) = finite_n_probe(1.0, 50.0, 3.0, [1])
    assert row.pivot_prob == 0.0
    assert row.trivial
    assert row.loss_gap == 0.0
    assert row.cond_eps0 is None


def test_probe_sorts_and_dedupes_sizes():
    rows = finite_n_probe(1.0, 8.0, 3.0, [100, 25, 100])
    assert [r.n for r in rows] == [25, 100]


def test_probe_input_validation():
    with pytest.raises(ValueError):
        finite_n_probe(1.0, 8.0, 3.0, [10**5])
    with pytest.raises(ValueError):
        finite_n_probe(1.0, 8.0, 3.0, [0])
    with pytest.raises(ValueError):
        finite_n_probe(1.0, 8.0, 3.0, [2.0])
    with pytest.raises(ValueError):
        finite_n_probe(1.0, -1.0, 3.0, [1])
    with pytest.raises(ValueError):
        finite_n_probe(1.0, 8.0, 1.0, [1])


def test_probe_conditional_means_approach_limit():
    rows = finite_n_probe(1.0, 8.0, 3.0, [25, 100, 400])
    eps0, eps1 = limit_conditional_means(1.0, 8.0, 3.0)
    errs = [
        max(abs(r.cond_eps0 - eps0), abs(r.cond_eps1 - eps1)) for r in rows
    ]
    assert errs[0] > errs[1] > errs[2]
    assert errs[-1] < 0.01
