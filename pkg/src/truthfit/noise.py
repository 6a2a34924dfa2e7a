"""Mean-zero noise laws and distributions derived from them.

Supported laws: a skewed two-point law ("bernoulli": -1 with probability
p, d = p/(1-p) with probability 1-p, p > 1/2 so d > 1), arbitrary finite
mean-zero laws, Gaussian, centered uniform, and the degenerate point mass
at zero.  From a law this module builds the exact distribution of the
n-replicate sample mean, the product law of two independent copies, the
law of the difference eps1 - eps0, and Gauss-type quadrature rules for
the continuous cases.

Specs are also parseable from compact strings (shared with the CLI):

    bernoulli:p=0.75   gaussian:sigma=1.0   uniform:halfwidth=1.0
    degenerate         discrete:-1:0.5,1:0.5
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.stats import binom

MASS_TOL = 1e-12
MEAN_TOL = 1e-12
VALUE_MERGE_TOL = 1e-12


class UnsupportedNoiseError(ValueError):
    """Raised for noise/replicate combinations with no exact representation."""


class NoiseGrammarError(ValueError):
    """Raised when a noise spec string cannot be parsed into a valid law."""


@dataclass(frozen=True)
class Bernoulli:
    """Two-point law -1 w.p. p and d = p/(1-p) w.p. 1-p; requires p > 1/2."""

    p: float

    def __post_init__(self):
        if not (0.5 < self.p < 1.0):
            raise ValueError(
                f"bernoulli noise requires p in (1/2, 1) so that d > 1, got {self.p}"
            )

    @property
    def d(self) -> float:
        return self.p / (1.0 - self.p)


@dataclass(frozen=True)
class DiscreteMeanZero:
    """Finite law given as (value, prob) atoms; mean must vanish."""

    atoms: tuple

    def __post_init__(self):
        pairs = tuple((float(v), float(p)) for v, p in self.atoms)
        if not pairs:
            raise ValueError("discrete noise needs at least one atom")
        for v, p in pairs:
            if not (math.isfinite(v) and math.isfinite(p) and p > 0.0):
                raise ValueError(f"bad atom ({v}, {p}): need finite value, prob > 0")
        mass = math.fsum(p for _, p in pairs)
        if abs(mass - 1.0) > MASS_TOL:
            raise ValueError(f"atom probabilities sum to {mass}, not 1")
        mean = math.fsum(v * p for v, p in pairs)
        if abs(mean) > MEAN_TOL:
            raise ValueError(f"atoms have mean {mean}, must be 0")
        object.__setattr__(self, "atoms", pairs)


@dataclass(frozen=True)
class Gaussian:
    sigma: float

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma > 0.0):
            raise ValueError(f"sigma must be positive, got {self.sigma}")


@dataclass(frozen=True)
class Uniform:
    halfwidth: float

    def __post_init__(self):
        if not (math.isfinite(self.halfwidth) and self.halfwidth > 0.0):
            raise ValueError(f"halfwidth must be positive, got {self.halfwidth}")


@dataclass(frozen=True)
class Degenerate:
    """The zero-noise law: a single atom at 0."""


NoiseSpec = Bernoulli | DiscreteMeanZero | Gaussian | Uniform | Degenerate


@dataclass(frozen=True)
class DiscreteDistribution:
    """Sorted, merged atom list with total mass 1."""

    values: tuple
    probs: tuple

    def __post_init__(self):
        if len(self.values) != len(self.probs) or not self.values:
            raise ValueError("values and probs must be nonempty and equal length")
        if any(self.values[i] >= self.values[i + 1] for i in range(len(self.values) - 1)):
            raise ValueError("values must be strictly increasing")
        mass = math.fsum(self.probs)
        if abs(mass - 1.0) > MASS_TOL:
            raise ValueError(f"total mass {mass}, expected 1")

    @classmethod
    def from_pairs(cls, pairs) -> "DiscreteDistribution":
        """Build from (value, prob) pairs, sorting and merging near-equal values."""
        pairs = sorted((float(v), float(p)) for v, p in pairs)
        values, probs = [], []
        for v, p in pairs:
            if values and v - values[-1] <= VALUE_MERGE_TOL:
                probs[-1] += p
            else:
                values.append(v)
                probs.append(p)
        return cls(values=tuple(values), probs=tuple(probs))

    @property
    def atoms(self):
        return list(zip(self.values, self.probs))

    def mean(self) -> float:
        return math.fsum(v * p for v, p in zip(self.values, self.probs))


@dataclass(frozen=True)
class ContinuousDistribution:
    """Density handle with pdf/cdf evaluators and a (possibly infinite) support."""

    pdf: Callable
    cdf: Callable
    support: tuple


DifferenceDistribution = DiscreteDistribution | ContinuousDistribution


def is_discrete(spec: NoiseSpec) -> bool:
    return isinstance(spec, (Bernoulli, DiscreteMeanZero, Degenerate))


def is_symmetric(spec: NoiseSpec) -> bool:
    """True when the law is symmetric about 0."""
    if isinstance(spec, (Gaussian, Uniform, Degenerate)):
        return True
    if isinstance(spec, Bernoulli):
        return False  # d = p/(1-p) > 1 makes it skewed by construction
    atoms = {v: p for v, p in spec.atoms}
    return all(abs(atoms.get(-v, 0.0) - p) <= MASS_TOL for v, p in atoms.items())


def atoms_of(spec: NoiseSpec):
    """Atom list of a discrete spec, as (value, prob) pairs."""
    if isinstance(spec, Bernoulli):
        return [(-1.0, spec.p), (spec.d, 1.0 - spec.p)]
    if isinstance(spec, DiscreteMeanZero):
        return list(spec.atoms)
    if isinstance(spec, Degenerate):
        return [(0.0, 1.0)]
    raise UnsupportedNoiseError(f"{type(spec).__name__} noise has no atom list")


def binomial_pmf(n: int, p: float):
    """Binomial(n, p) pmf over k = 0..n as an array.

    Uses the exact combinatorial formula while the coefficients fit in a
    float (n <= 1000; keeps small-n enumerations bit-exact for dyadic p),
    log-space evaluation above that.
    """
    _check_n(n)
    if n <= 1000:
        q = 1.0 - p
        return np.array([math.comb(n, k) * p**k * q ** (n - k) for k in range(n + 1)])
    return binom.pmf(np.arange(n + 1), n, p)


def sample_mean_distribution(spec: NoiseSpec, n: int) -> DiscreteDistribution:
    """Exact law of the mean of n i.i.d. draws from a discrete spec.

    Bernoulli uses the binomial closed form directly; other finite laws
    are convolved n times and rescaled.  Continuous specs are rejected:
    their sample means have no finite atom list (and replicate analysis
    is only defined for the discrete laws).
    """
    _check_n(n)
    if isinstance(spec, (Gaussian, Uniform)):
        raise UnsupportedNoiseError(
            f"sample mean of {type(spec).__name__} noise has no discrete law; "
            "continuous specs support n = 1 paths only"
        )
    if isinstance(spec, Degenerate):
        return DiscreteDistribution(values=(0.0,), probs=(1.0,))
    if isinstance(spec, Bernoulli):
        # k copies of -1 and n-k copies of d, k ~ Binomial(n, p)
        d = spec.d
        values = tuple((k * (-1.0) + (n - k) * d) / n for k in range(n + 1))
        probs = binomial_pmf(n, spec.p).tolist()
        return DiscreteDistribution.from_pairs(zip(values, probs))
    sums = {0.0: 1.0}
    for _ in range(n):
        nxt = {}
        for s, q in sums.items():
            for v, p in spec.atoms:
                t = s + v
                nxt[t] = nxt.get(t, 0.0) + q * p
        sums = nxt
    return DiscreteDistribution.from_pairs((s / n, q) for s, q in sums.items())


def joint_support(spec: NoiseSpec, n: int):
    """Product law of two independent sample means: [((eps0, eps1), prob)]."""
    marg = sample_mean_distribution(spec, n)
    return [
        ((v0, v1), p0 * p1)
        for v0, p0 in zip(marg.values, marg.probs)
        for v1, p1 in zip(marg.values, marg.probs)
    ]


def difference_distribution(spec: NoiseSpec, n: int) -> DifferenceDistribution:
    """Exact law of the mean-noise difference eps1 - eps0.

    Discrete specs give a merged atom list.  For n = 1, Gaussian noise
    gives a Normal(0, 2*sigma^2) handle and Uniform noise the triangular
    density on [-2h, 2h].
    """
    _check_n(n)
    if is_discrete(spec):
        marg = sample_mean_distribution(spec, n)
        return DiscreteDistribution.from_pairs(
            (v1 - v0, p1 * p0)
            for v0, p0 in zip(marg.values, marg.probs)
            for v1, p1 in zip(marg.values, marg.probs)
        )
    if n != 1:
        raise UnsupportedNoiseError(
            f"difference law of {type(spec).__name__} noise requires n = 1, got n = {n}"
        )
    if isinstance(spec, Gaussian):
        s = spec.sigma * math.sqrt(2.0)

        def pdf(z, _s=s):
            return math.exp(-0.5 * (z / _s) ** 2) / (_s * math.sqrt(2.0 * math.pi))

        def cdf(z, _s=s):
            return 0.5 * (1.0 + math.erf(z / (_s * math.sqrt(2.0))))

        return ContinuousDistribution(pdf=pdf, cdf=cdf, support=(-math.inf, math.inf))
    h = spec.halfwidth

    def pdf(z, _h=h):
        if abs(z) >= 2.0 * _h:
            return 0.0
        return (2.0 * _h - abs(z)) / (4.0 * _h * _h)

    def cdf(z, _h=h):
        if z <= -2.0 * _h:
            return 0.0
        if z >= 2.0 * _h:
            return 1.0
        if z <= 0.0:
            return (2.0 * _h + z) ** 2 / (8.0 * _h * _h)
        return 1.0 - (2.0 * _h - z) ** 2 / (8.0 * _h * _h)

    return ContinuousDistribution(pdf=pdf, cdf=cdf, support=(-2.0 * h, 2.0 * h))


def quadrature_nodes(spec: NoiseSpec, order: int):
    """Gauss rule of the given order against a continuous spec's density.

    Returns [(point, weight)] integrating polynomials of degree up to
    2*order - 1 exactly.  Hermite-type nodes for Gaussian noise,
    Legendre-type on the support for uniform noise.
    """
    if not (isinstance(order, int) and order >= 1):
        raise ValueError(f"order must be a positive integer, got {order!r}")
    if isinstance(spec, Gaussian):
        x, w = np.polynomial.hermite.hermgauss(order)
        pts = math.sqrt(2.0) * spec.sigma * x
        wts = w / math.sqrt(math.pi)
        return list(zip(pts.tolist(), wts.tolist()))
    if isinstance(spec, Uniform):
        x, w = np.polynomial.legendre.leggauss(order)
        pts = spec.halfwidth * x
        wts = w / 2.0
        return list(zip(pts.tolist(), wts.tolist()))
    raise UnsupportedNoiseError(
        f"quadrature nodes are defined for continuous specs, not {type(spec).__name__}"
    )


def parse_noise(text: str) -> NoiseSpec:
    """Parse a noise spec string; see the module docstring for the grammar."""
    s = text.strip()
    kind, sep, rest = s.partition(":")
    kind = kind.lower()
    if kind == "degenerate":
        if sep:
            raise NoiseGrammarError(f"degenerate takes no parameters: {text!r}")
        return Degenerate()
    if kind in ("bernoulli", "gaussian", "uniform"):
        param = {"bernoulli": "p", "gaussian": "sigma", "uniform": "halfwidth"}[kind]
        key, eq, val = rest.partition("=")
        if key.strip() != param or not eq:
            raise NoiseGrammarError(f"expected {kind}:{param}=<value>, got {text!r}")
        try:
            x = float(val)
        except ValueError:
            raise NoiseGrammarError(f"bad numeric value {val!r} in {text!r}") from None
        try:
            return {"bernoulli": Bernoulli, "gaussian": Gaussian, "uniform": Uniform}[
                kind
            ](x)
        except ValueError as e:
            raise NoiseGrammarError(str(e)) from None
    if kind == "discrete":
        if not rest:
            raise NoiseGrammarError(f"discrete needs v:p atoms, got {text!r}")
        pairs = []
        for item in rest.split(","):
            v, sep2, p = item.partition(":")
            if not sep2:
                raise NoiseGrammarError(f"bad atom {item!r}, expected value:prob")
            try:
                pairs.append((float(v), float(p)))
            except ValueError:
                raise NoiseGrammarError(f"bad atom {item!r} in {text!r}") from None
        try:
            return DiscreteMeanZero(atoms=tuple(pairs))
        except ValueError as e:
            raise NoiseGrammarError(str(e)) from None
    raise NoiseGrammarError(f"unknown noise kind {kind!r} in {text!r}")


def _check_n(n):
    if not (isinstance(n, int) and n >= 1):
        raise ValueError(f"n must be a positive integer, got {n!r}")
