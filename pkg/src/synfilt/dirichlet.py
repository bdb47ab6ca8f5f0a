"""Dirichlet measures on standard simplices.

Parameters are kept as exact ``Fraction`` vectors so that face and
degeneracy actions, Bayesian increments and moment formulas are exact.
Sampling and densities convert to floats at the boundary.

Zero parameters are allowed as long as one entry is positive: the
corresponding coordinates are pinned at zero (the induced measure lives on
a face of the simplex).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterator

import numpy as np

from .realizer import BarycentricPoint, degeneracy_map, face_map, uniform_points

__all__ = [
    "INFINITE_DENSITY",
    "DEFAULT_SE_THRESHOLD",
    "DirichletParams",
    "Moments",
    "PushforwardReport",
    "as_fraction",
    "log_multivariate_beta",
    "density",
    "densities",
    "sample",
    "uniform_simplex_sample",
    "params_face",
    "params_degeneracy",
    "induced_measure_moments",
    "beta_central_moment4",
    "moment_deviation",
    "verify_pushforward_face",
    "lattice_points",
    "density_grid",
    "spawn_streams",
]

# Returned by ``density`` at boundary points where some alpha_i < 1.
INFINITE_DENSITY = math.inf

DEFAULT_SE_THRESHOLD = 5.0


def as_fraction(value) -> Fraction:
    """Exact conversion; floats go through their shortest decimal repr."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            raise ValueError(f"non-finite parameter {value!r}")
        return Fraction(repr(value))
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    return Fraction(str(value).strip())


@dataclass(frozen=True)
class DirichletParams:
    """A parameter vector in R_#^{n+1}: nonnegative, not all zero.

    >>> DirichletParams.of(1, 2, 1).n
    2
    """

    alpha: tuple[Fraction, ...]

    def __post_init__(self):
        alpha = tuple(as_fraction(a) for a in self.alpha)
        if not alpha:
            raise ValueError("parameter vector is empty")
        if any(a < 0 for a in alpha):
            raise ValueError(f"negative Dirichlet parameter in {alpha}")
        if not any(a > 0 for a in alpha):
            raise ValueError("at least one Dirichlet parameter must be positive")
        object.__setattr__(self, "alpha", alpha)

    @classmethod
    def of(cls, *alpha) -> DirichletParams:
        return cls(tuple(alpha))

    @classmethod
    def parse(cls, text: str) -> DirichletParams:
        """Parse ``"1,2,1"``; entries may be integers, decimals or ``p/q``."""
        return cls(tuple(Fraction(tok.strip()) for tok in text.split(",")))

    @property
    def n(self) -> int:
        return len(self.alpha) - 1

    @property
    def total(self) -> Fraction:
        return sum(self.alpha, Fraction(0))

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(k for k, a in enumerate(self.alpha) if a > 0)

    @property
    def is_strictly_positive(self) -> bool:
        return all(a > 0 for a in self.alpha)

    def as_floats(self) -> np.ndarray:
        return np.array([float(a) for a in self.alpha])

    def __len__(self) -> int:
        return len(self.alpha)

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.alpha)

    def __getitem__(self, k):
        return self.alpha[k]

    def __str__(self) -> str:
        return "(" + ",".join(str(a) for a in self.alpha) + ")"


def _require_positive(params: DirichletParams, what: str) -> None:
    if not params.is_strictly_positive:
        raise ValueError(f"{what} needs strictly positive parameters, got {params}")


def log_multivariate_beta(params: DirichletParams) -> float:
    """log B(alpha) = sum log Gamma(alpha_i) - log Gamma(sum alpha_i)."""
    _require_positive(params, "the multivariate beta function")
    a = [float(x) for x in params.alpha]
    return math.fsum(math.lgamma(x) for x in a) - math.lgamma(float(params.total))


def _as_point(x) -> tuple[float, ...]:
    if isinstance(x, BarycentricPoint):
        return x.weights
    return BarycentricPoint(tuple(x)).weights


def density(params: DirichletParams, x) -> float:
    """Dirichlet density at a point of the simplex.

    Boundary points where a coordinate with ``alpha_i < 1`` vanishes give
    ``INFINITE_DENSITY``.
    """
    _require_positive(params, "density")
    w = _as_point(x)
    if len(w) != len(params):
        raise ValueError(f"point has {len(w)} coordinates, parameters have {len(params)}")
    log_b = 0.0
    for wi, ai in zip(w, params.alpha):
        ai = float(ai)
        if wi == 0.0:
            if ai < 1:
                return INFINITE_DENSITY
            if ai > 1:
                return 0.0
            continue
        log_b += (ai - 1.0) * math.log(wi)
    return math.exp(log_b - log_multivariate_beta(params))


def densities(params: DirichletParams, points: np.ndarray) -> np.ndarray:
    """Vectorized ``density`` over the rows of ``points``."""
    _require_positive(params, "density")
    points = np.asarray(points, dtype=float)
    if points.shape[-1] != len(params):
        raise ValueError("points have the wrong number of coordinates")
    a = params.as_floats()
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(points == 0.0, np.where(a < 1, np.inf, np.where(a > 1, -np.inf, 0.0)),
                         (a - 1.0) * np.log(np.where(points > 0, points, 1.0)))
        log_p = terms.sum(axis=-1) - log_multivariate_beta(params)
        out = np.exp(log_p)
    # an infinite factor dominates any vanishing one
    out[np.any((points == 0.0) & (a < 1), axis=-1)] = INFINITE_DENSITY
    return out


def sample(params: DirichletParams, rng: np.random.Generator, size: int | None = None):
    """Draw from Dir(alpha) by normalizing independent Gamma(alpha_j, 1) variates.

    Coordinates with ``alpha_j = 0`` are exactly zero. Returns a
    ``BarycentricPoint`` when ``size`` is None, otherwise an array of shape
    ``(size, n+1)``.
    """
    a = params.as_floats()
    count = 1 if size is None else size
    g = np.zeros((count, len(a)))
    live = a > 0
    g[:, live] = rng.standard_gamma(a[live], size=(count, int(live.sum())))
    out = g / g.sum(axis=1, keepdims=True)
    if size is None:
        return BarycentricPoint(tuple(out[0]))
    return out


def uniform_simplex_sample(n: int, rng: np.random.Generator, size: int) -> np.ndarray:
    """Uniform points on the n-simplex from spacings of sorted uniforms.

    Independent of the gamma route, so it can serve as a reference sampler.
    """
    return uniform_points(rng, n, size)


def params_face(params: DirichletParams, i: int) -> DirichletParams:
    if params.n < 1:
        raise ValueError("face maps need n >= 1")
    return DirichletParams(face_map(params.n, i, params.alpha))


def params_degeneracy(params: DirichletParams, j: int) -> DirichletParams:
    return DirichletParams(degeneracy_map(params.n, j, params.alpha))


@dataclass(frozen=True)
class Moments:
    mean: tuple[Fraction, ...]
    variance: tuple[Fraction, ...]


def induced_measure_moments(params: DirichletParams) -> Moments:
    """Exact per-coordinate mean and variance of the induced Dirichlet measure.

    Each positive coordinate is marginally Beta(alpha_i, S - alpha_i);
    zero-parameter coordinates have mean and variance 0.
    """
    s = params.total
    mean = tuple(a / s for a in params.alpha)
    var = tuple(a * (s - a) / (s * s * (s + 1)) for a in params.alpha)
    return Moments(mean, var)


def beta_central_moment4(a: float, b: float) -> float:
    """Fourth central moment of Beta(a, b); 0 when ``a`` is 0 or ``b`` is 0."""
    if a == 0 or b == 0:
        return 0.0
    s = a + b
    raw = [1.0]
    for r in range(4):
        raw.append(raw[-1] * (a + r) / (s + r))
    m1, m2, m3, m4 = raw[1:]
    return m4 - 4 * m3 * m1 + 6 * m2 * m1**2 - 3 * m1**4


def moment_deviation(samples: np.ndarray, target: DirichletParams) -> dict:
    """Compare sample means and variances with the target's analytic moments.

    Deviations are in standard-error units. The mean's SE is sqrt(var/N);
    the variance's SE uses the Beta fourth central moment,
    sqrt((mu4 - var^2)/N). Coordinates with zero analytic variance must be
    reproduced exactly (deviation 0 or infinity).
    """
    samples = np.asarray(samples, dtype=float)
    count = samples.shape[0]
    moments = induced_measure_moments(target)
    s = float(target.total)
    emp_mean = samples.mean(axis=0)
    emp_var = samples.var(axis=0)
    mean_z, var_z = [], []
    for k, a in enumerate(target.alpha):
        mu, var = float(moments.mean[k]), float(moments.variance[k])
        mu4 = beta_central_moment4(float(a), s - float(a))
        se_mean = math.sqrt(var / count)
        se_var = math.sqrt(max(mu4 - var * var, 0.0) / count)
        mean_z.append(_z(emp_mean[k] - mu, se_mean))
        var_z.append(_z(emp_var[k] - var, se_var))
    return {
        "expected_mean": [float(m) for m in moments.mean],
        "expected_variance": [float(v) for v in moments.variance],
        "empirical_mean": emp_mean.tolist(),
        "empirical_variance": emp_var.tolist(),
        "mean_deviation_se": mean_z,
        "variance_deviation_se": var_z,
        "max_deviation_se": max(mean_z + var_z),
    }


def _z(diff: float, se: float) -> float:
    if se == 0.0:
        return 0.0 if abs(diff) <= 1e-15 else math.inf
    return abs(diff) / se


@dataclass(frozen=True)
class PushforwardReport:
    alpha: DirichletParams
    face: int
    n_samples: int
    target: DirichletParams
    comparison: dict
    threshold: float

    @property
    def max_deviation_se(self) -> float:
        return self.comparison["max_deviation_se"]

    @property
    def passed(self) -> bool:
        return bool(self.max_deviation_se <= self.threshold)

    def to_dict(self) -> dict:
        return {
            "alpha": [str(a) for a in self.alpha],
            "face": self.face,
            "n_samples": self.n_samples,
            "target_alpha": [str(a) for a in self.target],
            **self.comparison,
            "threshold_se": self.threshold,
            "passed": self.passed,
        }


def verify_pushforward_face(
    params: DirichletParams,
    i: int,
    sample_count: int,
    rng: np.random.Generator,
    threshold: float = DEFAULT_SE_THRESHOLD,
) -> PushforwardReport:
    """Push Dir(alpha) samples through the face map ``i`` and moment-match them.

    The pushed samples are compared with the analytic moments of the
    Dirichlet whose parameter is the face map applied to alpha.
    """
    if params.n < 1:
        raise ValueError("face maps need n >= 1")
    pushed = face_map(params.n, i, sample(params, rng, sample_count))
    target = params_face(params, i)
    return PushforwardReport(
        params, i, sample_count, target, moment_deviation(pushed, target), threshold
    )


def lattice_points(n: int, resolution: int) -> Iterator[tuple[Fraction, ...]]:
    """Points k/R of the n-simplex with integer k summing to R."""
    if resolution < 1:
        raise ValueError("resolution must be positive")
    # stars and bars over n+1 slots
    for bars in combinations(range(resolution + n), n):
        edges = (-1,) + bars + (resolution + n,)
        yield tuple(Fraction(edges[k + 1] - edges[k] - 1, resolution) for k in range(n + 1))


def density_grid(params: DirichletParams, resolution: int) -> list[tuple[tuple[float, ...], float]]:
    grid = []
    for point in lattice_points(params.n, resolution):
        x = tuple(float(v) for v in point)
        grid.append((x, density(params, x)))
    return grid


def spawn_streams(seed: int, count: int) -> list[np.random.Generator]:
    """Independent generators derived deterministically from one root seed."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]
