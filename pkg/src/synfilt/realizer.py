"""The standard geometric realizer on barycentric coordinates.

``face_map`` and ``degeneracy_map`` act on any nonnegative vector, not only
on points of the simplex, so the same functions drive both sample points and
Dirichlet parameter vectors. Python sequences (including tuples of
``Fraction``) are handled exactly; numpy arrays are handled along the last
axis so whole sample batches can be pushed at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .simplex import OrderPreservingMap

__all__ = [
    "SUM_TOLERANCE",
    "BarycentricPoint",
    "covariant_map",
    "face_map",
    "degeneracy_map",
    "check_realizer_identities",
    "uniform_points",
]

SUM_TOLERANCE = 1e-12


@dataclass(frozen=True)
class BarycentricPoint:
    """A point of the standard n-simplex.

    Inputs outside the simplex are rejected, never renormalized.
    """

    weights: tuple[float, ...]

    def __post_init__(self):
        weights = tuple(float(w) for w in self.weights)
        if not weights:
            raise ValueError("a barycentric point needs at least one weight")
        for k, w in enumerate(weights):
            if not (0.0 <= w <= 1.0):
                raise ValueError(f"weight {k} = {w!r} is outside [0, 1]")
        total = math.fsum(weights)
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise ValueError(f"weights sum to {total!r}, not 1")
        object.__setattr__(self, "weights", weights)

    @property
    def n(self) -> int:
        return len(self.weights) - 1

    def __len__(self) -> int:
        return len(self.weights)

    def __iter__(self):
        return iter(self.weights)

    def __getitem__(self, k):
        return self.weights[k]


def covariant_map(f: OrderPreservingMap, w: BarycentricPoint) -> BarycentricPoint:
    """Push ``w`` forward along ``f``: weight at ``m`` collects all ``w_i`` with f(i) = m."""
    if len(w) != f.source_n + 1:
        raise ValueError(
            f"point has {len(w)} weights, map expects {f.source_n + 1}"
        )
    out = [0.0] * (f.target_n + 1)
    for i, wi in enumerate(w):
        out[f.image[i]] += wi
    return BarycentricPoint(tuple(out))


def _check_width(n: int, width: int, what: str) -> None:
    if width != n + 1:
        raise ValueError(f"{what} expects {n + 1} coordinates, got {width}")


def face_map(n: int, i: int, w):
    """Face map d^n_i from R^{n+1} to R^n.

    For ``i > 0`` the coordinates ``i-1`` and ``i`` are merged into slot
    ``i-1``. For ``i == 0`` the first coordinate is merged into the *last*
    output slot (cyclic convention), and the rest shift down by one.
    """
    if n < 1 or not 0 <= i <= n:
        raise ValueError(f"face index out of range: n={n}, i={i}")
    if isinstance(w, np.ndarray):
        _check_width(n, w.shape[-1], "face_map")
        if i > 0:
            merged = (w[..., i - 1] + w[..., i])[..., None]
            return np.concatenate([w[..., : i - 1], merged, w[..., i + 1 :]], axis=-1)
        merged = (w[..., n] + w[..., 0])[..., None]
        return np.concatenate([w[..., 1:n], merged], axis=-1)

    w = tuple(w)
    _check_width(n, len(w), "face_map")
    if i > 0:
        return w[: i - 1] + (w[i - 1] + w[i],) + w[i + 1 :]
    return w[1:n] + (w[n] + w[0],)


def degeneracy_map(n: int, j: int, w):
    """Degeneracy map s^n_j from R^{n+1} to R^{n+2}: insert a zero at ``j``."""
    if n < 0 or not 0 <= j <= n:
        raise ValueError(f"degeneracy index out of range: n={n}, j={j}")
    if isinstance(w, np.ndarray):
        _check_width(n, w.shape[-1], "degeneracy_map")
        zero = np.zeros(w.shape[:-1] + (1,), dtype=w.dtype)
        return np.concatenate([w[..., :j], zero, w[..., j:]], axis=-1)

    w = tuple(w)
    _check_width(n, len(w), "degeneracy_map")
    zero = w[0] * 0 if w else 0
    return w[:j] + (zero,) + w[j:]


def uniform_points(rng: np.random.Generator, n: int, count: int) -> np.ndarray:
    """Uniform points on the n-simplex from spacings of sorted uniforms."""
    cuts = np.sort(rng.random((count, n)), axis=1)
    edges = np.concatenate([np.zeros((count, 1)), cuts, np.ones((count, 1))], axis=1)
    return np.diff(edges, axis=1)


def check_realizer_identities(
    max_n: int = 6,
    points_per_case: int = 200,
    rng: np.random.Generator | None = None,
    atol: float = 1e-12,
) -> dict:
    """Check the simplicial-object identities of the realizer numerically.

    Each (n, i, j) case is evaluated on ``points_per_case`` random points and
    compared coordinate-wise at absolute tolerance ``atol``. Counterexamples
    are reported, not hidden.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    d, s = face_map, degeneracy_map
    families: dict[str, dict] = {}

    def record(name, cases, failures, worst):
        families[name] = {"cases": cases, "failures": failures, "max_abs_error": worst}

    cases, failures, worst = 0, [], 0.0
    for n in range(2, max_n + 1):
        w = uniform_points(rng, n, points_per_case)
        for j in range(n + 1):
            for i in range(j):
                cases += 1
                err = float(np.max(np.abs(d(n - 1, i, d(n, j, w)) - d(n - 1, j - 1, d(n, i, w)))))
                worst = max(worst, err)
                if err > atol:
                    failures.append({"n": n, "i": i, "j": j, "max_abs_error": err})
    record("face_face", cases, failures, worst)

    cases, failures, worst = 0, [], 0.0
    for n in range(1, max_n + 1):
        w = uniform_points(rng, n - 1, points_per_case)
        for j in range(n):
            for i in range(j + 1):
                cases += 1
                err = float(np.max(np.abs(s(n, i, s(n - 1, j, w)) - s(n, j + 1, s(n - 1, i, w)))))
                worst = max(worst, err)
                if err > atol:
                    failures.append({"n": n, "i": i, "j": j, "max_abs_error": err})
    record("degeneracy_degeneracy", cases, failures, worst)

    cases, failures, worst = 0, [], 0.0
    for n in range(0, max_n + 1):
        w = uniform_points(rng, n, points_per_case)
        for j in range(n + 1):
            for i in range(n + 2):
                cases += 1
                lhs = d(n + 1, i, s(n, j, w))
                if i < j:
                    rhs = s(n - 1, j - 1, d(n, i, w))
                elif i in (j, j + 1):
                    rhs = w
                else:
                    rhs = s(n - 1, j, d(n, i - 1, w))
                err = float(np.max(np.abs(lhs - rhs)))
                worst = max(worst, err)
                if err > atol:
                    failures.append({"n": n, "i": i, "j": j, "max_abs_error": err})
    record("face_degeneracy", cases, failures, worst)

    return {
        "level": "realizer",
        "max_n": max_n,
        "points_per_case": points_per_case,
        "tolerance": atol,
        "families": families,
        "passed": all(not fam["failures"] for fam in families.values()),
    }
