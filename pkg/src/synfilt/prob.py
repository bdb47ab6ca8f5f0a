"""Finite probability spaces, null-preserving maps and conditional expectation.

Everything here is exact up to floating rounding: events are subsets of a
finite outcome set, integrals are sums.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import chain, combinations
from typing import Hashable, Iterable, Iterator, Mapping

__all__ = [
    "MASS_TOLERANCE",
    "NullPreservationError",
    "FiniteProbSpace",
    "PointMap",
    "RandomVariable",
    "is_null_preserving",
    "pushforward",
    "compose_maps",
    "integrate",
    "conditional_expectation",
    "verify_tower",
    "events",
    "random_instance",
    "load_fixture",
    "dump_fixture",
]

MASS_TOLERANCE = 1e-12

Outcome = Hashable


class NullPreservationError(ValueError):
    """A map sends positive mass onto a null outcome of its target."""


@dataclass(frozen=True)
class FiniteProbSpace:
    """Outcome labels with point masses summing to one."""

    mass: Mapping[Outcome, float]

    def __post_init__(self):
        mass = {x: float(m) for x, m in self.mass.items()}
        if not mass:
            raise ValueError("a probability space needs at least one outcome")
        for x, m in mass.items():
            if m < 0 or math.isnan(m):
                raise ValueError(f"outcome {x!r} has invalid mass {m!r}")
        total = math.fsum(mass.values())
        if abs(total - 1.0) > MASS_TOLERANCE:
            raise ValueError(f"masses sum to {total!r}, not 1")
        object.__setattr__(self, "mass", mass)

    @classmethod
    def uniform(cls, outcomes: Iterable[Outcome]) -> FiniteProbSpace:
        outcomes = list(outcomes)
        return cls({x: 1.0 / len(outcomes) for x in outcomes})

    @property
    def outcomes(self) -> tuple[Outcome, ...]:
        return tuple(self.mass)

    def __len__(self) -> int:
        return len(self.mass)

    def __iter__(self) -> Iterator[Outcome]:
        return iter(self.mass)

    def __getitem__(self, x: Outcome) -> float:
        return self.mass[x]

    def __hash__(self):
        return hash(tuple(sorted(self.mass.items(), key=repr)))

    def measure(self, event: Iterable[Outcome]) -> float:
        return math.fsum(self.mass[x] for x in event)


@dataclass(frozen=True, eq=False)
class PointMap:
    source: FiniteProbSpace
    target: FiniteProbSpace
    assignment: Mapping[Outcome, Outcome]

    def __post_init__(self):
        assignment = dict(self.assignment)
        missing = [x for x in self.source if x not in assignment]
        if missing:
            raise ValueError(f"map is undefined on source outcomes {missing!r}")
        stray = [y for y in assignment.values() if y not in self.target.mass]
        if stray:
            raise ValueError(f"map sends outcomes outside the target: {stray!r}")
        object.__setattr__(self, "assignment", assignment)

    @classmethod
    def identity(cls, space: FiniteProbSpace) -> PointMap:
        return cls(space, space, {x: x for x in space})

    def __call__(self, x: Outcome) -> Outcome:
        return self.assignment[x]

    def preimage(self, event: Iterable[Outcome]) -> list[Outcome]:
        event = set(event)
        return [x for x in self.source if self.assignment[x] in event]


@dataclass(frozen=True, eq=False)
class RandomVariable:
    space: FiniteProbSpace
    values: Mapping[Outcome, float] = field(default_factory=dict)

    def __post_init__(self):
        values = {x: float(v) for x, v in self.values.items()}
        missing = [x for x in self.space if x not in values]
        if missing:
            raise ValueError(f"random variable undefined on {missing!r}")
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, space: FiniteProbSpace, value: float) -> RandomVariable:
        return cls(space, {x: value for x in space})

    def __getitem__(self, x: Outcome) -> float:
        return self.values[x]

    def __add__(self, other: RandomVariable) -> RandomVariable:
        return RandomVariable(self.space, {x: self[x] + other[x] for x in self.space})

    def __rmul__(self, scalar: float) -> RandomVariable:
        return RandomVariable(self.space, {x: scalar * self[x] for x in self.space})

    def agrees_almost_surely(self, other: RandomVariable, tol: float = MASS_TOLERANCE) -> bool:
        """Equal on every outcome of positive mass, within ``tol``."""
        return all(
            abs(self[x] - other[x]) <= tol
            for x in self.space
            if self.space[x] > 0
        )


def events(space: FiniteProbSpace) -> Iterator[tuple[Outcome, ...]]:
    """All subsets of the outcome set."""
    xs = space.outcomes
    return chain.from_iterable(combinations(xs, r) for r in range(len(xs) + 1))


def pushforward(phi: PointMap) -> FiniteProbSpace:
    """Target outcomes weighted by the source mass of their preimage."""
    mass = {y: 0.0 for y in phi.target}
    for x in phi.source:
        mass[phi(x)] += phi.source[x]
    return FiniteProbSpace(mass)


def is_null_preserving(phi: PointMap) -> bool:
    pushed = pushforward(phi)
    return all(pushed[y] == 0 for y in phi.target if phi.target[y] == 0)


def compose_maps(psi: PointMap, phi: PointMap) -> PointMap:
    """``psi . phi``; the target of ``phi`` must be the source of ``psi``."""
    if phi.target != psi.source:
        raise ValueError("maps are not composable: target of phi is not source of psi")
    return PointMap(phi.source, psi.target, {x: psi(phi(x)) for x in phi.source})


def integrate(f: RandomVariable, event: Iterable[Outcome] | None = None) -> float:
    xs = f.space.outcomes if event is None else event
    return math.fsum(f[x] * f.space[x] for x in xs)


def conditional_expectation(f: RandomVariable, phi: PointMap) -> RandomVariable:
    """The conditional expectation of ``f`` along ``phi``.

    On target outcomes of positive mass this is the preimage integral of
    ``f`` divided by the target mass. Null target outcomes get the value 0,
    a fixed representative of the almost-sure class.
    """
    if f.space != phi.source:
        raise ValueError("random variable does not live on the source of the map")
    if not is_null_preserving(phi):
        raise NullPreservationError("conditional expectation needs a null-preserving map")
    weighted: dict[Outcome, list[float]] = {y: [] for y in phi.target}
    for x in phi.source:
        weighted[phi(x)].append(f[x] * phi.source[x])
    values = {}
    for y in phi.target:
        m = phi.target[y]
        values[y] = math.fsum(weighted[y]) / m if m > 0 else 0.0
    return RandomVariable(phi.target, values)


def verify_tower(
    f: RandomVariable, phi: PointMap, psi: PointMap, tol: float = MASS_TOLERANCE
) -> bool:
    """Check that conditioning along ``phi`` then ``psi`` equals conditioning along ``psi . phi``."""
    composite = compose_maps(psi, phi)
    two_step = conditional_expectation(conditional_expectation(f, phi), psi)
    one_step = conditional_expectation(f, composite)
    return two_step.agrees_almost_surely(one_step, tol)


def _random_masses(rng, size: int, forced_positive, zero_rate: float) -> dict:
    raw = rng.random(size) + 0.05
    for k in range(size):
        if k not in forced_positive and rng.random() < zero_rate:
            raw[k] = 0.0
    if raw.sum() == 0:
        raw[0] = 1.0
    raw = raw / raw.sum()
    return {f"o{k}": float(m) for k, m in enumerate(raw)}


def random_instance(rng, max_outcomes: int = 8, zero_rate: float = 0.2):
    """A random variable and two composable null-preserving maps X -> Y -> Z.

    Some outcomes get zero mass. Target masses are drawn independently of
    the pushforward; only outcomes receiving positive mass are forced to be
    positive, which is exactly what null preservation requires.
    """
    nx = int(rng.integers(1, max_outcomes + 1))
    ny = int(rng.integers(1, max_outcomes + 1))
    nz = int(rng.integers(1, max_outcomes + 1))

    mx = _random_masses(rng, nx, set(), zero_rate)
    phi_idx = rng.integers(0, ny, size=nx)
    hit_y = {int(phi_idx[k]) for k, m in enumerate(mx.values()) if m > 0}
    my = _random_masses(rng, ny, hit_y, zero_rate)
    psi_idx = rng.integers(0, nz, size=ny)
    hit_z = {int(psi_idx[k]) for k, m in enumerate(my.values()) if m > 0}
    mz = _random_masses(rng, nz, hit_z, zero_rate)

    X, Y, Z = FiniteProbSpace(mx), FiniteProbSpace(my), FiniteProbSpace(mz)
    phi = PointMap(X, Y, {f"o{k}": f"o{int(v)}" for k, v in enumerate(phi_idx)})
    psi = PointMap(Y, Z, {f"o{k}": f"o{int(v)}" for k, v in enumerate(psi_idx)})
    f = RandomVariable(X, {x: float(v) for x, v in zip(X, rng.normal(size=nx) * 3)})
    return f, phi, psi


# -- JSON fixtures -----------------------------------------------------------
#
# {"spaces": {"X": {"a": 0.25, ...}, ...},
#  "maps": {"phi": {"source": "X", "target": "Y", "assignment": {"a": "u", ...}}},
#  "variables": {"f": {"space": "X", "values": {"a": 1.0, ...}}}}
#
# Outcome labels are JSON object keys, hence strings.


def load_fixture(source) -> dict:
    """Read a fixture (path, file object or already-parsed dict)."""
    if isinstance(source, Mapping):
        doc = source
    elif hasattr(source, "read"):
        doc = json.load(source)
    else:
        with open(source) as fh:
            doc = json.load(fh)

    spaces = {name: FiniteProbSpace(mass) for name, mass in doc.get("spaces", {}).items()}
    maps = {
        name: PointMap(spaces[m["source"]], spaces[m["target"]], m["assignment"])
        for name, m in doc.get("maps", {}).items()
    }
    variables = {
        name: RandomVariable(spaces[v["space"]], v["values"])
        for name, v in doc.get("variables", {}).items()
    }
    return {"spaces": spaces, "maps": maps, "variables": variables}


def dump_fixture(
    spaces: Mapping[str, FiniteProbSpace],
    maps: Mapping[str, PointMap] = {},
    variables: Mapping[str, RandomVariable] = {},
) -> dict:
    def name_of(space):
        for name, candidate in spaces.items():
            if candidate is space or candidate == space:
                return name
        raise ValueError("space is not registered in the fixture")

    return {
        "spaces": {name: {str(x): m for x, m in s.mass.items()} for name, s in spaces.items()},
        "maps": {
            name: {
                "source": name_of(phi.source),
                "target": name_of(phi.target),
                "assignment": {str(x): str(y) for x, y in phi.assignment.items()},
            }
            for name, phi in maps.items()
        },
        "variables": {
            name: {"space": name_of(f.space), "values": {str(x): v for x, v in f.values.items()}}
            for name, f in variables.items()
        },
    }
