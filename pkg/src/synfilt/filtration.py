"""Dirichlet functor states over context-dependent time.

A state is anchored at one time ``t`` with a parameter vector of length
``t+1`` plus the context digits. Earlier times are recomputed on demand by
applying the face selected by each context digit; later times are only
constrained (one pair of entries has a pinned sum), so they are never
stored.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Iterable, Sequence, Union

import numpy as np

from .context import ContextPrefix, context_face_index
from .dirichlet import DirichletParams, as_fraction, induced_measure_moments, params_face, sample

__all__ = [
    "SCHEMA_VERSION",
    "FiltrationState",
    "ObservationEvent",
    "FutureConstraint",
    "SplitPolicy",
    "uniform_split",
    "state_at",
    "next_constraint",
    "complete_future",
    "bayes_update",
    "observe_counts",
    "advance",
    "draw_categories",
    "simulate_observation",
    "posterior_means",
    "replay",
]

SCHEMA_VERSION = "synfilt.filtration/1"


@dataclass(frozen=True)
class FiltrationState:
    anchor_time: int
    anchor_params: DirichletParams
    context: ContextPrefix = ContextPrefix()

    def __post_init__(self):
        if not isinstance(self.anchor_params, DirichletParams):
            object.__setattr__(self, "anchor_params", DirichletParams(tuple(self.anchor_params)))
        if not isinstance(self.context, ContextPrefix):
            object.__setattr__(self, "context", ContextPrefix(tuple(self.context)))
        if self.anchor_time < 0:
            raise ValueError("anchor time must be nonnegative")
        if self.anchor_params.n != self.anchor_time:
            raise ValueError(
                f"anchor at t={self.anchor_time} needs {self.anchor_time + 1} "
                f"parameters, got {len(self.anchor_params)}"
            )

    @classmethod
    def initial(cls, alpha: Sequence, context: ContextPrefix | Sequence[int] = ()) -> FiltrationState:
        params = DirichletParams(tuple(alpha))
        return cls(params.n, params, context)

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "t": self.anchor_time,
            "alpha": [_number_to_json(a) for a in self.anchor_params],
            "context_digits": list(self.context.digits),
        }

    @classmethod
    def from_json(cls, doc: dict) -> FiltrationState:
        if doc.get("schema") != SCHEMA_VERSION:
            raise ValueError(f"unsupported filtration schema {doc.get('schema')!r}")
        params = DirichletParams(tuple(as_fraction(a) for a in doc["alpha"]))
        return cls(int(doc["t"]), params, ContextPrefix(tuple(doc["context_digits"])))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def loads(cls, text: str) -> FiltrationState:
        return cls.from_json(json.loads(text))


def _number_to_json(x: Fraction):
    # integers and dyadic rationals round-trip through JSON numbers
    if x.denominator == 1:
        return x.numerator
    if Fraction(float(x)) == x:
        return float(x)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class ObservationEvent:
    time: int
    category: int

    def __post_init__(self):
        if self.time < 0 or not 0 <= self.category <= self.time:
            raise ValueError(f"category {self.category} is not in [{self.time}]")


@dataclass(frozen=True)
class FutureConstraint:
    """The admissible parameters at ``time`` given the anchor.

    ``fixed_entries`` maps positions to inherited values; the two positions
    in ``split_slot`` are free except that they sum to ``pinned_sum``. Any
    such completion maps back onto the anchor under the face ``face_index``.
    """

    time: int
    face_index: int
    fixed_entries: tuple[tuple[int, Fraction], ...]
    split_slot: tuple[int, int]
    pinned_sum: Fraction

    def fixed(self) -> dict[int, Fraction]:
        return dict(self.fixed_entries)


SplitPolicy = Callable[[FutureConstraint], Union[float, Fraction]]


def uniform_split(rng: np.random.Generator) -> SplitPolicy:
    """A completion policy drawing the split fraction uniformly from [0, 1]."""
    return lambda constraint: float(rng.random())


def state_at(
    state: FiltrationState, s: int, context: ContextPrefix | None = None
) -> DirichletParams:
    """Parameters at an earlier time ``s`` along the context's faces.

    ``context`` picks a different representative of the anchor's context
    class; it must agree with the stored context from position t+1 on, but
    its digits at positions s+1..t select the faces used.
    """
    t = state.anchor_time
    if s < 0:
        raise ValueError("time must be nonnegative")
    if s > t:
        raise ValueError(
            f"time {s} is after the anchor {t}; futures are constrained, not determined"
        )
    if context is None:
        context = state.context
    elif not context.agrees_from(state.context, t + 1):
        raise ValueError("representative context is not equivalent to the anchor's context")
    params = state.anchor_params
    for u in range(t, s, -1):
        params = params_face(params, context_face_index(context, u))
    return params


def next_constraint(state: FiltrationState) -> FutureConstraint:
    t = state.anchor_time
    alpha = state.anchor_params.alpha
    k = context_face_index(state.context, t + 1)
    if k > 0:
        split = (k - 1, k)
        pinned = alpha[k - 1]
        fixed = [(m, alpha[m]) for m in range(k - 1)]
        fixed += [(m, alpha[m - 1]) for m in range(k + 1, t + 2)]
    else:
        # the 0th face folds the first entry into the last slot
        split = (0, t + 1)
        pinned = alpha[t]
        fixed = [(m, alpha[m - 1]) for m in range(1, t + 1)]
    return FutureConstraint(t + 1, k, tuple(fixed), split, pinned)


def complete_future(constraint: FutureConstraint, split_fraction) -> DirichletParams:
    """Fill the split slot with (f * p, (1 - f) * p) for fraction ``f``."""
    f = as_fraction(split_fraction)
    if not 0 <= f <= 1:
        raise ValueError(f"split fraction {split_fraction} is outside [0, 1]")
    beta = [Fraction(0)] * (constraint.time + 1)
    for m, value in constraint.fixed_entries:
        beta[m] = value
    a, b = constraint.split_slot
    beta[a] = f * constraint.pinned_sum
    beta[b] = (1 - f) * constraint.pinned_sum
    return DirichletParams(tuple(beta))


def bayes_update(state: FiltrationState, obs: ObservationEvent | int) -> FiltrationState:
    """Conjugate update: add one to the observed category at the anchor."""
    if isinstance(obs, int):
        obs = ObservationEvent(state.anchor_time, obs)
    if obs.time != state.anchor_time:
        raise ValueError(
            f"observation at time {obs.time} but the anchor is at {state.anchor_time}; "
            "advance the state first"
        )
    alpha = list(state.anchor_params.alpha)
    alpha[obs.category] += 1
    return replace(state, anchor_params=DirichletParams(tuple(alpha)))


def observe_counts(state: FiltrationState, counts: Sequence[int]) -> FiltrationState:
    """Apply ``counts[k]`` observations of each category ``k``."""
    if len(counts) != state.anchor_time + 1:
        raise ValueError("count vector length does not match the anchor dimension")
    for k, r in enumerate(counts):
        if r < 0:
            raise ValueError("counts must be nonnegative")
        for _ in range(r):
            state = bayes_update(state, ObservationEvent(state.anchor_time, k))
    return state


def advance(
    state: FiltrationState, split: float | Fraction | SplitPolicy = Fraction(1, 2)
) -> FiltrationState:
    """Move the anchor one step forward, choosing a point of the future constraint.

    ``split`` is either the split fraction itself or a policy called with the
    constraint that returns one.
    """
    constraint = next_constraint(state)
    fraction = split(constraint) if callable(split) else split
    return FiltrationState(constraint.time, complete_future(constraint, fraction), state.context)


def draw_categories(q, trials: int, rng: np.random.Generator) -> np.ndarray:
    """Categorical draws from probability vector ``q``."""
    q = np.asarray(q, dtype=float)
    return rng.choice(len(q), size=trials, p=q / q.sum())


def simulate_observation(
    state: FiltrationState, trials: int, rng: np.random.Generator
) -> list[ObservationEvent]:
    """Draw q from the anchor's Dirichlet, then ``trials`` outcomes from q."""
    if trials < 1:
        raise ValueError("trials must be positive")
    q = sample(state.anchor_params, rng)
    t = state.anchor_time
    return [ObservationEvent(t, int(k)) for k in draw_categories(q.weights, trials, rng)]


def posterior_means(state: FiltrationState) -> tuple[Fraction, ...]:
    return induced_measure_moments(state.anchor_params).mean


def replay(state: FiltrationState, events: Iterable[ObservationEvent]) -> FiltrationState:
    for event in events:
        state = bayes_update(state, event)
    return state
