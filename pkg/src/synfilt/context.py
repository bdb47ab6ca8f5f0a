"""Contexts, times-in-context and the factorial-base (Cantor) encoding.

A context is a digit sequence ``c_1, c_2, ...`` with ``0 <= c_k <= k``. Only
finitely supported contexts are representable; they correspond exactly to
rationals in [0, 1) via ``r = sum c_k / (k+1)!``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Callable, Iterable, Iterator

from .simplex import OrderPreservingMap, enumerate_maps

__all__ = [
    "ContextPrefix",
    "TimeInContext",
    "cantor_digits",
    "cantor_expand",
    "cantor_value",
    "parse_rational",
    "time_in_context",
    "context_face_index",
    "truncate_context",
    "sigma_hom",
]


@dataclass(frozen=True)
class ContextPrefix:
    """Finite context; digit ``c_k`` (1-based) is stored at ``digits[k-1]``.

    Trailing zeros are trimmed so equal contexts compare equal.
    """

    digits: tuple[int, ...] = ()

    def __post_init__(self):
        digits = [int(c) for c in self.digits]
        for k, c in enumerate(digits, start=1):
            if not 0 <= c <= k:
                raise ValueError(f"digit c_{k} = {c} violates 0 <= c_k <= {k}")
        while digits and digits[-1] == 0:
            digits.pop()
        object.__setattr__(self, "digits", tuple(digits))

    def __getitem__(self, k: int) -> int:
        """Digit ``c_k``; zero beyond the stored prefix."""
        if k < 1:
            raise IndexError("context digits are indexed from 1")
        return self.digits[k - 1] if k <= len(self.digits) else 0

    def __len__(self) -> int:
        return len(self.digits)

    def __str__(self) -> str:
        return ",".join(str(c) for c in self.digits)

    @classmethod
    def parse(cls, text: str) -> ContextPrefix:
        text = text.strip()
        if not text:
            return cls(())
        return cls(tuple(int(tok) for tok in text.split(",")))

    def tail(self, start: int) -> tuple[int, ...]:
        """Digits ``c_start, c_{start+1}, ...`` (trimmed)."""
        return self.digits[start - 1 :] if start >= 1 else self.digits

    def agrees_from(self, other: ContextPrefix, start: int) -> bool:
        """The relation ``c ~_start d``: all digits at positions >= start agree."""
        return self.tail(start) == other.tail(start)

    def with_digit(self, k: int, value: int) -> ContextPrefix:
        digits = list(self.digits) + [0] * max(0, k - len(self.digits))
        digits[k - 1] = value
        return ContextPrefix(tuple(digits))


def parse_rational(text: str) -> Fraction:
    """Parse ``"m/n"`` (or an integer) exactly; floats are rejected."""
    text = text.strip()
    if "." in text or "e" in text.lower():
        raise ValueError(f"expected an exact rational m/n, got {text!r}")
    return Fraction(text)


def cantor_digits(r: Fraction) -> Iterator[int]:
    """Yield the factorial-base digits of ``r`` one at a time.

    Runs the expansion loop with exact rationals and stops when the
    remainder hits zero. For ``r = m/n`` that happens after fewer than
    ``n`` digits.
    """
    r = Fraction(r)
    if not 0 <= r < 1:
        raise ValueError(f"r = {r} is outside [0, 1)")
    k = 0
    while r != 0:
        k += 1
        scaled = (k + 1) * r
        c = scaled.numerator // scaled.denominator
        yield c
        r = scaled - c


def cantor_expand(r) -> ContextPrefix:
    """Finite Cantor expansion of a rational in [0, 1).

    >>> cantor_expand(Fraction(1, 9)).digits
    (0, 0, 2, 3, 2)
    """
    if isinstance(r, float):
        raise TypeError("cantor_expand needs an exact rational, not a float")
    return ContextPrefix(tuple(cantor_digits(Fraction(r))))


def cantor_value(c: ContextPrefix | Iterable[int]) -> Fraction:
    if not isinstance(c, ContextPrefix):
        c = ContextPrefix(tuple(c))
    return sum(
        (Fraction(ck, factorial(k + 1)) for k, ck in enumerate(c.digits, start=1)),
        Fraction(0),
    )


def truncate_context(rule: Callable[[int], int], length: int) -> ContextPrefix:
    """First ``length`` digits of a context given by a digit rule ``k -> c_k``.

    This is how irrational contexts are approximated, e.g.
    ``truncate_context(lambda k: 1, 10)`` for the expansion of e - 2.
    """
    if length < 0:
        raise ValueError("length must be nonnegative")
    return ContextPrefix(tuple(rule(k) for k in range(1, length + 1)))


class TimeInContext:
    """A time ``t`` together with the class of its context under ``~_{t+1}``.

    Only the digits after position ``t`` matter: the context is kept by
    reference and equality compares suffixes. Time zero carries no context
    information at all.
    """

    __slots__ = ("t", "context")

    def __init__(self, t: int, context: ContextPrefix):
        if t < 0:
            raise ValueError(f"time must be nonnegative, got {t}")
        self.t = t
        self.context = context

    @property
    def tail(self) -> tuple[int, ...]:
        if self.t == 0:
            return ()
        return self.context.tail(self.t + 1)

    def __eq__(self, other):
        if not isinstance(other, TimeInContext):
            return NotImplemented
        return self.t == other.t and self.tail == other.tail

    def __hash__(self):
        return hash((self.t, self.tail))

    def __repr__(self):
        return f"TimeInContext(t={self.t}, tail={self.tail})"

    def face_index(self) -> int:
        """Index selecting the arrow [t-1]_c -> [t]_c."""
        return context_face_index(self.context, self.t)


def time_in_context(t: int, c: ContextPrefix) -> TimeInContext:
    return TimeInContext(t, c)


def context_face_index(c: ContextPrefix, t: int) -> int:
    """The digit ``c_t``, i.e. which face generator enters [t] from [t-1]."""
    if t < 1:
        raise ValueError(f"face index needs t >= 1, got {t}")
    return c[t]


def sigma_hom(a: TimeInContext, b: TimeInContext) -> list[OrderPreservingMap]:
    """Arrows ``a -> b`` in the time category.

    Two times-in-context are connected when a single context represents
    both; the arrows are then those of the underlying ordinals. Objects with
    no common representative have no arrows between them.
    """
    start = max(a.t, b.t) + 1
    ta = a.context.tail(start) if a.t > 0 else None
    tb = b.context.tail(start) if b.t > 0 else None
    if ta is not None and tb is not None and ta != tb:
        return []
    return list(enumerate_maps(a.t, b.t))
