"""The simplex category: finite ordinals [n] and order-preserving maps.

Morphisms are stored as image vectors. Generator words (faces and
degeneracies) are a derived normal form produced by :func:`factorize`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Iterator, Sequence, Union

__all__ = [
    "CompositionError",
    "Ordinal",
    "OrderPreservingMap",
    "Face",
    "Degeneracy",
    "GeneratorWord",
    "identity",
    "face_generator",
    "degeneracy_generator",
    "compose",
    "factorize",
    "recompose",
    "enumerate_maps",
    "check_simplicial_identities",
]


class CompositionError(ValueError):
    """Raised when two morphisms (or generators in a word) do not compose."""


@dataclass(frozen=True)
class Ordinal:
    """The object [n] = {0, ..., n}."""

    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"ordinal must be nonnegative, got {self.n}")

    def __iter__(self) -> Iterator[int]:
        return iter(range(self.n + 1))

    def __len__(self) -> int:
        return self.n + 1


_MAP_PATTERN = re.compile(r"^\s*(\d+)\s*->\s*(\d+)\s*:\s*\[([^\]]*)\]\s*$")


@dataclass(frozen=True)
class OrderPreservingMap:
    """A weakly increasing map [source_n] -> [target_n].

    >>> f = OrderPreservingMap(3, 2, (0, 1, 1, 2))
    >>> str(f)
    '3->2:[0,1,1,2]'
    """

    source_n: int
    target_n: int
    image: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "image", tuple(int(v) for v in self.image))
        if self.source_n < 0 or self.target_n < 0:
            raise ValueError("ordinals must be nonnegative")
        if len(self.image) != self.source_n + 1:
            raise ValueError(
                f"image has length {len(self.image)}, expected {self.source_n + 1}"
            )
        for k, v in enumerate(self.image):
            if not 0 <= v <= self.target_n:
                raise ValueError(f"image[{k}] = {v} is outside [{self.target_n}]")
        for a, b in zip(self.image, self.image[1:]):
            if a > b:
                raise ValueError(f"image {self.image} is not weakly increasing")

    def __call__(self, k: int) -> int:
        return self.image[k]

    def __str__(self) -> str:
        body = ",".join(str(v) for v in self.image)
        return f"{self.source_n}->{self.target_n}:[{body}]"

    @classmethod
    def parse(cls, text: str) -> OrderPreservingMap:
        """Read the ``"n->m:[a0,a1,...]"`` serialization."""
        match = _MAP_PATTERN.match(text)
        if match is None:
            raise ValueError(f"cannot parse map {text!r}; expected 'n->m:[a0,...]'")
        n, m, body = match.groups()
        image = tuple(int(tok) for tok in body.split(",") if tok.strip())
        return cls(int(n), int(m), image)

    @property
    def is_identity(self) -> bool:
        return self.source_n == self.target_n and self.image == tuple(
            range(self.source_n + 1)
        )

    @property
    def is_injective(self) -> bool:
        return len(set(self.image)) == len(self.image)

    @property
    def is_surjective(self) -> bool:
        return len(set(self.image)) == self.target_n + 1


@dataclass(frozen=True)
class Face:
    """The coface generator delta^n_i : [n-1] -> [n]."""

    n: int
    i: int

    def __post_init__(self):
        if self.n < 1 or not 0 <= self.i <= self.n:
            raise ValueError(f"no face generator delta^{self.n}_{self.i}")

    @property
    def source_n(self) -> int:
        return self.n - 1

    @property
    def target_n(self) -> int:
        return self.n

    def to_map(self) -> OrderPreservingMap:
        return face_generator(self.n, self.i)


@dataclass(frozen=True)
class Degeneracy:
    """The codegeneracy generator sigma^n_j : [n+1] -> [n]."""

    n: int
    j: int

    def __post_init__(self):
        if self.n < 0 or not 0 <= self.j <= self.n:
            raise ValueError(f"no degeneracy generator sigma^{self.n}_{self.j}")

    @property
    def source_n(self) -> int:
        return self.n + 1

    @property
    def target_n(self) -> int:
        return self.n

    def to_map(self) -> OrderPreservingMap:
        return degeneracy_generator(self.n, self.j)


Generator = Union[Face, Degeneracy]


@dataclass(frozen=True)
class GeneratorWord:
    """A composable sequence of generators listed in application order.

    ``generators[0]`` is applied first, so the word
    ``[Degeneracy(2, 2), Degeneracy(1, 0), Face(2, 1)]`` denotes the
    composite delta^2_1 . sigma^1_0 . sigma^2_2. The endpoints are stored
    explicitly so that the empty word still names an identity.
    """

    source_n: int
    target_n: int
    generators: tuple[Generator, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        current = self.source_n
        for g in self.generators:
            if g.source_n != current:
                raise CompositionError(
                    f"generator {g} has source [{g.source_n}], expected [{current}]"
                )
            current = g.target_n
        if current != self.target_n:
            raise CompositionError(
                f"word ends at [{current}], declared target [{self.target_n}]"
            )

    @classmethod
    def of(cls, generators: Sequence[Generator]) -> GeneratorWord:
        """Build a non-empty word, reading its endpoints off the generators."""
        if not generators:
            raise ValueError("use GeneratorWord(n, n) for an empty word")
        return cls(generators[0].source_n, generators[-1].target_n, tuple(generators))

    def __len__(self) -> int:
        return len(self.generators)

    def __iter__(self) -> Iterator[Generator]:
        return iter(self.generators)

    def __str__(self) -> str:
        if not self.generators:
            return f"1_[{self.source_n}]"
        parts = []
        for g in reversed(self.generators):
            sym = "d" if isinstance(g, Face) else "s"
            idx = g.i if isinstance(g, Face) else g.j
            parts.append(f"{sym}^{g.n}_{idx}")
        return " . ".join(parts)


def identity(n: int) -> OrderPreservingMap:
    return OrderPreservingMap(n, n, tuple(range(n + 1)))


def face_generator(n: int, i: int) -> OrderPreservingMap:
    """delta^n_i : [n-1] -> [n], the injection that misses ``i``."""
    if n < 1 or not 0 <= i <= n:
        raise ValueError(f"face index out of range: n={n}, i={i}")
    return OrderPreservingMap(n - 1, n, tuple(k if k < i else k + 1 for k in range(n)))


def degeneracy_generator(n: int, j: int) -> OrderPreservingMap:
    """sigma^n_j : [n+1] -> [n], the surjection hitting ``j`` twice."""
    if n < 0 or not 0 <= j <= n:
        raise ValueError(f"degeneracy index out of range: n={n}, j={j}")
    return OrderPreservingMap(
        n + 1, n, tuple(k if k <= j else k - 1 for k in range(n + 2))
    )


def compose(g: OrderPreservingMap, f: OrderPreservingMap) -> OrderPreservingMap:
    """Return ``g . f`` (apply ``f`` first)."""
    if f.target_n != g.source_n:
        raise CompositionError(
            f"cannot compose {g} after {f}: [{f.target_n}] != [{g.source_n}]"
        )
    return OrderPreservingMap(f.source_n, g.target_n, tuple(g.image[v] for v in f.image))


def factorize(f: OrderPreservingMap) -> GeneratorWord:
    """Epi-mono normal form of ``f`` as a generator word.

    Degeneracies come first with decreasing index, then faces with
    increasing index.
    """
    word: list[Generator] = []

    # surjective part: collapse the largest repeated position first
    current = list(f.image)
    while True:
        repeats = [k for k in range(len(current) - 1) if current[k] == current[k + 1]]
        if not repeats:
            break
        j = repeats[-1]
        word.append(Degeneracy(len(current) - 2, j))
        del current[j + 1]

    # injective part: the values missed by f, smallest first
    size = len(current) - 1
    for i in sorted(set(range(f.target_n + 1)) - set(current)):
        size += 1
        word.append(Face(size, i))

    return GeneratorWord(f.source_n, f.target_n, tuple(word))


def recompose(word: GeneratorWord) -> OrderPreservingMap:
    result = identity(word.source_n)
    for g in word:
        result = compose(g.to_map(), result)
    return result


def enumerate_maps(source_n: int, target_n: int) -> Iterator[OrderPreservingMap]:
    """Every order-preserving map [source_n] -> [target_n]."""
    for image in combinations_with_replacement(range(target_n + 1), source_n + 1):
        yield OrderPreservingMap(source_n, target_n, image)


def check_simplicial_identities(max_n: int = 6) -> dict:
    """Exhaustively check the cosimplicial identities for n <= max_n.

    Returns a report with per-family case counts and any counterexamples.
    """
    d, s = face_generator, degeneracy_generator
    families: dict[str, dict] = {}

    cases, failures = 0, []
    for n in range(2, max_n + 1):
        for j in range(n + 1):
            for i in range(j):
                cases += 1
                if compose(d(n, j), d(n - 1, i)) != compose(d(n, i), d(n - 1, j - 1)):
                    failures.append({"n": n, "i": i, "j": j})
    families["face_face"] = {"cases": cases, "failures": failures}

    cases, failures = 0, []
    for n in range(1, max_n + 1):
        for j in range(n):
            for i in range(j + 1):
                cases += 1
                if compose(s(n - 1, j), s(n, i)) != compose(s(n - 1, i), s(n, j + 1)):
                    failures.append({"n": n, "i": i, "j": j})
    families["degeneracy_degeneracy"] = {"cases": cases, "failures": failures}

    cases, failures = 0, []
    for n in range(0, max_n + 1):
        for j in range(n + 1):
            for i in range(n + 2):
                cases += 1
                lhs = compose(s(n, j), d(n + 1, i))
                if i < j:
                    rhs = compose(d(n, i), s(n - 1, j - 1))
                elif i in (j, j + 1):
                    rhs = identity(n)
                else:
                    rhs = compose(d(n, i - 1), s(n - 1, j))
                if lhs != rhs:
                    failures.append({"n": n, "i": i, "j": j})
    families["degeneracy_face"] = {"cases": cases, "failures": failures}

    return {
        "level": "morphism",
        "max_n": max_n,
        "families": families,
        "passed": all(not fam["failures"] for fam in families.values()),
    }
