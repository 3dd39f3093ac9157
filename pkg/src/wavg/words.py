"""Ultimately periodic reward words (lassos): finite prefix + repeated cycle."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .errors import SequenceFormatError
from .sequences import as_rational, parse_rational


@dataclass(frozen=True)
class LassoWord:
    """An infinite reward word given by a finite prefix and a nonempty cycle."""

    prefix: tuple[Fraction, ...]
    cycle: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(as_rational(x) for x in self.prefix))
        object.__setattr__(self, "cycle", tuple(as_rational(x) for x in self.cycle))
        if not self.cycle:
            raise SequenceFormatError("lasso cycle must be nonempty")

    @property
    def prefix_len(self) -> int:
        return len(self.prefix)

    @property
    def cycle_len(self) -> int:
        return len(self.cycle)

    def symbol(self, i: int) -> Fraction:
        """The reward at position i."""
        if i < len(self.prefix):
            return self.prefix[i]
        return self.cycle[(i - len(self.prefix)) % len(self.cycle)]

    def symbols(self) -> Iterator[Fraction]:
        yield from self.prefix
        while True:
            yield from self.cycle


def lasso(prefix=(), cycle=()) -> LassoWord:
    """Convenience constructor accepting ints/strings."""
    return LassoWord(tuple(prefix), tuple(cycle))


def normalize_lasso(word: LassoWord) -> LassoWord:
    """Canonical form of the infinite word: primitive cycle, minimal prefix.

    Two lassos denote the same infinite reward word exactly when their
    normal forms are equal.
    """
    cycle = list(word.cycle)
    k = len(cycle)
    for d in range(1, k + 1):
        if k % d == 0 and cycle == cycle[:d] * (k // d):
            cycle = cycle[:d]
            break
    prefix = list(word.prefix)
    while prefix and prefix[-1] == cycle[-1]:
        cycle.insert(0, cycle.pop())
        prefix.pop()
    return LassoWord(tuple(prefix), tuple(cycle))


def parse_lasso(text: str) -> LassoWord:
    """Parse 'prefix=r0,r1,...;cycle=s0,s1,...' (prefix part optional)."""
    prefix: tuple[Fraction, ...] = ()
    cycle: tuple[Fraction, ...] | None = None
    for part in text.split(";"):
        key, eq, value = part.partition("=")
        if not eq:
            raise SequenceFormatError(f"malformed lasso component {part!r}")
        items = tuple(parse_rational(tok) for tok in value.split(",")) if value else ()
        if key == "prefix":
            prefix = items
        elif key == "cycle":
            cycle = items
        else:
            raise SequenceFormatError(f"unrecognized lasso component {key!r}")
    if cycle is None:
        raise SequenceFormatError("lasso spec requires cycle=...")
    return LassoWord(prefix, cycle)


def format_lasso(word: LassoWord) -> str:
    cycle = "cycle=" + ",".join(str(c) for c in word.cycle)
    if word.prefix:
        return "prefix=" + ",".join(str(c) for c in word.prefix) + ";" + cycle
    return cycle
