"""Exact coefficient sequences for weighted-average payoffs.

A sequence is stored in block-geometric form: an explicit finite prefix
c_0 .. c_{m-1} followed by a base block b_0 .. b_{p-1} whose values are
rescaled by a fixed nonnegative ratio on every repetition, so that
c_{m+j+t*p} = b_j * ratio**t.  The form covers geometric sequences
(block length 1), eventually periodic sequences (ratio 1) and mixtures
of both, and keeps every partial sum computable in closed form.

Arbitrary finite tables go through :class:`RawCoeffTable` and only
support approximate (bracketing) evaluation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Optional, Union

from .errors import SequenceAdmissionError, SequenceFormatError

RatLike = Union[Fraction, int, str]

_RATIONAL_RE = re.compile(r"^[+-]?\d+(?:/\d+)?$")


def parse_rational(token: str) -> Fraction:
    """Parse a rational literal: 'p/q' or an integer, no whitespace."""
    if not _RATIONAL_RE.match(token):
        raise SequenceFormatError(f"malformed rational {token!r}")
    value = Fraction(token)
    return value


def as_rational(x: RatLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise SequenceFormatError(f"cannot interpret {x!r} as a rational")


def _rat_str(x: Fraction) -> str:
    return str(x)


@dataclass(frozen=True)
class CoeffSeq:
    """A coefficient sequence in block-geometric normal form.

    ``prefix`` holds the explicit initial coefficients, ``block`` the base
    block values and ``ratio`` the per-repetition scale factor (mu >= 0).
    An all-zero block is pinned to ratio 0 since the tail is identically
    zero whatever the ratio.
    """

    prefix: tuple[Fraction, ...] = ()
    block: tuple[Fraction, ...] = (Fraction(1),)
    ratio: Fraction = Fraction(1)

    def __post_init__(self):
        prefix = tuple(as_rational(x) for x in self.prefix)
        block = tuple(as_rational(x) for x in self.block)
        ratio = as_rational(self.ratio)
        if not block:
            raise SequenceFormatError("block must be nonempty")
        if ratio < 0:
            raise SequenceFormatError(
                "block ratio must be nonnegative (sign-alternating ratios are not supported)")
        if all(b == 0 for b in block):
            ratio = Fraction(0)
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "block", block)
        object.__setattr__(self, "ratio", ratio)
        if self.term(0) == 0:
            raise SequenceFormatError("first coefficient must be nonzero")

    @property
    def prefix_len(self) -> int:
        return len(self.prefix)

    @property
    def period(self) -> int:
        return len(self.block)

    def term(self, i: int) -> Fraction:
        """The coefficient c_i."""
        if i < 0:
            raise ValueError("coefficient index must be nonnegative")
        if i < len(self.prefix):
            return self.prefix[i]
        t, j = divmod(i - len(self.prefix), len(self.block))
        return self.block[j] * self.ratio ** t

    def terms(self) -> Iterator[Fraction]:
        """Iterate c_0, c_1, ... with O(1) work per term."""
        yield from self.prefix
        scale = Fraction(1)
        while True:
            for b in self.block:
                yield b * scale
            scale *= self.ratio


@dataclass(frozen=True)
class RawCoeffTable:
    """A finite explicit coefficient table c_0 .. c_N (approximate use only)."""

    values: tuple[Fraction, ...]

    def __post_init__(self):
        values = tuple(as_rational(x) for x in self.values)
        object.__setattr__(self, "values", values)
        if not values:
            raise SequenceFormatError("table must be nonempty")
        if values[0] == 0:
            raise SequenceFormatError("first coefficient must be nonzero")
        running = Fraction(0)
        for n, c in enumerate(values, start=1):
            running += c
            if running == 0:
                raise SequenceAdmissionError(
                    f"partial sum d_{n} is zero", violation_index=n)

    @property
    def horizon(self) -> int:
        return len(self.values) - 1


class Classification(Enum):
    CONVERGENT = "convergent"
    DIVERGENT_BOUNDED = "divergent-bounded"
    DIVERGENT_UNBOUNDED = "divergent-unbounded"


@dataclass(frozen=True)
class SeqAnalysis:
    """Analytic facts about an admitted sequence.

    ``series_sum`` is the total of the series when it converges;
    ``even_sum``/``odd_sum`` split it over even/odd indices.
    ``inv_psum_liminf``/``inv_psum_limsup`` are the liminf/limsup of the
    reciprocals of the partial sums (exact whenever the block form pins
    them down).  ``bound`` witnesses |c_n| <= bound in the
    divergent-bounded case.
    """

    classification: Classification
    series_sum: Optional[Fraction] = None
    even_sum: Optional[Fraction] = None
    odd_sum: Optional[Fraction] = None
    inv_psum_liminf: Optional[Fraction] = None
    inv_psum_limsup: Optional[Fraction] = None
    bound: Optional[Fraction] = None


def partial_sum(seq: CoeffSeq, n: int) -> Fraction:
    """The partial sum d_n = c_0 + ... + c_{n-1}, in closed form.

    Costs O(period + log n) arithmetic operations, not O(n).
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    m, p, mu = seq.prefix_len, seq.period, seq.ratio
    if n <= m:
        return sum(seq.prefix[:n], Fraction(0))
    head = sum(seq.prefix, Fraction(0))
    t, j = divmod(n - m, p)
    block_sum = sum(seq.block, Fraction(0))
    partial_block = sum(seq.block[:j], Fraction(0))
    if mu == 1:
        return head + block_sum * t + partial_block
    mu_t = mu ** t
    return head + block_sum * (1 - mu_t) / (1 - mu) + mu_t * partial_block


def _exact_log(x: int, base: int) -> Optional[int]:
    """The t with base**t == x, if any (base >= 2, x >= 1)."""
    t, acc = 0, 1
    while acc < x:
        acc *= base
        t += 1
    return t if acc == x else None


def _power_index(mu: Fraction, r: Fraction) -> Optional[int]:
    """The t >= 0 with mu**t == r, for mu > 0, mu != 1, r > 0."""
    a, b = mu.numerator, mu.denominator
    u, v = r.numerator, r.denominator
    if a == 1:
        return _exact_log(v, b) if u == 1 else None
    if b == 1:
        return _exact_log(u, a) if v == 1 else None
    t1 = _exact_log(u, a)
    return t1 if t1 is not None and t1 == _exact_log(v, b) else None


def first_zero_partial_sum(seq: CoeffSeq) -> Optional[int]:
    """The least n >= 1 with d_n == 0, or None if every partial sum is nonzero.

    The decision is analytic: indices up to prefix+block are checked
    directly; beyond them, d_{m+t*p+j} = 0 is solved for real t per
    residue class j using the closed form, and solutions are kept only
    when t is a nonnegative integer.  This makes admission a proof, not
    a sampling heuristic.
    """
    m, p, mu = seq.prefix_len, seq.period, seq.ratio
    for n in range(1, m + p + 1):
        if partial_sum(seq, n) == 0:
            return n
    if mu == 0:
        return None  # tail constant, equal to d_{m+p}, checked above
    head = sum(seq.prefix, Fraction(0))
    block_sum = sum(seq.block, Fraction(0))
    candidates = []
    if mu == 1:
        for j in range(p):
            base = head + sum(seq.block[:j], Fraction(0))
            if block_sum == 0:
                if base == 0:
                    candidates.append(m + p + j)
            else:
                t = -base / block_sum
                if t.denominator == 1 and t >= 1:
                    candidates.append(m + int(t) * p + j)
    else:
        shifted = block_sum / (1 - mu)
        limit = head + shifted
        for j in range(p):
            deviation = sum(seq.block[:j], Fraction(0)) - shifted
            if deviation == 0:
                if limit == 0:
                    candidates.append(m + p + j)
                continue
            r = -limit / deviation
            if r <= 0:
                continue
            t = _power_index(mu, r)
            if t is not None and t >= 1:
                candidates.append(m + t * p + j)
    return min(candidates) if candidates else None


def admit(seq: CoeffSeq) -> None:
    """Raise SequenceAdmissionError unless the sequence is usable for payoffs."""
    n = first_zero_partial_sum(seq)
    if n is not None:
        raise SequenceAdmissionError(
            f"partial sum d_{n} is zero", violation_index=n)
    if seq.ratio == 1 and sum(seq.block, Fraction(0)) == 0:
        raise SequenceAdmissionError(
            "periodic block sums to zero: partial sums stay bounded and the "
            "ratio-limit machinery does not apply")


@lru_cache(maxsize=None)
def analyze(seq: CoeffSeq) -> SeqAnalysis:
    """Classify the sequence and compute its exact analytic summary."""
    admit(seq)
    m, p, mu = seq.prefix_len, seq.period, seq.ratio
    head = sum(seq.prefix, Fraction(0))
    block_sum = sum(seq.block, Fraction(0))
    if mu < 1:
        total = head + block_sum / (1 - mu)
        # Even/odd split via the alternating series: each tail term lands at
        # index m+j+t*p, whose parity flips with t exactly when p is odd.
        sign = -1 if p % 2 else 1
        alternating = sum(
            (c if i % 2 == 0 else -c) for i, c in enumerate(seq.prefix))
        alternating += sum(
            (b if (m + j) % 2 == 0 else -b) for j, b in enumerate(seq.block)
        ) / (1 - sign * mu)
        even = (total + alternating) / 2
        odd = (total - alternating) / 2
        inv = 1 / total if total != 0 else None
        return SeqAnalysis(Classification.CONVERGENT, series_sum=total,
                           even_sum=even, odd_sum=odd,
                           inv_psum_liminf=inv, inv_psum_limsup=inv)
    if mu == 1:
        bound = max(abs(c) for c in seq.prefix + seq.block)
        return SeqAnalysis(Classification.DIVERGENT_BOUNDED,
                           inv_psum_liminf=Fraction(0),
                           inv_psum_limsup=Fraction(0), bound=bound)
    # mu > 1: along residue class j the partial sums are C + D_j * mu**t, so
    # 1/d_n accumulates at 0 (D_j != 0) or at 1/C (D_j == 0).
    shifted = block_sum / (1 - mu)
    limit_const = head + shifted
    points = []
    for j in range(p):
        deviation = sum(seq.block[:j], Fraction(0)) - shifted
        points.append(Fraction(0) if deviation != 0 else 1 / limit_const)
    return SeqAnalysis(Classification.DIVERGENT_UNBOUNDED,
                       inv_psum_liminf=min(points),
                       inv_psum_limsup=max(points))


def geometric_ratio(seq: CoeffSeq) -> Optional[Fraction]:
    """The ratio lam with c_{i+1} = lam * c_i for every i, if one exists.

    Decided over the normal form: explicit checks through the prefix and
    one full block, plus the block-wrap condition, cover all indices.
    """
    lam = seq.term(1) / seq.term(0)
    for i in range(seq.prefix_len):
        if seq.term(i + 1) != lam * seq.term(i):
            return None
    for j in range(seq.period - 1):
        if seq.block[j + 1] != lam * seq.block[j]:
            return None
    if seq.block[0] * seq.ratio != lam * seq.block[-1]:
        return None
    return lam


def mean_sequence() -> CoeffSeq:
    """The all-ones sequence (plain averaging)."""
    return CoeffSeq((), (Fraction(1),), Fraction(1))


def geometric(lam: RatLike) -> CoeffSeq:
    """The sequence c_i = lam**i, for any lam > 0."""
    lam = as_rational(lam)
    if lam <= 0:
        raise SequenceFormatError("geometric ratio must be positive")
    return CoeffSeq((), (Fraction(1),), lam)


def discounted(lam: RatLike) -> CoeffSeq:
    """The sequence c_i = lam**i with 0 < lam < 1."""
    lam = as_rational(lam)
    if not 0 < lam < 1:
        raise SequenceFormatError("discount factor must lie strictly between 0 and 1")
    return CoeffSeq((), (Fraction(1),), lam)


def _parse_csv(text: str) -> tuple[Fraction, ...]:
    if not text:
        raise SequenceFormatError("empty value list")
    return tuple(parse_rational(tok) for tok in text.split(","))


def parse_sequence(text: str) -> Union[CoeffSeq, RawCoeffTable]:
    """Parse a sequence spec string.

    Grammar:
        mean
        disc:<rat>                       0 < rat < 1
        geom:<rat>                       rat > 0
        blocks:<r0,r1,...>;mu=<rat>[;prefix=<r0,...>]
        table:<r0,r1,...>
    """
    if text == "mean":
        return mean_sequence()
    head, sep, rest = text.partition(":")
    if not sep:
        raise SequenceFormatError(f"unrecognized sequence spec {text!r}")
    if head == "disc":
        return discounted(parse_rational(rest))
    if head == "geom":
        return geometric(parse_rational(rest))
    if head == "table":
        return RawCoeffTable(_parse_csv(rest))
    if head == "blocks":
        parts = rest.split(";")
        block = _parse_csv(parts[0])
        mu: Optional[Fraction] = None
        prefix: tuple[Fraction, ...] = ()
        for extra in parts[1:]:
            key, eq, value = extra.partition("=")
            if key == "mu" and eq:
                mu = parse_rational(value)
            elif key == "prefix" and eq:
                prefix = _parse_csv(value)
            else:
                raise SequenceFormatError(f"unrecognized blocks option {extra!r}")
        if mu is None:
            raise SequenceFormatError("blocks spec requires ;mu=<rat>")
        return CoeffSeq(prefix, block, mu)
    raise SequenceFormatError(f"unrecognized sequence spec {text!r}")


def format_sequence(seq: Union[CoeffSeq, RawCoeffTable]) -> str:
    """Render a sequence as a spec string accepted by parse_sequence."""
    if isinstance(seq, RawCoeffTable):
        return "table:" + ",".join(_rat_str(c) for c in seq.values)
    if not seq.prefix and seq.block == (Fraction(1),):
        if seq.ratio == 1:
            return "mean"
        if 0 < seq.ratio < 1:
            return f"disc:{seq.ratio}"
        if seq.ratio > 0:
            return f"geom:{seq.ratio}"
    spec = "blocks:" + ",".join(_rat_str(b) for b in seq.block)
    spec += f";mu={seq.ratio}"
    if seq.prefix:
        spec += ";prefix=" + ",".join(_rat_str(c) for c in seq.prefix)
    return spec
