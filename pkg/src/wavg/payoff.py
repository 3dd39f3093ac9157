"""Weighted-average payoff evaluation on lasso words.

``eval_exact`` computes the payoff exactly for the block-geometric
sequence classes where a closed form exists:

  (a) convergent ratio (< 1): the weighted series divided by its total;
  (b) periodic coefficients (ratio 1, nonzero block sum): the ratio of
      per-super-period slopes, which is also the limit of the partial
      ratios;
  (c) pure geometric growth (ratio > 1, block length 1): the extreme of
      the cycle's rotation averages (min for liminf, max for limsup).

``eval_approx`` is the independent truncation oracle: it accumulates
exact partial ratios up to a horizon and brackets the tail limit per
congruence phase by extrapolating the sampled numerators/denominators,
never reusing the closed forms above.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .errors import UnsupportedSequenceError
from .sequences import (Classification, CoeffSeq, RawCoeffTable, RatLike,
                        analyze, as_rational)
from .words import LassoWord

LIMINF = "liminf"
LIMSUP = "limsup"
_MODES = (LIMINF, LIMSUP)


@dataclass(frozen=True)
class PayoffValue:
    """An exact payoff or a bracket [lo, hi] guaranteed to contain it."""

    mode: str
    exact: Optional[Fraction] = None
    bracket: Optional[tuple[Fraction, Fraction]] = None
    horizon_used: Optional[int] = None

    def __post_init__(self):
        if self.mode not in _MODES:
            raise ValueError(f"mode must be one of {_MODES}")
        if (self.exact is None) == (self.bracket is None):
            raise ValueError("exactly one of exact/bracket must be present")
        if self.bracket is not None and self.bracket[0] > self.bracket[1]:
            raise ValueError("bracket lower bound exceeds upper bound")

    def __str__(self) -> str:
        if self.exact is not None:
            return str(self.exact)
        lo, hi = self.bracket
        return f"bracket[{lo}, {hi}] horizon={self.horizon_used}"


def _check_mode(mode: str) -> str:
    if mode not in _MODES:
        raise ValueError(f"mode must be one of {_MODES}")
    return mode


def mean_payoff(word: LassoWord) -> Fraction:
    """The plain cycle average; the prefix never matters."""
    return sum(word.cycle, Fraction(0)) / word.cycle_len


def disc_sum(lam: RatLike, word: LassoWord) -> Fraction:
    """The normalized discounted sum (1-lam) * sum(lam**i * w_i), 0 < lam < 1."""
    lam = as_rational(lam)
    if not 0 < lam < 1:
        raise ValueError("discount factor must lie strictly between 0 and 1")
    head = Fraction(0)
    power = Fraction(1)
    for w in word.prefix:
        head += power * w
        power *= lam
    cycle_sum = Fraction(0)
    cycle_power = Fraction(1)
    for w in word.cycle:
        cycle_sum += cycle_power * w
        cycle_power *= lam
    k = word.cycle_len
    return (1 - lam) * (head + power * cycle_sum / (1 - lam ** k))


def rotation_values(ratio: RatLike, cycle) -> list[Fraction]:
    """The weighted rotation averages of a cycle under geometric weights.

    Entry i is sum_j ratio**j * cycle[(i+j) % k] divided by sum_j ratio**j.
    """
    ratio = as_rational(ratio)
    cycle = tuple(as_rational(c) for c in cycle)
    k = len(cycle)
    powers = [ratio ** j for j in range(k)]
    denom = sum(powers, Fraction(0))
    return [
        sum(powers[j] * cycle[(i + j) % k] for j in range(k)) / denom
        for i in range(k)
    ]


def supports_exact(seq) -> bool:
    """Whether eval_exact has a closed form for this sequence."""
    if not isinstance(seq, CoeffSeq):
        return False
    an = analyze(seq)
    if an.classification is Classification.CONVERGENT:
        return an.series_sum != 0
    if an.classification is Classification.DIVERGENT_BOUNDED:
        return True
    return seq.period == 1


def _weighted_series(seq: CoeffSeq, word: LassoWord) -> Fraction:
    """sum_i c_i * w_i for a convergent sequence, via aligned geometric tails."""
    m, p, mu = seq.prefix_len, seq.period, seq.ratio
    k = word.cycle_len
    start = max(m, word.prefix_len)
    total = Fraction(0)
    coeffs = seq.terms()
    for i in range(start):
        total += next(coeffs) * word.symbol(i)
    super_period = math.lcm(p, k)
    ratio = mu ** (super_period // p)
    window = Fraction(0)
    for r in range(super_period):
        window += next(coeffs) * word.symbol(start + r)
    return total + window / (1 - ratio)


def eval_exact(seq: CoeffSeq, word: LassoWord, mode: str = LIMINF) -> PayoffValue:
    """Exact weighted-average payoff of a lasso word, where supported.

    Raises UnsupportedSequenceError for raw tables, for growing ratios
    with block length > 1 (the phase interaction has no closed form
    here), and for convergent sequences whose total is zero.
    """
    _check_mode(mode)
    if isinstance(seq, RawCoeffTable):
        raise UnsupportedSequenceError(
            "raw tables have no exact evaluator; use eval_approx")
    an = analyze(seq)
    if an.classification is Classification.CONVERGENT:
        if an.series_sum == 0:
            raise UnsupportedSequenceError(
                "series total is zero; the payoff is not a finite rational")
        value = _weighted_series(seq, word) / an.series_sum
        return PayoffValue(mode=mode, exact=value)
    if an.classification is Classification.DIVERGENT_BOUNDED:
        m, p = seq.prefix_len, seq.period
        k = word.cycle_len
        start = max(m, word.prefix_len)
        super_period = math.lcm(p, k)
        num_slope = Fraction(0)
        den_slope = Fraction(0)
        for r in range(start, start + super_period):
            c = seq.term(r)
            num_slope += c * word.symbol(r)
            den_slope += c
        return PayoffValue(mode=mode, exact=num_slope / den_slope)
    if seq.period != 1:
        raise UnsupportedSequenceError(
            "growing ratio with block length > 1 has no exact evaluator; "
            "use eval_approx")
    values = rotation_values(seq.ratio, word.cycle)
    value = min(values) if mode == LIMINF else max(values)
    return PayoffValue(mode=mode, exact=value)


def _phase_limit(mu: Fraction, lead_n: Fraction, const_n: Fraction,
                 lead_d: Fraction, const_d: Fraction) -> Fraction:
    """Limit of (const_n + lead_n*x)/(const_d + lead_d*x) along the tail.

    For mu < 1 the fitted variable x shrinks to 0; for mu > 1 it grows
    without bound; mu == 1 is the affine case where the slopes dominate.
    """
    if mu < 1:
        if const_d != 0:
            return const_n / const_d
        if const_n == 0 and lead_d != 0:
            return lead_n / lead_d
        raise UnsupportedSequenceError(
            "partial sums vanish in the limit; the payoff is not a finite rational")
    # mu >= 1: growth dominated by the leading coefficients
    if lead_d != 0:
        return lead_n / lead_d
    if lead_n == 0:
        return const_n / const_d
    raise UnsupportedSequenceError(
        "partial ratios diverge along a phase; no finite bracket exists")


def _fit(samples: tuple[Fraction, Fraction, Fraction],
         rho: Fraction) -> tuple[Fraction, Fraction]:
    """Fit y_j = const + lead * rho**(-j) to three tail samples (j = 0,1,2).

    Returns (lead, const) with the third sample used as an exactness
    check; the growth factor of the leading term is absorbed into it.
    """
    y0, y1, y2 = samples
    if rho == 0:
        if not y0 == y1 == y2:
            raise RuntimeError("tail samples of a truncated sequence disagree")
        return Fraction(0), y0
    inv = 1 / rho
    lead = (y0 - y1) / (1 - inv)
    const = y0 - lead
    if const + lead * inv * inv != y2:
        raise RuntimeError("tail samples do not lie on a single geometric trend")
    return lead, const


def _fit_affine(samples: tuple[Fraction, Fraction, Fraction]) -> Fraction:
    """Per-step increment of an affine tail (three consistency-checked samples)."""
    y0, y1, y2 = samples
    if y0 - y1 != y1 - y2:
        raise RuntimeError("tail samples do not lie on a single affine trend")
    return y0 - y1


def _approx_table(table: RawCoeffTable, word: LassoWord, horizon: int,
                  mode: str) -> PayoffValue:
    if horizon > len(table.values):
        raise ValueError(
            f"horizon {horizon} exceeds table length {len(table.values)}")
    ratios = []
    num = Fraction(0)
    den = Fraction(0)
    for i in range(horizon):
        c = table.values[i]
        num += c * word.symbol(i)
        den += c
        ratios.append(num / den)
    window = min(2 * word.cycle_len, horizon)
    tail = ratios[-window:]
    return PayoffValue(mode=mode, bracket=(min(tail), max(tail)),
                       horizon_used=horizon)


def eval_approx(seq: Union[CoeffSeq, RawCoeffTable], word: LassoWord,
                horizon: int, mode: str = LIMINF) -> PayoffValue:
    """Truncation-based payoff bracket.

    Partial ratios are accumulated exactly up to the horizon.  For raw
    tables the bracket is the min/max over the final window.  For
    block-geometric sequences, each congruence phase of the tail is
    extrapolated from its last three samples (the numerator and the
    denominator are each geometric-plus-constant per phase, directly
    from the sequence definition), and the bracket spans from the
    sampled values to the fitted limits, so it always contains the true
    liminf/limsup.
    """
    _check_mode(mode)
    k = word.cycle_len
    if horizon < word.prefix_len + 2 * k:
        raise ValueError(
            f"horizon must be at least prefix length + 2*cycle length "
            f"= {word.prefix_len + 2 * k}")
    if isinstance(seq, RawCoeffTable):
        return _approx_table(seq, word, horizon, mode)

    analyze(seq)  # admission check
    m, p, mu = seq.prefix_len, seq.period, seq.ratio
    super_period = math.lcm(p, k)
    settled = max(m, word.prefix_len)
    min_horizon = settled + 3 * super_period
    if horizon < min_horizon:
        raise ValueError(
            f"horizon must be at least {min_horizon} for this sequence/word "
            f"pair (transient {settled} plus three super-periods of "
            f"{super_period})")

    nums = [Fraction(0)]
    dens = [Fraction(0)]
    num = Fraction(0)
    den = Fraction(0)
    coeffs = seq.terms()
    for i in range(horizon):
        c = next(coeffs)
        num += c * word.symbol(i)
        den += c
        nums.append(num)
        dens.append(den)

    rho = mu ** (super_period // p)
    lows = []
    highs = []
    for r in range(super_period):
        n1 = horizon - ((horizon - r) % super_period)
        points = (n1, n1 - super_period, n1 - 2 * super_period)
        num_samples = tuple(nums[n] for n in points)
        den_samples = tuple(dens[n] for n in points)
        if mu == 1:
            limit = _fit_affine(num_samples) / _fit_affine(den_samples)
        else:
            lead_n, const_n = _fit(num_samples, rho)
            lead_d, const_d = _fit(den_samples, rho)
            limit = _phase_limit(mu, lead_n, const_n, lead_d, const_d)
        sample = nums[n1] / dens[n1]
        lows.append(min(sample, limit))
        highs.append(max(sample, limit))
    if mode == LIMINF:
        bracket = (min(lows), min(highs))
    else:
        bracket = (max(lows), max(highs))
    return PayoffValue(mode=mode, bracket=bracket, horizon_used=horizon)
