"""Exact game solving and memoryless-optimality checking.

``solve_enumerative`` builds the full payoff table over memoryless
profiles and reads off maximin/minimax exactly.  ``check_memoryless``
then searches for finite-memory deviations: against each opponent best
response it enumerates the deviator's ultimately periodic plays with
prefix+cycle length up to |Q| * mem_bound (the configuration bound of a
mem_bound-state strategy), ordered by cycle length, then prefix length,
then edge order.  Any play strictly beating the deviator's memoryless
guarantee against every candidate-optimal opponent refutes memoryless
optimality; an empty search is reported as a bounded no-witness, never
as a proof.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .errors import BudgetExceededError, UnsupportedSequenceError
from .games import (GameGraph, MemorylessStrategy, StrategyProfile,
                    detour_gadget, enumerate_memoryless, escape_gadget,
                    induced_lasso)
from .payoff import LIMINF, PayoffValue, eval_exact, supports_exact
from .sequences import Classification, CoeffSeq, analyze, as_rational
from .words import LassoWord, format_lasso


@dataclass
class SolveReport:
    """Exact maximin/minimax over memoryless strategies, with witnesses."""

    maximin: PayoffValue
    minimax: PayoffValue
    p1_optimal: MemorylessStrategy
    p2_optimal: MemorylessStrategy
    saddle: bool
    p1_strategies: Optional[list[MemorylessStrategy]] = None
    p2_strategies: Optional[list[MemorylessStrategy]] = None
    table: Optional[list[list[Fraction]]] = None


def solve_enumerative(g: GameGraph, seq: CoeffSeq, mode: str = LIMINF,
                      budget: int = 500_000,
                      keep_table: bool = True) -> SolveReport:
    """Solve by enumerating every memoryless profile and evaluating exactly.

    Ties are broken by enumeration order (first strategy found).  The
    number of profiles must not exceed ``budget``.
    """
    if not supports_exact(seq):
        raise UnsupportedSequenceError(
            "sequence has no exact evaluator; use eval_approx-based tooling")
    p1s = list(enumerate_memoryless(g, 1))
    p2s = list(enumerate_memoryless(g, 2))
    if len(p1s) * len(p2s) > budget:
        raise BudgetExceededError(
            f"{len(p1s) * len(p2s)} memoryless profiles exceed budget {budget}")
    memo: dict[LassoWord, Fraction] = {}

    def value(sigma: MemorylessStrategy, pi: MemorylessStrategy) -> Fraction:
        induced = induced_lasso(g, StrategyProfile(sigma, pi))
        if induced in memo:
            return memo[induced]
        phi = eval_exact(seq, induced, mode).exact
        memo[induced] = phi
        return phi

    table = [[value(sigma, pi) for pi in p2s] for sigma in p1s]
    row_mins = [min(row) for row in table]
    col_maxs = [max(table[i][j] for i in range(len(p1s)))
                for j in range(len(p2s))]
    maximin = max(row_mins)
    minimax = min(col_maxs)
    p1_opt = p1s[row_mins.index(maximin)]
    p2_opt = p2s[col_maxs.index(minimax)]
    return SolveReport(
        maximin=PayoffValue(mode=mode, exact=maximin),
        minimax=PayoffValue(mode=mode, exact=minimax),
        p1_optimal=p1_opt,
        p2_optimal=p2_opt,
        saddle=maximin == minimax,
        p1_strategies=p1s if keep_table else None,
        p2_strategies=p2s if keep_table else None,
        table=table if keep_table else None,
    )


# ---------------------------------------------------------------------------
# Value iteration (approximate solvers; the enumerative one is the oracle)
# ---------------------------------------------------------------------------

@dataclass
class ValueIteration:
    """Per-state value estimates with a sound sup-norm error bound."""

    values: dict[str, Fraction]
    error_bound: Fraction
    steps: int


def _opt(owner: int) -> Callable:
    return max if owner == 1 else min


def value_iter_disc(g: GameGraph, lam, iterations: int) -> ValueIteration:
    """Fixed-point iteration for the normalized discounted objective.

    Iterates v(q) <- opt over edges of (1-lam)*w + lam*v(dst) from v=0,
    exactly in rationals; after T steps the sup-norm error is at most
    lam**T times the largest absolute reward.
    """
    lam = as_rational(lam)
    if not 0 < lam < 1:
        raise ValueError("discount factor must lie strictly between 0 and 1")
    if iterations < 1:
        raise ValueError("iterations must be positive")
    v = {q: Fraction(0) for q in g.states}
    for _ in range(iterations):
        v = {
            q: _opt(g.owner(q))(
                (1 - lam) * e.weight + lam * v[e.dst] for e in g.out_edges(q))
            for q in g.states
        }
    bound = lam ** iterations * g.max_abs_weight()
    return ValueIteration(values=v, error_bound=bound, steps=iterations)


def value_iter_mean(g: GameGraph, steps: int) -> ValueIteration:
    """T-step total-reward iteration; v_T/T approximates the mean value.

    The estimate is within 2*|Q|*W/T of each state's mean-payoff value.
    """
    if steps < 1:
        raise ValueError("steps must be positive")
    v = {q: Fraction(0) for q in g.states}
    for _ in range(steps):
        v = {
            q: _opt(g.owner(q))(e.weight + v[e.dst] for e in g.out_edges(q))
            for q in g.states
        }
    estimates = {q: v[q] / steps for q in g.states}
    bound = Fraction(2 * len(g.states)) * g.max_abs_weight() / steps
    return ValueIteration(values=estimates, error_bound=bound, steps=steps)


# ---------------------------------------------------------------------------
# Memoryless-optimality verdicts
# ---------------------------------------------------------------------------

class VerdictKind(Enum):
    MEMORYLESS_SADDLE = "memoryless-saddle"
    WITNESS_FOUND = "witness-found"
    NO_WITNESS_UP_TO_BOUND = "no-witness-up-to-bound"


@dataclass
class DeviationWitness:
    """A deviation strictly beating the deviator's memoryless guarantee."""

    description: str
    deviating_payoff: Fraction
    memoryless_payoff: Fraction
    player: Optional[int] = None
    lasso: Optional[LassoWord] = None
    opponent: Optional[MemorylessStrategy] = None


@dataclass
class Verdict:
    kind: VerdictKind
    witness: Optional[DeviationWitness]
    mem_bound: int
    budget: int


def _deviation_edges(g: GameGraph, deviator: int,
                     opponent: MemorylessStrategy):
    """Per-state candidate edges: free for the deviator, fixed elsewhere."""
    options = {}
    for q in g.states:
        if g.owner(q) == deviator:
            options[q] = g.out_edges(q)
        else:
            options[q] = (opponent.choice[q],)
    return options


def _scan_deviations(g: GameGraph, opponent: MemorylessStrategy, deviator: int,
                     seq: CoeffSeq, mode: str, threshold: Fraction,
                     improving: Callable[[Fraction], bool], max_len: int,
                     budget_box: list[int],
                     memo: dict) -> Optional[tuple[LassoWord, Fraction]]:
    """First improving bounded lasso play, ordered by (cycle, prefix, edges).

    A single DFS over paths from the start visits every lasso with
    prefix+cycle length up to max_len; among the improving ones, the
    minimum of the (cycle length, prefix length, edge index path) key is
    returned, which equals the first hit of an enumeration ordered that
    way.

    For block-length-1 sequences the candidate payoff has a constant-time
    incremental form over running sums (cycle average for ratio 1,
    truncated geometric series for ratio < 1 without a prefix), still in
    exact arithmetic; other sequences fall back to the memoized
    evaluator.  The returned payoff is re-checked against eval_exact.
    """
    options = _deviation_edges(g, deviator, opponent)
    fast = None
    if seq.period == 1:
        if seq.ratio == 1:
            fast = "slope"
        elif seq.ratio < 1 and seq.prefix_len == 0:
            fast = "series"
    int_weights = all(e.weight.denominator == 1 for e in g.edges)
    sign = 1 if improving(threshold + 1) else -1  # deviator's good direction
    lam = seq.ratio

    best: Optional[tuple[tuple, LassoWord, Fraction]] = None
    path_states = [g.start]
    rewards: list[Fraction] = []
    edge_trail: list[int] = []

    def record(cut: int, depth: int, phi: Fraction):
        nonlocal best
        key = (depth - cut, cut, tuple(edge_trail))
        if best is None or key < best[0]:
            best = (key, LassoWord(tuple(rewards[:cut]),
                                   tuple(rewards[cut:])), phi)

    def spend(amount: int):
        budget_box[0] -= amount
        if budget_box[0] < 0:
            raise BudgetExceededError("deviation search exceeded its budget")

    if fast == "slope" and int_weights:
        # Cycle averages over integer rewards: a close at position i improves
        # on the threshold v iff the shifted sum S_j*den - num*j grows (for
        # the maximizer; shrinks for the minimizer) between the two visits,
        # so one integer comparison per earlier visit of the same state
        # decides everything and Fractions are only built on hits.
        num, den = threshold.numerator, threshold.denominator
        positive = sign > 0
        steps = {
            q: tuple((i, e.dst, e.weight, int(e.weight))
                     for i, e in enumerate(options[q]))
            for q in g.states
        }
        visits: dict[str, list[tuple[int, int]]] = {q: [] for q in g.states}
        int_sums = [0]
        push_state, pop_state = path_states.append, path_states.pop
        push_reward, pop_reward = rewards.append, rewards.pop
        push_trail, pop_trail = edge_trail.append, edge_trail.pop
        push_sum, pop_sum = int_sums.append, int_sums.pop

        def walk_fast(here: str, depth: int, total: int):
            shifted = total * den - num * depth
            seen_here = visits[here]
            if seen_here:
                spend(len(seen_here))
                if positive:
                    hit = any(shifted > earlier for earlier, _ in seen_here)
                else:
                    hit = any(shifted < earlier for earlier, _ in seen_here)
                if hit:
                    for earlier, i in seen_here:
                        if (shifted > earlier if positive else shifted < earlier):
                            record(i, depth, Fraction(
                                total - int_sums[i], depth - i))
            if depth >= max_len:
                return
            seen_here.append((shifted, depth))
            for idx, dst, weight, int_weight in steps[here]:
                push_state(dst)
                push_reward(weight)
                push_trail(idx)
                push_sum(total + int_weight)
                walk_fast(dst, depth + 1, total + int_weight)
                pop_state()
                pop_reward()
                pop_trail()
                pop_sum()
            seen_here.pop()

        walk_fast(g.start, 0, 0)
    else:
        series_sums = [Fraction(0)]
        lam_pows = [Fraction(1)]
        plain_sums = [Fraction(0)]

        def candidate_value(cut: int, depth: int) -> Fraction:
            if fast == "slope":
                return (plain_sums[depth] - plain_sums[cut]) / (depth - cut)
            if fast == "series":
                head = series_sums[cut]
                loop = series_sums[depth] - head
                return (1 - lam) * (head + loop / (1 - lam_pows[depth - cut]))
            key_word = (tuple(rewards[:cut]), tuple(rewards[cut:]))
            phi = memo.get(key_word)
            if phi is None:
                phi = eval_exact(seq, LassoWord(*key_word), mode).exact
                memo[key_word] = phi
            return phi

        def walk():
            here = path_states[-1]
            depth = len(rewards)
            for i in range(depth):
                if path_states[i] == here:
                    spend(1)
                    phi = candidate_value(i, depth)
                    if improving(phi):
                        record(i, depth, phi)
            if depth >= max_len:
                return
            for idx, edge in enumerate(options[here]):
                path_states.append(edge.dst)
                rewards.append(edge.weight)
                edge_trail.append(idx)
                plain_sums.append(plain_sums[-1] + edge.weight)
                series_sums.append(series_sums[-1] + lam_pows[-1] * edge.weight)
                lam_pows.append(lam_pows[-1] * lam)
                walk()
                path_states.pop()
                rewards.pop()
                edge_trail.pop()
                plain_sums.pop()
                series_sums.pop()
                lam_pows.pop()

        walk()

    if best is None:
        return None
    word, phi = best[1], best[2]
    if fast is not None:
        confirmed = eval_exact(seq, word, mode).exact
        if confirmed != phi:
            raise RuntimeError(
                "incremental payoff disagrees with the exact evaluator")
        phi = confirmed
    return word, phi


def check_memoryless(g: GameGraph, seq: CoeffSeq, mem_bound: int = 2,
                     mode: str = LIMINF, budget: int = 2_000_000) -> Verdict:
    """Decide whether bounded deviations refute memoryless optimality.

    Step 1: if the memoryless table has no saddle, that is already a
    witness.  Step 2: for each player, search deviating plays against
    every opponent strategy that attains the saddle value; memoryless
    optimality of the pair is refuted only if every such opponent can be
    beaten.  Step 3: otherwise report no witness up to the bound, which
    is explicitly not a proof of optimality.
    """
    if mem_bound < 0:
        raise ValueError("mem_bound must be nonnegative")
    report = solve_enumerative(g, seq, mode=mode)
    maximin = report.maximin.exact
    minimax = report.minimax.exact
    if maximin != minimax:
        witness = DeviationWitness(
            description=(f"memoryless maximin {maximin} differs from "
                         f"minimax {minimax}; some player needs memory"),
            deviating_payoff=minimax,
            memoryless_payoff=maximin,
        )
        return Verdict(VerdictKind.WITNESS_FOUND, witness, mem_bound, budget)
    if mem_bound == 0:
        return Verdict(VerdictKind.MEMORYLESS_SADDLE, None, mem_bound, budget)
    value = maximin
    max_len = len(g.states) * mem_bound
    budget_box = [budget]
    memo: dict = {}
    row_mins = [min(row) for row in report.table]
    col_maxs = [max(report.table[i][j] for i in range(len(report.p1_strategies)))
                for j in range(len(report.p2_strategies))]
    for deviator in (1, 2):
        if not g.owned_states(deviator):
            continue
        if deviator == 1:
            responses = [pi for j, pi in enumerate(report.p2_strategies)
                         if col_maxs[j] == value]
            improving = lambda phi: phi > value
        else:
            responses = [sigma for i, sigma in enumerate(report.p1_strategies)
                         if row_mins[i] == value]
            improving = lambda phi: phi < value
        first: Optional[DeviationWitness] = None
        beats_every_response = True
        for response in responses:
            found = _scan_deviations(g, response, deviator, seq, mode, value,
                                     improving, max_len, budget_box, memo)
            if found is None:
                beats_every_response = False
                break
            if first is None:
                word, phi = found
                first = DeviationWitness(
                    description=(f"player {deviator} plays "
                                 f"{format_lasso(word)} against "
                                 f"[{response.describe()}]"),
                    deviating_payoff=phi,
                    memoryless_payoff=value,
                    player=deviator,
                    lasso=word,
                    opponent=response,
                )
        if beats_every_response and first is not None:
            return Verdict(VerdictKind.WITNESS_FOUND, first, mem_bound, budget)
    return Verdict(VerdictKind.NO_WITNESS_UP_TO_BOUND, None, mem_bound, budget)


# ---------------------------------------------------------------------------
# Monotonicity falsification
# ---------------------------------------------------------------------------

@dataclass
class MonotonicityWitness:
    """Finite prefixes x, y and cycles u, v with phi(xu) <= phi(xv) but
    phi(yu) > phi(yv), refuting the order-preservation property that
    memoryless optimality requires."""

    x: tuple[Fraction, ...]
    y: tuple[Fraction, ...]
    u: LassoWord
    v: LassoWord
    phi_xu: Fraction
    phi_xv: Fraction
    phi_yu: Fraction
    phi_yv: Fraction


def _words_by_length(alphabet: Sequence[Fraction], max_len: int,
                     min_len: int = 0) -> list[tuple[Fraction, ...]]:
    out: list[tuple[Fraction, ...]] = []
    for length in range(min_len, max_len + 1):
        if length == 0:
            out.append(())
            continue
        out.extend(itertools.product(alphabet, repeat=length))
    return out


def monotone_falsify(seq: CoeffSeq, alphabet, max_prefix_len: int,
                     max_cycle_len: int, mode: str = LIMINF,
                     budget: int = 10_000_000,
                     nonempty_only: bool = False) -> Optional[MonotonicityWitness]:
    """Exhaustive search for a monotonicity violation, first hit in a
    deterministic order (prefixes and cycles by length then alphabet
    order; loops nested x, y, u, v).

    ``nonempty_only`` restricts the prefixes to nonempty words, covering
    the stricter reading of the property.  Returns None when the space
    contains no witness; raises BudgetExceededError if the search is cut
    short, which is distinct from a verified absence.
    """
    alphabet = tuple(as_rational(a) for a in alphabet)
    if not alphabet:
        raise ValueError("alphabet must be nonempty")
    prefixes = _words_by_length(alphabet, max_prefix_len,
                                min_len=1 if nonempty_only else 0)
    cycles = [tuple(c) for c in _words_by_length(alphabet, max_cycle_len,
                                                 min_len=1)]
    memo: dict[tuple, Fraction] = {}

    def phi(prefix: tuple[Fraction, ...], cycle: tuple[Fraction, ...]) -> Fraction:
        key = (prefix, cycle)
        got = memo.get(key)
        if got is None:
            got = eval_exact(seq, LassoWord(prefix, cycle), mode).exact
            memo[key] = got
        return got

    remaining = budget
    for x in prefixes:
        for y in prefixes:
            if x == y:
                continue
            for u in cycles:
                for v in cycles:
                    remaining -= 1
                    if remaining < 0:
                        raise BudgetExceededError(
                            "monotonicity search exceeded its budget")
                    phi_xu, phi_xv = phi(x, u), phi(x, v)
                    if phi_xu > phi_xv:
                        continue
                    phi_yu, phi_yv = phi(y, u), phi(y, v)
                    if phi_yu > phi_yv:
                        return MonotonicityWitness(
                            x=x, y=y,
                            u=LassoWord((), u), v=LassoWord((), v),
                            phi_xu=phi_xu, phi_xv=phi_xv,
                            phi_yu=phi_yu, phi_yv=phi_yv)
    return None


# ---------------------------------------------------------------------------
# Guided witness search over the gadget families
# ---------------------------------------------------------------------------

@dataclass
class SequenceWitnessReport:
    """Outcome of the guided search for a memoryless-optimality failure."""

    found: bool
    game: Optional[GameGraph] = None
    verdict: Optional[Verdict] = None
    monotonicity: Optional[MonotonicityWitness] = None
    tried: list[str] = field(default_factory=list)


def _farey_mediants(lam: Fraction) -> tuple[list[Fraction], list[Fraction]]:
    """Two rationals approaching lam from below and two from above."""
    p, q = lam.numerator, lam.denominator
    if lam <= 0:
        return ([lam - 1, lam - Fraction(1, 2)],
                [lam + Fraction(1, 2), lam + 1])
    if q == 1:
        below, above = Fraction(p - 1), Fraction(p + 1)
    else:
        b = pow(p, -1, q)
        below = Fraction((p * b - 1) // q, b)
        above = Fraction((p * (q - b) + 1) // q, q - b)

    def mediant(x: Fraction) -> Fraction:
        return Fraction(x.numerator + p, x.denominator + q)

    m1_below = mediant(below)
    m1_above = mediant(above)
    return [m1_below, mediant(m1_below)], [m1_above, mediant(m1_above)]


def _detour_triples(lam: Fraction) -> list[tuple[Fraction, Fraction, Fraction]]:
    """Candidate (out, back, loop) reward triples derived from two-sided
    rational approximations of the odd/even split ratio."""

    def from_below(fr: Fraction):
        r, s = fr.numerator, fr.denominator
        return (Fraction(r + s + 1), Fraction(1), Fraction(s + 1))

    def from_above(fr: Fraction):
        l, k = fr.numerator, fr.denominator
        return (Fraction(1), Fraction(k + l + 1), Fraction(l + 1))

    lows, highs = _farey_mediants(lam)
    triples = [from_below(lam), from_above(lam)]
    for lo, hi in zip(lows, highs):
        triples.append(from_below(lo))
        triples.append(from_above(hi))
    seen = set()
    unique = []
    for t in triples:
        if t not in seen:
            seen.add(t)
            unique.append(t)
    return unique


def find_witness_sequence_failure(seq: CoeffSeq, mem_bound: int = 2,
                                  budget: int = 64, mode: str = LIMINF,
                                  alphabet=(0, 1), max_prefix_len: int = 2,
                                  max_cycle_len: int = 2,
                                  scan_budget: int = 2_000_000
                                  ) -> SequenceWitnessReport:
    """Search the parametric gadget families for a memoryless failure.

    Escape gadgets are tried on an integer grid sized by the reciprocal
    of the partial-sum liminf; detour gadgets on reward triples built
    from two-sided approximations of the odd/even split ratio (exact
    value first on each side).  If no gadget yields a witness, the
    monotonicity falsifier runs as a final route.  Budget exhaustion
    returns a not-found report carrying the instances tried.
    """
    an = analyze(seq)
    tried: list[str] = []
    candidates: list[tuple[str, GameGraph]] = []
    liminf = an.inv_psum_liminf
    if liminf is not None and liminf > 0:
        top = math.ceil(1 / liminf) + 2
        ws = range(1, top + 1)
    else:
        ws = (1,)
    for w in ws:
        candidates.append((f"escape_gadget({w})", escape_gadget(w, owner=1)))
    if (an.classification is Classification.CONVERGENT
            and an.even_sum not in (None, 0)):
        lam = an.odd_sum / an.even_sum
        for out, back, loop in _detour_triples(lam):
            candidates.append(
                (f"detour_gadget({out},{back},{loop})",
                 detour_gadget(out, back, loop, owner=1)))
    for description, game in candidates:
        if len(tried) >= budget:
            tried.append("(budget exhausted)")
            return SequenceWitnessReport(found=False, tried=tried)
        verdict = check_memoryless(game, seq, mem_bound=mem_bound, mode=mode,
                                   budget=scan_budget)
        tried.append(f"{description}: {verdict.kind.value}")
        if verdict.kind is VerdictKind.WITNESS_FOUND:
            return SequenceWitnessReport(found=True, game=game,
                                         verdict=verdict, tried=tried)
    witness = monotone_falsify(seq, alphabet, max_prefix_len, max_cycle_len,
                               mode=mode)
    tried.append(
        "monotonicity search: " + ("witness" if witness else "absent"))
    if witness is not None:
        return SequenceWitnessReport(found=True, monotonicity=witness,
                                     tried=tried)
    return SequenceWitnessReport(found=False, tried=tried)
