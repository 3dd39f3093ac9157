"""Finite two-player game graphs, strategies, play extraction and gadgets.

States are partitioned between player 1 (maximizer) and player 2
(minimizer); every state has at least one outgoing edge.  Parallel
edges between the same pair of states are allowed as long as their
weights differ, so one-state graphs with several self-loops are
first-class.  Because of that, strategies select outgoing *edges*, not
successor states.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Union

from .errors import BudgetExceededError, GameFormatError
from .sequences import RatLike, as_rational, parse_rational
from .words import LassoWord, normalize_lasso


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    weight: Fraction

    def __post_init__(self):
        object.__setattr__(self, "weight", as_rational(self.weight))

    def __str__(self) -> str:
        return f"{self.src}->{self.dst}({self.weight})"


@dataclass
class GameGraph:
    """A weighted game graph with an owner per state and a start state."""

    states: tuple[str, ...]
    owners: dict[str, int]
    edges: tuple[Edge, ...]
    start: str
    _out: dict[str, tuple[Edge, ...]] = field(
        init=False, repr=False, compare=False)

    def __post_init__(self):
        self.states = tuple(self.states)
        self.edges = tuple(self.edges)
        if len(set(self.states)) != len(self.states):
            raise GameFormatError("duplicate state names")
        for q, owner in self.owners.items():
            if q not in set(self.states):
                raise GameFormatError(f"owner given for unknown state {q!r}")
            if owner not in (1, 2):
                raise GameFormatError(f"owner of {q!r} must be 1 or 2")
        if set(self.owners) != set(self.states):
            missing = [q for q in self.states if q not in self.owners]
            raise GameFormatError(f"states without owner: {missing}")
        out: dict[str, list[Edge]] = {q: [] for q in self.states}
        seen = set()
        for e in self.edges:
            if e.src not in out:
                raise GameFormatError(f"edge from unknown state {e.src!r}")
            if e.dst not in out:
                raise GameFormatError(f"edge to unknown state {e.dst!r}")
            key = (e.src, e.dst, e.weight)
            if key in seen:
                raise GameFormatError(f"duplicate edge {e}")
            seen.add(key)
            out[e.src].append(e)
        for q in self.states:
            if not out[q]:
                raise GameFormatError(f"state {q!r} has no outgoing edge")
        if self.start not in out:
            raise GameFormatError(f"unknown start state {self.start!r}")
        self._out = {q: tuple(es) for q, es in out.items()}

    def out_edges(self, q: str) -> tuple[Edge, ...]:
        return self._out[q]

    def owner(self, q: str) -> int:
        return self.owners[q]

    def owned_states(self, player: int) -> tuple[str, ...]:
        return tuple(q for q in self.states if self.owners[q] == player)

    def max_abs_weight(self) -> Fraction:
        return max(abs(e.weight) for e in self.edges)


@dataclass
class MemorylessStrategy:
    """One chosen outgoing edge per owned state."""

    choice: dict[str, Edge]

    def describe(self) -> str:
        if not self.choice:
            return "(no choices)"
        return ", ".join(str(self.choice[q]) for q in sorted(self.choice))


@dataclass
class FiniteMemoryStrategy:
    """A strategy driven by a finite memory automaton.

    The memory starts at 0, the edge choice depends on (memory, state),
    and the memory is updated on every arrival: after moving to q' the
    new memory is update[(memory, q')].
    """

    memory_size: int
    choice: dict[tuple[int, str], Edge]
    update: dict[tuple[int, str], int]

    def describe(self) -> str:
        picks = ", ".join(
            f"m{m}@{q}:{e.dst}({e.weight})" for (m, q), e in sorted(
                self.choice.items(), key=lambda kv: (kv[0][1], kv[0][0])))
        return f"{self.memory_size}-state memory [{picks}]"


Strategy = Union[MemorylessStrategy, FiniteMemoryStrategy]


@dataclass
class StrategyProfile:
    p1: Strategy
    p2: Strategy


def _pick(strategy: Strategy, mem: int, q: str) -> Edge:
    if isinstance(strategy, MemorylessStrategy):
        return strategy.choice[q]
    return strategy.choice[(mem, q)]


def _advance(strategy: Strategy, mem: int, arrived: str) -> int:
    if isinstance(strategy, MemorylessStrategy):
        return 0
    return strategy.update[(mem, arrived)]


def induced_lasso(g: GameGraph, profile: StrategyProfile) -> LassoWord:
    """Simulate the unique play of a profile and return its reward lasso.

    The play is cut at the first repeated (state, memory, memory)
    configuration, so the result has prefix+cycle length at most |Q|
    times the product of the memory sizes.
    """
    q = g.start
    m1 = m2 = 0
    rewards: list[Fraction] = []
    seen: dict[tuple, int] = {}
    config = (q, m1, m2)
    while config not in seen:
        seen[config] = len(rewards)
        strategy = profile.p1 if g.owner(q) == 1 else profile.p2
        mem = m1 if g.owner(q) == 1 else m2
        edge = _pick(strategy, mem, q)
        if edge.src != q:
            raise ValueError(f"strategy chose edge {edge} from state {q!r}")
        rewards.append(edge.weight)
        q = edge.dst
        m1 = _advance(profile.p1, m1, q)
        m2 = _advance(profile.p2, m2, q)
        config = (q, m1, m2)
    cut = seen[config]
    return LassoWord(tuple(rewards[:cut]), tuple(rewards[cut:]))


def enumerate_memoryless(g: GameGraph, player: int) -> Iterator[MemorylessStrategy]:
    """All memoryless strategies, lexicographic by state then edge order."""
    owned = g.owned_states(player)
    options = [g.out_edges(q) for q in owned]
    for combo in itertools.product(*options):
        yield MemorylessStrategy(dict(zip(owned, combo)))


def count_memoryless(g: GameGraph, player: int) -> int:
    n = 1
    for q in g.owned_states(player):
        n *= len(g.out_edges(q))
    return n


def _behavior_signature(g: GameGraph, player: int, strategy: Strategy,
                        opponents: list[MemorylessStrategy]) -> tuple:
    lassos = []
    for opp in opponents:
        profile = (StrategyProfile(strategy, opp) if player == 1
                   else StrategyProfile(opp, strategy))
        lassos.append(normalize_lasso(induced_lasso(g, profile)))
    return tuple(lassos)


def enumerate_finite_memory(g: GameGraph, player: int, mem_bound: int,
                            budget: int = 1_000_000) -> Iterator[FiniteMemoryStrategy]:
    """All finite-memory strategies with at most mem_bound memory states.

    Memory size 1 reproduces enumerate_memoryless exactly.  Larger
    machines are deduplicated behaviorally: a machine is skipped when it
    induces the same play as an earlier one against every opponent
    memoryless strategy.  Raises BudgetExceededError when more than
    ``budget`` raw machines would be examined.
    """
    if mem_bound < 1:
        raise ValueError("mem_bound must be at least 1")
    opponents = list(enumerate_memoryless(g, 3 - player))
    owned = g.owned_states(player)
    seen: set[tuple] = set()
    examined = 0
    for size in range(1, mem_bound + 1):
        choice_keys = [(mem, q) for mem in range(size) for q in owned]
        update_keys = [(mem, q) for mem in range(size) for q in g.states]
        choice_options = [g.out_edges(q) for (_, q) in choice_keys]
        for choices in itertools.product(*choice_options):
            for updates in itertools.product(range(size), repeat=len(update_keys)):
                examined += 1
                if examined > budget:
                    raise BudgetExceededError(
                        f"finite-memory enumeration exceeded budget {budget}")
                strategy = FiniteMemoryStrategy(
                    size, dict(zip(choice_keys, choices)),
                    dict(zip(update_keys, updates)))
                signature = _behavior_signature(g, player, strategy, opponents)
                if size == 1:
                    seen.add(signature)
                    yield strategy
                    continue
                if signature in seen:
                    continue
                seen.add(signature)
                yield strategy


# ---------------------------------------------------------------------------
# Gadget constructors (one-player graphs with a configurable owner)
# ---------------------------------------------------------------------------

def loops_gadget(weights, owner: int = 1) -> GameGraph:
    """A single state with one self-loop per given weight."""
    weights = [as_rational(w) for w in weights]
    edges = tuple(Edge("s", "s", w) for w in weights)
    return GameGraph(("s",), {"s": owner}, edges, "s")


def escape_gadget(w: RatLike, owner: int = 1) -> GameGraph:
    """A reward-1 self-loop with a one-shot exit of reward w to a 0-loop sink."""
    w = as_rational(w)
    edges = (
        Edge("stay", "stay", Fraction(1)),
        Edge("stay", "out", w),
        Edge("out", "out", Fraction(0)),
    )
    return GameGraph(("stay", "out"), {"stay": owner, "out": owner}, edges, "stay")


def detour_gadget(out: RatLike, back: RatLike, loop: RatLike,
                  owner: int = 1) -> GameGraph:
    """A self-loop of reward ``loop`` plus a two-edge detour out/back."""
    edges = (
        Edge("base", "base", as_rational(loop)),
        Edge("base", "away", as_rational(out)),
        Edge("away", "base", as_rational(back)),
    )
    return GameGraph(("base", "away"), {"base": owner, "away": owner}, edges, "base")


def cycle_choice_gadget(k: int, owner: int = 1, spike: RatLike = 1) -> GameGraph:
    """A hub choosing among k length-k cycles; cycle i carries ``spike``
    on its (i+1)-th edge and 0 elsewhere."""
    if k < 1:
        raise ValueError("k must be at least 1")
    spike = as_rational(spike)
    states = ["hub"]
    owners = {"hub": owner}
    edges: list[Edge] = []
    zero = Fraction(0)
    for i in range(k):
        chain = [f"c{i}s{j}" for j in range(1, k)]
        for name in chain:
            states.append(name)
            owners[name] = owner
        nodes = ["hub"] + chain + ["hub"]
        for step in range(k):
            weight = spike if step == i else zero
            edges.append(Edge(nodes[step], nodes[step + 1], weight))
    return GameGraph(tuple(states), owners, tuple(edges), "hub")


def two_branch_gadget(left=(0, 4), right=(1, 2), owner: int = 2) -> GameGraph:
    """A hub choosing between two two-edge round trips.

    The defaults give the 3-state counterexample graph: left branch
    out/back rewards (0, 4), right branch (1, 2).
    """
    lo, lb = (as_rational(x) for x in left)
    ro, rb = (as_rational(x) for x in right)
    edges = (
        Edge("hub", "left", lo),
        Edge("left", "hub", lb),
        Edge("hub", "right", ro),
        Edge("right", "hub", rb),
    )
    owners = {"hub": owner, "left": owner, "right": owner}
    return GameGraph(("hub", "left", "right"), owners, edges, "hub")


# ---------------------------------------------------------------------------
# File format
# ---------------------------------------------------------------------------

def parse_game(text: str) -> GameGraph:
    """Parse the line-oriented game format.

    Grammar ('#' starts a comment):
        state <name> <1|2>
        edge <srcName> <dstName> <rational>
        start <name>
    Exactly one start line; states must be declared before use.
    """
    states: list[str] = []
    owners: dict[str, int] = {}
    edges: list[Edge] = []
    start: str | None = None
    declared: set[str] = set()
    edge_keys: set[tuple] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        if kind == "state":
            if len(parts) != 3:
                raise GameFormatError("state line needs: state <name> <1|2>", lineno)
            name, owner_tok = parts[1], parts[2]
            if name in declared:
                raise GameFormatError(f"duplicate state {name!r}", lineno)
            if owner_tok not in ("1", "2"):
                raise GameFormatError(f"owner must be 1 or 2, got {owner_tok!r}", lineno)
            declared.add(name)
            states.append(name)
            owners[name] = int(owner_tok)
        elif kind == "edge":
            if len(parts) != 4:
                raise GameFormatError(
                    "edge line needs: edge <src> <dst> <rational>", lineno)
            src, dst, weight_tok = parts[1], parts[2], parts[3]
            for endpoint in (src, dst):
                if endpoint not in declared:
                    raise GameFormatError(f"unknown state {endpoint!r}", lineno)
            try:
                weight = parse_rational(weight_tok)
            except Exception:
                raise GameFormatError(f"malformed rational {weight_tok!r}", lineno)
            key = (src, dst, weight)
            if key in edge_keys:
                raise GameFormatError(
                    f"duplicate edge {src}->{dst}({weight})", lineno)
            edge_keys.add(key)
            edges.append(Edge(src, dst, weight))
        elif kind == "start":
            if len(parts) != 2:
                raise GameFormatError("start line needs: start <name>", lineno)
            if start is not None:
                raise GameFormatError("duplicate start line", lineno)
            if parts[1] not in declared:
                raise GameFormatError(f"unknown state {parts[1]!r}", lineno)
            start = parts[1]
        else:
            raise GameFormatError(f"unrecognized directive {kind!r}", lineno)
    if start is None:
        raise GameFormatError("missing start line")
    return GameGraph(tuple(states), owners, tuple(edges), start)


def serialize_game(g: GameGraph) -> str:
    lines = [f"state {q} {g.owner(q)}" for q in g.states]
    lines.append(f"start {g.start}")
    lines.extend(f"edge {e.src} {e.dst} {e.weight}" for e in g.edges)
    return "\n".join(lines) + "\n"


def random_game(seed: int, max_states: int = 5, max_out_degree: int = 3,
                weight_lo: int = -4, weight_hi: int = 4) -> GameGraph:
    """A seed-determined random game for property suites."""
    rng = random.Random(seed)
    n = rng.randint(2, max_states)
    names = tuple(f"q{i}" for i in range(n))
    owners = {q: rng.randint(1, 2) for q in names}
    edges = []
    for q in names:
        degree = rng.randint(1, min(max_out_degree, n))
        targets = rng.sample(names, degree)
        for target in targets:
            weight = Fraction(rng.randint(weight_lo, weight_hi))
            edges.append(Edge(q, target, weight))
    return GameGraph(names, owners, tuple(edges), names[0])
