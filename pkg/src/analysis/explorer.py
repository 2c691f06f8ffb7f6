"""
Partial-Sum Explorer - breadth-first unfolding of the computation tree

Each depth k holds every state reached after exactly k steps. From those
levels the explorer accumulates the three monotone series:

- termination probability   Σ_{j<=k} (mass terminating after exactly j steps)
- expected outcome of v     Σ_{j<=k} Σ η(v)·a over terminal states at depth j
- expected runtime          Σ_{j<k} (1 - termination probability within j)

Every truncation is a lower bound of the limit, which is what the
`certify_*` semi-decision procedures exploit. `brute_force_partial_sums` recomputes
the same rows by enumerating every (k, w) pair through `successor`; it is
kept only as an independent oracle for tests.
"""

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, List, Optional, Union

from pgcl.core import ONE, ZERO, Program, Valuation, format_rational
from pgcl.semantics import (
    Deterministic, Probabilistic, State, Terminal, alpha, initial_state, step, successor, wp_weight,
)

from .config import DEFAULT_CONFIG, AnalysisConfig

CSV_HEADER = "depth,exact_k_mass,pr_within_k,exp_v_partial,runtime_partial,frontier,exhausted"


class FrontierCapExceeded(RuntimeError):
    """The computation tree grew wider than the configured cap."""

    def __init__(self, depth: int, size: int, cap: int):
        self.depth = depth
        self.size = size
        self.cap = cap
        super().__init__(f"Frontier at depth {depth} holds {size} states (cap {cap})")


@dataclass(frozen=True)
class PartialSumRow:
    depth: int
    exact_k_mass: Fraction
    pr_within_k: Fraction
    exp_v_partial: Fraction
    runtime_partial: Fraction
    frontier_size: int
    exhausted: bool

    def to_csv(self) -> str:
        return ",".join([
            str(self.depth),
            format_rational(self.exact_k_mass),
            format_rational(self.pr_within_k),
            format_rational(self.exp_v_partial),
            format_rational(self.runtime_partial),
            str(self.frontier_size),
            "true" if self.exhausted else "false",
        ])


@dataclass(frozen=True)
class Certified:
    depth: int
    witness_value: Fraction


@dataclass(frozen=True)
class BudgetExhausted:
    last_row: PartialSumRow


CertificateOutcome = Union[Certified, BudgetExhausted]


def _expand(state: State) -> List[State]:
    result = step(state)
    if isinstance(result, Terminal):
        return []
    if isinstance(result, Deterministic):
        return [result.next]
    return [result.left, result.right]


def _expand_chunk(states: List[State]) -> List[State]:
    expanded: List[State] = []
    for state in states:
        expanded.extend(_expand(state))
    return expanded


class PartialSumExplorer:
    """
    Frontier propagation for one (program, valuation) pair.

    Callbacks:
        on_depth_completed(row): called after each row is produced
    """

    def __init__(self, program: Program, valuation: Optional[Valuation] = None,
                 var: Optional[str] = None, config: Optional[AnalysisConfig] = None):
        self.program = program
        self.valuation = valuation if valuation is not None else Valuation()
        self.var = var
        self.config = config or DEFAULT_CONFIG
        self.on_depth_completed: Optional[Callable[[PartialSumRow], None]] = None

    def _next_level(self, live: List[State]) -> List[State]:
        jobs = self.config.jobs
        if jobs <= 1 or len(live) < self.config.parallel_threshold:
            return _expand_chunk(live)
        size = -(-len(live) // jobs)
        chunks = [live[i:i + size] for i in range(0, len(live), size)]
        expanded: List[State] = []
        # map keeps chunk order, so the next level is identical for any worker count
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            for part in pool.map(_expand_chunk, chunks):
                expanded.extend(part)
        return expanded

    def levels(self, max_depth: Optional[int] = None) -> Iterator[List[State]]:
        """All states at depth 0, 1, 2, ... (terminal ones included)."""
        level = [initial_state(self.program, self.valuation)]
        depth = 0
        while True:
            yield level
            if max_depth is not None and depth >= max_depth:
                return
            live = [s for s in level if not s.terminated]
            level = self._next_level(live)
            depth += 1
            if len(level) > self.config.frontier_cap:
                raise FrontierCapExceeded(depth, len(level), self.config.frontier_cap)

    def rows(self, max_depth: Optional[int] = None) -> Iterator[PartialSumRow]:
        pr_within = ZERO
        exp_partial = ZERO
        runtime = ZERO
        for depth, level in enumerate(self.levels(max_depth)):
            exact = ZERO
            outcome = ZERO
            live = 0
            for state in level:
                if state.terminated:
                    exact += alpha(state)
                    if self.var is not None:
                        outcome += wp_weight(state, self.var)
                else:
                    live += 1
            pr_within += exact
            exp_partial += outcome
            row = PartialSumRow(depth, exact, pr_within, exp_partial, runtime, live, live == 0)
            if self.on_depth_completed:
                self.on_depth_completed(row)
            yield row
            runtime += ONE - pr_within

    def terminal_states(self, max_depth: int) -> List[State]:
        found: List[State] = []
        for level in self.levels(max_depth):
            found.extend(s for s in level if s.terminated)
        return found


def iter_partial_sums(program: Program, valuation: Optional[Valuation] = None, var: Optional[str] = None,
                      max_depth: Optional[int] = None, config: Optional[AnalysisConfig] = None,
                      on_depth_completed: Optional[Callable[[PartialSumRow], None]] = None
                      ) -> Iterator[PartialSumRow]:
    explorer = PartialSumExplorer(program, valuation, var, config)
    explorer.on_depth_completed = on_depth_completed
    return explorer.rows(max_depth)


def explore_partial_sums(program: Program, valuation: Optional[Valuation] = None, var: Optional[str] = None,
                         max_depth: int = 0, config: Optional[AnalysisConfig] = None,
                         on_depth_completed: Optional[Callable[[PartialSumRow], None]] = None
                         ) -> List[PartialSumRow]:
    """Rows for depths 0 .. max_depth."""
    if max_depth < 0:
        raise ValueError(f"max_depth must be non-negative, got {max_depth}")
    return list(iter_partial_sums(program, valuation, var, max_depth, config, on_depth_completed))


def terminal_states(program: Program, valuation: Optional[Valuation] = None, max_depth: int = 0,
                    config: Optional[AnalysisConfig] = None) -> List[State]:
    """Terminal states reached within max_depth steps, with their a and θ."""
    return PartialSumExplorer(program, valuation, None, config).terminal_states(max_depth)


def brute_force_partial_sums(program: Program, valuation: Optional[Valuation] = None, var: Optional[str] = None,
                     max_depth: int = 0) -> List[PartialSumRow]:
    """
    The same rows, computed by evaluating successor(k, σ, w) for every k and
    every word w over {L, R} of length at most k. Exponential; small depths only.
    """
    if max_depth < 0:
        raise ValueError(f"max_depth must be non-negative, got {max_depth}")
    start = initial_state(program, valuation)
    rows: List[PartialSumRow] = []
    pr_within = ZERO
    exp_partial = ZERO
    runtime = ZERO
    for k in range(max_depth + 1):
        exact = ZERO
        outcome = ZERO
        live = 0
        for length in range(k + 1):
            for letters in itertools.product("LR", repeat=length):
                reached = successor(k, start, "".join(letters))
                if reached is None:
                    continue
                if reached.terminated:
                    exact += alpha(reached)
                    if var is not None:
                        outcome += wp_weight(reached, var)
                else:
                    live += 1
        pr_within += exact
        exp_partial += outcome
        rows.append(PartialSumRow(k, exact, pr_within, exp_partial, runtime, live, live == 0))
        runtime += ONE - pr_within
    return rows


def _certify(rows: Iterable[PartialSumRow], measure: Callable[[PartialSumRow], Fraction],
             bound: Fraction) -> CertificateOutcome:
    last = None
    for row in rows:
        last = row
        value = measure(row)
        if value > bound:
            return Certified(row.depth, value)
        if row.exhausted:
            # an empty frontier freezes every series
            break
    return BudgetExhausted(last)


def _check_budget(budget: int):
    if budget < 0:
        raise ValueError(f"budget must be non-negative, got {budget}")


def certify_lower_expectation(program: Program, valuation: Optional[Valuation], var: str, q,
                              budget: int, config: Optional[AnalysisConfig] = None,
                              on_depth_completed: Optional[Callable[[PartialSumRow], None]] = None
                              ) -> CertificateOutcome:
    """Search for a depth y <= budget with q < exp_v_partial(y)."""
    q = Fraction(q)
    if q < 0:
        raise ValueError(f"bound must be non-negative, got {format_rational(q)}")
    _check_budget(budget)
    rows = iter_partial_sums(program, valuation, var, budget, config, on_depth_completed)
    return _certify(rows, lambda row: row.exp_v_partial, q)


def certify_lower_termination(program: Program, valuation: Optional[Valuation], p, budget: int,
                              config: Optional[AnalysisConfig] = None,
                              on_depth_completed: Optional[Callable[[PartialSumRow], None]] = None
                              ) -> CertificateOutcome:
    """Search for a depth y <= budget with p < pr_within(y)."""
    p = Fraction(p)
    if not 0 <= p < 1:
        raise ValueError(f"probability bound must lie in [0, 1), got {format_rational(p)}")
    _check_budget(budget)
    rows = iter_partial_sums(program, valuation, None, budget, config, on_depth_completed)
    return _certify(rows, lambda row: row.pr_within_k, p)


def certify_runtime_exceeds(program: Program, valuation: Optional[Valuation], c, budget: int,
                            config: Optional[AnalysisConfig] = None,
                            on_depth_completed: Optional[Callable[[PartialSumRow], None]] = None
                            ) -> CertificateOutcome:
    """Search for a depth y <= budget with c < runtime_partial(y)."""
    c = Fraction(c)
    if c < 0:
        raise ValueError(f"runtime bound must be non-negative, got {format_rational(c)}")
    _check_budget(budget)
    rows = iter_partial_sums(program, valuation, None, budget, config, on_depth_completed)
    return _certify(rows, lambda row: row.runtime_partial, c)


def rows_to_csv(rows: Iterable[PartialSumRow]) -> str:
    return "\n".join([CSV_HEADER] + [row.to_csv() for row in rows]) + "\n"
