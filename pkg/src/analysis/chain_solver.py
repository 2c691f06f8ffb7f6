"""
Finite-Chain Solver - exact answers for finite-state programs

The step relation never reads the path probability or the choice word, so
identifying states with equal (continuation, valuation) yields an absorbing
Markov chain that is bisimilar to the computation tree. When the reachable
part is finite, termination probability, expected outcomes and expected
runtime are the solutions of linear systems, solved here exactly.
"""

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

from pgcl.core import ONE, ZERO, Continuation, Program, Valuation, format_rational
from pgcl.semantics import branches

from .config import DEFAULT_CONFIG, AnalysisConfig
from .linalg import solve_exact


class StateCapExceeded(RuntimeError):
    """The reachable state space is (or looks) infinite."""

    def __init__(self, cap: int, discovered: int):
        self.cap = cap
        self.discovered = discovered
        super().__init__(f"Chain extraction stopped after {discovered} states (cap {cap})")


class Unbounded(Enum):
    INFINITE = "INFINITE"


INFINITE = Unbounded.INFINITE


@dataclass
class FiniteChain:
    """States are numbered in discovery order; index 0 is the start."""
    states: List[Tuple[Continuation, Valuation]]
    start: int
    transitions: Dict[int, List[Tuple[int, Fraction]]]
    terminals: Dict[int, Valuation]

    @property
    def size(self) -> int:
        return len(self.states)

    def is_terminal(self, index: int) -> bool:
        return index in self.terminals

    def row_sum(self, index: int) -> Fraction:
        return sum((p for _, p in self.transitions.get(index, [])), ZERO)


@dataclass(frozen=True)
class SolveResult:
    termination_probability: Fraction
    expected_outcomes: Dict[str, Fraction]
    expected_steps: Union[Fraction, Unbounded]
    ast: bool
    past: bool
    chain: FiniteChain = field(repr=False, compare=False)


@dataclass(frozen=True)
class BoundVerdict:
    """Membership of (P, η, v, q) in the three expectation problems"""
    lexp: bool     # q < E(v)
    rexp: bool     # q > E(v)
    exp: bool      # q = E(v)


def extract_chain(program: Program, valuation: Optional[Valuation] = None,
                  state_cap: Optional[int] = None,
                  on_state_discovered: Optional[Callable[[int], None]] = None) -> FiniteChain:
    """
    Breadth-first closure of the quotiented step graph.

    Zero-probability branches are dropped and branches reaching the same
    state are merged into one transition.
    """
    cap = state_cap if state_cap is not None else DEFAULT_CONFIG.state_cap
    if cap < 1:
        raise ValueError(f"state_cap must be at least 1, got {cap}")
    start = (program, valuation if valuation is not None else Valuation())
    index: Dict[Tuple[Continuation, Valuation], int] = {start: 0}
    states = [start]
    transitions: Dict[int, List[Tuple[int, Fraction]]] = {}
    terminals: Dict[int, Valuation] = {}
    queue = deque([0])

    while queue:
        current = queue.popleft()
        continuation, eta = states[current]
        moves = branches(continuation, eta)
        if not moves:
            terminals[current] = eta
            continue
        row: Dict[int, Fraction] = {}
        for move in moves:
            if move.factor == 0:
                continue
            target = (move.continuation, move.valuation)
            if target not in index:
                if len(states) >= cap:
                    raise StateCapExceeded(cap, len(states))
                index[target] = len(states)
                states.append(target)
                queue.append(index[target])
                if on_state_discovered:
                    on_state_discovered(index[target])
            target_index = index[target]
            row[target_index] = row.get(target_index, ZERO) + move.factor
        transitions[current] = list(row.items())

    return FiniteChain(states, 0, transitions, terminals)


def _can_reach_terminal(chain: FiniteChain) -> Set[int]:
    predecessors: Dict[int, List[int]] = {}
    for source, row in chain.transitions.items():
        for target, _ in row:
            predecessors.setdefault(target, []).append(source)
    reached = set(chain.terminals)
    queue = deque(reached)
    while queue:
        current = queue.popleft()
        for source in predecessors.get(current, []):
            if source not in reached:
                reached.add(source)
                queue.append(source)
    return reached


def _solve_absorbing(chain: FiniteChain, terminal_reward: Callable[[int], Fraction]) -> List[Fraction]:
    """
    Least solution of x_s = Σ_t P(s,t)·x_t with x = reward on terminals.

    States that cannot reach a terminal are fixed to 0; on the remaining
    transient states I - Q is invertible.
    """
    solution = [ZERO] * chain.size
    for t in chain.terminals:
        solution[t] = terminal_reward(t)
    alive = _can_reach_terminal(chain)
    transient = [s for s in range(chain.size) if s in alive and s not in chain.terminals]
    position = {s: i for i, s in enumerate(transient)}
    matrix = [[ZERO] * len(transient) for _ in transient]
    rhs = [ZERO] * len(transient)
    for s in transient:
        i = position[s]
        matrix[i][i] += ONE
        for t, p in chain.transitions[s]:
            if t in chain.terminals:
                rhs[i] += p * solution[t]
            elif t in position:
                matrix[i][position[t]] -= p
    for s, value in zip(transient, solve_exact(matrix, rhs)):
        solution[s] = value
    return solution


def absorption_probabilities(chain: FiniteChain) -> List[Fraction]:
    """Per-state probability of eventually reaching a terminal state."""
    return _solve_absorbing(chain, lambda t: ONE)


def expected_outcomes_exact(chain: FiniteChain, variables: Iterable[str]) -> Dict[str, Fraction]:
    return {v: expected_outcome_exact(chain, v) for v in variables}


def expected_outcome_exact(chain: FiniteChain, var: str) -> Fraction:
    """Σ over terminals of (absorption probability into t) · η_t(v), from the start state."""
    values = _solve_absorbing(chain, lambda t: chain.terminals[t][var])
    return values[chain.start]


def expected_steps_exact(chain: FiniteChain,
                         absorption: Optional[Sequence[Fraction]] = None) -> Union[Fraction, Unbounded]:
    """Expected number of steps to absorption, or INFINITE if some state may never get there."""
    if absorption is None:
        absorption = absorption_probabilities(chain)
    if any(value < 1 for value in absorption):
        return INFINITE
    transient = [s for s in range(chain.size) if s not in chain.terminals]
    position = {s: i for i, s in enumerate(transient)}
    matrix = [[ZERO] * len(transient) for _ in transient]
    rhs = [ONE] * len(transient)
    for s in transient:
        i = position[s]
        matrix[i][i] += ONE
        for t, p in chain.transitions[s]:
            if t in position:
                matrix[i][position[t]] -= p
    hitting = solve_exact(matrix, rhs)
    if chain.start in chain.terminals:
        return ZERO
    return hitting[position[chain.start]]


def solve_chain(chain: FiniteChain, variables: Iterable[str] = ()) -> SolveResult:
    absorption = absorption_probabilities(chain)
    termination = absorption[chain.start]
    steps = expected_steps_exact(chain, absorption)
    return SolveResult(
        termination_probability=termination,
        expected_outcomes=expected_outcomes_exact(chain, variables),
        expected_steps=steps,
        ast=termination == 1,
        past=steps is not INFINITE,
        chain=chain,
    )


def decide_ast_past_finite(program: Program, valuation: Optional[Valuation] = None,
                           state_cap: Optional[int] = None, variables: Iterable[str] = (),
                           config: Optional[AnalysisConfig] = None) -> SolveResult:
    """
    Decide almost-sure and positive almost-sure termination on a
    finite-state program. Raises StateCapExceeded otherwise.
    """
    if state_cap is None:
        state_cap = (config or DEFAULT_CONFIG).state_cap
    chain = extract_chain(program, valuation, state_cap)
    return solve_chain(chain, variables)


def decide_expectation_bound(result: SolveResult, var: str, q) -> BoundVerdict:
    """
    Exact LEXP / REXP / EXP membership: the pair (v, q) is in EXP exactly
    when it is in neither strict-bound problem.
    """
    q = Fraction(q)
    value = result.expected_outcomes.get(var)
    if value is None:
        value = expected_outcome_exact(result.chain, var)
    lexp = q < value
    rexp = q > value
    return BoundVerdict(lexp=lexp, rexp=rexp, exp=not lexp and not rexp)


def dump_chain(chain: FiniteChain) -> str:
    """One `src dst INT/INT` line per transition."""
    lines = []
    for source in range(chain.size):
        for target, p in chain.transitions.get(source, []):
            lines.append(f"{source} {target} {format_rational(p)}")
    return "\n".join(lines) + ("\n" if lines else "")


def format_steps(value: Union[Fraction, Unbounded]) -> str:
    return value.value if value is INFINITE else format_rational(value)
