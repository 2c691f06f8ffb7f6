"""
pGCL Semantics - Small-Step Execution

Implements the operational semantics over exact rationals:
- step: one rule application (assign, concat1/2, prob1/2, while1/2, if, skip)
- successor: the state reached after exactly k steps along a choice word
- alpha / wp_weight: the weight functions used by the expectation series

States are immutable. The rules never read the path probability or the
choice word, so `branches` works on (continuation, valuation) pairs alone and
is shared with the chain extractor.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional, Tuple, Union

from .core import (
    ONE, TERMINATED, ZERO, Assign, Choice, Continuation, If, Program, Seq, Skip, Terminated, Valuation,
    While, eval_arith, eval_bool,
)

LEFT = "L"
RIGHT = "R"


@dataclass(frozen=True)
class State:
    """⟨continuation, valuation, path probability, choice word⟩"""
    continuation: Continuation
    valuation: Valuation
    probability: Fraction = ONE
    history: str = ""

    @property
    def terminated(self) -> bool:
        return isinstance(self.continuation, Terminated)


@dataclass(frozen=True)
class Terminal:
    """No rule applies: the state is terminated."""


@dataclass(frozen=True)
class Deterministic:
    next: State


@dataclass(frozen=True)
class Probabilistic:
    left: State
    right: State


StepResult = Union[Terminal, Deterministic, Probabilistic]
BottomOrState = Optional[State]

TERMINAL = Terminal()


class Branch(NamedTuple):
    """One outgoing edge of the quotiented step relation"""
    letter: str
    factor: Fraction
    continuation: Continuation
    valuation: Valuation


def branches(continuation: Continuation, valuation: Valuation) -> Tuple[Branch, ...]:
    """
    Successors of a (continuation, valuation) pair.

    Returns () for ↓, one branch with empty letter for deterministic rules,
    and an (L, R) pair for a probabilistic choice.
    """
    if isinstance(continuation, Terminated):
        return ()
    if isinstance(continuation, Assign):
        value = max(eval_arith(continuation.expr, valuation), ZERO)
        return (Branch("", ONE, TERMINATED, valuation.assign(continuation.var, value)),)
    if isinstance(continuation, Seq):
        if isinstance(continuation.first, Terminated):
            return (Branch("", ONE, continuation.second, valuation),)
        return tuple(
            Branch(b.letter, b.factor, Seq(b.continuation, continuation.second), b.valuation)
            for b in branches(continuation.first, valuation)
        )
    if isinstance(continuation, Choice):
        p = continuation.probability
        return (
            Branch(LEFT, p, continuation.left, valuation),
            Branch(RIGHT, ONE - p, continuation.right, valuation),
        )
    if isinstance(continuation, While):
        if eval_bool(continuation.guard, valuation):
            return (Branch("", ONE, Seq(continuation.body, continuation), valuation),)
        return (Branch("", ONE, TERMINATED, valuation),)
    if isinstance(continuation, If):
        taken = continuation.then_branch if eval_bool(continuation.guard, valuation) else continuation.else_branch
        return (Branch("", ONE, taken, valuation),)
    if isinstance(continuation, Skip):
        return (Branch("", ONE, TERMINATED, valuation),)
    raise TypeError(f"Not a program: {continuation!r}")


def _follow(state: State, branch: Branch) -> State:
    return State(
        branch.continuation,
        branch.valuation,
        state.probability * branch.factor,
        state.history + branch.letter,
    )


def initial_state(program: Program, valuation: Optional[Valuation] = None) -> State:
    """σ = ⟨P, η, 1, ε⟩"""
    return State(program, valuation if valuation is not None else Valuation())


def step(state: State) -> StepResult:
    """Apply exactly one inference rule."""
    moves = branches(state.continuation, state.valuation)
    if not moves:
        return TERMINAL
    if len(moves) == 1:
        return Deterministic(_follow(state, moves[0]))
    return Probabilistic(_follow(state, moves[0]), _follow(state, moves[1]))


def successor(k: int, state: State, word: str = "") -> BottomOrState:
    """
    State reached after exactly k rule applications whose probabilistic
    choices spell out `word`, or None (⊥) if no such run exists.
    """
    if k < 0:
        raise ValueError(f"Step count must be non-negative, got {k}")
    position = 0
    current = state
    for _ in range(k):
        result = step(current)
        if isinstance(result, Terminal):
            return None
        if isinstance(result, Deterministic):
            current = result.next
            continue
        if position >= len(word):
            return None
        letter = word[position]
        position += 1
        if letter == LEFT:
            current = result.left
        elif letter == RIGHT:
            current = result.right
        else:
            return None
    if position != len(word):
        return None
    return current


def alpha(state: BottomOrState) -> Fraction:
    """Path probability of a terminal state, 0 otherwise (⊥ included)."""
    if state is None or not state.terminated:
        return ZERO
    return state.probability


def wp_weight(state: BottomOrState, var: str) -> Fraction:
    """η(v)·a for a terminal state, 0 otherwise."""
    if state is None or not state.terminated:
        return ZERO
    return state.valuation[var] * state.probability


def run_deterministic(program: Continuation, valuation: Optional[Valuation] = None,
                      step_cap: int = 1_000_000) -> Tuple[State, int]:
    """
    Execute a choice-free program until it terminates or `step_cap` steps
    have been taken. Returns the final state and the number of steps.
    """
    if step_cap < 0:
        raise ValueError(f"step_cap must be non-negative, got {step_cap}")
    state = State(program, valuation if valuation is not None else Valuation())
    steps = 0
    while not state.terminated and steps < step_cap:
        result = step(state)
        if isinstance(result, Probabilistic):
            raise ValueError("run_deterministic reached a probabilistic choice")
        state = result.next
        steps += 1
    return state, steps
