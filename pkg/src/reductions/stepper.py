"""
Stepper compiler - one source-level step per dispatch round

flatten_to_stepper turns a choice-free program Q into program-counter form.
Every continuation Q can reach under the small-step rules becomes a numbered
location. One execution of the generated step block performs the action of
the current location and moves the program counter:

    assignment   v := e; pc := next
    guard        if (b) { pc := t } else { pc := f }      (while / if)
    pass         pc := next                              (skip, ↓; P)
    final        skip

Because the locations are exactly the continuations the semantics visits,
n rounds of the block mirror n steps of Q. The term flag is set together
with the move into the final location.
"""

from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Tuple, Union

from pgcl.core import (
    TERMINATED, Assign, BoolExpr, Choice, CmpOp, Continuation, If, NotOrdinaryProgramError, Program, Seq,
    Skip, Terminated, While, assign, compare, contains_choice, free_vars, pretty, sequence,
)

from .encoding import NameAllocator
from .fragments import input_decoder_gadget


@dataclass(frozen=True)
class OrdinaryProgram:
    """A program without probabilistic choice"""
    program: Program

    def __post_init__(self):
        if contains_choice(self.program):
            raise NotOrdinaryProgramError(f"Ordinary programs may not contain a choice: {pretty(self.program)}")

    @classmethod
    def coerce(cls, program: Union["OrdinaryProgram", Program]) -> "OrdinaryProgram":
        return program if isinstance(program, cls) else cls(program)


class LocationKind(Enum):
    ASSIGN = "assign"
    GUARD = "guard"
    PASS = "pass"


@dataclass(frozen=True)
class Location:
    index: int
    continuation: Continuation
    kind: LocationKind
    assignment: Optional[Assign]
    guard: Optional[BoolExpr]
    targets: Tuple[Continuation, ...]


@dataclass(frozen=True)
class StepperBundle:
    source: OrdinaryProgram
    init_template: Program
    step_block: Program
    pc_var: str
    term_var: str
    scratch_vars: Tuple[str, ...]
    location_count: int
    locations: Tuple[Location, ...]
    index_var: Optional[str] = None

    @property
    def final_location(self) -> int:
        return self.location_count

    def continuation_at(self, pc: int) -> Continuation:
        if pc == self.final_location:
            return TERMINATED
        return self.locations[pc].continuation

    def run_to_completion(self) -> Program:
        """InitQ; while (term = 0) { StepQ }"""
        return sequence(self.init_template, While(compare(CmpOp.EQ, self.term_var, 0), self.step_block))


def _symbolic_step(continuation: Continuation) -> Tuple[LocationKind, object, Tuple[Continuation, ...]]:
    """The rule that fires at a continuation, independent of the valuation."""
    if isinstance(continuation, Assign):
        return LocationKind.ASSIGN, continuation, (TERMINATED,)
    if isinstance(continuation, Skip):
        return LocationKind.PASS, None, (TERMINATED,)
    if isinstance(continuation, If):
        return LocationKind.GUARD, continuation.guard, (continuation.then_branch, continuation.else_branch)
    if isinstance(continuation, While):
        return LocationKind.GUARD, continuation.guard, (Seq(continuation.body, continuation), TERMINATED)
    if isinstance(continuation, Seq):
        if isinstance(continuation.first, Terminated):
            return LocationKind.PASS, None, (continuation.second,)
        kind, payload, targets = _symbolic_step(continuation.first)
        return kind, payload, tuple(Seq(t, continuation.second) for t in targets)
    if isinstance(continuation, Choice):
        raise NotOrdinaryProgramError("Cannot flatten a probabilistic choice")
    raise TypeError(f"Not a program: {continuation!r}")


def _locations(program: Program) -> List[Location]:
    index: Dict[Continuation, int] = {program: 0}
    order: List[Continuation] = [program]
    locations: List[Location] = []
    queue = deque([program])
    while queue:
        current = queue.popleft()
        kind, payload, targets = _symbolic_step(current)
        for target in targets:
            if not isinstance(target, Terminated) and target not in index:
                index[target] = len(order)
                order.append(target)
                queue.append(target)
        locations.append(Location(
            index=index[current],
            continuation=current,
            kind=kind,
            assignment=payload if kind is LocationKind.ASSIGN else None,
            guard=payload if kind is LocationKind.GUARD else None,
            targets=targets,
        ))
    locations.sort(key=lambda loc: loc.index)
    return locations


def flatten_to_stepper(source: Union[OrdinaryProgram, Program], index_var: Optional[str] = None,
                       names: Optional[NameAllocator] = None) -> StepperBundle:
    """
    Compile Q into InitQ / StepQ fragments.

    With `index_var`, InitQ first decodes that variable into Q's free
    variables (sorted by name) via the inverse Cantor tupling.
    """
    ordinary = OrdinaryProgram.coerce(source)
    program = ordinary.program
    source_vars = sorted(free_vars(program))
    if names is None:
        names = NameAllocator(source_vars + ([index_var] if index_var else []))
    else:
        names.reserve(source_vars)

    locations = _locations(program)
    count = len(locations)
    index = {loc.continuation: loc.index for loc in locations}
    pc = names.fresh("_pc")
    term = names.fresh("term")

    def jump(target: Continuation) -> Program:
        if isinstance(target, Terminated):
            return sequence(assign(pc, count), assign(term, 1))
        return assign(pc, index[target])

    def action(loc: Location) -> Program:
        if loc.kind is LocationKind.ASSIGN:
            return sequence(loc.assignment, jump(loc.targets[0]))
        if loc.kind is LocationKind.GUARD:
            return If(loc.guard, jump(loc.targets[0]), jump(loc.targets[1]))
        return jump(loc.targets[0])

    leaves = [action(loc) for loc in locations] + [Skip()]

    def dispatch(low: int, high: int) -> Program:
        if high - low == 1:
            return leaves[low]
        middle = (low + high) // 2
        return If(compare(CmpOp.LT, pc, middle), dispatch(low, middle), dispatch(middle, high))

    decoder = None
    scratch: List[str] = [pc]
    if index_var is not None and source_vars:
        before = len(names.allocated)
        decoder = input_decoder_gadget(source_vars, index_var, names)
        scratch.extend(names.allocated[before:])

    init_template = sequence(decoder, assign(pc, 0), assign(term, 0))
    return StepperBundle(
        source=ordinary,
        init_template=init_template,
        step_block=dispatch(0, count + 1),
        pc_var=pc,
        term_var=term,
        scratch_vars=tuple(scratch),
        location_count=count,
        locations=tuple(locations),
        index_var=index_var,
    )
