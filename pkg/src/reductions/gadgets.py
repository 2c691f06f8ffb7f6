"""
Reduction gadgets - probabilistic programs that encode halting questions

Each builder maps an ordinary program Q (and, where the reduction needs one,
an input valuation η) to a probabilistic program together with the query
whose answer encodes a halting-style property of Q:

    lexp      Q halts on η                   <=>  E(v) > 1/2
    rexp      Q halts on every input         <=>  E(v) = 1  (never above 1)
    ast-exp   Pr(Q terminates on η) = 1      <=>  E(v) = 1
    uh-ast    Q halts on every input         <=>  almost-sure termination
    ast-uast  Q terminates a.s. on η         <=>  universal almost-sure termination
    past      Q diverges on some input       <=>  finite expected runtime
    upast     Q diverges on infinitely many  <=>  finite expected runtime on every input
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Optional, Tuple, Union

from pgcl.core import (
    And, Choice, CmpOp, If, Program, Valuation, While, add, assign, coin_flip, compare, format_rational,
    free_vars, pretty, program_size, sequence, sub,
)

from .encoding import NameAllocator
from .fragments import cheer_block, doubling_assignment, geometric_loop, load_valuation_prefix
from .stepper import OrdinaryProgram, flatten_to_stepper

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class ExpectationQuery:
    """Compare E(var) against bound"""
    var: str
    bound: Fraction

    def describe(self) -> str:
        return f"E({self.var}) against {format_rational(self.bound)}"


@dataclass(frozen=True)
class TerminationQuery:
    """AST, PAST, UAST or UPAST membership"""
    problem: str

    def describe(self) -> str:
        return f"{self.problem} membership"


Query = Union[ExpectationQuery, TerminationQuery]


@dataclass(frozen=True)
class GadgetOutput:
    name: str
    reduction: str
    program: Program
    query: Query
    valuation: Valuation = field(default_factory=Valuation)
    reserved: Tuple[str, ...] = ()
    index_var: Optional[str] = None
    notes: Tuple[str, ...] = ()

    def render(self) -> str:
        return pretty(self.program, multiline=True) + "\n"

    def render_notes(self) -> str:
        lines = [
            f"gadget: {self.name}",
            f"reduction: {self.reduction}",
            f"query: {self.query.describe()}",
            f"reserved: {', '.join(self.reserved) if self.reserved else 'none'}",
        ]
        if self.index_var:
            lines.append(f"index variable: {self.index_var}")
        if len(self.valuation):
            bindings = ", ".join(f"{k} = {format_rational(v)}" for k, v in self.valuation.items())
            lines.append(f"input valuation: {bindings}")
        lines.extend(self.notes)
        lines.append(f"statements: {program_size(self.program)}")
        return "\n".join(lines) + "\n"


def _allocator(program: Program, valuation: Optional[Valuation] = None) -> NameAllocator:
    taken = set(free_vars(program))
    if valuation is not None:
        taken.update(valuation.support())
    return NameAllocator(taken)


def _ordinary(source) -> Program:
    return OrdinaryProgram.coerce(source).program


def gadget_lexp(source, valuation: Optional[Valuation] = None) -> GadgetOutput:
    """v := 0; {v := 1} [1/2] {TQ; v := 1} where TQ loads η and runs Q."""
    q = _ordinary(source)
    eta = valuation if valuation is not None else Valuation()
    names = _allocator(q, eta)
    v = names.fresh("v")
    simulate = sequence(load_valuation_prefix(q, eta), q, assign(v, 1))
    program = sequence(assign(v, 0), Choice(assign(v, 1), HALF, simulate))
    return GadgetOutput(
        name="lexp",
        reduction="halting problem -> LEXP",
        program=program,
        query=ExpectationQuery(v, HALF),
        valuation=eta,
        reserved=tuple(names.allocated),
        notes=("E(v) = 1 when Q halts on the input valuation, 1/2 otherwise",),
    )


def gadget_rexp(source) -> GadgetOutput:
    """
    Two geometric loops pick an input index i and a step count k, each value
    with probability 1/2^(n+1). TQ then decodes input i, runs k - 1 stepper
    rounds, and if Q is still running performs round k; when that round
    terminates Q, v := 2^(k+1). Every halting input contributes exactly
    1/2^(i+1) to E(v).
    """
    q = _ordinary(source)
    names = _allocator(q)
    c = names.fresh("c")
    i = names.fresh("i")
    k = names.fresh("k")
    v = names.fresh("v")
    stepper = flatten_to_stepper(q, index_var=i, names=names)
    rounds = names.fresh("_r")

    def term_is(value: int):
        return compare(CmpOp.EQ, stepper.term_var, value)

    simulate = sequence(
        stepper.init_template,
        assign(rounds, k),
        While(compare(CmpOp.GT, rounds, 1), sequence(stepper.step_block, assign(rounds, sub(rounds, 1)))),
        If(
            And(compare(CmpOp.GT, k, 0), term_is(0)),
            sequence(stepper.step_block, If(term_is(1), doubling_assignment(v, k, names))),
        ),
    )
    program = sequence(
        geometric_loop(i, c),
        geometric_loop(k, c),
        assign(v, 0),
        simulate,
    )
    return GadgetOutput(
        name="rexp",
        reduction="universal halting problem -> REXP / EXP",
        program=program,
        query=ExpectationQuery(v, Fraction(1)),
        reserved=tuple(names.allocated),
        index_var=i,
        notes=(
            "Pr(i, k) = 1/2^(i+k+2); v = 2^(k+1) exactly when Q halts on input i after k steps",
            f"stepper locations: {stepper.location_count}",
        ),
    )


def gadget_ast_to_exp(source: Program, valuation: Optional[Valuation] = None) -> GadgetOutput:
    """v := 0; Q; v := 1 - E(v) equals the termination probability of Q."""
    eta = valuation if valuation is not None else Valuation()
    names = _allocator(source, eta)
    v = names.fresh("v")
    program = sequence(assign(v, 0), source, assign(v, 1))
    return GadgetOutput(
        name="ast-exp",
        reduction="AST -> EXP",
        program=program,
        query=ExpectationQuery(v, Fraction(1)),
        valuation=eta,
        reserved=tuple(names.allocated),
    )


def gadget_uh_to_ast(source) -> GadgetOutput:
    """Geometric loop on i, then run Q to completion on input number i."""
    q = _ordinary(source)
    names = _allocator(q)
    c = names.fresh("c")
    i = names.fresh("i")
    stepper = flatten_to_stepper(q, index_var=i, names=names)
    program = sequence(geometric_loop(i, c), stepper.run_to_completion())
    return GadgetOutput(
        name="uh-ast",
        reduction="universal halting problem -> AST",
        program=program,
        query=TerminationQuery("AST"),
        reserved=tuple(names.allocated),
        index_var=i,
        notes=(f"stepper locations: {stepper.location_count}",),
    )


def gadget_ast_to_uast(source: Program, valuation: Optional[Valuation] = None) -> GadgetOutput:
    """Overwrite every input variable with η, then run Q."""
    eta = valuation if valuation is not None else Valuation()
    program = sequence(load_valuation_prefix(source, eta), source)
    return GadgetOutput(
        name="ast-uast",
        reduction="AST -> UAST",
        program=program,
        query=TerminationQuery("UAST"),
        valuation=eta,
    )


def _runtime_gadget(q: Program, reset_index: bool, cheer_width: int) -> Tuple[Program, NameAllocator, str, int]:
    names = _allocator(q)
    c = names.fresh("c")
    i = names.fresh("i")
    x = names.fresh("x")
    stepper = flatten_to_stepper(q, index_var=i, names=names)
    term = stepper.term_var
    cheer = cheer_block(x, names, cheer_width)

    body = sequence(
        stepper.step_block,
        If(
            compare(CmpOp.EQ, term, 1),
            sequence(cheer, assign(i, add(i, 1)), assign(term, 0), stepper.init_template),
        ),
        coin_flip(c),
        assign(x, add(x, 1)),
    )
    program = sequence(
        assign(c, 1),
        assign(i, 0) if reset_index else None,
        assign(x, 0),
        assign(term, 0),
        stepper.init_template,
        While(compare(CmpOp.NE, c, 0), body),
    )
    return program, names, i, stepper.location_count


def gadget_past(source, cheer_width: int = 1) -> GadgetOutput:
    """
    Simulate Q on inputs 0, 1, 2, ... one step per loop iteration, tossing a
    coin after every step. Whenever a simulation halts, cheer for about 2^x
    steps (x = iterations so far). The expected runtime is finite exactly
    when some input makes Q diverge.
    """
    program, names, i, locations = _runtime_gadget(_ordinary(source), True, cheer_width)
    return GadgetOutput(
        name="past",
        reduction="co-universal halting problem -> PAST",
        program=program,
        query=TerminationQuery("PAST"),
        reserved=tuple(names.allocated),
        index_var=i,
        notes=(f"cheer width: {cheer_width}", f"stepper locations: {locations}"),
    )


def gadget_upast(source, cheer_width: int = 1) -> GadgetOutput:
    """The past gadget without `i := 0`: the first simulated input comes from the valuation."""
    program, names, i, locations = _runtime_gadget(_ordinary(source), False, cheer_width)
    return GadgetOutput(
        name="upast",
        reduction="co-cofiniteness problem -> UPAST",
        program=program,
        query=TerminationQuery("UPAST"),
        reserved=tuple(names.allocated),
        index_var=i,
        notes=(f"cheer width: {cheer_width}", f"stepper locations: {locations}"),
    )


GadgetBuilder = Callable[[Program, Valuation], GadgetOutput]

GADGETS: Dict[str, GadgetBuilder] = {
    "lexp": lambda q, eta: gadget_lexp(q, eta),
    "rexp": lambda q, eta: gadget_rexp(q),
    "ast-exp": lambda q, eta: gadget_ast_to_exp(q, eta),
    "uh-ast": lambda q, eta: gadget_uh_to_ast(q),
    "ast-uast": lambda q, eta: gadget_ast_to_uast(q, eta),
    "past": lambda q, eta: gadget_past(q),
    "upast": lambda q, eta: gadget_upast(q),
}


def build_gadget(name: str, source: Program, valuation: Optional[Valuation] = None) -> GadgetOutput:
    if name not in GADGETS:
        raise ValueError(f"Unknown gadget {name!r}; choose from {', '.join(GADGETS)}")
    return GADGETS[name](source, valuation if valuation is not None else Valuation())
