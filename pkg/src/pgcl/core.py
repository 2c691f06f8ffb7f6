"""
pGCL Core - Abstract Syntax, Values and Evaluation

Building blocks shared by every other package:
- exact non-negative rationals (fractions.Fraction) and their text form
- Valuation: finite-support map from variable names to rationals >= 0
- arithmetic and Boolean expression trees with exact evaluation
- program trees: assignment, sequencing, probabilistic choice, while,
  plus the if/skip plumbing nodes used by generated programs

All nodes are frozen dataclasses, so trees are hashable values that can be
shared between threads and used as dictionary keys.
"""

import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, FrozenSet, Iterator, List, Mapping, Optional, Set, Tuple, Union

Rational = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)

_RATIONAL_PATTERN = re.compile(r"^\s*(\d+)(?:/(\d+)|\.(\d+))?\s*$")


class NotOrdinaryProgramError(ValueError):
    """Raised when a choice-free program is required but a choice was found"""


def parse_rational(text: str) -> Fraction:
    """Parse `INT`, `INT/INT` or a decimal such as `0.5` exactly."""
    match = _RATIONAL_PATTERN.match(text)
    if not match:
        raise ValueError(f"Invalid rational literal: {text!r}")
    whole, denominator, decimals = match.groups()
    if denominator is not None:
        if int(denominator) == 0:
            raise ValueError(f"Zero denominator in rational literal: {text!r}")
        return Fraction(int(whole), int(denominator))
    if decimals is not None:
        return Fraction(int(whole + decimals), 10 ** len(decimals))
    return Fraction(int(whole))


def format_rational(value) -> str:
    """Canonical text: `INT` when integral, `INT/INT` otherwise."""
    return str(Fraction(value))


class Valuation:
    """
    Immutable variable valuation with finite support.

    Unbound names read as 0 and zero-valued bindings are never stored, so two
    valuations are equal exactly when they agree on every variable.
    """

    __slots__ = ("_bindings", "_hash")

    def __init__(self, bindings: Optional[Mapping[str, object]] = None):
        stored: Dict[str, Fraction] = {}
        for name, value in (bindings or {}).items():
            number = Fraction(value)
            if number < 0:
                raise ValueError(f"Variable {name} must be non-negative, got {format_rational(number)}")
            if number != 0:
                stored[name] = number
        self._bindings = dict(sorted(stored.items()))
        self._hash = hash(frozenset(self._bindings.items()))

    def __getitem__(self, name: str) -> Fraction:
        return self._bindings.get(name, ZERO)

    def lookup(self, name: str) -> Fraction:
        return self[name]

    def assign(self, name: str, value) -> "Valuation":
        """Return a copy with `name` bound to `value` (η[name ↦ value])."""
        updated = dict(self._bindings)
        updated[name] = Fraction(value)
        return Valuation(updated)

    def project(self, names) -> "Valuation":
        wanted = set(names)
        return Valuation({k: v for k, v in self._bindings.items() if k in wanted})

    def support(self) -> Tuple[str, ...]:
        return tuple(self._bindings)

    def items(self) -> List[Tuple[str, Fraction]]:
        return list(self._bindings.items())

    def as_dict(self) -> Dict[str, Fraction]:
        return dict(self._bindings)

    def __iter__(self) -> Iterator[str]:
        return iter(self._bindings)

    def __len__(self) -> int:
        return len(self._bindings)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Valuation):
            return NotImplemented
        return self._bindings == other._bindings

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}={format_rational(v)}" for k, v in self._bindings.items())
        return f"Valuation({{{inner}}})"


EMPTY_VALUATION = Valuation()


# ---------------------------------------------------------------------------
# Arithmetic expressions
# ---------------------------------------------------------------------------

class ArithOp(Enum):
    ADD = "+"
    SUB = "-"
    MUL = "*"


@dataclass(frozen=True)
class Const:
    value: Fraction

    def __post_init__(self):
        number = Fraction(self.value)
        if number < 0:
            raise ValueError(f"Literals must be non-negative, got {format_rational(number)}")
        object.__setattr__(self, "value", number)


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class BinOp:
    op: ArithOp
    left: "ArithExpr"
    right: "ArithExpr"


ArithExpr = Union[Const, Var, BinOp]


# ---------------------------------------------------------------------------
# Boolean expressions
# ---------------------------------------------------------------------------

class CmpOp(Enum):
    EQ = "="
    NE = "!="
    LT = "<"
    LE = "<="
    GT = ">"
    GE = ">="


@dataclass(frozen=True)
class Compare:
    op: CmpOp
    left: ArithExpr
    right: ArithExpr


@dataclass(frozen=True)
class And:
    left: "BoolExpr"
    right: "BoolExpr"


@dataclass(frozen=True)
class Or:
    left: "BoolExpr"
    right: "BoolExpr"


@dataclass(frozen=True)
class Not:
    operand: "BoolExpr"


BoolExpr = Union[Compare, And, Or, Not]


# ---------------------------------------------------------------------------
# Programs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Assign:
    var: str
    expr: ArithExpr


@dataclass(frozen=True)
class Seq:
    first: "Continuation"
    second: "Program"


@dataclass(frozen=True)
class Choice:
    left: "Program"
    probability: Fraction
    right: "Program"

    def __post_init__(self):
        p = Fraction(self.probability)
        if not 0 <= p <= 1:
            raise ValueError(f"Choice probability must lie in [0, 1], got {format_rational(p)}")
        object.__setattr__(self, "probability", p)


@dataclass(frozen=True)
class While:
    guard: BoolExpr
    body: "Program"


@dataclass(frozen=True)
class Skip:
    pass


@dataclass(frozen=True)
class If:
    guard: BoolExpr
    then_branch: "Program"
    else_branch: "Program" = Skip()


@dataclass(frozen=True)
class Terminated:
    """The terminated continuation ↓"""

    def __repr__(self) -> str:
        return "↓"


TERMINATED = Terminated()

Program = Union[Assign, Seq, Choice, While, If, Skip]
Continuation = Union[Program, Terminated]


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def eval_arith(expr: ArithExpr, valuation: Valuation) -> Fraction:
    """Evaluate over ℚ; results may be negative (clamping belongs to assignment)."""
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Var):
        return valuation[expr.name]
    left = eval_arith(expr.left, valuation)
    right = eval_arith(expr.right, valuation)
    if expr.op is ArithOp.ADD:
        return left + right
    if expr.op is ArithOp.SUB:
        return left - right
    return left * right


_COMPARISONS = {
    CmpOp.EQ: lambda a, b: a == b,
    CmpOp.NE: lambda a, b: a != b,
    CmpOp.LT: lambda a, b: a < b,
    CmpOp.LE: lambda a, b: a <= b,
    CmpOp.GT: lambda a, b: a > b,
    CmpOp.GE: lambda a, b: a >= b,
}


def eval_bool(expr: BoolExpr, valuation: Valuation) -> bool:
    if isinstance(expr, Compare):
        return _COMPARISONS[expr.op](eval_arith(expr.left, valuation), eval_arith(expr.right, valuation))
    if isinstance(expr, And):
        return eval_bool(expr.left, valuation) and eval_bool(expr.right, valuation)
    if isinstance(expr, Or):
        return eval_bool(expr.left, valuation) or eval_bool(expr.right, valuation)
    return not eval_bool(expr.operand, valuation)


# ---------------------------------------------------------------------------
# Structural queries
# ---------------------------------------------------------------------------

def _arith_vars(expr: ArithExpr, out: Set[str]):
    if isinstance(expr, Var):
        out.add(expr.name)
    elif isinstance(expr, BinOp):
        _arith_vars(expr.left, out)
        _arith_vars(expr.right, out)


def _bool_vars(expr: BoolExpr, out: Set[str]):
    if isinstance(expr, Compare):
        _arith_vars(expr.left, out)
        _arith_vars(expr.right, out)
    elif isinstance(expr, Not):
        _bool_vars(expr.operand, out)
    else:
        _bool_vars(expr.left, out)
        _bool_vars(expr.right, out)


def _program_vars(program: Continuation, out: Set[str]):
    if isinstance(program, Assign):
        out.add(program.var)
        _arith_vars(program.expr, out)
    elif isinstance(program, Seq):
        _program_vars(program.first, out)
        _program_vars(program.second, out)
    elif isinstance(program, Choice):
        _program_vars(program.left, out)
        _program_vars(program.right, out)
    elif isinstance(program, While):
        _bool_vars(program.guard, out)
        _program_vars(program.body, out)
    elif isinstance(program, If):
        _bool_vars(program.guard, out)
        _program_vars(program.then_branch, out)
        _program_vars(program.else_branch, out)


def free_vars(program: Continuation) -> FrozenSet[str]:
    """Every variable occurring syntactically in the program"""
    found: Set[str] = set()
    _program_vars(program, found)
    return frozenset(found)


def contains_choice(program: Continuation) -> bool:
    if isinstance(program, Choice):
        return True
    if isinstance(program, Seq):
        return contains_choice(program.first) or contains_choice(program.second)
    if isinstance(program, While):
        return contains_choice(program.body)
    if isinstance(program, If):
        return contains_choice(program.then_branch) or contains_choice(program.else_branch)
    return False


def program_size(program: Continuation) -> int:
    """Number of statement nodes"""
    if isinstance(program, Seq):
        return 1 + program_size(program.first) + program_size(program.second)
    if isinstance(program, Choice):
        return 1 + program_size(program.left) + program_size(program.right)
    if isinstance(program, While):
        return 1 + program_size(program.body)
    if isinstance(program, If):
        return 1 + program_size(program.then_branch) + program_size(program.else_branch)
    return 1


def statements(program: Program) -> List[Program]:
    """Flatten the right spine of a sequence into its statements."""
    result = []
    while isinstance(program, Seq):
        result.append(program.first)
        program = program.second
    result.append(program)
    return result


# ---------------------------------------------------------------------------
# Builders (used by the gadget generators)
# ---------------------------------------------------------------------------

ExprLike = Union[ArithExpr, str, int, Fraction]


def expr(value: ExprLike) -> ArithExpr:
    """Coerce names to Var and numbers to Const."""
    if isinstance(value, (Const, Var, BinOp)):
        return value
    if isinstance(value, str):
        return Var(value)
    return Const(Fraction(value))


def add(left: ExprLike, right: ExprLike) -> BinOp:
    return BinOp(ArithOp.ADD, expr(left), expr(right))


def sub(left: ExprLike, right: ExprLike) -> BinOp:
    return BinOp(ArithOp.SUB, expr(left), expr(right))


def mul(left: ExprLike, right: ExprLike) -> BinOp:
    return BinOp(ArithOp.MUL, expr(left), expr(right))


def compare(op: CmpOp, left: ExprLike, right: ExprLike) -> Compare:
    return Compare(op, expr(left), expr(right))


def assign(var: str, value: ExprLike) -> Assign:
    return Assign(var, expr(value))


def sequence(*programs: Optional[Program]) -> Program:
    """
    Right-associated sequence of the given programs.

    Nested sequences are flattened first (left-nested ones included) and
    `None` entries dropped, so the result has the same shape the parser
    produces for `A; B; C`.
    """
    flat: List[Program] = []
    pending = [p for p in reversed(programs) if p is not None]
    while pending:
        program = pending.pop()
        if isinstance(program, Seq):
            pending.extend([program.second, program.first])
        else:
            flat.append(program)
    if not flat:
        return Skip()
    result = flat[-1]
    for program in reversed(flat[:-1]):
        result = Seq(program, result)
    return result


def coin_flip(var: str, probability=Fraction(1, 2)) -> Choice:
    """`{var := 0} [p] {var := 1}`"""
    return Choice(assign(var, 0), Fraction(probability), assign(var, 1))


# ---------------------------------------------------------------------------
# Pretty printing
# ---------------------------------------------------------------------------

_ARITH_PRECEDENCE = {ArithOp.ADD: 1, ArithOp.SUB: 1, ArithOp.MUL: 2}
_ATOM = 3
INDENT = "    "


def _arith_precedence(e: ArithExpr) -> int:
    return _ARITH_PRECEDENCE[e.op] if isinstance(e, BinOp) else _ATOM


def format_arith(e: ArithExpr) -> str:
    if isinstance(e, Const):
        return format_rational(e.value)
    if isinstance(e, Var):
        return e.name
    precedence = _ARITH_PRECEDENCE[e.op]
    left = format_arith(e.left)
    if _arith_precedence(e.left) < precedence:
        left = f"({left})"
    right = format_arith(e.right)
    # the parser folds left, so an equal-precedence right operand needs parentheses
    if _arith_precedence(e.right) <= precedence:
        right = f"({right})"
    return f"{left} {e.op.value} {right}"


def _bool_precedence(e: BoolExpr) -> int:
    if isinstance(e, Or):
        return 1
    if isinstance(e, And):
        return 2
    return _ATOM


def format_bool(e: BoolExpr) -> str:
    if isinstance(e, Compare):
        return f"{format_arith(e.left)} {e.op.value} {format_arith(e.right)}"
    if isinstance(e, Not):
        return f"!({format_bool(e.operand)})"
    precedence = _bool_precedence(e)
    symbol = "||" if isinstance(e, Or) else "&&"
    left = format_bool(e.left)
    if _bool_precedence(e.left) < precedence:
        left = f"({left})"
    right = format_bool(e.right)
    if _bool_precedence(e.right) <= precedence:
        right = f"({right})"
    return f"{left} {symbol} {right}"


def _inline(program: Continuation) -> str:
    if isinstance(program, Terminated):
        return "↓"
    if isinstance(program, Assign):
        return f"{program.var} := {format_arith(program.expr)}"
    if isinstance(program, Skip):
        return "skip"
    if isinstance(program, Seq):
        return f"{_inline(program.first)}; {_inline(program.second)}"
    if isinstance(program, Choice):
        return f"{{{_inline(program.left)}}} [{format_rational(program.probability)}] {{{_inline(program.right)}}}"
    if isinstance(program, While):
        return f"while ({format_bool(program.guard)}) {{ {_inline(program.body)} }}"
    text = f"if ({format_bool(program.guard)}) {{ {_inline(program.then_branch)} }}"
    if not isinstance(program.else_branch, Skip):
        text += f" else {{ {_inline(program.else_branch)} }}"
    return text


def _indented(program: Program, depth: int) -> List[str]:
    return [INDENT + line for line in _layout(program, depth)]


def _layout(program: Continuation, depth: int = 0) -> List[str]:
    if isinstance(program, Seq):
        parts = statements(program) if not isinstance(program.first, Seq) else [program.first, program.second]
        lines: List[str] = []
        for index, part in enumerate(parts):
            block = _layout(part, depth)
            if index < len(parts) - 1:
                block[-1] += ";"
            lines.extend(block)
        return lines
    if isinstance(program, Choice):
        return (
            ["{"] + _indented(program.left, depth + 1)
            + [f"}} [{format_rational(program.probability)}] {{"]
            + _indented(program.right, depth + 1) + ["}"]
        )
    if isinstance(program, While):
        return [f"while ({format_bool(program.guard)}) {{"] + _indented(program.body, depth + 1) + ["}"]
    if isinstance(program, If):
        lines = [f"if ({format_bool(program.guard)}) {{"] + _indented(program.then_branch, depth + 1)
        if isinstance(program.else_branch, Skip):
            return lines + ["}"]
        return lines + ["} else {"] + _indented(program.else_branch, depth + 1) + ["}"]
    return [_inline(program)]


def pretty(program: Continuation, multiline: bool = False) -> str:
    """
    Canonical concrete syntax for a program.

    The single-line form is the default; `multiline=True` lays statements out
    one per line with four-space indentation. Both forms parse back to the
    same tree for right-nested sequences, the shape the parser and
    `sequence` build; a left-nested Seq prints flat and reparses right-nested.
    """
    if multiline:
        return "\n".join(_layout(program))
    return _inline(program)
