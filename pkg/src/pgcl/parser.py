"""
pGCL Parser - Concrete Syntax

Turns UTF-8 program text into core program trees using a Lark LALR grammar:

    prog := stmt (';' stmt)* [';']
    stmt := NAME ':=' aexp
          | '{' prog '}' '[' RAT ']' '{' prog '}'
          | 'while' '(' bexp ')' '{' prog '}'
          | 'if' '(' bexp ')' '{' prog '}' ['else' '{' prog '}']
          | 'skip'

Keywords are case-insensitive and reserved. `//` starts a comment running to
the end of the line. Sequences associate to the right.
"""

import functools
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import lark
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken, VisitError

from .core import (
    And, ArithOp, Assign, BinOp, Choice, CmpOp, Compare, Const, If, Not, Or, Program, Skip, Valuation,
    Var, While, format_rational, parse_rational, sequence,
)

KEYWORDS = frozenset({"while", "if", "else", "skip", "and", "or", "not"})

_PROGRAM_GRAMMAR = r"""
    start: prog

    prog: stmt (";" stmt)* ";"?

    ?stmt: NAME ":=" aexp                                         -> assign
         | "{" prog "}" "[" RAT "]" "{" prog "}"                  -> choice
         | WHILE "(" bexp ")" "{" prog "}"                        -> while_loop
         | IF "(" bexp ")" "{" prog "}" (ELSE "{" prog "}")?      -> conditional
         | SKIP                                                   -> skip

    ?aexp: aexp "+" term                                          -> add
         | aexp "-" term                                          -> sub
         | term

    ?term: term MUL factor                                        -> mul
         | factor

    ?factor: RAT                                                  -> const
           | NAME                                                 -> var
           | "(" aexp ")"

    ?bexp: bexp OR bconj                                          -> disjunction
         | bconj

    ?bconj: bconj AND bneg                                        -> conjunction
          | bneg

    ?bneg: NOT bneg                                               -> negation
         | batom

    ?batom: aexp CMP aexp                                         -> comparison
          | "(" bexp ")"

    WHILE.2: /(?i:while)\b/
    IF.2: /(?i:if)\b/
    ELSE.2: /(?i:else)\b/
    SKIP.2: /(?i:skip)\b/
    AND.2: /(?i:and)\b|&&|∧/
    OR.2: /(?i:or)\b|\|\||∨/
    NOT.2: /(?i:not)\b|!|¬/

    CMP: "<=" | ">=" | "!=" | "==" | "≠" | "≤" | "≥" | "=" | "<" | ">"
    MUL: "*" | "·"
    RAT: /\d+\/\d+|\d+\.\d+|\d+/
    NAME: /[A-Za-z_][A-Za-z0-9_]*/

    COMMENT: /\/\/[^\n]*/

    %import common.WS
    %ignore WS
    %ignore COMMENT
"""

_VALUATION_GRAMMAR = r"""
    start: binding*

    binding: NAME "=" RAT

    RAT: /\d+\/\d+|\d+\.\d+|\d+/
    NAME: /[A-Za-z_][A-Za-z0-9_]*/
    COMMENT: /\/\/[^\n]*/

    %import common.WS
    %ignore WS
    %ignore COMMENT
"""

_CMP_SYMBOLS = {
    "=": CmpOp.EQ, "==": CmpOp.EQ,
    "!=": CmpOp.NE, "≠": CmpOp.NE,
    "<": CmpOp.LT,
    "<=": CmpOp.LE, "≤": CmpOp.LE,
    ">": CmpOp.GT,
    ">=": CmpOp.GE, "≥": CmpOp.GE,
}


class ParseError(ValueError):
    """Malformed program or valuation text, with a 1-based position"""

    def __init__(self, message: str, line: int, column: int, expected: Tuple[str, ...] = ()):
        self.message = message
        self.line = line
        self.column = column
        self.expected = tuple(expected)
        detail = f"{line}:{column}: {message}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)


@functools.cache
def _program_parser() -> lark.Lark:
    return lark.Lark(_PROGRAM_GRAMMAR, parser="lalr", propagate_positions=True)


@functools.cache
def _valuation_parser() -> lark.Lark:
    return lark.Lark(_VALUATION_GRAMMAR, parser="lalr", propagate_positions=True)


def _error_at(token: lark.Token, message: str) -> ParseError:
    return ParseError(message, token.line, token.column)


def _rational(token: lark.Token) -> Fraction:
    try:
        return parse_rational(str(token))
    except ValueError as exc:
        raise _error_at(token, str(exc)) from None


def _name(token: lark.Token) -> str:
    if token.lower() in KEYWORDS:
        raise _error_at(token, f"reserved keyword {str(token)!r} cannot be used as a variable")
    return str(token)


@lark.v_args(inline=True)
class _ProgramBuilder(lark.Transformer):
    """Lark tree to core program tree"""

    def start(self, program):
        return program

    def prog(self, *stmts):
        return sequence(*stmts)

    def assign(self, name, value):
        return Assign(_name(name), value)

    def choice(self, left, probability, right):
        p = _rational(probability)
        if p > 1:
            raise _error_at(probability, f"probability {format_rational(p)} is outside [0, 1]")
        return Choice(left, p, right)

    def while_loop(self, _keyword, guard, body):
        return While(guard, body)

    def conditional(self, _keyword, guard, then_branch, _else=None, else_branch=None):
        return If(guard, then_branch, else_branch if else_branch is not None else Skip())

    def skip(self, _keyword):
        return Skip()

    def add(self, left, right):
        return BinOp(ArithOp.ADD, left, right)

    def sub(self, left, right):
        return BinOp(ArithOp.SUB, left, right)

    def mul(self, left, _symbol, right):
        return BinOp(ArithOp.MUL, left, right)

    def const(self, token):
        return Const(_rational(token))

    def var(self, token):
        return Var(_name(token))

    def disjunction(self, left, _symbol, right):
        return Or(left, right)

    def conjunction(self, left, _symbol, right):
        return And(left, right)

    def negation(self, _symbol, operand):
        return Not(operand)

    def comparison(self, left, symbol, right):
        return Compare(_CMP_SYMBOLS[str(symbol)], left, right)


def _end_position(text: str) -> Tuple[int, int]:
    lines = text.split("\n")
    return len(lines), len(lines[-1]) + 1


def _convert(exc: UnexpectedInput, text: str) -> ParseError:
    line, column = getattr(exc, "line", None), getattr(exc, "column", None)
    if not isinstance(line, int) or line < 1 or not isinstance(column, int) or column < 1:
        line, column = _end_position(text)
    if isinstance(exc, UnexpectedCharacters):
        expected = sorted(exc.allowed or ())
        message = f"unexpected character {exc.char!r}"
    elif isinstance(exc, UnexpectedEOF):
        expected = sorted(exc.expected or ())
        message = "unexpected end of input"
    elif isinstance(exc, UnexpectedToken):
        expected = sorted(exc.expected or ())
        if exc.token.type == "$END":
            line, column = _end_position(text)
            message = "unexpected end of input"
        else:
            message = f"unexpected token {str(exc.token)!r}"
    else:
        expected = []
        message = str(exc)
    return ParseError(message, line, column, tuple(expected))


def parse(text: str) -> Program:
    """
    Parse program text into a core program tree.

    Raises ParseError on malformed input, on a probability outside [0, 1]
    and on empty blocks.
    """
    try:
        tree = _program_parser().parse(text)
        return _ProgramBuilder().transform(tree)
    except UnexpectedInput as exc:
        raise _convert(exc, text) from None
    except VisitError as exc:
        if isinstance(exc.orig_exc, ParseError):
            raise exc.orig_exc from None
        raise


def parse_valuation(text: str) -> Valuation:
    """Parse `NAME = RAT` bindings, one per line."""
    try:
        tree = _valuation_parser().parse(text)
    except UnexpectedInput as exc:
        raise _convert(exc, text) from None

    bindings: Dict[str, Fraction] = {}
    for binding in tree.children:
        name_token, value_token = binding.children
        name = str(name_token)
        if name.lower() in KEYWORDS:
            raise _error_at(name_token, f"reserved keyword {name!r} cannot be used as a variable")
        if name in bindings:
            raise _error_at(name_token, f"duplicate binding for {name}")
        bindings[name] = _rational(value_token)
    return Valuation(bindings)


def format_valuation(valuation: Valuation) -> str:
    return "".join(f"{name} = {format_rational(value)}\n" for name, value in valuation.items())


def parse_file(path: str) -> Program:
    with open(path, encoding="utf-8") as handle:
        return parse(handle.read())


def parse_valuation_file(path: Optional[str]) -> Valuation:
    """Missing path means the all-zero valuation."""
    if path is None:
        return Valuation()
    with open(path, encoding="utf-8") as handle:
        return parse_valuation(handle.read())

