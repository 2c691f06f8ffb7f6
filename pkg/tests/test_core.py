#!/usr/bin/env python3
"""
Test Core - rationals, valuations, expressions and program builders
"""

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from fractions import Fraction

import pytest

from pgcl.core import (
    TERMINATED, And, ArithOp, Assign, BinOp, Choice, CmpOp, Compare, Const, If, Not, Or, Seq, Skip, Valuation,
    Var, While, add, assign, coin_flip, compare, contains_choice, eval_arith, eval_bool, format_rational,
    free_vars, mul, parse_rational, pretty, program_size, sequence, statements, sub,
)
from pgcl.parser import parse


def test_parse_rational_forms():
    """INT, INT/INT and decimals are read exactly"""
    print("🧪 Testing rational literals")
    print("=" * 70)
    assert parse_rational("3") == 3
    assert parse_rational("6/4") == Fraction(3, 2)
    assert parse_rational("0.5") == Fraction(1, 2)
    assert parse_rational("0.125") == Fraction(1, 8)
    assert parse_rational(" 7 ") == 7


@pytest.mark.parametrize("text", ["", "-1", "1/0", "a", "1/2/3", ".5"])
def test_parse_rational_rejects(text):
    with pytest.raises(ValueError):
        parse_rational(text)


def test_format_rational_is_canonical():
    assert format_rational(Fraction(6, 4)) == "3/2"
    assert format_rational(Fraction(4, 2)) == "2"
    assert format_rational(0) == "0"


def test_valuation_defaults_and_equality():
    """Unbound names read 0; zero bindings do not make valuations differ"""
    print("🧪 Testing valuations")
    print("=" * 70)
    eta = Valuation({"x": 2, "y": 0})
    assert eta["x"] == 2
    assert eta["y"] == 0
    assert eta["unbound"] == 0
    assert eta == Valuation({"x": 2})
    assert hash(eta) == hash(Valuation({"x": Fraction(2)}))
    assert eta.support() == ("x",)
    assert len(eta) == 1


def test_valuation_assign_is_persistent():
    eta = Valuation({"x": 1})
    updated = eta.assign("x", 5).assign("z", Fraction(1, 3))
    assert eta["x"] == 1
    assert updated["x"] == 5
    assert updated["z"] == Fraction(1, 3)
    assert updated.assign("x", 0) == Valuation({"z": Fraction(1, 3)})
    assert updated.project(["z"]) == Valuation({"z": Fraction(1, 3)})


def test_valuation_rejects_negative():
    with pytest.raises(ValueError):
        Valuation({"x": -1})


def test_eval_arith_is_exact_over_rationals():
    eta = Valuation({"x": Fraction(1, 3), "y": 2})
    assert eval_arith(add("x", "y"), eta) == Fraction(7, 3)
    assert eval_arith(mul("x", 3), eta) == 1
    # subtraction itself may go negative; clamping happens on assignment
    assert eval_arith(sub("x", "y"), eta) == Fraction(-5, 3)


def test_eval_bool_connectives():
    eta = Valuation({"x": 1})
    lt = compare(CmpOp.LT, "x", 2)
    eq = compare(CmpOp.EQ, "x", 0)
    assert eval_bool(lt, eta)
    assert not eval_bool(eq, eta)
    assert eval_bool(Or(eq, lt), eta)
    assert not eval_bool(And(eq, lt), eta)
    assert eval_bool(Not(eq), eta)
    assert eval_bool(compare(CmpOp.NE, "x", "y"), eta)


def test_choice_probability_range():
    with pytest.raises(ValueError):
        Choice(Skip(), Fraction(3, 2), Skip())
    assert Choice(Skip(), 1, Skip()).probability == 1


def test_const_rejects_negative_literal():
    with pytest.raises(ValueError):
        Const(Fraction(-1))


def test_sequence_flattens_and_right_associates():
    a, b, c = assign("a", 1), assign("b", 2), assign("c", 3)
    built = sequence(a, None, sequence(b, c))
    assert built == Seq(a, Seq(b, c))
    assert statements(built) == [a, b, c]
    assert sequence() == Skip()
    assert sequence(None, a) == a


def test_structural_queries():
    program = sequence(
        assign("x", 0),
        While(compare(CmpOp.LT, "x", "n"), sequence(coin_flip("c"), assign("x", add("x", 1)))),
    )
    assert free_vars(program) == frozenset({"x", "n", "c"})
    assert contains_choice(program)
    assert not contains_choice(assign("x", 1))
    # Seq, Assign, While, Seq, Choice, Assign, Assign, Assign
    assert program_size(program) == 8


def test_pretty_single_line():
    print("🧪 Testing pretty printer")
    print("=" * 70)
    program = sequence(
        coin_flip("c"),
        While(And(compare(CmpOp.GT, "k", 0), compare(CmpOp.EQ, "term", 0)), assign("k", sub("k", 1))),
        If(compare(CmpOp.EQ, "c", 1), assign("v", 1)),
    )
    text = pretty(program)
    print(f"   {text}")
    assert text == (
        "{c := 0} [1/2] {c := 1}; "
        "while (k > 0 && term = 0) { k := k - 1 }; "
        "if (c = 1) { v := 1 }"
    )


def test_pretty_parenthesizes_by_precedence():
    e = BinOp(ArithOp.SUB, Var("a"), BinOp(ArithOp.SUB, Var("b"), Var("c")))
    assert pretty(Assign("x", e)) == "x := a - (b - c)"
    e = BinOp(ArithOp.MUL, BinOp(ArithOp.ADD, Var("a"), Const(1)), Var("b"))
    assert pretty(Assign("x", e)) == "x := (a + 1) * b"
    guard = And(Or(compare(CmpOp.EQ, "a", 0), compare(CmpOp.EQ, "b", 0)), Not(compare(CmpOp.LE, "c", 1)))
    assert pretty(While(guard, Skip())) == "while ((a = 0 || b = 0) && !(c <= 1)) { skip }"


def test_left_nested_sequence_reparses_right_nested():
    a, b, c = assign("x", 1), assign("y", 2), Skip()
    left = Seq(Seq(a, b), c)
    assert pretty(left) == "x := 1; y := 2; skip"
    assert parse(pretty(left)) == Seq(a, Seq(b, c))
    assert sequence(left) == Seq(a, Seq(b, c))
    assert sequence(Seq(a, Seq(b, c)), Seq(Seq(a, b), c)) == sequence(a, b, c, a, b, c)


def test_pretty_if_else_and_terminated():
    program = If(Compare(CmpOp.GE, Var("x"), Const(2)), assign("x", 0), assign("x", 1))
    assert pretty(program) == "if (x >= 2) { x := 0 } else { x := 1 }"
    assert pretty(TERMINATED) == "↓"
    assert pretty(Seq(TERMINATED, Skip())) == "↓; skip"


def test_pretty_multiline_layout():
    program = sequence(assign("v", 0), Choice(assign("v", 1), Fraction(1, 2), sequence(assign("x", 0), assign("v", 1))))
    assert pretty(program, multiline=True) == "\n".join([
        "v := 0;",
        "{",
        "    v := 1",
        "} [1/2] {",
        "    x := 0;",
        "    v := 1",
        "}",
    ])


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
