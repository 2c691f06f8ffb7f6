#!/usr/bin/env python3
"""
Randomized Property Tests - generated programs checked against the
invariants the analyses rely on

Every suite draws from a seeded random.Random, so a failure replays exactly.
"""

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

import dataclasses
import random
import time
from fractions import Fraction

import pytest

from pgcl.core import (
    And, ArithOp, Assign, BinOp, Choice, CmpOp, Compare, Const, If, Not, Or, Skip, Valuation, Var, While,
    free_vars, pretty, sequence,
)
from pgcl.parser import parse
from pgcl.semantics import initial_state, run_deterministic, step
from analysis.chain_solver import INFINITE, StateCapExceeded, decide_ast_past_finite
from analysis.explorer import PartialSumExplorer, explore_partial_sums
from analysis.sampler import sample_run
from reductions.encoding import cantor_tuple, cantor_untuple
from reductions.fragments import input_decoder_gadget
from reductions.stepper import flatten_to_stepper

CASES = 1000
SUITE_BUDGET_SECONDS = 60


class ProgramGenerator:
    """Random programs over a small variable pool"""

    def __init__(self, rng: random.Random, variables=("x", "y", "z"), choices=True, arithmetic=True,
                 scaled_products=True):
        self.rng = rng
        self.variables = variables
        self.choices = choices
        self.arithmetic = arithmetic
        # a constant on one side of every `*` keeps values from squaring inside loops
        self.scaled_products = scaled_products

    def constant(self) -> Const:
        return Const(Fraction(self.rng.randint(0, 6), self.rng.choice([1, 1, 2, 3])))

    def arith(self, depth: int):
        if depth == 0 or self.rng.random() < 0.4:
            if self.rng.random() < 0.5:
                return Var(self.rng.choice(self.variables))
            return self.constant()
        op = self.rng.choice(list(ArithOp))
        if op is ArithOp.MUL and self.scaled_products:
            return BinOp(op, self.arith(depth - 1), self.constant())
        return BinOp(op, self.arith(depth - 1), self.arith(depth - 1))

    def guard(self, depth: int):
        if depth == 0 or self.rng.random() < 0.5:
            return Compare(self.rng.choice(list(CmpOp)), self.arith(1), self.arith(1))
        kind = self.rng.choice(["and", "or", "not"])
        if kind == "not":
            return Not(self.guard(depth - 1))
        node = And if kind == "and" else Or
        return node(self.guard(depth - 1), self.guard(depth - 1))

    def assignment(self) -> Assign:
        target = self.rng.choice(self.variables)
        if self.arithmetic:
            return Assign(target, self.arith(2))
        value = Var(self.rng.choice(self.variables)) if self.rng.random() < 0.5 else Const(self.rng.randint(0, 2))
        return Assign(target, value)

    def statement(self, depth: int):
        kinds = ["assign", "assign", "skip"]
        if depth > 0:
            kinds += ["while", "if"] + (["choice", "choice"] if self.choices else [])
        kind = self.rng.choice(kinds)
        if kind == "assign":
            return self.assignment()
        if kind == "skip":
            return Skip()
        if kind == "choice":
            p = Fraction(self.rng.randint(0, 4), 4)
            return Choice(self.program(depth - 1), p, self.program(depth - 1))
        if kind == "while":
            return While(self.guard(1), self.program(depth - 1))
        else_branch = self.program(depth - 1) if self.rng.random() < 0.5 else Skip()
        return If(self.guard(1), self.program(depth - 1), else_branch)

    def program(self, depth: int = 2):
        return sequence(*[self.statement(depth) for _ in range(self.rng.randint(1, 3))])


def test_pretty_parse_round_trip():
    print("🧪 Property: parse(pretty(P)) = P")
    print("=" * 70)
    gen = ProgramGenerator(random.Random(1001), scaled_products=False)
    for case in range(CASES):
        program = gen.program(3)
        assert parse(pretty(program)) == program, case
        assert parse(pretty(program, multiline=True)) == program, case


def test_probability_is_conserved_level_by_level():
    """terminated mass so far plus live mass is exactly 1 at every depth"""
    print("🧪 Property: probability conservation")
    print("=" * 70)
    gen = ProgramGenerator(random.Random(1002))
    for case in range(CASES):
        program = gen.program(2)
        explorer = PartialSumExplorer(program)
        finished = Fraction(0)
        for level in explorer.levels(12):
            finished += sum((s.probability for s in level if s.terminated), Fraction(0))
            live = sum((s.probability for s in level if not s.terminated), Fraction(0))
            assert finished + live == 1, case


def test_partial_sums_are_monotone():
    gen = ProgramGenerator(random.Random(1003))
    for case in range(CASES):
        program = gen.program(2)
        rows = explore_partial_sums(program, None, "x", 12)
        for before, after in zip(rows, rows[1:]):
            assert before.pr_within_k <= after.pr_within_k <= 1, case
            assert before.exp_v_partial <= after.exp_v_partial, case
            assert before.runtime_partial <= after.runtime_partial, case
            assert after.runtime_partial - before.runtime_partial == 1 - before.pr_within_k, case


def test_finite_chains_bound_partial_sums_and_ast_implies_past():
    """on finite-state programs the exact values dominate every truncation, and AST collapses to PAST"""
    print("🧪 Property: exact solve versus partial sums")
    print("=" * 70)
    gen = ProgramGenerator(random.Random(1004), variables=("x", "y"), arithmetic=False)
    solved = 0
    for case in range(CASES):
        program = gen.program(2)
        try:
            result = decide_ast_past_finite(program, state_cap=300, variables=["x"])
        except StateCapExceeded:
            continue
        solved += 1
        assert 0 <= result.termination_probability <= 1, case
        if result.ast:
            assert result.past, case
            assert result.expected_steps is not INFINITE, case
        rows = explore_partial_sums(program, None, "x", 12)
        for row in rows:
            assert row.pr_within_k <= result.termination_probability, case
            assert row.exp_v_partial <= result.expected_outcomes["x"], case
            if result.expected_steps is not INFINITE:
                assert row.runtime_partial <= result.expected_steps, case
    assert solved >= CASES // 2


def test_sampling_is_deterministic_per_seed():
    gen = ProgramGenerator(random.Random(1005))
    rng = random.Random(1006)
    started = time.monotonic()
    for case in range(CASES):
        program = gen.program(2)
        seed = rng.getrandbits(64)
        assert sample_run(program, None, seed, 200) == sample_run(program, None, seed, 200), case
    elapsed = time.monotonic() - started
    print(f"   {CASES} cases in {elapsed:.1f}s")
    assert elapsed < SUITE_BUDGET_SECONDS


def walk(node):
    yield node
    if dataclasses.is_dataclass(node):
        for f in dataclasses.fields(node):
            child = getattr(node, f.name)
            if dataclasses.is_dataclass(child):
                yield from walk(child)


def test_generated_products_keep_a_constant_factor():
    """no `x * x` in evaluated programs: exact values would square on every loop iteration"""
    gen = ProgramGenerator(random.Random(1010))
    for case in range(CASES):
        for node in walk(gen.program(3)):
            if isinstance(node, BinOp) and node.op is ArithOp.MUL:
                assert isinstance(node.right, Const), case


def test_loop_with_scaled_product_samples_quickly():
    program = parse("while (3 != 0 * y) { x := x * 3 + (2/3 + 0); y := y + 1 }")
    started = time.monotonic()
    first = sample_run(program, None, 644, 200)
    assert first == sample_run(program, None, 644, 200)
    assert not first.terminated
    assert time.monotonic() - started < 5


def test_cantor_tuples_round_trip():
    rng = random.Random(1007)
    for _ in range(CASES):
        arity = rng.randint(1, 4)
        values = [rng.randint(0, 50) for _ in range(arity)]
        assert cantor_untuple(cantor_tuple(values), arity) == values


def test_decoder_agrees_with_meta_level_unpairing():
    rng = random.Random(1008)
    decoder = input_decoder_gadget(["a", "b"], "idx")
    for _ in range(CASES):
        code = rng.randint(0, 300)
        final, _ = run_deterministic(decoder, Valuation({"idx": code}))
        assert [final.valuation["a"], final.valuation["b"]] == cantor_untuple(code, 2)


def test_stepper_mirrors_random_ordinary_programs():
    gen = ProgramGenerator(random.Random(1009), choices=False)
    for case in range(200):
        q = gen.program(2)
        bundle = flatten_to_stepper(q)
        observed = free_vars(q)
        state = initial_state(q)
        eta = run_deterministic(bundle.init_template)[0].valuation
        for _ in range(25):
            assert bundle.continuation_at(int(eta[bundle.pc_var])) == state.continuation, case
            assert eta.project(observed) == state.valuation.project(observed), case
            if state.terminated:
                assert eta[bundle.term_var] == 1, case
                break
            state = step(state).next
            eta = run_deterministic(bundle.step_block, eta)[0].valuation


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
