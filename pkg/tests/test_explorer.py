#!/usr/bin/env python3
"""
Test Explorer - partial sums, certifiers and the brute-force oracle
"""

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from fractions import Fraction

import pytest

from pgcl.core import Valuation
from pgcl.parser import parse
from analysis.config import AnalysisConfig
from analysis.explorer import (
    CSV_HEADER, BudgetExhausted, Certified, FrontierCapExceeded, PartialSumExplorer, brute_force_partial_sums,
    certify_lower_expectation, certify_lower_termination, certify_runtime_exceeds, explore_partial_sums,
    iter_partial_sums, rows_to_csv, terminal_states,
)

from reductions.gadgets import gadget_ast_to_exp, gadget_lexp, gadget_uh_to_ast

from corpus import (
    COIN, DIV, GEO, GEO_PRIME, GUARDED_CHOICE, LAZY_COUNTER, NESTED_CHOICE, Q_DIVERGE_ZERO, Q_ID,
)

ORACLE_CORPUS = [
    ("coin", COIN, "x"),
    ("geo", GEO, "i"),
    ("geo-prime", GEO_PRIME, "c"),
    ("div", DIV, "x"),
    ("nested-choice", NESTED_CHOICE, "x"),
    ("guarded-choice", GUARDED_CHOICE, "x"),
    ("lazy-counter", LAZY_COUNTER, "x"),
    ("lexp-halting", gadget_lexp(Q_ID).program, "v"),
    ("lexp-diverging", gadget_lexp(Q_DIVERGE_ZERO).program, "v"),
    ("ast-exp-coin", gadget_ast_to_exp(COIN).program, "v"),
    ("uh-ast-id", gadget_uh_to_ast(Q_ID).program, "i"),
]


def test_coin_rows():
    print("🧪 Testing COIN partial sums")
    print("=" * 70)
    rows = explore_partial_sums(COIN, Valuation(), "x", 5)
    for row in rows:
        print(f"   {row.to_csv()}")
    assert len(rows) == 6
    assert rows[0].to_csv() == "0,0,0,0,0,1,false"
    assert rows[1].to_csv() == "1,0,0,0,1,2,false"
    assert rows[2].to_csv() == "2,1,1,3/2,2,0,true"
    # rows continue past exhaustion with constant sums
    assert rows[5].to_csv() == "5,0,1,3/2,2,0,true"


def test_csv_output():
    rows = explore_partial_sums(COIN, None, "x", 2)
    text = rows_to_csv(rows)
    lines = text.splitlines()
    assert lines[0] == CSV_HEADER
    assert lines[3] == "2,1,1,3/2,2,0,true"


@pytest.mark.parametrize("name, program, var", ORACLE_CORPUS, ids=[entry[0] for entry in ORACLE_CORPUS])
def test_explorer_matches_brute_force_oracle(name, program, var):
    """frontier propagation agrees with enumeration of every (k, w) pair"""
    print(f"🧪 Testing explorer against the brute-force oracle: {name}")
    assert explore_partial_sums(program, None, var, 12) == brute_force_partial_sums(program, None, var, 12)


def test_geo_termination_mass():
    rows = explore_partial_sums(GEO, None, "i", 30)
    masses = [row.exact_k_mass for row in rows if row.exact_k_mass]
    # each further iteration of the loop halves the mass
    assert masses[:4] == [Fraction(1, 2), Fraction(1, 4), Fraction(1, 8), Fraction(1, 16)]


def test_series_are_monotone_and_bounded():
    rows = explore_partial_sums(GEO, None, "i", 40)
    for before, after in zip(rows, rows[1:]):
        assert before.pr_within_k <= after.pr_within_k <= 1
        assert before.exp_v_partial <= after.exp_v_partial
        assert before.runtime_partial <= after.runtime_partial


def test_div_runtime_equals_depth():
    rows = explore_partial_sums(DIV, None, "x", 20)
    for row in rows:
        assert row.pr_within_k == 0
        assert row.runtime_partial == row.depth
        assert row.frontier_size == 1


def test_certify_lower_expectation():
    outcome = certify_lower_expectation(COIN, None, "x", Fraction(1), budget=5)
    assert outcome == Certified(2, Fraction(3, 2))
    outcome = certify_lower_expectation(COIN, None, "x", Fraction(3, 2), budget=5)
    assert isinstance(outcome, BudgetExhausted)
    # the frontier emptied at depth 2, so the search stopped there
    assert outcome.last_row.depth == 2


def test_certify_lower_termination():
    print("🧪 Testing termination certificates")
    print("=" * 70)
    outcome = certify_lower_termination(GEO, None, Fraction(1, 2), budget=40)
    assert isinstance(outcome, Certified)
    assert outcome.witness_value == Fraction(3, 4)
    outcome = certify_lower_termination(DIV, None, Fraction(0), budget=30)
    assert isinstance(outcome, BudgetExhausted)
    assert outcome.last_row.depth == 30
    with pytest.raises(ValueError):
        certify_lower_termination(GEO, None, Fraction(1), budget=10)


def test_certify_runtime_exceeds():
    outcome = certify_runtime_exceeds(DIV, None, 10, budget=100)
    assert outcome == Certified(11, Fraction(11))
    outcome = certify_runtime_exceeds(COIN, None, 2, budget=100)
    assert isinstance(outcome, BudgetExhausted)
    assert certify_runtime_exceeds(COIN, None, Fraction(3, 2), budget=100) == Certified(2, Fraction(2))


def test_certifiers_reject_bad_arguments():
    with pytest.raises(ValueError):
        certify_lower_expectation(COIN, None, "x", Fraction(-1), budget=3)
    with pytest.raises(ValueError):
        certify_runtime_exceeds(COIN, None, 1, budget=-1)


def test_frontier_cap():
    config = AnalysisConfig(frontier_cap=8)
    program = parse("while (0 = 0) { {x := 0} [1/2] {x := 1} }")
    with pytest.raises(FrontierCapExceeded) as info:
        explore_partial_sums(program, None, None, 50, config)
    assert info.value.size > 8


def test_iter_partial_sums_is_lazy():
    rows = iter_partial_sums(DIV, None, None)
    first = [next(rows) for _ in range(3)]
    assert [row.depth for row in first] == [0, 1, 2]


def test_depth_callback():
    seen = []
    explorer = PartialSumExplorer(COIN, None, "x")
    explorer.on_depth_completed = lambda row: seen.append(row.depth)
    list(explorer.rows(3))
    assert seen == [0, 1, 2, 3]


def test_parallel_expansion_matches_sequential():
    program = parse("n := 0; while (n < 9) { {x := x + 1} [1/3] {y := y + 1}; n := n + 1 }")
    sequential = explore_partial_sums(program, None, "x", 45)
    parallel = explore_partial_sums(program, None, "x", 45, AnalysisConfig(jobs=4, parallel_threshold=4))
    assert sequential == parallel


def test_terminal_states_carry_weights():
    states = terminal_states(COIN, None, 5)
    assert sorted(s.history for s in states) == ["L", "R"]
    assert sum(s.probability for s in states) == 1


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
