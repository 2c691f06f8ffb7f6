"""
Analyses of pGCL programs: partial-sum exploration, exact finite-chain
solving and seeded sampling
"""

from .chain_solver import (
    INFINITE, BoundVerdict, FiniteChain, SolveResult, StateCapExceeded, absorption_probabilities,
    decide_ast_past_finite, decide_expectation_bound, dump_chain, expected_outcome_exact,
    expected_steps_exact, extract_chain,
)
from .config import AnalysisConfig
from .explorer import (
    BudgetExhausted, Certified, FrontierCapExceeded, PartialSumRow, brute_force_partial_sums,
    certify_lower_expectation, certify_lower_termination, certify_runtime_exceeds, explore_partial_sums,
    iter_partial_sums, rows_to_csv, terminal_states,
)
from .sampler import SampleReport, SampleRun, estimate, sample_run

__all__ = [
    'INFINITE', 'BoundVerdict', 'FiniteChain', 'SolveResult', 'StateCapExceeded', 'absorption_probabilities',
    'decide_ast_past_finite', 'decide_expectation_bound', 'dump_chain', 'expected_outcome_exact',
    'expected_steps_exact', 'extract_chain',
    'AnalysisConfig',
    'BudgetExhausted', 'Certified', 'FrontierCapExceeded', 'PartialSumRow', 'brute_force_partial_sums',
    'certify_lower_expectation', 'certify_lower_termination', 'certify_runtime_exceeds', 'explore_partial_sums',
    'iter_partial_sums', 'rows_to_csv', 'terminal_states',
    'SampleReport', 'SampleRun', 'estimate', 'sample_run',
]
