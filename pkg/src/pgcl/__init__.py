"""
pGCL language: syntax, values, parsing and small-step semantics
"""

from .core import (
    Assign, Choice, Const, If, NotOrdinaryProgramError, Program, Seq, Skip, TERMINATED, Terminated,
    Valuation, Var, While, eval_arith, eval_bool, format_rational, free_vars, parse_rational, pretty,
)
from .parser import ParseError, format_valuation, parse, parse_file, parse_valuation, parse_valuation_file
from .semantics import (
    Deterministic, Probabilistic, State, Terminal, alpha, initial_state, run_deterministic, step, successor,
    wp_weight,
)

__all__ = [
    'Assign', 'Choice', 'Const', 'If', 'NotOrdinaryProgramError', 'Program', 'Seq', 'Skip', 'TERMINATED',
    'Terminated', 'Valuation', 'Var', 'While', 'eval_arith', 'eval_bool', 'format_rational', 'free_vars',
    'parse_rational', 'pretty',
    'ParseError', 'format_valuation', 'parse', 'parse_file', 'parse_valuation', 'parse_valuation_file',
    'Deterministic', 'Probabilistic', 'State', 'Terminal', 'alpha', 'initial_state', 'run_deterministic',
    'step', 'successor', 'wp_weight',
]
