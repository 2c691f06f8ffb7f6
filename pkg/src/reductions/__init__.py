"""
Reduction gadgets: stepper compilation, input decoding and the generated
probabilistic programs
"""

from .encoding import NameAllocator, cantor_pair, cantor_tuple, cantor_unpair, cantor_untuple
from .fragments import cheer_block, input_decoder_gadget, load_valuation_prefix
from .gadgets import (
    GADGETS, ExpectationQuery, GadgetOutput, TerminationQuery, build_gadget, gadget_ast_to_exp,
    gadget_ast_to_uast, gadget_lexp, gadget_past, gadget_rexp, gadget_uh_to_ast, gadget_upast,
)
from .stepper import OrdinaryProgram, StepperBundle, flatten_to_stepper

__all__ = [
    'NameAllocator', 'cantor_pair', 'cantor_tuple', 'cantor_unpair', 'cantor_untuple',
    'cheer_block', 'input_decoder_gadget', 'load_valuation_prefix',
    'GADGETS', 'ExpectationQuery', 'GadgetOutput', 'TerminationQuery', 'build_gadget', 'gadget_ast_to_exp',
    'gadget_ast_to_uast', 'gadget_lexp', 'gadget_past', 'gadget_rexp', 'gadget_uh_to_ast', 'gadget_upast',
    'OrdinaryProgram', 'StepperBundle', 'flatten_to_stepper',
]
