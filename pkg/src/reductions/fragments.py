"""
Reusable choice-free fragments for the reduction gadgets
"""

from typing import List, Optional, Sequence

from pgcl.core import (
    CmpOp, Program, Skip, Valuation, While, add, assign, coin_flip, compare, free_vars, sequence, sub,
)

from .encoding import NameAllocator


def input_decoder_gadget(variables: Sequence[str], index_var: str,
                         names: Optional[NameAllocator] = None) -> Program:
    """
    Code that decodes `index_var` into `variables` by inverse Cantor tupling.

    Each unpairing step runs

        w := 0; t := 0;
        while (t + w + 1 <= n) { w := w + 1; t := t + w };
        y := n - t; n := w - y

    peeling the last component first. With one variable the decoder is a
    plain copy.
    """
    if not variables:
        raise ValueError("input_decoder_gadget needs at least one target variable")
    if index_var in variables:
        raise ValueError(f"index variable {index_var} cannot also be a decoding target")
    if names is None:
        names = NameAllocator(list(variables) + [index_var])
    if len(variables) == 1:
        return assign(variables[0], index_var)

    n = names.fresh("_n")
    w = names.fresh("_w")
    t = names.fresh("_t")
    parts: List[Program] = [assign(n, index_var)]
    for target in reversed(variables[1:]):
        parts.extend([
            assign(w, 0),
            assign(t, 0),
            While(compare(CmpOp.LE, add(add(t, w), 1), n), sequence(assign(w, add(w, 1)), assign(t, add(t, w)))),
            assign(target, sub(n, t)),
            assign(n, sub(w, target)),
        ])
    parts.append(assign(variables[0], n))
    return sequence(*parts)


def cheer_block(x_var: str, names: Optional[NameAllocator] = None, width: int = 1) -> Program:
    """
    Effectless busy work of Θ(2^x) steps.

    A doubling loop computes t = 2^x, then a countdown burns t iterations of
    `t := t - 1` followed by `width` skips. Only scratch variables change.
    """
    if width < 0:
        raise ValueError(f"cheer width must be non-negative, got {width}")
    if names is None:
        names = NameAllocator([x_var])
    t = names.fresh("_cheer")
    j = names.fresh("_j")
    countdown = sequence(assign(t, sub(t, 1)), *[Skip() for _ in range(width)])
    return sequence(
        assign(t, 1),
        assign(j, x_var),
        While(compare(CmpOp.GT, j, 0), sequence(assign(t, add(t, t)), assign(j, sub(j, 1)))),
        While(compare(CmpOp.GT, t, 0), countdown),
    )


def load_valuation_prefix(program: Program, valuation: Valuation) -> Optional[Program]:
    """
    Assignments that make every free variable of the program read as in
    `valuation`: one per bound variable, then zeroing for the rest.
    """
    bound = valuation.support()
    rest = sorted(free_vars(program) - set(bound))
    parts = [assign(name, value) for name, value in valuation.items()]
    parts += [assign(name, 0) for name in rest]
    return sequence(*parts) if parts else None


def doubling_assignment(target: str, exponent_var: str, names: NameAllocator) -> Program:
    """target := 2^(exponent + 1)"""
    d = names.fresh("_d")
    return sequence(
        assign(target, 2),
        assign(d, exponent_var),
        While(compare(CmpOp.GT, d, 0), sequence(assign(target, add(target, target)), assign(d, sub(d, 1)))),
    )


def geometric_loop(index_var: str, coin_var: str) -> Program:
    """
    index := 0; {c := 0} [1/2] {c := 1};
    while (c != 0) { index := index + 1; {c := 0} [1/2] {c := 1} }

    Afterwards Pr(index = n) = 1/2^(n+1).
    """
    return sequence(
        assign(index_var, 0),
        coin_flip(coin_var),
        While(compare(CmpOp.NE, coin_var, 0), sequence(assign(index_var, add(index_var, 1)), coin_flip(coin_var))),
    )
