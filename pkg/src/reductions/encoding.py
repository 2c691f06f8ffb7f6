"""
Input enumeration and name allocation for generated programs

cantor_pair / cantor_unpair and their n-ary folds are the meta-level
counterparts of the decoder emitted by `fragments.input_decoder_gadget`:
    pair(x, y) = (x + y)(x + y + 1)/2 + y
    tuple(a1, ..., an) = pair(tuple(a1, ..., a(n-1)), an),  tuple(a) = a
"""

from math import isqrt
from typing import Iterable, List, Sequence, Set, Tuple


def cantor_pair(x: int, y: int) -> int:
    if x < 0 or y < 0:
        raise ValueError(f"Cantor pairing is defined on naturals, got ({x}, {y})")
    w = x + y
    return w * (w + 1) // 2 + y


def cantor_unpair(n: int) -> Tuple[int, int]:
    if n < 0:
        raise ValueError(f"Cantor unpairing is defined on naturals, got {n}")
    w = (isqrt(8 * n + 1) - 1) // 2
    y = n - w * (w + 1) // 2
    return w - y, y


def cantor_tuple(values: Sequence[int]) -> int:
    if not values:
        raise ValueError("cantor_tuple needs at least one value")
    code = values[0]
    for value in values[1:]:
        code = cantor_pair(code, value)
    return code


def cantor_untuple(n: int, arity: int) -> List[int]:
    """Inverse of cantor_tuple for a fixed arity."""
    if arity < 1:
        raise ValueError(f"arity must be at least 1, got {arity}")
    tail: List[int] = []
    for _ in range(arity - 1):
        n, last = cantor_unpair(n)
        tail.append(last)
    return [n] + tail[::-1]


class NameAllocator:
    """
    Hands out variable names that avoid every name already taken.

    A requested name is returned unchanged when free, otherwise the first
    free `name1`, `name2`, ... is used.
    """

    def __init__(self, taken: Iterable[str] = ()):
        self._taken: Set[str] = set(taken)
        self.allocated: List[str] = []

    def reserve(self, names: Iterable[str]):
        self._taken.update(names)

    def fresh(self, preferred: str) -> str:
        candidate = preferred
        suffix = 1
        while candidate in self._taken:
            candidate = f"{preferred}{suffix}"
            suffix += 1
        self._taken.add(candidate)
        self.allocated.append(candidate)
        return candidate
