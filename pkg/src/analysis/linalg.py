"""
Exact linear algebra over the rationals

Fraction-free (Bareiss) elimination on an integer-scaled copy of the system,
followed by back-substitution in Fraction. Pivots are chosen as the smallest
row index with a non-zero entry, so results never depend on input order
beyond the order given.
"""

from fractions import Fraction
from math import lcm
from typing import List, Sequence

Matrix = Sequence[Sequence[Fraction]]
Vector = Sequence[Fraction]


class SingularSystemError(ArithmeticError):
    """The coefficient matrix has no inverse."""


class SolverCheckError(ArithmeticError):
    """Substituting the solution back did not reproduce the right-hand side."""


def _integral_row(row: Sequence[Fraction]) -> List[int]:
    scale = 1
    for value in row:
        scale = lcm(scale, Fraction(value).denominator)
    return [int(Fraction(value) * scale) for value in row]


def solve_exact(matrix: Matrix, rhs: Vector) -> List[Fraction]:
    """Solve matrix · x = rhs exactly."""
    n = len(matrix)
    if len(rhs) != n or any(len(row) != n for row in matrix):
        raise ValueError("solve_exact needs a square matrix and a matching right-hand side")
    if n == 0:
        return []

    rows = [_integral_row(list(matrix[i]) + [rhs[i]]) for i in range(n)]
    previous = 1
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if pivot is None:
            raise SingularSystemError(f"No pivot in column {col}")
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
        top = rows[col]
        p = top[col]
        for r in range(col + 1, n):
            row = rows[r]
            factor = row[col]
            for j in range(col + 1, n + 1):
                # exact: Bareiss guarantees divisibility by the previous pivot
                row[j] = (p * row[j] - factor * top[j]) // previous
            row[col] = 0
        previous = p

    solution = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        row = rows[i]
        total = Fraction(row[n])
        for j in range(i + 1, n):
            if row[j]:
                total -= row[j] * solution[j]
        solution[i] = total / row[i]

    verify_solution(matrix, rhs, solution)
    return solution


def verify_solution(matrix: Matrix, rhs: Vector, solution: Vector):
    for i, row in enumerate(matrix):
        total = sum((Fraction(a) * x for a, x in zip(row, solution)), Fraction(0))
        if total != rhs[i]:
            raise SolverCheckError(f"Row {i}: substituted value {total} differs from {rhs[i]}")
