"""Published worked-example data for N = 143 and N = 323.

Each truth table is a tuple of ``(inputs, label)`` rows.  ``operands``
names the variable behind each input column.  The published tables for the
two-product clauses of 143 (module C3) and 323 (module C3) print their
columns in operand order of ``xy + uv``, i.e. ``(x, y, u, v)``; the 323 C2
table uses sorted variable order.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .problem import P, Q, Variable

__all__ = [
    "TruthTable",
    "PARITY_143",
    "NOR_323_FIRST",
    "PRODUCT_PARITY_143",
    "NOR_323_LAST",
    "TRUTH_TABLES",
    "FEASIBLE_143",
    "FEASIBLE_323",
    "FACTORS",
]


@dataclass(frozen=True)
class TruthTable:
    name: str
    terms: tuple[tuple[Variable, ...], ...]
    rhs: int
    operands: tuple[Variable, ...]
    rows: tuple[tuple[tuple[int, ...], int], ...]


def _rows(labels: str):
    k = len(labels).bit_length() - 1
    return tuple(
        (bits, int(b)) for bits, b in zip(itertools.product((0, 1), repeat=k), labels)
    )


PARITY_143 = TruthTable(
    "143/C1", ((P(1),), (Q(1),)), 1, (P(1), Q(1)), _rows("0110")
)
NOR_323_FIRST = TruthTable(
    "323/C2", ((P(1), Q(2)), (P(2), Q(1))), 0, (P(1), P(2), Q(1), Q(2)), _rows("1111110010101000")
)
PRODUCT_PARITY_143 = TruthTable(
    "143/C3", ((P(1), Q(2)), (P(2), Q(1))), 1, (P(1), Q(2), P(2), Q(1)), _rows("0001000100011110")
)
NOR_323_LAST = TruthTable(
    "323/C3", ((P(1), Q(3)), (P(3), Q(1))), 0, (P(1), Q(3), P(3), Q(1)), _rows("1110111011100000")
)
TRUTH_TABLES = (PARITY_143, NOR_323_FIRST, PRODUCT_PARITY_143, NOR_323_LAST)

# feasible data registers; 143 over (p1, p2, q1, q2), 323 over (p1, p2, p3, q1, q2, q3)
FEASIBLE_143 = frozenset({(1, 0, 0, 1), (0, 1, 1, 0)})
FEASIBLE_323 = frozenset({(1, 0, 0, 0, 0, 0), (0, 0, 0, 1, 0, 0)})

FACTORS = {143: (11, 13), 323: (17, 19)}
