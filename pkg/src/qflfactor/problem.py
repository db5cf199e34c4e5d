"""Factoring as a binary clause system.

A biprime ``N = p * q`` is written as a long multiplication of the bit
vectors of ``p`` and ``q``.  Every power-of-two column of that table gives
one integer equation (a clause) over the factor bits and the carry bits
that move overflow between columns.

Conventions used throughout the package:

* ``p_0 = q_0 = 1`` (``N`` is odd), so bit 0 never appears as a variable.
* A bit-length pair ``(n_p, n_q)`` means *exact* lengths: the most
  significant bits ``p_{n_p-1}`` and ``q_{n_q-1}`` are 1.  These facts are
  carried on :class:`ClauseSystem` as ``fixed`` assignments rather than as
  extra clauses.
* Carry ``z_{i,j}`` moves weight ``2**j`` out of column ``i`` into column
  ``j``.  A column with ``t`` addends emits ``t.bit_length() - 1`` carries;
  carries that would land at or beyond column ``n_p + n_q`` are dropped,
  since the product never reaches ``2**(n_p + n_q)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import EvenInput, InconsistentColumn, TooSmall

__all__ = [
    "Kind",
    "Variable",
    "Monomial",
    "Clause",
    "ClauseSystem",
    "FactorInstance",
    "BitLengthPlan",
    "Column",
    "MultiplicationTable",
    "P",
    "Q",
    "Z",
    "bit_length_of_factors",
    "estimate_bit_lengths",
    "build_multiplication_table",
    "generate_clauses",
    "long_multiplication_assignment",
]


class Kind(enum.IntEnum):
    P = 0
    Q = 1
    CARRY = 2


@dataclass(frozen=True, order=True)
class Variable:
    """A binary unknown: a factor bit ``p_k``/``q_k`` or a carry ``z_{i,j}``.

    For carries ``index`` is the source column and ``to`` the destination.
    The dataclass ordering (P bits, then Q bits, then carries by column pair)
    is the canonical variable order used everywhere.
    """

    kind: Kind
    index: int
    to: int = 0

    def __str__(self):
        if self.kind is Kind.P:
            return f"p{self.index}"
        if self.kind is Kind.Q:
            return f"q{self.index}"
        return f"z{self.index}_{self.to}"

    __repr__ = __str__

    @property
    def is_carry(self):
        return self.kind is Kind.CARRY


def P(k: int) -> Variable:
    return Variable(Kind.P, k)


def Q(k: int) -> Variable:
    return Variable(Kind.Q, k)


def Z(i: int, j: int) -> Variable:
    if not i < j:
        raise ValueError(f"carry must move to a higher column, got z{i}_{j}")
    return Variable(Kind.CARRY, i, j)


@dataclass(frozen=True, order=True)
class Monomial:
    """Product of distinct binary variables; the empty product is the constant 1."""

    vars: tuple[Variable, ...] = ()

    def __post_init__(self):
        # x*x = x for binary variables
        canonical = tuple(sorted(set(self.vars)))
        if len(canonical) > 2:
            raise ValueError(f"monomial degree must be <= 2, got {canonical}")
        object.__setattr__(self, "vars", canonical)

    @classmethod
    def of(cls, *variables: Variable) -> "Monomial":
        return cls(tuple(variables))

    @property
    def degree(self) -> int:
        return len(self.vars)

    def value(self, assignment: Mapping[Variable, int]) -> int:
        out = 1
        for v in self.vars:
            out &= assignment[v]
        return out

    def __str__(self):
        return "".join(map(str, self.vars)) if self.vars else "1"

    __repr__ = __str__


ONE = Monomial()


def _as_monomial(m) -> Monomial:
    if isinstance(m, Monomial):
        return m
    if isinstance(m, Variable):
        return Monomial((m,))
    return Monomial(tuple(m))


@dataclass(frozen=True)
class Clause:
    """Integer equation ``sum(coeff * monomial) == rhs`` over binary variables.

    Construct with :meth:`build`, which puts the clause in canonical form:
    constants folded into ``rhs``, like monomials merged, zero terms dropped,
    terms sorted by monomial, first coefficient positive, and a common
    divisor of all coefficients removed when it also divides ``rhs``.
    """

    terms: tuple[tuple[int, Monomial], ...]
    rhs: int
    tag: str = field(default="", compare=False)

    @classmethod
    def build(cls, terms: Iterable | Mapping, rhs: int = 0, tag: str = "") -> "Clause":
        if isinstance(terms, Mapping):
            terms = [(c, m) for m, c in terms.items()]
        acc: dict[Monomial, int] = {}
        for coeff, mono in terms:
            mono = _as_monomial(mono)
            acc[mono] = acc.get(mono, 0) + coeff
        rhs -= acc.pop(ONE, 0)
        items = sorted((m, c) for m, c in acc.items() if c != 0)
        if items and items[0][1] < 0:
            items = [(m, -c) for m, c in items]
            rhs = -rhs
        g = 0
        for _, c in items:
            g = math.gcd(g, c)
        if g > 1 and rhs % g == 0:
            items = [(m, c // g) for m, c in items]
            rhs //= g
        return cls(tuple((c, m) for m, c in items), rhs, tag)

    @property
    def monomials(self) -> tuple[Monomial, ...]:
        return tuple(m for _, m in self.terms)

    @property
    def variables(self) -> frozenset[Variable]:
        return frozenset(v for _, m in self.terms for v in m.vars)

    @property
    def is_trivial(self) -> bool:
        """No terms left and the equation reads 0 = 0."""
        return not self.terms and self.rhs == 0

    @property
    def is_contradiction(self) -> bool:
        return not self.terms and self.rhs != 0

    def bounds(self) -> tuple[int, int]:
        lo = sum(c for c, _ in self.terms if c < 0)
        hi = sum(c for c, _ in self.terms if c > 0)
        return lo, hi

    def lhs(self, assignment: Mapping[Variable, int]) -> int:
        return sum(c * m.value(assignment) for c, m in self.terms)

    def holds(self, assignment: Mapping[Variable, int]) -> bool:
        return self.lhs(assignment) == self.rhs

    def __str__(self):
        """Column form: positive terms left, negative terms moved right."""
        left = [(c, m) for c, m in self.terms if c > 0]
        right = [(-c, m) for c, m in self.terms if c < 0]

        def fmt(ts):
            return " + ".join(str(m) if c == 1 else f"{c}*{m}" for c, m in ts)

        lhs = fmt(left) or "0"
        rhs = str(self.rhs)
        if right:
            rhs = fmt(right) if self.rhs == 0 else f"{self.rhs} + {fmt(right)}"
        return f"{lhs} = {rhs}"

    def __repr__(self):
        return f"Clause({self})"


@dataclass(frozen=True)
class ClauseSystem:
    clauses: tuple[Clause, ...] = ()
    fixed: tuple[tuple[Variable, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(self.clauses))
        fixed = self.fixed.items() if isinstance(self.fixed, Mapping) else self.fixed
        object.__setattr__(self, "fixed", tuple(sorted(fixed)))

    @property
    def fixed_map(self) -> dict[Variable, int]:
        return dict(self.fixed)

    @property
    def variables(self) -> tuple[Variable, ...]:
        vs = {v for c in self.clauses for v in c.variables}
        vs.update(v for v, _ in self.fixed)
        return tuple(sorted(vs))

    @property
    def free_variables(self) -> tuple[Variable, ...]:
        fixed = self.fixed_map
        return tuple(v for v in self.variables if v not in fixed)

    def holds(self, assignment: Mapping[Variable, int]) -> bool:
        for v, val in self.fixed:
            if assignment.get(v, val) != val:
                return False
        return all(c.holds(assignment) for c in self.clauses)

    def __len__(self):
        return len(self.clauses)

    def __iter__(self):
        return iter(self.clauses)

    def __str__(self):
        lines = [f"{v} = {val}" for v, val in self.fixed]
        lines += [str(c) for c in self.clauses]
        return "\n".join(lines)


@dataclass(frozen=True)
class FactorInstance:
    N: int

    def __post_init__(self):
        if self.N % 2 == 0:
            raise EvenInput(f"N={self.N} is even; divide out the factor 2 first")
        if self.N < 9:
            raise TooSmall(f"N={self.N} is below 9, the smallest odd biprime")

    @property
    def n_N(self) -> int:
        return self.N.bit_length()

    def bit(self, k: int) -> int:
        return (self.N >> k) & 1


@dataclass(frozen=True)
class BitLengthPlan:
    N: int
    candidates: tuple[tuple[int, int], ...]

    def __iter__(self):
        return iter(self.candidates)

    def __len__(self):
        return len(self.candidates)

    def __contains__(self, pair):
        return tuple(pair) in self.candidates


def bit_length_of_factors(p: int, q: int) -> tuple[int, int]:
    a, b = sorted((p, q))
    return a.bit_length(), b.bit_length()


def _has_divisor_with_bits(N: int, bits: int) -> bool:
    lo, hi = max(3, 1 << (bits - 1)), (1 << bits) - 1
    lo |= 1
    return any(N % d == 0 for d in range(lo, hi + 1, 2))


def estimate_bit_lengths(instance: FactorInstance | int, trial_division: bool = False) -> BitLengthPlan:
    """Enumerate exact bit-length pairs ``(n_p, n_q)`` with ``n_p <= n_q``.

    The smaller factor is at most ``isqrt(N)``, which bounds ``n_p``.  A pair
    survives when ``N`` lies between the smallest and largest product of an
    ``n_p``-bit and an ``n_q``-bit number.  With ``trial_division`` every
    ``n_p`` below the maximum is kept only if ``N`` has a divisor of exactly
    that many bits (trial division never reaches the largest ``n_p``).

    Candidates are ordered by ``n_p + n_q`` (qubit cost), then ``n_p``.
    """
    if not isinstance(instance, FactorInstance):
        instance = FactorInstance(int(instance))
    N = instance.N
    np_max = math.isqrt(N).bit_length()
    pairs = []
    for n_p in range(2, np_max + 1):
        if trial_division and n_p < np_max and not _has_divisor_with_bits(N, n_p):
            continue
        for n_q in range(n_p, instance.n_N):
            lo = 1 << (n_p + n_q - 2)
            hi = ((1 << n_p) - 1) * ((1 << n_q) - 1)
            if lo <= N <= hi:
                pairs.append((n_p, n_q))
    pairs.sort(key=lambda pq: (pq[0] + pq[1], pq[0]))
    return BitLengthPlan(N, tuple(pairs))


@dataclass(frozen=True)
class Column:
    index: int
    products: tuple[Monomial, ...]
    carries_in: tuple[Variable, ...]
    carries_out: tuple[Variable, ...]
    n_bit: int

    @property
    def addends(self) -> int:
        return len(self.products) + len(self.carries_in)


@dataclass(frozen=True)
class MultiplicationTable:
    n_p: int
    n_q: int
    N: int
    columns: tuple[Column, ...]

    @property
    def width(self) -> int:
        return len(self.columns)

    @property
    def extra_columns(self) -> int:
        return self.width - (self.n_p + self.n_q - 1)

    @property
    def carries(self) -> tuple[Variable, ...]:
        return tuple(z for col in self.columns for z in col.carries_out)

    @property
    def msb_fixed(self) -> dict[Variable, int]:
        return {P(self.n_p - 1): 1, Q(self.n_q - 1): 1}

    def render(self) -> str:
        lines = []
        for col in self.columns:
            prods = ", ".join(map(str, col.products)) or "-"
            cin = ", ".join(map(str, col.carries_in)) or "-"
            cout = ", ".join(map(str, col.carries_out)) or "-"
            lines.append(f"2^{col.index}: N={col.n_bit} products[{prods}] in[{cin}] out[{cout}]")
        return "\n".join(lines)


def _factor_bit(kind: Kind, k: int) -> tuple[Variable, ...]:
    return () if k == 0 else (Variable(kind, k),)


def build_multiplication_table(n_p: int, n_q: int, N: int) -> MultiplicationTable:
    width = n_p + n_q
    carries_in: dict[int, list[Variable]] = {i: [] for i in range(width)}
    columns = []
    for i in range(width):
        products = tuple(
            Monomial(_factor_bit(Kind.P, i - j) + _factor_bit(Kind.Q, j))
            for j in range(n_q)
            if 0 <= i - j < n_p
        )
        incoming = tuple(sorted(carries_in[i]))
        t = len(products) + len(incoming)
        outgoing = tuple(Z(i, i + k) for k in range(1, t.bit_length()) if i + k < width)
        for z in outgoing:
            carries_in[z.to].append(z)
        columns.append(Column(i, products, incoming, outgoing, (N >> i) & 1))
    return MultiplicationTable(n_p, n_q, N, tuple(columns))


def generate_clauses(table: MultiplicationTable, N: int | None = None) -> ClauseSystem:
    """One clause per column: products + carries in = N_i + weighted carries out.

    Column 0 reads ``1 = N_0`` once ``p_0 = q_0 = 1``; it is checked and
    omitted.  The MSB facts of the exact bit-length pair go into ``fixed``.
    """
    N = table.N if N is None else N
    clauses = []
    for col in table.columns:
        n_bit = (N >> col.index) & 1
        terms = [(1, m) for m in col.products]
        terms += [(1, z) for z in col.carries_in]
        terms += [(-(1 << (z.to - col.index)), z) for z in col.carries_out]
        clause = Clause.build(terms, n_bit, tag=f"C{col.index}")
        if col.index == 0:
            if clause.is_contradiction:
                raise InconsistentColumn(f"column 0 reads 1 = {n_bit}; N must be odd")
            continue
        clauses.append(clause)
    return ClauseSystem(tuple(clauses), table.msb_fixed)


def long_multiplication_assignment(p: int, q: int, table: MultiplicationTable) -> dict[Variable, int]:
    """Full assignment (factor bits and carries) that long multiplication produces."""
    out: dict[Variable, int] = {}
    for k in range(1, table.n_p):
        out[P(k)] = (p >> k) & 1
    for k in range(1, table.n_q):
        out[Q(k)] = (q >> k) & 1
    for col in table.columns:
        total = sum(m.value(out) for m in col.products) + sum(out[z] for z in col.carries_in)
        carry = (total - ((p * q) >> col.index & 1)) // 2
        for k, z in enumerate(col.carries_out):
            out[z] = (carry >> k) & 1
    return out
