import itertools

import pytest
from hypothesis import given, settings, strategies as st

from qflfactor.checks import odd_biprimes
from qflfactor.errors import EvenInput, InconsistentColumn, TooSmall
from qflfactor.problem import (
    Clause,
    ClauseSystem,
    FactorInstance,
    Kind,
    Monomial,
    MultiplicationTable,
    P,
    Q,
    Z,
    bit_length_of_factors,
    build_multiplication_table,
    estimate_bit_lengths,
    generate_clauses,
    long_multiplication_assignment,
)

from conftest import eq


def test_variable_order_and_names():
    assert [str(v) for v in sorted([Z(1, 2), Q(1), P(3), P(1)])] == ["p1", "p3", "q1", "z1_2"]
    assert Z(2, 4).kind is Kind.CARRY


def test_monomial_normalizes_repeats_and_degree():
    assert Monomial((P(1), P(1))) == Monomial((P(1),))
    assert Monomial((Q(1), P(1))).vars == (P(1), Q(1))
    with pytest.raises(ValueError):
        Monomial((P(1), P(2), P(3)))


def test_clause_canonical_form():
    a = Clause.build([(1, Q(1)), (1, P(1)), (0, P(2)), (-2, Z(1, 2))], 1)
    b = Clause.build([(-1, P(1)), (2, Z(1, 2)), (-1, Q(1))], -1)
    assert a == b
    assert str(a) == "p1 + q1 = 1 + 2*z1_2"
    # constants fold into the right-hand side
    assert Clause.build([(1, P(1)), (1, ())], 1) == Clause.build([(1, P(1))], 0)


def test_instance_validation():
    assert FactorInstance(143).n_N == 8
    with pytest.raises(EvenInput):
        FactorInstance(144)
    with pytest.raises(TooSmall):
        FactorInstance(7)


def test_bit_lengths_143():
    plan = estimate_bit_lengths(143)
    assert (4, 4) in plan
    assert all(a <= b for a, b in plan.candidates)
    # q cannot be 2 or 3 bits long
    assert not any(b in (2, 3) for _, b in plan.candidates)
    assert estimate_bit_lengths(143, trial_division=True).candidates == ((4, 4), (4, 5))


def test_bit_lengths_323_and_15():
    assert (5, 5) in estimate_bit_lengths(323)
    assert estimate_bit_lengths(323, trial_division=True).candidates == ((5, 5),)
    assert estimate_bit_lengths(15).candidates == ((2, 3),)


def test_plan_contains_true_pair_for_all_biprimes_below_10000():
    for N in odd_biprimes(9, 10000):
        p = next(d for d in range(3, N, 2) if N % d == 0)
        assert bit_length_of_factors(p, N // p) in estimate_bit_lengths(N), N


def test_plan_is_ordered_by_cost():
    cands = estimate_bit_lengths(899).candidates
    assert list(cands) == sorted(cands, key=lambda c: (c[0] + c[1], c[0]))


def _carries(table: MultiplicationTable):
    return [tuple(str(z) for z in col.carries_out) for col in table.columns]


def test_table_143_layout():
    t = build_multiplication_table(4, 4, 143)
    assert t.width == 8
    assert _carries(t) == [
        (),
        ("z1_2",),
        ("z2_3", "z2_4"),
        ("z3_4", "z3_5"),
        ("z4_5", "z4_6"),
        ("z5_6", "z5_7"),
        ("z6_7",),
        (),
    ]
    assert [str(m) for m in t.columns[3].products] == ["p3", "p2q1", "p1q2", "q3"]


def test_table_323_layout():
    t = build_multiplication_table(5, 5, 323)
    assert t.width == 10
    assert _carries(t)[7] == ("z7_8", "z7_9")
    assert _carries(t)[8] == ("z8_9",)
    assert [str(z) for z in t.columns[9].carries_in] == ["z7_9", "z8_9"]
    assert [c.n_bit for c in t.columns] == [1, 1, 0, 0, 0, 0, 1, 0, 1, 0]


def test_table_9():
    t = build_multiplication_table(2, 2, 9)
    assert [str(m) for m in t.columns[2].products] == ["p1q1"]
    assert _carries(t)[1:3] == [("z1_2",), ("z2_3",)]


def test_clauses_143_match_column_equations(eqs_143):
    system = generate_clauses(build_multiplication_table(4, 4, 143), 143)
    assert list(system.clauses) == eqs_143
    assert system.fixed_map == {P(3): 1, Q(3): 1}
    assert len(system.free_variables) == 14


def test_clauses_9():
    system = generate_clauses(build_multiplication_table(2, 2, 9), 9)
    expected = [
        eq([P(1), Q(1)], 0, [Z(1, 2)]),
        eq([(P(1), Q(1)), Z(1, 2)], 0, [Z(2, 3)]),
        eq([Z(2, 3)], 1),
    ]
    assert list(system.clauses) == expected
    full = long_multiplication_assignment(3, 3, build_multiplication_table(2, 2, 9))
    assert system.holds(full)


def test_clauses_323_count():
    system = generate_clauses(build_multiplication_table(5, 5, 323), 323)
    assert len(system.clauses) == 9


def test_even_column_zero_is_inconsistent():
    t = build_multiplication_table(2, 2, 9)
    with pytest.raises(InconsistentColumn):
        generate_clauses(t, 10)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(odd_biprimes(9, 5000)))
def test_long_multiplication_satisfies_clauses(N):
    p = next(d for d in range(3, N, 2) if N % d == 0)
    q = N // p
    table = build_multiplication_table(p.bit_length(), q.bit_length(), N)
    system = generate_clauses(table, N)
    full = long_multiplication_assignment(p, q, table)
    assert system.holds(full)


def test_clause_system_fixed_is_sorted():
    s = ClauseSystem((), {Q(3): 1, P(3): 1})
    assert s.fixed == ((P(3), 1), (Q(3), 1))


def test_clause_holds_and_bounds():
    c = eq([(P(1), Q(2)), (P(2), Q(1))], 1)
    assert c.bounds() == (0, 2)
    rows = [bits for bits in itertools.product((0, 1), repeat=4) if c.holds(dict(zip((P(1), Q(2), P(2), Q(1)), bits)))]
    assert len(rows) == 6
