import itertools

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from qflfactor.errors import TooLarge, Unsatisfiable
from qflfactor.problem import Clause, ClauseSystem, Monomial, P, Q, Z, build_multiplication_table, generate_clauses
from qflfactor.simplify import (
    Binding,
    apply_rules,
    brute_force_solutions,
    deduce_parity_bounds,
    replay,
    simplify,
)

from conftest import eq


def raw(N, n_p, n_q):
    return generate_clauses(build_multiplication_table(n_p, n_q, N), N)


def itertools_solutions(system: ClauseSystem):
    names = system.variables
    return {
        bits
        for bits in itertools.product((0, 1), repeat=len(names))
        if system.holds(dict(zip(names, bits)))
    }


# ------------------------------------------------------------ bounds


def test_bounds_first_column():
    assert deduce_parity_bounds(eq([P(1), Q(1)], 1, [Z(1, 2)])) == [Binding(Z(1, 2), 0)]


def test_bounds_two_carries():
    got = deduce_parity_bounds(eq([P(2), Q(2)], 1, [Z(2, 3), Z(2, 4)]))
    assert set(got) == {Binding(Z(2, 3), 0), Binding(Z(2, 4), 0)}


def test_bounds_lower_bound_forces_carry():
    # z4_5 + z5_6 = -1 + 2*z6_7: the right side must be >= 0, so z6_7 = 1
    assert deduce_parity_bounds(eq([Z(4, 5), Z(5, 6)], -1, [Z(6, 7)])) == [Binding(Z(6, 7), 1)]


def test_bounds_contradiction():
    with pytest.raises(Unsatisfiable):
        deduce_parity_bounds(Clause.build([], 1))
    with pytest.raises(Unsatisfiable):
        deduce_parity_bounds(eq([P(1)], 2))


# ------------------------------------------------------------ rules


def test_rule_exactly_one_records_fact():
    bindings, _, kills = apply_rules(ClauseSystem((eq([P(1), Q(1)], 1),)))
    assert Monomial((P(1), Q(1))) in kills
    assert not bindings


def test_rule_product_one():
    bindings, _, _ = apply_rules(ClauseSystem((eq([(P(3), Q(3))], 1),)))
    assert set(bindings) == {Binding(P(3), 1), Binding(Q(3), 1)}


def test_rule_sum_zero():
    bindings, _, _ = apply_rules(ClauseSystem((eq([P(1), Q(2)], 0),)))
    assert set(bindings) == {Binding(P(1), 0), Binding(Q(2), 0)}


def test_rule_x_plus_y_eq_2z():
    bindings, _, _ = apply_rules(ClauseSystem((eq([P(1), Q(1)], 0, [Z(1, 2)]),)))
    assert {b.variable for b in bindings} == {Q(1), Z(1, 2)}
    assert all(b.value == P(1) for b in bindings)


def test_rule_x_plus_2y_minus_2z():
    c = Clause.build([(1, P(1)), (2, P(2)), (-2, Z(1, 2))], 0)
    bindings, _, _ = apply_rules(ClauseSystem((c,)))
    assert Binding(P(1), 0) in bindings
    assert any(b.value in (P(2), Z(1, 2)) for b in bindings)


def test_rule_x_minus_2z_plus_1():
    c = Clause.build([(1, P(1)), (-2, Z(1, 2))], -1)
    bindings, _, _ = apply_rules(ClauseSystem((c,)))
    assert set(bindings) == {Binding(P(1), 1), Binding(Z(1, 2), 1)}


def test_rule_contradiction():
    with pytest.raises(Unsatisfiable):
        simplify(ClauseSystem((eq([P(1)], 1), eq([P(1)], 0))))


# ------------------------------------------------------------ worked examples


def test_simplify_143(eqs_143):
    reduced, trace = simplify(raw(143, 4, 4))
    assert set(reduced.residual) == {
        eq([P(1), Q(1)], 1),
        eq([P(2), Q(2)], 1),
        eq([(P(1), Q(2)), (P(2), Q(1))], 1),
    }
    bm = reduced.binding_map
    assert bm[P(3)] == 1 and bm[Q(3)] == 1
    carries = [v for v in reduced.source.variables if v.kind.name == "CARRY"]
    assert carries and all(isinstance(bm[z], int) for z in carries)
    assert not reduced.pinned
    assert trace[-1].rule == "residual"


def test_simplify_323():
    reduced, _ = simplify(raw(323, 5, 5))
    assert set(reduced.residual) == {
        eq([P(1), Q(1)], 1),
        eq([(P(1), Q(2)), (P(2), Q(1))], 0),
        eq([(P(1), Q(3)), (P(3), Q(1))], 0),
    }
    bm = reduced.binding_map
    assert {v: bm[v] for v in (P(4), Q(4), P(3), Q(3), P(2), Q(2))} == {
        P(4): 1, Q(4): 1, P(3): 0, Q(3): 0, P(2): 0, Q(2): 0
    }
    assert reduced.pinned == {P(2): 0, P(3): 0, Q(2): 0, Q(3): 0}
    assert reduced.free == (P(1), Q(1))


def test_simplify_323_strict_mode_drops_pinned_products():
    reduced, _ = simplify(raw(323, 5, 5), retain_pinned=False)
    assert reduced.residual == (eq([P(1), Q(1)], 1),)


def test_simplify_empty_system():
    reduced, _ = simplify(ClauseSystem())
    assert reduced.bindings == () and reduced.residual == ()


def test_simplify_9_solves_everything():
    reduced, _ = simplify(raw(9, 2, 2))
    assert reduced.residual == ()
    assert reduced.binding_map[P(1)] == 1 and reduced.binding_map[Q(1)] == 1


def test_simplify_is_deterministic_and_replayable():
    system = raw(323, 5, 5)
    a, ta = simplify(system)
    b, tb = simplify(system)
    assert ta == tb and a == b
    assert replay(system, ta) == a


def test_unsupported_fact_is_restored_as_clause():
    # 159 with the wrong lengths (3, 5): a product fact must survive
    system = raw(159, 3, 5)
    reduced, _ = simplify(system)
    assert reduced.solutions(max_vars=None) == brute_force_solutions(system, max_vars=None) == set()


# ------------------------------------------------------------ brute force


def test_brute_force_examples():
    assert brute_force_solutions(ClauseSystem((eq([P(1), Q(1)], 1),))) == {(0, 1), (1, 0)}
    reduced, _ = simplify(raw(143, 4, 4))
    assert brute_force_solutions(reduced.as_system()) == {(1, 0, 0, 1), (0, 1, 1, 0)}


def test_brute_force_raw_143():
    system = raw(143, 4, 4)
    sols = brute_force_solutions(system)
    names = system.variables
    ps = set()
    for s in sols:
        a = dict(zip(names, s))
        ps.add(1 + sum(a[P(k)] << k for k in range(1, 4)))
    assert len(sols) == 2 and ps == {11, 13}


def test_brute_force_cap():
    big = ClauseSystem(tuple(eq([P(k), Q(k)], 1) for k in range(1, 14)))
    with pytest.raises(TooLarge):
        brute_force_solutions(big)
    assert len(brute_force_solutions(big, max_vars=None)) == 2**13


VARS = [P(1), P(2), Q(1), Q(2), Z(1, 2), Z(2, 3)]
monomials = st.one_of(
    st.sampled_from(VARS).map(lambda v: (v,)),
    st.tuples(st.sampled_from(VARS), st.sampled_from(VARS)),
)
clauses = st.builds(
    lambda terms, rhs: Clause.build(terms, rhs),
    st.lists(st.tuples(st.sampled_from([-2, -1, 1, 2, 4]), monomials), min_size=1, max_size=4),
    st.integers(-2, 3),
)
systems = st.builds(
    lambda cs, fixed: ClauseSystem(tuple(cs), fixed),
    st.lists(clauses, min_size=1, max_size=4),
    st.dictionaries(st.sampled_from(VARS), st.integers(0, 1), max_size=2),
)


@settings(max_examples=300, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(systems)
def test_brute_force_matches_itertools(system):
    assert brute_force_solutions(system) == itertools_solutions(system)


@settings(max_examples=400, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(systems)
def test_simplify_is_sound_on_random_systems(system):
    expected = itertools_solutions(system)
    try:
        reduced, trace = simplify(system)
    except Unsatisfiable:
        assert expected == set()
        return
    assert reduced.solutions() == expected
    assert replay(system, trace) == reduced


def test_residual_rhs_invariant_on_examples():
    for N, bits in ((143, (4, 4)), (323, (5, 5))):
        reduced, _ = simplify(raw(N, *bits))
        for c in reduced.residual:
            assert all(coeff > 0 for coeff, _ in c.terms) and c.rhs in (0, 1)
