import pytest

from qflfactor.problem import Clause, P, Q, Z


def eq(lhs, rhs=0, carries=()):
    """Column equation ``sum(lhs) = rhs + sum(2**k * carry_k)``; lhs items are variables or tuples."""
    terms = [(1, t) for t in lhs]
    terms += [(-(2 ** (k + 1)), z) for k, z in enumerate(carries)]
    return Clause.build(terms, rhs)


@pytest.fixture
def eqs_143():
    """The seven column equations of the 143 example, exact lengths (4, 4)."""
    p1, p2, p3, q1, q2, q3 = P(1), P(2), P(3), Q(1), Q(2), Q(3)
    return [
        eq([p1, q1], 1, [Z(1, 2)]),
        eq([p2, (p1, q1), q2, Z(1, 2)], 1, [Z(2, 3), Z(2, 4)]),
        eq([p3, (p2, q1), (p1, q2), q3, Z(2, 3)], 1, [Z(3, 4), Z(3, 5)]),
        eq([(p3, q1), (p2, q2), (p1, q3), Z(3, 4), Z(2, 4)], 0, [Z(4, 5), Z(4, 6)]),
        eq([(p3, q2), (p2, q3), Z(4, 5), Z(3, 5)], 0, [Z(5, 6), Z(5, 7)]),
        eq([(p3, q3), Z(5, 6), Z(4, 6)], 0, [Z(6, 7)]),
        eq([Z(6, 7), Z(5, 7)], 1),
    ]


# lines collected by the acceptance suite, echoed in the terminal summary
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
