import math

import pytest

from qflfactor.checks import example_circuit
from qflfactor.circuit import (
    CCX,
    CNOT,
    MCX,
    RY,
    Circuit,
    Gate,
    H,
    QubitRole,
    RoleKind,
    X,
    append,
    compose,
    depth,
    export_qasm,
    gate_counts,
    import_qasm,
    lower,
)
from qflfactor.errors import ParseError, UnknownQubit
from qflfactor.problem import P, Q


def test_gate_rejects_repeated_qubits():
    with pytest.raises(ValueError):
        CNOT(1, 1)
    with pytest.raises(ValueError):
        MCX([0, 1], 2, [True])


def test_circuit_rejects_unknown_qubit():
    with pytest.raises(UnknownQubit):
        Circuit.blank(2, [CNOT(0, 2)])
    with pytest.raises(UnknownQubit):
        append(Circuit.blank(1), X(1))


def test_append_and_compose():
    c = Circuit.blank(3, [X(0)])
    assert compose(c, Circuit.blank(3)) == c
    assert len(append(c, CNOT(0, 1))) == len(c) + 1
    assert (c + c).gates == (X(0), X(0))
    with pytest.raises(UnknownQubit):
        compose(c, Circuit.blank(2))


def test_depth_and_counts():
    assert depth(Circuit.blank(3)) == 0
    assert depth(Circuit.blank(3, [CNOT(0, 1), CNOT(1, 2), CNOT(0, 2)])) == 3
    assert depth(Circuit.blank(4, [X(0), X(1), CNOT(2, 3)])) == 1
    assert gate_counts(Circuit.blank(3, [X(0), CCX(0, 1, 2), X(1)])) == {"ccx": 1, "x": 2}


def test_depth_is_invariant_under_relabeling():
    gates = [CCX(0, 1, 3), CNOT(3, 2), X(1), CNOT(0, 2)]
    perm = {0: 2, 1: 0, 2: 3, 3: 1}
    moved = [Gate(g.kind, perm[g.target], tuple(perm[c] for c in g.controls)) for g in gates]
    a, b = Circuit.blank(4, gates), Circuit.blank(4, moved)
    assert depth(a) == depth(b) and gate_counts(a) == gate_counts(b)


def test_143_circuit_roles():
    circuit, _ = example_circuit(143)
    kinds = [r.kind for r in circuit.registry]
    assert kinds.count(RoleKind.DATA) == 4
    assert kinds.count(RoleKind.ANCILLA) == 1
    assert kinds.count(RoleKind.LABEL) == 5
    assert [r.name for r in circuit.registry] == ["p1", "p2", "q1", "q2", "a1", "L1", "L2", "L3", "L4", "L5"]


def test_lower_negative_controls():
    c = Circuit.blank(4, [MCX([0, 1], 3, [False, True]), MCX([0, 1, 2], 3, [True, False, True]), MCX([2], 0)])
    low = lower(c)
    assert [str(g) for g in low.gates] == [
        "x 0",
        "ccx [0,1] -> 3",
        "x 0",
        "x 1",
        "mcx [0,1,2] -> 3",
        "x 1",
        "cx [2] -> 0",
    ]
    assert all(all(g.polarity) for g in low.gates)


def test_export_empty_and_single():
    empty = Circuit.blank(0)
    text = export_qasm(empty)
    assert text == 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'
    assert import_qasm(text) == empty
    one = export_qasm(Circuit.blank(1, [X(0)]))
    assert [ln for ln in one.splitlines() if ln.startswith("x ")] == ["x data[0];"]


@pytest.mark.parametrize("N", [143, 323])
def test_qasm_round_trip_examples(N):
    circuit, _ = example_circuit(N)
    text = export_qasm(circuit)
    back = import_qasm(text)
    assert back.gates == lower(circuit).gates
    assert back.registry == circuit.registry
    assert [r.name for r in back.registry] == [r.name for r in circuit.registry]


def test_qasm_round_trip_wide_mcx_and_rotations():
    roles = (QubitRole.data(P(1), 0), QubitRole.data(Q(1), 1)) + tuple(QubitRole.data(None, i) for i in range(2, 7))
    gates = [H(0), RY(1, 0.25), RY(2, -math.pi / 3), MCX([0, 1, 2, 3, 4, 5], 6, [True, False] * 3), MCX([0, 1, 2], 3)]
    c = Circuit(roles, gates)
    text = export_qasm(c)
    assert "opaque c6x c0,c1,c2,c3,c4,c5,t;" in text
    assert "c3x data[0],data[1],data[2],data[3];" in text
    assert import_qasm(text).gates == lower(c).gates


def test_import_accepts_pi_expressions():
    text = 'OPENQASM 2.0;\ninclude "qelib1.inc";\nqreg data[1];\nry(-pi/4) data[0];\n'
    (g,) = import_qasm(text).gates
    assert g.angle == pytest.approx(-math.pi / 4)


@pytest.mark.parametrize(
    "text, line",
    [
        ("", 1),
        ("qreg data[1];\n", 1),
        ("OPENQASM 3.0;\n", 1),
        ("OPENQASM 2.0;\nqreg data[1];\nx data[0]\n", 3),
        ("OPENQASM 2.0;\nqreg data[1];\nx data[1];\n", 3),
        ("OPENQASM 2.0;\nqreg data[2];\n\nswap data[0],data[1];\n", 4),
        ("OPENQASM 2.0;\nqreg data[2];\ncx data[0];\n", 3),
        ("OPENQASM 2.0;\nqreg data[2];\nx foo[0];\n", 3),
        ("OPENQASM 2.0;\nqreg data[2];\nry(bogus) data[0];\n", 3),
        ("OPENQASM 2.0;\nqreg data[2];\ncx data[0],data[0];\n", 3),
        ("OPENQASM 2.0;\nqreg data[2]; // p1\n", 2),
    ],
)
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(ParseError) as exc:
        import_qasm(text)
    assert exc.value.line == line
    assert f"line {line}" in str(exc.value)
