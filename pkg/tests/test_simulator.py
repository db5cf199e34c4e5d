import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qflfactor.checks import example_circuit
from qflfactor.circuit import CCX, CNOT, MCX, RY, Circuit, Gate, H, X
from qflfactor.errors import CapacityExceeded, UnknownQubit, ZeroProbability
from qflfactor.reference import FEASIBLE_143
from qflfactor.search import vqs_state
from qflfactor.simulator import (
    MAX_QUBITS,
    StateVector,
    apply_gate,
    basis_index,
    bits_of,
    conditional_distribution,
    init_basis,
    label_probability,
    permute_basis,
    run_circuit,
    sample,
)


def random_state(n, seed):
    rng = np.random.default_rng(seed)
    amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return StateVector(amps / np.linalg.norm(amps), n)


def test_init_basis():
    assert init_basis(4, [0, 0, 0, 0]).amplitudes[0] == 1
    assert init_basis(1, [1]).amplitudes[1] == 1
    s = init_basis(10, 0)
    assert s.norm == pytest.approx(1) and len(s.nonzero()) == 1
    with pytest.raises(CapacityExceeded):
        init_basis(MAX_QUBITS + 1)


def test_basis_convention_qubit_zero_is_lsb():
    assert basis_index([1, 0, 0]) == 1
    assert basis_index([0, 0, 1]) == 4
    assert bits_of(6, 3) == (0, 1, 1)
    s = apply_gate(init_basis(3), X(2))
    assert s.nonzero().tolist() == [4]


def test_elementary_gates():
    assert apply_gate(init_basis(1), X(0)).nonzero().tolist() == [1]
    s = apply_gate(init_basis(3, [1, 1, 0]), CCX(0, 1, 2))
    assert s.nonzero().tolist() == [basis_index([1, 1, 1])]
    s = apply_gate(init_basis(2, [1, 0]), CNOT(0, 1))
    assert s.nonzero().tolist() == [3]
    # negative control fires on 0
    s = apply_gate(init_basis(2, [0, 0]), MCX([0], 1, [False]))
    assert s.nonzero().tolist() == [2]
    h = apply_gate(init_basis(1), H(0))
    assert np.allclose(h.amplitudes, [1 / math.sqrt(2)] * 2)


def test_unknown_qubit():
    with pytest.raises(UnknownQubit):
        apply_gate(init_basis(2), X(2))
    with pytest.raises(UnknownQubit):
        label_probability(init_basis(2), 5)


@pytest.mark.parametrize("gate", [X(1), CNOT(0, 3), CNOT(3, 0), CCX(0, 2, 1), MCX([3, 0, 1], 2, [True, False, True])])
def test_self_inverse_gates(gate):
    s = random_state(4, 1)
    twice = apply_gate(apply_gate(s, gate), gate)
    assert np.max(np.abs(twice.amplitudes - s.amplitudes)) < 1e-12


@settings(max_examples=50, deadline=None)
@given(st.floats(-10, 10), st.integers(0, 3), st.booleans())
def test_ry_inverse(theta, q, controlled):
    s = random_state(4, 2)
    ctl = ((q + 1) % 4,) if controlled else ()
    fwd = apply_gate(s, Gate("ry", q, ctl, angle=theta))
    back = apply_gate(fwd, Gate("ry", q, ctl, angle=-theta))
    assert np.max(np.abs(back.amplitudes - s.amplitudes)) < 1e-12
    assert abs(fwd.norm - 1) < 1e-12


def test_ry_rotation_values():
    s = apply_gate(init_basis(1), RY(0, math.pi / 3))
    assert np.allclose(s.amplitudes, [math.cos(math.pi / 6), math.sin(math.pi / 6)])


def test_run_circuit_143_feasible_input():
    circuit, layout = example_circuit(143)
    assert label_probability(run_circuit(circuit, [1, 0, 0, 1]), layout.final_label) == 1
    assert label_probability(run_circuit(circuit, [0, 0, 0, 0]), layout.final_label) == 0


def test_run_circuit_data_mapping_and_prep():
    circuit = Circuit.blank(3, [CNOT(0, 2)])
    assert run_circuit(circuit, {0: 1}).nonzero().tolist() == [5]
    assert run_circuit(circuit, prep=[X(0), X(1)]).nonzero().tolist() == [7]
    with pytest.raises(ValueError):
        run_circuit(circuit, [1])


def test_uniform_143_label_probability():
    circuit, layout = example_circuit(143)
    state = vqs_state([math.pi / 2] * 4, circuit, layout)
    assert label_probability(state, layout.final_label) == pytest.approx(2 / 16, abs=1e-12)
    readout = conditional_distribution(state, layout.final_label, layout.data_qubits)
    assert readout.support == FEASIBLE_143
    assert sum(readout.conditional.values()) == pytest.approx(1)


def test_conditioning_on_impossible_label():
    with pytest.raises(ZeroProbability):
        conditional_distribution(init_basis(2), 1, [0])


def test_sampling():
    s = init_basis(3, [1, 0, 1])
    assert sample(s, 17, seed=5) == {(1, 0, 1): 17}
    uniform = run_circuit(Circuit.blank(2, [H(0), H(1)]))
    counts = sample(uniform, 100_000, seed=0)
    assert set(counts) == set(itertools.product((0, 1), repeat=2))
    assert all(abs(c / 100_000 - 0.25) <= 0.01 for c in counts.values())
    assert sample(uniform, 1000, seed=3) == sample(uniform, 1000, seed=3)
    with pytest.raises(ValueError):
        sample(uniform, 0)


def test_sampling_143_conditioned_on_label():
    circuit, layout = example_circuit(143)
    state = vqs_state([math.pi / 2] * 4, circuit, layout)
    counts = sample(state, 20_000, seed=1, qubits=layout.data_qubits + (layout.final_label,))
    hits = {k[:-1] for k in counts if k[-1] == 1}
    assert hits == FEASIBLE_143


@pytest.mark.parametrize("N", [143, 323])
def test_basis_runs_stay_basis_states(N):
    circuit, layout = example_circuit(N)
    for bits in itertools.product((0, 1), repeat=len(layout.data)):
        assert len(run_circuit(circuit, bits, check_norm=1e-10).nonzero()) == 1


@pytest.mark.parametrize("N", [143, 323])
def test_permute_basis_matches_dense(N):
    circuit, layout = example_circuit(N)
    data = layout.data_qubits
    inputs = list(itertools.product((0, 1), repeat=len(data)))
    start = [basis_index_of(bits, data) for bits in inputs]
    end = permute_basis(circuit, start)
    for bits, out in zip(inputs, end):
        assert run_circuit(circuit, bits).nonzero().tolist() == [int(out)]


def basis_index_of(bits, qubits):
    return sum(b << q for b, q in zip(bits, qubits))


def test_permute_basis_rejects_rotations():
    with pytest.raises(ValueError):
        permute_basis(Circuit.blank(1, [H(0)]), [0])
