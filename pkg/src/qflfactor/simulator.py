"""Dense statevector simulation.

Basis index convention: qubit ``k`` (registry position ``k``) is bit ``k``
of the basis index, so qubit 0 is the least significant bit.  Internally
the amplitudes are viewed as an ``(2,) * n`` tensor whose axis
``n - 1 - k`` belongs to qubit ``k``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .circuit import Circuit, Gate, RoleKind, X
from .errors import CapacityExceeded, UnknownQubit, ZeroProbability

__all__ = [
    "MAX_QUBITS",
    "StateVector",
    "LabelReadout",
    "init_basis",
    "apply_gate",
    "run_circuit",
    "label_probability",
    "conditional_distribution",
    "sample",
    "basis_index",
    "bits_of",
    "PERMUTATION_KINDS",
    "permute_basis",
]

MAX_QUBITS = 26
PERMUTATION_KINDS = frozenset({"x", "cx", "ccx", "mcx"})


def basis_index(bits: Sequence[int]) -> int:
    """Index of the basis state whose qubit ``k`` holds ``bits[k]``."""
    return sum(int(b) << k for k, b in enumerate(bits))


def bits_of(index: int, n: int) -> tuple[int, ...]:
    return tuple((index >> k) & 1 for k in range(n))


@dataclass
class StateVector:
    amplitudes: np.ndarray
    n_qubits: int

    def __post_init__(self):
        if self.amplitudes.shape != (1 << self.n_qubits,):
            raise ValueError("amplitude vector must have length 2**n_qubits")

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy(), self.n_qubits)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def nonzero(self, tol: float = 1e-12) -> np.ndarray:
        return np.flatnonzero(np.abs(self.amplitudes) > tol)


@dataclass(frozen=True)
class LabelReadout:
    """Label probability and the data distribution conditioned on label = 1.

    ``conditional`` maps data-register bit tuples (ordered like
    ``data_qubits``) to probabilities.
    """

    probability: float
    data_qubits: tuple[int, ...]
    conditional: Mapping[tuple[int, ...], float]

    @property
    def support(self) -> set[tuple[int, ...]]:
        return {k for k, v in self.conditional.items() if v > 0}


def init_basis(n: int, bits: Sequence[int] | int = 0) -> StateVector:
    if n > MAX_QUBITS:
        raise CapacityExceeded(f"{n} qubits exceeds the simulator cap of {MAX_QUBITS}")
    index = bits if isinstance(bits, (int, np.integer)) else basis_index(bits)
    if not 0 <= index < (1 << n):
        raise ValueError(f"basis index {index} out of range for {n} qubits")
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(amps, n)


def _slot(n: int, fixed: Mapping[int, int]):
    idx: list = [slice(None)] * n
    for q, b in fixed.items():
        idx[n - 1 - q] = b
    return tuple(idx)


def _matrix(gate: Gate):
    if gate.kind == "h":
        s = 1 / math.sqrt(2)
        return ((s, s), (s, -s))
    if gate.kind == "ry":
        c, s = math.cos(gate.angle / 2), math.sin(gate.angle / 2)
        return ((c, -s), (s, c))
    raise ValueError(f"unknown gate kind {gate.kind!r}")


def _apply_single(psi: np.ndarray, n: int, gate: Gate) -> None:
    # (high bits, target bit, low bits) view keeps the slices two-strided
    q = gate.target
    v = psi.reshape(1 << (n - 1 - q), 2, 1 << q)
    a0 = v[:, 0, :].copy()
    if gate.kind == "x":
        v[:, 0, :] = v[:, 1, :]
        v[:, 1, :] = a0
        return
    u = _matrix(gate)
    v[:, 0, :] *= u[0][0]
    v[:, 0, :] += u[0][1] * v[:, 1, :]
    v[:, 1, :] *= u[1][1]
    v[:, 1, :] += u[1][0] * a0


def _apply_inplace(psi: np.ndarray, n: int, gate: Gate) -> None:
    for q in gate.qubits:
        if not 0 <= q < n:
            raise UnknownQubit(f"{gate} references qubit {q} on a {n}-qubit state")
    if not gate.controls:
        _apply_single(psi, n, gate)
        return
    t = psi.reshape((2,) * n)
    ctl = {c: int(p) for c, p in zip(gate.controls, gate.polarity)}
    i0 = _slot(n, {**ctl, gate.target: 0})
    i1 = _slot(n, {**ctl, gate.target: 1})
    if gate.kind in ("x", "cx", "ccx", "mcx"):
        a0 = t[i0].copy()
        t[i0] = t[i1]
        t[i1] = a0
        return
    u = _matrix(gate)
    a0 = t[i0].copy()
    a1 = t[i1].copy()
    t[i0] = u[0][0] * a0 + u[0][1] * a1
    t[i1] = u[1][0] * a0 + u[1][1] * a1


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    out = state.copy()
    _apply_inplace(out.amplitudes, out.n_qubits, gate)
    return out


def run_circuit(
    circuit: Circuit,
    data_bits: Sequence[int] | Mapping[int, int] | None = None,
    prep: Sequence[Gate] = (),
    check_norm: float | None = None,
) -> StateVector:
    """Simulate ``circuit`` from ``|0...0>``.

    ``data_bits`` gives values for the data qubits in registry order (or a
    ``{qubit: bit}`` mapping) and is prepared with X gates; ``prep`` is an
    arbitrary preparation fragment applied afterwards.  With ``check_norm``
    the norm is verified after every gate.
    """
    n = circuit.n_qubits
    state = init_basis(n, 0)
    psi = state.amplitudes
    gates: list[Gate] = []
    if data_bits is not None:
        if isinstance(data_bits, Mapping):
            items = data_bits.items()
        else:
            data = circuit.qubits_of(RoleKind.DATA)
            if len(data_bits) != len(data):
                raise ValueError(f"expected {len(data)} data bits, got {len(data_bits)}")
            items = zip(data, data_bits)
        gates.extend(X(q) for q, b in items if b)
    gates.extend(prep)
    gates.extend(circuit.gates)
    for g in gates:
        _apply_inplace(psi, n, g)
        if check_norm is not None and abs(np.linalg.norm(psi) - 1.0) > check_norm:
            raise AssertionError(f"norm drifted after {g}: {np.linalg.norm(psi)!r}")
    return state


def permute_basis(circuit: Circuit, indices: Sequence[int] | np.ndarray) -> np.ndarray:
    """Images of basis states under a circuit made only of X-type gates.

    Such a circuit maps every basis state to exactly one basis state, so
    tracking the indices is an exact simulation of those inputs.
    """
    out = np.array(indices, dtype=np.int64, copy=True)
    n = circuit.n_qubits
    if n > 62:
        raise CapacityExceeded(f"{n} qubits do not fit a 64-bit basis index")
    for g in circuit.gates:
        if g.kind not in PERMUTATION_KINDS:
            raise ValueError(f"{g} is not a permutation gate")
        fire = np.ones(out.shape, dtype=bool)
        for c, pol in zip(g.controls, g.polarity):
            fire &= ((out >> c) & 1) == int(pol)
        out ^= fire.astype(np.int64) << g.target
    return out


def label_probability(state: StateVector, label: int) -> float:
    if not 0 <= label < state.n_qubits:
        raise UnknownQubit(f"label qubit {label} not in a {state.n_qubits}-qubit state")
    t = state.probabilities.reshape((2,) * state.n_qubits)
    return float(t[_slot(state.n_qubits, {label: 1})].sum())


def conditional_distribution(
    state: StateVector, label: int, data_qubits: Sequence[int], tol: float = 1e-15
) -> LabelReadout:
    p1 = label_probability(state, label)
    if p1 <= tol:
        raise ZeroProbability(f"label qubit {label} is |1> with probability {p1:.3g}")
    n = state.n_qubits
    probs = np.where(
        (np.arange(1 << n) >> label) & 1, state.probabilities, 0.0
    )
    cond: dict[tuple[int, ...], float] = {}
    for idx in np.flatnonzero(probs > tol):
        key = tuple((int(idx) >> q) & 1 for q in data_qubits)
        cond[key] = cond.get(key, 0.0) + float(probs[idx]) / p1
    return LabelReadout(p1, tuple(data_qubits), dict(sorted(cond.items())))


def sample(state: StateVector, shots: int, seed: int | None = 0, qubits: Sequence[int] | None = None) -> dict[tuple[int, ...], int]:
    """Multinomial measurement counts keyed by bit tuples (qubit order)."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = np.random.default_rng(seed)
    probs = state.probabilities
    probs = probs / probs.sum()
    counts = rng.multinomial(shots, probs)
    qubits = range(state.n_qubits) if qubits is None else qubits
    out: dict[tuple[int, ...], int] = {}
    for idx in np.flatnonzero(counts):
        key = tuple((int(idx) >> q) & 1 for q in qubits)
        out[key] = out.get(key, 0) + int(counts[idx])
    return dict(sorted(out.items()))
