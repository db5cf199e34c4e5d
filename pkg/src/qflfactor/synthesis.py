"""Feasibility-labeling circuit synthesis.

Every residual clause becomes a module that writes the clause's truth value
into its own label qubit.  Labels are folded together with Toffoli AND
gates: ``L1``, then for each further module ``k`` its label followed by an
AND of the running conjunction with it.  The last label written holds the
conjunction of all clauses.

Four module shapes are recognised:

=================  ==================  =========================================
shape              clause              gates
=================  ==================  =========================================
parity             ``x + y = 1``       CNOT x->y, CNOT y->L, CNOT x->y
product parity     ``xy + uv = 1``     CCX xy->a, CCX uv->L, CNOT a->L
nor                ``xy + uv = 0``     CCX xy->a1, CCX uv->a2, X a1, X a2,
                                       CCX a1 a2->L
generic            anything else       one MCX onto L per satisfying assignment
=================  ==================  =========================================

Modules that use ancillas undo them (gates replayed in reverse) unless they
are the last module, which leaves its ancillas dirty.  ``clean=True`` undoes
them everywhere.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

from .circuit import CCX, CNOT, MCX, Circuit, Gate, QubitRole, X
from .errors import CapacityExceeded, QubitReuse, ShapeMismatch, TooManyVariables
from .problem import Clause, Variable
from .simplify import ReducedSystem
from .simulator import MAX_QUBITS

__all__ = [
    "ModuleInfo",
    "QubitLayout",
    "clause_shape",
    "synth_parity_module",
    "synth_product_parity_module",
    "synth_nor_module",
    "synth_generic_module",
    "synth_and",
    "synth_qfl",
    "GENERIC_MAX_VARS",
]

GENERIC_MAX_VARS = 8
ANCILLAS_NEEDED = {"parity": 0, "product_parity": 1, "nor": 2, "generic": 0}


@dataclass(frozen=True)
class ModuleInfo:
    shape: str
    clause: Clause
    label: int
    ancillas: tuple[int, ...]
    start: int
    stop: int
    uncomputed: bool


@dataclass(frozen=True)
class QubitLayout:
    """Where everything lives in a synthesized circuit.

    ``data`` maps residual variables to qubits (registry order).  ``pinned``
    holds data variables that must stay at a bound value; ``free_data``
    lists the data qubits a search should explore.
    """

    data: tuple[tuple[Variable, int], ...]
    pinned: tuple[tuple[Variable, int], ...]
    ancillas: tuple[int, ...]
    labels: tuple[int, ...]
    final_label: int
    modules: tuple[ModuleInfo, ...]
    ands: tuple[tuple[int, int, int], ...]

    @property
    def data_map(self) -> dict[Variable, int]:
        return dict(self.data)

    @property
    def variables(self) -> tuple[Variable, ...]:
        return tuple(v for v, _ in self.data)

    @property
    def data_qubits(self) -> tuple[int, ...]:
        return tuple(q for _, q in self.data)

    @property
    def free_variables(self) -> tuple[Variable, ...]:
        pinned = dict(self.pinned)
        return tuple(v for v, _ in self.data if v not in pinned)

    @property
    def free_data(self) -> tuple[int, ...]:
        pinned = dict(self.pinned)
        return tuple(q for v, q in self.data if v not in pinned)

    def data_bits(self, free_bits: Sequence[int]) -> tuple[int, ...]:
        """Full data-register bits from values for the free data qubits."""
        pinned = dict(self.pinned)
        it = iter(free_bits)
        return tuple(pinned[v] if v in pinned else next(it) for v, _ in self.data)


def clause_shape(clause: Clause) -> str:
    terms = clause.terms
    if len(terms) == 2 and all(c == 1 for c, _ in terms):
        degrees = {m.degree for _, m in terms}
        if degrees == {1} and clause.rhs == 1:
            return "parity"
        if degrees == {2} and clause.rhs == 1:
            return "product_parity"
        if degrees == {2} and clause.rhs == 0:
            return "nor"
    return "generic"


def _require(clause: Clause, shape: str):
    if clause_shape(clause) != shape:
        raise ShapeMismatch(f"{clause} is not a {shape} clause")


def synth_parity_module(clause: Clause, qubit_of: Mapping[Variable, int], label: int) -> list[Gate]:
    """``x + y = 1``: L = x XOR y; the borrowed data qubit is restored."""
    _require(clause, "parity")
    (x,), (y,) = (m.vars for _, m in clause.terms)
    qx, qy = qubit_of[x], qubit_of[y]
    return [CNOT(qx, qy), CNOT(qy, label), CNOT(qx, qy)]


def _products(clause: Clause, qubit_of):
    return [tuple(qubit_of[v] for v in m.vars) for _, m in clause.terms]


def _undo(gates: Sequence[Gate], keep_last: int) -> list[Gate]:
    """Inverse of ``gates[:-keep_last]`` (all gates here are self-inverse)."""
    return list(reversed(gates[: len(gates) - keep_last]))


def synth_product_parity_module(
    clause: Clause, qubit_of: Mapping[Variable, int], label: int, ancilla: int, uncompute: bool = True
) -> list[Gate]:
    """``xy + uv = 1``: L = xy XOR uv, with xy staged in one ancilla."""
    _require(clause, "product_parity")
    (x, y), (u, v) = _products(clause, qubit_of)
    gates = [CCX(x, y, ancilla), CCX(u, v, label), CNOT(ancilla, label)]
    if uncompute:
        gates.append(CCX(x, y, ancilla))
    return gates


def synth_nor_module(
    clause: Clause, qubit_of: Mapping[Variable, int], label: int, ancillas: Sequence[int], uncompute: bool = True
) -> list[Gate]:
    """``xy + uv = 0``: L = NOT xy AND NOT uv."""
    _require(clause, "nor")
    (x, y), (u, v) = _products(clause, qubit_of)
    a1, a2 = ancillas
    gates = [CCX(x, y, a1), CCX(u, v, a2), X(a1), X(a2), CCX(a1, a2, label)]
    if uncompute:
        gates += _undo(gates, keep_last=1)
    return gates


def synth_generic_module(
    clause: Clause, qubit_of: Mapping[Variable, int], label: int, max_vars: int = GENERIC_MAX_VARS
) -> list[Gate]:
    """Truth-table construction: one polarity-matched MCX per satisfying assignment."""
    variables = sorted(clause.variables)
    if len(variables) > max_vars:
        raise TooManyVariables(f"{clause} has {len(variables)} variables; generic cap is {max_vars}")
    controls = [qubit_of[v] for v in variables]
    gates = []
    for bits in itertools.product((0, 1), repeat=len(variables)):
        if clause.holds(dict(zip(variables, bits))):
            gates.append(MCX(controls, label, [bool(b) for b in bits]))
    return gates


def synth_and(l_a: int, l_b: int, l_out: int, used: set[int] | None = None) -> list[Gate]:
    if len({l_a, l_b, l_out}) != 3:
        raise QubitReuse(f"AND needs three distinct labels, got {(l_a, l_b, l_out)}")
    if used is not None and l_out in used:
        raise QubitReuse(f"AND output L{l_out} has already been written")
    return [CCX(l_a, l_b, l_out)]


def synth_qfl(
    reduced: ReducedSystem | Sequence[Clause],
    clean: bool = False,
    max_qubits: int = MAX_QUBITS,
    pinned: Mapping[Variable, int] | None = None,
    generic_max_vars: int = GENERIC_MAX_VARS,
) -> tuple[Circuit, QubitLayout]:
    """Chain one module per residual clause and AND the labels together."""
    if isinstance(reduced, ReducedSystem):
        clauses = tuple(reduced.residual)
        pinned = reduced.pinned if pinned is None else pinned
    else:
        clauses = tuple(reduced)
    pinned = dict(pinned or {})
    m = len(clauses)
    if m == 0:
        raise ValueError("nothing to label: the residual system is empty")

    variables = sorted({v for c in clauses for v in c.variables})
    shapes = [clause_shape(c) for c in clauses]
    n_anc = max(ANCILLAS_NEEDED[s] for s in shapes)
    n_labels = 2 * m - 1
    n_total = len(variables) + n_anc + n_labels
    if n_total > max_qubits:
        raise CapacityExceeded(f"circuit needs {n_total} qubits; cap is {max_qubits}")

    registry = [QubitRole.data(v, i) for i, v in enumerate(variables)]
    registry += [QubitRole.ancilla(i + 1) for i in range(n_anc)]
    registry += [QubitRole.label(i + 1) for i in range(n_labels)]
    qubit_of = {v: i for i, v in enumerate(variables)}
    anc = tuple(range(len(variables), len(variables) + n_anc))
    lab = tuple(range(len(variables) + n_anc, n_total))

    gates: list[Gate] = []
    modules: list[ModuleInfo] = []
    ands: list[tuple[int, int, int]] = []
    used: set[int] = set()
    next_label = iter(lab)
    running = None
    for k, (clause, shape) in enumerate(zip(clauses, shapes)):
        last = k == m - 1
        uncompute = clean or not last
        label = next(next_label)
        start = len(gates)
        if shape == "parity":
            frag = synth_parity_module(clause, qubit_of, label)
        elif shape == "product_parity":
            frag = synth_product_parity_module(clause, qubit_of, label, anc[0], uncompute)
        elif shape == "nor":
            frag = synth_nor_module(clause, qubit_of, label, anc[:2], uncompute)
        else:
            frag = synth_generic_module(clause, qubit_of, label, generic_max_vars)
        gates.extend(frag)
        used.add(label)
        need = ANCILLAS_NEEDED[shape]
        modules.append(ModuleInfo(shape, clause, label, anc[:need], start, len(gates), uncompute or need == 0))
        if running is None:
            running = label
            continue
        out = next(next_label)
        gates.extend(synth_and(running, label, out, used))
        used.add(out)
        ands.append((running, label, out))
        running = out

    layout = QubitLayout(
        data=tuple(qubit_of.items()),
        pinned=tuple(sorted((v, b) for v, b in pinned.items() if v in qubit_of)),
        ancillas=anc,
        labels=lab,
        final_label=running,
        modules=tuple(modules),
        ands=tuple(ands),
    )
    return Circuit(tuple(registry), tuple(gates)), layout
