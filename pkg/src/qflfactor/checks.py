"""Self-checks shared by the ``verify`` command and the test suite."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .circuit import Circuit
from .errors import Unsatisfiable
from .problem import Clause, build_multiplication_table, estimate_bit_lengths, generate_clauses
from .reference import FEASIBLE_143, FEASIBLE_323, TRUTH_TABLES, TruthTable
from .search import EXHAUSTIVE_MAX_DATA, exhaustive_search, factor, vqs_state
from .simplify import ReducedSystem, brute_force_solutions, simplify
from .simulator import label_probability, permute_basis, run_circuit
from .synthesis import QubitLayout, synth_qfl

__all__ = [
    "CheckResult",
    "odd_biprimes",
    "example_system",
    "example_circuit",
    "clause_of",
    "module_truth_table",
    "label_table",
    "check_truth_tables",
    "check_feasible_sets",
    "check_oracle_sweep",
    "check_norms",
    "oracle_case",
    "soundness_case",
    "true_bit_lengths",
    "run_all",
]

# caps used by the sweeps; larger than the pipeline defaults so that every
# N in range can be synthesized (see README, "Capacity")
SWEEP_MAX_QUBITS = 60
SWEEP_GENERIC_MAX_VARS = 12


@dataclass(frozen=True)
class CheckResult:
    name: str
    cases: int
    failures: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.failures


def odd_biprimes(lo: int, hi: int) -> list[int]:
    """Odd ``N`` in ``[lo, hi)`` with exactly two prime factors (counted with multiplicity)."""
    sieve = np.ones(hi, dtype=bool)
    sieve[:2] = False
    for k in range(2, int(hi**0.5) + 1):
        if sieve[k]:
            sieve[k * k :: k] = False
    primes = [int(p) for p in np.flatnonzero(sieve) if p > 2]
    out = set()
    for i, p in enumerate(primes):
        for q in primes[i:]:
            if p * q >= hi:
                break
            if p * q >= lo:
                out.add(p * q)
    return sorted(out)


def true_bit_lengths(N: int) -> tuple[int, int]:
    p = next(d for d in range(3, N, 2) if N % d == 0)
    return p.bit_length(), (N // p).bit_length()


def example_system(N: int, n_p: int | None = None, n_q: int | None = None) -> ReducedSystem:
    if n_p is None:
        n_p, n_q = true_bit_lengths(N)
    table = build_multiplication_table(n_p, n_q, N)
    reduced, _ = simplify(generate_clauses(table, N))
    return reduced


def example_circuit(N: int, **kwargs) -> tuple[Circuit, QubitLayout]:
    return synth_qfl(example_system(N), **kwargs)


def clause_of(table: TruthTable) -> Clause:
    return Clause.build([(1, t) for t in table.terms], table.rhs)


def module_truth_table(clause: Clause, operands) -> tuple[tuple[tuple[int, ...], int], ...]:
    """Simulate a single synthesized module on every input, columns in ``operands`` order."""
    circuit, layout = synth_qfl([clause])
    qubit = layout.data_map
    rows = []
    for bits in itertools.product((0, 1), repeat=len(operands)):
        state = run_circuit(circuit, {qubit[v]: b for v, b in zip(operands, bits)})
        rows.append((bits, round(label_probability(state, layout.final_label))))
    return tuple(rows)


def label_table(circuit: Circuit, layout: QubitLayout) -> Iterator[tuple[tuple[int, ...], int, int]]:
    """``(data bits, label, output data bits)`` for every data basis state, via basis tracking."""
    data = layout.data_qubits
    inputs = list(itertools.product((0, 1), repeat=len(data)))
    start = np.array([sum(b << q for b, q in zip(bits, data)) for bits in inputs], dtype=np.int64)
    end = permute_basis(circuit, start)
    for bits, out in zip(inputs, end):
        yield bits, int((out >> layout.final_label) & 1), tuple(int((out >> q) & 1) for q in data)


def check_truth_tables() -> CheckResult:
    failures = []
    for t in TRUTH_TABLES:
        got = module_truth_table(clause_of(t), t.operands)
        if got != t.rows:
            failures.append(t.name)
    return CheckResult("module truth tables", len(TRUTH_TABLES), tuple(failures))


def check_feasible_sets() -> CheckResult:
    failures = []
    for N, expected in ((143, FEASIBLE_143), (323, FEASIBLE_323)):
        if exhaustive_search(*example_circuit(N)) != expected:
            failures.append(str(N))
    return CheckResult("feasible sets 143/323", 2, tuple(failures))


def oracle_case(N: int) -> list[str]:
    """Problems found for one ``N``: label vs clause conjunction, and the factors."""
    problems = []
    reduced = example_system(N)
    if reduced.residual:
        circuit, layout = synth_qfl(
            reduced, max_qubits=SWEEP_MAX_QUBITS, generic_max_vars=SWEEP_GENERIC_MAX_VARS
        )
        if len(layout.data) <= EXHAUSTIVE_MAX_DATA:
            names = layout.variables
            for bits, label, _ in label_table(circuit, layout):
                expect = all(c.holds(dict(zip(names, bits))) for c in reduced.residual)
                if label != int(expect):
                    problems.append(f"{N}: label {label} at {bits}")
                    break
        else:
            problems.append(f"{N}: {len(layout.data)} data qubits, too many to enumerate")
    result = factor(N, max_qubits=SWEEP_MAX_QUBITS, generic_max_vars=SWEEP_GENERIC_MAX_VARS)
    if result is None or not result.factors or any(p * q != N for p, q in result.factors):
        problems.append(f"{N}: factors {None if result is None else result.factors}")
    return problems


def check_oracle_sweep(hi: int = 1000) -> CheckResult:
    cases = odd_biprimes(9, hi)
    failures = [msg for N in cases for msg in oracle_case(N)]
    return CheckResult(f"oracle sweep N < {hi}", len(cases), tuple(failures))


def soundness_case(N: int) -> list[str]:
    """Raw-system solutions vs bindings + residual, for every bit-length candidate."""
    problems = []
    for n_p, n_q in estimate_bit_lengths(N).candidates:
        raw = generate_clauses(build_multiplication_table(n_p, n_q, N), N)
        expected = brute_force_solutions(raw, max_vars=None)
        try:
            reduced, _ = simplify(raw)
        except Unsatisfiable:
            if expected:
                problems.append(f"{N} ({n_p},{n_q}): declared unsatisfiable, has {len(expected)} solutions")
            continue
        if reduced.solutions(max_vars=None) != expected:
            problems.append(f"{N} ({n_p},{n_q}): solution sets differ")
    return problems


def check_norms(draws: int = 5, seed: int = 0, tol: float = 1e-10) -> CheckResult:
    rng = np.random.default_rng(seed)
    failures = []
    cases = 0
    for N in (143, 323):
        circuit, layout = example_circuit(N)
        for _ in range(draws):
            angles = rng.uniform(0, 2 * np.pi, size=len(layout.free_data))
            cases += 1
            try:
                vqs_state(angles, circuit, layout, check_norm=tol)
            except AssertionError as exc:
                failures.append(f"{N}: {exc}")
        for bits in itertools.product((0, 1), repeat=len(layout.data)):
            cases += 1
            try:
                run_circuit(circuit, bits, check_norm=tol)
            except AssertionError as exc:
                failures.append(f"{N} {bits}: {exc}")
    return CheckResult("norm preservation", cases, tuple(failures))


def run_all(sweep_hi: int = 256) -> list[CheckResult]:
    return [check_truth_tables(), check_feasible_sets(), check_oracle_sweep(sweep_hi), check_norms()]
