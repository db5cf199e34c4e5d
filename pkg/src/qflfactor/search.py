"""Finding feasible data assignments and turning them back into factors.

Two interchangeable searches run on a synthesized QFL circuit:

* ``exhaustive_search`` checks every basis state of the free data qubits.
* ``vqs_optimize`` tunes one RY angle per free data qubit by gradient
  descent on ``1 - P(label = 1)``, then reads the data register conditioned
  on the label.  Conditioning on the label discards every infeasible state
  no matter how good the angles are, so the support of the readout is
  exactly the feasible set whenever all angles are strictly inside
  ``(0, pi)``.

``factor`` chains the whole pipeline for one ``N``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .circuit import RY, Circuit, Gate, X, depth, gate_counts
from .errors import CapacityExceeded, NoValidFactors, NotConverged, TooManyVariables, Unsatisfiable, ZeroProbability
from .problem import (
    FactorInstance,
    Kind,
    MultiplicationTable,
    Variable,
    build_multiplication_table,
    estimate_bit_lengths,
    generate_clauses,
)
from .simplify import ReducedSystem, TraceStep, simplify
from .simulator import (
    MAX_QUBITS,
    PERMUTATION_KINDS,
    LabelReadout,
    StateVector,
    conditional_distribution,
    label_probability,
    permute_basis,
    run_circuit,
    sample,
)
from .synthesis import GENERIC_MAX_VARS, QubitLayout, synth_qfl

__all__ = [
    "EXHAUSTIVE_MAX_DATA",
    "VqsConfig",
    "SearchResult",
    "exhaustive_search",
    "ansatz_gates",
    "vqs_state",
    "vqs_cost",
    "vqs_gradient",
    "vqs_optimize",
    "extract_factors",
    "factor",
]

EXHAUSTIVE_MAX_DATA = 20


def _pinned_prep(layout: QubitLayout) -> list[Gate]:
    q = layout.data_map
    return [X(q[v]) for v, b in layout.pinned if b]


def exhaustive_search(circuit: Circuit, layout: QubitLayout) -> set[tuple[int, ...]]:
    """All data-register states whose final label is 1 with certainty.

    Tuples are ordered like ``layout.variables`` and include pinned qubits
    at their bound value.  QFL circuits only permute basis states, so every
    free basis state is pushed through the circuit at once as a basis
    index; circuits with other gates fall back to one dense run per state.
    """
    free = layout.free_data
    if len(free) > EXHAUSTIVE_MAX_DATA:
        raise CapacityExceeded(f"{len(free)} free data qubits; exhaustive search cap is {EXHAUSTIVE_MAX_DATA}")
    combos = list(itertools.product((0, 1), repeat=len(free)))
    inputs = [layout.data_bits(bits) for bits in combos]
    label = layout.final_label
    if all(g.kind in PERMUTATION_KINDS for g in circuit.gates):
        data = layout.data_qubits
        start = np.array([sum(b << q for b, q in zip(bits, data)) for bits in inputs], dtype=np.int64)
        end = permute_basis(circuit, start)
        return {bits for bits, hit in zip(inputs, (end >> label) & 1) if hit}
    out = set()
    for full in inputs:
        state = run_circuit(circuit, full)
        if label_probability(state, label) > 1 - 1e-9:
            out.add(full)
    return out


@dataclass(frozen=True)
class VqsConfig:
    """Optimizer settings.

    ``init`` is the starting angle for every free data qubit.  The uniform
    start ``pi/2`` is a stationary point whenever the feasible set is
    symmetric (it is for 143 and 323), so a seeded jitter of up to
    ``jitter`` radians is added to break the tie.  ``shots=None`` evaluates
    the cost exactly; an integer estimates it by sampling.
    """

    step: float = 0.3
    max_iter: int = 500
    tol: float = 1e-6
    threshold: float = 0.9
    seed: int = 0
    init: float = math.pi / 2
    jitter: float = 0.1
    shots: int | None = None

    def __post_init__(self):
        if self.step <= 0 or self.max_iter <= 0 or self.tol <= 0:
            raise ValueError("step, max_iter and tol must be positive")
        if not 0 < self.threshold <= 1:
            raise ValueError("threshold must lie in (0, 1]")
        if self.jitter < 0:
            raise ValueError("jitter must be non-negative")
        if self.shots is not None and self.shots < 1:
            raise ValueError("shots must be positive")

    def initial_angles(self, n: int) -> np.ndarray:
        rng = np.random.default_rng(self.seed)
        return self.init + rng.uniform(-self.jitter, self.jitter, size=n)


def ansatz_gates(angles: Sequence[float], layout: QubitLayout) -> list[Gate]:
    """Pinned-qubit preparation followed by one RY per free data qubit."""
    free = layout.free_data
    if len(angles) != len(free):
        raise ValueError(f"ansatz needs {len(free)} angles, got {len(angles)}")
    return _pinned_prep(layout) + [RY(q, float(a)) for q, a in zip(free, angles)]


def vqs_state(angles: Sequence[float], circuit: Circuit, layout: QubitLayout, check_norm: float | None = None) -> StateVector:
    return run_circuit(circuit, prep=ansatz_gates(angles, layout), check_norm=check_norm)


def vqs_cost(angles: Sequence[float], circuit: Circuit, layout: QubitLayout, shots: int | None = None, seed: int = 0) -> float:
    state = vqs_state(angles, circuit, layout)
    if shots is None:
        return 1.0 - label_probability(state, layout.final_label)
    counts = sample(state, shots, seed=seed, qubits=(layout.final_label,))
    return 1.0 - counts.get((1,), 0) / shots


def vqs_gradient(angles: Sequence[float], circuit: Circuit, layout: QubitLayout, shots: int | None = None, seed: int = 0) -> np.ndarray:
    """Parameter-shift gradient, exact for RY generators."""
    theta = np.asarray(angles, dtype=float)
    grad = np.empty_like(theta)
    shift = math.pi / 2
    for i in range(theta.size):
        plus, minus = theta.copy(), theta.copy()
        plus[i] += shift
        minus[i] -= shift
        grad[i] = (
            vqs_cost(plus, circuit, layout, shots, seed + 2 * i)
            - vqs_cost(minus, circuit, layout, shots, seed + 2 * i + 1)
        ) / 2
    return grad


def _readout(angles, circuit, layout) -> LabelReadout | None:
    state = vqs_state(angles, circuit, layout)
    try:
        return conditional_distribution(state, layout.final_label, layout.data_qubits)
    except ZeroProbability:
        return None


def _interior(theta: np.ndarray) -> bool:
    r = np.mod(theta, 2 * math.pi)
    return bool(np.all((r > 1e-6) & (np.abs(r - math.pi) > 1e-6) & (r < 2 * math.pi - 1e-6)))


def vqs_optimize(
    config: VqsConfig, circuit: Circuit, layout: QubitLayout, history: list | None = None
) -> tuple[np.ndarray, LabelReadout]:
    """Gradient descent on the label cost.

    Returns the final angles and the label-conditioned readout.  Raises
    ``NotConverged`` (carrying the best angles seen) if the label
    probability never reaches ``config.threshold``.  ``history`` collects
    ``(angles, cost)`` per iteration when given.
    """
    theta = config.initial_angles(len(layout.free_data))
    trace = history if history is not None else []
    best_theta, best_cost = theta.copy(), math.inf
    prev = math.inf
    for it in range(config.max_iter + 1):
        seed = config.seed + 7919 * it
        cost = vqs_cost(theta, circuit, layout, config.shots, seed)
        trace.append((theta.copy(), cost))
        if cost < best_cost:
            best_theta, best_cost = theta.copy(), cost
        if it == 0 and config.shots is None and cost >= 1.0 - 1e-15 and _interior(theta):
            # every data state has weight here, so nothing is feasible at all
            break
        if 1.0 - cost >= config.threshold:
            readout = _readout(theta, circuit, layout)
            if readout is not None:
                return theta, readout
        if abs(prev - cost) < config.tol or it == config.max_iter:
            break
        prev = cost
        theta = theta - config.step * vqs_gradient(theta, circuit, layout, config.shots, seed + 1)
    raise NotConverged(
        f"label probability {1 - best_cost:.4f} below threshold {config.threshold}",
        angles=best_theta,
        readout=_readout(best_theta, circuit, layout),
        history=trace,
    )


def _value(table: MultiplicationTable, full: Mapping[Variable, int], kind: Kind) -> int:
    n = table.n_p if kind is Kind.P else table.n_q
    return 1 + sum(full[Variable(kind, k)] << k for k in range(1, n))


def extract_factors(
    assignments: Iterable[Sequence[int] | Mapping[Variable, int]],
    reduced: ReducedSystem,
    table: MultiplicationTable,
    variables: Sequence[Variable] | None = None,
) -> list[tuple[int, int]]:
    """Rebuild ``(p, q)`` from residual assignments and the bindings.

    ``assignments`` are tuples ordered like ``variables`` (default: the
    residual variables) or variable mappings.  Source variables that no
    clause constrains any more are enumerated.  Only pairs with ``p*q = N``
    survive; the result is sorted with ``p <= q``.
    """
    variables = tuple(reduced.variables if variables is None else variables)
    extra = reduced.unconstrained
    found = set()
    for a in assignments:
        base = dict(a) if isinstance(a, Mapping) else dict(zip(variables, a))
        for bits in itertools.product((0, 1), repeat=len(extra)):
            full = reduced.expand({**base, **dict(zip(extra, bits))})
            p, q = _value(table, full, Kind.P), _value(table, full, Kind.Q)
            if p * q == table.N and 1 < min(p, q):
                found.add((min(p, q), max(p, q)))
    if not found:
        raise NoValidFactors(f"no assignment multiplies to {table.N}")
    return sorted(found)


@dataclass
class SearchResult:
    N: int
    method: str
    n_p: int
    n_q: int
    factors: list[tuple[int, int]]
    variables: tuple[Variable, ...]
    feasible: list[tuple[int, ...]]
    reduced: ReducedSystem
    trace: list[TraceStep]
    circuit: Circuit | None = None
    layout: QubitLayout | None = None
    stats: dict = field(default_factory=dict)
    attempts: list[tuple[int, int, str]] = field(default_factory=list)

    @property
    def table(self) -> MultiplicationTable:
        return build_multiplication_table(self.n_p, self.n_q, self.N)


def _search_candidate(table, method, config, max_qubits, clean, generic_max_vars):
    system = generate_clauses(table, table.N)
    reduced, trace = simplify(system)
    stats: dict = {}
    if not reduced.residual:
        return reduced, trace, None, None, {()}, stats
    circuit, layout = synth_qfl(reduced, clean=clean, max_qubits=max_qubits, generic_max_vars=generic_max_vars)
    stats.update(
        qubits=circuit.n_qubits,
        depth=depth(circuit),
        gates=gate_counts(circuit),
        modules=len(layout.modules),
    )
    if method == "exhaustive":
        feasible = exhaustive_search(circuit, layout)
    elif method == "vqs":
        history: list = []
        try:
            angles, readout = vqs_optimize(config, circuit, layout, history)
        except NotConverged as exc:
            stats.update(iterations=len(history), converged=False)
            if exc.readout is None:
                return reduced, trace, circuit, layout, set(), stats
            angles, readout = exc.angles, exc.readout
        else:
            stats["converged"] = True
        stats.update(
            iterations=len(history),
            final_cost=round(1.0 - readout.probability, 12),
            label_probability=round(readout.probability, 12),
            angles=[round(float(a), 12) for a in angles],
        )
        feasible = readout.support
    else:
        raise ValueError(f"unknown search method {method!r}")
    return reduced, trace, circuit, layout, feasible, stats


def factor(
    N: int,
    method: str = "exhaustive",
    seed: int = 0,
    trial_division: bool = False,
    max_qubits: int = MAX_QUBITS,
    config: VqsConfig | None = None,
    clean: bool = False,
    generic_max_vars: int = GENERIC_MAX_VARS,
) -> SearchResult | None:
    """Run the full pipeline, trying bit-length pairs until one yields factors.

    Candidates whose circuit would exceed ``max_qubits`` or whose clauses
    exceed ``generic_max_vars`` are skipped.  Returns ``None`` when no
    candidate produces a factorization; raises ``CapacityExceeded`` instead
    if some candidate was skipped for size.
    """
    instance = FactorInstance(N)
    config = config or VqsConfig(seed=seed)
    plan = estimate_bit_lengths(instance, trial_division=trial_division)
    attempts: list[tuple[int, int, str]] = []
    for n_p, n_q in plan.candidates:
        table = build_multiplication_table(n_p, n_q, N)
        try:
            reduced, trace, circuit, layout, feasible, stats = _search_candidate(
                table, method, config, max_qubits, clean, generic_max_vars
            )
        except Unsatisfiable:
            attempts.append((n_p, n_q, "unsatisfiable"))
            continue
        except (CapacityExceeded, TooManyVariables) as exc:
            attempts.append((n_p, n_q, f"too large: {exc}"))
            continue
        variables = layout.variables if layout else ()
        try:
            factors = extract_factors(feasible, reduced, table, variables)
        except NoValidFactors:
            attempts.append((n_p, n_q, "no feasible assignment"))
            continue
        attempts.append((n_p, n_q, "factored"))
        return SearchResult(
            N=N,
            method=method,
            n_p=n_p,
            n_q=n_q,
            factors=factors,
            variables=variables,
            feasible=sorted(feasible),
            reduced=reduced,
            trace=trace,
            circuit=circuit,
            layout=layout,
            stats=stats,
            attempts=attempts,
        )
    skipped = [a for a in attempts if a[2].startswith("too large")]
    if skipped:
        raise CapacityExceeded(
            f"no factors found for {N}; {len(skipped)} bit-length candidate(s) exceeded capacity: "
            + "; ".join(f"({a}, {b}) {msg}" for a, b, msg in skipped)
        )
    return None
