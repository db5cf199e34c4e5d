"""Factoring odd biprimes with quantum feasibility labeling (QFL).

Pipeline: bit-length estimation and long-multiplication clauses
(:mod:`.problem`), symbolic simplification (:mod:`.simplify`), QFL circuit
synthesis (:mod:`.synthesis`, :mod:`.circuit`), statevector simulation
(:mod:`.simulator`) and feasible-set search (:mod:`.search`).
"""
from .circuit import CCX, CNOT, H, MCX, RY, X, Circuit, Gate, QubitRole, RoleKind, depth, export_qasm, import_qasm
from .errors import *  # noqa: F401,F403
from .problem import (
    Clause,
    ClauseSystem,
    FactorInstance,
    Monomial,
    MultiplicationTable,
    P,
    Q,
    Variable,
    Z,
    build_multiplication_table,
    estimate_bit_lengths,
    generate_clauses,
)
from .search import (
    SearchResult,
    VqsConfig,
    exhaustive_search,
    extract_factors,
    factor,
    vqs_cost,
    vqs_gradient,
    vqs_optimize,
)
from .simplify import Binding, ReducedSystem, apply_rules, brute_force_solutions, simplify
from .simulator import StateVector, conditional_distribution, label_probability, run_circuit
from .synthesis import QubitLayout, synth_qfl

__version__ = "0.1.0"
