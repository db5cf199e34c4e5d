"""
Factoring 143 step by step
==========================

From the long multiplication of two 4-bit odd numbers to a labeled circuit
and back to the factors 11 and 13.
"""

import itertools

import numpy as np

from qflfactor import (
    build_multiplication_table,
    estimate_bit_lengths,
    exhaustive_search,
    extract_factors,
    generate_clauses,
    simplify,
    synth_qfl,
)
from qflfactor.circuit import depth, gate_counts
from qflfactor.search import vqs_state
from qflfactor.simulator import conditional_distribution

N = 143

# bit-length candidates, cheapest first; the true pair is (4, 4)
plan = estimate_bit_lengths(N)
print("candidates:", plan.candidates)

# the multiplication table and one clause per column
table = build_multiplication_table(4, 4, N)
print(table.render())
raw = generate_clauses(table, N)
for clause in raw.clauses:
    print("  ", clause)

# rule-based simplification leaves three small clauses
reduced, trace = simplify(raw)
print("bindings:", ", ".join(str(b) for b in reduced.bindings))
print("residual:")
for clause in reduced.residual:
    print("  ", clause)

# one module per clause, chained with AND gates into a final label
circuit, layout = synth_qfl(reduced)
print("qubits:", [r.name for r in circuit.registry])
print("modules:", [m.shape for m in layout.modules], "depth", depth(circuit), gate_counts(circuit))

# every data basis state through the circuit; the label marks the feasible ones
feasible = exhaustive_search(circuit, layout)
print("feasible (p1 p2 q1 q2):", sorted(feasible))
print("factors:", extract_factors(feasible, reduced, table, layout.variables))

# a uniform superposition carries all 16 states at once; conditioning on the
# label keeps exactly the two feasible ones with equal weight
state = vqs_state(np.full(4, np.pi / 2), circuit, layout)
readout = conditional_distribution(state, layout.final_label, layout.data_qubits)
print("P(label = 1) =", round(readout.probability, 6))
for bits, prob in readout.conditional.items():
    print("  ", bits, round(prob, 6))

# the same labels, checked against plain clause evaluation
names = layout.variables
for bits in itertools.product((0, 1), repeat=4):
    ok = all(c.holds(dict(zip(names, bits))) for c in reduced.residual)
    assert (bits in feasible) == ok
