"""
Circuit size across many inputs
===============================

Depth and qubit counts of the labeling circuit for every odd biprime below
1000, on its true bit lengths, with the larger sweep caps.
"""

import collections

import numpy as np

from qflfactor.checks import SWEEP_GENERIC_MAX_VARS, SWEEP_MAX_QUBITS, example_system, odd_biprimes
from qflfactor.circuit import depth, lower
from qflfactor.synthesis import clause_shape, synth_qfl

rows = []
for N in odd_biprimes(9, 1000):
    reduced = example_system(N)
    if not reduced.residual:
        continue
    circuit, layout = synth_qfl(reduced, max_qubits=SWEEP_MAX_QUBITS, generic_max_vars=SWEEP_GENERIC_MAX_VARS)
    shapes = [clause_shape(c) for c in reduced.residual]
    rows.append((N, len(shapes), circuit.n_qubits, depth(lower(circuit)), "generic" in shapes))

rows = np.array(rows)
print(f"{len(rows)} circuits; solved by simplification alone: {len(odd_biprimes(9, 1000)) - len(rows)}")

# depth per module count, template-only circuits separated from truth-table ones
by_m = collections.defaultdict(list)
for N, m, nq, d, generic in rows:
    by_m[(int(m), bool(generic))].append(int(d))
print(f"{'m':>3} {'kind':>8} {'count':>6} {'mean depth':>11} {'max depth':>10} {'10m+5':>6}")
for (m, generic), ds in sorted(by_m.items()):
    kind = "generic" if generic else "template"
    print(f"{m:>3} {kind:>8} {len(ds):>6} {np.mean(ds):>11.1f} {max(ds):>10} {10 * m + 5:>6}")

# qubit counts grow with the residual size, which drives the capacity limits
print("qubits: min", rows[:, 2].min(), "median", int(np.median(rows[:, 2])), "max", rows[:, 2].max())
