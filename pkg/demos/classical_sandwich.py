"""Squeezing the quantum partition function between classical integrals.

With spin operators normalized by 1/s and the trace divided by the
dimension, the quantum partition function of a bilinear model sits
above the classical sphere integral at the same temperature and below
it at a slightly shifted one:

    Z_C(beta)  <=  Z_Q(beta, s)  <=  Z_C(beta (1 + 1/s)^2)

As s grows both ends close in and the quantum value converges onto the
classical one.
"""

import numpy as np

from spinlab import ModelSpec, SpinGraph, classical_partition, quantum_partition, sandwich_check
from spinlab.climit import effective_upper_constant

model = ModelSpec.xxx()
betas = (0.5, 1.0, 2.0)

# the classical integral for a single bond has a closed form
print("classical integral vs sinh(beta)/beta:")
pair = SpinGraph.chain(2, twice_s=1)
for beta in betas:
    z = classical_partition(pair, model, beta)
    print("  beta %.1f   %.12f   (exact %.12f, quadrature n = %d)"
          % (beta, z.value, np.sinh(beta) / beta, z.n_polar))

print()
print("the sandwich across spin magnitudes at beta = 1:")
print("  2s    Z_C          Z_Q          upper end     fitted c")
for twice_s in (1, 2, 3, 4, 5):
    graph = SpinGraph.chain(2, twice_s=twice_s)
    report = sandwich_check(graph, model, (1.0,))
    c = effective_upper_constant(graph, model, 1.0)
    print("  %d    %.8f   %.8f   %.8f   %.3f"
          % (twice_s, report.z_classical[0], report.z_quantum[0],
             report.z_upper[0], c))

print()
print("the gap Z_Q - Z_C shrinks monotonically with s at every beta:")
for beta in betas:
    gaps = []
    for twice_s in (1, 2, 3, 4, 5):
        graph = SpinGraph.chain(2, twice_s=twice_s)
        rep = sandwich_check(graph, model, (beta,))
        gaps.append(rep.z_quantum[0] - rep.z_classical[0])
    print("  beta %.1f:" % beta, np.round(gaps, 6))
