"""Energy levels ordered by total spin, in both directions.

Ferromagnets put the large-spin multiplets at the bottom (the lowest
energy E(H, S) strictly decreases as S grows).  Bipartite
antiferromagnets do the opposite above the ground spin |S_A - S_B|.
Both orderings are checked here on small chains.
"""

import numpy as np

from spinlab import ModelSpec, SpinGraph, build_hamiltonian, foel_check, lieb_mattis_check, spin_level_table

print("-- ferromagnetic chain, five spin-1 sites --")
graph = SpinGraph.chain(5, twice_s=2)
ham = build_hamiltonian(graph, ModelSpec.xxx())
table = spin_level_table(ham, graph)
for s in table.spins_descending:
    print("  S = %.0f   E(H, S) = %+.6f   multiplets: %d"
          % (s, table.energies[s], table.multiplets[s]))
report = foel_check(table)
print("ordered:", report.ordered,
      " smallest margin: %.3e" % min(m for _, _, m in report.margins))

print()
print("-- random couplings keep the ordering --")
rng = np.random.default_rng(0)
for trial in range(3):
    couplings = rng.uniform(0.1, 2.0, size=5)
    chain = SpinGraph.chain(6, twice_s=1, coupling=couplings)
    h = build_hamiltonian(chain, ModelSpec.xxx())
    rep = foel_check(spin_level_table(h, chain))
    print("  trial %d  couplings %s  ordered: %s"
          % (trial, np.round(couplings, 2), rep.ordered))

print()
print("-- antiferromagnetic ordering on the alternating 4-chain --")
afm = lieb_mattis_check(SpinGraph.chain(4, twice_s=1), (0, 2), (1, 3))
print("expected ground spin:", afm.expected_ground_spin,
      " found:", afm.ground_spin)
for s_low, s_high, margin in afm.margins:
    print("  E(H, %.0f) < E(H, %.0f)  margin %.6f" % (s_low, s_high, margin))
print("verdict:", afm.ground_ok and afm.ordering_ok)
