"""
The symmetric exclusion process is a ferromagnet in disguise
============================================================

Particles hopping on a graph with symmetric rates r_xy, at most one per
site, relax with a generator that is unitarily equivalent to a sector
of the spin-1/2 isotropic ferromagnet with couplings 2 r_xy.  The
equivalence is entrywise exact, and the relaxation gap turns out not to
depend on how many particles are in the system.
"""

import numpy as np

from spinlab import SpinGraph, aldous_scan, heisenberg_equivalence_check, ssep_generator

# unit-rate path on five vertices
path = SpinGraph.chain(5, twice_s=1)

print("entrywise equivalence, particle number by particle number:")
for n in range(6):
    report = heisenberg_equivalence_check(path, n)
    print("  n = %d  sector M = %+.1f  dim %2d  max |difference| = %.2e"
          % (n, report.sector, report.dimension, report.max_abs_difference))

# the gap of every sector equals the single-particle (random walk) gap
table = aldous_scan(path)
print()
print("relaxation gap by particle number:")
for n, gap in sorted(table.gaps.items()):
    print("  lambda(%d) = %.12f" % (n, gap))
print("single particle value 2(1 - cos(pi/5)) =", 2 * (1 - np.cos(np.pi / 5)))
print("uniform across sectors:", table.uniform_across_sectors)
print("particle-hole symmetric:", table.particle_hole_symmetric)

# random rates change the numbers, not the structure
rng = np.random.default_rng(6)
edges = tuple((i, i + 1, float(rng.uniform(0.3, 1.7))) for i in range(4))
random_path = SpinGraph(tuple((i, path.sites[0][1]) for i in range(5)), edges)
table = aldous_scan(random_path)
print()
print("random rates:", [round(j, 3) for _, _, j in edges])
print("gaps:", {n: round(g, 9) for n, g in sorted(table.gaps.items())},
      " uniform:", table.uniform_across_sectors)

gen, configs = ssep_generator(path, 2)
print()
print("the 2-particle generator is a %d x %d symmetric matrix on"
      % gen.shape, "configurations like", configs[:3], "...")
