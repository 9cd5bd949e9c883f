"""The spin-1 valence bond ground state as a finitely correlated state.

The state is generated by an isometry V: C^2 -> C^3 (x) C^2 through a
completely positive unital map; expectation values reduce to transfer
matrix algebra on the 2-dimensional auxiliary space.  Everything about
the state follows from a 4 x 4 matrix.
"""

import numpy as np

from spinlab import aklt_triple, correlation_length, two_point_function
from spinlab.fcs import block_expectation
from spinlab.spinops import SpinValue, aklt_edge_term, spin_matrices

triple = aklt_triple()

# the chain Hamiltonian term annihilates the state: the state is
# frustration free, every edge projector has expectation zero
term = aklt_edge_term()
print("omega(edge term) =", abs(block_expectation(triple, term, width=2)))

# transfer spectrum {1, -1/3, -1/3, -1/3}: one invariant direction and
# a three-fold degenerate decaying one
spectrum = correlation_length(triple.cp_map)
print("transfer eigenvalues:", np.round(spectrum.eigenvalues.real, 12))
print("correlation length xi = 1/ln 3 =", spectrum.xi)

# spin-spin correlations alternate in sign and decay by a factor 3 per
# site; the prefactor is 4/3
s3 = spin_matrices(SpinValue(2))[2]
curve = two_point_function(triple, s3, s3, range(1, 9)).real
print()
print(" r   <S3_0 S3_r>        (4/3)(-1/3)^r")
for r, value in zip(range(1, 9), curve):
    print("%2d   %+.12f   %+.12f" % (r, value, (4.0 / 3.0) * (-1.0 / 3.0) ** r))
