"""
Identical fermions in two boxes
===============================

An antisymmetrized pair looks, from either particle's point of view, like
an even mixture of the two orbitals. Unitary evolution cannot make two
orthogonal orbitals overlap.
"""

# %%
import numpy as np

from gibbslab.quantum import (ModeBasis, antisymmetrize, basis_state, evolve_and_check_orthogonality,
                              haar_unitary, localized_state, reduced_density_matrix,
                              symmetrization_bookkeeping)

# %%
rho = reduced_density_matrix(antisymmetrize(basis_state(2, 0), basis_state(2, 1)), "first")
print(np.round(rho.matrix.real, 12))
print("eigenvalues", rho.eigenvalues(), "purity", rho.purity())

# %%
rng = np.random.default_rng(0)
basis = ModeBasis.halves(4, 4)
phi, psi = localized_state(basis, "L", rng), localized_state(basis, "R", rng)
print("largest overlap in 1000 steps:", evolve_and_check_orthogonality(phi, psi, haar_unitary(8, rng), 1000))

# %% [markdown]
# Symmetrizing each compartment separately undercounts the joint states
# after the partition goes. The missing piece is ln C(2N, N).

# %%
b = symmetrization_bookkeeping(4, 4, 6, 6)
print("per-compartment change", b.delta_flawed, " total-state change", b.delta_correct, " gap", b.gap)
print("ln C(8, 4) =", np.log(70))
