"""
Classical ideal-gas entropy
===========================

Entropy is fixed up to a constant per species. Only differences are
physical, and a reversible path gives them by integrating dQ/T.
"""

# %%
import math

from gibbslab.thermo import (EntropyConvention, GasSpecimen, entropy_difference_by_path,
                             ideal_gas_entropy, isothermal_membrane_work, thermo_mixing_entropy)

# %%
a = GasSpecimen("He", N=1000, V=1.0, T=1.0)
b = GasSpecimen("He", N=1000, V=2.0, T=1.5)
direct = ideal_gas_entropy(b) - ideal_gas_entropy(a)
by_path = entropy_difference_by_path(a, b, [(a.P, a.T), (a.P, b.T), (b.P, b.T)], steps=20000)
print(f"S(b) - S(a): direct {direct:.8f}, along a two-leg path {by_path:.8f}")

# %% [markdown]
# Changing the additive constant of a species moves both endpoints alike.

# %%
shifted = EntropyConvention({"He": 17.0})
print("with c_He = 17:", ideal_gas_entropy(b, shifted) - ideal_gas_entropy(a, shifted))

# %% [markdown]
# Two different gases at equal T and P gain 2 N ln 2 when the wall between
# them goes. The same gas gains nothing.

# %%
N = 10**4
left, right = GasSpecimen("A", N, 1.0, 1.0), GasSpecimen("B", N, 1.0, 1.0)
print("different species:", thermo_mixing_entropy(left, right, True), "=", 2 * N * math.log(2))
print("same species:     ", thermo_mixing_entropy(left, GasSpecimen("A", N, 1.0, 1.0), False))

# %% [markdown]
# The reversible work a semipermeable membrane extracts from one gas
# expanding into double volume is N T ln 2.

# %%
print("isothermal doubling work:", isothermal_membrane_work(N, 1.0, 1.0, 2.0))
