"""
Mixing entropy is a matter of bookkeeping
=========================================

Whether removing a partition raises the entropy depends on which
particle labels the observer keeps track of. How alike the gases are
plays no part.
"""

# %%
import math

import numpy as np

from gibbslab.counting import CountingConvention
from gibbslab.mixing import (DiscriminationPolicy, MixingScenario, boltzmann_mixing_entropy,
                             convention_shift_inertness, et_distribution, et_most_probable,
                             stirling_mixing_entropy)
from gibbslab.thermo import GasSpecimen

N = 10**4


def scenario(a, b, policy, **kw):
    return MixingScenario(GasSpecimen(a, N, 1.0, 1.0), GasSpecimen(b, N, 1.0, 1.0), policy, **kw)


# %%
for species in (("A", "A"), ("A", "B")):
    for policy in DiscriminationPolicy:
        s = scenario(*species, policy)
        print(f"{species} {policy.value:>10}: exact {boltzmann_mixing_entropy(s):12.4f}"
              f"  leading order {stirling_mixing_entropy(s):12.4f}")
print("2 N ln 2 =", 2 * N * math.log(2))

# %% [markdown]
# A similarity score attached to the species changes nothing.

# %%
print({round(sim, 2): boltzmann_mixing_entropy(scenario("A", "B", DiscriminationPolicy.BY_SPECIES, similarity=sim))
       for sim in np.linspace(0, 1, 5)})

# %% [markdown]
# Dividing every count by a global constant, be it N_total! or a
# symmetrized total count, cancels in the difference.

# %%
s = scenario("A", "A", DiscriminationPolicy.BY_ORIGIN, convention=CountingConvention.BOSE)
for kind in ("factorial", "bose", "fermi"):
    print(kind, convention_shift_inertness(s, kind))

# %% [markdown]
# With the partition open, the number of particles on the left is binomial.

# %%
p = et_distribution(1000, 1.0, 3.0)
k = np.arange(1001)
print("mean", (k * p).sum(), "variance", ((k - 250) ** 2 * p).sum(),
      "most probable", et_most_probable(1000, 1.0, 3.0).best)
