"""
Four ways to count states
=========================

N particles over X one-particle states: labelled, labelled with the 1/N!
correction, bosons and fermions.
"""

# %%
from gibbslab.counting import (CountingConvention, StateSpaceSpec, dilute_limit_deviation,
                               ln_microstate_count)
from gibbslab.quantum import enumerate_states

# %%
spec = StateSpaceSpec(N=3, X=4)
for conv in CountingConvention:
    W = ln_microstate_count(spec, conv).value
    line = f"{conv.value:>20}: W = {W:.4f}"
    if conv is not CountingConvention.CORRECTED_BOLTZMANN:
        line += f"   by listing states: {enumerate_states(spec.N, spec.X, conv)}"
    print(line)

# %% [markdown]
# When states vastly outnumber particles, Bose and Fermi counts both
# collapse onto X^N / N!.

# %%
for X in (10**2, 10**4, 10**6):
    bose = dilute_limit_deviation(StateSpaceSpec(5, X), CountingConvention.BOSE)
    fermi = dilute_limit_deviation(StateSpaceSpec(5, X), CountingConvention.FERMI)
    print(f"X={X:>8}  ln W - ln(X^N/N!): bose {bose:+.3e}  fermi {fermi:+.3e}")
