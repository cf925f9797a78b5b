"""
Counting in logarithms
======================

Microstate counts for a mole-sized gas overflow any float long before they
become interesting. Everything in gibbslab carries them as logarithms.
"""

# %%
import math

from gibbslab.logcomb import LogQuantity, ln_binomial, ln_factorial, stirling_ln_factorial

# %% [markdown]
# ln n! is exact for small n and stays accurate far past where n! itself
# has any float representation.

# %%
for n in (10, 1000, 10**6, 10**12):
    print(f"n={n:>14}  ln n! = {ln_factorial(n):.10e}")

# %% [markdown]
# Stirling's formula with its ln(2 pi n)/2 term misses by about 1/(12 n).
# Dropping that term, as the thermodynamic limit does, costs far more in
# absolute terms, though it is tiny next to n ln n.

# %%
for n in (10, 10**4, 10**8):
    exact = ln_factorial(n)
    print(f"n={n:>10}  exact - Stirling = {exact - stirling_ln_factorial(n):.3e}"
          f"   exact - (n ln n - n) = {exact - (n * math.log(n) - n):.6f}")

# %% [markdown]
# Products and ratios of huge counts are sums and differences of logs.

# %%
W = LogQuantity(ln_binomial(2 * 10**4, 10**4))
print("ln C(20000, 10000) =", W.ln_value, " value as float:", W.value)
print("ratio C(20000,10000)/C(20000,9999) =", (W / LogQuantity(ln_binomial(2 * 10**4, 9999))).value)
