"""Entropy change on removing a partition, under a chosen discrimination policy.

Two compartments at equal pressure and temperature are joined. Which
microstates count as different afterwards depends on what the observer is
willing to tell apart:

``NONE``
    nothing is told apart; the equilibrium occupation of each half is the
    same before and after, so the count does not change.
``BY_SPECIES``
    particles are classed by species. Same-species gases behave as under
    ``NONE``; different species pick up the multinomial
    ``N_A! N_B! / (N_A1! N_A2! N_B1! N_B2!)`` at the equilibrium split.
``BY_ORIGIN``
    every particle is followed from its starting compartment, so the
    ``C(N_L + N_R, N_L)`` ways of placing labelled particles over the two
    halves all count (the ``W**2 (2N)!/(N!N!)`` count).

Counts are kept as lists of log-terms and differenced with an exactly
rounded sum, so adding the same global constant to every count leaves the
result bit-identical.

The module also carries the open-system (Ehrenfest-Trkal) treatment, where
the occupation of a sub-volume is binomially distributed.
"""
import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .counting import CountingConvention, _ln_count
from .errors import DomainError
from .logcomb import ln_binomial, ln_factorial, ln_factorials
from .thermo import GasSpecimen, _check_equal_state

__all__ = [
    "DiscriminationPolicy",
    "MixingScenario",
    "mixing_log_counts",
    "boltzmann_mixing_entropy",
    "stirling_mixing_entropy",
    "global_count_constant",
    "convention_shift_inertness",
    "Peak",
    "et_most_probable",
    "et_probability",
    "et_distribution",
    "et_reservoir_entropy_change",
    "et_expansion_entropy",
    "et_unequal_mixing_entropy",
]


class DiscriminationPolicy(enum.Enum):
    BY_SPECIES = "by-species"
    BY_ORIGIN = "by-origin"
    NONE = "none"

    @classmethod
    def parse(cls, text):
        key = str(text).strip().lower().replace("_", "-")
        for member in cls:
            if member.value == key:
                return member
        raise DomainError(f"unknown discrimination policy {text!r}; expected one of "
                          + ", ".join(m.value for m in cls))


@dataclass(frozen=True)
class MixingScenario:
    """Two specimens about to be joined.

    ``states_per_volume`` converts volumes to numbers of one-particle states
    (rounded to integers). ``similarity`` is a label-distance between the
    species tags; it is carried along for bookkeeping and never enters a
    result.
    """

    left: GasSpecimen
    right: GasSpecimen
    policy: DiscriminationPolicy = DiscriminationPolicy.BY_SPECIES
    convention: CountingConvention = CountingConvention.DISTINGUISHABLE
    states_per_volume: float = 1e6
    similarity: float = 0.0

    def __post_init__(self):
        _check_equal_state(self.left, self.right)
        if not self.states_per_volume > 0:
            raise DomainError("states_per_volume must be positive")
        for g in (self.left, self.right):
            if self._states(g.V) < 1:
                raise DomainError(f"volume {g.V} holds no one-particle state")

    def _states(self, volume):
        return int(round(self.states_per_volume * volume))

    @property
    def same_species(self):
        return self.left.species == self.right.species

    @property
    def n_total(self):
        return self.left.N + self.right.N

    @property
    def x_left(self):
        return self._states(self.left.V)

    @property
    def x_right(self):
        return self._states(self.right.V)

    @property
    def x_total(self):
        return self._states(self.left.V + self.right.V)

    @property
    def mixes(self):
        """Whether the policy can see any change when the partition goes."""
        if self.policy is DiscriminationPolicy.NONE:
            return False
        if self.policy is DiscriminationPolicy.BY_SPECIES:
            return not self.same_species
        return True


class Peak(NamedTuple):
    lower: int
    upper: int
    best: int


def et_most_probable(N, V1, V2):
    """Most probable occupation of ``V1`` under the binomial law.

    Returns the integers on either side of ``N V1/(V1+V2)`` and whichever of
    the two is more probable (the lower one on a tie).
    """
    _check_volumes(V1, V2)
    mean = N * V1 / (V1 + V2)
    lower = min(N, int(math.floor(mean)))
    upper = min(N, int(math.ceil(mean)))
    if lower == upper:
        return Peak(lower, upper, lower)
    lp_lower = _ln_et_probability(lower, N, V1, V2)
    lp_upper = _ln_et_probability(upper, N, V1, V2)
    return Peak(lower, upper, upper if lp_upper > lp_lower else lower)


def _compartment_terms(occupations, x, conv):
    """log-terms for one compartment holding classes with the given occupations."""
    if conv is CountingConvention.DISTINGUISHABLE:
        n = sum(occupations)
        return [n * math.log(x)] if n else []
    return [_ln_count(n, x, conv) for n in occupations if n]


def mixing_log_counts(s):
    """Log-terms of the counts before and after removing the partition.

    Returns
    -------
    before, after : list of float
        ``ln W = math.fsum(terms)`` for each state.
    """
    conv = s.convention
    nl, nr = s.left.N, s.right.N
    xl, xr = s.x_left, s.x_right
    if conv is CountingConvention.FERMI and (nl > xl or nr > xr):
        raise DomainError("more fermions than one-particle states in a compartment")
    before = _compartment_terms([nl], xl, conv) + _compartment_terms([nr], xr, conv)

    if not s.mixes:
        # equilibrium occupation of each half is unchanged
        return before, list(before)

    if s.policy is DiscriminationPolicy.BY_ORIGIN:
        n_left = et_most_probable(s.n_total, s.left.V, s.right.V).best
        after = (_compartment_terms([n_left], xl, conv)
                 + _compartment_terms([s.n_total - n_left], xr, conv)
                 + [ln_binomial(s.n_total, n_left)])
        return before, after

    # different species, classed by species
    a_left = et_most_probable(nl, s.left.V, s.right.V).best
    b_left = et_most_probable(nr, s.left.V, s.right.V).best
    a_right, b_right = nl - a_left, nr - b_left
    if conv is CountingConvention.FERMI and (a_left + b_left > xl or a_right + b_right > xr):
        raise DomainError("more fermions than one-particle states in a compartment")
    after = (_compartment_terms([a_left, b_left], xl, conv)
             + _compartment_terms([a_right, b_right], xr, conv))
    if conv is CountingConvention.DISTINGUISHABLE:
        after += [ln_binomial(nl, a_left), ln_binomial(nr, b_left)]
    return before, after


def _delta(before, after):
    return math.fsum(list(after) + [-t for t in before])


def boltzmann_mixing_entropy(s):
    """Exact ``ln(W_after / W_before)`` for the scenario, in units of k.

    Symmetric same-species gases give ``ln C(2N, N)`` under ``BY_ORIGIN``
    and 0 otherwise; different species under ``BY_SPECIES`` give
    ``2 ln C(N, N/2)``. Both approach ``2N ln 2`` at large ``N``; see
    :func:`stirling_mixing_entropy` for the leading-order value.
    """
    before, after = mixing_log_counts(s)
    return _delta(before, after)


def stirling_mixing_entropy(s):
    """Leading-order (Stirling) mixing entropy ``sum_c N_c ln(V / V_c)``, or 0 when nothing mixes."""
    if not s.mixes:
        return 0.0
    v = s.left.V + s.right.V
    return s.left.N * math.log(v / s.left.V) + s.right.N * math.log(v / s.right.V)


def global_count_constant(s, kind="factorial"):
    """Log of a factor depending only on the conserved totals.

    ``"factorial"`` is ``-ln N_total!`` (dividing by the permutations of all
    same-kind particles); ``"bose"`` and ``"fermi"`` are the log of the
    total Bose or Fermi count of ``N_total`` particles over all states.
    """
    n, x = s.n_total, s.x_total
    if kind == "factorial":
        return -ln_factorial(n)
    if kind == "bose":
        return _ln_count(n, x, CountingConvention.BOSE)
    if kind == "fermi":
        return _ln_count(n, x, CountingConvention.FERMI)
    raise DomainError(f"unknown constant kind {kind!r}")


def convention_shift_inertness(s, kind="factorial"):
    """Mixing entropy with and without a global count constant applied to both states.

    Returns
    -------
    delta_with, delta_without : float
        Equal to each other; the constant cancels between before and after.
    """
    before, after = mixing_log_counts(s)
    c = global_count_constant(s, kind)
    with_c = _delta([*before, c], [*after, c])
    return with_c, _delta(before, after)


# -- open systems ---------------------------------------------------------

def _check_volumes(V1, V2):
    if not (V1 > 0 and V2 > 0):
        raise DomainError("volumes must be positive")


def _ln_et_probability(N1, N, V1, V2):
    v = V1 + V2
    terms = [ln_binomial(N, N1)]
    if N1:
        terms.append(N1 * math.log(V1 / v))
    if N - N1:
        terms.append((N - N1) * math.log(V2 / v))
    return math.fsum(terms)


def et_probability(N1, N, V1, V2):
    """Probability of finding ``N1`` of ``N`` particles in ``V1`` when ``V1`` and ``V2`` exchange particles.

    ``C(N, N1) (V1/V)**N1 (V2/V)**(N-N1)``, evaluated in log space.
    """
    if not 0 <= N1 <= N:
        raise DomainError(f"need 0 <= N1 <= N, got N1={N1}, N={N}")
    _check_volumes(V1, V2)
    return math.exp(_ln_et_probability(N1, N, V1, V2))


def et_distribution(N, V1, V2):
    """The whole binomial occupation law of ``V1`` as an array indexed by ``N1``."""
    _check_volumes(V1, V2)
    if N < 0:
        raise DomainError("N must be >= 0")
    v = V1 + V2
    k = np.arange(N + 1)
    lf = ln_factorials(N)
    ln_p = lf[N] - lf - lf[::-1] + k * math.log(V1 / v) + (N - k) * math.log(V2 / v)
    return np.exp(ln_p)


def et_reservoir_entropy_change(N1_a, N1_b, V1, density):
    """Entropy change of a sub-volume ``V1`` in contact with an infinite particle reservoir.

    Only differences are defined: ``[-ln N1_b! + N1_b ln(rho V1)] - [-ln N1_a! + N1_a ln(rho V1)]``
    with ``rho`` the reservoir number density.
    """
    if N1_a < 0 or N1_b < 0:
        raise DomainError("occupations must be >= 0")
    if not (V1 > 0 and density > 0):
        raise DomainError("need V1 > 0 and density > 0")
    mean = math.log(density * V1)
    return math.fsum((-ln_factorial(N1_b), N1_b * mean, ln_factorial(N1_a), -N1_a * mean))


def et_expansion_entropy(N, V1, V2):
    """Entropy gained when ``N`` particles confined to ``V1`` spread over ``V1 + V2``.

    Ratio of binomial probabilities, equilibrium occupation over all-in-``V1``:
    ``ln C(N, n*) + (N - n*) ln(V2/V1)``. For ``V1 == V2`` this is exactly
    ``ln C(N, N/2)``, which tends to ``N ln 2``. (Reading the textbook
    expression with the ``2**-N`` inside the logarithm literally would give a
    small negative number instead, so the probability ratio is used.)
    """
    _check_volumes(V1, V2)
    if N < 0:
        raise DomainError("N must be >= 0")
    if V1 == V2 and N % 2:
        raise DomainError("symmetric expansion needs an even N")
    n_eq = et_most_probable(N, V1, V2).best
    terms = [ln_binomial(N, n_eq)]
    if N - n_eq and V1 != V2:
        terms.append((N - n_eq) * math.log(V2 / V1))
    return math.fsum(terms)


def et_unequal_mixing_entropy(N_A, N_B):
    """Mixing entropy of two different gases in equal volumes, each expanding independently."""
    return et_expansion_entropy(N_A, 1.0, 1.0) + et_expansion_entropy(N_B, 1.0, 1.0)
