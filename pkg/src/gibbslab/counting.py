"""Microstate counts for N particles over X one-particle states.

=====================  =====================
convention             number of states W
=====================  =====================
DISTINGUISHABLE        X**N
CORRECTED_BOLTZMANN    X**N / N!
BOSE                   C(N + X - 1, N)
FERMI                  C(X, N)
=====================  =====================

Counts are returned as :class:`~gibbslab.logcomb.LogQuantity`. Entropies are
``ln W`` in units of k.
"""
import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InfeasibleStateError
from .logcomb import LogQuantity, ln_binomial, ln_factorial

__all__ = [
    "CountingConvention",
    "StateSpaceSpec",
    "ln_microstate_count",
    "dilute_limit_deviation",
    "combined_count_after_removal",
    "entropy_from_count",
    "entropy_difference",
]


class CountingConvention(enum.Enum):
    DISTINGUISHABLE = "distinguishable"
    CORRECTED_BOLTZMANN = "corrected-boltzmann"
    BOSE = "bose"
    FERMI = "fermi"

    @classmethod
    def parse(cls, text):
        key = str(text).strip().lower().replace("_", "-")
        for member in cls:
            if member.value == key:
                return member
        raise DomainError(f"unknown counting convention {text!r}; expected one of "
                          + ", ".join(m.value for m in cls))


@dataclass(frozen=True)
class StateSpaceSpec:
    """``N`` particles sharing ``X`` one-particle states."""

    N: int
    X: int

    def __post_init__(self):
        if self.N < 0:
            raise DomainError(f"N must be >= 0, got {self.N}")
        if self.X < 1:
            raise DomainError(f"X must be >= 1, got {self.X}")


def _ln_count(N, X, conv):
    if conv is CountingConvention.DISTINGUISHABLE:
        return N * math.log(X) if N else 0.0
    if conv is CountingConvention.CORRECTED_BOLTZMANN:
        return math.fsum((N * math.log(X), -ln_factorial(N))) if N else 0.0
    if conv is CountingConvention.BOSE:
        return ln_binomial(N + X - 1, N)
    if conv is CountingConvention.FERMI:
        if N > X:
            raise InfeasibleStateError(f"{N} fermions do not fit in {X} states")
        return ln_binomial(X, N)
    raise DomainError(f"unknown convention {conv!r}")


def ln_microstate_count(spec, conv):
    """Number of ``spec.N``-particle states under ``conv``, as a LogQuantity.

    Raises
    ------
    InfeasibleStateError
        Fermi counting with more particles than states.
    """
    return LogQuantity(_ln_count(spec.N, spec.X, conv))


def dilute_limit_deviation(spec, conv):
    """``ln W_conv - ln(X**N / N!)`` for Bose or Fermi counting.

    Evaluated as ``sum_j log1p(+-j/X)`` for ``j < N``, which is the same
    quantity without the cancellation between two large logarithms. It goes
    to 0 as ``X/N`` grows.
    """
    if conv not in (CountingConvention.BOSE, CountingConvention.FERMI):
        raise DomainError("dilute limit is defined for Bose and Fermi counting only")
    if spec.N < 1:
        raise DomainError("dilute limit needs N >= 1")
    if conv is CountingConvention.FERMI and spec.N > spec.X:
        raise InfeasibleStateError(f"{spec.N} fermions do not fit in {spec.X} states")
    sign = 1.0 if conv is CountingConvention.BOSE else -1.0
    j = np.arange(1, spec.N, dtype=np.float64)
    return math.fsum(np.log1p(sign * j / spec.X))


def combined_count_after_removal(W_single, N):
    """Labelled count ``W**2 (2N)!/(N! N!)`` after removing the partition between two equal halves."""
    if N < 0:
        raise DomainError("N must be >= 0")
    return LogQuantity(math.fsum((2.0 * W_single.ln_value, ln_binomial(2 * N, N))))


def entropy_from_count(lnW):
    """``S = ln W`` (k = 1)."""
    return float(lnW.ln_value)


def entropy_difference(lnW2, lnW1):
    """``S2 - S1 = ln(W2 / W1)``."""
    return lnW2.ln_value - lnW1.ln_value
