import itertools
import math

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gibbslab.counting import (CountingConvention, StateSpaceSpec, combined_count_after_removal,
                               dilute_limit_deviation, entropy_difference, entropy_from_count,
                               ln_microstate_count)
from gibbslab.errors import DomainError, InfeasibleStateError
from gibbslab.logcomb import LogQuantity, ln_binomial

C = CountingConvention


def occupation_vectors(N, X, max_occ):
    """All occupation vectors of X modes summing to N, each entry <= max_occ."""
    return sum(1 for occ in itertools.product(range(min(N, max_occ) + 1), repeat=X) if sum(occ) == N)


@pytest.mark.parametrize("N", range(0, 5))
@pytest.mark.parametrize("X", range(1, 6))
def test_closed_forms_match_occupation_enumeration(N, X):
    assert round(ln_microstate_count(StateSpaceSpec(N, X), C.DISTINGUISHABLE).value) == X**N
    assert round(ln_microstate_count(StateSpaceSpec(N, X), C.BOSE).value) == occupation_vectors(N, X, N)
    fermi = occupation_vectors(N, X, 1)
    if N > X:
        assert fermi == 0
        with pytest.raises(InfeasibleStateError):
            ln_microstate_count(StateSpaceSpec(N, X), C.FERMI)
    else:
        assert round(ln_microstate_count(StateSpaceSpec(N, X), C.FERMI).value) == fermi


def test_examples():
    assert ln_microstate_count(StateSpaceSpec(2, 3), C.BOSE).ln_value == pytest.approx(math.log(6), rel=1e-15)
    assert ln_microstate_count(StateSpaceSpec(2, 3), C.FERMI).ln_value == pytest.approx(math.log(3), rel=1e-15)
    assert ln_microstate_count(StateSpaceSpec(0, 5), C.DISTINGUISHABLE).ln_value == 0.0
    assert ln_microstate_count(StateSpaceSpec(0, 5), C.CORRECTED_BOLTZMANN).ln_value == 0.0
    assert ln_microstate_count(StateSpaceSpec(3, 4), C.CORRECTED_BOLTZMANN).ln_value == pytest.approx(
        math.log(64 / 6), rel=1e-15)


def test_spec_validation():
    with pytest.raises(DomainError):
        StateSpaceSpec(-1, 3)
    with pytest.raises(DomainError):
        StateSpaceSpec(1, 0)
    assert C.parse("Corrected_Boltzmann") is C.CORRECTED_BOLTZMANN
    with pytest.raises(DomainError):
        C.parse("boltzmann")


def mp_deviation(N, X, conv):
    mpmath.mp.dps = 50
    classical = N * mpmath.log(X) - mpmath.loggamma(N + 1)
    if conv is C.BOSE:
        exact = mpmath.loggamma(N + X) - mpmath.loggamma(N + 1) - mpmath.loggamma(X)
    else:
        exact = mpmath.loggamma(X + 1) - mpmath.loggamma(N + 1) - mpmath.loggamma(X - N + 1)
    return float(exact - classical)


@pytest.mark.parametrize("conv", [C.BOSE, C.FERMI])
def test_dilute_deviation_against_high_precision(conv):
    for N, X in [(2, 10**6), (10, 1000), (500, 10**5), (3, 4)]:
        assert dilute_limit_deviation(StateSpaceSpec(N, X), conv) == pytest.approx(
            mp_deviation(N, X, conv), rel=1e-12, abs=1e-18)


@pytest.mark.parametrize("conv", [C.BOSE, C.FERMI])
def test_dilute_limit(conv):
    devs = [abs(dilute_limit_deviation(StateSpaceSpec(2, x), conv)) for x in (10**3, 10**4, 10**5, 10**6)]
    assert devs[-1] < 2e-6
    assert all(a > b for a, b in zip(devs, devs[1:]))


def test_dilute_limit_domain():
    with pytest.raises(DomainError):
        dilute_limit_deviation(StateSpaceSpec(2, 10), C.DISTINGUISHABLE)
    with pytest.raises(DomainError):
        dilute_limit_deviation(StateSpaceSpec(0, 10), C.BOSE)
    with pytest.raises(InfeasibleStateError):
        dilute_limit_deviation(StateSpaceSpec(11, 10), C.FERMI)


@given(st.integers(1, 2000), st.integers(1, 10**7))
def test_bose_above_and_fermi_below_classical(N, X):
    spec = StateSpaceSpec(N, X)
    assert dilute_limit_deviation(spec, C.BOSE) >= 0
    if N <= X:
        assert dilute_limit_deviation(spec, C.FERMI) <= 0


def test_combined_count():
    assert combined_count_after_removal(LogQuantity(0.0), 2).ln_value == pytest.approx(math.log(6), rel=1e-15)
    N = 10**4
    W = LogQuantity(123.0)
    combined = combined_count_after_removal(W, N)
    assert combined.ln_value - 2 * 123.0 == pytest.approx(ln_binomial(2 * N, N), abs=1e-9)
    # ln C(2N, N) = 2N ln 2 - ln(pi N)/2 + O(1/N)
    assert ln_binomial(2 * N, N) == pytest.approx(2 * N * math.log(2) - 0.5 * math.log(math.pi * N), abs=1e-4)


def test_entropy_helpers():
    N = 10**4
    W = LogQuantity(40.0)
    after = combined_count_after_removal(W, N)
    before = W * W
    dS = entropy_difference(after, before)
    assert dS == pytest.approx(2 * N * math.log(2), abs=math.log(N))
    assert entropy_from_count(W) == 40.0
