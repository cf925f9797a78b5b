import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gibbslab.counting import CountingConvention as C
from gibbslab.errors import DomainError, PreconditionError
from gibbslab.logcomb import ln_binomial, ln_factorial
from gibbslab.mixing import (DiscriminationPolicy as P, MixingScenario, boltzmann_mixing_entropy,
                             convention_shift_inertness, et_distribution, et_expansion_entropy,
                             et_most_probable, et_probability, et_reservoir_entropy_change,
                             et_unequal_mixing_entropy, global_count_constant, mixing_log_counts,
                             stirling_mixing_entropy)
from gibbslab.thermo import GasSpecimen, thermo_mixing_entropy

N = 10**4
LN2 = math.log(2)


def scenario(species=("A", "B"), n=(N, N), v=(1.0, 1.0), **kw):
    return MixingScenario(GasSpecimen(species[0], n[0], v[0], 1.0),
                          GasSpecimen(species[1], n[1], v[1], 1.0), **kw)


def test_same_species_no_discrimination():
    s = scenario(("A", "A"), policy=P.NONE)
    assert boltzmann_mixing_entropy(s) == 0.0
    assert stirling_mixing_entropy(s) == 0.0
    assert boltzmann_mixing_entropy(scenario(("A", "A"), policy=P.BY_SPECIES)) == 0.0


def test_different_species_by_species():
    s = scenario(policy=P.BY_SPECIES)
    assert stirling_mixing_entropy(s) == pytest.approx(2 * N * LN2, rel=1e-15)
    assert boltzmann_mixing_entropy(s) == pytest.approx(2 * ln_binomial(N, N // 2), abs=1e-9)
    assert stirling_mixing_entropy(s) - boltzmann_mixing_entropy(s) == pytest.approx(
        math.log(math.pi * N / 2), abs=1e-3)


def test_same_species_by_origin_is_log_binomial():
    s = scenario(("A", "A"), policy=P.BY_ORIGIN)
    assert boltzmann_mixing_entropy(s) == ln_binomial(2 * N, N)
    assert boltzmann_mixing_entropy(s) == pytest.approx(2 * N * LN2 - 0.5 * math.log(math.pi * N), abs=1e-4)


@pytest.mark.parametrize("conv", [C.DISTINGUISHABLE, C.CORRECTED_BOLTZMANN])
def test_classical_conventions_agree(conv):
    base = boltzmann_mixing_entropy(scenario(policy=P.BY_SPECIES))
    assert boltzmann_mixing_entropy(scenario(policy=P.BY_SPECIES, convention=conv)) == pytest.approx(base, abs=1e-9)


@pytest.mark.parametrize("conv", [C.BOSE, C.FERMI])
def test_quantum_conventions_close_to_classical_when_dilute(conv):
    base = boltzmann_mixing_entropy(scenario(policy=P.BY_SPECIES))
    s = scenario(policy=P.BY_SPECIES, convention=conv, states_per_volume=1e9)
    assert boltzmann_mixing_entropy(s) == pytest.approx(base, rel=1e-4)


def test_similarity_is_inert():
    values = {boltzmann_mixing_entropy(scenario(policy=P.BY_SPECIES, similarity=s))
              for s in np.linspace(0.0, 1.0, 10)}
    assert len(values) == 1


def test_agrees_with_thermodynamics_to_log_order():
    s = scenario(policy=P.BY_SPECIES)
    thermo = thermo_mixing_entropy(s.left, s.right, True)
    assert abs(boltzmann_mixing_entropy(s) - thermo) / thermo < 2 * math.log(N) / N


def test_unequal_volumes():
    s = scenario(("A", "B"), n=(100, 300), v=(1.0, 3.0))
    assert stirling_mixing_entropy(s) == pytest.approx(100 * math.log(4) + 300 * math.log(4 / 3))
    a1 = et_most_probable(100, 1.0, 3.0).best
    b1 = et_most_probable(300, 1.0, 3.0).best
    assert boltzmann_mixing_entropy(s) == pytest.approx(
        ln_binomial(100, a1) + a1 * math.log(1e6) + (100 - a1) * math.log(3e6) - 100 * math.log(1e6)
        + ln_binomial(300, b1) + b1 * math.log(1e6) + (300 - b1) * math.log(3e6) - 300 * math.log(3e6),
        abs=1e-8)


def test_scenario_validation():
    with pytest.raises(PreconditionError):
        scenario(n=(N, 2 * N))
    with pytest.raises(DomainError):
        scenario(states_per_volume=0)
    with pytest.raises(DomainError):
        boltzmann_mixing_entropy(scenario(n=(10, 10), convention=C.FERMI, states_per_volume=5))
    assert P.parse("BY_ORIGIN") is P.BY_ORIGIN
    with pytest.raises(DomainError):
        P.parse("by-colour")


scenarios = st.builds(
    lambda n1, n2, v1, sp, pol, conv: scenario(sp, (n1, n2), (v1, v1 * n2 / n1), policy=pol, convention=conv),
    st.integers(1, 3000), st.integers(1, 3000), st.floats(0.5, 2.0),
    st.sampled_from([("A", "A"), ("A", "B")]), st.sampled_from(list(P)),
    st.sampled_from([C.DISTINGUISHABLE, C.CORRECTED_BOLTZMANN, C.BOSE]))


@given(scenarios, st.sampled_from(["factorial", "bose", "fermi"]))
@settings(max_examples=60, deadline=None)
def test_global_constant_is_inert(s, kind):
    with_c, without = convention_shift_inertness(s, kind)
    assert with_c == without


@given(scenarios)
@settings(max_examples=60, deadline=None)
def test_mixing_entropy_nonnegative_and_zero_without_mixing(s):
    dS = boltzmann_mixing_entropy(s)
    if not s.mixes:
        assert dS == 0.0
    assert dS >= -1e-9
    before, after = mixing_log_counts(s)
    assert len(before) >= 1


def test_global_constants():
    s = scenario(("A", "A"), n=(3, 4), v=(3.0, 4.0))
    assert global_count_constant(s, "factorial") == -ln_factorial(7)
    with pytest.raises(DomainError):
        global_count_constant(s, "planck")


# -- open systems -------------------------------------------------------------

def test_et_distribution_moments():
    for V1, V2 in [(1.0, 1.0), (1.0, 3.0)]:
        p = et_distribution(1000, V1, V2)
        k = np.arange(1001)
        q = V1 / (V1 + V2)
        assert math.fsum(p) == pytest.approx(1.0, abs=1e-12)
        mean = math.fsum(k * p)
        var = math.fsum((k - mean) ** 2 * p)
        assert mean == pytest.approx(1000 * q, rel=1e-9)
        assert var == pytest.approx(1000 * q * (1 - q), rel=1e-9)
        peak = et_most_probable(1000, V1, V2)
        assert int(np.argmax(p)) in (peak.lower, peak.upper)
        assert int(np.argmax(p)) == peak.best


def test_et_peak_position():
    peak = et_most_probable(N, 1.0, 3.0)
    assert abs(peak.best - 2500) <= 1


@given(st.integers(0, 400), st.floats(0.1, 10), st.floats(0.1, 10))
def test_et_probability_matches_distribution(n, V1, V2):
    p = et_distribution(n, V1, V2)
    k = n // 3
    assert et_probability(k, n, V1, V2) == pytest.approx(p[k], rel=1e-9, abs=1e-300)
    assert math.fsum(p) == pytest.approx(1.0, abs=1e-12)


@given(st.integers(0, 5000), st.floats(0.05, 20), st.floats(0.05, 20))
def test_argmax_tie_break(n, V1, V2):
    peak = et_most_probable(n, V1, V2)
    assert peak.lower <= peak.best <= peak.upper
    mean = n * V1 / (V1 + V2)
    assert peak.lower <= mean + 1e-9 and peak.upper >= mean - 1e-9


def test_reservoir_maximum_and_curvature():
    rho_v = 100.0
    density, V1 = rho_v, 1.0
    scores = [-ln_factorial(n) + n * math.log(rho_v) for n in range(300)]
    assert int(np.argmax(scores)) in (math.floor(rho_v), math.floor(rho_v) - 1)
    n0, m = 10**4, 100
    dS = et_reservoir_entropy_change(n0, n0 + m, V1, n0)
    assert dS == pytest.approx(-m**2 / (2 * n0), rel=0.02)
    assert et_reservoir_entropy_change(5, 5, V1, density) == 0.0


def test_expansion_entropy():
    exact = et_expansion_entropy(N, 1.0, 1.0)
    assert exact == ln_binomial(N, N // 2)
    assert exact == pytest.approx(N * LN2 - 0.5 * math.log(math.pi * N / 2), abs=1e-3)
    ratios = [et_expansion_entropy(n, 1.0, 1.0) / (n * LN2) for n in (10**2, 10**4, 10**6)]
    assert all(r < 1 for r in ratios)
    assert ratios[0] < ratios[1] < ratios[2]
    # relative correction is ln(pi N / 2) / (2 N ln 2)
    assert 1 - ratios[-1] == pytest.approx(math.log(math.pi * 10**6 / 2) / (2 * 10**6 * LN2), rel=1e-3)
    with pytest.raises(DomainError):
        et_expansion_entropy(11, 1.0, 1.0)


def test_unequal_expansion_volumes():
    # n* = 2500 of 10^4 stay in V1 when V2 = 3 V1
    assert et_expansion_entropy(N, 1.0, 3.0) == pytest.approx(
        ln_binomial(N, 2500) + 7500 * math.log(3.0), abs=1e-9)
    assert et_expansion_entropy(N, 1.0, 3.0) == pytest.approx(N * math.log(4), rel=1e-3)


def test_open_system_mixing():
    value = et_unequal_mixing_entropy(N, N)
    assert value == pytest.approx(2 * N * LN2, abs=2 * math.log(N))
    assert value == pytest.approx(boltzmann_mixing_entropy(scenario(policy=P.BY_SPECIES)), abs=1e-9)
