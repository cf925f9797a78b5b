import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gibbslab.counting import CountingConvention as C
from gibbslab.counting import StateSpaceSpec, ln_microstate_count
from gibbslab.errors import DomainError, SizeLimitError
from gibbslab.logcomb import ln_binomial
from gibbslab.quantum import (DensityMatrix, ModeBasis, Symmetry, TwoParticleState, antisymmetrize,
                              basis_state, enumerate_states, evolve_and_check_orthogonality,
                              haar_unitary, is_unitary, localized_state, product_state,
                              reduced_density_matrix, symmetrization_bookkeeping, symmetrize)


def test_enumeration_examples():
    assert enumerate_states(2, 3, "bose") == 6
    assert enumerate_states(2, 3, "fermi") == 3
    assert enumerate_states(2, ModeBasis(3), "distinguishable") == 9
    assert enumerate_states(0, 4, "fermi") == 1
    assert enumerate_states(5, 3, "fermi") == 0


def test_enumeration_limits():
    with pytest.raises(SizeLimitError):
        enumerate_states(7, 2, "bose")
    with pytest.raises(SizeLimitError):
        enumerate_states(1, 9, "bose")
    with pytest.raises(DomainError):
        enumerate_states(2, 3, "corrected-boltzmann")


@pytest.mark.parametrize("stat", [C.BOSE, C.FERMI])
def test_enumeration_matches_closed_form_small(stat):
    for N, X in itertools.product(range(0, 5), range(1, 7)):
        if stat is C.FERMI and N > X:
            continue
        assert enumerate_states(N, X, stat) == round(ln_microstate_count(StateSpaceSpec(N, X), stat).value)


def test_mode_basis():
    b = ModeBasis.halves(2, 3)
    assert b.modes("L") == [0, 1] and b.modes("R") == [2, 3, 4]
    with pytest.raises(DomainError):
        ModeBasis(2, ("L", "X"))


@pytest.mark.parametrize("n", [1, 10, 10**4])
def test_bookkeeping_gap(n):
    for constant in ("factorial", "bose", "fermi"):
        b = symmetrization_bookkeeping(n, n, 10**6, 10**6, constant)
        assert b.gap == ln_binomial(2 * n, n)
        assert b.delta_correct == pytest.approx(2 * n * math.log(2), rel=1e-14)


def test_bookkeeping_small_cases():
    b = symmetrization_bookkeeping(1, 1, 1, 1)
    assert b.gap == pytest.approx(math.log(2), rel=1e-15)
    b = symmetrization_bookkeeping(4, 4, 6, 6)
    assert b.gap == pytest.approx(math.log(70), rel=1e-15)
    fb, fa, cb, ca = b
    assert (ca / cb).ln_value == pytest.approx(b.delta_correct)
    assert (fa / fb).ln_value == pytest.approx(b.delta_flawed)


@given(st.integers(0, 3000), st.integers(0, 3000), st.integers(3000, 10**6), st.integers(3000, 10**6),
       st.sampled_from(["factorial", "bose", "fermi"]))
@settings(max_examples=50)
def test_bookkeeping_gap_property(nl, nr, xl, xr, constant):
    b = symmetrization_bookkeeping(nl, nr, xl, xr, constant)
    assert b.gap == pytest.approx(ln_binomial(nl + nr, nl), abs=1e-9)
    reference = symmetrization_bookkeeping(nl, nr, xl, xr, "factorial")
    assert b.delta_correct == pytest.approx(reference.delta_correct, abs=1e-12)


def test_antisymmetric_two_fermion_state():
    state = antisymmetrize(basis_state(2, 0), basis_state(2, 1))
    a = state.amplitudes
    assert a[0, 1] == pytest.approx(1 / math.sqrt(2))
    assert a[1, 0] == pytest.approx(-1 / math.sqrt(2))
    assert np.allclose(state.swap_labels().amplitudes, -a)
    for which in ("first", "second"):
        rho = reduced_density_matrix(state, which)
        assert np.max(np.abs(rho.matrix - 0.5 * np.eye(2))) <= 1e-12
        assert np.allclose(rho.eigenvalues(), [0.5, 0.5])
        assert rho.purity() == pytest.approx(0.5)


def test_product_state_reduces_to_pure_states():
    phi, psi = basis_state(3, 0), basis_state(3, 2)
    state = product_state(phi, psi)
    assert reduced_density_matrix(state, "first").purity() == pytest.approx(1.0)
    assert np.allclose(reduced_density_matrix(state, "second").matrix, np.outer(psi, psi))


def random_orthonormal_pair(X, seed):
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.normal(size=(X, 2)) + 1j * rng.normal(size=(X, 2)))
    return q[:, 0], q[:, 1]


@given(st.integers(2, 8), st.integers(0, 2**32 - 1), st.sampled_from([antisymmetrize, symmetrize]))
@settings(max_examples=40)
def test_reduced_state_is_equal_mixture(X, seed, build):
    phi, psi = random_orthonormal_pair(X, seed)
    state = build(phi, psi)
    mixture = 0.5 * (np.outer(phi, phi.conj()) + np.outer(psi, psi.conj()))
    for which in ("first", "second"):
        assert np.max(np.abs(reduced_density_matrix(state, which).matrix - mixture)) <= 1e-12


def test_state_validation():
    with pytest.raises(DomainError):
        antisymmetrize(basis_state(2, 0), basis_state(2, 0))
    with pytest.raises(DomainError):
        TwoParticleState(np.eye(2), Symmetry.NONE)
    with pytest.raises(DomainError):
        TwoParticleState(np.array([[0, 1], [0, 0]]), Symmetry.ANTISYMMETRIC)
    with pytest.raises(DomainError):
        DensityMatrix(np.array([[1.5, 0], [0, -0.5]]))
    with pytest.raises(DomainError):
        DensityMatrix(np.array([[0.5, 0.5j], [0.1, 0.5]]))
    with pytest.raises(DomainError):
        reduced_density_matrix(product_state(basis_state(2, 0), basis_state(2, 1)), "third")


def test_evolution_keeps_symmetry():
    U = haar_unitary(4, np.random.default_rng(5))
    state = antisymmetrize(basis_state(4, 0), basis_state(4, 3)).evolve(U)
    assert state.symmetry is Symmetry.ANTISYMMETRIC
    assert np.allclose(state.amplitudes, -state.amplitudes.T)


@pytest.mark.parametrize("X", [1, 2, 5, 8])
def test_haar_unitary(X):
    assert is_unitary(haar_unitary(X, np.random.default_rng(X)))
    assert not is_unitary(2 * np.eye(X))


def test_haar_phase_distribution():
    rng = np.random.default_rng(0)
    traces = np.array([np.trace(haar_unitary(3, rng)) for _ in range(4000)])
    # E|tr U|^2 = 1 for Haar-random U(n)
    assert np.mean(np.abs(traces) ** 2) == pytest.approx(1.0, abs=0.1)


def test_orthogonality_preserved():
    rng = np.random.default_rng(11)
    basis = ModeBasis.halves(4, 4)
    phi, psi = localized_state(basis, "L", rng), localized_state(basis, "R", rng)
    U = haar_unitary(8, rng)
    assert evolve_and_check_orthogonality(phi, psi, U, 1000) < 1e-10


def test_orthogonality_input_checks():
    phi, psi = basis_state(2, 0), basis_state(2, 1)
    with pytest.raises(DomainError):
        evolve_and_check_orthogonality(phi, psi, 2 * np.eye(2), 3)
    with pytest.raises(DomainError):
        evolve_and_check_orthogonality(phi, phi, np.eye(2), 3)
    with pytest.raises(DomainError):
        evolve_and_check_orthogonality(phi, psi, np.eye(2), -1)
    with pytest.raises(DomainError):
        localized_state(ModeBasis(2), "R")
