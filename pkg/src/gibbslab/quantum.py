"""Small Hilbert-space checks on identical-particle bookkeeping.

Brute-force state enumeration, the per-compartment versus whole-system
symmetrization counts, two-particle (anti)symmetric states with their
one-particle reduced density matrices, and preservation of orthogonality
under unitary evolution.

One-particle states are complex vectors over ``X`` modes. A
compartment-localized state is one supported on the modes that a
:class:`ModeBasis` assigns to that compartment; real wave functions have
tails in both compartments, which this idealization ignores.
"""
import enum
import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import unitary_group

from .counting import CountingConvention, _ln_count
from .errors import DomainError, SizeLimitError
from .logcomb import LogQuantity, ln_factorial

__all__ = [
    "MAX_ENUM_N",
    "MAX_ENUM_X",
    "ModeBasis",
    "Symmetry",
    "TwoParticleState",
    "DensityMatrix",
    "enumerate_states",
    "Bookkeeping",
    "symmetrization_bookkeeping",
    "basis_state",
    "product_state",
    "antisymmetrize",
    "symmetrize",
    "reduced_density_matrix",
    "haar_unitary",
    "is_unitary",
    "localized_state",
    "evolve_and_check_orthogonality",
]

MAX_ENUM_N = 6
MAX_ENUM_X = 8

_TOL = 1e-12


@dataclass(frozen=True)
class ModeBasis:
    """``X`` one-particle modes, each assigned to compartment ``"L"`` or ``"R"``."""

    X: int
    partition_map: tuple = ()

    def __post_init__(self):
        if self.X < 1:
            raise DomainError("need at least one mode")
        pm = tuple(self.partition_map) or ("L",) * self.X
        if len(pm) != self.X or any(side not in ("L", "R") for side in pm):
            raise DomainError("partition_map must assign 'L' or 'R' to every mode")
        object.__setattr__(self, "partition_map", pm)

    @classmethod
    def halves(cls, x_left, x_right):
        return cls(x_left + x_right, ("L",) * x_left + ("R",) * x_right)

    def modes(self, side):
        return [i for i, s in enumerate(self.partition_map) if s == side]


def _statistics(statistics):
    if isinstance(statistics, str):
        statistics = CountingConvention.parse(statistics)
    if statistics is CountingConvention.CORRECTED_BOLTZMANN:
        raise DomainError("enumeration supports bose, fermi and distinguishable only")
    return statistics


def enumerate_states(N, basis, statistics):
    """Count ``N``-particle states by listing them.

    Every labelled assignment of particles to modes is generated. Bosonic
    states are the assignments modulo relabelling (sorted tuples, i.e.
    occupation vectors), fermionic states additionally have no mode used
    twice. Nothing here uses a closed-form count.
    """
    statistics = _statistics(statistics)
    X = basis.X if isinstance(basis, ModeBasis) else int(basis)
    if N < 0 or X < 1:
        raise DomainError("need N >= 0 and X >= 1")
    if N > MAX_ENUM_N or X > MAX_ENUM_X:
        raise SizeLimitError(f"enumeration limited to N <= {MAX_ENUM_N}, X <= {MAX_ENUM_X}")
    labelled = itertools.product(range(X), repeat=N)
    if statistics is CountingConvention.DISTINGUISHABLE:
        return sum(1 for _ in labelled)
    if statistics is CountingConvention.BOSE:
        return len({tuple(sorted(a)) for a in labelled})
    return len({tuple(sorted(a)) for a in labelled if len(set(a)) == N})


@dataclass(frozen=True)
class Bookkeeping:
    """Log state counts before and after removing a partition, counted two ways.

    *flawed*: each compartment symmetrized on its own before, the whole
    system after. *correct*: the whole-system factor in both states.
    Unpacks as ``(flawed_before, flawed_after, correct_before, correct_after)``.
    """

    flawed_before: LogQuantity
    flawed_after: LogQuantity
    correct_before: LogQuantity
    correct_after: LogQuantity
    _terms: tuple = field(repr=False, compare=False, default=((), (), (), ()))

    def __iter__(self):
        return iter((self.flawed_before, self.flawed_after, self.correct_before, self.correct_after))

    @property
    def delta_flawed(self):
        fb, fa, _, _ = self._terms
        return math.fsum([*fa, *(-t for t in fb)])

    @property
    def delta_correct(self):
        _, _, cb, ca = self._terms
        return math.fsum([*ca, *(-t for t in cb)])

    @property
    def gap(self):
        """``delta_correct - delta_flawed``, summed exactly from the terms."""
        fb, fa, cb, ca = self._terms
        return math.fsum([*ca, *(-t for t in cb), *(-t for t in fa), *fb])


def _total_constant(N, X, kind):
    if kind == "factorial":
        return -ln_factorial(N)
    if kind in ("bose", "fermi"):
        conv = CountingConvention.BOSE if kind == "bose" else CountingConvention.FERMI
        return math.fsum((_ln_count(N, X, conv), -N * math.log(X)))
    raise DomainError(f"unknown constant kind {kind!r}")


def symmetrization_bookkeeping(N_left, N_right, X_left, X_right, constant="factorial"):
    """Compare per-compartment and whole-system symmetrization counts.

    Flawed counting uses ``X_c**N_c / N_c!`` in each compartment before and
    ``X**N / N!`` for the joined system after. Correct counting multiplies
    the classical ``X_L**N_L X_R**N_R`` and ``X**N`` by the same whole-system
    factor: ``1/N!`` by default, or the ratio of the total Bose
    (``constant="bose"``) or Fermi (``"fermi"``) count to ``X**N``.

    The flawed change falls short of the correct one by exactly
    ``ln C(N, N_left)``.
    """
    if min(N_left, N_right) < 0 or min(X_left, X_right) < 1:
        raise DomainError("need nonnegative counts and at least one mode per compartment")
    n, x = N_left + N_right, X_left + X_right

    def cls(count, modes):
        return count * math.log(modes) if count else 0.0

    c = _total_constant(n, x, constant)
    fb = (cls(N_left, X_left), -ln_factorial(N_left), cls(N_right, X_right), -ln_factorial(N_right))
    fa = (cls(n, x), -ln_factorial(n))
    cb = (cls(N_left, X_left), cls(N_right, X_right), c)
    ca = (cls(n, x), c)
    terms = (fb, fa, cb, ca)
    fb_q, fa_q, cb_q, ca_q = (LogQuantity(math.fsum(t)) for t in terms)
    return Bookkeeping(fb_q, fa_q, cb_q, ca_q, terms)


# -- states ---------------------------------------------------------------

class Symmetry(enum.Enum):
    SYMMETRIC = "symmetric"
    ANTISYMMETRIC = "antisymmetric"
    NONE = "none"


@dataclass(frozen=True)
class TwoParticleState:
    """Amplitudes ``a[i, j]`` on ``|i>_1 |j>_2``, normalized."""

    amplitudes: np.ndarray
    symmetry: Symmetry = Symmetry.NONE

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DomainError("amplitudes must be a square matrix over mode pairs")
        if abs(np.vdot(a, a).real - 1.0) > _TOL:
            raise DomainError("two-particle state is not normalized")
        if self.symmetry is Symmetry.ANTISYMMETRIC and np.max(np.abs(a + a.T)) > _TOL:
            raise DomainError("amplitudes are not antisymmetric")
        if self.symmetry is Symmetry.SYMMETRIC and np.max(np.abs(a - a.T)) > _TOL:
            raise DomainError("amplitudes are not symmetric")
        object.__setattr__(self, "amplitudes", a)

    def swap_labels(self):
        return TwoParticleState(self.amplitudes.T.copy(), self.symmetry)

    def evolve(self, U):
        """Apply ``U (x) U``."""
        return TwoParticleState(U @ self.amplitudes @ U.T, self.symmetry)


@dataclass(frozen=True)
class DensityMatrix:
    """A one-particle density matrix: Hermitian, unit trace, positive semidefinite."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if np.max(np.abs(m - m.conj().T)) > _TOL:
            raise DomainError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > _TOL:
            raise DomainError("density matrix does not have unit trace")
        if np.linalg.eigvalsh(m).min() < -_TOL:
            raise DomainError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "matrix", m)

    def eigenvalues(self):
        return np.linalg.eigvalsh(self.matrix)

    def purity(self):
        return float(np.trace(self.matrix @ self.matrix).real)


def _one_particle(v, name):
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1:
        raise DomainError(f"{name} must be a vector")
    if abs(np.linalg.norm(v) - 1.0) > _TOL:
        raise DomainError(f"{name} is not normalized")
    return v


def _orthogonal_pair(phi, psi):
    phi, psi = _one_particle(phi, "phi"), _one_particle(psi, "psi")
    if phi.shape != psi.shape:
        raise DomainError("phi and psi live in different mode spaces")
    if abs(np.vdot(phi, psi)) > _TOL:
        raise DomainError("phi and psi must be orthogonal")
    return phi, psi


def basis_state(X, mode):
    v = np.zeros(X, dtype=complex)
    v[mode] = 1.0
    return v


def product_state(phi, psi):
    """``|phi>_1 |psi>_2``."""
    phi, psi = _one_particle(phi, "phi"), _one_particle(psi, "psi")
    return TwoParticleState(np.outer(phi, psi), Symmetry.NONE)


def antisymmetrize(phi, psi):
    """``(|phi>_1|psi>_2 - |psi>_1|phi>_2) / sqrt 2`` for orthogonal ``phi``, ``psi``."""
    phi, psi = _orthogonal_pair(phi, psi)
    return TwoParticleState((np.outer(phi, psi) - np.outer(psi, phi)) / math.sqrt(2.0),
                            Symmetry.ANTISYMMETRIC)


def symmetrize(phi, psi):
    """``(|phi>_1|psi>_2 + |psi>_1|phi>_2) / sqrt 2`` for orthogonal ``phi``, ``psi``."""
    phi, psi = _orthogonal_pair(phi, psi)
    return TwoParticleState((np.outer(phi, psi) + np.outer(psi, phi)) / math.sqrt(2.0),
                            Symmetry.SYMMETRIC)


def reduced_density_matrix(state, which="first"):
    """Partial trace over the other particle label.

    ``rho_1 = A A^dagger`` and ``rho_2 = A^T conj(A)`` for amplitude matrix
    ``A``.
    """
    a = state.amplitudes
    if which in ("first", 1):
        rho = a @ a.conj().T
    elif which in ("second", 2):
        rho = a.T @ a.conj()
    else:
        raise DomainError("which must be 'first' or 'second'")
    return DensityMatrix(rho)


def is_unitary(U, tol=_TOL):
    U = np.asarray(U, dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        return False
    return bool(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))) <= tol)


def haar_unitary(X, rng=None):
    """Haar-random ``X x X`` unitary."""
    rng = np.random.default_rng(rng)
    if X == 1:
        return np.exp(2j * np.pi * rng.random((1, 1)))
    return unitary_group.rvs(X, random_state=rng)


def localized_state(basis, side, rng=None):
    """Random normalized state supported on the modes of one compartment."""
    modes = basis.modes(side)
    if not modes:
        raise DomainError(f"compartment {side!r} has no modes")
    rng = np.random.default_rng(rng)
    v = np.zeros(basis.X, dtype=complex)
    v[modes] = rng.normal(size=len(modes)) + 1j * rng.normal(size=len(modes))
    return v / np.linalg.norm(v)


def evolve_and_check_orthogonality(phi, psi, U, steps):
    """Largest ``|<U^k phi | U^k psi>|`` over ``k = 0..steps``."""
    phi, psi = _orthogonal_pair(phi, psi)
    U = np.asarray(U, dtype=complex)
    if U.shape != (phi.size, phi.size) or not is_unitary(U):
        raise DomainError("U must be a unitary matrix on the one-particle space")
    if steps < 0:
        raise DomainError("steps must be >= 0")
    worst = abs(np.vdot(phi, psi))
    for _ in range(steps):
        phi = U @ phi
        psi = U @ psi
        worst = max(worst, abs(np.vdot(phi, psi)))
    return float(worst)
