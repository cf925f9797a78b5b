"""Thermodynamic entropy of classical ideal gases.

Units: Boltzmann's constant and particle mass are 1, so entropies are in
units of k and temperatures are energies. The entropy of ``N`` particles at
pressure ``P`` and temperature ``T`` is

    S = (5/2) N ln T - N ln P + c N

where the per-particle constant ``c`` is a free convention, chosen per
species (default 0). Only differences at fixed species and ``N`` are
convention independent.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, PreconditionError

__all__ = [
    "GasSpecimen",
    "EntropyConvention",
    "ideal_gas_entropy",
    "entropy_difference_by_path",
    "thermo_mixing_entropy",
    "isothermal_membrane_work",
]

_REL_TOL = 1e-12


@dataclass(frozen=True)
class GasSpecimen:
    """Contents of one compartment: ``N`` particles of ``species`` in volume ``V`` at ``T``."""

    species: str
    N: int
    V: float
    T: float

    def __post_init__(self):
        if self.N < 0:
            raise DomainError(f"particle count must be >= 0, got {self.N}")
        if not self.V > 0:
            raise DomainError(f"volume must be > 0, got {self.V}")
        if not self.T > 0:
            raise DomainError(f"temperature must be > 0, got {self.T}")

    @property
    def P(self):
        """Pressure from the ideal gas law ``P V = N T``."""
        return self.N * self.T / self.V

    @classmethod
    def from_pressure(cls, species, N, P, T):
        """Specimen with the volume that gives pressure ``P`` (``N > 0``)."""
        if N <= 0 or not P > 0:
            raise DomainError("from_pressure needs N > 0 and P > 0")
        return cls(species, N, N * T / P, T)


@dataclass(frozen=True)
class EntropyConvention:
    """Per-species additive constants ``c``; species not listed get ``default``."""

    constants: dict = field(default_factory=dict)
    default: float = 0.0

    def __post_init__(self):
        for value in [self.default, *self.constants.values()]:
            if not math.isfinite(value):
                raise DomainError(f"entropy constant must be finite, got {value}")

    def c(self, species):
        return self.constants.get(species, self.default)


def ideal_gas_entropy(g, conv=None):
    """Entropy of a specimen in units of k. An empty specimen has zero entropy."""
    if g.N == 0:
        return 0.0
    conv = conv or EntropyConvention()
    return g.N * (2.5 * math.log(g.T) - math.log(g.P) + conv.c(g.species))


def _as_pt_path(path):
    pts = np.asarray(path, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 1:
        raise DomainError("path must be a sequence of (P, T) pairs")
    if not np.all(pts > 0):
        raise DomainError("path leaves the P > 0, T > 0 quadrant")
    return pts


def entropy_difference_by_path(start, end, path, steps):
    """Integrate dQ/T along a reversible path in the (P, T) plane.

    The path runs through the waypoints in ``path`` along segments that are
    straight in ``(ln P, ln T)``; ``steps`` midpoint-rule panels in those
    log variables are distributed over the segments in proportion to their
    length. The integrand ``dQ/T = (5/2) N d(ln T) - N d(ln P)`` has
    constant coefficients there, so the rule is exact up to rounding.

    Parameters
    ----------
    start, end : GasSpecimen
        Endpoints; must share species and particle number.
    path : sequence of (P, T)
        Waypoints; the first and last must match ``start`` and ``end``.
    steps : int
        Total number of quadrature panels, at least 1.

    Returns
    -------
    float
        Approximation to ``S(end) - S(start)``.
    """
    if start.species != end.species or start.N != end.N:
        raise PreconditionError("start and end must share species and N")
    if steps < 1:
        raise DomainError("steps must be >= 1")
    pts = _as_pt_path(path)
    for label, g, p in (("start", start, pts[0]), ("end", end, pts[-1])):
        if not (math.isclose(p[0], g.P, rel_tol=_REL_TOL) and math.isclose(p[1], g.T, rel_tol=_REL_TOL)):
            raise PreconditionError(f"path {label} {tuple(p)} does not match specimen (P, T) = ({g.P}, {g.T})")
    if len(pts) == 1 or start.N == 0:
        return 0.0

    logs = np.log(pts)
    seg = np.diff(logs, axis=0)
    lengths = np.abs(seg).sum(axis=1)
    if lengths.sum() == 0:
        return 0.0
    panels = np.maximum(1, np.round(steps * lengths / lengths.sum()).astype(int))
    panels[lengths == 0] = 0

    terms = []
    for (d_lnP, d_lnT), m in zip(seg, panels):
        if m:
            terms += [2.5 * d_lnT / m - d_lnP / m] * m
    total = math.fsum(terms)
    return start.N * total


def _check_equal_state(left, right):
    if not math.isclose(left.T, right.T, rel_tol=_REL_TOL):
        raise PreconditionError(f"temperatures differ: {left.T} vs {right.T}")
    if not math.isclose(left.P, right.P, rel_tol=_REL_TOL, abs_tol=0.0):
        raise PreconditionError(f"pressures differ: {left.P} vs {right.P}")


def thermo_mixing_entropy(left, right, discriminable):
    """Entropy of mixing two specimens at equal P and T.

    With ``discriminable`` (semi-permeable membranes available) each gas
    expands reversibly into the joint volume; otherwise there is nothing
    thermodynamics can detect and the result is 0.
    """
    _check_equal_state(left, right)
    if not discriminable:
        return 0.0
    v = left.V + right.V
    return left.N * math.log(v / left.V) + right.N * math.log(v / right.V)


def isothermal_membrane_work(N, T, V_from, V_to):
    """Reversible isothermal work delivered by ``N`` particles going from ``V_from`` to ``V_to``.

    Positive for expansion. The work needed to push the gas the other way is
    the negative of this.
    """
    if not (V_from > 0 and V_to > 0):
        raise DomainError("volumes must be positive")
    if not T > 0 or N < 0:
        raise DomainError("need T > 0 and N >= 0")
    return N * T * math.log(V_to / V_from)
