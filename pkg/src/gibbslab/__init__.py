"""Entropy of mixing, state counting and a membrane-demon work simulator for ideal gases.

Submodules
----------
logcomb   log-domain factorials, binomials and multinomials
thermo    thermodynamic ideal-gas entropy and mixing entropy
counting  microstate counts under the four counting conventions
mixing    mixing entropy under a discrimination policy; open-system binomial law
demon     event-driven 2D gas with selective membranes
quantum   small-Hilbert-space symmetrization and reduced density matrices
cli       the ``gibbslab`` command line

All entropies are in units of Boltzmann's constant.
"""
__version__ = "0.1.0"

from . import counting, demon, logcomb, mixing, quantum, thermo  # noqa: F401
from .errors import (  # noqa: F401
    ConfigError,
    DomainError,
    InfeasibleStateError,
    PreconditionError,
    QuasiStaticityError,
    SizeLimitError,
)
