"""Log-domain combinatorics.

Factorials, binomials and multinomials are returned as natural logarithms so
that counts such as ``(2N)!`` with ``N ~ 1e6`` stay representable.

``ln_factorial`` is exact up to rounding: for ``n <= EXACT_LIMIT`` it reads a
cumulative table of ``ln k`` built lazily and shared between threads, above
that it uses the Stirling series through the ``1/(360 n^3)`` term, whose
truncation error (< 1/(1260 n^5)) is far below float64 resolution there.
"""
import math
import threading
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "EXACT_LIMIT",
    "LogQuantity",
    "ln_factorial",
    "ln_factorials",
    "ln_binomial",
    "ln_multinomial",
    "stirling_ln_factorial",
    "stirling_series_ln_factorial",
]

EXACT_LIMIT = 10**6

_BLOCK = 1024
_HALF_LN_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True, order=True)
class LogQuantity:
    """A positive quantity stored as its natural logarithm.

    Multiplication and division act on ``ln_value`` by addition and
    subtraction, so products of huge counts never overflow.
    """

    ln_value: float

    @classmethod
    def from_value(cls, x):
        if not x > 0:
            raise DomainError(f"LogQuantity needs a positive value, got {x!r}")
        return cls(math.log(x))

    @property
    def value(self):
        """``exp(ln_value)``; ``inf`` when it does not fit in a float."""
        try:
            return math.exp(self.ln_value)
        except OverflowError:
            return math.inf

    def __mul__(self, other):
        if isinstance(other, LogQuantity):
            return LogQuantity(self.ln_value + other.ln_value)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, LogQuantity):
            return LogQuantity(self.ln_value - other.ln_value)
        return NotImplemented

    def __pow__(self, k):
        return LogQuantity(self.ln_value * k)

    def __float__(self):
        return float(self.ln_value)


class _CumulativeLogTable:
    """``table[n] = ln n!`` for ``0 <= n <= size``, grown in blocks on demand.

    Blocks are accumulated in extended precision where the platform has it
    and offset by the exactly rounded (``math.fsum``) total of all earlier
    blocks, so each entry is within about one ulp of ``ln n!``.
    """

    def __init__(self, limit):
        self._limit = limit
        self._lock = threading.Lock()
        self._table = np.zeros(1)
        self._block_sums = []

    def __getitem__(self, n):
        table = self._table
        if n >= table.size:
            table = self._grow(n)
        return float(table[n])

    def _offset(self):
        return _join(self._block_sums)

    def _grow(self, n):
        with self._lock:
            table = self._table
            if n < table.size:
                return table
            target = min(self._limit, max(n, 2 * (table.size - 1), _BLOCK))
            pieces = [table]
            start = table.size
            while start <= target:
                stop = min(start + _BLOCK, self._limit + 1)
                logs = np.log(np.arange(start, stop, dtype=np.longdouble))
                offset = np.longdouble(self._offset())
                pieces.append((offset + np.cumsum(logs)).astype(np.float64))
                self._block_sums.extend(_split(logs.sum()))
                start = stop
            table = np.concatenate(pieces)
            # readers may hold the old array; publish the new one atomically
            self._table = table
            return table


def _split(x):
    """Extended float as a (hi, lo) pair of float64."""
    hi = float(x)
    return hi, float(x - np.longdouble(hi))


def _join(parts):
    hi = math.fsum(parts)
    lo = math.fsum([*parts, -hi])
    return np.longdouble(hi) + np.longdouble(lo)


_table = _CumulativeLogTable(EXACT_LIMIT)


def _check_count(n, name="n"):
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise DomainError(f"{name} must be an integer, got {n!r}")
    if n < 0:
        raise DomainError(f"{name} must be nonnegative, got {n}")
    return int(n)


def stirling_series_ln_factorial(n):
    """Stirling series for ``ln n!`` including the ``1/(12n) - 1/(360n^3)`` terms."""
    n = float(n)
    return (n * math.log(n) - n + _HALF_LN_2PI + 0.5 * math.log(n)
            + 1.0 / (12.0 * n) - 1.0 / (360.0 * n**3))


def ln_factorial(n):
    """Natural logarithm of ``n!``.

    Parameters
    ----------
    n : int
        Nonnegative integer.

    Returns
    -------
    float
        ``ln n!``; 0 for ``n`` in {0, 1}.
    """
    n = _check_count(n)
    if n <= EXACT_LIMIT:
        return _table[n]
    return stirling_series_ln_factorial(n)


def ln_factorials(n):
    """Array of ``ln k!`` for ``k = 0..n`` (``n <= EXACT_LIMIT``), read-only."""
    n = _check_count(n)
    if n > EXACT_LIMIT:
        raise DomainError(f"table only covers n <= {EXACT_LIMIT}")
    out = _table._grow(n)[: n + 1]
    out.flags.writeable = False
    return out


def ln_binomial(n, k):
    """``ln C(n, k)`` from three factorials.

    The two subtracted terms are combined with an exactly rounded sum, which
    makes ``ln_binomial(n, k) == ln_binomial(n, n - k)`` hold bit for bit.
    """
    n = _check_count(n)
    k = _check_count(k, "k")
    if k > n:
        raise DomainError(f"k={k} exceeds n={n}")
    return math.fsum((ln_factorial(n), -ln_factorial(k), -ln_factorial(n - k)))


def ln_multinomial(n, parts):
    """``ln(n! / prod(parts_i!))``; ``parts`` must sum to ``n``."""
    n = _check_count(n)
    parts = [_check_count(p, "part") for p in parts]
    if sum(parts) != n:
        raise DomainError(f"parts sum to {sum(parts)}, expected {n}")
    return math.fsum([ln_factorial(n)] + [-ln_factorial(p) for p in parts])


def stirling_ln_factorial(n):
    """Leading Stirling approximation ``n ln n - n + ln(2 pi n)/2``.

    Underestimates ``ln n!`` by less than ``1/(12 n)``.
    """
    n = _check_count(n)
    if n == 0:
        raise DomainError("Stirling's formula needs n >= 1")
    return n * math.log(n) - n + _HALF_LN_2PI + 0.5 * math.log(n)
