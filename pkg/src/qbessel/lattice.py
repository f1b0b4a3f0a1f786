"""
The truncated q-lattice, Jackson integrals and the q-derivative.

A function on the lattice is stored only by its values at ``x_k = q**k`` for
``n_min <= k <= n_max``; nothing is ever interpolated off the lattice.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _accel
from .errors import DomainError, LatticeOverflowError

_TINY = np.finfo(float).tiny


def default_window(q):
    """Default ``(n_min, n_max)`` truncation for a given ``q``."""
    if q <= 0.6:
        return -5, 60
    if q >= 0.85:
        return -16, 200
    return -12, 150


@dataclass(frozen=True)
class QGrid:
    """Truncated positive q-lattice ``{q**k : n_min <= k <= n_max}``.

    ``nonnegative_only`` restricts every 0-to-infinity Jackson sum to ``k >= 0``
    (the literal sum over the naturals) instead of the whole truncated window.
    """

    q: float
    n_min: int
    n_max: int
    nonnegative_only: bool = False
    points: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        q = float(self.q)
        if not (0.0 < q < 1.0):
            raise DomainError(f"q must lie in (0, 1), got {self.q!r}")
        if int(self.n_min) != self.n_min or int(self.n_max) != self.n_max:
            raise DomainError("window bounds must be integers")
        if self.n_min >= self.n_max:
            raise DomainError(f"need n_min < n_max, got [{self.n_min}, {self.n_max}]")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "n_min", int(self.n_min))
        object.__setattr__(self, "n_max", int(self.n_max))
        with np.errstate(over="ignore", under="ignore"):
            pts = np.power(q, self.indices.astype(float))
        if not np.all(np.isfinite(pts)) or np.any(pts < _TINY):
            raise DomainError(
                f"lattice window [{self.n_min}, {self.n_max}] leaves the normal float64 range for q={q}")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @property
    def indices(self):
        return np.arange(self.n_min, self.n_max + 1)

    @property
    def size(self):
        return self.n_max - self.n_min + 1

    def position(self, k):
        """Array position of lattice exponent ``k``; raises IndexError outside the window."""
        if not (self.n_min <= k <= self.n_max):
            raise IndexError(f"lattice index {k} outside window [{self.n_min}, {self.n_max}]")
        return int(k) - self.n_min

    def contains(self, k):
        return self.n_min <= k <= self.n_max

    def jackson_mask(self):
        """Indices that take part in a 0-to-infinity Jackson sum."""
        if self.nonnegative_only:
            return self.indices >= 0
        return np.ones(self.size, dtype=bool)

    def powers(self, exponent):
        """``x_k ** exponent`` evaluated as ``q ** (k * exponent)``."""
        return np.power(self.q, self.indices * float(exponent))


def build_grid(q, n_min, n_max, nonnegative_only=False):
    return QGrid(q, n_min, n_max, nonnegative_only)


@dataclass(frozen=True)
class LatticeFn:
    """Real values sampled on a ``QGrid``, one per lattice index.

    ``warn`` optionally marks outputs whose computation touched flagged
    (cancellation-limited) kernel entries.
    """

    grid: QGrid
    values: np.ndarray
    warn: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.shape != (self.grid.size,):
            raise DomainError(f"expected {self.grid.size} values, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise DomainError("lattice function values must be finite")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @classmethod
    def _wrap(cls, grid, values, warn=None):
        # internal constructor for freshly computed, already finite arrays
        obj = object.__new__(cls)
        values.flags.writeable = False
        object.__setattr__(obj, "grid", grid)
        object.__setattr__(obj, "values", values)
        object.__setattr__(obj, "warn", warn)
        return obj

    def __call__(self, k):
        return float(self.values[self.grid.position(k)])

    def at(self, k):
        """Value at lattice index ``k``, zero outside the window."""
        if self.grid.contains(k):
            return float(self.values[k - self.grid.n_min])
        return 0.0

    def __add__(self, other):
        return LatticeFn(self.grid, self.values + _values(other, self.grid))

    def __sub__(self, other):
        return LatticeFn(self.grid, self.values - _values(other, self.grid))

    def __mul__(self, c):
        if isinstance(c, LatticeFn):
            return LatticeFn(self.grid, self.values * _values(c, self.grid))
        return LatticeFn(self.grid, self.values * float(c))

    __rmul__ = __mul__

    @property
    def flagged(self):
        return self.warn is not None and bool(np.any(self.warn))


def _values(other, grid):
    if isinstance(other, LatticeFn):
        if other.grid != grid:
            raise DomainError("lattice functions live on different grids")
        return other.values
    return float(other)


def lattice_fn(grid, func):
    """Sample ``func(x)`` at every lattice point."""
    return LatticeFn(grid, np.array([func(x) for x in grid.points], dtype=float))


def point_mass(grid, k, height=1.0):
    vals = np.zeros(grid.size)
    vals[grid.position(k)] = height
    return LatticeFn(grid, vals)


def zeros(grid):
    return LatticeFn(grid, np.zeros(grid.size))


def _checked(total):
    if not np.isfinite(total):
        raise LatticeOverflowError("non-finite value in Jackson sum")
    return float(total)


def jackson_weighted(values, grid, power=0.0):
    """``(1-q) * sum_k values[k] * x_k**(power+1)`` over the Jackson index set.

    That is the Jackson integral of ``f(x) * x**power`` from 0 to infinity.
    """
    vals = np.asarray(values, dtype=float)
    terms = vals * grid.powers(power + 1.0)
    terms = np.where(grid.jackson_mask(), terms, 0.0)
    return _checked((1.0 - grid.q) * _accel.compensated_sum(terms))


def jackson_integral_0_to_inf(f):
    return jackson_weighted(f.values, f.grid, 0.0)


def jackson_integral_0_to_a(f, j):
    """Jackson integral of ``f`` over ``[0, q**j]``; the tail is cut at ``n_max``."""
    grid = f.grid
    if not grid.contains(j):
        raise DomainError(f"endpoint exponent {j} outside window [{grid.n_min}, {grid.n_max}]")
    pos = grid.position(j)
    q = grid.q
    m = np.arange(grid.n_max - j + 1)
    terms = f.values[pos:] * np.power(q, m.astype(float))
    a = q ** j
    return _checked((1.0 - q) * a * _accel.compensated_sum(terms))


def jackson_integral_a_to_b(f, j_a, j_b):
    """Jackson integral over ``[q**j_a, q**j_b]`` as a difference of 0-to-. integrals."""
    return jackson_integral_0_to_a(f, j_b) - jackson_integral_0_to_a(f, j_a)


def q_derivative(f, k):
    """``(f(x) - f(qx)) / ((1-q) x)`` at ``x = q**k``; needs ``k + 1`` in the window."""
    grid = f.grid
    if not (grid.n_min <= k < grid.n_max):
        raise IndexError(f"q-derivative at k={k} needs k and k+1 inside [{grid.n_min}, {grid.n_max}]")
    i = k - grid.n_min
    return float((f.values[i] - f.values[i + 1]) / ((1.0 - grid.q) * grid.q ** k))


def q_derivative_values(f):
    """Vector of ``D_q f`` at indices ``n_min .. n_max - 1``."""
    grid = f.grid
    x = grid.points[:-1]
    return (f.values[:-1] - f.values[1:]) / ((1.0 - grid.q) * x)


def norm_qpv(f, p, v):
    """Weighted ``L^p`` norm with weight ``x**(2|v|+1) d_q x``.

    ``v`` is a ``VParams`` or a plain number taken as ``|v|``.
    """
    if p < 1:
        raise DomainError(f"p must be >= 1, got {p}")
    abs_v = getattr(v, "abs_v", v)
    integral = jackson_weighted(np.abs(f.values) ** p, f.grid, 2.0 * abs_v + 1.0)
    return integral ** (1.0 / p)
