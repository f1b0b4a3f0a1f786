"""
The generalized q-Bessel Fourier transform and translation operator.

On the lattice the kernel depends on its two arguments only through the
product ``x t = q**(k+m)``, so a single table ``J[s] = jtilde(q**s)`` serves every
transform and the transform itself is a correlation:

    (F f)(q**k) = c_v (1-q) sum_m f(q**m) q**(m(2|v|+2)) J[k+m]
"""
import threading
from dataclasses import dataclass, field

import numpy as np
from scipy import fft as sp_fft

from . import _accel
from .errors import DomainError, LatticeOverflowError
from .lattice import LatticeFn, jackson_weighted
from .special import VParams, c_q_alpha, c_q_v, j_alpha_lattice, kernel_jtilde_lattice

# squared tail mass of the orthonormal kernel family tolerated inside the safe band
BAND_TOL = 1e-20


@dataclass(frozen=True)
class TransformPlan:
    """Precomputed kernel table and constants for one ``(grid, v)`` pair.

    ``kernel_table[i]`` holds ``J[s_min + i]``.  The table reaches
    ``position_margin`` indices further toward large arguments than the products
    of two window indices need, so positions just outside the window can be
    evaluated too.
    """

    grid: object
    v: VParams
    kernel_table: np.ndarray = field(repr=False)
    kernel_flags: np.ndarray = field(repr=False)
    s_min: int
    c_v: float
    position_margin: int
    safe_band: tuple
    band_tail: np.ndarray = field(repr=False)
    anchor_residual: float = 0.0
    weight_powers: np.ndarray = field(default=None, repr=False, compare=False)
    _has_flags: bool = field(default=False, repr=False, compare=False)
    _fft_cache: dict = field(default_factory=dict, repr=False, compare=False)
    _lock: object = field(default_factory=threading.Lock, repr=False, compare=False)

    @property
    def q(self):
        return self.grid.q

    @property
    def s_max(self):
        return self.s_min + self.kernel_table.size - 1

    @property
    def position_range(self):
        """Lattice exponents at which transforms may be evaluated."""
        return self.grid.n_min - self.position_margin, self.grid.n_max

    def kernel(self, s):
        """``J[s]`` for integer ``s`` (array-aware)."""
        s = np.asarray(s)
        if np.any(s < self.s_min) or np.any(s > self.s_max):
            raise IndexError(f"kernel index outside table [{self.s_min}, {self.s_max}]")
        return self.kernel_table[s - self.s_min]

    @property
    def has_flags(self):
        return self._has_flags

    def in_band(self, k):
        lo, hi = self.safe_band
        return lo <= k <= hi

    def band_mask(self):
        lo, hi = self.safe_band
        k = self.grid.indices
        return (k >= lo) & (k <= hi)

    def weight_exponent(self):
        return 2.0 * self.v.abs_v + 2.0


def make_plan(grid, v, position_margin=8, stable_tail=True, series_tol=1e-17):
    """Build a :class:`TransformPlan` for ``grid`` and ``v``."""
    if position_margin < 0:
        raise DomainError("position_margin must be nonnegative")
    s_min = 2 * grid.n_min - position_margin
    s_max = 2 * grid.n_max
    lv = kernel_jtilde_lattice(grid.q, v, s_min, s_max, series_tol, stable_tail)
    table = np.ascontiguousarray(lv.values)
    if not np.all(np.isfinite(table)):
        raise DomainError("kernel table is not finite on this window")
    table.flags.writeable = False
    flags = lv.flagged.copy()
    flags.flags.writeable = False
    cv = c_q_v(grid.q, v)
    tail = _band_tail(grid, v, table, s_min, cv)
    ok = np.flatnonzero(tail <= BAND_TOL)
    band = (int(grid.n_min + ok[0]), int(grid.n_min + ok[-1])) if ok.size else (grid.n_min, grid.n_min - 1)
    wp = grid.powers(2.0 * v.abs_v + 2.0)
    if grid.nonnegative_only:
        wp = np.where(grid.jackson_mask(), wp, 0.0)
    wp.flags.writeable = False
    return TransformPlan(grid, v, table, flags, s_min, cv, int(position_margin), band, tail,
                         lv.anchor_residual, wp, bool(flags.any()))


def _band_tail(grid, v, table, s_min, cv):
    """Squared kernel mass each window column loses to the truncation."""
    q = grid.q
    s = np.arange(s_min, s_min + table.size)
    with np.errstate(over="ignore", invalid="ignore"):
        g2 = (cv * (1.0 - q) * table * np.power(q, s * (v.abs_v + 1.0))) ** 2
        csum = np.concatenate(([0.0], np.cumsum(g2)))
        tails = np.empty(grid.size)
        for i, m in enumerate(grid.indices):
            lo = grid.n_min + m - s_min          # entries with s < n_min + m
            hi = grid.n_max + m + 1 - s_min      # entries with s > n_max + m
            tails[i] = csum[lo] + (csum[-1] - csum[min(hi, table.size)])
    # an overflowing table (series-only mode far out) leaves no usable column
    return np.where(np.isnan(tails), np.inf, tails)


def plan_weights(values, plan):
    """``f(q**m) q**(m(2|v|+2))`` restricted to the Jackson index set."""
    return np.asarray(values, dtype=float) * plan.weight_powers


def _offset(plan, k_lo, n_out):
    lo, hi = plan.position_range
    if k_lo < lo or k_lo + n_out - 1 > hi:
        raise IndexError(f"output indices [{k_lo}, {k_lo + n_out - 1}] outside [{lo}, {hi}]")
    return k_lo + plan.grid.n_min - plan.s_min


def _warn_mask(plan, w, offset, n_out):
    if not plan.has_flags:
        return None
    seg = plan.kernel_flags[offset:offset + n_out + w.size - 1].astype(float)
    return np.correlate(seg, (w != 0).astype(float), "valid") > 0


def transform_weighted(w, plan, k_lo=None, k_hi=None):
    """Transform of pre-weighted values, at output exponents ``k_lo..k_hi``.

    Returns ``(values, warn_mask_or_None)``.
    """
    grid = plan.grid
    k_lo = grid.n_min if k_lo is None else int(k_lo)
    k_hi = grid.n_max if k_hi is None else int(k_hi)
    n_out = k_hi - k_lo + 1
    off = _offset(plan, k_lo, n_out)
    sums = _accel.correlate(plan.kernel_table, off, w, n_out)
    return (plan.c_v * (1.0 - plan.q)) * sums, _warn_mask(plan, w, off, n_out)


def fourier_values(f, plan, k_lo=None, k_hi=None):
    """Direct transform of ``f`` at exponents ``k_lo..k_hi`` (may leave the window)."""
    _check_grid(f, plan)
    return transform_weighted(plan_weights(f.values, plan), plan, k_lo, k_hi)[0]


def fourier_qv(f, plan):
    """Generalized q-Bessel Fourier transform, direct compensated summation."""
    _check_grid(f, plan)
    vals, warn = transform_weighted(plan_weights(f.values, plan), plan)
    return _result(plan, vals, warn)


def _kernel_rfft(plan, off, n_out, n):
    """Cached ``(length, rfft of the scaled kernel segment)``."""
    key = (off, n_out, n)
    hit = plan._fft_cache.get(key)   # plain dict reads are atomic; only inserts lock
    if hit is None:
        # circular wrap-around only reaches output positions below n - 1, which are discarded
        length = sp_fft.next_fast_len(n_out + n - 1, real=True)
        seg = (plan.c_v * (1.0 - plan.q)) * plan.kernel_table[off:off + n_out + n - 1]
        hit = (length, np.fft.rfft(seg, length))
        with plan._lock:
            hit = plan._fft_cache.setdefault(key, hit)
    return hit


def fast_weighted(w, plan, k_lo=None, k_hi=None):
    """FFT evaluation of :func:`transform_weighted` (no warning mask)."""
    grid = plan.grid
    k_lo = grid.n_min if k_lo is None else int(k_lo)
    k_hi = grid.n_max if k_hi is None else int(k_hi)
    n_out = k_hi - k_lo + 1
    n = w.size
    length, kernel_hat = _kernel_rfft(plan, _offset(plan, k_lo, n_out), n_out, n)
    full = np.fft.irfft(kernel_hat * np.fft.rfft(w[::-1], length), length)
    return full[n - 1:n - 1 + n_out]


def fourier_fast(f, plan):
    """Correlation-form transform evaluated with real FFTs."""
    _check_grid(f, plan)
    w = plan_weights(f.values, plan)
    vals = fast_weighted(w, plan)
    return _result(plan, vals, _warn_mask(plan, w, plan.grid.n_min - plan.s_min + plan.grid.n_min,
                                          plan.grid.size))


def translate_values(f, k_x, plan, k_lo=None, k_hi=None, fhat=None):
    """``T_x f`` at exponents ``k_lo..k_hi``; ``fhat`` reuses a known transform of ``f``."""
    _check_grid(f, plan)
    lo, hi = plan.position_range
    if not (lo <= k_x <= hi):
        raise IndexError(f"translation point {k_x} outside [{lo}, {hi}]")
    if fhat is None:
        fhat = fourier_qv(f, plan)
    h = fhat.values * plan.kernel(k_x + plan.grid.indices)
    return transform_weighted(plan_weights(h, plan), plan, k_lo, k_hi)


def translate_qv(f, k_x, plan, fhat=None):
    """Generalized translation ``T_x f`` sampled on the grid."""
    vals, warn = translate_values(f, k_x, plan, fhat=fhat)
    return LatticeFn(plan.grid, vals, warn)


def translation_matrix(fhat_values, plan, kx_lo, kx_hi, ky_lo=None, ky_hi=None):
    """Matrix ``M[i, l] = T_{q**(kx_lo+i)} f (q**(ky_lo+l))`` built from ``F f``."""
    grid = plan.grid
    ky_lo = grid.n_min if ky_lo is None else ky_lo
    ky_hi = grid.n_max if ky_hi is None else ky_hi
    n_x = kx_hi - kx_lo + 1
    n_y = ky_hi - ky_lo + 1
    off_x = _offset(plan, kx_lo, n_x)
    off_y = _offset(plan, ky_lo, n_y)
    h = plan_weights(fhat_values, plan)
    g = _accel.gram(plan.kernel_table, off_x, n_x, off_y, n_y, h)
    return (plan.c_v * (1.0 - plan.q)) * g


def inner_product_qv(f, g, v):
    """Weighted inner product with weight ``x**(2|v|+1) d_q x``."""
    if f.grid != g.grid:
        raise DomainError("inner product of functions on different grids")
    abs_v = getattr(v, "abs_v", v)
    return jackson_weighted(f.values * g.values, f.grid, 2.0 * abs_v + 1.0)


def _result(plan, vals, warn):
    if not np.isfinite(vals).all():
        raise LatticeOverflowError("transform produced non-finite values")
    return LatticeFn._wrap(plan.grid, vals, warn)


def _check_grid(f, plan):
    if f.grid is not plan.grid and f.grid != plan.grid:
        raise DomainError("function grid does not match the transform plan")


# ---------------------------------------------------------------------------
# alpha-only reference path, written directly from j_alpha and c_q_alpha

def _alpha_kernel(grid, alpha, position_margin=8):
    lo = 2 * grid.n_min - position_margin
    return lo, j_alpha_lattice(grid.q, alpha, lo, 2 * grid.n_max).values


def fourier_q_alpha(f, alpha, position_margin=8):
    """q-Bessel Fourier transform of order ``alpha`` (no generalized kernel)."""
    grid = f.grid
    q = grid.q
    lo, jt = _alpha_kernel(grid, alpha, position_margin)
    cst = c_q_alpha(q, alpha)
    w = f.values * grid.powers(2.0 * alpha + 2.0)
    if grid.nonnegative_only:
        w = np.where(grid.jackson_mask(), w, 0.0)
    out = np.empty(grid.size)
    for i, k in enumerate(grid.indices):
        terms = w * jt[k + grid.indices - lo]
        out[i] = (cst * (1.0 - q)) * _accel.compensated_sum(terms)
    return LatticeFn(grid, out)


def translate_q_alpha(f, k_x, alpha, position_margin=8):
    """q-Bessel translation of order ``alpha`` evaluated on the grid."""
    grid = f.grid
    lo, jt = _alpha_kernel(grid, alpha, position_margin)
    fhat = fourier_q_alpha(f, alpha, position_margin)
    h = fhat.values * jt[k_x + grid.indices - lo]
    return fourier_q_alpha(LatticeFn(grid, h), alpha, position_margin)
