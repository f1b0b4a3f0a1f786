"""
q-shifted factorials, the normalized q-Bessel function, the generalized
(alpha, beta) kernel, the q-Bessel difference operator and the
normalisation constants.
"""
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import ConvergenceError, DomainError, PrecisionWarning
from .lattice import LatticeFn

# largest |term| / |sum| before a series value is reported as cancellation-limited
CANCELLATION_LIMIT = 1e13
# condition below which a series value is used directly on the lattice
SERIES_TRUST = 1e2
_RESCALE = 500


@dataclass(frozen=True)
class VParams:
    """The pair ``v = (alpha, beta)`` with ``beta = -n_index``."""

    alpha: float
    n_index: int = 0

    def __post_init__(self):
        if int(self.n_index) != self.n_index or self.n_index < 0:
            raise DomainError(f"n_index must be a nonnegative integer, got {self.n_index!r}")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "n_index", int(self.n_index))
        if not math.isfinite(self.alpha) or self.alpha + self.beta <= -1.0:
            raise DomainError(
                f"need alpha + beta > -1, got alpha={self.alpha}, beta={self.beta}")

    @property
    def beta(self):
        return -float(self.n_index)

    @property
    def abs_v(self):
        return self.alpha + self.beta

    @property
    def kernel_order(self):
        """Order of the q-Bessel function inside the generalized kernel."""
        return self.alpha + self.n_index


def q_pochhammer(a, q, m):
    """Finite product ``(a; q)_m``."""
    if m < 0:
        raise DomainError("m must be nonnegative")
    p = 1.0
    qk = 1.0
    for _ in range(m):
        p *= 1.0 - a * qk
        qk *= q
    return p


@lru_cache(maxsize=1024)
def q_pochhammer_inf(a, q, cutoff=1e-18, cap=10**6):
    """Infinite product ``(a; q)_inf``, truncated once ``|a| q**k < cutoff``."""
    if not (0.0 < q < 1.0):
        raise DomainError(f"q must lie in (0, 1), got {q}")
    a = float(a)
    p = 1.0
    qk = 1.0
    for _ in range(cap):
        if abs(a) * qk < cutoff:
            return p
        p *= 1.0 - a * qk
        qk *= q
    raise ConvergenceError(f"(a; q)_inf with a={a}, q={q} did not reach the cutoff in {cap} factors")


def kernel_bound(q):
    """Uniform bound ``1 / (q; q^2)_inf**2`` on the kernel."""
    return 1.0 / q_pochhammer_inf(q, q * q) ** 2


def c_q_alpha(q, alpha):
    if alpha <= -1.0:
        raise DomainError(f"c_q_alpha needs alpha > -1, got {alpha}")
    q2 = q * q
    return q_pochhammer_inf(q ** (2 * alpha + 2), q2) / ((1.0 - q) * q_pochhammer_inf(q2, q2))


def _c_q_v_pochhammer(q, v, shift):
    n, alpha = v.n_index, v.alpha
    q2 = q * q
    base = q ** (2 * alpha + 2)
    num = q ** (n * (alpha + n + shift)) * q_pochhammer_inf(base, q2)
    return num / ((1.0 - q) * q_pochhammer_inf(q2, q2) * q_pochhammer(base, q2, n))


def c_q_v(q, v):
    """Normalising constant of the generalized transform.

    Equal to ``q**(n(alpha+n+1)) * c_q_alpha(q, alpha+n)``; this is the value that
    makes the kernel family orthonormal on the lattice.
    """
    value = _c_q_v_pochhammer(q, v, 1)
    check = q ** (v.n_index * (v.kernel_order + 1)) * c_q_alpha(q, v.kernel_order)
    if abs(value - check) > 1e-12 * abs(check):
        raise ArithmeticError(f"c_q_v routes disagree: {value!r} vs {check!r}")
    return value


def c_q_v_printed(q, v):
    """The constant with exponent ``n(alpha+n)``, as commonly printed.

    It differs from :func:`c_q_v` by a factor ``q**n``; kept for comparison.
    """
    return _c_q_v_pochhammer(q, v, 0)


class SeriesResult(NamedTuple):
    value: float
    terms: int
    max_term: float

    @property
    def condition(self):
        """Largest |term| relative to |value| (1 means no cancellation)."""
        if self.value == 0.0:
            return math.inf
        return self.max_term / abs(self.value)

    @property
    def flagged(self):
        return not (self.condition <= CANCELLATION_LIMIT)


def j_alpha_series(x, q, alpha, tol=1e-17, max_terms=500):
    """Sum the normalized q-Bessel series, returning value and cancellation data."""
    if alpha <= -1.0:
        raise DomainError(f"j_alpha needs alpha > -1, got {alpha}")
    if x < 0:
        raise DomainError("j_alpha is evaluated for x >= 0 only")
    if x == 0.0:
        return SeriesResult(1.0, 1, 1.0)
    x2 = x * x
    q2 = q * q
    a_pow = q ** (2 * alpha + 2)   # q^(2 alpha + 2 + 2k)
    b_pow = q2                      # q^(2 + 2k)
    term = 1.0
    total = 1.0
    biggest = 1.0
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(max_terms):
            ratio = -b_pow * x2 / ((1.0 - a_pow) * (1.0 - b_pow))
            term *= ratio
            total += term
            biggest = max(biggest, abs(term))
            a_pow *= q2
            b_pow *= q2
            if not math.isfinite(total):
                return SeriesResult(math.nan, k + 2, math.inf)
            if abs(ratio) < 1.0 and abs(term) <= tol * abs(total):
                return SeriesResult(total, k + 2, biggest)
    raise ConvergenceError(f"j_alpha series for x={x}, alpha={alpha} hit the {max_terms}-term cap")


def j_alpha(x, q, alpha, tol=1e-17):
    """Normalized q-Bessel function ``j_alpha(x; q^2)``.

    Emits :class:`PrecisionWarning` when cancellation exceeds double precision.
    """
    res = j_alpha_series(x, q, alpha, tol)
    if res.flagged:
        warnings.warn(f"j_alpha({x!r}) with q={q}, alpha={alpha}: series cancellation "
                      f"(condition {res.condition:.3g})", PrecisionWarning, stacklevel=2)
    return res.value


class LatticeValues(NamedTuple):
    values: np.ndarray
    from_series: np.ndarray
    flagged: np.ndarray
    anchor_residual: float


def j_alpha_lattice(q, alpha, k_lo, k_hi, tol=1e-17, stable_tail=True):
    """``j_alpha(q**k)`` for ``k_lo <= k <= k_hi``.

    Points where the series is well conditioned are summed directly.  Further out
    the values are propagated inward from far outside the window with the
    three-term recurrence implied by ``Delta_{q,alpha} j = -j``, which is stable in
    that direction, and scaled to match the series on an overlap of trusted
    points.  With ``stable_tail=False`` the series is used everywhere and
    cancellation-limited points are only flagged.
    """
    ks = np.arange(k_lo, k_hi + 1)
    n = ks.size
    vals = np.empty(n)
    from_series = np.zeros(n, dtype=bool)
    flagged = np.zeros(n, dtype=bool)
    conds = np.full(n, math.inf)

    # scan from small x outward while the series stays trustworthy
    first_ok = n
    for i in range(n - 1, -1, -1):
        res = j_alpha_series(q ** float(ks[i]), q, alpha, tol)
        conds[i] = res.condition
        if stable_tail and not (res.condition <= SERIES_TRUST):
            break
        vals[i] = res.value
        from_series[i] = True
        flagged[i] = res.flagged
        first_ok = i
    if not stable_tail or first_ok == 0:
        return LatticeValues(vals, from_series, flagged, 0.0)

    if first_ok < n:
        k_ok = int(ks[first_ok])
    else:
        # the whole range needs the recurrence; find trusted points above it
        k_ok = k_hi + 1
        while not (j_alpha_series(q ** float(k_ok), q, alpha, tol).condition <= SERIES_TRUST):
            k_ok += 1
    # anchor on trusted points just inside the accurate region
    anchor = list(range(k_ok, k_ok + 4))
    anchor_vals = np.array([j_alpha_series(q ** float(k), q, alpha, tol).value for k in anchor])

    # enough extra steps for the minimal solution to dominate at k_lo
    start = k_lo - int(math.ceil(16.0 * math.log(2.0) / math.log(1.0 / q))) - 4
    steps = anchor[-1] - start + 1
    u = np.zeros(steps + 1)   # u[i] holds k = start - 1 + i, times 2**(-_RESCALE * shifts)
    shift_at = np.zeros(steps + 1, dtype=np.int64)
    u[1] = 1.0
    shifts = 0
    qa = q ** (2 * alpha)
    for i in range(1, steps):
        k = start - 1 + i
        nxt = ((1.0 + qa - q ** (2.0 * k)) * u[i] - u[i - 1]) / qa
        if abs(nxt) > 2.0 ** _RESCALE:
            # exact power-of-two rescale; earlier entries keep their own exponent
            nxt = math.ldexp(nxt, -_RESCALE)
            u[i] = math.ldexp(u[i], -_RESCALE)
            shifts += 1
            shift_at[i] = shifts
        u[i + 1] = nxt
        shift_at[i + 1] = shifts

    def at(k, scale=1.0):
        i = k - start + 1
        mu, eu = math.frexp(u[i])
        ms, es = math.frexp(scale)
        return math.ldexp(mu * ms, eu + es + _RESCALE * int(shift_at[i] - shifts))

    rec = np.array([at(k) for k in anchor])
    # the competing solution grows by about 1/qa per step toward small x, so
    # later anchors carry amplified rounding and get proportionally less weight
    wt = min(1.0, qa) ** np.arange(len(anchor))
    scale = float((wt * rec) @ anchor_vals) / float((wt * rec) @ rec)
    resid = float(np.max(wt * np.abs(scale * rec - anchor_vals)) / np.max(np.abs(anchor_vals)))
    for i in range(first_ok):
        vals[i] = at(int(ks[i]), scale)
    if resid > 1e-10:
        flagged[:first_ok] = True
    return LatticeValues(vals, from_series, flagged, resid)


def kernel_jtilde(x, q, v, tol=1e-17):
    """Generalized kernel ``x**(2n) * j_{alpha+n}(q**n x)`` (``beta = -n``)."""
    n = v.n_index
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    return x ** (2 * n) * j_alpha(q ** n * x, q, v.kernel_order, tol)


def kernel_jtilde_literal(x, q, alpha, beta, tol=1e-17):
    """``x**(-2 beta) * j_{alpha-beta}(q**(-beta) x)`` evaluated as written."""
    return x ** (-2.0 * beta) * j_alpha(q ** (-beta) * x, q, alpha - beta, tol)


def kernel_jtilde_lattice(q, v, s_lo, s_hi, tol=1e-17, stable_tail=True):
    """Kernel values ``J[s] = jtilde(q**s)`` for ``s_lo <= s <= s_hi``."""
    n = v.n_index
    lv = j_alpha_lattice(q, v.kernel_order, s_lo + n, s_hi + n, tol, stable_tail)
    s = np.arange(s_lo, s_hi + 1)
    with np.errstate(over="ignore"):
        vals = np.power(q, 2.0 * n * s) * lv.values if n else lv.values.copy()
    return LatticeValues(vals, lv.from_series, lv.flagged, lv.anchor_residual)


def q_bessel_operator(f, k, q, alpha):
    """``[f(x/q) - (1+q^{2a}) f(x) + q^{2a} f(qx)] / x^2`` at ``x = q**k``."""
    grid = f.grid
    if not (grid.n_min < k < grid.n_max):
        raise IndexError(f"q-Bessel operator at k={k} needs k-1, k, k+1 in the window")
    i = k - grid.n_min
    qa = q ** (2 * alpha)
    y = f.values
    return float((y[i - 1] - (1.0 + qa) * y[i] + qa * y[i + 1]) / q ** (2 * k))


def q_bessel_operator_values(f, alpha):
    """The operator on the whole window, treating values outside it as zero."""
    grid = f.grid
    q = grid.q
    qa = q ** (2 * alpha)
    y = np.concatenate(([0.0], f.values, [0.0]))
    num = y[:-2] - (1.0 + qa) * y[1:-1] + qa * y[2:]
    return LatticeFn(grid, num / grid.powers(2.0))


def delta_qv(k_x, k_y, q, v):
    """The (q, v)-delta: ``1 / ((1-q) x**(2|v|+2))`` on the diagonal, else 0."""
    if k_x != k_y:
        return 0.0
    return 1.0 / ((1.0 - q) * q ** (k_x * (2.0 * v.abs_v + 2.0)))
