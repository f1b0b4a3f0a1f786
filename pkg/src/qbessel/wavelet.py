"""
Generalized q-Bessel wavelets and the continuous wavelet transform.

Scales ``a = q**ka`` and positions ``b = q**kb`` both run over lattice
exponents.  Wavelets are built in the Fourier domain from a finite list of
nonnegative heights, which makes the admissibility constant a finite sum.
"""
import math
import threading
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _accel
from .errors import AdmissibilityError, ClippingWarning, CoverageWarning, DomainError
from .lattice import LatticeFn, jackson_weighted, norm_qpv
from .special import kernel_bound
from .transform import (fast_weighted, fourier_fast, fourier_qv, plan_weights,
                        translate_qv, translation_matrix)


@dataclass(frozen=True)
class Wavelet:
    """Wavelet ``psi`` with its cached transform and admissibility constant.

    ``spec`` holds the Fourier-domain heights ``((k, value), ...)`` the wavelet
    was built from; ``psi_hat`` is the transform of ``psi`` recomputed on the grid.
    """

    psi: LatticeFn
    psi_hat: LatticeFn
    c_admis: float
    v: object
    spec: tuple = ()
    _atoms: dict = field(default_factory=dict, repr=False, compare=False)
    _lock: object = field(default_factory=threading.Lock, repr=False, compare=False)

    def __post_init__(self):
        if not (0.0 < self.c_admis < math.inf):
            raise AdmissibilityError(f"admissibility constant must be positive and finite, got {self.c_admis}")

    @property
    def grid(self):
        return self.psi.grid

    @property
    def support(self):
        """Smallest and largest lattice index of the Fourier-domain spec."""
        ks = [k for k, val in self.spec if val != 0.0]
        if not ks:
            return None
        return min(ks), max(ks)


@dataclass(frozen=True)
class Scalogram:
    """CWT coefficients ``coeffs[i, j] = C(q**(ka_lo+i), q**(kb_lo+j))``."""

    ka_range: tuple
    kb_range: tuple
    coeffs: np.ndarray
    q: float
    alpha: float
    n_index: int
    window: tuple = None

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        na = self.ka_range[1] - self.ka_range[0] + 1
        nb = self.kb_range[1] - self.kb_range[0] + 1
        if na < 1 or nb < 1 or c.shape != (na, nb):
            raise DomainError(f"coefficient matrix {c.shape} does not match ranges {self.ka_range} x {self.kb_range}")
        if not np.all(np.isfinite(c)):
            raise DomainError("scalogram coefficients must be finite")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def ka(self):
        return np.arange(self.ka_range[0], self.ka_range[1] + 1)

    @property
    def kb(self):
        return np.arange(self.kb_range[0], self.kb_range[1] + 1)

    def __add__(self, other):
        _same_layout(self, other)
        return Scalogram(self.ka_range, self.kb_range, self.coeffs + other.coeffs,
                         self.q, self.alpha, self.n_index, self.window)


def _same_layout(s1, s2):
    if (s1.ka_range, s1.kb_range, s1.q, s1.alpha, s1.n_index) != (s2.ka_range, s2.kb_range, s2.q,
                                                                  s2.alpha, s2.n_index):
        raise DomainError("scalograms differ in ranges or parameters")


def admissibility_constant(psi_hat, grid=None):
    """``(1-q) sum_k |F psi(q**k)|**2``; raises AdmissibilityError if 0 or not finite."""
    grid = psi_hat.grid if grid is None else grid
    c = jackson_weighted(psi_hat.values ** 2, grid, -1.0)
    if not (0.0 < c < math.inf):
        raise AdmissibilityError(f"admissibility constant is {c}")
    return c


def spec_function(spec, grid):
    """Normalized ``(spec, LatticeFn)`` pair for a list of ``(k, height)`` entries."""
    spec = tuple((int(k), float(val)) for k, val in spec)
    if not spec:
        raise DomainError("wavelet spec is empty")
    vals = np.zeros(grid.size)
    for k, val in spec:
        if not math.isfinite(val):
            raise DomainError(f"non-finite height at k={k}")
        if not grid.contains(k):
            raise DomainError(f"spec index {k} outside window [{grid.n_min}, {grid.n_max}]")
        vals[k - grid.n_min] += val
    return spec, LatticeFn(grid, vals)


def make_wavelet_from_fourier(spec, plan):
    """Wavelet whose transform is the lattice function with the given heights."""
    spec, ghat = spec_function(spec, plan.grid)
    lo, hi = plan.safe_band
    outside = [k for k, val in spec if val != 0.0 and not lo <= k <= hi]
    if outside:
        warnings.warn(f"spec indices {outside} lie outside the safe band [{lo}, {hi}]; "
                      "the wavelet transform will not reproduce the spec exactly", CoverageWarning,
                      stacklevel=2)
    c = admissibility_constant(ghat)
    psi = fourier_qv(ghat, plan)
    return Wavelet(psi, fourier_qv(psi, plan), c, plan.v, spec)


def bump_spec(k0, k1):
    """Constant unit heights on ``k0..k1``."""
    if k1 < k0:
        raise DomainError(f"empty range [{k0}, {k1}]")
    return [(k, 1.0) for k in range(k0, k1 + 1)]


def ramp_spec(k0, k1):
    """Heights rising linearly from ``1/m`` to 1 over the ``m`` indices ``k0..k1``."""
    if k1 < k0:
        raise DomainError(f"empty range [{k0}, {k1}]")
    m = k1 - k0 + 1
    return [(k0 + i, (i + 1) / m) for i in range(m)]


def dilate(psi, ka, v):
    """``psi_a(q**k) = q**(-ka(2|v|+2)) psi(q**(k-ka))``, zero where ``k-ka`` leaves the window."""
    grid = psi.grid
    ka = int(ka)
    if ka == 0:
        return psi
    vals = np.zeros(grid.size)
    n = grid.size
    src = psi.values
    if ka > 0:
        vals[ka:] = src[:n - ka] if ka < n else 0.0
        lost = src[max(n - ka, 0):]
    else:
        vals[:n + ka] = src[-ka:] if -ka < n else 0.0
        lost = src[:min(-ka, n)]
    if np.any(lost != 0.0):
        warnings.warn(f"dilation by q**{ka} clipped {np.count_nonzero(lost)} nonzero samples",
                      ClippingWarning, stacklevel=2)
    abs_v = getattr(v, "abs_v", v)
    return LatticeFn(grid, vals * grid.q ** (-ka * (2.0 * abs_v + 2.0)))


def _dilate_quiet(psi, ka, v):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ClippingWarning)
        return dilate(psi, ka, v)


def wavelet_atom(w, ka, kb, plan):
    """``sqrt(a) T_b(psi_a)`` on the grid."""
    psi_a = _dilate_quiet(w.psi, ka, plan.v)
    return math.sqrt(plan.q ** ka) * translate_qv(psi_a, kb, plan)


def atom_bank(w, ka, kb_range, plan):
    """Matrix ``M[j, l] = T_{q**(kb_lo+j)} psi_a (x_l)``, cached on the wavelet per scale."""
    key = (id(plan), int(ka), tuple(kb_range))
    with w._lock:
        hit = w._atoms.get(key)
    if hit is not None and hit[0] is plan:
        return hit[1]
    psi_a_hat = fourier_qv(_dilate_quiet(w.psi, ka, plan.v), plan)
    mat = translation_matrix(psi_a_hat.values, plan, kb_range[0], kb_range[1])
    mat.flags.writeable = False
    with w._lock:
        w._atoms[key] = (plan, mat)
    return mat


def _ranges(plan, w, ka_range, kb_range, signal_band=None):
    if ka_range is None:
        ka_range = required_scale_range(w, plan, signal_band)
    if kb_range is None:
        kb_range = plan.position_range
    ka_range = (int(ka_range[0]), int(ka_range[1]))
    kb_range = (int(kb_range[0]), int(kb_range[1]))
    if ka_range[1] < ka_range[0] or kb_range[1] < kb_range[0]:
        raise DomainError("empty scale or position range")
    lo, hi = plan.position_range
    if kb_range[0] < lo or kb_range[1] > hi:
        raise DomainError(f"positions {kb_range} outside [{lo}, {hi}]")
    return ka_range, kb_range


def _scalogram(plan, ka_range, kb_range, coeffs):
    g = plan.grid
    return Scalogram(ka_range, kb_range, coeffs, g.q, plan.v.alpha, plan.v.n_index, (g.n_min, g.n_max))


def cwt(f, w, plan, ka_range=None, kb_range=None):
    """Wavelet coefficients from the defining weighted Jackson integral, cell by cell."""
    ka_range, kb_range = _ranges(plan, w, ka_range, kb_range)
    wf = plan_weights(f.values, plan)
    pref = plan.c_v * (1.0 - plan.q)
    rows = []
    for ka in range(ka_range[0], ka_range[1] + 1):
        atoms = atom_bank(w, ka, kb_range, plan)
        rows.append((pref * math.sqrt(plan.q ** ka)) * _accel.matvec(atoms, wf))
    return _scalogram(plan, ka_range, kb_range, np.array(rows))


def cwt_cells(f, w, plan, cells, kb_range=None):
    """Direct-path coefficients for selected ``(ka, kb)`` cells only."""
    wf = plan_weights(f.values, plan)
    pref = plan.c_v * (1.0 - plan.q)
    out = np.empty(len(cells))
    for i, (ka, kb) in enumerate(cells):
        psi_a_hat = fourier_qv(_dilate_quiet(w.psi, ka, plan.v), plan)
        atom = translation_matrix(psi_a_hat.values, plan, kb, kb)
        out[i] = (pref * math.sqrt(plan.q ** ka)) * _accel.matvec(atom, wf)[0]
    return out


def shifted_hat(w, ka):
    """``F psi(q**ka x)`` on the grid, zero where ``k + ka`` leaves the window."""
    grid = w.grid
    vals = np.zeros(grid.size)
    n = grid.size
    src = w.psi_hat.values
    if ka >= 0:
        if ka < n:
            vals[:n - ka] = src[ka:]
    elif -ka < n:
        vals[-ka:] = src[:n + ka]
    return vals


def cwt_fast(f, w, plan, ka_range=None, kb_range=None):
    """Coefficients as ``sqrt(a) F[F f . F psi(a .)](b)``, one FFT transform per scale."""
    ka_range, kb_range = _ranges(plan, w, ka_range, kb_range)
    fhat = fourier_fast(f, plan).values
    rows = []
    for ka in range(ka_range[0], ka_range[1] + 1):
        h = plan_weights(fhat * shifted_hat(w, ka), plan)
        rows.append(math.sqrt(plan.q ** ka) * fast_weighted(h, plan, kb_range[0], kb_range[1]))
    return _scalogram(plan, ka_range, kb_range, np.array(rows))


def _measure(s, abs_v):
    """``(1-q)**2 b**(2|v|+2) / a`` for every cell, the lattice form of ``b^(2|v|+1) da db / a^2``."""
    q = s.q
    wa = np.power(q, -s.ka.astype(float))
    wb = np.power(q, s.kb * (2.0 * abs_v + 2.0))
    return (1.0 - q) ** 2 * np.outer(wa, wb)


def parseval_pairing(sf, sg, w):
    """Double Jackson integral of ``C f . C g`` divided by the admissibility constant."""
    _same_layout(sf, sg)
    terms = sf.coeffs * sg.coeffs * _measure(sf, w.v.abs_v)
    return _accel.compensated_sum(terms.ravel()) / w.c_admis


def required_scale_range(w, plan, signal_band=None):
    """Scales at which the wavelet's Fourier support meets the signal band."""
    sup = w.support
    if sup is None:
        raise DomainError("wavelet has no nonzero Fourier heights")
    b0, b1 = plan.safe_band if signal_band is None else signal_band
    return sup[0] - b1, sup[1] - b0


def reconstruct(s, w, plan, signal_band=None):
    """Inverse wavelet transform evaluated at every lattice point."""
    g = plan.grid
    if (s.q, s.alpha, s.n_index) != (g.q, plan.v.alpha, plan.v.n_index):
        raise DomainError("scalogram parameters do not match the plan")
    need = required_scale_range(w, plan, signal_band)
    if s.ka_range[0] > need[0] or s.ka_range[1] < need[1]:
        warnings.warn(f"scales {s.ka_range} do not cover the required range {need}", CoverageWarning,
                      stacklevel=2)
    if s.kb_range[0] > g.n_min or s.kb_range[1] < g.n_max:
        warnings.warn(f"positions {s.kb_range} do not cover the window", CoverageWarning, stacklevel=2)
    meas = _measure(s, plan.v.abs_v)
    acc = np.zeros(g.size)
    comp = np.zeros(g.size)
    for i, ka in enumerate(s.ka):
        atoms = atom_bank(w, int(ka), s.kb_range, plan)
        weights = s.coeffs[i] * meas[i] * math.sqrt(plan.q ** ka)
        part = _accel.matvec(np.ascontiguousarray(atoms.T), weights)
        # Neumaier accumulation across scales keeps the order fixed and the result deterministic
        t = acc + part
        comp += np.where(np.abs(acc) >= np.abs(part), (acc - t) + part, (part - t) + acc)
        acc = t
    return LatticeFn(g, (plan.c_v / w.c_admis) * (acc + comp))


def coefficient_bound(f, w, plan, ka):
    """Upper bound on ``|C(q**ka, b)|`` over all positions ``b``."""
    abs_v = plan.v.abs_v
    a = plan.q ** ka
    return (plan.c_v * kernel_bound(plan.q) * norm_qpv(w.psi, 2, plan.v) * norm_qpv(f, 2, plan.v)
            / a ** (abs_v + 0.5))
