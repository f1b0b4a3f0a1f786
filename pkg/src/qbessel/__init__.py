"""
qbessel: generalized q-Bessel Fourier transform and continuous wavelet
transform on the lattice ``{q**k}``.

Quick start::

    import numpy as np
    import qbessel as qb

    grid = qb.build_grid(0.5, -5, 60)
    plan = qb.make_plan(grid, qb.VParams(alpha=0.5, n_index=1))
    f = qb.point_mass(grid, -3)
    fhat = qb.fourier_qv(f, plan)
"""
from ._version import __version__
from .errors import (AdmissibilityError, ClippingWarning, ConvergenceError, CoverageWarning, DomainError,
                     LatticeOverflowError, PrecisionWarning, QBesselError)
from .lattice import (LatticeFn, QGrid, build_grid, default_window, jackson_integral_0_to_a,
                      jackson_integral_0_to_inf, jackson_integral_a_to_b, jackson_weighted, lattice_fn,
                      norm_qpv, point_mass, q_derivative, q_derivative_values, zeros)
from .special import (VParams, c_q_alpha, c_q_v, c_q_v_printed, delta_qv, j_alpha, j_alpha_lattice,
                      j_alpha_series, kernel_bound, kernel_jtilde, kernel_jtilde_lattice, q_bessel_operator,
                      q_bessel_operator_values, q_pochhammer, q_pochhammer_inf)
from .transform import (TransformPlan, fourier_fast, fourier_q_alpha, fourier_qv, inner_product_qv, make_plan,
                        translate_q_alpha, translate_qv, translation_matrix)
from .wavelet import (Scalogram, Wavelet, admissibility_constant, bump_spec, coefficient_bound, cwt, cwt_cells,
                      cwt_fast, dilate, make_wavelet_from_fourier, parseval_pairing, ramp_spec, reconstruct,
                      required_scale_range, wavelet_atom)
from .io import Config, load_config
from .verify import VerifyReport, run_suite

__all__ = sorted(name for name, obj in list(globals().items())
                 if not name.startswith("_") and not isinstance(obj, type(errors)))
