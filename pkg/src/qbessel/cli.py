"""
``qwcli``: command-line front end.

Exit codes: 0 success, 1 validation or format error, 2 verification or
cross-check failure.  Diagnostics go to standard error; every output file is
written atomically and is byte-identical across runs on identical inputs.
"""
import math
import sys
import warnings

import click
import numpy as np

from ._version import __version__
from .errors import QBesselError
from .io import (Config, dump_json, fmt, load_config, plan_provenance, provenance, read_lattice_csv,
                 read_scalogram_csv, read_spec_csv, write_lattice_csv, write_scalogram_csv, write_spec_csv)
from .lattice import LatticeFn, point_mass, zeros
from .transform import fourier_fast, fourier_qv, make_plan
from .verify import band_limited_signal, run_suite
from .wavelet import (admissibility_constant, bump_spec, cwt_cells, cwt_fast, make_wavelet_from_fourier, ramp_spec,
                      reconstruct, spec_function)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_FAILED = 2

CHECK_FRACTION = 0.01
CHECK_TOL = 1e-8


class _Invalid(Exception):
    """Validation failure raised inside a command (exit 1)."""


def _config(path, seed=None):
    cfg = load_config(path) if path else Config()
    if seed is not None:
        cfg = Config(**{**cfg.to_dict(), "seed": seed})
    return cfg


def _plan(cfg):
    return make_plan(cfg.grid(), cfg.vparams(), series_tol=cfg.series_tol)


def _wavelet(path, plan):
    spec, _ = read_spec_csv(path)
    return make_wavelet_from_fourier(spec, plan)


def _say(msg):
    click.echo(msg, err=True)


config_opt = click.option("--config", "config_path", type=click.Path(dir_okay=False),
                          help="JSON configuration (defaults are used when omitted).")
seed_opt = click.option("--seed", type=click.IntRange(min=0), default=None,
                        help="Override the configured random seed.")
out_opt = click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True,
                       help="Output file.")


@click.group()
@click.version_option(__version__, prog_name="qwcli")
def cli():
    """Generalized q-Bessel Fourier and wavelet transforms on the q-lattice."""


@cli.command()
@config_opt
@click.option("--in", "in_path", type=click.Path(exists=True, dir_okay=False), required=True,
              help="Signal CSV (n,x,value) on the configured grid.")
@out_opt
@click.option("--fast", is_flag=True, help="Use the FFT evaluation instead of direct summation.")
def fourier(config_path, in_path, out_path, fast):
    """Transform a lattice signal."""
    cfg = _config(config_path)
    plan = _plan(cfg)
    f, _ = read_lattice_csv(in_path, plan.grid)
    fhat = fourier_fast(f, plan) if fast else fourier_qv(f, plan)
    write_lattice_csv(out_path, fhat, plan_provenance(plan, kind="fourier"))
    return EXIT_OK


@cli.command()
@config_opt
@click.option("--in", "in_path", type=click.Path(exists=True, dir_okay=False), required=True,
              help="Signal CSV (n,x,value).")
@click.option("--wavelet", "wavelet_path", type=click.Path(exists=True, dir_okay=False), required=True,
              help="Wavelet spec CSV (k,value) of Fourier-domain heights.")
@out_opt
@click.option("--ka", type=(int, int), default=None, help="Scale exponent range LO HI.")
@click.option("--kb", type=(int, int), default=None, help="Position exponent range LO HI.")
@click.option("--check", is_flag=True, help="Recompute 1%% of the cells by direct summation.")
@seed_opt
def cwt(config_path, in_path, wavelet_path, out_path, ka, kb, check, seed):
    """Continuous wavelet transform (FFT path) of a lattice signal."""
    cfg = _config(config_path, seed)
    plan = _plan(cfg)
    f, _ = read_lattice_csv(in_path, plan.grid)
    w = _wavelet(wavelet_path, plan)
    s = cwt_fast(f, w, plan, ka, kb)
    if check:
        dev, n_cells = _cross_check(f, w, plan, s, cfg.seed)
        _say(f"check: {n_cells} cells, max deviation {dev:.3e} (tolerance {CHECK_TOL:g})")
        if not dev < CHECK_TOL:
            return EXIT_FAILED
    write_scalogram_csv(out_path, s, plan_provenance(plan, kind="scalogram", admissibility=fmt(w.c_admis)))
    return EXIT_OK


def _cross_check(f, w, plan, s, seed):
    n_total = s.coeffs.size
    n_cells = max(1, math.ceil(CHECK_FRACTION * n_total))
    pick = np.sort(np.random.default_rng(seed).choice(n_total, n_cells, replace=False))
    rows, cols = np.unravel_index(pick, s.coeffs.shape)
    cells = [(int(s.ka[i]), int(s.kb[j])) for i, j in zip(rows, cols)]
    direct = cwt_cells(f, w, plan, cells)
    scale = np.max(np.abs(s.coeffs))
    diff = np.max(np.abs(s.coeffs[rows, cols] - direct))
    return float(diff / scale) if scale > 0 else float(diff), n_cells


@cli.command("reconstruct")
@config_opt
@click.option("--in", "in_path", type=click.Path(exists=True, dir_okay=False), required=True,
              help="Scalogram CSV (ka,kb,a,b,value).")
@click.option("--wavelet", "wavelet_path", type=click.Path(exists=True, dir_okay=False), required=True,
              help="Wavelet spec CSV used for the analysis.")
@out_opt
def reconstruct_cmd(config_path, in_path, wavelet_path, out_path):
    """Invert a scalogram back to a lattice signal."""
    cfg = _config(config_path)
    plan = _plan(cfg)
    s, prov = read_scalogram_csv(in_path)
    g = plan.grid
    mine = (g.q, plan.v.alpha, plan.v.n_index, (g.n_min, g.n_max))
    theirs = (s.q, s.alpha, s.n_index, s.window)
    if mine != theirs:
        raise _Invalid(f"scalogram was computed for (q, alpha, n_index, window) = {theirs}, "
                       f"config has {mine}")
    w = _wavelet(wavelet_path, plan)
    if "admissibility" in prov and prov["admissibility"] != fmt(w.c_admis):
        raise _Invalid("wavelet spec does not match the one recorded in the scalogram")
    r = reconstruct(s, w, plan)
    write_lattice_csv(out_path, r, plan_provenance(plan, kind="reconstruction"))
    return EXIT_OK


@cli.command()
@config_opt
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
              help="Report path (overrides report_path from the config).")
@seed_opt
def verify(config_path, out_path, seed):
    """Run the identity suite and write a JSON report."""
    cfg = _config(config_path, seed)
    report = run_suite(cfg)
    dump_json(out_path or cfg.report_path, report.to_json())
    for r in report.records:
        verdict = "ok" if r.ok else "FAILED"
        _say(f"{r.name:34s} {r.residual:10.3e}  tol {r.tolerance:8.1e}  expect {r.expect:4s}  {verdict}")
    _say(f"overall: {'pass' if report.passed else 'FAIL'}")
    return EXIT_OK if report.passed else EXIT_FAILED


@cli.command("wavelet-gen")
@click.argument("shape", type=click.Choice(["bump", "ramp"]))
@click.option("--k0", type=int, required=True, help="First lattice index of the spec.")
@click.option("--k1", type=int, required=True, help="Last lattice index of the spec.")
@config_opt
@out_opt
def wavelet_gen(shape, k0, k1, config_path, out_path):
    """Write a Fourier-domain wavelet spec on lattice indices k0..k1 and report its C."""
    cfg = _config(config_path)
    spec = (bump_spec if shape == "bump" else ramp_spec)(k0, k1)
    g = cfg.grid()
    c = admissibility_constant(spec_function(spec, g)[1])
    v = cfg.vparams()
    prov = provenance(g.q, v.alpha, v.n_index, (g.n_min, g.n_max), kind=shape, admissibility=fmt(c))
    write_spec_csv(out_path, spec, prov)
    click.echo(f"admissibility constant C = {fmt(c)}")
    return EXIT_OK


@cli.command()
@click.argument("kind", type=click.Choice(["zero", "point-mass", "random", "kernel"]))
@config_opt
@out_opt
@click.option("--at", "k", type=int, default=0, help="Index of the point mass.")
@seed_opt
def lattice(kind, config_path, out_path, k, seed):
    """Write a lattice function: zeros, a point mass, a seeded band-limited signal or the kernel."""
    cfg = _config(config_path, seed)
    g = cfg.grid()
    if kind == "zero":
        f = zeros(g)
    elif kind == "point-mass":
        f = point_mass(g, k)
    else:
        plan = _plan(cfg)
        if kind == "random":
            f = band_limited_signal(plan, np.random.default_rng(cfg.seed))
        else:
            f = LatticeFn(g, plan.kernel(g.indices))
    v = cfg.vparams()
    prov = provenance(g.q, v.alpha, v.n_index, (g.n_min, g.n_max), kind=kind)
    if kind == "random":
        prov["seed"] = str(cfg.seed)
    write_lattice_csv(out_path, f, prov)
    return EXIT_OK


def main(argv=None):
    """Entry point; returns the process exit code."""
    def show(message, category, filename, lineno, file=None, line=None):
        _say(f"warning: {category.__name__}: {message}")

    with warnings.catch_warnings():
        warnings.simplefilter("default")
        warnings.showwarning = show
        try:
            rv = cli.main(args=argv, prog_name="qwcli", standalone_mode=False)
        except click.exceptions.Exit as exc:
            return exc.exit_code
        except click.exceptions.Abort:
            _say("aborted")
            return EXIT_INVALID
        except click.ClickException as exc:
            exc.show()
            return EXIT_INVALID
        except (_Invalid, QBesselError, ValueError, ArithmeticError, IndexError, OSError) as exc:
            _say(f"error: {exc}")
            return EXIT_INVALID
    return EXIT_OK if rv is None else int(rv)


if __name__ == "__main__":
    sys.exit(main())
