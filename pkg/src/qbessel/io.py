"""
CSV and JSON I/O with provenance headers.

Every CSV starts with ``# key: value`` comment lines, then a header row, then
numbers written with ``%.16e`` (17 significant digits, exact float64 round
trip).  Files are written whole: a temporary file in the target directory is
renamed over the destination.
"""
import csv
import json
import math
import os
import tempfile
from dataclasses import asdict, dataclass, fields
from typing import Optional

import numpy as np

from ._version import __version__
from .errors import DomainError
from .lattice import LatticeFn, build_grid, default_window
from .special import VParams

LATTICE_HEADER = ["n", "x", "value"]
SCALOGRAM_HEADER = ["ka", "kb", "a", "b", "value"]
SPEC_HEADER = ["k", "value"]


class FormatError(DomainError):
    """A file does not follow the expected layout."""


def fmt(x):
    return "%.16e" % x


def atomic_write_text(path, text):
    path = os.fspath(path)
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=folder)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def provenance(q, alpha, n_index, window, **extra):
    """Ordered provenance mapping written ahead of every CSV header."""
    prov = {"tool": f"qbessel {__version__}", "q": repr(float(q)), "alpha": repr(float(alpha)),
            "n_index": str(int(n_index)), "window": f"{window[0]},{window[1]}"}
    prov.update({k: str(v) for k, v in extra.items()})
    return prov


def plan_provenance(plan, **extra):
    g = plan.grid
    return provenance(g.q, plan.v.alpha, plan.v.n_index, (g.n_min, g.n_max), **extra)


def _render(prov, header, rows):
    lines = [f"# {k}: {v}" for k, v in (prov or {}).items()]
    lines.append(",".join(header))
    lines.extend(",".join(r) for r in rows)
    return "\n".join(lines) + "\n"


def _parse(path, header):
    prov = {}
    rows = []
    seen_header = False
    with open(path, newline="") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if not seen_header and line.startswith("#"):
                key, sep, val = line[1:].partition(":")
                if sep:
                    prov[key.strip()] = val.strip()
                continue
            if not seen_header:
                if next(csv.reader([line]), []) != header:
                    raise FormatError(f"{path}: expected header {','.join(header)!r}, got {line!r}")
                seen_header = True
                continue
            if not line.strip():
                continue
            cells = next(csv.reader([line]))
            if len(cells) != len(header):
                raise FormatError(f"{path}:{lineno}: expected {len(header)} fields, got {len(cells)}")
            rows.append(cells)
    if not seen_header:
        raise FormatError(f"{path}: missing header {','.join(header)!r}")
    return prov, rows


def _int(cell, path):
    try:
        return int(cell)
    except ValueError:
        raise FormatError(f"{path}: not an integer: {cell!r}") from None


def _float(cell, path):
    try:
        val = float(cell)
    except ValueError:
        raise FormatError(f"{path}: not a number: {cell!r}") from None
    if not math.isfinite(val):
        raise FormatError(f"{path}: non-finite value {cell!r}")
    return val


def lattice_text(f, prov=None):
    rows = ([str(k), fmt(x), fmt(val)] for k, x, val in zip(f.grid.indices, f.grid.points, f.values))
    return _render(prov, LATTICE_HEADER, rows)


def write_lattice_csv(path, f, prov=None):
    atomic_write_text(path, lattice_text(f, prov))


def read_lattice_csv(path, grid):
    """Read a ``n,x,value`` file that must cover ``grid`` index by index."""
    prov, rows = _parse(path, LATTICE_HEADER)
    ns = [_int(r[0], path) for r in rows]
    if ns != list(range(grid.n_min, grid.n_max + 1)):
        raise FormatError(f"{path}: indices must run over {grid.n_min}..{grid.n_max} in ascending order")
    xs = np.array([_float(r[1], path) for r in rows])
    if np.any(np.abs(xs - grid.points) > 4e-16 * grid.points):
        raise FormatError(f"{path}: x column does not match q**n for q={grid.q}")
    vals = np.array([_float(r[2], path) for r in rows])
    return LatticeFn(grid, vals), prov


def scalogram_text(s, prov=None):
    q = s.q
    rows = []
    for i, ka in enumerate(s.ka):
        for j, kb in enumerate(s.kb):
            rows.append([str(ka), str(kb), fmt(q ** float(ka)), fmt(q ** float(kb)), fmt(s.coeffs[i, j])])
    return _render(prov, SCALOGRAM_HEADER, rows)


def write_scalogram_csv(path, s, prov=None):
    atomic_write_text(path, scalogram_text(s, prov))


def read_scalogram_csv(path):
    """Returns ``(ka_range, kb_range, coeffs, provenance)``; rows must be row-major and complete."""
    from .wavelet import Scalogram

    prov, rows = _parse(path, SCALOGRAM_HEADER)
    if not rows:
        raise FormatError(f"{path}: no coefficients")
    ka = np.array([_int(r[0], path) for r in rows])
    kb = np.array([_int(r[1], path) for r in rows])
    vals = np.array([_float(r[4], path) for r in rows])
    ka_range = (int(ka.min()), int(ka.max()))
    kb_range = (int(kb.min()), int(kb.max()))
    na = ka_range[1] - ka_range[0] + 1
    nb = kb_range[1] - kb_range[0] + 1
    exp_ka = np.repeat(np.arange(ka_range[0], ka_range[1] + 1), nb)
    exp_kb = np.tile(np.arange(kb_range[0], kb_range[1] + 1), na)
    if ka.size != na * nb or np.any(ka != exp_ka) or np.any(kb != exp_kb):
        raise FormatError(f"{path}: rows must cover every (ka, kb) cell, ka-major")
    try:
        q = float(prov["q"])
        alpha = float(prov["alpha"])
        n_index = int(prov["n_index"])
        window = tuple(int(t) for t in prov["window"].split(","))
    except (KeyError, ValueError):
        raise FormatError(f"{path}: missing or malformed provenance lines") from None
    return Scalogram(ka_range, kb_range, vals.reshape(na, nb), q, alpha, n_index, window), prov


def spec_text(spec, prov=None):
    return _render(prov, SPEC_HEADER, ([str(k), fmt(v)] for k, v in spec))


def write_spec_csv(path, spec, prov=None):
    atomic_write_text(path, spec_text(spec, prov))


def read_spec_csv(path):
    prov, rows = _parse(path, SPEC_HEADER)
    return [(_int(r[0], path), _float(r[1], path)) for r in rows], prov


@dataclass(frozen=True)
class Config:
    q: float = 0.5
    alpha: float = 0.5
    n_index: int = 1
    n_min: Optional[int] = None
    n_max: Optional[int] = None
    series_tol: float = 1e-17
    report_path: str = "verify_report.json"
    nonnegative_only: bool = False
    seed: int = 20240607

    def __post_init__(self):
        if isinstance(self.q, bool) or not isinstance(self.q, (int, float)):
            raise DomainError(f"q must be a number, got {self.q!r}")
        if self.n_min is None or self.n_max is None:
            lo, hi = default_window(float(self.q)) if 0.0 < self.q < 1.0 else (0, 1)
            object.__setattr__(self, "n_min", lo if self.n_min is None else self.n_min)
            object.__setattr__(self, "n_max", hi if self.n_max is None else self.n_max)
        if not (0.0 < self.series_tol < 1.0):
            raise DomainError(f"series_tol must lie in (0, 1), got {self.series_tol}")
        if int(self.seed) != self.seed or self.seed < 0:
            raise DomainError(f"seed must be an unsigned integer, got {self.seed!r}")
        # run the grid and parameter validations eagerly
        self.grid()
        self.vparams()

    def grid(self):
        return build_grid(self.q, self.n_min, self.n_max, bool(self.nonnegative_only))

    def vparams(self):
        return VParams(self.alpha, self.n_index)

    def to_dict(self):
        return asdict(self)


def config_from_dict(data):
    if not isinstance(data, dict):
        raise DomainError("config must be a JSON object")
    known = {f.name for f in fields(Config)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise DomainError(f"unknown config keys: {', '.join(unknown)}")
    return Config(**data)


def load_config(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from None
    return config_from_dict(data)


def dump_json(path, obj):
    atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=False) + "\n")
