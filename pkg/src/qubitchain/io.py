"""Config files and CSV artifacts.

Config files are flat ``key = value`` text; ``#`` and ``;`` start
comments.  Keys are the :class:`~qubitchain.model.SystemParams` field
names (``lambda`` for the relaxation rate); ``xi1``, ``xi2`` and
``chain_profile`` take comma-separated lists; ``l_max`` and ``x0``
accept ``auto``.  Two run-level keys are also recognised:
``description`` (free text) and ``pipeline`` (``none`` or ``spectrum``).

All numbers in CSV output use 12 significant digits.
"""

from __future__ import annotations

import configparser
import csv
import json
from dataclasses import fields
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .model import AmplitudeField, SystemParams
from .observables import Spectrum, TimeSeries

FLOAT_FORMAT = ".12g"
RUN_KEYS = ("description", "pipeline")
PIPELINES = ("none", "spectrum")

_INT_KEYS = {"n_chains", "n_sites", "sample_stride", "l_max"}
_LIST_KEYS = {"xi1", "xi2"}
_COMPLEX_LIST_KEYS = {"chain_profile"}
_OPTIONAL_KEYS = {"l_max", "x0", "chain_profile", "h_max", "h_step"}


def param_keys() -> list[str]:
    return ["lambda" if f.name == "lambda_" else f.name for f in fields(SystemParams)]


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    if key in _OPTIONAL_KEYS and raw.lower() in ("auto", "none", ""):
        return None
    try:
        if key in _LIST_KEYS:
            return tuple(float(v) for v in raw.split(",") if v.strip())
        if key in _COMPLEX_LIST_KEYS:
            return tuple(complex(v.strip().replace(" ", "")) for v in raw.split(",") if v.strip())
        if key in _INT_KEYS:
            value = float(raw)
            if value != int(value):
                raise ValueError
            return int(value)
        return float(raw)
    except ValueError:
        raise ConfigError(key, f"cannot parse {raw!r}") from None


def parse_config(text: str) -> tuple[SystemParams, dict]:
    """Parse config text into parameters and run-level settings."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string("[params]\n" + text)
    except configparser.Error as exc:
        raise ConfigError("config", str(exc).splitlines()[0]) from None
    known = set(param_keys())
    kwargs, extras = {}, {"description": "", "pipeline": "none"}
    for key, raw in parser["params"].items():
        if key in RUN_KEYS:
            extras[key] = raw.strip()
        elif key in known:
            kwargs["lambda_" if key == "lambda" else key] = _parse_value(key, raw)
        else:
            raise ConfigError(key, "unknown key")
    if extras["pipeline"] not in PIPELINES:
        raise ConfigError("pipeline", f"must be one of {PIPELINES}, got {extras['pipeline']!r}")
    try:
        params = SystemParams(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError("config", str(exc)) from None
    return params, extras


def format_config(p: SystemParams, extras: dict | None = None) -> str:
    """Config text that parses back to ``p`` (resolved values are written out)."""
    lines = []
    for key, value in (extras or {}).items():
        if value:
            lines.append(f"{key} = {value}")
    for key, value in p.as_config().items():
        if value is None:
            lines.append(f"{key} = auto")
        elif isinstance(value, tuple):
            lines.append(f"{key} = " + ", ".join(_fmt_scalar(v) for v in value))
        else:
            lines.append(f"{key} = {_fmt_scalar(value)}")
    return "\n".join(lines) + "\n"


def _fmt_scalar(v) -> str:
    if isinstance(v, complex):
        return repr(v).strip("()")
    if isinstance(v, int):
        return str(v)
    return repr(float(v))


def scenario_names() -> list[str]:
    root = resources.files("qubitchain") / "scenarios"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".cfg"))


def scenario_text(name: str) -> str:
    path = resources.files("qubitchain") / "scenarios" / f"{name}.cfg"
    if not path.is_file():
        raise ConfigError("config", f"no bundled scenario named {name!r}")
    return path.read_text()


def read_config_source(source: str) -> str:
    """Text of a config file path, or of a bundled scenario by name."""
    path = Path(source)
    if path.is_file():
        return path.read_text()
    if source in scenario_names():
        return scenario_text(source)
    raise ConfigError("config", f"{source!r} is neither a readable file nor a bundled scenario")


def _fmt(x: float) -> str:
    return format(float(x), FLOAT_FORMAT)


def write_timeseries(ts: TimeSeries, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("t,value\n")
        for t, v in zip(ts.times, ts.values):
            fh.write(f"{_fmt(t)},{_fmt(v)}\n")


def read_timeseries(path, label: str = "value") -> TimeSeries:
    t, v = _read_two_columns(path, ("t", "value"))
    return TimeSeries(t, v, label)


def write_spectrum(spec: Spectrum, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("omega,amplitude\n")
        for w, a in zip(spec.frequencies, spec.amplitudes):
            fh.write(f"{_fmt(w)},{_fmt(a)}\n")


def read_spectrum(path) -> Spectrum:
    w, a = _read_two_columns(path, ("omega", "amplitude"))
    return Spectrum(w, a)


def _read_two_columns(path, header):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        first = next(reader, None)
        if first is None or tuple(c.strip() for c in first) != header:
            raise ValueError(f"{path}: expected header {','.join(header)}")
        rows = [(float(r[0]), float(r[1])) for r in reader if r]
    arr = np.array(rows, dtype=float).reshape(-1, 2)
    return arr[:, 0], arr[:, 1]


FIELD_HEADER = "t,j,m,l,re_A,im_A,re_B,im_B\n"


def write_field_rows(fh, t: float, state: AmplitudeField) -> None:
    """Append one snapshot; rows run over j, then m, then l."""
    ts = _fmt(t)
    n, M, L = state.A.shape
    for j in range(n):
        for m in range(M):
            a_row = state.A[j, m]
            b_row = state.B[j, m]
            for l in range(L):
                a, b = a_row[l], b_row[l]
                fh.write(
                    f"{ts},{j},{m},{l},{_fmt(a.real)},{_fmt(a.imag)},{_fmt(b.real)},{_fmt(b.imag)}\n"
                )


def read_field(path) -> tuple[np.ndarray, list[AmplitudeField]]:
    """Inverse of a field dump: sample times and snapshots."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    times = np.unique(data[:, 0])
    n, M, L = (int(data[:, c].max()) + 1 for c in (1, 2, 3))
    snaps = []
    for t in times:
        rows = data[data[:, 0] == t]
        A = np.zeros((n, M, L), dtype=complex)
        B = np.zeros_like(A)
        idx = tuple(rows[:, c].astype(int) for c in (1, 2, 3))
        A[idx] = rows[:, 4] + 1j * rows[:, 5]
        B[idx] = rows[:, 6] + 1j * rows[:, 7]
        snaps.append(AmplitudeField(A, B))
    return times, snaps


def write_json(obj, path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
