"""Command-line front end.

    qubitchain run CONFIG [--mode discrete|continuum|compare] [--out DIR] ...
    qubitchain spectrum IN.csv OUT.csv [--window rect|hann]
    qubitchain validate CONFIG
    qubitchain scenarios [--show NAME]

CONFIG is a config file, a bundled scenario name, or a ``manifest.json``
written by an earlier run.  Exit codes: 0 success, 2 configuration
error, 3 numerical-validity abort (edge contact, photon truncation).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .continuum import ContinuumSolver
from .discrete import propagate
from .errors import ConfigError, NumericalValidityError, TruncationError
from .io import (
    FIELD_HEADER,
    format_config,
    parse_config,
    read_config_source,
    read_timeseries,
    scenario_names,
    scenario_text,
    write_field_rows,
    write_json,
    write_spectrum,
    write_timeseries,
)
from .model import SystemParams, coherent_amplitudes, initial_state
from .observables import TimeSeries, inversion, spectrum, total_norm

log = logging.getLogger("qubitchain")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
MODES = ("discrete", "continuum", "compare")
#: Coherent-state weight a user-chosen l_max may discard before the run aborts.
MAX_TRUNCATION = 1e-6


@dataclass
class RunManifest:
    params: SystemParams
    mode: str
    output_dir: str
    config_sha256: str
    version: str = __version__
    extras: dict = None
    flags: dict = None

    def to_json(self) -> dict:
        return {
            "tool": "qubitchain",
            "version": self.version,
            "mode": self.mode,
            "output_dir": self.output_dir,
            "config_sha256": self.config_sha256,
            "config": format_config(self.params, self.extras),
            "flags": self.flags or {},
        }


def _load(source: str):
    """Parameters, run settings and the config text, from any accepted source."""
    path = Path(source)
    if path.suffix == ".json" and path.is_file():
        try:
            data = json.loads(path.read_text())
            text = data["config"]
        except (ValueError, KeyError):
            raise ConfigError("manifest", f"{source} is not a run manifest") from None
        params, extras = parse_config(text)
        return params, extras, text, data.get("flags", {}), data.get("mode")
    text = read_config_source(source)
    params, extras = parse_config(text)
    return params, extras, text, {}, None


def _check_truncation(p: SystemParams) -> None:
    _, tail = coherent_amplitudes(p.mean_photons, p.l_max)
    if tail > MAX_TRUNCATION:
        raise TruncationError(
            f"l_max={p.l_max} drops coherent-state weight {tail:.3g} (> {MAX_TRUNCATION:g}); "
            "raise l_max or set it to auto"
        )


def _discrete_series(p: SystemParams, normalized: bool, dump):
    t, w, nrm = [], [], []
    for ti, state in propagate(initial_state(p), p):
        t.append(ti)
        w.append(inversion(state, normalized))
        nrm.append(total_norm(state))
        if dump is not None:
            write_field_rows(dump, ti, state)
    return TimeSeries(t, w, "inversion"), TimeSeries(t, nrm, "norm")


def _continuum_series(p: SystemParams, normalized: bool, dump):
    solver = ContinuumSolver(p)
    times = np.arange(0, p.n_steps + 1, p.sample_stride) * p.dt
    w, nrm = [], []
    for ti in times:
        field = solver.field(ti)
        lattice = field.to_amplitude_field()
        w.append(inversion(lattice, normalized))
        nrm.append(total_norm(lattice))
        if dump is not None:
            write_field_rows(dump, ti, lattice)
    return TimeSeries(times, w, "inversion"), TimeSeries(times, nrm, "norm")


def _run_mode(mode, p, normalized, out: Path, dump_field: bool, suffix=""):
    runner = _discrete_series if mode == "discrete" else _continuum_series
    dump = None
    if dump_field:
        dump = open(out / f"field{suffix}.csv", "w", newline="")
        dump.write(FIELD_HEADER)
    try:
        inv, nrm = runner(p, normalized, dump)
    finally:
        if dump is not None:
            dump.close()
    write_timeseries(inv, out / f"inversion{suffix}.csv")
    write_timeseries(nrm, out / f"norm{suffix}.csv")
    return inv


def cmd_run(args) -> int:
    params, extras, text, saved_flags, saved_mode = _load(args.config)
    mode = args.mode or saved_mode or "discrete"
    window = args.window or saved_flags.get("window", "rect")
    normalized = not (args.unnormalized_inversion or saved_flags.get("unnormalized_inversion", False))
    dump_field = args.dump_field or saved_flags.get("dump_field", False)
    overrides = {}
    if args.dt is not None:
        overrides["dt"] = args.dt
    if args.t_end is not None:
        overrides["t_end"] = args.t_end
    if overrides:
        params = params.replace(**overrides)
    _check_truncation(params)
    if mode != "discrete" and params.omega != params.omega0:
        raise ConfigError("omega", f"{mode} mode needs omega == omega0 (analytic solution is resonant only)")

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    flags = {"window": window, "unnormalized_inversion": not normalized, "dump_field": dump_field}
    manifest = RunManifest(
        params, mode, str(out), hashlib.sha256(text.encode()).hexdigest(), extras=extras, flags=flags
    )
    write_json(manifest.to_json(), out / "manifest.json")

    log.info("running %s mode, %d steps", mode, params.n_steps)
    if mode == "compare":
        disc = _run_mode("discrete", params, normalized, out, dump_field, "_discrete")
        cont = _run_mode("continuum", params, normalized, out, dump_field, "_continuum")
        diff = disc.values - cont.values
        report = {
            "rms_difference": float(np.sqrt(np.mean(diff**2))),
            "max_abs_difference": float(np.max(np.abs(diff))),
            "samples": int(diff.size),
        }
        write_json(report, out / "compare.json")
        print(f"rms inversion difference {report['rms_difference']:.6g} over {report['samples']} samples")
        inv = disc
    else:
        inv = _run_mode(mode, params, normalized, out, dump_field)
    if extras.get("pipeline") == "spectrum":
        write_spectrum(spectrum(inv, window=window), out / "spectrum.csv")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_spectrum(args) -> int:
    try:
        ts = read_timeseries(args.input)
        spec = spectrum(ts, window=args.window)
    except (OSError, ValueError) as exc:
        raise ConfigError("input", str(exc)) from None
    write_spectrum(spec, args.output)
    return EXIT_OK


def cmd_validate(args) -> int:
    params, _, _, _, _ = _load(args.config)
    _, tail = coherent_amplitudes(params.mean_photons, params.l_max)
    print(f"ok: {params.n_chains} chain(s) x {params.n_sites} sites, l_max={params.l_max}, "
          f"{params.n_steps} steps, truncated weight {tail:.2e}")
    if tail > MAX_TRUNCATION:
        print(f"warning: truncated weight exceeds {MAX_TRUNCATION:g}; run would abort", file=sys.stderr)
    if params.omega != params.omega0:
        print("note: detuned; only the discrete mode is available")
    return EXIT_OK


def cmd_scenarios(args) -> int:
    if args.show:
        sys.stdout.write(scenario_text(args.show))
        return EXIT_OK
    for name in scenario_names():
        _, extras = parse_config(scenario_text(name))
        print(f"{name:12s} {extras['description']}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qubitchain", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="integrate a scenario and write CSV outputs")
    run.add_argument("config", help="config file, bundled scenario name, or manifest.json")
    run.add_argument("--mode", choices=MODES)
    run.add_argument("--out", default="out", help="output directory (default: out)")
    run.add_argument("--dump-field", action="store_true", help="also write every sampled amplitude")
    run.add_argument("--window", choices=("rect", "hann"), help="window for the spectrum pipeline")
    run.add_argument("--unnormalized-inversion", action="store_true",
                     help="do not divide the inversion by the instantaneous norm")
    run.add_argument("--dt", type=float, help="override the time step")
    run.add_argument("--t-end", type=float, help="override the final time")
    run.set_defaults(func=cmd_run)

    spec = sub.add_parser("spectrum", help="spectrum of a t,value CSV")
    spec.add_argument("input")
    spec.add_argument("output")
    spec.add_argument("--window", choices=("rect", "hann"), default="rect")
    spec.set_defaults(func=cmd_spectrum)

    val = sub.add_parser("validate", help="check a config file")
    val.add_argument("config")
    val.set_defaults(func=cmd_validate)

    sc = sub.add_parser("scenarios", help="list bundled scenarios")
    sc.add_argument("--show", metavar="NAME", help="print one scenario file")
    sc.set_defaults(func=cmd_scenarios)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalValidityError as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
