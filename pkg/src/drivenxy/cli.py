"""Command-line front end.

Every subcommand reads one configuration (``--config`` file or bundled
``--preset``), runs it and writes CSV, JSON and SVG files to ``--out``.
Failures exit nonzero and print one JSON line with the error category on
stderr.
"""

import argparse
import json
import sys

import numpy as np

from . import __version__
from .config import list_presets, load_preset, parse_config, parse_grid
from .emit import ResultTable, emit_results, table_from_sweep
from .entanglement import ConcurrenceTrace, concurrences, pair_reductions
from .errors import ConfigError, DrivenXYError
from .hilbert import DensityMatrix, partial_trace
from .model import hamiltonian_action
from .propagate import StepControl, evolve_lindblad, evolve_pure
from .router import multipartite_target_state, pairwise_concurrence_table, run_split_experiment
from .rwa import predict_resonances
from .sweep import initial_state, run_decoherence_sweep, run_frequency_sweep

__all__ = ["main", "build_parser", "EXIT_CODES"]

EXIT_CODES = {"error": 1, "config": 2, "resource": 3, "numeric": 4, "unsupported": 5, "io": 6}


def build_parser():
    parser = argparse.ArgumentParser(prog="drivenxy", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--list-presets", action="store_true", help="print bundled presets")
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--config", metavar="PATH", help="configuration file")
    src.add_argument("--preset", metavar="NAME", help="bundled preset name")
    common.add_argument("--out", metavar="DIR", help="output directory")
    common.add_argument("--workers", type=int, metavar="N", help="worker processes for sweeps")
    common.add_argument("--samples", type=int, metavar="N", help="snapshots per window")
    common.add_argument("--format", metavar="LIST", help="comma list from csv,json,svg")
    common.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                        help="override one configuration value (repeatable)")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.add_parser("sweep-freq", parents=[common], help="peak concurrence against omega_d")
    dec = sub.add_parser("sweep-decoherence", parents=[common],
                         help="peak concurrence against the dephasing rate")
    dec.add_argument("--curves", metavar="GRID",
                     help="also sweep omega_d over GRID (start:stop:count) for every rate")
    ev = sub.add_parser("evolve", parents=[common], help="concurrence trace of one run")
    ev.add_argument("--frame", choices=("lab", "interaction"),
                    help="integration frame (default: the config's [run] frame)")
    sub.add_parser("router", parents=[common], help="entanglement splitting in a router")
    sub.add_parser("resonances", parents=[common], help="analytic resonance table")
    sub.add_parser("multipartite", parents=[common], help="pairwise concurrences of a W-type state")
    return parser


def _overrides(args):
    out = {}
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects SECTION.KEY=VALUE, got {item!r}")
        out[key.strip()] = value.strip()
    if args.samples is not None:
        out["run.samples"] = str(args.samples)
    if args.workers is not None:
        out["run.workers"] = str(args.workers)
    if args.format is not None:
        out["output.formats"] = args.format
    if args.out is not None:
        out["output.dir"] = args.out
    return out


def load_config(args):
    overrides = _overrides(args)
    if args.preset:
        return load_preset(args.preset, overrides)
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
        return parse_config(text, source=args.config, overrides=overrides)
    raise ConfigError("give either --config PATH or --preset NAME")


def _need(cfg, *scenarios):
    if cfg.scenario not in scenarios:
        raise ConfigError(f"scenario {cfg.scenario!r} does not fit this command; "
                          f"expected {' or '.join(scenarios)}")


def cmd_sweep_freq(cfg, args):
    _need(cfg, "coupling-drive", "field-drive")
    return [table_from_sweep(run_frequency_sweep(cfg), "sweep_freq")]


def cmd_sweep_decoherence(cfg, args):
    _need(cfg, "coupling-drive", "field-drive")
    if args.curves is None:
        return [table_from_sweep(run_decoherence_sweep(cfg), "sweep_decoherence")]
    try:
        freqs = parse_grid(args.curves)
    except ValueError as exc:
        raise ConfigError(f"--curves: {exc}") from None
    if not freqs or any(b <= a for a, b in zip(freqs, freqs[1:])) or freqs[0] <= 0:
        raise ConfigError("--curves must be a nonempty, strictly increasing, positive grid")
    result, curves = run_decoherence_sweep(cfg, frequencies=freqs)
    cols = {"omega_d": np.asarray(freqs)}
    series = []
    for rate, res in curves.items():
        name = f"c_max_lambda_{rate:g}"
        cols[name] = res.c_max
        series.append(("omega_d", name, f"lambda = {rate:g} {cfg.lambda_unit}"))
    meta = dict(result.metadata, curve_grid=list(freqs))
    return [table_from_sweep(result, "sweep_decoherence"),
            ResultTable("sweep_decoherence_curves", cols, meta, tuple(series),
                        "omega_d / h0", "C_max")]


def cmd_evolve(cfg, args):
    _need(cfg, "coupling-drive", "field-drive")
    protocol = cfg.protocol
    if cfg.axis == "omega_d":
        protocol = protocol.replace(omega_d=cfg.grid[0])
    n = cfg.network.n_sites
    j, k = cfg.site_pair()
    frame = args.frame or cfg.frame
    model = hamiltonian_action(cfg.network, protocol, frame)
    span = (0.0, cfg.t_end if cfg.t_end is not None else protocol.window(n))
    if cfg.noise.rate > 0:
        traj = evolve_lindblad(initial_state(n).density_matrix(), model, cfg.noise, span,
                               StepControl(cfg.nu), cfg.samples, store=False,
                               observer=lambda t, r: partial_trace(DensityMatrix(n, r),
                                                                   (j, k)).entries)
    else:
        traj = evolve_pure(initial_state(n), model, span, StepControl(cfg.nu), cfg.samples,
                           store=False,
                           observer=lambda t, psi: pair_reductions(psi[None], n, j, k)[0])
    trace = ConcurrenceTrace.from_values((j, k), traj.times,
                                         concurrences(np.array(traj.observations)))
    meta = dict(cfg.echo(), frame=frame, omega_d=protocol.omega_d, c_max=trace.c_max,
                t_max=trace.t_max, integrator={"method": "rk4-fixed-step", "nu": cfg.nu,
                                               "dt": traj.dt, "n_steps": traj.n_steps},
                norm_drift=traj.norm_drift, version=__version__)
    return [ResultTable("evolve", {"time": traj.times, "concurrence": trace.values}, meta,
                        (("time", "concurrence", f"C({j},{k})"),), "t h0", "C")]


def cmd_router(cfg, args):
    _need(cfg, "router")
    span = (0.0, cfg.window()) if cfg.t_end is not None else None
    res = run_split_experiment(cfg.router, cfg.protocol, span, cfg.network.gamma, cfg.samples,
                               StepControl(cfg.nu))
    sites = sorted(res.traces)
    cols = {"time": res.traces[sites[0]].times}
    series = []
    for s in sites:
        cols[f"c_0_{s}"] = res.traces[s].values
        series.append(("time", f"c_0_{s}", f"C(0,{s})"))
    meta = dict(cfg.echo(), arrival_times=res.arrival_times, peaks=res.peaks,
                excitation_drift=res.excitation_drift, flagged=res.flagged, notes=res.notes,
                version=__version__)
    return [ResultTable("router", cols, meta, tuple(series), "t h0", "C")]


def cmd_resonances(cfg, args):
    _need(cfg, "resonance-table")
    h0 = cfg.protocol.h0
    preds = predict_resonances(h0, cfg.resonances["max_order"], cfg.resonances.get("h1"))
    cols = {"order": [p.order for p in preds], "k": [p.k for p in preds],
            "omega": [p.omega for p in preds], "weight": [p.weight for p in preds],
            "ratio": [str(p.ratio) for p in preds]}
    meta = dict(cfg.echo(), version=__version__)
    return [ResultTable("resonances", cols, meta, (("omega", "weight", "weight"),),
                        "omega_d / h0", "weight")]


def cmd_multipartite(cfg, args):
    _need(cfg, "multipartite")
    mp = cfg.multipartite
    state = multipartite_target_state(mp["amplitudes"], mp.get("labels"), mp.get("vacuum", 0.0))
    table = pairwise_concurrence_table(state)
    n = state.n_sites
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    cols = {"pair": list(range(len(pairs))),
            "site_j": [a for a, _ in pairs], "site_k": [b for _, b in pairs],
            "label_j": [state.labels[a] for a, _ in pairs],
            "label_k": [state.labels[b] for _, b in pairs],
            "concurrence": [float(table[a, b]) for a, b in pairs]}
    meta = dict(cfg.echo(), version=__version__)
    return [ResultTable("multipartite", cols, meta, (("pair", "concurrence", "C_jk"),),
                        "pair index", "C")]


COMMANDS = {"sweep-freq": cmd_sweep_freq, "sweep-decoherence": cmd_sweep_decoherence,
            "evolve": cmd_evolve, "router": cmd_router, "resonances": cmd_resonances,
            "multipartite": cmd_multipartite}


def _fail(category, message, errors=None):
    payload = {"category": category, "message": message}
    if errors:
        payload["errors"] = errors
    print(json.dumps(payload), file=sys.stderr)
    return EXIT_CODES.get(category, 1)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.list_presets:
        print("\n".join(list_presets()))
        return 0
    if args.command is None:
        parser.print_help(sys.stderr)
        return _fail("config", "no command given")
    try:
        cfg = load_config(args)
        tables = COMMANDS[args.command](cfg, args)
        for table in tables:
            for path in emit_results(table, cfg.formats, cfg.out_dir):
                print(path)
    except ConfigError as exc:
        return _fail(exc.category, str(exc), exc.errors)
    except DrivenXYError as exc:
        return _fail(exc.category, str(exc))
    except OSError as exc:
        return _fail("io", str(exc))
    except ValueError as exc:
        return _fail("error", str(exc))
    return 0


if __name__ == "__main__":
    sys.exit(main())
