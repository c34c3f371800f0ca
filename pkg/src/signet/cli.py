"""Command-line front end: simulate, sweep, steady-state, dataset.

Configuration comes from an optional JSON file plus flags (flags win).
Every CSV starts with a provenance comment (tool version, config hash,
seed) and identical config + seed reproduces byte-identical outputs.
Exit codes: 0 success, 1 configuration error, 2 data error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import itertools
import json
import os
import sys
from dataclasses import replace
from functools import partial
from pathlib import Path

import numpy as np

from . import __version__
from .datasets import (
    BootstrapSample,
    DataError,
    DatasetFormat,
    DatasetSpec,
    bootstrap_connected_subgraph,
    graph_stats,
    parse_edge_list,
    write_generic_csv,
)
from .dynamics import GateMode, GateScope, Params
from .energy import NormalizationMode
from .engine import InitialConditions, RunSpec, SERIES_KEYS, run_ensemble
from .graph import SignedGraph, triad_count_upper_bound
from .pairchain import (
    build_pair_chain,
    generator_matrix,
    stationary_distribution,
    theorem1_marginals,
    write_matrix_csv,
    write_stationary_csv,
)

_CSV_KEYS = {
    "s": "s", "a": "a", "rho": "rho", "r": "r",
    "e_pair": "E_p", "e_triad": "E_tri", "e_total": "E",
    "balanced": "balanced_frac", "e_min": "e_min",
}

_FORMATS = {
    "snap": DatasetFormat.SNAP_TAB_SIGNED,
    "bitcoin": DatasetFormat.BITCOIN_CSV,
    "generic": DatasetFormat.GENERIC_CSV,
}


class ConfigError(Exception):
    """Invalid configuration (bad flags, bad config file, bad values)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


DEFAULTS = {
    "seed": None,
    "runs": 1,
    "steps": 10_000_000,
    "sample_every": 100,
    "dt": 0.001,
    "alpha": 0.5,
    "rho0": 0.15,
    "r0": 0.25,
    "a0": 0.0,
    "beta": 6.0,
    "beta_a": None,  # 0.3 * beta unless set
    "kappa": 4.0,
    "delta": 9.0,
    "gate": "total",
    "gate_scope": "recovery",
    "norm": "binomial",
    "jobs": 1,
    "out": "signet-out",
    "n": 180,
    "dataset": None,
    "format": None,
    "bootstrap_size": None,
    "use_native_signs": False,
    "stop_stuck": 1_000_000,
    "figures": True,
    "x_axis": "step",
    "sweep": {},
}


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    try:
        cfg = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {p} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("top-level config must be a JSON object")
    unknown = set(cfg) - set(DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return cfg


def _resolve(args: argparse.Namespace, needs: tuple[str, ...]) -> dict:
    """defaults < config file < command-line flags; env seed fallback."""
    cfg = dict(DEFAULTS)
    cfg.update(_load_config(getattr(args, "config", None)))
    for key in needs:
        flag = getattr(args, key, None)
        if flag is not None:
            cfg[key] = flag
    if cfg["seed"] is None:
        env = os.environ.get("SIGNET_SEED")
        if env is not None:
            try:
                cfg["seed"] = int(env)
            except ValueError as exc:
                raise ConfigError(f"SIGNET_SEED must be an integer, got {env!r}") from exc
        else:
            cfg["seed"] = 0
    if cfg["beta_a"] is None:
        cfg["beta_a"] = 0.3 * cfg["beta"]
    return cfg


_EXECUTION_KEYS = {"out", "jobs", "figures", "x_axis"}


def _config_hash(cfg: dict) -> str:
    # hash the experiment identity, not where or how outputs are written
    canon = json.dumps(
        {k: v for k, v in cfg.items() if k not in _EXECUTION_KEYS},
        sort_keys=True,
        default=str,
    )
    return hashlib.sha256(canon.encode()).hexdigest()[:12]


def _params(cfg: dict) -> Params:
    try:
        return Params(
            beta=float(cfg["beta"]),
            kappa=float(cfg["kappa"]),
            delta=float(cfg["delta"]),
            beta_a=float(cfg["beta_a"]),
            dt=float(cfg["dt"]),
            alpha=float(cfg["alpha"]),
            gate=GateMode(cfg["gate"]),
            gate_scope=GateScope(cfg["gate_scope"]),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _norm(cfg: dict) -> NormalizationMode:
    try:
        return NormalizationMode(cfg["norm"])
    except ValueError as exc:
        raise ConfigError(f"unknown normalization {cfg['norm']!r}") from exc


def _dataset_format(cfg_format: str | None, path: str) -> DatasetFormat:
    if cfg_format is not None:
        try:
            return _FORMATS[cfg_format]
        except KeyError as exc:
            raise ConfigError(f"unknown dataset format {cfg_format!r}") from exc
    name = path.lower()
    if name.endswith(".gz"):
        name = name[:-3]
    if name.endswith((".txt", ".tsv")):
        return DatasetFormat.SNAP_TAB_SIGNED
    return DatasetFormat.GENERIC_CSV


def _bootstrap_factory(graph, size, seed):
    return bootstrap_connected_subgraph(graph, size, seed).graph


def _make_runspec(cfg: dict) -> RunSpec:
    try:
        ic = InitialConditions(
            rho0=float(cfg["rho0"]),
            r0=float(cfg["r0"]),
            a0=float(cfg["a0"]),
            seed=int(cfg["seed"]),
            use_native_signs=bool(cfg["use_native_signs"]),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg["dataset"] is not None:
        fmt = _dataset_format(cfg["format"], cfg["dataset"])
        report = parse_edge_list(DatasetSpec(cfg["dataset"], fmt))
        if cfg["bootstrap_size"]:
            graph = None
            factory = partial(_bootstrap_factory, report.graph, int(cfg["bootstrap_size"]))
        else:
            graph = report.graph
            factory = None
    else:
        n = int(cfg["n"])
        if n < 2:
            raise ConfigError("synthetic complete network needs n >= 2")
        graph = SignedGraph.complete(n, -1)
        factory = None
    return RunSpec(
        ic=ic,
        params=_params(cfg),
        t_steps=int(cfg["steps"]),
        sample_every=int(cfg["sample_every"]),
        graph=graph,
        graph_factory=factory,
        norm=_norm(cfg),
        stop_stuck=int(cfg["stop_stuck"]) if cfg["stop_stuck"] else None,
    )


def _provenance(fh, cfg: dict) -> None:
    fh.write(f"# signet {__version__} config_sha256={_config_hash(cfg)} seed={cfg['seed']}\n")


def _fmt(x: float) -> str:
    return repr(float(x))


# -- subcommands --------------------------------------------------------------


def cmd_simulate(args) -> int:
    cfg = _resolve(args, (
        "seed", "runs", "steps", "sample_every", "dt", "alpha", "rho0", "r0",
        "a0", "beta", "beta_a", "kappa", "delta", "gate", "gate_scope", "norm",
        "jobs", "out", "n", "dataset", "format", "bootstrap_size",
        "use_native_signs", "stop_stuck", "figures", "x_axis",
    ))
    spec = _make_runspec(cfg)
    stats = run_ensemble(spec, int(cfg["runs"]), jobs=int(cfg["jobs"]))

    outdir = Path(cfg["out"])
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / "timeseries.csv"
    with open(path, "w", newline="") as fh:
        _provenance(fh, cfg)
        w = csv.writer(fh)
        if int(cfg["runs"]) == 1:
            w.writerow(["step", "t"] + [_CSV_KEYS[k] for k in SERIES_KEYS])
            for i in range(len(stats.steps)):
                w.writerow(
                    [int(stats.steps[i]), _fmt(stats.t[i])]
                    + [_fmt(stats.mean[k][i]) for k in SERIES_KEYS]
                )
        else:
            header = ["step", "t"]
            for k in SERIES_KEYS:
                header += [f"{_CSV_KEYS[k]}_mean", f"{_CSV_KEYS[k]}_std"]
            w.writerow(header)
            for i in range(len(stats.steps)):
                row = [int(stats.steps[i]), _fmt(stats.t[i])]
                for k in SERIES_KEYS:
                    row += [_fmt(stats.mean[k][i]), _fmt(stats.std[k][i])]
                w.writerow(row)
    print(f"wrote {path}", file=sys.stderr)

    if cfg["figures"]:
        from .plotting import render_timeseries_figures

        figures = render_timeseries_figures(
            stats,
            outdir / "figures",
            x_axis=cfg["x_axis"],
            hashsalt=_config_hash(cfg),
        )
        print(f"wrote {len(figures)} figures to {outdir / 'figures'}", file=sys.stderr)
    return 0


_SWEEP_AXES = ("alpha", "r0", "rho0", "beta", "kappa")


def cmd_sweep(args) -> int:
    cfg = _resolve(args, (
        "seed", "runs", "steps", "sample_every", "dt", "alpha", "rho0", "r0",
        "a0", "beta", "beta_a", "kappa", "delta", "gate", "gate_scope", "norm",
        "jobs", "out", "n", "dataset", "format", "bootstrap_size",
        "use_native_signs", "stop_stuck",
    ))
    sweep = dict(cfg.get("sweep") or {})
    for axis in _SWEEP_AXES:
        flag = getattr(args, f"sweep_{axis}", None)
        if flag:
            try:
                sweep[axis] = [float(v) for v in flag.split(",")]
            except ValueError as exc:
                raise ConfigError(f"bad sweep list for {axis}: {flag!r}") from exc
    unknown = set(sweep) - set(_SWEEP_AXES)
    if unknown:
        raise ConfigError(f"unknown sweep axes: {sorted(unknown)}")
    if not sweep:
        raise ConfigError("sweep needs at least one axis (e.g. --sweep-alpha 0,0.5,1)")

    axes = sorted(sweep)
    grid = list(itertools.product(*(sweep[a] for a in axes)))
    runs = int(cfg["runs"])
    print(f"sweep grid: {len(grid)} cells x {runs} runs", file=sys.stderr)

    outdir = Path(cfg["out"])
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / "sweep.csv"
    quantities = ("rho", "a", "r", "s", "balanced", "e_total", "e_pair", "e_triad", "e_min")
    names = {
        "rho": "rho_inf", "a": "a_inf", "r": "r_inf", "s": "s_inf",
        "balanced": "balanced_frac", "e_total": "E", "e_pair": "E_p",
        "e_triad": "E_tri", "e_min": "E_min",
    }
    with open(path, "w", newline="") as fh:
        _provenance(fh, cfg)
        w = csv.writer(fh)
        header = list(axes)
        for q in quantities:
            header += [f"{names[q]}_mean", f"{names[q]}_std"]
        w.writerow(header)
        base_seed = int(cfg["seed"])
        for idx, coords in enumerate(grid):
            cell = dict(cfg)
            cell.update(dict(zip(axes, coords)))
            if "beta" in axes and getattr(args, "beta_a", None) is None and "beta_a" not in (cfg.get("sweep") or {}):
                cell["beta_a"] = 0.3 * cell["beta"]
            cell["seed"] = base_seed + idx * runs
            spec = _make_runspec(cell)
            stats = run_ensemble(spec, runs, jobs=int(cfg["jobs"]))
            summary = stats.summary(tail=0.1)
            row = [_fmt(c) for c in coords]
            for q in quantities:
                mean, std = summary[q] if q != "s" else summary["s"]
                row += [_fmt(mean), _fmt(std)]
            w.writerow(row)
    print(f"wrote {path}", file=sys.stderr)
    return 0


def cmd_steady_state(args) -> int:
    cfg = _resolve(args, ("seed", "dt", "alpha", "beta", "beta_a", "kappa", "delta", "out"))
    p = _params(cfg)
    chain = build_pair_chain(p)
    dist = stationary_distribution(chain)
    marg = theorem1_marginals(dist)
    rep = generator_matrix(p)

    outdir = Path(cfg["out"])
    outdir.mkdir(parents=True, exist_ok=True)
    write_matrix_csv(chain, outdir / "transition_matrix.csv")
    write_stationary_csv(dist, outdir / "stationary.csv")
    with open(outdir / "marginals.csv", "w", newline="") as fh:
        _provenance(fh, cfg)
        w = csv.writer(fh)
        w.writerow(["quantity", "value"])
        for k in ("s_inf", "a_inf", "rho_inf", "r_inf"):
            w.writerow([k, _fmt(marg[k])])
        w.writerow(["residual_inf_norm", _fmt(dist.residual)])
        w.writerow(["recurrent_classes", dist.n_recurrent_classes])

    def _gen_csv(mat, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["state"] + rep.labels)
            for label, row in zip(rep.labels, mat):
                w.writerow([label] + [_fmt(v) for v in row])

    _gen_csv(rep.literal, outdir / "generator_literal.csv")
    _gen_csv(rep.standard_rates, outdir / "generator_standard.csv")
    with open(outdir / "generator_report.txt", "w") as fh:
        fh.write(f"non-conservative rows: {len(rep.non_conservative_rows)} of 27\n")
        for note in rep.notes:
            fh.write(note + "\n")

    total = marg["s_inf"] + marg["a_inf"] + marg["rho_inf"]
    print(f"s_inf={marg['s_inf']!r} a_inf={marg['a_inf']!r} rho_inf={marg['rho_inf']!r} "
          f"r_inf={marg['r_inf']!r}")
    print(f"sum s+a+rho = {total!r} (exact: {total == 1.0})")
    print(f"residual |pi P - pi|_inf = {dist.residual:.3e}")
    print(f"wrote steady-state tables to {outdir}", file=sys.stderr)
    return 0


def cmd_dataset(args) -> int:
    cfg = _resolve(args, ("seed", "out", "format"))
    fmt = _dataset_format(cfg["format"], args.path)
    report = parse_edge_list(DatasetSpec(args.path, fmt))
    if args.dataset_cmd == "stats":
        st = graph_stats(report.graph)
        bound = triad_count_upper_bound(st.n, st.m)
        w = csv.writer(sys.stdout)
        w.writerow(["n", "m", "density", "triads", "triad_upper_bound",
                    "positive_fraction", "duplicates", "self_loops", "zero_weight"])
        w.writerow([st.n, st.m, _fmt(st.density), st.triads, _fmt(bound),
                    _fmt(st.positive_fraction), report.n_duplicates,
                    report.n_self_loops, report.n_zero_weight])
        return 0

    # bootstrap
    size = args.size
    samples = args.samples
    outdir = Path(cfg["out"])
    outdir.mkdir(parents=True, exist_ok=True)
    base_seed = int(cfg["seed"])
    summary_path = outdir / "bootstrap_summary.csv"
    with open(summary_path, "w", newline="") as fh:
        _provenance(fh, cfg)
        w = csv.writer(fh)
        w.writerow(["sample", "seed", "n", "m", "density", "triads", "file"])
        for i in range(samples):
            bs: BootstrapSample = bootstrap_connected_subgraph(
                report.graph, size, base_seed + i
            )
            st = graph_stats(bs.graph)
            fname = f"bootstrap_{i:03d}.csv"
            write_generic_csv(bs.graph, outdir / fname)
            w.writerow([i, base_seed + i, st.n, st.m, _fmt(st.density), st.triads, fname])
    print(f"wrote {samples} samples to {outdir}", file=sys.stderr)
    return 0


# -- argument wiring -----------------------------------------------------------


def _add_common(sp, *, runs=True):
    sp.add_argument("--config", metavar="PATH", help="JSON config file")
    sp.add_argument("--seed", type=int)
    if runs:
        sp.add_argument("--runs", type=int)
        sp.add_argument("--steps", type=int)
        sp.add_argument("--sample-every", dest="sample_every", type=int)
        sp.add_argument("--stop-stuck", dest="stop_stuck", type=int)
        sp.add_argument("--jobs", type=int)
    sp.add_argument("--dt", type=float)
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--beta", type=float)
    sp.add_argument("--beta-a", dest="beta_a", type=float)
    sp.add_argument("--kappa", type=float)
    sp.add_argument("--delta", type=float)
    sp.add_argument("--out")


def _add_network(sp):
    sp.add_argument("--rho0", type=float)
    sp.add_argument("--r0", type=float)
    sp.add_argument("--a0", type=float)
    sp.add_argument("--gate", choices=["total", "triad", "none"])
    sp.add_argument("--gate-scope", dest="gate_scope", choices=["recovery", "flip"])
    sp.add_argument("--norm", choices=["binomial", "present"])
    sp.add_argument("--n", type=int, help="synthetic complete-network size")
    sp.add_argument("--dataset", metavar="PATH", help="signed edge-list file")
    sp.add_argument("--format", choices=sorted(_FORMATS))
    sp.add_argument("--bootstrap-size", dest="bootstrap_size", type=int)
    sp.add_argument("--use-native-signs", dest="use_native_signs",
                    action="store_const", const=True)


def build_parser() -> _Parser:
    parser = _Parser(prog="signet",
                     description="Coupled spreading and sign dynamics on signed networks")
    parser.add_argument("--version", action="version", version=f"signet {__version__}")
    sub = parser.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("simulate", help="time-evolution runs (CSV + figures)")
    _add_common(sp)
    _add_network(sp)
    sp.add_argument("--no-figures", dest="figures", action="store_const", const=False)
    sp.add_argument("--x-axis", dest="x_axis", choices=["step", "t"])
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("sweep", help="steady-state scalars over a parameter grid")
    _add_common(sp)
    _add_network(sp)
    for axis in _SWEEP_AXES:
        sp.add_argument(f"--sweep-{axis}", dest=f"sweep_{axis}",
                        metavar="V1,V2,...", help=f"grid values for {axis}")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("steady-state", help="pair-chain stationary distribution")
    _add_common(sp, runs=False)
    sp.set_defaults(func=cmd_steady_state)

    sp = sub.add_parser("dataset", help="dataset statistics and bootstrap samples")
    dsub = sp.add_subparsers(dest="dataset_cmd", required=True)
    for name in ("stats", "bootstrap"):
        dsp = dsub.add_parser(name)
        dsp.add_argument("path")
        dsp.add_argument("--config", metavar="PATH")
        dsp.add_argument("--format", choices=sorted(_FORMATS))
        dsp.add_argument("--seed", type=int)
        dsp.add_argument("--out")
        if name == "bootstrap":
            dsp.add_argument("--size", type=int, required=True)
            dsp.add_argument("--samples", type=int, default=1)
        dsp.set_defaults(func=cmd_dataset)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
