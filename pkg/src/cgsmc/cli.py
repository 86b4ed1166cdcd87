"""Batch command-line front end: simulate | infer | summarize.

Configuration is a flat key = value text file. Every key can be overridden
by an environment variable (prefix CGSMC_, key upper-cased) and the seed,
worker count, and output directory by command-line flags. Unknown keys are
hard errors.

Exit codes: 0 ok, 2 config error, 3 ingestion error, 4 initialization
failure, 5 schedule-cap abort.
"""

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import fileio, summary
from .errors import (
    ConfigError,
    IngestionError,
    InitializationError,
    ScheduleCapError,
)
from .graphs import chain_components
from .kernels import KernelConfig
from .model import ModelParams
from .priors import Hyperparams
from .simulate import SimSpec, center_columns, simulate_data, standardize_columns
from .smc import SmcConfig, run

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INGEST = 3
EXIT_INIT = 4
EXIT_SCHEDULE = 5

ENV_PREFIX = "CGSMC_"


def _parse_bool(text):
    t = str(text).strip().lower()
    if t in ("true", "1", "yes"):
        return True
    if t in ("false", "0", "no"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _parse_floats(text):
    return [float(x) for x in str(text).split(",") if x.strip() != ""]


def _parse_labels(text):
    return [x.strip() for x in str(text).split(",") if x.strip() != ""]


# key -> (parser, default); None default means "unset"
_COMMON_KEYS = {
    "seed": (int, 0),
    "workers": (int, 1),
    "output_dir": (str, None),
    "labels": (_parse_labels, None),
}

_INFER_KEYS = {
    **_COMMON_KEYS,
    "data_path": (str, None),
    "standardize": (_parse_bool, False),
    "alpha": (_parse_floats, [3.0, 1.0, 1.0, 1.0]),
    "dof": (float, 3.0),
    "d_scale": (float, 1.0),
    "coef_mean": (float, 0.0),
    "coef_var": (float, 1.0),
    "n_particles": (int, 500),
    "cess_target": (float, 0.9),
    "sigma_rw": (float, 0.1),
    "sigma_edge": (float, 1.0),
    "n_sweeps": (int, 10),
    "adapt_target": (float, 0.234),
    "n_mc_gwish": (int, 1000),
    "max_init_attempts": (int, 100_000),
    "step_cap": (int, 10_000),
}

_SIMULATE_KEYS = {
    **_COMMON_KEYS,
    "preset": (str, None),
    "p": (int, None),
    "m": (int, None),
    "adjacency_path": (str, None),
    "prec_path": (str, None),
    "coef_path": (str, None),
}

_SUMMARIZE_KEYS = {
    **_COMMON_KEYS,
    "run_dir": (str, None),
}


def read_config(path, known):
    """Flat key = value file; '#' starts a comment; unknown keys are errors."""
    values = {}
    if path is not None:
        p = Path(path)
        if not p.exists():
            raise ConfigError(f"config file {p} does not exist")
        for lineno, raw in enumerate(p.read_text().splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{p}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in known:
                raise ConfigError(f"{p}:{lineno}: unknown key {key!r}")
            values[key] = value.strip()
    return values


def resolve_config(args, known):
    """defaults < config file < environment < command-line flags."""
    raw = read_config(args.config, known)
    for key in known:
        env = os.environ.get(ENV_PREFIX + key.upper())
        if env is not None:
            raw[key] = env
    out = {}
    for key, (parser, default) in known.items():
        if key in raw:
            try:
                out[key] = parser(raw[key])
            except (ValueError, TypeError) as exc:
                raise ConfigError(f"bad value for {key!r}: {raw[key]!r} ({exc})")
        else:
            out[key] = default
    if getattr(args, "seed", None) is not None:
        out["seed"] = args.seed
    if getattr(args, "workers", None) is not None:
        out["workers"] = args.workers
    if getattr(args, "output", None) is not None:
        out["output_dir"] = args.output
    return out


def _require(cfg, key):
    if cfg.get(key) in (None, ""):
        raise ConfigError(f"required key {key!r} is not set")
    return cfg[key]


def _outdir(cfg):
    out = Path(_require(cfg, "output_dir"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_simulate(cfg) -> int:
    outdir = _outdir(cfg)
    if cfg.get("adjacency_path"):
        A, labels_a = fileio.read_adjacency_csv(cfg["adjacency_path"])
        p = A.shape[0]
        if cfg.get("prec_path"):
            prec, _ = fileio.read_matrix_csv(cfg["prec_path"])
        else:
            prec = np.eye(p)
        if cfg.get("coef_path"):
            coef, _ = fileio.read_matrix_csv(cfg["coef_path"])
        else:
            coef = np.zeros((p, p))
        labels = cfg.get("labels") or labels_a or fileio.default_labels(p)
    elif cfg.get("preset") == "independent":
        p = _require(cfg, "p")
        A = np.zeros((p, p), dtype=np.int64)
        prec = np.eye(p)
        coef = np.zeros((p, p))
        labels = cfg.get("labels") or fileio.default_labels(p)
    else:
        raise ConfigError("simulate needs preset = independent or adjacency_path")
    m = _require(cfg, "m")
    if len(labels) != p:
        raise ConfigError(f"got {len(labels)} labels for p={p}")
    graph = chain_components(A)
    spec = SimSpec(graph, ModelParams(coef, prec), m, seed=cfg["seed"])
    data = simulate_data(spec)
    fileio.write_data_csv(outdir / "data.csv", data, labels)
    fileio.write_adjacency_csv(outdir / "truth_adjacency.csv", A, labels)
    print(f"wrote {outdir / 'data.csv'} ({m} x {p}) and truth_adjacency.csv")
    return EXIT_OK


def _write_summaries(outdir, population, labels):
    tensor = summary.edge_probabilities(population)
    fileio.write_edge_probs(outdir, tensor, labels)
    A_map, valid = summary.map_graph(tensor)
    (outdir / "map_graph.dot").write_text(summary.export_dot(A_map, labels))
    if not valid:
        print("note: entrywise argmax graph is not a chain graph", file=sys.stderr)
    top = summary.top_particle(population)
    (outdir / "top_graph.dot").write_text(
        summary.export_dot(top.graph.adjacency, labels))


def cmd_infer(cfg) -> int:
    outdir = _outdir(cfg)
    data_path = Path(_require(cfg, "data_path"))
    if not data_path.exists():
        raise ConfigError(f"data_path {data_path} does not exist")
    data, header = fileio.read_data_csv(data_path)
    p = data.shape[1]
    labels = cfg.get("labels") or header or fileio.default_labels(p)
    if len(labels) != p:
        raise ConfigError(f"got {len(labels)} labels for p={p} columns")
    data = standardize_columns(data) if cfg["standardize"] else center_columns(data)

    alpha = cfg["alpha"]
    if len(alpha) != 4:
        raise ConfigError(f"alpha needs 4 entries, got {len(alpha)}")
    try:
        hyper = Hyperparams(np.asarray(alpha), cfg["dof"],
                            cfg["d_scale"] * np.eye(p),
                            cfg["coef_mean"], cfg["coef_var"])
        kernel = KernelConfig(sigma_rw=cfg["sigma_rw"], sigma_edge=cfg["sigma_edge"],
                              n_sweeps=cfg["n_sweeps"], adapt_target=cfg["adapt_target"],
                              n_mc_gwish=cfg["n_mc_gwish"])
        smc_cfg = SmcConfig(n_particles=cfg["n_particles"], cess_target=cfg["cess_target"],
                            kernel=kernel, max_init_attempts=cfg["max_init_attempts"],
                            seed=cfg["seed"], step_cap=cfg["step_cap"],
                            workers=cfg["workers"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    result = run(data, hyper, smc_cfg)

    fileio.save_population(outdir / "population.jsonl", result.final, labels)
    # output_dir is a location, not a setting; keeping it out lets identical
    # configurations produce byte-identical summaries anywhere
    settings = {k: cfg[k] for k in sorted(_INFER_KEYS) if k != "output_dir"}
    fileio.save_run_summary(outdir / "run_summary.json", result, settings)
    _write_summaries(outdir, result.final, labels)
    print(f"inference finished in {result.n_steps} steps; outputs in {outdir}")
    return EXIT_OK


def cmd_summarize(cfg) -> int:
    run_dir = Path(_require(cfg, "run_dir"))
    outdir = Path(cfg["output_dir"]) if cfg.get("output_dir") else run_dir
    outdir.mkdir(parents=True, exist_ok=True)
    population, labels = fileio.load_population(run_dir / "population.jsonl")
    _write_summaries(outdir, population, labels)
    print(f"summaries rebuilt in {outdir}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cgsmc",
        description="Bayesian chain-graph structure learning via tempered SMC",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("simulate", "infer", "summarize"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", type=str, default=None, help="flat key=value file")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--workers", type=int, default=None)
        sp.add_argument("--output", type=str, default=None, help="output directory")
        if name == "summarize":
            sp.add_argument("run_dir", nargs="?", default=None,
                            help="directory holding population.jsonl")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            return cmd_simulate(resolve_config(args, _SIMULATE_KEYS))
        if args.command == "infer":
            return cmd_infer(resolve_config(args, _INFER_KEYS))
        cfg = resolve_config(args, _SUMMARIZE_KEYS)
        if args.run_dir is not None:
            cfg["run_dir"] = args.run_dir
        return cmd_summarize(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IngestionError as exc:
        print(f"ingestion error: {exc}", file=sys.stderr)
        return EXIT_INGEST
    except InitializationError as exc:
        print(f"initialization failed: {exc}", file=sys.stderr)
        return EXIT_INIT
    except ScheduleCapError as exc:
        print(f"schedule cap exceeded: {exc}", file=sys.stderr)
        return EXIT_SCHEDULE


if __name__ == "__main__":
    sys.exit(main())
