"""Command-line interface: simulate, fit, bench.

Every flag may also be supplied through ``--config <path.json>`` (keys are
the flag names, hyphens or underscores); explicit flags override the file.
Exits 0 on success and 1 with a diagnostic on validation failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bench import (
    ExperimentConfig,
    config_to_dict,
    run_restarts,
    summary_to_dict,
    write_bench_outputs,
)
from .model import load_dataset, save_dataset
from .pso import SwarmConfig, Topology
from .simulate import generate_dataset, get_setting

_FIT_DEFAULTS = {
    "w": 0.9,
    "c1": 1.5,
    "c2": 0.3,
    "particles": 10,
    "iters": 100,
    "m": 5,
    "restarts": 50,
    "k_min": -20.0,
    "k_max": 20.0,
    "phi_max": 200,
    "seed": 0,
}

_TUNING_FLAGS = [
    ("--w", float, "inertia weight"),
    ("--c1", float, "cognitive coefficient"),
    ("--c2", float, "social coefficient"),
    ("--particles", int, "swarm size"),
    ("--iters", int, "iterations per restart"),
    ("--m", int, "neighborhood size (lbest)"),
    ("--restarts", int, "independent restarts"),
    ("--k-min", float, "lower bound on activation strength"),
    ("--k-max", float, "upper bound on activation strength"),
    ("--phi-max", int, "upper bound on dispersion"),
]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swarmfit",
        description="PSO fitting of the sigmoidal negative-binomial pseudotime model",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="generate one synthetic dataset")
    p_sim.add_argument("--setting", type=int, help="scenario id, 1..6")
    p_sim.add_argument("--seed", type=int, help="dataset seed (u64)")
    p_sim.add_argument("--out", help="output CSV path")
    p_sim.add_argument("--config", help="JSON file supplying any flag")

    p_fit = sub.add_parser("fit", help="multi-restart fit of one dataset")
    p_fit.add_argument("--data", help="input t,y CSV path")
    p_fit.add_argument("--topology", choices=["gbest", "lbest"])
    for flag, ftype, help_text in _TUNING_FLAGS:
        p_fit.add_argument(flag, type=ftype, help=help_text)
    p_fit.add_argument("--seed", type=int, help="master seed for restart derivation")
    p_fit.add_argument("--out", help="output JSON path")
    p_fit.add_argument("--config", help="JSON file supplying any flag")

    p_bench = sub.add_parser("bench", help="full benchmark over built-in settings")
    p_bench.add_argument("--settings", help="comma-separated ids or 'all'")
    p_bench.add_argument("--data-seed", type=int, help="dataset seed (u64)")
    p_bench.add_argument("--seed", type=int, help="master seed for restart derivation")
    p_bench.add_argument("--out-dir", help="output directory")
    for flag, ftype, help_text in _TUNING_FLAGS:
        p_bench.add_argument(flag, type=ftype, help=help_text)
    p_bench.add_argument("--config", help="JSON file supplying any flag")

    return parser


def _merge_options(args: argparse.Namespace, known: set[str]) -> dict:
    """Merge built-in defaults, config-file values, and explicit flags."""
    merged: dict = {}
    if args.config is not None:
        raw = json.loads(Path(args.config).read_text())
        if not isinstance(raw, dict):
            raise ValueError(f"{args.config}: config must be a JSON object")
        for key, value in raw.items():
            norm = key.replace("-", "_")
            if norm not in known:
                raise ValueError(f"{args.config}: unknown config key {key!r}")
            merged[norm] = value
    for key in known:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return merged


def _require(options: dict, *keys: str) -> None:
    missing = [k for k in keys if options.get(k) is None]
    if missing:
        flags = ", ".join("--" + k.replace("_", "-") for k in missing)
        raise ValueError(f"missing required option(s): {flags}")


def _experiment_config(options: dict, master_seed: int, data_seed: int = 0) -> ExperimentConfig:
    opts = dict(_FIT_DEFAULTS)
    opts.update({k: v for k, v in options.items() if v is not None})
    swarm = SwarmConfig(
        w=float(opts["w"]),
        c1=float(opts["c1"]),
        c2=float(opts["c2"]),
        n_particles=int(opts["particles"]),
        m_neighbors=int(opts["m"]),
        n_iterations=int(opts["iters"]),
    )
    return ExperimentConfig(
        restarts=int(opts["restarts"]),
        swarm=swarm,
        k_bounds=(float(opts["k_min"]), float(opts["k_max"])),
        phi_max=int(opts["phi_max"]),
        master_seed=master_seed,
        data_seed=data_seed,
    )


def _parse_settings(raw: str | list) -> list[int]:
    if isinstance(raw, list):
        ids = [int(s) for s in raw]
    elif raw.strip().lower() == "all":
        ids = [1, 2, 3, 4, 5, 6]
    else:
        try:
            ids = [int(part) for part in raw.split(",") if part.strip()]
        except ValueError:
            raise ValueError(f"cannot parse settings list {raw!r}") from None
    if not ids:
        raise ValueError("settings list is empty")
    unique = list(dict.fromkeys(ids))
    for setting_id in unique:
        get_setting(setting_id)
    return unique


def _cmd_simulate(args: argparse.Namespace) -> int:
    options = _merge_options(args, {"setting", "seed", "out"})
    _require(options, "setting", "seed", "out")
    setting = get_setting(int(options["setting"]))
    data = generate_dataset(setting, int(options["seed"]))
    save_dataset(data, options["out"])
    return 0


def _cmd_fit(args: argparse.Namespace) -> int:
    known = {"data", "topology", "seed", "out"} | set(_FIT_DEFAULTS)
    options = _merge_options(args, known)
    _require(options, "data", "topology", "out")
    data = load_dataset(options["data"])
    cfg = _experiment_config(options, master_seed=int(options.get("seed", 0)))
    summary = run_restarts(data, cfg, Topology(options["topology"]))
    doc = {"config": config_to_dict(cfg), "summary": summary_to_dict(summary)}
    Path(options["out"]).write_text(json.dumps(doc, indent=2) + "\n")
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    known = {"settings", "data_seed", "seed", "out_dir"} | set(_FIT_DEFAULTS)
    options = _merge_options(args, known)
    _require(options, "settings", "data_seed", "seed", "out_dir")
    settings = _parse_settings(options["settings"])
    cfg = _experiment_config(
        options,
        master_seed=int(options["seed"]),
        data_seed=int(options["data_seed"]),
    )
    write_bench_outputs(options["out_dir"], cfg, settings)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"simulate": _cmd_simulate, "fit": _cmd_fit, "bench": _cmd_bench}
    try:
        return handlers[args.command](args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"swarmfit: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
