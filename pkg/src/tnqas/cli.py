"""Command-line interface.

Subcommands mirror the pipeline stages:
  dmrg      step 1: ground-state MPS for the problem Hamiltonian
  fit       step 2: MPS -> brickwork circuit -> transpiled warm start
  train     step 3: RL architecture search (ddqn | random agent)
  baseline  random | sa baselines
  report    summarize records into summary.csv / summary.txt

Flags override config-file values; the config file uses flat key paths
(e.g. "env.variant = fixed"), one per line.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import harness
from .harness import (
    RunConfig,
    apply_config_line,
    config_from_text,
    read_records,
    report,
    run_pipeline,
    run_sa_baseline,
    run_training,
    summarize,
    write_summary,
)


def _base_parser(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="flat key-path config file")
    sub.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                     help="override one config key (repeatable)")
    sub.add_argument("--out", default="run", help="run directory")
    sub.add_argument("--problem", choices=("tfim", "heisenberg", "file"))
    sub.add_argument("--n", type=int, help="qubit count for builtin models")
    sub.add_argument("--h-field", type=float, help="TFIM field strength")
    sub.add_argument("--hamiltonian-file", help="path for problem=file")
    sub.add_argument("--chi", type=int, help="DMRG bond cap")
    sub.add_argument("--seed", type=int, action="append", dest="seeds",
                     help="training seed (repeatable)")
    sub.add_argument("--variant", choices=("vanilla", "fixed", "trainable", "structure"))
    sub.add_argument("--backend", choices=("exact", "shots", "noisy"))
    sub.add_argument("--episodes", type=int)


def _build_config(args) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        cfg = config_from_text(Path(args.config).read_text(encoding="utf-8"), cfg)
    for item in args.set:
        if "=" not in item:
            raise SystemExit(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        apply_config_line(cfg, key, value)
    if args.problem:
        cfg.problem.kind = args.problem
    if args.n is not None:
        cfg.problem.n = args.n
    if args.h_field is not None:
        cfg.problem.h_field = args.h_field
    if getattr(args, "hamiltonian_file", None):
        cfg.problem.kind = "file"
        cfg.problem.path = args.hamiltonian_file
    if args.chi is not None:
        cfg.pipeline.chi = args.chi
    if args.seeds:
        cfg.seeds = tuple(args.seeds)
    if args.variant:
        cfg.env.variant = args.variant
    if args.backend:
        cfg.env.backend = args.backend
    if args.episodes is not None:
        cfg.episodes = args.episodes
    cfg.outdir = args.out
    return cfg


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="tnqas", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    subs = parser.add_subparsers(dest="command", required=True)
    for name in ("dmrg", "fit", "train", "baseline", "report"):
        sub = subs.add_parser(name)
        _base_parser(sub)
        if name == "baseline":
            sub.add_argument("--kind", choices=("random", "sa"), default="random")
    args = parser.parse_args(argv)
    cfg = _build_config(args)
    out = Path(cfg.outdir)

    if args.command == "dmrg":
        artifacts = run_pipeline(cfg, out)
        print(f"dmrg energy: {artifacts.dmrg_energy!r} (converged: {artifacts.dmrg_converged})")
        if artifacts.warm_residual is not None:
            print(f"warm-start residual vs exact: {artifacts.warm_residual!r}")
        return 0

    if args.command == "fit":
        artifacts = run_pipeline(cfg, out)
        print(f"fit overlap: {artifacts.fit_loss!r}")
        cnot, rot = artifacts.warmstart.circuit.count_gates()
        print(f"warm-start circuit: {cnot} CNOT, {rot} rotations, "
              f"depth {artifacts.warmstart.circuit.depth()}")
        print(f"written: {out / 'warmstart.circuit'}")
        return 0

    if args.command == "train":
        if cfg.env.variant != "vanilla" and not (out / "warmstart.circuit").exists():
            run_pipeline(cfg, out)
        records = run_training(cfg, out)
        summary = summarize(records, cfg.method_label())
        print(write_summary([summary], out))
        return 0

    if args.command == "baseline":
        if args.kind == "sa":
            results = run_sa_baseline(cfg, out)
            for seed, r in results.items():
                print(f"seed {seed}: best error {r['best_error']:.3e} "
                      f"({r['cnot']} CNOT, {r['rot']} ROT, {r['iterations']} iterations)")
            return 0
        cfg.agent.kind = "random"
        if cfg.env.variant != "vanilla" and not (out / "warmstart.circuit").exists():
            run_pipeline(cfg, out)
        records = run_training(cfg, out)
        summary = summarize(records, cfg.method_label())
        print(write_summary([summary], out))
        return 0

    if args.command == "report":
        records = {}
        for path in sorted(out.glob("records-*.jsonl")):
            seed = int(path.stem.split("-")[1])
            records[seed] = read_records(path)
        summary = summarize(records, cfg.method_label())
        print(write_summary([summary], out))
        return 0

    raise SystemExit(f"unknown command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
