"""Experiment orchestration: pipeline, multi-seed training, records, reports.

Directory layout per run:
  <run>/warmstart.circuit      transpiled warm-start (simulator text format)
  <run>/artifacts.json         pipeline numbers (dmrg energy, fit loss, ...)
  <run>/trace-<seed>.jsonl     one line per env step {episode, t, action, reward, C_t, nfev}
  <run>/records-<seed>.jsonl   one line per episode (resumable checkpoint boundary)
  <run>/checkpoint-<seed>.pkl  full agent/env/rng state after the last complete episode
  <run>/summary.csv            Table-style summary

Seeds run in parallel worker processes when TNQAS_WORKERS > 1; each worker
owns its env, agent, and RNG streams, so records are bit-identical however
the work is scheduled.
"""
from __future__ import annotations

import dataclasses
import json
import os
import pickle
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from ._rng import named_stream
from .agents import DdqnAgent, DdqnConfig, SaConfig, sa_search
from .circuits import Circuit
from .env import EnvConfig, QasEnv, WarmStart
from .kak import transpile_stack
from .optimize import EnergyEvaluator
from .pauli import (
    MAX_DENSE_QUBITS,
    PauliSum,
    build_heisenberg,
    build_tfim,
    exact_ground_energy,
    fake_minimum_energy,
    parse_hamiltonian_file,
)
from .stiefel import BrickworkLayout, FitConfig, fit_mps_to_circuit
from .simulator import run_circuit, zero_state
from .tensornet import DmrgConfig, dmrg_ground_state, mpo_from_pauli_sum, MPS

WORKERS_ENV_VAR = "TNQAS_WORKERS"


@dataclass
class ProblemConfig:
    kind: str = "tfim"          # tfim | heisenberg | file
    n: int = 6
    h_field: float = 0.05
    path: str | None = None

    def build(self) -> PauliSum:
        if self.kind == "tfim":
            return build_tfim(self.n, self.h_field)
        if self.kind == "heisenberg":
            return build_heisenberg(self.n)
        if self.kind == "file":
            if not self.path:
                raise ValueError("problem.kind=file needs problem.path")
            text = Path(self.path).read_text(encoding="utf-8")
            return parse_hamiltonian_file(text)
        raise ValueError(f"unknown problem kind {self.kind!r}")


@dataclass
class PipelineConfig:
    chi: int = 2
    layers: int = 1
    fit_iters: int = 2000
    fit_patience: int = 200
    dmrg_sweeps: int = 20
    dmrg_tol: float = 1e-10


@dataclass
class AgentConfig:
    kind: str = "ddqn"          # ddqn | random | sa
    gamma: float = 0.88
    n_step: int = 5
    eps_floor: float = 0.05
    eps_decay: float = 0.99995
    target_sync: int = 500
    batch_size: int = 1000
    buffer_capacity: int = 20_000
    lr: float = 3e-4
    hidden: tuple[int, ...] = (128, 128, 128)
    # simulated annealing
    sa_t0: float = 1.0
    sa_alpha: float = 0.95
    sa_iters: int = 2000

    def ddqn(self) -> DdqnConfig:
        return DdqnConfig(
            gamma=self.gamma,
            n_step=self.n_step,
            eps_floor=self.eps_floor,
            eps_decay=self.eps_decay,
            target_sync=self.target_sync,
            batch_size=self.batch_size,
            buffer_capacity=self.buffer_capacity,
            lr=self.lr,
            hidden=tuple(self.hidden),
        )


@dataclass
class RunConfig:
    problem: ProblemConfig = field(default_factory=ProblemConfig)
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    env: EnvConfig = field(default_factory=EnvConfig)
    agent: AgentConfig = field(default_factory=AgentConfig)
    seeds: tuple[int, ...] = (0,)
    episodes: int = 100
    wall_budget: float | None = None    # seconds per seed, None = unlimited
    master_seed: int = 1234
    outdir: str = "run"
    label: str | None = None

    def __post_init__(self):
        if not self.seeds:
            raise ValueError("at least one seed required")
        if self.episodes < 0:
            raise ValueError("episode budget must be >= 0")

    def method_label(self) -> str:
        return self.label or f"{self.agent.kind}-{self.env.variant}"


# -- flat key-path config files ------------------------------------------------


def config_to_text(cfg: RunConfig) -> str:
    lines = []

    def emit(prefix, obj):
        for f in dataclasses.fields(obj):
            v = getattr(obj, f.name)
            if dataclasses.is_dataclass(v):
                emit(f"{prefix}{f.name}.", v)
            elif isinstance(v, (tuple, list)):
                lines.append(f"{prefix}{f.name} = {','.join(str(x) for x in v)}")
            else:
                lines.append(f"{prefix}{f.name} = {v}")

    emit("", cfg)
    return "\n".join(lines) + "\n"


def _coerce(text: str, current):
    if isinstance(current, bool):
        return text.lower() in ("1", "true", "yes", "on")
    if isinstance(current, int) and not isinstance(current, bool):
        return int(text)
    if isinstance(current, float):
        return float(text)
    if isinstance(current, (tuple, list)):
        items = [x for x in text.split(",") if x.strip()]
        kind = int if all(_int_like(x) for x in items) else float
        return tuple(kind(x) for x in items)
    if current is None:
        if text in ("None", "none", ""):
            return None
        try:
            return int(text)
        except ValueError:
            try:
                return float(text)
            except ValueError:
                return text
    return text


def _int_like(x: str) -> bool:
    try:
        int(x)
        return True
    except ValueError:
        return False


def apply_config_line(cfg: RunConfig, key: str, value: str) -> None:
    obj = cfg
    parts = key.strip().split(".")
    for part in parts[:-1]:
        obj = getattr(obj, part)
    leaf = parts[-1]
    if not hasattr(obj, leaf):
        raise KeyError(f"unknown config key {key!r}")
    setattr(obj, leaf, _coerce(value.strip(), getattr(obj, leaf)))


def config_from_text(text: str, base: RunConfig | None = None) -> RunConfig:
    cfg = base if base is not None else RunConfig()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value', got {line!r}")
        key, value = line.split("=", 1)
        apply_config_line(cfg, key, value)
    return cfg


# -- pipeline (steps 1 and 2) ---------------------------------------------------


@dataclass
class PipelineArtifacts:
    hamiltonian: PauliSum
    dmrg_energy: float
    dmrg_converged: bool
    fit_loss: float
    warmstart: WarmStart
    exact_energy: float | None
    warm_residual: float | None
    mps: MPS | None = None

    def warm_energy(self) -> float:
        ev = EnergyEvaluator(self.hamiltonian)
        return ev.state_energy(self.warmstart.statevector)


def run_pipeline(cfg: RunConfig, outdir: str | Path | None = None) -> PipelineArtifacts:
    """DMRG, Riemannian fit, transpilation; persists warm-start artifacts."""
    h = cfg.problem.build()
    n = h.n_qubits
    mpo = mpo_from_pauli_sum(h)
    dmrg_cfg = DmrgConfig(
        chi_max=cfg.pipeline.chi, max_sweeps=cfg.pipeline.dmrg_sweeps, tol=cfg.pipeline.dmrg_tol
    )
    dmrg = dmrg_ground_state(mpo, dmrg_cfg, rng=named_stream(cfg.master_seed, "dmrg-init"))
    layout = BrickworkLayout(n, layers=cfg.pipeline.layers)
    fit = fit_mps_to_circuit(
        dmrg.mps,
        layout,
        FitConfig(max_iters=cfg.pipeline.fit_iters, patience=cfg.pipeline.fit_patience),
        rng=named_stream(cfg.master_seed, "fit-init"),
    )
    circuit = transpile_stack(fit.stack)
    statevector = run_circuit(zero_state(n), circuit)
    exact = None
    residual = None
    if n <= MAX_DENSE_QUBITS:
        exact = exact_ground_energy(h)[0]
        residual = dmrg.energy - exact
    artifacts = PipelineArtifacts(
        hamiltonian=h,
        dmrg_energy=dmrg.energy,
        dmrg_converged=dmrg.converged,
        fit_loss=fit.loss,
        warmstart=WarmStart(circuit=circuit, statevector=statevector),
        exact_energy=exact,
        warm_residual=residual,
        mps=dmrg.mps,
    )
    if outdir is not None:
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        comments = (
            "warmstart",
            f"fit overlap {fit.loss!r}",
            f"dmrg energy {dmrg.energy!r}",
        )
        (outdir / "warmstart.circuit").write_text(circuit.to_text(comments), encoding="utf-8")
        meta = {
            "dmrg_energy": dmrg.energy,
            "dmrg_converged": dmrg.converged,
            "dmrg_sweep_energies": dmrg.sweep_energies,
            "fit_loss": fit.loss,
            "exact_energy": exact,
            "warm_residual": residual,
            "n_qubits": n,
        }
        (outdir / "artifacts.json").write_text(json.dumps(meta, indent=2), encoding="utf-8")
        np.savez(outdir / "warmstart_state.npz", statevector=statevector)
    return artifacts


def load_artifacts(cfg: RunConfig, outdir: str | Path) -> PipelineArtifacts:
    outdir = Path(outdir)
    h = cfg.problem.build()
    circuit = Circuit.from_text((outdir / "warmstart.circuit").read_text(encoding="utf-8"))
    meta = json.loads((outdir / "artifacts.json").read_text(encoding="utf-8"))
    statevector = np.load(outdir / "warmstart_state.npz")["statevector"]
    return PipelineArtifacts(
        hamiltonian=h,
        dmrg_energy=meta["dmrg_energy"],
        dmrg_converged=meta["dmrg_converged"],
        fit_loss=meta["fit_loss"],
        warmstart=WarmStart(circuit=circuit, statevector=statevector),
        exact_energy=meta["exact_energy"],
        warm_residual=meta["warm_residual"],
    )


# -- training (step 3) -----------------------------------------------------------


def _make_env(cfg: RunConfig, artifacts: PipelineArtifacts | None, seed: int) -> QasEnv:
    h = artifacts.hamiltonian if artifacts is not None else cfg.problem.build()
    warm = artifacts.warmstart if artifacts is not None else None
    return QasEnv(
        h,
        cfg.env,
        warmstart=warm if cfg.env.variant != "vanilla" else None,
        rng=named_stream(seed, "env"),
        shot_rng=named_stream(seed, "shots"),
    )


def _episode_with_agent(env: QasEnv, agent: DdqnAgent, episode_idx: int):
    obs = env.reset().flat()
    steps = []
    total_reward = 0.0
    nfev = env.reset_nfev
    best_energy = env.c_t
    best_counts = _counts_snapshot(env)
    steps.append(
        {"episode": episode_idx, "t": 0, "action": -1, "reward": 0.0, "C_t": env.c_t, "nfev": env.reset_nfev}
    )
    while True:
        mask = env.legal_actions()
        action = agent.act(obs, mask)
        next_obs_t, reward, done, info = env.step(action)
        next_obs = next_obs_t.flat()
        agent.observe(obs, action, reward, next_obs, done, env.legal_actions())
        agent.train_tick()
        steps.append(
            {
                "episode": episode_idx,
                "t": env.t,
                "action": action,
                "reward": reward,
                "C_t": info["energy"],
                "nfev": info["nfev"],
            }
        )
        total_reward += reward
        nfev += info["nfev"]
        if info["energy"] < best_energy:
            best_energy = info["energy"]
            best_counts = _counts_snapshot(env)
        obs = next_obs
        if done:
            success = info["success"]
            break
    env.end_episode()
    return {
        "success": bool(success),
        "best_energy": best_energy,
        "reward": total_reward,
        "nfev": nfev,
        "n_steps": env.t,
        **best_counts,
    }, steps


def _episode_random(env: QasEnv, rng: np.random.Generator, episode_idx: int):
    obs = env.reset()
    steps = [
        {"episode": episode_idx, "t": 0, "action": -1, "reward": 0.0, "C_t": env.c_t, "nfev": env.reset_nfev}
    ]
    total_reward = 0.0
    nfev = env.reset_nfev
    best_energy = env.c_t
    best_counts = _counts_snapshot(env)
    while True:
        mask = env.legal_actions()
        action = int(rng.choice(np.flatnonzero(mask)))
        _, reward, done, info = env.step(action)
        steps.append(
            {
                "episode": episode_idx,
                "t": env.t,
                "action": action,
                "reward": reward,
                "C_t": info["energy"],
                "nfev": info["nfev"],
            }
        )
        total_reward += reward
        nfev += info["nfev"]
        if info["energy"] < best_energy:
            best_energy = info["energy"]
            best_counts = _counts_snapshot(env)
        if done:
            success = info["success"]
            break
    env.end_episode()
    return {
        "success": bool(success),
        "best_energy": best_energy,
        "reward": total_reward,
        "nfev": nfev,
        "n_steps": env.t,
        **best_counts,
    }, steps


def _counts_snapshot(env: QasEnv) -> dict:
    reported = env.agent_circuit() if env.cfg.variant in ("vanilla", "fixed") else env.full_circuit()
    cnot, rot = reported.count_gates()
    return {
        "depth": reported.depth(),
        "cnot": cnot,
        "rot": rot,
        "circuit": reported.to_text(),
    }


def _checkpoint_path(outdir: Path, seed: int) -> Path:
    return outdir / f"checkpoint-{seed}.pkl"


def _records_path(outdir: Path, seed: int) -> Path:
    return outdir / f"records-{seed}.jsonl"


def _trace_path(outdir: Path, seed: int) -> Path:
    return outdir / f"trace-{seed}.jsonl"


def read_records(path: Path) -> list[dict]:
    """Complete, parseable record lines; corrupt lines are skipped with a warning."""
    records = []
    if not path.exists():
        return records
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError:
                print(f"warning: skipping corrupt record line {lineno} in {path}")
    return records


def train_seed(cfg: RunConfig, seed: int, outdir: str | Path) -> list[dict]:
    """Train one seed with per-episode flushing and exact-resume checkpoints."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    artifacts = None
    if cfg.env.variant != "vanilla":
        artifacts = load_artifacts(cfg, outdir)
    env = _make_env(cfg, artifacts, seed)

    agent = None
    baseline_rng = None
    if cfg.agent.kind == "ddqn":
        agent = DdqnAgent(env.obs_size(), env.space.size, cfg.agent.ddqn(), named_stream(seed, "agent-init"))
    elif cfg.agent.kind == "random":
        baseline_rng = named_stream(seed, "agent-init")
    else:
        raise ValueError(f"train_seed handles ddqn|random, not {cfg.agent.kind!r}")

    records_path = _records_path(outdir, seed)
    trace_path = _trace_path(outdir, seed)
    ckpt_path = _checkpoint_path(outdir, seed)
    start_episode = 0
    records = []
    if ckpt_path.exists() and records_path.exists():
        with open(ckpt_path, "rb") as fh:
            ckpt = pickle.load(fh)
        existing = read_records(records_path)[: ckpt["episode"]]
        if len(existing) == ckpt["episode"]:
            start_episode = ckpt["episode"]
            records = existing
            env.curriculum = ckpt["curriculum"]
            env.rng.bit_generator.state = ckpt["env_rng"]
            env.shot_rng.bit_generator.state = ckpt["shot_rng"]
            if agent is not None:
                agent.load_state_dict(ckpt["agent"])
            else:
                baseline_rng.bit_generator.state = ckpt["baseline_rng"]
            _truncate_jsonl(records_path, ckpt["episode"])
        else:
            start_episode = 0
            records = []
    if start_episode == 0:
        for p in (records_path, trace_path, ckpt_path):
            if p.exists():
                p.unlink()

    started = time.monotonic()
    rec_fh = open(records_path, "a", encoding="utf-8")
    trace_fh = open(trace_path, "a", encoding="utf-8")
    try:
        for episode in range(start_episode, cfg.episodes):
            if cfg.wall_budget is not None and time.monotonic() - started > cfg.wall_budget:
                break
            t0 = time.monotonic()
            if agent is not None:
                outcome, steps = _episode_with_agent(env, agent, episode)
            else:
                outcome, steps = _episode_random(env, baseline_rng, episode)
            for s in steps:
                trace_fh.write(json.dumps(s) + "\n")
            wall = time.monotonic() - t0
            record = {
                "episode": episode,
                "seed": seed,
                "success": outcome["success"],
                "best_energy": outcome["best_energy"],
                "best_error": (outcome["best_energy"] - env.e_ref),
                "depth": outcome["depth"],
                "cnot": outcome["cnot"],
                "rot": outcome["rot"],
                "nfev": outcome["nfev"],
                "reward": outcome["reward"],
                "n_steps": outcome["n_steps"],
                "wall_time": wall,
                "circuit": outcome["circuit"],
            }
            records.append(record)
            rec_fh.write(json.dumps(record) + "\n")
            rec_fh.flush()
            trace_fh.flush()
            ckpt = {
                "version": 1,
                "episode": episode + 1,
                "curriculum": env.curriculum,
                "env_rng": env.rng.bit_generator.state,
                "shot_rng": env.shot_rng.bit_generator.state,
            }
            if agent is not None:
                ckpt["agent"] = agent.state_dict()
            else:
                ckpt["baseline_rng"] = baseline_rng.bit_generator.state
            with open(ckpt_path, "wb") as fh:
                pickle.dump(ckpt, fh)
    finally:
        rec_fh.close()
        trace_fh.close()
    return records


def _truncate_jsonl(path: Path, keep_lines: int) -> None:
    lines = path.read_text(encoding="utf-8").splitlines()
    good = []
    for line in lines:
        if len(good) >= keep_lines:
            break
        if line.strip():
            try:
                json.loads(line)
                good.append(line)
            except json.JSONDecodeError:
                continue
    path.write_text("\n".join(good) + ("\n" if good else ""), encoding="utf-8")


def _train_seed_entry(args):
    cfg_text, seed, outdir = args
    cfg = config_from_text(cfg_text)
    return seed, train_seed(cfg, seed, outdir)


def run_training(cfg: RunConfig, outdir: str | Path) -> dict[int, list[dict]]:
    """All seeds; parallel when TNQAS_WORKERS > 1."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    workers = int(os.environ.get(WORKERS_ENV_VAR, "1"))
    if workers > 1 and len(cfg.seeds) > 1:
        cfg_text = config_to_text(cfg)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = pool.map(
                _train_seed_entry, [(cfg_text, seed, str(outdir)) for seed in cfg.seeds]
            )
            return {seed: recs for seed, recs in results}
    return {seed: train_seed(cfg, seed, outdir) for seed in cfg.seeds}


# -- baselines --------------------------------------------------------------------


def run_sa_baseline(cfg: RunConfig, outdir: str | Path | None = None) -> dict:
    h = cfg.problem.build()
    sa_cfg = SaConfig(
        t0=cfg.agent.sa_t0,
        alpha=cfg.agent.sa_alpha,
        max_iters=cfg.agent.sa_iters,
        slots=cfg.env.max_steps,
        budget=cfg.env.budget,
    )
    results = {}
    e_ref = exact_ground_energy(h)[0] if h.n_qubits <= MAX_DENSE_QUBITS else fake_minimum_energy(h)
    for seed in cfg.seeds:
        circuit, energy, info = sa_search(h, sa_cfg, named_stream(seed, "agent-init"))
        cnot, rot = circuit.count_gates()
        results[seed] = {
            "best_energy": energy,
            "best_error": energy - e_ref,
            "depth": circuit.depth(),
            "cnot": cnot,
            "rot": rot,
            "nfev": info["nfev"],
            "iterations": info["iterations"],
            "circuit": circuit.to_text(),
        }
    if outdir is not None:
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "sa-baseline.json").write_text(json.dumps(results, indent=2), encoding="utf-8")
    return results


# -- summaries --------------------------------------------------------------------


@dataclass
class RunSummary:
    method: str
    empty: bool = False
    per_seed: dict = field(default_factory=dict)
    error_mean: float | None = None
    error_std: float | None = None
    depth: float | None = None
    cnot: float | None = None
    rot: float | None = None
    success_prob: float | None = None
    min_gates_to_accuracy: int | None = None
    total_nfev: int = 0


def summarize(records_by_seed: dict[int, list[dict]], method: str = "run") -> RunSummary:
    """Best-error episode per seed; success probability over all episodes."""
    all_records = [r for recs in records_by_seed.values() for r in recs]
    if not all_records:
        return RunSummary(method=method, empty=True)
    per_seed = {}
    for seed, recs in records_by_seed.items():
        if not recs:
            continue
        best = min(recs, key=lambda r: r["best_error"])
        per_seed[seed] = {
            "best_error": best["best_error"],
            "depth": best["depth"],
            "cnot": best["cnot"],
            "rot": best["rot"],
            "episode": best["episode"],
            "circuit": best.get("circuit"),
            "episodes": len(recs),
            "successes": sum(1 for r in recs if r["success"]),
            "first_success": next((r["episode"] for r in recs if r["success"]), None),
        }
    errors = np.array([s["best_error"] for s in per_seed.values()])
    successes = sum(1 for r in all_records if r["success"])
    gates_success = [r["cnot"] + r["rot"] for r in all_records if r["success"]]
    return RunSummary(
        method=method,
        per_seed=per_seed,
        error_mean=float(np.mean(errors)),
        error_std=float(np.std(errors)),
        depth=float(np.mean([s["depth"] for s in per_seed.values()])),
        cnot=float(np.mean([s["cnot"] for s in per_seed.values()])),
        rot=float(np.mean([s["rot"] for s in per_seed.values()])),
        success_prob=successes / len(all_records),
        min_gates_to_accuracy=min(gates_success) if gates_success else None,
        total_nfev=int(sum(r["nfev"] for r in all_records)),
    )


SUMMARY_COLUMNS = ("Method", "Error", "Depth", "CNOT", "ROT", "SuccessProb")


def report(summaries: list[RunSummary]) -> tuple[str, str]:
    """(pretty text table, CSV text) with identical fields."""
    rows = []
    for s in summaries:
        if s.empty:
            rows.append((s.method, "EMPTY", "EMPTY", "EMPTY", "EMPTY", "EMPTY"))
        else:
            rows.append(
                (
                    s.method,
                    f"{s.error_mean:.3e}",
                    f"{s.depth:.1f}",
                    f"{s.cnot:.1f}",
                    f"{s.rot:.1f}",
                    f"{s.success_prob:.4f}",
                )
            )
    widths = [
        max(len(SUMMARY_COLUMNS[c]), max((len(r[c]) for r in rows), default=0))
        for c in range(len(SUMMARY_COLUMNS))
    ]
    header = "  ".join(name.ljust(w) for name, w in zip(SUMMARY_COLUMNS, widths))
    sep = "-" * len(header)
    body = [
        "  ".join(str(cell).ljust(w) for cell, w in zip(row, widths)) for row in rows
    ]
    text = "\n".join([header, sep, *body]) + "\n"
    csv_lines = [",".join(SUMMARY_COLUMNS)]
    csv_lines += [",".join(str(c) for c in row) for row in rows]
    csv = "\n".join(csv_lines) + "\n"
    return text, csv


def write_summary(summaries: list[RunSummary], outdir: str | Path) -> str:
    text, csv = report(summaries)
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "summary.csv").write_text(csv, encoding="utf-8")
    (outdir / "summary.txt").write_text(text, encoding="utf-8")
    return text


# -- sklearn-style facade -----------------------------------------------------------


class GroundStateSearch(BaseEstimator):
    """Full pipeline + architecture search behind a fit() call.

    After fit: best_error_, best_circuit_, summary_, artifacts_.
    """

    def __init__(
        self,
        variant="fixed",
        agent="ddqn",
        chi=2,
        layers=1,
        episodes=50,
        max_steps=20,
        xi_init=1e-2,
        budget=500,
        optimizer="adam",
        seed=0,
        workdir=None,
    ):
        self.variant = variant
        self.agent = agent
        self.chi = chi
        self.layers = layers
        self.episodes = episodes
        self.max_steps = max_steps
        self.xi_init = xi_init
        self.budget = budget
        self.optimizer = optimizer
        self.seed = seed
        self.workdir = workdir

    def fit(self, hamiltonian: PauliSum, y=None):
        import tempfile

        cfg = RunConfig(
            env=EnvConfig(
                variant=self.variant,
                max_steps=self.max_steps,
                xi_init=self.xi_init,
                budget=self.budget,
                optimizer=self.optimizer,
            ),
            agent=AgentConfig(kind=self.agent),
            seeds=(self.seed,),
            episodes=self.episodes,
            master_seed=self.seed,
        )
        cfg.pipeline.chi = self.chi
        cfg.pipeline.layers = self.layers
        with tempfile.TemporaryDirectory() as tmp:
            outdir = Path(self.workdir) if self.workdir else Path(tmp)
            outdir.mkdir(parents=True, exist_ok=True)
            self.artifacts_ = _pipeline_for_hamiltonian(cfg, hamiltonian, outdir)
            records = {self.seed: train_seed_with_hamiltonian(cfg, hamiltonian, self.seed, outdir)}
        self.summary_ = summarize(records, cfg.method_label())
        best = self.summary_.per_seed[self.seed]
        self.best_error_ = best["best_error"]
        self.best_circuit_ = Circuit.from_text(best["circuit"]) if best["circuit"] else None
        return self

    def predict(self, hamiltonian: PauliSum = None) -> float:
        if not hasattr(self, "best_error_"):
            raise NotFittedError("GroundStateSearch is not fitted")
        return self.best_error_


def _pipeline_for_hamiltonian(cfg: RunConfig, h: PauliSum, outdir: Path) -> PipelineArtifacts:
    """run_pipeline for an in-memory PauliSum (no problem-config round trip)."""
    from .pauli import serialize_hamiltonian

    path = outdir / "problem.ham"
    path.write_text(serialize_hamiltonian(h), encoding="utf-8")
    cfg.problem = ProblemConfig(kind="file", path=str(path))
    return run_pipeline(cfg, outdir)


def train_seed_with_hamiltonian(cfg: RunConfig, h: PauliSum, seed: int, outdir: Path):
    return train_seed(cfg, seed, outdir)
