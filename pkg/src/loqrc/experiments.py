"""Experiment sweeps that write their result tables as CSV.

Seeds: every realization ``r`` of an experiment with master seed ``s`` draws
its four sub-seeds from ``SeedSequence(entropy=s, spawn_key=(r, stream))``
with streams mesh=0, feedback=1, drive=2, shots=3. Realization ``r`` thus
sees the same mesh, feedback map and drive at every sweep point, and sweep
points differ only in the swept knob.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .benchmarks import (IsingParams, MgParams, NarmaParams, UnstableSeriesError, iid_drive,
                         ising_series, mackey_glass, narma)
from .mesh import build_default_layout
from .readout import DEFAULT_RIDGE, Windows, fit_and_score, memory_capacity
from .reservoir import Reservoir, ReservoirConfig, Seeds

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
DEFAULT_GAINS = (1.5, 2.2, 2.4, 3.2, 4.6)
STREAMS = {"mesh": 0, "feedback": 1, "drive": 2, "shots": 3}
KINDS = ("memory-capacity", "forecast", "shot-noise")
TASKS = ("mg", "narma", "ising")


def realization_seeds(master: int, realization: int) -> Seeds:
    vals = {}
    for name, stream in STREAMS.items():
        ss = np.random.SeedSequence(entropy=master, spawn_key=(realization, stream))
        vals[name] = int(ss.generate_state(1, dtype=np.uint64)[0])
    return Seeds(**vals)


@dataclass(frozen=True)
class ExperimentSpec:
    kind: str = "memory-capacity"
    reservoir: ReservoirConfig = field(default_factory=ReservoirConfig)
    alpha_fb: Tuple[float, ...] = DEFAULT_GAINS
    alpha_in: Tuple[float, ...] = (0.001,)
    shots: Tuple[int, ...] = (10**2, 10**4, 10**6, 10**8, 10**10, 10**12)
    horizons: Tuple[int, ...] = (1, 2, 3, 5, 7, 10)
    narma_orders: Tuple[int, ...] = (7, 10)
    task: str = "mg"
    realizations: int = 30
    max_delay: int = 25
    ridge: float = DEFAULT_RIDGE
    master_seed: int = 0
    out: str = "results"
    jobs: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.task not in TASKS:
            raise ValueError(f"unknown forecast task {self.task!r}")
        if self.realizations < 1:
            raise ValueError("need at least one realization")
        lists = {"alpha_fb": self.alpha_fb, "alpha_in": self.alpha_in}
        if self.kind == "shot-noise":
            lists["shots"] = self.shots
        if self.kind == "forecast":
            lists["narma_orders" if self.task == "narma" else "horizons"] = (
                self.narma_orders if self.task == "narma" else self.horizons)
        for name, vals in lists.items():
            if len(vals) == 0:
                raise ValueError(f"sweep list {name} is empty")

    @property
    def windows(self) -> Windows:
        r = self.reservoir
        return Windows(r.washout, r.train_len, r.test_len)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d.pop("out")
        d.pop("jobs")
        return d

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


# --- config files -----------------------------------------------------------

def spec_from_dict(d: dict) -> ExperimentSpec:
    """Build a spec from a parsed config document (``schema_version`` 1)."""
    d = dict(d)
    version = d.pop("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ValueError(f"unsupported config schema_version {version}")
    res = dict(d.pop("reservoir", {}))
    seeds = res.pop("seeds", None)
    if seeds is not None:
        res["seeds"] = Seeds(**seeds)
    unknown = set(res) - {f.name for f in dataclasses.fields(ReservoirConfig)}
    if unknown:
        raise ValueError(f"unknown reservoir keys: {sorted(unknown)}")
    d["reservoir"] = ReservoirConfig(**res)
    unknown = set(d) - {f.name for f in dataclasses.fields(ExperimentSpec)}
    if unknown:
        raise ValueError(f"unknown experiment keys: {sorted(unknown)}")
    for key in ("alpha_fb", "alpha_in", "shots", "horizons", "narma_orders"):
        if key in d:
            d[key] = tuple(d[key])
    return ExperimentSpec(**d)


def load_config(path: str | os.PathLike) -> ExperimentSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            return spec_from_dict(json.load(fh))
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc.strerror}") from exc


# --- output -----------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([_fmt(v) for v in row])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc
    return path


def write_metadata(path: Path, spec: ExperimentSpec, extra: Optional[dict] = None) -> Path:
    layout = build_default_layout(spec.reservoir.modes, spec.reservoir.photons)
    meta = {
        "schema_version": SCHEMA_VERSION,
        "library_version": __version__,
        "spec_sha256": spec.digest(),
        "spec": spec.to_dict(),
        "realizations": spec.realizations,
        "seeds": [dataclasses.asdict(realization_seeds(spec.master_seed, r))
                  for r in range(spec.realizations)],
        "layout": {"modes": layout.modes, "layers": layout.layers,
                   "central_block": list(layout.central_block), "R_fb": layout.n_wedge},
    }
    if extra:
        meta.update(extra)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc
    return path


def _map(fn, jobs: Sequence, n_workers: int) -> List:
    if n_workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(fn, jobs))


# --- memory capacity --------------------------------------------------------

def _capacity_job(args) -> Tuple[Tuple, np.ndarray]:
    key, cfg, windows, max_delay, ridge = args
    drive = iid_drive(cfg.total_steps, 0.0, 1.0, np.random.default_rng(cfg.seeds.drive))
    trace = Reservoir(cfg).run(drive)
    return key, memory_capacity(trace.features, drive, windows, max_delay, ridge).raw


def capacity_grid(spec: ExperimentSpec, points: Sequence[Tuple]) -> Dict[Tuple, np.ndarray]:
    """Raw MC(tau) per ``(alpha_in, alpha_fb, shots, realization)``."""
    jobs = []
    for a_in, a_fb, shots in points:
        for r in range(spec.realizations):
            cfg = replace(spec.reservoir, alpha_in=a_in, alpha_fb=a_fb, shots=shots,
                          seeds=realization_seeds(spec.master_seed, r))
            jobs.append(((a_in, a_fb, shots, r), cfg, spec.windows, spec.max_delay, spec.ridge))
    return dict(_map(_capacity_job, jobs, spec.jobs))


def _mean_profiles(raw: Dict[Tuple, np.ndarray], point: Tuple, n: int) -> np.ndarray:
    return np.mean([np.clip(raw[point + (r,)], 0.0, 1.0) for r in range(n)], axis=0)


def run_memory_capacity(spec: ExperimentSpec) -> dict:
    """Mean MC(tau) and MC_tot per feedback gain; writes ``mc_tau.csv`` and ``mc_total.csv``."""
    out = Path(spec.out)
    shots = spec.reservoir.shots
    points = [(a_in, a_fb, shots) for a_in in spec.alpha_in for a_fb in spec.alpha_fb]
    raw = capacity_grid(spec, points)
    several_inputs = len(spec.alpha_in) > 1
    tau_rows, tot_rows = [], []
    for a_in, a_fb, _ in sorted(points):
        mean = _mean_profiles(raw, (a_in, a_fb, shots), spec.realizations)
        totals = [np.clip(raw[(a_in, a_fb, shots, r)], 0, 1).sum()
                  for r in range(spec.realizations)]
        prefix = (a_in,) if several_inputs else ()
        tau_rows += [prefix + (a_fb, tau, mc) for tau, mc in enumerate(mean, start=1)]
        tot_rows.append(prefix + (a_fb, float(np.mean(totals))))
    head = ("alpha_in",) if several_inputs else ()
    paths = {
        "mc_tau": write_csv(out / "mc_tau.csv", head + ("alpha_fb", "tau", "mc_mean"), tau_rows),
        "mc_total": write_csv(out / "mc_total.csv", head + ("alpha_fb", "mc_tot_mean"), tot_rows),
    }
    paths["metadata"] = write_metadata(out / "mc_metadata.json", spec)
    return {"paths": paths, "tau_rows": tau_rows, "total_rows": tot_rows, "raw": raw}


# --- forecasting ------------------------------------------------------------

def _forecast_job(args):
    key, cfg, task, sweep, windows, ridge = args
    if task == "narma":
        drive = iid_drive(cfg.total_steps, 0.0, 0.5, np.random.default_rng(cfg.seeds.drive))
        targets, failed = [], []
        for order in sweep:
            try:
                targets.append(narma(NarmaParams(order=order), drive))
            except UnstableSeriesError:
                targets.append(None)
                failed.append(order)
        features = Reservoir(cfg).run(drive).features
        scores = [fit_and_score(features, y, windows, ridge) if y is not None else np.nan
                  for y in targets]
        return key, np.array(scores, dtype=float), failed
    series = _task_series(task, cfg.total_steps + max(sweep))
    drive = series[:cfg.total_steps]
    features = Reservoir(cfg).run(drive).features
    targets = np.stack([series[h:h + cfg.total_steps] for h in sweep], axis=1)
    return key, np.asarray(fit_and_score(features, targets, windows, ridge)), []


def _task_series(task: str, length: int) -> np.ndarray:
    if task == "mg":
        return mackey_glass(MgParams(), length, 0)[0]
    if task == "ising":
        return ising_series(IsingParams(), length, 0)[0]
    raise ValueError(task)


def run_forecast(spec: ExperimentSpec) -> dict:
    """Mean test NMSE per gain and horizon (MG, Ising) or NARMA order; writes ``forecast_<task>.csv``."""
    out = Path(spec.out)
    sweep = tuple(spec.narma_orders) if spec.task == "narma" else tuple(spec.horizons)
    if spec.task != "narma" and min(sweep) < 0:
        raise ValueError("horizons must be non-negative")
    jobs = []
    for a_in in spec.alpha_in:
        for a_fb in spec.alpha_fb:
            for r in range(spec.realizations):
                cfg = replace(spec.reservoir, alpha_in=a_in, alpha_fb=a_fb,
                              seeds=realization_seeds(spec.master_seed, r))
                jobs.append(((a_in, a_fb, r), cfg, spec.task, sweep, spec.windows, spec.ridge))
    results = _map(_forecast_job, jobs, spec.jobs)
    scores = {key: s for key, s, _ in results}
    failures = {f"{key[0]!r},{key[1]!r},{key[2]}": f for key, _, f in results if f}
    if failures:
        log.warning("%d NARMA instances diverged and were excluded",
                    sum(len(f) for f in failures.values()))
    several_inputs = len(spec.alpha_in) > 1
    rows = []
    for a_in in sorted(spec.alpha_in):
        for a_fb in sorted(spec.alpha_fb):
            stack = np.array([scores[(a_in, a_fb, r)] for r in range(spec.realizations)])
            for col, h in enumerate(sweep):
                vals = stack[:, col]
                mean = float(np.nanmean(vals)) if np.any(np.isfinite(vals)) else float("nan")
                prefix = (a_in,) if several_inputs else ()
                rows.append((spec.task,) + prefix + (a_fb, h, mean))
    head = ("task",) + (("alpha_in",) if several_inputs else ()) + (
        "alpha_fb", "horizon_or_order", "nmse_mean")
    rows.sort(key=lambda r: r[1:-1])
    paths = {"forecast": write_csv(out / f"forecast_{spec.task}.csv", head, rows)}
    paths["metadata"] = write_metadata(
        out / f"forecast_{spec.task}_metadata.json", spec,
        {"failed_instances": failures,
         "failed_count": sum(len(f) for f in failures.values())})
    return {"paths": paths, "rows": rows, "scores": scores, "failures": failures}


# --- finite measurement ensembles -------------------------------------------

def run_shot_noise(spec: ExperimentSpec) -> dict:
    """Mean MC_tot over an ``(alpha_in, alpha_fb, N_m)`` grid plus the exact-mode reference."""
    out = Path(spec.out)
    shot_list = sorted(int(s) for s in spec.shots)
    points = [(a_in, a_fb, s) for a_in in spec.alpha_in for a_fb in spec.alpha_fb
              for s in shot_list + [None]]
    raw = capacity_grid(spec, points)

    def total(a_in, a_fb, s):
        return float(np.mean([np.clip(raw[(a_in, a_fb, s, r)], 0, 1).sum()
                              for r in range(spec.realizations)]))

    rows = []
    for a_in in sorted(spec.alpha_in):
        for a_fb in sorted(spec.alpha_fb):
            exact = total(a_in, a_fb, None)
            rows += [(a_in, a_fb, s, total(a_in, a_fb, s), exact) for s in shot_list]
    paths = {"shot_noise": write_csv(out / "shot_noise.csv",
                                     ("alpha_in", "alpha_fb", "n_m", "mc_tot_mean", "mc_tot_exact"),
                                     rows)}
    paths["metadata"] = write_metadata(out / "shot_noise_metadata.json", spec)
    return {"paths": paths, "rows": rows, "raw": raw}


RUNNERS = {
    "memory-capacity": run_memory_capacity,
    "forecast": run_forecast,
    "shot-noise": run_shot_noise,
}


def run(spec: ExperimentSpec) -> dict:
    return RUNNERS[spec.kind](spec)
