"""Closed-loop photonic reservoir.

One step: encode ``x_k`` into the two input MZIs, program the Galton wedge
from the previous coincidence vector through the random feedback map, pass
one photon per central-block mode through the mesh, and read out the next
coincidence vector (exact or shot-sampled). In finite-shot mode the noisy
estimate is both the emitted feature row and the next feedback input.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .detection import LossModel, ShotSampler, GAUSSIAN_SHOT_THRESHOLD, pair_labels
from .fock import distribution_from_columns, enumerate_basis
from .mesh import (MeshLayout, MeshParams, MziParams, Role, apply_mzis, build_default_layout,
                   compose_mesh, sample_static_params)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Seeds:
    mesh: int = 0
    feedback: int = 1
    drive: int = 2
    shots: int = 3


@dataclass(frozen=True)
class ReservoirConfig:
    modes: int = 16
    photons: int = 4
    alpha_in: float = 0.001
    alpha_fb: float = 2.2
    eta_eff: float = 1.0
    shots: Optional[int] = None  # None: exact expectation values
    washout: int = 200
    train_len: int = 1000
    test_len: int = 1000
    seeds: Seeds = field(default_factory=Seeds)
    gaussian_threshold: Optional[int] = GAUSSIAN_SHOT_THRESHOLD

    @property
    def total_steps(self) -> int:
        return self.washout + self.train_len + self.test_len

    @property
    def n_features(self) -> int:
        return math.comb(self.modes, 2)


@dataclass(frozen=True)
class FeedbackMap:
    """Fixed Gaussian matrix ``(2 R_fb, d)`` with entries of variance ``1/d``."""

    matrix: np.ndarray
    alpha_fb: float

    @classmethod
    def sample(cls, n_wedge: int, n_features: int, alpha_fb: float,
               rng: np.random.Generator) -> "FeedbackMap":
        m = rng.normal(0.0, 1.0 / math.sqrt(n_features), size=(2 * n_wedge, n_features))
        return cls(m, alpha_fb)

    @property
    def n_wedge(self) -> int:
        return self.matrix.shape[0] // 2

    def amplitudes(self, c_prev: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Wedge (theta, phi) arrays: ``a = pi/4 + alpha h``, theta-half first, ``phi = 4 a``."""
        c_prev = np.asarray(c_prev, dtype=float)
        if c_prev.shape != (self.matrix.shape[1],):
            raise ValueError(f"feedback input has shape {c_prev.shape}, "
                             f"expected ({self.matrix.shape[1]},)")
        a = math.pi / 4 + self.alpha_fb * (self.matrix @ c_prev)
        r = self.n_wedge
        return a[:r], 4.0 * a[r:]


def encode_input(x: float, alpha_in: float) -> tuple[MziParams, MziParams]:
    """Push-pull input MZIs around the balanced point."""
    if not 0.0 <= x <= 1.0:
        log.debug("input %r lies outside [0, 1]", x)
    return (MziParams(math.pi / 4 + alpha_in * x, 0.0),
            MziParams(math.pi / 4 - alpha_in * x, 0.0))


def feedback_params(c_prev: np.ndarray, fmap: FeedbackMap, layout: MeshLayout) -> MeshParams:
    """Wedge parameters from the previous coincidence vector, assigned in layout order."""
    wedge = layout.indices(Role.WEDGE)
    if len(wedge) != fmap.n_wedge:
        raise ValueError(f"feedback map drives {fmap.n_wedge} MZIs, layout has {len(wedge)}")
    theta, phi = fmap.amplitudes(c_prev)
    return {i: MziParams(float(t), float(p)) for i, t, p in zip(wedge, theta, phi)}


@dataclass
class RunTrace:
    features: np.ndarray  # (T, d)
    inputs: np.ndarray  # (T,)
    modes: int

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "x"] + [f"C_{i}_{j}" for i, j in pair_labels(self.modes)])
        for k, (x, row) in enumerate(zip(self.inputs, self.features), start=1):
            w.writerow([k, repr(float(x))] + [repr(float(v)) for v in row])
        return buf.getvalue()


class Reservoir:
    """A single realization: fixed mesh, fixed static settings, fixed feedback map."""

    def __init__(self, config: ReservoirConfig, layout: Optional[MeshLayout] = None,
                 static_params: Optional[MeshParams] = None,
                 fmap: Optional[FeedbackMap] = None):
        self.config = config
        self.layout = layout or build_default_layout(config.modes, config.photons)
        if self.layout.modes != config.modes:
            raise ValueError("layout and config disagree on the mode count")
        if config.photons != len(self.layout.input_modes):
            raise ValueError(f"one photon per central-block mode needs N="
                             f"{len(self.layout.input_modes)}, got N={config.photons}")
        self.static_params = (static_params if static_params is not None else
                              sample_static_params(self.layout,
                                                   np.random.default_rng(config.seeds.mesh)))
        self.fmap = fmap or FeedbackMap.sample(self.layout.n_wedge, config.n_features,
                                               config.alpha_fb,
                                               np.random.default_rng(config.seeds.feedback))
        self.basis = enumerate_basis(config.modes, config.photons)
        self.loss = LossModel(config.eta_eff)
        self.sampler = ShotSampler(self.basis, self.loss, config.gaussian_threshold)

        lay = self.layout
        self._inputs = lay.indices(Role.INPUT)
        self._wedge = lay.indices(Role.WEDGE)
        self._in_cols = [m - 1 for m in lay.input_modes]
        depth = lay.wedge_depth
        self._tail = compose_mesh(lay, self.static_params, (depth + 1, lay.layers))
        self._head_order = sorted((i for i, m in enumerate(lay.mzis)
                                   if m.layer <= depth and m.role is not Role.UNUSED),
                                  key=lambda i: lay.mzis[i].layer)

    @property
    def input_state(self) -> np.ndarray:
        s = np.zeros(self.config.modes, dtype=np.int64)
        s[self._in_cols] = 1
        return s

    def mesh_params(self, c_prev: np.ndarray, x: float) -> MeshParams:
        params = dict(self.static_params)
        for idx, p in zip(self._inputs, encode_input(x, self.config.alpha_in)):
            params[idx] = p
        params.update(feedback_params(c_prev, self.fmap, self.layout))
        return params

    def unitary(self, c_prev: np.ndarray, x: float) -> np.ndarray:
        return compose_mesh(self.layout, self.mesh_params(c_prev, x))

    def probabilities(self, c_prev: np.ndarray, x: float) -> np.ndarray:
        """PNR distribution for one step (only the illuminated columns are propagated)."""
        params = self.mesh_params(c_prev, x)
        m = self.config.modes
        cols = np.zeros((m, len(self._in_cols)), dtype=complex)
        cols[self._in_cols, np.arange(len(self._in_cols))] = 1.0
        apply_mzis(cols, self.layout, params, self._head_order)
        return distribution_from_columns(self._tail @ cols, self.basis)

    def step(self, c_prev: np.ndarray, x: float,
             rng: Optional[np.random.Generator] = None) -> np.ndarray:
        probs = self.probabilities(c_prev, x)
        if self.config.shots is None:
            return self.sampler.exact(probs)
        if rng is None:
            raise ValueError("finite-shot mode needs a random generator")
        return self.sampler.sample(probs, self.config.shots, rng)

    def run(self, drive: Sequence[float]) -> RunTrace:
        """Drive the closed loop; the first step sees zero feedback (wedge at its base point)."""
        drive = np.asarray(drive, dtype=float)
        if drive.ndim != 1 or not np.all(np.isfinite(drive)):
            raise ValueError("drive must be a finite 1-D series")
        if drive.size and (drive.min() < 0.0 or drive.max() > 1.0):
            log.warning("drive leaves [0, 1] (range %.3g..%.3g)", drive.min(), drive.max())
        rng = np.random.default_rng(self.config.seeds.shots)
        out = np.empty((len(drive), self.config.n_features))
        c = np.zeros(self.config.n_features)
        for k, x in enumerate(drive):
            c = self.step(c, float(x), rng)
            out[k] = c
        return RunTrace(out, drive.copy(), self.config.modes)


def run(config: ReservoirConfig, drive: Sequence[float]) -> RunTrace:
    if len(drive) != config.total_steps:
        raise ValueError(f"drive has {len(drive)} samples, config expects {config.total_steps}")
    return Reservoir(config).run(drive)
