"""Ridge readout, NMSE and linear memory capacity."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

log = logging.getLogger(__name__)

DEFAULT_RIDGE = 1e-11


@dataclass(frozen=True)
class Standardizer:
    mean: np.ndarray
    std: np.ndarray

    def apply(self, features: np.ndarray) -> np.ndarray:
        return (np.asarray(features, dtype=float) - self.mean) / self.std


def standardize_fit(train_features: np.ndarray) -> Standardizer:
    x = np.asarray(train_features, dtype=float)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValueError("standardization needs a non-empty 2-D feature matrix")
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    std = np.where(std > 0, std, 1.0)
    return Standardizer(mean, std)


def standardize_apply(features: np.ndarray, stats: Standardizer) -> np.ndarray:
    return stats.apply(features)


@dataclass(frozen=True)
class ReadoutModel:
    stats: Standardizer
    weights: np.ndarray  # (d,) or (d, k) for several targets
    bias: np.ndarray | float
    beta: float = DEFAULT_RIDGE

    def predict(self, features: np.ndarray) -> np.ndarray:
        return self.stats.apply(features) @ self.weights + self.bias


def ridge_solve(x: np.ndarray, y: np.ndarray, beta: float = DEFAULT_RIDGE):
    """Weights and intercept for ``min |y - b - X W|^2 + beta |W|^2`` (intercept unpenalized).

    ``y`` may be 1-D or ``(T, k)``. Solved through the SVD of ``X``:
    ``W = V diag(s / (s^2 + beta)) U^T (y - mean(y))``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 2 or x.shape[0] == 0 or y.shape[0] != x.shape[0]:
        raise ValueError(f"incompatible shapes X{x.shape}, y{y.shape}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise FloatingPointError("non-finite entries in ridge inputs")
    bias = y.mean(axis=0)
    u, s, vt = np.linalg.svd(x, full_matrices=False)
    filt = s / (s * s + beta)
    w = vt.T @ (filt[:, None] * (u.T @ (y - bias).reshape(len(y), -1)))
    return (w[:, 0] if y.ndim == 1 else w), bias


def ridge_fit(x: np.ndarray, y: np.ndarray, beta: float = DEFAULT_RIDGE,
              stats: Optional[Standardizer] = None) -> ReadoutModel:
    """Fit on raw features; standardization statistics come from ``x`` unless given."""
    stats = stats or standardize_fit(x)
    w, b = ridge_solve(stats.apply(x), y, beta)
    return ReadoutModel(stats, w, b, beta)


def nmse(predictions: Sequence[float], targets: Sequence[float]) -> float:
    """Mean squared error over the population variance of the targets."""
    yhat = np.asarray(predictions, dtype=float)
    y = np.asarray(targets, dtype=float)
    if yhat.shape != y.shape or y.shape[0] < 2:
        raise ValueError("nmse needs equal-length series with at least two samples")
    var = y.var(axis=0)
    if np.any(var == 0):
        raise ValueError("degenerate target: zero variance over the evaluation window")
    return np.mean((yhat - y) ** 2, axis=0) / var


@dataclass(frozen=True)
class Windows:
    washout: int = 200
    train: int = 1000
    test: int = 1000

    @property
    def train_slice(self) -> slice:
        return slice(self.washout, self.washout + self.train)

    @property
    def test_slice(self) -> slice:
        return slice(self.washout + self.train, self.washout + self.train + self.test)


def fit_and_score(features: np.ndarray, targets: np.ndarray, windows: Windows,
                  beta: float = DEFAULT_RIDGE) -> np.ndarray:
    """Test-window NMSE of a readout trained on the training window.

    ``targets`` is aligned with ``features`` row by row; one column per task.
    """
    tr, te = windows.train_slice, windows.test_slice
    model = ridge_fit(features[tr], targets[tr], beta)
    return nmse(model.predict(features[te]), targets[te])


@dataclass(frozen=True)
class CapacityProfile:
    raw: np.ndarray  # MC(tau) for tau = 1..max_delay, unclipped

    @property
    def clipped(self) -> np.ndarray:
        return np.clip(self.raw, 0.0, 1.0)

    @property
    def total(self) -> float:
        return float(self.clipped.sum())

    @property
    def delays(self) -> np.ndarray:
        return np.arange(1, len(self.raw) + 1)


def delayed_targets(drive: np.ndarray, max_delay: int) -> np.ndarray:
    """Column tau-1 holds ``s_{k - tau}`` (NaN before the series starts)."""
    drive = np.asarray(drive, dtype=float)
    out = np.full((len(drive), max_delay), np.nan)
    for tau in range(1, max_delay + 1):
        out[tau:, tau - 1] = drive[:-tau]
    return out


def memory_capacity(features: np.ndarray, drive: np.ndarray, windows: Windows = Windows(),
                    max_delay: int = 25, beta: float = DEFAULT_RIDGE) -> CapacityProfile:
    if windows.washout < max_delay:
        raise ValueError("washout must cover the largest delay")
    if len(features) < windows.washout + windows.train + windows.test:
        raise ValueError("trace shorter than washout + train + test")
    mc = 1.0 - fit_and_score(features, delayed_targets(drive, max_delay), windows, beta)
    if np.any(mc < 0):
        log.debug("negative raw capacities at delays %s", np.flatnonzero(mc < 0) + 1)
    return CapacityProfile(mc)
