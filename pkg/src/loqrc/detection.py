"""Threshold (click) detection, pairwise coincidence features and shot noise.

Coincidences are computed from the PNR distribution in marginal form,

    C_ij = sum_l p_l * P(click_i | Q_l) * P(click_j | Q_l),

which is exact because clicks in different modes are independent given the
Fock outcome. The full 2^M pattern distribution is kept for small M as a
cross-check.
"""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from .fock import CapacityError, PnrDistribution

MAX_PATTERN_MODES = 20
GAUSSIAN_SHOT_THRESHOLD = 10**6


@dataclass(frozen=True)
class LossModel:
    """Uniform per-mode detection efficiency."""

    eta_eff: float = 1.0

    def __post_init__(self):
        if not (0.0 <= self.eta_eff <= 1.0):
            raise ValueError(f"efficiency must lie in [0, 1], got {self.eta_eff}")


LOSSLESS = LossModel(1.0)


def click_probabilities(q, loss: LossModel = LOSSLESS) -> np.ndarray:
    """Per-mode click probability ``1 - (1 - eta)^q``; works row-wise on stacks of states."""
    if not isinstance(loss, LossModel):
        loss = LossModel(float(loss))
    q = np.asarray(q)
    if loss.eta_eff == 1.0:
        return (q > 0).astype(float)
    return 1.0 - (1.0 - loss.eta_eff) ** q


def pair_labels(modes: int):
    """Lexicographic 1-based mode pairs ``(1,2), (1,3), ..., (M-1,M)``."""
    return list(itertools.combinations(range(1, modes + 1), 2))


@dataclass(frozen=True)
class ThresholdDistribution:
    patterns: np.ndarray  # (2^M, M) in {0, 1}
    probs: np.ndarray

    def as_dict(self) -> Dict[Tuple[int, ...], float]:
        return {tuple(int(b) for b in r): float(p) for r, p in zip(self.patterns, self.probs)}


def threshold_distribution(dist: PnrDistribution, loss: LossModel = LOSSLESS) -> ThresholdDistribution:
    """Probability of every binary click pattern, by coarse-graining the PNR distribution."""
    m = dist.basis.modes
    if m > MAX_PATTERN_MODES:
        raise CapacityError(f"2^{m} click patterns is too many; use coincidence_vector instead")
    patterns = np.array(list(itertools.product((0, 1), repeat=m)), dtype=np.int8)
    clicks = click_probabilities(dist.basis.states, loss)
    probs = np.zeros(len(patterns))
    on = patterns.astype(bool)
    for p_l, k in zip(dist.probs, clicks):
        if p_l == 0.0:
            continue
        probs += p_l * np.prod(np.where(on, k, 1.0 - k), axis=1)
    return ThresholdDistribution(patterns, probs)


def pattern_coincidences(tdist: ThresholdDistribution) -> np.ndarray:
    """``C_ij = sum_r r_i r_j p(r)`` straight from a pattern distribution."""
    r = tdist.patterns.astype(float)
    joint = r.T @ (tdist.probs[:, None] * r)
    return joint[np.triu_indices(r.shape[1], 1)]


def coincidence_from_clicks(probs: np.ndarray, clicks: np.ndarray) -> np.ndarray:
    joint = clicks.T @ (probs[:, None] * clicks)
    return joint[np.triu_indices(clicks.shape[1], 1)]


def coincidence_vector(dist: PnrDistribution, loss: LossModel = LOSSLESS) -> np.ndarray:
    """Length ``M(M-1)/2`` vector of pairwise click coincidences, lexicographic order."""
    return coincidence_from_clicks(dist.probs, click_probabilities(dist.basis.states, loss))


def coincidences_to_csv(values: np.ndarray, modes: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["pair", "value"])
    for (i, j), v in zip(pair_labels(modes), values):
        w.writerow([f"{i}-{j}", repr(float(v))])
    return buf.getvalue()


class ShotSampler:
    """Finite-ensemble coincidence estimates for one basis and loss model.

    Up to ``gaussian_threshold`` shots, the estimate is drawn exactly: shot
    counts per Fock outcome are multinomial, and for each outcome the click
    sub-pattern on its occupied modes is multinomial over the 2^w
    possibilities. This has the same law as sampling shot by shot (draw a
    Fock outcome, thin every photon with probability ``eta``, threshold,
    count clicked pairs) but costs O(d 2^N) rather than O(shots).

    Above the threshold a per-feature Gaussian approximation
    ``C + z sqrt(C (1 - C) / shots)`` is used, clipped to [0, 1]. Setting the
    threshold to ``None`` keeps exact sampling for every budget.
    """

    def __init__(self, basis, loss: LossModel = LOSSLESS,
                 gaussian_threshold: Optional[int] = GAUSSIAN_SHOT_THRESHOLD):
        self.basis = basis
        self.loss = loss
        self.gaussian_threshold = gaussian_threshold
        m, n = basis.modes, basis.photons
        states = basis.states
        # occupied modes per state, padded with -1 up to N slots
        self._slots = np.full((len(basis), max(n, 1)), -1, dtype=np.intp)
        occ = np.zeros((len(basis), max(n, 1)), dtype=np.int64)
        for l, q in enumerate(states):
            nz = np.flatnonzero(q)
            self._slots[l, :len(nz)] = nz
            occ[l, :len(nz)] = q[nz]
        slot_click = 1.0 - (1.0 - loss.eta_eff) ** occ
        slot_click[self._slots < 0] = 0.0
        width = self._slots.shape[1]
        bits = np.array(list(itertools.product((0, 1), repeat=width)), dtype=bool)  # (P, w)
        self._bits = bits
        # probability of each slot sub-pattern given the Fock outcome
        self._sub_probs = np.prod(
            np.where(bits[None, :, :], slot_click[:, None, :], 1.0 - slot_click[:, None, :]),
            axis=2,
        )
        self._pair_slots = [(a, b) for a in range(width) for b in range(a + 1, width)]
        self._both = np.array([bits[:, a] & bits[:, b] for a, b in self._pair_slots],
                              dtype=float).T  # (P, n_slot_pairs)
        self._clicks = click_probabilities(states, loss)
        self._iu = np.triu_indices(m, 1)

    def exact(self, probs: np.ndarray) -> np.ndarray:
        return coincidence_from_clicks(probs, self._clicks)

    def sample(self, probs: np.ndarray, shots: int, rng: np.random.Generator) -> np.ndarray:
        if shots < 1:
            raise ValueError(f"shot count must be >= 1, got {shots}")
        if self.gaussian_threshold is not None and shots > self.gaussian_threshold:
            c = self.exact(probs)
            z = rng.standard_normal(c.shape)
            return np.clip(c + z * np.sqrt(np.clip(c * (1.0 - c), 0.0, None) / shots), 0.0, 1.0)
        p = np.clip(probs, 0.0, None)
        counts = rng.multinomial(shots, p / p.sum())
        hit = np.flatnonzero(counts)
        sub = rng.multinomial(counts[hit], self._sub_probs[hit])  # (h, P)
        slot_pairs = sub @ self._both  # (h, n_slot_pairs)
        m = self.basis.modes
        joint = np.zeros((m, m))
        slots = self._slots[hit]
        for col, (a, b) in enumerate(self._pair_slots):
            i, j = slots[:, a], slots[:, b]
            ok = (i >= 0) & (j >= 0)
            np.add.at(joint, (i[ok], j[ok]), slot_pairs[ok, col])
        # slots are ordered by mode, so every count sits above the diagonal
        return joint[self._iu] / shots

    def sample_per_shot(self, probs: np.ndarray, shots: int, rng: np.random.Generator) -> np.ndarray:
        """Reference shot-by-shot sampler (inverse CDF, binomial thinning)."""
        cdf = np.cumsum(probs)
        idx = np.minimum(np.searchsorted(cdf, rng.random(shots) * cdf[-1], side="right"),
                         len(probs) - 1)
        q = self.basis.states[idx]
        if self.loss.eta_eff < 1.0:
            q = rng.binomial(q, self.loss.eta_eff)
        clicks = (q > 0).astype(float)
        return (clicks.T @ clicks)[self._iu] / shots


def sample_coincidences(
    dist: PnrDistribution,
    loss: LossModel,
    shots: int,
    rng: np.random.Generator,
    gaussian_threshold: Optional[int] = GAUSSIAN_SHOT_THRESHOLD,
) -> np.ndarray:
    return ShotSampler(dist.basis, loss, gaussian_threshold).sample(dist.probs, shots, rng)


def standard_error(c: np.ndarray, shots: int) -> np.ndarray:
    return np.sqrt(c * (1.0 - c) / shots)


