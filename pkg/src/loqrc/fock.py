"""Fock bases, matrix permanents and exact N-photon output distributions."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Sequence, Tuple

import numpy as np

MAX_BASIS_SIZE = 50_000_000
PROB_SLACK = 1e-12


class BasisError(ValueError):
    """Photon-number or mode-count mismatch between states, bases and unitaries."""


class CapacityError(ValueError):
    """Requested object is too large to enumerate."""


def basis_size(modes: int, photons: int) -> int:
    return math.comb(modes + photons - 1, photons)


def _compositions(modes: int, photons: int):
    if modes == 1:
        yield (photons,)
        return
    for first in range(photons, -1, -1):
        for rest in _compositions(modes - 1, photons - first):
            yield (first,) + rest


@dataclass(frozen=True, eq=False)
class FockBasis:
    """All N-photon occupation vectors over M modes, reverse-lexicographic.

    ``states`` is a read-only ``(d, M)`` integer array. ``(2,0), (1,1), (0,2)``
    is the order for two photons in two modes; this ordering is part of the
    public contract (feature and CSV indices depend on it).
    """

    modes: int
    photons: int
    states: np.ndarray = field(repr=False)
    output_rows: np.ndarray = field(repr=False)  # (d, N): mode j repeated q_j times
    factorials: np.ndarray = field(repr=False)  # prod_j q_j!
    _index: Dict[Tuple[int, ...], int] = field(repr=False)

    def __len__(self) -> int:
        return len(self.states)

    def index(self, state: Sequence[int]) -> int:
        return self._index[tuple(int(q) for q in state)]


@lru_cache(maxsize=32)
def enumerate_basis(modes: int, photons: int) -> FockBasis:
    if modes < 1 or photons < 0:
        raise BasisError(f"invalid basis request M={modes}, N={photons}")
    size = basis_size(modes, photons)
    if size > MAX_BASIS_SIZE:
        raise CapacityError(f"basis of size {size} for M={modes}, N={photons} is too large")
    states = np.array(list(_compositions(modes, photons)), dtype=np.int64).reshape(size, modes)
    rows = np.array([np.repeat(np.arange(modes), q) for q in states],
                    dtype=np.intp).reshape(size, photons)
    fact = np.array([_occupation_factorial(q) for q in states])
    for arr in (states, rows, fact):
        arr.setflags(write=False)
    index = {tuple(int(q) for q in s): i for i, s in enumerate(states)}
    return FockBasis(modes, photons, states, rows, fact, index)


def permanent(a: np.ndarray) -> complex:
    """Permanent by Glynn's formula with Gray-code ordering, O(2^(n-1) n)."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"permanent needs a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0j
    if n == 1:
        return complex(a[0, 0])
    # delta = (1, ±1, ...); first sign fixed to halve the sum
    colsum = a.sum(axis=0)
    delta = np.ones(n)
    total = np.prod(colsum)
    sign = 1.0
    gray_prev = 0
    for k in range(1, 2 ** (n - 1)):
        gray = k ^ (k >> 1)
        bit = (gray ^ gray_prev).bit_length() - 1
        gray_prev = gray
        row = n - 1 - bit
        delta[row] = -delta[row]
        colsum += 2.0 * delta[row] * a[row]
        sign = -sign
        total += sign * np.prod(colsum)
    return complex(total / 2 ** (n - 1))


@lru_cache(maxsize=16)
def _ryser_tables(n: int) -> Tuple[np.ndarray, np.ndarray]:
    subsets = np.array([[(s >> j) & 1 for s in range(1, 2 ** n)] for j in range(n)], dtype=float)
    sizes = subsets.sum(axis=0)
    signs = (-1.0) ** (n - sizes)
    return subsets, signs


def batch_permanent(a: np.ndarray) -> np.ndarray:
    """Permanents of a stack of ``(..., n, n)`` matrices (Ryser inclusion-exclusion).

    Vectorized over the stack; intended for the small n of few-photon
    simulations, where the 2^n subset table is tiny.
    """
    a = np.asarray(a)
    n = a.shape[-1]
    if a.shape[-2] != n:
        raise ValueError(f"permanent needs square matrices, got shape {a.shape}")
    if n == 0:
        return np.ones(a.shape[:-2], dtype=complex)
    subsets, signs = _ryser_tables(n)
    rowsums = a @ subsets  # (..., n, 2^n - 1)
    return np.prod(rowsums, axis=-2) @ signs


def _check_state(state, modes: int, photons: int | None = None) -> np.ndarray:
    s = np.asarray(state, dtype=np.int64)
    if s.shape != (modes,) or np.any(s < 0):
        raise BasisError(f"state {tuple(s)} is not an occupation vector over {modes} modes")
    if photons is not None and s.sum() != photons:
        raise BasisError(f"state {tuple(s)} has {s.sum()} photons, expected {photons}")
    return s


def scattering_submatrix(v: np.ndarray, s: Sequence[int], q: Sequence[int]) -> np.ndarray:
    """Rows of ``v`` repeated per output occupation, columns per input occupation."""
    m = v.shape[0]
    s = _check_state(s, m)
    q = _check_state(q, m, int(s.sum()))
    cols = np.repeat(np.arange(m), s)
    rows = np.repeat(np.arange(m), q)
    return v[np.ix_(rows, cols)]


def _occupation_factorial(s) -> float:
    return float(math.prod(math.factorial(int(k)) for k in s))


def _clamp(p, what: str):
    lo, hi = np.min(p), np.max(p)
    if lo < -PROB_SLACK or hi > 1 + PROB_SLACK:
        raise ArithmeticError(f"{what} outside [0, 1] beyond tolerance: [{lo}, {hi}]")
    return np.clip(p, 0.0, 1.0)


def transition_probability(v: np.ndarray, s: Sequence[int], q: Sequence[int]) -> float:
    sub = scattering_submatrix(v, s, q)
    p = abs(permanent(sub)) ** 2 / (_occupation_factorial(s) * _occupation_factorial(q))
    return float(_clamp(np.array([p]), "transition probability")[0])


@dataclass(frozen=True)
class PnrDistribution:
    basis: FockBasis
    probs: np.ndarray

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "occupation", "probability"])
        for i, (q, p) in enumerate(zip(self.basis.states, self.probs)):
            w.writerow([i, "".join(str(int(k)) if k < 10 else f"({k})" for k in q), repr(float(p))])
        return buf.getvalue()


def output_amplitude_columns(v: np.ndarray, s: Sequence[int]) -> np.ndarray:
    """Columns of ``v`` repeated per input occupation, shape ``(M, N)``."""
    s = _check_state(s, v.shape[0])
    return v[:, np.repeat(np.arange(v.shape[0]), s)]


def distribution_from_columns(
    cols: np.ndarray, basis: FockBasis, input_factorial: float = 1.0
) -> np.ndarray:
    """Probability vector over ``basis`` from the input-repeated columns ``(M, N)``.

    Every scattering submatrix is a row selection of ``cols``, so the Ryser
    row sums are gathered from one ``(M, 2^N - 1)`` table instead of being
    recomputed per output state.
    """
    if basis.photons == 0:
        return np.ones(1)
    subsets, signs = _ryser_tables(basis.photons)
    table = cols @ subsets
    rows = basis.output_rows
    acc = np.take(table, rows[:, 0], axis=0)
    for k in range(1, basis.photons):
        acc *= np.take(table, rows[:, k], axis=0)
    amp = acc @ signs
    p = (amp.real ** 2 + amp.imag ** 2) / (basis.factorials * input_factorial)
    return _clamp(p, "output probabilities")


def output_distribution(v: np.ndarray, s: Sequence[int], basis: FockBasis) -> PnrDistribution:
    v = np.asarray(v, dtype=complex)
    if v.shape != (basis.modes, basis.modes):
        raise BasisError(f"unitary shape {v.shape} does not match {basis.modes} modes")
    s = _check_state(s, basis.modes, basis.photons)
    probs = distribution_from_columns(output_amplitude_columns(v, s), basis,
                                      _occupation_factorial(s))
    return PnrDistribution(basis, probs)
