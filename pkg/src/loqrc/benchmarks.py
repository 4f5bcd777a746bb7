"""Target series: Mackey-Glass, NARMA-n, a small transverse-field Ising chain, i.i.d. drives."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import reduce
from typing import Optional, Sequence, Tuple

import numpy as np


class UnstableSeriesError(ArithmeticError):
    """A generated series left its bounded regime (NARMA blow-up)."""


def minmax(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    lo, hi = x.min(), x.max()
    if hi == lo:
        return np.zeros_like(x)
    return (x - lo) / (hi - lo)


def iid_drive(n: int, low: float = 0.0, high: float = 1.0,
              rng: Optional[np.random.Generator] = None) -> np.ndarray:
    if n < 1:
        raise ValueError(f"drive length must be >= 1, got {n}")
    if not (np.isfinite(low) and np.isfinite(high) and low < high):
        raise ValueError(f"invalid range [{low}, {high}]")
    rng = rng if rng is not None else np.random.default_rng()
    return rng.uniform(low, high, size=n)


# --- Mackey-Glass -----------------------------------------------------------

@dataclass(frozen=True)
class MgParams:
    alpha: float = 0.2
    beta: float = 10.0
    gamma: float = 0.1
    tau_delay: float = 17.0
    dt_sample: float = 1.0
    substep: float = 0.1
    history: float = 1.2
    transient: int = 1000

    def __post_init__(self):
        for name in ("tau_delay", "dt_sample"):
            ratio = getattr(self, name) / self.substep
            if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
                raise ValueError(f"{name} must be an integer multiple of the substep")


def _mg_rhs(p: MgParams, q, q_delayed):
    return p.alpha * q_delayed / (1.0 + q_delayed ** p.beta) - p.gamma * q


def integrate_mackey_glass(params: MgParams, n_samples: int) -> np.ndarray:
    """Raw ``Q(t)`` at ``t = 0, dt, 2 dt, ...`` by fixed-step RK4.

    The delayed term at half steps uses cubic Hermite interpolation of the
    stored grid values and slopes, which keeps the scheme fourth order.
    """
    p = params
    h = p.substep
    lag = int(round(p.tau_delay / h))
    every = int(round(p.dt_sample / h))
    n_sub = (n_samples - 1) * every
    q = np.empty(lag + n_sub + 1)
    dq = np.empty_like(q)
    q[:lag + 1] = p.history
    dq[:lag] = 0.0  # constant history
    dq[lag] = _mg_rhs(p, q[lag], q[0])
    for n in range(lag, lag + n_sub):
        d0, d1 = q[n - lag], q[n - lag + 1]
        s0, s1 = dq[n - lag], dq[n - lag + 1]
        d_mid = 0.5 * (d0 + d1) + h * (s0 - s1) / 8.0
        y = q[n]
        k1 = dq[n]
        k2 = _mg_rhs(p, y + 0.5 * h * k1, d_mid)
        k3 = _mg_rhs(p, y + 0.5 * h * k2, d_mid)
        k4 = _mg_rhs(p, y + h * k3, d1)
        q[n + 1] = y + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
        dq[n + 1] = _mg_rhs(p, q[n + 1], q[n + 1 - lag])
    return q[lag::every][:n_samples]


def mackey_glass(params: MgParams = MgParams(), total_steps: int = 2200,
                 horizon: int = 0) -> Tuple[np.ndarray, np.ndarray]:
    """Normalized MG inputs ``x_k`` and targets ``y_k = x_{k + horizon}``, each ``total_steps`` long.

    The first ``params.transient`` samples are discarded; min-max
    normalization uses the whole kept window (inputs and look-ahead).
    """
    if horizon < 0:
        raise ValueError("horizon must be non-negative")
    raw = integrate_mackey_glass(params, params.transient + total_steps + horizon)
    x = minmax(raw[params.transient:])
    return x[:total_steps], x[horizon:horizon + total_steps]


# --- NARMA ------------------------------------------------------------------

@dataclass(frozen=True)
class NarmaParams:
    order: int = 10
    alpha: float = 0.3
    beta: float = 0.05
    gamma: float = 1.5
    delta: float = 0.1
    input_range: Tuple[float, float] = (0.0, 0.5)
    limit: float = 10.0

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("NARMA order must be >= 1")


def narma(params: NarmaParams, drive: Sequence[float]) -> np.ndarray:
    """NARMA-n target aligned with the drive: ``y[k]`` uses inputs up to ``x[k]``.

    ``y[k] = a y[k-1] + b y[k-1] sum_{j<n} y[k-1-j] + g x[k] x[k-n+1] + d``
    with zero history before the series starts.
    """
    x = np.asarray(drive, dtype=float)
    n = params.order
    y = np.zeros(len(x))
    prev = 0.0
    window = 0.0  # sum of the last n outputs
    for k in range(len(x)):
        lagged = x[k - n + 1] if k - n + 1 >= 0 else 0.0
        val = (params.alpha * prev + params.beta * prev * window
               + params.gamma * x[k] * lagged + params.delta)
        if not np.isfinite(val) or abs(val) > params.limit:
            raise UnstableSeriesError(f"NARMA-{n} diverged at step {k} (y={val})")
        y[k] = val
        window += val - (y[k - n] if k - n >= 0 else 0.0)
        prev = val
    return y


def narma_steady_state(params: NarmaParams) -> float:
    """Stable fixed point of the zero-drive recurrence (smaller root)."""
    a = params.beta * params.order
    b = params.alpha - 1.0
    c = params.delta
    return float((-b - np.sqrt(b * b - 4 * a * c)) / (2 * a))


# --- Ising chain ------------------------------------------------------------

@dataclass(frozen=True)
class IsingParams:
    sites: int = 5
    coupling: float = 1.0
    hx: float = 1.05
    hz: float = -0.5
    dt: float = 0.05
    site: int = 3  # 1-based observable site

    def __post_init__(self):
        if self.sites < 2:
            raise ValueError("chain needs at least two sites")
        if self.sites > 12:
            raise ValueError("dense evolution limited to 12 sites")
        if not 1 <= self.site <= self.sites:
            raise ValueError("observable site outside the chain")


_SX = np.array([[0.0, 1.0], [1.0, 0.0]])
_SZ = np.array([[1.0, 0.0], [0.0, -1.0]])


def site_operator(op: np.ndarray, site: int, sites: int) -> np.ndarray:
    """``op`` acting on 1-based ``site`` of an open chain (site 1 is the leftmost factor)."""
    mats = [np.eye(2)] * sites
    mats[site - 1] = op
    return reduce(np.kron, mats)


def ising_hamiltonian(params: IsingParams) -> np.ndarray:
    L = params.sites
    sz = [site_operator(_SZ, i, L) for i in range(1, L + 1)]
    sx = [site_operator(_SX, i, L) for i in range(1, L + 1)]
    h = -params.coupling * sum(sz[i] @ sz[i + 1] for i in range(L - 1))
    h = h + params.hx * sum(sx) + params.hz * sum(sz)
    return h


class IsingEvolution:
    """Exact evolution of the all-up product state by eigendecomposition."""

    def __init__(self, params: IsingParams):
        self.params = params
        self.hamiltonian = ising_hamiltonian(params)
        self.energies, self.eigvecs = np.linalg.eigh(self.hamiltonian)
        psi0 = np.zeros(2 ** params.sites, dtype=complex)
        psi0[0] = 1.0  # |up ... up> in the sigma^z basis
        self.psi0 = psi0
        self._coeffs = self.eigvecs.conj().T @ psi0

    def states(self, times: np.ndarray) -> np.ndarray:
        """``(len(times), 2^L)`` array of ``exp(-iHt) psi0``."""
        phases = np.exp(-1j * np.outer(times, self.energies))
        return (phases * self._coeffs) @ self.eigvecs.T

    def observable(self, times: np.ndarray) -> np.ndarray:
        """Raw ``<sigma^z_site(t)>`` in [-1, 1]."""
        psi = self.states(times)
        diag = np.diag(site_operator(_SZ, self.params.site, self.params.sites))
        return np.clip(np.abs(psi) ** 2 @ diag, -1.0, 1.0)


def ising_series(params: IsingParams = IsingParams(), total_steps: int = 2200,
                 horizon: int = 0) -> Tuple[np.ndarray, np.ndarray]:
    """Normalized central-spin series ``x_k`` and targets ``x_{k + horizon}``."""
    if horizon < 0:
        raise ValueError("horizon must be non-negative")
    t = np.arange(total_steps + horizon) * params.dt
    x = minmax(IsingEvolution(params).observable(t))
    return x[:total_steps], x[horizon:horizon + total_steps]


def series_to_csv(x: np.ndarray, y: np.ndarray) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "x", "y_target"])
    for k, (a, b) in enumerate(zip(x, y)):
        w.writerow([k, repr(float(a)), repr(float(b))])
    return buf.getvalue()
