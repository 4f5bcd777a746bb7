"""Reconfigurable MZI mesh: element unitaries, Galton-wedge layout, composition.

Mode and layer labels on :class:`MziSpec` are 1-based so that the layout dump
reads like the usual mesh diagrams (modes 1..M, layers 1..D). All array
indexing converts to 0-based internally.

Composition order: layer 1 acts first on the input state, so the full mesh is
``V = L_D @ ... @ L_2 @ L_1``. Within a layer the MZIs touch disjoint mode
pairs and commute.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np


class MeshError(ValueError):
    """Invalid mesh geometry or parameter assignment."""


class Role(str, enum.Enum):
    INPUT = "input"
    WEDGE = "wedge"
    STATIC = "static"
    UNUSED = "unused"


@dataclass(frozen=True)
class MziSpec:
    layer: int
    mode_pair: Tuple[int, int]
    role: Role


@dataclass(frozen=True)
class MziParams:
    theta: float
    phi: float

    def __post_init__(self):
        if not (math.isfinite(self.theta) and math.isfinite(self.phi)):
            raise MeshError(f"non-finite MZI parameters: theta={self.theta}, phi={self.phi}")


MeshParams = Dict[int, MziParams]
"""MZI index (position in ``MeshLayout.mzis``) -> parameters."""


@dataclass(frozen=True)
class MeshLayout:
    modes: int
    layers: int
    mzis: Tuple[MziSpec, ...]
    central_block: Tuple[int, int]  # inclusive, 1-based

    def indices(self, role: Role) -> List[int]:
        return [i for i, m in enumerate(self.mzis) if m.role is role]

    @property
    def n_wedge(self) -> int:
        """Number of feedback-programmed MZIs (R_fb)."""
        return len(self.indices(Role.WEDGE))

    @property
    def input_modes(self) -> List[int]:
        lo, hi = self.central_block
        return list(range(lo, hi + 1))

    @property
    def wedge_depth(self) -> int:
        """Last layer holding wedge MZIs."""
        return max(m.layer for m in self.mzis if m.role is Role.WEDGE)

    def dump(self) -> str:
        """Plain-text table, one row per MZI."""
        lines = [f"# modes={self.modes} layers={self.layers} "
                 f"central_block={self.central_block[0]}-{self.central_block[1]} "
                 f"R_fb={self.n_wedge}",
                 "index\tlayer\tmodes\trole"]
        for i, m in enumerate(self.mzis):
            lines.append(f"{i}\t{m.layer}\t{m.mode_pair[0]}-{m.mode_pair[1]}\t{m.role.value}")
        return "\n".join(lines) + "\n"


def mzi_unitary(params: MziParams) -> np.ndarray:
    """2x2 MZI transfer matrix ``[[e^{i phi} cos t, -sin t], [e^{i phi} sin t, cos t]]``."""
    if not isinstance(params, MziParams):
        params = MziParams(*params)
    c, s = math.cos(params.theta), math.sin(params.theta)
    e = complex(math.cos(params.phi), math.sin(params.phi))
    return np.array([[e * c, -s], [e * s, c]], dtype=complex)


def _layer_pairs(modes: int, layer: int) -> List[Tuple[int, int]]:
    first = 1 if layer % 2 == 1 else 2
    return [(i, i + 1) for i in range(first, modes, 2)]


def build_default_layout(modes: int = 16, photons: int = 4) -> MeshLayout:
    """Rectangular M-layer mesh with a central 4-mode input block and a Galton wedge.

    Layer 1 carries the two input MZIs on the central block ``c..c+3`` with
    ``c = M/2 - 1``. Layers ``2..L_w`` carry the wedge: every MZI whose mode
    pair lies inside the light cone ``[c - (l-1), c + 3 + (l-1)]``, where
    ``L_w`` is the first layer whose cone spans all modes. Everything outside
    the cone in layers ``1..L_w`` is unused (never illuminated); layers after
    ``L_w`` are static.
    """
    if modes < 8 or modes % 2:
        raise MeshError(f"unsupported geometry: M={modes} (need even M >= 8)")
    if photons > modes:
        raise MeshError(f"photon count {photons} exceeds mode count {modes}")
    c = modes // 2 - 1
    block = (c, c + 3)
    # cone at layer l has half-width l-1
    wedge_end = max(c - 1, modes - (c + 3)) + 1

    mzis: List[MziSpec] = []
    for layer in range(1, modes + 1):
        lo, hi = c - (layer - 1), c + 3 + (layer - 1)
        for pair in _layer_pairs(modes, layer):
            if layer == 1:
                role = Role.INPUT if pair in ((c, c + 1), (c + 2, c + 3)) else Role.UNUSED
            elif layer <= wedge_end:
                role = Role.WEDGE if lo <= pair[0] and pair[1] <= hi else Role.UNUSED
            else:
                role = Role.STATIC
            mzis.append(MziSpec(layer, pair, role))
    return MeshLayout(modes=modes, layers=modes, mzis=tuple(mzis), central_block=block)


BALANCED = MziParams(math.pi / 4, 0.0)
WEDGE_BASE = MziParams(math.pi / 4, math.pi)


def sample_static_params(layout: MeshLayout, rng: np.random.Generator) -> MeshParams:
    """Random static block, balanced input MZIs, wedge at its zero-feedback point."""
    params: MeshParams = {}
    for i, m in enumerate(layout.mzis):
        if m.role is Role.STATIC:
            theta = rng.uniform(0.0, math.pi / 2)
            phi = rng.uniform(0.0, 2 * math.pi)
            params[i] = MziParams(float(theta), float(phi))
        elif m.role is Role.INPUT:
            params[i] = BALANCED
        elif m.role is Role.WEDGE:
            params[i] = WEDGE_BASE
    return params


def apply_mzis(
    state: np.ndarray,
    layout: MeshLayout,
    params: MeshParams,
    indices: Iterable[int],
) -> np.ndarray:
    """Left-multiply ``state`` (M x k) by the listed MZIs, in the given order.

    Modifies and returns ``state``. Unused MZIs are identity and skipped.
    """
    for idx in indices:
        spec = layout.mzis[idx]
        if spec.role is Role.UNUSED:
            continue
        try:
            p = params[idx]
        except KeyError:
            raise MeshError(f"incomplete parameters: no entry for MZI {idx} "
                            f"(layer {spec.layer}, modes {spec.mode_pair})") from None
        i, j = spec.mode_pair[0] - 1, spec.mode_pair[1] - 1
        rows = state[[i, j], :]
        state[[i, j], :] = mzi_unitary(p) @ rows
    return state


def compose_mesh(
    layout: MeshLayout,
    params: MeshParams,
    layers: Optional[Tuple[int, int]] = None,
) -> np.ndarray:
    """Full M x M unitary of the mesh (or of the inclusive layer range ``layers``)."""
    lo, hi = layers if layers is not None else (1, layout.layers)
    order = [i for i, m in enumerate(layout.mzis) if lo <= m.layer <= hi]
    order.sort(key=lambda i: layout.mzis[i].layer)
    return apply_mzis(np.eye(layout.modes, dtype=complex), layout, params, order)
