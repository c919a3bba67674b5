"""Seeded synthetic macroblock traces standing in for decoder instrumentation.

Randomness comes from numpy's PCG64 bit generator seeded with ``GenParams.seed``;
the draw sequence is fixed by ``GENERATOR_VERSION`` and changes bump it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import InvalidParams
from .records import NEIGHBOR_OFFSETS, NEIGHBORS, FrameStart, Inter, InterPartition, Intra, Mb

GENERATOR_VERSION = "pcg64-v1"

# macroblock partition modes, then sub-modes of each 8x8 quadrant
MB_MODES = ("16x16", "16x8", "8x16", "8x8")
SUB_MODES = ("8x8", "8x4", "4x8", "4x4")
_MODE_RECTS = {
    "16x16": [(0, 0, 16, 16)],
    "16x8": [(0, 0, 16, 8), (0, 8, 16, 8)],
    "8x16": [(0, 0, 8, 16), (8, 0, 8, 16)],
    "8x8": [(0, 0, 8, 8)],
    "8x4": [(0, 0, 8, 4), (0, 4, 8, 4)],
    "4x8": [(0, 0, 4, 8), (4, 0, 4, 8)],
    "4x4": [(0, 0, 4, 4), (4, 0, 4, 4), (0, 4, 4, 4), (4, 4, 4, 4)],
}
_QUADRANTS = ((0, 0), (8, 0), (0, 8), (8, 8))


@dataclass(frozen=True)
class GenParams:
    frames: int = 150
    width_mb: int = 40
    height_mb: int = 30
    gop_length: int = 30
    p_intra_in_p_frame: float = 0.1
    mv_range_qpel: int = 64
    partition_mix: tuple = (0.4, 0.15, 0.15, 0.3)
    sub_partition_mix: tuple = (0.4, 0.2, 0.2, 0.2)
    p_intra_ref: float = 0.5
    seed: int = 42

    def validate(self) -> None:
        if self.frames < 1:
            raise InvalidParams(f"frames must be >= 1, got {self.frames}")
        if self.width_mb < 1 or self.height_mb < 1:
            raise InvalidParams(f"grid must be at least 1x1, got {self.width_mb}x{self.height_mb}")
        if self.gop_length < 1:
            raise InvalidParams(f"gop_length must be >= 1, got {self.gop_length}")
        for name in ("p_intra_in_p_frame", "p_intra_ref"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise InvalidParams(f"{name} must be in [0, 1], got {p}")
        if self.mv_range_qpel < 0:
            raise InvalidParams(f"mv_range_qpel must be >= 0, got {self.mv_range_qpel}")
        for name, mix in (("partition_mix", self.partition_mix), ("sub_partition_mix", self.sub_partition_mix)):
            if len(mix) != 4 or any(not (m >= 0 and math.isfinite(m)) for m in mix) or sum(mix) <= 0:
                raise InvalidParams(f"{name} needs 4 non-negative weights with positive sum, got {mix}")
        if not 0 <= self.seed < 2**64:
            raise InvalidParams(f"seed must fit in 64 unsigned bits, got {self.seed}")

    @property
    def node_count(self) -> int:
        return self.frames * self.width_mb * self.height_mb

    @property
    def epoch_count(self) -> int:
        return -(-self.frames // self.gop_length)


def _normalised(mix):
    a = np.asarray(mix, dtype=np.float64)
    return a / a.sum()


def generate_trace(params: GenParams) -> Iterator:
    """Yield trace records for ``params``; identical seeds give identical sequences."""
    params.validate()
    rng = np.random.Generator(np.random.PCG64(params.seed))
    w, h = params.width_mb, params.height_mb
    n = w * h
    xs = np.tile(np.arange(w), h)
    ys = np.repeat(np.arange(h), w)
    avail = np.stack(
        [(0 <= xs + dx) & (xs + dx < w) & (0 <= ys + dy) for dx, dy in (NEIGHBOR_OFFSETS[k] for k in NEIGHBORS)],
        axis=1,
    )
    mb_mix = _normalised(params.partition_mix)
    sub_mix = _normalised(params.sub_partition_mix)
    r = params.mv_range_qpel

    for f in range(params.frames):
        idr = f % params.gop_length == 0
        yield FrameStart(f, idr, w, h)
        # fixed draw order per frame, independent of which macroblocks end up intra
        refs_mask = (rng.random((n, 4)) < params.p_intra_ref) & avail
        intra = np.ones(n, dtype=bool) if idr else rng.random(n) < params.p_intra_in_p_frame
        modes = rng.choice(4, size=n, p=mb_mix)
        subs = rng.choice(4, size=(n, 4), p=sub_mix)
        mvs = rng.integers(-r, r + 1, size=(n, 16, 2))
        for i in range(n):
            if intra[i]:
                yield Mb(int(xs[i]), int(ys[i]), Intra(frozenset(NEIGHBORS[k] for k in range(4) if refs_mask[i, k])))
                continue
            mode = MB_MODES[modes[i]]
            if mode == "8x8":
                rects = [
                    (qx + x, qy + y, pw, ph)
                    for q, (qx, qy) in enumerate(_QUADRANTS)
                    for x, y, pw, ph in _MODE_RECTS[SUB_MODES[subs[i, q]]]
                ]
            else:
                rects = _MODE_RECTS[mode]
            mv = mvs[i]
            parts = tuple(
                InterPartition(x, y, pw, ph, 1, int(mv[k, 0]), int(mv[k, 1]))
                for k, (x, y, pw, ph) in enumerate(rects)
            )
            yield Mb(int(xs[i]), int(ys[i]), Inter(parts))
