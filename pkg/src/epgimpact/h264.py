"""Macroblock-level propagation graphs for an H.264 baseline decoder.

Each decoded macroblock is one node of local weight 1. Intra-predicted
macroblocks depend on up to four already decoded neighbours of the same
frame; motion-compensated partitions depend on every reference-frame
macroblock that their interpolation window touches. An IDR frame closes the
current graph, since nothing after it can reference earlier frames.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .errors import GridMismatch, InvalidPartition, NonScanlineOrder, OrderViolation, RefCrossesIdr
from .graph import Epg, SealedEpg, impact
from .records import (
    MB_SIZE, NEIGHBOR_OFFSETS, FrameGrid, FrameStart, Inter, InterPartition, Mb,
    validate_partitioning,
)

# full-pel samples needed left/top and right/bottom of a fractional position (6-tap luma filter)
INTERP_MARGIN = (2, 3)


def intra_edges(grid: FrameGrid, pos, refs) -> set:
    x, y = pos
    grid.check(x, y)
    out = set()
    for name in refs:
        dx, dy = NEIGHBOR_OFFSETS[name]
        nx, ny = x + dx, y + dy
        if 0 <= nx < grid.width_mb and 0 <= ny < grid.height_mb:
            out.add((nx, ny))
    return out


def _span(origin, size, mv, limit, margin):
    """Macroblock index range touched along one axis, after clamping to ``[0, limit)``."""
    lo = origin + (mv >> 2)
    hi = lo + size - 1
    if mv & 3:
        lo -= margin[0]
        hi += margin[1]
    lo = min(max(lo, 0), limit - 1)
    hi = min(max(hi, 0), limit - 1)
    return lo // MB_SIZE, hi // MB_SIZE


def inter_coverage(grid: FrameGrid, mb_pos, p: InterPartition, margin=INTERP_MARGIN) -> set:
    """Reference-frame macroblocks sampled by partition ``p`` of the macroblock at ``mb_pos``."""
    p.validate()
    mx, my = mb_pos
    grid.check(mx, my)
    x0, x1 = _span(MB_SIZE * mx + p.xo, p.w, p.mvx, grid.width_px, margin)
    y0, y1 = _span(MB_SIZE * my + p.yo, p.h, p.mvy, grid.height_px, margin)
    return {(x, y) for y in range(y0, y1 + 1) for x in range(x0, x1 + 1)}


@dataclass(frozen=True, eq=False)
class ImpactReport:
    """Per-node global impact of one epoch, labelled with macroblock provenance."""

    epoch: int
    frame_idx: np.ndarray
    mb_x: np.ndarray
    mb_y: np.ndarray
    impact: np.ndarray

    def __len__(self):
        return self.impact.shape[0]

    def rows(self):
        for f, x, y, m in zip(self.frame_idx.tolist(), self.mb_x.tolist(), self.mb_y.tolist(), self.impact.tolist()):
            yield self.epoch, f, x, y, m


class _EpochState:
    def __init__(self, grid: FrameGrid):
        self.grid = grid
        self.graph = Epg()
        self.frame_base: list[int] = []
        self.labels: list[tuple] = []
        self.pending_src: list[int] = []
        self.pending_dst: list[int] = []

    def flush(self):
        self.graph.add_edges(self.pending_src, self.pending_dst)
        self.pending_src.clear()
        self.pending_dst.clear()

    def seal(self, epoch: int, backend: str):
        self.flush()
        g = self.graph.seal()
        values = impact(g, backend)
        lab = np.asarray(self.labels, dtype=np.int64).reshape(-1, 3)
        return g, ImpactReport(epoch, lab[:, 0], lab[:, 1], lab[:, 2], values)


def build_epgs(trace: Iterable, backend: str = "exact") -> Iterator[tuple[SealedEpg, ImpactReport]]:
    """Stream ``(SealedEpg, ImpactReport)`` per IDR-delimited epoch of ``trace``."""
    state = None
    epoch = 0
    frame_idx = None
    expected = 0  # scanline index of the next macroblock in the current frame

    def finish_frame():
        if state is None:
            return
        if expected != state.grid.mb_count:
            raise NonScanlineOrder(f"frame {frame_idx} has {expected} of {state.grid.mb_count} macroblocks")
        state.flush()

    for rec in trace:
        if isinstance(rec, FrameStart):
            finish_frame()
            grid = rec.grid
            if rec.idr:
                if state is not None:
                    yield state.seal(epoch, backend)
                    epoch += 1
                state = _EpochState(grid)
            elif state is None:
                raise OrderViolation("trace must start with an IDR frame")
            elif grid != state.grid:
                raise GridMismatch(
                    f"frame {rec.idx} is {grid.width_mb}x{grid.height_mb}, epoch grid is "
                    f"{state.grid.width_mb}x{state.grid.height_mb}"
                )
            frame_idx = rec.idx
            state.frame_base.append(state.graph.node_count)
            expected = 0
            continue

        if not isinstance(rec, Mb):
            raise TypeError(f"unexpected trace record {rec!r}")
        if state is None:
            raise OrderViolation("macroblock before first frame header")
        grid = state.grid
        w = grid.width_mb
        if expected >= grid.mb_count or (rec.x, rec.y) != (expected % w, expected // w):
            raise NonScanlineOrder(f"macroblock ({rec.x}, {rec.y}) out of scanline order in frame {frame_idx}")
        expected += 1
        node = state.graph.add_node(1.0)
        state.labels.append((frame_idx, rec.x, rec.y))
        cur = len(state.frame_base) - 1
        srcs = state.pending_src
        pred = rec.pred
        if isinstance(pred, Inter):
            try:
                validate_partitioning(pred.parts)
            except InvalidPartition as exc:
                raise InvalidPartition(f"frame {frame_idx} macroblock ({rec.x}, {rec.y}): {exc}") from None
            px, py = MB_SIZE * rec.x, MB_SIZE * rec.y
            for p in pred.parts:
                if p.ref > cur:
                    raise RefCrossesIdr(
                        f"frame {frame_idx} macroblock ({rec.x}, {rec.y}) references {p.ref} frames back, "
                        f"only {cur} decoded since the IDR"
                    )
                base = state.frame_base[cur - p.ref]
                x0, x1 = _span(px + p.xo, p.w, p.mvx, grid.width_px, INTERP_MARGIN)
                y0, y1 = _span(py + p.yo, p.h, p.mvy, grid.height_px, INTERP_MARGIN)
                for y in range(y0, y1 + 1):
                    row = base + y * w
                    srcs.extend(range(row + x0, row + x1 + 1))
        else:
            base = state.frame_base[cur]
            for x, y in intra_edges(grid, (rec.x, rec.y), pred.refs):
                srcs.append(base + y * w + x)
        state.pending_dst.extend([node] * (len(srcs) - len(state.pending_dst)))

    finish_frame()
    if state is not None:
        yield state.seal(epoch, backend)
