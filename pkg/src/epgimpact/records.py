"""Value types for macroblock dependency traces."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import InvalidPartition, OutOfGrid

MB_SIZE = 16
NEIGHBORS = ("TL", "T", "TR", "L")
# (dx, dy) of each intra neighbour relative to the current macroblock
NEIGHBOR_OFFSETS = {"TL": (-1, -1), "T": (0, -1), "TR": (1, -1), "L": (-1, 0)}
PARTITION_SIZES = frozenset({(16, 16), (16, 8), (8, 16), (8, 8), (8, 4), (4, 8), (4, 4)})


@dataclass(frozen=True)
class FrameGrid:
    width_mb: int
    height_mb: int

    def __post_init__(self):
        if self.width_mb < 1 or self.height_mb < 1:
            raise ValueError(f"grid must be at least 1x1 macroblocks, got {self.width_mb}x{self.height_mb}")

    @property
    def mb_count(self) -> int:
        return self.width_mb * self.height_mb

    @property
    def width_px(self) -> int:
        return self.width_mb * MB_SIZE

    @property
    def height_px(self) -> int:
        return self.height_mb * MB_SIZE

    def check(self, x: int, y: int) -> None:
        if not (0 <= x < self.width_mb and 0 <= y < self.height_mb):
            raise OutOfGrid(f"macroblock ({x}, {y}) outside {self.width_mb}x{self.height_mb} grid")


@dataclass(frozen=True)
class InterPartition:
    """Motion-compensated area of a macroblock; motion vector in quarter-pel units."""

    xo: int
    yo: int
    w: int
    h: int
    ref: int
    mvx: int
    mvy: int

    def validate(self) -> None:
        if (self.w, self.h) not in PARTITION_SIZES:
            raise InvalidPartition(f"illegal partition size {self.w}x{self.h}")
        if not (0 <= self.xo and self.xo + self.w <= MB_SIZE and 0 <= self.yo and self.yo + self.h <= MB_SIZE):
            raise InvalidPartition(f"partition at ({self.xo}, {self.yo}) size {self.w}x{self.h} leaves the macroblock")
        if self.xo % self.w or self.yo % self.h:
            raise InvalidPartition(f"partition at ({self.xo}, {self.yo}) not aligned to its {self.w}x{self.h} size")
        if self.ref < 1:
            raise InvalidPartition(f"reference offset must be >= 1, got {self.ref}")


def _cell_mask(xo, yo, w, h):
    mask = 0
    for y in range(yo // 4, (yo + h) // 4):
        for x in range(xo // 4, (xo + w) // 4):
            mask |= 1 << (4 * y + x)
    return mask


# 4x4-cell coverage mask of every legal, aligned partition rectangle
_RECT_MASKS = {
    (xo, yo, w, h): _cell_mask(xo, yo, w, h)
    for w, h in PARTITION_SIZES
    for xo in range(0, MB_SIZE, w)
    for yo in range(0, MB_SIZE, h)
}


def validate_partitioning(parts) -> None:
    """Partitions must be individually legal and tile the 16x16 macroblock exactly."""
    if not 1 <= len(parts) <= 16:
        raise InvalidPartition(f"macroblock needs 1..16 partitions, got {len(parts)}")
    covered = 0
    for p in parts:
        mask = _RECT_MASKS.get((p.xo, p.yo, p.w, p.h))
        if mask is None or p.ref < 1:
            p.validate()
        if covered & mask:
            raise InvalidPartition("partitions overlap")
        covered |= mask
    if covered != 0xFFFF:
        raise InvalidPartition("partitions do not cover the macroblock")


@dataclass(frozen=True)
class Intra:
    refs: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "refs", frozenset(self.refs))
        bad = self.refs - set(NEIGHBORS)
        if bad:
            raise ValueError(f"unknown intra neighbours {sorted(bad)}")


@dataclass(frozen=True)
class Inter:
    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))


@dataclass(frozen=True)
class FrameStart:
    idx: int
    idr: bool
    width_mb: int
    height_mb: int

    @property
    def grid(self) -> FrameGrid:
        return FrameGrid(self.width_mb, self.height_mb)


@dataclass(frozen=True)
class Mb:
    x: int
    y: int
    pred: Union[Intra, Inter]


TraceRecord = Union[FrameStart, Mb]
