"""Impact report and histogram tables (comma-separated, header row first)."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .errors import ReportError

REPORT_HEADER = ("epoch", "frame", "mb_x", "mb_y", "m_global")
HISTOGRAM_HEADER = ("bin_low", "bin_high", "count")
Y_SCALES = ("linear", "sqrt")
MAX_BINS = 1_000_000


def fmt_value(x: float) -> str:
    """Integers without a decimal point; other floats in shortest round-trip form."""
    x = float(x)
    if math.isfinite(x) and x == int(x) and abs(x) < 2**53:
        return str(int(x))
    return repr(x)


def _text(source) -> str:
    if isinstance(source, (bytes, bytearray)):
        return bytes(source).decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    return data.decode("utf-8") if isinstance(data, bytes) else data


def write_report(rows: Iterable) -> bytes:
    """``rows`` of ``(epoch, frame, mb_x, mb_y, m_global)``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_HEADER)
    for epoch, frame, x, y, m in rows:
        w.writerow((int(epoch), int(frame), int(x), int(y), fmt_value(m)))
    return buf.getvalue().encode("utf-8")


def read_report(source) -> list[tuple]:
    lines = _text(source).splitlines()
    reader = csv.reader(lines)
    rows = []
    for lineno, rec in enumerate(reader, 1):
        if lineno == 1:
            if tuple(rec) != REPORT_HEADER:
                raise ReportError(f"expected header {','.join(REPORT_HEADER)!r}", lineno)
            continue
        if len(rec) != len(REPORT_HEADER):
            raise ReportError(f"expected {len(REPORT_HEADER)} fields, got {len(rec)}", lineno)
        try:
            epoch, frame, x, y = (int(v) for v in rec[:4])
            m = float(rec[4])
        except ValueError as exc:
            raise ReportError(str(exc), lineno) from None
        if not m >= 0:
            raise ReportError(f"m_global must be >= 0, got {rec[4]!r}", lineno)
        rows.append((epoch, frame, x, y, m))
    if not lines:
        raise ReportError("empty report (missing header)", 1)
    return rows


@dataclass(frozen=True)
class HistogramSpec:
    bin_width: Optional[float] = None
    bin_count: Optional[int] = None
    y_scale: str = "sqrt"

    def __post_init__(self):
        if (self.bin_width is None) == (self.bin_count is None):
            raise ValueError("give exactly one of bin_width and bin_count")
        if self.bin_width is not None and not (self.bin_width > 0 and math.isfinite(self.bin_width)):
            raise ValueError(f"bin_width must be positive, got {self.bin_width}")
        if self.bin_count is not None and self.bin_count < 1:
            raise ValueError(f"bin_count must be >= 1, got {self.bin_count}")
        if self.y_scale not in Y_SCALES:
            raise ValueError(f"y_scale must be one of {Y_SCALES}")


@dataclass(frozen=True, eq=False)
class HistogramResult:
    low: np.ndarray
    high: np.ndarray
    count: np.ndarray

    def __len__(self):
        return self.count.shape[0]

    def rows(self):
        return list(zip(self.low.tolist(), self.high.tolist(), self.count.tolist()))


def histogram(values, spec: HistogramSpec) -> HistogramResult:
    """Bins ``[lo, lo + width)`` starting at the minimum; the last bin is closed and ends at the maximum."""
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        empty = np.zeros(0)
        return HistogramResult(empty, empty, np.zeros(0, dtype=np.int64))
    if not np.all(np.isfinite(v)):
        raise ReportError("cannot bin non-finite impact values")
    lo, hi = float(v.min()), float(v.max())
    if spec.bin_width is not None:
        width = float(spec.bin_width)
        n = int(math.floor((hi - lo) / width)) + 1
        if n > MAX_BINS:
            raise ValueError(f"bin width {width} gives {n} bins, limit is {MAX_BINS}")
    else:
        n = spec.bin_count if hi > lo else 1
        width = (hi - lo) / n if hi > lo else 1.0
    idx = np.clip(np.floor((v - lo) / width).astype(np.int64), 0, n - 1)
    counts = np.bincount(idx, minlength=n)
    low = lo + width * np.arange(n)
    high = np.minimum(low + width, hi)
    high[-1] = hi
    return HistogramResult(low, high, counts)


def write_histogram(h: HistogramResult) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HISTOGRAM_HEADER)
    for lo, hi, c in h.rows():
        w.writerow((fmt_value(lo), fmt_value(hi), int(c)))
    return buf.getvalue().encode("utf-8")


def bar_lengths(counts, y_scale: str = "sqrt", width: int = 60) -> np.ndarray:
    c = np.asarray(counts, dtype=np.float64)
    scaled = np.sqrt(c) if y_scale == "sqrt" else c
    top = scaled.max() if scaled.size else 0.0
    if top == 0:
        return np.zeros(c.shape, dtype=np.int64)
    return np.rint(scaled / top * width).astype(np.int64)


def render_histogram(h: HistogramResult, y_scale: str = "sqrt", width: int = 60) -> str:
    if len(h) == 0:
        return "(no impact values)\n"
    bars = bar_lengths(h.count, y_scale, width)
    labels = []
    for i, (lo, hi) in enumerate(zip(h.low.tolist(), h.high.tolist())):
        close = "]" if i == len(h) - 1 else ")"
        labels.append(f"[{lo:.6g}, {hi:.6g}{close}")
    pad = max(len(s) for s in labels)
    lines = [f"impact histogram ({y_scale} y-scale)"]
    for label, bar, c in zip(labels, bars.tolist(), h.count.tolist()):
        lines.append(f"{label:>{pad}} |{'#' * bar} {c}")
    return "\n".join(lines) + "\n"
