"""Line-oriented dependency trace format.

::

    epgtrace v1
    F idx=0 idr=1 w=2 h=1
    I x=0 y=0 refs=
    I x=1 y=0 refs=L
    F idx=1 idr=0 w=2 h=1
    P x=0 y=0 parts=2
      p xo=0 yo=0 w=16 h=8 ref=1 mvx=-3 mvy=0
      p xo=0 yo=8 w=16 h=8 ref=1 mvx=4 mvy=8
    I x=1 y=0 refs=TL,L

Motion vectors are in quarter-pel units. An empty trace is an empty file.
"""

from __future__ import annotations

import io
import re
from typing import Iterable, Iterator

from .errors import InvalidPartition, OrderViolation, SchemaViolation, TraceSyntaxError
from .records import NEIGHBORS, FrameStart, Inter, InterPartition, Intra, Mb, validate_partitioning

HEADER = "epgtrace v1"

_INT = re.compile(r"-?[0-9]+\Z")
_N = r"(-?[0-9]+)"
# exact-shape lines; anything else goes through the slower field-by-field path for error reporting
_FAST_P = re.compile(rf"\s*p xo={_N} yo={_N} w={_N} h={_N} ref={_N} mvx={_N} mvy={_N}\Z")
_FAST_I = re.compile(rf"I x={_N} y={_N} refs=([A-Z,]*)\Z")
_FIELDS = {
    "F": ("idx", "idr", "w", "h"),
    "I": ("x", "y", "refs"),
    "P": ("x", "y", "parts"),
    "p": ("xo", "yo", "w", "h", "ref", "mvx", "mvy"),
}


class TraceValidator:
    """Stateful ordering checks shared by the parser and the writer."""

    def __init__(self):
        self.frame = None
        self.expected = 0
        self.count = 0

    def feed(self, rec, lineno=None):
        if isinstance(rec, FrameStart):
            self._frame(rec, lineno)
        elif isinstance(rec, Mb):
            self._mb(rec, lineno)
        else:
            raise SchemaViolation(f"not a trace record: {rec!r}", lineno)
        self.count += 1

    def finish(self, lineno=None):
        self._close_frame(lineno)

    def _close_frame(self, lineno):
        f = self.frame
        if f is not None and self.expected != f.width_mb * f.height_mb:
            raise OrderViolation(
                f"frame {f.idx} incomplete: {self.expected} of {f.width_mb * f.height_mb} macroblocks", lineno
            )

    def _frame(self, rec, lineno):
        if rec.width_mb < 1 or rec.height_mb < 1:
            raise SchemaViolation(f"frame size {rec.width_mb}x{rec.height_mb} must be positive", lineno)
        if rec.idx < 0:
            raise SchemaViolation(f"negative frame index {rec.idx}", lineno)
        if self.frame is None:
            if self.count:
                raise OrderViolation("records before first frame header", lineno)
            if not rec.idr:
                raise OrderViolation("first frame must be an IDR frame", lineno)
        else:
            self._close_frame(lineno)
            if rec.idx <= self.frame.idx:
                raise OrderViolation(f"frame index {rec.idx} does not follow {self.frame.idx}", lineno)
        self.frame = rec
        self.expected = 0

    def _mb(self, rec, lineno):
        f = self.frame
        if f is None:
            raise OrderViolation("macroblock before any frame header", lineno)
        n = f.width_mb * f.height_mb
        if self.expected >= n:
            raise OrderViolation(f"frame {f.idx} has more than {n} macroblocks", lineno)
        want = (self.expected % f.width_mb, self.expected // f.width_mb)
        if (rec.x, rec.y) != want:
            raise OrderViolation(f"macroblock ({rec.x}, {rec.y}) out of scanline order, expected {want}", lineno)
        if isinstance(rec.pred, Inter):
            try:
                validate_partitioning(rec.pred.parts)
            except InvalidPartition as exc:
                raise SchemaViolation(str(exc), lineno) from None
        elif not isinstance(rec.pred, Intra):
            raise SchemaViolation(f"unknown prediction {rec.pred!r}", lineno)
        self.expected += 1


def _fields(kind, tokens, lineno):
    names = _FIELDS[kind]
    out = {}
    for tok in tokens:
        key, sep, val = tok.partition("=")
        if not sep:
            raise TraceSyntaxError(f"expected key=value, got {tok!r}", lineno)
        if key not in names:
            raise SchemaViolation(f"unknown key {key!r} in {kind!r} record", lineno)
        if key in out:
            raise SchemaViolation(f"duplicate key {key!r}", lineno)
        out[key] = val
    missing = [k for k in names if k not in out]
    if missing:
        raise SchemaViolation(f"missing keys {missing} in {kind!r} record", lineno)
    for key, val in out.items():
        if key == "refs":
            continue
        if not _INT.match(val):
            raise TraceSyntaxError(f"{key}={val!r} is not a decimal integer", lineno)
        out[key] = int(val)
    return out


def _refs(text, lineno):
    if not text:
        return frozenset()
    names = text.split(",")
    bad = [n for n in names if n not in NEIGHBORS]
    if bad:
        raise SchemaViolation(f"unknown intra neighbours {bad}", lineno)
    if len(set(names)) != len(names):
        raise SchemaViolation(f"repeated intra neighbour in {text!r}", lineno)
    return frozenset(names)


def _lines(source) -> Iterator[str]:
    if isinstance(source, (bytes, bytearray)):
        source = io.StringIO(bytes(source).decode("utf-8"))
    elif isinstance(source, str):
        source = io.StringIO(source)
    for line in source:
        if isinstance(line, bytes):
            line = line.decode("utf-8")
        yield line.rstrip("\r\n")


def iter_trace(source) -> Iterator:
    """Yield validated records from bytes, text, or an open (text or binary) file."""
    v = TraceValidator()
    lines = enumerate(_lines(source), 1)
    lineno = 0
    for lineno, line in lines:
        if lineno == 1:
            if line != HEADER:
                raise TraceSyntaxError(f"expected header {HEADER!r}, got {line!r}", lineno)
            continue
        m = _FAST_I.match(line)
        if m:
            rec = Mb(int(m[1]), int(m[2]), Intra(_refs(m[3], lineno)))
            v.feed(rec, lineno)
            yield rec
            continue
        tokens = line.split()
        if not tokens:
            raise TraceSyntaxError("blank line", lineno)
        kind = tokens[0]
        if kind == "F":
            d = _fields(kind, tokens[1:], lineno)
            if d["idr"] not in (0, 1):
                raise SchemaViolation(f"idr must be 0 or 1, got {d['idr']}", lineno)
            rec = FrameStart(d["idx"], bool(d["idr"]), d["w"], d["h"])
        elif kind == "I":
            d = _fields(kind, tokens[1:], lineno)
            rec = Mb(d["x"], d["y"], Intra(_refs(d["refs"], lineno)))
        elif kind == "P":
            d = _fields(kind, tokens[1:], lineno)
            n = d["parts"]
            if not 1 <= n <= 16:
                raise SchemaViolation(f"parts must be in 1..16, got {n}", lineno)
            start = lineno
            parts = []
            for _ in range(n):
                try:
                    lineno, line = next(lines)
                except StopIteration:
                    raise TraceSyntaxError(f"expected {n} partition lines", lineno) from None
                m = _FAST_P.match(line)
                if m:
                    part = InterPartition(*map(int, m.groups()))
                else:
                    ptoks = line.split()
                    if not ptoks or ptoks[0] != "p":
                        raise TraceSyntaxError(f"expected partition line, got {line!r}", lineno)
                    part = InterPartition(**_fields("p", ptoks[1:], lineno))
                try:
                    part.validate()
                except InvalidPartition as exc:
                    raise SchemaViolation(str(exc), lineno) from None
                parts.append(part)
            rec = Mb(d["x"], d["y"], Inter(tuple(parts)))
            v.feed(rec, start)
            yield rec
            continue
        elif kind == "p":
            raise TraceSyntaxError("partition line outside a P record", lineno)
        else:
            raise TraceSyntaxError(f"unknown record type {kind!r}", lineno)
        v.feed(rec, lineno)
        yield rec
    v.finish(lineno)


def parse_trace(source) -> list:
    return list(iter_trace(source))


def format_record(rec) -> str:
    if isinstance(rec, FrameStart):
        return f"F idx={rec.idx} idr={int(rec.idr)} w={rec.width_mb} h={rec.height_mb}"
    if isinstance(rec.pred, Intra):
        refs = ",".join(n for n in NEIGHBORS if n in rec.pred.refs)
        return f"I x={rec.x} y={rec.y} refs={refs}"
    lines = [f"P x={rec.x} y={rec.y} parts={len(rec.pred.parts)}"]
    for p in rec.pred.parts:
        lines.append(f"  p xo={p.xo} yo={p.yo} w={p.w} h={p.h} ref={p.ref} mvx={p.mvx} mvy={p.mvy}")
    return "\n".join(lines)


def iter_lines(records: Iterable) -> Iterator[str]:
    """Validated text lines, each ending in a newline."""
    v = TraceValidator()
    first = True
    for rec in records:
        v.feed(rec)
        if first:
            yield HEADER + "\n"
            first = False
        yield format_record(rec) + "\n"
    v.finish()


def write_trace(records: Iterable, fp=None):
    """Serialise ``records``; returns bytes, or writes to binary file ``fp``."""
    if fp is None:
        return "".join(iter_lines(records)).encode("utf-8")
    for line in iter_lines(records):
        fp.write(line.encode("utf-8"))
    return None
