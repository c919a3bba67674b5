"""Command-line front end: ``generate``, ``analyze``, ``histogram``, ``validate``.

Exit codes: 0 ok, 2 usage error, 3 invalid input file, 4 impact bound violated.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import kernels
from .errors import EpgError, InvalidParams, ReportError
from .faultsim import inject_prob, sweep
from .graph import BACKENDS
from .h264 import build_epgs
from .report import (
    HistogramSpec, Y_SCALES, fmt_value, histogram, read_report, render_histogram, write_histogram, write_report,
)
from .trace import iter_trace, write_trace
from .tracegen import GenParams, generate_trace

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_BOUND = 0, 2, 3, 4


class InputError(Exception):
    pass


def _mix(text):
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 4 comma-separated weights, got {text!r}") from None
    if len(vals) != 4:
        raise argparse.ArgumentTypeError(f"expected 4 comma-separated weights, got {text!r}")
    return vals


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _read_bytes(path):
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _write(path, data: bytes):
    if path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        Path(path).write_bytes(data)


def _epochs(path, backend):
    data = _read_bytes(path)
    return build_epgs(iter_trace(data), backend=backend)


def cmd_generate(args) -> int:
    params = GenParams(
        frames=args.frames, width_mb=args.width_mb, height_mb=args.height_mb, gop_length=args.gop,
        p_intra_in_p_frame=args.p_intra, mv_range_qpel=args.mv_range, partition_mix=args.partition_mix,
        sub_partition_mix=args.sub_partition_mix, p_intra_ref=args.p_intra_ref, seed=args.seed,
    )
    try:
        params.validate()
    except InvalidParams as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    with open(args.output, "wb") as fp:
        write_trace(generate_trace(params), fp)
    print(f"frames {params.frames}  epochs {params.epoch_count}  nodes {params.node_count}  -> {args.output}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    rows = []
    for g, rep in _epochs(args.trace, args.backend):
        rows.extend(rep.rows())
        if len(rep):
            print(
                f"epoch {rep.epoch}: nodes {g.node_count}  edges {g.edge_count}  "
                f"impact min {fmt_value(rep.impact.min())} max {fmt_value(rep.impact.max())}",
                file=sys.stderr,
            )
    _write(args.output, write_report(rows))
    return EXIT_OK


def cmd_histogram(args) -> int:
    if args.bin_width is None and args.bins is None:
        args.bins = 50
    try:
        spec = HistogramSpec(bin_width=args.bin_width, bin_count=args.bins, y_scale=args.y_scale)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    rows = read_report(_read_bytes(args.report))
    try:
        h = histogram([r[4] for r in rows], spec)
    except ReportError:
        raise
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.output:
        _write(args.output, write_histogram(h))
    sys.stdout.write(render_histogram(h, spec.y_scale, args.width))
    return EXIT_OK


def cmd_validate(args) -> int:
    if not 0.0 <= args.p <= 1.0:
        print(f"error: --p must be in [0, 1], got {args.p}", file=sys.stderr)
        return EXIT_USAGE
    failed = False
    pick = np.random.Generator(np.random.PCG64(args.seed))
    for g, rep in _epochs(args.trace, "exact"):
        if args.mode == "worst":
            res = sweep(g, rep.impact)
            bad = int(res.mismatches.size)
            print(f"epoch {rep.epoch}: nodes {g.node_count}  worst-case mismatches {bad}")
        else:
            bad = 0
            if g.node_count:
                for v, s in zip(pick.integers(0, g.node_count, args.samples), pick.integers(0, 2**63, args.samples)):
                    out = inject_prob(g, int(v), args.p, int(s), rep.impact)
                    bad += out.impact_observed > out.impact_estimated
            print(f"epoch {rep.epoch}: nodes {g.node_count}  samples {args.samples}  bound violations {bad}")
        failed |= bad > 0
    if failed:
        print("FAIL: observed impact disagrees with the estimate", file=sys.stderr)
        return EXIT_BOUND
    print("ok")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="epgimpact", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s 0.1.0 ({kernels.BACKEND} kernels)")
    sub = ap.add_subparsers(dest="command", required=True)

    d = GenParams()
    g = sub.add_parser("generate", help="write a seeded synthetic macroblock trace")
    g.add_argument("-o", "--output", required=True)
    g.add_argument("--seed", type=int, default=d.seed)
    g.add_argument("--frames", type=_positive_int, default=d.frames)
    g.add_argument("--width-mb", type=_positive_int, default=d.width_mb)
    g.add_argument("--height-mb", type=_positive_int, default=d.height_mb)
    g.add_argument("--gop", type=_positive_int, default=d.gop_length, help="frames per IDR period")
    g.add_argument("--p-intra", type=float, default=d.p_intra_in_p_frame, help="intra probability in P frames")
    g.add_argument("--mv-range", type=int, default=d.mv_range_qpel, help="max |mv| component, quarter-pel")
    g.add_argument("--partition-mix", type=_mix, default=d.partition_mix, help="weights for 16x16,16x8,8x16,8x8")
    g.add_argument("--sub-partition-mix", type=_mix, default=d.sub_partition_mix, help="weights for 8x8,8x4,4x8,4x4")
    g.add_argument("--p-intra-ref", type=float, default=d.p_intra_ref, help="chance each available neighbour is referenced")
    g.set_defaults(func=cmd_generate)

    a = sub.add_parser("analyze", help="compute per-macroblock global impact")
    a.add_argument("trace")
    a.add_argument("-o", "--output", default="-")
    a.add_argument("--backend", choices=BACKENDS, default="exact")
    a.set_defaults(func=cmd_analyze)

    h = sub.add_parser("histogram", help="bin an impact report")
    h.add_argument("report")
    h.add_argument("-o", "--output")
    grp = h.add_mutually_exclusive_group()
    grp.add_argument("--bin-width", type=float)
    grp.add_argument("--bins", type=int)
    h.add_argument("--y-scale", choices=Y_SCALES, default="sqrt")
    h.add_argument("--width", type=_positive_int, default=60, help="longest bar in characters")
    h.set_defaults(func=cmd_histogram)

    v = sub.add_parser("validate", help="check the estimate against fault injection")
    v.add_argument("trace")
    v.add_argument("--mode", choices=("worst", "prob"), default="worst")
    v.add_argument("--p", type=float, default=0.5)
    v.add_argument("--samples", type=_positive_int, default=100, help="injections per epoch in prob mode")
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_validate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        code = args.func(args)
    except (EpgError, InputError, UnicodeDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.command in ("analyze", "validate"):
        print(f"[{args.command}: {time.perf_counter() - t0:.2f}s, {kernels.BACKEND} kernels]", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
