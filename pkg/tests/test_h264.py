import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from epgimpact.errors import (
    GridMismatch, InvalidPartition, NonScanlineOrder, OrderViolation, OutOfGrid, RefCrossesIdr,
)
from epgimpact.graph import impact_oracle
from epgimpact.h264 import build_epgs, inter_coverage, intra_edges
from epgimpact.records import (
    PARTITION_SIZES, FrameGrid, FrameStart, Inter, InterPartition, Intra, Mb, validate_partitioning,
)

ALL4 = {"TL", "T", "TR", "L"}


def pixel_coverage(grid, mb, p):
    """Enumerate every filter tap of every predicted sample and map it to its macroblock."""
    taps_x = range(-2, 4) if p.mvx % 4 else (0,)
    taps_y = range(-2, 4) if p.mvy % 4 else (0,)
    out = set()
    for py in range(p.h):
        for px in range(p.w):
            ix = 16 * mb[0] + p.xo + px + math.floor(p.mvx / 4)
            iy = 16 * mb[1] + p.yo + py + math.floor(p.mvy / 4)
            for tx in taps_x:
                for ty in taps_y:
                    sx = min(max(ix + tx, 0), grid.width_px - 1)
                    sy = min(max(iy + ty, 0), grid.height_px - 1)
                    out.add((sx // 16, sy // 16))
    return out


def test_intra_examples():
    g = FrameGrid(10, 10)
    assert intra_edges(g, (0, 0), ALL4) == set()
    assert intra_edges(g, (3, 2), ALL4) == {(2, 1), (3, 1), (4, 1), (2, 2)}
    assert intra_edges(g, (9, 1), {"TR"}) == set()
    with pytest.raises(OutOfGrid):
        intra_edges(g, (10, 0), ALL4)


def test_inter_examples():
    g = FrameGrid(4, 4)
    assert inter_coverage(g, (1, 1), InterPartition(0, 0, 16, 16, 1, 0, 0)) == {(1, 1)}
    p = InterPartition(0, 0, 16, 16, 1, 4, 4)
    assert inter_coverage(g, (0, 0), p) == {(0, 0), (0, 1), (1, 0), (1, 1)} == pixel_coverage(g, (0, 0), p)
    q = InterPartition(0, 0, 4, 4, 1, -2, -2)
    assert inter_coverage(g, (2, 2), q) == {(1, 1), (1, 2), (2, 1), (2, 2)} == pixel_coverage(g, (2, 2), q)


def test_inter_rejects_bad_partition():
    with pytest.raises(InvalidPartition):
        inter_coverage(FrameGrid(2, 2), (0, 0), InterPartition(0, 0, 7, 4, 1, 0, 0))
    with pytest.raises(InvalidPartition):
        inter_coverage(FrameGrid(2, 2), (0, 0), InterPartition(12, 0, 8, 8, 1, 0, 0))


def test_sixteen_by_sixteen_fractional_covers_nine():
    g = FrameGrid(5, 5)
    cov = inter_coverage(g, (2, 2), InterPartition(0, 0, 16, 16, 1, 1, 1))
    assert len(cov) == 9


@settings(max_examples=300, deadline=None)
@given(
    st.sampled_from(sorted(PARTITION_SIZES)),
    st.integers(0, 3), st.integers(0, 3),
    st.integers(1, 4), st.integers(1, 4),
    st.integers(-200, 200), st.integers(-200, 200),
    st.data(),
)
def test_inter_matches_pixel_enumeration(size, ox, oy, gw, gh, mvx, mvy, data):
    w, h = size
    xo = (ox * 4) // w * w
    yo = (oy * 4) // h * h
    grid = FrameGrid(gw, gh)
    mb = (data.draw(st.integers(0, gw - 1)), data.draw(st.integers(0, gh - 1)))
    p = InterPartition(xo, yo, w, h, 1, mvx, mvy)
    cov = inter_coverage(grid, mb, p)
    assert cov == pixel_coverage(grid, mb, p)
    assert all(0 <= x < gw and 0 <= y < gh for x, y in cov)


def test_partitioning_validation():
    validate_partitioning([InterPartition(0, 0, 16, 16, 1, 0, 0)])
    validate_partitioning([InterPartition(x, y, 4, 4, 1, 0, 0) for y in range(0, 16, 4) for x in range(0, 16, 4)])
    with pytest.raises(InvalidPartition):
        validate_partitioning([InterPartition(0, 0, 16, 8, 1, 0, 0)])
    with pytest.raises(InvalidPartition):
        validate_partitioning([InterPartition(0, 0, 16, 8, 1, 0, 0)] * 2)
    with pytest.raises(InvalidPartition):
        validate_partitioning([InterPartition(0, 0, 16, 16, 0, 0, 0)])


def one_mb_frames(*kinds):
    recs = []
    for i, (idr, pred) in enumerate(kinds):
        recs += [FrameStart(i, idr, 1, 1), Mb(0, 0, pred)]
    return recs


FULL = Inter((InterPartition(0, 0, 16, 16, 1, 0, 0),))


def test_build_single_idr():
    out = list(build_epgs(one_mb_frames((True, Intra()))))
    assert len(out) == 1
    assert out[0][1].impact.tolist() == [1]


def test_build_two_frame_chain():
    (g, rep), = build_epgs(one_mb_frames((True, Intra()), (False, FULL)))
    assert list(g.edges()) == [(0, 1)]
    assert rep.impact.tolist() == [2, 1] == impact_oracle(g).tolist()
    assert list(rep.rows()) == [(0, 0, 0, 0, 2.0), (0, 1, 0, 0, 1.0)]


def test_build_idr_splits():
    out = list(build_epgs(one_mb_frames((True, Intra()), (True, Intra()))))
    assert [r.impact.tolist() for _, r in out] == [[1], [1]]
    assert [r.epoch for _, r in out] == [0, 1]


def test_inter_in_idr_frame_crosses():
    with pytest.raises(RefCrossesIdr):
        list(build_epgs(one_mb_frames((True, Intra()), (True, FULL))))


def test_ref_offset_past_epoch():
    far = Inter((InterPartition(0, 0, 16, 16, 2, 0, 0),))
    with pytest.raises(RefCrossesIdr):
        list(build_epgs(one_mb_frames((True, Intra()), (False, far))))
    (g, rep), = build_epgs(one_mb_frames((True, Intra()), (False, FULL), (False, far)))
    assert sorted(g.edges()) == [(0, 1), (0, 2)]
    assert rep.impact.tolist() == [3, 1, 1]


def test_grid_mismatch_and_order():
    recs = one_mb_frames((True, Intra())) + [FrameStart(1, False, 2, 1), Mb(0, 0, Intra()), Mb(1, 0, Intra())]
    with pytest.raises(GridMismatch):
        list(build_epgs(recs))
    recs = [FrameStart(0, True, 2, 1), Mb(1, 0, Intra()), Mb(0, 0, Intra())]
    with pytest.raises(NonScanlineOrder):
        list(build_epgs(recs))
    with pytest.raises(NonScanlineOrder):
        list(build_epgs([FrameStart(0, True, 2, 1), Mb(0, 0, Intra())]))
    with pytest.raises(OrderViolation):
        list(build_epgs([FrameStart(0, False, 1, 1), Mb(0, 0, Intra())]))


def test_intra_edges_in_frame():
    # 2x2 frame, every macroblock references all neighbours
    recs = [FrameStart(0, True, 2, 2)] + [Mb(x, y, Intra(ALL4)) for y in range(2) for x in range(2)]
    (g, rep), = build_epgs(recs)
    assert sorted(g.edges()) == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    assert rep.impact.tolist() == [4, 3, 2, 1]


def test_multiplicity_counts_references():
    parts = tuple(InterPartition(x, y, 8, 8, 1, 0, 0) for y in (0, 8) for x in (0, 8))
    (g, _), = build_epgs(one_mb_frames((True, Intra()), (False, Inter(parts))))
    assert g.edge_count == 1
    assert g.reference_count == 4


def test_unreferenced_macroblocks_have_unit_impact():
    from epgimpact.tracegen import GenParams, generate_trace

    for g, rep in build_epgs(generate_trace(GenParams(frames=6, width_mb=5, height_mb=4, gop_length=3, seed=1))):
        sinks = np.diff(g.indptr) == 0
        assert np.all(rep.impact[sinks] == 1)
        assert np.all(rep.impact >= 1)
        assert rep.impact.max() <= g.node_count
        assert np.all(rep.impact == np.round(rep.impact))
