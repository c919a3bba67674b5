import subprocess
import sys
from pathlib import Path

import pytest

from epgimpact.cli import main
from epgimpact.report import read_report

GOLDEN = Path(__file__).parent / "golden"
SMALL = ["--seed", "7", "--frames", "4", "--width-mb", "3", "--height-mb", "2", "--gop", "2"]


def run(*argv):
    return main([str(a) for a in argv])


def test_generate_matches_golden(tmp_path, capsys):
    out = tmp_path / "t.trace"
    assert run("generate", *SMALL, "-o", out) == 0
    assert out.read_bytes() == (GOLDEN / "small.trace").read_bytes()
    assert "epochs 2" in capsys.readouterr().out


def test_generate_usage_errors(tmp_path):
    with pytest.raises(SystemExit) as info:
        run("generate", "--frames", "0", "-o", tmp_path / "x")
    assert info.value.code == 2
    assert run("generate", "--p-intra", "2", "-o", tmp_path / "x") == 2
    with pytest.raises(SystemExit) as info:
        run("generate", "--partition-mix", "1,2", "-o", tmp_path / "x")
    assert info.value.code == 2


@pytest.mark.parametrize("backend", ["exact", "oracle"])
def test_analyze_matches_golden(tmp_path, backend):
    out = tmp_path / "r.csv"
    assert run("analyze", GOLDEN / "small.trace", "--backend", backend, "-o", out) == 0
    assert out.read_bytes() == (GOLDEN / "small_report.csv").read_bytes()


def test_analyze_fast_bounds_exact(tmp_path):
    out = tmp_path / "r.csv"
    assert run("analyze", GOLDEN / "small.trace", "--backend", "fast", "-o", out) == 0
    fast = read_report(out.read_bytes())
    exact = read_report((GOLDEN / "small_report.csv").read_bytes())
    assert [r[:4] for r in fast] == [r[:4] for r in exact]
    assert all(f[4] >= e[4] for f, e in zip(fast, exact))


def test_analyze_small_fixtures(tmp_path):
    one = tmp_path / "one.trace"
    one.write_text("epgtrace v1\nF idx=0 idr=1 w=1 h=1\nI x=0 y=0 refs=\n")
    out = tmp_path / "r.csv"
    assert run("analyze", one, "-o", out) == 0
    assert out.read_text() == "epoch,frame,mb_x,mb_y,m_global\n0,0,0,0,1\n"
    assert run("analyze", GOLDEN / "chain.trace", "-o", out) == 0
    assert [r[4] for r in read_report(out.read_bytes())] == [2, 1]


def test_analyze_bad_trace_exit_3(tmp_path, capsys):
    bad = tmp_path / "bad.trace"
    bad.write_text("epgtrace v1\nF idx=0 idr=1 w=1 h=1\nP x=0 y=0 parts=1\n  p xo=0 yo=0 w=7 h=16 ref=1 mvx=0 mvy=0\n")
    assert run("analyze", bad, "-o", tmp_path / "r.csv") == 3
    assert "line 4" in capsys.readouterr().err
    assert run("analyze", tmp_path / "missing.trace") == 3


def test_histogram_matches_golden(tmp_path, capsys):
    out = tmp_path / "h.csv"
    assert run("histogram", GOLDEN / "small_report.csv", "--bin-width", "1", "-o", out) == 0
    assert out.read_bytes() == (GOLDEN / "small_hist.csv").read_bytes()
    text = capsys.readouterr().out
    assert "sqrt y-scale" in text and "[8, 8]" in text


def test_histogram_empty_and_malformed(tmp_path):
    empty = tmp_path / "e.csv"
    empty.write_text("epoch,frame,mb_x,mb_y,m_global\n")
    out = tmp_path / "h.csv"
    assert run("histogram", empty, "--bin-width", "1", "-o", out) == 0
    assert out.read_text() == "bin_low,bin_high,count\n"
    bad = tmp_path / "b.csv"
    bad.write_text("nope\n")
    assert run("histogram", bad) == 3
    assert run("histogram", GOLDEN / "small_report.csv", "--bin-width", "1e-9") == 2


def test_validate(tmp_path, capsys):
    assert run("validate", GOLDEN / "small.trace") == 0
    assert "worst-case mismatches 0" in capsys.readouterr().out
    assert run("validate", GOLDEN / "small.trace", "--mode", "prob", "--p", "0.5", "--samples", "10", "--seed", "7") == 0
    assert "bound violations 0" in capsys.readouterr().out
    bad = tmp_path / "bad.trace"
    bad.write_bytes(b"\xff\xfe garbage")
    assert run("validate", bad) == 3
    assert run("validate", GOLDEN / "small.trace", "--p", "3") == 2


def test_validate_reports_bound_violation(tmp_path, monkeypatch):
    import epgimpact.cli as cli
    from epgimpact.faultsim import sweep as real_sweep

    monkeypatch.setattr(cli, "sweep", lambda g, est: real_sweep(g, est - 1))
    assert run("validate", GOLDEN / "small.trace") == 4


def test_module_entry_point(tmp_path):
    out = tmp_path / "r.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "epgimpact", "analyze", str(GOLDEN / "chain.trace"), "-o", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert out.read_text().splitlines()[1:] == ["0,0,0,0,2", "0,1,0,0,1"]


def test_end_to_end_deterministic(tmp_path):
    outputs = []
    for k in range(2):
        d = tmp_path / str(k)
        d.mkdir()
        assert run("generate", "--seed", "3", "--frames", "6", "--width-mb", "5", "--height-mb", "4", "--gop", "3",
                   "-o", d / "t.trace") == 0
        assert run("analyze", d / "t.trace", "-o", d / "r.csv") == 0
        assert run("histogram", d / "r.csv", "--bins", "7", "-o", d / "h.csv") == 0
        outputs.append([(d / f).read_bytes() for f in ("t.trace", "r.csv", "h.csv")])
    assert outputs[0] == outputs[1]
