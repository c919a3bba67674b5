import numpy as np
import pytest

from epgimpact import kernels
from epgimpact.graph import SealedEpg
from epgimpact.kernels import jit, numpy_impl

KERNEL_FUNCS = ("closure_chunk", "fast_bound", "worst_sweep_batch", "propagate")


@pytest.fixture(params=["numba", "numpy"])
def kernel_impl(request, monkeypatch):
    """Run the test once per kernel implementation."""
    impl = jit if request.param == "numba" else numpy_impl
    for name in KERNEL_FUNCS:
        monkeypatch.setattr(kernels, name, getattr(impl, name))
    return request.param


def random_dag(rng, n, mean_out_degree, weights=None):
    if weights is None:
        weights = np.ones(n)
    if n < 2:
        return SealedEpg.from_edges(weights, [])
    src, dst = np.triu_indices(n, 1)
    keep = rng.random(src.size) < min(1.0, mean_out_degree / n * 2)
    return SealedEpg.from_edges(weights, zip(src[keep].tolist(), dst[keep].tolist()))


def random_forest(rng, n, weights=None):
    """Out-forest: every node has at most one parent, always a lower id."""
    if weights is None:
        weights = np.ones(n)
    edges = []
    for v in range(1, n):
        if rng.random() < 0.9:
            edges.append((int(rng.integers(0, v)), v))
    return SealedEpg.from_edges(weights, edges)


@pytest.fixture
def diamond():
    return SealedEpg.from_edges([1, 1, 1, 1], [(0, 1), (0, 2), (1, 3), (2, 3)])


@pytest.fixture
def chain3():
    return SealedEpg.from_edges([1, 1, 1], [(0, 1), (1, 2)])


@pytest.fixture(scope="session")
def full_scale_trace():
    """Records of the default full-scale workload (150 frames, 40x30, GOP 30, seed 42)."""
    from epgimpact.tracegen import GenParams, generate_trace

    return list(generate_trace(GenParams()))


_CRITERIA: list[str] = []


@pytest.fixture
def criterion():
    """Record one acceptance line and fail the test if the criterion does not hold."""

    def check(number, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
        _CRITERIA.append(line)
        print(line)
        assert ok, line

    return check


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)
