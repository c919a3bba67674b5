"""Fault injection over sealed propagation graphs.

Errors are propagated forward through the data flow independently of the
impact backends, so the two can be checked against each other: under the
worst-case rule (any corrupted input corrupts the output) the observed
corrupted weight must equal the estimated global impact, and under any
weaker rule it must not exceed it.

Probabilistic runs draw one uniform number per in-edge from numpy's PCG64
seeded with ``seed`` (``RNG_VERSION``), so an outcome is reproducible and,
for a fixed seed, monotone in ``p``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InvalidProbability
from .graph import SealedEpg, impact_exact

RNG_VERSION = "pcg64-per-edge-v1"
SWEEP_BATCH = 4096


@dataclass(frozen=True)
class InjectionOutcome:
    injected: int
    corrupted: frozenset
    impact_observed: float
    impact_estimated: float


def _outcome(g, v, mask, estimate):
    corrupted = np.flatnonzero(mask)
    observed = float(g.weights[corrupted].sum())
    return InjectionOutcome(v, frozenset(corrupted.tolist()), observed, float(estimate))


def _estimate(g, v, estimates):
    if estimates is None:
        estimates = impact_exact(g)
    return estimates[v]


def inject_worst(g: SealedEpg, v: int, estimates=None) -> InjectionOutcome:
    g._check(v)
    draws = np.zeros(g.edge_count)
    mask = kernels.propagate(g.in_indptr, g.in_indices, v, 1.0, draws)
    return _outcome(g, v, mask, _estimate(g, v, estimates))


def edge_draws(g: SealedEpg, seed: int) -> np.ndarray:
    """Uniform [0, 1) draw per in-edge, in in-edge (CSC) order."""
    return np.random.Generator(np.random.PCG64(seed)).random(g.edge_count)


def inject_prob(g: SealedEpg, v: int, p: float, seed: int, estimates=None) -> InjectionOutcome:
    """Each corrupted in-edge passes the error with probability ``p``; ``v`` itself is always corrupted."""
    g._check(v)
    if not 0.0 <= p <= 1.0:
        raise InvalidProbability(f"probability must be in [0, 1], got {p!r}")
    mask = kernels.propagate(g.in_indptr, g.in_indices, v, float(p), edge_draws(g, seed))
    return _outcome(g, v, mask, _estimate(g, v, estimates))


@dataclass(frozen=True, eq=False)
class SweepResult:
    estimated: np.ndarray
    observed: np.ndarray

    @property
    def mismatches(self) -> np.ndarray:
        """Node ids whose worst-case observed impact differs from the estimate."""
        # summation order differs between backends for non-integer weights
        return np.flatnonzero(~np.isclose(self.observed, self.estimated, rtol=1e-12, atol=0.0))

    @property
    def ok(self) -> bool:
        return self.mismatches.size == 0

    def rows(self):
        for v, (e, o) in enumerate(zip(self.estimated.tolist(), self.observed.tolist())):
            yield v, e, o


def sweep(g: SealedEpg, estimates=None, batch: int = SWEEP_BATCH) -> SweepResult:
    """Worst-case injection into every node, ``batch`` faults simulated per pass (one per bit lane)."""
    n = g.node_count
    if estimates is None:
        estimates = impact_exact(g)
    observed = np.zeros(n, dtype=np.float64)
    for s0 in range(0, n, batch):
        kernels.worst_sweep_batch(g.in_indptr, g.in_indices, g.weights, s0, min(n, s0 + batch), observed)
    return SweepResult(np.asarray(estimates, dtype=np.float64), observed)
