"""Error propagation graphs and per-node global impact.

Nodes are task instances added in a causal (topological) order, so every
edge must point from a lower to a strictly higher node id. The global impact
of a node is its own local weight plus the weights of all distinct
descendants, i.e. the output an error in that task can reach under the
worst-case assumption that any corrupted input corrupts the output.

Three backends compute it:

* :func:`impact_oracle` - one traversal per node, quadratic, reference only.
* :func:`impact_exact` - reverse-order bitset closure, chunked over node ranges.
* :func:`impact_fast_bound` - linear recurrence that double counts shared
  descendants; an upper bound of the exact value.
"""

from __future__ import annotations

import math
from array import array
from collections import deque
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ForwardEdgeViolation, NegativeWeight, SealedGraph, UnknownNode

DEFAULT_CHUNK = 4096
BACKENDS = ("oracle", "exact", "fast")


class Epg:
    """Graph under construction. Single writer; call :meth:`seal` when complete.

    Edges are stored as inserted; duplicates collapse at sealing time and
    their insertion count is kept as the edge multiplicity.
    """

    def __init__(self):
        self._weights = array("d")
        self._src = array("q")
        self._dst = array("q")
        self._sealed = False

    def __len__(self):
        return len(self._weights)

    @property
    def node_count(self) -> int:
        return len(self._weights)

    @property
    def edge_count(self) -> int:
        return len(self._pairs()[0])

    @property
    def sealed(self) -> bool:
        return self._sealed

    def add_node(self, m_local: float = 1.0) -> int:
        if self._sealed:
            raise SealedGraph("graph is sealed")
        m_local = float(m_local)
        if not (math.isfinite(m_local) and m_local >= 0.0):
            raise NegativeWeight(f"local impact must be finite and >= 0, got {m_local!r}")
        self._weights.append(m_local)
        return len(self._weights) - 1

    def add_edge(self, src: int, dst: int) -> None:
        if self._sealed:
            raise SealedGraph("graph is sealed")
        n = len(self._weights)
        if not (0 <= src < n and 0 <= dst < n):
            raise UnknownNode(f"edge ({src}, {dst}) references a node outside [0, {n})")
        if src >= dst:
            raise ForwardEdgeViolation(f"edge ({src}, {dst}) does not go forward in insertion order")
        self._src.append(src)
        self._dst.append(dst)

    def add_edges(self, srcs, dsts) -> None:
        """Vectorised :meth:`add_edge`; nothing is inserted if any pair is invalid."""
        if self._sealed:
            raise SealedGraph("graph is sealed")
        srcs = np.asarray(srcs, dtype=np.int64).ravel()
        dsts = np.asarray(dsts, dtype=np.int64).ravel()
        if srcs.shape != dsts.shape:
            raise ValueError("srcs and dsts differ in length")
        if srcs.size == 0:
            return
        n = len(self._weights)
        bad = (srcs < 0) | (srcs >= n) | (dsts < 0) | (dsts >= n)
        if bad.any():
            i = int(np.argmax(bad))
            raise UnknownNode(f"edge ({srcs[i]}, {dsts[i]}) references a node outside [0, {n})")
        back = srcs >= dsts
        if back.any():
            i = int(np.argmax(back))
            raise ForwardEdgeViolation(f"edge ({srcs[i]}, {dsts[i]}) does not go forward in insertion order")
        self._src.extend(srcs.tolist())
        self._dst.extend(dsts.tolist())

    def multiplicity(self, src: int, dst: int) -> int:
        src_arr = np.frombuffer(self._src, dtype=np.int64)
        dst_arr = np.frombuffer(self._dst, dtype=np.int64)
        return int(np.count_nonzero((src_arr == src) & (dst_arr == dst)))

    def _pairs(self):
        n = max(len(self._weights), 1)
        key = np.frombuffer(self._src, dtype=np.int64) * n + np.frombuffer(self._dst, dtype=np.int64)
        uniq, counts = np.unique(key, return_counts=True)
        return uniq // n, uniq % n, counts

    def seal(self) -> SealedEpg:
        self._sealed = True
        n = len(self._weights)
        src, dst, mult = self._pairs()
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        weights = np.array(self._weights, dtype=np.float64)
        return SealedEpg._from_csr(weights, indptr, dst.astype(np.int64), mult.astype(np.int64))


def seal(g: Epg) -> SealedEpg:
    return g.seal()


def _frozen(a):
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SealedEpg:
    """Immutable graph in CSR form, with the reverse (in-edge) CSR alongside."""

    weights: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    multiplicity: np.ndarray
    in_indptr: np.ndarray
    in_indices: np.ndarray

    @classmethod
    def _from_csr(cls, weights, indptr, indices, multiplicity):
        n = weights.shape[0]
        src = np.repeat(np.arange(n, dtype=np.int64), np.diff(indptr))
        order = np.lexsort((src, indices))
        in_indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(indices, minlength=n), out=in_indptr[1:])
        return cls(
            _frozen(weights), _frozen(indptr), _frozen(indices), _frozen(multiplicity),
            _frozen(in_indptr), _frozen(src[order]),
        )

    @classmethod
    def from_edges(cls, weights, edges) -> SealedEpg:
        """Convenience constructor: ``weights`` per node, iterable of ``(src, dst)``."""
        g = Epg()
        for w in weights:
            g.add_node(w)
        for s, d in edges:
            g.add_edge(s, d)
        return g.seal()

    @property
    def node_count(self) -> int:
        return self.weights.shape[0]

    @property
    def edge_count(self) -> int:
        return self.indices.shape[0]

    @property
    def reference_count(self) -> int:
        """Edge insertions including duplicates."""
        return int(self.multiplicity.sum())

    def successors(self, v: int) -> np.ndarray:
        self._check(v)
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def predecessors(self, v: int) -> np.ndarray:
        self._check(v)
        return self.in_indices[self.in_indptr[v]:self.in_indptr[v + 1]]

    def edges(self):
        for v in range(self.node_count):
            for w in self.indices[self.indptr[v]:self.indptr[v + 1]]:
                yield v, int(w)

    def _check(self, v):
        if not 0 <= v < self.node_count:
            raise UnknownNode(f"node {v} not in [0, {self.node_count})")


def descendants(g: SealedEpg, v: int) -> set[int]:
    """Forward-reachable nodes of ``v``, excluding ``v``. Plain BFS."""
    g._check(v)
    indptr = g.indptr
    indices = g.indices
    seen = {v}
    queue = deque([v])
    while queue:
        u = queue.popleft()
        for w in indices[indptr[u]:indptr[u + 1]].tolist():
            if w not in seen:
                seen.add(w)
                queue.append(w)
    seen.discard(v)
    return seen


def impact_oracle(g: SealedEpg) -> np.ndarray:
    """Reference impacts: one independent traversal per node."""
    n = g.node_count
    adj = [g.indices[g.indptr[v]:g.indptr[v + 1]].tolist() for v in range(n)]
    weights = g.weights.tolist()
    out = np.empty(n, dtype=np.float64)
    for v in range(n):
        seen = bytearray(n)
        seen[v] = 1
        stack = [v]
        while stack:
            for w in adj[stack.pop()]:
                if not seen[w]:
                    seen[w] = 1
                    stack.append(w)
        # ascending index order, matching the accumulation order of impact_exact
        acc = 0.0
        for u in range(v, n):
            if seen[u]:
                acc += weights[u]
        out[v] = acc
    return out


def impact_exact(g: SealedEpg, chunk_size: int = DEFAULT_CHUNK) -> np.ndarray:
    """Exact impacts via reachability bitsets, ``chunk_size`` target nodes at a time.

    Peak bitset memory is about ``node_count * chunk_size / 8`` bytes.
    """
    if chunk_size < 1:
        raise ValueError("chunk_size must be >= 1")
    n = g.node_count
    values = np.zeros(n, dtype=np.float64)
    if n == 0:
        return values
    w = g.weights
    unit = bool(np.all(w == w[0]))
    for c0 in range(0, n, chunk_size):
        kernels.closure_chunk(g.indptr, g.indices, w, c0, min(n, c0 + chunk_size), unit, values)
    return values


def impact_fast_bound(g: SealedEpg) -> np.ndarray:
    if g.node_count == 0:
        return np.zeros(0, dtype=np.float64)
    return kernels.fast_bound(g.indptr, g.indices, g.weights)


def impact(g: SealedEpg, backend: str = "exact") -> np.ndarray:
    if backend == "exact":
        return impact_exact(g)
    if backend == "oracle":
        return impact_oracle(g)
    if backend == "fast":
        return impact_fast_bound(g)
    raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
