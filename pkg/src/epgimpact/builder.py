"""Build propagation graphs from tasks that read input channels and write one output channel."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable

from .errors import ChannelRewrite, SealedEpoch, UnknownChannel
from .graph import Epg, impact


@dataclass(frozen=True)
class TaskRecord:
    output: Hashable
    inputs: frozenset = field(default_factory=frozenset)
    m_local: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "inputs", frozenset(self.inputs))
        if self.output in self.inputs:
            raise ValueError(f"task consumes its own output channel {self.output!r}")


class Epoch:
    """One graph-completion window.

    Channels read before any task in the epoch produced them are external
    input and add no edge, unless ``strict`` is set.
    """

    def __init__(self, strict: bool = False):
        self.strict = strict
        self._graph = Epg()
        self._producer: dict = {}
        self._sealed = False

    @property
    def node_count(self) -> int:
        return self._graph.node_count

    @property
    def graph(self) -> Epg:
        return self._graph

    def producer(self, channel):
        return self._producer.get(channel)

    def add_task(self, task: TaskRecord) -> int:
        if self._sealed:
            raise SealedEpoch("epoch already sealed")
        if task.output in self._producer:
            raise ChannelRewrite(f"channel {task.output!r} already written in this epoch")
        srcs = []
        for ch in task.inputs:
            p = self._producer.get(ch)
            if p is not None:
                srcs.append(p)
            elif self.strict:
                raise UnknownChannel(ch)
        node = self._graph.add_node(task.m_local)
        for p in sorted(srcs):
            self._graph.add_edge(p, node)
        self._producer[task.output] = node
        return node

    def seal(self, backend: str = "exact"):
        """Freeze the epoch; returns ``(SealedEpg, impacts)``."""
        if self._sealed:
            raise SealedEpoch("epoch already sealed")
        self._sealed = True
        g = self._graph.seal()
        return g, impact(g, backend)


def open_epoch(strict: bool = False) -> Epoch:
    return Epoch(strict=strict)


def seal_epoch(epoch: Epoch, backend: str = "exact"):
    return epoch.seal(backend)
