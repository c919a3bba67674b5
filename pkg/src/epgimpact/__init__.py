"""Worst-case error impact estimation over task-instance propagation graphs."""

from .builder import Epoch, TaskRecord, open_epoch, seal_epoch
from .faultsim import InjectionOutcome, inject_prob, inject_worst, sweep
from .graph import Epg, SealedEpg, descendants, impact, impact_exact, impact_fast_bound, impact_oracle, seal
from .h264 import ImpactReport, build_epgs, inter_coverage, intra_edges
from .records import FrameGrid, FrameStart, Inter, InterPartition, Intra, Mb
from .trace import parse_trace, write_trace
from .tracegen import GenParams, generate_trace

__version__ = "0.1.0"
