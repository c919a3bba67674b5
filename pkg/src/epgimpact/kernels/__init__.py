"""Hot loops, compiled with numba unless ``EPGIMPACT_DISABLE_JIT`` is set.

Both implementations expose the same functions over CSR arrays
(``indptr``/``indices`` with ascending neighbour ids per row):

``closure_chunk(indptr, indices, weights, c0, c1, unit, values)``
    add to ``values[v]`` the weight of every node in ``[c0, c1)`` that is
    ``v`` itself or a descendant of ``v``.
``fast_bound(indptr, indices, weights)``
    per-node sum over out-neighbour bounds (shared descendants counted twice).
``worst_sweep_batch(in_indptr, in_indices, weights, s0, s1, observed)``
    bit-parallel forward propagation of single faults injected at
    ``s0 .. s1-1``, one fault per bit lane; writes corrupted weight sums.
``propagate(in_indptr, in_indices, v, p, draws)``
    forward propagation of one fault; in-edge ``e`` passes the error iff
    ``draws[e] < p``. Returns a boolean corrupted mask.
"""

import os

_FLAG = "EPGIMPACT_DISABLE_JIT"


def _jit_requested():
    return os.environ.get(_FLAG, "").strip().lower() not in ("1", "true", "yes", "on")


JIT_ENABLED = False
if _jit_requested():
    try:
        from . import jit as impl
        JIT_ENABLED = True
    except ImportError:  # numba missing
        from . import numpy_impl as impl
else:
    from . import numpy_impl as impl

closure_chunk = impl.closure_chunk
fast_bound = impl.fast_bound
worst_sweep_batch = impl.worst_sweep_batch
propagate = impl.propagate

BACKEND = "numba" if JIT_ENABLED else "numpy"
