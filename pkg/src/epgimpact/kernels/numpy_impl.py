import numpy as np

_ROW_BLOCK = 1024


def _lane_matrix(words, nbits):
    """Expand rows of uint64 words into a (rows, nbits) 0/1 matrix, bit i of the row at column i."""
    as_bytes = np.ascontiguousarray(words, dtype="<u8").view(np.uint8)
    return np.unpackbits(as_bytes, axis=1, bitorder="little")[:, :nbits]


def closure_chunk(indptr, indices, weights, c0, c1, unit, values):
    nwords = (c1 - c0 + 63) // 64
    bits = np.zeros((c1, nwords), dtype=np.uint64)
    for v in range(c1 - 1, -1, -1):
        nbrs = indices[indptr[v]:indptr[v + 1]]
        nbrs = nbrs[nbrs < c1]
        if nbrs.size:
            bits[v] = np.bitwise_or.reduce(bits[nbrs], axis=0)
        if v >= c0:
            r = v - c0
            bits[v, r >> 6] |= np.uint64(1) << np.uint64(r & 63)
    if unit:
        values[:c1] += np.bitwise_count(bits).sum(axis=1, dtype=np.int64) * weights[0]
        return
    w = weights[c0:c1]
    for b0 in range(0, c1, _ROW_BLOCK):
        b1 = min(c1, b0 + _ROW_BLOCK)
        values[b0:b1] += _lane_matrix(bits[b0:b1], c1 - c0) @ w


def fast_bound(indptr, indices, weights):
    n = weights.shape[0]
    out = np.empty(n, dtype=np.float64)
    for v in range(n - 1, -1, -1):
        out[v] = weights[v] + out[indices[indptr[v]:indptr[v + 1]]].sum()
    return out


def worst_sweep_batch(in_indptr, in_indices, weights, s0, s1, observed):
    n = weights.shape[0]
    lanes = s1 - s0
    nwords = (lanes + 63) // 64
    state = np.zeros((n - s0, nwords), dtype=np.uint64)
    for u in range(s0, n):
        preds = in_indices[in_indptr[u]:in_indptr[u + 1]]
        preds = preds[preds >= s0]
        if preds.size:
            state[u - s0] = np.bitwise_or.reduce(state[preds - s0], axis=0)
        if u < s1:
            r = u - s0
            state[u - s0, r >> 6] |= np.uint64(1) << np.uint64(r & 63)
    w = weights[s0:]
    for b0 in range(0, n - s0, _ROW_BLOCK):
        b1 = min(n - s0, b0 + _ROW_BLOCK)
        observed[s0:s1] += w[b0:b1] @ _lane_matrix(state[b0:b1], lanes)


def propagate(in_indptr, in_indices, v, p, draws):
    n = in_indptr.shape[0] - 1
    corrupted = np.zeros(n, dtype=np.bool_)
    corrupted[v] = True
    passes = draws < p
    for u in range(v + 1, n):
        a, b = in_indptr[u], in_indptr[u + 1]
        if np.any(corrupted[in_indices[a:b]] & passes[a:b]):
            corrupted[u] = True
    return corrupted
