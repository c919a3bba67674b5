import numpy as np
from numba import njit

# de Bruijn lookup for the index of an isolated low bit
_DEBRUIJN = 0x03F79D71B4CB0A89
_DEBRUIJN_TABLE = np.zeros(64, dtype=np.int64)
for _i in range(64):
    _DEBRUIJN_TABLE[(((1 << _i) * _DEBRUIJN) & 0xFFFFFFFFFFFFFFFF) >> 58] = _i


@njit(cache=True)
def _lowbit_index(low, table):
    return table[(low * np.uint64(0x03F79D71B4CB0A89)) >> np.uint64(58)]


@njit(cache=True)
def _popcount(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return (x * np.uint64(0x0101010101010101)) >> np.uint64(56)


@njit(cache=True)
def _closure_chunk(indptr, indices, weights, c0, c1, unit, values, table):
    nwords = (c1 - c0 + 63) // 64
    bits = np.zeros((c1, nwords), dtype=np.uint64)
    zero = np.uint64(0)
    one = np.uint64(1)
    for v in range(c1 - 1, -1, -1):
        row = bits[v]
        if v >= c0:
            r = v - c0
            row[r >> 6] |= one << np.uint64(r & 63)
        for e in range(indptr[v], indptr[v + 1]):
            w = indices[e]
            if w >= c1:
                break
            src = bits[w]
            for k in range(nwords):
                row[k] |= src[k]
        if unit:
            cnt = 0
            for k in range(nwords):
                if row[k] != zero:
                    cnt += _popcount(row[k])
            values[v] += cnt * weights[0]
        else:
            acc = values[v]
            for k in range(nwords):
                word = row[k]
                base = c0 + 64 * k
                while word != zero:
                    low = word & (~word + one)
                    acc += weights[base + _lowbit_index(low, table)]
                    word ^= low
            values[v] = acc


def closure_chunk(indptr, indices, weights, c0, c1, unit, values):
    _closure_chunk(indptr, indices, weights, c0, c1, unit, values, _DEBRUIJN_TABLE)


@njit(cache=True)
def fast_bound(indptr, indices, weights):
    n = weights.shape[0]
    out = np.empty(n, dtype=np.float64)
    for v in range(n - 1, -1, -1):
        acc = weights[v]
        for e in range(indptr[v], indptr[v + 1]):
            acc += out[indices[e]]
        out[v] = acc
    return out


@njit(cache=True)
def _worst_sweep_batch(in_indptr, in_indices, weights, s0, s1, observed, table):
    n = weights.shape[0]
    nwords = (s1 - s0 + 63) // 64
    state = np.zeros((n - s0, nwords), dtype=np.uint64)
    zero = np.uint64(0)
    one = np.uint64(1)
    for u in range(s0, n):
        row = state[u - s0]
        if u < s1:
            r = u - s0
            row[r >> 6] |= one << np.uint64(r & 63)
        for e in range(in_indptr[u], in_indptr[u + 1]):
            w = in_indices[e]
            if w < s0:
                continue
            src = state[w - s0]
            for k in range(nwords):
                row[k] |= src[k]
        wu = weights[u]
        for k in range(nwords):
            word = row[k]
            base = s0 + 64 * k
            while word != zero:
                low = word & (~word + one)
                observed[base + _lowbit_index(low, table)] += wu
                word ^= low


def worst_sweep_batch(in_indptr, in_indices, weights, s0, s1, observed):
    _worst_sweep_batch(in_indptr, in_indices, weights, s0, s1, observed, _DEBRUIJN_TABLE)


@njit(cache=True)
def propagate(in_indptr, in_indices, v, p, draws):
    n = in_indptr.shape[0] - 1
    corrupted = np.zeros(n, dtype=np.bool_)
    corrupted[v] = True
    for u in range(v + 1, n):
        for e in range(in_indptr[u], in_indptr[u + 1]):
            if corrupted[in_indices[e]] and draws[e] < p:
                corrupted[u] = True
                break
    return corrupted
