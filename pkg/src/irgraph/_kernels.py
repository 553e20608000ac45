"""Numba kernels for the hot loops.

Everything here is deterministic given the uint64 seed passed in: the
kernels draw randomness from an explicit SplitMix64 counter stream rather
than global RNG state, so they are reproducible under any thread count.
All are compiled ``nogil`` so the harness can run replications on a thread
pool.
"""

from __future__ import annotations

import math

import numba as nb
import numpy as np

U64_GOLDEN = nb.uint64(0x9E3779B97F4A7C15)

MODEL_POISSON = 0
MODEL_CHUNG_LU = 1
MODEL_BDML = 2


@nb.njit(nb.uint64(nb.uint64), cache=True, inline="always", nogil=True)
def _mix64(z):
    z = (z ^ (z >> nb.uint64(30))) * nb.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> nb.uint64(27))) * nb.uint64(0x94D049BB133111EB)
    return z ^ (z >> nb.uint64(31))


@nb.njit(nb.uint64(nb.uint64, nb.uint64), cache=True, inline="always", nogil=True)
def _substream(seed, tag):
    return _mix64((seed ^ _mix64(tag + nb.uint64(1))) + U64_GOLDEN)


@nb.njit(nb.float64(nb.uint64), cache=True, inline="always", nogil=True)
def _u01(x):
    # 53-bit mantissa; value in [0, 1)
    return (x >> nb.uint64(11)) * (1.0 / 9007199254740992.0)


@nb.njit(cache=True, inline="always", nogil=True)
def _next_u01(state):
    s = state + U64_GOLDEN
    return s, _u01(_mix64(s))


# ---------------------------------------------------------------------------
# Fenwick tree over vertex weights (1-based internal indexing)
# ---------------------------------------------------------------------------


@nb.njit(cache=True, nogil=True)
def fenwick_build(values):
    n = values.shape[0]
    tree = np.zeros(n + 1, np.float64)
    for i in range(1, n + 1):
        tree[i] += values[i - 1]
        j = i + (i & (-i))
        if j <= n:
            tree[j] += tree[i]
    return tree


@nb.njit(cache=True, inline="always", nogil=True)
def fenwick_add(tree, i, delta):
    n = tree.shape[0] - 1
    j = i
    while j <= n:
        tree[j] += delta
        j += j & (-j)


@nb.njit(cache=True, inline="always", nogil=True)
def fenwick_total(tree):
    n = tree.shape[0] - 1
    s = 0.0
    j = n
    while j > 0:
        s += tree[j]
        j -= j & (-j)
    return s


@nb.njit(cache=True, inline="always", nogil=True)
def fenwick_find(tree, top_bit, r):
    """Smallest 1-based index whose prefix sum exceeds ``r``."""
    n = tree.shape[0] - 1
    idx = 0
    bit = top_bit
    while bit != 0:
        nxt = idx + bit
        if nxt <= n and tree[nxt] <= r:
            idx = nxt
            r -= tree[nxt]
        bit >>= 1
    return idx + 1


@nb.njit(cache=True, inline="always", nogil=True)
def _top_bit(n):
    bit = 1
    while (bit << 1) <= n:
        bit <<= 1
    return bit


# ---------------------------------------------------------------------------
# Size-biased sampling without replacement
# ---------------------------------------------------------------------------


@nb.njit(cache=True, nogil=True)
def sbs_sequential(weights, m, seed, out):
    """Draw ``m`` indices without replacement, step probability ~ weight.

    Writes 0-based indices into ``out`` and returns the stream state so
    callers can continue the same stream.
    """
    n = weights.shape[0]
    live = weights.copy()
    tree = fenwick_build(live)
    top = _top_bit(n)
    state = seed
    for k in range(m):
        total = fenwick_total(tree)
        state, u = _next_u01(state)
        idx = fenwick_find(tree, top, u * total)
        # float residue can land on an exhausted leaf; step to the next live one
        while live[idx - 1] <= 0.0:
            idx = idx % n + 1
        out[k] = idx - 1
        fenwick_add(tree, idx, -live[idx - 1])
        live[idx - 1] = 0.0
    return state


@nb.njit(cache=True, nogil=True, parallel=False)
def sbs_sequential_many(weights, m, rounds, seed):
    """``rounds`` independent draws of the first ``m`` indices."""
    out = np.empty((rounds, m), np.int64)
    for r in range(rounds):
        sbs_sequential(weights, m, _substream(seed, nb.uint64(r)), out[r])
    return out


@nb.njit(cache=True, nogil=True)
def mean_curve_sums(weights, l_max, rounds, seed):
    """Accumulate per-position sums and squared sums of the drawn weight.

    Rebuilding the Fenwick tree once and re-adding the removed leaves after
    each round keeps a round at O(l_max log n).
    """
    n = weights.shape[0]
    live = weights.copy()
    tree = fenwick_build(live)
    top = _top_bit(n)
    removed = np.empty(l_max, np.int64)
    s1 = np.zeros(l_max, np.float64)
    s2 = np.zeros(l_max, np.float64)
    for r in range(rounds):
        state = _substream(seed, nb.uint64(r))
        total = fenwick_total(tree)
        for k in range(l_max):
            state, u = _next_u01(state)
            idx = fenwick_find(tree, top, u * total)
            while live[idx - 1] <= 0.0:
                idx = idx % n + 1
            wv = live[idx - 1]
            s1[k] += wv
            s2[k] += wv * wv
            fenwick_add(tree, idx, -wv)
            live[idx - 1] = 0.0
            total -= wv
            removed[k] = idx
        for k in range(l_max):
            idx = removed[k]
            fenwick_add(tree, idx, weights[idx - 1])
            live[idx - 1] = weights[idx - 1]
    return s1, s2


# ---------------------------------------------------------------------------
# Graph sampling: per-row geometric skipping with a refreshed majorant
# ---------------------------------------------------------------------------


@nb.njit(nb.float64(nb.float64, nb.float64, nb.float64, nb.float64, nb.int64, nb.int64), cache=True, inline="always", nogil=True)
def _edge_prob(wi, wj, p, ell, n, model):
    if model == MODEL_POISSON:
        return -math.expm1(-wi * wj * p)
    x = wi * wj * p  # Chung-Lu / BDML are parameterized through s = p * ell
    if model == MODEL_CHUNG_LU:
        return x if x < 1.0 else 1.0
    return x * ell / (n + x * ell)


@nb.njit(cache=True, nogil=True)
def sample_skip(weights, p, ell, model, seed, want_caps, eu, ev, ec):
    """Sample all edges into the provided buffers; returns count or -1 on overflow.

    Rows are independent substreams of ``seed``, so the result does not
    depend on row execution order. Within a row the scan walks j downward in
    weight order, skipping ahead geometrically under the current majorant
    probability (valid because q_ij is non-increasing in j) and thinning by
    q_ij / majorant at each candidate.
    """
    n = weights.shape[0]
    cap = eu.shape[0]
    m = 0
    for i in range(n - 1):
        state = _substream(seed, nb.uint64(i))
        wi = weights[i]
        j = i + 1
        qbar = _edge_prob(wi, weights[j], p, ell, n, model)
        while j < n:
            if qbar <= 0.0:
                break
            if qbar < 1.0:
                state, u = _next_u01(state)
                # skip length is geometric with success prob qbar
                fskip = math.log(1.0 - u) / math.log1p(-qbar)
                if fskip >= n - j:
                    break
                j += int(fskip)
            q = _edge_prob(wi, weights[j], p, ell, n, model)
            state, u = _next_u01(state)
            if u * qbar < q:
                if m >= cap:
                    return -1
                eu[m] = i
                ev[m] = j
                if want_caps:
                    lam = wi * weights[j]
                    state, uc = _next_u01(state)
                    # Exp(lam) conditioned to be <= p
                    ec[m] = -math.log1p(uc * math.expm1(-lam * p)) / lam
                m += 1
            qbar = q
            j += 1
    return m


# ---------------------------------------------------------------------------
# Breadth-first walk
# ---------------------------------------------------------------------------


@nb.njit(cache=True, nogil=True)
def bfw(indptr, indices, caps, weights, seed):
    """Breadth-first walk over a CSR graph with per-edge capacities.

    Roots are drawn with probability proportional to weight among
    undiscovered vertices; children are the undiscovered neighbours of the
    vertex being explored, taken in increasing capacity order (ties broken
    by vertex index). Returns (order, children, parent, comp_starts, ncomp):
    ``order[t]`` is the vertex discovered at step t+1, ``children[t]`` the
    child count of that vertex, ``parent`` maps vertex -> parent vertex (-1
    for roots), ``comp_starts`` the 1-based step at which each component
    opened.
    """
    n = weights.shape[0]
    order = np.empty(n, np.int64)
    vpos = np.zeros(n, np.int64)  # vertex -> 1-based step; 0 = undiscovered
    children = np.zeros(n, np.int64)
    parent = np.full(n, -1, np.int64)
    comp_starts = np.empty(n, np.int64)
    ncomp = 0

    live = weights.copy()
    tree = fenwick_build(live)
    top = _top_bit(n)
    state = seed

    # scratch for sorting one vertex's children by capacity
    maxdeg = 0
    for v in range(n):
        d = indptr[v + 1] - indptr[v]
        if d > maxdeg:
            maxdeg = d
    ch_cap = np.empty(maxdeg + 1, np.float64)
    ch_vtx = np.empty(maxdeg + 1, np.int64)

    discovered = 0  # number of vertices given a position so far
    for step in range(1, n + 1):
        if discovered < step:
            # queue exhausted: size-biased root among undiscovered vertices
            total = fenwick_total(tree)
            state, u = _next_u01(state)
            idx = fenwick_find(tree, top, u * total)
            while live[idx - 1] <= 0.0:
                idx = idx % n + 1
            v = idx - 1
            fenwick_add(tree, idx, -live[v])
            live[v] = 0.0
            order[step - 1] = v
            vpos[v] = step
            discovered = step
            comp_starts[ncomp] = step
            ncomp += 1
        v = order[step - 1]
        # collect undiscovered neighbours
        d = 0
        for e in range(indptr[v], indptr[v + 1]):
            w = indices[e]
            if vpos[w] == 0:
                ch_cap[d] = caps[e]
                ch_vtx[d] = w
                d += 1
        # insertion sort by (capacity, vertex index)
        for a in range(1, d):
            ck = ch_cap[a]
            vk = ch_vtx[a]
            b = a - 1
            while b >= 0 and (ch_cap[b] > ck or (ch_cap[b] == ck and ch_vtx[b] > vk)):
                ch_cap[b + 1] = ch_cap[b]
                ch_vtx[b + 1] = ch_vtx[b]
                b -= 1
            ch_cap[b + 1] = ck
            ch_vtx[b + 1] = vk
        for a in range(d):
            w = ch_vtx[a]
            discovered += 1
            order[discovered - 1] = w
            vpos[w] = discovered
            parent[w] = v
            fenwick_add(tree, w + 1, -live[w])
            live[w] = 0.0
        children[step - 1] = d
    return order, children, parent, comp_starts[:ncomp], ncomp


@nb.njit(cache=True, nogil=True)
def bfw_many_orders(indptr, indices, caps, weights, reps, seed):
    """Discovery orders of ``reps`` independent walks (test utility)."""
    n = weights.shape[0]
    out = np.empty((reps, n), np.int64)
    for r in range(reps):
        order, _, _, _, _ = bfw(indptr, indices, caps, weights, _substream(seed, nb.uint64(r)))
        out[r] = order
    return out
