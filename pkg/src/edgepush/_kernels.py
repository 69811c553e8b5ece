"""Compiled inner loops.  All arrays are CSR views of a WeightedGraph.

Trace buffers let the Python layer replay solver state after every push; pass
zero-row arrays to disable tracing.  Only the first ``len(trace)`` pushes are
recorded, the returned push count tells the caller whether it overflowed.
"""
import math

import numpy as np
from numba import njit

THETA_L1 = 0
THETA_ADDITIVE = 1
THETA_EXPLICIT = 2


@njit(cache=True, nogil=True)
def localpush_kernel(offsets, nbrs, wts, deg, s, alpha, theta,
                     counts, tr_reserve, tr_residue, tr_frontier):
    n = deg.shape[0]
    reserve = np.zeros(n)
    residue = np.zeros(n)
    residue[s] = 1.0
    queue = np.empty(n, np.int64)
    inq = np.zeros(n, np.bool_)
    head = 0
    size = 0
    if residue[s] >= deg[s] * theta:
        queue[0] = s
        inq[s] = True
        size = 1
    track = counts.shape[0] > 0
    cap = tr_reserve.shape[0]
    pushes = 0
    touches = 0
    while size > 0:
        u = queue[head]
        head += 1
        if head == n:
            head = 0
        size -= 1
        inq[u] = False
        r = residue[u]
        reserve[u] += alpha * r
        residue[u] = 0.0
        share = (1.0 - alpha) * r / deg[u]
        for p in range(offsets[u], offsets[u + 1]):
            v = nbrs[p]
            residue[v] += share * wts[p]
            if not inq[v] and residue[v] >= deg[v] * theta:
                tail = head + size
                if tail >= n:
                    tail -= n
                queue[tail] = v
                inq[v] = True
                size += 1
        touches += offsets[u + 1] - offsets[u]
        if track:
            counts[u] += 1
        if pushes < cap:
            tr_reserve[pushes, :] = reserve
            tr_residue[pushes, :] = residue
            tr_frontier[pushes, :] = inq
        pushes += 1
    return reserve, residue, pushes, touches


@njit(cache=True, nogil=True, inline="always")
def _theta(e, mode, param, norm, theta_arr, nbrs, wts, deg, psum):
    if mode == 0:
        return param * math.sqrt(wts[e]) / norm
    elif mode == 1:
        v = nbrs[e]
        return param * deg[v] * math.sqrt(wts[e]) / psum[v]
    return theta_arr[e]


@njit(cache=True, nogil=True, inline="always")
def _key(e, Q, mode, param, norm, theta_arr, nbrs, wts, deg, psum):
    return (Q[e] + _theta(e, mode, param, norm, theta_arr, nbrs, wts, deg, psum)) / wts[e]


@njit(cache=True, nogil=True, inline="always")
def _less(ka, ea, kb, eb):
    return ka < kb or (ka == kb and ea < eb)


@njit(cache=True, nogil=True)
def _heap_sift_up(heap, hkey, base, i):
    item = heap[base + i]
    k = hkey[base + i]
    e = base + item
    while i > 0:
        parent = (i - 1) >> 1
        pk = hkey[base + parent]
        if _less(k, e, pk, base + heap[base + parent]):
            heap[base + i] = heap[base + parent]
            hkey[base + i] = pk
            i = parent
        else:
            break
    heap[base + i] = item
    hkey[base + i] = k


@njit(cache=True, nogil=True)
def _heap_sift_down(heap, hkey, base, size, i):
    item = heap[base + i]
    k = hkey[base + i]
    e = base + item
    while True:
        c = 2 * i + 1
        if c >= size:
            break
        ck = hkey[base + c]
        ce = base + heap[base + c]
        if c + 1 < size:
            dk = hkey[base + c + 1]
            de = base + heap[base + c + 1]
            if _less(dk, de, ck, ce):
                c += 1
                ce = de
                ck = dk
        if _less(ck, ce, k, e):
            heap[base + i] = heap[base + c]
            hkey[base + i] = ck
            i = c
        else:
            break
    heap[base + i] = item
    hkey[base + i] = k


@njit(cache=True, nogil=True)
def _top(u, offsets, cursor, hsize, heap, hkey, order, use_order, Q,
         mode, param, norm, theta_arr, nbrs, wts, deg, psum):
    """Queue-top edge of node u and whether it comes from the unpushed run."""
    base = offsets[u]
    e = -1
    k = np.inf
    from_cursor = False
    if hsize[u] > 0:
        e = base + heap[base]
        k = hkey[base]
    if cursor[u] < offsets[u + 1]:
        ce = cursor[u]
        if use_order:
            ce = base + order[cursor[u]]
        ck = _key(ce, Q, mode, param, norm, theta_arr, nbrs, wts, deg, psum)
        if _less(ck, ce, k, e):
            e = ce
            from_cursor = True
    return e, from_cursor


@njit(cache=True, nogil=True)
def edgepush_kernel(offsets, nbrs, wts, deg, psum, s, alpha,
                    mode, param, norm, theta_arr, order, scan_fraction,
                    counts, tr_q, tr_Q, tr_list, tr_edge):
    """Edge-based push driven by per-node queues and a FIFO active list.

    Node ``u``'s queue is split in two: edges never pushed are visited in
    ascending initial key through ``cursor[u]`` (``order`` holds local
    positions; empty means adjacency order), edges already pushed live in a
    binary heap stored in ``heap[offsets[u]:offsets[u]+hsize[u]]`` with their
    keys alongside in ``hkey``.  A node is active when the residue of its
    queue-top edge reaches that edge's threshold.  ``scan_fraction > 0``
    switches to round-based sequential scans once the neighbourhood volume of
    active nodes exceeds ``scan_fraction * 2m``.
    """
    n = deg.shape[0]
    m2 = nbrs.shape[0]
    use_order = order.shape[0] > 0
    track = counts.shape[0] > 0
    cap = tr_q.shape[0]
    beta = 1.0 - alpha

    q = np.zeros(n)
    q[s] = 1.0
    Q = np.zeros(m2)
    cursor = offsets[:-1].copy()
    hsize = np.zeros(n, np.int64)
    heap = np.empty(m2, np.int32)
    hkey = np.empty(m2)
    nxt = np.full(n, -1, np.int64)
    inlist = np.zeros(n, np.bool_)
    head = -1
    tail = -1
    active_vol = 0
    limit = scan_fraction * m2
    pushes = 0
    queue_ops = 0
    switched = 0
    scanned = 0

    te, _ = _top(s, offsets, cursor, hsize, heap, hkey, order, use_order, Q,
                 mode, param, norm, theta_arr, nbrs, wts, deg, psum)
    if te >= 0:
        if beta * q[s] * wts[te] / deg[s] - Q[te] >= _theta(te, mode, param, norm, theta_arr,
                                                            nbrs, wts, deg, psum):
            head = s
            tail = s
            inlist[s] = True
            active_vol += offsets[s + 1] - offsets[s]

    while head != -1:
        if scan_fraction > 0.0 and active_vol > limit:
            switched = 1
            break
        u = head
        head = nxt[u]
        if head == -1:
            tail = -1
        nxt[u] = -1
        inlist[u] = False
        active_vol -= offsets[u + 1] - offsets[u]

        base = offsets[u]
        e, from_cursor = _top(u, offsets, cursor, hsize, heap, hkey, order, use_order, Q,
                              mode, param, norm, theta_arr, nbrs, wts, deg, psum)
        y = beta * q[u] * wts[e] / deg[u] - Q[e]
        v = np.int64(nbrs[e])
        Q[e] += y
        q[v] += y
        if track:
            counts[e] += 1
        # increase-key of e inside the queue of u
        k = _key(e, Q, mode, param, norm, theta_arr, nbrs, wts, deg, psum)
        if from_cursor:
            cursor[u] += 1
            heap[base + hsize[u]] = e - base
            hkey[base + hsize[u]] = k
            hsize[u] += 1
            _heap_sift_up(heap, hkey, base, hsize[u] - 1)
        else:
            hkey[base] = k
            _heap_sift_down(heap, hkey, base, hsize[u], 0)
        queue_ops += 2

        # only u and v changed keys
        for step in range(2):
            x = u if step == 0 else v
            if inlist[x]:
                continue
            te, _ = _top(x, offsets, cursor, hsize, heap, hkey, order, use_order, Q,
                         mode, param, norm, theta_arr, nbrs, wts, deg, psum)
            queue_ops += 1
            if te < 0:
                continue
            r = beta * q[x] * wts[te] / deg[x] - Q[te]
            if r >= _theta(te, mode, param, norm, theta_arr, nbrs, wts, deg, psum):
                inlist[x] = True
                if tail != -1:
                    nxt[tail] = x
                else:
                    head = x
                tail = x
                active_vol += offsets[x + 1] - offsets[x]

        if pushes < cap:
            tr_q[pushes, :] = q
            tr_Q[pushes, :] = Q
            tr_list[pushes, :] = inlist
            tr_edge[pushes] = e
        pushes += 1

    if switched:
        # sequential scan rounds until a full pass pushes nothing
        while True:
            round_pushes = 0
            for u in range(n):
                if deg[u] == 0.0:
                    continue
                scanned += offsets[u + 1] - offsets[u]
                for e in range(offsets[u], offsets[u + 1]):
                    y = beta * q[u] * wts[e] / deg[u] - Q[e]
                    if y >= _theta(e, mode, param, norm, theta_arr, nbrs, wts, deg, psum):
                        v = nbrs[e]
                        Q[e] += y
                        q[v] += y
                        if track:
                            counts[e] += 1
                        if pushes < cap:
                            tr_q[pushes, :] = q
                            tr_Q[pushes, :] = Q
                            tr_edge[pushes] = e
                        pushes += 1
                        round_pushes += 1
            if round_pushes == 0:
                break
    return q, Q, pushes, queue_ops, switched, scanned


@njit(cache=True, nogil=True)
def alias_tables(offsets, wts):
    """Vose alias tables per node, laid out along the CSR edge arrays.

    Returns acceptance probabilities and alias targets as local positions.
    """
    m2 = wts.shape[0]
    prob = np.ones(m2)
    alias = np.zeros(m2, np.int32)
    n = offsets.shape[0] - 1
    for u in range(n):
        lo = offsets[u]
        k = offsets[u + 1] - lo
        if k == 0:
            continue
        total = 0.0
        for p in range(lo, lo + k):
            total += wts[p]
        scaled = np.empty(k)
        for i in range(k):
            scaled[i] = wts[lo + i] * k / total
        small = np.empty(k, np.int64)
        large = np.empty(k, np.int64)
        ns = 0
        nl = 0
        for i in range(k):
            if scaled[i] < 1.0:
                small[ns] = i
                ns += 1
            else:
                large[nl] = i
                nl += 1
        while ns > 0 and nl > 0:
            ns -= 1
            a = small[ns]
            nl -= 1
            b = large[nl]
            prob[lo + a] = scaled[a]
            alias[lo + a] = b
            scaled[b] = scaled[b] + scaled[a] - 1.0
            if scaled[b] < 1.0:
                small[ns] = b
                ns += 1
            else:
                large[nl] = b
                nl += 1
        while nl > 0:
            nl -= 1
            prob[lo + large[nl]] = 1.0
        while ns > 0:
            ns -= 1
            prob[lo + small[ns]] = 1.0
    return prob, alias


_warm = False


def warmup() -> None:
    """Compile every kernel on a two-node graph so timings exclude JIT cost."""
    global _warm
    if _warm:
        return
    offsets = np.array([0, 1, 2], dtype=np.int64)
    nbrs = np.array([1, 0], dtype=np.int32)
    wts = np.ones(2)
    deg = np.ones(2)
    # graph arrays are read-only, which numba types separately
    for a in (offsets, nbrs, wts, deg):
        a.flags.writeable = False
    e0 = np.zeros(0, np.int64)
    localpush_kernel(offsets, nbrs, wts, deg, 0, 0.2, 0.3, e0,
                     np.zeros((0, 2)), np.zeros((0, 2)), np.zeros((0, 2), np.bool_))
    for order in (np.zeros(0, np.int32), np.zeros(2, np.int32)):
        order.flags.writeable = False
        edgepush_kernel(offsets, nbrs, wts, deg, deg, 0, 0.2, THETA_L1, 0.5, 2.0, np.zeros(0),
                        order, 0.0, e0, np.zeros((0, 2)), np.zeros((0, 2)),
                        np.zeros((0, 2), np.bool_), e0)
    alias_tables(offsets, wts)
    _warm = True
