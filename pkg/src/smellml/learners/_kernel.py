"""Compiled tree-growing kernel.

Grows an unpruned tree over integer class codes and returns it as flat
preorder arrays. Counts are integral (bootstrap duplicates are separate rows),
so ``c * log2(c)`` is read from a lookup table and the split arithmetic is
identical on every platform.

Two node layouts are used. When every feature is a candidate at every node,
each column is sorted once and the per-feature orders are carried down the
tree by stable partitioning. When features are drawn per node (random
forests) only the drawn columns of the node's rows are sorted.
"""
import numpy as np
from numba import njit

_GAIN_EPS = 1e-10
# gains or ratios closer than this are ties (equal in exact arithmetic)
_TIE_EPS = 1e-12


@njit(cache=True)
def _xlogx_table(n):
    t = np.zeros(n + 1)
    for c in range(2, n + 1):
        t[c] = c * np.log2(c)
    return t


@njit(cache=True)
def _scan(X, f, codes, sorted_rows, k, min_instances, total, parent, xlx, left):
    """Best gain threshold of column ``f`` given its rows in ascending order.

    Returns (gain, n_left, lo, hi); n_left is -1 when no threshold is valid.
    The first maximum wins, i.e. the smallest threshold.
    """
    n = sorted_rows.shape[0]
    left[:] = 0
    best = -np.inf
    best_nl = -1
    best_lo = 0.0
    best_hi = 0.0
    hi = X[sorted_rows[0], f]
    for i in range(n - 1):
        r = sorted_rows[i]
        left[codes[r]] += 1
        lo = hi
        hi = X[sorted_rows[i + 1], f]
        nl = i + 1
        nr = n - nl
        if not hi > lo or nl < min_instances or nr < min_instances:
            continue
        child = xlx[nl] + xlx[nr]
        for c in range(k):
            child -= xlx[left[c]] + xlx[total[c] - left[c]]
        g = (parent - child) / n
        if g > best + _TIE_EPS:
            best = g
            best_nl = nl
            best_lo = lo
            best_hi = hi
    return best, best_nl, best_lo, best_hi


@njit(cache=True)
def _choose(features, gains, n_left, los, his, n, zero_gain_ok):
    """Pick the split among per-feature candidates.

    Features whose gain is positive and at least the mean gain of all
    features with a valid threshold compete on gain ratio; the earliest
    feature wins ties. Returns (feature, threshold), feature -1 for none.

    With ``zero_gain_ok`` a node where no split gains anything (an XOR
    pattern) still splits on the lowest-numbered feature with a valid
    threshold, so full-growth trees can always reach purity.
    """
    nf = features.shape[0]
    n_valid = 0
    gain_sum = 0.0
    any_positive = False
    for fi in range(nf):
        if n_left[fi] >= 0:
            n_valid += 1
            gain_sum += gains[fi]
            if gains[fi] > _GAIN_EPS:
                any_positive = True
    if not any_positive:
        if not zero_gain_ok or n_valid == 0:
            return -1, 0.0
        chosen = -1
        for fi in range(nf):
            if n_left[fi] >= 0 and (chosen < 0 or features[fi] < features[chosen]):
                chosen = fi
        return features[chosen], _midpoint(los[chosen], his[chosen])
    mean_gain = gain_sum / n_valid
    chosen = -1
    chosen_ratio = -np.inf
    for fi in range(nf):
        g = gains[fi]
        if n_left[fi] < 0 or g <= _GAIN_EPS or g < mean_gain - 1e-12:
            continue
        p = n_left[fi] / n
        split_info = -(p * np.log2(p) + (1.0 - p) * np.log2(1.0 - p))
        ratio = g / split_info
        if ratio > chosen_ratio + _TIE_EPS:
            chosen_ratio = ratio
            chosen = fi
    return features[chosen], _midpoint(los[chosen], his[chosen])


@njit(cache=True)
def _midpoint(lo, hi):
    t = lo + (hi - lo) / 2.0
    if not (lo <= t and t < hi):
        t = lo
    return t


@njit(cache=True)
def grow(X, codes, k, min_instances, fps, uniforms):
    """Grow a tree; returns (feature, threshold, left, right, counts).

    ``fps <= 0`` (or ``fps >= n_features``) considers every feature at every
    node. Otherwise each node draws ``fps`` features by a partial
    Fisher-Yates shuffle driven by ``uniforms[node * fps: (node + 1) * fps]``.
    """
    n, n_feat = X.shape
    cap = 2 * n + 1
    feature = np.full(cap, -1, dtype=np.int64)
    threshold = np.zeros(cap)
    left = np.full(cap, -1, dtype=np.int64)
    right = np.full(cap, -1, dtype=np.int64)
    counts = np.zeros((cap, k))
    xlx = _xlogx_table(n)
    random_subset = 0 < fps < n_feat
    width = fps if random_subset else n_feat

    # presorted layout: order[f, start:end] lists the node's rows by column f
    if random_subset:
        order = np.empty((1, n), dtype=np.int64)
        for i in range(n):
            order[0, i] = i
    else:
        order = np.empty((n_feat, n), dtype=np.int64)
        col = np.empty(n)
        for f in range(n_feat):
            for i in range(n):
                col[i] = X[i, f]
            order[f] = np.argsort(col, kind="mergesort")
    scratch = np.empty(n, dtype=np.int64)
    goes_left = np.zeros(n, dtype=np.bool_)
    perm = np.arange(n_feat)
    all_features = np.arange(n_feat)
    vals = np.empty(n)
    tmp_rows = np.empty(n, dtype=np.int64)
    total = np.zeros(k, dtype=np.int64)
    lcount = np.zeros(k, dtype=np.int64)
    gains = np.empty(width)
    n_left = np.empty(width, dtype=np.int64)
    los = np.empty(width)
    his = np.empty(width)

    stack = np.empty((cap, 4), dtype=np.int64)  # start, end, parent, side
    stack[0, 0] = 0
    stack[0, 1] = n
    stack[0, 2] = -1
    stack[0, 3] = 0
    top = 1
    n_nodes = 0
    while top > 0:
        top -= 1
        start = stack[top, 0]
        end = stack[top, 1]
        parent = stack[top, 2]
        node = n_nodes
        n_nodes += 1
        if parent >= 0:
            if stack[top, 3] == 0:
                left[parent] = node
            else:
                right[parent] = node
        m = end - start
        total[:] = 0
        for i in range(start, end):
            total[codes[order[0, i]]] += 1
        nonzero = 0
        for c in range(k):
            counts[node, c] = total[c]
            if total[c] > 0:
                nonzero += 1
        if nonzero <= 1 or m < 2 * min_instances:
            continue
        parent_info = xlx[m]
        for c in range(k):
            parent_info -= xlx[total[c]]

        if random_subset:
            for i in range(n_feat):
                perm[i] = i
            base = node * fps
            for t in range(fps):
                j = t + int(uniforms[base + t] * (n_feat - t))
                if j >= n_feat:
                    j = n_feat - 1
                s = perm[t]
                perm[t] = perm[j]
                perm[j] = s
            features = np.sort(perm[:fps].copy())
            node_rows = order[0, start:end]
            for fi in range(fps):
                f = features[fi]
                for i in range(m):
                    vals[i] = X[node_rows[i], f]
                idx = np.argsort(vals[:m])
                for i in range(m):
                    tmp_rows[i] = node_rows[idx[i]]
                g, nl, lo, hi = _scan(X, f, codes, tmp_rows[:m], k, min_instances, total, parent_info, xlx, lcount)
                gains[fi] = g
                n_left[fi] = nl
                los[fi] = lo
                his[fi] = hi
        else:
            features = all_features
            for f in range(n_feat):
                g, nl, lo, hi = _scan(X, f, codes, order[f, start:end], k, min_instances, total, parent_info, xlx, lcount)
                gains[f] = g
                n_left[f] = nl
                los[f] = lo
                his[f] = hi

        f, thr = _choose(features, gains, n_left, los, his, m, min_instances == 1)
        if f < 0:
            continue
        feature[node] = f
        threshold[node] = thr
        nl = 0
        for i in range(start, end):
            r = order[0, i]
            goes_left[r] = X[r, f] <= thr
            if goes_left[r]:
                nl += 1
        # stable partition keeps every column's segment sorted
        for g_ in range(order.shape[0]):
            li = start
            ri = start + nl
            for i in range(start, end):
                r = order[g_, i]
                if goes_left[r]:
                    scratch[li] = r
                    li += 1
                else:
                    scratch[ri] = r
                    ri += 1
            for i in range(start, end):
                order[g_, i] = scratch[i]
        mid = start + nl
        # right pushed first so the left subtree is numbered first
        stack[top, 0] = mid
        stack[top, 1] = end
        stack[top, 2] = node
        stack[top, 3] = 1
        top += 1
        stack[top, 0] = start
        stack[top, 1] = mid
        stack[top, 2] = node
        stack[top, 3] = 0
        top += 1
    return (feature[:n_nodes].copy(), threshold[:n_nodes].copy(), left[:n_nodes].copy(),
            right[:n_nodes].copy(), counts[:n_nodes].copy())
