"""Exact minimum-weight perfect matching on sparse weighted graphs.

The solver is a primal-dual blossom algorithm (Galil / van Rantwijk
formulation) ported to flat arrays and compiled with numba.  It grows one
alternating tree at a time from each unmatched vertex; dual updates touch
only the tree, and the delta search scans only edges incident to the tree,
so the typical cost per augmentation is proportional to the size of the
local neighbourhood that the augmenting path explores.  Duals may go
negative (max-cardinality mode), so a perfect matching is found whenever
one exists; minimum weight follows from negating the weights.  All
arithmetic is int64, with duals in half-units so every delta is integral.

Vertex ids are 0..n-1, blossom slots n..2n-1.  One simplification relative
to the textbook algorithm, correctness-preserving: expanding a zero-dual
T-blossom mid-search discards the alternating tree and relabels from
scratch rather than surgically relabelling the expanded chain.  Each
expansion removes one blossom, so the search still terminates.

A brute-force oracle over all pairings is provided for small instances.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_OK = 0
_IMPERFECT = 1
_OVERFLOW = 2

_ACT_NONE = 0
_ACT_AUGMENTED = 1
_ACT_OVERFLOW = 3


class MatchingError(RuntimeError):
    """No perfect matching exists, or the solver failed internally."""


@njit(cache=True)
def _leaves_of(b, n, childs_head, child_next, scratch, out):
    """Collect the leaf vertices of id ``b`` into ``out``; returns count."""
    if b < n:
        out[0] = b
        return 1
    top = 0
    scratch[top] = b
    top += 1
    cnt = 0
    while top > 0:
        top -= 1
        c = scratch[top]
        if c < n:
            out[cnt] = c
            cnt += 1
            continue
        first = childs_head[c]
        k = first
        while True:
            scratch[top] = k
            top += 1
            k = child_next[k]
            if k == first:
                break
    return cnt


@njit(cache=True)
def _child_containing(b, x, parent):
    c = x
    while parent[c] != b:
        c = parent[c]
    return c


@njit(cache=True)
def _put_at_base(b, v, n, parent, childs_head, child_next, nedge_v, nedge_w,
                 mate, base, tasks):
    """Rearrange the matching inside blossom ``b`` so ``v`` becomes its base.

    Walks the odd child cycle from the child containing ``v``, matching the
    remaining children pairwise through their connecting edges, recursing
    into sub-blossoms via an explicit task stack.
    """
    top = 0
    tasks[top] = (np.int64(b) << 32) | np.int64(v)
    top += 1
    while top > 0:
        top -= 1
        packed = tasks[top]
        bb = np.int32(packed >> 32)
        vv = np.int32(packed & 0x7FFFFFFF)
        t0 = _child_containing(bb, vv, parent)
        if t0 >= n:
            tasks[top] = (np.int64(t0) << 32) | np.int64(vv)
            top += 1
        c1 = child_next[t0]
        while c1 != t0:
            p = nedge_v[c1]
            q = nedge_w[c1]
            c2 = child_next[c1]
            if c1 >= n:
                tasks[top] = (np.int64(c1) << 32) | np.int64(p)
                top += 1
            if c2 >= n:
                tasks[top] = (np.int64(c2) << 32) | np.int64(q)
                top += 1
            mate[p] = q
            mate[q] = p
            c1 = child_next[c2]
        childs_head[bb] = t0
        base[bb] = vv
    return 0


@njit(cache=True)
def _dismantle(b, n, parent, childs_head, child_next, child_prev,
               nedge_v, nedge_w, inblossom, scratch, leaf_buf):
    """Make the children of ``b`` top-level; ``b``'s slot becomes reusable."""
    k = childs_head[b]
    while True:
        nxt = child_next[k]
        parent[k] = -1
        if k < n:
            inblossom[k] = k
        else:
            cnt = _leaves_of(k, n, childs_head, child_next, scratch, leaf_buf)
            for i in range(cnt):
                inblossom[leaf_buf[i]] = k
        nedge_v[k] = -1
        nedge_w[k] = -1
        done = nxt == childs_head[b]
        child_next[k] = -1
        child_prev[k] = -1
        k = nxt
        if done:
            break
    childs_head[b] = -1
    return 0


@njit(cache=True)
def _push_leaves(b, n, childs_head, child_next, scratch, leaf_buf,
                 queue, qstate, qcap):
    cnt = _leaves_of(b, n, childs_head, child_next, scratch, leaf_buf)
    qt = qstate[1]
    if qt + cnt > qcap:
        return False
    for i in range(cnt):
        queue[qt + i] = leaf_buf[i]
    qstate[1] = qt + cnt
    return True


@njit(cache=True)
def _label_blossom(b, n, lab, label, tops, tstate):
    # record every labelled top (vertex or blossom); consumers filter by id
    label[b] = lab
    tops[tstate[0]] = b
    tstate[0] += 1


@njit(cache=True)
def _handle_tight_edge(v, w, n, mate, label, ledge_v, ledge_w, inblossom,
                       parent, base, in_use, du, childs_head, child_next,
                       child_prev, nedge_v, nedge_w, free_slots, fstate,
                       visit, vstate, queue, qstate, qcap,
                       s_tops, sstate, t_tops, tstate,
                       scratch, leaf_buf, chain1, chain2, tasks):
    """React to a tight edge (v, w) whose v-side top is S-labelled.

    Returns an action code: nothing, augmented, or overflow.
    """
    bv = inblossom[v]
    bw = inblossom[w]
    if bv == bw:
        return _ACT_NONE
    lw = label[bw]
    if lw == 2:
        return _ACT_NONE
    if lw == 0:
        bb = base[bw]
        mt = mate[bb]
        if mt < 0:
            # the other side is free and unmatched: augmenting path found
            for side in range(2):
                if side == 0:
                    s = v
                    j = w
                else:
                    s = w
                    j = v
                while True:
                    bs = inblossom[s]
                    if bs >= n:
                        _put_at_base(bs, s, n, parent, childs_head, child_next,
                                     nedge_v, nedge_w, mate, base, tasks)
                    mate[s] = j
                    if ledge_v[bs] == -1:
                        break
                    t = inblossom[ledge_v[bs]]
                    v2 = ledge_v[t]
                    j2 = ledge_w[t]
                    if t >= n:
                        _put_at_base(t, j2, n, parent, childs_head, child_next,
                                     nedge_v, nedge_w, mate, base, tasks)
                    mate[j2] = v2
                    s = v2
                    j = j2
            return _ACT_AUGMENTED
        # matched free blossom becomes T; the mate of its base becomes S
        _label_blossom(bw, n, 2, label, t_tops, tstate)
        ledge_v[bw] = v
        ledge_w[bw] = w
        bm = inblossom[mt]
        _label_blossom(bm, n, 1, label, s_tops, sstate)
        ledge_v[bm] = bb
        ledge_w[bm] = mt
        if not _push_leaves(bm, n, childs_head, child_next, scratch, leaf_buf,
                            queue, qstate, qcap):
            return _ACT_OVERFLOW
        return _ACT_NONE

    # S-S edge within the tree: find the least common ancestor
    vstate[0] += 1
    vt = vstate[0]
    lca = np.int32(-1)
    a = bv
    b2 = bw
    while a != -1 or b2 != -1:
        if a != -1:
            if visit[a] == vt:
                lca = a
                break
            visit[a] = vt
            if ledge_v[a] == -1:
                a = np.int32(-1)
            else:
                t = inblossom[ledge_v[a]]
                a = inblossom[ledge_v[t]] if ledge_v[t] != -1 else np.int32(-1)
        tmp = a
        a = b2
        b2 = tmp
    if lca == -1:
        # different trees: augment along both of them
        for side in range(2):
            if side == 0:
                s = v
                j = w
            else:
                s = w
                j = v
            while True:
                bs = inblossom[s]
                if bs >= n:
                    _put_at_base(bs, s, n, parent, childs_head, child_next,
                                 nedge_v, nedge_w, mate, base, tasks)
                mate[s] = j
                if ledge_v[bs] == -1:
                    break
                t = inblossom[ledge_v[bs]]
                v2 = ledge_v[t]
                j2 = ledge_w[t]
                if t >= n:
                    _put_at_base(t, j2, n, parent, childs_head, child_next,
                                 nedge_v, nedge_w, mate, base, tasks)
                mate[j2] = v2
                s = v2
                j = j2
        return _ACT_AUGMENTED

    # form a new S-blossom rooted at lca
    if fstate[0] == 0:
        return _ACT_OVERFLOW
    nb = free_slots[fstate[0] - 1]
    fstate[0] -= 1
    in_use[nb] = 1
    du[nb] = 0
    _label_blossom(nb, n, 1, label, s_tops, sstate)
    ledge_v[nb] = ledge_v[lca]
    ledge_w[nb] = ledge_w[lca]
    base[nb] = base[lca]
    parent[nb] = -1
    # v-side: walking up to lca; the cyclic successor of a tree parent is
    # its child, connected by the child's label edge.
    nc1 = 0
    c = bv
    while c != lca:
        chain1[nc1] = c
        nc1 += 1
        p_top = inblossom[ledge_v[c]]
        nedge_v[p_top] = ledge_v[c]
        nedge_w[p_top] = ledge_w[c]
        c = p_top
    nedge_v[bv] = v
    nedge_w[bv] = w
    # w-side: each node's cyclic successor is its tree parent, connected by
    # its own label edge reversed.
    nc2 = 0
    c = bw
    while c != lca:
        chain2[nc2] = c
        nc2 += 1
        nedge_v[c] = ledge_w[c]
        nedge_w[c] = ledge_v[c]
        c = inblossom[ledge_v[c]]
    # cyclic child order: lca, reversed v-chain, w-chain
    childs_head[nb] = lca
    parent[lca] = nb
    prev = lca
    for i in range(nc1 - 1, -1, -1):
        c = chain1[i]
        child_next[prev] = c
        child_prev[c] = prev
        parent[c] = nb
        prev = c
    for i in range(nc2):
        c = chain2[i]
        child_next[prev] = c
        child_prev[c] = prev
        parent[c] = nb
        prev = c
    child_next[prev] = lca
    child_prev[lca] = prev
    # former T-children turn S: their leaves must be scanned
    kc = childs_head[nb]
    while True:
        if label[kc] == 2:
            if not _push_leaves(kc, n, childs_head, child_next, scratch,
                                leaf_buf, queue, qstate, qcap):
                return _ACT_OVERFLOW
        kc = child_next[kc]
        if kc == childs_head[nb]:
            break
    cnt = _leaves_of(nb, n, childs_head, child_next, scratch, leaf_buf)
    for i in range(cnt):
        inblossom[leaf_buf[i]] = nb
    return _ACT_NONE


@njit(cache=True)
def _blossom_solve(n, adj_ptr, adj_eid, adj_other, eu, ev, w4, mate):
    """Max-cardinality maximum-weight matching; returns a status code.

    ``w4`` must hold 4 * (non-negative integer weight); ``mate`` is the
    in/out matching array (-1 for unmatched).  Grown one tree at a time
    with greedy per-vertex dual initialisation; duals may go negative, so
    the matching is perfect whenever a perfect matching exists.
    """
    nid = 2 * n
    m = len(eu)

    du = np.empty(nid, dtype=np.int64)
    label = np.zeros(nid, dtype=np.int8)        # 0 free, 1 S, 2 T
    ledge_v = np.full(nid, -1, dtype=np.int32)  # label edge (outside, inside)
    ledge_w = np.full(nid, -1, dtype=np.int32)
    inblossom = np.empty(n, dtype=np.int32)
    parent = np.full(nid, -1, dtype=np.int32)
    base = np.full(nid, -1, dtype=np.int32)
    in_use = np.zeros(nid, dtype=np.uint8)
    childs_head = np.full(nid, -1, dtype=np.int32)
    child_next = np.full(nid, -1, dtype=np.int32)
    child_prev = np.full(nid, -1, dtype=np.int32)
    nedge_v = np.full(nid, -1, dtype=np.int32)
    nedge_w = np.full(nid, -1, dtype=np.int32)
    free_slots = np.empty(n, dtype=np.int32)
    for k in range(n):
        free_slots[k] = nid - 1 - k
    fstate = np.empty(1, dtype=np.int64)
    fstate[0] = n

    visit = np.zeros(nid, dtype=np.int64)
    vstate = np.zeros(1, dtype=np.int64)

    qcap = 2 * n + 16
    queue = np.empty(qcap, dtype=np.int32)
    qstate = np.zeros(2, dtype=np.int64)  # head, tail
    s_tops = np.empty(2 * n + 8, dtype=np.int32)
    sstate = np.zeros(1, dtype=np.int64)
    t_tops = np.empty(2 * n + 8, dtype=np.int32)
    tstate = np.zeros(1, dtype=np.int64)
    scratch = np.empty(nid + 4, dtype=np.int32)
    scratch2 = np.empty(nid + 4, dtype=np.int32)
    chain1 = np.empty(nid + 4, dtype=np.int32)
    chain2 = np.empty(nid + 4, dtype=np.int32)
    leaf_buf = np.empty(max(n, 1), dtype=np.int32)
    tasks = np.empty(2 * nid + 8, dtype=np.int64)

    for v in range(n):
        inblossom[v] = v
        base[v] = v
        best = np.int64(0)
        for k in range(adj_ptr[v], adj_ptr[v + 1]):
            e = adj_eid[k]
            if w4[e] > best:
                best = w4[e]
        du[v] = best // 2  # even: dual parity stays uniform

    # Greedy seed: match pairs whose shared edge is already tight.
    for v in range(n):
        if mate[v] >= 0:
            continue
        for k in range(adj_ptr[v], adj_ptr[v + 1]):
            u = adj_other[k]
            if mate[u] < 0 and u != v:
                e = adj_eid[k]
                if du[v] + du[u] - w4[e] == 0:
                    mate[v] = u
                    mate[u] = v
                    break

    root = 0
    for _stage in range(n + 2):
        while root < n and mate[root] >= 0:
            root += 1
        if root >= n:
            return _OK

        augmented = False
        stuck = False
        while True:  # labelling attempts (restarted after a mid-search expand)
            for x in range(nid):
                label[x] = 0
                ledge_v[x] = -1
                ledge_w[x] = -1
            qstate[0] = 0
            qstate[1] = 0
            sstate[0] = 0
            tstate[0] = 0
            restart = False

            rb = inblossom[root]
            _label_blossom(rb, n, 1, label, s_tops, sstate)
            if not _push_leaves(rb, n, childs_head, child_next, scratch,
                                leaf_buf, queue, qstate, qcap):
                return _OVERFLOW

            while True:  # queue scans alternating with dual updates
                while qstate[0] < qstate[1] and not augmented:
                    v = queue[qstate[0]]
                    qstate[0] += 1
                    for k in range(adj_ptr[v], adj_ptr[v + 1]):
                        w = adj_other[k]
                        e = adj_eid[k]
                        if inblossom[w] == inblossom[v]:
                            continue
                        if du[v] + du[w] - w4[e] != 0:
                            continue
                        act = _handle_tight_edge(
                            v, w, n, mate, label, ledge_v, ledge_w, inblossom,
                            parent, base, in_use, du, childs_head, child_next,
                            child_prev, nedge_v, nedge_w, free_slots, fstate,
                            visit, vstate, queue, qstate, qcap,
                            s_tops, sstate, t_tops, tstate,
                            scratch, leaf_buf, chain1, chain2, tasks)
                        if act == _ACT_AUGMENTED:
                            augmented = True
                            break
                        if act == _ACT_OVERFLOW:
                            return _OVERFLOW
                if augmented:
                    break

                # ----- dual update over tree-incident edges only -----
                delta = np.int64(-1)
                dtype = 0
                d_bloss = np.int32(-1)
                for qi in range(qstate[1]):
                    v = queue[qi]
                    for k in range(adj_ptr[v], adj_ptr[v + 1]):
                        w = adj_other[k]
                        bw = inblossom[w]
                        if bw == inblossom[v]:
                            continue
                        lb = label[bw]
                        if lb == 2:
                            continue
                        s2 = du[v] + du[w] - w4[adj_eid[k]]
                        if lb == 1:
                            d = s2 // 2
                            if delta < 0 or d < delta:
                                delta = d
                                dtype = 3
                        else:
                            if delta < 0 or s2 < delta:
                                delta = s2
                                dtype = 2
                for ti in range(tstate[0]):
                    b2 = t_tops[ti]
                    if in_use[b2] == 1 and parent[b2] == -1 and label[b2] == 2:
                        if delta < 0 or du[b2] < delta:
                            delta = du[b2]
                            dtype = 4
                            d_bloss = np.int32(b2)

                if dtype == 0:
                    stuck = True
                    break

                if delta > 0:
                    for qi in range(qstate[1]):
                        du[queue[qi]] -= delta
                    for ti in range(tstate[0]):
                        b2 = t_tops[ti]
                        if b2 >= n:
                            if in_use[b2] == 1 and parent[b2] == -1 and label[b2] == 2:
                                du[b2] -= delta
                                cnt = _leaves_of(b2, n, childs_head, child_next,
                                                 scratch, leaf_buf)
                                for i in range(cnt):
                                    du[leaf_buf[i]] += delta
                        elif label[b2] == 2 and inblossom[b2] == b2:
                            du[b2] += delta
                    for si in range(sstate[0]):
                        b2 = s_tops[si]
                        if (b2 >= n and in_use[b2] == 1 and parent[b2] == -1
                                and label[b2] == 1):
                            du[b2] += delta

                if dtype == 4:
                    # expand the zero-dual T-blossom; relabel from scratch
                    _dismantle(d_bloss, n, parent, childs_head, child_next,
                               child_prev, nedge_v, nedge_w, inblossom,
                               scratch, leaf_buf)
                    in_use[d_bloss] = 0
                    label[d_bloss] = 0
                    free_slots[fstate[0]] = d_bloss
                    fstate[0] += 1
                    restart = True
                    break

                # sweep the tree's incident edges, handling all now-tight ones
                qt_snapshot = qstate[1]
                for qi in range(qt_snapshot):
                    v = queue[qi]
                    for k in range(adj_ptr[v], adj_ptr[v + 1]):
                        w = adj_other[k]
                        e = adj_eid[k]
                        if inblossom[w] == inblossom[v]:
                            continue
                        if du[v] + du[w] - w4[e] != 0:
                            continue
                        act = _handle_tight_edge(
                            v, w, n, mate, label, ledge_v, ledge_w, inblossom,
                            parent, base, in_use, du, childs_head, child_next,
                            child_prev, nedge_v, nedge_w, free_slots, fstate,
                            visit, vstate, queue, qstate, qcap,
                            s_tops, sstate, t_tops, tstate,
                            scratch, leaf_buf, chain1, chain2, tasks)
                        if act == _ACT_AUGMENTED:
                            augmented = True
                            break
                        if act == _ACT_OVERFLOW:
                            return _OVERFLOW
                    if augmented:
                        break
                if augmented:
                    break

            if augmented or stuck or not restart:
                break

        if stuck or not augmented:
            return _IMPERFECT

        # endstage: expand zero-dual S-blossoms (recursively for zero-dual
        # children), matching the textbook stage cleanup
        for si in range(sstate[0]):
            b2 = s_tops[si]
            if (b2 >= n and in_use[b2] == 1 and parent[b2] == -1
                    and du[b2] == 0 and label[b2] == 1):
                top = 0
                scratch2[top] = b2
                top += 1
                while top > 0:
                    top -= 1
                    bb = scratch2[top]
                    k = childs_head[bb]
                    while True:
                        nxt = child_next[k]
                        parent[k] = -1
                        if k < n:
                            inblossom[k] = k
                        elif du[k] == 0:
                            scratch2[top] = k
                            top += 1
                        else:
                            cnt = _leaves_of(k, n, childs_head, child_next,
                                             scratch, leaf_buf)
                            for i in range(cnt):
                                inblossom[leaf_buf[i]] = k
                        nedge_v[k] = -1
                        nedge_w[k] = -1
                        done = nxt == childs_head[bb]
                        child_next[k] = -1
                        child_prev[k] = -1
                        k = nxt
                        if done:
                            break
                    childs_head[bb] = -1
                    in_use[bb] = 0
                    label[bb] = 0
                    free_slots[fstate[0]] = bb
                    fstate[0] += 1

    return _IMPERFECT


@njit(cache=True)
def _append_id(x, arr, state, flags):
    if flags[x] == 0:
        flags[x] = 1
        if state[0] >= len(arr):
            return False
        arr[state[0]] = x
        state[0] += 1
    return True


@njit(cache=True)
def _destroy_trees(r1, r2, tops_list, tops_state, label, ledge_v, ledge_w,
                   tree_root):
    for i in range(tops_state[0]):
        b = tops_list[i]
        if label[b] != 0 and (tree_root[b] == r1 or tree_root[b] == r2):
            label[b] = 0
            ledge_v[b] = -1
            ledge_w[b] = -1
    return 0


@njit(cache=True)
def _handle_tight_edge_plain(v, w, n, mate, label, ledge_v, ledge_w, inblossom,
                             parent, base, in_use, du, childs_head, child_next,
                             child_prev, nedge_v, nedge_w, free_slots, fstate,
                             visit, vstate, queue, qstate, qcap,
                             tree_root, tops_list, tops_state, in_tops,
                             s_members, sm_state, in_s,
                             t_members, tm_state, in_t,
                             scratch, leaf_buf, chain1, chain2, tasks):
    """Plain-mode variant of the tight-edge reaction with tree bookkeeping."""
    bv = inblossom[v]
    bw = inblossom[w]
    if bv == bw:
        return _ACT_NONE
    lw = label[bw]
    if lw == 2:
        return _ACT_NONE
    rt = tree_root[bv]
    if lw == 0:
        bb = base[bw]
        mt = mate[bb]
        if mt >= 0:
            # matched free blossom becomes T; the mate of its base becomes S
            label[bw] = 2
            tree_root[bw] = rt
            if not _append_id(bw, tops_list, tops_state, in_tops):
                return _ACT_OVERFLOW
            ledge_v[bw] = v
            ledge_w[bw] = w
            cnt = _leaves_of(bw, n, childs_head, child_next, scratch, leaf_buf)
            for i in range(cnt):
                if not _append_id(leaf_buf[i], t_members, tm_state, in_t):
                    return _ACT_OVERFLOW
            bm = inblossom[mt]
            label[bm] = 1
            tree_root[bm] = rt
            if not _append_id(bm, tops_list, tops_state, in_tops):
                return _ACT_OVERFLOW
            ledge_v[bm] = bb
            ledge_w[bm] = mt
            cnt = _leaves_of(bm, n, childs_head, child_next, scratch, leaf_buf)
            qt = qstate[1]
            if qt + cnt > qcap:
                return _ACT_OVERFLOW
            for i in range(cnt):
                queue[qt + i] = leaf_buf[i]
                if not _append_id(leaf_buf[i], s_members, sm_state, in_s):
                    return _ACT_OVERFLOW
            qstate[1] = qt + cnt
            return _ACT_NONE
        # unmatched unlabelled top: augment directly (defensive; all free
        # vertices are normally S-rooted in this mode)
        lca = np.int32(-1)
    else:
        vstate[0] += 1
        vt = vstate[0]
        lca = np.int32(-1)
        a = bv
        b2 = bw
        while a != -1 or b2 != -1:
            if a != -1:
                if visit[a] == vt:
                    lca = a
                    break
                visit[a] = vt
                if ledge_v[a] == -1:
                    a = np.int32(-1)
                else:
                    t = inblossom[ledge_v[a]]
                    a = inblossom[ledge_v[t]] if ledge_v[t] != -1 else np.int32(-1)
            tmp = a
            a = b2
            b2 = tmp

    if lca == -1:
        for side in range(2):
            if side == 0:
                s = v
                j = w
            else:
                s = w
                j = v
            while True:
                bs = inblossom[s]
                if bs >= n:
                    _put_at_base(bs, s, n, parent, childs_head, child_next,
                                 nedge_v, nedge_w, mate, base, tasks)
                mate[s] = j
                if ledge_v[bs] == -1:
                    break
                t = inblossom[ledge_v[bs]]
                v2 = ledge_v[t]
                j2 = ledge_w[t]
                if t >= n:
                    _put_at_base(t, j2, n, parent, childs_head, child_next,
                                 nedge_v, nedge_w, mate, base, tasks)
                mate[j2] = v2
                s = v2
                j = j2
        return _ACT_AUGMENTED

    # form a new S-blossom rooted at lca
    if fstate[0] == 0:
        return _ACT_OVERFLOW
    nb = free_slots[fstate[0] - 1]
    fstate[0] -= 1
    in_use[nb] = 1
    du[nb] = 0
    label[nb] = 1
    tree_root[nb] = rt
    if not _append_id(nb, tops_list, tops_state, in_tops):
        return _ACT_OVERFLOW
    ledge_v[nb] = ledge_v[lca]
    ledge_w[nb] = ledge_w[lca]
    base[nb] = base[lca]
    parent[nb] = -1
    nc1 = 0
    c = bv
    while c != lca:
        chain1[nc1] = c
        nc1 += 1
        p_top = inblossom[ledge_v[c]]
        nedge_v[p_top] = ledge_v[c]
        nedge_w[p_top] = ledge_w[c]
        c = p_top
    nedge_v[bv] = v
    nedge_w[bv] = w
    nc2 = 0
    c = bw
    while c != lca:
        chain2[nc2] = c
        nc2 += 1
        nedge_v[c] = ledge_w[c]
        nedge_w[c] = ledge_v[c]
        c = inblossom[ledge_v[c]]
    childs_head[nb] = lca
    parent[lca] = nb
    prev = lca
    for i in range(nc1 - 1, -1, -1):
        c = chain1[i]
        child_next[prev] = c
        child_prev[c] = prev
        parent[c] = nb
        prev = c
    for i in range(nc2):
        c = chain2[i]
        child_next[prev] = c
        child_prev[c] = prev
        parent[c] = nb
        prev = c
    child_next[prev] = lca
    child_prev[lca] = prev
    kc = childs_head[nb]
    while True:
        if label[kc] == 2:
            cnt = _leaves_of(kc, n, childs_head, child_next, scratch, leaf_buf)
            qt = qstate[1]
            if qt + cnt > qcap:
                return _ACT_OVERFLOW
            for i in range(cnt):
                queue[qt + i] = leaf_buf[i]
                if not _append_id(leaf_buf[i], s_members, sm_state, in_s):
                    return _ACT_OVERFLOW
            qstate[1] = qt + cnt
        kc = child_next[kc]
        if kc == childs_head[nb]:
            break
    cnt = _leaves_of(nb, n, childs_head, child_next, scratch, leaf_buf)
    for i in range(cnt):
        inblossom[leaf_buf[i]] = nb
    return _ACT_NONE


@njit(cache=True)
def _blossom_plain(n, adj_ptr, adj_eid, adj_other, eu, ev, w4, mate):
    """Plain maximum-weight matching with a persistent alternating forest.

    All free vertices grow trees from uniform duals; each augmentation
    destroys only the two trees involved, and the search stops once the
    (always equal, always minimal) free duals reach zero.
    """
    nid = 2 * n
    m = len(eu)

    du = np.empty(nid, dtype=np.int64)
    label = np.zeros(nid, dtype=np.int8)
    ledge_v = np.full(nid, -1, dtype=np.int32)
    ledge_w = np.full(nid, -1, dtype=np.int32)
    inblossom = np.empty(n, dtype=np.int32)
    parent = np.full(nid, -1, dtype=np.int32)
    base = np.full(nid, -1, dtype=np.int32)
    in_use = np.zeros(nid, dtype=np.uint8)
    childs_head = np.full(nid, -1, dtype=np.int32)
    child_next = np.full(nid, -1, dtype=np.int32)
    child_prev = np.full(nid, -1, dtype=np.int32)
    nedge_v = np.full(nid, -1, dtype=np.int32)
    nedge_w = np.full(nid, -1, dtype=np.int32)
    free_slots = np.empty(n, dtype=np.int32)
    for k in range(n):
        free_slots[k] = nid - 1 - k
    fstate = np.empty(1, dtype=np.int64)
    fstate[0] = n

    visit = np.zeros(nid, dtype=np.int64)
    vstate = np.zeros(1, dtype=np.int64)

    qcap = 16 * n + 4 * m + 64
    queue = np.empty(qcap, dtype=np.int32)
    qstate = np.zeros(2, dtype=np.int64)
    tree_root = np.full(nid, -1, dtype=np.int32)
    tops_list = np.empty(8 * n + 64, dtype=np.int32)
    tops_state = np.zeros(1, dtype=np.int64)
    in_tops = np.zeros(nid, dtype=np.uint8)
    s_members = np.empty(n, dtype=np.int32)
    sm_state = np.zeros(1, dtype=np.int64)
    in_s = np.zeros(n, dtype=np.uint8)
    t_members = np.empty(n, dtype=np.int32)
    tm_state = np.zeros(1, dtype=np.int64)
    in_t = np.zeros(n, dtype=np.uint8)
    scratch = np.empty(nid + 4, dtype=np.int32)
    chain1 = np.empty(nid + 4, dtype=np.int32)
    chain2 = np.empty(nid + 4, dtype=np.int32)
    leaf_buf = np.empty(max(n, 1), dtype=np.int32)
    tasks = np.empty(2 * nid + 8, dtype=np.int64)

    wmax4 = np.int64(0)
    for e in range(m):
        if w4[e] > wmax4:
            wmax4 = w4[e]
    # uniform duals keep every free vertex at the global minimum, which is
    # what makes the stop-at-zero rule an optimality certificate
    u0 = wmax4 // 2
    for v in range(n):
        inblossom[v] = v
        base[v] = v
        du[v] = u0

    for v in range(n):
        if mate[v] >= 0:
            continue
        for k in range(adj_ptr[v], adj_ptr[v + 1]):
            u = adj_other[k]
            if mate[u] < 0 and u != v:
                if du[v] + du[u] - w4[adj_eid[k]] == 0:
                    mate[v] = u
                    mate[u] = v
                    break

    n_free = 0
    for v in range(n):
        if mate[v] < 0:
            n_free += 1
    if n_free == 0:
        return _OK

    for v in range(n):
        if mate[v] < 0:
            b = inblossom[v]
            label[b] = 1
            tree_root[b] = v
            if not _append_id(b, tops_list, tops_state, in_tops):
                return _OVERFLOW
            cnt = _leaves_of(b, n, childs_head, child_next, scratch, leaf_buf)
            qt = qstate[1]
            if qt + cnt > qcap:
                return _OVERFLOW
            for i in range(cnt):
                queue[qt + i] = leaf_buf[i]
                if not _append_id(leaf_buf[i], s_members, sm_state, in_s):
                    return _OVERFLOW
            qstate[1] = qt + cnt

    rounds_left = 200 * (n + 4)
    while True:
        # drain the scan queue
        while qstate[0] < qstate[1]:
            v = queue[qstate[0]]
            qstate[0] += 1
            if label[inblossom[v]] != 1:
                continue
            for k in range(adj_ptr[v], adj_ptr[v + 1]):
                if label[inblossom[v]] != 1:
                    break
                w = adj_other[k]
                if inblossom[w] == inblossom[v]:
                    continue
                if du[v] + du[w] - w4[adj_eid[k]] != 0:
                    continue
                r1 = tree_root[inblossom[v]]
                r2 = tree_root[inblossom[w]] if label[inblossom[w]] != 0 else np.int32(-1)
                act = _handle_tight_edge_plain(
                    v, w, n, mate, label, ledge_v, ledge_w, inblossom,
                    parent, base, in_use, du, childs_head, child_next,
                    child_prev, nedge_v, nedge_w, free_slots, fstate,
                    visit, vstate, queue, qstate, qcap,
                    tree_root, tops_list, tops_state, in_tops,
                    s_members, sm_state, in_s, t_members, tm_state, in_t,
                    scratch, leaf_buf, chain1, chain2, tasks)
                if act == _ACT_AUGMENTED:
                    n_free -= 2
                    _destroy_trees(r1, r2, tops_list, tops_state, label,
                                   ledge_v, ledge_w, tree_root)
                    if n_free <= 0:
                        return _OK
                elif act == _ACT_OVERFLOW:
                    return _OVERFLOW

        # ----- dual update -----
        rounds_left -= 1
        if rounds_left < 0:
            return _OVERFLOW
        delta = np.int64(-1)
        dtype = 1
        for v in range(n):
            if mate[v] < 0:
                delta = du[v]  # all free duals are equal
                break
        d_bloss = np.int32(-1)
        for si in range(sm_state[0]):
            v = s_members[si]
            if label[inblossom[v]] != 1:
                continue
            for k in range(adj_ptr[v], adj_ptr[v + 1]):
                w = adj_other[k]
                bw = inblossom[w]
                if bw == inblossom[v]:
                    continue
                lb = label[bw]
                if lb == 2:
                    continue
                s2 = du[v] + du[w] - w4[adj_eid[k]]
                if lb == 1:
                    d = s2 // 2
                    if d < delta:
                        delta = d
                        dtype = 3
                else:
                    if s2 < delta:
                        delta = s2
                        dtype = 2
        for ti in range(tops_state[0]):
            b2 = tops_list[ti]
            if (b2 >= n and in_use[b2] == 1 and parent[b2] == -1
                    and label[b2] == 2):
                if du[b2] < delta:
                    delta = du[b2]
                    dtype = 4
                    d_bloss = np.int32(b2)

        if delta > 0:
            for si in range(sm_state[0]):
                v = s_members[si]
                if label[inblossom[v]] == 1:
                    du[v] -= delta
            for ti in range(tm_state[0]):
                v = t_members[ti]
                if label[inblossom[v]] == 2:
                    du[v] += delta
            for ti in range(tops_state[0]):
                b2 = tops_list[ti]
                if b2 >= n and in_use[b2] == 1 and parent[b2] == -1:
                    if label[b2] == 1:
                        du[b2] += delta
                    elif label[b2] == 2:
                        du[b2] -= delta

        if dtype == 1:
            # free duals are zero: unmatched-with-zero-dual certificate
            return _OK

        if dtype == 4:
            _dismantle(d_bloss, n, parent, childs_head, child_next,
                       child_prev, nedge_v, nedge_w, inblossom,
                       scratch, leaf_buf)
            in_use[d_bloss] = 0
            label[d_bloss] = 0
            in_tops[d_bloss] = 0
            free_slots[fstate[0]] = d_bloss
            fstate[0] += 1
            # rebuild the forest from scratch with the current duals
            for ti in range(tops_state[0]):
                b2 = tops_list[ti]
                label[b2] = 0
                ledge_v[b2] = -1
                ledge_w[b2] = -1
            qstate[0] = 0
            qstate[1] = 0
            for v in range(n):
                if mate[v] < 0:
                    b2 = inblossom[v]
                    if label[b2] != 0:
                        continue
                    label[b2] = 1
                    tree_root[b2] = v
                    if not _append_id(b2, tops_list, tops_state, in_tops):
                        return _OVERFLOW
                    cnt = _leaves_of(b2, n, childs_head, child_next, scratch,
                                     leaf_buf)
                    qt = qstate[1]
                    if qt + cnt > qcap:
                        return _OVERFLOW
                    for i in range(cnt):
                        queue[qt + i] = leaf_buf[i]
                        if not _append_id(leaf_buf[i], s_members, sm_state, in_s):
                            return _OVERFLOW
                    qstate[1] = qt + cnt
            continue

        # sweep every newly tight edge around the forest once
        done_sweep = False
        for si in range(sm_state[0]):
            v = s_members[si]
            if label[inblossom[v]] != 1:
                continue
            for k in range(adj_ptr[v], adj_ptr[v + 1]):
                if label[inblossom[v]] != 1:
                    break
                w = adj_other[k]
                if inblossom[w] == inblossom[v]:
                    continue
                if du[v] + du[w] - w4[adj_eid[k]] != 0:
                    continue
                r1 = tree_root[inblossom[v]]
                r2 = tree_root[inblossom[w]] if label[inblossom[w]] != 0 else np.int32(-1)
                act = _handle_tight_edge_plain(
                    v, w, n, mate, label, ledge_v, ledge_w, inblossom,
                    parent, base, in_use, du, childs_head, child_next,
                    child_prev, nedge_v, nedge_w, free_slots, fstate,
                    visit, vstate, queue, qstate, qcap,
                    tree_root, tops_list, tops_state, in_tops,
                    s_members, sm_state, in_s, t_members, tm_state, in_t,
                    scratch, leaf_buf, chain1, chain2, tasks)
                if act == _ACT_AUGMENTED:
                    n_free -= 2
                    _destroy_trees(r1, r2, tops_list, tops_state, label,
                                   ledge_v, ledge_w, tree_root)
                    if n_free <= 0:
                        done_sweep = True
                        break
                elif act == _ACT_OVERFLOW:
                    return _OVERFLOW
            if done_sweep:
                break
        if n_free <= 0:
            return _OK


def _validated_edges(n_vertices, edges_u, edges_v, weights):
    eu = np.ascontiguousarray(edges_u, dtype=np.int32).reshape(-1)
    ev = np.ascontiguousarray(edges_v, dtype=np.int32).reshape(-1)
    w = np.ascontiguousarray(weights, dtype=np.int64).reshape(-1)
    if len(eu) != len(ev) or len(eu) != len(w):
        raise ValueError("edge arrays must have equal length")
    if np.any(w < 0):
        raise ValueError("edge weights must be non-negative")
    if len(eu) and (eu.min() < 0 or ev.min() < 0 or
                    max(int(eu.max()), int(ev.max())) >= n_vertices):
        raise ValueError("edge endpoint out of range")
    return eu, ev, w


def _adjacency(n_vertices, eu, ev):
    """CSR adjacency over both edge directions, built with array ops."""
    m = len(eu)
    heads = np.concatenate([eu, ev])
    others = np.concatenate([ev, eu])
    eids = np.concatenate([np.arange(m, dtype=np.int32)] * 2)
    order = np.argsort(heads, kind="stable")
    adj_other = others[order].astype(np.int32)
    adj_eid = eids[order]
    counts = np.bincount(heads, minlength=n_vertices)
    adj_ptr = np.zeros(n_vertices + 1, dtype=np.int64)
    np.cumsum(counts, out=adj_ptr[1:])
    return adj_ptr, adj_eid, adj_other


def min_weight_perfect_matching(n_vertices: int, edges_u, edges_v, weights) -> np.ndarray:
    """Exact minimum-weight perfect matching.

    Takes parallel arrays of edge endpoints and non-negative int64 weights;
    returns ``mate`` with mate[v] = matched partner.  Raises MatchingError
    when no perfect matching exists.
    """
    eu, ev, w = _validated_edges(n_vertices, edges_u, edges_v, weights)
    if n_vertices % 2 != 0:
        raise MatchingError(f"odd vertex count {n_vertices} admits no perfect matching")
    mate = np.full(n_vertices, -1, dtype=np.int32)
    if n_vertices == 0:
        return mate

    # maximise (wmax - w) at maximum cardinality == minimise total weight
    wmax = int(w.max()) if len(w) else 0
    w4 = 4 * (wmax - w)
    adj_ptr, adj_eid, adj_other = _adjacency(n_vertices, eu, ev)
    status = _blossom_solve(n_vertices, adj_ptr, adj_eid, adj_other, eu, ev,
                            w4, mate)
    if status == _OVERFLOW:
        raise MatchingError("matching solver exceeded its work buffers")
    if status == _IMPERFECT or np.any(mate < 0):
        raise MatchingError("no perfect matching exists on the given edges")
    return mate


def max_weight_matching(n_vertices: int, edges_u, edges_v, weights) -> np.ndarray:
    """Plain maximum-weight matching; vertices may stay unmatched.

    Weights must be non-negative int64.  Returns ``mate`` with -1 for
    unmatched vertices.
    """
    eu, ev, w = _validated_edges(n_vertices, edges_u, edges_v, weights)
    mate = np.full(n_vertices, -1, dtype=np.int32)
    if n_vertices == 0 or len(eu) == 0:
        return mate
    w4 = 4 * w
    adj_ptr, adj_eid, adj_other = _adjacency(n_vertices, eu, ev)
    status = _blossom_plain(n_vertices, adj_ptr, adj_eid, adj_other, eu, ev,
                            w4, mate)
    if status != _OK:
        raise MatchingError("matching solver exceeded its work buffers")
    return mate


def matching_weight(mate: np.ndarray, edges_u, edges_v, weights) -> int:
    """Total weight of a matching given as a mate array."""
    pair_w: dict[tuple[int, int], int] = {}
    for u, v, w in zip(edges_u, edges_v, weights):
        key = (min(int(u), int(v)), max(int(u), int(v)))
        if key not in pair_w or w < pair_w[key]:
            pair_w[key] = int(w)
    total = 0
    for v in range(len(mate)):
        u = int(mate[v])
        if u > v:
            total += pair_w[(v, u)]
    return total


def brute_force_min_weight_perfect_matching(weight: np.ndarray):
    """Reference oracle: enumerate all pairings of a dense instance.

    ``weight`` is a symmetric matrix with np.inf marking absent edges.
    Returns (pairs, total) or raises MatchingError.  Exponential; intended
    for instances of at most ~12 vertices.
    """
    n = weight.shape[0]
    if n % 2 != 0:
        raise MatchingError("odd vertex count")
    best_total = [np.inf]
    best_pairs: list[list[tuple[int, int]]] = [[]]

    def rec(remaining: list[int], acc: float, pairs: list[tuple[int, int]]) -> None:
        if not remaining:
            if acc < best_total[0]:
                best_total[0] = acc
                best_pairs[0] = list(pairs)
            return
        if acc >= best_total[0]:
            return
        v = remaining[0]
        rest = remaining[1:]
        for i, u in enumerate(rest):
            wvu = weight[v, u]
            if not np.isfinite(wvu):
                continue
            pairs.append((v, u))
            rec(rest[:i] + rest[i + 1:], acc + wvu, pairs)
            pairs.pop()

    rec(list(range(n)), 0.0, [])
    if not np.isfinite(best_total[0]):
        raise MatchingError("no perfect matching exists on the given edges")
    return best_pairs[0], best_total[0]
