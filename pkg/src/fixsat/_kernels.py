"""Hot loops shared by the solver, the baselines, and the occurrence index.

Conventions:
  - clause ids are 0-based in here; the public API is 1-based.
  - literals are signed ints (+v / -v), stored as int32 in an (m, k) array
    which may be RAM-resident or a read-only memmap.
  - occurrence index: entries for variable v are occ[indptr[v]:indptr[v+1]],
    each +(c+1) for a positive occurrence in clause c and -(c+1) for a
    negative one, ascending by clause (and position within a clause).
  - membership arrays (in_z, in_zp, assigned, ...) are uint8 indexed by
    variable, slot 0 unused.

Every function below must stay numba-nopython compatible; the same bodies run
interpreted when the python backend is selected.
"""

import numpy as np

from ._backend import kernel


# ---------------------------------------------------------------- heaps

@kernel
def _heap_push(heap, size, val):
    """Push val onto a binary min-heap, growing the array if needed.

    Returns (heap, new_size); the heap array may be a reallocated copy.
    """
    if size >= heap.shape[0]:
        bigger = np.empty(heap.shape[0] * 2, np.int32)
        bigger[:size] = heap[:size]
        heap = bigger
    heap[size] = val
    i = size
    size += 1
    while i > 0:
        parent = (i - 1) // 2
        if heap[parent] <= heap[i]:
            break
        tmp = heap[parent]
        heap[parent] = heap[i]
        heap[i] = tmp
        i = parent
    return heap, size


@kernel
def _heap_pop(heap, size):
    """Pop the minimum. Returns (value, new_size)."""
    top = heap[0]
    size -= 1
    heap[0] = heap[size]
    i = 0
    while True:
        left = 2 * i + 1
        if left >= size:
            break
        child = left
        right = left + 1
        if right < size and heap[right] < heap[left]:
            child = right
        if heap[i] <= heap[child]:
            break
        tmp = heap[i]
        heap[i] = heap[child]
        heap[child] = tmp
        i = child
    return top, size


# ------------------------------------------------- occurrence index

@kernel
def count_occurrences(lits, counts):
    """Accumulate per-variable occurrence counts (counts indexed by var)."""
    m, k = lits.shape
    for i in range(m):
        for j in range(k):
            v = lits[i, j]
            if v < 0:
                v = -v
            counts[v] += 1


@kernel
def fill_occurrences(lits, cursor, occ):
    """Scatter signed clause ids into occ; cursor[v] is the write position."""
    m, k = lits.shape
    for i in range(m):
        for j in range(k):
            lit = lits[i, j]
            if lit > 0:
                v = lit
                occ[cursor[v]] = i + 1
            else:
                v = -lit
                occ[cursor[v]] = -(i + 1)
            cursor[v] += 1


# ------------------------------------------------------ evaluation

@kernel
def first_unsatisfied(lits, values):
    """0-based index of the first clause with no true literal, or -1."""
    m, k = lits.shape
    for i in range(m):
        sat = False
        for j in range(k):
            lit = lits[i, j]
            if lit > 0:
                if values[lit] != 0:
                    sat = True
                    break
            else:
                if values[-lit] == 0:
                    sat = True
                    break
        if not sat:
            return i
    return -1


@kernel
def collect_unsatisfied(lits, values, out):
    """Fill out with 0-based unsatisfied clause ids; returns the count."""
    m, k = lits.shape
    cnt = 0
    for i in range(m):
        sat = False
        for j in range(k):
            lit = lits[i, j]
            if lit > 0:
                if values[lit] != 0:
                    sat = True
                    break
            else:
                if values[-lit] == 0:
                    sat = True
                    break
        if not sat:
            out[cnt] = i
            cnt += 1
    return cnt


# ---------------------------------------------------------- phase 1

@kernel
def phase1_init(lits, pos_out, pos_sum, u, allneg):
    """Initial counters for an empty selection set.

    pos_out[i]: positive literals of clause i (none selected yet, so all
    positives count), pos_sum[i]: sum of their variables, u[x]: number of
    clauses whose unique positive literal is x. All-negative clause ids are
    collected into allneg. Returns (unique_count, allneg_count).
    """
    m, k = lits.shape
    unique = 0
    na = 0
    for i in range(m):
        p = 0
        s = 0
        for j in range(k):
            lit = lits[i, j]
            if lit > 0:
                p += 1
                s += lit
        pos_out[i] = p
        pos_sum[i] = s
        if p == 0:
            allneg[na] = i
            na += 1
        elif p == 1:
            u[s] += 1
            unique += 1
    return unique, na


@kernel
def phase1_run(allneg_rows, allneg_ids, k1, in_z, z_order,
               pos_out, neg_in, pos_sum, u, indptr, occ, unique0,
               do_trace, trace_clause, trace_var, trace_fb, trace_unique,
               do_snap, snap_pos_out, snap_neg_in, snap_u, snap_unique):
    """Greedy selection pass over the all-negative clauses.

    For each all-negative clause without a selected variable: take the least
    position j < k1 whose variable supports no unique clause (u == 0), else
    fall back to position k1 unconditionally. Counters are maintained
    incrementally through the occurrence index. Returns
    (selected_count, fallback_count, final_unique_count).
    """
    unique = unique0
    zc = 0
    fallbacks = 0
    for t in range(allneg_ids.shape[0]):
        i = allneg_ids[t]
        k = allneg_rows.shape[1]
        hit = False
        for j in range(k):
            if in_z[-allneg_rows[t, j]] != 0:
                hit = True
                break
        if hit:
            continue
        pick = -1
        for j in range(k1 - 1):
            if u[-allneg_rows[t, j]] == 0:
                pick = j
                break
        fb = False
        if pick < 0:
            pick = k1 - 1
            fb = True
            fallbacks += 1
        x = -allneg_rows[t, pick]
        in_z[x] = 1
        z_order[zc] = x
        zc += 1
        for p in range(indptr[x], indptr[x + 1]):
            e = occ[p]
            if e > 0:
                c = e - 1
                pos_out[c] -= 1
                pos_sum[c] -= x
                if neg_in[c] == 0:
                    if pos_out[c] == 1:
                        u[pos_sum[c]] += 1
                        unique += 1
                    elif pos_out[c] == 0:
                        u[x] -= 1
                        unique -= 1
            else:
                c = -e - 1
                neg_in[c] += 1
                if neg_in[c] == 1 and pos_out[c] == 1:
                    u[pos_sum[c]] -= 1
                    unique -= 1
        if do_trace:
            trace_clause[zc - 1] = i + 1
            trace_var[zc - 1] = x
            trace_fb[zc - 1] = 1 if fb else 0
            trace_unique[zc - 1] = unique
        if do_snap:
            for c in range(pos_out.shape[0]):
                snap_pos_out[zc - 1, c] = pos_out[c]
                snap_neg_in[zc - 1, c] = neg_in[c]
            for v in range(u.shape[0]):
                snap_u[zc - 1, v] = u[v]
            snap_unique[zc - 1] = unique
    return zc, fallbacks, unique


# ---------------------------------------------------------- phase 2

@kernel
def phase2_init(lits, in_z, support, live, live_sum, uprime, q_out):
    """Counters for an empty repair set.

    support[i]: literals of clause i true under the phase-1 assignment,
    live[i]: literals that are neither a positive on a selected variable nor
    a negative on an unselected one, live_sum[i]: signed sum of live
    literals, uprime[x]: clauses whose single live literal is positive on x.
    Clauses with support 0 go to q_out. Returns the queue count, which is
    also the initial endangered count.
    """
    m, k = lits.shape
    qc = 0
    for i in range(m):
        sup = 0
        lv = 0
        ls = 0
        for j in range(k):
            lit = lits[i, j]
            if lit > 0:
                if in_z[lit] == 0:
                    sup += 1
                    lv += 1
                    ls += lit
            else:
                if in_z[-lit] != 0:
                    sup += 1
                    lv += 1
                    ls += lit
        support[i] = sup
        live[i] = lv
        live_sum[i] = ls
        if lv == 1 and ls > 0:
            uprime[ls] += 1
        if sup == 0:
            q_out[qc] = i
            qc += 1
    return qc


@kernel
def phase2_run(lits, k1, in_z, in_zp, zp_order,
               support, live, live_sum, distinct, uprime,
               indptr, occ, heap, heap_size, endangered0,
               do_snap, snap_support, snap_live, snap_live_sum,
               snap_distinct, snap_uprime):
    """Repair loop over the endangered-clause queue.

    Pops the least queued clause id; prefers three window positions in
    (k1, k-5] carrying distinct variables that are outside both selection
    sets and support no single-live-positive clause; otherwise takes the
    first three distinct not-yet-selected variables from the last five
    positions. The chosen variables update support/live/distinct counters
    through the occurrence index and newly endangered clauses with fewer
    than three distinct repair variables are queued.

    Returns (zp_order, zp_count, iterations, anomaly_clause_plus1_or_0,
    endangered_count); zp_order may be a reallocated copy of the input.
    """
    k = lits.shape[1]
    endangered = endangered0
    zpc = 0
    iters = 0
    picks = np.empty(3, np.int64)
    while heap_size > 0:
        i, heap_size = _heap_pop(heap, heap_size)
        if distinct[i] >= 3:
            continue
        npick = 0
        lo = k1
        hi = k - 5
        for j in range(lo, hi):
            lit = lits[i, j]
            v = lit if lit > 0 else -lit
            if in_z[v] == 0 and in_zp[v] == 0 and uprime[v] == 0:
                dup = False
                for q in range(npick):
                    if picks[q] == v:
                        dup = True
                        break
                if not dup:
                    picks[npick] = v
                    npick += 1
                    if npick == 3:
                        break
        if npick < 3:
            npick = 0
            lo = k - 5
            if lo < 0:
                lo = 0
            for j in range(lo, k):
                lit = lits[i, j]
                v = lit if lit > 0 else -lit
                if in_zp[v] == 0:
                    dup = False
                    for q in range(npick):
                        if picks[q] == v:
                            dup = True
                            break
                    if not dup:
                        picks[npick] = v
                        npick += 1
                        if npick == 3:
                            break
            if npick < 3:
                return zp_order, zpc, iters, i + 1, endangered
        iters += 1
        for t in range(3):
            x = picks[t]
            in_zp[x] = 1
            if zpc >= zp_order.shape[0]:
                bigger = np.empty(zp_order.shape[0] * 2, np.int32)
                bigger[:zpc] = zp_order[:zpc]
                zp_order = bigger
            zp_order[zpc] = x
            zpc += 1
            x_selected = in_z[x] != 0
            last_c = -1
            for p in range(indptr[x], indptr[x + 1]):
                e = occ[p]
                if e > 0:
                    c = e - 1
                    positive = True
                else:
                    c = -e - 1
                    positive = False
                if c != last_c:
                    distinct[c] += 1
                    last_c = c
                if positive:
                    if not x_selected:
                        support[c] -= 1
                        if support[c] == 0:
                            endangered += 1
                            if distinct[c] < 3:
                                heap, heap_size = _heap_push(heap, heap_size, c)
                        live[c] -= 1
                        live_sum[c] -= x
                        if live[c] == 1:
                            s = live_sum[c]
                            if s > 0:
                                uprime[s] += 1
                        elif live[c] == 0:
                            uprime[x] -= 1
                else:
                    if x_selected:
                        support[c] -= 1
                        if support[c] == 0:
                            endangered += 1
                            if distinct[c] < 3:
                                heap, heap_size = _heap_push(heap, heap_size, c)
            if do_snap:
                for c in range(support.shape[0]):
                    snap_support[zpc - 1, c] = support[c]
                    snap_live[zpc - 1, c] = live[c]
                    snap_live_sum[zpc - 1, c] = live_sum[c]
                    snap_distinct[zpc - 1, c] = distinct[c]
                for v in range(uprime.shape[0]):
                    snap_uprime[zpc - 1, v] = uprime[v]
    return zp_order, zpc, iters, 0, endangered


@kernel
def endangered_scan(lits, in_z, in_zp, out):
    """Definitional endangered scan: clause ids (0-based) with no literal
    that is true under the phase-1 assignment on a variable outside the
    repair set. Returns the count."""
    m, k = lits.shape
    cnt = 0
    for i in range(m):
        secure = False
        for j in range(k):
            lit = lits[i, j]
            if lit > 0:
                if in_z[lit] == 0 and in_zp[lit] == 0:
                    secure = True
                    break
            else:
                if in_z[-lit] != 0 and in_zp[-lit] == 0:
                    secure = True
                    break
        if not secure:
            out[cnt] = i
            cnt += 1
    return cnt


@kernel
def incidence_adj(lits, rows, right_index, indptr, nbr):
    """CSR adjacency of the clause/repair-variable incidence graph.

    rows holds the (0-based) endangered clause ids; right_index maps a
    variable to its dense right-vertex id, -1 for variables outside the
    repair set. Neighbor lists are deduplicated and ascending. Returns the
    total edge count."""
    nl = rows.shape[0]
    k = lits.shape[1]
    e = 0
    indptr[0] = 0
    for u in range(nl):
        i = rows[u]
        start = e
        for j in range(k):
            r = right_index[abs(lits[i, j])]
            if r < 0:
                continue
            # insertion sort with dedup; k is small
            lo = start
            while lo < e and nbr[lo] < r:
                lo += 1
            if lo < e and nbr[lo] == r:
                continue
            hi = e
            while hi > lo:
                nbr[hi] = nbr[hi - 1]
                hi -= 1
            nbr[lo] = r
            e += 1
        indptr[u + 1] = e
    return e


@kernel
def hk_solve(indptr, nbr, nr, match_l, match_r):
    """Hopcroft-Karp maximum matching on a CSR bipartite graph.

    match_l / match_r are preallocated (-1 filled) and updated in place;
    returns the matching size. BFS builds the layered graph from the free
    left vertices, then vertex-disjoint augmenting paths are found by an
    iterative DFS with explicit stacks (no recursion in kernels)."""
    nl = match_l.shape[0]
    inf = np.int32(2147483647)
    dist = np.empty(nl, np.int32)
    queue = np.empty(nl, np.int32)
    stack = np.empty(nl + 1, np.int32)
    edge_at = np.empty(nl + 1, np.int64)
    size = 0
    while True:
        qt = 0
        for u in range(nl):
            if match_l[u] < 0:
                dist[u] = 0
                queue[qt] = u
                qt += 1
            else:
                dist[u] = inf
        found = False
        qh = 0
        while qh < qt:
            u = queue[qh]
            qh += 1
            for e in range(indptr[u], indptr[u + 1]):
                w = match_r[nbr[e]]
                if w < 0:
                    found = True
                elif dist[w] == inf:
                    dist[w] = dist[u] + 1
                    queue[qt] = w
                    qt += 1
        if not found:
            break
        for s in range(nl):
            if match_l[s] >= 0:
                continue
            top = 0
            stack[0] = s
            edge_at[0] = indptr[s]
            while top >= 0:
                u = stack[top]
                e = edge_at[top]
                if e >= indptr[u + 1]:
                    dist[u] = inf  # dead end: never on a shortest path again
                    top -= 1
                    continue
                edge_at[top] = e + 1
                r = nbr[e]
                w = match_r[r]
                if w < 0:
                    for t in range(top, -1, -1):
                        rt = nbr[edge_at[t] - 1]
                        match_r[rt] = stack[t]
                        match_l[stack[t]] = rt
                    size += 1
                    top = -1
                elif dist[w] == dist[u] + 1:
                    top += 1
                    stack[top] = w
                    edge_at[top] = indptr[w]
    return size


@kernel
def hall_reach(indptr, nbr, match_l, match_r, reach_l, reach_r):
    """Alternating BFS from the unmatched left vertices; marks every vertex
    reachable via non-matching left-to-right / matching right-to-left edges.
    The reached left set with its reached neighborhood is a Hall-deficiency
    certificate when the matching is maximum and not covering."""
    nl = match_l.shape[0]
    queue = np.empty(nl, np.int32)
    qt = 0
    for u in range(nl):
        if match_l[u] < 0:
            reach_l[u] = 1
            queue[qt] = u
            qt += 1
    qh = 0
    while qh < qt:
        u = queue[qh]
        qh += 1
        for e in range(indptr[u], indptr[u + 1]):
            r = nbr[e]
            if reach_r[r] != 0:
                continue
            reach_r[r] = 1
            w = match_r[r]
            if w >= 0 and reach_l[w] == 0:
                reach_l[w] = 1
                queue[qt] = w
                qt += 1


# --------------------------------------------------------- baselines

@kernel
def uc_run(lits, n, indptr, occ, rng,
           assigned, value, pool, pool_pos,
           do_trace, trace_var, trace_val, trace_unit):
    """Unit-clause heuristic.

    Unit steps (an unsatisfied clause with exactly one unassigned literal,
    least clause index first) take priority; otherwise a uniformly random
    unassigned variable gets a uniformly random value. Fails as soon as a
    clause runs out of literals. Returns (status, steps): status 1 success,
    0 empty-clause failure.
    """
    m, k = lits.shape
    sat = np.zeros(m, np.uint8)
    cnt = np.empty(m, np.int16)
    heap = np.empty(m + 2, np.int32)
    heap_size = 0
    sat_count = 0
    for i in range(m):
        cnt[i] = k
        if k == 1:
            heap, heap_size = _heap_push(heap, heap_size, i)
    pool_size = n
    steps = 0
    while pool_size > 0 and sat_count < m:
        unit_c = -1
        while heap_size > 0:
            c = heap[0]
            if sat[c] != 0 or cnt[c] != 1:
                _, heap_size = _heap_pop(heap, heap_size)
                continue
            _, heap_size = _heap_pop(heap, heap_size)
            unit_c = c
            break
        if unit_c >= 0:
            v = 0
            val = 0
            for j in range(k):
                lit = lits[unit_c, j]
                w = lit if lit > 0 else -lit
                if assigned[w] == 0:
                    v = w
                    val = 1 if lit > 0 else 0
                    break
        else:
            idx = rng.integers(0, pool_size)
            v = pool[idx]
            val = rng.integers(0, 2)
        # swap-remove v from the unassigned pool
        pi = pool_pos[v]
        pool_size -= 1
        last = pool[pool_size]
        pool[pi] = last
        pool_pos[last] = pi
        assigned[v] = 1
        value[v] = val
        if do_trace:
            trace_var[steps] = v
            trace_val[steps] = val
            trace_unit[steps] = 1 if unit_c >= 0 else 0
        steps += 1
        for p in range(indptr[v], indptr[v + 1]):
            e = occ[p]
            if e > 0:
                c = e - 1
                lit_true = val != 0
            else:
                c = -e - 1
                lit_true = val == 0
            if sat[c] != 0:
                continue
            if lit_true:
                sat[c] = 1
                sat_count += 1
            else:
                cnt[c] -= 1
                if cnt[c] == 1:
                    heap, heap_size = _heap_push(heap, heap_size, c)
                elif cnt[c] == 0:
                    return 0, steps
    return 1, steps


@kernel
def sc_run(lits, n, indptr, occ, rng,
           assigned, value, pool, pool_pos,
           do_trace, trace_var, trace_val, trace_forced):
    """Shortest-clause heuristic.

    When some unsatisfied clause has fewer than k unassigned literals, pick
    uniformly among the clauses of minimum remaining length and satisfy a
    uniformly random unassigned occurrence; otherwise assign a random value
    to a random unassigned variable. Returns (status, steps).
    """
    m, k = lits.shape
    sat = np.zeros(m, np.uint8)
    cnt = np.empty(m, np.int16)
    for i in range(m):
        cnt[i] = k
    # bucket[l] holds candidate clauses whose length reached l; entries go
    # stale when the clause moved on or got satisfied and are discarded on
    # draw, so a draw is uniform over the valid members.
    bucket = np.empty((k, m), np.int32)
    bucket_size = np.zeros(k, np.int64)
    sat_count = 0
    pool_size = n
    steps = 0
    while pool_size > 0 and sat_count < m:
        chosen = -1
        for l in range(1, k):
            while bucket_size[l] > 0:
                idx = rng.integers(0, bucket_size[l])
                c = bucket[l, idx]
                bucket_size[l] -= 1
                bucket[l, idx] = bucket[l, bucket_size[l]]
                if sat[c] == 0 and cnt[c] == l:
                    chosen = c
                    break
            if chosen >= 0:
                break
        if chosen >= 0:
            # satisfy a uniformly random unassigned occurrence
            length = np.int64(cnt[chosen])
            pos = rng.integers(0, length)
            v = 0
            val = 0
            seen = 0
            for j in range(k):
                lit = lits[chosen, j]
                w = lit if lit > 0 else -lit
                if assigned[w] == 0:
                    if seen == pos:
                        v = w
                        val = 1 if lit > 0 else 0
                        break
                    seen += 1
        else:
            idx = rng.integers(0, pool_size)
            v = pool[idx]
            val = rng.integers(0, 2)
        pi = pool_pos[v]
        pool_size -= 1
        last = pool[pool_size]
        pool[pi] = last
        pool_pos[last] = pi
        assigned[v] = 1
        value[v] = val
        if do_trace:
            trace_var[steps] = v
            trace_val[steps] = val
            trace_forced[steps] = 1 if chosen >= 0 else 0
        steps += 1
        for p in range(indptr[v], indptr[v + 1]):
            e = occ[p]
            if e > 0:
                c = e - 1
                lit_true = val != 0
            else:
                c = -e - 1
                lit_true = val == 0
            if sat[c] != 0:
                continue
            if lit_true:
                sat[c] = 1
                sat_count += 1
            else:
                cnt[c] -= 1
                if cnt[c] == 0:
                    return 0, steps
                bucket[cnt[c], bucket_size[cnt[c]]] = c
                bucket_size[cnt[c]] += 1
    return 1, steps


@kernel
def walksat_run(lits, indptr, occ, rng, value, max_flips):
    """Pure random walk: flip a uniformly random position of a uniformly
    random unsatisfied clause until satisfied or out of budget.
    Returns (status, flips)."""
    m, k = lits.shape
    true_cnt = np.zeros(m, np.int16)
    us_data = np.empty(m, np.int32)
    us_pos = np.full(m, -1, np.int64)
    us_size = 0
    for i in range(m):
        t = 0
        for j in range(k):
            lit = lits[i, j]
            if lit > 0:
                if value[lit] != 0:
                    t += 1
            else:
                if value[-lit] == 0:
                    t += 1
        true_cnt[i] = t
        if t == 0:
            us_data[us_size] = i
            us_pos[i] = us_size
            us_size += 1
    flips = 0
    while us_size > 0:
        if flips >= max_flips:
            return 0, flips
        ci = us_data[rng.integers(0, us_size)]
        j = rng.integers(0, k)
        lit = lits[ci, j]
        v = lit if lit > 0 else -lit
        value[v] = 1 - value[v]
        nv = value[v]
        for p in range(indptr[v], indptr[v + 1]):
            e = occ[p]
            if e > 0:
                c = e - 1
                now_true = nv != 0
            else:
                c = -e - 1
                now_true = nv == 0
            if now_true:
                true_cnt[c] += 1
                if true_cnt[c] == 1:
                    pos = us_pos[c]
                    us_size -= 1
                    last = us_data[us_size]
                    us_data[pos] = last
                    us_pos[last] = pos
                    us_pos[c] = -1
            else:
                true_cnt[c] -= 1
                if true_cnt[c] == 0:
                    us_data[us_size] = c
                    us_pos[c] = us_size
                    us_size += 1
        flips += 1
    return 1, flips


@kernel
def pl_run(lits, n, indptr, occ, assigned, value, sat, residual):
    """Pure-literal fixpoint, least variable first.

    A variable occurring (in unsatisfied clauses) with a single polarity is
    assigned to satisfy those occurrences; satisfied clauses stop counting,
    which can free further variables. Variables whose occurrences all
    disappear before their turn stay unassigned. Returns
    (assigned_count, residual_count)."""
    m, k = lits.shape
    pos_cnt = np.zeros(n + 1, np.int32)
    neg_cnt = np.zeros(n + 1, np.int32)
    for v in range(1, n + 1):
        for p in range(indptr[v], indptr[v + 1]):
            if occ[p] > 0:
                pos_cnt[v] += 1
            else:
                neg_cnt[v] += 1
    heap = np.empty(3 * n + 4, np.int32)
    heap_size = 0
    for v in range(1, n + 1):
        total = pos_cnt[v] + neg_cnt[v]
        if total > 0 and (pos_cnt[v] == 0 or neg_cnt[v] == 0):
            heap, heap_size = _heap_push(heap, heap_size, v)
    nassigned = 0
    while heap_size > 0:
        v, heap_size = _heap_pop(heap, heap_size)
        if assigned[v] != 0:
            continue
        total = pos_cnt[v] + neg_cnt[v]
        if total == 0 or (pos_cnt[v] > 0 and neg_cnt[v] > 0):
            continue
        val = 1 if pos_cnt[v] > 0 else 0
        assigned[v] = 1
        value[v] = val
        nassigned += 1
        for p in range(indptr[v], indptr[v + 1]):
            e = occ[p]
            if e > 0:
                c = e - 1
                sat_here = val != 0
            else:
                c = -e - 1
                sat_here = val == 0
            if not sat_here or sat[c] != 0:
                continue
            sat[c] = 1
            for j in range(k):
                lit = lits[c, j]
                if lit > 0:
                    w = lit
                    pos_cnt[w] -= 1
                    if pos_cnt[w] == 0 and neg_cnt[w] > 0 and assigned[w] == 0:
                        heap, heap_size = _heap_push(heap, heap_size, w)
                else:
                    w = -lit
                    neg_cnt[w] -= 1
                    if neg_cnt[w] == 0 and pos_cnt[w] > 0 and assigned[w] == 0:
                        heap, heap_size = _heap_push(heap, heap_size, w)
    rc = 0
    for i in range(m):
        if sat[i] == 0:
            residual[rc] = i
            rc += 1
    return nassigned, rc
