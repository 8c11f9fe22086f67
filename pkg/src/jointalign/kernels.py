"""Hot loops over the CSR query graph.

All functions here take and return plain numpy arrays and integers so they
compile under ``numba.njit`` and also run unchanged in the interpreter (see
``_accel``). Randomness comes from a Lehmer (minstd) generator whose state
lives in a one-element int64 array, which keeps both backends bit-identical.
"""

import numpy as np

from ._accel import jit

MINSTD_MOD = 2147483647
MINSTD_MUL = 48271


def seed_state(seed):
    """Map an arbitrary integer seed to a valid minstd state array."""
    s = int(seed) % (MINSTD_MOD - 1) + 1
    return np.array([s], dtype=np.int64)


@jit
def rand_below(rs, bound):
    """Uniform integer in ``[0, bound)``; advances ``rs`` in place."""
    s = (rs[0] * MINSTD_MUL) % MINSTD_MOD
    rs[0] = s
    # s is uniform on [1, MOD-1]
    return ((s - 1) * bound) // (MINSTD_MOD - 1)


@jit
def find_slot(indptr, indices, u, v):
    lo = indptr[u]
    hi = indptr[u + 1]
    while lo < hi:
        mid = (lo + hi) // 2
        if indices[mid] < v:
            lo = mid + 1
        else:
            hi = mid
    if lo < indptr[u + 1] and indices[lo] == v:
        return lo
    return -1


@jit
def _collect(indptr, indices, u, used, buf):
    c = 0
    for j in range(indptr[u], indptr[u + 1]):
        w = indices[j]
        if not used[w]:
            buf[c] = w
            c += 1
    return c


@jit
def _draw(buf, count, used, rs):
    """Partial Fisher-Yates draw from ``buf[:count]`` skipping used vertices.

    Returns ``(vertex, new_count)``; vertex is -1 once nothing is eligible.
    """
    while count > 0:
        j = rand_below(rs, count)
        w = buf[j]
        count -= 1
        buf[j] = buf[count]
        buf[count] = w
        if not used[w]:
            return w, count
    return -1, 0


@jit
def grow_tree_kernel(indptr, indices, root, depth, b1, b, used, rs):
    """Random BFS tree from ``root``; marks its vertices in ``used``.

    Returns ``(nodes, parent, level, count)`` where ``parent`` indexes into
    ``nodes`` (-1 for the root).
    """
    n = indptr.size - 1
    nodes = np.empty(n, dtype=np.int64)
    parent = np.empty(n, dtype=np.int64)
    level = np.empty(n, dtype=np.int64)
    buf = np.empty(n, dtype=np.int64)
    nodes[0] = root
    parent[0] = -1
    level[0] = 0
    used[root] = True
    count = 1
    start = 0
    for d in range(1, depth + 1):
        cap = b1 if d == 1 else b
        end = count
        for p in range(start, end):
            c = _collect(indptr, indices, nodes[p], used, buf)
            for _ in range(cap):
                w, c = _draw(buf, c, used, rs)
                if w < 0:
                    break
                used[w] = True
                nodes[count] = w
                parent[count] = p
                level[count] = d
                count += 1
        start = end
        if start == count:
            break
    return nodes, parent, level, count


@jit
def twin_trees_kernel(indptr, indices, x, y, depth, b1, b, used, rs):
    """Grow isomorphic, vertex-disjoint trees from ``x`` and ``y`` in lockstep.

    Node ``i`` of one tree is matched with node ``i`` of the other; a child
    is only kept when both sides can supply one, so the trees stay
    isomorphic. Returns ``(tx, ty, parent, level, count)``.
    """
    n = indptr.size - 1
    tx = np.empty(n, dtype=np.int64)
    ty = np.empty(n, dtype=np.int64)
    parent = np.empty(n, dtype=np.int64)
    level = np.empty(n, dtype=np.int64)
    bufx = np.empty(n, dtype=np.int64)
    bufy = np.empty(n, dtype=np.int64)
    used[x] = True
    used[y] = True
    tx[0] = x
    ty[0] = y
    parent[0] = -1
    level[0] = 0
    count = 1
    start = 0
    for d in range(1, depth + 1):
        cap = b1 if d == 1 else b
        end = count
        for p in range(start, end):
            cx = _collect(indptr, indices, tx[p], used, bufx)
            cy = _collect(indptr, indices, ty[p], used, bufy)
            for _ in range(cap):
                wx, cx = _draw(bufx, cx, used, rs)
                if wx < 0:
                    break
                used[wx] = True
                wy, cy = _draw(bufy, cy, used, rs)
                if wy < 0:
                    used[wx] = False
                    break
                used[wy] = True
                tx[count] = wx
                ty[count] = wy
                parent[count] = p
                level[count] = d
                count += 1
        start = end
        if start == count:
            break
    return tx, ty, parent, level, count


@jit
def _expand_side(indptr, indices, used, rs, buf, b, lo, hi, leaf_linked,
                 s_node, s_par, s_leaf, s_depth, s_count, owner, ent, tag_sign):
    """Give each frontier entry in ``[lo, hi)`` up to ``b`` new children."""
    for e in range(lo, hi):
        i = s_leaf[e]
        if leaf_linked[i]:
            continue
        c = _collect(indptr, indices, s_node[e], used, buf)
        for _ in range(b):
            w, c = _draw(buf, c, used, rs)
            if w < 0:
                break
            used[w] = True
            s_node[s_count] = w
            s_par[s_count] = e
            s_leaf[s_count] = i
            s_depth[s_count] = s_depth[e] + 1
            owner[w] = tag_sign * (i + 1)
            ent[w] = s_count
            s_count += 1
    return s_count


@jit
def pair_paths_kernel(indptr, indices, x, y, tree_depth, reach_depth, b1, b, seed):
    """Almost edge-disjoint x-y paths through twin trees and leaf subtrees.

    Leaf subtrees are grown one level at a time and only for leaf pairs that
    are not linked yet; at each round the linking edge minimising
    ``(path length, u, v)`` is taken, so links are as short as the budget
    allows and ties resolve to the lowest canonical edge.

    Returns ``(path_ptr, path_verts, path_leaf, tx, ty, tparent, tlevel,
    tcount, n_leaves)``.
    """
    n = indptr.size - 1
    rs = np.empty(1, dtype=np.int64)
    rs[0] = seed % (MINSTD_MOD - 1) + 1
    used = np.zeros(n, dtype=np.bool_)
    tx, ty, tparent, tlevel, tcount = twin_trees_kernel(
        indptr, indices, x, y, tree_depth, b1, b, used, rs
    )

    # matched leaves: pairs that reached full depth
    leaf_pair = np.empty(tcount, dtype=np.int64)
    n_leaves = 0
    for p in range(tcount):
        if tlevel[p] == tree_depth:
            leaf_pair[n_leaves] = p
            n_leaves += 1

    sub_depth = reach_depth - tree_depth
    owner = np.zeros(n, dtype=np.int64)
    ent = np.full(n, -1, dtype=np.int64)
    ax_node = np.empty(n, dtype=np.int64)
    ax_par = np.empty(n, dtype=np.int64)
    ax_leaf = np.empty(n, dtype=np.int64)
    ax_depth = np.empty(n, dtype=np.int64)
    ay_node = np.empty(n, dtype=np.int64)
    ay_par = np.empty(n, dtype=np.int64)
    ay_leaf = np.empty(n, dtype=np.int64)
    ay_depth = np.empty(n, dtype=np.int64)
    for i in range(n_leaves):
        p = leaf_pair[i]
        ax_node[i] = tx[p]
        ax_par[i] = -1
        ax_leaf[i] = i
        ax_depth[i] = 0
        owner[tx[p]] = i + 1
        ent[tx[p]] = i
        ay_node[i] = ty[p]
        ay_par[i] = -1
        ay_leaf[i] = i
        ay_depth[i] = 0
        owner[ty[p]] = -(i + 1)
        ent[ty[p]] = i
    nx = n_leaves
    ny = n_leaves
    fx_lo = 0
    fy_lo = 0

    linked = np.zeros(n_leaves, dtype=np.bool_)
    link_a = np.full(n_leaves, -1, dtype=np.int64)
    link_b = np.full(n_leaves, -1, dtype=np.int64)
    best_len = np.empty(n_leaves, dtype=np.int64)
    best_u = np.empty(n_leaves, dtype=np.int64)
    best_v = np.empty(n_leaves, dtype=np.int64)
    buf = np.empty(n, dtype=np.int64)

    for r in range(sub_depth + 1):
        for i in range(n_leaves):
            best_len[i] = -1
        for e in range(nx):
            i = ax_leaf[e]
            if linked[i]:
                continue
            a = ax_node[e]
            for j in range(indptr[a], indptr[a + 1]):
                w = indices[j]
                if owner[w] != -(i + 1):
                    continue
                f = ent[w]
                length = ax_depth[e] + ay_depth[f] + 1
                lo_v = a if a < w else w
                hi_v = w if a < w else a
                better = best_len[i] < 0
                if not better:
                    if length < best_len[i]:
                        better = True
                    elif length == best_len[i]:
                        if lo_v < best_u[i] or (lo_v == best_u[i] and hi_v < best_v[i]):
                            better = True
                if better:
                    best_len[i] = length
                    best_u[i] = lo_v
                    best_v[i] = hi_v
                    link_a[i] = e
                    link_b[i] = f
        for i in range(n_leaves):
            if best_len[i] >= 0:
                linked[i] = True
        if r == sub_depth:
            break
        fx_hi = nx
        fy_hi = ny
        nx = _expand_side(indptr, indices, used, rs, buf, b, fx_lo, fx_hi, linked,
                          ax_node, ax_par, ax_leaf, ax_depth, nx, owner, ent, 1)
        ny = _expand_side(indptr, indices, used, rs, buf, b, fy_lo, fy_hi, linked,
                          ay_node, ay_par, ay_leaf, ay_depth, ny, owner, ent, -1)
        fx_lo = fx_hi
        fy_lo = fy_hi
        if fx_lo == nx and fy_lo == ny:
            break

    n_paths = 0
    for i in range(n_leaves):
        if linked[i]:
            n_paths += 1
    path_ptr = np.zeros(n_paths + 1, dtype=np.int64)
    path_leaf = np.empty(n_paths, dtype=np.int64)
    max_len = 2 * tree_depth + 2 * sub_depth + 2
    path_verts = np.empty(n_paths * max_len, dtype=np.int64)
    chain = np.empty(tree_depth + sub_depth + 1, dtype=np.int64)
    pos = 0
    k = 0
    for i in range(n_leaves):
        if not linked[i]:
            continue
        path_leaf[k] = i
        p = leaf_pair[i]
        # root -> leaf in T_x
        c = 0
        q = p
        while q >= 0:
            chain[c] = tx[q]
            c += 1
            q = tparent[q]
        for t in range(c - 1, -1, -1):
            path_verts[pos] = chain[t]
            pos += 1
        # leaf x_i -> a, excluding x_i itself
        c = 0
        e = link_a[i]
        while ax_par[e] >= 0:
            chain[c] = ax_node[e]
            c += 1
            e = ax_par[e]
        for t in range(c - 1, -1, -1):
            path_verts[pos] = chain[t]
            pos += 1
        # w -> y_i, including y_i
        e = link_b[i]
        while e >= 0:
            path_verts[pos] = ay_node[e]
            pos += 1
            e = ay_par[e]
        # parent of y_i -> y
        q = tparent[p]
        while q >= 0:
            path_verts[pos] = ty[q]
            pos += 1
            q = tparent[q]
        k += 1
        path_ptr[k] = pos
    return (path_ptr, path_verts[:pos].copy(), path_leaf, tx[:tcount].copy(),
            ty[:tcount].copy(), tparent[:tcount].copy(), tlevel[:tcount].copy(),
            tcount, n_leaves)


@jit
def path_sums_kernel(indptr, indices, answers, path_ptr, path_verts, k):
    """Oriented answer sums mod k per path; -1 marks a path with a non-edge."""
    n_paths = path_ptr.size - 1
    out = np.empty(n_paths, dtype=np.int64)
    for p in range(n_paths):
        s = 0
        ok = True
        for t in range(path_ptr[p], path_ptr[p + 1] - 1):
            j = find_slot(indptr, indices, path_verts[t], path_verts[t + 1])
            if j < 0:
                ok = False
                break
            s += answers[j]
        out[p] = s % k if ok else -1
    return out


@jit
def bfs_labels_kernel(indptr, indices, answers, root, k, seed):
    """Labels relative to ``root`` along a randomised BFS spanning tree.

    Returns ``(labels, reached)``; unreached vertices keep label 0.
    """
    n = indptr.size - 1
    rs = np.empty(1, dtype=np.int64)
    rs[0] = seed % (MINSTD_MOD - 1) + 1
    labels = np.zeros(n, dtype=np.int64)
    reached = np.zeros(n, dtype=np.bool_)
    queue = np.empty(n, dtype=np.int64)
    slots = np.empty(n, dtype=np.int64)
    reached[root] = True
    queue[0] = root
    head = 0
    tail = 1
    while head < tail:
        u = queue[head]
        head += 1
        deg = indptr[u + 1] - indptr[u]
        for t in range(deg):
            slots[t] = indptr[u] + t
        for t in range(deg - 1, 0, -1):
            j = rand_below(rs, t + 1)
            tmp = slots[t]
            slots[t] = slots[j]
            slots[j] = tmp
        for t in range(deg):
            j = slots[t]
            w = indices[j]
            if reached[w]:
                continue
            reached[w] = True
            # g(w) = g(u) - f(u -> w)
            labels[w] = (labels[u] - answers[j]) % k
            queue[tail] = w
            tail += 1
    return labels, reached
