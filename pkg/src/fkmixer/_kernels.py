"""Compiled inner loops.

All kernels take plain arrays.  Randomness is never drawn here: callers pass
pre-drawn edge/vertex indices and uniforms from the seeded streams, which keeps
compiled and interpreted paths bit-identical.
"""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


@njit(cache=True, nogil=True)
def enumerate_components(n, eu, ev, mu, mv, pa, pb):
    """Component counts (and pair connectivity) for every open-edge bitmask.

    Bit i of the mask opens edge (eu[i], ev[i]); the (mu, mv) merges are always
    applied.  Returns ``counts[mask]`` and ``conn[mask, k]`` = pa[k] ~ pb[k].
    """
    m = eu.shape[0]
    total = 1 << m
    counts = np.empty(total, dtype=np.int32)
    conn = np.zeros((total, pa.shape[0]), dtype=np.bool_)
    parent = np.empty(n, dtype=np.int64)
    for mask in range(total):
        for i in range(n):
            parent[i] = i
        c = n
        for i in range(mu.shape[0]):
            ra = _find(parent, mu[i])
            rb = _find(parent, mv[i])
            if ra != rb:
                parent[ra] = rb
                c -= 1
        for i in range(m):
            if (mask >> i) & 1:
                ra = _find(parent, eu[i])
                rb = _find(parent, ev[i])
                if ra != rb:
                    parent[ra] = rb
                    c -= 1
        counts[mask] = c
        for k in range(pa.shape[0]):
            conn[mask, k] = _find(parent, pa[k]) == _find(parent, pb[k])
    return counts, conn


@njit(cache=True, nogil=True)
def component_labels(n, eu, ev, open_):
    """Label vertices by component of the subgraph of open edges."""
    parent = np.arange(n)
    for i in range(eu.shape[0]):
        if open_[i]:
            ra = _find(parent, eu[i])
            rb = _find(parent, ev[i])
            if ra != rb:
                parent[ra] = rb
    labels = np.empty(n, dtype=np.int64)
    for i in range(n):
        labels[i] = _find(parent, i)
    return labels


# ---------------------------------------------------------------------------
# bidirectional search connectivity


@njit(cache=True, nogil=True)
def search_connected(indptr, nbr, inc, open_, a, b, skip, mark, side, qa, qb, stamp):
    """Are a and b joined by open edges other than ``skip``?

    Two breadth-first searches grow alternately from a and b; the query stops as
    soon as they meet or either side runs out of vertices, so its cost is bounded
    by the smaller of the two clusters.  ``stamp[0]`` is bumped per query so the
    mark array never needs clearing.
    """
    if a == b:
        return True
    stamp[0] += 1
    s = stamp[0]
    mark[a] = s
    side[a] = 0
    mark[b] = s
    side[b] = 1
    qa[0] = a
    qb[0] = b
    ha, ta, hb, tb = 0, 1, 0, 1
    while ha < ta and hb < tb:
        # expand the side with the shorter frontier
        if ta - ha <= tb - hb:
            x = qa[ha]
            ha += 1
            for k in range(indptr[x], indptr[x + 1]):
                e = inc[k]
                if e == skip or not open_[e]:
                    continue
                y = nbr[k]
                if mark[y] == s:
                    if side[y] == 1:
                        return True
                    continue
                mark[y] = s
                side[y] = 0
                qa[ta] = y
                ta += 1
        else:
            x = qb[hb]
            hb += 1
            for k in range(indptr[x], indptr[x + 1]):
                e = inc[k]
                if e == skip or not open_[e]:
                    continue
                y = nbr[k]
                if mark[y] == s:
                    if side[y] == 0:
                        return True
                    continue
                mark[y] = s
                side[y] = 1
                qb[tb] = y
                tb += 1
    return False


@njit(cache=True, nogil=True)
def _fk_threshold(indptr, nbr, inc, eu, ev, open_, e, p, phat, mark, side, qa, qb, stamp):
    a = eu[e]
    b = ev[e]
    if a == b or p == phat:
        return p
    if search_connected(indptr, nbr, inc, open_, a, b, e, mark, side, qa, qb, stamp):
        return p
    return phat


@njit(cache=True, nogil=True)
def fk_run_events(indptr, nbr, inc, eu, ev, open_, edges, us, p, phat,
                  mark, side, qa, qb, stamp):
    for k in range(edges.shape[0]):
        e = edges[k]
        thr = _fk_threshold(indptr, nbr, inc, eu, ev, open_, e, p, phat,
                            mark, side, qa, qb, stamp)
        open_[e] = us[k] <= thr


@njit(cache=True, nogil=True)
def fk_run_recorded(indptr, nbr, inc, eu, ev, open_, edges, us, p, phat, states,
                    mark, side, qa, qb, stamp):
    """Like ``fk_run_events`` but stores the post-update state of each event."""
    for k in range(edges.shape[0]):
        e = edges[k]
        thr = _fk_threshold(indptr, nbr, inc, eu, ev, open_, e, p, phat,
                            mark, side, qa, qb, stamp)
        open_[e] = us[k] <= thr
        states[k] = open_[e]


@njit(cache=True, nogil=True)
def fk_run_sampled(indptr, nbr, inc, eu, ev, open_, times, edges, us, p, phat,
                   sample_times, out, start, mark, side, qa, qb, stamp):
    """Apply timed events, recording the open-edge bitmask at each sample time.

    ``out[start + j]`` receives the state just before the first event later
    than ``sample_times[j]``.  Returns the number of samples written.
    """
    m = eu.shape[0]
    j = 0
    ns = sample_times.shape[0]
    for k in range(edges.shape[0]):
        while j < ns and sample_times[j] < times[k]:
            code = 0
            for i in range(m):
                if open_[i]:
                    code |= 1 << i
            out[start + j] = code
            j += 1
        e = edges[k]
        thr = _fk_threshold(indptr, nbr, inc, eu, ev, open_, e, p, phat,
                            mark, side, qa, qb, stamp)
        open_[e] = us[k] <= thr
    return j


@njit(cache=True, nogil=True)
def fk_coupled_events(indptr, nbr, inc, eu, ev, top, bot, edges, us, p, phat,
                      disc, mark, side, qa, qb, stamp):
    """Advance two chains on a shared schedule until they agree everywhere.

    ``disc[0]`` counts edges where ``top`` and ``bot`` differ and is kept up to
    date.  Returns the index of the event at which it reached zero, or -1.
    """
    for k in range(edges.shape[0]):
        e = edges[k]
        u = us[k]
        was_diff = top[e] != bot[e]
        t1 = _fk_threshold(indptr, nbr, inc, eu, ev, top, e, p, phat,
                           mark, side, qa, qb, stamp)
        top[e] = u <= t1
        t0 = _fk_threshold(indptr, nbr, inc, eu, ev, bot, e, p, phat,
                           mark, side, qa, qb, stamp)
        bot[e] = u <= t0
        now_diff = top[e] != bot[e]
        if was_diff and not now_diff:
            disc[0] -= 1
            if disc[0] == 0:
                return k
        elif now_diff and not was_diff:
            disc[0] += 1
    return -1


# ---------------------------------------------------------------------------
# Potts Glauber


@njit(cache=True, nogil=True)
def potts_counts(indptr, nbr, inc, eu, ev, spins, q):
    n = spins.shape[0]
    counts = np.zeros((n, q), dtype=np.int64)
    for v in range(n):
        for k in range(indptr[v], indptr[v + 1]):
            w = nbr[k]
            if w != v:
                counts[v, spins[w]] += 1
    return counts


@njit(cache=True, nogil=True)
def _potts_resample(indptr, nbr, spins, counts, beta, q, v, u, weights):
    cmax = counts[v, 0]
    for i in range(1, q):
        if counts[v, i] > cmax:
            cmax = counts[v, i]
    tot = 0.0
    for i in range(q):
        weights[i] = np.exp(beta * (counts[v, i] - cmax))
        tot += weights[i]
    target = u * tot
    new = q - 1
    acc = 0.0
    for i in range(q):
        acc += weights[i]
        if target <= acc:
            new = i
            break
    old = spins[v]
    if new != old:
        spins[v] = new
        for k in range(indptr[v], indptr[v + 1]):
            w = nbr[k]
            if w != v:
                counts[w, old] -= 1
                counts[w, new] += 1


@njit(cache=True, nogil=True)
def potts_run(indptr, nbr, spins, counts, beta, q, verts, us):
    weights = np.empty(q)
    for k in range(verts.shape[0]):
        _potts_resample(indptr, nbr, spins, counts, beta, q, verts[k], us[k], weights)


@njit(cache=True, nogil=True)
def _in_bottleneck(spins, counts, vstar, gap):
    if spins[vstar] != 0:
        return False
    best_other = 0
    for j in range(1, counts.shape[1]):
        if counts[vstar, j] > best_other:
            best_other = counts[vstar, j]
    return counts[vstar, 0] - best_other >= gap


@njit(cache=True, nogil=True)
def potts_escape(indptr, nbr, spins, counts, beta, q, verts, us, vstar, gap):
    """Run Glauber steps until the chain leaves the bottleneck set.

    Returns the 0-based index of the step after which the state first lies
    outside the set, or -1 if it is still inside after all given steps.
    """
    weights = np.empty(q)
    for k in range(verts.shape[0]):
        _potts_resample(indptr, nbr, spins, counts, beta, q, verts[k], us[k], weights)
        if not _in_bottleneck(spins, counts, vstar, gap):
            return k
    return -1


@njit(cache=True, nogil=True)
def potts_run_sampled(indptr, nbr, spins, counts, beta, q, verts, us, every, offset, eu, ev, agree):
    """Glauber steps, accumulating per-edge agreement counts every ``every`` steps.

    ``offset`` is the number of steps already taken, so blocks can be chained.
    """
    weights = np.empty(q)
    taken = 0
    for k in range(verts.shape[0]):
        _potts_resample(indptr, nbr, spins, counts, beta, q, verts[k], us[k], weights)
        if (offset + k + 1) % every == 0:
            for i in range(eu.shape[0]):
                if spins[eu[i]] == spins[ev[i]]:
                    agree[i] += 1
            taken += 1
    return taken
