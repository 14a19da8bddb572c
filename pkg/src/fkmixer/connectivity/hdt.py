"""Hierarchical dynamic connectivity (Holm, de Lichtenberg and Thorup).

Each present edge carries a level in 0..L with L = floor(log2 n).  F_i is a
spanning forest of the edges of level >= i, so F_0 spans every component.
Every F_i is stored as an Euler-tour forest on treaps.  Deleting a tree edge
of level l searches levels l, l-1, ..., 0 for a replacement, scanning only the
smaller of the two halves and pushing everything it scans up one level, which
gives O(log^2 n) amortized cost per update.
"""
from __future__ import annotations

import random

from .base import ConnectivityOracle

_prio = random.Random(0x5EED)


class _Node:
    __slots__ = ("left", "right", "parent", "prio", "size", "nverts",
                 "vert", "edge", "flag_tree", "flag_nt", "agg_tree", "agg_nt")

    def __init__(self, vert=-1, edge=-1):
        self.left = self.right = self.parent = None
        self.prio = _prio.random()
        self.size = 1
        self.vert = vert
        self.edge = edge
        self.nverts = 1 if vert >= 0 else 0
        self.flag_tree = False
        self.flag_nt = False
        self.agg_tree = False
        self.agg_nt = False


def _pull(x):
    l, r = x.left, x.right
    size, nv = 1, (1 if x.vert >= 0 else 0)
    at, an = x.flag_tree, x.flag_nt
    if l is not None:
        size += l.size
        nv += l.nverts
        at = at or l.agg_tree
        an = an or l.agg_nt
    if r is not None:
        size += r.size
        nv += r.nverts
        at = at or r.agg_tree
        an = an or r.agg_nt
    x.size, x.nverts, x.agg_tree, x.agg_nt = size, nv, at, an


def _pull_up(x):
    while x is not None:
        _pull(x)
        x = x.parent


def _root(x):
    while x.parent is not None:
        x = x.parent
    return x


def _index(x):
    idx = x.left.size if x.left is not None else 0
    while x.parent is not None:
        p = x.parent
        if x is p.right:
            idx += 1 + (p.left.size if p.left is not None else 0)
        x = p
    return idx


def _split(t, k):
    """Split treap t into (first k nodes, rest)."""
    if t is None:
        return None, None
    ls = t.left.size if t.left is not None else 0
    if k <= ls:
        a, b = _split(t.left, k)
        t.left = b
        if b is not None:
            b.parent = t
        _pull(t)
        t.parent = None
        if a is not None:
            a.parent = None
        return a, t
    a, b = _split(t.right, k - ls - 1)
    t.right = a
    if a is not None:
        a.parent = t
    _pull(t)
    t.parent = None
    if b is not None:
        b.parent = None
    return t, b


def _merge(a, b):
    if a is None:
        return b
    if b is None:
        return a
    if a.prio > b.prio:
        r = _merge(a.right, b)
        a.right = r
        r.parent = a
        _pull(a)
        a.parent = None
        return a
    l = _merge(a, b.left)
    b.left = l
    l.parent = b
    _pull(b)
    b.parent = None
    return b


class EulerTourForest:
    """Euler tours of a forest: one node per vertex, two arc nodes per tree edge."""

    __slots__ = ("vnodes", "arcs")

    def __init__(self):
        self.vnodes = {}
        self.arcs = {}

    def node(self, v):
        x = self.vnodes.get(v)
        if x is None:
            x = self.vnodes[v] = _Node(vert=v)
        return x

    def connected(self, u, v):
        if u == v:
            return True
        a, b = self.vnodes.get(u), self.vnodes.get(v)
        if a is None or b is None:
            return False
        return _root(a) is _root(b)

    def tree_size(self, v):
        x = self.vnodes.get(v)
        return 1 if x is None else _root(x).nverts

    def _reroot(self, v):
        x = self.node(v)
        r = _root(x)
        a, b = _split(r, _index(x))
        return _merge(b, a)

    def link(self, u, v, e):
        ru = self._reroot(u)
        rv = self._reroot(v)
        a1, a2 = _Node(edge=e), _Node(edge=e)
        self.arcs[e] = (a1, a2)
        _merge(_merge(_merge(ru, a1), rv), a2)
        return a1

    def cut(self, e):
        a1, a2 = self.arcs.pop(e)
        i1, i2 = _index(a1), _index(a2)
        if i1 > i2:
            a1, a2, i1, i2 = a2, a1, i2, i1
        r = _root(a1)
        left, rest = _split(r, i1)
        _, rest = _split(rest, 1)
        middle, rest = _split(rest, i2 - i1 - 1)
        _, right = _split(rest, 1)
        _merge(left, right)
        return middle

    def set_tree_flag(self, e, value):
        a = self.arcs[e][0]
        if a.flag_tree != value:
            a.flag_tree = value
            _pull_up(a)

    def set_nt_flag(self, v, value):
        x = self.vnodes.get(v)
        if x is None:
            if not value:
                return
            x = self.node(v)
        if x.flag_nt != value:
            x.flag_nt = value
            _pull_up(x)

    @staticmethod
    def flagged(root, attr_agg, attr_own):
        out = []
        stack = [root]
        while stack:
            x = stack.pop()
            if x is None or not getattr(x, attr_agg):
                continue
            if getattr(x, attr_own):
                out.append(x)
            stack.append(x.left)
            stack.append(x.right)
        return out


class HDTOracle(ConnectivityOracle):
    backend = "hdt"

    def _setup(self):
        g = self.graph
        n = max(g.n, 2)
        self.max_level = n.bit_length() - 1
        self.forests = [EulerTourForest() for _ in range(self.max_level + 2)]
        self.nontree = [dict() for _ in range(self.max_level + 2)]
        self.level = {}
        self.is_tree = {}
        self.tree_edges = 0
        self._ends = {}
        for e, (a, b) in enumerate(g.edges.tolist()):
            self._ends[e] = (a, b)
        # phantom merges get ids after the real edges and are never removed
        for k, (a, b) in enumerate(self.phantom):
            pid = g.m + k
            self._ends[pid] = (a, b)
            self._insert(pid)

    # -- bookkeeping helpers

    def _add_nt(self, i, e):
        a, b = self._ends[e]
        nt = self.nontree[i]
        for x in (a, b):
            s = nt.get(x)
            if s is None:
                s = nt[x] = set()
            s.add(e)
            if len(s) == 1:
                self.forests[i].set_nt_flag(x, True)

    def _remove_nt(self, i, e):
        a, b = self._ends[e]
        nt = self.nontree[i]
        for x in (a, b):
            s = nt[x]
            s.discard(e)
            if not s:
                del nt[x]
                self.forests[i].set_nt_flag(x, False)

    # -- core operations

    def _insert(self, e):
        a, b = self._ends[e]
        if a == b:
            return
        self.level[e] = 0
        f0 = self.forests[0]
        if not f0.connected(a, b):
            f0.link(a, b, e)
            f0.set_tree_flag(e, True)
            self.is_tree[e] = True
            self.tree_edges += 1
        else:
            self.is_tree[e] = False
            self._add_nt(0, e)

    def _delete(self, e):
        a, b = self._ends[e]
        if a == b:
            return
        lvl = self.level.pop(e)
        tree = self.is_tree.pop(e)
        if not tree:
            self._remove_nt(lvl, e)
            return
        for i in range(lvl + 1):
            self.forests[i].cut(e)
        self.tree_edges -= 1
        for i in range(lvl, -1, -1):
            if self._replace(i, a, b):
                return

    def _replace(self, i, a, b):
        fi = self.forests[i]
        small = a if fi.tree_size(a) <= fi.tree_size(b) else b
        root = _root(fi.node(small))
        up = self.forests[i + 1]
        # push the small tree's level-i tree edges up one level
        for arc in EulerTourForest.flagged(root, "agg_tree", "flag_tree"):
            f = arc.edge
            x, y = self._ends[f]
            fi.set_tree_flag(f, False)
            self.level[f] = i + 1
            up.link(x, y, f)
            up.set_tree_flag(f, True)
        root = _root(fi.node(small))
        for vnode in EulerTourForest.flagged(root, "agg_nt", "flag_nt"):
            x = vnode.vert
            for f in list(self.nontree[i].get(x, ())):
                u, v = self._ends[f]
                y = v if u == x else u
                if _root(fi.node(y)) is root:
                    self._remove_nt(i, f)
                    self.level[f] = i + 1
                    self._add_nt(i + 1, f)
                else:
                    self._remove_nt(i, f)
                    self.is_tree[f] = True
                    self.tree_edges += 1
                    for j in range(i + 1):
                        self.forests[j].link(u, v, f)
                    fi.set_tree_flag(f, True)
                    return True
        return False

    # -- oracle interface

    def _open(self, e):
        self._insert(e)

    def _close(self, e):
        self._delete(e)

    def connected(self, u, v):
        return self.forests[0].connected(u, v)

    def _is_open_cut(self, e, u, v):
        if not self.is_tree.get(e, False):
            return False
        return super()._is_open_cut(e, u, v)

    def num_components(self):
        return self.graph.n - self.tree_edges
