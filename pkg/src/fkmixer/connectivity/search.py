"""Compiled bidirectional-search backend.

Each query grows breadth-first searches from both endpoints and stops when they
meet or one side is exhausted, so a cut-edge test costs at most the size of the
smaller cluster.  Updates are O(1).
"""
from __future__ import annotations

import numpy as np

from .. import _kernels
from .base import ConnectivityOracle


def csr_with_merges(g, phantom):
    """CSR adjacency of g plus phantom edges (numbered after the real ones)."""
    n, m = g.n, g.m
    src = [g.edges[:, 0], g.edges[:, 1]]
    dst = [g.edges[:, 1], g.edges[:, 0]]
    ids = [np.arange(m), np.arange(m)]
    if phantom:
        ph = np.asarray(phantom, dtype=np.int64).reshape(-1, 2)
        pid = m + np.arange(len(ph))
        src += [ph[:, 0], ph[:, 1]]
        dst += [ph[:, 1], ph[:, 0]]
        ids += [pid, pid]
    src = np.concatenate(src).astype(np.int64)
    dst = np.concatenate(dst).astype(np.int64)
    ids = np.concatenate(ids).astype(np.int64)
    order = np.argsort(src, kind="stable")
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    return indptr, dst[order], ids[order]


class SearchWorkspace:
    """Scratch arrays shared by the compiled kernels for one graph."""

    def __init__(self, g, phantom=()):
        self.indptr, self.nbr, self.inc = csr_with_merges(g, list(phantom))
        self.eu = np.ascontiguousarray(g.edges[:, 0], dtype=np.int64)
        self.ev = np.ascontiguousarray(g.edges[:, 1], dtype=np.int64)
        self.n_phantom = len(phantom)
        n = max(g.n, 1)
        self.mark = np.zeros(n, dtype=np.int64)
        self.side = np.zeros(n, dtype=np.int8)
        self.qa = np.zeros(n, dtype=np.int64)
        self.qb = np.zeros(n, dtype=np.int64)
        self.stamp = np.zeros(1, dtype=np.int64)

    def open_array(self, omega):
        """Open flags for real edges followed by always-open phantom edges."""
        return np.concatenate([np.asarray(omega, dtype=np.bool_),
                               np.ones(self.n_phantom, dtype=np.bool_)])

    def connected(self, open_, a, b, skip=-1):
        return bool(_kernels.search_connected(
            self.indptr, self.nbr, self.inc, open_, a, b, skip,
            self.mark, self.side, self.qa, self.qb, self.stamp))


class SearchOracle(ConnectivityOracle):
    backend = "search"

    def _setup(self):
        self.ws = SearchWorkspace(self.graph, self.phantom)
        self.open_ = self.ws.open_array(self.state)

    def _open(self, e):
        self.open_[e] = True

    def _close(self, e):
        self.open_[e] = False

    def connected(self, u, v):
        return self.ws.connected(self.open_, int(u), int(v))

    def _is_open_cut(self, e, u, v):
        return not self.ws.connected(self.open_, int(u), int(v), skip=e)

    def num_components(self):
        g = self.graph
        eu = np.concatenate([g.edges[:, 0], [a for a, _ in self.phantom]]).astype(np.int64)
        ev = np.concatenate([g.edges[:, 1], [b for _, b in self.phantom]]).astype(np.int64)
        labels = _kernels.component_labels(g.n, eu, ev, self.open_)
        return int(np.unique(labels).size) if g.n else 0
