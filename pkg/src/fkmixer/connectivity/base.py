from __future__ import annotations

import numpy as np

from ..errors import InvalidInputError
from ..graphs import MultiGraph
from ..rc_core import BoundaryPartition


class ConnectivityOracle:
    """Connectivity of the open subgraph of ``graph`` plus permanent boundary merges.

    Subclasses implement ``connected``, ``_open`` and ``_close``; the boundary
    classes are inserted once as phantom edges that are never removed.
    """

    backend = "abstract"

    def __init__(self, graph: MultiGraph, bc: BoundaryPartition | None = None, omega=None):
        if bc is None:
            bc = BoundaryPartition(graph.n)
        if bc.universe != graph.n:
            raise InvalidInputError("boundary partition universe must match the graph")
        if omega is None:
            omega = np.zeros(graph.m, dtype=bool)
        omega = np.asarray(omega, dtype=bool)
        if omega.shape != (graph.m,):
            raise InvalidInputError(f"configuration length {omega.shape} != edge count {graph.m}")
        self.graph = graph
        self.bc = bc
        self.phantom = bc.merge_pairs()
        self.state = np.zeros(graph.m, dtype=bool)
        self.ops = 0
        self._setup()
        for e in np.flatnonzero(omega):
            self.set_edge(int(e), True)
        self.ops = 0

    def _setup(self):
        pass

    def _check(self, e: int) -> int:
        e = int(e)
        if not 0 <= e < self.graph.m:
            raise InvalidInputError(f"edge index {e} out of range")
        return e

    def is_open(self, e: int) -> bool:
        return bool(self.state[self._check(e)])

    def config(self) -> np.ndarray:
        return self.state.copy()

    def set_edge(self, e: int, open_: bool) -> None:
        e = self._check(e)
        self.ops += 1
        open_ = bool(open_)
        if self.state[e] == open_:
            return
        self.state[e] = open_
        if open_:
            self._open(e)
        else:
            self._close(e)

    def is_cut_edge(self, e: int) -> bool:
        """Would the endpoints of e be disconnected without e?  Self-loops: never."""
        e = self._check(e)
        self.ops += 1
        u, v = self.graph.endpoints(e)
        if u == v:
            return False
        if not self.state[e]:
            return not self.connected(u, v)
        return self._is_open_cut(e, u, v)

    def _is_open_cut(self, e, u, v) -> bool:
        self._close(e)
        self.state[e] = False
        res = not self.connected(u, v)
        self.state[e] = True
        self._open(e)
        return res

    def connected(self, u: int, v: int) -> bool:
        raise NotImplementedError

    def num_components(self) -> int:
        raise NotImplementedError

    def _open(self, e: int):
        raise NotImplementedError

    def _close(self, e: int):
        raise NotImplementedError
