from __future__ import annotations

from collections import deque

from .base import ConnectivityOracle


class NaiveOracle(ConnectivityOracle):
    """Reference backend: every query is a fresh breadth-first search."""

    backend = "naive"

    def _setup(self):
        g = self.graph
        self._adj = [[] for _ in range(g.n)]
        for e, (a, b) in enumerate(g.edges.tolist()):
            if a != b:
                self._adj[a].append((b, e))
                self._adj[b].append((a, e))
        self._merge = [[] for _ in range(g.n)]
        for a, b in self.phantom:
            self._merge[a].append(b)
            self._merge[b].append(a)

    def _open(self, e):
        pass

    def _close(self, e):
        pass

    def _reach(self, u, skip=-1, target=None):
        seen = {u}
        queue = deque([u])
        state, adj, merge = self.state, self._adj, self._merge
        while queue:
            x = queue.popleft()
            for y, e in adj[x]:
                if e != skip and state[e] and y not in seen:
                    if y == target:
                        return seen, True
                    seen.add(y)
                    queue.append(y)
            for y in merge[x]:
                if y not in seen:
                    if y == target:
                        return seen, True
                    seen.add(y)
                    queue.append(y)
        return seen, False

    def connected(self, u, v):
        if u == v:
            return True
        return self._reach(u, target=v)[1]

    def _is_open_cut(self, e, u, v):
        return not self._reach(u, skip=e, target=v)[1]

    def num_components(self):
        seen = set()
        comps = 0
        for v in range(self.graph.n):
            if v not in seen:
                comps += 1
                seen |= self._reach(v)[0]
        return comps
