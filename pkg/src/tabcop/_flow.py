"""Maximum flow on bipartite transportation networks.

Decides whether a nonnegative table with a prescribed support pattern and
prescribed margins exists: source -> row x with capacity rowTarget[x],
row x -> col y with unbounded capacity on every support cell, col y ->
sink with capacity colTarget[y].  The margins are achievable exactly when
the maximum flow saturates the source edges.

A hand-rolled Dinic keeps each call in the tens of microseconds for the
small dense networks this package sees; the exhaustive classification
tests run hundreds of thousands of them.
"""

from collections import deque

INF = float("inf")

# residual capacities below this are treated as saturated
_CAP_EPS = 1e-15


class DinicFlow:
    """Dinic max-flow with real capacities on a fixed set of nodes."""

    def __init__(self, n_nodes):
        self.n = n_nodes
        # adjacency: per node, list of [target, residual_cap, reverse_index]
        self.adj = [[] for _ in range(n_nodes)]

    def add_edge(self, u, v, cap):
        self.adj[u].append([v, cap, len(self.adj[v])])
        self.adj[v].append([u, 0.0, len(self.adj[u]) - 1])

    def _bfs_levels(self, s, t):
        level = [-1] * self.n
        level[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v, cap, _ in self.adj[u]:
                if cap > _CAP_EPS and level[v] < 0:
                    level[v] = level[u] + 1
                    queue.append(v)
        self._level = level
        return level[t] >= 0

    def _push(self, u, t, limit, alive):
        if u == t:
            return limit
        while alive[u] < len(self.adj[u]):
            edge = self.adj[u][alive[u]]
            v = edge[0]
            if edge[1] > _CAP_EPS and self._level[v] == self._level[u] + 1:
                pushed = self._push(v, t, min(limit, edge[1]), alive)
                if pushed > 0.0:
                    edge[1] -= pushed
                    self.adj[v][edge[2]][1] += pushed
                    return pushed
            alive[u] += 1
        return 0.0

    def max_flow(self, s, t):
        total = 0.0
        while self._bfs_levels(s, t):
            alive = [0] * self.n
            while True:
                pushed = self._push(s, t, INF, alive)
                if pushed <= 0.0:
                    break
                total += pushed
        return total

    def source_side(self, s):
        """Nodes reachable from s in the residual graph (min-cut S-side)."""
        seen = [False] * self.n
        seen[s] = True
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v, cap, _ in self.adj[u]:
                if cap > _CAP_EPS and not seen[v]:
                    seen[v] = True
                    queue.append(v)
        return seen


def transport_network(mask, row_caps, col_caps):
    """Build the feasibility network for a support mask and margin caps.

    Node layout: 0 = source, 1..R = rows, R+1..R+S = columns,
    R+S+1 = sink.  Returns the DinicFlow plus (source, sink) indices.
    """
    n_rows, n_cols = mask.shape
    net = DinicFlow(n_rows + n_cols + 2)
    source, sink = 0, n_rows + n_cols + 1
    for x in range(n_rows):
        net.add_edge(source, 1 + x, float(row_caps[x]))
    for y in range(n_cols):
        net.add_edge(1 + n_rows + y, sink, float(col_caps[y]))
    for x in range(n_rows):
        row = mask[x]
        for y in range(n_cols):
            if row[y]:
                net.add_edge(1 + x, 1 + n_rows + y, INF)
    return net, source, sink


def max_transport_flow(mask, row_caps, col_caps):
    """Maximum mass routable through the support. Returns (flow, net, s, t)."""
    net, s, t = transport_network(mask, row_caps, col_caps)
    return net.max_flow(s, t), net, s, t
