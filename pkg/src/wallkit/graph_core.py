"""Finite rooted graphs with exact hop-metric primitives.

A :class:`BallGraph` is either a radius-``R`` ball of an infinite graph around
its root, or an arbitrary finite connected graph (``radius is None``).  Every
vertex carries a *margin*: its distance to the truncation frontier.  Distances
are those of the finite graph itself; for a ball they agree with the ambient
metric on any pair ``x, y`` with ``d(x, y) <= margin(x)`` because every
geodesic from ``x`` of that length stays inside the ball.
"""

from __future__ import annotations

from collections import deque
from typing import Hashable, Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .errors import BadGraph, InvalidVertex, NotAWalk, NotGated

DENSE_LIMIT = 50_000

Path = tuple[int, ...]


class BallGraph:
    """Immutable connected simple graph with a root and a margin annotation.

    Parameters
    ----------
    labels : sequence of hashable
        Vertex labels; position in the sequence is the vertex index.
    edges : iterable of (int, int)
        Undirected edges over vertex indices.
    root : int
        Index of the basepoint.
    radius : int or None
        Ball radius, or ``None`` for a plain finite graph.
    metric : ndarray, optional
        Exact ambient distances between the vertices (for balls of a known
        infinite graph).  When omitted, distances are hop distances inside
        the finite graph.
    """

    def __init__(
        self,
        labels: Sequence[Hashable],
        edges: Iterable[tuple[int, int]],
        root: int = 0,
        radius: int | None = None,
        dense_limit: int = DENSE_LIMIT,
        metric: np.ndarray | None = None,
    ):
        self.labels = tuple(labels)
        n = len(self.labels)
        if n == 0:
            raise BadGraph("graph has no vertices")
        self.index = {lab: i for i, lab in enumerate(self.labels)}
        if len(self.index) != n:
            raise BadGraph("duplicate vertex labels")
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidVertex(f"edge ({u}, {v}) out of range")
            if u == v:
                raise BadGraph(f"loop at vertex {self.labels[u]!r}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        self.adj: tuple[tuple[int, ...], ...] = tuple(tuple(sorted(s)) for s in nbrs)
        self.edges: tuple[tuple[int, int], ...] = tuple(
            (u, v) for u in range(n) for v in self.adj[u] if u < v
        )
        if not 0 <= root < n:
            raise InvalidVertex(f"root {root} out of range")
        self.root = root
        self._dense_limit = dense_limit
        self._rows: dict[int, np.ndarray] = {}
        self._dist: np.ndarray | None = None

        depth = self._bfs(root)
        if (depth < 0).any():
            raise BadGraph("graph is not connected")
        self.depth = depth
        if radius is None:
            self.radius = None
            # larger than any distance in the graph
            self.margin = np.full(n, n, dtype=np.int64)
        else:
            if int(depth.max()) > radius:
                raise BadGraph(f"vertex beyond radius {radius}")
            self.radius = int(radius)
            self.margin = (self.radius - depth).astype(np.int64)
        self.ambient = metric is not None
        if metric is not None:
            table = np.array(metric, dtype=np.int64)
            if table.shape != (n, n) or not (table == table.T).all():
                raise BadGraph("metric must be a symmetric n x n table")
            u, v = np.array(self.edges, dtype=np.int64).reshape(-1, 2).T
            if (table[u, v] != 1).any() or (np.diag(table) != 0).any():
                raise BadGraph("metric disagrees with the edge set")
            table.setflags(write=False)
            self._dist = table
        self._rows[root] = self.dist_row(root) if metric is not None else depth

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_edge_list(cls, pairs, root_label=None, radius=None):
        """Build from ``(label, label)`` pairs; vertex order is first appearance."""
        labels: list = []
        index: dict = {}

        def idx(lab):
            if lab not in index:
                index[lab] = len(labels)
                labels.append(lab)
            return index[lab]

        if root_label is not None:
            idx(root_label)
        edges = [(idx(a), idx(b)) for a, b in pairs]
        root = 0 if root_label is None else index[root_label]
        return cls(labels, edges, root=root, radius=radius)

    def ball(self, radius: int) -> "BallGraph":
        """Sub-ball around the root, keeping the vertex order."""
        keep = [v for v in range(self.n) if self.depth[v] <= radius]
        pos = {v: i for i, v in enumerate(keep)}
        edges = [(pos[u], pos[v]) for u, v in self.edges if u in pos and v in pos]
        metric = self.dist[np.ix_(keep, keep)] if self.ambient else None
        return BallGraph(
            [self.labels[v] for v in keep], edges, root=pos[self.root], radius=radius,
            metric=metric,
        )

    # -- basic accessors ------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        r = "finite" if self.radius is None else f"radius={self.radius}"
        return f"BallGraph(n={self.n}, edges={len(self.edges)}, {r})"

    def vertex(self, label) -> int:
        try:
            return self.index[label]
        except KeyError:
            raise InvalidVertex(f"unknown vertex label {label!r}") from None

    def check(self, v: int) -> int:
        if not isinstance(v, (int, np.integer)) or not 0 <= v < self.n:
            raise InvalidVertex(f"invalid vertex index {v!r}")
        return int(v)

    def is_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    # -- metric ---------------------------------------------------------------

    def _bfs(self, s: int) -> np.ndarray:
        dist = np.full(self.n, -1, dtype=np.int64)
        dist[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            du = dist[u] + 1
            for w in self.adj[u]:
                if dist[w] < 0:
                    dist[w] = du
                    queue.append(w)
        return dist

    @property
    def dense(self) -> bool:
        return self.n <= self._dense_limit

    @property
    def dist(self) -> np.ndarray:
        """All-pairs distance table (computed once, read-only)."""
        if self._dist is None:
            if not self.dense:
                raise MemoryError(
                    f"{self.n} vertices exceed the dense table limit; use dist_row"
                )
            u, v = np.array(self.edges, dtype=np.int64).reshape(-1, 2).T
            a = csr_matrix(
                (np.ones(2 * len(u)), (np.r_[u, v], np.r_[v, u])), shape=(self.n, self.n)
            )
            d = shortest_path(a, unweighted=True, directed=False)
            table = d.astype(np.int64)
            table.setflags(write=False)
            self._dist = table
        return self._dist

    def dist_row(self, v: int) -> np.ndarray:
        if self._dist is not None or self.dense:
            return self.dist[v]
        row = self._rows.get(v)
        if row is None:
            row = self._bfs(v)
            self._rows[v] = row
        return row

    def distance(self, x: int, y: int) -> int:
        x, y = self.check(x), self.check(y)
        return int(self.dist_row(x)[y])

    def safe_pair(self, x: int, y: int) -> bool:
        """True when ``d(x, y)`` is certified to equal the ambient distance."""
        if self.ambient:
            return True
        d = self.dist_row(x)[y]
        return bool(d <= self.margin[x] or d <= self.margin[y])

    def interval(self, x: int, y: int) -> frozenset[int]:
        """All vertices on some geodesic from ``x`` to ``y``."""
        x, y = self.check(x), self.check(y)
        dx, dy = self.dist_row(x), self.dist_row(y)
        return frozenset(np.flatnonzero(dx + dy == dx[y]).tolist())

    def enumerate_geodesics(self, x: int, y: int, limit: int = 10_000):
        """Geodesics from ``x`` to ``y`` in lexicographic neighbour order.

        Returns ``(paths, overflow)``; ``overflow`` is true when more than
        ``limit`` geodesics exist and only the first ``limit`` were returned.
        """
        x, y = self.check(x), self.check(y)
        if limit <= 0:
            raise ValueError("limit must be positive")
        dy = self.dist_row(y)
        paths: list[Path] = []
        stack = [(x,)]
        while stack:
            p = stack.pop()
            u = p[-1]
            if u == y:
                if len(paths) == limit:
                    return paths, True
                paths.append(p)
                continue
            # reversed so that the smallest neighbour is explored first
            for w in reversed(self.adj[u]):
                if dy[w] == dy[u] - 1:
                    stack.append(p + (w,))
        return paths, False

    def geodesic(self, x: int, y: int) -> Path:
        """The first geodesic in lexicographic neighbour order."""
        x, y = self.check(x), self.check(y)
        dy = self.dist_row(y)
        path = [x]
        while path[-1] != y:
            u = path[-1]
            step = [w for w in self.adj[u] if dy[w] == dy[u] - 1]
            if not step:
                raise NotAWalk("every geodesic between these vertices leaves the ball")
            path.append(step[0])
        return tuple(path)

    def gate(self, x: int, ys: Iterable[int]) -> int:
        """The gate of ``x`` in ``ys``: a vertex on a geodesic from ``x`` to every ``y``."""
        x = self.check(x)
        ys = np.array(sorted({self.check(y) for y in ys}), dtype=np.int64)
        if len(ys) == 0:
            raise ValueError("empty target set")
        dx = self.dist_row(x)
        best = ys[dx[ys] == dx[ys].min()]
        for p in best:
            if np.all(dx[p] + self.dist_row(int(p))[ys] == dx[ys]):
                return int(p)
        raise NotGated(f"no gate for vertex {self.labels[x]!r} in a set of {len(ys)} vertices")

    def is_walk(self, p: Sequence[int]) -> bool:
        return len(p) > 0 and all(self.is_edge(a, b) for a, b in zip(p, p[1:]))

    def is_geodesic(self, p: Sequence[int]) -> bool:
        p = [self.check(v) for v in p]
        if not self.is_walk(p):
            raise NotAWalk("consecutive vertices are not adjacent")
        return len(p) - 1 == self.dist_row(p[0])[p[-1]]


def parse_edge_text(text: str, radius: int | None = None) -> BallGraph:
    """Parse the edge-list format: ``root <label>`` then one ``a b`` per line."""
    root = None
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if root is None:
            if len(parts) != 2 or parts[0] != "root":
                raise BadGraph(f"line {lineno}: expected 'root <label>'")
            root = parts[1]
            continue
        if len(parts) != 2:
            raise BadGraph(f"line {lineno}: expected two labels")
        pairs.append((parts[0], parts[1]))
    if root is None:
        raise BadGraph("missing 'root <label>' line")
    g = BallGraph.from_edge_list(pairs, root_label=root, radius=None)
    return g if radius is None else g.ball(radius)


def format_edge_text(g: BallGraph) -> str:
    """Edge-list text.  Edges are sorted by their larger endpoint so that
    re-parsing keeps the vertex order whenever every vertex has a smaller
    neighbour (as in breadth-first ball orderings)."""
    lines = [f"root {g.labels[g.root]}"]
    edges = sorted(g.edges, key=lambda e: (e[1], e[0]))
    lines += [f"{g.labels[u]} {g.labels[v]}" for u, v in edges]
    return "\n".join(lines) + "\n"


def graph_to_dict(g: BallGraph) -> dict:
    return {
        "root": g.root,
        "radius": g.radius,
        "vertices": [str(lab) for lab in g.labels],
        "edges": [list(e) for e in g.edges],
    }


def graph_from_dict(data: dict) -> BallGraph:
    return BallGraph(
        data["vertices"],
        [tuple(e) for e in data["edges"]],
        root=data["root"],
        radius=data["radius"],
    )
