"""Named Coxeter systems and graphs used by the tests, the CLI and the scenario suite."""

from __future__ import annotations

from collections import deque
from functools import lru_cache

import numpy as np

from .coxeter import (
    CayleyBall,
    CoxeterSystem,
    affine_a,
    cayley_ball,
    dihedral,
    infinite_dihedral,
    racg,
    triangle,
    type_a,
    type_b3,
)
from .graph_core import BallGraph


def grid_system() -> CoxeterSystem:
    """Right-angled Coxeter group of the 4-cycle a-b-c-d: D_inf x D_inf acting on Z^2.

    ``a``, ``c`` generate the horizontal factor, ``b``, ``d`` the vertical one.
    """
    return racg("abcd", [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")])


def path4_racg() -> CoxeterSystem:
    """Right-angled Coxeter group of the path a-b-c-d (rank 4)."""
    return racg("abcd", [("a", "b"), ("b", "c"), ("c", "d")])


SYSTEMS = {
    "dinf": infinite_dihedral,
    "a2": lambda: dihedral(3),
    "a3": lambda: type_a(3),
    "b3": type_b3,
    "affine_a3": lambda: affine_a(3),
    "tri333": lambda: triangle(3, 3, 3),
    "tri237": lambda: triangle(2, 3, 7),
    "grid": grid_system,
    "racg_p4": path4_racg,
}


def system(name: str) -> CoxeterSystem:
    return SYSTEMS[name]()


@lru_cache(maxsize=32)
def ball(name: str, radius: int) -> CayleyBall:
    """Cached Cayley ball of a named system."""
    return cayley_ball(system(name), radius)


# -- coordinates on the product fixtures ---------------------------------------


def line_coordinate(word, plus: int, minus: int) -> int:
    """Position on the D_inf line: words starting with ``plus`` go right."""
    letters = [s for s in word if s in (plus, minus)]
    if not letters:
        return 0
    return len(letters) if letters[0] == plus else -len(letters)


def grid_coordinates(word) -> tuple[int, int]:
    """(x, y) of a GRID element given as a generator-index word."""
    return line_coordinate(word, 0, 2), line_coordinate(word, 1, 3)


def grid_word(x: int, y: int) -> tuple[int, ...]:
    """A reduced word for the GRID element at (x, y)."""
    def line(k, plus, minus):
        first, second = (plus, minus) if k >= 0 else (minus, plus)
        return tuple(first if i % 2 == 0 else second for i in range(abs(k)))

    return line(x, 0, 2) + line(y, 1, 3)


def grid_vertex(b: CayleyBall, x: int, y: int) -> int | None:
    return b.vertex(grid_word(x, y))


def dinf_word(x: int) -> tuple[int, ...]:
    """Reduced word of the D_inf element at position ``x`` (s goes right)."""
    first, second = (0, 1) if x >= 0 else (1, 0)
    return tuple(first if i % 2 == 0 else second for i in range(abs(x)))


# -- small graphs ----------------------------------------------------------------


def cycle_graph(n: int) -> BallGraph:
    return BallGraph([str(i) for i in range(n)], [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> BallGraph:
    return BallGraph(
        [str(i) for i in range(n)], [(i, j) for i in range(n) for j in range(i + 1, n)]
    )


# -- the thickened rose ---------------------------------------------------------
#
# The universal cover is a tree of strips Z x {-1, 0, 1}.  A strip is named by
# the path of crossing indices from the root strip.  In every strip the
# squares over p in [4j - 1, 4j + 1] are shared with the crossing strip at
# index j, whose own central squares (p in [-1, 1]) they are, with the two
# coordinates exchanged: (p = 4j + a, q = b) in the parent is (p = b, q = a)
# in the child.  Index 0 of a non-root strip is its parent.


def _rose_canonical(strip: tuple, p: int, q: int) -> tuple:
    if strip and -1 <= p <= 1:
        return strip[:-1], 4 * strip[-1] + q, p
    return strip, p, q


def _rose_neighbours(v: tuple):
    strip, p, q = v
    charts = [(strip, p, q)]
    j, a = divmod(p + 1, 4)
    a -= 1
    if a in (-1, 0, 1) and (j != 0 or not strip):
        charts.append((strip + (j,), q, a))
    out = set()
    for s, x, y in charts:
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            if -1 <= y + dy <= 1:
                out.add(_rose_canonical(s, x + dx, y + dy))
    return out


def rose_label(v: tuple) -> str:
    strip, p, q = v
    name = "/".join(str(j) for j in strip) or "o"
    return f"{name}:{p},{q}"


def _rose_bfs(radius: int):
    root = ((), 0, 0)
    depth = {root: 0}
    order = [root]
    queue = deque([root])
    while queue:
        v = queue.popleft()
        if depth[v] == radius:
            continue
        for w in sorted(_rose_neighbours(v)):
            if w not in depth:
                depth[w] = depth[v] + 1
                order.append(w)
                queue.append(w)
    return order, depth


@lru_cache(maxsize=8)
def rose_ball(radius: int = 8) -> BallGraph:
    """Ball of the thickened-rose cover with exact ambient distances.

    Distances between points of the radius-``R`` ball are realised inside the
    radius-``2R`` ball, so they are computed there.
    """
    big, depth = _rose_bfs(2 * radius)
    index = {v: i for i, v in enumerate(big)}
    nbrs = [[index[w] for w in _rose_neighbours(v) if w in index] for v in big]
    keep = [i for i, v in enumerate(big) if depth[v] <= radius]
    pos = {i: k for k, i in enumerate(keep)}
    table = np.empty((len(keep), len(keep)), dtype=np.int64)
    for k, i in enumerate(keep):
        d = _bfs(nbrs, i)
        table[k] = d[keep]
    edges = [(pos[i], pos[j]) for i in keep for j in nbrs[i] if j in pos and i < j]
    labels = [rose_label(big[i]) for i in keep]
    return BallGraph(labels, edges, root=0, radius=radius, metric=table)


def _bfs(nbrs, s):
    dist = np.full(len(nbrs), -1, dtype=np.int64)
    dist[s] = 0
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for w in nbrs[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def rose_vertex(g: BallGraph, strip: tuple, p: int, q: int) -> int:
    return g.vertex(rose_label(_rose_canonical(tuple(strip), p, q)))


def rose_ray(g: BallGraph, kind: str, length: int) -> tuple[int, ...]:
    """Geodesic ray prefixes from the root.

    ``mid`` runs along the midline of the root strip, ``top`` / ``bottom``
    step to an edge line first, ``cross`` runs along the midline of the
    strip crossing the root square.
    """
    if kind == "mid":
        pts = [((), k, 0) for k in range(length + 1)]
    elif kind in ("top", "bottom"):
        q = 1 if kind == "top" else -1
        pts = [((), 0, 0)] + [((), k, q) for k in range(length)]
    elif kind == "cross":
        pts = [((0,), k, 0) for k in range(length + 1)]
    else:
        raise ValueError(f"unknown ray kind {kind!r}")
    return tuple(rose_vertex(g, *v) for v in pts)
