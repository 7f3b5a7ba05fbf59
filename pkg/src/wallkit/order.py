"""The order at the root: ``x <= y`` iff ``x`` lies on a geodesic from the root to ``y``.

Root distances of a ball are exact, and so is ``leq``: a vertex on an ambient
geodesic from the root to ``y`` is joined to ``y`` inside the ball, and a
vertex off every such geodesic is too far from ``y`` in any metric.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import InternalInconsistency, NoMeet
from .graph_core import BallGraph
from .walls import HyperplaneSet, build_hyperplanes


@dataclass(frozen=True)
class UpperBounds:
    vertices: frozenset
    frontier: bool  # upper bounds beyond the ball may be missing


class OrderContext:
    """Order queries at the root of ``g``.

    ``quasi_median`` enables the sector/gate meet algorithm; it is always
    cross-checked against the brute-force greatest lower bound.
    """

    def __init__(self, g: BallGraph, hyperplanes: HyperplaneSet | None = None,
                 quasi_median: bool = False):
        self.graph = g
        self.root = g.root
        self.quasi_median = quasi_median
        self._hs = hyperplanes
        self._d0 = g.dist_row(g.root)

    @property
    def hyperplanes(self) -> HyperplaneSet:
        if self._hs is None:
            self._hs = build_hyperplanes(self.graph)
        return self._hs

    def leq(self, x: int, y: int) -> bool:
        g = self.graph
        x, y = g.check(x), g.check(y)
        d0 = self._d0
        return bool(d0[x] + g.dist_row(x)[y] == d0[y])

    def down_set(self, x: int) -> np.ndarray:
        """Boolean mask of ``{z : z <= x}`` (the interval from the root)."""
        d0 = self._d0
        return d0 + self.graph.dist_row(x) == d0[x]

    def up_set(self, x: int) -> np.ndarray:
        d0 = self._d0
        return d0[x] + self.graph.dist_row(x) == d0

    def meet_brute_force(self, S: Iterable[int]) -> int:
        S = [self.graph.check(s) for s in S]
        if not S:
            raise ValueError("empty set has no meet")
        lower = np.logical_and.reduce([self.down_set(s) for s in S])
        cand = np.flatnonzero(lower)
        # the greatest lower bound sits above every other lower bound
        for z in cand[np.argsort(-self._d0[cand], kind="stable")]:
            if self.down_set(int(z))[cand].all():
                return int(z)
        raise NoMeet(f"no greatest lower bound among {len(cand)} common lower bounds")

    def meet_gate(self, S: Iterable[int]) -> int:
        """Gate of the root on the sectors containing ``S`` beyond the root."""
        g = self.graph
        S = [g.check(s) for s in S]
        M = self.hyperplanes.sector_matrix
        cols = M[:, S]
        same = (cols == cols[:, :1]).all(axis=1)
        sep = same & (cols[:, 0] != M[:, self.root])
        inside = (M[sep] == cols[sep, :1]).all(axis=0)
        return g.gate(self.root, np.flatnonzero(inside).tolist())

    def meet(self, S: Iterable[int]) -> int:
        S = list(S)
        brute = self.meet_brute_force(S)
        if self.quasi_median:
            fast = self.meet_gate(S)
            if fast != brute:
                raise InternalInconsistency(
                    f"gate meet {_label(self.graph, fast)} differs from "
                    f"brute-force meet {_label(self.graph, brute)}"
                )
        return brute

    def minimal_upper_bounds(self, x: int, y: int) -> UpperBounds:
        g = self.graph
        x, y = g.check(x), g.check(y)
        common = np.flatnonzero(self.up_set(x) & self.up_set(y))
        minimal = [
            int(z) for z in common
            if self.down_set(int(z))[common].sum() == 1
        ]
        frontier = g.radius is not None and self._d0[x] + self._d0[y] > g.radius
        return UpperBounds(frozenset(minimal), bool(frontier))

    def relation_rows(self, radius: int | None = None):
        """(x, y, leq) label triples over the vertices within ``radius`` of the root."""
        g = self.graph
        keep = np.flatnonzero(self._d0 <= (g.n if radius is None else radius))
        for x in keep.tolist():
            up = self.up_set(x)
            for y in keep.tolist():
                yield g.labels[x], g.labels[y], bool(up[y])


def _label(g: BallGraph, v: int) -> str:
    return str(g.labels[v])


def leq(ctx: OrderContext, x: int, y: int) -> bool:
    return ctx.leq(x, y)


def meet(ctx: OrderContext, S: Iterable[int]) -> int:
    return ctx.meet(S)


def minimal_upper_bounds(ctx: OrderContext, x: int, y: int) -> UpperBounds:
    return ctx.minimal_upper_bounds(x, y)
