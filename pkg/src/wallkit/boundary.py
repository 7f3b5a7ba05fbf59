"""Truncated boundary data: orientations of ray prefixes, horofunction vectors,
strongly separated chains and recurrence profiles along axes.

An orientation records, for each hyperplane crossed by a geodesic prefix
from the root, the sector the prefix enters (and, being geodesic, keeps).
Principal orientations come from a vertex instead of a prefix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .coxeter import CayleyBall
from .dynamics import INTERIOR_MARGIN, Axis, longest_ss_chain
from .errors import NotFromRoot
from .graph_core import BallGraph
from .walls import HyperplaneSet


@dataclass(frozen=True)
class Orientation:
    decided: tuple[tuple[int, int], ...]  # sorted (hyperplane, sector) pairs
    source: str = field(compare=False)
    path: tuple[int, ...] | None = field(default=None, compare=False)

    def as_dict(self) -> dict[int, int]:
        return dict(self.decided)

    def __len__(self) -> int:
        return len(self.decided)

    def rows(self):
        yield from self.decided


def ray_orientation(g: BallGraph, hs: HyperplaneSet, path: Sequence[int]) -> Orientation:
    path = tuple(int(v) for v in path)
    if not path or path[0] != g.root:
        raise NotFromRoot("ray prefixes must start at the root")
    sig = hs.crossing_signature(path)
    decided = tuple(sorted((h, b) for h, _, b in sig))
    return Orientation(decided, "ray:" + " ".join(str(g.labels[v]) for v in path), path)


def principal_orientation(g: BallGraph, hs: HyperplaneSet, x: int,
                          hyperplanes: Sequence[int] | None = None) -> Orientation:
    x = g.check(x)
    S = hs.sector_matrix
    hyps = range(len(hs)) if hyperplanes is None else hyperplanes
    return Orientation(tuple(sorted((int(h), int(S[h, x])) for h in hyps)), f"vertex:{g.labels[x]}")


def symmetric_difference(o1: Orientation, o2: Orientation) -> int:
    return len(set(o1.decided) ^ set(o2.decided))


def consistent(hs: HyperplaneSet, o: Orientation) -> bool:
    """All chosen sectors have a common vertex (finite families only)."""
    S = hs.sector_matrix
    inside = np.ones(hs.graph.n, dtype=bool)
    for h, s in o.decided:
        inside &= S[h] == s
    return bool(inside.any())


# -- horofunctions ----------------------------------------------------------------


@dataclass(frozen=True)
class HorofunctionVector:
    target: int
    values: np.ndarray = field(compare=False)

    def __call__(self, x: int) -> int:
        return int(self.values[x])


def horofunction_vector(g: BallGraph, y: int) -> HorofunctionVector:
    """``b_y(x) = d(x, y) - d(o, y)`` over the ball."""
    y = g.check(y)
    row = g.dist_row(y).astype(np.int64)
    vals = row - row[g.root]
    vals.setflags(write=False)
    return HorofunctionVector(y, vals)


def sup_difference(v1: HorofunctionVector, v2: HorofunctionVector, mask=None) -> int:
    diff = np.abs(v1.values - v2.values)
    if mask is not None:
        diff = diff[np.asarray(mask, dtype=bool)]
    return int(diff.max()) if diff.size else 0


def safe_mask(g: BallGraph, targets: Sequence[int]) -> np.ndarray:
    """Vertices whose distances to every target are exact ambient distances."""
    return np.array([all(g.safe_pair(x, y) for y in targets) for x in range(g.n)], dtype=bool)


# -- minimality chains -------------------------------------------------------------


@dataclass
class ChainReport:
    length: int
    chain: tuple[tuple[int, int], ...]  # descending half-spaces (hyperplane, sector)
    eligible: int

    @property
    def minimal_evidence(self) -> bool:
        return self.length >= 2


def chain_minimality(g: BallGraph, hs: HyperplaneSet, o: Orientation) -> ChainReport:
    """Longest family of pairwise strongly separated decided half-spaces.

    Only hyperplanes crossed away from the frontier sphere are eligible, so
    that a transversal hidden just outside the ball cannot fake separation.
    Without a defining prefix, non-truncated hyperplanes are eligible.
    """
    decided = o.as_dict()
    if o.path is not None:
        margin = g.radius - g.dist_row(g.root) if g.radius is not None else None
        order = []
        for a, b in zip(o.path, o.path[1:]):
            h = hs.hyperplane_of_edge(a, b)
            if margin is None or min(margin[a], margin[b]) >= INTERIOR_MARGIN:
                order.append(h)
    else:
        order = [h for h in sorted(decided) if not hs[h].truncated]
    chain = longest_ss_chain(hs, order)
    return ChainReport(len(chain), tuple((h, decided[h]) for h in chain), len(order))


# -- recurrence profiles -----------------------------------------------------------


@dataclass(frozen=True)
class OverlapRow:
    axis_id: int
    translate_id: int
    translate: str  # the translating element
    overlap: int
    R: int


def axis_translates(cball: CayleyBall, axis: Axis) -> list[tuple[str, frozenset]]:
    """Distinct in-ball traces of ``g . Ax(h)`` for ``g`` in the ball, in ball order."""
    wp = cball.wp
    R = cball.radius
    lo = hi = 0
    reach = 2 * R + len(axis.unit) + len(axis.conj)
    while lo > -4 * reach and len(axis.word_at(lo - 1)) <= 2 * R:
        lo -= 1
    while hi < 4 * reach and len(axis.word_at(hi + 1)) <= 2 * R:
        hi += 1
    pts = [axis.word_at(i) for i in range(lo, hi + 1)]
    seen = set()
    out = []
    for g_word in cball.words:
        trace = frozenset(
            v for v in (cball.vertex_of.get(wp.multiply(g_word, a)) for a in pts
                        if len(a) <= R + len(g_word))
            if v is not None
        )
        if trace and trace not in seen:
            seen.add(trace)
            out.append((cball.system.format_word(g_word), trace))
    return out


def myrberg_profile(g: BallGraph, path: Sequence[int], translates: Sequence[Sequence], R: int):
    """Overlap of the prefix with the ``R``-neighbourhoods of axis translates.

    ``translates[a]`` lists ``(name, vertex set)`` for axis ``a``.  Returns
    the per-translate rows and the maximum overlap per axis (one axis per
    conjugacy class: its translates are the axes of the conjugates).
    """
    P = np.asarray(path)
    rows = []
    summary = {}
    for a, family in enumerate(translates):
        best = 0
        for t, (name, verts) in enumerate(family):
            T = np.asarray(sorted(verts))
            near = g.dist[np.ix_(P, T)].min(axis=1) <= R
            pts = P[near]
            ov = int(g.dist[np.ix_(pts, pts)].max()) if len(pts) else 0
            rows.append(OverlapRow(a, t, name, ov, R))
            best = max(best, ov)
        summary[a] = best
    return rows, summary
