"""Cliques, parallelism, hyperplanes and sectors of paraclique graphs.

Hyperplanes are parallelism classes of maximal cliques.  Removing the edges of
a hyperplane splits the graph into *sectors*; two hyperplanes are transverse
when every sector of one meets every sector of the other, and nested
otherwise.

Truncation: a hyperplane is ``truncated`` when one of its clique vertices has
margin < 2.  Its sector data is still exact when the ball carries the ambient
metric (Cayley balls), which is what ``reliable`` records; the structural
checks are enforced on reliable hyperplanes only.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import networkx as nx
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import InternalInconsistency, NotGeodesic, NotParaclique
from .graph_core import BallGraph

Clique = tuple[int, ...]

PARALLEL = "Parallel"
ANTIPODAL = "Antipodal"
OTHER = "Other"
TRANSVERSE = "Transverse"
NESTED = "Nested"

_CHUNK = 1 << 22  # entries per vectorised block


def maximal_cliques(g: BallGraph) -> list[Clique]:
    """All maximal cliques as sorted vertex tuples, in lexicographic order."""
    G = nx.Graph()
    G.add_nodes_from(range(g.n))
    G.add_edges_from(g.edges)
    return sorted(tuple(sorted(c)) for c in nx.find_cliques(G))


@dataclass(frozen=True)
class CliqueRelation:
    kind: str
    distance: int
    matching: tuple[tuple[int, int], ...] = ()
    pair: tuple[int, int] | None = None


def clique_pair_relation(g: BallGraph, c1: Sequence[int], c2: Sequence[int]) -> CliqueRelation:
    """Parallel (with the vertex matching), Antipodal (with the closest pair) or Other."""
    c1, c2 = tuple(c1), tuple(c2)
    D = g.dist[np.ix_(c1, c2)] if g.dense else np.array([g.dist_row(u)[list(c2)] for u in c1])
    m = int(D.min())
    if len(c1) == len(c2):
        E = D == m
        if (E.sum(0) == 1).all() and (E.sum(1) == 1).all() and (D[~E] == m + 1).all():
            match = tuple((c1[i], c2[int(np.argmax(E[i]))]) for i in range(len(c1)))
            return CliqueRelation(PARALLEL, m, matching=match)
    closest = np.argwhere(D == m)
    if len(closest) == 1:
        i, j = closest[0]
        others1 = [a for a in range(len(c1)) if a != i]
        others2 = [b for b in range(len(c2)) if b != j]
        if (
            (D[i, others2] == m + 1).all()
            and (D[others1, j] == m + 1).all()
            and (D[np.ix_(others1, others2)] == m + 2).all()
        ):
            return CliqueRelation(ANTIPODAL, m, pair=(c1[i], c2[j]))
    return CliqueRelation(OTHER, m)


def _parallel_blocks(g: BallGraph, C: np.ndarray):
    """Yield (rows, parallel, certified) boolean blocks for cliques of one size.

    ``certified`` marks pairs whose distances are all known to be ambient.
    """
    D = g.dist
    mg = g.margin
    N, k = C.shape
    step = max(1, _CHUNK // max(1, N * k * k))
    for lo in range(0, N, step):
        A = C[lo:lo + step]
        blk = np.stack(
            [np.stack([D[A[:, i]][:, C[:, j]] for j in range(k)], -1) for i in range(k)], -2
        )  # rows x N x k x k
        m = blk.min(axis=(-1, -2), keepdims=True)
        E = blk == m
        ok = ((blk == m) | (blk == m + 1)).all(axis=(-1, -2))
        ok &= (E.sum(-1) == 1).all(-1) & (E.sum(-2) == 1).all(-1)
        if g.ambient:
            cert = np.ones(ok.shape, dtype=bool)
        else:
            ma = mg[A].min(axis=1)[:, None]
            mb = mg[C].min(axis=1)[None, :]
            dmax = blk.max(axis=(-1, -2))
            cert = (dmax <= ma) | (dmax <= mb)
        yield slice(lo, lo + len(A)), ok, cert


@dataclass
class ParacliqueReport:
    triangle_failures: list = field(default_factory=list)
    diamonds: list = field(default_factory=list)
    ungated: list = field(default_factory=list)
    transitivity_violations: list = field(default_factory=list)
    sector_failures: list = field(default_factory=list)

    @property
    def clique_gated(self) -> bool:
        return not (self.triangle_failures or self.diamonds or self.ungated)

    @property
    def paraclique(self) -> bool:
        return (
            self.clique_gated
            and not self.transitivity_violations
            and not self.sector_failures
        )

    def summary(self) -> dict:
        return {
            "paraclique": self.paraclique,
            "clique_gated": self.clique_gated,
            "triangle_failures": len(self.triangle_failures),
            "diamonds": len(self.diamonds),
            "ungated": len(self.ungated),
            "transitivity_violations": len(self.transitivity_violations),
            "sector_failures": len(self.sector_failures),
        }


@dataclass
class Hyperplane:
    id: int
    cliques: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    sector_of: np.ndarray = field(repr=False)
    truncated: bool
    reliable: bool

    @property
    def n_sectors(self) -> int:
        return int(self.sector_of.max()) + 1

    @property
    def sectors(self) -> list[frozenset]:
        return [frozenset(np.flatnonzero(self.sector_of == i).tolist()) for i in range(self.n_sectors)]

    def sector(self, v: int) -> int:
        return int(self.sector_of[v])

    @property
    def vertices(self) -> frozenset:
        return frozenset(v for e in self.edges for v in e)


@dataclass(frozen=True)
class PairVerdict:
    relation: str
    sectors: tuple[int, int] | None
    truncated: bool
    conditions: tuple[bool, bool, bool, bool] | None
    consistent: bool


class HyperplaneSet:
    """Hyperplanes of a graph with vectorised sector queries."""

    def __init__(self, g: BallGraph, cliques, clique_class, report, edge_class):
        self.graph = g
        self.cliques: list[Clique] = cliques
        self.clique_class = clique_class
        self.report: ParacliqueReport = report
        self._edge_class = edge_class
        self.hyperplanes: list[Hyperplane] = []
        self._transverse: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.hyperplanes)

    def __iter__(self):
        return iter(self.hyperplanes)

    def __getitem__(self, i: int) -> Hyperplane:
        return self.hyperplanes[i]

    @property
    def sector_matrix(self) -> np.ndarray:
        """``S[h, v]`` = sector index of vertex ``v`` for hyperplane ``h``."""
        return self._S

    def hyperplane_of_edge(self, u: int, v: int) -> int:
        return self._edge_class[(min(u, v), max(u, v))]

    def separating(self, x: int, y: int) -> frozenset:
        g = self.graph
        x, y = g.check(x), g.check(y)
        return frozenset(np.flatnonzero(self._S[:, x] != self._S[:, y]).tolist())

    def crossing_signature(self, path: Sequence[int]) -> tuple[tuple[int, int, int], ...]:
        g = self.graph
        if not g.is_geodesic(path):
            raise NotGeodesic("path is not a geodesic")
        sig = []
        for a, b in zip(path, path[1:]):
            h = self.hyperplane_of_edge(a, b)
            sig.append((h, int(self._S[h, a]), int(self._S[h, b])))
        return tuple(sig)

    # -- pair relations ------------------------------------------------------

    def _intersections(self, h: int, k: int) -> np.ndarray:
        a, b = self._S[h], self._S[k]
        C = np.zeros((a.max() + 1, b.max() + 1), dtype=np.int64)
        np.add.at(C, (a, b), 1)
        return C

    @property
    def transverse_matrix(self) -> np.ndarray:
        """``T[h, k]`` true when every sector of ``h`` meets every sector of ``k``."""
        if self._transverse is None:
            S = self._S
            H = len(self.hyperplanes)
            offsets = np.zeros(H + 1, dtype=np.int64)
            offsets[1:] = np.cumsum(S.max(axis=1) + 1)
            M = np.zeros((offsets[-1], self.graph.n), dtype=np.float64)
            for h in range(H):
                M[offsets[h] + S[h], np.arange(self.graph.n)] = 1.0
            P = M @ M.T
            P = np.minimum.reduceat(P, offsets[:-1], axis=0)
            P = np.minimum.reduceat(P, offsets[:-1], axis=1)
            T = P > 0
            np.fill_diagonal(T, False)
            T.setflags(write=False)
            self._transverse = T
        return self._transverse

    def common_transversals(self, h: int, k: int) -> tuple[int, bool]:
        if h == k:
            raise ValueError("hyperplanes must be distinct")
        T = self.transverse_matrix
        both = T[h] & T[k]
        both[[h, k]] = False
        lower = self.hyperplanes[h].truncated or self.hyperplanes[k].truncated
        return int(both.sum()), bool(lower)

    def _antipodal_cliques(self, h: int, k: int):
        """Closest antipodal clique pair between the two classes, or None."""
        g = self.graph
        ch = [self.cliques[c] for c in self.hyperplanes[h].cliques]
        ck = [self.cliques[c] for c in self.hyperplanes[k].cliques]
        cands = []
        for a in ch:
            for b in ck:
                cands.append((int(g.dist[np.ix_(a, b)].min()), a, b))
        cands.sort()
        for _, a, b in cands:
            rel = clique_pair_relation(g, a, b)
            if rel.kind == ANTIPODAL:
                return a, b, rel.pair
        return None

    def _projects_to(self, h: int, target: Clique, y: int) -> bool:
        """Every clique vertex of ``h`` has gate ``y`` on ``target``."""
        D = self.graph.dist
        verts = np.array(sorted(self.hyperplanes[h].vertices))
        T = np.array(target)
        dv = D[np.ix_(verts, T)]
        yi = list(target).index(y)
        # gate y: d(v, t) = d(v, y) + d(y, t) for all t in the clique
        return bool((dv == dv[:, [yi]] + (T != y)[None, :]).all())

    def classify(self, h: int, k: int, check: bool = True) -> PairVerdict:
        if h == k:
            raise ValueError("hyperplanes must be distinct")
        C = self._intersections(h, k)
        sizes_h, sizes_k = C.sum(1), C.sum(0)
        transverse = bool((C > 0).all())
        contained = (C == sizes_h[:, None]).any() or (C == sizes_k[None, :]).any()
        hp, kp = self.hyperplanes[h], self.hyperplanes[k]
        truncated = hp.truncated or kp.truncated
        sectors = None
        if not transverse:
            for a in range(C.shape[0]):
                for b in range(C.shape[1]):
                    other_k = [c for c in range(C.shape[1]) if c != b]
                    other_h = [c for c in range(C.shape[0]) if c != a]
                    if all(C[a, c] == sizes_k[c] for c in other_k) and all(
                        C[c, b] == sizes_h[c] for c in other_h
                    ):
                        sectors = (a, b)
                        break
                if sectors:
                    break
        consistent = transverse != bool(contained) and (transverse or sectors is not None)
        conditions = None
        if check:
            found = self._antipodal_cliques(h, k)
            if found is None:
                consistent = False
            else:
                dh, dk, (x, y) = found
                S = self._S
                xt = [v for v in dh if v != x]
                yt = [v for v in dk if v != y]
                c1 = self._projects_to(h, dk, y)
                c2 = self._projects_to(k, dh, x)
                c3 = all(
                    not ((S[h] == S[h, a]) & (S[k] == S[k, b])).any() for a in xt for b in yt
                )
                c4 = all(
                    not ((S[k] == S[k, b]) & (S[h] != S[h, x])).any() for b in yt
                )
                conditions = (c1, c2, c3, c4)
                if len(set(conditions)) != 1 or conditions[0] == transverse:
                    consistent = False
        if not consistent and not truncated:
            raise InternalInconsistency(
                f"hyperplanes {h} and {k}: sector classification and clique "
                f"projection conditions disagree"
            )
        return PairVerdict(
            TRANSVERSE if transverse else NESTED, sectors, truncated, conditions, consistent
        )


def _clique_classes(g: BallGraph, cliques: list[Clique], report: ParacliqueReport):
    """Union-find of parallel cliques; records certified non-parallel pairs inside a class."""
    n = len(cliques)
    by_size: dict[int, list[int]] = {}
    for i, c in enumerate(cliques):
        by_size.setdefault(len(c), []).append(i)
    rows, cols = [], []
    cert_other = []
    for k, ids in sorted(by_size.items()):
        ids = np.array(ids)
        C = np.array([cliques[i] for i in ids], dtype=np.int64)
        for sl, par, cert in _parallel_blocks(g, C):
            r, c = np.nonzero(par)
            rows.append(ids[sl][r])
            cols.append(ids[c])
            r, c = np.nonzero(~par & cert)
            cert_other.append((ids[sl][r], ids[c]))
    rows = np.concatenate(rows) if rows else np.zeros(0, dtype=np.int64)
    cols = np.concatenate(cols) if cols else np.zeros(0, dtype=np.int64)
    A = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    _, label = connected_components(A, directed=False)
    for r, c in cert_other:
        bad = label[r] == label[c]
        for a, b in zip(r[bad].tolist(), c[bad].tolist()):
            if a < b:
                report.transitivity_violations.append((a, b))
    # relabel classes by their smallest clique
    order = {}
    for i in range(n):
        order.setdefault(int(label[i]), len(order))
    return np.array([order[int(l)] for l in label], dtype=np.int64)


def _check_clique_gated(g: BallGraph, cliques: list[Clique], report: ParacliqueReport):
    D = g.dist
    adj = [set(a) for a in g.adj]
    safe_base = D <= g.margin[:, None]  # safe_base[o, x]: distances from o up to x exact
    for x, y in g.edges:
        common = sorted(adj[x] & adj[y])
        for i, z in enumerate(common):
            for w in common[i + 1:]:
                if w not in adj[z]:
                    report.diamonds.append((x, y, z, w))
        eq = (D[:, x] == D[:, y]) & safe_base[:, x] & safe_base[:, y]
        if not eq.any():
            continue
        if common:
            down = (D[:, common] == (D[:, x] - 1)[:, None]).any(axis=1)
        else:
            down = np.zeros(g.n, dtype=bool)
        eq[[x, y]] = False
        for o in np.flatnonzero(eq & ~down).tolist():
            report.triangle_failures.append((o, x, y))
    for ci, c in enumerate(cliques):
        Dc = D[:, c]
        dmin = Dc.min(axis=1)
        # gate condition: the minimiser p satisfies d(x,t) = d(x,p) + 1 for t != p
        unique = (Dc == dmin[:, None]).sum(axis=1) == 1
        rest = (Dc == dmin[:, None]) | (Dc == dmin[:, None] + 1)
        good = unique & rest.all(axis=1)
        mask = np.ones(g.n, dtype=bool) if g.ambient else Dc.max(axis=1) <= g.margin
        for x in np.flatnonzero(~good & mask).tolist():
            report.ungated.append((ci, x))


def build_hyperplanes(g: BallGraph, strict: bool = False) -> HyperplaneSet:
    """Parallel classes of maximal cliques, their sectors and a paraclique report.

    With ``strict`` a failed paraclique verdict raises :class:`NotParaclique`
    (the hyperplanes are attached to the exception); otherwise a warning is
    issued and the hyperplanes are returned.
    """
    report = ParacliqueReport()
    cliques = maximal_cliques(g)
    if g.n == 1:
        cliques = []
    cls = _clique_classes(g, cliques, report) if cliques else np.zeros(0, dtype=np.int64)
    _check_clique_gated(g, cliques, report)
    H = int(cls.max()) + 1 if len(cls) else 0
    members: list[list[int]] = [[] for _ in range(H)]
    for ci, h in enumerate(cls.tolist()):
        members[h].append(ci)
    edge_class: dict[tuple[int, int], int] = {}
    for ci, c in enumerate(cliques):
        for i, u in enumerate(c):
            for v in c[i + 1:]:
                edge_class.setdefault((u, v), int(cls[ci]))
    hs = HyperplaneSet(g, cliques, cls, report, edge_class)
    E = np.array(g.edges, dtype=np.int64).reshape(-1, 2)
    ecls = np.array([edge_class[(int(u), int(v))] for u, v in E], dtype=np.int64)
    S = np.zeros((H, g.n), dtype=np.int64)
    for h in range(H):
        keep = E[ecls != h]
        A = csr_matrix(
            (np.ones(len(keep)), (keep[:, 0], keep[:, 1])), shape=(g.n, g.n)
        )
        _, lab = connected_components(A, directed=False)
        if g.ambient and members[h]:
            lab = _merge_by_gate(g, lab, cliques[members[h][0]], h, report)
        _, first = np.unique(lab, return_index=True)
        rank = np.empty(len(first), dtype=np.int64)
        rank[np.argsort(first)] = np.arange(len(first))
        S[h] = rank[lab]
        verts = sorted({v for ci in members[h] for v in cliques[ci]})
        truncated = bool((g.margin[verts] < 2).any())
        hs.hyperplanes.append(
            Hyperplane(
                id=h,
                cliques=tuple(members[h]),
                edges=tuple(sorted(e for e, c in edge_class.items() if c == h)),
                sector_of=S[h],
                truncated=truncated,
                reliable=g.ambient or not truncated,
            )
        )
    S.setflags(write=False)
    hs._S = S
    _check_sectors(hs)
    if not report.paraclique:
        msg = f"graph is not paraclique: {report.summary()}"
        if strict:
            raise NotParaclique(msg, hyperplanes=hs)
        warnings.warn(msg, stacklevel=2)
    return hs


def _merge_by_gate(g: BallGraph, lab: np.ndarray, clique: Clique, h: int, report) -> np.ndarray:
    """Sectors of a ball with ambient metric: ball components grouped by gate on ``clique``.

    A ball need not be convex, so one ambient sector can meet it in several
    components; the gate preimages recover the ambient sectors.  Every ball
    component must carry a single gate.
    """
    Dc = g.dist[:, list(clique)]
    gate = np.argmin(Dc, axis=1)
    for comp in np.unique(lab):
        if len(np.unique(gate[lab == comp])) != 1:
            report.sector_failures.append((h, None, int(np.flatnonzero(lab == comp)[0])))
    return gate


def _check_sectors(hs: HyperplaneSet):
    """Gate-preimage bijection: sector of x is the sector of its gate on each clique."""
    g = hs.graph
    D = g.dist
    for hp in hs.hyperplanes:
        if not hp.reliable:
            continue
        S = hp.sector_of
        if hp.n_sectors < 2:
            hs.report.sector_failures.append((hp.id, None, None))
            continue
        for ci in hp.cliques:
            c = np.array(hs.cliques[ci])
            if len(set(S[c].tolist())) != len(c) or len(c) != hp.n_sectors:
                hs.report.sector_failures.append((hp.id, ci, None))
                continue
            Dc = D[:, c]
            gate = c[np.argmin(Dc, axis=1)]
            unique = (Dc == Dc.min(axis=1, keepdims=True)).sum(axis=1) == 1
            mask = unique if g.ambient else unique & (Dc.max(axis=1) <= g.margin)
            bad = mask & (S[gate] != S)
            for x in np.flatnonzero(bad).tolist():
                hs.report.sector_failures.append((hp.id, ci, x))


# -- functional interface ---------------------------------------------------


def separating_hyperplanes(hs: HyperplaneSet, x: int, y: int) -> frozenset:
    return hs.separating(x, y)


def classify_pair(hs: HyperplaneSet, h: int, k: int) -> PairVerdict:
    return hs.classify(h, k)


def common_transversals(hs: HyperplaneSet, h: int, k: int) -> tuple[int, bool]:
    return hs.common_transversals(h, k)


def crossing_signature(hs: HyperplaneSet, path: Sequence[int]):
    return hs.crossing_signature(path)
