"""Axes of infinite-order elements, contracting certificates, admissible paths
and north-south iteration on Cayley balls.

Positions along an axis are integers: position ``k |u| + j`` is the element
``v u^k u[:j]`` where ``u = v^-1 h^n0 v``.  Translation by ``h^n0`` shifts
positions by ``|u|``, so larger positions point towards the attracting end.
An orbit quasi-axis uses ``v = e`` and ``u = h``.

A crossing edge is *interior* when neither endpoint lies on the frontier
sphere; radius-indexed verdicts only use interior crossings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil
from typing import Sequence

import networkx as nx
import numpy as np

from .coxeter import CayleyBall, Word
from .errors import AllCandidatesRejected, FiniteOrderElement, NotAWalk
from .walls import HyperplaneSet, build_hyperplanes

INVARIANT_GEODESIC = "InvariantGeodesic"
ORBIT_QUASI_AXIS = "OrbitQuasiAxis"

CERTIFIED = "CertifiedToRadius"
REFUTED = "RefutedToRadius"
INCONCLUSIVE = "Inconclusive"

INTERIOR_MARGIN = 1
DEFAULT_POWER_BUDGET = 8


def _word(cball: CayleyBall, w) -> Word:
    if isinstance(w, str):
        w = cball.system.parse_word(w)
    return cball.wp.normal_form(w)


# -- axes ---------------------------------------------------------------------


@dataclass
class Axis:
    element: Word
    period: int
    kind: str
    conj: Word  # v
    unit: Word  # u = v^-1 h^period v
    vertices: tuple[int, ...]
    positions: tuple[int, ...]
    cball: CayleyBall = field(repr=False)
    # the quasi-axis is the orbit of <h>, standing in for the elementary closure E(h)
    orbit_of: str = "<h>"
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def geodesic(self) -> bool:
        return self.kind == INVARIANT_GEODESIC

    def word_at(self, i: int) -> Word:
        """Group element at axis position ``i``."""
        wp = self.cball.wp
        k, j = divmod(i, len(self.unit))
        base = self._cache.get(k)
        if base is None:
            base = self._cache[k] = wp.multiply(self.conj, wp.power(self.unit, k))
        return wp.multiply(base, self.unit[:j])

    def translation_shift(self) -> int:
        """Position shift of ``h^period``."""
        return len(self.unit)

    def to_dict(self) -> dict:
        fmt = self.cball.system.format_word
        return {
            "element": fmt(self.element),
            "period": self.period,
            "kind": self.kind,
            "conjugator": fmt(self.conj),
            "unit": fmt(self.unit),
            "positions": [self.positions[0], self.positions[-1]],
            "vertices": [self.cball.label(v) for v in self.vertices],
            "orbit_of": self.orbit_of,
        }


def finite_order(cball: CayleyBall, h: Word) -> int | None:
    """Order of ``h`` if its orbit returns to the root before leaving the
    horizon ``2R + |h|``, else None."""
    wp = cball.wp
    if not h:
        return 1
    horizon = 2 * cball.radius + len(h)
    x: Word = ()
    k = 0
    while len(x) <= horizon:
        x = wp.multiply(x, h)
        k += 1
        if not x:
            return k
    return None


def _reduced_powers(wp, u: Word, kmax: int) -> bool:
    x = u
    for k in range(2, kmax + 1):
        x = wp.multiply(x, u)
        if len(x) != k * len(u):
            return False
    return True


def build_axis(cball: CayleyBall, h, power_budget: int = DEFAULT_POWER_BUDGET,
               conj_radius: int | None = None) -> Axis:
    """Invariant geodesic line of a power of ``h``, or the orbit quasi-axis.

    For ``n0 = 1..power_budget`` and conjugators ``v`` of length at most
    ``conj_radius`` (ShortLex order), ``u = v^-1 h^n0 v`` is accepted when its
    normal form has reduced powers: the bi-infinite word ``u^Z`` is then a
    geodesic line through ``v`` preserved by ``h^n0``.  Among the spellings
    of ``u`` the ShortLex-minimal one is used.
    """
    wp = cball.wp
    h = _word(cball, h)
    order = finite_order(cball, h)
    if order is not None:
        raise FiniteOrderElement(
            f"{cball.system.format_word(h)} has order {order}: its orbit returns to the root"
        )
    R = cball.radius
    conj_radius = R // 2 if conj_radius is None else conj_radius
    conjugators = sorted((w for w in cball.words if len(w) <= conj_radius), key=lambda w: (len(w), w))
    for n0 in range(1, power_budget + 1):
        hn = wp.power(h, n0)
        for v in conjugators:
            u = wp.multiply(wp.multiply(wp.inverse(v), hn), v)
            if not u:
                continue
            kmax = ceil((2 * R + 2) / len(u)) + 1
            if _reduced_powers(wp, u, kmax):
                return _finish_axis(cball, h, n0, INVARIANT_GEODESIC, v, u)
    return _finish_axis(cball, h, 1, ORBIT_QUASI_AXIS, (), h)


def _finish_axis(cball, h, n0, kind, v, u) -> Axis:
    axis = Axis(h, n0, kind, v, u, (), (), cball)
    R = cball.radius
    width = 2 * R + 2 * len(u) + len(v) + 2
    lengths = {i: len(axis.word_at(i)) for i in range(-width, width + 1)}
    start = min(lengths, key=lambda i: (lengths[i], abs(i)))
    lo = hi = start
    while lo - 1 >= -width and lengths[lo - 1] <= R:
        lo -= 1
    while hi + 1 <= width and lengths[hi + 1] <= R:
        hi += 1
    positions = tuple(range(lo, hi + 1))
    axis.positions = positions
    axis.vertices = tuple(cball.vertex_of[axis.word_at(i)] for i in positions)
    return axis


# -- projections --------------------------------------------------------------


@dataclass
class ProjectionProfile:
    diameters: np.ndarray  # per vertex, -1 where the projection is clipped by the frontier
    vertex_constant: int
    geodesic_constant: int
    threshold: int
    n_geodesics: int

    @property
    def constant(self) -> int:
        return max(self.vertex_constant, self.geodesic_constant)


def _projection_sets(g, axis_vertices: Sequence[int]):
    A = np.asarray(axis_vertices)
    DA = g.dist[:, A]
    near = DA == DA.min(axis=1, keepdims=True)
    # an endpoint of the segment may hide nearer points beyond the ball
    clipped = near[:, 0] | near[:, -1]
    return A, DA.min(axis=1), near, clipped


def _diameter(g, verts) -> int:
    verts = np.asarray(sorted(set(int(v) for v in verts)))
    if len(verts) < 2:
        return 0
    return int(g.dist[np.ix_(verts, verts)].max())


def projection_profile(g, axis_vertices: Sequence[int], threshold: int | None = None,
                       max_pairs: int = 20_000, seed: int = 0) -> ProjectionProfile:
    """Nearest-point projections onto an axis segment.

    Per vertex: diameter of the projection set (vertices whose projection
    touches a segment endpoint are skipped).  Per geodesic between vertices
    at distance at least ``threshold`` from the axis (default: one more than
    the per-vertex maximum) and staying that far: diameter of the union of
    its vertices' projections.  All such pairs are scanned, or a seeded
    sample of ``max_pairs`` of them.  The empirical constant is the larger
    of the two maxima.
    """
    A, dmin, near, clipped = _projection_sets(g, axis_vertices)
    diam = np.full(g.n, -1, dtype=np.int64)
    for x in np.flatnonzero(~clipped):
        diam[x] = _diameter(g, A[near[x]])
    vertex_constant = int(diam.max()) if (diam >= 0).any() else 0
    threshold = vertex_constant + 1 if threshold is None else threshold
    far = np.flatnonzero((dmin >= threshold) & ~clipped)
    pairs = [(int(x), int(y)) for i, x in enumerate(far) for y in far[i + 1:]]
    if len(pairs) > max_pairs:
        rng = np.random.Generator(np.random.Philox(seed))
        pick = np.sort(rng.choice(len(pairs), size=max_pairs, replace=False))
        pairs = [pairs[i] for i in pick]
    geo_constant = 0
    count = 0
    for x, y in pairs:
        try:
            sigma = np.asarray(g.geodesic(x, y))
        except NotAWalk:
            continue
        if dmin[sigma].min() < threshold or clipped[sigma].any():
            continue
        geo_constant = max(geo_constant, _diameter(g, A[near[sigma].any(axis=0)]))
        count += 1
    return ProjectionProfile(diam, vertex_constant, geo_constant, threshold, count)


def hyperplane_projection(g, hs: HyperplaneSet, h: int, axis_vertices) -> int | None:
    """Diameter of the projection of ``h``'s vertices onto the axis, None if clipped."""
    A, _, near, clipped = _projection_sets(g, axis_vertices)
    verts = sorted(hs[h].vertices)
    if clipped[verts].any():
        return None
    return _diameter(g, A[near[verts].any(axis=0)])


# -- contracting certificates ----------------------------------------------------


@dataclass(frozen=True)
class Crossing:
    hyperplane: int
    position: int  # axis position of the edge's first vertex
    interior: bool


def axis_crossings(g, hs: HyperplaneSet, axis: Axis) -> list[Crossing]:
    """First crossing of each hyperplane along the axis segment."""
    margin = g.radius - g.dist_row(g.root)
    seen = set()
    out = []
    for i, (a, b) in enumerate(zip(axis.vertices, axis.vertices[1:])):
        h = hs.hyperplane_of_edge(a, b)
        if h in seen:
            continue
        seen.add(h)
        out.append(Crossing(h, axis.positions[i], bool(min(margin[a], margin[b]) >= INTERIOR_MARGIN)))
    return out


def strongly_separated(hs: HyperplaneSet, h: int, k: int) -> bool:
    """Disjoint and without common transversal inside the ball."""
    T = hs.transverse_matrix
    return not T[h, k] and hs.common_transversals(h, k)[0] == 0


def _interior_hyperplane(g, hs: HyperplaneSet, h: int) -> bool:
    margin = g.radius - g.dist_row(g.root)
    return any(min(margin[a], margin[b]) >= INTERIOR_MARGIN for a, b in hs[h].edges)


@dataclass
class ContractingCertificate:
    element: Word
    axis: Axis
    radius: int
    verdict: str
    pair: tuple[int, int] | None = None
    pair_positions: tuple[int, int] | None = None
    transversals: int | None = None
    projection_diameters: tuple[int, int] | None = None
    profile: ProjectionProfile | None = None
    chain: tuple[tuple[int, int], ...] = ()  # (hyperplane, sector towards the attracting end)
    chain_verified: bool = False
    pairs_scanned: int = 0

    @property
    def certified(self) -> bool:
        return self.verdict == CERTIFIED

    def summary(self) -> dict:
        fmt = self.axis.cball.system.format_word
        out = {
            "element": fmt(self.element),
            "radius": self.radius,
            "verdict": self.verdict,
            "axis_kind": self.axis.kind,
            "period": self.axis.period,
            "pairs_scanned": self.pairs_scanned,
        }
        if self.pair is not None:
            out.update(
                pair=list(self.pair),
                pair_positions=list(self.pair_positions),
                transversals=self.transversals,
                projection_diameters=list(self.projection_diameters),
                chain_length=len(self.chain),
                chain_verified=self.chain_verified,
            )
        if self.profile is not None:
            out["projection_constant"] = self.profile.constant
            out["vertex_projection_constant"] = self.profile.vertex_constant
            out["geodesic_projection_constant"] = self.profile.geodesic_constant
        return out


def certify_contracting(cball: CayleyBall, h, hs: HyperplaneSet | None = None,
                        axis: Axis | None = None,
                        power_budget: int = DEFAULT_POWER_BUDGET) -> ContractingCertificate:
    """Search the axis for a strongly separated pair of crossed hyperplanes.

    Interior crossings are paired in order of axis span (then closeness to
    the root).  The first strongly separated pair whose hyperplanes have
    unclipped projections onto the axis certifies to the ball radius.  When
    no interior pair is strongly separated and every one is refuted by
    being transverse or by an interior common transversal, the element is
    refuted to this radius.
    """
    g = cball.graph
    hs = hs if hs is not None else build_hyperplanes(g)
    h = _word(cball, h)
    axis = axis if axis is not None else build_axis(cball, h, power_budget)
    R = cball.radius
    cert = ContractingCertificate(h, axis, R, INCONCLUSIVE)
    crossings = [c for c in axis_crossings(g, hs, axis) if c.interior]
    pairs = [(a, b) for i, a in enumerate(crossings) for b in crossings[i + 1:]]
    pairs.sort(key=lambda ab: (ab[1].position - ab[0].position, abs(ab[0].position + ab[1].position)))
    cert.pairs_scanned = len(pairs)
    if not pairs:
        return cert
    T = hs.transverse_matrix
    interior = np.array([_interior_hyperplane(g, hs, k) for k in range(len(hs))], dtype=bool)
    refuted = True
    for a, b in pairs:
        x, y = a.hyperplane, b.hyperplane
        if T[x, y]:
            continue
        common = T[x] & T[y]
        common[[x, y]] = False
        if common.any():
            if not (common & interior).any():
                refuted = False
            continue
        refuted = False
        px = hyperplane_projection(g, hs, x, axis.vertices)
        py = hyperplane_projection(g, hs, y, axis.vertices)
        if px is None or py is None:
            continue
        cert.verdict = CERTIFIED
        cert.pair = (x, y)
        cert.pair_positions = (a.position, b.position)
        cert.transversals = 0
        cert.projection_diameters = (px, py)
        cert.profile = projection_profile(g, axis.vertices)
        cert.chain, cert.chain_verified = _translate_chain(g, hs, axis, a.position, b.position)
        return cert
    if refuted:
        cert.verdict = REFUTED
    return cert


def _translate_chain(g, hs, axis: Axis, p: int, q: int):
    """Largest pairwise strongly separated family among the pair's translates.

    Translates are taken by powers of ``h^period`` whose shift exceeds the
    span of the pair; half-spaces point towards the attracting end.
    """
    shift = axis.translation_shift()
    step = shift * ((q - p) // shift + 1)
    crossing_at = {c.position: c.hyperplane for c in axis_crossings(g, hs, axis) if c.interior}
    lo, hi = axis.positions[0], axis.positions[-1]
    reach = (hi - lo) // step + 1
    positions = sorted({b + t * step for b in (p, q) for t in range(-reach, reach + 1)})
    candidates = [crossing_at[i] for i in positions if i in crossing_at]
    chain = longest_ss_chain(hs, candidates)
    forward = axis.vertices[-1]
    S = hs.sector_matrix
    ok = all(strongly_separated(hs, x, y) for i, x in enumerate(chain) for y in chain[i + 1:])
    return tuple((x, int(S[x, forward])) for x in chain), ok


# -- north-south iteration ----------------------------------------------------


@dataclass
class Trajectory:
    sample: int
    start: int
    repelling: bool
    agreement: list[int]
    last_valid_n: int
    domain_exceeded: bool

    @property
    def monotone(self) -> bool:
        a = self.agreement
        return all(x <= y for x, y in zip(a, a[1:]))

    def first_reaching(self, target: int) -> int | None:
        return next((n for n, a in enumerate(self.agreement) if a >= target), None)


@dataclass
class NSReport:
    element: Word
    radius: int
    r_max: int
    trajectories: list[Trajectory]

    def counted(self) -> list[Trajectory]:
        return [t for t in self.trajectories if not t.repelling]

    @property
    def monotone(self) -> bool:
        return all(t.monotone for t in self.counted())

    def fraction_reaching(self, target: int) -> float:
        c = self.counted()
        return sum(t.first_reaching(target) is not None for t in c) / max(len(c), 1)

    def rows(self):
        for t in self.trajectories:
            for n, a in enumerate(t.agreement):
                yield t.sample, n, a


def agreement_radius(hs: HyperplaneSet, depth: np.ndarray, reliable: np.ndarray,
                     x: int, reference: np.ndarray, r_max: int) -> int:
    """Smallest root distance of a reliable hyperplane on which ``x`` disagrees with ``reference``."""
    bad = reliable & (hs.sector_matrix[:, x] != reference)
    if not bad.any():
        return r_max
    return int(min(depth[bad].min(), r_max))


def hyperplane_depths(g, hs: HyperplaneSet) -> np.ndarray:
    d0 = g.dist_row(g.root)
    return np.array([min(d0[a] for e in hp.edges for a in e) for hp in hs], dtype=np.int64)


def sample_ray_prefixes(cball: CayleyBall, count: int, seed: int, length: int):
    """Seeded geodesic ray prefixes from the root, each step uniform among outward edges."""
    g = cball.graph
    d0 = g.dist_row(g.root)
    nbrs = [[] for _ in range(g.n)]
    for a, b in g.edges:
        if d0[b] == d0[a] + 1:
            nbrs[a].append(b)
        elif d0[a] == d0[b] + 1:
            nbrs[b].append(a)
    rng = np.random.Generator(np.random.Philox(seed))
    out = []
    for _ in range(count):
        path = [g.root]
        for _ in range(min(length, cball.radius)):
            nxt = sorted(nbrs[path[-1]])
            path.append(int(nxt[rng.integers(len(nxt))]))
        out.append(tuple(path))
    return out


def default_sample_length(cball: CayleyBall, g_elem) -> int:
    """Longest prefix whose endpoint stays in the ball under ``g^2``."""
    return max(cball.radius - 2 * len(_word(cball, g_elem)), 0)


def ns_iterate(cball: CayleyBall, g_elem, samples: Sequence, n_max: int,
               hs: HyperplaneSet | None = None, axis: Axis | None = None,
               r_max: int | None = None) -> NSReport:
    """Agreement radii of ``g^n . xi`` with the attracting orientation.

    Samples are ray prefixes from the root (or their endpoints); the
    orientation of ``g^n . xi`` on a hyperplane is the side containing the
    translated endpoint.  The attracting (repelling) orientation is the
    principal orientation of the forward (backward) end of the axis
    segment.  Only reliable hyperplanes are compared.  Samples agreeing with
    the repelling orientation to radius ``R/2`` are flagged.
    """
    g = cball.graph
    hs = hs if hs is not None else build_hyperplanes(g)
    wp = cball.wp
    elem = _word(cball, g_elem)
    axis = axis if axis is not None else build_axis(cball, elem)
    R = cball.radius
    r_max = R // 2 if r_max is None else r_max
    S = hs.sector_matrix
    plus, minus = S[:, axis.vertices[-1]], S[:, axis.vertices[0]]
    depth = hyperplane_depths(g, hs)
    reliable = np.array([hp.reliable for hp in hs], dtype=bool)
    out = []
    for i, s in enumerate(samples):
        v = int(s[-1]) if isinstance(s, (list, tuple)) else int(s)
        word = cball.words[v]
        repelling = agreement_radius(hs, depth, reliable, v, minus, R) >= R / 2
        agreement = []
        last = -1
        x = word
        for n in range(n_max + 1):
            if n:
                x = wp.multiply(elem, x)
            u = cball.vertex_of.get(x)
            if u is None:
                break
            agreement.append(agreement_radius(hs, depth, reliable, u, plus, r_max))
            last = n
        out.append(Trajectory(i, v, bool(repelling), agreement, last, last < n_max))
    return NSReport(elem, R, r_max, out)


def north_south(cball: CayleyBall, g_elem, count: int, n_max: int, seed: int,
                length: int | None = None, hs: HyperplaneSet | None = None,
                axis: Axis | None = None, max_draws: int | None = None) -> NSReport:
    """Iterate ``count`` non-repelling seeded ray prefixes.

    Prefixes are drawn from one seeded stream until ``count`` of them are
    not flagged repelling; the flagged ones stay in the report but are not
    counted.  Draws stop after ``max_draws`` (default ``20 * count``).
    """
    g = cball.graph
    hs = hs if hs is not None else build_hyperplanes(g)
    elem = _word(cball, g_elem)
    axis = axis if axis is not None else build_axis(cball, elem)
    length = default_sample_length(cball, elem) if length is None else length
    max_draws = 20 * count if max_draws is None else max_draws
    samples = sample_ray_prefixes(cball, max_draws, seed, length)
    report = ns_iterate(cball, elem, samples, n_max, hs=hs, axis=axis)
    kept, good = [], 0
    for t in report.trajectories:
        if good == count:
            break
        kept.append(t)
        good += not t.repelling
    report.trajectories = kept
    return report


# -- admissible paths -----------------------------------------------------------


@dataclass
class Segment:
    kind: str  # "p" (along an axis translate) or "q" (connector)
    element: Word
    start: int  # index into the path's vertex list
    end: int
    carrier: tuple[Word, int] | None = None  # (translate g, letter index) for p-segments


@dataclass
class AdmissiblePath:
    L: int
    tau: int
    words: list[Word]  # group elements along the path
    segments: list[Segment]
    projections: list[tuple[int, int]]  # per p-segment: (incoming, outgoing) diameters, -1 if absent
    connectors: list[Word]
    quasi_geodesic: float
    fellow_travel: int

    @property
    def length(self) -> int:
        return len(self.words) - 1

    def long_local(self) -> bool:
        ps = [s for s in self.segments if s.kind == "p"]
        return all(s.end - s.start > self.L for s in ps[1:-1])

    def bounded_projection(self) -> bool:
        return all(d <= self.tau for pair in self.projections for d in pair)


class _Carrier:
    """Positions ``lo..hi`` of the translate ``g . Ax(h)``, with word-metric projections."""

    def __init__(self, wp, g: Word, axis: Axis, lo: int, hi: int):
        self.wp = wp
        self.base = g
        self.lo = lo
        self.words = [wp.multiply(g, axis.word_at(i)) for i in range(lo, hi + 1)]

    def at(self, i: int) -> Word:
        return self.words[i - self.lo]

    def project(self, x: Word) -> list[int]:
        xi = self.wp.inverse(x)
        d = [len(self.wp.multiply(xi, y)) for y in self.words]
        m = min(d)
        return [i for i, v in enumerate(d) if v == m]

    def diameter(self, xs: Sequence[Word]) -> int:
        idx = sorted({i for x in xs for i in self.project(x)})
        if len(idx) < 2:
            return 0
        pts = [self.words[i] for i in idx]
        return max(len(self.wp.multiply(self.wp.inverse(a), b)) for a in pts for b in pts)


def _path_words(wp, start: Word, word: Word) -> list[Word]:
    out = [start]
    x = start
    for s in word:
        x = wp.times_generator(x, s)
        out.append(x)
    return out


def build_admissible_path(cball: CayleyBall, word: Sequence[tuple], candidates: Sequence,
                          L: int, tau: int, axes: dict | None = None,
                          c0: float = 0.0) -> AdmissiblePath:
    """Interleave connectors from ``candidates`` between powers of contracting elements.

    With ``h = v u^(1/n0) v^-1`` from its axis, the letter ``(h, n)`` becomes
    ``v u^(n/n0) v^-1``; the middle part runs along the carrier (a translate
    of ``Ax(h)``) and is the p-segment.  Between letters the connector is
    the geodesic for ``v_i^-1 f v_(i+1)`` with ``f`` the first candidate
    whose connector projects with diameter at most ``tau`` onto both
    neighbouring carriers.  The path still spells ``h_1^n_1 f_1 h_2^n_2 ...``.
    Distances are word lengths, so the construction is not limited to the ball.
    """
    wp = cball.wp
    letters = [(_word(cball, h), int(n)) for h, n in word]
    F = [_word(cball, f) for f in candidates]
    axes = dict(axes or {})
    for h, _ in letters:
        if h not in axes:
            axes[h] = build_axis(cball, h)
    for h, n in letters:
        if n % axes[h].period:
            raise ValueError(
                f"power {n} of {cball.system.format_word(h)} is not a multiple of its axis period"
            )
    words: list[Word] = [()]
    segments: list[Segment] = []
    connectors: list[Word] = []
    carriers: list[_Carrier] = []
    margin = max([len(f) for f in F] + [0]) + tau + 4
    pos: Word = ()

    def carrier_for(g, ax, n):
        span = n // ax.period * len(ax.unit)
        return _Carrier(wp, g, ax, -margin - len(ax.conj), span + margin + len(ax.conj)), span

    def add(kind, element, path, carrier=None):
        segments.append(Segment(kind, element, len(words) - 1, len(words) - 2 + len(path), carrier))
        words.extend(path[1:])

    for idx, (h, n) in enumerate(letters):
        ax = axes[h]
        if idx == 0:
            carrier, span = carrier_for((), ax, n)
            if ax.conj:
                add("q", ax.conj, _path_words(wp, (), ax.conj))
        else:
            prev_ax = axes[letters[idx - 1][0]]
            chosen = None
            for f in F:
                g = wp.multiply(wp.multiply(pos, wp.inverse(prev_ax.conj)), f)
                c = wp.multiply(wp.multiply(wp.inverse(pos), g), ax.conj)
                q = _path_words(wp, pos, c)
                nxt, span = carrier_for(g, ax, n)
                if carriers[-1].diameter(q) <= tau and nxt.diameter(q) <= tau:
                    chosen = (f, c, q, nxt)
                    break
            if chosen is None:
                raise AllCandidatesRejected(
                    f"no connector satisfies bounded projection {tau} after letter {idx - 1}"
                )
            f, c, q, carrier = chosen
            connectors.append(f)
            add("q", c, q)
        p = [carrier.at(i) for i in range(0, span + 1)]
        add("p", h, p, (carrier.base, idx))
        carriers.append(carrier)
        pos = p[-1]
    if letters and axes[letters[-1][0]].conj:
        tail = wp.inverse(axes[letters[-1][0]].conj)
        add("q", tail, _path_words(wp, pos, tail))
    projections = []
    pi = 0
    for si, seg in enumerate(segments):
        if seg.kind != "p":
            continue
        carrier = carriers[pi]
        pi += 1
        inc = out = -1
        if si > 0:
            s_ = segments[si - 1]
            inc = carrier.diameter(words[s_.start:s_.end + 1])
        if si + 1 < len(segments):
            s_ = segments[si + 1]
            out = carrier.diameter(words[s_.start:s_.end + 1])
        projections.append((inc, out))
    ratio = 1.0
    for t in range(1, len(words)):
        d = len(words[t])
        ratio = max(ratio, float("inf") if d == 0 else (t + c0) / d)
    fellow = _fellow_travel(wp, words) if len(words) > 1 else 0
    return AdmissiblePath(L, tau, words, segments, projections, connectors, ratio, fellow)


def _fellow_travel(wp, words: list[Word]) -> int:
    """Hausdorff distance between the path and the ShortLex geodesic to its endpoint."""
    geo = _path_words(wp, (), words[-1])
    inv = [wp.inverse(x) for x in words]
    D = np.array([[len(wp.multiply(a, y)) for y in geo] for a in inv], dtype=np.int64)
    return int(max(D.min(axis=1).max(), D.min(axis=0).max()))


# -- independence evidence --------------------------------------------------------


def axis_overlap(g, A: Sequence[int], B: Sequence[int], R: int = 0) -> int:
    """Diameter of ``N_R(A)`` intersected with ``B`` (0 when empty)."""
    near = g.dist[np.ix_(np.asarray(B), np.asarray(A))].min(axis=1) <= R
    pts = np.asarray(B)[near]
    return _diameter(g, pts) if len(pts) else 0


def longest_ss_chain(hs: HyperplaneSet, candidates: Sequence[int]) -> list[int]:
    """Largest family of pairwise strongly separated hyperplanes among ``candidates``."""
    G = nx.Graph()
    G.add_nodes_from(candidates)
    for i, x in enumerate(candidates):
        for y in candidates[i + 1:]:
            if strongly_separated(hs, x, y):
                G.add_edge(x, y)
    if not candidates:
        return []
    clique, _ = nx.max_weight_clique(G, weight=None)
    order = {h: i for i, h in enumerate(candidates)}
    return sorted(clique, key=order.get)
