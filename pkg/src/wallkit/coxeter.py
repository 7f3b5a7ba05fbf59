"""Coxeter systems: validation, word problem, Cayley balls, walls and the left action.

The word problem is solved with Tits' braid-move criterion: a word is reduced
iff no word reachable from it by braid moves contains two equal adjacent
letters.  Normal forms are ShortLex minima (generator order = declaration
order) of braid classes of reduced words.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import mpmath
import numpy as np

from .errors import (
    Asymmetric,
    BadDiagonal,
    BadLabel,
    BadSystem,
    BadWord,
    BallTooLarge,
    BraidClosureOverflow,
    PrecisionExhausted,
)
from .exact import (
    QF,
    CycNum,
    CyclotomicField,
    Undecided,
    exact_cos_pi_over,
    inertia,
    interval_inertia,
)
from .graph_core import BallGraph

INF = 0  # label encoding for m_st = infinity
IDENTITY_LABEL = "e"
DEFAULT_CLOSURE_BUDGET = 200_000

Word = tuple[int, ...]


@dataclass(frozen=True)
class CoxeterSystem:
    generators: tuple[str, ...]
    m: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.generators)
        if n == 0:
            raise BadSystem("a Coxeter system needs at least one generator")
        if len(set(self.generators)) != n:
            raise BadSystem("generator names must be distinct")
        for g in self.generators:
            if not g or g == IDENTITY_LABEL or any(c.isspace() or c == "." for c in g):
                raise BadSystem(f"invalid generator name {g!r}")
        if len(self.m) != n or any(len(row) != n for row in self.m):
            raise BadSystem("label matrix must be square with one row per generator")
        for i in range(n):
            if self.m[i][i] != 1:
                raise BadDiagonal(f"m[{i}][{i}] = {self.m[i][i]}, expected 1")
            for j in range(n):
                if self.m[i][j] != self.m[j][i]:
                    raise Asymmetric(f"m[{i}][{j}] != m[{j}][{i}]")
                if i != j and self.m[i][j] != INF and self.m[i][j] < 2:
                    raise BadLabel(f"m[{i}][{j}] = {self.m[i][j]} must be >= 2 or 0 (infinity)")

    @property
    def rank(self) -> int:
        return len(self.generators)

    def label(self, i: int, j: int) -> float:
        v = self.m[i][j]
        return float("inf") if v == INF else v

    def to_dict(self) -> dict:
        return {"generators": list(self.generators), "m": [list(r) for r in self.m]}

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()

    # -- words ---------------------------------------------------------------

    def parse_word(self, text: str | Sequence) -> Word:
        """Parse ``"stst"``, ``"s t s"``, ``"s.t"`` or ``"e"`` into generator indices."""
        if not isinstance(text, str):
            return tuple(self._letter(x) for x in text)
        text = text.strip()
        if text in ("", IDENTITY_LABEL):
            return ()
        if any(c.isspace() or c == "." for c in text):
            tokens = [t for t in text.replace(".", " ").split() if t]
        elif all(len(g) == 1 for g in self.generators):
            tokens = list(text)
        else:
            tokens = [text]
        return tuple(self._letter(t) for t in tokens)

    def _letter(self, t) -> int:
        if isinstance(t, (int, np.integer)):
            if not 0 <= t < self.rank:
                raise BadWord(f"generator index {t} out of range")
            return int(t)
        try:
            return self.generators.index(t)
        except ValueError:
            raise BadWord(f"unknown generator {t!r}") from None

    def format_word(self, word: Word) -> str:
        if not word:
            return IDENTITY_LABEL
        sep = "" if all(len(g) == 1 for g in self.generators) else "."
        return sep.join(self.generators[i] for i in word)


def parse_system(text: str) -> CoxeterSystem:
    """Parse the JSON system format ``{"generators": [...], "m": [[...]]}`` (0 = infinity)."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BadSystem(f"not valid JSON: {exc}") from None
    if not isinstance(data, dict) or "generators" not in data or "m" not in data:
        raise BadSystem("expected an object with 'generators' and 'm'")
    gens, m = data["generators"], data["m"]
    if not isinstance(gens, list) or not all(isinstance(g, str) for g in gens):
        raise BadSystem("'generators' must be a list of names")
    if not isinstance(m, list) or not all(isinstance(r, list) for r in m):
        raise BadSystem("'m' must be a matrix")
    try:
        rows = tuple(tuple(int(x) for x in r) for r in m)
    except (TypeError, ValueError):
        raise BadSystem("labels must be integers") from None
    if any(int(x) != x for r in m for x in r):
        raise BadSystem("labels must be integers")
    return CoxeterSystem(tuple(gens), rows)


def load_system(path) -> CoxeterSystem:
    with open(path, encoding="utf-8") as fh:
        return parse_system(fh.read())


def system_from_labels(generators: Sequence[str], labels: dict) -> CoxeterSystem:
    """Build from off-diagonal labels ``{(s, t): m}``; unspecified pairs commute."""
    n = len(generators)
    m = [[1 if i == j else 2 for j in range(n)] for i in range(n)]
    for (s, t), v in labels.items():
        i, j = generators.index(s), generators.index(t)
        m[i][j] = m[j][i] = INF if v in (0, float("inf")) else int(v)
    return CoxeterSystem(tuple(generators), tuple(map(tuple, m)))


def infinite_dihedral() -> CoxeterSystem:
    return system_from_labels(["s", "t"], {("s", "t"): INF})


def dihedral(m: int) -> CoxeterSystem:
    return system_from_labels(["a", "b"], {("a", "b"): m})


def triangle(p: int, q: int, r: int) -> CoxeterSystem:
    """Triangle group with m_ab = p, m_bc = q, m_ca = r."""
    return system_from_labels(["a", "b", "c"], {("a", "b"): p, ("b", "c"): q, ("c", "a"): r})


def type_a(n: int) -> CoxeterSystem:
    gens = [f"s{i}" for i in range(1, n + 1)]
    return system_from_labels(gens, {(gens[i], gens[i + 1]): 3 for i in range(n - 1)})


def type_b3() -> CoxeterSystem:
    return system_from_labels(["a", "b", "c"], {("a", "b"): 4, ("b", "c"): 3})


def affine_a(n: int) -> CoxeterSystem:
    """Affine type A~_n: a cycle of n + 1 generators with labels 3."""
    gens = [f"s{i}" for i in range(n + 1)]
    return system_from_labels(
        gens, {(gens[i], gens[(i + 1) % (n + 1)]): 3 for i in range(n + 1)}
    )


def racg(vertices: Sequence[str], edges: Iterable[tuple[str, str]]) -> CoxeterSystem:
    """Right-angled Coxeter group of a simple graph: adjacent commute, others free."""
    adjacent = {frozenset(e) for e in edges}
    labels = {}
    for i, s in enumerate(vertices):
        for t in vertices[i + 1:]:
            labels[(s, t)] = 2 if frozenset((s, t)) in adjacent else INF
    return system_from_labels(list(vertices), labels)


def coxeter_diagram_components(system: CoxeterSystem) -> list[list[int]]:
    """Connected components of the diagram (edges where m_st >= 3 or infinity)."""
    n = system.rank
    seen = [False] * n
    comps = []
    for s in range(n):
        if seen[s]:
            continue
        stack, comp = [s], []
        seen[s] = True
        while stack:
            u = stack.pop()
            comp.append(u)
            for v in range(n):
                if not seen[v] and v != u and system.m[u][v] != 2:
                    seen[v] = True
                    stack.append(v)
        comps.append(sorted(comp))
    return comps


class _BraidClass:
    __slots__ = ("words", "nf", "descents")

    def __init__(self, words: frozenset):
        self.words = words
        self.nf = min(words)
        self.descents = frozenset(w[-1] for w in words if w)


class WordProblem:
    """Normal forms for one Coxeter system, memoised by braid class.

    The memo is a plain dict; concurrent writers can only ever store equal
    values for the same key, so last-writer-wins is harmless.
    """

    def __init__(self, system: CoxeterSystem, closure_budget: int = DEFAULT_CLOSURE_BUDGET):
        self.system = system
        self.closure_budget = closure_budget
        self._class: dict[Word, _BraidClass] = {}
        n = system.rank
        self._moves: dict[tuple[int, int], tuple[Word, Word, int]] = {}
        for a in range(n):
            for b in range(n):
                k = system.m[a][b]
                if a != b and k != INF:
                    alt = tuple(a if i % 2 == 0 else b for i in range(k))
                    other = tuple(b if i % 2 == 0 else a for i in range(k))
                    self._moves[(a, b)] = (alt, other, k)

    def braid_neighbours(self, w: Word):
        for i in range(len(w) - 1):
            mv = self._moves.get((w[i], w[i + 1]))
            if mv is None:
                continue
            alt, other, k = mv
            if w[i:i + k] == alt:
                yield w[:i] + other + w[i + k:]

    def braid_closure(self, w: Word, stop_on_square: bool = False):
        """All words reachable by braid moves.

        With ``stop_on_square`` the search returns ``(closure, i, word)`` as
        soon as a word with equal letters at ``i, i+1`` appears.
        """
        seen = {w}
        queue = [w]
        while queue:
            u = queue.pop()
            if stop_on_square:
                for i in range(len(u) - 1):
                    if u[i] == u[i + 1]:
                        return seen, i, u
            for v in self.braid_neighbours(u):
                if v not in seen:
                    seen.add(v)
                    if len(seen) > self.closure_budget:
                        raise BraidClosureOverflow(
                            f"braid closure exceeded budget {self.closure_budget} "
                            f"at word length {len(w)}"
                        )
                    queue.append(v)
        return (seen, None, None) if stop_on_square else seen

    def _class_of_reduced(self, w: Word) -> _BraidClass:
        c = self._class.get(w)
        if c is None:
            c = _BraidClass(frozenset(self.braid_closure(w)))
            for u in c.words:
                self._class[u] = c
        return c

    def times_generator(self, w: Word, s: int) -> Word:
        """Normal form of ``w s`` for a reduced word ``w``."""
        c = self._class_of_reduced(w)
        if s in c.descents:
            u = next(u for u in sorted(c.words) if u[-1] == s)
            return self._class_of_reduced(u[:-1]).nf
        return self._class_of_reduced(c.nf + (s,)).nf

    def normal_form(self, word: Sequence[int]) -> Word:
        w: Word = ()
        for s in word:
            w = self.times_generator(w, s)
        return w

    def multiply(self, u: Sequence[int], v: Sequence[int]) -> Word:
        w = self.normal_form(u)
        for s in v:
            w = self.times_generator(w, s)
        return w

    def inverse(self, w: Sequence[int]) -> Word:
        return self.normal_form(tuple(reversed(w)))

    def length(self, word: Sequence[int]) -> int:
        return len(self.normal_form(word))

    def reduced_words(self, word: Sequence[int]) -> frozenset:
        return self._class_of_reduced(self.normal_form(word)).words

    def right_descents(self, word: Sequence[int]) -> frozenset:
        return self._class_of_reduced(self.normal_form(word)).descents

    def reduce_by_closure(self, word: Sequence[int]) -> Word:
        """Direct Tits reduction, without memo: delete squares until none are reachable."""
        w = tuple(word)
        while True:
            seen, i, u = self.braid_closure(w, stop_on_square=True)
            if i is None:
                return min(seen)
            w = u[:i] + u[i + 2:]

    def power(self, word: Sequence[int], k: int) -> Word:
        base = self.normal_form(word) if k >= 0 else self.inverse(word)
        w: Word = ()
        for _ in range(abs(k)):
            w = self.multiply(w, base)
        return w


_word_problems: dict[CoxeterSystem, WordProblem] = {}


def word_problem(system: CoxeterSystem) -> WordProblem:
    """Shared memoised solver for ``system``."""
    wp = _word_problems.get(system)
    if wp is None:
        wp = _word_problems[system] = WordProblem(system)
    return wp


def normal_form(system: CoxeterSystem, word) -> Word:
    if isinstance(word, str):
        word = system.parse_word(word)
    return word_problem(system).normal_form(word)


@dataclass
class CayleyBall:
    """A Cayley-graph ball together with its element <-> vertex correspondence."""

    system: CoxeterSystem
    graph: BallGraph
    words: list[Word]
    vertex_of: dict[Word, int] = field(repr=False)

    @property
    def radius(self) -> int:
        return self.graph.radius

    @property
    def wp(self) -> WordProblem:
        return word_problem(self.system)

    def vertex(self, word) -> int | None:
        """Vertex index of the element ``word`` (any spelling), or None outside the ball."""
        if isinstance(word, str):
            word = self.system.parse_word(word)
        w = self.wp.normal_form(word)
        return self.vertex_of.get(w)

    def label(self, v: int) -> str:
        return self.graph.labels[v]

    def path_of(self, word) -> tuple[int, ...]:
        """Vertices visited by reading ``word`` from the root (must stay in the ball)."""
        if isinstance(word, str):
            word = self.system.parse_word(word)
        w: Word = ()
        path = [self.graph.root]
        for s in word:
            w = self.wp.times_generator(w, s)
            v = self.vertex_of.get(w)
            if v is None:
                raise BallTooLarge(f"path leaves the ball of radius {self.radius}")
            path.append(v)
        return tuple(path)

    def edge_reflection(self, u: int, v: int) -> Word:
        """Reflection ``w s w^-1`` swapping the endpoints of the edge ``[w, ws]``."""
        w, x = self.words[u], self.words[v]
        if len(x) < len(w):
            w, x = x, w
        wp = self.wp
        s = wp.multiply(wp.inverse(w), x)
        if len(s) != 1:
            raise ValueError("not an edge of the Cayley graph")
        return wp.multiply(wp.multiply(w, s), tuple(reversed(w)))


def cayley_ball(
    system: CoxeterSystem, radius: int, max_vertices: int = 200_000
) -> CayleyBall:
    """All elements of length <= ``radius``; vertices in breadth-first insertion order."""
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    wp = word_problem(system)
    words: list[Word] = [()]
    vertex_of: dict[Word, int] = {(): 0}
    edges = []
    frontier = [0]
    for level in range(radius):
        nxt = []
        for v in frontier:
            w = words[v]
            desc = wp.right_descents(w)
            for s in range(system.rank):
                if s in desc:
                    continue
                ws = wp.times_generator(w, s)
                u = vertex_of.get(ws)
                if u is None:
                    u = len(words)
                    if u >= max_vertices:
                        raise BallTooLarge(
                            f"ball of radius {radius} exceeds {max_vertices} vertices"
                        )
                    words.append(ws)
                    vertex_of[ws] = u
                    nxt.append(u)
                edges.append((v, u))
        frontier = nxt
    labels = [system.format_word(w) for w in words]
    graph = BallGraph(
        labels, edges, root=0, radius=radius, metric=_word_metric(wp, words, vertex_of)
    )
    return CayleyBall(system, graph, words, vertex_of)


def _word_metric(wp: WordProblem, words: list[Word], vertex_of) -> np.ndarray:
    """Ambient distances ``l(u^-1 v)``, filled row by row along the ball's spanning tree."""
    n = len(words)
    parent = [(vertex_of[w[:-1]], w[-1]) if w else (0, -1) for w in words]
    table = np.zeros((n, n), dtype=np.int64)
    for u in range(n):
        row: list[Word] = [()] * n
        row[0] = wp.inverse(words[u])
        table[u, 0] = len(row[0])
        for v in range(1, n):
            p, s = parent[v]
            row[v] = wp.times_generator(row[p], s)
            table[u, v] = len(row[v])
    return table


def inversion_set(system: CoxeterSystem, word) -> frozenset:
    """Reflections ``w_{i-1} s_i w_{i-1}^-1`` of the walls crossed along the normal form."""
    wp = word_problem(system)
    w = normal_form(system, word)
    refl = set()
    for i, s in enumerate(w):
        prefix = w[:i]
        refl.add(wp.multiply(prefix + (s,), tuple(reversed(prefix))))
    return frozenset(refl)


def act(system: CoxeterSystem, g, ball: CayleyBall) -> np.ndarray:
    """Left multiplication by ``g`` as a partial vertex map (-1 where the image leaves the ball)."""
    wp = word_problem(system)
    g = normal_form(system, g)
    image = np.full(ball.graph.n, -1, dtype=np.int64)
    for v, w in enumerate(ball.words):
        if len(w) - len(g) > ball.radius:
            continue
        u = ball.vertex_of.get(wp.multiply(g, w))
        if u is not None:
            image[v] = u
    return image


SPHERICAL = "Spherical"
AFFINE = "Affine"
OTHER_TYPE = "Other"


@dataclass(frozen=True)
class ComponentType:
    generators: tuple[str, ...]
    verdict: str
    inertia: tuple[int, int, int]
    method: str  # "exact", "cyclotomic" or "interval"


@dataclass(frozen=True)
class TypeVerdict:
    components: tuple[ComponentType, ...]

    @property
    def irreducible(self) -> bool:
        return len(self.components) == 1

    def to_dict(self) -> dict:
        return {
            "irreducible": self.irreducible,
            "components": [
                {"generators": list(c.generators), "verdict": c.verdict,
                 "inertia": list(c.inertia), "method": c.method}
                for c in self.components
            ],
        }


def _verdict(inertia: tuple[int, int, int]) -> str:
    pos, neg, zero = inertia
    if neg == 0 and zero == 0:
        return SPHERICAL
    if neg == 0:
        return AFFINE
    return OTHER_TYPE


def gram_exact(system: CoxeterSystem, comp: Sequence[int]):
    """Gram matrix ``-cos(pi/m)`` over Q(sqrt2, sqrt3, sqrt5), or None if a label leaves it."""
    rows = []
    for i in comp:
        row = []
        for j in comp:
            m = system.m[i][j]
            if m == INF:
                row.append(QF.rational(-1))
                continue
            c = exact_cos_pi_over(m)
            if c is None:
                return None
            row.append(-c)
        rows.append(row)
    return rows


def gram_cyclotomic(system: CoxeterSystem, comp: Sequence[int]):
    """Gram matrix over Q(2 cos(pi / N)), N the lcm of the finite labels."""
    N = _labels_lcm(system, comp)
    F = CyclotomicField(max(2 * N, 3))
    rows = []
    for i in comp:
        row = []
        for j in comp:
            m = system.m[i][j]
            row.append(F.rational(-1) if m == INF else -F.cos_pi_over(m))
        rows.append(row)
    return rows


# Above this field degree the exact route is replaced by certified intervals.
MAX_CYCLOTOMIC_DEGREE = 96


def _interval_component(system, comp, names):
    def entries(prec):
        mat = []
        for i in comp:
            row = []
            for j in comp:
                m = system.m[i][j]
                row.append(mpmath.iv.mpf(-1) if m == INF else -mpmath.iv.cos(mpmath.iv.pi / m))
            mat.append(row)
        return mat

    try:
        return interval_inertia(entries, len(comp))
    except Undecided as exc:
        raise PrecisionExhausted(f"component {names}: {exc}; verdict undecided") from None


def _labels_lcm(system, comp) -> int:
    N = 1
    for i in comp:
        for j in comp:
            m = system.m[i][j]
            if m != INF and m > 1:
                N = math.lcm(N, m)
    return N


def classify_type(system: CoxeterSystem, method: str = "exact") -> TypeVerdict:
    """Spherical / Affine / Other verdict per irreducible component.

    With ``method="exact"`` components with labels in {2,3,4,5,6,inf} are
    decided in Q(sqrt2, sqrt3, sqrt5) and the rest in the real cyclotomic
    field generated by 2 cos(pi / N); both routes are exact.  Fields of
    degree above ``MAX_CYCLOTOMIC_DEGREE`` fall back to certified interval
    elimination, as does ``method="interval"`` everywhere.
    """
    if method not in ("exact", "interval"):
        raise ValueError(f"unknown method {method!r}")
    out = []
    for comp in coxeter_diagram_components(system):
        names = tuple(system.generators[i] for i in comp)
        if method == "exact":
            G = gram_exact(system, comp)
            if G is not None:
                inert = inertia(G, QF.is_zero, QF.sign)
                out.append(ComponentType(names, _verdict(inert), inert, "exact"))
                continue
            N = _labels_lcm(system, comp)
            if sum(1 for k in range(1, 2 * N) if math.gcd(k, 2 * N) == 1) // 2 <= MAX_CYCLOTOMIC_DEGREE:
                G = gram_cyclotomic(system, comp)
                try:
                    inert = inertia(G, CycNum.is_zero, CycNum.sign)
                except Undecided as exc:
                    raise PrecisionExhausted(f"component {names}: {exc}") from None
                out.append(ComponentType(names, _verdict(inert), inert, "cyclotomic"))
                continue
        inert = _interval_component(system, comp, names)
        out.append(ComponentType(names, _verdict(inert), inert, "interval"))
    return TypeVerdict(tuple(out))
