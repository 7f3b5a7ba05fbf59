import itertools
import json
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wallkit import fixtures
from wallkit.coxeter import (
    AFFINE,
    INF,
    OTHER_TYPE,
    SPHERICAL,
    act,
    affine_a,
    cayley_ball,
    classify_type,
    dihedral,
    gram_cyclotomic,
    gram_exact,
    infinite_dihedral,
    inversion_set,
    normal_form,
    parse_system,
    triangle,
    type_a,
    type_b3,
    word_problem,
)
from wallkit.errors import Asymmetric, BadDiagonal, BadLabel, BadSystem, BadWord, BallTooLarge
from wallkit.exact import CycNum, inertia
from wallkit.walls import build_hyperplanes

@pytest.fixture(autouse=True)
def _precision():
    with mpmath.workdps(50):
        yield


# -- independent oracle: the geometric representation --------------------------------
#
# s acts on R^n by v -> v - 2 B(e_s, v) e_s with B(e_s, e_t) = -cos(pi / m_st)
# (-1 for infinity).  It is faithful, so two words are the same element iff
# their matrices agree; breadth-first search over matrices gives word lengths.


def reflection_matrices(system):
    n = system.rank
    B = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            m = system.m[i][j]
            B[i, j] = -1.0 if m == INF else -math.cos(math.pi / m)
    mats = []
    for s in range(n):
        M = np.eye(n)
        M[s, :] -= 2 * B[s, :]
        mats.append(M)
    return mats


def word_matrix(mats, word):
    M = np.eye(len(mats))
    for s in word:
        M = M @ mats[s]
    return M


def _key(M):
    return tuple(np.round(M, 6).ravel().tolist())


def matrix_ball_sizes(system, radius):
    """Sphere sizes of the Cayley graph by BFS over matrices."""
    mats = reflection_matrices(system)
    seen = {_key(np.eye(system.rank))}
    frontier = [np.eye(system.rank)]
    sizes = [1]
    for _ in range(radius):
        nxt = []
        for M in frontier:
            for S in mats:
                N = M @ S
                k = _key(N)
                if k not in seen:
                    seen.add(k)
                    nxt.append(N)
        frontier = nxt
        sizes.append(len(nxt))
    return sizes


def gram_fraction(system):
    """Gram matrix over Q, for labels with rational cosines (2, 3, infinity)."""
    half = {2: Fraction(0), 3: Fraction(-1, 2), INF: Fraction(-1), 1: Fraction(1)}
    return [[half[system.m[i][j]] for j in range(system.rank)] for i in range(system.rank)]


def fraction_det(A):
    A = [row[:] for row in A]
    n = len(A)
    det = Fraction(1)
    for k in range(n):
        p = next((i for i in range(k, n) if A[i][k] != 0), None)
        if p is None:
            return Fraction(0)
        if p != k:
            A[k], A[p] = A[p], A[k]
            det = -det
        det *= A[k][k]
        for i in range(k + 1, n):
            f = A[i][k] / A[k][k]
            for j in range(k, n):
                A[i][j] -= f * A[k][j]
    return det


def leading_minors(A):
    return [fraction_det([row[:k] for row in A[:k]]) for k in range(1, len(A) + 1)]


# -- parsing ----------------------------------------------------------------------------


def test_parse_system_examples():
    d = parse_system('{"generators": ["s", "t"], "m": [[1, 0], [0, 1]]}')
    assert d == infinite_dihedral()
    with pytest.raises(BadDiagonal):
        parse_system('{"generators": ["s", "t"], "m": [[2, 0], [0, 1]]}')
    with pytest.raises(Asymmetric):
        parse_system('{"generators": ["s", "t"], "m": [[1, 3], [4, 1]]}')
    with pytest.raises(BadLabel):
        parse_system('{"generators": ["s", "t"], "m": [[1, 1], [1, 1]]}')
    t = parse_system(json.dumps({"generators": ["a", "b", "c"],
                                 "m": [[1, 2, 7], [2, 1, 3], [7, 3, 1]]}))
    assert t == triangle(2, 3, 7)
    for bad in ("not json", "[]", '{"generators": ["a"]}', '{"generators": [1], "m": [[1]]}'):
        with pytest.raises(BadSystem):
            parse_system(bad)


def test_system_digest_and_words():
    t = triangle(2, 3, 7)
    assert t.digest() == parse_system(json.dumps(t.to_dict())).digest()
    assert t.digest() != triangle(2, 3, 8).digest()
    assert t.parse_word("a b c") == t.parse_word("abc") == (0, 1, 2)
    assert t.format_word(()) == "e" and t.parse_word("e") == ()
    with pytest.raises(BadWord):
        t.parse_word("abx")


# -- classification -----------------------------------------------------------------------


def test_classification_a3_rational_oracle():
    A3 = type_a(3)
    minors = leading_minors(gram_fraction(A3))
    assert all(m > 0 for m in minors)  # Sylvester
    v = classify_type(A3)
    assert v.irreducible and v.components[0].verdict == SPHERICAL
    assert v.components[0].method == "exact"


def test_classification_affine_rational_oracle():
    for system in (triangle(3, 3, 3), affine_a(3), infinite_dihedral()):
        G = gram_fraction(system)
        minors = leading_minors(G)
        assert minors[-1] == 0 and all(m > 0 for m in minors[:-1])
        v = classify_type(system)
        assert v.components[0].verdict == AFFINE
        assert v.components[0].inertia[2] == 1


def test_classification_b3_and_237_numeric_oracle():
    for system, expected in ((type_b3(), SPHERICAL), (triangle(2, 3, 7), OTHER_TYPE)):
        n = system.rank
        G = mpmath.matrix(n, n)
        for i in range(n):
            for j in range(n):
                G[i, j] = -mpmath.cos(mpmath.pi / system.m[i][j])
        eig = mpmath.eigsy(G)[0]
        negative = sum(1 for e in eig if e < -mpmath.mpf("1e-30"))
        v = classify_type(system).components[0]
        assert v.verdict == expected
        assert v.inertia[1] == negative
    assert classify_type(triangle(2, 3, 7)).components[0].method == "cyclotomic"


def test_reducible_grid():
    v = classify_type(fixtures.system("grid"))
    assert not v.irreducible
    assert [c.verdict for c in v.components] == [AFFINE, AFFINE]


def test_interval_route_agrees_on_nondegenerate_cases():
    for system in (type_a(3), type_b3(), triangle(2, 3, 7), fixtures.system("racg_p4")):
        a = classify_type(system)
        b = classify_type(system, method="interval")
        assert [c.inertia for c in a.components] == [c.inertia for c in b.components]


@pytest.mark.parametrize("pqr", [(2, 3, 6), (2, 4, 4), (3, 3, 3), (2, 3, 5), (2, 4, 5), (3, 4, 5)])
def test_cyclotomic_route_agrees_with_quadratic_route(pqr):
    system = triangle(*pqr)
    comp = [0, 1, 2]
    a = inertia(gram_exact(system, comp), lambda x: x.is_zero(), lambda x: x.sign())
    b = inertia(gram_cyclotomic(system, comp), CycNum.is_zero, CycNum.sign)
    assert a == b


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 12), st.integers(2, 12), st.integers(2, 12))
def test_triangle_classification_matches_angle_sum(p, q, r):
    """Triangle groups: 1/p + 1/q + 1/r > 1, = 1, < 1 give Spherical, Affine, Other."""
    total = Fraction(1, p) + Fraction(1, q) + Fraction(1, r)
    expected = SPHERICAL if total > 1 else AFFINE if total == 1 else OTHER_TYPE
    v = classify_type(triangle(p, q, r))
    assert v.irreducible or 2 in (p, q, r)
    if v.irreducible:
        assert v.components[0].verdict == expected


# -- word problem -------------------------------------------------------------------------


def test_normal_form_examples():
    A2 = dihedral(3)
    assert normal_form(A2, "aa") == ()
    assert normal_form(A2, "bab") == A2.parse_word("aba")
    A1A1 = dihedral(2)
    assert normal_form(A1A1, "abab") == ()
    mats = reflection_matrices(A1A1)
    assert np.allclose(word_matrix(mats, A1A1.parse_word("abab")), np.eye(2))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["a3", "b3", "tri237", "tri333", "grid", "racg_p4", "affine_a3"]),
       st.lists(st.integers(0, 3), max_size=9))
def test_normal_form_matches_geometric_representation(name, raw):
    system = fixtures.system(name)
    word = tuple(s % system.rank for s in raw)
    nf = normal_form(system, word)
    mats = reflection_matrices(system)
    assert np.allclose(word_matrix(mats, word), word_matrix(mats, nf), atol=1e-8)
    assert normal_form(system, nf) == nf
    assert len(nf) <= len(word) and (len(word) - len(nf)) % 2 == 0
    wp = word_problem(system)
    for s in range(system.rank):
        assert abs(wp.length(nf + (s,)) - len(nf)) == 1


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["b3", "tri237", "racg_p4"]), st.data())
def test_multiplication_is_associative(name, data):
    system = fixtures.system(name)
    wp = word_problem(system)
    words = [tuple(data.draw(st.lists(st.integers(0, system.rank - 1), max_size=5)))
             for _ in range(3)]
    u, v, w = words
    assert wp.multiply(wp.multiply(u, v), w) == wp.multiply(u, wp.multiply(v, w))
    assert wp.multiply(u, wp.inverse(u)) == ()


@pytest.mark.parametrize("name", sorted(fixtures.SYSTEMS))
def test_defining_relations(name):
    system = fixtures.system(name)
    for s, t in itertools.combinations(range(system.rank), 2):
        m = system.m[s][t]
        if m != INF:
            assert normal_form(system, (s, t) * m) == ()
            assert normal_form(system, (s, t) * (m - 1)) != ()


def test_power():
    system = triangle(2, 3, 7)
    wp = word_problem(system)
    h = system.parse_word("abc")
    assert wp.power(h, 0) == ()
    assert wp.power(h, 2) == wp.multiply(h, h)
    assert wp.power(h, -1) == wp.inverse(h)


# -- Cayley balls ----------------------------------------------------------------------------


def test_cayley_ball_examples():
    for name in fixtures.SYSTEMS:
        b = cayley_ball(fixtures.system(name), 0)
        assert b.graph.n == 1 and b.label(0) == "e"
    d = cayley_ball(infinite_dihedral(), 5)
    assert d.graph.n == 11
    assert sorted(len(a) for a in d.graph.adj) == [1, 1] + [2] * 9
    a2 = cayley_ball(dihedral(3), 3)
    assert a2.graph.n == 6 and len(a2.graph.edges) == 6
    assert all(len(a) == 2 for a in a2.graph.adj)
    with pytest.raises(BallTooLarge):
        cayley_ball(triangle(2, 3, 7), 12, max_vertices=50)


@pytest.mark.parametrize("name,radius", [("a3", 6), ("b3", 9), ("tri237", 8), ("grid", 4),
                                         ("affine_a3", 4), ("racg_p4", 4), ("tri333", 5)])
def test_ball_growth_matches_matrix_bfs(name, radius):
    b = fixtures.ball(name, radius)
    d0 = b.graph.dist_row(b.graph.root)
    sizes = np.bincount(d0, minlength=radius + 1).tolist()
    assert sizes == matrix_ball_sizes(fixtures.system(name), radius)


def test_finite_groups_complete():
    assert fixtures.ball("a3", 6).graph.n == 24
    assert fixtures.ball("b3", 9).graph.n == 48


def test_inversion_set_examples():
    d = infinite_dihedral()
    assert inversion_set(d, "e") == frozenset()
    assert inversion_set(d, "sts") == {d.parse_word(w) for w in ("s", "sts", "ststs")}


@pytest.mark.parametrize("name,radius", [("tri237", 7), ("b3", 9), ("grid", 4)])
def test_inversion_set_size_is_length(name, radius):
    b = fixtures.ball(name, radius)
    for w in b.words:
        assert len(inversion_set(b.system, w)) == len(w)


def test_act_examples():
    d = fixtures.ball("dinf", 6)
    g = d.graph
    ident = act(d.system, "e", d)
    assert np.array_equal(ident, np.arange(g.n))
    image = act(d.system, "st", d)
    coord = [fixtures.line_coordinate(w, 0, 1) for w in d.words]
    for v in range(g.n):
        if g.margin[v] >= 2:
            assert image[v] >= 0
        if image[v] >= 0:
            assert coord[image[v]] == coord[v] + 2


@pytest.mark.parametrize("name,radius,elem", [("tri237", 6, "abc"), ("grid", 4, "ab"),
                                              ("b3", 9, "abc")])
def test_act_is_isometry_on_domain(name, radius, elem):
    b = fixtures.ball(name, radius)
    g = b.graph
    image = act(b.system, elem, b)
    dom = np.flatnonzero(image >= 0)
    D = g.dist
    assert np.array_equal(D[np.ix_(dom, dom)], D[np.ix_(image[dom], image[dom])])


@pytest.mark.parametrize("name,radius", [("tri237", 7), ("b3", 9), ("grid", 4), ("dinf", 6),
                                         ("affine_a3", 4)])
def test_walls_are_reflections(name, radius):
    b = fixtures.ball(name, radius)
    g = b.graph
    hs = build_hyperplanes(g)
    refl_of = []
    for hp in hs:
        rs = {b.edge_reflection(u, v) for u, v in hp.edges}
        assert len(rs) == 1
        r = rs.pop()
        refl_of.append(r)
        image = act(b.system, r, b)
        for u, v in hp.edges:
            assert image[u] in (v, -1) and image[v] in (u, -1)
        if not hp.truncated:
            assert hp.n_sectors == 2
    assert len(set(refl_of)) == len(hs)
    # every reflection crossed by a ball geodesic from the root is a wall
    assert set().union(*(inversion_set(b.system, w) for w in b.words)) == set(refl_of)
