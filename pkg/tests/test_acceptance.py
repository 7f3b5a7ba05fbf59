"""One test per acceptance criterion; each prints a PASS/FAIL line before asserting."""

import itertools
import time
from pathlib import Path

import numpy as np

from wallkit import cli, fixtures
from wallkit.boundary import (
    chain_minimality,
    horofunction_vector,
    ray_orientation,
    safe_mask,
    sup_difference,
    symmetric_difference,
)
from wallkit.coxeter import AFFINE, OTHER_TYPE, SPHERICAL, classify_type
from wallkit.dynamics import (
    CERTIFIED,
    REFUTED,
    certify_contracting,
    north_south,
)
from wallkit.errors import NotParaclique, PrecisionExhausted
from wallkit.order import OrderContext
from wallkit.walls import build_hyperplanes


def report(criterion: int, name: str, ok: bool, detail: str = "") -> None:
    print(f"[acceptance {criterion}] {'PASS' if ok else 'FAIL'}: {name} {detail}".rstrip())
    assert ok, f"criterion {criterion} failed: {detail}"


# 1. geodesic-wall duality


def test_criterion_1_geodesic_wall_duality():
    t0 = time.perf_counter()
    pairs = geodesics = bad = 0
    for name, radius in (("dinf", 10), ("grid", 6), ("tri237", 8)):
        b = fixtures.ball(name, radius)
        g = b.graph
        hs = build_hyperplanes(g)
        S = hs.sector_matrix
        for x, y in itertools.combinations(range(g.n), 2):
            if not g.safe_pair(x, y):
                continue
            pairs += 1
            separating = set(np.flatnonzero(S[:, x] != S[:, y]).tolist())
            bad += len(separating) != g.distance(x, y)
            paths, _ = g.enumerate_geodesics(x, y, limit=64)
            for p in paths:
                geodesics += 1
                crossed = [hs.hyperplane_of_edge(u, v) for u, v in zip(p, p[1:])]
                bad += len(set(crossed)) != len(crossed) or set(crossed) != separating
    elapsed = time.perf_counter() - t0
    report(1, "geodesic-wall duality", bad == 0 and pairs > 0 and elapsed < 30,
           f"pairs={pairs} geodesics={geodesics} mismatches={bad} seconds={elapsed:.1f}")


# 2. paraclique verification


COXETER_FIXTURES = [("dinf", 8), ("a2", 3), ("a3", 6), ("b3", 9), ("affine_a3", 5),
                    ("tri333", 6), ("tri237", 8), ("grid", 5), ("racg_p4", 5)]


def gate_preimage_mismatches(g, hs) -> tuple[int, int]:
    """Recheck, per reliable wall and edge, that sectors equal gate preimages."""
    S = hs.sector_matrix
    checked = bad = 0
    for hp in hs:
        if not hp.reliable:
            continue
        checked += 1
        for a, b in hp.edges:
            gate = np.where(g.dist[:, a] < g.dist[:, b], a, b)
            bad += int((S[hp.id] != S[hp.id, gate]).sum())
    return checked, bad


def test_criterion_2_paraclique_verification():
    lines = []
    ok = True
    for name, radius in COXETER_FIXTURES:
        g = fixtures.ball(name, radius).graph
        hs = build_hyperplanes(g, strict=True)
        checked, bad = gate_preimage_mismatches(g, hs)
        rep = hs.report
        good = (rep.paraclique and not rep.transitivity_violations
                and not rep.sector_failures and checked > 0 and bad == 0)
        ok &= good
        lines.append(f"{name}:{checked}")
    try:
        build_hyperplanes(fixtures.cycle_graph(5), strict=True)
        rejected = False
    except NotParaclique:
        rejected = True
    report(2, "paraclique verification", ok and rejected,
           f"walls checked {' '.join(lines)}; C5 rejected={rejected}")


# 3. order oracle equivalence


def test_criterion_3_order_oracle():
    t0 = time.perf_counter()
    mismatches = pairs = mub_violations = interior = 0
    for name in ("grid", "racg_p4"):
        g = fixtures.ball(name, 5).graph
        ctx = OrderContext(g, quasi_median=True)
        for x, y in itertools.combinations_with_replacement(range(g.n), 2):
            pairs += 1
            mismatches += ctx.meet_gate([x, y]) != ctx.meet_brute_force([x, y])
            ub = ctx.minimal_upper_bounds(x, y)
            if not ub.frontier:
                interior += 1
                mub_violations += len(ub.vertices) > 1
    elapsed = time.perf_counter() - t0
    report(3, "gate meet = brute-force meet, unique interior MUB",
           mismatches == 0 and mub_violations == 0 and elapsed < 60,
           f"pairs={pairs} mismatches={mismatches} interior={interior} "
           f"mub_violations={mub_violations} seconds={elapsed:.1f}")


# 4. classification


def test_criterion_4_classification():
    expected = {"a3": SPHERICAL, "b3": SPHERICAL, "tri333": AFFINE, "affine_a3": AFFINE,
                "tri237": OTHER_TYPE, "dinf": AFFINE}
    got = {}
    exhausted = 0
    for name, verdict in expected.items():
        try:
            v = classify_type(fixtures.system(name))
        except PrecisionExhausted:
            exhausted += 1
            continue
        comp = v.components[0]
        got[name] = (comp.verdict, comp.method) if v.irreducible else ("Reducible", "")
    ok = exhausted == 0 and all(
        got[n][0] == expected[n] and got[n][1] in ("exact", "cyclotomic") for n in expected)
    report(4, "exact classification", ok,
           " ".join(f"{n}={got.get(n)}" for n in expected) + f" exhausted={exhausted}")


# 5. contracting certification contrast


def test_criterion_5_certification_contrast():
    t0 = time.perf_counter()
    tri237 = {r: certify_contracting(fixtures.ball("tri237", r), "abc") for r in (10, 12)}
    c12 = tri237[12]
    hs12 = build_hyperplanes(fixtures.ball("tri237", 12).graph)
    x, y = c12.pair
    transversals = hs12.common_transversals(x, y)
    pair_ok = (c12.verdict == CERTIFIED and c12.radius == 12
               and not hs12.transverse_matrix[x, y] and transversals[0] == 0)
    profile_max = {r: c.profile.constant for r, c in tri237.items()}
    tri333 = certify_contracting(fixtures.ball("tri333", 10), "abc")
    grid = certify_contracting(fixtures.ball("grid", 6), "ac")
    elapsed = time.perf_counter() - t0
    ok = (pair_ok and profile_max[10] == profile_max[12]
          and tri333.verdict == REFUTED and tri333.radius == 10
          and grid.verdict != CERTIFIED and grid.pair is None and elapsed < 300)
    report(5, "certification contrast", ok,
           f"tri237 r12={c12.verdict} pair={c12.pair} transversals={transversals} profile_max={profile_max} "
           f"tri333 r10={tri333.verdict} grid={grid.verdict} seconds={elapsed:.1f}")


# 6. north-south dynamics


def test_criterion_6_north_south():
    t0 = time.perf_counter()
    b = fixtures.ball("tri237", 10)
    assert certify_contracting(b, "abc").verdict == CERTIFIED
    rep = north_south(b, "abc", 50, 6, seed=0)
    counted = rep.counted()
    fraction = rep.fraction_reaching(cli.NS_TARGET_RADIUS)
    monotone = all(t.monotone for t in counted)
    elapsed = time.perf_counter() - t0
    report(6, "north-south dynamics",
           len(counted) == 50 and monotone and fraction >= cli.NS_MIN_FRACTION and elapsed < 120,
           f"samples={len(counted)} repelling_drawn={len(rep.trajectories) - len(counted)} "
           f"monotone={monotone} fraction={fraction:.2f} target={cli.NS_TARGET_RADIUS} "
           f"seconds={elapsed:.1f}")


# 7. finite-difference bridge


def test_criterion_7_finite_difference_bridge():
    checked = violations = 0
    worst = -10**9
    for name, radius in (("dinf", 8), ("grid", 6)):
        b = fixtures.ball(name, radius)
        g = b.graph
        hs = build_hyperplanes(g)
        # every geodesic prefix from the root; prefixes to one endpoint share an orientation
        orient = {}
        for v in range(g.n):
            paths, overflow = g.enumerate_geodesics(g.root, v)
            assert not overflow
            kinds = {ray_orientation(g, hs, p) for p in paths}
            assert len(kinds) == 1
            orient[v] = kinds.pop()
        horo = {v: horofunction_vector(g, v) for v in range(g.n)}
        for x, y in itertools.combinations(range(g.n), 2):
            K = symmetric_difference(orient[x], orient[y])
            sup = sup_difference(horo[x], horo[y], safe_mask(g, [x, y]))
            checked += 1
            worst = max(worst, sup - 2 * K)
            violations += sup > 2 * K
    report(7, "finite-difference bridge", violations == 0,
           f"endpoint pairs={checked} violations={violations} max(sup-2K)={worst}")


# 8. ROSE fixture


def test_criterion_8_rose():
    sym = {}
    chain = None
    for r in (6, 8):
        g = fixtures.rose_ball(r)
        hs = build_hyperplanes(g)
        rays = {k: ray_orientation(g, hs, fixtures.rose_ray(g, k, r))
                for k in ("mid", "top", "bottom", "cross")}
        sym[r] = {f"{a}-{b}": symmetric_difference(rays[a], rays[b])
                  for a, b in itertools.combinations(sorted(rays), 2)}
        if r == 8:
            chain = chain_minimality(g, hs, rays["mid"]).length
    strip = ("bottom-mid", "bottom-top", "mid-top")
    across = ("bottom-cross", "cross-mid", "cross-top")
    ok = (all(sym[6][k] == sym[8][k] for k in strip)
          and all(sym[6][k] < sym[8][k] for k in across) and chain <= 1)
    report(8, "ROSE fixture", ok, f"r6={sym[6]} r8={sym[8]} chain_mid={chain}")


# 9. determinism


def artifacts(root: Path) -> dict:
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*"))
            if p.suffix in (".csv", ".json") and p.name != "runtime.json"}


def test_criterion_9_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main(["suite", "--out", str(a), "--jobs", "4"]) == 0
    assert cli.main(["suite", "--out", str(b), "--jobs", "4"]) == 0
    fa, fb = artifacts(a), artifacts(b)
    differing = sorted(k for k in fa if fa[k] != fb.get(k))
    ok = bool(fa) and fa.keys() == fb.keys() and not differing
    report(9, "determinism of the scenario suite", ok,
           f"scenarios={len(cli.bundled_scenarios())} files={len(fa)} differing={differing}")
