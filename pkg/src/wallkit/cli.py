"""Command line interface: subcommands, scenario runner, artifacts and the ball cache.

Every command computes a list of named text artifacts.  Without ``--out``
the main artifact goes to stdout; with it, all artifacts are written
atomically into the directory together with ``manifest.json`` (inputs
digest, versions, seed, parameters, artifact hashes) and ``runtime.json``
(wall-clock seconds, kept apart so the manifest stays byte-stable).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import platform
import sys
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from . import fixtures
from .boundary import (
    axis_translates,
    chain_minimality,
    myrberg_profile,
    ray_orientation,
    symmetric_difference,
)
from .coxeter import (
    CayleyBall,
    CoxeterSystem,
    cayley_ball,
    classify_type,
    coxeter_diagram_components,
    load_system,
)
from .dynamics import build_admissible_path, build_axis, certify_contracting, north_south
from .errors import EXIT_INTERNAL, EXIT_VALIDATION, WallkitError
from .export import (
    CERT_HEADER,
    ORDER_HEADER,
    ORIENT_HEADER,
    PAIR_HEADER,
    PROFILE_HEADER,
    TRAJ_HEADER,
    certificate_rows,
    check_format,
    pair_rows,
    to_csv,
    to_dot,
    to_json,
)
from .graph_core import BallGraph, format_edge_text, graph_from_dict, graph_to_dict, parse_edge_text
from .order import OrderContext
from .walls import build_hyperplanes

COMMANDS = (
    "ball", "hyperplanes", "pairs", "order", "classify", "certify", "admissible",
    "nsdyn", "myrberg", "fixture-check",
)
# Regression bound for the north-south run: fraction of counted samples that
# must reach this agreement radius.  An implementation bound, not a theorem.
NS_TARGET_RADIUS = 3
NS_MIN_FRACTION = 0.9

GRAPH_FIXTURES = {
    "rose": lambda r: fixtures.rose_ball(8 if r is None else r),
    "c5": lambda r: fixtures.cycle_graph(5),
    "k3": lambda r: fixtures.complete_graph(3),
}


# -- ball cache -------------------------------------------------------------------


def cache_dir() -> Path:
    env = os.environ.get("WALLKIT_CACHE_DIR")
    return Path(env) if env else Path.home() / ".cache" / "wallkit"


def cache_path(system: CoxeterSystem, radius: int) -> Path:
    key = hashlib.sha256(f"{system.digest()}:{radius}:{__version__}".encode()).hexdigest()
    return cache_dir() / f"ball-{key[:32]}.json"


def ball_to_dict(cball: CayleyBall) -> dict:
    data = graph_to_dict(cball.graph)
    data["system"] = cball.system.to_dict()
    data["words"] = [list(w) for w in cball.words]
    data["metric"] = cball.graph.dist.tolist()
    return data


def ball_from_dict(system: CoxeterSystem, data: dict) -> CayleyBall:
    words = [tuple(w) for w in data["words"]]
    g = BallGraph(data["vertices"], [tuple(e) for e in data["edges"]], root=data["root"],
                  radius=data["radius"], metric=np.array(data["metric"], dtype=np.int64))
    return CayleyBall(system, g, words, {w: i for i, w in enumerate(words)})


def write_atomic(path: Path, text: str) -> None:
    """Create-then-rename, so readers never see a partial file."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def cached_ball(system: CoxeterSystem, radius: int, use_cache: bool = True) -> CayleyBall:
    if not use_cache:
        return cayley_ball(system, radius)
    path = cache_path(system, radius)
    if path.exists():
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
            if data.get("system") == system.to_dict() and data.get("radius") == radius:
                return ball_from_dict(system, data)
        except (OSError, ValueError, KeyError):
            pass  # unreadable entries are rebuilt
    cball = cayley_ball(system, radius)
    try:
        write_atomic(path, json.dumps(ball_to_dict(cball), separators=(",", ":")))
    except OSError:
        pass  # the cache is an optimisation only
    return cball


# -- sources ------------------------------------------------------------------------


@dataclass
class Source:
    name: str
    digest: str
    system: CoxeterSystem | None = None
    graph_loader: object = None
    _balls: dict = field(default_factory=dict)

    def cayley(self, radius: int, use_cache: bool = True) -> CayleyBall:
        if self.system is None:
            raise WallkitError("this command needs a Coxeter system (--system or --fixture)")
        if radius not in self._balls:
            self._balls[radius] = cached_ball(self.system, radius, use_cache)
        return self._balls[radius]

    def graph(self, radius: int | None, use_cache: bool = True) -> BallGraph:
        if self.system is not None:
            if radius is None:
                raise WallkitError("--radius is required for Coxeter systems")
            return self.cayley(radius, use_cache).graph
        return self.graph_loader(radius)


def _digest(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True).encode()).hexdigest()


def load_source(args) -> Source:
    if args.system:
        sysm = load_system(args.system)
        return Source(Path(args.system).name, sysm.digest(), system=sysm)
    if args.graph:
        text = Path(args.graph).read_text(encoding="utf-8")
        if args.graph.endswith(".json"):
            data = json.loads(text)

            def loader(r, data=data):
                g = graph_from_dict(data)
                return g if r is None else g.ball(r)
        else:
            def loader(r, text=text):
                return parse_edge_text(text, r)
        return Source(Path(args.graph).name, hashlib.sha256(text.encode()).hexdigest(),
                      graph_loader=loader)
    name = args.fixture
    if name in fixtures.SYSTEMS:
        sysm = fixtures.system(name)
        return Source(name, sysm.digest(), system=sysm)
    if name in GRAPH_FIXTURES:
        return Source(name, _digest({"fixture": name}), graph_loader=GRAPH_FIXTURES[name])
    raise WallkitError(f"unknown fixture {name!r}")


# -- commands -------------------------------------------------------------------------


@dataclass
class Result:
    artifacts: list  # (file name, text); the first one is the main artifact
    summary: dict = field(default_factory=dict)


def _radius(args) -> int | None:
    return None if not args.radius else args.radius[-1]


def _need_radius(args) -> int:
    r = _radius(args)
    if r is None:
        raise WallkitError("--radius is required")
    return r


def wall_families(cball: CayleyBall, hs) -> dict[int, int]:
    """Hyperplane id -> index of the diagram component of its edges' generator."""
    comp_of = {}
    for c, comp in enumerate(coxeter_diagram_components(cball.system)):
        for s in comp:
            comp_of[s] = c
    wp = cball.wp
    out = {}
    for h, hp in enumerate(hs):
        u, v = min(hp.edges)
        s = wp.multiply(wp.inverse(cball.words[u]), cball.words[v])
        out[h] = comp_of[s[0]]
    return out


def cmd_ball(args, src: Source) -> Result:
    g = src.graph(_radius(args), not args.no_cache)
    fmt = check_format(args.format or "json", ("json", "dot", "txt"))
    if fmt == "json":
        text = to_json(graph_to_dict(g))
    elif fmt == "dot":
        text = to_dot(g)
    else:
        text = format_edge_text(g)
    return Result([(f"ball.{fmt}", text)], {"vertices": g.n, "edges": len(g.edges)})


def cmd_hyperplanes(args, src: Source) -> Result:
    g = src.graph(_radius(args), not args.no_cache)
    hs = build_hyperplanes(g)
    fmt = check_format(args.format or "dot", ("dot", "json", "csv"))
    families = None
    if src.system is not None:
        families = wall_families(src.cayley(_radius(args), not args.no_cache), hs)
    rows = [
        {"id": h, "edges": len(hp.edges), "sectors": hp.n_sectors,
         "truncated": hp.truncated, "reliable": hp.reliable,
         **({"family": families[h]} if families else {})}
        for h, hp in enumerate(hs)
    ]
    summary = {"hyperplanes": len(hs), **hs.report.summary()}
    if families:
        summary["families"] = len(set(families.values()))
    if fmt == "dot":
        text = to_dot(g, hs, shade=args.shade, families=families)
    elif fmt == "json":
        text = to_json({"hyperplanes": rows, "report": summary})
    else:
        header = list(rows[0]) if rows else ["id"]
        text = to_csv(header, ([r[k] for k in header] for r in rows))
    return Result([(f"hyperplanes.{fmt}", text)], summary)


def cmd_pairs(args, src: Source) -> Result:
    g = src.graph(_radius(args), not args.no_cache)
    hs = build_hyperplanes(g)
    rows = list(pair_rows(hs))
    fmt = check_format(args.format or "csv", ("csv", "json"))
    if fmt == "csv":
        text = to_csv(PAIR_HEADER, rows)
    else:
        text = to_json([dict(zip(PAIR_HEADER, r)) for r in rows])
    strong = sum(1 for r in rows if r[2] != "Transverse" and r[3] == 0 and not r[4])
    return Result([(f"pairs.{fmt}", text)], {"pairs": len(rows), "strongly_separated": strong})


def cmd_order(args, src: Source) -> Result:
    g = src.graph(_radius(args), not args.no_cache)
    hs = build_hyperplanes(g)
    ctx = OrderContext(g, hs, quasi_median=hs.report.paraclique)
    inner = args.inner if args.inner is not None else g.radius
    rows = list(ctx.relation_rows(inner))
    d0 = g.dist_row(g.root)
    keep = [v for v in range(g.n) if inner is None or d0[v] <= inner]
    agree = total = 0
    mub_max = 0
    for i, x in enumerate(keep):
        for y in keep[i:]:
            total += 1
            agree += ctx.meet_gate([x, y]) == ctx.meet_brute_force([x, y])
            ub = ctx.minimal_upper_bounds(x, y)
            if not ub.frontier:
                mub_max = max(mub_max, len(ub.vertices))
    fmt = check_format(args.format or "csv", ("csv", "json"))
    text = to_csv(ORDER_HEADER, rows) if fmt == "csv" else to_json(
        [dict(zip(ORDER_HEADER, r)) for r in rows])
    summary = {"pairs": total, "meet_agreement": agree, "max_minimal_upper_bounds_interior": mub_max}
    return Result([(f"order.{fmt}", text), ("order_summary.json", to_json(summary))], summary)


def cmd_classify(args, src: Source) -> Result:
    if src.system is None:
        raise WallkitError("classify needs a Coxeter system")
    verdict = classify_type(src.system).to_dict()
    return Result([("classify.json", to_json(verdict))], verdict)


def cmd_certify(args, src: Source) -> Result:
    if not args.element:
        raise WallkitError("--element is required")
    certs = []
    for r in args.radius or []:
        cball = src.cayley(r, not args.no_cache)
        certs.append(certify_contracting(cball, args.element))
    if not certs:
        raise WallkitError("--radius is required")
    summaries = [c.summary() for c in certs]
    csv_text = to_csv(CERT_HEADER, certificate_rows(certs))
    return Result([("certificate.csv", csv_text), ("certificate.json", to_json(summaries))],
                  {"verdicts": {str(c.radius): c.verdict for c in certs}})


def _parse_letters(text: str):
    out = []
    for part in text.split(","):
        w, _, n = part.strip().partition(":")
        out.append((w, int(n or 1)))
    return out


def cmd_admissible(args, src: Source) -> Result:
    cball = src.cayley(_need_radius(args), not args.no_cache)
    if not args.letters:
        raise WallkitError("--letters is required")
    cands = [c.strip() for c in (args.candidates or "").split(",") if c.strip()]
    path = build_admissible_path(cball, _parse_letters(args.letters), cands, args.L, args.tau)
    fmt = cball.system.format_word
    data = {
        "L": path.L, "tau": path.tau, "length": path.length,
        "long_local": path.long_local(), "bounded_projection": path.bounded_projection(),
        "quasi_geodesic": round(path.quasi_geodesic, 9), "fellow_travel": path.fellow_travel,
        "connectors": [fmt(f) for f in path.connectors],
        "projections": [list(p) for p in path.projections],
        "segments": [{"kind": s.kind, "element": fmt(s.element), "start": s.start, "end": s.end}
                     for s in path.segments],
        "vertices": [fmt(w) for w in path.words],
    }
    summary = {k: data[k] for k in ("length", "long_local", "bounded_projection", "fellow_travel")}
    return Result([("admissible.json", to_json(data))], summary)


def cmd_nsdyn(args, src: Source) -> Result:
    cball = src.cayley(_need_radius(args), not args.no_cache)
    if not args.element:
        raise WallkitError("--element is required")
    report = north_south(cball, args.element, args.samples, args.iters, args.seed,
                         length=args.length)
    frac = report.fraction_reaching(NS_TARGET_RADIUS)
    summary = {
        "element": cball.system.format_word(report.element),
        "radius": report.radius,
        "r_max": report.r_max,
        "drawn": len(report.trajectories),
        "counted": len(report.counted()),
        "repelling": sum(t.repelling for t in report.trajectories),
        "domain_exceeded": sum(t.domain_exceeded for t in report.counted()),
        "monotone": report.monotone,
        "target_radius": NS_TARGET_RADIUS,
        "fraction_reaching": frac,
        "threshold": NS_MIN_FRACTION,
        "passes_threshold": frac >= NS_MIN_FRACTION,
    }
    return Result([("trajectories.csv", to_csv(TRAJ_HEADER, report.rows())),
                   ("nsdyn.json", to_json(summary))], summary)


def cmd_myrberg(args, src: Source) -> Result:
    cball = src.cayley(_need_radius(args), not args.no_cache)
    if not args.ray or not args.axes:
        raise WallkitError("--ray and --axes are required")
    g = cball.graph
    hs = build_hyperplanes(g)
    path = cball.path_of(args.ray)
    o = ray_orientation(g, hs, path)
    families = []
    for w in args.axes.split(","):
        families.append(axis_translates(cball, build_axis(cball, w.strip())))
    rows, summary = [], {}
    for R in args.R or [0]:
        r_rows, r_sum = myrberg_profile(g, path, families, R)
        rows += [(r.axis_id, r.translate_id, r.overlap, r.R) for r in r_rows]
        summary[str(R)] = {str(a): v for a, v in r_sum.items()}
    summary = {"orientation_size": len(o), "max_overlap": summary}
    return Result([("profile.csv", to_csv(PROFILE_HEADER, rows)),
                   ("orientation.csv", to_csv(ORIENT_HEADER, o.rows())),
                   ("myrberg.json", to_json(summary))], summary)


def cmd_fixture_check(args, src: Source) -> Result:
    g = src.graph(_radius(args), not args.no_cache)
    hs = build_hyperplanes(g, strict=True)
    sectors = {}
    for hp in hs:
        if not hp.truncated:
            sectors[hp.n_sectors] = sectors.get(hp.n_sectors, 0) + 1
    data = {
        "source": src.name, "vertices": g.n, "edges": len(g.edges),
        "hyperplanes": len(hs), "non_truncated_sector_counts": sectors,
        **hs.report.summary(),
    }
    if src.name == "rose":
        rays = {k: ray_orientation(g, hs, fixtures.rose_ray(g, k, g.radius))
                for k in ("mid", "top", "bottom", "cross")}
        names = sorted(rays)
        data["symmetric_difference"] = {
            f"{a}-{b}": symmetric_difference(rays[a], rays[b])
            for i, a in enumerate(names) for b in names[i + 1:]
        }
        data["chain_minimality_mid"] = chain_minimality(g, hs, rays["mid"]).length
    return Result([("fixture.json", to_json(data))], data)


HANDLERS = {
    "ball": cmd_ball, "hyperplanes": cmd_hyperplanes, "pairs": cmd_pairs,
    "order": cmd_order, "classify": cmd_classify, "certify": cmd_certify,
    "admissible": cmd_admissible, "nsdyn": cmd_nsdyn, "myrberg": cmd_myrberg,
    "fixture-check": cmd_fixture_check,
}


# -- parser ---------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--system", help="Coxeter system JSON file")
    src.add_argument("--graph", help="graph file (edge list, or JSON graph format)")
    src.add_argument("--fixture", help="named fixture: " + ", ".join(
        sorted(fixtures.SYSTEMS) + sorted(GRAPH_FIXTURES)))
    p.add_argument("--radius", type=int, nargs="+", help="ball radius (certify accepts several)")
    p.add_argument("--element", help="group element as a word")
    p.add_argument("--ray", help="ray prefix as a word")
    p.add_argument("--axes", help="comma-separated axis elements")
    p.add_argument("--R", type=int, nargs="+", help="neighbourhood radii for recurrence profiles")
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--iters", type=int, default=6)
    p.add_argument("--length", type=int, help="ray prefix length for nsdyn samples")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--letters", help="admissible word, e.g. 'abc:3,bcabc:3'")
    p.add_argument("--candidates", help="comma-separated connector candidates")
    p.add_argument("--L", type=int, default=6)
    p.add_argument("--tau", type=int, default=4)
    p.add_argument("--inner", type=int, help="order tables over vertices within this radius")
    p.add_argument("--shade", type=int, help="hyperplane whose sectors shade the DOT vertices")
    p.add_argument("--out", help="output directory (a file name for ball)")
    p.add_argument("--format", help="dot, csv, json or txt")
    p.add_argument("--no-cache", action="store_true", help="do not read or write the ball cache")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wallkit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"wallkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        _add_common(sub.add_parser(name))
    run = sub.add_parser("run", help="run scenario files")
    run.add_argument("scenarios", nargs="+")
    run.add_argument("--out", help="override the scenarios' output directories (one subdirectory each)")
    run.add_argument("--jobs", type=int, default=1)
    suite = sub.add_parser("suite", help="run the bundled scenario suite")
    suite.add_argument("--out", required=True)
    suite.add_argument("--jobs", type=int, default=1)
    return parser


# -- manifests and output ---------------------------------------------------------------


def versions() -> dict:
    import mpmath
    import networkx
    import scipy

    return {
        "wallkit": __version__, "python": platform.python_version(),
        "numpy": np.__version__, "scipy": scipy.__version__,
        "networkx": networkx.__version__, "mpmath": mpmath.__version__,
    }


PARAM_KEYS = ("radius", "element", "ray", "axes", "R", "samples", "iters", "length", "seed",
              "letters", "candidates", "L", "tau", "inner", "shade", "format")


def manifest(args, src: Source, result: Result) -> dict:
    params = {k: getattr(args, k) for k in PARAM_KEYS if getattr(args, k, None) is not None}
    m = {
        "command": args.command,
        "source": src.name,
        "inputs_digest": src.digest,
        "versions": versions(),
        "seed": args.seed,
        "params": params,
        "artifacts": {name: hashlib.sha256(text.encode()).hexdigest()
                      for name, text in result.artifacts},
        "summary": result.summary,
    }
    if args.command == "nsdyn":
        m["regression_bound"] = {"target_radius": NS_TARGET_RADIUS, "min_fraction": NS_MIN_FRACTION}
    return m


def execute(args) -> Result:
    src = load_source(args)
    t0 = time.perf_counter()
    result = HANDLERS[args.command](args, src)
    elapsed = time.perf_counter() - t0
    if args.out:
        out = Path(args.out)
        if args.command == "ball" and out.suffix:
            write_atomic(out, result.artifacts[0][1])
        else:
            for name, text in result.artifacts:
                write_atomic(out / name, text)
            write_atomic(out / "manifest.json", to_json(manifest(args, src, result)))
            write_atomic(out / "runtime.json", to_json({"seconds": round(elapsed, 3)}))
    else:
        sys.stdout.write(result.artifacts[0][1])
    return result


def error_record(exc: BaseException) -> tuple[dict, int]:
    if isinstance(exc, WallkitError):
        return exc.record(), exc.exit_code
    if isinstance(exc, (ValueError, KeyError, OSError)):
        return {"code": type(exc).__name__, "module": "cli", "message": str(exc)}, EXIT_VALIDATION
    return {"code": type(exc).__name__, "module": "cli", "message": str(exc)}, EXIT_INTERNAL


# -- scenarios ---------------------------------------------------------------------------


def scenario_argv(scenario: dict, base: Path, out: str | None) -> list[str]:
    """Translate a scenario object into command-line arguments.

    Keys: ``command``; one of ``system`` (path relative to the scenario
    file), ``graph`` or ``fixture``; ``params`` (option name -> value or
    list of values); ``seed``; ``out`` (relative to the scenario file).
    """
    cmd = scenario.get("command")
    if cmd not in COMMANDS:
        raise WallkitError(f"scenario command {cmd!r} not in {', '.join(COMMANDS)}")
    argv = [cmd]
    if "system" in scenario:
        argv += ["--system", str(base / scenario["system"])]
    elif "graph" in scenario:
        argv += ["--graph", str(base / scenario["graph"])]
    elif "fixture" in scenario:
        argv += ["--fixture", scenario["fixture"]]
    else:
        raise WallkitError("scenario needs 'system', 'graph' or 'fixture'")
    for key, value in scenario.get("params", {}).items():
        values = value if isinstance(value, list) else [value]
        if value is True:
            argv.append(f"--{key}")
            continue
        argv += [f"--{key}"] + [str(v) for v in values]
    if "seed" in scenario:
        argv += ["--seed", str(scenario["seed"])]
    target = out if out is not None else scenario.get("out")
    if target is not None:
        argv += ["--out", str(base / target) if out is None else target]
    return argv


def run_scenario(path, out: str | None = None) -> tuple[int, dict | None]:
    """Run one scenario file; returns the exit status and the error record, if any."""
    path = Path(path)
    try:
        scenario = json.loads(path.read_text(encoding="utf-8"))
        argv = scenario_argv(scenario, path.parent, out)
        execute(build_parser().parse_args(argv))
        return 0, None
    except Exception as exc:  # reported as a record, like the command line does
        rec, code = error_record(exc)
        rec["scenario"] = path.name
        return code, rec


def _run_many(items: list[tuple[str, str | None]], jobs: int) -> int:
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_scenario, *zip(*items)))
    else:
        results = [run_scenario(p, o) for p, o in items]
    status = 0
    for code, rec in results:
        if rec is not None:
            sys.stderr.write(json.dumps(rec, sort_keys=True) + "\n")
            status = max(status, code)
    return status


def bundled_scenarios() -> list[Path]:
    """Scenario files shipped with the package (system files alongside are skipped)."""
    root = resources.files("wallkit") / "scenarios"
    out = []
    for p in sorted(Path(str(x)) for x in root.iterdir() if x.name.endswith(".json")):
        if "command" in json.loads(p.read_text(encoding="utf-8")):
            out.append(p)
    return out


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        items = [(p, None if args.out is None else str(Path(args.out) / Path(p).stem))
                 for p in args.scenarios]
        return _run_many(items, args.jobs)
    if args.command == "suite":
        items = [(str(p), str(Path(args.out) / p.stem)) for p in bundled_scenarios()]
        return _run_many(items, args.jobs)
    try:
        execute(args)
    except Exception as exc:
        rec, code = error_record(exc)
        sys.stderr.write(json.dumps(rec, sort_keys=True) + "\n")
        return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
