"""DOT, CSV and JSON writers with stable ordering."""

from __future__ import annotations

import csv
import io
import json
from typing import Iterable, Sequence

import numpy as np

from .errors import UnsupportedFormat
from .graph_core import BallGraph
from .walls import NESTED, TRANSVERSE, HyperplaneSet

FORMATS = ("dot", "csv", "json", "txt")

PALETTE = (
    "red", "blue", "darkgreen", "orange", "purple", "brown",
    "magenta", "cyan4", "gold3", "navy", "olivedrab", "deeppink",
)
SHADES = ("lightblue", "lightpink", "palegreen", "khaki", "plum", "lightsalmon")


def check_format(fmt: str, allowed: Sequence[str] = FORMATS) -> str:
    if fmt not in allowed:
        raise UnsupportedFormat(f"format {fmt!r} not in {', '.join(allowed)}")
    return fmt


def _quote(s) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(g: BallGraph, hs: HyperplaneSet | None = None, shade: int | None = None,
           families: dict | None = None) -> str:
    """Undirected DOT graph.  Edges carry their hyperplane id and a colour;
    ``shade`` fills vertices by sector of that hyperplane.  ``families``
    maps hyperplane ids to integer direction families; when given, edges
    are coloured by family instead of by hyperplane."""
    lines = ["graph G {"]
    for v, lab in enumerate(g.labels):
        attrs = [f"label={_quote(lab)}"]
        if v == g.root:
            attrs.append("shape=doublecircle")
        if shade is not None and hs is not None:
            s = int(hs.sector_matrix[shade, v])
            attrs += ["style=filled", f"fillcolor={SHADES[s % len(SHADES)]}", f"sector={s}"]
        lines.append(f"  {v} [{', '.join(attrs)}];")
    for u, v in g.edges:
        attrs = []
        if hs is not None:
            h = hs.hyperplane_of_edge(u, v)
            colour = h if families is None else families[h]
            attrs += [f"hyperplane={h}", f"color={PALETTE[colour % len(PALETTE)]}"]
            if families is not None:
                attrs.append(f"family={families[h]}")
        tail = f" [{', '.join(attrs)}]" if attrs else ""
        lines.append(f"  {u} -- {v}{tail};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_cell(x) for x in r])
    return buf.getvalue()


def _cell(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, np.integer):
        return int(x)
    return x


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    return obj


def to_json(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, indent=2) + "\n"


def from_json(text: str):
    return json.loads(text)


# -- tables ----------------------------------------------------------------------

PAIR_HEADER = ("h_id", "k_id", "relation", "transversal_count", "lower_bound_only")
ORDER_HEADER = ("x", "y", "leq")
CERT_HEADER = ("radius", "verdict", "h_id", "k_id", "transversals", "proj_diam")
TRAJ_HEADER = ("sample_id", "n", "agreement_radius")
ORIENT_HEADER = ("hyperplane_id", "sector")
PROFILE_HEADER = ("axis_id", "translate_id", "overlap", "R")


def pair_rows(hs: HyperplaneSet):
    T = hs.transverse_matrix
    for h in range(len(hs)):
        for k in range(h + 1, len(hs)):
            count, lower = hs.common_transversals(h, k)
            yield h, k, TRANSVERSE if T[h, k] else NESTED, count, lower


def certificate_rows(certs):
    for c in certs:
        if c.pair is None:
            yield c.radius, c.verdict, "", "", "", ""
        else:
            yield (c.radius, c.verdict, c.pair[0], c.pair[1], c.transversals,
                   max(c.projection_diameters))
