import itertools

import pytest

from wallkit import fixtures
from wallkit.graph_core import BallGraph


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path_factory, monkeypatch):
    """Keep the CLI ball cache out of the user's home directory."""
    monkeypatch.setenv("WALLKIT_CACHE_DIR", str(tmp_path_factory.getbasetemp() / "ball-cache"))


def hamming(q: int, n: int) -> BallGraph:
    """Hamming graph H(n, q): words of length n over q letters, adjacent when they differ once.

    A quasi-median graph whose hyperplanes have q sectors.
    """
    words = list(itertools.product(range(q), repeat=n))
    index = {w: i for i, w in enumerate(words)}
    edges = []
    for w in words:
        for i in range(n):
            for a in range(q):
                if a > w[i]:
                    u = w[:i] + (a,) + w[i + 1:]
                    edges.append((index[w], index[u]))
    return BallGraph(["".join(map(str, w)) for w in words], edges)


def grid_coords(b):
    return {v: fixtures.grid_coordinates(w) for v, w in enumerate(b.words)}


def dinf_coord(b, v):
    return fixtures.line_coordinate(b.words[v], 0, 1)
