"""Hyperplanes, orders and boundary dynamics on finite balls of paraclique graphs."""

__version__ = "0.1.0"

from .boundary import (  # noqa: E402
    chain_minimality,
    horofunction_vector,
    principal_orientation,
    ray_orientation,
    sup_difference,
    symmetric_difference,
)
from .coxeter import CayleyBall, CoxeterSystem, cayley_ball, classify_type, load_system, parse_system  # noqa: E402
from .dynamics import (  # noqa: E402
    build_admissible_path,
    build_axis,
    certify_contracting,
    north_south,
    ns_iterate,
)
from .errors import WallkitError  # noqa: E402
from .graph_core import BallGraph  # noqa: E402
from .order import OrderContext  # noqa: E402
from .walls import HyperplaneSet, build_hyperplanes  # noqa: E402

__all__ = [
    "BallGraph", "CayleyBall", "CoxeterSystem", "HyperplaneSet", "OrderContext", "WallkitError",
    "build_admissible_path", "build_axis", "build_hyperplanes", "cayley_ball",
    "certify_contracting", "chain_minimality", "classify_type", "horofunction_vector",
    "load_system", "north_south", "ns_iterate", "parse_system", "principal_orientation",
    "ray_orientation", "sup_difference", "symmetric_difference",
]
