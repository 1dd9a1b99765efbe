"""Online non-crossing matching in the plane: optimal advice algorithms,
adversarial instance families, and brute-force oracles that certify the
tight bounds at desk scale.
"""

__version__ = "0.1.0"

from .codecs import (
    AdviceTape,
    BinaryTree,
    DyckWord,
    Permutation,
    catalan,
)
from .engine import (
    OnlineAlgorithm,
    SimulationResult,
    asap_matching,
    bt_matching,
    greedy,
    simulate,
    sorted_matching,
)
from .geometry import Instance, Matching, Point, circle_point, plane_point

__all__ = [
    "AdviceTape",
    "BinaryTree",
    "DyckWord",
    "Instance",
    "Matching",
    "OnlineAlgorithm",
    "Permutation",
    "Point",
    "SimulationResult",
    "asap_matching",
    "bt_matching",
    "catalan",
    "circle_point",
    "greedy",
    "plane_point",
    "simulate",
    "sorted_matching",
    "__version__",
]
