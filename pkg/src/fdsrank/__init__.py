"""Maximum (periodic) rank of finite dynamical systems with a prescribed
interaction graph: walk packing, extremal constructions, sampling."""

from .digraph import (
    Digraph,
    WalkFamily,
    alpha_p_bruteforce,
    alpha_p_flow,
    edmonds_alpha1,
    has_cycle_cover,
    in_neighbourhood,
    scc_summary,
    walk_certificate,
)
from .errors import ConstructionError, FdsRankError, InputError, ResourceLimitError
from .fds import (
    Fds,
    Membership,
    Schedule,
    apply_block,
    apply_schedule,
    classify_schedule,
    evaluate,
    interaction_graph,
    iterate,
    materialize,
    membership,
    periodic_points,
    periodic_rank,
    rank,
    scaled_periodic_rank,
    scaled_rank,
)

__all__ = [
    "Digraph",
    "WalkFamily",
    "alpha_p_bruteforce",
    "alpha_p_flow",
    "edmonds_alpha1",
    "has_cycle_cover",
    "in_neighbourhood",
    "scc_summary",
    "walk_certificate",
    "ConstructionError",
    "FdsRankError",
    "InputError",
    "ResourceLimitError",
    "Fds",
    "Membership",
    "Schedule",
    "apply_block",
    "apply_schedule",
    "classify_schedule",
    "evaluate",
    "interaction_graph",
    "iterate",
    "materialize",
    "membership",
    "periodic_points",
    "periodic_rank",
    "rank",
    "scaled_periodic_rank",
    "scaled_rank",
]

__version__ = "0.1.0"
