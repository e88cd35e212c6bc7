from src.inference.exact import Moments, exact_marginals, exact_moments, log_partition
from src.inference.maxsat import map_exact, map_localsearch, walksat
from src.inference.mcsat import mcsat_marginals, mcsat_samples
from src.inference.world import WorldState

__all__ = [
    "Moments",
    "WorldState",
    "exact_marginals",
    "exact_moments",
    "log_partition",
    "map_exact",
    "map_localsearch",
    "mcsat_marginals",
    "mcsat_samples",
    "walksat",
]
