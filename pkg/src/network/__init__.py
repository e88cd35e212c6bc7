from src.network.grounder import ground, network_stats, query_atoms
from src.network.network import Component, GroundClause, GroundNetwork

__all__ = ["Component", "GroundClause", "GroundNetwork", "ground", "network_stats", "query_atoms"]
