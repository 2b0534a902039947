"""Markov entropic centrality and entropy-guided graph clustering."""

from .graph import (
    DirectedWeightedGraph,
    GraphParseError,
    NodeWeightFunction,
    WeightTransform,
    augment_self_loops,
    from_edges,
    from_networkx,
    parse_edge_list,
    read_edge_list,
)
from .markov import AbsorptionModel, NumericalError, absorption_distribution, build_chain
from .centrality import EntropicModel, centralization, centralization_sequence, model_for

__version__ = "0.1.0"
