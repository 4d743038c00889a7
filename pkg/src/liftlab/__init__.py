"""Random lifts of G(k, s) and a randomized 3-colouring algorithm for them."""

from .base_graph import BaseGraph, build_join_graph, parse_edge_list
from .colouring import Status, TrialOutcome, run, verify_proper
from .lift import ExposureState, LiftGraph

__version__ = "0.1.0"
