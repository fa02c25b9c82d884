"""Algebraic-connectivity maximization: exact outer approximation, Cheeger MILP, k-opt heuristic."""

__version__ = "0.1.0"

from .graph import (GraphError, NumericalError, SpectralResult, WeightedGraph, algebraic_connectivity,
                    build_graph, fiedler, graph_fiedler, is_connected, laplacian, lifted_matrix,
                    smallest_eigenpair)
from .milp import MilpModel, MilpSolution, SolveLimits, SolverConfig, Status, new_model, solve
from .cheeger import (CheegerResult, build_cheeger_milp, cheeger_bruteforce, cheeger_constant,
                      cheeger_ratio, cheeger_upper_bound)
from .problem import CheegerMode, InfeasibleError, ProblemSpec, Variant
from .heuristics import HeuristicConfig, heuristic_solve, initial_graph, kopt_refine, rank_edges
from .oa import (OaConfig, OaResult, brute_force_optimum, build_master, cheeger_cut,
                 eigenvector_cut, gamma_upper_bound, solve_oa)
from .instances import (generate_augmentation_instance, generate_instance, load_instance,
                        load_problem, parse_edgelist, parse_posegraph, save_instance,
                        write_edgelist)

__all__ = [
    "GraphError", "NumericalError", "SpectralResult", "WeightedGraph", "algebraic_connectivity",
    "build_graph", "fiedler", "graph_fiedler", "is_connected", "laplacian", "lifted_matrix",
    "smallest_eigenpair",
    "MilpModel", "MilpSolution", "SolveLimits", "SolverConfig", "Status", "new_model", "solve",
    "CheegerResult", "build_cheeger_milp", "cheeger_bruteforce", "cheeger_constant",
    "cheeger_ratio", "cheeger_upper_bound",
    "CheegerMode", "InfeasibleError", "ProblemSpec", "Variant",
    "HeuristicConfig", "heuristic_solve", "initial_graph", "kopt_refine", "rank_edges",
    "OaConfig", "OaResult", "brute_force_optimum", "build_master", "cheeger_cut",
    "eigenvector_cut", "gamma_upper_bound", "solve_oa",
    "generate_augmentation_instance", "generate_instance", "load_instance", "load_problem",
    "parse_edgelist", "parse_posegraph", "save_instance", "write_edgelist",
]
