"""Sparse recovery and anomaly detection under graph-structured sparsity."""
from .errors import (DomainError, GraphMPError, NumericError, OracleSizeError,
                     ParseError, SolverError, ValidationError)
from .graph import (Graph, SparsityModel, components, cycle_graph, gamma, grid_graph,
                    in_model, load_graph, path_graph, serialize_graph, star_graph,
                    support_of)
from .objectives import (EBP, EMS, Kulldorff, LeastSquares, NodeData, make_cost,
                         normalize_features)
from .oracle import (enumerate_model_supports, exact_best_subgraph, exact_head_opt,
                     exact_projection)
from .pcsf import Forest, PcsfInstance, pcsf_gw, prune_tree
from .projections import boost_head, head_approx, tail_approx
from .solver import (SolveResult, SolverConfig, WrscDiagnostics, graph_mp, halting_check,
                     readout_support, restricted_minimize, wrsc_constants_ems)
from .synth import SynthSpec, metrics, synth_instance

__version__ = "0.1.0"
