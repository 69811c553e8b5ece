"""Approximate single-source personalized PageRank on undirected weighted graphs."""
from .baselines import WalkBudget, fora_hybrid, monte_carlo, power_method, walks_from_params
from .edgepush import (EdgeThresholds, edgepush, edgepush_additive, edgepush_l1,
                       edgepush_with_scan_switch, predicted_push_bound)
from .estimate import EdgePushAccounting, PprEstimate, PushAccounting
from .evaluation import (EvalReport, conductance, l1_error, max_add_err,
                         normalized_max_add_err, precision_at_k, sweep_cut)
from .generators import AffinityConfig, affinity_graph, motif_weight, unbalanced_star_graph
from .graph import (GraphFormatError, SourceDistribution, WeightedGraph, load_edge_list,
                    sample_sources, write_edge_list)
from .localpush import localpush, localpush_additive, localpush_l1
from .oracle import (PprMatrix, PprVector, check_edgepush_invariant, check_localpush_invariant,
                     exact_ppr, ground_truth, ppr_matrix)
from .unbalance import (UnbalanceReport, ab_unbalance, cos2_phi, cos2_phi_v,
                        mean_superiority_factor, unbalance_report)

__version__ = "0.1.0"
