"""Topological congruence between rooted dendrograms."""

from .agreement import MastResult, SprResult, mast, mast_oracle, rspr_distance, spr_bfs_oracle
from .consensus import ConsensusStats, consensus_stats, strict_consensus
from .metrics import (
    MetricReport,
    cf,
    ci_1,
    ci_m,
    cri,
    full_report,
    mast_x_cf,
    rand_index,
    rf_distance,
    rf_similarity,
    spr_similarity,
    wcf,
)
from .parsimony import distortion_coefficient, fitch_steps, mrp_encode
from .simulate import BatterySpec, perturb, random_binary_tree, run_battery
from .stats import concordance_matrix, kendall_tau_b, spearman_rho
from .tree import (
    ClusterSet,
    RootedTree,
    clusters,
    common_leaf_reduction,
    parse_newick,
    parse_newick_many,
    read_newick_file,
    restrict,
    write_newick,
)

__version__ = "0.1.0"
