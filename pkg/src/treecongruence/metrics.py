"""Normalized topological congruence scores for a pair of dendrograms.

Consensus-based scores (CRI, CF, WCF, CI_M, CI_1) read their inputs from
:class:`~treecongruence.consensus.ConsensusStats`; MASTxCF adds the size
of a maximum agreement subtree; RF and SPR work on cluster sets and SPR
distances.
"""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass
from typing import Optional

from .agreement import DEFAULT_SPR_BUDGET, MastResult, SprResult, mast, rspr_distance
from .consensus import ConsensusStats, consensus_stats, strict_consensus
from .errors import DegenerateTarget, LabelSetMismatch, LeafSetMismatch
from .parsimony import distortion_coefficient
from .tree import ClusterSet, RootedTree, clusters, common_leaf_reduction


def cri(stats: ConsensusStats) -> float:
    """Clade Retention Index: 0.5 * ((N - P) / (T - 1) + 1)."""
    value = 0.5 * ((stats.N - stats.P) / (stats.T - 1) + 1)
    assert 0.0 <= value <= 1.0
    return value


def cf(stats: ConsensusStats) -> float:
    """Colless' consensus fork index, (N - 1) / (T - 2)."""
    return (stats.N - 1) / (stats.T - 2)


def mast_x_cf(stats: ConsensusStats, mast_result: MastResult) -> float:
    return cf(stats) * mast_result.mT / stats.T


def colless_max(T: int) -> float:
    return 0.5 * (T - 1) * (T + 2)


def wcf(stats: ConsensusStats) -> float:
    """Weighted consensus fork: summed subtree sizes over Colless' maximum.

    The root subtree is part of the sum, so a ladderized binary tree
    reaches exactly 0.5 (T - 1)(T + 2).
    """
    return sum(stats.subtree_sizes) / colless_max(stats.T)


def mickevich_weight(n: int, T: int) -> int:
    return min(n - 1, T - n)


def mickevich_max(T: int) -> int:
    return (T // 2) * ((T - 1) // 2)


def ci_m(stats: ConsensusStats) -> float:
    # the root contributes min(T - 1, 0) = 0
    total = sum(mickevich_weight(n, stats.T) for n in stats.subtree_sizes)
    return total / mickevich_max(stats.T)


def rohlf_delta(child_sizes) -> int:
    """Correction for one polytomy; ``child_sizes`` largest first."""
    sizes = sorted(child_sizes, reverse=True)
    cumulative = list(itertools.accumulate(sizes))
    # a runs 2 .. f-1 (1-based) -> cumulative[1 .. f-2]
    return sum(cumulative[a] - 1 for a in range(1, len(sizes) - 1))


def ci_1(stats: ConsensusStats) -> float:
    """Rohlf's CI_1 with weights n_i - 1 on non-root clusters."""
    weights = sum(n - 1 for n in stats.nonroot_sizes)
    if weights == 0:
        return 0.0
    delta = sum(rohlf_delta(p.child_sizes) for p in stats.polytomies)
    return weights / (delta + weights)


def _check_same_taxa(a: ClusterSet, b: ClusterSet):
    if a.taxa != b.taxa:
        raise LeafSetMismatch("cluster sets are over different leaf sets")


def rf_distance(a: ClusterSet, b: ClusterSet) -> int:
    """Size of the symmetric difference of the nontrivial clusters."""
    _check_same_taxa(a, b)
    return len(a.nontrivial ^ b.nontrivial)


def rf_max(T: int) -> int:
    return 2 * (T - 2)


def rf_similarity(a: ClusterSet, b: ClusterSet) -> float:
    return 1.0 - rf_distance(a, b) / rf_max(len(a.taxa))


def spr_similarity(spr: SprResult, T: int) -> float:
    """1 - d / (T - 2), floored at 0."""
    return max(0.0, 1.0 - spr.distance / (T - 2))


def _as_partition(p):
    blocks = [frozenset(block) for block in p]
    labels = frozenset().union(*blocks) if blocks else frozenset()
    if sum(len(b) for b in blocks) != len(labels):
        raise LabelSetMismatch("partition blocks overlap")
    return {label: i for i, block in enumerate(blocks) for label in block}, labels


def rand_index(p, q) -> float:
    """Rand's c between two flat partitions of the same labels.

    A pair counts as agreement when it is together in both or separated
    in both; the score is the share of agreeing pairs.
    """
    block_p, labels_p = _as_partition(p)
    block_q, labels_q = _as_partition(q)
    if labels_p != labels_q:
        raise LabelSetMismatch("partitions cover different labels")
    if len(labels_p) < 2:
        raise LabelSetMismatch("need at least two labels")
    agree = total = 0
    for x, y in itertools.combinations(sorted(labels_p), 2):
        together_p = block_p[x] == block_p[y]
        together_q = block_q[x] == block_q[y]
        agree += together_p == together_q
        total += 1
    return agree / total


# -- full report -----------------------------------------------------------------

SIMILARITY_FIELDS = (
    "cri",
    "cf",
    "wcf",
    "ci_m",
    "ci_1",
    "mast_x_cf",
    "rf_similarity",
    "spr_similarity",
    "distortion_ab",
    "distortion_ba",
)

CSV_FIELDS = (
    "pair_id",
    "T",
    "N",
    "P",
    "mT",
    "cri",
    "cf",
    "wcf",
    "ci_m",
    "ci_1",
    "mast_x_cf",
    "rf_distance",
    "rf_similarity",
    "spr_distance",
    "spr_similarity",
    "distortion_ab",
    "distortion_ba",
)


@dataclass(frozen=True)
class MetricReport:
    """Every score for one tree pair.

    SPR fields are ``None`` when either tree has polytomies; distortion
    fields are ``None`` when the target tree has no informative clusters.
    """

    T: int
    N: int
    P: int
    mT: int
    cri: float
    cf: float
    wcf: float
    ci_m: float
    ci_1: float
    mast_x_cf: float
    rf_distance: int
    rf_similarity: float
    spr_distance: Optional[int]
    spr_similarity: Optional[float]
    spr_exact: Optional[bool]
    distortion_ab: Optional[float]
    distortion_ba: Optional[float]
    pair_id: str = ""

    @property
    def distortion_mean(self) -> Optional[float]:
        if self.distortion_ab is None or self.distortion_ba is None:
            return None
        return 0.5 * (self.distortion_ab + self.distortion_ba)

    def similarities(self) -> dict:
        return {f: getattr(self, f) for f in SIMILARITY_FIELDS}

    def as_dict(self) -> dict:
        return asdict(self)


def _distortion(subject, target):
    try:
        return distortion_coefficient(subject, target)
    except DegenerateTarget:
        return None


def full_report(
    a: RootedTree, b: RootedTree, spr_budget: int = DEFAULT_SPR_BUDGET, pair_id: str = ""
) -> MetricReport:
    """Reduce both trees to their common leaves and compute every metric."""
    if a.taxa != b.taxa:
        a, b = common_leaf_reduction(a, b)
    stats = consensus_stats(strict_consensus(a, b))
    m = mast(a, b)
    ca, cb = clusters(a), clusters(b)
    if a.is_binary() and b.is_binary():
        spr = rspr_distance(a, b, budget=spr_budget)
        spr_distance, spr_sim, spr_exact = spr.distance, spr_similarity(spr, stats.T), spr.exact
    else:
        spr_distance = spr_sim = spr_exact = None
    return MetricReport(
        T=stats.T,
        N=stats.N,
        P=stats.P,
        mT=m.mT,
        cri=cri(stats),
        cf=cf(stats),
        wcf=wcf(stats),
        ci_m=ci_m(stats),
        ci_1=ci_1(stats),
        mast_x_cf=mast_x_cf(stats, m),
        rf_distance=rf_distance(ca, cb),
        rf_similarity=rf_similarity(ca, cb),
        spr_distance=spr_distance,
        spr_similarity=spr_sim,
        spr_exact=spr_exact,
        distortion_ab=_distortion(a, b),
        distortion_ba=_distortion(b, a),
        pair_id=pair_id,
    )
