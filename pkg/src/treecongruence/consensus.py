"""Strict consensus of two trees and the counts the consensus indices use."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import LeafSetMismatch
from .tree import RootedTree, _build


@dataclass(frozen=True)
class Polytomy:
    """A node with three or more children.

    ``child_sizes`` holds the leaf counts of the children, largest first.
    """

    size: int
    child_sizes: tuple

    @property
    def f(self) -> int:
        return len(self.child_sizes)


@dataclass(frozen=True)
class ConsensusStats:
    """Counts read off a consensus tree.

    N counts internal nodes including the root. P counts leaves whose
    parent has at least three children. ``subtree_sizes`` lists the leaf
    count of every internal node, root first.
    """

    T: int
    N: int
    P: int
    subtree_sizes: tuple
    polytomies: tuple

    @property
    def nonroot_sizes(self) -> tuple:
        return self.subtree_sizes[1:]


def _check_same_leaves(a: RootedTree, b: RootedTree):
    if a.taxa != b.taxa:
        only_a = sorted(a.leaves - b.leaves)
        only_b = sorted(b.leaves - a.leaves)
        raise LeafSetMismatch(
            f"trees have different leaf sets (only in first: {only_a}, only in second: {only_b}); "
            "apply common_leaf_reduction first"
        )


def strict_consensus(a: RootedTree, b: RootedTree) -> RootedTree:
    """Tree whose clusters are exactly those shared by ``a`` and ``b``."""
    _check_same_leaves(a, b)
    shared = set(b.masks[n] for n in b.internal_nodes())
    raw_labels: list = []
    raw_children: list = []
    # Per node of ``a``: the consensus nodes it contributes to its parent.
    carried: list = [None] * len(a.children)
    for node, kids in enumerate(a.children):
        if not kids:
            raw_labels.append(a.labels[node])
            raw_children.append([])
            carried[node] = [len(raw_labels) - 1]
            continue
        items = [x for k in kids for x in carried[k]]
        if node == a.root or a.masks[node] in shared:
            raw_labels.append(None)
            raw_children.append(items)
            carried[node] = [len(raw_labels) - 1]
        else:
            carried[node] = items
    return _build(raw_labels, raw_children, carried[a.root][0])


def consensus_stats(cons: RootedTree) -> ConsensusStats:
    sizes = []
    polytomies = []
    P = 0
    # Reverse post-order puts the root first.
    for node in reversed(range(len(cons.children))):
        kids = cons.children[node]
        if not kids:
            continue
        sizes.append(cons.size(node))
        if len(kids) >= 3:
            P += sum(1 for k in kids if not cons.children[k])
            child_sizes = tuple(sorted((cons.size(k) for k in kids), reverse=True))
            polytomies.append(Polytomy(cons.size(node), child_sizes))
    return ConsensusStats(
        T=cons.n_leaves,
        N=len(sizes),
        P=P,
        subtree_sizes=tuple(sizes),
        polytomies=tuple(polytomies),
    )
