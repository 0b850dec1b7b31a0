"""Seeded random dendrograms and the pairwise comparison battery.

Trees in one size class share their labels (``t1`` .. ``tT``): a random
base tree plus siblings derived from it by random rooted SPR moves.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .errors import NonBinaryInput, TooSmall
from .tree import RootedTree, _build


def _rng(seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def random_binary_tree(T: int, seed=None) -> RootedTree:
    """Uniform random rooted binary tree on labels ``t1`` .. ``tT``.

    Leaves are attached one at a time to a uniformly chosen edge (the edge
    above the root included); every labelled rooted binary tree arises from
    exactly one attachment sequence, so the result is uniform.
    """
    if T < 3:
        raise TooSmall(f"need at least 3 leaves, got {T}")
    rng = _rng(seed)
    labels = ["t1", "t2", None]
    children = [[], [], [0, 1]]
    parent = [2, 2, None]
    root = 2
    for i in range(3, T + 1):
        at = rng.randrange(len(labels))
        leaf = len(labels)
        labels.append(f"t{i}")
        children.append([])
        joint = leaf + 1
        labels.append(None)
        children.append([at, leaf])
        up = parent[at]
        parent.extend([joint, up])
        if up is None:
            root = joint
        else:
            kids = children[up]
            kids[kids.index(at)] = joint
        parent[at] = joint
    return _build(labels, children, root)


def spr_moves(tree: RootedTree):
    """All non-trivial rooted SPR moves as (prune node, regraft node) pairs."""
    below = [set() for _ in tree.children]
    for node, kids in enumerate(tree.children):
        below[node].add(node)
        for k in kids:
            below[node] |= below[k]
    moves = []
    for v in range(len(tree.children)):
        if v == tree.root:
            continue
        p = tree.parent[v]
        sib = [k for k in tree.children[p] if k != v][0]
        for w in range(len(tree.children)):
            if w in below[v] or w == p or w == sib:
                continue
            moves.append((v, w))
    return moves


def apply_spr(tree: RootedTree, v: int, w: int) -> RootedTree:
    """Prune the subtree at ``v`` and regraft it onto the edge above ``w``."""
    labels = list(tree.labels)
    children = [list(k) for k in tree.children]
    parent = list(tree.parent)
    root = tree.root
    children[parent[v]].remove(v)
    joint = len(labels)
    labels.append(None)
    children.append([w, v])
    up = parent[w]
    if up == -1:
        root = joint
    else:
        kids = children[up]
        kids[kids.index(w)] = joint
    return _build(labels, children, root)


def perturb(tree: RootedTree, moves: int, seed=None) -> RootedTree:
    """Apply ``moves`` uniformly random rooted SPR moves."""
    if not tree.is_binary():
        raise NonBinaryInput("perturb needs a fully bifurcating tree")
    rng = _rng(seed)
    for _ in range(moves):
        v, w = rng.choice(spr_moves(tree))
        tree = apply_spr(tree, v, w)
    return tree


@dataclass(frozen=True)
class BatterySpec:
    """Simulation settings.

    Each size class holds one random base tree plus ``trees_per_size - 1``
    siblings, each made by applying a number of SPR moves drawn uniformly
    from ``moves_min`` .. ``moves_max`` to the base.
    """

    sizes: tuple = (11, 21, 31, 41)
    trees_per_size: int = 10
    moves_min: int = 1
    moves_max: int = 2
    seed: int = 42
    spr_budget: int = field(default=10**6, compare=False)

    def __post_init__(self):
        if any(T < 3 for T in self.sizes):
            raise TooSmall("every size must be at least 3")
        if self.trees_per_size < 2:
            raise ValueError("trees_per_size must be at least 2")
        if not 0 <= self.moves_min <= self.moves_max:
            raise ValueError("need 0 <= moves_min <= moves_max")


def size_seed(seed: int, T: int) -> int:
    return seed * 1_000_003 + T


def simulate_trees(spec: BatterySpec) -> dict:
    """Trees per size class, keyed by leaf count."""
    out = {}
    for T in spec.sizes:
        rng = random.Random(size_seed(spec.seed, T))
        base = random_binary_tree(T, rng)
        trees = [base]
        for _ in range(spec.trees_per_size - 1):
            trees.append(perturb(base, rng.randint(spec.moves_min, spec.moves_max), rng))
        out[T] = trees
    return out


def pairwise_reports(trees, spr_budget=10**6, prefix=""):
    """Reports for every unordered pair (i < j), ids ``<prefix><i>_<j>`` 1-based."""
    from .metrics import full_report

    return [
        full_report(trees[i], trees[j], spr_budget=spr_budget, pair_id=f"{prefix}{i + 1}_{j + 1}")
        for i, j in itertools.combinations(range(len(trees)), 2)
    ]


def run_battery(spec: BatterySpec, trees: dict = None) -> list:
    """All pairwise reports, ordered by size then pair index."""
    if trees is None:
        trees = simulate_trees(spec)
    rows = []
    for T in spec.sizes:
        rows.extend(pairwise_reports(trees[T], spec.spr_budget, prefix=f"T{T}_"))
    return rows
