"""Maximum agreement subtree and rooted SPR distance.

Both problems come with an exponential reference implementation
(``mast_oracle``, ``spr_bfs_oracle``) that works straight from the
definition and is only meant for small trees in tests.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

from scipy.optimize import linear_sum_assignment

from .consensus import _check_same_leaves
from .errors import NonBinaryInput, TooLarge
from .tree import RootedTree, _restrict_mask

DEFAULT_SPR_BUDGET = 10**6

EXACT = "exact"
HEURISTIC = "heuristic-upper-bound"

# Children matchings on polytomies are solved exactly by subset DP up to
# this many children on the smaller side.
_MATCHING_DP_LIMIT = 12


# -- maximum agreement subtree ------------------------------------------------


@dataclass(frozen=True)
class MastResult:
    kept_leaves: frozenset
    subtree: RootedTree

    @property
    def mT(self) -> int:
        return len(self.kept_leaves)


def _better(x, y):
    """True if candidate ``x`` = (size, mask) beats ``y``.

    Larger size wins; equal sizes prefer the lexicographically smaller leaf
    set, which for equal-size sets means the lowest differing bit is in x.
    """
    if x[0] != y[0]:
        return x[0] > y[0]
    diff = x[1] ^ y[1]
    return bool(diff & -diff & x[1])


def _combine(x, y):
    return (x[0] + y[0], x[1] | y[1])


_EMPTY = (0, 0)


def _best_matching(weights):
    """Best (size, mask) over matchings of a ``p x q`` grid of candidates."""
    p, q = len(weights), len(weights[0])
    if p < q:
        weights = [list(col) for col in zip(*weights)]
        p, q = q, p
    if q <= _MATCHING_DP_LIMIT:
        states = {0: _EMPTY}
        for row in weights:
            nxt = dict(states)
            for used, val in states.items():
                for j, w in enumerate(row):
                    if used >> j & 1 or not w[0]:
                        continue
                    cand = _combine(val, w)
                    key = used | 1 << j
                    cur = nxt.get(key)
                    if cur is None or _better(cand, cur):
                        nxt[key] = cand
            states = nxt
        best = _EMPTY
        for val in states.values():
            if _better(val, best):
                best = val
        return best
    cost = [[-w[0] for w in row] for row in weights]
    rows, cols = linear_sum_assignment(cost)
    best = _EMPTY
    for i, j in zip(rows, cols):
        best = _combine(best, weights[i][j])
    return best


def mast(a: RootedTree, b: RootedTree) -> MastResult:
    """Maximum agreement subtree of two trees on the same leaf set.

    Dynamic program over node pairs: the best agreement set below (u, v)
    either lives under one child of u, under one child of v, or pairs
    children of u with children of v through a maximum matching.
    Among equally large sets the lexicographically smallest is returned.
    """
    _check_same_leaves(a, b)
    na, nb = len(a.children), len(b.children)
    best = [[_EMPTY] * nb for _ in range(na)]
    amasks, bmasks = a.masks, b.masks
    for u in range(na):
        ku = a.children[u]
        row = best[u]
        for v in range(nb):
            shared = amasks[u] & bmasks[v]
            if not shared:
                continue
            if shared & (shared - 1) == 0:
                row[v] = (1, shared)
                continue
            kv = b.children[v]
            # both internal here: a leaf on either side shares at most one bit
            cand = _EMPTY
            for c in ku:
                if _better(best[c][v], cand):
                    cand = best[c][v]
            for d in kv:
                if _better(row[d], cand):
                    cand = row[d]
            if len(ku) == 2 and len(kv) == 2:
                u1, u2 = ku
                v1, v2 = kv
                straight = _combine(best[u1][v1], best[u2][v2])
                crossed = _combine(best[u1][v2], best[u2][v1])
                m = straight if _better(straight, crossed) else crossed
            else:
                m = _best_matching([[best[c][d] for d in kv] for c in ku])
            if _better(m, cand):
                cand = m
            row[v] = cand
    size, mask = best[a.root][b.root]
    kept = a.labels_of(mask)
    return MastResult(kept_leaves=kept, subtree=_restrict_mask(a, mask))


def mast_oracle(a: RootedTree, b: RootedTree, max_leaves: int = 10) -> int:
    """Largest leaf subset on which both trees induce the same topology.

    Enumerates subsets from the largest down; exponential.
    """
    _check_same_leaves(a, b)
    n = a.n_leaves
    if n > max_leaves:
        raise TooLarge(f"mast_oracle enumerates 2^{n} subsets; limit is {max_leaves} leaves")
    if n <= 2:
        return n
    for k in range(n, 2, -1):
        for subset in itertools.combinations(range(n), k):
            mask = sum(1 << i for i in subset)
            if _restrict_mask(a, mask) == _restrict_mask(b, mask):
                return k
    return 2


# -- rooted SPR via maximum agreement forests ---------------------------------


@dataclass(frozen=True)
class SprResult:
    distance: int
    method: str

    @property
    def exact(self) -> bool:
        return self.method == EXACT


class _BudgetExceeded(Exception):
    pass


class _Forest:
    """Mutable binary forest keyed by integer node ids.

    Leaf ids are shared between the two forests of a search state so that
    a contracted cherry gets the same id on both sides.
    """

    __slots__ = ("parent", "kids", "roots")

    def __init__(self, parent, kids, roots):
        self.parent = parent
        self.kids = kids
        self.roots = roots

    @classmethod
    def from_tree(cls, tree: RootedTree, rho: int, counter):
        parent, kids = {}, {}
        ids = []
        for node, ch in enumerate(tree.children):
            if ch:
                nid = next(counter)
                kids[nid] = [ids[c] for c in ch]
                for c in kids[nid]:
                    parent[c] = nid
            else:
                nid = tree.index[tree.labels[node]]
                kids[nid] = []
            ids.append(nid)
        top = next(counter)
        kids[rho] = []
        kids[top] = [ids[tree.root], rho]
        parent[ids[tree.root]] = top
        parent[rho] = top
        parent[top] = None
        return cls(parent, kids, {top})

    def copy(self):
        return _Forest(
            dict(self.parent), {k: list(v) for k, v in self.kids.items()}, set(self.roots)
        )

    def _replace(self, old, new):
        g = self.parent[old]
        self.parent[new] = g
        if g is None:
            self.roots.discard(old)
            self.roots.add(new)
        else:
            ch = self.kids[g]
            ch[ch.index(old)] = new

    def cut(self, x):
        p = self.parent[x]
        if p is None:
            return
        ch = self.kids[p]
        ch.remove(x)
        s = ch[0]
        self.parent[x] = None
        self.roots.add(x)
        self._replace(p, s)
        del self.kids[p], self.parent[p]

    def remove(self, x):
        self.cut(x)
        self.roots.discard(x)
        del self.kids[x], self.parent[x]

    def contract(self, a, c, z):
        p = self.parent[a]
        self.kids[z] = []
        self._replace(p, z)
        for x in (a, c, p):
            del self.kids[x], self.parent[x]

    def root_of(self, x):
        while self.parent[x] is not None:
            x = self.parent[x]
        return x

    def cherry(self):
        for node, ch in self.kids.items():
            if ch and not self.kids[ch[0]] and not self.kids[ch[1]]:
                return ch[0], ch[1]
        return None

    def pendants(self, a, c):
        """Subtrees hanging off the a-c path (a, c in one component)."""
        up = {}
        x = a
        while x is not None:
            up[x] = True
            x = self.parent[x]
        lca = c
        while lca not in up:
            lca = self.parent[lca]
        out = []
        for start in (a, c):
            x = start
            while self.parent[x] != lca:
                p = self.parent[x]
                out.extend(k for k in self.kids[p] if k != x)
                x = p
        return out


def _maf_search(t1: _Forest, f2: _Forest, k: int, counter, budget, greedy=False):
    """Number of cuts used to reach an agreement forest, or None.

    With ``greedy`` a single branch is followed and the cut count returned
    (an upper bound); otherwise returns k-feasibility as a cut count <= k.
    """
    budget[0] -= 1
    if budget[0] < 0:
        raise _BudgetExceeded
    used = 0
    while True:
        pair = t1.cherry()
        if pair is None:
            return used
        a, c = pair
        if f2.parent[a] is None:
            t1.remove(a)
            continue
        if f2.parent[c] is None:
            t1.remove(c)
            continue
        if f2.parent[a] == f2.parent[c]:
            z = next(counter)
            t1.contract(a, c, z)
            f2.contract(a, c, z)
            continue
        if f2.root_of(a) != f2.root_of(c):
            branches = [[a], [c]]
        else:
            pend = f2.pendants(a, c)
            branches = [pend, [a], [c]] if len(pend) == 1 else [[a], [c], pend]
        if greedy:
            for x in branches[0]:
                f2.cut(x)
            used += len(branches[0])
            continue
        for cuts in branches:
            if len(cuts) > k - used:
                continue
            nt1, nf2 = t1.copy(), f2.copy()
            for x in cuts:
                nf2.cut(x)
            got = _maf_search(nt1, nf2, k - used - len(cuts), counter, budget)
            if got is not None:
                return used + len(cuts) + got
        return None


def _init_state(a: RootedTree, b: RootedTree):
    counter = itertools.count(a.n_leaves + 1)
    rho = a.n_leaves
    return _Forest.from_tree(a, rho, counter), _Forest.from_tree(b, rho, counter), counter


def _greedy_bound(a, b):
    t1, f2, counter = _init_state(a, b)
    return _maf_search(t1, f2, 0, counter, [float("inf")], greedy=True)


def _maf_distance(a, b, remaining):
    """(distance, exact); ``remaining`` is a one-item list holding the budget."""
    if a == b:
        return 0, True
    # fixed argument order keeps heuristic results symmetric
    if b.newick() < a.newick():
        a, b = b, a
    upper = min(_greedy_bound(a, b), _greedy_bound(b, a))
    try:
        for k in range(1, upper):
            t1, f2, counter = _init_state(a, b)
            if _maf_search(t1, f2, k, counter, remaining) is not None:
                return k, True
    except _BudgetExceeded:
        return upper, False
    return upper, True


def rspr_distance(a: RootedTree, b: RootedTree, budget: int = DEFAULT_SPR_BUDGET) -> SprResult:
    """Rooted SPR distance between two binary trees on the same leaves.

    Computed as the size of a maximum agreement forest minus one, searched
    by iterative deepening over the three-way cut branching. If more than
    ``budget`` search states are expanded, the best agreement forest found
    by greedy descent is reported as an upper bound.
    """
    _check_same_leaves(a, b)
    for t in (a, b):
        if not t.is_binary():
            raise NonBinaryInput(f"rspr_distance needs fully bifurcating trees: {t.newick()}")
    distance, exact = _maf_distance(a, b, [budget])
    return SprResult(distance, EXACT if exact else HEURISTIC)


# -- brute-force SPR oracle --------------------------------------------------


def _canon(node):
    """Canonical nested tuple and its smallest label."""
    if isinstance(node, str):
        return node, node
    parts = sorted((_canon(c) for c in node), key=lambda x: x[1])
    return tuple(p[0] for p in parts), parts[0][1]


def _subtrees(node):
    yield node
    if not isinstance(node, str):
        for c in node:
            yield from _subtrees(c)


def _prune(node, target):
    """Remove ``target`` from ``node`` and suppress the unary parent."""
    if node == target:
        return None
    if isinstance(node, str):
        return node
    kept = [x for x in (_prune(c, target) for c in node) if x is not None]
    return kept[0] if len(kept) == 1 else tuple(kept)


def _graft(node, at, sub):
    if node == at:
        return (node, sub)
    if isinstance(node, str):
        return node
    return tuple(_graft(c, at, sub) for c in node)


def _spr_neighbours(tree):
    out = set()
    for sub in _subtrees(tree):
        if sub == tree:
            continue
        rest = _prune(tree, sub)
        for at in _subtrees(rest):
            out.add(_canon(_graft(rest, at, sub))[0])
    out.discard(tree)
    return out


def spr_bfs_oracle(a: RootedTree, b: RootedTree, max_leaves: int = 7) -> int:
    """Exact rooted SPR distance by bidirectional BFS over the move graph."""
    _check_same_leaves(a, b)
    if a.n_leaves > max_leaves:
        raise TooLarge(f"spr_bfs_oracle is limited to {max_leaves} leaves")
    for t in (a, b):
        if not t.is_binary():
            raise NonBinaryInput("spr_bfs_oracle needs fully bifurcating trees")
    start, goal = _canon(a.nested())[0], _canon(b.nested())[0]
    if start == goal:
        return 0
    dist = [{start: 0}, {goal: 0}]
    frontier = [deque([start]), deque([goal])]
    while frontier[0] and frontier[1]:
        side = 0 if len(frontier[0]) <= len(frontier[1]) else 1
        mine, other = dist[side], dist[1 - side]
        found = None
        for _ in range(len(frontier[side])):
            node = frontier[side].popleft()
            d = mine[node] + 1
            for nb in _spr_neighbours(node):
                if nb in other:
                    if found is None or d + other[nb] < found:
                        found = d + other[nb]
                elif nb not in mine:
                    mine[nb] = d
                    frontier[side].append(nb)
        if found is not None:
            return found
    raise AssertionError("SPR graph is connected")
