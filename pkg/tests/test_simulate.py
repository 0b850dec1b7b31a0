import collections
import math
import random

import pytest
from scipy import stats

from treecongruence.agreement import rspr_distance
from treecongruence.errors import NonBinaryInput, TooSmall
from treecongruence.simulate import (
    BatterySpec,
    apply_spr,
    perturb,
    random_binary_tree,
    run_battery,
    simulate_trees,
    spr_moves,
)
from treecongruence.tree import parse_newick

from oracles import all_rooted_binary


def test_three_leaf_shapes_uniform():
    counts = collections.Counter(random_binary_tree(3, seed).newick() for seed in range(3000))
    assert len(counts) == 3
    assert stats.chisquare(list(counts.values())).pvalue > 0.01


def test_four_leaf_topologies_uniform():
    # 15 rooted binary topologies on four leaves
    assert len(all_rooted_binary("abcd")) == 15
    counts = collections.Counter(random_binary_tree(4, seed).newick() for seed in range(6000))
    assert len(counts) == 15
    assert stats.chisquare(list(counts.values())).pvalue > 0.01


def test_deterministic_and_labelled():
    assert random_binary_tree(21, 5).newick() == random_binary_tree(21, 5).newick()
    t = random_binary_tree(11, 0)
    assert t.leaves == {f"t{i}" for i in range(1, 12)}
    assert t.n_internal() == 10 and t.is_binary()


def test_too_small():
    with pytest.raises(TooSmall):
        random_binary_tree(2, 0)


class TestPerturb:
    def test_zero_moves(self):
        t = random_binary_tree(15, 1)
        assert perturb(t, 0, 3) == t

    def test_moves_keep_leaves_and_binary(self):
        rng = random.Random(2)
        for _ in range(50):
            t = random_binary_tree(rng.randint(4, 30), rng)
            p = perturb(t, rng.randint(1, 6), rng)
            assert p.leaves == t.leaves and p.is_binary()

    def test_every_move_changes_tree(self):
        t = random_binary_tree(9, 4)
        for v, w in spr_moves(t):
            n = apply_spr(t, v, w)
            assert n != t
            assert rspr_distance(t, n).distance == 1

    def test_distance_bounded_by_moves(self):
        rng = random.Random(3)
        for _ in range(40):
            t = random_binary_tree(rng.randint(5, 10), rng)
            k = rng.randint(1, 5)
            assert rspr_distance(t, perturb(t, k, rng)).distance <= k

    def test_rejects_polytomy(self):
        with pytest.raises(NonBinaryInput):
            perturb(parse_newick("(a,b,c);"), 1, 0)


class TestBattery:
    def test_settings_validation(self):
        with pytest.raises(TooSmall):
            BatterySpec(sizes=(2,))
        with pytest.raises(ValueError):
            BatterySpec(trees_per_size=1)
        with pytest.raises(ValueError):
            BatterySpec(moves_min=3, moves_max=2)

    def test_single_pair(self):
        rows = run_battery(BatterySpec(sizes=(8,), trees_per_size=2))
        assert len(rows) == 1
        assert rows[0].pair_id == "T8_1_2"

    def test_row_count_and_determinism(self):
        spec = BatterySpec(sizes=(5, 9), trees_per_size=4)
        rows = run_battery(spec)
        assert len(rows) == 2 * math.comb(4, 2)
        assert rows == run_battery(spec)
        assert [r.T for r in rows] == [5] * 6 + [9] * 6

    def test_shared_leaf_sets(self):
        trees = simulate_trees(BatterySpec(sizes=(11, 21), trees_per_size=5))
        for T, ts in trees.items():
            assert len(ts) == 5
            assert all(t.leaves == ts[0].leaves and t.is_binary() for t in ts)

    def test_default_battery(self):
        rows = run_battery(BatterySpec())
        assert len(rows) == 180
        assert all(r.spr_exact for r in rows)
        assert all(v is not None for r in rows for v in r.similarities().values())
