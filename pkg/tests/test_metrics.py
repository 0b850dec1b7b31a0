import itertools
import random
from fractions import Fraction

import pytest

from treecongruence.agreement import SprResult, mast
from treecongruence.consensus import consensus_stats, strict_consensus
from treecongruence.errors import InsufficientOverlap, LabelSetMismatch, LeafSetMismatch
from treecongruence.metrics import (
    SIMILARITY_FIELDS,
    ci_1,
    ci_m,
    cf,
    colless_max,
    cri,
    full_report,
    mast_x_cf,
    mickevich_max,
    mickevich_weight,
    rand_index,
    rf_distance,
    rf_max,
    rf_similarity,
    rohlf_delta,
    spr_similarity,
    wcf,
)
from treecongruence.simulate import perturb, random_binary_tree
from treecongruence.tree import clusters, parse_newick

from oracles import is_caterpillar, rf_brute

POLY = parse_newick("((a,b,c),d);")
SWAP = (parse_newick("(((a,b),c),d);"), parse_newick("(((a,c),b),d);"))


def caterpillar(T):
    s = "t1"
    for i in range(2, T + 1):
        s = f"({s},t{i})"
    return parse_newick(s + ";")


def rand_brute(p, q):
    """Pair agreement of two flat partitions given as label -> block maps."""
    labels = sorted(p)
    pairs = list(itertools.combinations(labels, 2))
    agree = sum((p[x] == p[y]) == (q[x] == q[y]) for x, y in pairs)
    return Fraction(agree, len(pairs))


def blocks(p):
    return {x: i for i, b in enumerate(p) for x in b}


class TestConsensusIndices:
    def test_cri(self):
        assert cri(consensus_stats(POLY)) == pytest.approx(1 / 3)
        t = random_binary_tree(15, 0)
        assert cri(consensus_stats(t)) == 1.0
        assert cri(consensus_stats(parse_newick("(a,b,c,d,e);"))) == 0.0

    def test_cf(self):
        assert cf(consensus_stats(POLY)) == 0.5
        assert cf(consensus_stats(parse_newick("(a,b,c,d,e);"))) == 0.0

    def test_mast_x_cf(self):
        a, b = SWAP
        stats = consensus_stats(strict_consensus(a, b))
        assert mast_x_cf(stats, mast(a, b)) == pytest.approx(0.375)

    def test_wcf(self):
        assert colless_max(4) == 9
        assert wcf(consensus_stats(POLY)) == pytest.approx(7 / 9)
        assert wcf(consensus_stats(parse_newick("((a,b),(c,d));"))) == pytest.approx(8 / 9)
        for T in (3, 11, 41):
            assert wcf(consensus_stats(caterpillar(T))) == pytest.approx(1.0)

    def test_ci_m_weights(self):
        assert mickevich_weight(14, 21) == 7
        assert mickevich_weight(3, 21) == 2
        assert mickevich_max(21) == 100

    def test_ci_m_worked_total(self):
        # clusters of 14, 13, 12, 11, 10, 8 and 3 leaves: 7+8+9+10+9+7+2 = 52
        three = "(x1,x2,x3)"
        eight = f"({three},x4,x5,x6,x7,x8)"
        ten = f"({eight},x9,x10)"
        eleven = f"({ten},x11)"
        twelve = f"({eleven},x12)"
        thirteen = f"({twelve},x13)"
        fourteen = f"({thirteen},x14)"
        t = parse_newick(f"({fourteen},y1,y2,y3,y4,y5,y6,y7);")
        assert t.n_leaves == 21
        assert f"{ci_m(consensus_stats(t)):.3f}" == "0.520"

    def test_ci_m_caterpillar(self):
        for T in (4, 11, 21, 40):
            assert ci_m(consensus_stats(caterpillar(T))) == pytest.approx(1.0)

    def test_rohlf(self):
        assert rohlf_delta([1, 1, 1]) == 1
        assert rohlf_delta([1, 1]) == 0
        assert rohlf_delta([1, 3, 2, 1]) == (5 - 1) + (6 - 1)
        assert ci_1(consensus_stats(POLY)) == pytest.approx(2 / 3)
        assert ci_1(consensus_stats(parse_newick("(a,b,c,d);"))) == 0.0
        assert ci_1(consensus_stats(random_binary_tree(12, 3))) == 1.0

    def test_shape_dependence(self):
        rng = random.Random(4)
        for _ in range(100):
            t = random_binary_tree(rng.randint(4, 15), rng)
            s = consensus_stats(t)
            assert cri(s) == cf(s) == ci_1(s) == 1.0
            assert (wcf(s) == pytest.approx(1.0)) == is_caterpillar(t)
            if is_caterpillar(t):
                assert ci_m(s) == pytest.approx(1.0)


class TestRf:
    def test_examples(self):
        a, b = SWAP
        assert rf_distance(clusters(a), clusters(b)) == 2
        assert rf_similarity(clusters(a), clusters(b)) == 0.5
        c = parse_newick("((((a,b),c),d),e);")
        d = parse_newick("((((e,d),c),b),a);")
        assert rf_distance(clusters(c), clusters(d)) == 6
        assert rf_similarity(clusters(c), clusters(d)) == 0.0
        assert rf_max(4) == 4

    def test_brute_force(self):
        rng = random.Random(6)
        for _ in range(200):
            T = rng.randint(3, 15)
            a, b = random_binary_tree(T, rng), random_binary_tree(T, rng)
            assert rf_distance(clusters(a), clusters(b)) == rf_brute(a.newick(), b.newick())

    def test_mismatch(self):
        with pytest.raises(LeafSetMismatch):
            rf_distance(clusters(parse_newick("((a,b),c);")), clusters(parse_newick("((a,b),d);")))


def test_spr_similarity():
    assert spr_similarity(SprResult(0, "exact"), 10) == 1.0
    assert spr_similarity(SprResult(1, "exact"), 4) == 0.5
    assert spr_similarity(SprResult(5, "exact"), 5) == 0.0


class TestRand:
    def test_six_labels(self):
        assert rand_index(["abc", "def"], ["ab", "cde", "f"]) == pytest.approx(0.6)

    def test_three_pairs(self):
        p, q = ["ef", "ab", "cd"], ["af", "ec", "bd"]
        assert rand_index(p, q) == float(rand_brute(blocks(p), blocks(q))) == 0.6

    def test_identity_and_errors(self):
        assert rand_index(["ab", "c"], ["c", "ba"]) == 1.0
        with pytest.raises(LabelSetMismatch):
            rand_index(["ab"], ["ac"])
        with pytest.raises(LabelSetMismatch):
            rand_index(["ab", "bc"], ["abc"])

    def test_brute_force(self):
        rng = random.Random(7)
        labels = list("abcdefghij")
        for _ in range(200):
            p = {x: rng.randint(0, 3) for x in labels}
            q = {x: rng.randint(0, 3) for x in labels}
            as_blocks = lambda m: [[x for x in labels if m[x] == k] for k in set(m.values())]
            assert rand_index(as_blocks(p), as_blocks(q)) == pytest.approx(float(rand_brute(p, q)))


class TestFullReport:
    def test_identity(self):
        for T in (4, 11, 21):
            t = random_binary_tree(T, T)
            r = full_report(t, t)
            assert all(v == pytest.approx(1.0) for k, v in r.similarities().items() if k not in ("wcf", "ci_m"))
            assert r.rf_distance == r.spr_distance == 0
            assert r.mT == T

    def test_swap_pair(self):
        r = full_report(*SWAP)
        assert (r.T, r.N, r.P, r.mT) == (4, 2, 3, 3)
        assert r.cri == pytest.approx(1 / 3)
        assert (r.cf, r.mast_x_cf, r.rf_distance, r.rf_similarity) == (0.5, 0.375, 2, 0.5)
        assert (r.spr_distance, r.spr_similarity, r.spr_exact) == (1, 0.5, True)
        assert r.distortion_ab == r.distortion_ba == 0.0

    def test_partial_overlap(self):
        a = parse_newick("((a,b),(c,(d,e)),x);")
        b = parse_newick("((a,c),(b,(d,e)),y);")
        r = full_report(a, b)
        assert r.T == 5

    def test_disjoint(self):
        with pytest.raises(InsufficientOverlap):
            full_report(parse_newick("((a,b),c);"), parse_newick("((d,e),f);"))

    def test_polytomous_input_has_no_spr(self):
        r = full_report(parse_newick("((a,b,c),(d,e));"), parse_newick("((a,b),(c,d,e));"))
        assert r.spr_distance is None and r.spr_similarity is None
        assert 0.0 <= r.cri <= 1.0

    def test_symmetry_and_range(self):
        rng = random.Random(8)
        for _ in range(60):
            T = rng.choice((11, 21))
            a = random_binary_tree(T, rng)
            b = perturb(a, rng.randint(1, 3), rng)
            ab, ba = full_report(a, b), full_report(b, a)
            for f in SIMILARITY_FIELDS:
                v = getattr(ab, f)
                assert 0.0 <= v <= 1.0
                if not f.startswith("distortion"):
                    assert v == pytest.approx(getattr(ba, f))
            assert ab.distortion_ab == pytest.approx(ba.distortion_ba)
