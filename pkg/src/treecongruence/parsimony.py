"""MRP encoding, Fitch step counts and the distortion coefficient."""

from __future__ import annotations

from dataclasses import dataclass

from .consensus import _check_same_leaves
from .errors import DegenerateTarget, LengthMismatch
from .tree import RootedTree


@dataclass(frozen=True)
class BinaryCharacterMatrix:
    """One 0/1 character per nontrivial cluster of a tree.

    ``characters[j][i]`` is 1 when ``taxa[i]`` belongs to cluster j.
    """

    taxa: tuple
    characters: tuple

    def __len__(self):
        return len(self.characters)

    def rows(self):
        """Characters as strings such as ``"1100"``."""
        return ["".join(map(str, c)) for c in self.characters]


@dataclass(frozen=True)
class RiComponents:
    S: int
    G: int
    M: int

    @property
    def ri(self) -> float:
        if self.G == self.M:
            raise DegenerateTarget("retention index undefined: G == M")
        return (self.G - self.S) / (self.G - self.M)


def mrp_encode(target: RootedTree) -> BinaryCharacterMatrix:
    n = target.n_leaves
    full = target.full_mask
    chars = []
    # root first, then down the tree
    for node in reversed(range(len(target.children))):
        mask = target.masks[node]
        if not target.children[node] or mask == full:
            continue
        chars.append(tuple(mask >> i & 1 for i in range(n)))
    return BinaryCharacterMatrix(taxa=target.taxa, characters=tuple(chars))


def fitch_steps(tree: RootedTree, character) -> int:
    """Minimum number of state changes of ``character`` on ``tree``.

    ``character`` is either a sequence indexed like ``tree.taxa`` or a
    mapping from leaf label to state. Polytomies are handled by keeping
    the states held by the most children and charging one step for every
    child that lacks them; on binary nodes this is the usual Fitch rule.
    """
    if isinstance(character, dict):
        if set(character) != tree.leaves:
            raise LengthMismatch("character does not cover exactly the tree's leaves")
        states = [character[t] for t in tree.taxa]
    else:
        states = list(character)
        if len(states) != tree.n_leaves:
            raise LengthMismatch(
                f"character has {len(states)} states for {tree.n_leaves} leaves"
            )
    sets: list = [None] * len(tree.children)
    steps = 0
    for node, kids in enumerate(tree.children):
        if not kids:
            sets[node] = frozenset((states[tree.index[tree.labels[node]]],))
            continue
        counts: dict = {}
        for k in kids:
            for s in sets[k]:
                counts[s] = counts.get(s, 0) + 1
        top = max(counts.values())
        sets[node] = frozenset(s for s, c in counts.items() if c == top)
        steps += len(kids) - top
    return steps


def _fitch_all_binary(tree: RootedTree, characters) -> list:
    """Fitch steps of many 0/1 characters at once on a binary tree.

    Bit j of a node's ``has0``/``has1`` word says whether state 0/1 is in
    the node's Fitch set for character j.
    """
    k = len(characters)
    everything = (1 << k) - 1
    leaf1 = [0] * tree.n_leaves
    for j, char in enumerate(characters):
        for i, state in enumerate(char):
            if state:
                leaf1[i] |= 1 << j
    has0 = [0] * len(tree.children)
    has1 = [0] * len(tree.children)
    steps = [0] * k
    for node, kids in enumerate(tree.children):
        if not kids:
            ones = leaf1[tree.index[tree.labels[node]]]
            has0[node], has1[node] = everything ^ ones, ones
            continue
        x, y = kids
        i0, i1 = has0[x] & has0[y], has1[x] & has1[y]
        empty = everything ^ (i0 | i1)
        has0[node] = i0 | (empty & (has0[x] | has0[y]))
        has1[node] = i1 | (empty & (has1[x] | has1[y]))
        while empty:
            low = empty & -empty
            steps[low.bit_length() - 1] += 1
            empty ^= low
    return steps


def ri_components(subject: RootedTree, target: RootedTree) -> RiComponents:
    _check_same_leaves(subject, target)
    chars = mrp_encode(target).characters
    if subject.is_binary():
        all_steps = _fitch_all_binary(subject, chars)
    else:
        all_steps = [fitch_steps(subject, c) for c in chars]
    S = G = M = 0
    for char, steps in zip(chars, all_steps):
        ones = sum(char)
        lo, hi = 1, min(ones, len(char) - ones)
        assert lo <= steps <= hi, (steps, lo, hi)
        S += steps
        G += hi
        M += lo
    return RiComponents(S, G, M)


def distortion_coefficient(subject: RootedTree, target: RootedTree) -> float:
    """Ensemble retention index of ``subject`` against the MRP of ``target``.

    Not symmetric: swapping subject and target generally changes the score.
    """
    comp = ri_components(subject, target)
    if comp.G == comp.M:
        raise DegenerateTarget(
            "target has no informative clusters (retention index denominator is zero)"
        )
    return comp.ri
