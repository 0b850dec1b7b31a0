"""Rooted dendrogram model, Newick I/O, clusters and leaf restriction.

Trees are immutable and always held in canonical form: children are ordered
by the smallest leaf label below them and nodes are numbered in post-order,
so two trees with the same topology have identical internals and serialize
to the same Newick string.

Leaf sets are handled as integer bitmasks over the sorted leaf labels
(bit ``i`` is ``taxa[i]``). Two trees over the same leaf set therefore share
a bit layout, which makes cluster comparison a matter of integer equality.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from .errors import (
    DuplicateLeafLabel,
    EmptyLabel,
    InsufficientOverlap,
    LeafNotFound,
    NewickError,
    TooFewLeaves,
    TrailingGarbage,
    UnbalancedParentheses,
)

MIN_LEAVES = 3

_DELIMITERS = set("()[]':;,")


def _lowbit(mask: int) -> int:
    return mask & -mask


class RootedTree:
    """Immutable rooted tree over uniquely labelled leaves.

    Attributes
    ----------
    taxa : tuple of str
        Leaf labels in sorted order; defines the bit layout of ``masks``.
    children : tuple of tuple of int
        Child ids per node, canonical order. Leaves have ``()``.
    labels : tuple
        Leaf label per node, ``None`` for internal nodes.
    parent : tuple of int
        Parent id per node, ``-1`` for the root.
    masks : tuple of int
        Leaf-set bitmask per node.
    root : int
        Id of the root, always the last node.
    """

    __slots__ = ("taxa", "index", "children", "labels", "parent", "masks", "root", "_newick")

    def __init__(self, taxa, children, labels, masks):
        # Use the module-level constructors; this expects canonical input.
        self.taxa = taxa
        self.index = {label: i for i, label in enumerate(taxa)}
        self.children = children
        self.labels = labels
        self.masks = masks
        self.root = len(children) - 1
        parent = [-1] * len(children)
        for node, kids in enumerate(children):
            for kid in kids:
                parent[kid] = node
        self.parent = tuple(parent)
        self._newick = None

    # -- construction -----------------------------------------------------

    @classmethod
    def from_nested(cls, obj) -> "RootedTree":
        """Build a tree from nested sequences of leaf labels.

        >>> RootedTree.from_nested([["a", "b"], "c"]).newick()
        '((a,b),c);'
        """
        raw_labels: list = []
        raw_children: list = []
        stack = [(obj, None)]
        root = None
        while stack:
            item, parent = stack.pop()
            node = len(raw_labels)
            if isinstance(item, str):
                raw_labels.append(item)
                raw_children.append([])
            else:
                raw_labels.append(None)
                raw_children.append([])
                for sub in reversed(list(item)):
                    stack.append((sub, node))
            if parent is None:
                root = node
            else:
                raw_children[parent].append(node)
        return _build(raw_labels, raw_children, root)

    # -- basic queries ----------------------------------------------------

    def __len__(self) -> int:
        return len(self.taxa)

    @property
    def n_leaves(self) -> int:
        return len(self.taxa)

    @property
    def leaves(self) -> frozenset:
        return frozenset(self.taxa)

    @property
    def full_mask(self) -> int:
        return self.masks[self.root]

    def is_leaf(self, node: int) -> bool:
        return not self.children[node]

    def internal_nodes(self) -> Iterator[int]:
        """Internal node ids in post-order (root last)."""
        return (n for n, kids in enumerate(self.children) if kids)

    def leaf_nodes(self) -> Iterator[int]:
        return (n for n, kids in enumerate(self.children) if not kids)

    def n_internal(self) -> int:
        return sum(1 for kids in self.children if kids)

    def is_binary(self) -> bool:
        return all(len(kids) in (0, 2) for kids in self.children)

    def size(self, node: int) -> int:
        """Number of leaves below ``node``."""
        return self.masks[node].bit_count()

    def mask_of(self, labels: Iterable[str]) -> int:
        mask = 0
        for label in labels:
            try:
                mask |= 1 << self.index[label]
            except KeyError:
                raise LeafNotFound(f"leaf {label!r} not in tree") from None
        return mask

    def labels_of(self, mask: int) -> frozenset:
        return frozenset(t for i, t in enumerate(self.taxa) if mask >> i & 1)

    def nested(self):
        """The topology as nested tuples of labels (canonical order)."""
        built: list = [None] * len(self.children)
        for node, kids in enumerate(self.children):
            built[node] = tuple(built[k] for k in kids) if kids else self.labels[node]
        return built[self.root]

    def relabel(self, mapping) -> "RootedTree":
        """Apply a bijective leaf relabelling (dict or callable)."""
        get = mapping if callable(mapping) else mapping.__getitem__
        labels = [get(l) if l is not None else None for l in self.labels]
        return _build(labels, [list(k) for k in self.children], self.root)

    def newick(self) -> str:
        if self._newick is None:
            self._newick = write_newick(self)
        return self._newick

    def __eq__(self, other):
        if not isinstance(other, RootedTree):
            return NotImplemented
        return self.taxa == other.taxa and self.children == other.children and self.masks == other.masks

    def __hash__(self):
        return hash((self.taxa, self.masks))

    def __repr__(self):
        return f"RootedTree({self.newick()!r})"

    def __str__(self):
        return self.newick()


def _build(raw_labels, raw_children, raw_root) -> RootedTree:
    """Canonicalize an arbitrary raw node list into a RootedTree.

    Internal nodes with a single child are suppressed.
    """
    seen = set()
    for node, label in enumerate(raw_labels):
        if raw_children[node]:
            continue
        if label is None or label == "":
            raise EmptyLabel("leaf with empty label")
        if label in seen:
            raise DuplicateLeafLabel(f"duplicate leaf label {label!r}")
        seen.add(label)

    # Collect reachable nodes and masks (post-order via explicit stack).
    taxa = tuple(sorted(raw_labels[n] for n in _reachable_leaves(raw_children, raw_root)))
    if len(set(taxa)) != len(taxa):
        raise DuplicateLeafLabel("duplicate leaf label")
    index = {label: i for i, label in enumerate(taxa)}

    order = _postorder(raw_children, raw_root)
    mask = {}
    for node in order:
        kids = raw_children[node]
        if kids:
            m = 0
            for kid in kids:
                m |= mask[kid]
            mask[node] = m
        else:
            mask[node] = 1 << index[raw_labels[node]]

    def resolve(node):
        while len(raw_children[node]) == 1:
            node = raw_children[node][0]
        return node

    # Emit canonical post-order.
    children: list = []
    labels: list = []
    masks: list = []
    new_id = {}
    stack = [(resolve(raw_root), False)]
    while stack:
        node, expanded = stack.pop()
        kids = raw_children[node]
        if kids and not expanded:
            stack.append((node, True))
            resolved = sorted((resolve(k) for k in kids), key=lambda k: _lowbit(mask[k]), reverse=True)
            for kid in resolved:
                stack.append((kid, False))
            continue
        if kids:
            ordered = sorted((new_id[resolve(k)] for k in kids), key=lambda i: _lowbit(masks[i]))
            children.append(tuple(ordered))
            labels.append(None)
        else:
            children.append(())
            labels.append(raw_labels[node])
        masks.append(mask[node])
        new_id[node] = len(children) - 1
    return RootedTree(taxa, tuple(children), tuple(labels), tuple(masks))


def _postorder(raw_children, root):
    out = []
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded or not raw_children[node]:
            out.append(node)
            continue
        stack.append((node, True))
        for kid in raw_children[node]:
            stack.append((kid, False))
    return out


def _reachable_leaves(raw_children, root):
    stack = [root]
    while stack:
        node = stack.pop()
        if raw_children[node]:
            stack.extend(raw_children[node])
        else:
            yield node


# -- Newick -----------------------------------------------------------------


class _NewickParser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, cls, message, pos=None):
        pos = self.pos if pos is None else pos
        return cls(message, len(self.text[:pos].encode("utf-8")))

    def skip(self):
        text, n = self.text, len(self.text)
        while self.pos < n:
            ch = text[self.pos]
            if ch.isspace():
                self.pos += 1
            elif ch == "[":
                end = text.find("]", self.pos)
                if end < 0:
                    raise self.error(NewickError, "unterminated comment")
                self.pos = end + 1
            else:
                break

    def peek(self):
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def read_label(self):
        """Read an optional label; returns (label or None, start offset)."""
        ch = self.peek()
        start = self.pos
        if ch == "'":
            parts = []
            i = self.pos + 1
            while True:
                end = self.text.find("'", i)
                if end < 0:
                    raise self.error(NewickError, "unterminated quoted label", start)
                parts.append(self.text[i:end])
                if self.text.startswith("''", end):
                    parts.append("'")
                    i = end + 2
                    continue
                self.pos = end + 1
                return "".join(parts), start
        i = self.pos
        while i < len(self.text) and self.text[i] not in _DELIMITERS and not self.text[i].isspace():
            i += 1
        self.pos = i
        return (self.text[start:i] or None), start

    def read_length(self):
        if self.peek() != ":":
            return
        self.pos += 1
        self.skip()
        start = self.pos
        i = self.pos
        while i < len(self.text) and self.text[i] not in _DELIMITERS and not self.text[i].isspace():
            i += 1
        token = self.text[start:i]
        try:
            float(token)
        except ValueError:
            raise self.error(NewickError, f"invalid branch length {token!r}", start) from None
        self.pos = i

    def parse_one(self) -> RootedTree:
        raw_labels: list = []
        raw_children: list = []
        stack: list = []
        seen: dict = {}
        root = None

        def new_node(label):
            raw_labels.append(label)
            raw_children.append([])
            node = len(raw_labels) - 1
            if stack:
                raw_children[stack[-1]].append(node)
            return node

        expecting = True
        while True:
            ch = self.peek()
            if expecting:
                if ch == "(":
                    if root is not None and not stack:
                        raise self.error(TrailingGarbage, "unexpected '(' after complete tree")
                    node = new_node(None)
                    if root is None:
                        root = node
                    stack.append(node)
                    self.pos += 1
                    continue
                if ch in (",", ")", ";", ""):
                    if ch == "" and root is None:
                        raise self.error(NewickError, "empty input")
                    raise self.error(EmptyLabel, "missing leaf label")
                if ch in _DELIMITERS and ch != "'":
                    raise self.error(NewickError, f"unexpected {ch!r}")
                label, start = self.read_label()
                if label == "":
                    raise self.error(EmptyLabel, "empty leaf label", start)
                if label in seen:
                    raise self.error(DuplicateLeafLabel, f"duplicate leaf label {label!r}", start)
                seen[label] = start
                node = new_node(label)
                if root is None:
                    root = node
                self.read_length()
                expecting = False
                continue
            if ch == ",":
                if not stack:
                    raise self.error(TrailingGarbage, "unexpected ',' outside parentheses")
                self.pos += 1
                expecting = True
            elif ch == ")":
                if not stack:
                    raise self.error(UnbalancedParentheses, "unmatched ')'")
                stack.pop()
                self.pos += 1
                self.read_label()
                self.read_length()
            elif ch == ";":
                if stack:
                    raise self.error(UnbalancedParentheses, "unclosed '('")
                self.pos += 1
                break
            elif ch == "":
                if stack:
                    raise self.error(UnbalancedParentheses, "unclosed '('")
                raise self.error(NewickError, "missing terminating ';'")
            else:
                raise self.error(TrailingGarbage, f"unexpected {ch!r} after subtree")
        return _build(raw_labels, raw_children, root)


def parse_newick(text: str) -> RootedTree:
    """Parse a single ``;``-terminated Newick statement.

    Branch lengths, internal labels and ``[...]`` comments are discarded.
    """
    parser = _NewickParser(text)
    tree = parser.parse_one()
    if parser.peek():
        raise parser.error(TrailingGarbage, "unexpected text after ';'")
    return tree


def parse_newick_many(text: str) -> list:
    """Parse every ``;``-terminated tree in ``text``, in order."""
    parser = _NewickParser(text)
    trees = []
    while parser.peek():
        trees.append(parser.parse_one())
    return trees


def read_newick_file(path) -> list:
    return parse_newick_many(Path(path).read_text(encoding="utf-8"))


def write_newick_file(path, trees) -> None:
    Path(path).write_text("".join(t.newick() + "\n" for t in trees), encoding="utf-8")


def _quote(label: str) -> str:
    if label and not any(c in _DELIMITERS or c.isspace() for c in label):
        return label
    return "'" + label.replace("'", "''") + "'"


def write_newick(tree: RootedTree) -> str:
    """Canonical Newick: children ordered by smallest leaf label, no lengths."""
    out: list = [None] * len(tree.children)
    for node, kids in enumerate(tree.children):
        if kids:
            out[node] = "(" + ",".join(out[k] for k in kids) + ")"
        else:
            out[node] = _quote(tree.labels[node])
    return out[tree.root] + ";"


# -- clusters ---------------------------------------------------------------


@dataclass(frozen=True)
class ClusterSet:
    """Clusters of a tree, one per internal node, as bitmasks over ``taxa``.

    Singletons are never members (leaves are not internal nodes); the full
    leaf set always is.
    """

    taxa: tuple
    masks: frozenset

    @property
    def full_mask(self) -> int:
        return (1 << len(self.taxa)) - 1

    def is_trivial(self, mask: int) -> bool:
        return mask == self.full_mask or mask.bit_count() <= 1

    @property
    def nontrivial(self) -> frozenset:
        full = self.full_mask
        return frozenset(m for m in self.masks if m != full and m.bit_count() > 1)

    def _labels(self, mask):
        return frozenset(t for i, t in enumerate(self.taxa) if mask >> i & 1)

    def label_sets(self) -> frozenset:
        return frozenset(self._labels(m) for m in self.masks)

    def nontrivial_label_sets(self) -> frozenset:
        return frozenset(self._labels(m) for m in self.nontrivial)

    def __len__(self):
        return len(self.masks)


def clusters(tree: RootedTree) -> ClusterSet:
    return ClusterSet(tree.taxa, frozenset(tree.masks[n] for n in tree.internal_nodes()))


# -- restriction ------------------------------------------------------------


def restrict(tree: RootedTree, keep) -> RootedTree:
    """Induced topology on ``keep``: prune other leaves, suppress unary nodes."""
    keep = frozenset(keep)
    missing = keep - tree.leaves
    if missing:
        raise LeafNotFound(f"leaves not in tree: {sorted(missing)}")
    if len(keep) < MIN_LEAVES:
        raise TooFewLeaves(f"need at least {MIN_LEAVES} leaves, got {len(keep)}")
    if len(keep) == len(tree.taxa):
        return tree
    return _restrict_mask(tree, tree.mask_of(keep))


def _restrict_mask(tree: RootedTree, keep_mask: int) -> RootedTree:
    raw_labels: list = []
    raw_children: list = []
    ref: list = [None] * len(tree.children)
    for node, kids in enumerate(tree.children):
        if not tree.masks[node] & keep_mask:
            continue
        if not kids:
            raw_labels.append(tree.labels[node])
            raw_children.append([])
            ref[node] = len(raw_labels) - 1
            continue
        sub = [ref[k] for k in kids if ref[k] is not None]
        if len(sub) == 1:
            ref[node] = sub[0]
        else:
            raw_labels.append(None)
            raw_children.append(sub)
            ref[node] = len(raw_labels) - 1
    return _build(raw_labels, raw_children, ref[tree.root])


def common_leaf_reduction(a: RootedTree, b: RootedTree):
    """Restrict both trees to their shared leaves."""
    shared = a.leaves & b.leaves
    if len(shared) < MIN_LEAVES:
        raise InsufficientOverlap(
            f"trees share {len(shared)} leaves; at least {MIN_LEAVES} are required"
        )
    return restrict(a, shared), restrict(b, shared)
