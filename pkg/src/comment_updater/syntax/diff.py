"""GumTree-style matching between two ASTs.

1. top-down: pair maximal identical subtrees (height >= 2) by structural hash;
2. bottom-up: pair inner nodes of equal type whose matched-children ratio is
   at least 0.5;
3. recovery: under every matched pair, align the still-unmatched children
   by type (a weighted LCS that prefers equal values), recursively.

Matched pairs with different values are updates; unmatched nodes are
deletions (old side) or insertions (new side).
"""

from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass, field

from .ast import AstNode, structural_hash


class Operation(str, enum.Enum):
    KEEP = "keep"
    INSERT = "insert"
    DEL = "del"
    UPDATE = "update"

    def __str__(self):
        return self.value


@dataclass
class IndexedTree:
    root: AstNode
    nodes: list[AstNode] = field(default_factory=list)  # pre-order
    parent: list[int | None] = field(default_factory=list)
    children: list[list[int]] = field(default_factory=list)
    height: list[int] = field(default_factory=list)
    size: list[int] = field(default_factory=list)
    hashes: list[str] = field(default_factory=list)

    @classmethod
    def build(cls, root: AstNode) -> IndexedTree:
        t = cls(root)
        ids: dict[int, int] = {}
        for node, parent in root.walk_with_parents():
            ids[id(node)] = len(t.nodes)
            t.nodes.append(node)
            t.parent.append(ids[id(parent)] if parent is not None else None)
            t.children.append([])
        for i, p in enumerate(t.parent):
            if p is not None:
                t.children[p].append(i)
        n = len(t.nodes)
        t.height = [1] * n
        t.size = [1] * n
        for i in range(n - 1, -1, -1):
            for c in t.children[i]:
                t.height[i] = max(t.height[i], t.height[c] + 1)
                t.size[i] += t.size[c]
        cache: dict[int, str] = {}
        t.hashes = [structural_hash(node, cache) for node in t.nodes]
        return t

    def __len__(self):
        return len(self.nodes)

    def descendants(self, i: int) -> range:
        # pre-order numbering makes every subtree a contiguous range
        return range(i, i + self.size[i])


@dataclass
class TreeDiff:
    old: IndexedTree
    new: IndexedTree
    old_to_new: dict[int, int]
    new_to_old: dict[int, int]
    old_labels: list[Operation]
    new_labels: list[Operation]


MIN_HEIGHT = 2
MIN_CHILD_RATIO = 0.5


def _relpos(i: int, n: int) -> float:
    return i / max(n - 1, 1)


def tree_diff(old: AstNode, new: AstNode) -> TreeDiff:
    a, b = IndexedTree.build(old), IndexedTree.build(new)
    o2n: dict[int, int] = {}
    n2o: dict[int, int] = {}

    def link(i: int, j: int):
        o2n[i] = j
        n2o[j] = i

    # phase 1: identical subtrees, largest first
    by_hash: dict[str, list[int]] = defaultdict(list)
    for j in range(len(b)):
        if b.height[j] >= MIN_HEIGHT:
            by_hash[b.hashes[j]].append(j)
    for i in sorted(range(len(a)), key=lambda i: (-a.size[i], i)):
        if i in o2n or a.height[i] < MIN_HEIGHT:
            continue
        candidates = [j for j in by_hash.get(a.hashes[i], ()) if j not in n2o]
        if not candidates:
            continue
        j = min(candidates, key=lambda j: (abs(_relpos(i, len(a)) - _relpos(j, len(b))), j))
        for di, dj in zip(a.descendants(i), b.descendants(j)):
            link(di, dj)

    # phase 2: bottom-up on inner nodes
    for i in range(len(a) - 1, -1, -1):  # reverse pre-order visits children first
        if i in o2n or not a.children[i]:
            continue
        node_type = a.nodes[i].node_type
        votes: dict[int, int] = defaultdict(int)
        for c in a.children[i]:
            partner = o2n.get(c)
            if partner is not None:
                p = b.parent[partner]
                if p is not None and p not in n2o and b.nodes[p].node_type is node_type:
                    votes[p] += 1
        best = None
        for j, count in votes.items():
            ratio = count / max(len(a.children[i]), len(b.children[j]))
            if ratio < MIN_CHILD_RATIO:
                continue
            key = (-ratio, abs(_relpos(i, len(a)) - _relpos(j, len(b))), j)
            if best is None or key < best[0]:
                best = (key, j)
        if best is not None:
            link(i, best[1])

    if 0 not in o2n and 0 not in n2o and a.nodes[0].node_type is b.nodes[0].node_type:
        link(0, 0)

    # phase 3: recovery below matched pairs
    work = sorted(o2n.items())
    while work:
        i, j = work.pop(0)
        left = [c for c in a.children[i] if c not in o2n]
        right = [c for c in b.children[j] if c not in n2o]
        for ci, cj in _align_children(a, b, left, right):
            link(ci, cj)
            work.append((ci, cj))

    old_labels = []
    for i, node in enumerate(a.nodes):
        if i not in o2n:
            old_labels.append(Operation.DEL)
        elif node.value != b.nodes[o2n[i]].value:
            old_labels.append(Operation.UPDATE)
        else:
            old_labels.append(Operation.KEEP)
    new_labels = []
    for j, node in enumerate(b.nodes):
        if j not in n2o:
            new_labels.append(Operation.INSERT)
        else:
            new_labels.append(old_labels[n2o[j]])
    return TreeDiff(a, b, o2n, n2o, old_labels, new_labels)


def _align_children(a: IndexedTree, b: IndexedTree, left: list[int], right: list[int]) -> list[tuple[int, int]]:
    """Weighted LCS over child lists: same type scores 1, same type and value 2."""
    if not left or not right:
        return []

    def weight(i: int, j: int) -> int:
        x, y = a.nodes[i], b.nodes[j]
        if x.node_type is not y.node_type or bool(x.children) != bool(y.children):
            return 0
        return 2 if x.value == y.value else 1

    n, m = len(left), len(right)
    best = [[0] * (m + 1) for _ in range(n + 1)]
    for p in range(n - 1, -1, -1):
        for q in range(m - 1, -1, -1):
            w = weight(left[p], right[q])
            diag = best[p + 1][q + 1] + w if w else 0
            best[p][q] = max(best[p + 1][q], best[p][q + 1], diag)
    pairs = []
    p = q = 0
    while p < n and q < m:
        w = weight(left[p], right[q])
        if w and best[p][q] == best[p + 1][q + 1] + w:
            pairs.append((left[p], right[q]))
            p += 1
            q += 1
        elif best[p + 1][q] >= best[p][q + 1]:
            p += 1
        else:
            q += 1
    return pairs
