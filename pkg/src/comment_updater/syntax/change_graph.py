"""Change graph over the variable nodes of two diffed ASTs."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .ast import NodeType, STATEMENT_TYPES, assigned_variable, assignment_operands, is_variable
from .diff import IndexedTree, Operation, TreeDiff


class Origin(str, enum.Enum):
    OLD = "OldVersion"
    NEW = "NewVersion"
    BOTH = "Both"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class ChangeGraphNode:
    operation: Operation
    node_type: NodeType
    value: str | None
    origin: Origin
    # pre-order index in the version the node is read from (old for Both)
    source_order: int
    new_value: str | None = None

    def __post_init__(self):
        expected = {
            Operation.DEL: Origin.OLD,
            Operation.INSERT: Origin.NEW,
            Operation.KEEP: Origin.BOTH,
            Operation.UPDATE: Origin.BOTH,
        }[self.operation]
        if self.origin is not expected:
            raise ValueError(f"{self.operation} node must have origin {expected}")


@dataclass
class ChangeGraph:
    nodes: list[ChangeGraphNode] = field(default_factory=list)
    relations: set[tuple[int, int]] = field(default_factory=set)  # A
    changed: set[int] = field(default_factory=set)  # CN
    # pre-order AST index -> graph node index, per version
    old_index: dict[int, int] = field(default_factory=dict)
    new_index: dict[int, int] = field(default_factory=dict)

    def __len__(self):
        return len(self.nodes)

    def to_dict(self) -> dict:
        return {
            "nodes": [
                {
                    "operation": n.operation.value,
                    "type": n.node_type.value,
                    "value": n.value,
                    "origin": n.origin.value,
                    "order": n.source_order,
                    **({"new_value": n.new_value} if n.new_value is not None else {}),
                }
                for n in self.nodes
            ],
            "relations": sorted([i, j] for i, j in self.relations),
            "changed": sorted(self.changed),
        }


def statement_owner(tree: IndexedTree) -> list[int | None]:
    """Nearest enclosing statement (or block) of every node, the node itself included."""
    owner: list[int | None] = []
    for i, node in enumerate(tree.nodes):
        if node.node_type in STATEMENT_TYPES or node.node_type is NodeType.BLOCK:
            owner.append(i)
        else:
            p = tree.parent[i]
            owner.append(owner[p] if p is not None else None)
    return owner


def _dirty_statements(tree: IndexedTree, labels: list[Operation]) -> set[int]:
    # only the statement's own part counts, nested statements are separate
    owner = statement_owner(tree)
    return {owner[i] for i, op in enumerate(labels) if op is not Operation.KEEP and owner[i] is not None}


def build_change_graph(diff: TreeDiff) -> ChangeGraph:
    old, new = diff.old, diff.new
    g = ChangeGraph()

    for i, node in enumerate(old.nodes):
        if not is_variable(node):
            continue
        op = diff.old_labels[i]
        j = diff.old_to_new.get(i)
        new_value = new.nodes[j].value if op is Operation.UPDATE else None
        origin = Origin.OLD if j is None else Origin.BOTH
        g.old_index[i] = len(g.nodes)
        if j is not None:
            g.new_index[j] = len(g.nodes)
        g.nodes.append(ChangeGraphNode(op, node.node_type, node.value, origin, i, new_value))
    for j, node in enumerate(new.nodes):
        if is_variable(node) and j not in diff.new_to_old:
            g.new_index[j] = len(g.nodes)
            g.nodes.append(ChangeGraphNode(Operation.INSERT, node.node_type, node.value, Origin.NEW, j))

    n = len(g.nodes)
    rel = {(i, i) for i in range(n)}
    # same-value pairs are taken per version, so an updated node links to
    # its old-name peers and to its new-name peers
    for index, attr in ((g.old_index, "value"), (g.new_index, "version_value")):
        by_value: dict[str | None, list[int]] = {}
        for i in set(index.values()):
            by_value.setdefault(_value_in(g.nodes[i], attr), []).append(i)
        for group in by_value.values():
            rel.update((i, j) for i in group for j in group)
    for tree, index in ((old, g.old_index), (new, g.new_index)):
        for lhs_var, rhs_vars in _assignment_pairs(tree):
            a = index.get(lhs_var)
            if a is None:
                continue
            for r in rhs_vars:
                b = index.get(r)
                if b is not None:
                    rel.add((a, b))
                    rel.add((b, a))
    g.relations = rel

    changed = {i for i, node in enumerate(g.nodes) if node.operation is not Operation.KEEP}
    for tree, labels, index in ((old, diff.old_labels, g.old_index), (new, diff.new_labels, g.new_index)):
        owner = statement_owner(tree)
        dirty = _dirty_statements(tree, labels)
        for ast_i, graph_i in index.items():
            if owner[ast_i] in dirty:
                changed.add(graph_i)
    g.changed = changed
    return g


def _value_in(node: ChangeGraphNode, attr: str) -> str | None:
    if attr == "value" or node.new_value is None:
        return node.value
    return node.new_value


def _assignment_pairs(tree: IndexedTree):
    ids = {id(node): i for i, node in enumerate(tree.nodes)}
    for node in tree.nodes:
        ops = assignment_operands(node)
        if ops is None:
            continue
        lhs, rhs = ops
        target = assigned_variable(lhs)
        if target is None:
            continue
        yield ids[id(target)], [ids[id(m)] for m in rhs.walk() if is_variable(m)]
