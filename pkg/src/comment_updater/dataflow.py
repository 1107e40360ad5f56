"""Optimistic, pattern-based def-use extraction.

Each variable occurrence is classified by the innermost construct around it:

  Output  MethodParameter       f(T e1, ..., T en) declaration sites (also catch/for-each variables)
          PostfixExpression     e++ / e--
          Assignment(left-hand) v = e, v op= e, T v = e
  Input   PrefixExpression      !e, -e, ++e, (T) e
          InfixExpression       e1 < e2, c ? e1 : e2, ...
          PostfixExpression     e++ / e--
          ContainerAccess       e1[e2]
          MethodInvocation      e.f(e1, ..., en)
          ReturnStatement       return e
          Assignment(right-hand)

Anything else (bare conditions, method names, uninitialised declarations)
is killed.  Occurrences are ordered by evaluation: a right-hand side is read
before its target is written, and a postfix operand is read then written.
Each Input is linked to the nearest preceding Output of the same name, and
every assignment also links its right-hand variables to its target.  Branches
and loops are flattened into one pass.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable

from .syntax.ast import AstNode, NodeType, assigned_variable, is_variable
from .syntax.change_graph import ChangeGraph


class Direction(str, enum.Enum):
    OUTPUT = "Output"
    INPUT = "Input"


class Pattern(str, enum.Enum):
    METHOD_PARAMETER = "MethodParameter"
    POSTFIX = "PostfixExpression"
    ASSIGNMENT_LEFT = "Assignment(left-hand)"
    PREFIX = "PrefixExpression"
    INFIX = "InfixExpression"
    CONTAINER_ACCESS = "ContainerAccess"
    METHOD_INVOCATION = "MethodInvocation"
    RETURN = "ReturnStatement"
    ASSIGNMENT_RIGHT = "Assignment(right-hand)"


OUTPUT_PATTERNS = frozenset({Pattern.METHOD_PARAMETER, Pattern.POSTFIX, Pattern.ASSIGNMENT_LEFT})
INPUT_PATTERNS = frozenset(set(Pattern) - {Pattern.METHOD_PARAMETER, Pattern.ASSIGNMENT_LEFT})

_INPUT_CONTEXT = {
    NodeType.PREFIX: Pattern.PREFIX,
    NodeType.INFIX: Pattern.INFIX,
    NodeType.CONTAINER_ACCESS: Pattern.CONTAINER_ACCESS,
    NodeType.METHOD_INVOCATION: Pattern.METHOD_INVOCATION,
    NodeType.RETURN: Pattern.RETURN,
    NodeType.POSTFIX: Pattern.POSTFIX,
}


class Version(str, enum.Enum):
    OLD = "OldVersion"
    NEW = "NewVersion"


@dataclass(frozen=True)
class FlowOccurrence:
    node: int  # pre-order index in the version's AST
    name: str
    direction: Direction
    pattern: Pattern
    version: Version = Version.OLD
    # for an assignment target: the right-hand variable occurrences feeding it
    sources: tuple[int, ...] = ()

    def __post_init__(self):
        allowed = OUTPUT_PATTERNS if self.direction is Direction.OUTPUT else INPUT_PATTERNS
        if self.pattern not in allowed:
            raise ValueError(f"{self.pattern} is not a {self.direction} pattern")


@dataclass
class DependencyGraph:
    edges: set[tuple[int, int]] = field(default_factory=set)
    version: Version | None = None  # None once both versions are merged

    def to_list(self) -> list[list[int]]:
        return sorted([a, b] for a, b in self.edges)


class _Classifier:
    def __init__(self, root: AstNode, version: Version):
        self.index = {id(n): i for i, n in enumerate(root.walk())}
        self.version = version
        self.out: list[FlowOccurrence] = []

    def emit(self, node: AstNode, direction: Direction, pattern: Pattern, sources=()) -> FlowOccurrence:
        occ = FlowOccurrence(self.index[id(node)], node.value, direction, pattern, self.version, tuple(sources))
        self.out.append(occ)
        return occ

    def visit(self, node: AstNode, ctx: Pattern | None = None):
        """``ctx`` is the Input pattern a bare variable child would take."""
        if is_variable(node):
            if ctx is not None:
                self.emit(node, Direction.INPUT, ctx)
            return
        t = node.node_type
        if t is NodeType.ASSIGNMENT or (t is NodeType.VARIABLE_DECLARATION and node.child("rhs") is not None):
            self.assignment(node)
        elif t is NodeType.VARIABLE_DECLARATION:
            for c in node.children:
                if c.role != "lhs":
                    self.visit(c)
        elif t is NodeType.PARAMETER:
            name = node.child("name")
            if name is not None:
                self.emit(name, Direction.OUTPUT, Pattern.METHOD_PARAMETER)
        elif t is NodeType.POSTFIX:
            operand = node.children[0]
            self.visit(operand, Pattern.POSTFIX)
            target = assigned_variable(operand)
            if target is not None:
                self.emit(target, Direction.OUTPUT, Pattern.POSTFIX)
        elif t is NodeType.FOR and node.value == "each":
            var, iterable, *rest = node.children
            self.visit(iterable)
            self.visit(var)
            for c in rest:
                self.visit(c)
        elif t is NodeType.METHOD_INVOCATION:
            for c in node.children:
                if c.role != "name":  # method names carry no data
                    self.visit(c, Pattern.METHOD_INVOCATION)
        elif t is NodeType.METHOD_DECLARATION:
            for c in node.children:
                if c.role != "name":
                    self.visit(c)
        elif t is NodeType.FIELD_ACCESS:
            for c in node.children:
                self.visit(c, ctx)
        else:
            child_ctx = _INPUT_CONTEXT.get(t)
            for c in node.children:
                self.visit(c, child_ctx)

    def assignment(self, node: AstNode):
        lhs, rhs = node.child("lhs"), node.child("rhs")
        start = len(self.out)
        self.visit(rhs, Pattern.ASSIGNMENT_RIGHT)
        sources = [o.node for o in self.out[start:]]
        target = assigned_variable(lhs)
        if lhs is not target:
            # v[i] = e reads the index, f().x = e evaluates the target expression
            if lhs.node_type is NodeType.CONTAINER_ACCESS:
                for c in lhs.children:
                    if c.role != "container":
                        self.visit(c, Pattern.CONTAINER_ACCESS)
                container = lhs.child("container")
                if container is not None and container is not target:
                    self.visit(container, Pattern.CONTAINER_ACCESS)
            else:
                self.visit(lhs)
        if target is not None:
            self.emit(target, Direction.OUTPUT, Pattern.ASSIGNMENT_LEFT, sources)


def classify_flow_occurrences(ast: AstNode, version: Version = Version.OLD) -> list[FlowOccurrence]:
    """Classified variable occurrences in evaluation order."""
    c = _Classifier(ast, version)
    c.visit(ast)
    return c.out


def link_flows(occurrences: Iterable[FlowOccurrence]) -> DependencyGraph:
    graph = DependencyGraph()
    latest: dict[str, int] = {}
    for occ in occurrences:
        graph.version = occ.version
        if occ.direction is Direction.INPUT:
            if occ.name in latest:
                graph.edges.add((latest[occ.name], occ.node))
        else:
            graph.edges.update((src, occ.node) for src in occ.sources)
            latest[occ.name] = occ.node
    return graph


def build_dependency_graph(old_ast: AstNode, new_ast: AstNode, change_graph: ChangeGraph) -> DependencyGraph:
    """Union of both versions' flows, re-indexed onto change-graph nodes."""
    merged = DependencyGraph()
    for ast, version, index in (
        (old_ast, Version.OLD, change_graph.old_index),
        (new_ast, Version.NEW, change_graph.new_index),
    ):
        for a, b in link_flows(classify_flow_occurrences(ast, version)).edges:
            if a in index and b in index:
                merged.edges.add((index[a], index[b]))
    return merged
