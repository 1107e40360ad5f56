from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass, field
from typing import Iterator


class NodeType(str, enum.Enum):
    METHOD_DECLARATION = "MethodDeclaration"
    PARAMETER = "Parameter"
    BLOCK = "Block"
    IF = "IfStatement"
    WHILE = "WhileStatement"
    FOR = "ForStatement"
    RETURN = "ReturnStatement"
    EXPRESSION_STATEMENT = "ExpressionStatement"
    ASSIGNMENT = "Assignment"
    INFIX = "InfixExpression"
    PREFIX = "PrefixExpression"
    POSTFIX = "PostfixExpression"
    METHOD_INVOCATION = "MethodInvocation"
    CONTAINER_ACCESS = "ContainerAccess"
    SIMPLE_NAME = "SimpleName"
    LITERAL = "Literal"
    VARIABLE_DECLARATION = "VariableDeclaration"
    FIELD_ACCESS = "FieldAccess"

    def __str__(self):
        return self.value


STATEMENT_TYPES = frozenset(
    {
        NodeType.METHOD_DECLARATION,
        NodeType.PARAMETER,
        NodeType.IF,
        NodeType.WHILE,
        NodeType.FOR,
        NodeType.RETURN,
        NodeType.EXPRESSION_STATEMENT,
        NodeType.VARIABLE_DECLARATION,
    }
)


@dataclass(eq=False)
class AstNode:
    node_type: NodeType
    value: str | None = None
    children: list[AstNode] = field(default_factory=list)
    span: tuple[int, int] = (0, 0)
    # syntactic slot in the parent: name, lhs, rhs, receiver, arg, cond, ...
    role: str | None = None

    def __repr__(self):
        inner = f"{self.node_type.value}"
        if self.value is not None:
            inner += f" {self.value!r}"
        if self.children:
            inner += " [" + ", ".join(map(repr, self.children)) + "]"
        return f"({inner})"

    def walk(self) -> Iterator[AstNode]:
        """Pre-order traversal."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def walk_with_parents(self, parent: AstNode | None = None) -> Iterator[tuple[AstNode, AstNode | None]]:
        yield self, parent
        for c in self.children:
            yield from c.walk_with_parents(self)

    def to_dict(self) -> dict:
        d = {"type": self.node_type.value}
        if self.value is not None:
            d["value"] = self.value
        if self.role is not None:
            d["role"] = self.role
        if self.children:
            d["children"] = [c.to_dict() for c in self.children]
        return d

    def child(self, role: str) -> AstNode | None:
        for c in self.children:
            if c.role == role:
                return c
        return None


def is_variable(node: AstNode) -> bool:
    """Variable nodes: simple names (incl. method names) and dotted field chains."""
    if node.node_type is NodeType.SIMPLE_NAME:
        return True
    return node.node_type is NodeType.FIELD_ACCESS and not node.children


def structural_hash(node: AstNode, cache: dict[int, str] | None = None) -> str:
    if cache is not None and id(node) in cache:
        return cache[id(node)]
    h = hashlib.sha1()
    h.update(node.node_type.value.encode())
    h.update(b"\0" + (node.value or "").encode() + b"\0" + (node.role or "").encode())
    for c in node.children:
        h.update(structural_hash(c, cache).encode())
    digest = h.hexdigest()
    if cache is not None:
        cache[id(node)] = digest
    return digest


def assignment_operands(node: AstNode) -> tuple[AstNode, AstNode] | None:
    """``(lhs, rhs)`` for assignments and initialised declarations."""
    if node.node_type in (NodeType.ASSIGNMENT, NodeType.VARIABLE_DECLARATION):
        lhs, rhs = node.child("lhs"), node.child("rhs")
        if lhs is not None and rhs is not None:
            return lhs, rhs
    return None


def assigned_variable(lhs: AstNode) -> AstNode | None:
    """The variable written by an assignment target (``v`` in ``v = e`` or ``v[i] = e``)."""
    if is_variable(lhs):
        return lhs
    if lhs.node_type is NodeType.CONTAINER_ACCESS:
        container = lhs.child("container")
        if container is not None:
            return assigned_variable(container)
    return None
