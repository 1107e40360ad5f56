"""Recursive-descent parser for the subset of Java found in method bodies.

Constructs outside the subset (lambdas, anonymous classes, method
references, local classes, labelled/assert statements) become opaque
ExpressionStatement leaves whose value is their space-joined token text.
"""

from __future__ import annotations

from ..tokenizer import LexicalError, Token, tokenize_code
from .ast import AstNode, NodeType

MODIFIERS = frozenset(
    "public protected private static final abstract native synchronized transient volatile strictfp default".split()
)
PRIMITIVES = frozenset("boolean byte char short int long float double void var".split())
ASSIGN_OPS = frozenset("= += -= *= /= %= &= |= ^= <<= >>= >>>=".split())
BINARY_PRECEDENCE = {
    "||": 1,
    "&&": 2,
    "|": 3,
    "^": 4,
    "&": 5,
    "==": 6,
    "!=": 6,
    "<": 7,
    ">": 7,
    "<=": 7,
    ">=": 7,
    "instanceof": 7,
    "<<": 8,
    ">>": 8,
    ">>>": 8,
    "+": 9,
    "-": 9,
    "*": 10,
    "/": 10,
    "%": 10,
}
PREFIX_OPS = frozenset("+ - ! ~ ++ --".split())


class ParseError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class _Parser:
    def __init__(self, tokens: list[Token], source: str):
        self.toks = tokens
        self.src = source
        self.pos = 0

    # -- token helpers ------------------------------------------------------

    def peek(self, k: int = 0) -> Token | None:
        i = self.pos + k
        return self.toks[i] if i < len(self.toks) else None

    def text(self, k: int = 0) -> str | None:
        t = self.peek(k)
        return t.text if t is not None else None

    def at(self, *texts: str) -> bool:
        return self.text() in texts

    @property
    def eof(self) -> bool:
        return self.pos >= len(self.toks)

    def offset(self) -> int:
        t = self.peek()
        return t.span[0] if t is not None else len(self.src)

    def error(self, message: str) -> ParseError:
        found = self.text()
        return ParseError(f"{message}, found {found!r}" if found else f"{message}, found end of input", self.offset())

    def advance(self) -> Token:
        t = self.peek()
        if t is None:
            raise self.error("unexpected end of input")
        self.pos += 1
        return t

    def accept(self, text: str) -> bool:
        if self.text() == text:
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if self.text() != text:
            raise self.error(f"expected {text!r}")
        return self.advance()

    def ident(self) -> Token:
        t = self.peek()
        if t is None or t.category != "ident":
            raise self.error("expected identifier")
        self.pos += 1
        return t

    def is_ident(self, k: int = 0) -> bool:
        t = self.peek(k)
        return t is not None and t.category == "ident"

    def span_from(self, start: int) -> tuple[int, int]:
        first = self.toks[start] if start < len(self.toks) else self.toks[-1]
        last = self.toks[max(self.pos - 1, start)] if self.pos > start else first
        return (first.span[0], last.span[1])

    def node(self, start: int, node_type: NodeType, value=None, children=(), role=None) -> AstNode:
        return AstNode(node_type, value, list(children), self.span_from(start), role)

    def opaque(self, start: int, role=None) -> AstNode:
        text = " ".join(t.text for t in self.toks[start : self.pos])
        return self.node(start, NodeType.EXPRESSION_STATEMENT, text, role=role)

    def split_angle(self):
        """Split a leading '>' off tokens like '>>' when closing type arguments."""
        t = self.peek()
        if t is not None and t.text.startswith(">") and t.text != ">":
            a, b = t.span
            self.toks[self.pos : self.pos + 1] = [
                Token(">", t.kind, (a, a + 1), "op"),
                Token(t.text[1:], t.kind, (a + 1, b), "op"),
            ]

    def skip_balanced(self, open_: str, close: str):
        self.expect(open_)
        depth = 1
        while depth:
            t = self.advance()
            if t.text == open_:
                depth += 1
            elif t.text == close:
                depth -= 1

    def speculate(self, fn):
        saved_pos, saved_toks = self.pos, list(self.toks)
        try:
            return fn()
        except ParseError:
            self.pos, self.toks = saved_pos, saved_toks
            return None

    # -- types --------------------------------------------------------------

    def annotation(self):
        self.expect("@")
        self.ident()
        while self.at(".") and self.is_ident(1):
            self.pos += 2
        if self.at("("):
            self.skip_balanced("(", ")")

    def modifiers(self):
        while True:
            if self.at("@") and self.text(1) != "interface":
                self.annotation()
            elif self.text() in MODIFIERS:
                self.pos += 1
            else:
                return

    def type_args(self):
        self.expect("<")
        if self.accept(">"):
            return
        while True:
            while self.at("@"):
                self.annotation()
            if self.accept("?"):
                if self.at("extends", "super"):
                    self.pos += 1
                    self.type_()
            else:
                self.type_()
            if not self.accept(","):
                break
        self.split_angle()
        self.expect(">")

    def type_params(self):
        self.expect("<")
        while True:
            while self.at("@"):
                self.annotation()
            self.ident()
            if self.accept("extends"):
                self.type_()
                while self.accept("&"):
                    self.type_()
            if not self.accept(","):
                break
        self.split_angle()
        self.expect(">")

    def type_(self) -> str:
        start = self.pos
        while self.at("@"):
            self.annotation()
        t = self.peek()
        if t is None or not (t.category == "ident" or t.text in PRIMITIVES):
            raise self.error("expected type")
        self.pos += 1
        if self.at("<"):
            self.type_args()
        while self.at(".") and self.is_ident(1):
            self.pos += 2
            if self.at("<"):
                self.type_args()
        while self.at("[") and self.text(1) == "]":
            self.pos += 2
        return "".join(tok.text for tok in self.toks[start : self.pos] if tok.text != "@")

    # -- declarations -------------------------------------------------------

    def method_declaration(self) -> AstNode:
        start = self.pos
        self.modifiers()
        if self.at("<"):
            self.type_params()
        if self.is_ident() and self.text(1) == "(":
            return_type = None  # constructor
        else:
            return_type = self.type_()
        name_tok = self.ident()
        name = AstNode(NodeType.SIMPLE_NAME, name_tok.text, [], name_tok.span, "name")
        self.expect("(")
        params = []
        while not self.at(")"):
            params.append(self.parameter())
            if not self.accept(","):
                break
        self.expect(")")
        while self.at("[") and self.text(1) == "]":
            self.pos += 2
        if self.accept("throws"):
            self.type_()
            while self.accept(","):
                self.type_()
        children = [name, *params]
        if not self.accept(";"):
            children.append(self.block())
        return self.node(start, NodeType.METHOD_DECLARATION, return_type, children)

    def parameter(self, role="param") -> AstNode:
        start = self.pos
        self.modifiers()
        type_text = self.type_()
        if self.accept("..."):
            type_text += "..."
        name_tok = self.ident()
        while self.at("[") and self.text(1) == "]":
            self.pos += 2
        name = AstNode(NodeType.SIMPLE_NAME, name_tok.text, [], name_tok.span, "name")
        return self.node(start, NodeType.PARAMETER, type_text, [name], role)

    def local_var_decl(self) -> list[AstNode]:
        """``Type a = e, b;`` without the trailing semicolon."""
        start = self.pos
        self.modifiers()
        type_text = self.type_()
        if not self.is_ident():
            raise self.error("expected variable name")
        decls = []
        while True:
            d_start = self.pos
            name_tok = self.ident()
            while self.at("[") and self.text(1) == "]":
                self.pos += 2
            name = AstNode(NodeType.SIMPLE_NAME, name_tok.text, [], name_tok.span, "lhs")
            children = [name]
            if self.accept("="):
                init = self.array_initializer() if self.at("{") else self.expression()
                init.role = "rhs"
                children.append(init)
            decls.append(self.node(d_start if decls else start, NodeType.VARIABLE_DECLARATION, type_text, children))
            if not self.accept(","):
                return decls

    def try_local_var_decl(self, terminators=(";",)) -> list[AstNode] | None:
        def attempt():
            decls = self.local_var_decl()
            if not self.at(*terminators):
                raise self.error("not a declaration")
            return decls

        return self.speculate(attempt)

    # -- statements ---------------------------------------------------------

    def block(self, value=None) -> AstNode:
        start = self.pos
        self.expect("{")
        stmts = []
        while not self.at("}"):
            if self.eof:
                raise self.error("expected '}'")
            stmts.extend(self.statement())
        self.expect("}")
        return self.node(start, NodeType.BLOCK, value, stmts)

    def sub_statement(self, role: str) -> AstNode:
        start = self.pos
        stmts = self.statement()
        node = stmts[0] if len(stmts) == 1 else self.node(start, NodeType.BLOCK, None, stmts)
        node.role = role
        return node

    def paren_expression(self, role="cond") -> AstNode:
        self.expect("(")
        e = self.expression()
        e.role = role
        self.expect(")")
        return e

    def statement(self) -> list[AstNode]:
        start = self.pos
        t = self.text()
        if t is None:
            raise self.error("expected statement")
        if t == "{":
            return [self.block()]
        if t == ";":
            self.pos += 1
            return []
        if t == "if":
            self.pos += 1
            children = [self.paren_expression(), self.sub_statement("then")]
            if self.accept("else"):
                children.append(self.sub_statement("else"))
            return [self.node(start, NodeType.IF, None, children)]
        if t == "while":
            self.pos += 1
            cond = self.paren_expression()
            body = self.sub_statement("body")
            return [self.node(start, NodeType.WHILE, None, [cond, body])]
        if t == "do":
            self.pos += 1
            body = self.sub_statement("body")
            self.expect("while")
            cond = self.paren_expression()
            self.expect(";")
            return [self.node(start, NodeType.WHILE, "do", [body, cond])]
        if t == "for":
            return [self.for_statement()]
        if t == "return":
            self.pos += 1
            children = []
            if not self.at(";"):
                children.append(self.expression())
            self.expect(";")
            return [self.node(start, NodeType.RETURN, None, children)]
        if t == "throw":
            self.pos += 1
            e = self.expression()
            self.expect(";")
            return [self.node(start, NodeType.EXPRESSION_STATEMENT, "throw", [e])]
        if t in ("break", "continue"):
            self.pos += 1
            if self.is_ident():
                self.pos += 1
            self.expect(";")
            return [self.node(start, NodeType.EXPRESSION_STATEMENT, t)]
        if t == "try":
            return [self.try_statement()]
        if t == "switch" and self.text(1) == "(":
            return [self.switch_statement()]
        if t == "synchronized" and self.text(1) == "(":
            self.pos += 1
            lock = self.paren_expression("lock")
            return [self.node(start, NodeType.BLOCK, "synchronized", [lock, self.block()])]
        if self.is_ident() and self.text(1) == ":":
            self.pos += 2  # label
            return self.statement()
        if (
            t in ("class", "interface", "enum", "assert")
            or (t == "record" and self.is_ident(1))
            or (t == "yield" and self.text(1) not in ASSIGN_OPS | {".", "(", "[", "++", "--", ";"})
            or (t in MODIFIERS and self.text(1) in ("class", "interface", "enum"))
        ):
            return [self.opaque_statement()]

        decls = self.try_local_var_decl()
        if decls is not None:
            self.expect(";")
            return decls
        e = self.expression()
        self.expect(";")
        return [self.node(start, NodeType.EXPRESSION_STATEMENT, None, [e])]

    def opaque_statement(self) -> AstNode:
        start = self.pos
        depth = 0
        while True:
            t = self.advance()
            if t.text in ("(", "[", "{"):
                depth += 1
            elif t.text in (")", "]", "}"):
                depth -= 1
                if depth == 0 and t.text == "}" and self.toks[start].text != "assert":
                    break
            elif t.text == ";" and depth == 0:
                break
        return self.opaque(start)

    def for_statement(self) -> AstNode:
        start = self.pos
        self.expect("for")
        self.expect("(")

        def enhanced():
            var_start = self.pos
            self.modifiers()
            type_text = self.type_()
            name_tok = self.ident()
            self.expect(":")
            name = AstNode(NodeType.SIMPLE_NAME, name_tok.text, [], name_tok.span, "name")
            return self.node(var_start, NodeType.PARAMETER, type_text, [name], "var")

        var = self.speculate(enhanced)
        if var is not None:
            iterable = self.expression()
            iterable.role = "iterable"
            self.expect(")")
            body = self.sub_statement("body")
            return self.node(start, NodeType.FOR, "each", [var, iterable, body])

        children = []
        if not self.at(";"):
            decls = self.try_local_var_decl()
            if decls is None:
                decls = [self.expression()]
                while self.accept(","):
                    decls.append(self.expression())
            for d in decls:
                d.role = "init"
            children.extend(decls)
        self.expect(";")
        if not self.at(";"):
            children.append(self.expression())
            children[-1].role = "cond"
        self.expect(";")
        while not self.at(")"):
            u = self.expression()
            u.role = "update"
            children.append(u)
            if not self.accept(","):
                break
        self.expect(")")
        children.append(self.sub_statement("body"))
        return self.node(start, NodeType.FOR, None, children)

    def try_statement(self) -> AstNode:
        start = self.pos
        self.expect("try")
        children = []
        if self.accept("("):
            while not self.at(")"):
                decls = self.try_local_var_decl((";", ")"))
                if decls is None:
                    decls = [self.expression()]
                for d in decls:
                    d.role = "resource"
                children.extend(decls)
                if not self.accept(";"):
                    break
            self.expect(")")
        children.append(self.block())
        while self.at("catch"):
            c_start = self.pos
            self.pos += 1
            self.expect("(")
            p_start = self.pos
            self.modifiers()
            type_text = self.type_()
            while self.accept("|"):
                type_text += "|" + self.type_()
            name_tok = self.ident()
            name = AstNode(NodeType.SIMPLE_NAME, name_tok.text, [], name_tok.span, "name")
            param = self.node(p_start, NodeType.PARAMETER, type_text, [name], "param")
            self.expect(")")
            body = self.block()
            children.append(self.node(c_start, NodeType.BLOCK, "catch", [param, body]))
        if self.at("finally"):
            self.pos += 1
            fin = self.block()
            fin.value = "finally"
            children.append(fin)
        if len(children) < 2 and not self.toks[start + 1].text == "(":
            raise self.error("try without catch or finally")
        return self.node(start, NodeType.BLOCK, "try", children)

    def switch_statement(self) -> AstNode:
        start = self.pos
        self.expect("switch")
        subject = self.paren_expression("subject")
        b_start = self.pos
        self.expect("{")
        stmts = []
        while not self.at("}"):
            if self.eof:
                raise self.error("expected '}'")
            if self.at("case", "default"):
                depth = 0
                while True:
                    t = self.advance()
                    if t.text in ("(", "["):
                        depth += 1
                    elif t.text in (")", "]"):
                        depth -= 1
                    elif depth == 0 and t.text in (":", "->"):
                        break
                continue
            stmts.extend(self.statement())
        self.expect("}")
        body = self.node(b_start, NodeType.BLOCK, None, stmts, "body")
        return self.node(start, NodeType.IF, "switch", [subject, body])

    # -- expressions --------------------------------------------------------

    def expression(self) -> AstNode:
        start = self.pos
        lhs = self.ternary()
        if self.text() in ASSIGN_OPS:
            op = self.advance().text
            rhs = self.expression()
            lhs.role, rhs.role = "lhs", "rhs"
            return self.node(start, NodeType.ASSIGNMENT, op, [lhs, rhs])
        return lhs

    def ternary(self) -> AstNode:
        start = self.pos
        cond = self.binary(1)
        if not self.accept("?"):
            return cond
        a = self.lambda_or(self.ternary)
        self.expect(":")
        b = self.lambda_or(self.ternary)
        cond.role, a.role, b.role = "cond", "then", "else"
        return self.node(start, NodeType.INFIX, "?:", [cond, a, b])

    def lambda_or(self, fn):
        lam = self.try_lambda()
        return lam if lam is not None else fn()

    def binary(self, min_prec: int) -> AstNode:
        start = self.pos
        left = self.unary()
        while True:
            op = self.text()
            prec = BINARY_PRECEDENCE.get(op)
            if prec is None or prec < min_prec:
                return left
            self.pos += 1
            if op == "instanceof":
                t_start = self.pos
                self.accept("final")
                type_text = self.type_()
                right = self.node(t_start, NodeType.LITERAL, type_text, role="type")
                if self.is_ident():  # pattern binding
                    self.pos += 1
            else:
                right = self.binary(prec + 1)
            left.role = "left"
            if right.role != "type":
                right.role = "right"
            left = self.node(start, NodeType.INFIX, op, [left, right])

    def is_cast(self) -> bool:
        if not self.at("("):
            return False
        save = self.pos

        def attempt():
            self.expect("(")
            type_text = self.type_()
            while self.accept("&"):
                self.type_()
            self.expect(")")
            return type_text

        type_text = self.speculate(attempt)
        if type_text is None:
            return False
        nxt = self.peek()
        self.pos = save
        if nxt is None:
            return False
        if type_text in PRIMITIVES or type_text.rstrip("[]") in PRIMITIVES:
            return nxt.text not in BINARY_PRECEDENCE or nxt.text in ("+", "-")
        return nxt.category in ("ident", "number", "string", "char", "literal") or nxt.text in (
            "(",
            "!",
            "~",
            "this",
            "new",
            "super",
        )

    def unary(self) -> AstNode:
        start = self.pos
        t = self.text()
        if t in PREFIX_OPS:
            self.pos += 1
            operand = self.unary()
            operand.role = "operand"
            return self.node(start, NodeType.PREFIX, t, [operand])
        if self.is_cast():
            self.expect("(")
            type_text = self.type_()
            while self.accept("&"):
                type_text += "&" + self.type_()
            self.expect(")")
            operand = self.lambda_or(self.unary)
            operand.role = "operand"
            return self.node(start, NodeType.PREFIX, f"({type_text})", [operand])
        e = self.postfix()
        return e

    def postfix(self) -> AstNode:
        start = self.pos
        e = self.selectors(self.primary())
        while self.at("++", "--"):
            op = self.advance().text
            e.role = "operand"
            e = self.node(start, NodeType.POSTFIX, op, [e])
        return e

    def arguments(self) -> list[AstNode]:
        self.expect("(")
        args = []
        while not self.at(")"):
            a = self.lambda_or(self.expression)
            a.role = "arg"
            args.append(a)
            if not self.accept(","):
                break
        self.expect(")")
        return args

    def try_lambda(self) -> AstNode | None:
        start = self.pos
        if self.is_ident() and self.text(1) == "->":
            self.pos += 1
        elif self.at("("):
            depth = 0
            i = self.pos
            while i < len(self.toks):
                if self.toks[i].text == "(":
                    depth += 1
                elif self.toks[i].text == ")":
                    depth -= 1
                    if depth == 0:
                        break
                i += 1
            if i + 1 >= len(self.toks) or self.toks[i + 1].text != "->":
                return None
            self.pos = i + 1
        else:
            return None
        self.expect("->")
        if self.at("{"):
            self.skip_balanced("{", "}")
        else:
            self.expression()
        return self.opaque(start)

    def primary(self) -> AstNode:
        start = self.pos
        lam = self.try_lambda()
        if lam is not None:
            return lam
        t = self.peek()
        if t is None:
            raise self.error("expected expression")
        if t.category in ("number", "string", "char", "literal"):
            self.pos += 1
            return self.node(start, NodeType.LITERAL, t.text)
        if t.text == "(":
            self.pos += 1
            e = self.expression()
            self.expect(")")
            return e
        if t.text == "new":
            return self.creator()
        if t.text == "switch":
            self.pos += 1
            self.skip_balanced("(", ")")
            self.skip_balanced("{", "}")
            return self.opaque(start)
        if t.text in ("this", "super"):
            self.pos += 1
            if self.at("("):
                args = self.arguments()
                return self.node(start, NodeType.METHOD_INVOCATION, t.text, args)
            return self.node(start, NodeType.SIMPLE_NAME, t.text)
        if t.text in PRIMITIVES:
            self.type_()
            self.expect(".")
            self.expect("class")
            return self.opaque(start)
        if t.category == "ident":
            self.pos += 1
            if self.at("("):
                name = AstNode(NodeType.SIMPLE_NAME, t.text, [], t.span, "name")
                args = self.arguments()
                return self.node(start, NodeType.METHOD_INVOCATION, t.text, [name, *args])
            if self.at("[") and self.text(1) == "]":  # Type[].class / Type[]::new
                while self.at("[") and self.text(1) == "]":
                    self.pos += 2
                if self.accept("::"):
                    self.advance()
                else:
                    self.expect(".")
                    self.expect("class")
                return self.opaque(start)
            return self.node(start, NodeType.SIMPLE_NAME, t.text)
        if t.text == "{":
            return self.array_initializer()
        raise self.error("expected expression")

    def array_initializer(self) -> AstNode:
        start = self.pos
        self.expect("{")
        elems = []
        while not self.at("}"):
            e = self.array_initializer() if self.at("{") else self.expression()
            e.role = "arg"
            elems.append(e)
            if not self.accept(","):
                break
        self.expect("}")
        return self.node(start, NodeType.METHOD_INVOCATION, "{}", elems)

    def creator(self) -> AstNode:
        start = self.pos
        self.expect("new")
        type_text = self.type_() if not self.at("[") else ""
        # type_ already consumed trailing "[]" pairs
        if self.at("("):
            args = self.arguments()
            if self.at("{"):  # anonymous class
                self.skip_balanced("{", "}")
                return self.opaque(start)
            return self.node(start, NodeType.METHOD_INVOCATION, f"new {type_text}", args)
        dims = []
        while self.at("["):
            self.pos += 1
            if self.accept("]"):
                type_text += "[]"
                continue
            d = self.expression()
            d.role = "arg"
            dims.append(d)
            self.expect("]")
            type_text += "[]"
        if self.at("{"):
            init = self.array_initializer()
            init.role = "arg"
            dims.append(init)
        if not type_text.endswith("]"):
            raise self.error("expected '(' or '[' after new")
        return self.node(start, NodeType.METHOD_INVOCATION, f"new {type_text}", dims)

    def selectors(self, e: AstNode) -> AstNode:
        start_span = e.span
        while True:
            if self.at("."):
                self.pos += 1
                if self.at("<"):
                    self.type_args()
                t = self.peek()
                if t is None:
                    raise self.error("expected member")
                if t.text == "class" or t.text == "new":
                    self.pos += 1
                    if t.text == "new":
                        self.creator_rest()
                    e = self.opaque_chars(start_span[0])
                    continue
                if t.text == "this" or t.category == "ident":
                    self.pos += 1
                    end = t.span[1]
                    if self.at("("):
                        e.role = "receiver"
                        name = AstNode(NodeType.SIMPLE_NAME, t.text, [], t.span, "name")
                        args = self.arguments()
                        e = AstNode(
                            NodeType.METHOD_INVOCATION,
                            t.text,
                            [e, name, *args],
                            (start_span[0], self.toks[self.pos - 1].span[1]),
                        )
                    elif e.node_type is NodeType.SIMPLE_NAME or (
                        e.node_type is NodeType.FIELD_ACCESS and not e.children
                    ):
                        e = AstNode(NodeType.FIELD_ACCESS, f"{e.value}.{t.text}", [], (start_span[0], end))
                    else:
                        e.role = "target"
                        e = AstNode(NodeType.FIELD_ACCESS, t.text, [e], (start_span[0], end))
                    continue
                raise self.error("expected member name")
            if self.at("["):
                self.pos += 1
                index = self.expression()
                self.expect("]")
                e.role, index.role = "container", "index"
                e = AstNode(NodeType.CONTAINER_ACCESS, None, [e, index], (start_span[0], self.toks[self.pos - 1].span[1]))
                continue
            if self.at("::"):
                self.pos += 1
                self.advance()
                e = self.opaque_chars(start_span[0])
                continue
            return e

    def opaque_chars(self, start_char: int) -> AstNode:
        """Opaque leaf covering ``start_char`` up to the last consumed token."""
        end = self.toks[self.pos - 1].span[1]
        text = " ".join(t.text for t in self.toks[: self.pos] if t.span[0] >= start_char)
        return AstNode(NodeType.EXPRESSION_STATEMENT, text, [], (start_char, end))

    def creator_rest(self):
        self.type_()
        if self.at("("):
            self.arguments()
            if self.at("{"):
                self.skip_balanced("{", "}")


def parse_java_subset(source: str, mode: str = "auto") -> AstNode:
    """Parse a method declaration (``mode="method"``) or a statement list.

    ``mode="auto"`` tries a method declaration first.  A single statement is
    returned as-is; several are wrapped in a Block.
    """
    try:
        tokens = tokenize_code(source)
    except LexicalError as exc:
        raise ParseError(str(exc), exc.offset) from exc
    if not tokens:
        raise ParseError("empty input", 0)

    def as_method():
        p = _Parser(list(tokens), source)
        node = p.method_declaration()
        if not p.eof:
            raise p.error("trailing input after method")
        return node

    def as_statements():
        p = _Parser(list(tokens), source)
        stmts = []
        while not p.eof:
            stmts.extend(p.statement())
        if len(stmts) == 1:
            return stmts[0]
        return AstNode(NodeType.BLOCK, None, stmts, (tokens[0].span[0], tokens[-1].span[1]))

    if mode == "method":
        return as_method()
    if mode == "statements":
        return as_statements()
    try:
        return as_method()
    except ParseError as method_error:
        try:
            return as_statements()
        except ParseError as stmt_error:
            raise max(method_error, stmt_error, key=lambda e: e.offset) from None
