"""Lexing of Java code and cleaning of Javadoc-style comments.

Code is split into lexer tokens (identifiers, literals, operators,
punctuation, keywords); comments are stripped of delimiters and HTML
tags and split on whitespace.  Compound identifiers are then broken into
camelCase / snake_case subtokens.  Nothing is lowercased.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence


class TokenKind(enum.Enum):
    CODE = "CodeToken"
    COMMENT_WORD = "CommentWord"
    EDIT_KEYWORD = "EditKeyword"
    SENTINEL = "Sentinel"


@dataclass(frozen=True)
class Token:
    text: str
    kind: TokenKind = TokenKind.CODE
    span: tuple[int, int] | None = None
    # lexical class for code tokens: ident, keyword, number, string, char, op
    category: str | None = None

    def __post_init__(self):
        if not self.text and self.kind is not TokenKind.SENTINEL:
            raise ValueError("empty token text")


class LexicalError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


JAVA_KEYWORDS = frozenset(
    """abstract assert boolean break byte case catch char class const continue
    default do double else enum extends final finally float for goto if
    implements import instanceof int interface long native new package private
    protected public return short static strictfp super switch synchronized
    this throw throws transient try void volatile while var""".split()
)
LITERAL_WORDS = frozenset({"true", "false", "null"})

# longest operators first
_OPERATORS = sorted(
    """>>>= <<= >>= >>> ... -> :: ++ -- && || == != <= >= += -= *= /= &= |= ^= %=
    << >> + - * / % = < > ! ~ ? : ; , . ( ) [ ] { } @ & | ^""".split(),
    key=len,
    reverse=True,
)

_LEX_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<line_comment>//[^\n]*)
  | (?P<block_comment>/\*.*?\*/)
  | (?P<open_comment>/\*)
  | (?P<text_block>\"\"\".*?\"\"\")
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<open_string>")
  | (?P<char>'(?:[^'\\\n]|\\.)+')
  | (?P<open_char>')
  | (?P<number>
        0[xX][0-9a-fA-F_]+[lL]?
      | 0[bB][01_]+[lL]?
      | (?:\d[\d_]*\.?[\d_]*|\.\d[\d_]*)(?:[eE][+-]?\d+)?[fFdDlL]?
    )
  | (?P<ident>[^\W\d]\w*|\$[\w$]*)
  | (?P<op>"""
    + "|".join(re.escape(op) for op in _OPERATORS)
    + r""")
    """,
    re.VERBOSE | re.DOTALL,
)


def tokenize_code(source: str) -> list[Token]:
    """Split Java source into lexer tokens, dropping whitespace and comments."""
    tokens: list[Token] = []
    pos = 0
    while pos < len(source):
        m = _LEX_RE.match(source, pos)
        if m is None:
            raise LexicalError(f"unexpected character {source[pos]!r}", pos)
        kind = m.lastgroup
        if kind == "open_comment":
            raise LexicalError("unterminated block comment", pos)
        if kind == "open_string":
            raise LexicalError("unterminated string literal", pos)
        if kind == "open_char":
            raise LexicalError("unterminated char literal", pos)
        if kind not in ("ws", "line_comment", "block_comment"):
            text = m.group()
            if kind == "ident":
                if text in LITERAL_WORDS:
                    category = "literal"
                elif text in JAVA_KEYWORDS:
                    category = "keyword"
                else:
                    category = "ident"
            elif kind in ("string", "text_block"):
                category = "string"
            else:
                category = kind
            tokens.append(Token(text, TokenKind.CODE, (m.start(), m.end()), category))
        pos = m.end()
    return tokens


# ---------------------------------------------------------------------------
# subtokens

_COMPOUND_RE = re.compile(r"[A-Za-z0-9]+(?:_+[A-Za-z0-9]+)*")
_PIECE_RE = re.compile(r"[A-Z]+(?=[A-Z][a-z])|[A-Z]?[a-z]+|[A-Z]+|[0-9]+")


def split_identifier(text: str) -> list[tuple[str, str, int]]:
    """Split one token into ``(piece, separator_before, offset)`` triples.

    Only tokens made of ASCII letters/digits joined by inner underscores are
    treated as compounds; anything else is returned whole.
    """
    if not _COMPOUND_RE.fullmatch(text):
        return [(text, "", 0)]
    pieces = []
    prev_end = 0
    for m in _PIECE_RE.finditer(text):
        pieces.append((m.group(), text[prev_end : m.start()], m.start()))
        prev_end = m.end()
    return pieces


@dataclass
class SubtokenSeq:
    subtokens: list[Token] = field(default_factory=list)
    parent_index: list[int] = field(default_factory=list)
    # text between the previous subtoken of the same parent and this one
    separators: list[str] = field(default_factory=list)

    def texts(self) -> list[str]:
        return [t.text for t in self.subtokens]

    def reassemble(self) -> list[str]:
        """Rebuild the parent token texts from their subtokens."""
        parents: dict[int, str] = {}
        for tok, parent, sep in zip(self.subtokens, self.parent_index, self.separators):
            parents[parent] = parents.get(parent, "") + sep + tok.text
        return [parents[k] for k in sorted(parents)]


def split_subtokens(tokens: Sequence[Token | str]) -> SubtokenSeq:
    out = SubtokenSeq()
    for i, tok in enumerate(tokens):
        if isinstance(tok, str):
            tok = Token(tok)
        for piece, sep, offset in split_identifier(tok.text):
            span = None
            if tok.span is not None:
                start = tok.span[0] + offset
                span = (start, start + len(piece))
            out.subtokens.append(Token(piece, tok.kind, span, tok.category))
            out.parent_index.append(i)
            out.separators.append(sep)
    return out


# ---------------------------------------------------------------------------
# comments

_HTML_TAG_RE = re.compile(r"</?[A-Za-z][^<>]*>")
_COMMENT_SYMBOL_RE = re.compile(r"[/*]+")
_LINE_PREFIX_RE = re.compile(r"^(\s*)(/\*+|//+|\*+)", re.MULTILINE)


def _blank(text: str, start: int, end: int) -> str:
    return text[:start] + " " * (end - start) + text[end:]


def clean_comment(raw: str) -> list[Token]:
    """Strip comment delimiters and HTML tags, then split into subtokens.

    Removed characters are blanked rather than deleted so that every token
    span still indexes into ``raw``.
    """
    text = raw
    for m in reversed(list(_LINE_PREFIX_RE.finditer(text))):
        text = _blank(text, m.start(2), m.end(2))
    text = re.sub(r"\*+/", lambda m: " " * len(m.group()), text)
    # removing one tag can expose another ("<<a>b>"), so iterate
    while True:
        matches = list(_HTML_TAG_RE.finditer(text))
        if not matches:
            break
        for m in reversed(matches):
            text = _blank(text, m.start(), m.end())

    words = [
        Token(m.group(), TokenKind.COMMENT_WORD, (m.start(), m.end()))
        for m in re.finditer(r"\S+", text)
        if not _COMMENT_SYMBOL_RE.fullmatch(m.group())
    ]
    return split_subtokens(words).subtokens


def texts(tokens: Iterable[Token]) -> list[str]:
    return [t.text for t in tokens]
