"""Edit scripts over token sequences.

Two flavours share one representation.  A code-side script covers the old
sequence completely (KEEP runs included).  A comment-side script omits KEEP
and locates every action in the old comment by content: DEL/UPDATE by their
old span, INSERT by a short tag of tokens that precede the insertion point.
Applying a comment-side script walks the old comment and the actions left
to right and binds every span or tag to its first occurrence at or after
the current position.

Scripts work on plain token strings.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

KEEP = "<KEEP>"
KEEP_END = "</KEEP>"
INSERT = "<INSERT>"
INSERT_END = "</INSERT>"
DEL = "<DEL>"
DEL_END = "</DEL>"
UPDATE_FROM = "<UPDATEFROM>"
UPDATE_TO = "<UPDATETO>"
UPDATE_END = "</UPDATE>"
INSERT_TAG = "<INSERTTAG>"
BOC = "<BOC>"  # begin-of-comment tag for insertions at position 0
ESCAPE = "<ESC>"

KEYWORDS = (KEEP, KEEP_END, INSERT, INSERT_END, DEL, DEL_END, UPDATE_FROM, UPDATE_TO, UPDATE_END, INSERT_TAG)
RESERVED = frozenset(KEYWORDS) | {BOC, ESCAPE}


class Action(enum.Enum):
    KEEP = "KEEP"
    INSERT = "INSERT"
    DEL = "DEL"
    UPDATE = "UPDATE"


class Side(enum.Enum):
    CODE = "CodeSide"
    COMMENT = "CommentSide"


@dataclass(frozen=True)
class EditAction:
    kind: Action
    old_span: tuple[str, ...] = ()
    new_span: tuple[str, ...] = ()
    insert_tag: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "old_span", tuple(self.old_span))
        object.__setattr__(self, "new_span", tuple(self.new_span))
        object.__setattr__(self, "insert_tag", tuple(self.insert_tag))
        k = self.kind
        if k in (Action.KEEP, Action.DEL) and (self.new_span or not self.old_span):
            raise ValueError(f"{k.value} needs a non-empty old span only")
        if k is Action.INSERT and (self.old_span or not self.new_span):
            raise ValueError("INSERT needs a non-empty new span only")
        if k is Action.UPDATE and not (self.old_span and self.new_span):
            raise ValueError("UPDATE needs both spans")
        if k is not Action.INSERT and self.insert_tag:
            raise ValueError("only INSERT carries a tag")


@dataclass
class EditScript:
    actions: list[EditAction] = field(default_factory=list)
    side: Side = Side.COMMENT

    def __len__(self):
        return len(self.actions)

    def __iter__(self):
        return iter(self.actions)


class MalformedScriptError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (token {position})")
        self.position = position


class ApplyError(ValueError):
    def __init__(self, message: str, action_index: int):
        super().__init__(f"action {action_index}: {message}")
        self.action_index = action_index


# ---------------------------------------------------------------------------
# diffing


def lcs_opcodes(old: Sequence[str], new: Sequence[str]) -> list[tuple[str, int, int, int, int]]:
    """Longest-common-subsequence alignment grouped into opcodes.

    Returns ``(tag, i1, i2, j1, j2)`` tuples with tags ``equal``, ``delete``,
    ``insert`` and ``replace``, in the style of ``difflib``.
    """
    n, m = len(old), len(new)
    # suffix table: table[i][j] = LCS length of old[i:], new[j:]
    table = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        row, below = table[i], table[i + 1]
        for j in range(m - 1, -1, -1):
            if old[i] == new[j]:
                row[j] = below[j + 1] + 1
            else:
                row[j] = max(below[j], row[j + 1])

    pairs = []
    i = j = 0
    while i < n and j < m:
        if old[i] == new[j] and table[i][j] == table[i + 1][j + 1] + 1:
            pairs.append((i, j))
            i += 1
            j += 1
        elif table[i + 1][j] >= table[i][j + 1]:
            i += 1
        else:
            j += 1

    opcodes = []
    i = j = 0
    for pi, pj in pairs + [(n, m)]:
        if i < pi and j < pj:
            opcodes.append(("replace", i, pi, j, pj))
        elif i < pi:
            opcodes.append(("delete", i, pi, j, j))
        elif j < pj:
            opcodes.append(("insert", i, i, j, pj))
        if pi < n:
            if opcodes and opcodes[-1][0] == "equal":
                tag, i1, _, j1, _ = opcodes[-1]
                opcodes[-1] = ("equal", i1, pi + 1, j1, pj + 1)
            else:
                opcodes.append(("equal", pi, pi + 1, pj, pj + 1))
        i, j = pi + 1, pj + 1
    return opcodes


def diff_tokens(old: Sequence[str], new: Sequence[str]) -> EditScript:
    actions = []
    for tag, i1, i2, j1, j2 in lcs_opcodes(old, new):
        if tag == "equal":
            actions.append(EditAction(Action.KEEP, old[i1:i2]))
        elif tag == "delete":
            actions.append(EditAction(Action.DEL, old[i1:i2]))
        elif tag == "insert":
            actions.append(EditAction(Action.INSERT, new_span=new[j1:j2]))
        else:
            actions.append(EditAction(Action.UPDATE, old[i1:i2], new[j1:j2]))
    return EditScript(actions, Side.CODE)


def count_occurrences(seq: Sequence[str], sub: Sequence[str]) -> int:
    k = len(sub)
    if k == 0:
        return 0
    sub = list(sub)
    return sum(1 for s in range(len(seq) - k + 1) if list(seq[s : s + k]) == sub)


def find_span(seq: Sequence[str], sub: Sequence[str], start: int) -> int:
    """Index of the first occurrence of ``sub`` in ``seq`` at or after ``start``, or -1."""
    k = len(sub)
    sub = list(sub)
    for s in range(start, len(seq) - k + 1):
        if list(seq[s : s + k]) == sub:
            return s
    return -1


def find_insert_tag(old_comment: Sequence[str], insert_position: int) -> tuple[str, ...]:
    """Shortest suffix of ``old_comment[:insert_position]`` that is unique in the comment.

    The comment is read as if preceded by the ``<BOC>`` sentinel, so a tag
    starting with ``<BOC>`` is anchored at the start of the comment.  This is
    the answer at position 0 and whenever no plain suffix is unique.  A plain
    tag never starts with a literal ``<BOC>`` token; such a tag is extended by
    one token to keep the two forms apart.
    """
    if not 0 <= insert_position <= len(old_comment):
        raise IndexError(insert_position)
    for length in range(1, insert_position + 1):
        start = insert_position - length
        tag = old_comment[start:insert_position]
        if count_occurrences(old_comment, tag) == 1 and old_comment[start] != BOC:
            return tuple(tag)
    return (BOC, *old_comment[:insert_position])
def build_comment_edit_seq(old_comment: Sequence[str], new_comment: Sequence[str]) -> EditScript:
    """Comment-side script that turns ``old_comment`` into ``new_comment``.

    Every action must bind to its true position under first-occurrence
    matching.  When the bare span (or tag) would bind earlier, or the tag
    would reach back into the previous action, the action is rewritten as an
    UPDATE that also carries the kept tokens since the previous action.
    """
    old = list(old_comment)
    actions = []
    prev_end = 0  # end of the previous action in old coordinates
    for tag, i1, i2, j1, j2 in lcs_opcodes(old, list(new_comment)):
        if tag == "equal":
            continue
        inserted = tuple(new_comment[j1:j2])
        if tag == "insert":
            label = find_insert_tag(old, i1)
            anchor = label[1:] if label[0] == BOC else label
            start = i1 - len(anchor)
            if label[0] == BOC:
                ok = prev_end == 0
            else:
                ok = start >= prev_end and find_span(old, label, prev_end) == start
            if ok:
                actions.append(EditAction(Action.INSERT, new_span=anchor + inserted, insert_tag=label))
                prev_end = i1
                continue
            context = tuple(old[prev_end:i1])
            actions.append(EditAction(Action.UPDATE, context, context + inserted))
            prev_end = i1
            continue

        span = old[i1:i2]
        ctx_start = i1
        while find_span(old, old[ctx_start:i2], prev_end) != ctx_start:
            ctx_start -= 1
        context = tuple(old[ctx_start:i1])
        if tag == "delete" and not context:
            actions.append(EditAction(Action.DEL, span))
        else:
            actions.append(EditAction(Action.UPDATE, context + tuple(span), context + inserted))
        prev_end = i2
    return EditScript(actions, Side.COMMENT)


# ---------------------------------------------------------------------------
# serialization


def _escape(tokens: Sequence[str]) -> list[str]:
    out = []
    for t in tokens:
        if t in RESERVED:
            out.append(ESCAPE)
        out.append(t)
    return out


def serialize(script: EditScript) -> list[str]:
    out: list[str] = []
    for a in script.actions:
        if a.kind is Action.KEEP:
            out += [KEEP, *_escape(a.old_span), KEEP_END]
        elif a.kind is Action.DEL:
            out += [DEL, *_escape(a.old_span), DEL_END]
        elif a.kind is Action.UPDATE:
            out += [UPDATE_FROM, *_escape(a.old_span), UPDATE_TO, *_escape(a.new_span), UPDATE_END]
        elif script.side is Side.COMMENT:
            tag = a.insert_tag
            tag = [BOC, *_escape(tag[1:])] if tag[0] == BOC else _escape(tag)
            out += [INSERT_TAG, *tag, INSERT, *_escape(a.new_span), INSERT_END]
        else:
            out += [INSERT, *_escape(a.new_span), INSERT_END]
    return out


_OPENERS = {KEEP: (Action.KEEP, KEEP_END), DEL: (Action.DEL, DEL_END), INSERT: (Action.INSERT, INSERT_END)}


def deserialize(tokens: Sequence[str], side: Side = Side.COMMENT) -> EditScript:
    """Parse a keyword token stream back into an :class:`EditScript`."""
    pos = 0
    n = len(tokens)

    def read_span(terminators: tuple[str, ...], allow_empty: bool = False) -> tuple[list[str], str]:
        nonlocal pos
        span = []
        while pos < n:
            t = tokens[pos]
            if t == ESCAPE:
                if pos + 1 >= n or tokens[pos + 1] not in RESERVED:
                    raise MalformedScriptError("escape must precede a reserved token", pos)
                span.append(tokens[pos + 1])
                pos += 2
                continue
            pos += 1
            if t in terminators:
                if not span and not allow_empty:
                    raise MalformedScriptError(f"empty span before {t}", pos - 1)
                return span, t
            if t in RESERVED:
                raise MalformedScriptError(f"unexpected {t}", pos - 1)
            span.append(t)
        raise MalformedScriptError(f"missing {' or '.join(terminators)}", pos)

    actions = []
    while pos < n:
        start = pos
        t = tokens[pos]
        pos += 1
        if t == UPDATE_FROM:
            old, _ = read_span((UPDATE_TO,))
            new, _ = read_span((UPDATE_END,))
            actions.append(EditAction(Action.UPDATE, old, new))
        elif t == INSERT_TAG:
            if side is not Side.COMMENT:
                raise MalformedScriptError("INSERTTAG only valid on the comment side", start)
            if pos < n and tokens[pos] == BOC:
                pos += 1
                rest, _ = read_span((INSERT,), allow_empty=True)
                tag = [BOC, *rest]
            else:
                if list(tokens[pos : pos + 2]) == [ESCAPE, BOC]:
                    raise MalformedScriptError("a tag cannot start with a literal <BOC>", pos)
                tag, _ = read_span((INSERT,))
            new, _ = read_span((INSERT_END,))
            actions.append(EditAction(Action.INSERT, new_span=new, insert_tag=tag))
        elif t in _OPENERS:
            kind, closer = _OPENERS[t]
            if side is Side.COMMENT and kind is not Action.DEL:
                raise MalformedScriptError(f"{t} not allowed on the comment side", start)
            span, _ = read_span((closer,))
            if kind is Action.INSERT:
                actions.append(EditAction(kind, new_span=span))
            else:
                actions.append(EditAction(kind, span))
        else:
            raise MalformedScriptError(f"expected an action keyword, got {t!r}", start)
    return EditScript(actions, side)


# ---------------------------------------------------------------------------
# application


def apply_edits(old_comment: Sequence[str], script: EditScript) -> list[str]:
    """Apply a comment-side script to the old comment."""
    old = list(old_comment)
    out: list[str] = []
    p_old = 0
    for idx, a in enumerate(script.actions):
        if a.kind is Action.INSERT:
            if a.insert_tag[0] == BOC:
                anchor = list(a.insert_tag[1:])
                if p_old != 0 or old[: len(anchor)] != anchor:
                    raise ApplyError("begin-of-comment insert does not match the comment start", idx)
                out += a.new_span
                p_old = len(anchor)
                continue
            locate = a.insert_tag
        elif a.kind in (Action.DEL, Action.UPDATE):
            locate = a.old_span
        else:
            raise ApplyError("KEEP is not a comment-side action", idx)
        s = find_span(old, locate, p_old)
        if s < 0:
            raise ApplyError(f"cannot locate {' '.join(locate)!r}", idx)
        out += old[p_old:s]
        out += a.new_span
        p_old = s + len(locate)
    out += old[p_old:]
    return out


def reconstruct_old(script: EditScript) -> list[str]:
    return [t for a in script.actions if a.kind is not Action.INSERT for t in a.old_span]


def reconstruct_new(script: EditScript) -> list[str]:
    return [t for a in script.actions for t in (a.old_span if a.kind is Action.KEEP else a.new_span)]
