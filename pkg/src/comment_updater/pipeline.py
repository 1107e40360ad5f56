"""Sample -> model-ready streams: code edits, syntax nodes with their mask, old comment, target script."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import edit_script as es
from .config import Config
from .corpus import Sample
from .dataflow import DependencyGraph, build_dependency_graph
from .masks import change_guided_mask, dependency_mask, fuse_masks
from .syntax.ast import NodeType
from .syntax.change_graph import ChangeGraph, build_change_graph, statement_owner
from .syntax.diff import Operation, tree_diff
from .syntax.parser import ParseError, parse_java_subset
from .tokenizer import LexicalError, Token, clean_comment, split_identifier, split_subtokens, texts, tokenize_code
from .model.vocab import BOS

log = logging.getLogger(__name__)

SPAN_FEATURES = (es.KEEP, es.INSERT, es.DEL, es.UPDATE_FROM, es.UPDATE_TO)
CODE_FEATURES = len(SPAN_FEATURES) + 1  # + in-return-statement
OPERATIONS = (Operation.KEEP, Operation.INSERT, Operation.DEL, Operation.UPDATE)
COMMENT_FEATURES = 1


class PreprocessError(ValueError):
    pass


@dataclass
class Example:
    id: str
    code_tokens: list[str]
    code_features: np.ndarray
    syntax_tokens: list[str]
    syntax_features: np.ndarray
    mask: np.ndarray
    comment_tokens: list[str]
    comment_features: np.ndarray
    target: list[str] | None = None
    new_comment_tokens: list[str] | None = None
    light: bool = False
    # intermediate structures kept for inspection
    change_graph: ChangeGraph | None = field(default=None, repr=False)
    dependencies: DependencyGraph | None = field(default=None, repr=False)
    change_mask: np.ndarray | None = field(default=None, repr=False)
    dependency_mask: np.ndarray | None = field(default=None, repr=False)


def syntax_feature_width(config: Config) -> int:
    return len(OPERATIONS) + len(config.type_class_names)


def _return_flags(tokens: list[Token]) -> list[bool]:
    """Lexical membership in a return statement: from ``return`` to its ``;``."""
    flags = []
    inside = False
    depth = 0
    for tok in tokens:
        if not inside and tok.text == "return":
            inside, depth = True, 0
        flags.append(inside)
        if inside:
            if tok.text in "([{":
                depth += 1
            elif tok.text in ")]}":
                depth -= 1
                if depth < 0:
                    inside = False
            elif tok.text == ";" and depth == 0:
                inside = False
    return flags


def _code_side(old_code: str, new_code: str) -> tuple[list[str], np.ndarray]:
    sides = []
    for source in (old_code, new_code):
        lexed = tokenize_code(source)
        sub = split_subtokens(lexed)
        ret = _return_flags(lexed)
        sides.append((sub.texts(), [ret[p] for p in sub.parent_index]))
    (old, old_ret), (new, new_ret) = sides
    seq = es.serialize(es.diff_tokens(old, new))
    feats = np.zeros((len(seq), CODE_FEATURES))
    span = None
    i = j = 0
    for k, tok in enumerate(seq):
        if tok in es.RESERVED:
            span = tok if tok in SPAN_FEATURES else None
            continue
        feats[k, SPAN_FEATURES.index(span)] = 1
        if span in (es.KEEP, es.DEL, es.UPDATE_FROM):
            feats[k, -1] = old_ret[i]
            i += 1
            if span == es.KEEP:
                j += 1
        else:
            feats[k, -1] = new_ret[j]
            j += 1
    return seq, feats


def _type_class(node_type: NodeType | None, config: Config) -> int:
    names = config.type_class_names
    if node_type is not None:
        for k, members in enumerate(config.type_classes.values()):
            if node_type.value in members:
                return k
    return len(names) - 1


def _syntax_side(old_ast, new_ast, config: Config):
    diff = tree_diff(old_ast, new_ast)
    graph = build_change_graph(diff)
    deps = build_dependency_graph(old_ast, new_ast, graph)
    n = len(graph)
    cmask = change_guided_mask(graph)
    dmask = dependency_mask(deps, n)
    fused = fuse_masks(cmask, dmask, config.beta)

    owners = {}
    for tree, index in ((diff.old, graph.old_index), (diff.new, graph.new_index)):
        owner = statement_owner(tree)
        for ast_i, g in index.items():
            if g not in owners and owner[ast_i] is not None:
                owners[g] = tree.nodes[owner[ast_i]].node_type
    feats = np.zeros((n, syntax_feature_width(config)))
    for g, node in enumerate(graph.nodes):
        feats[g, OPERATIONS.index(node.operation)] = 1
        feats[g, len(OPERATIONS) + _type_class(owners.get(g), config)] = 1
    tokens = [node.value or "" for node in graph.nodes]
    return tokens, feats, fused, graph, deps, cmask, dmask


def _changed_words(graph: ChangeGraph | None) -> set[str]:
    words: set[str] = set()
    if graph is None:
        return words
    for node in graph.nodes:
        if node.operation is Operation.KEEP:
            continue
        for value in (node.value, node.new_value):
            if value:
                words.add(value)
                words.update(piece for piece, _, _ in split_identifier(value))
    return words


def _placeholder(tokens: list[str], feats: np.ndarray) -> tuple[list[str], np.ndarray]:
    if tokens:
        return tokens, feats
    return [BOS], np.zeros((1, feats.shape[1]))


def _truncate(name: str, sample_id: str, tokens: list[str], feats: np.ndarray, cap: int):
    if len(tokens) > cap:
        log.warning("sample %s: %s stream truncated from %d to %d tokens", sample_id, name, len(tokens), cap)
        return tokens[:cap], feats[:cap]
    return tokens, feats


def preprocess(sample: Sample, config: Config) -> Example:
    try:
        code_tokens, code_feats = _code_side(sample.old_code, sample.new_code)
    except LexicalError as exc:
        raise PreprocessError(f"sample {sample.id}: {exc}") from exc

    old_comment = texts(clean_comment(sample.old_comment))
    new_comment = texts(clean_comment(sample.new_comment)) if sample.new_comment is not None else None
    target = es.serialize(es.build_comment_edit_seq(old_comment, new_comment)) if new_comment is not None else None

    light = False
    graph = deps = cmask = dmask = None
    try:
        old_ast = parse_java_subset(sample.old_code)
        new_ast = parse_java_subset(sample.new_code)
    except ParseError as exc:
        if not config.token_only_fallback:
            raise PreprocessError(f"sample {sample.id}: {exc}") from exc
        light = True
    if light:
        syn_tokens, syn_feats, fused = [], np.zeros((0, syntax_feature_width(config))), np.zeros((0, 0))
    else:
        syn_tokens, syn_feats, fused, graph, deps, cmask, dmask = _syntax_side(old_ast, new_ast, config)

    changed = _changed_words(graph)
    com_feats = np.array([[1.0 if t in changed else 0.0] for t in old_comment]).reshape(-1, COMMENT_FEATURES)

    code_tokens, code_feats = _truncate("code", sample.id, *_placeholder(code_tokens, code_feats), config.max_len)
    comment_tokens, com_feats = _truncate("comment", sample.id, *_placeholder(old_comment, com_feats), config.max_len)
    if syn_tokens:
        syn_tokens, syn_feats = _truncate("syntax", sample.id, syn_tokens, syn_feats, config.max_len)
        fused = fused[: len(syn_tokens), : len(syn_tokens)]
    else:
        # no AST information: a single placeholder node attending to itself
        syn_tokens, syn_feats = _placeholder(syn_tokens, syn_feats)
        fused = np.zeros((1, 1))

    return Example(
        id=sample.id,
        code_tokens=code_tokens,
        code_features=code_feats,
        syntax_tokens=syn_tokens,
        syntax_features=syn_feats,
        mask=fused,
        comment_tokens=comment_tokens,
        comment_features=com_feats,
        target=target,
        new_comment_tokens=new_comment,
        light=light,
        change_graph=graph,
        dependencies=deps,
        change_mask=cmask,
        dependency_mask=dmask,
    )
