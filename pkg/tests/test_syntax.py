import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from comment_updater.syntax.ast import NodeType, is_variable
from comment_updater.syntax.change_graph import Origin, build_change_graph, statement_owner
from comment_updater.syntax.diff import IndexedTree, Operation, tree_diff
from comment_updater.syntax.parser import ParseError, parse_java_subset

from oracles import generate_method

COMPARE = "int compare(int a, int b) { if (a > b) return a; return b; }"
# reconstruction of the min/compare method used for the data-flow walkthrough
COMPARE_MIN = ("int compare(int a, int b) { int d = b; int min = 0; if (a > b && d > 0) { min = a; } "
               "min = b < min ? b : min; return d + min; }")


def shape(node):
    return (node.node_type, node.value, [shape(c) for c in node.children])


# --------------------------------------------------------------------- parser


def test_parse_compare():
    root = parse_java_subset(COMPARE)
    assert root.node_type is NodeType.METHOD_DECLARATION
    name, pa, pb, body = root.children
    assert (name.node_type, name.value) == (NodeType.SIMPLE_NAME, "compare")
    assert [p.node_type for p in (pa, pb)] == [NodeType.PARAMETER] * 2
    assert [p.children[0].value for p in (pa, pb)] == ["a", "b"]
    assert [s.node_type for s in body.children] == [NodeType.IF, NodeType.RETURN]
    cond, then = body.children[0].children
    assert shape(cond) == (NodeType.INFIX, ">", [(NodeType.SIMPLE_NAME, "a", []), (NodeType.SIMPLE_NAME, "b", [])])
    assert then.node_type is NodeType.RETURN
    assert sum(n.node_type is NodeType.RETURN for n in root.walk()) == 2


def test_parse_empty_fails():
    with pytest.raises(ParseError):
        parse_java_subset("")


def test_parse_statement():
    assert shape(parse_java_subset("x = y;")) == (
        NodeType.EXPRESSION_STATEMENT, None,
        [(NodeType.ASSIGNMENT, "=", [(NodeType.SIMPLE_NAME, "x", []), (NodeType.SIMPLE_NAME, "y", [])])],
    )


@pytest.mark.parametrize("src,offset", [("int f( {", 7), ("void f() { x = ; }", 15)])
def test_parse_error_has_offset(src, offset):
    with pytest.raises(ParseError) as info:
        parse_java_subset(src)
    assert info.value.offset == offset


def test_lambdas_and_anonymous_classes_are_opaque():
    root = parse_java_subset("void f() { Runnable r = () -> { foo(); }; list.forEach(x -> g(x)); }")
    opaque = [n for n in root.walk() if n.node_type is NodeType.EXPRESSION_STATEMENT and not n.children]
    assert [n.value for n in opaque] == ["( ) -> { foo ( ) ; }", "x -> g ( x )"]


def test_field_access_is_one_variable():
    root = parse_java_subset("int f() { return this.count; }")
    (field,) = [n for n in root.walk() if n.node_type is NodeType.FIELD_ACCESS]
    assert field.value == "this.count" and is_variable(field)


def test_generated_methods_parse():
    for seed in range(50):
        parse_java_subset(generate_method(seed).source)


# --------------------------------------------------------------------- tree diff


def labels(diff):
    return diff.old_labels, diff.new_labels


def test_identical_trees_all_keep():
    d = tree_diff(parse_java_subset(COMPARE_MIN), parse_java_subset(COMPARE_MIN))
    assert set(d.old_labels) == set(d.new_labels) == {Operation.KEEP}


def test_rename_is_single_update():
    old = parse_java_subset("String f(String text) { return text.trim(); }")
    new = parse_java_subset("String f(String text) { return builder.trim(); }")
    d = tree_diff(old, new)
    changed = [(i, d.old.nodes[i].value) for i, op in enumerate(d.old_labels) if op is not Operation.KEEP]
    assert len(changed) == 1 and changed[0][1] == "text"
    i = changed[0][0]
    assert d.old_labels[i] is Operation.UPDATE
    assert d.new.nodes[d.old_to_new[i]].value == "builder"
    assert sum(op is not Operation.KEEP for op in d.new_labels) == 1


def test_added_if_statement_is_inserted_subtree():
    old = parse_java_subset("String f(String text) { return text.trim(); }")
    new = parse_java_subset("String f(String text) { if (text == null) { return null; } return text.trim(); }")
    d = tree_diff(old, new)
    assert set(d.old_labels) == {Operation.KEEP}
    (if_i,) = [i for i, n in enumerate(d.new.nodes) if n.node_type is NodeType.IF]
    inserted = {i for i, op in enumerate(d.new_labels) if op is Operation.INSERT}
    assert inserted == set(d.new.descendants(if_i))


def check_partition(d):
    assert all((op is Operation.DEL) == (i not in d.old_to_new) for i, op in enumerate(d.old_labels))
    assert all((op is Operation.INSERT) == (j not in d.new_to_old) for j, op in enumerate(d.new_labels))
    assert {j: i for i, j in d.old_to_new.items()} == d.new_to_old
    for i, j in d.old_to_new.items():
        assert d.old_labels[i] is d.new_labels[j]
        assert d.old.nodes[i].node_type is d.new.nodes[j].node_type
        same = d.old.nodes[i].value == d.new.nodes[j].value
        assert d.old_labels[i] is (Operation.KEEP if same else Operation.UPDATE)
    pairs = len(d.old_to_new)
    dels = d.old_labels.count(Operation.DEL)
    ins = d.new_labels.count(Operation.INSERT)
    assert 2 * pairs + dels + ins == len(d.old) + len(d.new)


@settings(max_examples=60)
@given(st.integers(0, 10_000), st.integers(0, 10_000))
def test_label_partition_on_generated_pairs(s1, s2):
    old = parse_java_subset(generate_method(s1, 10).source)
    new = parse_java_subset(generate_method(s2, 10).source)
    check_partition(tree_diff(old, new))


def _statements(rng, n):
    kinds = [
        "x{k} = a + {k};", "if (a > {k}) {{ b = {k}; }}", "g(a, {k});", "int v{k} = b * {k};",
        "while (c < {k}) {{ c++; }}", "return a - {k};",
    ]
    return [rng.choice(kinds).format(k=k) for k in range(n)]


def test_deleting_a_statement_labels_exactly_that_subtree():
    rng = random.Random(3)
    for _ in range(100):
        stmts = _statements(rng, rng.randint(2, 8))
        k = rng.randrange(len(stmts))
        old = parse_java_subset("void m(int a) { " + " ".join(stmts) + " }")
        new = parse_java_subset("void m(int a) { " + " ".join(stmts[:k] + stmts[k + 1 :]) + " }")
        d = tree_diff(old, new)
        block = next(i for i, n in enumerate(d.old.nodes) if n.node_type is NodeType.BLOCK)
        removed = d.old.children[block][k]
        deleted = {i for i, op in enumerate(d.old_labels) if op is Operation.DEL}
        assert deleted == set(d.old.descendants(removed))
        assert set(d.new_labels) == {Operation.KEEP}


def test_indexed_tree_subtrees_are_contiguous():
    t = IndexedTree.build(parse_java_subset(COMPARE_MIN))
    for i in range(len(t)):
        inside = set(t.descendants(i))
        for j in inside - {i}:
            assert t.parent[j] in inside


# --------------------------------------------------------------------- change graph


def graph_of(old_src, new_src):
    return build_change_graph(tree_diff(parse_java_subset(old_src), parse_java_subset(new_src)))


def test_all_keep_graph_has_no_changed_nodes():
    assert graph_of(COMPARE_MIN, COMPARE_MIN).changed == set()


def test_assignment_pairs_in_relations():
    g = graph_of("void f() { v = a + g(b, c); }", "void f() { v = a + g(b, c); }")
    idx = {n.value: i for i, n in enumerate(g.nodes)}
    for name in ("a", "b", "c", "g"):
        assert (idx["v"], idx[name]) in g.relations
        assert (idx[name], idx["v"]) in g.relations


def test_same_name_nodes_are_related():
    g = graph_of(COMPARE_MIN, COMPARE_MIN)
    mins = [i for i, n in enumerate(g.nodes) if n.value == "min"]
    assert len(mins) == 6
    assert all((i, j) in g.relations for i in mins for j in mins)


def test_variable_nodes_include_method_names():
    g = graph_of("void f() { x.size(); }", "void f() { x.size(); }")
    assert [n.value for n in g.nodes] == ["f", "x", "size"]


def test_node_order_and_origins():
    g = graph_of("int f(int a) { return a + b; }", "int f(int c) { return c + 1; }")
    origins = [n.origin for n in g.nodes]
    # old-version nodes first, then nodes that exist only in the new version
    assert origins == sorted(origins, key=lambda o: o is Origin.NEW)
    for n in g.nodes:
        if n.operation is Operation.UPDATE:
            assert n.origin is Origin.BOTH and n.new_value is not None
        if n.operation is Operation.DEL:
            assert n.origin is Origin.OLD
        if n.operation is Operation.INSERT:
            assert n.origin is Origin.NEW


def test_updated_node_relates_to_both_names():
    g = graph_of("int f(int a) { return a; }", "int f(int c) { return c + c; }")
    upd = [i for i, n in enumerate(g.nodes) if n.operation is Operation.UPDATE]
    inserted_c = [i for i, n in enumerate(g.nodes) if n.operation is Operation.INSERT and n.value == "c"]
    assert upd and inserted_c
    assert all((u, c) in g.relations for u in upd for c in inserted_c)


def test_changed_includes_statement_context():
    g = graph_of("void f() { x = a + b; y = a; }", "void f() { x = a + c; y = a; }")
    vals = {i: n.value for i, n in enumerate(g.nodes)}
    changed_vals = sorted(vals[i] for i in g.changed)
    # x and a share the edited statement; the untouched statement contributes nothing
    assert changed_vals == ["a", "b", "x"]


@settings(max_examples=40)
@given(st.integers(0, 10_000), st.integers(0, 10_000))
def test_relations_reflexive_symmetric_and_same_value_transitive(s1, s2):
    g = graph_of(generate_method(s1, 8).source, generate_method(s2, 8).source)
    n = len(g)
    assert all((i, i) in g.relations for i in range(n))
    assert all((j, i) in g.relations for i, j in g.relations)
    for index in (g.old_index, g.new_index):
        members = set(index.values())
        value = {i: (g.nodes[i].value if index is g.old_index or g.nodes[i].new_value is None else g.nodes[i].new_value)
                 for i in members}
        same = {(i, j) for i in members for j in members if value[i] == value[j]}
        assert same <= g.relations
    assert {i for i, node in enumerate(g.nodes) if node.operation is not Operation.KEEP} <= g.changed


def test_statement_owner_is_nearest_statement():
    t = IndexedTree.build(parse_java_subset("void f() { if (a) { b = c; } }"))
    owner = statement_owner(t)
    c = next(i for i, n in enumerate(t.nodes) if n.value == "c")
    assert t.nodes[owner[c]].node_type is NodeType.EXPRESSION_STATEMENT


def test_change_graph_json_shape():
    d = graph_of("int f(int a) { return a; }", "int f(int b) { return b; }").to_dict()
    assert set(d) == {"nodes", "relations", "changed"}
    assert {"operation", "type", "value", "origin", "order"} <= set(d["nodes"][0])
