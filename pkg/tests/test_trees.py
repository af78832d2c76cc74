import pytest
from hypothesis import given, settings, strategies as st

from pointparse import (DUMMY, BinaryLeaf, BinaryNode, SyntaxTree, TreebankError,
                        binarize, binary_leaves, debinarize, is_laminar,
                        parse_bracketed, spans_of, unary_spans_of,
                        write_bracketed, write_treebank)
from pointparse.toybank import sample_treebank
from pointparse.verification import enumerate_binary_trees

from helpers import SAMPLE_BRACKETING, sample_tree


# ---------------------------------------------------------------- parsing

def test_parse_sample_sentence():
    trees = parse_bracketed(SAMPLE_BRACKETING)
    assert len(trees) == 1
    tree = trees[0]
    assert tree.label == "S"
    assert [w for w, _ in tree.tokens()] == ["She", "enjoys", "playing", "tennis", "."]
    assert [p for _, p in tree.tokens()] == ["PRP", "VBZ", "VBG", "NN", "."]


def test_parse_minimal_and_wrapper():
    trees = parse_bracketed("((X (T a)))")
    assert len(trees) == 1
    assert trees[0] == SyntaxTree("X", [SyntaxTree("T", word="a")])


def test_parse_multiple_trees_whitespace_insensitive():
    text = "(A (T x))\n\n  ( (B (T y))\n )"
    trees = parse_bracketed(text)
    assert [t.label for t in trees] == ["A", "B"]


def test_parse_unbalanced_reports_position():
    with pytest.raises(TreebankError) as err:
        parse_bracketed("(S (NP")
    assert err.value.line == 1
    with pytest.raises(TreebankError):
        parse_bracketed("(S (T a)))")  # stray close paren
    with pytest.raises(TreebankError):
        parse_bracketed("(S (T a) b)")  # token next to subtree


def test_function_tags_and_traces_stripped():
    tree = parse_bracketed("(S (NP-SBJ-1 (PRP She)) (VP-PRD (VBZ naps)) (NP=2 (NN x)))")[0]
    assert [c.label for c in tree.children] == ["NP", "VP", "NP"]


def test_keep_dash_only_labels():
    tree = parse_bracketed("(S (-LRB- -LRB-) (NN x) (-RRB- -RRB-))")[0]
    assert [l.label for l in tree.leaves()] == ["-LRB-", "NN", "-RRB-"]


def test_none_subtrees_removed():
    tree = parse_bracketed("(S (NP (PRP She)) (VP (VBZ naps) (NP (-NONE- *T*-1))))")[0]
    vp = tree.children[1]
    assert len(vp.children) == 1  # the empty NP disappeared entirely


def test_empty_tree_skipped_with_warning():
    with pytest.warns(UserWarning, match="skipped"):
        trees = parse_bracketed("( (NP (-NONE- *)) ) (S (T a))")
    assert len(trees) == 1 and trees[0].label == "S"


# ---------------------------------------------------------------- writing

def test_write_round_trip_sample():
    tree = sample_tree()
    assert parse_bracketed(write_bracketed(tree))[0] == tree


def test_write_single_leaf():
    assert write_bracketed(SyntaxTree("X", [SyntaxTree("T", word="a")])) == "(X (T a))"


def test_write_collapsed_label_verbatim():
    tree = SyntaxTree("S+VP", [SyntaxTree("T", word="a"), SyntaxTree("T", word="b")])
    text = write_bracketed(tree)
    assert text == "(S+VP (T a) (T b))"
    assert parse_bracketed(text)[0] == tree


def test_write_treebank_one_per_line():
    trees = sample_treebank(3, seed=0)
    lines = write_treebank(trees).splitlines()
    assert len(lines) == 3
    assert all(line.startswith("(S ") for line in lines)


# ---------------------------------------------------------------- binarization

def test_binarize_sample_span_set():
    spans = spans_of(binarize(sample_tree()))
    assert {(s.i, s.j, s.label) for s in spans} == {
        (1, 5, "S"), (2, 5, DUMMY), (2, 4, "VP"), (3, 4, "S+VP")}


def test_binarize_sample_unary_leaves():
    leaves = binary_leaves(binarize(sample_tree()))
    assert [l.unary_label for l in leaves] == ["NP", DUMMY, DUMMY, "NP", DUMMY]
    assert [l.position for l in leaves] == [1, 2, 3, 4, 5]


def test_binarize_already_binary_two_leaves():
    tree = parse_bracketed("(S (A x) (B y))")[0]
    out = binarize(tree)
    assert out == BinaryNode("S", BinaryLeaf(1, "x", "A"), BinaryLeaf(2, "y", "B"))


def test_binarize_flat_four_children():
    # internal node count must equal n - 1, with dummies on the introduced nodes
    tree = parse_bracketed("(X (A a) (B b) (C c) (D d))")[0]
    spans = spans_of(binarize(tree))
    assert len(spans) == 3
    assert sorted((s.i, s.j, s.label) for s in spans) == [
        (1, 4, "X"), (2, 4, DUMMY), (3, 4, DUMMY)]


def test_binarize_single_token_unary_chain():
    out = binarize(parse_bracketed("(S (NP (NN dog)))")[0])
    assert out == BinaryLeaf(1, "dog", "NN", "S+NP")


def test_binarize_custom_joiner():
    out = binarize(sample_tree(), joiner="|")
    assert any(s.label == "S|VP" for s in spans_of(out))
    assert debinarize(out, joiner="|") == sample_tree()


# ---------------------------------------------------------------- debinarize

def test_debinarize_inverts_sample():
    assert debinarize(binarize(sample_tree())) == sample_tree()


def test_debinarize_all_dummy_under_fallback_root():
    tree = BinaryNode(DUMMY,
                      BinaryLeaf(1, "a", "T"),
                      BinaryNode(DUMMY, BinaryLeaf(2, "b", "T"), BinaryLeaf(3, "c", "T")))
    out = debinarize(tree)
    assert out.label == "TOP"
    assert len(out.children) == 3
    assert all(c.is_preterminal for c in out.children)


def test_debinarize_collapsed_label_rebuilds_chain():
    tree = BinaryNode("S+VP", BinaryLeaf(1, "a", "T"), BinaryLeaf(2, "b", "T"))
    out = debinarize(tree)
    assert out.label == "S"
    assert len(out.children) == 1 and out.children[0].label == "VP"


def test_debinarize_single_leaf():
    assert debinarize(BinaryLeaf(1, "a", "T", "X")) == SyntaxTree("X", [SyntaxTree("T", word="a")])
    bare = debinarize(BinaryLeaf(1, "a", "T"))
    assert bare == SyntaxTree("TOP", [SyntaxTree("T", word="a")])


def test_treebank_file_round_trip_byte_exact():
    trees = sample_treebank(40, seed=11)
    original = write_treebank(trees)
    recovered = write_treebank(debinarize(binarize(t)) for t in parse_bracketed(original))
    assert recovered == original


# ---------------------------------------------------------------- spans

def test_spans_two_leaf_root():
    spans = spans_of(binarize(parse_bracketed("(S (A x) (B y))")[0]))
    assert {(s.i, s.j, s.label) for s in spans} == {(1, 2, "S")}


def test_spans_count_matches_leaf_count():
    for n in range(2, 7):
        for tree in enumerate_binary_trees(n, seed=5):
            spans = spans_of(tree)
            assert len(spans) == n - 1
            assert is_laminar(spans)


def test_unary_spans_reported_separately():
    tree = binarize(sample_tree())
    assert {(s.i, s.j, s.label) for s in unary_spans_of(tree)} == {
        (1, 1, "NP"), (4, 4, "NP")}


# ---------------------------------------------------------------- properties

_labels = st.sampled_from(["S", "NP", "VP", "PP", "X"])
_pos = st.sampled_from(["T", "NN", "DT"])
_words = st.sampled_from(["a", "bb", "cat", "x1"])
_leaf = st.builds(lambda p, w: SyntaxTree(p, word=w), _pos, _words)
_tree = st.recursive(
    _leaf,
    lambda inner: st.builds(lambda l, cs: SyntaxTree(l, cs), _labels,
                            st.lists(inner, min_size=1, max_size=4)),
    max_leaves=12)
_rooted = st.builds(lambda l, cs: SyntaxTree(l, cs), _labels,
                    st.lists(_tree, min_size=1, max_size=4))


@settings(max_examples=150, deadline=None)
@given(_rooted)
def test_binarize_round_trip_property(tree):
    out = binarize(tree)
    assert debinarize(out) == tree
    n = len(binary_leaves(out))
    spans = spans_of(out)
    assert len(spans) == n - 1
    assert is_laminar(spans)


@settings(max_examples=100, deadline=None)
@given(_rooted)
def test_binarize_all_nodes_have_two_children(tree):
    def check(node):
        if isinstance(node, BinaryLeaf):
            return
        assert node.left is not None and node.right is not None
        check(node.left)
        check(node.right)

    check(binarize(tree))
