import pytest
from hypothesis import given, settings, strategies as st

from pointparse import (DUMMY, BinaryLeaf, BinaryNode, Pointing, PointingError,
                        binarize, binary_leaves, parse_bracketed,
                        pointing_to_text, pointing_to_tree, spans_of,
                        text_to_pointing, tree_to_pointing, validate_pointing)
from pointparse.verification import enumerate_binary_trees

from helpers import sample_tree


def leaves_of(tree):
    return [(l.word, l.pos, l.unary_label) for l in binary_leaves(tree)]


# ---------------------------------------------------------------- tree -> pointing

def test_sample_sentence_pointing():
    entries = tree_to_pointing(binarize(sample_tree()))
    assert entries == [
        Pointing(1, 5, "S"),
        Pointing(2, 5, DUMMY),
        Pointing(3, 4, "S+VP"),
        Pointing(4, 2, "VP"),
        Pointing(5, 1, "S"),
    ]


def test_two_leaf_pointing():
    tree = binarize(parse_bracketed("(S (A x) (B y))")[0])
    assert tree_to_pointing(tree) == [Pointing(1, 2, "S"), Pointing(2, 1, "S")]


def test_left_branching_three_leaves():
    tree = BinaryNode(
        "S",
        BinaryNode(DUMMY, BinaryLeaf(1, "w1", "T"), BinaryLeaf(2, "w2", "T")),
        BinaryLeaf(3, "w3", "T"))
    # oracle: per position, the widest internal span touching it as an endpoint
    spans = spans_of(tree)
    expect = []
    for q in (1, 2):
        touching = [s for s in spans if q in (s.i, s.j)]
        widest = max(touching, key=lambda s: s.j - s.i)
        expect.append(Pointing(q, widest.j if widest.i == q else widest.i, widest.label))
    expect.append(Pointing(3, 1, "S"))
    got = tree_to_pointing(tree)
    assert got == expect
    assert got == [Pointing(1, 3, "S"), Pointing(2, 1, DUMMY), Pointing(3, 1, "S")]


def test_single_leaf_empty_pointing():
    assert tree_to_pointing(BinaryLeaf(1, "a", "T")) == []


def test_maximality_and_direction_rule():
    for n in range(2, 7):
        for tree in enumerate_binary_trees(n, seed=9):
            spans = spans_of(tree)
            for e in tree_to_pointing(tree)[:-1]:
                lo, hi = min(e.i, e.p), max(e.i, e.p)
                # no strictly larger span touches the query as an endpoint
                for s in spans:
                    if e.i in (s.i, s.j):
                        assert s.j - s.i <= hi - lo
                # direction: points right iff the query is the left endpoint
                assert (e.i < e.p) == (e.i == lo)


def test_derived_spans_distinct():
    for n in range(2, 8):
        for tree in enumerate_binary_trees(n, seed=2):
            entries = tree_to_pointing(tree)[:-1]
            spans = {(min(e.i, e.p), max(e.i, e.p)) for e in entries}
            assert len(spans) == n - 1


# ---------------------------------------------------------------- pointing -> tree

def test_round_trip_sample():
    tree = binarize(sample_tree())
    assert pointing_to_tree(tree_to_pointing(tree), leaves_of(tree)) == tree


def test_round_trip_two_leaf():
    entries = [Pointing(1, 2, "S"), Pointing(2, 1, "S")]
    tree = pointing_to_tree(entries, [("x", "A", DUMMY), ("y", "B", DUMMY)])
    assert tree == BinaryNode("S", BinaryLeaf(1, "x", "A"), BinaryLeaf(2, "y", "B"))


def test_round_trip_exhaustive_small():
    for n in range(2, 8):
        for tree in enumerate_binary_trees(n, seed=1, unary_pool=(DUMMY, "NP")):
            entries = tree_to_pointing(tree)
            assert pointing_to_tree(entries, leaves_of(tree)) == tree


def test_single_leaf_round_trip():
    leaf = BinaryLeaf(1, "a", "T", "NP")
    assert pointing_to_tree([], [("a", "T", "NP")]) == leaf


def test_injectivity_fixed_labels():
    for n in range(2, 7):
        seen = {}
        for tree in enumerate_binary_trees(n, label_pool=("X",), seed=0):
            key = tuple(tree_to_pointing(tree))
            assert key not in seen, "two distinct trees share a pointing set"
            seen[key] = tree


def test_invalid_pointing_raises_structured_error():
    bad = [Pointing(1, 4, "S"), Pointing(2, 3, "S"),
           Pointing(3, 4, "S"), Pointing(4, 1, "S")]
    with pytest.raises(PointingError) as err:
        pointing_to_tree(bad, [("w", "T", DUMMY)] * 4)
    assert err.value.diagnostics.reason == "laminarity"


# ---------------------------------------------------------------- validation

def test_crossing_counterexample_rejected_at_token_3():
    diag = validate_pointing([
        Pointing(1, 4, "S"), Pointing(2, 3, "S"),
        Pointing(3, 4, "S"), Pointing(4, 1, "S")])
    assert not diag.valid
    assert diag.reason == "laminarity"
    assert "token 3" in diag.message
    assert set(diag.offenders) == {(2, 3), (3, 4)}


def test_constructed_pointings_always_validate():
    checked = 0
    for n in range(2, 7):
        for tree in enumerate_binary_trees(n, seed=4):
            assert validate_pointing(tree_to_pointing(tree)).valid
            checked += 1
    assert checked > 50


def test_all_valid_sets_at_n3_come_from_the_two_trees():
    # enumeration oracle: exactly two shapes exist at n = 3, so exactly their
    # pointing sets validate; every other arrangement must be rejected
    valid_sets = {
        tuple((e.i, e.p) for e in tree_to_pointing(t))
        for t in enumerate_binary_trees(3, label_pool=("X",), seed=0)
    }
    assert valid_sets == {((1, 3), (2, 3), (3, 1)), ((1, 3), (2, 1), (3, 1))}
    for targets in valid_sets:
        entries = [Pointing(i, p, "X") for i, p in targets]
        assert validate_pointing(entries).valid
    # a non-tree arrangement: spans (1,2) and (2,3) cross at token 2
    diag = validate_pointing([Pointing(1, 2, "X"), Pointing(2, 3, "X"),
                              Pointing(3, 1, "X")])
    assert not diag.valid and diag.reason == "laminarity"


def test_duplicate_span_distinctness():
    diag = validate_pointing([
        Pointing(1, 4, "S"), Pointing(2, 3, "X"),
        Pointing(3, 2, "X"), Pointing(4, 1, "S")])
    assert not diag.valid
    assert diag.reason == "distinctness"
    assert set(diag.offenders) == {2, 3}


def test_missing_full_span():
    diag = validate_pointing([
        Pointing(1, 2, "S"), Pointing(2, 1, "S"),
        Pointing(3, 4, "S"), Pointing(4, 1, "S")])
    assert not diag.valid
    assert diag.reason == "coverage"
    assert "(1, 4)" in diag.message


def test_trivial_entry_label_must_match_root():
    entries = tree_to_pointing(binarize(sample_tree()))
    broken = entries[:-1] + [entries[-1]._replace(label="NP")]
    diag = validate_pointing(broken)
    assert not diag.valid
    assert diag.reason == "label-mismatch"


def test_trivial_entry_must_target_one():
    entries = tree_to_pointing(binarize(sample_tree()))
    broken = entries[:-1] + [entries[-1]._replace(p=2)]
    diag = validate_pointing(broken)
    assert not diag.valid and diag.reason in ("coverage", "distinctness")


def test_coverage_checks():
    assert validate_pointing([]).valid
    diag = validate_pointing([Pointing(1, 1, "S")])
    assert not diag.valid and diag.reason == "coverage"
    diag = validate_pointing([Pointing(1, 2, "S"), Pointing(1, 2, "S")])
    assert not diag.valid and diag.reason == "coverage"


# ---------------------------------------------------------------- text format

def test_pointing_text_round_trip():
    entries = tree_to_pointing(binarize(sample_tree()))
    text = pointing_to_text(entries)
    assert text.splitlines()[0] == "1 -> 5 S"
    assert text_to_pointing(text) == entries


def test_pointing_text_rejects_garbage():
    with pytest.raises(ValueError, match="line 1"):
        text_to_pointing("1 => 5 S")


# ---------------------------------------------------------------- properties

@settings(max_examples=60, deadline=None)
@given(st.integers(2, 8), st.integers(0, 10_000))
def test_round_trip_random_shapes(n, seed):
    import numpy as np

    from helpers import random_gold_tree
    from pointparse.verification import scratch_vocab

    vocab = scratch_vocab()
    tree = random_gold_tree(n, vocab, np.random.default_rng(seed))
    entries = tree_to_pointing(tree)
    assert validate_pointing(entries).valid
    assert pointing_to_tree(entries, leaves_of(tree)) == tree
