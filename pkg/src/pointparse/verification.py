"""Independent oracles: exhaustive tree enumeration, round-trip checks, a
reference recursive decoder, synthetic score tables, and trivial baselines.

The reference decoder deliberately re-implements split scoring and label
argmax with plain Python loops so that agreement with the queue-based decoder
is a meaningful cross-check rather than a tautology.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .model import ScoreTables, softmax_rows
from .pointing import pointing_to_text, pointing_to_tree, tree_to_pointing
from .trees import DUMMY, BinaryLeaf, BinaryNode, BinaryTree, SyntaxTree, binary_leaves
from .vocab import Vocabulary


def catalan(k: int) -> int:
    return comb(2 * k, k) // (k + 1)


# ---------------------------------------------------------------- enumeration

_LEAF = None


def _shape_descriptors(width):
    """All binary shapes over ``width`` leaves as nested (left, right) tuples."""
    if width == 1:
        return [_LEAF]
    shapes = []
    for left_width in range(1, width):
        for left in _shape_descriptors(left_width):
            for right in _shape_descriptors(width - left_width):
                shapes.append((left, right))
    return shapes


def _leaf_count(desc):
    if desc is _LEAF:
        return 1
    return _leaf_count(desc[0]) + _leaf_count(desc[1])


def enumerate_binary_trees(n, label_pool=("S", "NP", "VP", "X"), seed=0,
                           unary_pool=(DUMMY,)) -> list[BinaryTree]:
    """Every binary tree shape over n leaves, once each, with seeded labels.

    The number of shapes is the (n-1)-th Catalan number.  Valid for 2 <= n <= 12;
    beyond that the enumeration blows up combinatorially.
    """
    if not 2 <= n <= 12:
        raise ValueError(f"n must be in [2, 12], got {n}")
    rng = np.random.default_rng(seed)
    label_pool = list(label_pool)
    unary_pool = list(unary_pool)

    def build(desc, lo):
        if desc is _LEAF:
            unary = unary_pool[rng.integers(len(unary_pool))]
            return BinaryLeaf(lo, f"w{lo}", "T", unary), lo + 1
        label = label_pool[rng.integers(len(label_pool))]
        left, nxt = build(desc[0], lo)
        right, nxt = build(desc[1], nxt)
        return BinaryNode(label, left, right), nxt

    trees = []
    for desc in _shape_descriptors(n):
        tree, _ = build(desc, 1)
        trees.append(tree)
    assert len(trees) == catalan(n - 1)
    return trees


# ---------------------------------------------------------------- round trips


@dataclass(frozen=True)
class RoundtripReport:
    checked: int
    mismatches: int
    counterexample: str | None = None

    @property
    def ok(self):
        return self.mismatches == 0


def roundtrip_report(n_max, seed=0, mutate=None) -> RoundtripReport:
    """Tree -> pointing -> tree over the full enumeration for n = 2 .. n_max.

    ``mutate`` optionally rewrites each pointing set before inversion; it exists
    so fault injection can demonstrate that mismatches are caught and reported.
    """
    if n_max > 10:
        raise ValueError("round-trip enumeration is capped at n_max = 10")
    checked = 0
    mismatches = 0
    counterexample = None
    for n in range(2, n_max + 1):
        for tree in enumerate_binary_trees(n, seed=seed, unary_pool=(DUMMY, "NP", "S+VP")):
            entries = tree_to_pointing(tree)
            if mutate is not None:
                entries = mutate(entries)
            leaves = [(l.word, l.pos, l.unary_label) for l in binary_leaves(tree)]
            try:
                back = pointing_to_tree(entries, leaves)
                same = back == tree
            except Exception as err:
                back, same = None, False
                note = f"inversion failed: {err}"
            checked += 1
            if not same:
                mismatches += 1
                if counterexample is None:
                    detail = note if back is None else "inverted tree differs"
                    counterexample = (
                        f"n={n}: {detail}\n{pointing_to_text(entries)}")
    return RoundtripReport(checked, mismatches, counterexample)


# ---------------------------------------------------------------- reference decoder


def reference_decode(tables: ScoreTables, leaves, vocab: Vocabulary,
                     i=1, j=None, log_space=False) -> BinaryTree:
    """Plain recursive transcription of greedy split selection; oracle only."""
    gp, sp, gc, uc = tables
    n = len(leaves)
    if j is None:
        j = n

    def scan_max(values):
        best, best_idx = None, -1
        for idx, val in enumerate(values):
            if best is None or val > best:
                best, best_idx = val, idx
        return best_idx

    def general_label(pos):
        return vocab.general_labels[scan_max(list(gc[pos - 1]))]

    def make_leaf(pos):
        word, tag = leaves[pos - 1][0], leaves[pos - 1][1]
        return BinaryLeaf(pos, word, tag, vocab.unary_labels[scan_max(list(uc[pos - 1]))])

    def split_value(lo, k, hi):
        left = sp[lo - 1][lo - 1] if k == lo else gp[k - 1][lo - 1]
        right = sp[hi - 1][hi - 1] if (k == hi - 1 and k != lo) else gp[k][hi - 1]
        if log_space:
            return float(np.log(left) + np.log(right))
        return float(left + right)

    def recurse(lo, hi, label):
        if lo == hi:
            return make_leaf(lo)
        k = lo + scan_max([split_value(lo, k, hi) for k in range(lo, hi)])
        left = make_leaf(lo) if k == lo else recurse(lo, k, general_label(k))
        right = make_leaf(hi) if k + 1 == hi else recurse(k + 1, hi, general_label(k + 1))
        return BinaryNode(label, left, right)

    if i == j:
        return make_leaf(i)
    return recurse(i, j, general_label(i))


# ---------------------------------------------------------------- synthetic tables


def tables_from_pointing(entries, vocab: Vocabulary, unary_ids=None,
                         peak=0.9) -> ScoreTables:
    """Row-stochastic tables concentrated on a pointing set.

    Each general pointing row puts ``peak`` mass on its target, each singleton
    row on its own position, and each label row on the pointing's label, so a
    greedy decode reconstructs exactly the encoded tree.
    """
    n = len(entries)
    if n < 2:
        raise ValueError("need at least two pointings to shape tables")
    floor = (1.0 - peak) / (n - 1)
    gp = np.full((n, n), floor)
    sp = np.full((n, n), floor)
    for e in entries:
        gp[e.i - 1, e.p - 1] = peak
    np.fill_diagonal(sp, peak)

    def peaked(n_rows, n_cols, hot):
        if n_cols == 1:
            return np.ones((n_rows, 1))
        out = np.full((n_rows, n_cols), (1.0 - peak) / (n_cols - 1))
        out[np.arange(n_rows), hot] = peak
        return out

    gc_hot = np.array([vocab.general_id(e.label) for e in sorted(entries)])
    gc = peaked(n, vocab.n_general, gc_hot)
    if unary_ids is None:
        unary_ids = np.full(n, vocab.unary_id(DUMMY))
    uc = peaked(n, vocab.n_unary, np.asarray(unary_ids))
    return ScoreTables(gp, sp, gc, uc)


def right_chain(n, label="X") -> BinaryTree:
    """Fully right-branching binary tree over n leaves; every decode is k = i."""
    node = BinaryLeaf(n, f"w{n}", "T")
    for pos in range(n - 1, 0, -1):
        node = BinaryNode(label, BinaryLeaf(pos, f"w{pos}", "T"), node)
    return node


def balanced(n, label="X") -> BinaryTree:
    """Midpoint-split binary tree over n leaves."""

    def build(lo, hi):
        if lo == hi:
            return BinaryLeaf(lo, f"w{lo}", "T")
        mid = (lo + hi) // 2
        return BinaryNode(label, build(lo, mid), build(mid + 1, hi))

    return build(1, n)


def scratch_vocab(general_labels=("S", "NP", "VP", "X"),
                  unary_labels=("NP", "S+VP")) -> Vocabulary:
    """Minimal vocabulary with given label inventories; for synthetic decoding."""
    from .vocab import UNK_CHAR, UNK_WORD

    return Vocabulary(
        [UNK_WORD], [UNK_CHAR], ["T"],
        sorted(set(general_labels) | {DUMMY}),
        sorted(set(unary_labels) | {DUMMY}),
    )


def random_tables(n, n_general, n_unary, rng) -> ScoreTables:
    """Row-stochastic tables with logits drawn from a standard normal."""
    return ScoreTables(
        softmax_rows(rng.normal(size=(n, n))),
        softmax_rows(rng.normal(size=(n, n))),
        softmax_rows(rng.normal(size=(n, n_general))),
        softmax_rows(rng.normal(size=(n, n_unary))),
    )


def right_branching_tree(tokens, root_label="S", internal_label="NP") -> SyntaxTree:
    """The trivial right-branching baseline parse of a POS-tagged sentence."""
    preterminals = [SyntaxTree(pos, word=word) for word, pos in tokens]
    if len(preterminals) == 1:
        return SyntaxTree(root_label, preterminals)
    node = preterminals[-1]
    for idx in range(len(preterminals) - 2, 0, -1):
        node = SyntaxTree(internal_label, [preterminals[idx], node])
    return SyntaxTree(root_label, [preterminals[0], node])
