"""Greedy top-down decoding from score tables to a binarized tree.

A FIFO queue starts at the full span; each popped span (i, j) splits at the
argmax-scoring k, labels the children it creates, and pushes non-singleton
children.  Split scores combine the two child pointing probabilities: the
singleton table covers one-token children, the general table everything else.
The pointing scores are directional, so gp(a, b) and gp(b, a) differ.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from . import model as model_mod
from .model import ModelParams, ScoreTables
from .trees import BinaryLeaf, BinaryNode, BinaryTree, debinarize
from .vocab import Vocabulary


@dataclass
class WorkCounter:
    """Split work: the sum of (j - i) over every processed span with j > i.

    A width-2 span has a single forced split, counted as one evaluation even
    though no comparison is needed.
    """

    split_evals: int = 0


def split_score(tables: ScoreTables, i, k, j, log_space=False) -> float:
    """Score of splitting span (i, j) into (i, k) and (k+1, j); all 1-based.

    k == i uses the singleton score for the left child, k == j-1 for the right
    child (k == i takes precedence when both coincide).
    """
    if not (1 <= i <= k < j <= tables.gp.shape[0]):
        raise IndexError(f"split ({i}, {k}, {j}) out of range")
    if k == i:
        left, right = tables.sp[i - 1, i - 1], tables.gp[i, j - 1]
    elif k == j - 1:
        left, right = tables.gp[j - 2, i - 1], tables.sp[j - 1, j - 1]
    else:
        left, right = tables.gp[k - 1, i - 1], tables.gp[k, j - 1]
    if log_space:
        return float(np.log(left) + np.log(right))
    return float(left + right)


def _split_scores(tables, i, j, log_space):
    """Vector of split scores for k = i .. j-1 over span (i, j)."""
    ks = np.arange(i - 1, j - 1)              # 0-based rows for k = i..j-1
    left = tables.gp[ks, i - 1].copy()        # score of child (i, k) pointing k -> i
    right = tables.gp[ks + 1, j - 1].copy()   # score of child (k+1, j) pointing k+1 -> j
    left[0] = tables.sp[i - 1, i - 1]
    if ks.size >= 2:
        right[-1] = tables.sp[j - 1, j - 1]
    if log_space:
        return np.log(left) + np.log(right)
    return left + right


def best_split(tables: ScoreTables, i, j, log_space=False) -> int:
    """The k maximizing the split score over [i, j-1]; ties go to the smallest k."""
    if j <= i:
        raise ValueError(f"span ({i}, {j}) has no split point")
    return i + int(np.argmax(_split_scores(tables, i, j, log_space)))


def assign_label(tables: ScoreTables, position, kind) -> int:
    """Argmax label id at a 1-based position; ties go to the smallest id."""
    if kind == "general":
        return int(np.argmax(tables.gc[position - 1]))
    if kind == "unary":
        return int(np.argmax(tables.uc[position - 1]))
    raise ValueError(f"kind must be 'general' or 'unary', got {kind!r}")


def decode(tables: ScoreTables, leaves, vocab: Vocabulary, *,
           log_space=False, counter: WorkCounter | None = None) -> BinaryTree:
    """Build the binarized tree for score tables over ``leaves`` [(token, pos), ...].

    Always yields a well-formed binary tree with n-1 internal nodes; unary leaf
    labels come from the unary classifier, the root label from position 1.
    """
    n = len(leaves)
    if n == 0:
        raise ValueError("cannot decode an empty sentence")
    if tables.gp.shape[0] != n:
        raise ValueError(f"tables cover {tables.gp.shape[0]} positions, got {n} leaves")

    def leaf(t):
        word, pos = leaves[t - 1]
        unary = vocab.unary_labels[assign_label(tables, t, "unary")]
        return BinaryLeaf(t, word, pos, unary)

    if n == 1:
        return leaf(1)

    def general(t):
        return vocab.general_labels[assign_label(tables, t, "general")]

    root = BinaryNode(general(1), None, None)
    nodes = {(1, n): root}
    queue = deque([(1, n)])
    while queue:
        i, j = queue.popleft()
        if counter is not None:
            counter.split_evals += j - i
        node = nodes[(i, j)]
        if j == i + 1:
            node.left = leaf(i)
            node.right = leaf(j)
            continue
        k = i + int(np.argmax(_split_scores(tables, i, j, log_space)))
        if k == i:
            node.left = leaf(i)
            child = BinaryNode(general(i + 1), None, None)
            node.right = child
            nodes[(i + 1, j)] = child
            queue.append((i + 1, j))
        elif k == j - 1:
            child = BinaryNode(general(j - 1), None, None)
            node.left = child
            nodes[(i, j - 1)] = child
            queue.append((i, j - 1))
            node.right = leaf(j)
        else:
            left = BinaryNode(general(k), None, None)
            right = BinaryNode(general(k + 1), None, None)
            node.left, node.right = left, right
            nodes[(i, k)] = left
            nodes[(k + 1, j)] = right
            queue.append((i, k))
            queue.append((k + 1, j))
    return root


def parse_sentence(tokens, params: ModelParams, vocab: Vocabulary, *,
                   log_space=False, counter: WorkCounter | None = None):
    """Score, decode, and debinarize one POS-tagged sentence."""
    tables = model_mod.forward(tokens, params, vocab)
    tree = decode(tables, tokens, vocab, log_space=log_space, counter=counter)
    return debinarize(tree)
