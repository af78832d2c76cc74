"""Bracketed treebank I/O, right-branching binarization, and span extraction."""

from __future__ import annotations

import warnings
from typing import Iterator, NamedTuple

DUMMY = "∅"  # label of spans introduced by binarization
UNARY_JOIN = "+"  # delimiter for collapsed unary chains
FALLBACK_ROOT = "TOP"

# POS tags that legitimately contain '-' and must not be truncated.
_KEEP_DASH = {"-NONE-", "-LRB-", "-RRB-"}
_EMPTY_ELEMENT = "-NONE-"


class TreebankError(ValueError):
    """Malformed bracketed input."""

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class SyntaxTree:
    """n-ary tree node; a preterminal carries the POS as its label and the token as word."""

    __slots__ = ("label", "children", "word")

    def __init__(self, label, children=(), word=None):
        self.label = label
        self.children = tuple(children)
        self.word = word
        assert (word is None) != (len(self.children) == 0), \
            "node must be either a preterminal (word, no children) or internal"

    @property
    def is_preterminal(self):
        return self.word is not None

    def leaves(self) -> Iterator["SyntaxTree"]:
        if self.is_preterminal:
            yield self
        else:
            for child in self.children:
                yield from child.leaves()

    def tokens(self):
        """(word, pos) pairs in surface order."""
        return [(leaf.word, leaf.label) for leaf in self.leaves()]

    def __eq__(self, other):
        if not isinstance(other, SyntaxTree):
            return NotImplemented
        return (self.label == other.label and self.word == other.word
                and self.children == other.children)

    def __hash__(self):
        return hash((self.label, self.word, self.children))

    def __repr__(self):
        return write_bracketed(self)


class BinaryLeaf:
    """Leaf of a binarized tree: 1-based position, token, POS, collapsed unary label."""

    __slots__ = ("position", "word", "pos", "unary_label")

    def __init__(self, position, word, pos, unary_label=DUMMY):
        self.position = position
        self.word = word
        self.pos = pos
        self.unary_label = unary_label

    def __eq__(self, other):
        if not isinstance(other, BinaryLeaf):
            return NotImplemented
        return (self.position == other.position and self.word == other.word
                and self.pos == other.pos and self.unary_label == other.unary_label)

    def __hash__(self):
        return hash((self.position, self.word, self.pos, self.unary_label))

    def __repr__(self):
        return f"BinaryLeaf({self.position}, {self.word!r}, {self.pos!r}, {self.unary_label!r})"


class BinaryNode:
    """Internal node of a binarized tree; always exactly two children."""

    __slots__ = ("label", "left", "right")

    def __init__(self, label, left, right):
        self.label = label
        self.left = left
        self.right = right

    def __eq__(self, other):
        if not isinstance(other, BinaryNode):
            return NotImplemented
        return (self.label == other.label and self.left == other.left
                and self.right == other.right)

    def __hash__(self):
        return hash((self.label, self.left, self.right))

    def __repr__(self):
        return f"BinaryNode({self.label!r}, {self.left!r}, {self.right!r})"


# A binarized tree over one token is just a BinaryLeaf.
BinaryTree = BinaryNode | BinaryLeaf


class LabeledSpan(NamedTuple):
    i: int  # 1-based, inclusive
    j: int  # 1-based, inclusive
    label: str


# ---------------------------------------------------------------- reading


def _tokenize(text):
    """Yield (token, line, column) with 1-based positions; tokens are '(', ')', or atoms."""
    line, col = 1, 1
    atom, atom_line, atom_col = [], 0, 0
    for ch in text:
        if ch in "()" or ch.isspace():
            if atom:
                yield "".join(atom), atom_line, atom_col
                atom = []
            if ch in "()":
                yield ch, line, col
        else:
            if not atom:
                atom_line, atom_col = line, col
            atom.append(ch)
        if ch == "\n":
            line += 1
            col = 1
        else:
            col += 1
    if atom:
        yield "".join(atom), atom_line, atom_col


def strip_label(label):
    """Drop function tags and trace indices: everything from the first '-' or '='."""
    if label in _KEEP_DASH:
        return label
    cut = len(label)
    for mark in "-=":
        pos = label.find(mark)
        if pos > 0:
            cut = min(cut, pos)
    return label[:cut]


def parse_bracketed(text) -> list[SyntaxTree]:
    """Parse PTB-style bracketed trees from ``text``.

    Function tags and trace indices are stripped from labels, -NONE- subtrees are
    removed, and label-less wrapper parentheses are unwrapped.  Trees that become
    empty after -NONE- removal are skipped with a warning.
    """
    tokens = list(_tokenize(text))
    pos = 0

    def parse_node():
        nonlocal pos
        tok, ln, cl = tokens[pos]
        assert tok == "("
        pos += 1
        if pos >= len(tokens):
            raise TreebankError("unbalanced parentheses: unexpected end of input", ln, cl)
        label = ""
        if tokens[pos][0] not in "()":
            label = tokens[pos][0]
            pos += 1
        children = []
        word = None
        while pos < len(tokens) and tokens[pos][0] != ")":
            tok, ln2, cl2 = tokens[pos]
            if tok == "(":
                if word is not None:
                    raise TreebankError(
                        f"mixed token and subtree under {label!r}", ln2, cl2)
                children.append(parse_node())
            else:
                if children or word is not None:
                    raise TreebankError(
                        f"unexpected second token {tok!r} under {label!r}", ln2, cl2)
                word = tok
                pos += 1
        if pos >= len(tokens):
            raise TreebankError("unbalanced parentheses: missing ')'", ln, cl)
        pos += 1  # consume ')'
        if word is None and not children:
            raise TreebankError(f"empty node {label!r}", ln, cl)
        if word is not None:
            return SyntaxTree(label, word=word)
        return SyntaxTree(label, children)

    raw = []
    while pos < len(tokens):
        tok, ln, cl = tokens[pos]
        if tok != "(":
            raise TreebankError(f"expected '(', found {tok!r}", ln, cl)
        raw.append(parse_node())

    trees = []
    index = 0
    for node in raw:
        # Unwrap PTB's label-less outer parentheses.
        parts = node.children if (node.label == "" and not node.is_preterminal) else (node,)
        for part in parts:
            index += 1
            cleaned = _clean(part)
            if cleaned is None:
                warnings.warn(f"tree #{index} is empty after -NONE- removal; skipped")
            else:
                trees.append(cleaned)
    return trees


def _clean(node):
    """Strip function tags, remove -NONE- subtrees; None when nothing remains."""
    if node.is_preterminal:
        if node.label == _EMPTY_ELEMENT:
            return None
        return SyntaxTree(strip_label(node.label), word=node.word)
    children = [c for c in (_clean(child) for child in node.children) if c is not None]
    if not children:
        return None
    return SyntaxTree(strip_label(node.label), children)


def write_bracketed(tree: SyntaxTree) -> str:
    """Canonical single-line bracketing; inverse of parse_bracketed on clean trees."""
    if tree.is_preterminal:
        return f"({tree.label} {tree.word})"
    return f"({tree.label} {' '.join(write_bracketed(c) for c in tree.children)})"


def write_treebank(trees) -> str:
    """One tree per line, trailing newline when nonempty."""
    return "".join(write_bracketed(t) + "\n" for t in trees)


# ---------------------------------------------------------------- binarization


def binarize(tree: SyntaxTree, joiner=UNARY_JOIN) -> BinaryTree:
    """Right-branching binarization with collapsed unary chains.

    A node with children c1..cm (m > 2) becomes c1 paired with a dummy-labeled
    node over c2..cm, recursively.  Unary chains over internal nodes collapse
    into a single ``joiner``-joined label; chains directly over a preterminal
    become the leaf's unary label.
    """

    def descend(node, next_pos):
        if node.is_preterminal:
            return BinaryLeaf(next_pos, node.word, node.label), next_pos + 1
        chain = []
        cur = node
        while not cur.is_preterminal and len(cur.children) == 1:
            chain.append(cur.label)
            cur = cur.children[0]
        if cur.is_preterminal:
            unary = joiner.join(chain) if chain else DUMMY
            return BinaryLeaf(next_pos, cur.word, cur.label, unary), next_pos + 1
        label = joiner.join(chain + [cur.label]) if chain else cur.label
        return sequence(cur.children, next_pos, label)

    def sequence(nodes, next_pos, label):
        left, next_pos = descend(nodes[0], next_pos)
        if len(nodes) == 2:
            right, next_pos = descend(nodes[1], next_pos)
        else:
            right, next_pos = sequence(nodes[1:], next_pos, DUMMY)
        return BinaryNode(label, left, right), next_pos

    result, _ = descend(tree, 1)
    return result


def debinarize(tree: BinaryTree, joiner=UNARY_JOIN, fallback_root=FALLBACK_ROOT) -> SyntaxTree:
    """Invert binarize: dissolve dummy nodes, re-expand collapsed unary chains.

    A dummy-labeled root leaves a multi-node residue, which is attached under
    ``fallback_root``.
    """

    def expand_leaf(leaf):
        node = SyntaxTree(leaf.pos, word=leaf.word)
        if leaf.unary_label != DUMMY:
            for lab in reversed(leaf.unary_label.split(joiner)):
                node = SyntaxTree(lab, [node])
        return node

    def descend(node):
        if isinstance(node, BinaryLeaf):
            return [expand_leaf(node)]
        children = descend(node.left) + descend(node.right)
        if node.label == DUMMY:
            return children
        labels = node.label.split(joiner)
        out = SyntaxTree(labels[-1], children)
        for lab in reversed(labels[:-1]):
            out = SyntaxTree(lab, [out])
        return [out]

    roots = descend(tree)
    if len(roots) == 1 and not roots[0].is_preterminal:
        return roots[0]
    return SyntaxTree(fallback_root, roots)


# ---------------------------------------------------------------- spans


def binary_leaves(tree: BinaryTree) -> list[BinaryLeaf]:
    if isinstance(tree, BinaryLeaf):
        return [tree]
    return binary_leaves(tree.left) + binary_leaves(tree.right)


def spans_of(tree: BinaryTree) -> set[LabeledSpan]:
    """The n-1 labeled internal spans of a binarized tree (unary spans excluded)."""
    spans = set()

    def walk(node):
        if isinstance(node, BinaryLeaf):
            return node.position, node.position
        lo, left_hi = walk(node.left)
        right_lo, hi = walk(node.right)
        assert left_hi + 1 == right_lo, "leaf positions must be contiguous"
        spans.add(LabeledSpan(lo, hi, node.label))
        return lo, hi

    walk(tree)
    return spans


def unary_spans_of(tree: BinaryTree) -> set[LabeledSpan]:
    """Width-1 spans for leaves carrying a collapsed unary label."""
    return {
        LabeledSpan(leaf.position, leaf.position, leaf.unary_label)
        for leaf in binary_leaves(tree)
        if leaf.unary_label != DUMMY
    }


def is_laminar(spans) -> bool:
    """True when every pair of spans is nested or disjoint."""
    items = sorted(((s.i, s.j) for s in spans), key=lambda s: (s[0], -s[1]))
    for a in range(len(items)):
        i1, j1 = items[a]
        for b in range(a + 1, len(items)):
            i2, j2 = items[b]
            if i2 > j1:
                break
            if j2 > j1:  # i1 < i2 <= j1 < j2: crossing
                return False
    return True
