"""Bijection between binarized trees and per-token pointing decisions.

Each position i in a sentence of n tokens points at the far endpoint of the
largest internal span that starts or ends at i and carries that span's label.
Position n additionally gets the trivial entry (n -> 1) with the root label, so
there are exactly n pointings for n tokens.  The first n-1 entries determine
the tree uniquely and can be inverted by laminar-family assembly.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import NamedTuple

from .trees import DUMMY, BinaryLeaf, BinaryNode, BinaryTree, spans_of


class Pointing(NamedTuple):
    i: int  # query position, 1-based
    p: int  # target position, 1-based; never equal to i
    label: str


@dataclass(frozen=True)
class PointingDiagnostics:
    """Outcome of validate_pointing; reason/message set only when invalid."""

    valid: bool
    reason: str | None = None
    message: str | None = None
    offenders: tuple = ()

    def __bool__(self):
        return self.valid


class PointingError(ValueError):
    """Raised when a pointing set cannot be assembled into a tree."""

    def __init__(self, diagnostics: PointingDiagnostics):
        super().__init__(f"{diagnostics.reason}: {diagnostics.message}")
        self.diagnostics = diagnostics


def tree_to_pointing(tree: BinaryTree) -> list[Pointing]:
    """Pointing decisions of a binarized tree, sorted by query position.

    For every i <= n-1 the entry targets the far endpoint of the largest
    internal span touching i; the entry for i = n is (n -> 1, root label).
    A single-leaf tree has no internal spans and yields the empty list.
    """
    if isinstance(tree, BinaryLeaf):
        return []
    spans = spans_of(tree)
    n = max(s.j for s in spans)
    root_label = next(s.label for s in spans if s.i == 1 and s.j == n)

    best = {}
    for span in sorted(spans):
        width = span.j - span.i
        for endpoint in (span.i, span.j):
            held = best.get(endpoint)
            if held is None or width > held.j - held.i:
                best[endpoint] = span

    entries = []
    for q in range(1, n):
        span = best[q]
        target = span.j if span.i == q else span.i
        entries.append(Pointing(q, target, span.label))
    entries.append(Pointing(n, 1, root_label))
    return entries


def pointing_to_text(entries) -> str:
    """Debug text format, one pointing per line: ``i -> p label``."""
    return "".join(f"{e.i} -> {e.p} {e.label}\n" for e in entries)


def text_to_pointing(text) -> list[Pointing]:
    entries = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        parts = line.split(None, 3)
        if len(parts) != 4 or parts[1] != "->":
            raise ValueError(f"line {lineno}: expected 'i -> p label', got {line!r}")
        entries.append(Pointing(int(parts[0]), int(parts[2]), parts[3]))
    return entries


def _derived_spans(entries):
    """(span -> (query, label)) for entries 1..n-1, or a diagnostics on duplicates."""
    spans = {}
    for e in sorted(entries)[:-1]:
        key = (min(e.i, e.p), max(e.i, e.p))
        if key in spans:
            other, _ = spans[key]
            return None, PointingDiagnostics(
                False, "distinctness",
                f"queries {other} and {e.i} both derive span {key}",
                (other, e.i))
        spans[key] = (e.i, e.label)
    return spans, None


def _laminarity_violation(span_keys):
    """First crossing pair among the span keys, or None."""
    items = sorted(span_keys, key=lambda s: (s[0], -s[1]))
    for a in range(len(items)):
        i1, j1 = items[a]
        for b in range(a + 1, len(items)):
            i2, j2 = items[b]
            if i2 > j1:
                break
            if j2 > j1:
                return (i1, j1), (i2, j2), i2  # overlap starts at token i2
    return None


def validate_pointing(entries) -> PointingDiagnostics:
    """Check whether a pointing set determines a valid binarized tree.

    Accepts iff the spans derived from entries 1..n-1 are distinct, laminar,
    and include (1, n); the trivial entry n targets position 1 with the root's
    label; and re-deriving the pointing from the assembled tree reproduces the
    input (each span maximal at its query position).
    """
    n = len(entries)
    if n == 0:
        return PointingDiagnostics(True)
    by_query = {}
    for e in entries:
        if not (1 <= e.i <= n and 1 <= e.p <= n):
            return PointingDiagnostics(
                False, "coverage", f"entry {e.i} -> {e.p} outside 1..{n}", (e.i,))
        if e.i == e.p:
            return PointingDiagnostics(
                False, "coverage", f"entry {e.i} points at itself", (e.i,))
        if e.i in by_query:
            return PointingDiagnostics(
                False, "coverage", f"query position {e.i} appears twice", (e.i,))
        by_query[e.i] = e
    if len(by_query) != n:
        missing = sorted(set(range(1, n + 1)) - set(by_query))
        return PointingDiagnostics(
            False, "coverage", f"query positions missing: {missing}", tuple(missing))

    spans, diag = _derived_spans([by_query[q] for q in range(1, n + 1)])
    if diag is not None:
        return diag

    violation = _laminarity_violation(spans.keys())
    if violation is not None:
        first, second, token = violation
        return PointingDiagnostics(
            False, "laminarity",
            f"token {token} cannot belong to both spans {first} and {second}",
            (first, second))

    if (1, n) not in spans:
        return PointingDiagnostics(
            False, "coverage", f"full span (1, {n}) is missing", ((1, n),))

    trivial = by_query[n]
    if trivial.p != 1:
        return PointingDiagnostics(
            False, "coverage",
            f"entry {n} must target position 1, found {trivial.p}", (n,))
    root_label = spans[(1, n)][1]
    if trivial.label != root_label:
        return PointingDiagnostics(
            False, "label-mismatch",
            f"entry {n} labeled {trivial.label!r}, root span labeled {root_label!r}",
            (1, n))

    try:
        tree = _assemble(spans, _placeholder_leaves(n))
    except PointingError as err:
        return err.diagnostics

    rederived = tree_to_pointing(tree)
    for got, want in zip(sorted(by_query.values()), rederived):
        if got != want:
            return PointingDiagnostics(
                False, "maximality",
                f"entry {got.i} -> {got.p} ({got.label}) is not the maximal span "
                f"decision at {got.i}; expected {want.i} -> {want.p} ({want.label})",
                (got.i,))
    return PointingDiagnostics(True)


def _placeholder_leaves(n):
    return [(f"w{t}", "X", DUMMY) for t in range(1, n + 1)]


def pointing_to_tree(entries, leaves) -> BinaryTree:
    """Assemble a pointing set back into the unique tree it encodes.

    ``leaves`` supplies (token, pos, unary_label) per position, 1-based order.
    A single leaf pairs with the empty pointing set.  Raises PointingError
    naming the first violated condition on invalid input.
    """
    n = len(leaves)
    if n == 0:
        raise ValueError("cannot build a tree without leaves")
    if n == 1:
        if entries:
            raise ValueError("single-token sentences have an empty pointing set")
        word, pos, unary = leaves[0]
        return BinaryLeaf(1, word, pos, unary)
    if len(entries) != n:
        raise ValueError(f"{len(entries)} pointings but {n} leaves")
    diag = validate_pointing(entries)
    if not diag:
        raise PointingError(diag)
    spans, _ = _derived_spans(sorted(entries))
    return _assemble(spans, leaves)


def _assemble(spans, leaves) -> BinaryTree:
    """Build the binary tree for a distinct laminar span family including (1, n).

    Spans sharing a start position are nested, so the widths at each start form
    a strictly decreasing chain; the left child under (i, j) is the widest span
    starting at i that is strictly narrower than (i, j).
    """
    n = len(leaves)
    by_start = defaultdict(list)
    for (i, j), (_, label) in spans.items():
        by_start[i].append((j, label))
    for chain in by_start.values():
        chain.sort(reverse=True)
        ends = [j for j, _ in chain]
        assert len(set(ends)) == len(ends), "laminar spans at one start cannot tie"

    consumed = 0

    def leaf(t):
        word, pos, unary = leaves[t - 1]
        return BinaryLeaf(t, word, pos, unary)

    def build(i, j, label):
        nonlocal consumed
        consumed += 1
        if j == i + 1:
            return BinaryNode(label, leaf(i), leaf(j))
        split = None
        for end, sub_label in by_start[i]:
            if end < j:
                split = (end, sub_label)
                break
        if split is None:
            left = leaf(i)
            k = i
        else:
            k, sub_label = split
            left = build(i, k, sub_label)
        if k + 1 == j:
            right = leaf(j)
        else:
            entry = spans.get((k + 1, j))
            if entry is None:
                raise PointingError(PointingDiagnostics(
                    False, "coverage",
                    f"span ({i}, {j}) splits at {k} but no span ({k + 1}, {j}) exists",
                    ((i, j),)))
            right = build(k + 1, j, entry[1])
        return BinaryNode(label, left, right)

    root = build(1, n, spans[(1, n)][1])
    if consumed != len(spans):
        raise PointingError(PointingDiagnostics(
            False, "coverage",
            f"{len(spans) - consumed} spans unreachable from the root", ()))
    return root
