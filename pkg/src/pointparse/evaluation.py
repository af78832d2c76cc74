"""Labeled-bracketing precision/recall/F1 and the batch-1 speed benchmark.

Brackets are the labeled spans of every non-preterminal node (multiset, root
included, width-1 unary brackets included).  An optional punctuation list
deletes leaves by POS tag from both sides before spans are extracted.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass

from .decoder import WorkCounter, parse_sentence
from .trees import SyntaxTree, parse_bracketed

# POS tags deleted under the usual evalb-with-Collins-rules setup.
COLLINS_PUNCTUATION = frozenset({",", ":", "``", "''", "."})


@dataclass(frozen=True)
class EvalResult:
    matched: int
    gold_total: int
    pred_total: int
    exact_match: int
    sentences: int

    @property
    def lp(self) -> float:
        return self.matched / self.pred_total if self.pred_total else 0.0

    @property
    def lr(self) -> float:
        return self.matched / self.gold_total if self.gold_total else 0.0

    @property
    def f1(self) -> float:
        lp, lr = self.lp, self.lr
        return 2 * lp * lr / (lp + lr) if lp + lr > 0 else 0.0


def labeled_brackets(tree: SyntaxTree, punct=None) -> Counter:
    """Multiset of (i, j, label) brackets; positions renumbered after deletions."""
    punct = punct or ()
    brackets = Counter()
    next_pos = 0

    def walk(node):
        nonlocal next_pos
        if node.is_preterminal:
            if node.label in punct:
                return None
            next_pos += 1
            return next_pos, next_pos
        lo = hi = None
        for child in node.children:
            got = walk(child)
            if got is not None:
                lo = got[0] if lo is None else lo
                hi = got[1]
        if lo is None:  # covered only deleted tokens
            return None
        brackets[(lo, hi, node.label)] += 1
        return lo, hi

    walk(tree)
    return brackets


def eval_spans(gold: SyntaxTree, pred: SyntaxTree, punct=None):
    """Per-sentence (matched, gold_total, pred_total) bracket counts."""
    gold_tokens = sum(1 for _ in gold.leaves())
    pred_tokens = sum(1 for _ in pred.leaves())
    if gold_tokens != pred_tokens:
        raise ValueError(
            f"token count mismatch: gold has {gold_tokens}, prediction has {pred_tokens}")
    gold_brackets = labeled_brackets(gold, punct)
    pred_brackets = labeled_brackets(pred, punct)
    matched = sum((gold_brackets & pred_brackets).values())
    return matched, sum(gold_brackets.values()), sum(pred_brackets.values())


def corpus_eval(gold_trees, pred_trees, punct=None) -> EvalResult:
    """Micro-averaged bracket counts over aligned tree lists."""
    if len(gold_trees) != len(pred_trees):
        raise ValueError(
            f"corpus length mismatch: {len(gold_trees)} gold vs {len(pred_trees)} predicted")
    matched = gold_total = pred_total = exact = 0
    for gold, pred in zip(gold_trees, pred_trees):
        m, g, p = eval_spans(gold, pred, punct)
        matched += m
        gold_total += g
        pred_total += p
        exact += int(m == g == p)
    return EvalResult(matched, gold_total, pred_total, exact, len(gold_trees))


def corpus_eval_files(gold_path, pred_path, punct=None) -> EvalResult:
    with open(gold_path, encoding="utf-8") as fh:
        gold = parse_bracketed(fh.read())
    with open(pred_path, encoding="utf-8") as fh:
        pred = parse_bracketed(fh.read())
    return corpus_eval(gold, pred, punct)


def format_report(gold_trees, pred_trees, punct=None, per_sentence=False) -> str:
    """Tab-separated summary, optionally preceded by evalb-ordered sentence lines."""
    lines = []
    if per_sentence:
        lines.append("id\tlength\tmatched\tgold\tpred")
        for idx, (gold, pred) in enumerate(zip(gold_trees, pred_trees), start=1):
            m, g, p = eval_spans(gold, pred, punct)
            length = sum(1 for _ in gold.leaves())
            lines.append(f"{idx}\t{length}\t{m}\t{g}\t{p}")
    result = corpus_eval(gold_trees, pred_trees, punct)
    lines.append("sentences\tmatched\tgold\tpred\tLP\tLR\tF1\texact")
    lines.append(
        f"{result.sentences}\t{result.matched}\t{result.gold_total}\t{result.pred_total}"
        f"\t{result.lp:.4f}\t{result.lr:.4f}\t{result.f1:.4f}\t{result.exact_match}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- speed


@dataclass(frozen=True)
class SpeedReport:
    sentences: int
    seconds: float
    sents_per_sec: float
    split_evals: int


def speed_benchmark(sentences, params, vocab, log_space=False) -> SpeedReport:
    """Wall-clock parse of the sentence list one at a time (batch size 1)."""
    counter = WorkCounter()
    start = time.perf_counter()
    for tokens in sentences:
        parse_sentence(tokens, params, vocab, log_space=log_space, counter=counter)
    elapsed = time.perf_counter() - start
    if not sentences:
        return SpeedReport(0, 0.0, 0.0, 0)
    rate = len(sentences) / elapsed if elapsed > 0 else float("inf")
    return SpeedReport(len(sentences), elapsed, rate, counter.split_evals)
