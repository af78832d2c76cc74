"""Target derivation, cross-entropy objective, Adam with warm-up, training loop.

Supervision comes straight off the pointing representation of each gold tree:
general pointing targets the far endpoint per position (position n targets 1),
singleton pointing targets the position itself, the general label classifier
targets each pointing's span label, and the unary classifier targets each
leaf's collapsed unary label.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import model as model_mod
from .model import ModelConfig, ModelParams, ScoreTables, TokenIds, encode_tokens
from .pointing import tree_to_pointing
from .trees import BinaryTree, binary_leaves, debinarize
from .vocab import Vocabulary


class TargetSet(NamedTuple):
    gp: np.ndarray  # (n,) 1-based target positions; gp[n-1] = 1
    sp: np.ndarray  # (n,) 1-based, always the position itself
    gc: np.ndarray  # (n,) general-label ids
    uc: np.ndarray  # (n,) unary-label ids


@dataclass(frozen=True)
class Hyperparams:
    learning_rate: float = 0.004
    warmup_steps: int = 100
    batch_size: int = 8
    epochs: int = 50
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0
    rare_threshold: int = 2   # training words below this count get UNK dropout
    unk_prob: float = 0.5

    def __post_init__(self):
        if min(self.learning_rate, self.batch_size, self.epochs, self.eps) <= 0:
            raise ValueError("learning rate, batch size, epochs, eps must be positive")
        if self.warmup_steps < 0:
            raise ValueError("warmup_steps must be nonnegative")
        if not (0 < self.beta1 < 1 and 0 < self.beta2 < 1):
            raise ValueError("Adam moment coefficients must lie in (0, 1)")


class TrainingDiverged(RuntimeError):
    pass


class NonFiniteGradient(RuntimeError):
    def __init__(self, tensor_name):
        super().__init__(f"non-finite gradient in tensor {tensor_name!r}")
        self.tensor_name = tensor_name


# ---------------------------------------------------------------- targets & loss


def targets_from_tree(tree: BinaryTree, vocab: Vocabulary) -> TargetSet:
    """Read the supervision for all four tables off a gold binarized tree."""
    leaves = binary_leaves(tree)
    n = len(leaves)
    uc = np.array([vocab.unary_id(leaf.unary_label) for leaf in leaves], dtype=np.int64)
    if n == 1:
        empty = np.zeros(0, dtype=np.int64)
        return TargetSet(empty, empty, empty, uc)
    entries = tree_to_pointing(tree)
    gp = np.array([e.p for e in entries], dtype=np.int64)
    gc = np.array([vocab.general_id(e.label) for e in entries], dtype=np.int64)
    sp = np.arange(1, n + 1, dtype=np.int64)
    assert not np.any(gp == sp), "general pointing never targets its own query"
    return TargetSet(gp, sp, gc, uc)


def loss(tables: ScoreTables, targets: TargetSet) -> float:
    """Summed cross entropy of the four tables against their targets."""
    total = 0.0
    if targets.gp.size:
        rows = np.arange(targets.gp.size)
        total -= np.log(tables.gp[rows, targets.gp - 1]).sum()
        total -= np.log(tables.sp[rows, targets.sp - 1]).sum()
        total -= np.log(tables.gc[rows, targets.gc]).sum()
    rows = np.arange(targets.uc.size)
    total -= np.log(tables.uc[rows, targets.uc]).sum()
    return float(total)


def _logit_grads(tables: ScoreTables, targets: TargetSet):
    """d loss / d logits for each softmax-cross-entropy table: probs minus one-hot."""
    dgp = np.zeros_like(tables.gp)
    dsp = np.zeros_like(tables.sp)
    dgc = np.zeros_like(tables.gc)
    if targets.gp.size:
        rows = np.arange(targets.gp.size)
        dgp = tables.gp.copy()
        dgp[rows, targets.gp - 1] -= 1.0
        dsp = tables.sp.copy()
        dsp[rows, targets.sp - 1] -= 1.0
        dgc = tables.gc.copy()
        dgc[rows, targets.gc] -= 1.0
    rows = np.arange(targets.uc.size)
    duc = tables.uc.copy()
    duc[rows, targets.uc] -= 1.0
    return dgp, dsp, dgc, duc


def backward(tokens, params: ModelParams, vocab: Vocabulary, targets: TargetSet):
    """Loss and exact reverse-mode gradients for one sentence."""
    return backward_from_ids(encode_tokens(tokens, vocab), params, targets)


def backward_from_ids(ids: TokenIds, params: ModelParams, targets: TargetSet):
    tables, cache = model_mod.forward_from_ids(ids, params)
    value = loss(tables, targets)
    dgp, dsp, dgc, duc = _logit_grads(tables, targets)
    grads = model_mod.backprop(cache, params, dgp, dsp, dgc, duc)
    for name, grad in grads.items():
        if not np.all(np.isfinite(grad)):
            raise NonFiniteGradient(name)
    return value, grads


# ---------------------------------------------------------------- optimizer


class AdamState:
    """First and second moment accumulators, one pair per parameter tensor."""

    def __init__(self, params: ModelParams):
        self.m = params.zero_grads()
        self.v = params.zero_grads()


def effective_lr(hyper: Hyperparams, step_index: int) -> float:
    """Linear ramp 0 -> base over the warm-up steps, constant afterwards."""
    if hyper.warmup_steps > 0 and step_index < hyper.warmup_steps:
        return hyper.learning_rate * step_index / hyper.warmup_steps
    return hyper.learning_rate


def adam_step(params: ModelParams, grads, state: AdamState, step_index: int,
              hyper: Hyperparams) -> ModelParams:
    """In-place Adam update with bias correction; step_index starts at 1."""
    assert step_index >= 1
    lr = effective_lr(hyper, step_index)
    b1, b2 = hyper.beta1, hyper.beta2
    for name, tensor in params.tensors.items():
        g = grads[name]
        m = state.m[name]
        v = state.v[name]
        m *= b1
        m += (1 - b1) * g
        v *= b2
        v += (1 - b2) * g * g
        mhat = m / (1 - b1 ** step_index)
        vhat = v / (1 - b2 ** step_index)
        tensor -= lr * mhat / (np.sqrt(vhat) + hyper.eps)
    return params


# ---------------------------------------------------------------- training loop


@dataclass(frozen=True)
class EpochStats:
    epoch: int
    mean_loss: float
    dev_f1: float
    lr: float


@dataclass
class TrainResult:
    params: ModelParams      # the best-dev-F1 checkpoint
    vocab: Vocabulary
    history: list[EpochStats]
    best_epoch: int
    best_f1: float


def format_history(history) -> str:
    """Machine-parseable epoch log: epoch, mean loss, dev F1, lr; tab-separated."""
    return "".join(
        f"{row.epoch}\t{row.mean_loss:.6f}\t{row.dev_f1:.4f}\t{row.lr:.6g}\n"
        for row in history)


def train(corpus: list[BinaryTree], dev, hyper: Hyperparams,
          config: ModelConfig | None = None) -> TrainResult:
    """Mini-batch training with seeded shuffling and dev-F1 model selection.

    ``corpus`` holds binarized gold trees; ``dev`` holds n-ary gold trees.  The
    vocabulary is built from the corpus only.  Gradients are averaged over each
    batch in a fixed order, so identical inputs and seed give bitwise-identical
    checkpoints.
    """
    from .decoder import parse_sentence
    from .evaluation import corpus_eval

    if not corpus:
        raise ValueError("training corpus is empty")
    config = config or ModelConfig()
    steps_total = hyper.epochs * ((len(corpus) + hyper.batch_size - 1) // hyper.batch_size)
    if hyper.warmup_steps > steps_total:
        raise ValueError(
            f"warmup_steps {hyper.warmup_steps} exceeds total steps {steps_total}")

    vocab = Vocabulary.from_trees(corpus)
    params = ModelParams.initialize(config, vocab, hyper.seed)
    state = AdamState(params)
    rng = np.random.default_rng(hyper.seed)

    base_ids = []
    all_targets = []
    rare_positions = []
    for tree in corpus:
        leaves = binary_leaves(tree)
        ids = encode_tokens([(l.word, l.pos) for l in leaves], vocab)
        base_ids.append(ids)
        all_targets.append(targets_from_tree(tree, vocab))
        rare_positions.append(np.array(
            [vocab.is_rare(l.word, hyper.rare_threshold) for l in leaves], dtype=bool))

    dev_tokens = [t.tokens() for t in dev]

    history = []
    best_params = params.copy()
    best_f1 = -1.0
    best_epoch = 0
    step = 0
    for epoch in range(1, hyper.epochs + 1):
        order = rng.permutation(len(corpus))
        total_loss = 0.0
        for start in range(0, len(order), hyper.batch_size):
            batch = order[start:start + hyper.batch_size]
            step += 1
            grad_sum = params.zero_grads()
            for idx in batch:
                ids = base_ids[idx]
                rare = rare_positions[idx]
                if rare.any():
                    drop = rare & (rng.random(rare.size) < hyper.unk_prob)
                    if drop.any():
                        word_ids = ids.word_ids.copy()
                        word_ids[drop] = 0
                        ids = TokenIds(word_ids, ids.pos_ids, ids.char_ids)
                value, grads = backward_from_ids(ids, params, all_targets[idx])
                if not np.isfinite(value):
                    raise TrainingDiverged(
                        f"non-finite loss at epoch {epoch}, step {step}")
                total_loss += value
                for name in grad_sum:
                    grad_sum[name] += grads[name]
            scale = 1.0 / len(batch)
            for name in grad_sum:
                grad_sum[name] *= scale
            adam_step(params, grad_sum, state, step, hyper)

        mean_loss = total_loss / len(corpus)
        if dev_tokens:
            predictions = [parse_sentence(toks, params, vocab) for toks in dev_tokens]
            dev_f1 = corpus_eval(list(dev), predictions).f1
        else:
            dev_f1 = float("nan")
        history.append(EpochStats(epoch, mean_loss, dev_f1, effective_lr(hyper, step)))
        if dev_tokens and dev_f1 > best_f1:
            best_f1 = dev_f1
            best_epoch = epoch
            best_params = params.copy()

    if not dev_tokens:
        best_params, best_epoch, best_f1 = params, hyper.epochs, float("nan")
    return TrainResult(best_params, vocab, history, best_epoch, best_f1)


# ---------------------------------------------------------------- diagnostics


def pointing_accuracy(params: ModelParams, vocab: Vocabulary,
                      trees: list[BinaryTree]) -> float:
    """Fraction of positions whose argmax general pointing hits the gold target."""
    hit = 0
    total = 0
    for tree in trees:
        leaves = binary_leaves(tree)
        if len(leaves) < 2:
            continue
        targets = targets_from_tree(tree, vocab)
        tables = model_mod.forward([(l.word, l.pos) for l in leaves], params, vocab)
        predicted = tables.gp.argmax(axis=1) + 1
        hit += int((predicted == targets.gp).sum())
        total += targets.gp.size
    return hit / total if total else 1.0


def labeled_f1_on(params: ModelParams, vocab: Vocabulary,
                  trees: list[BinaryTree]) -> float:
    """Labeled F1 of the parser against the (debinarized) gold trees."""
    from .decoder import parse_sentence
    from .evaluation import corpus_eval

    gold = [debinarize(t) for t in trees]
    pred = [parse_sentence(g.tokens(), params, vocab) for g in gold]
    return corpus_eval(gold, pred).f1
