"""Shared fixtures: tiny model setups, finite-difference checking, random gold trees."""

import numpy as np

from pointparse import (BinaryLeaf, BinaryNode, ModelConfig, ModelParams,
                        Vocabulary, binarize, binary_leaves, parse_bracketed)
from pointparse import model as M
from pointparse import training as T
from pointparse.toybank import sample_treebank

SAMPLE_BRACKETING = ("(S (NP (PRP She)) (VP (VBZ enjoys) "
                     "(S (VP (VBG playing) (NP (NN tennis))))) (. .))")


def sample_tree():
    return parse_bracketed(SAMPLE_BRACKETING)[0]


def tiny_setup(n_sentences=8, corpus_seed=3, param_seed=7, **config_kw):
    """Small corpus, vocabulary, and freshly initialized parameters."""
    defaults = dict(d_model=10, d_char=6, d_ff=14, layers=2,
                    point_hidden=12, label_hidden=8, max_len=32)
    defaults.update(config_kw)
    config = ModelConfig(**defaults)
    trees = [binarize(t) for t in sample_treebank(n_sentences, seed=corpus_seed)]
    vocab = Vocabulary.from_trees(trees)
    params = ModelParams.initialize(config, vocab, seed=param_seed)
    return trees, vocab, params, config


def tokens_of(tree):
    return [(leaf.word, leaf.pos) for leaf in binary_leaves(tree)]


def random_gold_tree(n, vocab, rng):
    """Random binary tree over n leaves with labels/words drawn from a vocabulary."""
    words = [w for w in vocab.words[1:]] or ["w"]

    def build(lo, hi):
        if lo == hi:
            word = words[rng.integers(len(words))]
            pos = vocab.pos_tags[rng.integers(vocab.n_pos)]
            unary = vocab.unary_labels[rng.integers(vocab.n_unary)]
            return BinaryLeaf(lo, word, pos, unary)
        k = int(rng.integers(lo, hi))
        label = vocab.general_labels[rng.integers(vocab.n_general)]
        return BinaryNode(label, build(lo, k), build(k + 1, hi))

    return build(1, n)


# ---------------------------------------------------------------- finite differences


def relu_signature(cache):
    """Sign pattern of every ReLU pre-activation in one forward pass."""
    bits = [tuple((layer[9] > 0).ravel()) for layer in cache["layer_caches"]]
    bits += [tuple((hc[0] > 0).ravel()) for hc in cache["head_caches"].values()]
    return tuple(bits)


def _loss_and_signature(ids, params, targets):
    tables, cache = M.forward_from_ids(ids, params)
    return T.loss(tables, targets), relu_signature(cache)


def _priority_flat_indices(name, tensor, ids):
    """For embedding tables, restrict probes to rows the sentence actually uses."""
    if name == "word_emb":
        rows = np.unique(ids.word_ids)
    elif name == "pos_tag_emb":
        rows = np.unique(ids.pos_ids)
    elif name == "char_emb":
        rows = np.unique([c for cs in ids.char_ids for c in cs])
    elif name == "position_emb":
        rows = np.arange(len(ids.word_ids))
    else:
        return None
    cols = tensor.shape[1]
    return (rows[:, None] * cols + np.arange(cols)).ravel()


def fd_max_rel_errors(ids, params, targets, rng, samples=8, h=1e-4):
    """Max relative error between analytic and central-difference gradients.

    Probes whose +/-h evaluations land on different ReLU sign patterns straddle
    a kink, where central differences do not estimate the derivative; those
    probes are redrawn.  The relative-error denominator is floored so that
    roundoff noise on near-zero entries is not misread as disagreement.
    """
    _, grads = T.backward_from_ids(ids, params, targets)
    worst = {}
    for name, tensor in params.tensors.items():
        grad = grads[name]
        candidates = _priority_flat_indices(name, tensor, ids)
        if candidates is None:
            candidates = np.arange(tensor.size)
        candidates = rng.permutation(candidates)
        goal = min(len(candidates), samples)
        tensor_worst = 0.0
        probed = 0
        for flat in candidates:
            if probed >= goal:
                break
            index = np.unravel_index(flat, tensor.shape)
            orig = tensor[index]
            tensor[index] = orig + h
            plus, sig_plus = _loss_and_signature(ids, params, targets)
            tensor[index] = orig - h
            minus, sig_minus = _loss_and_signature(ids, params, targets)
            tensor[index] = orig
            if sig_plus != sig_minus:
                continue
            probed += 1
            numeric = (plus - minus) / (2 * h)
            analytic = grad[index]
            rel = abs(numeric - analytic) / max(abs(numeric), abs(analytic), 1e-6)
            tensor_worst = max(tensor_worst, rel)
        assert probed > 0, f"no kink-free probes found for {name}"
        worst[name] = tensor_worst
    return worst
