"""Deterministic toy treebank sampler for demos, tests, and benchmarks.

A small hand-written grammar over ~50 words.  Attachment is cued by the word
choice ("of" phrases modify nouns, "with"/"near" phrases modify verbs), so the
trees are learnable from the surface string.  Gerund complements introduce a
unary chain over an internal node, pronouns and names introduce unary chains
over preterminals.
"""

from __future__ import annotations

import numpy as np

from .trees import SyntaxTree

_LEX = {
    "DT": ["the", "a", "every", "some", "no"],
    "JJ": ["big", "red", "old", "happy", "quiet"],
    "NN": ["cat", "dog", "bird", "car", "tree", "song", "book", "river"],
    "NNP": ["John", "Mary", "Paris", "Rex"],
    "PRP": ["she", "he", "it"],
    "VBZ": ["sees", "likes", "finds", "enjoys", "paints", "hears"],
    "VBG": ["playing", "singing", "reading", "chasing", "drawing"],
    "IN_NP": ["of"],
    "IN_VP": ["with", "near"],
}


def _word(rng, pos):
    options = _LEX[pos]
    return options[rng.integers(len(options))]


def _preterminal(rng, pos_key, pos_tag=None):
    return SyntaxTree(pos_tag or pos_key, word=_word(rng, pos_key))


def _np_base(rng):
    roll = rng.random()
    if roll < 0.35:
        return SyntaxTree("NP", [_preterminal(rng, "DT"), _preterminal(rng, "NN")])
    if roll < 0.55:
        return SyntaxTree("NP", [_preterminal(rng, "DT"), _preterminal(rng, "JJ"),
                                 _preterminal(rng, "NN")])
    if roll < 0.8:
        return SyntaxTree("NP", [_preterminal(rng, "PRP")])
    return SyntaxTree("NP", [_preterminal(rng, "NNP")])


def _np(rng, allow_pp=True):
    head = _np_base(rng)
    if allow_pp and rng.random() < 0.3:
        pp = SyntaxTree("PP", [_preterminal(rng, "IN_NP", "IN"), _np_base(rng)])
        return SyntaxTree("NP", [head, pp])
    return head


def _vp(rng):
    verb = _preterminal(rng, "VBZ")
    roll = rng.random()
    if roll < 0.15:
        return SyntaxTree("VP", [verb])
    if roll < 0.35:
        # gerund complement: a unary S over VP, collapsed at binarization
        gerund = SyntaxTree("VP", [_preterminal(rng, "VBG"), _np(rng, allow_pp=False)])
        return SyntaxTree("VP", [verb, SyntaxTree("S", [gerund])])
    if roll < 0.75:
        return SyntaxTree("VP", [verb, _np(rng)])
    pp = SyntaxTree("PP", [_preterminal(rng, "IN_VP", "IN"), _np(rng, allow_pp=False)])
    return SyntaxTree("VP", [verb, _np(rng, allow_pp=False), pp])


def sample_tree(rng) -> SyntaxTree:
    return SyntaxTree("S", [_np(rng), _vp(rng), SyntaxTree(".", word=".")])


def sample_treebank(n_sentences, seed=0) -> list[SyntaxTree]:
    """``n_sentences`` gold trees, identical across runs for a fixed seed."""
    rng = np.random.default_rng(seed)
    return [sample_tree(rng) for _ in range(n_sentences)]
