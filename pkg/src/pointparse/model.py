"""Sentence scorer: embeddings, self-attentive encoder, pointing and label heads.

All arithmetic is float64 numpy.  The cached forward pass keeps every
intermediate needed by ``backprop``, a hand-written reverse pass that the test
suite checks against central finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict
from typing import NamedTuple

import numpy as np

from .vocab import Vocabulary

LN_EPS = 1e-5
HEADS = ("gp", "sp", "gc", "uc")


@dataclass(frozen=True)
class ModelConfig:
    d_model: int = 64
    d_char: int = 32
    d_ff: int = 128
    layers: int = 2
    point_hidden: int = 128  # hidden width of the gp/sp heads
    label_hidden: int = 64   # hidden width of the gc/uc heads
    max_len: int = 256

    def hidden_for(self, head):
        return self.point_hidden if head in ("gp", "sp") else self.label_hidden

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


class ScoreTables(NamedTuple):
    """Row-stochastic outputs for one sentence.

    gp, sp: (n, n) pointing distributions; gc: (n, |L_g|); uc: (n, |L_u|).
    """

    gp: np.ndarray
    sp: np.ndarray
    gc: np.ndarray
    uc: np.ndarray


class TokenIds(NamedTuple):
    word_ids: np.ndarray          # (n,)
    pos_ids: np.ndarray           # (n,)
    char_ids: tuple               # n tuples of char ids


def encode_tokens(tokens, vocab: Vocabulary) -> TokenIds:
    """Map (word, pos) pairs to ids; unknown words become UNK, unknown POS raise."""
    words = np.array([vocab.word_id(w) for w, _ in tokens], dtype=np.int64)
    pos = np.array([vocab.pos_id(t) for _, t in tokens], dtype=np.int64)
    chars = tuple(tuple(vocab.char_ids(w)) for w, _ in tokens)
    return TokenIds(words, pos, chars)


# ---------------------------------------------------------------- parameters


class ModelParams:
    """Named parameter tensors plus the architecture config they belong to."""

    def __init__(self, config: ModelConfig, tensors: dict[str, np.ndarray]):
        self.config = config
        self.tensors = tensors

    def __getitem__(self, name) -> np.ndarray:
        return self.tensors[name]

    def names(self):
        return list(self.tensors)

    def copy(self) -> "ModelParams":
        return ModelParams(self.config, {k: v.copy() for k, v in self.tensors.items()})

    def zero_grads(self) -> dict[str, np.ndarray]:
        return {k: np.zeros_like(v) for k, v in self.tensors.items()}

    @classmethod
    def initialize(cls, config: ModelConfig, vocab: Vocabulary, seed: int) -> "ModelParams":
        rng = np.random.default_rng(seed)
        d, dc, dff = config.d_model, config.d_char, config.d_ff

        def table(rows, cols):
            return rng.normal(0.0, 0.1, size=(rows, cols))

        def linear(fan_in, fan_out):
            scale = np.sqrt(2.0 / (fan_in + fan_out))
            return rng.normal(0.0, scale, size=(fan_in, fan_out))

        t = {
            "word_emb": table(vocab.n_words, d),
            "pos_tag_emb": table(vocab.n_pos, d),
            "position_emb": table(config.max_len, d),
            "char_emb": table(vocab.n_chars, dc),
            "char_wx": linear(dc, dc),
            "char_wh": linear(dc, dc),
            "char_b": np.zeros(dc),
            "char_proj": linear(dc, d),
        }
        for layer in range(config.layers):
            p = f"enc{layer}_"
            t[p + "att_wq"] = linear(d, d)
            t[p + "att_wk"] = linear(d, d)
            t[p + "att_wv"] = linear(d, d)
            t[p + "att_wo"] = linear(d, d)
            t[p + "ln_gain"] = np.ones(d)
            t[p + "ln_bias"] = np.zeros(d)
            t[p + "ffn_w1"] = linear(d, dff)
            t[p + "ffn_b1"] = np.zeros(dff)
            t[p + "ffn_w2"] = linear(dff, d)
            t[p + "ffn_b2"] = np.zeros(d)
        for head in HEADS:
            hidden = config.hidden_for(head)
            t[head + "_w1"] = linear(d, hidden)
            t[head + "_b1"] = np.zeros(hidden)
            t[head + "_w2"] = linear(hidden, d)
            t[head + "_b2"] = np.zeros(d)
        t["gc_class"] = np.ascontiguousarray(linear(d, vocab.n_general).T)  # (|L_g|, d)
        t["uc_class"] = np.ascontiguousarray(linear(d, vocab.n_unary).T)    # (|L_u|, d)
        return cls(config, t)


# ---------------------------------------------------------------- forward pieces


def softmax_rows(z):
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def _char_forward(cids, params):
    """Recurrent pass over one word's characters; returns (d,) vector and cache."""
    emb = params["char_emb"][list(cids)]                 # (m, dc)
    wx, wh, b = params["char_wx"], params["char_wh"], params["char_b"]
    m, dc = emb.shape
    states = np.zeros((m + 1, dc))
    for t in range(m):
        states[t + 1] = np.tanh(emb[t] @ wx + states[t] @ wh + b)
    out = states[m] @ params["char_proj"]                # (d,)
    return out, (cids, emb, states)


def _char_backward(dout, cache, params, grads):
    cids, emb, states = cache
    m = emb.shape[0]
    grads["char_proj"] += np.outer(states[m], dout)
    ds = dout @ params["char_proj"].T
    for t in range(m - 1, -1, -1):
        da = ds * (1.0 - states[t + 1] ** 2)             # tanh'
        grads["char_wx"] += np.outer(emb[t], da)
        grads["char_wh"] += np.outer(states[t], da)
        grads["char_b"] += da
        grads["char_emb"][cids[t]] += da @ params["char_wx"].T
        ds = da @ params["char_wh"].T


def _embed_forward(ids: TokenIds, params):
    """Summed char + word + POS embeddings, (n, d)."""
    char_rows = []
    char_caches = []
    for cids in ids.char_ids:
        row, cache = _char_forward(cids, params)
        char_rows.append(row)
        char_caches.append(cache)
    emb = (np.stack(char_rows)
           + params["word_emb"][ids.word_ids]
           + params["pos_tag_emb"][ids.pos_ids])
    return emb, char_caches


def _embed_backward(demb, ids, char_caches, params, grads):
    np.add.at(grads["word_emb"], ids.word_ids, demb)
    np.add.at(grads["pos_tag_emb"], ids.pos_ids, demb)
    for i, cache in enumerate(char_caches):
        _char_backward(demb[i], cache, params, grads)


def _layer_forward(x, layer, params):
    """One encoder layer: self-attention + residual + layernorm, then FFN + residual."""
    p = f"enc{layer}_"
    d = x.shape[1]
    q = x @ params[p + "att_wq"]
    k = x @ params[p + "att_wk"]
    v = x @ params[p + "att_wv"]
    scores = (q @ k.T) / np.sqrt(d)                      # (n, n)
    attn = softmax_rows(scores)
    mixed = attn @ v
    r = x + mixed @ params[p + "att_wo"]
    mu = r.mean(axis=1, keepdims=True)
    sig = np.sqrt(r.var(axis=1, keepdims=True) + LN_EPS)
    xhat = (r - mu) / sig
    u = xhat * params[p + "ln_gain"] + params[p + "ln_bias"]
    z1 = u @ params[p + "ffn_w1"] + params[p + "ffn_b1"]
    h1 = np.maximum(z1, 0.0)
    out = u + h1 @ params[p + "ffn_w2"] + params[p + "ffn_b2"]
    return out, (x, q, k, v, attn, mixed, sig, xhat, u, z1, h1)


def _layer_backward(dout, layer, cache, params, grads):
    p = f"enc{layer}_"
    x, q, k, v, attn, mixed, sig, xhat, u, z1, h1 = cache
    d = x.shape[1]

    # FFN sublayer (residual from u)
    du = dout.copy()
    grads[p + "ffn_w2"] += h1.T @ dout
    grads[p + "ffn_b2"] += dout.sum(axis=0)
    dh1 = dout @ params[p + "ffn_w2"].T
    dz1 = dh1 * (z1 > 0.0)
    grads[p + "ffn_w1"] += u.T @ dz1
    grads[p + "ffn_b1"] += dz1.sum(axis=0)
    du += dz1 @ params[p + "ffn_w1"].T

    # layernorm
    gain = params[p + "ln_gain"]
    grads[p + "ln_gain"] += (du * xhat).sum(axis=0)
    grads[p + "ln_bias"] += du.sum(axis=0)
    dxhat = du * gain
    dr = (dxhat
          - dxhat.mean(axis=1, keepdims=True)
          - xhat * (dxhat * xhat).mean(axis=1, keepdims=True)) / sig

    # attention sublayer (residual from x)
    dx = dr.copy()
    grads[p + "att_wo"] += mixed.T @ dr
    dmixed = dr @ params[p + "att_wo"].T
    dattn = dmixed @ v.T
    dv = attn.T @ dmixed
    dscores = (dattn - (dattn * attn).sum(axis=1, keepdims=True)) * attn
    dq = dscores @ k / np.sqrt(d)
    dk = dscores.T @ q / np.sqrt(d)
    grads[p + "att_wq"] += x.T @ dq
    grads[p + "att_wk"] += x.T @ dk
    grads[p + "att_wv"] += x.T @ dv
    dx += dq @ params[p + "att_wq"].T
    dx += dk @ params[p + "att_wk"].T
    dx += dv @ params[p + "att_wv"].T
    return dx


def _encoder_forward(emb, params, config):
    n = emb.shape[0]
    if n > config.max_len:
        raise ValueError(f"sentence length {n} exceeds max_len {config.max_len}")
    x = emb + params["position_emb"][:n]
    layer_caches = []
    for layer in range(config.layers):
        x, cache = _layer_forward(x, layer, params)
        layer_caches.append(cache)
    return x, layer_caches


def _encoder_backward(dh, layer_caches, params, config, grads):
    dx = dh
    for layer in range(config.layers - 1, -1, -1):
        dx = _layer_backward(dx, layer, layer_caches[layer], params, grads)
    n = dx.shape[0]
    grads["position_emb"][:n] += dx
    return dx  # gradient w.r.t. the raw embeddings


def _head_forward(h, head, params):
    z1 = h @ params[head + "_w1"] + params[head + "_b1"]
    h1 = np.maximum(z1, 0.0)
    out = h1 @ params[head + "_w2"] + params[head + "_b2"]
    return out, (z1, h1)


def _head_backward(dout, head, h, cache, params, grads):
    z1, h1 = cache
    grads[head + "_w2"] += h1.T @ dout
    grads[head + "_b2"] += dout.sum(axis=0)
    dh1 = dout @ params[head + "_w2"].T
    dz1 = dh1 * (z1 > 0.0)
    grads[head + "_w1"] += h.T @ dz1
    grads[head + "_b1"] += dz1.sum(axis=0)
    return dz1 @ params[head + "_w1"].T


# ---------------------------------------------------------------- public operations


def char_encode(word, params, vocab) -> np.ndarray:
    """Character-level vector of one word, (d_model,)."""
    out, _ = _char_forward(tuple(vocab.char_ids(word)), params)
    return out


def embed_sentence(tokens, params, vocab) -> np.ndarray:
    """Per-token embedding rows e_i = char_i + word_i + pos_i, (n, d_model)."""
    emb, _ = _embed_forward(encode_tokens(tokens, vocab), params)
    return emb


def encode(embeddings, params, config=None) -> np.ndarray:
    """Contextualize embedding rows with position embeddings and attention layers."""
    config = config or _infer_config(params)
    h, _ = _encoder_forward(np.asarray(embeddings, dtype=float), params, config)
    return h


def _infer_config(params):
    if isinstance(params, ModelParams):
        return params.config
    raise TypeError("pass a ModelParams or an explicit config")


def head_transform(h, head, params) -> np.ndarray:
    """Task-specific position-wise feed-forward transform of the encoder states."""
    if head not in HEADS:
        raise ValueError(f"unknown head {head!r}; expected one of {HEADS}")
    out, _ = _head_forward(np.asarray(h, dtype=float), head, params)
    return out


def pointing_tables(h_gp, h_sp):
    """Row-stochastic pointing matrices from per-position query vectors."""
    gp = softmax_rows(h_gp @ h_gp.T)
    sp = softmax_rows(h_sp @ h_sp.T)
    return gp, sp


def label_tables(h_gc, h_uc, params):
    """Row-stochastic label distributions from per-position query vectors."""
    gc = softmax_rows(h_gc @ params["gc_class"].T)
    uc = softmax_rows(h_uc @ params["uc_class"].T)
    return gc, uc


def forward(tokens, params: ModelParams, vocab: Vocabulary) -> ScoreTables:
    """Score a POS-tagged sentence; all four tables are row-stochastic."""
    tables, _ = forward_from_ids(encode_tokens(tokens, vocab), params)
    return tables


def forward_from_ids(ids: TokenIds, params: ModelParams):
    """Cached forward pass; the cache feeds backprop."""
    emb, char_caches = _embed_forward(ids, params)
    h, layer_caches = _encoder_forward(emb, params, params.config)
    head_out = {}
    head_caches = {}
    for head in HEADS:
        head_out[head], head_caches[head] = _head_forward(h, head, params)
    gp, sp = pointing_tables(head_out["gp"], head_out["sp"])
    gc, uc = label_tables(head_out["gc"], head_out["uc"], params)
    tables = ScoreTables(gp, sp, gc, uc)
    cache = {
        "ids": ids,
        "char_caches": char_caches,
        "layer_caches": layer_caches,
        "h": h,
        "head_out": head_out,
        "head_caches": head_caches,
        "tables": tables,
    }
    return tables, cache


def backprop(cache, params: ModelParams, d_gp_logits, d_sp_logits,
             d_gc_logits, d_uc_logits) -> dict[str, np.ndarray]:
    """Reverse pass from gradients at the four pre-softmax logit matrices.

    Returns one gradient tensor per parameter tensor; encoder and embedding
    gradients accumulate contributions from all four heads.
    """
    grads = {k: np.zeros_like(v) for k, v in params.tensors.items()}
    h = cache["h"]
    head_out = cache["head_out"]

    d_head = {}
    # pointing logits L = H H^T: both operands carry gradient
    d_head["gp"] = (d_gp_logits + d_gp_logits.T) @ head_out["gp"]
    d_head["sp"] = (d_sp_logits + d_sp_logits.T) @ head_out["sp"]
    # label logits L = H W^T
    d_head["gc"] = d_gc_logits @ params["gc_class"]
    grads["gc_class"] += d_gc_logits.T @ head_out["gc"]
    d_head["uc"] = d_uc_logits @ params["uc_class"]
    grads["uc_class"] += d_uc_logits.T @ head_out["uc"]

    dh = np.zeros_like(h)
    for head in HEADS:
        dh += _head_backward(d_head[head], head, h, cache["head_caches"][head],
                             params, grads)

    demb = _encoder_backward(dh, cache["layer_caches"], params, params.config, grads)
    _embed_backward(demb, cache["ids"], cache["char_caches"], params, grads)
    return grads
