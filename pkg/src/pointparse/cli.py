"""Command-line entry point: train, parse, eval, verify, bench.

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 verification failure.  Settings come from an optional flat ``key = value``
config file; every key can be overridden by the matching flag.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .checkpoint import CheckpointError, load_checkpoint, save_checkpoint
from .decoder import decode, parse_sentence
from .evaluation import (COLLINS_PUNCTUATION, corpus_eval, format_report,
                         speed_benchmark)
from .decoder import WorkCounter
from .model import ModelConfig
from .pointing import Pointing, tree_to_pointing, validate_pointing
from .trees import (TreebankError, binarize, binary_leaves, is_laminar,
                    parse_bracketed, spans_of, write_bracketed)
from .training import Hyperparams, format_history, train
from .vocab import UnknownPosError
from . import verification

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_VERIFY = 3


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------- settings


def read_config_file(path):
    """Flat ``key = value`` pairs; '#' starts a comment."""
    settings = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{lineno}: expected 'key = value'")
                key, value = line.split("=", 1)
                settings[key.strip().replace("-", "_")] = value.strip()
    except OSError as err:
        raise UsageError(f"cannot read config file: {err}") from None
    return settings


def merge_settings(args):
    settings = {}
    if getattr(args, "config", None):
        settings.update(read_config_file(args.config))
    for key, value in vars(args).items():
        if key in ("config", "command") or value is None:
            continue
        settings[key] = value
    return settings


def _convert(settings, key, kind, default=None):
    value = settings.get(key, default)
    if value is None or isinstance(value, kind):
        return value
    try:
        if kind is bool:
            return str(value).strip().lower() in ("1", "true", "yes", "on")
        return kind(value)
    except (TypeError, ValueError):
        raise UsageError(f"setting {key!r} must be {kind.__name__}, got {value!r}") from None


def _require(settings, key, kind, what):
    value = _convert(settings, key, kind)
    if value is None:
        raise UsageError(f"{what} requires --{key.replace('_', '-')}")
    return value


def _punct_set(settings):
    value = settings.get("punct_exclude")
    if not value:
        return None
    if isinstance(value, str) and value.strip().lower() == "collins":
        return COLLINS_PUNCTUATION
    return frozenset(tag for tag in str(value).split(",") if tag)


def _model_config(settings):
    base = ModelConfig()
    return ModelConfig(
        d_model=_convert(settings, "dim", int, base.d_model),
        d_char=_convert(settings, "d_char", int, base.d_char),
        d_ff=_convert(settings, "d_ff", int, base.d_ff),
        layers=_convert(settings, "layers", int, base.layers),
        point_hidden=_convert(settings, "point_hidden", int, base.point_hidden),
        label_hidden=_convert(settings, "label_hidden", int, base.label_hidden),
        max_len=_convert(settings, "max_len", int, base.max_len),
    )


def _hyperparams(settings, seed):
    base = Hyperparams()
    try:
        return Hyperparams(
            learning_rate=_convert(settings, "learning_rate", float, base.learning_rate),
            warmup_steps=_convert(settings, "warmup_steps", int, base.warmup_steps),
            batch_size=_convert(settings, "batch", int, base.batch_size),
            epochs=_convert(settings, "epochs", int, base.epochs),
            seed=seed,
            rare_threshold=_convert(settings, "rare_threshold", int, base.rare_threshold),
            unk_prob=_convert(settings, "unk_prob", float, base.unk_prob),
        )
    except ValueError as err:
        raise UsageError(str(err)) from None


# ---------------------------------------------------------------- input readers


def _read_text(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as err:
        raise DataError(str(err)) from None


def read_treebank(path):
    trees = parse_bracketed(_read_text(path))
    if not trees:
        raise DataError(f"{path}: no trees found")
    return trees


def read_tagged_sentences(text, delimiter="_"):
    """token_POS lines, or a CoNLL-style two-column file (token TAB pos)."""
    if "\t" in text:
        sentences = []
        current = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line:
                if current:
                    sentences.append(current)
                    current = []
                continue
            parts = line.split()
            if len(parts) != 2:
                raise DataError(f"line {lineno}: expected 'token<TAB>pos', got {raw!r}")
            current.append((parts[0], parts[1]))
        if current:
            sentences.append(current)
        return sentences
    sentences = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        sentence = []
        for item in line.split():
            word, sep, tag = item.rpartition(delimiter)
            if not sep or not word or not tag:
                raise DataError(
                    f"line {lineno}: malformed token/POS pair {item!r} "
                    f"(expected token{delimiter}POS)")
            sentence.append((word, tag))
        sentences.append(sentence)
    return sentences


# ---------------------------------------------------------------- commands


def cmd_train(settings):
    seed = _require(settings, "seed", int, "train")
    train_path = _require(settings, "train", str, "train")
    dev_path = _require(settings, "dev", str, "train")
    model_path = _require(settings, "model", str, "train")
    corpus = [binarize(t) for t in read_treebank(train_path)]
    dev = read_treebank(dev_path)
    hyper = _hyperparams(settings, seed)
    config = _model_config(settings)
    try:
        result = train(corpus, dev, hyper, config)
    except ValueError as err:
        raise UsageError(str(err)) from None
    save_checkpoint(model_path, result.params, result.vocab)
    log_path = model_path + ".log"
    with open(log_path, "w", encoding="utf-8") as fh:
        fh.write(format_history(result.history))
    print(f"saved {model_path} (best epoch {result.best_epoch}, "
          f"dev F1 {result.best_f1:.4f}); log in {log_path}")
    return EXIT_OK


def cmd_parse(settings, stdin=None):
    model_path = _require(settings, "model", str, "parse")
    params, vocab = load_checkpoint(model_path)
    delimiter = str(settings.get("delimiter", "_"))
    log_space = bool(_convert(settings, "log_space_scores", bool, False))
    if settings.get("test"):
        text = _read_text(str(settings["test"]))
    else:
        text = (stdin or sys.stdin).read()
    for tokens in read_tagged_sentences(text, delimiter):
        tree = parse_sentence(tokens, params, vocab, log_space=log_space)
        print(write_bracketed(tree))
    return EXIT_OK


def cmd_eval(settings):
    gold = read_treebank(str(settings["gold"]))
    pred = read_treebank(str(settings["pred"]))
    punct = _punct_set(settings)
    per_sentence = bool(settings.get("per_sentence"))
    try:
        sys.stdout.write(format_report(gold, pred, punct, per_sentence))
    except ValueError as err:
        raise DataError(str(err)) from None
    return EXIT_OK


def cmd_verify(settings):
    level = _convert(settings, "level", int, 8)
    if not 2 <= level <= 10:
        raise UsageError("--level must be in [2, 10]")
    failures = 0

    def report(name, ok, detail=""):
        nonlocal failures
        failures += 0 if ok else 1
        status = "PASS" if ok else "FAIL"
        print(f"{status}  {name}" + (f"  {detail}" if detail else ""))

    counts_ok = all(
        len(verification.enumerate_binary_trees(n)) == verification.catalan(n - 1)
        for n in range(2, level + 1))
    report("enumeration matches Catalan counts", counts_ok, f"n <= {level}")

    rt = verification.roundtrip_report(level)
    report("tree -> pointing -> tree round trip", rt.ok,
           f"{rt.checked} trees" if rt.ok else rt.counterexample)

    crossing = [Pointing(1, 4, "S"), Pointing(2, 3, "S"),
                Pointing(3, 4, "S"), Pointing(4, 1, "S")]
    diag = validate_pointing(crossing)
    report("crossing pointing set rejected",
           (not diag.valid) and diag.reason == "laminarity",
           diag.message or "")

    vocab = verification.scratch_vocab()
    rng = np.random.default_rng(0)
    decode_ok = True
    for _ in range(200):
        n = int(rng.integers(2, 41))
        tables = verification.random_tables(n, vocab.n_general, vocab.n_unary, rng)
        tree = decode(tables, [(f"w{t}", "T") for t in range(1, n + 1)], vocab)
        spans = spans_of(tree)
        decode_ok &= len(spans) == n - 1 and is_laminar(spans)
        decode_ok &= any(s.i == 1 and s.j == n for s in spans)
        decode_ok &= len(binary_leaves(tree)) == n
    report("decoder yields valid trees on random tables", decode_ok, "200 cases")

    agree = True
    for _ in range(100):
        n = int(rng.integers(2, 13))
        tables = verification.random_tables(n, vocab.n_general, vocab.n_unary, rng)
        leaves = [(f"w{t}", "T") for t in range(1, n + 1)]
        agree &= decode(tables, leaves, vocab) == verification.reference_decode(
            tables, leaves, vocab)
    report("queue decoder matches recursive reference", agree, "100 cases")

    n = 256
    chain = verification.tables_from_pointing(
        tree_to_pointing(verification.right_chain(n)), vocab)
    counter = WorkCounter()
    decode(chain, [(f"w{t}", "T") for t in range(1, n + 1)], vocab, counter=counter)
    chain_ok = counter.split_evals == n * (n - 1) // 2
    bal = verification.tables_from_pointing(
        tree_to_pointing(verification.balanced(n)), vocab)
    counter2 = WorkCounter()
    decode(bal, [(f"w{t}", "T") for t in range(1, n + 1)], vocab, counter=counter2)
    bal_ok = counter2.split_evals <= 2 * n * np.log2(n)
    report("split work: chain quadratic, balanced n log n",
           chain_ok and bal_ok,
           f"chain {counter.split_evals}, balanced {counter2.split_evals}")

    return EXIT_OK if failures == 0 else EXIT_VERIFY


def cmd_bench(settings):
    model_path = _require(settings, "model", str, "bench")
    corpus_path = _require(settings, "test", str, "bench")
    params, vocab = load_checkpoint(model_path)
    text = _read_text(corpus_path)
    if text.lstrip().startswith("("):
        sentences = [t.tokens() for t in parse_bracketed(text)]
    else:
        sentences = read_tagged_sentences(text, str(settings.get("delimiter", "_")))
    log_space = bool(_convert(settings, "log_space_scores", bool, False))
    rep = speed_benchmark(sentences, params, vocab, log_space)
    print(f"sentences\t{rep.sentences}")
    print(f"seconds\t{rep.seconds:.4f}")
    print(f"sents_per_sec\t{rep.sents_per_sec:.2f}")
    print(f"split_evals\t{rep.split_evals}")
    return EXIT_OK


# ---------------------------------------------------------------- wiring


def build_parser():
    parser = _Parser(prog="pointparse",
                     description="Pointing-based constituency parser toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--config", help="flat key = value settings file")

    p_train = sub.add_parser("train", help="train a model and save a checkpoint")
    common(p_train)
    p_train.add_argument("--train", help="bracketed training treebank")
    p_train.add_argument("--dev", help="bracketed development treebank")
    p_train.add_argument("--model", help="checkpoint output path")
    p_train.add_argument("--seed", type=int, help="random seed (required)")
    p_train.add_argument("--layers", type=int, help="encoder layers")
    p_train.add_argument("--dim", type=int, help="model width")
    p_train.add_argument("--batch", type=int, help="sentences per batch")
    p_train.add_argument("--epochs", type=int)

    p_parse = sub.add_parser("parse", help="parse tagged sentences to brackets")
    common(p_parse)
    p_parse.add_argument("--model", help="checkpoint path")
    p_parse.add_argument("--test", help="input file (default: stdin)")
    p_parse.add_argument("--delimiter", help="token/POS delimiter, default '_'")
    p_parse.add_argument("--log-space-scores", dest="log_space_scores",
                         action="store_const", const="true",
                         help="combine split scores in log space")

    p_eval = sub.add_parser("eval", help="score predicted against gold brackets")
    common(p_eval)
    p_eval.add_argument("gold")
    p_eval.add_argument("pred")
    p_eval.add_argument("--punct-exclude", dest="punct_exclude",
                        help="comma-separated POS tags to delete, or 'collins'")
    p_eval.add_argument("--per-sentence", dest="per_sentence", action="store_const",
                        const="true", help="print per-sentence count lines")

    p_verify = sub.add_parser("verify", help="run the property checks")
    common(p_verify)
    p_verify.add_argument("--level", type=int, help="max sentence length, default 8")

    p_bench = sub.add_parser("bench", help="measure batch-1 parsing speed")
    common(p_bench)
    p_bench.add_argument("--model", help="checkpoint path")
    p_bench.add_argument("--test", help="corpus to parse (bracketed or tagged)")
    p_bench.add_argument("--delimiter")
    p_bench.add_argument("--log-space-scores", dest="log_space_scores",
                         action="store_const", const="true")
    return parser


_COMMANDS = {
    "train": cmd_train,
    "parse": cmd_parse,
    "eval": cmd_eval,
    "verify": cmd_verify,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        settings = merge_settings(args)
        return _COMMANDS[args.command](settings)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, TreebankError, UnknownPosError, CheckpointError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DATA


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
