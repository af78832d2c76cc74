"""Constituency parsing as per-token pointing decisions.

A binarized parse tree over n tokens is equivalent to n pointing decisions:
each position names the far endpoint of the largest constituent that starts or
ends there, plus that constituent's label.  A span scorer trained with plain
cross entropy predicts those decisions, and a greedy top-down decoder turns
them back into a tree.
"""

from .checkpoint import CheckpointError, load_checkpoint, save_checkpoint
from .decoder import (WorkCounter, assign_label, best_split, decode,
                      parse_sentence, split_score)
from .evaluation import (COLLINS_PUNCTUATION, EvalResult, SpeedReport,
                         corpus_eval, corpus_eval_files, eval_spans,
                         format_report, labeled_brackets, speed_benchmark)
from .model import (HEADS, ModelConfig, ModelParams, ScoreTables, char_encode,
                    embed_sentence, encode, encode_tokens, forward,
                    head_transform, label_tables, pointing_tables)
from .pointing import (Pointing, PointingDiagnostics, PointingError,
                       pointing_to_text, pointing_to_tree, text_to_pointing,
                       tree_to_pointing, validate_pointing)
from .training import (AdamState, EpochStats, Hyperparams, NonFiniteGradient,
                       TargetSet, TrainingDiverged, TrainResult, adam_step,
                       backward, effective_lr, format_history, labeled_f1_on,
                       loss, pointing_accuracy, targets_from_tree, train)
from .trees import (DUMMY, FALLBACK_ROOT, BinaryLeaf, BinaryNode, BinaryTree,
                    LabeledSpan, SyntaxTree, TreebankError, binarize,
                    binary_leaves, debinarize, is_laminar, parse_bracketed,
                    spans_of, unary_spans_of, write_bracketed, write_treebank)
from .vocab import UnknownPosError, Vocabulary

__version__ = "0.1.0"
