"""Closed vocabularies built from a binarized training corpus."""

from __future__ import annotations

from collections import Counter

from .trees import DUMMY, BinaryTree, binary_leaves, spans_of

UNK_WORD = "<unk>"
UNK_CHAR = "<unk>"


class UnknownPosError(KeyError):
    """A POS tag outside the training inventory."""

    def __init__(self, tag):
        super().__init__(tag)
        self.tag = tag

    def __str__(self):
        return f"unknown POS tag {self.tag!r}; the tag inventory is closed at training"


class Vocabulary:
    """Word/char/POS maps plus the general and unary label inventories.

    Ids are dense from 0; the word and char maps reserve id 0 for their unknown
    symbol.  Both label inventories always contain the dummy label.
    """

    def __init__(self, words, chars, pos_tags, general_labels, unary_labels,
                 word_freq=None):
        self.words = list(words)
        self.chars = list(chars)
        self.pos_tags = list(pos_tags)
        self.general_labels = list(general_labels)
        self.unary_labels = list(unary_labels)
        self.word_freq = dict(word_freq or {})
        assert self.words[0] == UNK_WORD and self.chars[0] == UNK_CHAR
        assert DUMMY in self.general_labels and DUMMY in self.unary_labels
        self._word_id = {w: i for i, w in enumerate(self.words)}
        self._char_id = {c: i for i, c in enumerate(self.chars)}
        self._pos_id = {t: i for i, t in enumerate(self.pos_tags)}
        self._general_id = {l: i for i, l in enumerate(self.general_labels)}
        self._unary_id = {l: i for i, l in enumerate(self.unary_labels)}

    @classmethod
    def from_trees(cls, trees: list[BinaryTree]) -> "Vocabulary":
        word_freq = Counter()
        chars = set()
        pos_tags = set()
        general = {DUMMY}
        unary = {DUMMY}
        for tree in trees:
            for leaf in binary_leaves(tree):
                word_freq[leaf.word] += 1
                chars.update(leaf.word)
                pos_tags.add(leaf.pos)
                unary.add(leaf.unary_label)
            for span in spans_of(tree):
                general.add(span.label)
        return cls(
            [UNK_WORD] + sorted(word_freq),
            [UNK_CHAR] + sorted(chars),
            sorted(pos_tags),
            sorted(general),
            sorted(unary),
            word_freq,
        )

    # ---- lookups

    def word_id(self, word) -> int:
        return self._word_id.get(word, 0)

    def char_ids(self, word) -> list[int]:
        return [self._char_id.get(c, 0) for c in word]

    def pos_id(self, tag) -> int:
        try:
            return self._pos_id[tag]
        except KeyError:
            raise UnknownPosError(tag) from None

    def general_id(self, label) -> int:
        return self._general_id[label]

    def unary_id(self, label) -> int:
        return self._unary_id[label]

    def is_rare(self, word, threshold=2) -> bool:
        return self.word_freq.get(word, 0) < threshold

    # ---- sizes

    @property
    def n_words(self):
        return len(self.words)

    @property
    def n_chars(self):
        return len(self.chars)

    @property
    def n_pos(self):
        return len(self.pos_tags)

    @property
    def n_general(self):
        return len(self.general_labels)

    @property
    def n_unary(self):
        return len(self.unary_labels)

    # ---- serialization

    def to_dict(self):
        return {
            "words": self.words,
            "chars": self.chars,
            "pos_tags": self.pos_tags,
            "general_labels": self.general_labels,
            "unary_labels": self.unary_labels,
            "word_freq": {w: self.word_freq[w] for w in sorted(self.word_freq)},
        }

    @classmethod
    def from_dict(cls, data) -> "Vocabulary":
        return cls(
            data["words"], data["chars"], data["pos_tags"],
            data["general_labels"], data["unary_labels"], data["word_freq"],
        )

    def __eq__(self, other):
        if not isinstance(other, Vocabulary):
            return NotImplemented
        return self.to_dict() == other.to_dict()
