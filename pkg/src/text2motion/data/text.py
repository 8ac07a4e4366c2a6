"""Tokenization and the corpus-built vocabulary.

Descriptions are lowercased, punctuation is stripped to spaces and the
result is whitespace-split. Ids 0 and 1 are reserved for padding and
unknown tokens; everything else comes from the training descriptions in
sorted order, so the mapping is deterministic.
"""

from __future__ import annotations

import string
from dataclasses import dataclass

import numpy as np

PAD_ID = 0
UNK_ID = 1
_RESERVED = ("<pad>", "<unk>")

_PUNCT_TABLE = str.maketrans({c: " " for c in string.punctuation})


@dataclass
class TextSample:
    raw: str
    token_ids: np.ndarray

    def __post_init__(self):
        self.token_ids = np.asarray(self.token_ids, dtype=np.int64)
        if self.token_ids.ndim != 1 or self.token_ids.size < 1:
            raise ValueError("a text sample needs at least one token")

    @property
    def length(self):
        return self.token_ids.size


def normalize_words(text: str) -> list[str]:
    return text.lower().translate(_PUNCT_TABLE).split()


class Vocabulary:
    def __init__(self, tokens):
        self.id_to_token = list(_RESERVED) + sorted(set(tokens) - set(_RESERVED))
        self.token_to_id = {tok: i for i, tok in enumerate(self.id_to_token)}

    @classmethod
    def build(cls, texts) -> "Vocabulary":
        tokens = set()
        for text in texts:
            tokens.update(normalize_words(text))
        return cls(tokens)

    def __len__(self):
        return len(self.id_to_token)

    def __contains__(self, token):
        return token in self.token_to_id

    def encode(self, text: str) -> TextSample:
        words = normalize_words(text)
        if not words:
            raise ValueError(f"text normalizes to nothing: {text!r}")
        ids = np.array([self.token_to_id.get(w, UNK_ID) for w in words], dtype=np.int64)
        return TextSample(raw=text, token_ids=ids)

    def to_list(self):
        return list(self.id_to_token)

    @classmethod
    def from_list(cls, tokens):
        vocab = cls.__new__(cls)
        vocab.id_to_token = list(tokens)
        vocab.token_to_id = {tok: i for i, tok in enumerate(vocab.id_to_token)}
        return vocab


def build_vocab(texts) -> Vocabulary:
    return Vocabulary.build(texts)


def tokenize(text: str, vocab: Vocabulary) -> TextSample:
    return vocab.encode(text)
