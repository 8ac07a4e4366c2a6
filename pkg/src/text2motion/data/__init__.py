from .dataset import EVAL_FIRST, TRAIN_RANDOM, DatasetEntry, select_description
from .kit import load_kit, read_split_ids, write_kit_layout
from .synthetic import synthetic_corpus
from .text import PAD_ID, UNK_ID, TextSample, Vocabulary, build_vocab, tokenize

__all__ = [
    "DatasetEntry",
    "EVAL_FIRST",
    "PAD_ID",
    "TRAIN_RANDOM",
    "TextSample",
    "UNK_ID",
    "Vocabulary",
    "build_vocab",
    "load_kit",
    "read_split_ids",
    "select_description",
    "synthetic_corpus",
    "tokenize",
    "write_kit_layout",
]
