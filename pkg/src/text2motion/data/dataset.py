"""Dataset entries and per-iteration description selection."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..motion.types import FeatureSequence, MotionSequence

TRAIN_RANDOM = "train_random"
EVAL_FIRST = "eval_first"


@dataclass
class DatasetEntry:
    """One motion with its text descriptions.

    `motion` keeps the ground-truth joints at their original frame rate for
    evaluation; `features` is the 12.5 Hz, unstandardized model input.
    """

    entry_id: str
    features: FeatureSequence
    descriptions: list[str]
    motion: MotionSequence
    split: str = "train"

    def __post_init__(self):
        if not self.descriptions:
            raise ValueError(f"entry {self.entry_id} has no descriptions")

    @property
    def num_frames(self):
        return self.features.num_frames


def select_description(entry: DatasetEntry, mode: str, rng=None) -> str:
    """Pick one description: uniformly at random for training, index 0 for eval."""
    if mode == EVAL_FIRST:
        return entry.descriptions[0]
    if mode == TRAIN_RANDOM:
        if rng is None:
            raise ValueError("train_random selection needs an rng")
        return entry.descriptions[int(rng.integers(len(entry.descriptions)))]
    raise ValueError(f"unknown selection mode {mode!r}")
