"""Per-channel feature standardization, fitted on the training split only."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .types import FeatureSequence

STD_FLOOR = 1e-8


class FeatureStandardizer(TransformerMixin, BaseEstimator):
    """Subtract the mean and divide by the (floored) standard deviation.

    Statistics are computed over all frames of all fitted sequences.
    `transform` and `inverse_transform` are exact inverses.
    """

    def __init__(self, std_floor=STD_FLOOR):
        self.std_floor = std_floor

    def fit(self, X, y=None):
        seqs = list(X)
        if not seqs:
            raise ValueError("cannot fit standardization on an empty training set")
        stacked = np.concatenate([s.features for s in seqs], axis=0)
        self.mean_ = stacked.mean(axis=0)
        self.std_ = np.maximum(stacked.std(axis=0), self.std_floor)
        return self

    @classmethod
    def from_stats(cls, mean, std):
        out = cls()
        out.mean_ = np.asarray(mean, dtype=np.float64)
        out.std_ = np.maximum(np.asarray(std, dtype=np.float64), out.std_floor)
        return out

    def _check_fitted(self):
        if not hasattr(self, "mean_"):
            raise NotFittedError("standardizer has not been fitted")

    def transform(self, feats: FeatureSequence) -> FeatureSequence:
        self._check_fitted()
        if feats.standardized:
            raise ValueError("features are already standardized")
        return FeatureSequence((feats.features - self.mean_) / self.std_, standardized=True)

    def inverse_transform(self, feats: FeatureSequence) -> FeatureSequence:
        self._check_fitted()
        if not feats.standardized:
            raise ValueError("features are not standardized")
        return FeatureSequence(feats.features * self.std_ + self.mean_, standardized=False)
