"""Binary classifiers shared by the whole pipeline.

A classifier predicts +1 exactly when its score is >= 0, so the positive
region is topologically closed. The same objects serve as the deployed rule,
the agents' estimate of it, the optimum, and the ground-truth labeler.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import as_feature_matrix
from .errors import ValidationError


@dataclass(frozen=True)
class ThresholdClassifier:
    """Predicts +1 iff x[axis] >= threshold (closed on the positive side).

    threshold may be +inf (rejects everything) or -inf (accepts everything),
    which is how one-sided fits are represented.
    """

    threshold: float
    axis: int = 0

    def __post_init__(self):
        if np.isnan(self.threshold):
            raise ValidationError("threshold must not be NaN")
        if self.axis < 0:
            raise ValidationError("axis must be >= 0")

    def score(self, X):
        X = as_feature_matrix(X)
        if self.axis >= X.shape[1]:
            raise ValidationError(f"axis {self.axis} out of range for d={X.shape[1]}")
        return X[:, self.axis] - self.threshold

    def predict(self, X):
        x = np.asarray(X, dtype=np.float64)
        if x.ndim == 1:
            if self.axis >= x.shape[0]:
                raise ValidationError(f"axis {self.axis} out of range for d={x.shape[0]}")
            return 1 if x[self.axis] >= self.threshold else -1
        col = as_feature_matrix(x)[:, self.axis] if self.axis < x.shape[1] else None
        if col is None:
            raise ValidationError(f"axis {self.axis} out of range for d={x.shape[1]}")
        return np.where(col >= self.threshold, 1, -1).astype(np.int64)

    def as_linear(self, d):
        """Equivalent LinearClassifier in dimension d (used for embeddings)."""
        w = np.zeros(d)
        w[self.axis] = 1.0
        return LinearClassifier(weights=w, bias=-self.threshold)


@dataclass(frozen=True)
class LinearClassifier:
    """Predicts +1 iff weights . x + bias >= 0."""

    weights: np.ndarray
    bias: float

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1 or w.shape[0] < 1:
            raise ValidationError("weights must be a 1-d vector")
        if not np.all(np.isfinite(w)):
            raise ValidationError("weights must be finite")
        if not np.any(w != 0.0) and np.isfinite(self.bias):
            raise ValidationError("weights must not be all zero")
        if np.isnan(self.bias):
            raise ValidationError("bias must not be NaN")
        object.__setattr__(self, "weights", w)

    @property
    def d(self):
        return self.weights.shape[0]

    def score(self, X):
        X = as_feature_matrix(X, d=self.d)
        return X @ self.weights + self.bias

    def predict(self, X):
        x = np.asarray(X, dtype=np.float64)
        squeeze = x.ndim == 1
        s = self.score(x[None, :] if squeeze else x)
        pred = np.where(s >= 0.0, 1, -1).astype(np.int64)
        return pred[0] if squeeze else pred


#: Union type of the supported hypothesis classes.
Classifier = (ThresholdClassifier, LinearClassifier)


def accept_all(axis=0):
    return ThresholdClassifier(threshold=-np.inf, axis=axis)


def reject_all(axis=0):
    return ThresholdClassifier(threshold=np.inf, axis=axis)
