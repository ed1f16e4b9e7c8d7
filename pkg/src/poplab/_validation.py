"""Input validation helpers used by the estimators and module functions."""

import numpy as np

from .errors import ValidationError


def as_feature_matrix(X, d=None):
    """Coerce to a finite float64 matrix of shape (n, d)."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise ValidationError(f"expected a 2-d feature matrix, got ndim={X.ndim}")
    if X.shape[1] < 1:
        raise ValidationError("feature dimension must be >= 1")
    if not np.all(np.isfinite(X)):
        raise ValidationError("features must be finite (no NaN/inf)")
    if d is not None and X.shape[1] != d:
        raise ValidationError(f"dimension mismatch: expected d={d}, got {X.shape[1]}")
    return X


def as_point(x, d=None):
    """Coerce to a finite float64 vector of shape (d,)."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 0:
        x = x[None]
    if x.ndim != 1:
        raise ValidationError(f"expected a 1-d point, got ndim={x.ndim}")
    if not np.all(np.isfinite(x)):
        raise ValidationError("point coordinates must be finite")
    if d is not None and x.shape[0] != d:
        raise ValidationError(f"dimension mismatch: expected d={d}, got {x.shape[0]}")
    return x


def as_labels(y, n=None):
    """Coerce to an int array of {-1, +1} labels."""
    y = np.asarray(y)
    if y.ndim != 1:
        raise ValidationError("labels must be a 1-d array")
    if not np.all(np.isin(y, (-1, 1))):
        raise ValidationError("labels must take values in {-1, +1}")
    if n is not None and y.shape[0] != n:
        raise ValidationError("feature/label length mismatch")
    return y.astype(np.int64)


def check_X_y(X, y):
    X = as_feature_matrix(X)
    y = as_labels(y, n=X.shape[0])
    if X.shape[0] == 0:
        raise ValidationError("empty training set")
    return X, y


def require(condition, message):
    if not condition:
        raise ValidationError(message)
