"""Data model, deterministic sampling, dataset synthesis, CSV ingestion,
splitting, and standardization.

Feature vectors are rows of a float64 matrix; labels live in {-1, +1} and are
produced by a realizable threshold/linear labeler. All randomness flows
through SeedSpec, which derives independent counter-based streams so results
are reproducible regardless of execution order or thread count.
"""

import csv
from dataclasses import dataclass

import numpy as np

from ._validation import as_feature_matrix, as_labels, require
from .classifiers import LinearClassifier, ThresholdClassifier
from .errors import ParseError, ValidationError

SPLIT_TOL = 1e-9


@dataclass(frozen=True)
class SeedSpec:
    """Master seed plus a stream id.

    Distinct (master, stream) pairs yield independent reproducible streams
    (counter-based Philox keyed through numpy's SeedSequence), so parallel
    task order cannot affect results.
    """

    master: int
    stream: int = 0

    def rng(self, *subkeys):
        seq = np.random.SeedSequence(self.master, spawn_key=(self.stream, *subkeys))
        return np.random.Generator(np.random.Philox(seq))

    def derive(self, *subkeys):
        """Child spec for a subtask; children with distinct keys are independent."""
        return _DerivedSeed(self.master, (self.stream, *subkeys))


@dataclass(frozen=True)
class _DerivedSeed:
    master: int
    path: tuple

    def rng(self, *subkeys):
        seq = np.random.SeedSequence(self.master, spawn_key=(*self.path, *subkeys))
        return np.random.Generator(np.random.Philox(seq))

    def derive(self, *subkeys):
        return _DerivedSeed(self.master, (*self.path, *subkeys))


@dataclass(frozen=True)
class Dataset:
    """Feature matrix X (n, d) with labels y in {-1, +1}.

    Row order is stable and significant only for reproducibility of splits.
    Immutable after construction; safe to share across threads.
    """

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X = as_feature_matrix(self.X)
        y = as_labels(self.y, n=X.shape[0])
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def d(self):
        return self.X.shape[1]

    def subset(self, idx):
        return Dataset(self.X[idx], self.y[idx])


@dataclass(frozen=True)
class Gaussian1D:
    """x ~ Normal(mean, stddev) on the line, labeled +1 iff x >= label_threshold."""

    mean: float = 0.0
    stddev: float = 1.0
    label_threshold: float = 0.0

    def __post_init__(self):
        require(self.stddev > 0, "stddev must be > 0")

    @property
    def d(self):
        return 1

    def labeler(self):
        return ThresholdClassifier(threshold=self.label_threshold, axis=0)

    def sample(self, rng, n):
        return rng.normal(self.mean, self.stddev, size=(n, 1))


@dataclass(frozen=True)
class DiagonalMVN:
    """Multivariate normal with diagonal covariance and a realizable labeler."""

    mean: np.ndarray
    variances: np.ndarray
    labeler_rule: object  # ThresholdClassifier | LinearClassifier

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=np.float64)
        var = np.asarray(self.variances, dtype=np.float64)
        require(mean.ndim == 1 and var.shape == mean.shape, "mean/variances shape mismatch")
        require(np.all(var > 0), "covariance diagonal entries must be > 0")
        require(isinstance(self.labeler_rule, (ThresholdClassifier, LinearClassifier)),
                "labeler must be a threshold or linear rule")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "variances", var)

    @property
    def d(self):
        return self.mean.shape[0]

    def labeler(self):
        return self.labeler_rule

    def sample(self, rng, n):
        return self.mean + rng.standard_normal((n, self.d)) * np.sqrt(self.variances)


@dataclass(frozen=True)
class Mixture1D:
    """Mixture of 1-d normals with a realizable threshold labeler."""

    centers: tuple
    weights: tuple
    stddevs: tuple
    label_threshold: float = 0.0

    def __post_init__(self):
        k = len(self.centers)
        require(k >= 1 and len(self.weights) == k and len(self.stddevs) == k,
                "centers/weights/stddevs must have equal lengths")
        require(all(s > 0 for s in self.stddevs), "stddev must be > 0")
        require(abs(sum(self.weights) - 1.0) <= SPLIT_TOL, "mixture weights must sum to 1")

    @property
    def d(self):
        return 1

    def labeler(self):
        return ThresholdClassifier(threshold=self.label_threshold, axis=0)

    def sample(self, rng, n):
        comp = rng.choice(len(self.centers), size=n, p=np.asarray(self.weights))
        centers = np.asarray(self.centers)[comp]
        stds = np.asarray(self.stddevs)[comp]
        return (centers + rng.standard_normal(n) * stds)[:, None]


DistributionSpec = (Gaussian1D, DiagonalMVN, Mixture1D)


def synth_dataset(spec, n, seed):
    """Draw n iid examples from spec, labeled by its realizable rule.

    Deterministic given the SeedSpec: the same (master, stream) yields
    bit-identical datasets across runs and thread counts.
    """
    require(n >= 1, "n must be >= 1")
    if not isinstance(spec, DistributionSpec):
        raise ValidationError(f"unknown distribution spec: {type(spec).__name__}")
    rng = seed.rng()
    X = spec.sample(rng, n)
    y = spec.labeler().predict(X)
    return Dataset(X, y)


def load_dataset_csv(path, label_column):
    """Load a dataset from a UTF-8 CSV with a header row.

    One numeric column per feature plus one label column; labels in {-1, +1},
    or {0, 1} which are mapped to {-1, +1}. Errors name the offending file
    line (header is line 1).
    """
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot open dataset: {exc}", path=str(path)) from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty file", path=str(path)) from None
        header = [h.strip() for h in header]
        if label_column not in header:
            raise ParseError(f"label column {label_column!r} not in header", path=str(path))
        label_idx = header.index(label_column)
        feature_idx = [i for i in range(len(header)) if i != label_idx]
        rows, labels = [], []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise ParseError(f"expected {len(header)} fields, got {len(row)}",
                                 row=lineno, path=str(path))
            try:
                feats = [float(row[i]) for i in feature_idx]
            except ValueError:
                raise ParseError("non-numeric feature value", row=lineno, path=str(path)) from None
            try:
                lab = float(row[label_idx])
            except ValueError:
                raise ParseError("non-numeric label value", row=lineno, path=str(path)) from None
            if lab not in (-1.0, 0.0, 1.0):
                raise ParseError(f"unknown label value {row[label_idx]!r}",
                                 row=lineno, path=str(path))
            rows.append(feats)
            labels.append(lab)
        if not rows:
            raise ParseError("no data rows", path=str(path))
        labs = np.asarray(labels)
        has_zero = np.any(labs == 0.0)
        has_minus = np.any(labs == -1.0)
        if has_zero and has_minus:
            # report the first row of whichever convention shows up second
            bad = max(int(np.argmax(labs == 0.0)), int(np.argmax(labs == -1.0)))
            raise ParseError("labels mix {0,1} and {-1,+1} conventions",
                             row=bad + 2, path=str(path))
        if has_zero:
            labs = np.where(labs == 0.0, -1.0, 1.0)
        return Dataset(np.asarray(rows, dtype=np.float64), labs.astype(np.int64))


def split_dataset(ds, fractions, seed):
    """Shuffled disjoint partition of ds covering it exactly.

    Sizes are floor(n * fraction) for all but the last part; the last part
    absorbs the remainder. Deterministic given the seed.
    """
    fractions = [float(f) for f in fractions]
    require(all(f > 0 for f in fractions), "fractions must be positive")
    require(abs(sum(fractions) - 1.0) <= SPLIT_TOL, "fractions must sum to 1")
    rng = seed.rng()
    perm = rng.permutation(ds.n)
    sizes = [int(np.floor(ds.n * f)) for f in fractions[:-1]]
    sizes.append(ds.n - sum(sizes))
    require(all(s >= 0 for s in sizes), "fractions produce a negative part size")
    parts, start = [], 0
    for s in sizes:
        parts.append(ds.subset(perm[start:start + s]))
        start += s
    return parts


@dataclass(frozen=True)
class ScalerParams:
    """Affine per-feature map fitted on a training set: (x - mean) / scale.

    Features with zero spread pass through unscaled and are flagged in
    `passthrough`.
    """

    mean: np.ndarray
    scale: np.ndarray
    passthrough: np.ndarray

    def transform(self, ds):
        return Dataset((ds.X - self.mean) / self.scale, ds.y)

    def transform_X(self, X):
        return (np.asarray(X, dtype=np.float64) - self.mean) / self.scale

    def inverse_transform_X(self, X):
        return np.asarray(X, dtype=np.float64) * self.scale + self.mean


def standardize(train, others=()):
    """Fit the affine map on `train` and apply it to train and all `others`.

    Returns ([train'] + [others'], ScalerParams).
    """
    require(train.n > 0, "train must be non-empty")
    mean = train.X.mean(axis=0)
    std = train.X.std(axis=0)
    passthrough = std == 0.0
    scale = np.where(passthrough, 1.0, std)
    params = ScalerParams(mean=mean, scale=scale, passthrough=passthrough)
    out = [params.transform(train)] + [params.transform(ds) for ds in others]
    return out, params
