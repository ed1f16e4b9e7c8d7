"""Learning rules for both sides of the game.

The deployer (Jury) side: exact threshold ERM, a deterministic hinge-loss
linear fit, strategic ERM (training points respond to the candidate rule),
and the response-aware variant that minimizes error against a known response
function. The agent (Contestant) side: sample-set construction (uniform with
rejection, or social-network neighborhoods) and per-user estimation of the
deployed rule from its labels.

Estimators follow the scikit-learn protocol (fit/predict, get_params) so
they compose with the wider ecosystem; fitted attributes carry a trailing
underscore. Module-level functions mirror the estimators for quick use.

Training-time strategic error uses the closed-budget reduction (a point is
positive after responding iff it can reach the boundary at cost <= 2). The
deployed response map is strict (< 2); the two differ only on the
measure-zero budget boundary, which grid-coincides with training points by
construction, so the reduction is the consistent training-side convention.
"""

import csv
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from ._validation import as_feature_matrix, check_X_y, require
from .classifiers import LinearClassifier, ThresholdClassifier
from .core import Dataset
from .errors import (ContractError, NumericError, SamplingError,
                     ValidationError)

#: Where a contestant threshold fit lands inside the zero-error gap
#: (max rejected sample, min accepted sample]. Calibrated fraction between
#: the cost-optimal lower edge (0) and the margin midpoint (0.5).
CONTESTANT_TIE = 0.4

#: Rejection sampling attempt budget.
MAX_REJECTION_ATTEMPTS = 1000


@dataclass(frozen=True)
class TrainConfig:
    """Deterministic hinge-descent schedule (full-batch, no randomness)."""

    epochs: int = 200
    step0: float = 0.1
    l2: float = 1e-4

    def __post_init__(self):
        require(self.epochs >= 1, "epochs must be >= 1")
        require(self.step0 > 0, "step sizes must be > 0")
        require(self.l2 >= 0, "regularization strength must be >= 0")


# ---------------------------------------------------------------------------
# exact threshold search primitives
# ---------------------------------------------------------------------------

def _cut_errors(us, ys):
    """0/1 errors of every realizable cut of the sorted scores.

    Cut k predicts +1 for sorted positions >= k; it is realized by the
    closed-convention threshold us[k] (cut 0 by -inf, cut n by +inf). Cuts
    strictly inside a run of duplicate values are not realizable by any
    threshold and come back masked with +inf.
    """
    n = us.shape[0]
    pos_below = np.concatenate([[0], np.cumsum(ys == 1)])
    neg_above = np.concatenate([np.cumsum((ys == -1)[::-1])[::-1], [0]])
    errs = (pos_below + neg_above).astype(np.float64)
    realizable = np.ones(n + 1, dtype=bool)
    if n > 1:
        realizable[1:n] = us[:-1] < us[1:]
    return np.where(realizable, errs, np.inf)


def _threshold_erm(u, y):
    """Smallest threshold minimizing closed-convention 0/1 error.

    Candidates are the data coordinates plus +-inf; closed convention means
    predict +1 iff u >= threshold.
    """
    order = np.argsort(u, kind="stable")
    us, ys = u[order], y[order]
    errs = _cut_errors(us, ys)
    k = int(np.argmin(errs))
    n = us.shape[0]
    if k == 0:
        thr = -np.inf
    elif k == n:
        thr = np.inf
    else:
        thr = us[k]
    return float(thr), float(errs[k]) / n


def _threshold_interval_fit(u, y, tie_fraction):
    """Error-minimizing threshold placed tie_fraction of the way across the
    optimal gap (first optimal cut). Used by contestant fits."""
    order = np.argsort(u, kind="stable")
    us, ys = u[order], y[order]
    errs = _cut_errors(us, ys)
    k = int(np.argmin(errs))
    n = us.shape[0]
    if k == 0:
        return -np.inf, float(errs[k]) / n
    if k == n:
        return np.inf, float(errs[k]) / n
    lo, hi = us[k - 1], us[k]
    return float(lo + tie_fraction * (hi - lo)), float(errs[k]) / n


# ---------------------------------------------------------------------------
# estimators
# ---------------------------------------------------------------------------

class ThresholdERM(BaseEstimator, ClassifierMixin):
    """Exact empirical 0/1 minimizing threshold on one axis.

    Candidate thresholds are the training coordinates on the axis plus
    +-inf; ties break toward the smallest threshold.
    """

    def __init__(self, axis=0):
        self.axis = axis

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        require(self.axis < X.shape[1], "axis out of range")
        thr, err = _threshold_erm(X[:, self.axis], y)
        self.threshold_ = thr
        self.train_error_ = err
        self.classifier_ = ThresholdClassifier(threshold=thr, axis=self.axis)
        return self

    def predict(self, X):
        return self.classifier_.predict(X)


class LinearHingeERM(BaseEstimator, ClassifierMixin):
    """Regularized hinge loss minimized by deterministic full-batch
    subgradient descent, followed by an exact bias refinement.

    The refinement replaces the bias with the exact 0/1-optimal threshold on
    the fitted scores, so the training error equals that of the best
    threshold-on-score classifier.
    """

    def __init__(self, epochs=200, step0=0.1, l2=1e-4):
        self.epochs = epochs
        self.step0 = step0
        self.l2 = l2

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        cfg = TrainConfig(epochs=self.epochs, step0=self.step0, l2=self.l2)
        w, b = _hinge_descent(X[None, :, :], y[None, :].astype(np.float64), cfg)
        w, b = w[0], float(b[0])
        if not (np.all(np.isfinite(w)) and np.isfinite(b)):
            raise NumericError(
                f"hinge descent diverged: |w|={np.abs(w).max()}, b={b}; "
                "reduce step0 or increase l2")
        u = X @ w
        if np.any(w != 0.0):
            thr, err = _threshold_erm(u, y)
            b = -thr
        else:
            # degenerate direction: fall back to the majority constant rule
            thr, err = _threshold_erm(np.zeros_like(u), y)
            b = -thr
        self.weights_ = w
        self.bias_ = b
        self.train_error_ = err
        self.classifier_ = _linear_or_constant(w, b)
        return self

    def predict(self, X):
        return self.classifier_.predict(X)


def _linear_or_constant(w, b):
    if np.any(w != 0.0):
        return LinearClassifier(weights=w, bias=b)
    return ThresholdClassifier(threshold=-np.sign(b) * np.inf if b != 0 else -np.inf, axis=0)


def _hinge_descent(Xs, ys, cfg):
    """Batched full-batch subgradient descent on the regularized hinge loss.

    Xs: (U, m, d), ys: (U, m) in {-1, +1} (float). Rows are independent
    problems; batching changes nothing about each row's trajectory.
    """
    U, m, d = Xs.shape
    w = np.zeros((U, d))
    b = np.zeros(U)
    for epoch in range(1, cfg.epochs + 1):
        margins = ys * (np.einsum("umd,ud->um", Xs, w) + b[:, None])
        viol = np.where(margins < 1.0, ys, 0.0)
        gw = cfg.l2 * w - np.einsum("um,umd->ud", viol, Xs) / m
        gb = -viol.sum(axis=1) / m
        eta = cfg.step0 / np.sqrt(epoch)
        w -= eta * gw
        b -= eta * gb
    return w, b


class StrategicThresholdERM(BaseEstimator, ClassifierMixin):
    """Exact strategic ERM for threshold rules under a separable cost.

    Under the closed-budget reduction a point ends up positive iff its
    coordinate is >= threshold - t, so the strategic optimum is the plain
    ERM threshold shifted up by the axis budget t = 2 / alpha[axis].
    """

    def __init__(self, cost=None, axis=0):
        self.cost = cost
        self.axis = axis

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        require(self.cost is not None, "cost spec is required")
        require(self.axis < X.shape[1], "axis out of range")
        rate = self.cost.alpha[self.axis]
        if rate == 0.0:
            # the threshold axis is free to game: only the constant rules
            # are strategy-proof; pick the better one (ties: accept-all)
            n_neg = np.sum(y == -1)
            n_pos = np.sum(y == 1)
            thr = -np.inf if n_neg <= n_pos else np.inf
            err = min(n_neg, n_pos) / y.shape[0]
            base = thr
        else:
            t_axis = 2.0 / rate
            base, err = _threshold_erm(X[:, self.axis], y)
            thr = base + t_axis if np.isfinite(base) else base
        self.base_threshold_ = base
        self.threshold_ = thr
        self.strategic_train_error_ = err
        self.classifier_ = ThresholdClassifier(threshold=thr, axis=self.axis)
        return self

    def predict(self, X):
        return self.classifier_.predict(X)


class StrategicLinearERM(BaseEstimator, ClassifierMixin):
    """Two-stage strategic ERM for linear rules.

    Stage 1 fits the direction with the deterministic hinge descent. Stage 2
    picks the bias minimizing the empirical strategic error exactly via the
    score reduction: with best score-per-cost ratio rho, a point ends up
    positive iff its score clears the decision value minus 2*rho.
    """

    def __init__(self, cost=None, epochs=200, step0=0.1, l2=1e-4):
        self.cost = cost
        self.epochs = epochs
        self.step0 = step0
        self.l2 = l2

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        require(self.cost is not None, "cost spec is required")
        require(self.cost.d == X.shape[1], "cost dimension mismatch")
        direction = LinearHingeERM(self.epochs, self.step0, self.l2).fit(X, y)
        w = direction.weights_
        alpha = self.cost.alpha
        gameable = np.any((w < 0.0) | ((alpha == 0.0) & (w != 0.0)))
        if not np.any(w != 0.0) or gameable:
            # score can be raised for free: only constant rules resist gaming
            n_neg = np.sum(y == -1)
            n_pos = np.sum(y == 1)
            bias = np.inf if n_neg <= n_pos else -np.inf
            err = min(n_neg, n_pos) / y.shape[0]
            w_out = w if np.any(w != 0.0) else np.eye(X.shape[1])[0]
            self.rho_ = np.inf
            self.base_score_threshold_ = np.nan
        else:
            with np.errstate(divide="ignore"):
                ratios = np.where((w > 0) & (alpha > 0), w / np.where(alpha > 0, alpha, 1.0), 0.0)
            rho = float(ratios.max())
            u = X @ w
            s_best, err = _threshold_erm(u, y)
            bias = -(s_best + 2.0 * rho) if np.isfinite(s_best) else -s_best
            w_out = w
            self.rho_ = rho
            self.base_score_threshold_ = s_best
        self.weights_ = w_out
        self.bias_ = float(bias)
        self.strategic_train_error_ = err
        self.classifier_ = LinearClassifier(weights=w_out, bias=float(bias))
        return self

    def predict(self, X):
        return self.classifier_.predict(X)


# ---------------------------------------------------------------------------
# response functions and response-aware ERM
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IdentityResponse:
    """Agents respond to the deployed rule itself."""

    def resolve(self, g):
        return g


@dataclass(frozen=True)
class FixedResponse:
    """Agents respond to one fixed believed rule, whatever is deployed."""

    believed: object

    def resolve(self, g):
        return self.believed


@dataclass(frozen=True)
class MappedResponse:
    """Agents respond to fn(deployed rule); fn must be total on the
    candidate set."""

    fn: object

    def resolve(self, g):
        try:
            out = self.fn(g)
        except Exception as exc:
            raise ContractError(f"response function failed on candidate {g!r}: {exc}") from exc
        if not isinstance(out, (ThresholdClassifier, LinearClassifier)):
            raise ContractError("response function must return a classifier")
        return out


class RStrategicThresholdERM(BaseEstimator, ClassifierMixin):
    """Threshold ERM against a known response function.

    Minimizes the empirical error when every training point responds to
    response_fn(candidate) instead of the candidate itself. Candidates
    default to the training coordinates and their budget-shifted copies plus
    +-inf; the empirical objective is piecewise constant with breakpoints
    only at those values. With the identity response this coincides with
    StrategicThresholdERM on the same candidates.
    """

    def __init__(self, cost=None, response_fn=None, axis=0, candidates=None):
        self.cost = cost
        self.response_fn = response_fn
        self.axis = axis
        self.candidates = candidates

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        require(self.cost is not None, "cost spec is required")
        require(self.response_fn is not None, "response function is required")
        require(self.axis < X.shape[1], "axis out of range")
        rate = self.cost.alpha[self.axis]
        xs = X[:, self.axis]
        if self.candidates is not None:
            cands = np.asarray(self.candidates, dtype=np.float64)
        else:
            shift = (2.0 / rate) if rate > 0 else 0.0
            cands = np.concatenate([xs, xs + shift, [-np.inf, np.inf]])
        cands = np.unique(cands)
        best_err, best_thr = np.inf, None
        for thr in cands:
            g = ThresholdClassifier(threshold=float(thr), axis=self.axis)
            believed = self.response_fn.resolve(g)
            if not isinstance(believed, ThresholdClassifier) or believed.axis != self.axis:
                raise ContractError(
                    "response function must stay within the threshold class "
                    "on the same axis")
            err = _reduction_error(xs, y, float(thr), believed.threshold, rate)
            if err < best_err:
                best_err, best_thr = err, float(thr)
        self.threshold_ = best_thr
        self.strategic_train_error_ = best_err
        self.classifier_ = ThresholdClassifier(threshold=best_thr, axis=self.axis)
        return self

    def predict(self, X):
        return self.classifier_.predict(X)


def _reduction_error(xs, y, t_g, believed_thr, rate):
    """Training error of threshold t_g when points respond to believed_thr
    under the closed-budget reduction (movers need cost <= 2)."""
    believed_neg = xs < believed_thr
    finite = np.isfinite(believed_thr)
    if finite:
        afford = (believed_thr - xs) * rate <= 2.0
        moved = believed_neg & afford
    else:
        moved = np.zeros_like(believed_neg)
    landed = np.where(moved, believed_thr, xs)
    pred = np.where(landed >= t_g, 1, -1)
    return float(np.mean(pred != y))


def r_strategic_generalization_bound(d, n, delta, C=1.0):
    """Excess-error bound eps = sqrt(C (d log(d/eps) + log(1/delta)) / n),
    solved by fixed-point iteration (the bound is implicit in eps).

    d is the response-aware VC dimension, supplied by the caller; C is an
    absolute constant.
    """
    require(d >= 1 and n >= 1, "d and n must be >= 1")
    require(0 < delta < 1, "delta must be in (0, 1)")
    eps = 0.5
    for _ in range(200):
        inner = d * np.log(max(d / max(eps, 1e-12), np.e)) + np.log(1.0 / delta)
        new = float(np.sqrt(C * inner / n))
        if abs(new - eps) <= 1e-12:
            eps = new
            break
        eps = new
    return eps


# ---------------------------------------------------------------------------
# module-level wrappers matching the operation surface
# ---------------------------------------------------------------------------

def fit_threshold_erm(train: Dataset, axis=0):
    return ThresholdERM(axis=axis).fit(train.X, train.y).classifier_


def fit_linear_erm(train: Dataset, cfg: TrainConfig = TrainConfig()):
    est = LinearHingeERM(cfg.epochs, cfg.step0, cfg.l2).fit(train.X, train.y)
    return est.classifier_


def strategic_erm(train: Dataset, cost, cfg: TrainConfig = TrainConfig(),
                  family="threshold", axis=0):
    """Strategic ERM; returns (classifier, empirical strategic error)."""
    if family == "threshold":
        est = StrategicThresholdERM(cost=cost, axis=axis).fit(train.X, train.y)
    elif family == "linear":
        est = StrategicLinearERM(cost=cost, epochs=cfg.epochs, step0=cfg.step0,
                                 l2=cfg.l2).fit(train.X, train.y)
    else:
        raise ValidationError(f"unknown family {family!r}")
    return est.classifier_, est.strategic_train_error_


def r_strategic_erm(train: Dataset, cost, response_fn,
                    cfg: TrainConfig = TrainConfig(), axis=0, candidates=None):
    """Response-aware strategic ERM; returns (classifier, empirical error)."""
    est = RStrategicThresholdERM(cost=cost, response_fn=response_fn, axis=axis,
                                 candidates=candidates).fit(train.X, train.y)
    return est.classifier_, est.strategic_train_error_


# ---------------------------------------------------------------------------
# contestant side
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SampleSet:
    """Samples observed by one agent, labeled by the deployed rule."""

    X: np.ndarray
    labels: np.ndarray
    empty: bool = False

    @property
    def one_sided(self):
        if self.empty:
            return False
        return bool(np.all(self.labels == self.labels[0]))


@dataclass(frozen=True)
class Uniform:
    """Uniform pool draws, rejection-sampled until both labels appear."""


@dataclass(frozen=True)
class NetworkSource:
    """All pool points owned by users within `hops` of `user`."""

    graph: object
    user: str
    hops: int = 2


def contestant_sample_set(pool: Dataset, f, m, seed, source=Uniform()):
    """Build one agent's sample set from the pool, labeled by f.

    Uniform source: m points drawn with replacement, redrawn until both
    f-labels are present (at most MAX_REJECTION_ATTEMPTS attempts). Network
    source: every pool point of a user within `hops` of the agent; no
    rejection, may be one-sided; an isolated user yields an empty set with
    the `empty` flag raised.
    """
    if isinstance(source, Uniform):
        require(m >= 2, "uniform sampling needs m >= 2 (rejection needs both classes)")
        rng = seed.rng()
        for _ in range(MAX_REJECTION_ATTEMPTS):
            idx = rng.integers(0, pool.n, size=m)
            labels = f.predict(pool.X[idx])
            if (labels == 1).any() and (labels == -1).any():
                return SampleSet(X=pool.X[idx], labels=labels)
        raise SamplingError(
            f"pool is effectively one-class under f: no mixed-label sample "
            f"of size {m} in {MAX_REJECTION_ATTEMPTS} attempts")
    if isinstance(source, NetworkSource):
        rows = source.graph.rows_within(source.user, source.hops)
        if not rows:
            return SampleSet(X=np.empty((0, pool.d)), labels=np.empty(0, dtype=np.int64),
                             empty=True)
        idx = np.asarray(rows, dtype=np.int64)
        return SampleSet(X=pool.X[idx], labels=f.predict(pool.X[idx]))
    raise ValidationError(f"unknown sample source: {type(source).__name__}")


@dataclass(frozen=True)
class ContestantModel:
    """Estimated rule plus flags describing degenerate information states.

    classifier is None when the agent saw no samples at all; responders
    treat that as truthful (no movement). One-sided samples map to the
    extreme thresholds (accept-all / reject-all).
    """

    classifier: object
    one_sided: bool = False
    no_information: bool = False


def contestant_fit(samples, cfg: TrainConfig = TrainConfig(),
                   tie_fraction=CONTESTANT_TIE):
    """ERM estimate of the deployed rule from f-labeled samples.

    1-d samples get the exact threshold search with the gap tie rule;
    higher-dimensional samples get the hinge fit with the same tie rule
    applied to the bias. Deterministic: identical samples give identical
    estimates.
    """
    if samples.empty:
        return ContestantModel(classifier=None, no_information=True)
    X = as_feature_matrix(samples.X)
    labels = samples.labels
    if samples.one_sided:
        thr = -np.inf if labels[0] == 1 else np.inf
        return ContestantModel(classifier=ThresholdClassifier(threshold=thr, axis=0),
                               one_sided=True)
    if X.shape[1] == 1:
        thr, _ = _threshold_interval_fit(X[:, 0], labels, tie_fraction)
        return ContestantModel(classifier=ThresholdClassifier(threshold=thr, axis=0))
    W, B = fit_linear_bulk(X[None, :, :], labels[None, :], cfg, tie_fraction)
    return ContestantModel(classifier=LinearClassifier(weights=W[0], bias=float(B[0])))


def fit_thresholds_bulk(S, labels, tie_fraction=CONTESTANT_TIE):
    """Vectorized 1-d contestant fits: one threshold per row of S.

    Rows must be labeled by a threshold rule (hence separable). Returns
    (thresholds, one_sided mask); one-sided rows get +-inf.
    """
    S = np.asarray(S, dtype=np.float64)
    pos = labels == 1
    any_pos = pos.any(axis=1)
    any_neg = (~pos).any(axis=1)
    maxneg = np.where(~pos, S, -np.inf).max(axis=1)
    minpos = np.where(pos, S, np.inf).min(axis=1)
    thr = maxneg + tie_fraction * (minpos - maxneg)
    thr = np.where(any_neg, thr, -np.inf)   # all-positive: accept everything
    thr = np.where(any_pos, thr, np.inf)    # all-negative: reject everything
    return thr, ~(any_pos & any_neg)


def fit_linear_bulk(Xs, labels, cfg: TrainConfig = TrainConfig(),
                    tie_fraction=CONTESTANT_TIE):
    """Vectorized linear contestant fits: hinge direction + exact bias.

    Xs: (U, m, d); labels: (U, m) in {-1, +1}. The bias of each row is the
    exact 0/1-optimal score threshold with the gap tie rule. Returns (W, B).
    """
    Xs = np.asarray(Xs, dtype=np.float64)
    ys = np.asarray(labels, dtype=np.float64)
    U, m, d = Xs.shape
    W, _ = _hinge_descent(Xs, ys, cfg)
    if not np.all(np.isfinite(W)):
        raise NumericError("bulk hinge descent diverged; reduce step0 or increase l2")
    u = np.einsum("umd,ud->um", Xs, W)
    order = np.argsort(u, axis=1, kind="stable")
    us = np.take_along_axis(u, order, axis=1)
    yss = np.take_along_axis(ys, order, axis=1)
    pos_below = np.concatenate([np.zeros((U, 1)), np.cumsum(yss == 1, axis=1)], axis=1)
    neg_above = np.concatenate([np.cumsum((yss == -1)[:, ::-1], axis=1)[:, ::-1],
                                np.zeros((U, 1))], axis=1)
    errs = pos_below + neg_above
    realizable = np.ones((U, m + 1), dtype=bool)
    if m > 1:
        realizable[:, 1:m] = us[:, :-1] < us[:, 1:]
    errs = np.where(realizable, errs, np.inf)
    k = np.argmin(errs, axis=1)
    rows = np.arange(U)
    lo = np.where(k >= 1, us[rows, np.maximum(k - 1, 0)], -np.inf)
    hi = np.where(k <= m - 1, us[rows, np.minimum(k, m - 1)], np.inf)
    thr = np.where(k == 0, -np.inf,
                   np.where(k == m, np.inf, lo + tie_fraction * (hi - lo)))
    return W, -thr


# ---------------------------------------------------------------------------
# social graph
# ---------------------------------------------------------------------------

class SocialGraph:
    """Undirected user graph with a mapping from users to dataset rows."""

    def __init__(self, adjacency, user_rows):
        self.adjacency = {u: tuple(sorted(set(vs))) for u, vs in adjacency.items()}
        for u, vs in self.adjacency.items():
            if u in vs:
                raise ValidationError(f"self loop at user {u!r}")
        self.user_rows = dict(user_rows)

    @classmethod
    def from_files(cls, edges_path, mapping_path):
        """edges: CSV rows `user_id,user_id`; mapping: `user_id,example_row`
        (an optional header row in the mapping file is skipped)."""
        adjacency = {}

        def add(a, b):
            adjacency.setdefault(a, set()).add(b)
            adjacency.setdefault(b, set()).add(a)

        with open(edges_path, newline="", encoding="utf-8") as fh:
            for row in csv.reader(fh):
                if not row:
                    continue
                if len(row) != 2:
                    raise ValidationError(f"edge rows need two fields, got {row!r}")
                a, b = row[0].strip(), row[1].strip()
                if a == b:
                    raise ValidationError(f"self loop at user {a!r}")
                add(a, b)
        user_rows = {}
        with open(mapping_path, newline="", encoding="utf-8") as fh:
            for i, row in enumerate(csv.reader(fh)):
                if not row:
                    continue
                if len(row) != 2:
                    raise ValidationError(f"mapping rows need two fields, got {row!r}")
                try:
                    user_rows[row[0].strip()] = int(row[1])
                except ValueError:
                    if i == 0:
                        continue  # header row
                    raise ValidationError(f"mapping row {row!r} is not an integer") from None
        return cls(adjacency, user_rows)

    def users(self):
        return sorted(set(self.adjacency) | set(self.user_rows))

    def neighbors_within(self, user, hops):
        """Users at graph distance 1..hops from user (user itself excluded)."""
        seen = {user}
        frontier = {user}
        out = set()
        for _ in range(hops):
            nxt = set()
            for u in frontier:
                nxt |= set(self.adjacency.get(u, ()))
            nxt -= seen
            out |= nxt
            seen |= nxt
            frontier = nxt
            if not frontier:
                break
        return sorted(out)

    def rows_within(self, user, hops):
        """Dataset rows owned by users within `hops` of `user`."""
        return [self.user_rows[u] for u in self.neighbors_within(user, hops)
                if u in self.user_rows]
