"""Best-response maps: how agents modify features against a believed classifier.

Feasibility is strict (cost < 2), taken literally from the utility rewrite:
a point whose cheapest path to the positive region costs exactly 2 stays put.
Movers land on the believed positive region's closed boundary. For threshold
believers the landing coordinate is the threshold float itself, so the
believed prediction of the landing point is +1 exactly. For linear believers
the landing gain carries a ~1e-9 relative slack so the believed classifier
approves the landing under any floating-point accumulation order.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import as_feature_matrix, as_point, require
from .classifiers import LinearClassifier, ThresholdClassifier
from .errors import CapabilityError, ValidationError

#: Safe responses cap total cost this far below the strict budget of 2.
EPS_CAP = 1e-9
#: Relative/absolute slack on the believed-score gain of linear landings.
SLACK_REL = 1e-9
SLACK_ABS = 1e-12


def threshold_response_1d(xs, thr, rate):
    """Vectorized response of coordinates xs against a believed threshold.

    thr may be a scalar or a per-row array; rate is the per-unit movement
    cost on the axis (rate == 0 means movement is free). Returns
    (landed, moved).
    """
    xs = np.asarray(xs, dtype=np.float64)
    thr = np.asarray(thr, dtype=np.float64)
    believed_neg = xs < thr
    finite = np.isfinite(thr)
    with np.errstate(invalid="ignore"):
        cost = np.where(finite & believed_neg, (thr - xs) * rate, np.inf)
    moved = believed_neg & finite & (cost < 2.0)
    landed = np.where(moved, thr, xs)
    return landed, moved


def _respond_threshold(X, believed, cost):
    thr = believed.threshold
    axis = believed.axis
    if axis >= X.shape[1]:
        raise ValidationError(f"axis {axis} out of range for d={X.shape[1]}")
    rate = cost.alpha[axis]
    landed_col, moved = threshold_response_1d(X[:, axis], thr, rate)
    out = X.copy()
    out[:, axis] = landed_col
    paid = np.where(moved, (thr - X[:, axis]) * rate, 0.0)
    ax = np.full(X.shape[0], axis)
    delta = np.where(moved, thr - X[:, axis], 0.0)
    return out, moved, paid, ax, delta


def _respond_linear(X, W, B, cost):
    """W: (n, d) or (d,); B: (n,) or scalar. Single-axis moves; free axes first."""
    n, d = X.shape
    W = np.asarray(W, dtype=np.float64)
    if W.ndim == 1:
        W = np.broadcast_to(W, (n, d))
    B = np.broadcast_to(np.asarray(B, dtype=np.float64), (n,))
    alpha = cost.alpha
    score = np.einsum("nd,nd->n", W, X) + B
    stay = score >= 0.0
    # zero-rate axes are free both ways; downward moves are free on every axis
    free = ((alpha[None, :] == 0.0) & (W != 0.0)) | (W < 0.0)
    has_free = free.any(axis=1)
    first_free = np.argmax(free, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where((W > 0.0) & (alpha[None, :] > 0.0),
                         W / np.where(alpha[None, :] > 0.0, alpha[None, :], 1.0),
                         -np.inf)
    kbest = np.argmax(ratio, axis=1)
    has_pay = ratio[np.arange(n), kbest] > 0.0
    gain = (-score) * (1.0 + SLACK_REL) + SLACK_ABS
    w_free = W[np.arange(n), first_free]
    d_free = np.where(has_free, gain / np.where(w_free != 0.0, w_free, 1.0), 0.0)
    w_pay = W[np.arange(n), kbest]
    d_pay = np.where(has_pay, gain / np.where(w_pay != 0.0, w_pay, 1.0), 0.0)
    pay_cost = d_pay * alpha[kbest]
    move_free = (~stay) & has_free
    move_pay = (~stay) & (~has_free) & has_pay & (pay_cost < 2.0)
    moved = move_free | move_pay
    axis = np.where(move_free, first_free, kbest)
    delta = np.where(move_free, d_free, np.where(move_pay, d_pay, 0.0))
    out = X.copy()
    rows = np.arange(n)
    out[rows, axis] = out[rows, axis] + delta
    paid = np.where(move_pay, pay_cost, 0.0)
    return out, moved, paid, axis, delta


def respond_batch(believed, cost, X):
    """Best responses of all rows of X against one believed classifier.

    Returns (landed, moved). believed may be None (no information): nobody
    moves.
    """
    X = as_feature_matrix(X, d=cost.d)
    if believed is None:
        return X.copy(), np.zeros(X.shape[0], dtype=bool)
    if isinstance(believed, ThresholdClassifier):
        out, moved, _, _, _ = _respond_threshold(X, believed, cost)
        return out, moved
    if isinstance(believed, LinearClassifier):
        require(believed.d == cost.d, "classifier/cost dimension mismatch")
        out, moved, _, _, _ = _respond_linear(X, believed.weights, believed.bias, cost)
        return out, moved
    raise CapabilityError(
        f"no closed-form responder for {type(believed).__name__}; "
        "use best_response_bruteforce")


def respond_linear_perrow(W, B, cost, X):
    """Best responses where row i responds to its own linear rule (W[i], B[i])."""
    X = as_feature_matrix(X, d=cost.d)
    out, moved, _, _, _ = _respond_linear(X, W, B, cost)
    return out, moved


def best_response(g, c, x):
    """Utility-maximizing modification of a single point x against g.

    Returns x unchanged if g(x) = +1 or no point with cost < 2 is classified
    +1 by g; otherwise the minimum-cost point of g's closed positive region
    along the cheapest direction. Guarantees g(u) - c(x,u) >= g(x), and for a
    moved point, c(x,u) < 2 and g(u) = +1.
    """
    x = as_point(x, d=c.d)
    out, _ = respond_batch(g, c, x[None, :])
    return out[0]


def best_response_bruteforce(g, c, x, offsets):
    """Grid oracle for the utility argmax; ties broken lexicographically.

    offsets: one 1-d array of candidate coordinate offsets per axis (the grid
    must cover the reachable set {u : c(x, u) < 2} at the caller's chosen
    resolution). x itself is always a candidate.
    """
    x = as_point(x, d=c.d)
    if len(offsets) != c.d:
        raise ValidationError("need one offsets array per axis")
    axes = [np.asarray(o, dtype=np.float64).ravel() for o in offsets]
    if any(a.size == 0 for a in axes):
        raise ValidationError("empty grid")
    mesh = np.meshgrid(*axes, indexing="ij")
    cand = x + np.stack([m.ravel() for m in mesh], axis=1)
    cand = np.vstack([x[None, :], cand])
    costs = c.batch(np.broadcast_to(x, cand.shape), cand)
    utility = np.where(costs < 2.0, g.predict(cand) - costs, -np.inf)
    utility[0] = g.predict(cand[:1])[0]  # cost of staying is exactly 0
    best = utility.max()
    top = np.flatnonzero(utility == best)
    order = np.lexsort(tuple(cand[top, k] for k in reversed(range(c.d))))
    return cand[top[order[0]]]


def safe_response(g, c, x, k):
    """Best response extended k extra cost units along the same direction.

    The extension stops when the extra budget is spent or total cost reaches
    2 - EPS_CAP, preserving the strict-feasibility contract. A move along a
    zero-cost direction cannot absorb extra cost and is returned unchanged.
    """
    require(0.0 <= k <= 2.0, "safety budget k must be in [0, 2]")
    x = as_point(x, d=c.d)
    xp = best_response(g, c, x)
    if np.array_equal(xp, x):
        return x
    cost0 = c(x, xp)
    if cost0 == 0.0:
        return xp
    target = min(cost0 + k, 2.0 - EPS_CAP)
    return x + (xp - x) * (target / cost0)


def respond_safe_batch(believed, cost, X, k):
    """Vectorized safe responses against one believed classifier."""
    require(0.0 <= k <= 2.0, "safety budget k must be in [0, 2]")
    X = as_feature_matrix(X, d=cost.d)
    if believed is None:
        return X.copy(), np.zeros(X.shape[0], dtype=bool)
    if isinstance(believed, ThresholdClassifier):
        out, moved, paid, ax, delta = _respond_threshold(X, believed, cost)
    elif isinstance(believed, LinearClassifier):
        out, moved, paid, ax, delta = _respond_linear(X, believed.weights, believed.bias, cost)
    else:
        raise CapabilityError(f"no closed-form responder for {type(believed).__name__}")
    extend = moved & (paid > 0.0)
    target = np.minimum(paid + k, 2.0 - EPS_CAP)
    factor = np.where(extend, target / np.where(paid > 0.0, paid, 1.0), 1.0)
    rows = np.arange(X.shape[0])
    out[rows, ax] = X[rows, ax] + delta * factor
    return out, moved


@dataclass(frozen=True)
class Truthful:
    """Points never move."""


@dataclass(frozen=True)
class BestResponse:
    """Points best-respond to a believed classifier."""

    believed: object


@dataclass(frozen=True)
class Safe:
    """Best response plus k extra cost units along the same direction."""

    believed: object
    k: float

    def __post_init__(self):
        require(0.0 <= self.k <= 2.0, "safety budget k must be in [0, 2]")


ResponsePolicy = (Truthful, BestResponse, Safe)


def apply_policy(policy, cost, X):
    """Move all rows of X according to the policy; returns the moved matrix."""
    X = as_feature_matrix(X)
    if isinstance(policy, Truthful):
        return X.copy()
    if isinstance(policy, BestResponse):
        out, _ = respond_batch(policy.believed, cost, X)
        return out
    if isinstance(policy, Safe):
        out, _ = respond_safe_batch(policy.believed, cost, X, policy.k)
        return out
    raise ValidationError(f"unknown response policy: {type(policy).__name__}")
