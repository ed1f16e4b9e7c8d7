"""Instance-invariant (admissible) movement costs and their budget constant.

The supported family charges per-axis for upward movement only:
c(x, u) = sum_i alpha_i * max(0, u_i - x_i), alpha_i >= 0 with at least one
positive entry. Because the formula depends on u - x alone, the cost is
instance-invariant by construction. The budget constant t is the largest
movement along the cheapest paying axis with cost <= 2.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import as_point, require
from .errors import ValidationError

ADMISSIBILITY_TOL = 1e-12


@dataclass(frozen=True)
class LinearSeparableCost:
    """c(x, u) = sum_i alpha_i * max(0, u_i - x_i).

    Downward movement is free on every axis; axes with alpha_i == 0 permit
    free movement in both directions, which is what reduces a d-dimensional
    problem with alpha = (a, 0, ..., 0) to a 1-d problem on the first axis.
    """

    alpha: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.alpha, dtype=np.float64)
        if a.ndim == 0:
            a = a[None]
        require(a.ndim == 1 and a.shape[0] >= 1, "alpha must be a 1-d vector")
        require(np.all(np.isfinite(a)), "alpha must be finite")
        require(np.all(a >= 0), "alpha entries must be >= 0")
        if not np.any(a > 0):
            raise ValidationError(
                "alpha must have a positive entry; an all-zero cost has no "
                "cost-bearing direction and admits unbounded free movement")
        a.setflags(write=False)
        object.__setattr__(self, "alpha", a)

    @property
    def d(self):
        return self.alpha.shape[0]

    def __call__(self, x, u):
        x = as_point(x, d=self.d)
        u = as_point(u, d=self.d)
        return float(np.sum(self.alpha * np.maximum(0.0, u - x)))

    def batch(self, X, U):
        """Rowwise cost between matching rows of X and U."""
        X = np.asarray(X, dtype=np.float64)
        U = np.asarray(U, dtype=np.float64)
        if X.shape != U.shape or X.shape[-1] != self.d:
            raise ValidationError("dimension mismatch in batch cost")
        return np.maximum(0.0, U - X) @ self.alpha


def cost_eval(c, x, u):
    """Cost of modifying x into u; exactly 0 when u == x."""
    return c(x, u)


@dataclass(frozen=True)
class BudgetT:
    """Movement budget: sup{delta > 0 : c(x, x + delta e) <= 2} on the budget axis."""

    t: float
    axis: int

    def __post_init__(self):
        require(0 < self.t < np.inf, "budget t must be in (0, inf)")


def budget_t(c):
    """Budget along the cost-bearing axis of minimal positive rate: t = 2 / rate."""
    rates = c.alpha[c.alpha > 0]
    rate = rates.min()
    axis = int(np.flatnonzero(c.alpha == rate)[0])
    return BudgetT(t=2.0 / rate, axis=axis)


@dataclass(frozen=True)
class AdmissibilityReport:
    admissible: bool
    invariance_ok: bool
    feasibility_ok: bool
    max_invariance_deviation: float
    violations: tuple


def check_admissible(c, probes):
    """Verify instance-invariance and feasibility over a probe set.

    Invariance: c(x, x + delta) == c(y, y + delta) to 1e-12 over all probe
    pairs, with deltas taken from the probe differences. Feasibility: some
    delta > 0 has cost <= 2 (witnessed on the budget axis). Never raises;
    violating witnesses are returned in the report.
    """
    P = np.asarray(probes, dtype=np.float64)
    if P.ndim == 1:
        P = P[:, None]
    require(P.shape[0] >= 1, "probe set must be non-empty")
    require(P.shape[1] == c.d, "probe dimension mismatch")
    deltas = P[1:] - P[:-1] if P.shape[0] > 1 else np.ones((1, c.d))
    worst = 0.0
    violations = []
    for delta in deltas:
        costs = np.maximum(0.0, delta) @ c.alpha  # instance-invariant reference
        for x in P:
            dev = abs(c(x, x + delta) - costs)
            if dev > worst:
                worst = dev
            if dev > ADMISSIBILITY_TOL:
                violations.append((x.copy(), delta.copy(), dev))
    b = budget_t(c)
    step = np.zeros(c.d)
    step[b.axis] = b.t / 2.0
    feas = c(P[0], P[0] + step) <= 2.0
    inv_ok = not violations
    return AdmissibilityReport(
        admissible=inv_ok and feas,
        invariance_ok=inv_ok,
        feasibility_ok=feas,
        max_invariance_deviation=worst,
        violations=tuple(violations),
    )
