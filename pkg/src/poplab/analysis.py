"""Error calculus for opaque vs transparent deployment.

Quantities: the strategic error err(f, g') = P{h(x) != f(Delta_{g'}(x))},
the price of opacity pop = err(f, fhat) - err(f, f), the disagreement set S,
the enlargement set E with both of its partitions (E_{-1,1} / E_{1,-1}
computed from S, and E+ / E- computed from the ground truth), and the
closed-form predictions for a 1-d Gaussian population under threshold rules.

All set memberships are computed from their definitions via the response
map; interval characterizations are provided separately as the fast
analytical route and cross-checked in tests.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf as _erf

from ._validation import as_point, require
from .core import Dataset
from .errors import ValidationError
from .learners import ContestantModel
from .response import apply_policy, best_response, threshold_response_1d

_SQRT2 = math.sqrt(2.0)


def normal_cdf(x, mean=0.0, sigma=1.0):
    """Gaussian CDF, exact to machine precision via erf; array-aware."""
    require(sigma > 0, "sigma must be > 0")
    z = (np.asarray(x, dtype=np.float64) - mean) / (sigma * _SQRT2)
    out = 0.5 * (1.0 + _erf(z))
    return float(out) if np.ndim(x) == 0 else out


def normal_ppf(p):
    """Standard normal inverse CDF by bisection (|cdf(z) - p| <= 1e-12)."""
    require(0.0 < p < 1.0, "p must be in (0, 1)")
    lo, hi = -13.0, 13.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if normal_cdf(mid) < p:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-13:
            break
    return 0.5 * (lo + hi)


def eps1_bound(n, delta):
    """Deployer-side excess strategic error bound sqrt(ln(4/delta) / n)."""
    require(n >= 1, "n must be >= 1")
    require(0.0 < delta < 1.0, "delta must be in (0, 1)")
    return math.sqrt(math.log(4.0 / delta) / n)


def sigma0(t, eps1):
    """Largest population spread for which the closed-form regime holds.

    Defined by normal_cdf(t/2, 0, sigma0) = 1/2 + eps1, i.e.
    sigma0 = (t/2) / z where z is the standard normal quantile of
    1/2 + eps1. eps1 -> 0+ sends sigma0 -> +inf; eps1 >= 0.5 has no solution.
    """
    require(t > 0, "t must be > 0")
    if not 0.0 < eps1 < 0.5:
        raise ValidationError("eps1 must be in (0, 0.5); no sigma solves the defining equation")
    z = normal_ppf(0.5 + eps1)
    return (t / 2.0) / z


@dataclass(frozen=True)
class EnlargementInterval:
    lo: float
    hi: float
    empty: bool = False

    def contains(self, x):
        if self.empty:
            return np.zeros_like(np.asarray(x), dtype=bool)
        x = np.asarray(x)
        return (x >= self.lo) & (x < self.hi)


def enlargement_interval_1d(t_f, t_fhat, t):
    """Half-open interval characterization of the enlargement set for 1-d
    threshold rules: [t_f - t, t_f) when t_f > t_fhat, [t_f - t, t_fhat - t)
    when t_f < t_fhat (valid in the regime where the believed threshold lies
    within budget of the deployed one). Equal thresholds yield the empty
    interval with a flag.
    """
    require(t > 0, "t must be > 0")
    if t_f == t_fhat:
        return EnlargementInterval(lo=np.nan, hi=np.nan, empty=True)
    if t_f > t_fhat:
        return EnlargementInterval(lo=t_f - t, hi=t_f)
    return EnlargementInterval(lo=t_f - t, hi=t_fhat - t)


@dataclass(frozen=True)
class TheoryParams:
    """Parameters of the 1-d Gaussian closed-form analysis.

    alpha/sigma: population mean and spread (ground truth flips at alpha);
    t: movement budget; t_f / t_fhat: deployed and believed thresholds;
    eps1: deployer's excess strategic error; eps2: disagreement mass;
    n / m / delta: sample sizes and confidence, where relevant.
    """

    alpha: float = 0.0
    sigma: float = 1.0
    t: float = 2.0
    t_f: float = 0.0
    t_fhat: float = 0.0
    eps1: float = 0.0
    eps2: float = 1.0
    n: int = 0
    m: int = 0
    delta: float = 0.05

    def __post_init__(self):
        require(self.sigma > 0, "sigma must be > 0")
        require(self.t > 0, "t must be > 0")
        require(0.0 <= self.eps1 <= 1.0, "eps1 must be in [0, 1]")
        require(0.0 <= self.eps2 <= 1.0, "eps2 must be in [0, 1]")


@dataclass(frozen=True)
class PopPrediction:
    pop: float
    branch: str
    in_regime: bool
    warnings: tuple


def closed_form_pop_1d(params):
    """Closed-form price of opacity for a realizable 1-d Gaussian population.

    With thresholds measured from the mean (t_f' = t_f - alpha, likewise
    t_fhat'):

        pop = cdf(t_fhat' - t) - cdf(|t - t_f'|)   if t_f < t_fhat
        pop = cdf(t_f')        - cdf(|t - t_f'|)   if t_f > t_fhat

    where cdf is the centered Gaussian CDF with spread sigma. The formula is
    always evaluated; out-of-regime parameters come back with warning flags
    instead of an error (parameter sweeps cross regime boundaries).
    """
    p = params
    tfp = p.t_f - p.alpha
    tfhp = p.t_fhat - p.alpha
    cdf = lambda z: normal_cdf(z, 0.0, p.sigma)
    warnings = []
    if p.t_f == p.t_fhat:
        return PopPrediction(pop=0.0, branch="equal", in_regime=False,
                             warnings=("t_f == t_fhat",))
    if p.t_f < p.t_fhat:
        branch = "believed_above"
        pop = cdf(tfhp - p.t) - cdf(abs(p.t - tfp))
        if tfhp <= p.t:
            warnings.append("believed threshold not above the budget (t_fhat' <= t)")
        if tfhp - p.t >= tfp:
            warnings.append("believed threshold exceeds deployed by more than the budget")
    else:
        branch = "believed_below"
        pop = cdf(tfp) - cdf(abs(p.t - tfp))
    if tfp <= p.t / 2.0:
        warnings.append("deployed threshold not above half the budget (t_f' <= t/2)")
    if p.eps2 <= 2.0 * p.eps1:
        warnings.append("eps2 <= 2*eps1")
    if p.eps1 > 0.0:
        try:
            s0 = sigma0(p.t, p.eps1)
            if p.sigma >= s0:
                warnings.append("sigma >= sigma0(t, eps1)")
        except ValidationError:
            warnings.append("eps1 out of range for sigma0")
    return PopPrediction(pop=float(pop), branch=branch,
                         in_regime=not warnings, warnings=tuple(warnings))


def sufficient_condition(mass_E, err_star, eps1):
    """Strict positivity is guaranteed when the enlargement mass exceeds
    2*err(optimum) + 2*eps1."""
    for v in (mass_E, err_star, eps1):
        require(0.0 <= v <= 1.0, "inputs must lie in [0, 1]")
    return mass_E > 2.0 * err_star + 2.0 * eps1


@dataclass(frozen=True)
class PopCondition:
    sufficient: bool
    necessary_iff_regime: bool
    regime_ok: bool
    mass_E: float
    ell: float


def pop_condition_1d(params, err_star=0.0):
    """Positivity conditions for the 1-d Gaussian threshold setting.

    sufficient: enlargement mass > ell = 2*err_star + 2*eps1, with the mass
    computed from the interval characterization (centered at alpha).
    necessary_iff_regime: mass > 2*eps1; this is equivalent to pop > 0 only
    inside the regime (realizable truth, t_f' < t, eps2 > 2*eps1,
    sigma < sigma0), reported via regime_ok.
    """
    p = params
    tfp = p.t_f - p.alpha
    tfhp = p.t_fhat - p.alpha
    cdf = lambda z: normal_cdf(z, 0.0, p.sigma)
    if p.t_f > p.t_fhat:
        mass = cdf(tfp) - cdf(tfp - p.t)
    elif p.t_f < p.t_fhat:
        mass = cdf(tfhp - p.t) - cdf(tfp - p.t)
    else:
        mass = 0.0
    ell = 2.0 * err_star + 2.0 * p.eps1
    regime_ok = tfp < p.t and p.eps2 > 2.0 * p.eps1
    if p.eps1 > 0.0:
        try:
            regime_ok = regime_ok and p.sigma < sigma0(p.t, p.eps1)
        except ValidationError:
            regime_ok = False
    return PopCondition(sufficient=mass > ell,
                        necessary_iff_regime=mass > 2.0 * p.eps1,
                        regime_ok=regime_ok,
                        mass_E=float(max(mass, 0.0)),
                        ell=float(ell))


# ---------------------------------------------------------------------------
# set tags and reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SetTags:
    """Membership of one point in the disagreement/enlargement machinery."""

    in_S: bool
    in_E: bool
    in_E_plus: bool
    in_E_minus: bool
    in_E_neg_pos: bool   # believed-response lands where f rejects, fhat accepts
    in_E_pos_neg: bool   # deployed-response crosses where f accepts, fhat rejects


@dataclass(frozen=True)
class TagArrays:
    """Vectorized SetTags plus the raw predictions they derive from."""

    in_S: np.ndarray
    in_E: np.ndarray
    in_E_plus: np.ndarray
    in_E_minus: np.ndarray
    in_E_neg_pos: np.ndarray
    in_E_pos_neg: np.ndarray
    pred_transparent: np.ndarray
    pred_dark: np.ndarray


def _resolve_believed(fhat):
    if fhat is None:
        return None
    if isinstance(fhat, ContestantModel):
        return fhat.classifier
    return fhat


def tag_point(f, fhat, c, h_label, x):
    """Tags of a single point, computed from the set definitions."""
    x = as_point(x)
    believed = _resolve_believed(fhat)
    d_f = best_response(f, c, x)
    moved_f = not np.array_equal(d_f, x)
    if believed is None:
        d_fh, moved_fh = x, False
    else:
        d_fh = best_response(believed, c, x)
        moved_fh = not np.array_equal(d_fh, x)
    p_f = lambda u: int(f.predict(u))
    p_fh = (lambda u: int(believed.predict(u))) if believed is not None else (lambda u: p_f(u))
    in_S = believed is not None and p_f(x) != p_fh(x)
    pt, pd = p_f(d_f), p_f(d_fh)
    in_E = pt != pd
    in_e_neg_pos = (p_f(d_fh) == -1) and believed is not None \
        and (p_fh(d_fh) == 1) and (pt == 1)
    in_e_pos_neg = moved_f and (pt == 1) and believed is not None \
        and (p_fh(d_f) == -1) and (not moved_fh)
    in_e_plus = (h_label == pt) and (h_label != pd)
    in_e_minus = (h_label != pt) and (h_label == pd)
    return SetTags(in_S=bool(in_S), in_E=bool(in_E),
                   in_E_plus=bool(in_e_plus), in_E_minus=bool(in_e_minus),
                   in_E_neg_pos=bool(in_e_neg_pos), in_E_pos_neg=bool(in_e_pos_neg))


def tag_points_threshold_1d(t_f, t_fhat, rate, xs, h):
    """Vectorized tags for 1-d threshold rules over coordinates xs.

    t_fhat may be a scalar or one believed threshold per point. rate is the
    per-unit movement cost. Exact: movers land on the threshold float itself.
    """
    xs = np.asarray(xs, dtype=np.float64)
    h = np.asarray(h)
    d_f, mv_f = threshold_response_1d(xs, t_f, rate)
    d_fh, mv_fh = threshold_response_1d(xs, t_fhat, rate)
    pf = lambda u: np.where(u >= t_f, 1, -1)
    pfh = lambda u: np.where(u >= t_fhat, 1, -1)
    pt = pf(d_f)
    pd = pf(d_fh)
    in_S = pf(xs) != pfh(xs)
    in_E = pt != pd
    in_e_neg_pos = (pf(d_fh) == -1) & (pfh(d_fh) == 1) & (pt == 1)
    in_e_pos_neg = mv_f & (pt == 1) & (pfh(d_f) == -1) & (~mv_fh)
    in_e_plus = (h == pt) & (h != pd)
    in_e_minus = (h != pt) & (h == pd)
    return TagArrays(in_S=in_S, in_E=in_E, in_E_plus=in_e_plus,
                     in_E_minus=in_e_minus, in_E_neg_pos=in_e_neg_pos,
                     in_E_pos_neg=in_e_pos_neg,
                     pred_transparent=pt, pred_dark=pd)


def strategic_error(f, policy, cost, test: Dataset):
    """Fraction of test points misclassified by f after the policy moves them."""
    moved = apply_policy(policy, cost, test.X)
    return float(np.mean(test.y != f.predict(moved)))


#: Fixed column order of the tabular serialization.
POP_REPORT_COLUMNS = ("m", "err_transparent", "err_dark", "pop",
                      "pop_plus", "pop_minus", "eps2", "mass_E")


@dataclass(frozen=True)
class PopReport:
    """Empirical opacity report over one evaluation set.

    All masses are plain frequencies. The identities
    pop == pop_plus - pop_minus and mass_E == pop_plus + pop_minus hold
    exactly at the integer-count level by construction.
    """

    n: int
    err_transparent: float
    err_dark: float
    pop: float
    pop_plus: float
    pop_minus: float
    eps2: float
    mass_E: float
    counts: dict
    tags: object = None

    @classmethod
    def from_arrays(cls, h, tags: TagArrays, include_tags=False):
        h = np.asarray(h)
        n = h.shape[0]
        require(n > 0, "empty evaluation set")
        cnt_tr = int(np.sum(h != tags.pred_transparent))
        cnt_dk = int(np.sum(h != tags.pred_dark))
        cnt_plus = int(np.sum(tags.in_E_plus))
        cnt_minus = int(np.sum(tags.in_E_minus))
        cnt_e = int(np.sum(tags.in_E))
        cnt_s = int(np.sum(tags.in_S))
        # exact count-level identities; violations would be logic bugs
        assert cnt_dk - cnt_tr == cnt_plus - cnt_minus
        assert cnt_e == cnt_plus + cnt_minus
        counts = {"n": n, "err_transparent": cnt_tr, "err_dark": cnt_dk,
                  "e_plus": cnt_plus, "e_minus": cnt_minus, "e": cnt_e, "s": cnt_s}
        return cls(n=n,
                   err_transparent=cnt_tr / n,
                   err_dark=cnt_dk / n,
                   pop=(cnt_plus - cnt_minus) / n,
                   pop_plus=cnt_plus / n,
                   pop_minus=cnt_minus / n,
                   eps2=cnt_s / n,
                   mass_E=cnt_e / n,
                   counts=counts,
                   tags=tags if include_tags else None)

    def to_flat_dict(self):
        out = {"n": self.n, "err_transparent": self.err_transparent,
               "err_dark": self.err_dark, "pop": self.pop,
               "pop_plus": self.pop_plus, "pop_minus": self.pop_minus,
               "eps2": self.eps2, "mass_E": self.mass_E}
        out.update({f"count_{k}": v for k, v in self.counts.items() if k != "n"})
        return out

    def csv_row(self, m):
        return [m, self.err_transparent, self.err_dark, self.pop,
                self.pop_plus, self.pop_minus, self.eps2, self.mass_E]


def pop_report(f, fhat_provider, c, test: Dataset, include_tags=False):
    """Per-point report: each test point responds to its own believed rule.

    fhat_provider is a classifier (shared by every point), or a callable
    (index, x) -> classifier / ContestantModel / None. Point-level tags are
    computed from the set definitions via the response map.
    """
    if callable(fhat_provider):
        provider = fhat_provider
    else:
        provider = lambda i, x, _fh=fhat_provider: _fh
    cols = {k: [] for k in ("in_S", "in_E", "in_E_plus", "in_E_minus",
                            "in_E_neg_pos", "in_E_pos_neg")}
    pred_tr, pred_dk = [], []
    for i in range(test.n):
        x = test.X[i]
        fhat = provider(i, x)
        tags = tag_point(f, fhat, c, int(test.y[i]), x)
        for k in cols:
            cols[k].append(getattr(tags, k))
        believed = _resolve_believed(fhat)
        d_f = best_response(f, c, x)
        d_fh = x if believed is None else best_response(believed, c, x)
        pred_tr.append(int(f.predict(d_f)))
        pred_dk.append(int(f.predict(d_fh)))
    arrays = TagArrays(
        in_S=np.asarray(cols["in_S"]), in_E=np.asarray(cols["in_E"]),
        in_E_plus=np.asarray(cols["in_E_plus"]),
        in_E_minus=np.asarray(cols["in_E_minus"]),
        in_E_neg_pos=np.asarray(cols["in_E_neg_pos"]),
        in_E_pos_neg=np.asarray(cols["in_E_pos_neg"]),
        pred_transparent=np.asarray(pred_tr), pred_dark=np.asarray(pred_dk))
    return PopReport.from_arrays(test.y, arrays, include_tags=include_tags)


def monte_carlo_pop_1d(params, n_samples, seed):
    """Monte Carlo cross-check of the 1-d closed form: samples the Gaussian
    population, moves every point against both thresholds, and returns the
    full PopReport."""
    p = params
    rng = seed.rng()
    xs = rng.normal(p.alpha, p.sigma, size=n_samples)
    h = np.where(xs >= p.alpha, 1, -1)
    rate = 2.0 / p.t
    tags = tag_points_threshold_1d(p.t_f, p.t_fhat, rate, xs, h)
    return PopReport.from_arrays(h, tags)
