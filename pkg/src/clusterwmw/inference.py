"""Variance estimators, test statistics and confidence intervals.

All tests are two-sided tests of ``p = 1/2``; intervals are Wald-type,
``estimate -/+ quantile * se``, with no truncation to [0, 1]. A test rejects
at level ``alpha`` exactly when 1/2 lies outside the matching interval.

Analytic route:
    :func:`var_tilde` (projection-based), used by :func:`z_tilde_test` and,
    with estimated degrees of freedom, :func:`t_tilde_test`.

Monte Carlo routes (within-cluster resampling):
    :func:`hoffman_variance` / :func:`z_h_test`, :func:`z_hat_test` and the
    single-resample :func:`z_star_test`.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy import stats

from .dataset import ClusteredDataset
from .empirical import group_handle, kernel_matrix, whole_cluster_handle
from .estimators import (EffectEstimate, EstimatorMethod, ResampleDraw,
                         as_generator, batch_mann_whitney, draw_member_indices,
                         e_m1m2, p_hat_star, tilde_parts)
from .errors import (DegenerateResampleError, DegenerateVarianceError,
                     InsufficientDrawsError, NegativeVarianceError)

DEFAULT_HOFFMAN_RESAMPLES = 1_000
DEFAULT_HAT_RESAMPLES = 10_000
DEFAULT_RETRIES = 100


class VarianceMethod(str, Enum):
    analytic = "analytic"
    hoffman = "hoffman"
    mc_p_hat = "mc_p_hat"
    bm_single_draw = "bm_single_draw"


class Reference(str, Enum):
    standard_normal = "standard_normal"
    student_t = "student_t"


@dataclass(frozen=True)
class VarianceEstimate:
    value: float
    method: VarianceMethod
    resamples_used: int = 0
    resamples_discarded: int = 0
    components: Optional[tuple] = None  # (piece1, piece2) for Monte Carlo variants
    per_cluster: Optional[np.ndarray] = None  # squared centred projections (analytic)


@dataclass(frozen=True)
class InferenceResult:
    estimate: EffectEstimate
    statistic: float
    reference: Reference
    df: Optional[float]
    p_value: float
    ci_lower: float
    ci_upper: float
    alpha: float
    variance: Optional[VarianceEstimate] = None

    @property
    def reject(self) -> bool:
        return not (self.ci_lower < 0.5 < self.ci_upper)

    @property
    def half_width(self) -> float:
        return 0.5 * (self.ci_upper - self.ci_lower)

    def covers(self, target: float) -> bool:
        return self.ci_lower <= target <= self.ci_upper


def _check_alpha(alpha):
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")


def _build_result(estimate: EffectEstimate, var: VarianceEstimate, alpha: float,
                  df: Optional[float] = None) -> InferenceResult:
    _check_alpha(alpha)
    if var.value == 0.0:
        raise DegenerateVarianceError("degenerate variance: the variance estimate is zero")
    if not var.value > 0.0:
        raise NegativeVarianceError(
            f"negative variance estimate ({var.value:.3g}); test result unavailable",
            var.value, var.components)
    se = float(np.sqrt(var.value))
    stat = (estimate.value - 0.5) / se
    if df is None:
        ref, dist = Reference.standard_normal, stats.norm()
    else:
        ref, dist = Reference.student_t, stats.t(df)
    q = float(dist.ppf(1.0 - alpha / 2.0))
    p_value = float(min(1.0, 2.0 * dist.sf(abs(stat))))
    return InferenceResult(estimate, float(stat), ref, df, p_value,
                           estimate.value - q * se, estimate.value + q * se, alpha, var)


# ---------------------------------------------------------------------------
# analytic variance

def w_hat(ds: ClusteredDataset, l: int, ptilde: float = None) -> float:
    """Estimated projection term of cluster ``l`` (``ptilde`` is unused)."""
    c = ds.clusters[l]
    g2 = group_handle(ds, 2, "unweighted")
    first = (ds.alpha.sum() - ds.alpha[l]) * float(np.sum(g2(np.asarray(c.values))))
    second = 0.0
    if c.m2 > 0:
        x = np.asarray(c.values_g2)
        for j, cj in enumerate(ds.clusters):
            if j != l:
                second += float(np.sum(whole_cluster_handle(cj)(x)))
    return (first - second) / (c.m * (ds.n + 1))


def e_w_hat(ds: ClusteredDataset, l: int, ptilde: float) -> float:
    """Plug-in expectation of :func:`w_hat` for cluster ``l``."""
    a = ds.alpha
    al = a[l]
    first = ((1 - al) * (1 - ptilde) + al / 2.0) * (a.sum() - al)
    second = 0.0
    if ds.in_r2[l]:
        others = np.delete(a, l)
        second = al * float(np.sum((1 - others) * ptilde + others / 2.0))
    return (first - second) / (ds.n + 1)


def _projection_terms(ds: ClusteredDataset, parts) -> tuple:
    """Vectorised ``(W_hat, E_hat(W))`` for every cluster."""
    n, a, ptilde = ds.n, ds.alpha, parts.value
    K, w = parts.cross_kernel, parts.obs_weight
    g2 = ds.groups == 2
    # unweighted group-2 ECDF at every observation (includes own cluster)
    n_r2 = np.count_nonzero(ds.in_r2)
    w2 = 1.0 / (ds.m2[ds.cluster_index[g2]] * n_r2)
    g2_at = w2 @ kernel_matrix(ds.values[g2], ds.values)
    # sum over other clusters j of the whole-cluster ECDF at each observation
    others_at = w @ K
    sa = a.sum()
    first = (sa - a) * np.bincount(ds.cluster_index, g2_at, minlength=n)
    second = np.bincount(ds.cluster_index, np.where(g2, others_at, 0.0), minlength=n)
    W = (first - second) / (ds.m * (n + 1))
    # sum_{j != l} ((1 - a_j) p + a_j / 2)
    tot = np.sum((1 - a) * ptilde + a / 2.0)
    own = (1 - a) * ptilde + a / 2.0
    E = (((1 - a) * (1 - ptilde) + a / 2.0) * (sa - a) - a * (tot - own)) / (n + 1)
    return W, E


def var_tilde(ds: ClusteredDataset) -> VarianceEstimate:
    """Ratio-consistent analytic variance of :func:`~clusterwmw.estimators.p_tilde`."""
    parts = tilde_parts(ds)
    W, E = _projection_terms(ds, parts)
    diff = W - E
    # differences at round-off level are exact zeros (e.g. fully tied data)
    scale = max(1.0, float(np.abs(W).max()), float(np.abs(E).max()))
    diff[np.abs(diff) < 1e-12 * scale] = 0.0
    vhat = diff**2
    factor = ((ds.n + 1) / parts.denominator) ** 2
    return VarianceEstimate(float(factor * vhat.sum()), VarianceMethod.analytic,
                            per_cluster=vhat)


def df_hat(vhat, partition) -> float:
    """Satterthwaite-type degrees of freedom from per-cluster terms.

    ``partition`` is either a per-cluster label array (1 and 2 for clusters
    with one group only, 0 for clusters with both), or a triple
    ``(n1, n2, nc)`` when ``vhat`` is ordered in those three blocks. A cell
    with fewer than two clusters gets denominator 1.
    """
    vhat = np.asarray(vhat, dtype=float)
    if isinstance(partition, tuple) and len(partition) == 3:
        labels = np.repeat([1, 2, 0], [int(k) for k in partition])
    else:
        labels = np.asarray(partition)
    if labels.shape != vhat.shape:
        raise ValueError("partition does not match the number of clusters")
    total = vhat.sum()
    if total <= 0:
        raise DegenerateVarianceError("degenerate variance: all per-cluster terms are zero")
    denom = 0.0
    for cell in (1, 2, 0):
        sel = labels == cell
        k = int(sel.sum())
        denom += vhat[sel].sum() ** 2 / (k - 1 if k >= 2 else 1)
    return float(total**2 / denom)


def z_tilde_test(ds: ClusteredDataset, alpha: float = 0.05) -> InferenceResult:
    parts = tilde_parts(ds)
    est = EffectEstimate(parts.value, EstimatorMethod.p_tilde)
    return _build_result(est, var_tilde(ds), alpha)


def t_tilde_test(ds: ClusteredDataset, alpha: float = 0.05) -> InferenceResult:
    """As :func:`z_tilde_test` with a t reference at the estimated df."""
    parts = tilde_parts(ds)
    est = EffectEstimate(parts.value, EstimatorMethod.p_tilde)
    var = var_tilde(ds)
    if var.value <= 0:
        raise DegenerateVarianceError("degenerate variance: the variance estimate is zero")
    return _build_result(est, var, alpha, df=df_hat(var.per_cluster, ds.kind))


# ---------------------------------------------------------------------------
# two-sample variance on a resample

def bm_variance_single_draw(draw: ResampleDraw) -> VarianceEstimate:
    """Placement-based variance of the two-sample WMW estimate of one resample.

    ``S1^2 / m1 + S2^2 / m2`` where ``S1^2`` is the sample variance of the
    group-2 ECDF at the group-1 picks and ``S2^2`` the converse.
    """
    x1 = draw.values[draw.groups == 1]
    x2 = draw.values[draw.groups == 2]
    if x1.size < 2 or x2.size < 2:
        raise DegenerateResampleError("degenerate resample: need two picks from each group")
    place1 = kernel_matrix(x2, x1).mean(axis=0)
    place2 = kernel_matrix(x1, x2).mean(axis=0)
    value = place1.var(ddof=1) / x1.size + place2.var(ddof=1) / x2.size
    return VarianceEstimate(float(value), VarianceMethod.bm_single_draw, 1)


def batch_bm_variance(values: np.ndarray, is_g2: np.ndarray, ranks: np.ndarray) -> np.ndarray:
    """Row-wise version of :func:`bm_variance_single_draw` via midranks.

    Rows with fewer than two members in a group give nan.
    """
    is_g1 = ~is_g2
    m2 = is_g2.sum(axis=1)
    m1 = is_g2.shape[1] - m2
    r1 = stats.rankdata(np.where(is_g1, values, np.inf), method="average", axis=1)
    r2 = stats.rankdata(np.where(is_g2, values, np.inf), method="average", axis=1)
    out = np.zeros(values.shape[0])
    with np.errstate(divide="ignore", invalid="ignore"):
        for other_rank, mask, k, k_other in ((r1, is_g1, m1, m2), (r2, is_g2, m2, m1)):
            place = (ranks - other_rank) / k_other[:, None]
            mean = np.where(mask, place, 0.0).sum(axis=1) / k
            ss = np.where(mask, (place - mean[:, None]) ** 2, 0.0).sum(axis=1)
            out += ss / ((k - 1) * k)
    out[(m1 < 2) | (m2 < 2)] = np.nan
    return out


class _DrawStats:
    """Per-resample statistics for a batch of random resamples."""

    def __init__(self, ds: ClusteredDataset, Q: int, rng):
        gen, self.seed = as_generator(rng)
        us, pairs, sig = [], [], []
        for start in range(0, Q, 4096):
            size = min(4096, Q - start)
            idx = draw_member_indices(ds, gen, size)
            vals, is_g2 = ds.values[idx], ds.groups[idx] == 2
            b = batch_mann_whitney(vals, is_g2)
            us.append(b.u)
            pairs.append(b.m1 * b.m2)
            sig.append(batch_bm_variance(vals, is_g2, b.ranks))
        self.Q = Q
        self.u = np.concatenate(us)
        self.pairs = np.concatenate(pairs).astype(float)
        self.sigma2 = np.concatenate(sig)
        self.usable = ~np.isnan(self.sigma2)
        n_ok = int(self.usable.sum())
        if n_ok < max(2, Q / 2):
            raise InsufficientDrawsError(
                f"only {n_ok} of {Q} resamples had two or more picks from each group")


def hoffman_variance(ds: ClusteredDataset, Q: int = DEFAULT_HOFFMAN_RESAMPLES,
                     rng=None) -> VarianceEstimate:
    """Conditional-variance (Hoffman-type) Monte Carlo variance of p_tilde.

    piece1 averages the per-resample two-sample variance of the Mann-Whitney
    count, ``(m1* m2*)^2 sigma*^2``; piece2 is the spread of the count across
    resamples. The estimate is ``(piece1 - piece2) / E(m1* m2*)^2`` and raises
    :class:`NegativeVarianceError` when it is not positive.
    """
    if Q < 2:
        raise ValueError("Q must be at least 2")
    den = e_m1m2(ds)
    d = _DrawStats(ds, Q, rng)
    ok = d.usable
    piece1 = float(np.mean(d.pairs[ok] ** 2 * d.sigma2[ok]))
    piece2 = float(np.var(d.u[ok], ddof=1))
    value = (piece1 - piece2) / den**2
    var = VarianceEstimate(value, VarianceMethod.hoffman, int(ok.sum()),
                           Q - int(ok.sum()), (piece1, piece2))
    if not value > 0:
        raise NegativeVarianceError(
            f"negative variance estimate ({value:.3g}): the Hoffman-type pieces "
            "differ in the wrong direction; test result unavailable", value, (piece1, piece2))
    return var


def z_h_test(ds: ClusteredDataset, alpha: float = 0.05, Q: int = DEFAULT_HOFFMAN_RESAMPLES,
             rng=None) -> InferenceResult:
    parts = tilde_parts(ds)
    var = hoffman_variance(ds, Q, rng)
    return _build_result(EffectEstimate(parts.value, EstimatorMethod.p_tilde), var, alpha)


def z_hat_test(ds: ClusteredDataset, alpha: float = 0.05, Q: int = DEFAULT_HAT_RESAMPLES,
               rng=None) -> InferenceResult:
    """Test based on the Monte Carlo average of single-resample estimates.

    The variance is the mean two-sample variance of the resample estimates
    minus their spread across resamples.
    """
    if Q < 2:
        raise ValueError("Q must be at least 2")
    tilde_parts(ds)  # raises when no comparisons are possible
    d = _DrawStats(ds, Q, rng)
    nondeg = d.pairs > 0
    p_star = d.u[nondeg] / d.pairs[nondeg]
    est = EffectEstimate(float(p_star.mean()), EstimatorMethod.p_hat_mc,
                         int(nondeg.sum()), Q - int(nondeg.sum()), d.seed)
    ok = d.usable
    piece1 = float(np.mean(d.sigma2[ok]))
    piece2 = float(np.var(d.u[ok] / d.pairs[ok], ddof=1))
    var = VarianceEstimate(piece1 - piece2, VarianceMethod.mc_p_hat, int(ok.sum()),
                           Q - int(ok.sum()), (piece1, piece2))
    if not var.value > 0:
        raise NegativeVarianceError(
            f"negative variance estimate ({var.value:.3g}) for the resampling-average "
            "estimate; test result unavailable", var.value, (piece1, piece2))
    return _build_result(est, var, alpha)


def z_star_test(ds: ClusteredDataset, alpha: float = 0.05, rng=None,
                max_tries: int = DEFAULT_RETRIES) -> InferenceResult:
    """Naive test from a single resample with at least two picks per group."""
    gen, seed = as_generator(rng)
    tilde_parts(ds)
    for attempt in range(1, max_tries + 1):
        idx = draw_member_indices(ds, gen, 1)[0]
        draw = ResampleDraw(ds.values[idx], ds.groups[idx], idx)
        if draw.m1_star >= 2 and draw.m2_star >= 2:
            break
    else:
        raise DegenerateResampleError(
            f"no resample with two picks from each group in {max_tries} attempts")
    star = p_hat_star(draw)
    est = EffectEstimate(star.value, EstimatorMethod.p_hat_star, 1, attempt - 1, seed)
    return _build_result(est, bm_variance_single_draw(draw), alpha)


# ---------------------------------------------------------------------------
# dispatch by method name

METHODS = ("tilde", "tilde-t", "hat", "hat-star", "hoffman", "ignorable-u", "ignorable-w")
POINT_ONLY = ("ignorable-u", "ignorable-w")


def default_resamples(method: str) -> int:
    return DEFAULT_HOFFMAN_RESAMPLES if method == "hoffman" else DEFAULT_HAT_RESAMPLES


def run_method(ds: ClusteredDataset, method: str, alpha: float = 0.05,
               resamples: Optional[int] = None, rng=None):
    """Run one named procedure.

    Returns an :class:`InferenceResult`, or an :class:`EffectEstimate` for
    the point-only ignorable baselines.
    """
    from .estimators import p_ignorable

    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    if resamples is None:
        resamples = default_resamples(method)
    if method == "tilde":
        return z_tilde_test(ds, alpha)
    if method == "tilde-t":
        return t_tilde_test(ds, alpha)
    if method == "hat":
        return z_hat_test(ds, alpha, resamples, rng)
    if method == "hat-star":
        return z_star_test(ds, alpha, rng)
    if method == "hoffman":
        return z_h_test(ds, alpha, resamples, rng)
    return p_ignorable(ds, "unweighted" if method == "ignorable-u" else "weighted")
