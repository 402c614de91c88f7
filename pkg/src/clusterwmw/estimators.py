"""Point estimators of the WMW effect for clustered data.

The production estimator is :func:`p_tilde`, the ratio of the resampling
expectations of the Mann-Whitney count and of the number of between-group
pairs. :func:`p_hat_mc` averages single-resample estimates by Monte Carlo,
:func:`enumerate_resample_expectations` computes the resampling expectations
exactly for small data, and :func:`p_ignorable` gives the baseline that
ignores cluster size information.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Optional

import numpy as np
from scipy.stats import rankdata

from .dataset import ClusteredDataset
from .empirical import Weighting, group_handle, kernel_matrix, within_cluster_handle
from .errors import (DegenerateResampleError, EnumerationCapError,
                     InsufficientDrawsError, NoComparisonsError)

DEFAULT_MC_RESAMPLES = 10_000
DEFAULT_ENUMERATION_CAP = 10**6
_CHUNK = 4096


class EstimatorMethod(str, Enum):
    p_tilde = "p_tilde"
    p_hat_mc = "p_hat_mc"
    p_hat_star = "p_hat_star"
    ignorable_unweighted = "ignorable_unweighted"
    ignorable_weighted = "ignorable_weighted"


@dataclass(frozen=True)
class EffectEstimate:
    value: float
    method: EstimatorMethod
    resamples_used: int = 0
    resamples_discarded: int = 0
    seed: Optional[int] = None
    mc_standard_error: Optional[float] = None

    def __float__(self):
        return float(self.value)


@dataclass(frozen=True)
class ResampleDraw:
    """One member picked from every cluster."""

    values: np.ndarray
    groups: np.ndarray
    members: np.ndarray  # flat observation index of each pick

    @property
    def m1_star(self) -> int:
        return int(np.count_nonzero(self.groups == 1))

    @property
    def m2_star(self) -> int:
        return int(np.count_nonzero(self.groups == 2))

    @classmethod
    def from_values(cls, values, groups) -> "ResampleDraw":
        values = np.asarray(values, dtype=float)
        groups = np.asarray(groups, dtype=np.int8)
        return cls(values, groups, np.arange(values.size))


def as_generator(rng) -> tuple:
    """Return ``(generator, seed_or_None)`` for a seed, Generator or None."""
    if isinstance(rng, np.random.Generator):
        return rng, None
    if rng is None:
        return np.random.default_rng(), None
    seed = int(rng)
    return np.random.default_rng(seed), seed


# ---------------------------------------------------------------------------
# within-cluster resampling

def draw_member_indices(ds: ClusteredDataset, rng: np.random.Generator, size: int) -> np.ndarray:
    """Flat observation indices of ``size`` independent resamples, shape (size, n)."""
    u = rng.random((size, ds.n))
    pick = np.minimum((u * ds.m).astype(np.intp), ds.m - 1)
    return ds.offsets + pick


def draw_resample(ds: ClusteredDataset, rng) -> ResampleDraw:
    gen, _ = as_generator(rng)
    idx = draw_member_indices(ds, gen, 1)[0]
    return ResampleDraw(ds.values[idx], ds.groups[idx], idx)


def midranks(values) -> np.ndarray:
    """Midranks (average ranks for ties), starting at 1."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("midranks of an empty list")
    return rankdata(values, method="average")


class BatchU(NamedTuple):
    u: np.ndarray
    m1: np.ndarray
    m2: np.ndarray
    ranks: np.ndarray


def batch_mann_whitney(values: np.ndarray, is_g2: np.ndarray) -> BatchU:
    """Mann-Whitney counts for a stack of pooled samples (one per row)."""
    ranks = rankdata(values, method="average", axis=1)
    m2 = is_g2.sum(axis=1)
    m1 = is_g2.shape[1] - m2
    u = (ranks * is_g2).sum(axis=1) - m2 * (m2 + 1) / 2.0
    return BatchU(u, m1, m2, ranks)


def u_star(draw: ResampleDraw) -> float:
    is_g2 = draw.groups == 2
    r = midranks(draw.values)
    m2 = int(is_g2.sum())
    return float(r[is_g2].sum() - m2 * (m2 + 1) / 2.0)


def p_hat_star(draw: ResampleDraw) -> EffectEstimate:
    """Two-sample WMW estimate ``U* / (m1* m2*)`` on one resample."""
    m1, m2 = draw.m1_star, draw.m2_star
    if m1 == 0 or m2 == 0:
        raise DegenerateResampleError("degenerate resample: only one group was drawn")
    return EffectEstimate(u_star(draw) / (m1 * m2), EstimatorMethod.p_hat_star, 1, 0)


# ---------------------------------------------------------------------------
# closed form

def e_m1m2(ds: ClusteredDataset) -> float:
    """Expected number of between-group pairs in a resample."""
    a = ds.alpha
    return float(a.sum() * (1 - a).sum() - np.sum(a * (1 - a)))


def _weighted_g2_sum(ds: ClusteredDataset) -> float:
    """sum_i sum_{j != i} sum_k (alpha_i / m_j) F2i(X_jk), evaluated per cluster."""
    total = 0.0
    w = 1.0 / ds.m[ds.cluster_index]
    for i, c in enumerate(ds.clusters):
        if c.m2 == 0:
            continue  # alpha_i = 0 term
        other = ds.cluster_index != i
        f2i = within_cluster_handle(c, 2)(ds.values[other])
        total += c.alpha * float(np.sum(w[other] * f2i))
    return total


def e_u_star(ds: ClusteredDataset) -> float:
    """Resampling expectation of the Mann-Whitney count, term by term."""
    a = ds.alpha
    sa = a.sum()
    return float(ds.n * sa - _weighted_g2_sum(ds)
                 - 0.5 * (np.sum(a * (1 - a)) + sa**2 + sa))


class TildeParts(NamedTuple):
    value: float
    denominator: float
    cross_kernel: np.ndarray  # K[a, b] = h(x_a, x_b), zero within clusters
    obs_weight: np.ndarray  # 1 / m of each observation's cluster


def tilde_parts(ds: ClusteredDataset) -> TildeParts:
    den = e_m1m2(ds)
    if den <= 0:
        raise NoComparisonsError("no comparisons possible: expected pair count is zero")
    K = kernel_matrix(ds.values, ds.values)
    K[ds.cluster_index[:, None] == ds.cluster_index[None, :]] = 0.0
    w = 1.0 / ds.m[ds.cluster_index]
    g2 = ds.groups == 2
    s = float((w[g2] @ K[g2]) @ w)
    value = 0.5 + ((ds.n - 1) / 2.0 * ds.alpha.sum() - s) / den
    return TildeParts(float(min(max(value, 0.0), 1.0)), den, K, w)


def p_tilde(ds: ClusteredDataset) -> EffectEstimate:
    """Closed-form WMW effect estimate accounting for cluster size."""
    return EffectEstimate(tilde_parts(ds).value, EstimatorMethod.p_tilde)


def p_tilde_altform(ds: ClusteredDataset) -> float:
    """Same estimator as a weighted sum over cross-cluster group pairs."""
    den = e_m1m2(ds)
    if den <= 0:
        raise NoComparisonsError("no comparisons possible: expected pair count is zero")
    total = 0.0
    for i in ds.R1:
        ci = ds.clusters[i]
        x1 = np.asarray(ci.values_g1)
        for j in ds.R2:
            if i == j:
                continue
            cj = ds.clusters[j]
            total += (1 - ci.alpha) * cj.alpha * kernel_matrix(x1, cj.values_g2).mean()
    return total / den


# ---------------------------------------------------------------------------
# Monte Carlo average over resamples

def p_hat_mc(ds: ClusteredDataset, Q: int = DEFAULT_MC_RESAMPLES, rng=None) -> EffectEstimate:
    """Average of single-resample estimates over ``Q`` random resamples.

    Resamples that contain one group only are discarded and counted.
    """
    if Q < 1:
        raise ValueError("Q must be at least 1")
    gen, seed = as_generator(rng)
    total, total_sq, used = 0.0, 0.0, 0
    for start in range(0, Q, _CHUNK):
        size = min(_CHUNK, Q - start)
        idx = draw_member_indices(ds, gen, size)
        b = batch_mann_whitney(ds.values[idx], ds.groups[idx] == 2)
        ok = (b.m1 > 0) & (b.m2 > 0)
        p = b.u[ok] / (b.m1[ok] * b.m2[ok])
        total += float(p.sum())
        total_sq += float(np.sum(p * p))
        used += int(ok.sum())
    if used == 0:
        raise InsufficientDrawsError(f"all {Q} resamples were degenerate")
    mean = total / used
    se = None
    if used > 1:
        var = max(total_sq - used * mean * mean, 0.0) / (used - 1)
        se = float(np.sqrt(var / used))
    return EffectEstimate(mean, EstimatorMethod.p_hat_mc, used, Q - used, seed, se)


# ---------------------------------------------------------------------------
# exact enumeration

@dataclass(frozen=True)
class ResampleExpectations:
    e_u: float
    e_m1m2: float
    e_p_hat_star: float  # conditional on a non-degenerate resample; nan if none
    nondegenerate_mass: float
    n_tuples: int

    @property
    def ratio(self) -> float:
        return self.e_u / self.e_m1m2


def enumerate_resample_expectations(ds: ClusteredDataset,
                                    cap: int = DEFAULT_ENUMERATION_CAP) -> ResampleExpectations:
    """Exact resampling expectations by visiting every resample once."""
    sizes = [int(s) for s in ds.m]
    total = int(np.prod(sizes, dtype=object))
    if total > cap:
        raise EnumerationCapError(f"{total} resamples exceed the cap of {cap}")
    tuples = itertools.product(*(range(s) for s in sizes))
    su = sm = sp = 0.0
    good = 0
    while True:
        block = np.array(list(itertools.islice(tuples, _CHUNK)), dtype=np.intp)
        if block.size == 0:
            break
        idx = ds.offsets + block.reshape(-1, ds.n)
        b = batch_mann_whitney(ds.values[idx], ds.groups[idx] == 2)
        pairs = b.m1 * b.m2
        ok = pairs > 0
        su += float(b.u.sum())
        sm += float(pairs.sum())
        sp += float(np.sum(b.u[ok] / pairs[ok]))
        good += int(ok.sum())
    return ResampleExpectations(su / total, sm / total,
                                sp / good if good else float("nan"),
                                good / total, total)


# ---------------------------------------------------------------------------
# baseline for ignorable cluster size

def p_ignorable(ds: ClusteredDataset, weighting="unweighted") -> EffectEstimate:
    """Integral of the group-1 ECDF against the group-2 ECDF.

    Every cross-group pair counts, including pairs inside one cluster.
    """
    weighting = Weighting(weighting)
    g1 = group_handle(ds, 1, weighting)
    g2 = group_handle(ds, 2, weighting)
    value = float(g1.weights @ kernel_matrix(g1.support, g2.support) @ g2.weights)
    method = (EstimatorMethod.ignorable_weighted if weighting is Weighting.weighted
              else EstimatorMethod.ignorable_unweighted)
    return EffectEstimate(value, method)
