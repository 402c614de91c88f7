"""Tie-aware comparison kernel and normalized empirical distribution functions.

Every distribution function here is the *normalized* version, the average of
the left- and right-continuous step functions, so a tie contributes one half.
Ties are exact floating-point equality.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .dataset import Cluster, ClusteredDataset
from .errors import DataError


def kernel_h(x, y):
    """Return 1 if x < y, 1/2 if x == y and 0 if x > y (broadcasts)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = 0.5 * ((x < y).astype(float) + (x <= y))
    return float(out) if out.ndim == 0 else out


def kernel_matrix(x, y) -> np.ndarray:
    """Matrix ``K[a, b] = kernel_h(x[a], y[b])``."""
    x = np.asarray(x, dtype=float)[:, None]
    y = np.asarray(y, dtype=float)[None, :]
    return 0.5 * ((x < y).astype(float) + (x <= y))


class EcdfKind(str, Enum):
    within_cluster_g1 = "within_cluster_g1"
    within_cluster_g2 = "within_cluster_g2"
    whole_cluster = "whole_cluster"
    group_unweighted = "group_unweighted"
    group_weighted = "group_weighted"


class Weighting(str, Enum):
    unweighted = "unweighted"
    weighted = "weighted"


@dataclass(frozen=True)
class EcdfHandle:
    """A normalized ECDF stored as support points with probability weights."""

    support: np.ndarray
    weights: np.ndarray
    kind: EcdfKind

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        vals = self.weights @ kernel_matrix(self.support, np.atleast_1d(x))
        return float(vals[0]) if x.ndim == 0 else vals


def _uniform(values, kind) -> EcdfHandle:
    v = np.asarray(values, dtype=float)
    return EcdfHandle(v, np.full(v.size, 1.0 / v.size), kind)


def within_cluster_handle(c: Cluster, group: int) -> EcdfHandle:
    vals = c.group_values(group)
    if not vals:
        raise DataError(f"cluster {c.id!r} has no group-{group} members")
    kind = EcdfKind.within_cluster_g1 if group == 1 else EcdfKind.within_cluster_g2
    return _uniform(vals, kind)


def whole_cluster_handle(c: Cluster) -> EcdfHandle:
    return _uniform(c.values, EcdfKind.whole_cluster)


def group_handle(ds: ClusteredDataset, group: int, weighting="unweighted") -> EcdfHandle:
    """Group-level ECDF.

    ``unweighted`` averages the within-cluster ECDFs of the clusters holding
    the group, so every cluster counts once; ``weighted`` pools observations.
    """
    weighting = Weighting(weighting)
    mask = ds.groups == group
    if not mask.any():
        raise DataError(f"group {group} has no observations")
    support = ds.values[mask]
    if weighting is Weighting.weighted:
        return EcdfHandle(support, np.full(support.size, 1.0 / support.size),
                          EcdfKind.group_weighted)
    per_cluster = (ds.m1 if group == 1 else ds.m2)[ds.cluster_index[mask]]
    n_clusters = np.count_nonzero(ds.in_r1 if group == 1 else ds.in_r2)
    return EcdfHandle(support, 1.0 / (per_cluster * n_clusters), EcdfKind.group_unweighted)


def within_cluster_ecdf(c: Cluster, group: int, x):
    return within_cluster_handle(c, group)(x)


def whole_cluster_ecdf(c: Cluster, x):
    return whole_cluster_handle(c)(x)


def group_ecdf(ds: ClusteredDataset, group: int, weighting, x):
    return group_handle(ds, group, weighting)(x)
