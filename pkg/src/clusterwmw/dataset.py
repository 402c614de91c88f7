"""Clustered two-group data: observations, clusters and derived index sets.

Groups are labelled 1 and 2. A cluster may hold members of one group only
(incomplete) or of both (complete). All index sets are membership based, so
clusters can be stored in any order.
"""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Hashable, Iterable

import numpy as np

from .errors import DataError

GROUPS = (1, 2)


@dataclass(frozen=True)
class Observation:
    cluster_id: Hashable
    group: int
    value: float


@dataclass(frozen=True)
class Cluster:
    """Members of one cluster, split by group.

    ``alpha`` is the share of group-2 members, ``m2 / m``.
    """

    id: Hashable
    values_g1: tuple = ()
    values_g2: tuple = ()

    def __post_init__(self):
        g1 = tuple(float(v) for v in self.values_g1)
        g2 = tuple(float(v) for v in self.values_g2)
        if not all(math.isfinite(v) for v in g1 + g2):
            raise DataError(f"cluster {self.id!r}: non-finite value")
        if not g1 and not g2:
            raise DataError(f"cluster {self.id!r} is empty")
        object.__setattr__(self, "values_g1", g1)
        object.__setattr__(self, "values_g2", g2)

    @property
    def m1(self) -> int:
        return len(self.values_g1)

    @property
    def m2(self) -> int:
        return len(self.values_g2)

    @property
    def m(self) -> int:
        return self.m1 + self.m2

    @property
    def alpha(self) -> float:
        return self.m2 / self.m

    @property
    def values(self) -> tuple:
        """All members, group 1 first."""
        return self.values_g1 + self.values_g2

    @property
    def groups(self) -> tuple:
        return (1,) * self.m1 + (2,) * self.m2

    def group_values(self, group: int) -> tuple:
        if group == 1:
            return self.values_g1
        if group == 2:
            return self.values_g2
        raise DataError(f"group must be 1 or 2, got {group!r}")

    def canonical(self):
        return (str(self.id), tuple(sorted(self.values_g1)), tuple(sorted(self.values_g2)))


@dataclass(frozen=True, eq=False)
class ClusteredDataset:
    """Immutable clustered two-group dataset.

    Besides the cluster list, flat arrays over all observations are exposed
    (``values``, ``groups``, ``cluster_index``) with members of each cluster
    stored contiguously, group 1 first. Per-cluster arrays ``m``, ``m1``,
    ``m2`` and ``alpha`` follow cluster order.
    """

    clusters: tuple
    n: int = field(init=False)
    n1: int = field(init=False)
    n2: int = field(init=False)
    nc: int = field(init=False)
    N1: int = field(init=False)
    N2: int = field(init=False)

    def __post_init__(self):
        clusters = tuple(self.clusters)
        if not clusters:
            raise DataError("dataset has no clusters")
        ids = [c.id for c in clusters]
        dup = [k for k, v in Counter(ids).items() if v > 1]
        if dup:
            raise DataError(f"duplicate cluster ids: {dup[:5]}")
        setattr_ = object.__setattr__
        setattr_(self, "clusters", clusters)

        m1 = np.array([c.m1 for c in clusters], dtype=np.intp)
        m2 = np.array([c.m2 for c in clusters], dtype=np.intp)
        m = m1 + m2
        values = np.array([v for c in clusters for v in c.values], dtype=float)
        groups = np.array([g for c in clusters for g in c.groups], dtype=np.int8)
        cluster_index = np.repeat(np.arange(len(clusters)), m)
        offsets = np.concatenate(([0], np.cumsum(m)[:-1])).astype(np.intp)
        arrays = dict(
            m=m, m1=m1, m2=m2, alpha=m2 / m, values=values, groups=groups,
            cluster_index=cluster_index, offsets=offsets,
            in_r1=m1 > 0, in_r2=m2 > 0,
        )
        for name, arr in arrays.items():
            arr.setflags(write=False)
            setattr_(self, name, arr)

        setattr_(self, "n", len(clusters))
        setattr_(self, "n1", int(np.sum(m2 == 0)))
        setattr_(self, "n2", int(np.sum(m1 == 0)))
        setattr_(self, "nc", int(np.sum((m1 > 0) & (m2 > 0))))
        setattr_(self, "N1", int(m1.sum()))
        setattr_(self, "N2", int(m2.sum()))

    # index sets
    @property
    def R1(self) -> np.ndarray:
        """Indices of clusters with at least one group-1 member."""
        return np.flatnonzero(self.in_r1)

    @property
    def R2(self) -> np.ndarray:
        """Indices of clusters with at least one group-2 member."""
        return np.flatnonzero(self.in_r2)

    @property
    def kind(self) -> np.ndarray:
        """Per-cluster partition label: 1, 2 (incomplete) or 0 (complete)."""
        k = np.zeros(self.n, dtype=np.int8)
        k[self.m2 == 0] = 1
        k[self.m1 == 0] = 2
        return k

    @property
    def ids(self) -> list:
        return [c.id for c in self.clusters]

    def canonical(self):
        return tuple(sorted(c.canonical() for c in self.clusters))

    def __eq__(self, other):
        if not isinstance(other, ClusteredDataset):
            return NotImplemented
        return self.canonical() == other.canonical()

    def __hash__(self):
        return hash(self.canonical())

    def __repr__(self):
        return (f"ClusteredDataset(n={self.n}, n1={self.n1}, n2={self.n2}, "
                f"nc={self.nc}, N1={self.N1}, N2={self.N2})")

    # constructors and transforms
    @classmethod
    def from_arrays(cls, cluster_ids, groups, values) -> "ClusteredDataset":
        rows = [Observation(c, g, v) for c, g, v in zip(cluster_ids, groups, values)]
        if not (len(rows) == len(cluster_ids) == len(groups) == len(values)):
            raise DataError("cluster_ids, groups and values differ in length")
        return ingest(rows)

    def to_rows(self) -> list:
        return [Observation(c.id, g, v)
                for c in self.clusters for g, v in zip(c.groups, c.values)]

    def map_values(self, func: Callable[[np.ndarray], np.ndarray]) -> "ClusteredDataset":
        """Apply ``func`` elementwise to all values, keeping member positions."""
        out = []
        for c in self.clusters:
            g1 = np.asarray(func(np.asarray(c.values_g1, dtype=float)), dtype=float)
            g2 = np.asarray(func(np.asarray(c.values_g2, dtype=float)), dtype=float)
            out.append(Cluster(c.id, tuple(g1.tolist()), tuple(g2.tolist())))
        return ClusteredDataset(tuple(out))

    def swap_groups(self) -> "ClusteredDataset":
        """Relabel group 1 as group 2 and vice versa."""
        return ClusteredDataset(tuple(Cluster(c.id, c.values_g2, c.values_g1)
                                      for c in self.clusters))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["cluster", "group", "value"])
        for row in self.to_rows():
            writer.writerow([row.cluster_id, row.group, repr(float(row.value))])
        return buf.getvalue()

    def write_csv(self, path) -> None:
        Path(path).write_text(self.to_csv(), encoding="utf-8")


def _parse_group(token) -> int:
    if isinstance(token, (int, np.integer)) and not isinstance(token, bool):
        g = int(token)
    elif isinstance(token, float) and token.is_integer():
        g = int(token)
    elif isinstance(token, str) and token.strip() in ("1", "2"):
        g = int(token.strip())
    else:
        raise DataError(f"group must be 1 or 2, got {token!r}")
    if g not in GROUPS:
        raise DataError(f"group must be 1 or 2, got {token!r}")
    return g


def ingest(rows: Iterable[Observation]) -> ClusteredDataset:
    """Group observations into clusters and validate the result.

    Clusters keep the order of first appearance; members keep input order
    within their group. Raises :class:`DataError` on empty input, non-finite
    values, bad group tokens, or when either group has no observations.
    """
    rows = list(rows)
    if not rows:
        raise DataError("no observations")
    members: dict = {}
    for row in rows:
        if not isinstance(row, Observation):
            row = Observation(*row)
        g = _parse_group(row.group)
        try:
            v = float(row.value)
        except (TypeError, ValueError):
            raise DataError(f"value {row.value!r} is not a number") from None
        if not math.isfinite(v):
            raise DataError(f"non-finite value {row.value!r} in cluster {row.cluster_id!r}")
        g1, g2 = members.setdefault(row.cluster_id, ([], []))
        (g1 if g == 1 else g2).append(v)
    ds = ClusteredDataset(tuple(Cluster(cid, tuple(a), tuple(b))
                                for cid, (a, b) in members.items()))
    if ds.N1 == 0 or ds.N2 == 0:
        missing = 1 if ds.N1 == 0 else 2
        raise DataError(f"group {missing} has no observations (N{missing} = 0)")
    return ds


def parse_csv(text: str) -> ClusteredDataset:
    """Parse ``cluster,group,value`` CSV text; ``#`` lines are comments."""
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise DataError("empty CSV input")
    reader = csv.reader(lines)
    header = [h.strip().lower() for h in next(reader)]
    if header != ["cluster", "group", "value"]:
        raise DataError(f"expected header 'cluster,group,value', got {','.join(header)!r}")
    rows = []
    for lineno, rec in enumerate(reader, start=2):
        if len(rec) != 3:
            raise DataError(f"line {lineno}: expected 3 fields, got {len(rec)}")
        cid, g, v = (f.strip() for f in rec)
        try:
            value = float(v)
        except ValueError:
            raise DataError(f"line {lineno}: value {v!r} is not a number") from None
        rows.append(Observation(cid, _parse_group(g), value))
    return ingest(rows)


def read_csv(path) -> ClusteredDataset:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    return parse_csv(text)


@dataclass(frozen=True)
class DatasetSummary:
    n: int
    n1: int
    n2: int
    nc: int
    N1: int
    N2: int
    cluster_sizes: dict  # size -> number of clusters

    def as_dict(self) -> dict:
        return {"n": self.n, "n1": self.n1, "n2": self.n2, "nc": self.nc,
                "N1": self.N1, "N2": self.N2,
                "cluster_sizes": {str(k): v for k, v in self.cluster_sizes.items()}}


def summary(ds: ClusteredDataset) -> DatasetSummary:
    sizes = Counter(int(s) for s in ds.m)
    return DatasetSummary(ds.n, ds.n1, ds.n2, ds.nc, ds.N1, ds.N2, dict(sorted(sizes.items())))

