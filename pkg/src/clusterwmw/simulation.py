"""Data generators, theoretical effects and the simulation runner.

Two designs are provided. The ignorable design draws intra-cluster group
sizes as ``1 + Binomial(nu, 0.3)`` and gives both groups mean zero. The
informative design picks a size label ``s`` from ``{c1, c2}`` per cluster
and makes the group means depend on it, so that cluster-weighted and
observation-weighted effects differ.

Replicate ``r`` of an experiment uses ``SeedSequence(master_seed,
spawn_key=(r, k))`` with ``k = 0`` for the data and ``k = 1 + catalog index``
for the resampling stream of each method, so results do not depend on the
number of workers or on which other methods are run.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from .dataset import Cluster, ClusteredDataset
from .errors import (DegenerateResampleError, DegenerateVarianceError, NegativeVarianceError,
                     NoComparisonsError, NotPositiveDefiniteError)
from .estimators import EffectEstimate
from .inference import METHODS, InferenceResult, run_method, z_tilde_test

BINOMIAL_PROB = 0.3


class IcgLaw(str, Enum):
    binomial2 = "binomial2"  # 1 + Binomial(2, 0.3)
    binomial9 = "binomial9"  # 1 + Binomial(9, 0.3)
    fixed = "fixed"  # size label drawn from {c1, c2}

    @property
    def nu(self) -> int:
        return {"binomial2": 2, "binomial9": 9}[self.value]


class Distribution(str, Enum):
    gaussian = "gaussian"
    cauchy = "cauchy"


@dataclass(frozen=True)
class CovarianceSpec:
    sigma1_sq: float = 1.0
    sigma2_sq: float = 1.0
    rho1: float = 0.0
    rho2: float = 0.0
    rho12: float = 0.0

    def __post_init__(self):
        if not (self.sigma1_sq > 0 and self.sigma2_sq > 0):
            raise ValueError("group variances must be positive")


def build_sigma(spec: CovarianceSpec, m1: int, m2: int, psd_repair: bool = False) -> np.ndarray:
    """Block covariance (scale) matrix of one cluster, group 1 first.

    Raises :class:`NotPositiveDefiniteError` when the matrix is not positive
    definite. With ``psd_repair`` the matrix is returned unchanged instead
    and :func:`sigma_factor` clips its negative eigenvalues.
    """
    if m1 < 0 or m2 < 0 or m1 + m2 < 1:
        raise ValueError("need m1 + m2 >= 1")
    s1, s2 = math.sqrt(spec.sigma1_sq), math.sqrt(spec.sigma2_sq)
    m = m1 + m2
    sig = np.empty((m, m))
    sig[:m1, :m1] = spec.rho1 * spec.sigma1_sq
    sig[m1:, m1:] = spec.rho2 * spec.sigma2_sq
    sig[:m1, m1:] = spec.rho12 * s1 * s2
    sig[m1:, :m1] = spec.rho12 * s1 * s2
    sig[np.arange(m), np.arange(m)] += np.r_[np.full(m1, spec.sigma1_sq),
                                             np.full(m2, spec.sigma2_sq)]
    if not psd_repair:
        try:
            np.linalg.cholesky(sig)
        except np.linalg.LinAlgError:
            lam = float(np.linalg.eigvalsh(sig)[0])
            raise NotPositiveDefiniteError(
                f"covariance for (m1={m1}, m2={m2}) is not positive definite "
                f"(smallest eigenvalue {lam:.3g})") from None
    return sig


def sigma_factor(sig: np.ndarray, psd_repair: bool = False) -> np.ndarray:
    """Matrix ``L`` with ``L @ L.T`` equal to ``sig`` (clipped to PSD if asked)."""
    try:
        return np.linalg.cholesky(sig)
    except np.linalg.LinAlgError:
        if not psd_repair:
            raise NotPositiveDefiniteError("covariance is not positive definite") from None
    lam, vec = np.linalg.eigh(sig)
    return vec * np.sqrt(np.clip(lam, 0.0, None))


def _draw_block(factor: np.ndarray, loc: np.ndarray, distribution, rng, size: int) -> np.ndarray:
    z = rng.standard_normal((size, factor.shape[0])) @ factor.T
    if Distribution(distribution) is Distribution.cauchy:
        z /= np.sqrt(rng.chisquare(1.0, size))[:, None]
    return loc + z


def sample_cluster(spec: CovarianceSpec, m1: int, m2: int, mean_g1: float, mean_g2: float,
                   distribution, rng, cluster_id=0, psd_repair: bool = False) -> Cluster:
    """One multivariate normal or Cauchy cluster (Cauchy = t with one df)."""
    factor = sigma_factor(build_sigma(spec, m1, m2, psd_repair), psd_repair)
    loc = np.r_[np.full(m1, mean_g1), np.full(m2, mean_g2)]
    x = _draw_block(factor, loc, distribution, rng, 1)[0]
    return Cluster(cluster_id, tuple(x[:m1].tolist()), tuple(x[m1:].tolist()))


# ---------------------------------------------------------------------------
# scenarios

_CONFIG_KEYS = ("n1", "n2", "nc", "icg_law", "distribution", "sigma1_sq", "sigma2_sq",
                "rho1", "rho2", "rho12", "c1", "c2", "alpha_level", "seed", "psd_repair")


@dataclass(frozen=True)
class ScenarioConfig:
    n1: int
    n2: int
    nc: int
    icg_law: IcgLaw = IcgLaw.binomial2
    distribution: Distribution = Distribution.gaussian
    covariance: CovarianceSpec = field(default_factory=CovarianceSpec)
    ics: Optional[tuple] = None  # (c1, c2)
    alpha_level: float = 0.05
    seed: int = 20240101
    psd_repair: bool = False

    def __post_init__(self):
        object.__setattr__(self, "icg_law", IcgLaw(self.icg_law))
        object.__setattr__(self, "distribution", Distribution(self.distribution))
        if min(self.n1, self.n2, self.nc) < 0 or self.n1 + self.n2 + self.nc < 2:
            raise ValueError("cluster counts must be nonnegative with n1 + n2 + nc >= 2")
        if self.ics is not None:
            c1, c2 = (int(c) for c in self.ics)
            if c1 < 1 or c2 < 1:
                raise ValueError("c1 and c2 must be positive integers")
            object.__setattr__(self, "ics", (c1, c2))
        if (self.ics is not None) != (self.icg_law is IcgLaw.fixed):
            raise ValueError("icg_law 'fixed' goes together with c1 and c2")
        if not 0 < self.alpha_level < 1:
            raise ValueError("alpha_level must lie in (0, 1)")

    def check_covariance(self) -> None:
        """Verify positive definiteness for every cluster shape the design can produce."""
        if self.psd_repair:
            return
        if self.ics is not None:
            sizes = sorted(set(self.ics))
        else:
            sizes = range(1, self.icg_law.nu + 2)
        shapes = set()
        if self.n1:
            shapes.update((s, 0) for s in sizes)
        if self.n2:
            shapes.update((0, s) for s in sizes)
        if self.nc:
            if self.ics is not None:
                shapes.update((s, s) for s in sizes)
            else:
                shapes.update((a, b) for a in sizes for b in sizes)
        for m1, m2 in sorted(shapes):
            build_sigma(self.covariance, m1, m2)

    def to_text(self) -> str:
        d = {"n1": self.n1, "n2": self.n2, "nc": self.nc, "icg_law": self.icg_law.value,
             "distribution": self.distribution.value, **asdict(self.covariance)}
        if self.ics is not None:
            d["c1"], d["c2"] = self.ics
        d["alpha_level"] = self.alpha_level
        d["seed"] = self.seed
        if self.psd_repair:
            d["psd_repair"] = "true"
        return "".join(f"{k} = {v}\n" for k, v in d.items())

    @classmethod
    def from_text(cls, text: str) -> "ScenarioConfig":
        raw = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"line {lineno}: expected 'key = value'")
            key, value = (t.strip() for t in line.split("=", 1))
            if key not in _CONFIG_KEYS:
                raise ValueError(f"line {lineno}: unknown key {key!r}")
            if key in raw:
                raise ValueError(f"line {lineno}: duplicate key {key!r}")
            raw[key] = value
        missing = [k for k in ("n1", "n2", "nc") if k not in raw]
        if missing:
            raise ValueError(f"missing keys: {', '.join(missing)}")
        if ("c1" in raw) != ("c2" in raw):
            raise ValueError("c1 and c2 must be given together")
        try:
            cov = CovarianceSpec(**{k: float(raw[k]) for k in
                                    ("sigma1_sq", "sigma2_sq", "rho1", "rho2", "rho12")
                                    if k in raw})
            ics = (int(raw["c1"]), int(raw["c2"])) if "c1" in raw else None
            kwargs = dict(n1=int(raw["n1"]), n2=int(raw["n2"]), nc=int(raw["nc"]),
                          covariance=cov, ics=ics)
            kwargs["icg_law"] = raw.get("icg_law", "fixed" if ics else "binomial2")
            if "distribution" in raw:
                kwargs["distribution"] = raw["distribution"]
            if "alpha_level" in raw:
                kwargs["alpha_level"] = float(raw["alpha_level"])
            if "seed" in raw:
                kwargs["seed"] = int(raw["seed"])
            if "psd_repair" in raw:
                flag = raw["psd_repair"].lower()
                if flag not in ("true", "false", "1", "0"):
                    raise ValueError(f"psd_repair must be true or false, got {flag!r}")
                kwargs["psd_repair"] = flag in ("true", "1")
            return cls(**kwargs)
        except (TypeError, KeyError) as exc:
            raise ValueError(str(exc)) from None

    @classmethod
    def read(cls, path) -> "ScenarioConfig":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))


def _assemble(cfg: ScenarioConfig, shapes: list, rng) -> ClusteredDataset:
    """Draw clusters given ``(m1, m2, mean1, mean2)`` per cluster, batched by shape."""
    out = [None] * len(shapes)
    by_shape: dict = {}
    for i, key in enumerate(shapes):
        by_shape.setdefault(key, []).append(i)
    for key in sorted(by_shape):
        m1, m2, mu1, mu2 = key
        idx = by_shape[key]
        factor = sigma_factor(build_sigma(cfg.covariance, m1, m2, cfg.psd_repair), cfg.psd_repair)
        loc = np.r_[np.full(m1, mu1), np.full(m2, mu2)]
        x = _draw_block(factor, loc, cfg.distribution, rng, len(idx))
        for i, row in zip(idx, x):
            out[i] = Cluster(i, tuple(row[:m1].tolist()), tuple(row[m1:].tolist()))
    return ClusteredDataset(tuple(out))


def gen_ignorable_dataset(cfg: ScenarioConfig, rng) -> ClusteredDataset:
    """Clusters in the order: group-1 only, group-2 only, complete."""
    if cfg.ics is not None:
        raise ValueError("gen_ignorable_dataset needs a binomial size law")
    rng = np.random.default_rng(rng)
    nu = cfg.icg_law.nu
    s1 = 1 + rng.binomial(nu, BINOMIAL_PROB, cfg.n1 + cfg.nc)
    s2 = 1 + rng.binomial(nu, BINOMIAL_PROB, cfg.n2 + cfg.nc)
    shapes = ([(int(a), 0, 0.0, 0.0) for a in s1[:cfg.n1]]
              + [(0, int(b), 0.0, 0.0) for b in s2[:cfg.n2]]
              + [(int(a), int(b), 0.0, 0.0) for a, b in zip(s1[cfg.n1:], s2[cfg.n2:])])
    return _assemble(cfg, shapes, rng)


def ics_means(c1: int, c2: int, first_label: bool) -> tuple:
    """Group means of a cluster whose size label is ``c1`` (first) or ``c2``."""
    return (-float(c2), float(c2)) if first_label else (float(c1), -float(c1))


def gen_ics_dataset(cfg: ScenarioConfig, rng) -> ClusteredDataset:
    """Informative cluster size: the size label shifts both group means.

    The label is a fair coin between the first and second entry of
    ``(c1, c2)``, so ``c1 == c2`` gives a design where size carries no
    information but the two mean configurations still mix.
    """
    if cfg.ics is None:
        raise ValueError("gen_ics_dataset needs (c1, c2)")
    rng = np.random.default_rng(rng)
    c1, c2 = cfg.ics
    first = rng.random(cfg.n1 + cfg.n2 + cfg.nc) < 0.5
    shapes = []
    for i, is_first in enumerate(first.tolist()):
        s = c1 if is_first else c2
        mu1, mu2 = ics_means(c1, c2, is_first)
        if i < cfg.n1:
            shapes.append((s, 0, mu1, 0.0))
        elif i < cfg.n1 + cfg.n2:
            shapes.append((0, s, 0.0, mu2))
        else:
            shapes.append((s, s, mu1, mu2))
    return _assemble(cfg, shapes, rng)


def generate_dataset(cfg: ScenarioConfig, rng) -> ClusteredDataset:
    return gen_ics_dataset(cfg, rng) if cfg.ics is not None else gen_ignorable_dataset(cfg, rng)


# ---------------------------------------------------------------------------
# theoretical effects

def _diff_cdf(d, distribution) -> float:
    """P(Y - X < d) for independent standard X, Y (no ties in the continuum)."""
    if Distribution(distribution) is Distribution.cauchy:
        return float(stats.cauchy.cdf(d / 2.0))
    return float(stats.norm.cdf(d / math.sqrt(2.0)))


def _check_c(c1, c2):
    if int(c1) != c1 or int(c2) != c2 or c1 < 1 or c2 < 1:
        raise ValueError("c1 and c2 must be positive integers")


def theoretical_p(c1: int, c2: int, distribution="gaussian") -> float:
    """Cluster-weighted effect: both size labels weigh one half."""
    _check_c(c1, c2)
    h = lambda d: _diff_cdf(d, distribution)
    return 0.5 * h(c2 - c1) + 0.25 * h(2.0 * c2) + 0.25 * h(-2.0 * c1)


def theoretical_p0(c1: int, c2: int, distribution="gaussian", form: str = "corrected") -> float:
    """Observation-weighted effect: size labels weigh in proportion to size.

    ``form="printed"`` evaluates the variant with arguments ``c/sqrt(2)``
    in the outer terms; it does not reproduce the reference table and is
    kept for comparison only.
    """
    _check_c(c1, c2)
    tot = c1 + c2
    w_mix = 2.0 * c1 * c2 / tot**2
    w1, w2 = (c1 / tot) ** 2, (c2 / tot) ** 2
    if form == "corrected":
        h = lambda d: _diff_cdf(d, distribution)
        return w_mix * h(c2 - c1) + w1 * h(2.0 * c2) + w2 * h(-2.0 * c1)
    if form == "printed":
        if Distribution(distribution) is not Distribution.gaussian:
            raise ValueError("the printed form is only defined for the Gaussian case")
        phi = stats.norm.cdf
        return float(w_mix * phi((c2 - c1) / math.sqrt(2)) + w1 * phi(c2 / math.sqrt(2))
                     + w2 * phi(-c1 / math.sqrt(2)))
    raise ValueError(f"form must be 'corrected' or 'printed', got {form!r}")


@dataclass(frozen=True)
class TheoreticalEffects:
    p: float
    p0: float
    mu_d: float  # c1 - c2, a label only


def theoretical_effects(c1: int, c2: int, distribution="gaussian") -> TheoreticalEffects:
    return TheoreticalEffects(theoretical_p(c1, c2, distribution),
                              theoretical_p0(c1, c2, distribution), float(c1 - c2))


@dataclass(frozen=True)
class OracleResult:
    p_mc: float
    p0_mc: float
    se_p: float
    se_p0: float
    draws: int


def mc_effect_oracle(c1: int, c2: int, draws: int = 10**6, rng=None,
                     distribution="gaussian") -> OracleResult:
    """Brute-force check of the closed forms by sampling the size mixtures."""
    _check_c(c1, c2)
    if draws < 10**5:
        raise ValueError("draws must be at least 1e5")
    rng = np.random.default_rng(rng)
    tot = c1 + c2

    def noise(size):
        if Distribution(distribution) is Distribution.cauchy:
            return rng.standard_cauchy(size)
        return rng.standard_normal(size)

    def effect(w1_first, w2_first):
        # group 1 is N(-c2) with size label c1, N(+c1) with label c2
        x1 = np.where(rng.random(draws) < w1_first, -c2, c1) + noise(draws)
        x2 = np.where(rng.random(draws) < w2_first, c2, -c1) + noise(draws)
        k = 0.5 * ((x1 < x2).astype(float) + (x1 <= x2))
        return float(k.mean()), float(k.std(ddof=1) / math.sqrt(draws))

    p, se_p = effect(0.5, 0.5)
    p0, se_p0 = effect(c1 / tot, c1 / tot)
    return OracleResult(p, p0, se_p, se_p0, draws)


# ---------------------------------------------------------------------------
# experiment runner

DEFAULT_SIM_RESAMPLES = {"hat": 1000, "hoffman": 1000}


def replicate_seed(master_seed: int, rep: int, stream: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(int(master_seed), spawn_key=(int(rep), int(stream)))


@dataclass(frozen=True)
class ReplicateOutcome:
    status: str  # ok, negative_variance, degenerate, no_comparisons
    estimate: float = float("nan")
    variance: float = float("nan")
    reject: bool = False
    cover_p: bool = False
    cover_p0: bool = False
    discarded: int = 0


@dataclass(frozen=True)
class MethodSummary:
    method: str
    replications: int
    valid: int
    rejection_rate: float
    coverage_p: float
    coverage_p0: Optional[float]
    mean_estimate: float
    sd_estimate: float
    mean_variance: float
    negative_variance_count: int
    degenerate_count: int
    no_comparisons_count: int
    discarded_draws: int


@dataclass(frozen=True)
class ExperimentReport:
    config: ScenarioConfig
    replications: int
    master_seed: int
    target_p: float
    target_p0: Optional[float]
    methods: tuple
    outcomes: dict = field(repr=False, compare=False)  # method -> tuple of ReplicateOutcome

    def summary(self, method: str) -> MethodSummary:
        return next(s for s in self.methods if s.method == method)

    def estimates(self, method: str) -> np.ndarray:
        return np.array([o.estimate for o in self.outcomes[method] if o.status == "ok"])

    def variances(self, method: str) -> np.ndarray:
        return np.array([o.variance for o in self.outcomes[method] if o.status == "ok"])

    def as_dict(self) -> dict:
        return {
            "config": self.config.to_text(),
            "replications": self.replications,
            "master_seed": self.master_seed,
            "target_p": self.target_p,
            "target_p0": self.target_p0,
            "methods": [_clean(asdict(s)) for s in self.methods],
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        names = list(MethodSummary.__dataclass_fields__)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(names)
        for s in self.methods:
            row = asdict(s)
            writer.writerow(["" if row[k] is None else _fmt(row[k]) for k in names])
        return buf.getvalue()


def _fmt(v):
    return repr(float(v)) if isinstance(v, float) else v


def _clean(d: dict) -> dict:
    return {k: (None if isinstance(v, float) and not math.isfinite(v) else v) for k, v in d.items()}


def _one_method(ds, method, cfg, rng, resamples, target_p, target_p0) -> ReplicateOutcome:
    try:
        res = run_method(ds, method, cfg.alpha_level, resamples.get(method), rng)
        if isinstance(res, EffectEstimate):
            # point-only baseline, judged with the half-width of the analytic interval
            half = z_tilde_test(ds, cfg.alpha_level).half_width
            lo, hi = res.value - half, res.value + half
            return ReplicateOutcome("ok", res.value, (half / stats.norm.ppf(
                1 - cfg.alpha_level / 2)) ** 2, not (lo < 0.5 < hi), lo <= target_p <= hi,
                target_p0 is not None and lo <= target_p0 <= hi)
    except NegativeVarianceError:
        return ReplicateOutcome("negative_variance")
    except (DegenerateVarianceError, DegenerateResampleError):
        return ReplicateOutcome("degenerate")
    except NoComparisonsError:
        return ReplicateOutcome("no_comparisons")
    assert isinstance(res, InferenceResult)
    var = res.variance
    return ReplicateOutcome("ok", res.estimate.value, var.value, res.reject,
                            res.covers(target_p),
                            target_p0 is not None and res.covers(target_p0),
                            res.estimate.resamples_discarded + var.resamples_discarded)


def _run_block(args):
    cfg, methods, reps, master_seed, resamples, target_p, target_p0 = args
    out = {m: [] for m in methods}
    for rep in reps:
        ds = generate_dataset(cfg, np.random.default_rng(replicate_seed(master_seed, rep, 0)))
        for m in methods:
            rng = np.random.default_rng(replicate_seed(master_seed, rep, 1 + METHODS.index(m)))
            out[m].append(_one_method(ds, m, cfg, rng, resamples, target_p, target_p0))
    return out


def _summarise(method: str, outcomes: Sequence[ReplicateOutcome], with_p0: bool) -> MethodSummary:
    ok = [o for o in outcomes if o.status == "ok"]
    k = len(ok)
    est = np.array([o.estimate for o in ok])
    nan = float("nan")
    return MethodSummary(
        method=method,
        replications=len(outcomes),
        valid=k,
        rejection_rate=sum(o.reject for o in ok) / k if k else nan,
        coverage_p=sum(o.cover_p for o in ok) / k if k else nan,
        coverage_p0=(sum(o.cover_p0 for o in ok) / k if k else nan) if with_p0 else None,
        mean_estimate=float(est.mean()) if k else nan,
        sd_estimate=float(est.std(ddof=1)) if k > 1 else nan,
        mean_variance=float(np.mean([o.variance for o in ok])) if k else nan,
        negative_variance_count=sum(o.status == "negative_variance" for o in outcomes),
        degenerate_count=sum(o.status == "degenerate" for o in outcomes),
        no_comparisons_count=sum(o.status == "no_comparisons" for o in outcomes),
        discarded_draws=sum(o.discarded for o in outcomes),
    )


def run_experiment(cfg: ScenarioConfig, methods: Sequence[str] = ("tilde-t",),
                   replications: int = 1000, master_seed: Optional[int] = None,
                   jobs: int = 1, resamples: Optional[dict] = None,
                   include_p0: bool = False) -> ExperimentReport:
    """Simulate ``replications`` datasets and run every method on each.

    Failures of single replicates (negative or degenerate variance, no
    comparisons) are tallied, not raised. Rates are taken over valid
    replicates. For the point-only ignorable baselines the interval is the
    baseline estimate plus or minus the analytic half-width.
    """
    if replications < 1:
        raise ValueError("replications must be at least 1")
    methods = tuple(dict.fromkeys(methods))
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}")
    cfg.check_covariance()
    master_seed = cfg.seed if master_seed is None else int(master_seed)
    resamples = {**DEFAULT_SIM_RESAMPLES, **(resamples or {})}
    if cfg.ics is not None:
        eff = theoretical_effects(*cfg.ics, cfg.distribution)
        target_p, target_p0 = eff.p, (eff.p0 if include_p0 else None)
    else:
        target_p, target_p0 = 0.5, (0.5 if include_p0 else None)

    jobs = max(1, int(jobs))
    blocks = np.array_split(np.arange(replications), min(jobs * 4, replications))
    tasks = [(cfg, methods, b.tolist(), master_seed, resamples, target_p, target_p0)
             for b in blocks if b.size]
    if jobs == 1:
        parts = [_run_block(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_run_block, tasks))
    outcomes = {m: tuple(o for part in parts for o in part[m]) for m in methods}
    summaries = tuple(_summarise(m, outcomes[m], include_p0) for m in methods)
    return ExperimentReport(cfg, replications, master_seed, target_p, target_p0,
                            summaries, outcomes)


def write_report(report: ExperimentReport, out) -> tuple:
    """Write ``<out>.csv`` and ``<out>.json``; returns both paths."""
    out = Path(out)
    stem = out.with_suffix("") if out.suffix in (".csv", ".json") else out
    csv_path, json_path = stem.with_suffix(".csv"), stem.with_suffix(".json")
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    csv_path.write_text(report.to_csv(), encoding="utf-8")
    json_path.write_text(report.to_json(), encoding="utf-8")
    return csv_path, json_path
