"""Property checks shared by the regular suite and the acceptance suite.

Each entry maps a name to ``(strategy, check)``; :func:`run_property`
wraps the check with hypothesis at the requested number of examples.
"""

import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from clusterwmw import (ClusterWMWError, DegenerateVarianceError, ResampleDraw, df_hat,
                        draw_resample, hoffman_variance, p_hat_mc, p_hat_star, p_ignorable,
                        p_tilde, t_tilde_test, var_tilde, z_star_test, z_tilde_test)
from strategies import datasets, real_values

any_data = st.one_of(datasets(), datasets(values=real_values), datasets(max_n=12, max_m=4))
seeds = st.integers(0, 2**32 - 1)
TRANSFORMS = (np.exp, lambda x: x**3 + 5 * x, lambda x: 2 * x + 1)


def _tests_or_none(ds, alpha=0.05):
    try:
        return z_tilde_test(ds, alpha), t_tilde_test(ds, alpha)
    except DegenerateVarianceError:
        return None


def _outcome(func):
    """Value of ``func()`` or the class of the library error it raised."""
    try:
        return func()
    except ClusterWMWError as exc:
        return type(exc)


def swap_estimators(ds, seed):
    sw = ds.swap_groups()
    assert abs(p_tilde(sw).value - (1 - p_tilde(ds).value)) < 1e-12
    for w in ("unweighted", "weighted"):
        assert abs(p_ignorable(sw, w).value - (1 - p_ignorable(ds, w).value)) < 1e-12
    d = draw_resample(ds, seed)
    if d.m1_star and d.m2_star:
        mirrored = ResampleDraw(d.values, (3 - d.groups).astype(np.int8), d.members)
        assert abs(p_hat_star(mirrored).value - (1 - p_hat_star(d).value)) < 1e-12
    a, b = p_hat_mc(ds, 300, seed), p_hat_mc(sw, 300, seed + 1)
    tol = 6 * (a.mc_standard_error + b.mc_standard_error) + 1e-12
    assert abs(a.value - (1 - b.value)) <= tol


def swap_statistics_exact_parts(ds):
    """What relabelling does preserve exactly: the numerator flips sign."""
    sw = ds.swap_groups()
    a, b = p_tilde(ds).value - 0.5, p_tilde(sw).value - 0.5
    assert abs(a + b) < 1e-12
    orig, swapped = _tests_or_none(ds), _tests_or_none(sw)
    assume(orig is not None and swapped is not None)
    for r, s in zip(orig, swapped):
        assert np.sign(r.statistic) == -np.sign(s.statistic) or abs(a) < 1e-12
        mid_r = 0.5 * (r.ci_lower + r.ci_upper)
        mid_s = 0.5 * (s.ci_lower + s.ci_upper)
        assert abs(mid_r - (1 - mid_s)) < 1e-12


def swap_statistics(ds):
    """Exact invariance of |statistic|, p-value, df and mirrored CI under relabelling."""
    orig, swapped = _tests_or_none(ds), _tests_or_none(ds.swap_groups())
    assert (orig is None) == (swapped is None)
    assume(orig is not None)
    for r, s in zip(orig, swapped):
        assert abs(r.statistic + s.statistic) < 1e-9 * max(1.0, abs(r.statistic))
        assert abs(r.p_value - s.p_value) < 1e-9
        assert abs(r.ci_lower - (1 - s.ci_upper)) < 1e-12
        assert abs(r.ci_upper - (1 - s.ci_lower)) < 1e-12
        if r.df is not None:
            assert abs(r.df - s.df) < 1e-9 * r.df


def monotone_invariance(ds, seed, which):
    tr = ds.map_values(TRANSFORMS[which])
    assert p_tilde(tr).value == p_tilde(ds).value
    for w in ("unweighted", "weighted"):
        assert p_ignorable(tr, w).value == p_ignorable(ds, w).value
    assert p_hat_mc(tr, 50, seed) == p_hat_mc(ds, 50, seed)
    orig, new = _tests_or_none(ds), _tests_or_none(tr)
    assert (orig is None) == (new is None)
    if orig is not None:
        for r, s in zip(orig, new):
            assert r.statistic == s.statistic and r.p_value == s.p_value
            assert (r.ci_lower, r.ci_upper, r.df) == (s.ci_lower, s.ci_upper, s.df)
    assert _outcome(lambda: hoffman_variance(tr, 40, seed).value) == \
        _outcome(lambda: hoffman_variance(ds, 40, seed).value)
    assert _outcome(lambda: z_star_test(tr, rng=seed).statistic) == \
        _outcome(lambda: z_star_test(ds, rng=seed).statistic)


def sign_reversal(ds, seed):
    neg = ds.map_values(np.negative)
    assert abs(p_tilde(neg).value - (1 - p_tilde(ds).value)) < 1e-12
    for w in ("unweighted", "weighted"):
        assert abs(p_ignorable(neg, w).value - (1 - p_ignorable(ds, w).value)) < 1e-12
    a, b = p_hat_mc(ds, 50, seed), p_hat_mc(neg, 50, seed)
    assert abs(a.value - (1 - b.value)) < 1e-12
    d = draw_resample(ds, seed)
    if d.m1_star and d.m2_star:
        flipped = ResampleDraw(-d.values, d.groups, d.members)
        assert abs(p_hat_star(flipped).value - (1 - p_hat_star(d).value)) < 1e-12


def ranges(ds):
    assert 0.0 <= p_tilde(ds).value <= 1.0
    v = var_tilde(ds)
    assert v.value >= 0.0 and np.all(v.per_cluster >= 0.0)


def duality(ds, alpha):
    res = _tests_or_none(ds, alpha)
    assume(res is not None)
    for r in res:
        assert r.reject == (not (r.ci_lower < 0.5 < r.ci_upper))
        if abs(r.p_value - alpha) > 1e-9:
            assert (r.p_value < alpha) == r.reject
        assert r.ci_lower <= r.estimate.value <= r.ci_upper


def df_balanced(k, v):
    assert abs(df_hat(np.full(3 * k, v), (k, k, k)) - 3 * (k - 1)) < 1e-9 * k


def seeded_determinism(ds, seed):
    assert p_hat_mc(ds, 30, seed) == p_hat_mc(ds, 30, seed)
    assert _outcome(lambda: z_star_test(ds, rng=seed)) == _outcome(lambda: z_star_test(ds, rng=seed))


PROPERTIES = {
    "group-swap antisymmetry of estimators": (dict(ds=any_data, seed=seeds), swap_estimators),
    "group-swap sign flip of statistics": (dict(ds=any_data), swap_statistics_exact_parts),
    "group-swap symmetry of |statistics|, p-values, df and CI": (dict(ds=any_data), swap_statistics),
    "monotone-transform invariance": (dict(ds=datasets(max_n=10), seed=seeds,
                                           which=st.integers(0, 2)), monotone_invariance),
    "sign reversal maps e to 1 - e": (dict(ds=any_data, seed=seeds), sign_reversal),
    "p_tilde in [0, 1] and variance nonnegative": (dict(ds=any_data), ranges),
    "test/CI duality": (dict(ds=any_data, alpha=st.floats(0.001, 0.5)), duality),
    "df_hat = 3(k - 1) under equal terms": (dict(k=st.integers(2, 200),
                                                 v=st.floats(1e-6, 1e3)), df_balanced),
    "seeded determinism": (dict(ds=any_data, seed=seeds), seeded_determinism),
}


def run_property(name, max_examples):
    strategies, check = PROPERTIES[name]
    wrapped = given(**strategies)(check)
    settings(max_examples=max_examples, deadline=None, derandomize=True, database=None)(wrapped)()
