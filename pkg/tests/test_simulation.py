import json

import jsonschema
import numpy as np
import pytest

from clusterwmw import NotPositiveDefiniteError, schema_path, summary
from clusterwmw.simulation import (CovarianceSpec, ScenarioConfig, build_sigma, gen_ics_dataset,
                                   gen_ignorable_dataset, mc_effect_oracle, run_experiment,
                                   sample_cluster, sigma_factor, theoretical_effects,
                                   theoretical_p, theoretical_p0, write_report)

RHO_H0 = CovarianceSpec(rho1=0.9, rho2=0.9, rho12=0.1)
RHO_ICS = CovarianceSpec(rho1=0.1, rho2=0.1, rho12=0.9)


def test_build_sigma_examples():
    np.testing.assert_array_equal(build_sigma(CovarianceSpec(), 1, 1), np.eye(2))
    np.testing.assert_allclose(build_sigma(CovarianceSpec(1, 4, 0.5, 0.5, 0.25), 1, 1),
                               [[1.5, 0.5], [0.5, 6.0]])


def test_build_sigma_structure():
    sig = build_sigma(CovarianceSpec(2.0, 3.0, 0.3, 0.6, 0.2), 3, 2)
    assert np.allclose(sig, sig.T)
    np.testing.assert_allclose(np.diag(sig)[:3], 2.0 * 1.3)
    np.testing.assert_allclose(sig[0, 1:3], 0.3 * 2.0)
    np.testing.assert_allclose(sig[:3, 3:], 0.2 * np.sqrt(6.0))


def test_build_sigma_not_pd():
    with pytest.raises(NotPositiveDefiniteError, match="not positive definite"):
        build_sigma(RHO_ICS, 3, 3)
    sig = build_sigma(RHO_ICS, 3, 3, psd_repair=True)
    f = sigma_factor(sig, psd_repair=True)
    assert np.all(np.linalg.eigvalsh(f @ f.T) > -1e-12)


def test_sample_correlations():
    rng = np.random.default_rng(0)
    x = np.array([sample_cluster(CovarianceSpec(), 1, 1, 0, 0, "gaussian", rng).values
                  for _ in range(10_000)])
    assert abs(np.corrcoef(x.T)[0, 1]) < 0.05
    spec = CovarianceSpec(rho1=0.9)
    x = np.array([sample_cluster(spec, 2, 1, 0, 0, "gaussian", rng).values for _ in range(10_000)])
    implied = build_sigma(spec, 2, 1)
    assert np.corrcoef(x.T)[0, 1] == pytest.approx(implied[0, 1] / implied[0, 0], abs=0.05)


def test_cauchy_heavy_tails():
    rng = np.random.default_rng(1)
    x = np.array([sample_cluster(CovarianceSpec(), 1, 0, 0, 0, "cauchy", rng).values[0]
                  for _ in range(20_000)])
    assert np.var(x) > 100.0
    assert np.median(np.abs(x)) == pytest.approx(1.0, abs=0.05)


def test_ignorable_counts_and_sizes():
    cfg = ScenarioConfig(10, 10, 20)
    s = summary(gen_ignorable_dataset(cfg, 3))
    assert (s.n, s.n1, s.n2, s.nc) == (40, 10, 10, 20)
    for law, nu in (("binomial2", 2), ("binomial9", 9)):
        cfg = ScenarioConfig(2000, 2000, 1000, icg_law=law)
        ds = gen_ignorable_dataset(cfg, 4)
        sizes = np.r_[ds.m1[ds.m1 > 0], ds.m2[ds.m2 > 0]]
        assert sizes.min() >= 1 and sizes.max() <= nu + 1
        se = np.sqrt(nu * 0.3 * 0.7 / sizes.size)
        assert abs(sizes.mean() - (1 + 0.3 * nu)) < 3 * se


def test_generators_seeded():
    cfg = ScenarioConfig(5, 5, 5)
    assert gen_ignorable_dataset(cfg, 9).to_csv() == gen_ignorable_dataset(cfg, 9).to_csv()
    ics = ScenarioConfig(5, 5, 5, icg_law="fixed", ics=(2, 3), covariance=RHO_ICS,
                         psd_repair=True)
    assert gen_ics_dataset(ics, 9).to_csv() == gen_ics_dataset(ics, 9).to_csv()


def test_ics_sizes_and_means():
    cfg = ScenarioConfig(300, 300, 300, icg_law="fixed", ics=(2, 3))
    ds = gen_ics_dataset(cfg, 5)
    assert set(np.unique(ds.m1[ds.m1 > 0])) | set(np.unique(ds.m2[ds.m2 > 0])) == {2, 3}
    comp = (ds.m1 > 0) & (ds.m2 > 0)
    np.testing.assert_array_equal(ds.m1[comp], ds.m2[comp])
    g1_small = [np.mean(c.values_g1) for c in ds.clusters if c.m1 == 2]
    assert np.mean(g1_small) == pytest.approx(-3.0, abs=0.15)


def test_ics_equal_c_noninformative():
    cfg = ScenarioConfig(200, 200, 0, icg_law="fixed", ics=(2, 2))
    ds = gen_ics_dataset(cfg, 6)
    assert set(ds.m) == {2}
    means = np.array([np.mean(c.values) for c in ds.clusters])
    assert 0.3 < np.mean(means > 0) < 0.7


@pytest.mark.parametrize("c1, c2, p, p0", [(2, 2, 0.5, 0.5), (2, 3, 0.6307, 0.5258),
                                           (2, 7, 0.7505, 0.3964)])
def test_theoretical_values(c1, c2, p, p0):
    assert theoretical_p(c1, c2) == pytest.approx(p, abs=1e-4)
    assert theoretical_p0(c1, c2) == pytest.approx(p0, abs=1e-4)


def test_printed_form_differs():
    assert theoretical_p0(2, 3, form="printed") == pytest.approx(0.5505, abs=1e-4)
    with pytest.raises(ValueError):
        theoretical_p0(2, 3, form="other")


def test_theory_symmetries():
    for c in range(1, 9):
        assert theoretical_p(c, c) == pytest.approx(0.5, abs=1e-15)
        assert theoretical_p0(c, c) == pytest.approx(0.5, abs=1e-15)
        for d in range(1, 9):
            assert theoretical_p(c, d) + theoretical_p(d, c) == pytest.approx(1.0, abs=1e-12)
            assert theoretical_p0(c, d) + theoretical_p0(d, c) == pytest.approx(1.0, abs=1e-12)
    eff = theoretical_effects(2, 5)
    assert eff.mu_d == -3.0
    with pytest.raises(ValueError):
        theoretical_p(0, 2)


def test_oracle_examples():
    orc = mc_effect_oracle(2, 3, 10**6, 0)
    assert orc.p_mc == pytest.approx(0.631, abs=0.002)
    assert orc.p0_mc == pytest.approx(0.526, abs=0.002)
    eq = mc_effect_oracle(4, 4, 10**5, 1)
    assert abs(eq.p_mc - 0.5) < 4 * eq.se_p and abs(eq.p0_mc - 0.5) < 4 * eq.se_p0
    with pytest.raises(ValueError):
        mc_effect_oracle(2, 3, 1000)


def test_cauchy_theory_matches_oracle():
    orc = mc_effect_oracle(2, 4, 4 * 10**5, 2, distribution="cauchy")
    assert abs(orc.p_mc - theoretical_p(2, 4, "cauchy")) < 4 * orc.se_p
    assert abs(orc.p0_mc - theoretical_p0(2, 4, "cauchy")) < 4 * orc.se_p0


def test_config_roundtrip(tmp_path):
    cfg = ScenarioConfig(20, 10, 10, icg_law="fixed", distribution="cauchy", covariance=RHO_ICS,
                         ics=(2, 5), alpha_level=0.1, seed=77, psd_repair=True)
    path = tmp_path / "s.cfg"
    path.write_text(cfg.to_text())
    assert ScenarioConfig.read(path) == cfg
    assert ScenarioConfig.from_text("n1 = 1\nn2 = 1\nnc = 0\n") == ScenarioConfig(1, 1, 0)


@pytest.mark.parametrize("text", ["n1 = 1\nn2 = 1\n", "n1 = 1\nn2 = 1\nnc = 0\nbogus = 3\n",
                                  "n1 = 1\nn2 = 1\nnc = 0\nc1 = 2\n", "n1 = 0\nn2 = 1\nnc = 0\n",
                                  "n1 = 1\nn2 = 1\nnc = 0\nicg_law = fixed\n",
                                  "n1 = 1\nn2 = 1\nnc = 0\nseed = abc\n"])
def test_config_errors(text):
    with pytest.raises(ValueError):
        ScenarioConfig.from_text(text)


def test_check_covariance():
    ScenarioConfig(10, 10, 20, covariance=RHO_H0).check_covariance()
    cfg = ScenarioConfig(20, 10, 10, icg_law="fixed", ics=(2, 3), covariance=RHO_ICS)
    with pytest.raises(NotPositiveDefiniteError):
        cfg.check_covariance()
    with pytest.raises(NotPositiveDefiniteError):
        run_experiment(cfg, ["tilde"], 2)


def test_experiment_deterministic_and_parallel(tmp_path):
    cfg = ScenarioConfig(6, 6, 6, covariance=RHO_H0)
    methods = ["tilde-t", "hat", "hat-star", "hoffman", "ignorable-u"]
    kw = dict(resamples={"hat": 100, "hoffman": 100})
    a = run_experiment(cfg, methods, 24, 5, jobs=1, **kw)
    b = run_experiment(cfg, methods, 24, 5, jobs=3, **kw)
    assert a.to_csv() == b.to_csv() and a.to_json() == b.to_json()
    # a method's results do not depend on which other methods run alongside
    c = run_experiment(cfg, ["hoffman"], 24, 5, **kw)
    assert c.summary("hoffman") == a.summary("hoffman")
    csv_path, json_path = write_report(a, tmp_path / "rep")
    assert csv_path.read_text().splitlines()[0].startswith("method,replications")
    schema = json.loads(schema_path("report").read_text())
    jsonschema.validate(json.loads(json_path.read_text()), schema)


def test_experiment_tallies_failures():
    cfg = ScenarioConfig(1, 1, 0)
    rep = run_experiment(cfg, ["tilde"], 5, 1)
    s = rep.summary("tilde")
    assert s.valid == 0 and s.degenerate_count == 5
