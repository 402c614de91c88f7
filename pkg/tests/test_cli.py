import json
import subprocess
import sys

import jsonschema
import numpy as np
import pytest

from clusterwmw import schema_path
from clusterwmw.cli import main
from clusterwmw.inference import METHODS
from clusterwmw.simulation import CovarianceSpec, ScenarioConfig, gen_ignorable_dataset


def load_schema(name):
    return json.loads(schema_path(name).read_text())


@pytest.fixture
def sim_csv(tmp_path):
    cfg = ScenarioConfig(10, 10, 20, covariance=CovarianceSpec(rho1=0.9, rho2=0.9, rho12=0.1))
    path = tmp_path / "data.csv"
    gen_ignorable_dataset(cfg, 3).write_csv(path)
    return path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("method", METHODS)
def test_analyze_methods_validate(capsys, sim_csv, method):
    code, out, _ = run(capsys, "analyze", sim_csv, "--method", method, "--resamples", 400)
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, load_schema("analyze"))
    assert ("df" in doc) == (method == "tilde-t")
    assert all(np.isfinite(v) for v in doc.values() if isinstance(v, float))


def test_analyze_default_is_t(capsys, sim_csv):
    _, out, _ = run(capsys, "analyze", sim_csv)
    assert json.loads(out)["method"] == "tilde-t"


def test_analyze_hat_reproducible(capsys, sim_csv):
    _, a, _ = run(capsys, "analyze", sim_csv, "--method", "hat", "--resamples", 500)
    _, b, _ = run(capsys, "analyze", sim_csv, "--method", "hat", "--resamples", 500)
    assert a == b
    assert json.loads(a)["seed"] == 20240101


def test_two_singletons_exit_3(capsys, tmp_path):
    path = tmp_path / "two.csv"
    path.write_text("cluster,group,value\na,1,1\nb,2,2\n")
    code, out, err = run(capsys, "analyze", path, "--method", "tilde")
    assert code == 3 and out == ""
    assert "degenerate variance" in err and "1.0" in err


def test_one_group_exit_2(capsys, tmp_path):
    path = tmp_path / "one.csv"
    path.write_text("cluster,group,value\na,1,1\nb,1,2\n")
    code, _, err = run(capsys, "analyze", path, "--method", "tilde")
    assert code == 2 and "malformed input" in err


def test_no_comparisons_exit_4(capsys, tmp_path):
    path = tmp_path / "single.csv"
    path.write_text("cluster,group,value\na,1,1\na,2,2\n")
    code, _, err = run(capsys, "analyze", path)
    assert code == 4 and "no comparisons" in err


def test_negative_variance_exit_3(capsys, tmp_path):
    from test_inference import ADVERSARIAL
    path = tmp_path / "adv.csv"
    path.write_text(ADVERSARIAL)
    code, _, err = run(capsys, "analyze", path, "--method", "hoffman", "--resamples", 200,
                       "--seed", 1)
    assert code == 3 and "negative variance" in err


def test_bad_alpha_and_missing_file(capsys, sim_csv, tmp_path):
    assert run(capsys, "analyze", sim_csv, "--alpha", 2)[0] == 2
    assert run(capsys, "analyze", tmp_path / "nope.csv")[0] == 2
    with pytest.raises(SystemExit) as info:
        main(["analyze", str(sim_csv), "--method", "bogus"])
    assert info.value.code == 2


@pytest.mark.parametrize("c1, c2, p, p0", [(2, 3, 0.6307, 0.5258), (5, 5, 0.5, 0.5),
                                           (2, 7, 0.7505, 0.3964)])
def test_theory(capsys, c1, c2, p, p0):
    code, out, _ = run(capsys, "theory", "--c1", c1, "--c2", c2)
    doc = json.loads(out)
    jsonschema.validate(doc, load_schema("theory"))
    assert code == 0
    assert doc["p"] == pytest.approx(p, abs=1e-4) and doc["p0"] == pytest.approx(p0, abs=1e-4)


def test_theory_oracle_and_errors(capsys):
    code, out, _ = run(capsys, "theory", "--c1", 2, "--c2", 3, "--oracle-draws", 200000)
    doc = json.loads(out)
    jsonschema.validate(doc, load_schema("theory"))
    assert abs(doc["p_mc"] - doc["p"]) < 4 * doc["se"]["p"]
    assert run(capsys, "theory", "--c1", 0, "--c2", 3)[0] == 2


def test_simulate_jobs_identical(capsys, tmp_path):
    cfg = tmp_path / "ics.cfg"
    cfg.write_text(ScenarioConfig(6, 4, 4, icg_law="fixed", ics=(2, 3), seed=5,
                                  covariance=CovarianceSpec(rho1=0.1, rho2=0.1, rho12=0.3))
                   .to_text())
    out1, out8 = tmp_path / "a", tmp_path / "b"
    assert run(capsys, "simulate", cfg, "--reps", 40, "--out", out1,
               "--methods", "tilde,tilde-t,ignorable-w", "--jobs", 1)[0] == 0
    assert run(capsys, "simulate", cfg, "--reps", 40, "--out", out8,
               "--methods", "tilde,tilde-t,ignorable-w", "--jobs", 8)[0] == 0
    a_csv, b_csv = (tmp_path / "a.csv").read_bytes(), (tmp_path / "b.csv").read_bytes()
    assert a_csv == b_csv
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    header = a_csv.decode().splitlines()[0].split(",")
    assert "rejection_rate" in header
    rows = a_csv.decode().splitlines()[1:]
    assert [r.split(",")[0] for r in rows] == ["tilde", "tilde-t", "ignorable-w"]


def test_simulate_bad_config(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("n1 = 1\n")
    assert run(capsys, "simulate", cfg)[0] == 2
    cfg.write_text("n1 = 20\nn2 = 10\nnc = 10\nicg_law = fixed\nc1 = 2\nc2 = 3\n"
                   "rho1 = 0.1\nrho2 = 0.1\nrho12 = 0.9\n")
    code, _, err = run(capsys, "simulate", cfg, "--reps", 2)
    assert code == 2 and "positive definite" in err
    assert run(capsys, "simulate", cfg, "--methods", "nope")[0] == 2


def test_console_script_entry(sim_csv):
    proc = subprocess.run([sys.executable, "-m", "clusterwmw.cli", "analyze", str(sim_csv),
                           "--method", "tilde"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["reference"] == "standard_normal"
