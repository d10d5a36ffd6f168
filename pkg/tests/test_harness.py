import json
import math
import os

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stab.harness import cli
from stab.harness.config import (KEYS, ConfigError, apply_env, defaults, describe_defaults, load_config,
                                 parse_config)
from stab.harness.experiments import EXPERIMENTS, convergence_study, run_experiment
from stab.harness.report import (ReportDoc, at_least, at_most, dumps, failed, holds, in_range, plain,
                                 read_report, within, write_report)


def test_minimal_config_overrides_one_key():
    cfg = parse_config("mesh.level = 4\n")
    assert cfg["mesh.level"] == 4
    assert cfg["gl.epsilon"] == KEYS["gl.epsilon"].default


def test_config_comments_quotes_and_lists():
    cfg = parse_config("# header\n\noutput.dir = 'out dir'  # trailing\nymh.scan = 0.2, 0.4\n")
    assert cfg["output.dir"] == "out dir"
    assert cfg["ymh.scan"] == (0.2, 0.4)


def test_out_of_range_value_names_the_key():
    with pytest.raises(ConfigError) as e:
        parse_config("mesh.level = 3\ngl.epsilon = -1\n")
    assert e.value.key == "gl.epsilon"
    assert e.value.line == 2
    assert "gl.epsilon" in str(e.value) and "line 2" in str(e.value)


def test_unknown_key_gets_a_suggestion():
    with pytest.raises(ConfigError) as e:
        parse_config("gl.epsilonn = 0.3")
    assert "did you mean 'gl.epsilon'" in str(e.value)


@pytest.mark.parametrize("text", ["mesh.level", "= 3", "mesh.level = 2.5", "mesh.level = 3\nmesh.level = 4",
                                  "gl.epsilon = nan", "gl.ansatz = spiral", "ymh.scan = ", "seed = -1"])
def test_malformed_configs(text):
    with pytest.raises(ConfigError):
        parse_config(text)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 8), st.floats(1e-3, 9.9, allow_nan=False))
def test_config_roundtrip_through_text(level, eps):
    cfg = parse_config(f"mesh.level = {level}\ngl.epsilon = {eps!r}\n")
    assert cfg["mesh.level"] == level and cfg["gl.epsilon"] == eps


def test_seed_from_environment(tmp_path):
    p = tmp_path / "c.cfg"
    p.write_text("seed = 3\n")
    assert load_config(p, env={})["seed"] == 3
    assert load_config(p, env={"STAB_SEED": "11"})["seed"] == 11
    with pytest.raises(ConfigError):
        apply_env(defaults(), {"STAB_SEED": "x"})
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.cfg")


def test_describe_defaults_lists_every_key():
    text = describe_defaults()
    for k in KEYS:
        assert k in text


def test_metric_helpers():
    assert within(1.0, 1.05, 0.1)["pass"] and not within(1.0, 1.2, 0.1)["pass"]
    assert at_most(1.0, 1.0)["pass"] and not at_most(1.1, 1.0)["pass"]
    assert at_least(1.0, 1.0)["pass"] and not at_least(0.9, 1.0)["pass"]
    assert in_range(0.99, 0.98, 1.05)["pass"] and not in_range(1.1, 0.98, 1.05)["pass"]
    assert holds(True)["pass"] and not holds(False, "why")["pass"]
    assert not failed("boom")["pass"]
    assert not at_most(float("nan"), 1.0)["pass"]


def test_plain_handles_numpy_and_nonfinite():
    doc = plain({"a": np.float64(1.5), "b": np.arange(3), "c": math.inf, "d": (np.int64(2),)})
    assert doc["b"] == [0, 1, 2] and isinstance(doc["a"], float)
    assert isinstance(doc["c"], str)
    json.loads(dumps(doc))


def test_report_write_is_stable_and_atomic(tmp_path):
    doc = ReportDoc("x", defaults().echo(), {"m": at_most(0.5, 1.0)}, {"o": 1}, ["b", "a"], {"seconds": 1.0})
    d = tmp_path / "new" / "dir"
    p = write_report(doc, d)
    first = p.read_bytes()
    doc.timing = {"seconds": 2.0}
    write_report(doc, d)
    assert p.read_bytes() == first
    assert first.endswith(b"}\n")
    assert sorted(os.listdir(d)) == ["report.json", "report.timing.json"]
    r = read_report(p)
    assert r["pass"] and r["schemaVersion"] == 1 and r["artifacts"] == ["a", "b"]


def test_failed_metric_marks_report():
    doc = ReportDoc("x", {}, {"a": at_most(0.1, 1.0), "b": at_least(0.1, 1.0)})
    assert not doc.passed and doc.failures() == ["b"]


def test_run_experiment_writes_report(tmp_path):
    cfg = defaults().with_values({"mesh.level": 3})
    doc = run_experiment(cfg, "fem-validate", tmp_path / "fem")
    rep = read_report(tmp_path / "fem" / "report.json")
    assert rep["experimentId"] == "fem-validate"
    assert rep["configEcho"]["mesh.level"] == 3
    assert rep["pass"] == doc.passed
    assert set(rep["metrics"]) >= {"lambda0", "lambda1"}


def test_unknown_experiment():
    with pytest.raises(ConfigError):
        run_experiment(defaults(), "nope", write=False)
    assert "gl-certify" in EXPERIMENTS and "ymh-bogomolny" in EXPERIMENTS


def test_module_errors_become_error_metric(tmp_path):
    # a mesh too coarse for the bundle degree fails inside the module, not in config parsing
    cfg = defaults().with_values({"mesh.level": 0, "ymh.degree": 12})
    doc = run_experiment(cfg, "ymh-vortex", tmp_path)
    assert "error" in doc.metrics and not doc.passed
    assert "AdmissibilityError" in doc.metrics["error"]["value"]


def test_convergence_study_validation():
    with pytest.raises(ConfigError):
        convergence_study(defaults(), "gl-solve", [3, 4])
    with pytest.raises(ConfigError):
        convergence_study(defaults(), "fem-validate", [4, 3])
    with pytest.raises(ConfigError):
        convergence_study(defaults(), "fem-validate", [4])


def test_convergence_study_fem(tmp_path):
    doc = convergence_study(defaults(), "fem-validate", [2, 3, 4], tmp_path)
    assert doc.metrics["order"]["pass"], doc.metrics
    assert (tmp_path / "convergence.csv").exists()
    assert (tmp_path / "level-3" / "report.json").exists()


def test_cli_mesh(tmp_path, capsys):
    out = tmp_path / "m" / "mesh.off"
    assert cli.main(["mesh", "--level", "2", "--out", str(out)]) == 0
    assert out.read_text().startswith("OFF")
    assert cli.main(["mesh", "--level", "99", "--out", str(out)]) == 2


def test_cli_usage_errors(tmp_path, capsys):
    with pytest.raises(SystemExit) as e:
        cli.main(["gl", "bogus"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        cli.main([])
    assert e.value.code == 2
    bad = tmp_path / "bad.cfg"
    bad.write_text("gl.epsilonn = 0.3\n")
    assert cli.main(["fem", "--config", str(bad)]) == 2
    assert "did you mean" in capsys.readouterr().err
    assert cli.main(["converge", "--experiment", "fem-validate", "--levels", "a,b"]) == 2


def test_cli_exit_codes_follow_metrics(tmp_path, capsys):
    good = tmp_path / "good.cfg"
    good.write_text(f"mesh.level = 3\noutput.dir = {tmp_path / 'out'}\n")
    assert cli.main(["fem", "--config", str(good)]) == 0
    assert "PASS fem-validate lambda1" in capsys.readouterr().out
    # same run with an impossible band on the l = 2 cluster: some metrics fail
    strict = tmp_path / "strict.cfg"
    strict.write_text(f"mesh.level = 3\ntol.fem.ell2 = 1e-9\noutput.dir = {tmp_path / 'out'}\n")
    assert cli.main(["fem", "--config", str(strict)]) == 1
    out = capsys.readouterr().out
    assert "FAIL fem-validate lambda4" in out and "PASS fem-validate lambda1" in out


def test_cli_pointlab_overrides(tmp_path, capsys):
    assert cli.main(["pointlab", "sphere-gl", "--n", "3", "--samples", "5", "--out", str(tmp_path)]) == 0
    rep = read_report(tmp_path / "report.json")
    assert rep["configEcho"]["pointlab.n"] == 3 and rep["configEcho"]["pointlab.samples"] == 5
    assert cli.main(["pointlab", "cpn", "--n", "9", "--out", str(tmp_path)]) == 2
