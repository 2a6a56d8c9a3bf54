import csv
import json

import numpy as np
import pytest

from slgluing.asymptotics import make_curve
from slgluing.cli import main
from slgluing.config import ConfigError, ModelParams
from slgluing.report import (CURVE_HEADER, OUT_ENV, Check, VerificationReport, build_config,
                             emit_reports, lemma_threshold, load_experiment, summary_text)
from slgluing.suites import Recorder, run_suite


def test_defaults_and_lemma_warning(tmp_path):
    f = tmp_path / "c.cfg"
    f.write_text("# defaults\n")
    cfg = load_experiment(f)
    np.testing.assert_array_equal(cfg.params.t_grid(), 2.0 ** -np.arange(4, 17))
    assert cfg.warnings and "eta2" in cfg.warnings[0]
    assert lemma_threshold(2, 0.4) == pytest.approx(0.75)
    ok = build_config({"model.eta1": 0.5, "model.eta2": 0.8})
    assert ok.warnings == ()


def test_errors_are_aggregated():
    with pytest.raises(ConfigError) as err:
        build_config({"model.c1": 0.2, "model.c2": 0.4, "mesh.nr": 2, "run.colour": 1})
    msg = str(err.value)
    assert "c1" in msg and "c2" in msg and "mesh.nr" in msg and "run.colour" in msg
    with pytest.raises(ConfigError):
        build_config({}, suite="nope")


def test_out_dir_from_environment(monkeypatch, tmp_path):
    monkeypatch.setenv(OUT_ENV, str(tmp_path / "env"))
    assert build_config({}).out_dir == tmp_path / "env"
    assert build_config({}, out_dir=tmp_path / "x").out_dir == tmp_path / "x"


def test_empty_report_files(tmp_path):
    paths = emit_reports(VerificationReport("gluing", ModelParams()), tmp_path)
    assert paths["curves"].read_text() == ",".join(CURVE_HEADER) + "\n"
    assert json.loads(paths["summary"].read_text())["counts"]["total"] == 0


def test_curve_rows_and_round_trip(tmp_path):
    t = 2.0 ** -np.arange(4, 17)
    rep = VerificationReport("phase-norms", ModelParams())
    rep.curves.append(make_curve("epsL1_P", t, t ** 1.5, ModelParams().fit_mask(), region="P",
                                 predicted=1.5))
    rep.checks.append(Check("x", "anchor text", 1.5, 1.5, 0.1, True))
    paths = emit_reports(rep, tmp_path)
    rows = list(csv.reader(paths["curves"].open()))
    assert len(rows) == 14 and rows[1][0] == "epsL1_P" and float(rows[1][5]) == 0.0625
    assert json.loads(paths["summary"].read_text()) == json.loads(summary_text(rep))
    assert "anchor text" in paths["table"].read_text()


def test_unwritable_directory(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(OSError, match="file"):
        emit_reports(VerificationReport("gluing", ModelParams()), blocker / "sub")


def test_recorder_isolates_failures():
    rep = VerificationReport("x", ModelParams())
    rec = Recorder(rep)
    rec.run("bad", "a", lambda: 1 / 0)
    rec.run("good", "b", lambda: {"passed": True})
    rec.run("probe", "c", lambda: {"passed": False}, exploratory=True)
    assert [c.passed for c in rep.checks] == [False, True, False]
    assert "ZeroDivisionError" in rep.checks[0].error
    assert [c.check_id for c in rep.failed] == ["bad"]


def test_every_check_has_an_anchor():
    rep = run_suite(build_config({}, suite="flat-identities"))
    assert rep.ok and all(c.anchor for c in rep.checks)


def test_cli_flat_identities(tmp_path, capsys):
    assert main(["flat-identities", "--out", str(tmp_path), "--seed", "3"]) == 0
    out = capsys.readouterr().out
    assert "flat.rotation_identity" in out
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["params"]["seed"] == 3


def test_cli_overrides_and_bad_config(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("model.c1 = 0.1\nmodel.c2 = 0.2\n")
    assert main(["gluing", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    assert "c1" in capsys.readouterr().err
    assert main(["sobolev-partition", "--out", str(tmp_path), "--t-min-exp", "14",
                 "--fit-tol", "0.2", "--quad-tol", "1e-9"]) == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["params"]["t_min_exp"] == 14 and summary["params"]["fit_tol"] == 0.2


def test_cli_exit_status_tracks_failures(tmp_path):
    # the printed eps_L1 table is discontinuous at m = 2
    assert main(["phase-norms", "--out", str(tmp_path)]) == 1
    summary = json.loads((tmp_path / "summary.json").read_text())
    failed = {c["id"] for c in summary["checks"] if not c["passed"] and not c["exploratory"]}
    assert failed and all(f.startswith("phase.table_consistency") for f in failed)
