import csv
import io
import json

import pytest

from heavenly.arith import Q
from heavenly.cli.main import main
from heavenly.cli.config import SUITES, ConfigError, parse_config
from heavenly.cli.report import CSV_COLUMNS, EXIT_CONFIG, EXIT_FAIL, EXIT_OK, run_suites

WORKED = """\
# worked modified-branch instance
branch = modified
c5 = 1
c17 = 1
c19 = 1
c29 = 1
seeds = 1
sample_count = 30
"""

FAST = "residual,lax,tetrad,coframe,metric,signature,curvature"


@pytest.fixture
def worked_cfg(tmp_path):
    p = tmp_path / "worked.cfg"
    p.write_text(WORKED)
    return str(p)


# -- configuration ------------------------------------------------------------------


def test_parse_config_fields():
    cfg = parse_config(WORKED + "points = 1,2,3,4; 1/2,0,0,1\nchart_sign = -1\n")
    assert cfg.branch == "modified" and cfg.free_params[5] == 1
    assert cfg.sample_points == [(1, 2, 3, 4), (Q(1, 2), 0, 0, 1)]
    assert cfg.chart_sign == -1
    assert cfg.suites == SUITES
    assert not cfg.use_draws


def test_generic_inferred_from_constants():
    cfg = parse_config("a = 1\nb = 2\nc = -1/3\n")
    assert cfg.branch == "generic" and cfg.use_draws


def test_config_roundtrip_and_digest():
    cfg = parse_config(WORKED)
    again = parse_config(cfg.to_text())
    assert again.digest() == cfg.digest()
    assert parse_config(WORKED.replace("c19 = 1", "c19 = 2")).digest() != cfg.digest()


@pytest.mark.parametrize(
    "text, needle",
    [
        ("c5 = 0.5\nc17 = 1\nc29 = 1", "c5"),
        ("frobnicate = 1", "unknown key"),
        ("c5 = 1\nc5 = 2", "duplicate"),
        ("branch = modified\na = 1", "modified requires"),
        ("c5 = 0\nc17 = 1\nc29 = 1", "c5"),
        ("c5 = 1\nc17 = 3\nc19 = 3\nc29 = 1", "delta"),
        ("chart_sign = 2", "chart_sign"),
        ("suites = residual, nonsense", "nonsense"),
        ("c2 = 1", "not a free parameter"),
        ("c5 = 1/0", "zero denominator"),
    ],
)
def test_config_errors_name_the_problem(text, needle):
    with pytest.raises(ConfigError, match=needle):
        parse_config(text)


def test_bad_config_exit_code(tmp_path, capsys):
    p = tmp_path / "bad.cfg"
    p.write_text("c5 = 1.5\n")
    assert main(["verify", str(p)]) == EXIT_CONFIG
    assert "c5" in capsys.readouterr().err
    assert main(["verify", str(tmp_path / "missing.cfg")]) == EXIT_CONFIG


# -- runs ---------------------------------------------------------------------------


def test_verify_worked_passes(worked_cfg, capsys):
    assert main(["verify", worked_cfg]) == EXIT_OK
    out = capsys.readouterr().out
    assert "0 failed" in out
    assert "ASD sign: 1" in out
    assert "simplified diagonal form" in out  # recorded as a discrepancy, not a failure


def test_perturbed_instance_fails_with_witness(worked_cfg, capsys):
    assert main(["verify", worked_cfg, "--perturb", "c9=1", "--suites", FAST]) == EXIT_FAIL
    out = capsys.readouterr().out
    assert "[FAIL   ] residual" in out
    assert "witness: 6*z1^2 + 5*z1 z2 + 2*z2^2 - 6*z4^2" in out
    assert "prerequisite residual did not pass" in out


def test_explicit_flat_polynomial(capsys):
    code = main(["report", "--explicit-u", "z1 z4", "--suites", "residual,metric,tetrad,coframe,curvature", "--no-timing"])
    assert code == EXIT_OK
    rep = json.loads(capsys.readouterr().out)
    assert rep["asd_sign"] == "undetermined (flat)"


def test_report_json_is_byte_stable(worked_cfg, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert main(["report", worked_cfg, "--suites", FAST, "--no-timing", "-o", str(path)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    rep = json.loads(a.read_text())
    assert rep["exit_code"] == 0 and "timing" not in rep
    assert rep["signature_histogram"] == {"(2,2)": 30}


def test_report_csv(worked_cfg, capsys):
    assert main(["report", worked_cfg, "--suites", "residual,tetrad,coframe,metric,signature", "--format", "csv"]) == EXIT_OK
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) == 31
    assert all(r[5:] == ["2", "2"] for r in rows[1:])


def test_generic_draws_with_jobs():
    cfg = parse_config("a = 1\nb = 2\nc = -1\nseeds = 1, 2\nsample_count = 10\nsuites = residual,lax,symmetry")
    rep = run_suites(cfg, jobs=2)
    assert rep.exit_code == 0
    assert {r.instance for r in rep.results} == {"generic-seed1", "generic-seed2"}
    assert any("X_inf" in d for d in rep.discrepancies)


def test_derive_constraints_command(capsys):
    assert main(["derive-constraints", "--modified"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "all match" in out and "residual of the re-derived cubic: zero" in out


def test_curvature_command(worked_cfg, capsys):
    assert main(["curvature", worked_cfg, "--raised"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "R^{ab}[12] = 0" in out and "duality: ASD" in out


def test_signature_command(worked_cfg, tmp_path, capsys):
    out_csv = tmp_path / "s.csv"
    assert main(["signature", worked_cfg, "--points", "20", "--csv", str(out_csv)]) == EXIT_OK
    assert "(2,2): 20" in capsys.readouterr().out
    assert out_csv.read_text().splitlines()[0] == ",".join(CSV_COLUMNS)
