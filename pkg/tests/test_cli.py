import pytest
import sys
import os
import json
import logging
from unittest.mock import patch, MagicMock

import pandas as pd

# Adjust import path based on structure
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../src')))

from fpure_cli import cli, config
from fpure_cli.errors import BudgetExhaustedError, JobSpecError
from fpure_cli.suites import SuiteResult

CONE = "x^3+y^3+z^3"
QUADRIC = "x^2-w^2*(y^2+z^2)"
STRATA = ["-p", "2", "-v", "x1,x2,x3,x4,x5,y",
          "-i", "y*x3", "-i", "y*x1*x4", "-i", "y*x1*x5", "-i", "y*x2*x4", "-i", "y*x2*x5"]


def error_json(err):
    """The structured error line written to stderr by --json runs."""
    lines = [line for line in err.splitlines() if line.startswith('{"error"')]
    assert lines, f"no JSON error in stderr: {err!r}"
    return json.loads(lines[-1])


# --- Fixtures ---

@pytest.fixture(autouse=True)
def isolated_config(monkeypatch):
    """Each run may change the pair budget; no test picks up a cache from the environment."""
    monkeypatch.setattr(config, "PAIR_BUDGET", config.PAIR_BUDGET)
    monkeypatch.delenv(config.CACHE_ENV_VAR, raising=False)


@pytest.fixture
def quadric_file(tmp_path):
    path = tmp_path / "quadric.txt"
    path.write_text(
        "# the quadric cone\n"
        "p = 3\n"
        "vars = x,y,z,w\n"
        f'gens = "{QUADRIC}"\n'
        "emax = 2\n",
        encoding="utf-8",
    )
    return str(path)


# --- fedder ---

def test_fedder_text_output(capsys):
    return_code = cli.main(["fedder", "-p", "7", "-v", "x,y,z", "-i", CONE, "-e", "1"])

    out = capsys.readouterr().out
    assert return_code == 0
    assert "ring: F_7[x,y,z] (degrevlex)" in out
    assert "e=1 q=7: F-pure: true" in out
    assert "witness monomial:" in out
    assert "(mod m^[7])" in out


def test_fedder_not_fpure(capsys):
    return_code = cli.main(["fedder", "-p", "5", "-v", "x,y,z", "-i", CONE, "--json"])

    payload = json.loads(capsys.readouterr().out)
    assert return_code == 0
    assert payload["results"][0]["fpure"] is False
    assert payload["status"] == "ok"


# --- theta ---

def test_theta_levels_json(capsys):
    return_code = cli.main(["theta", "-p", "3", "-v", "x,y,z,w", "-i", QUADRIC, "--emax", "3", "--json"])

    payload = json.loads(capsys.readouterr().out)
    assert return_code == 0
    assert payload["kind"] == "origin"
    assert [r["theta"] for r in payload["results"]] == [6, 24, 78]
    assert [r["q"] for r in payload["results"]] == [3, 9, 27]


def test_theta_at_prime(capsys):
    return_code = cli.main(["theta", *STRATA, "--prime", "x1,x2,x3,x4,y", "-e", "2", "--json"])

    payload = json.loads(capsys.readouterr().out)
    assert return_code == 0
    assert payload["kind"] == "prime"
    assert payload["prime"] == ["x1", "x2", "x3", "x4", "y"]
    assert payload["results"][0]["theta"] == 12


def test_theta_global(capsys):
    return_code = cli.main(["theta", "-p", "3", "-v", "x,y", "-i", "x*y", "--global", "--json"])

    payload = json.loads(capsys.readouterr().out)
    assert return_code == 0
    assert payload["kind"] == "global"
    assert payload["results"][0]["theta"] == 4


def test_theta_not_fpure_exit_code(capsys):
    return_code = cli.main(["theta", "-p", "5", "-v", "x,y,z", "-i", CONE, "--json"])

    payload = json.loads(capsys.readouterr().out)
    assert return_code == 1
    assert payload["results"][0]["theta"] == "NOT_FPURE"


def test_parallel_levels_match_serial(capsys):
    argv = ["theta", "-p", "3", "-v", "x,y", "-i", "x*y", "--emax", "3", "--json"]
    cli.main(argv)
    serial = capsys.readouterr().out
    cli.main(argv + ["--jobs", "2"])
    parallel = capsys.readouterr().out
    assert serial == parallel


# --- fpt ---

def test_fpt_quadric_json(capsys):
    return_code = cli.main(["fpt", "-p", "3", "-v", "x,y,z,w", "-i", QUADRIC, "--emax", "3", "--json"])

    payload = json.loads(capsys.readouterr().out)
    assert return_code == 0
    assert [r["dfpt"] for r in payload["reports"]] == [["1/1", "7/3"], ["5/3", "19/9"], ["17/9", "55/27"]]
    assert payload["nested"] is True
    assert payload["ideal"] == ["2*y^2*w^2 + 2*z^2*w^2 + x^2"]


def test_fpt_text_output(capsys):
    return_code = cli.main(["fpt", "-p", "7", "-v", "x,y,z", "-i", CONE])

    out = capsys.readouterr().out
    assert return_code == 0
    assert "[11/7, 2/1]" in out
    assert "nested: true" in out
    assert "fpt: b/q <= fpt <= (b+n)/q" in out


def test_fpt_not_fpure(capsys):
    return_code = cli.main(["fpt", "-p", "5", "-v", "x,y,z", "-i", CONE, "--json"])

    payload = json.loads(capsys.readouterr().out)
    assert return_code == 1
    assert payload["status"] == "not_fpure"


def test_fpt_from_input_file(capsys, quadric_file):
    return_code = cli.main(["fpt", "--input", quadric_file, "--json"])

    payload = json.loads(capsys.readouterr().out)
    assert return_code == 0
    assert payload["ring"] == {"p": 3, "variables": ["x", "y", "z", "w"], "order": "degrevlex"}
    assert [r["e"] for r in payload["reports"]] == [1, 2]


def test_flags_override_input_file(capsys, quadric_file):
    return_code = cli.main(["fpt", "--input", quadric_file, "--emax", "1", "--json"])

    payload = json.loads(capsys.readouterr().out)
    assert return_code == 0
    assert [r["e"] for r in payload["reports"]] == [1]


def test_fpt_csv_export(capsys, tmp_path):
    out_dir = tmp_path / "tables"
    return_code = cli.main(["fpt", "-p", "3", "-v", "x,y,z,w", "-i", QUADRIC, "--emax", "2",
                            "--csv-dir", str(out_dir)])

    assert return_code == 0
    written = pd.read_csv(out_dir / "fpt_p3.csv")
    assert list(written["dfpt"]) == ["[1/1, 7/3]", "[5/3, 19/9]"]


# --- dfpt-strata ---

def test_dfpt_strata(capsys, tmp_path):
    return_code = cli.main(["dfpt-strata", *STRATA, "-e", "2", "--csv-dir", str(tmp_path)])

    out = capsys.readouterr().out
    assert return_code == 0
    assert "(x1,x2,x3,x4,y)" in out
    written = pd.read_csv(tmp_path / "dfpt-strata_p2.csv")
    row = written[written["prime"] == "(x1,x2,x3,x4,x5)"].iloc[0]
    assert row["dfpt"] == "[3/4, 2/1]"
    assert row["mfpt"] == "[15/4, 5/1]"


def test_dfpt_strata_global(capsys):
    return_code = cli.main(["dfpt-strata", "-p", "3", "-v", "x,y", "-i", "x*y", "--global", "--json"])

    payload = json.loads(capsys.readouterr().out)
    assert return_code == 0
    assert payload["global"][0]["dfpt"] == ["1/3", "1/1"]


# --- diffpow and signature ---

@pytest.mark.parametrize("n,member", [("2", True), ("3", False)])
def test_diffpow(capsys, n, member):
    return_code = cli.main(["diffpow", "-p", "2", "-v", "x,y,z", "--poly", "x*y+z^4", "-n", n, "-e", "2", "--json"])

    payload = json.loads(capsys.readouterr().out)
    assert return_code == 0
    assert payload["results"][0]["member"] is member
    assert payload["results"][0]["prime"] == ["x", "y", "z"]


def test_diffpow_needs_poly(capsys):
    return_code = cli.main(["diffpow", "-p", "2", "-v", "x,y", "-n", "2", "--json"])

    assert return_code == 2
    assert error_json(capsys.readouterr().err)["error"] == "JobSpecError"


def test_diffpow_needs_positive_order(capsys):
    return_code = cli.main(["diffpow", "-p", "2", "-v", "x,y", "--poly", "x*y", "-n", "0", "--json"])

    assert return_code == 2
    err = error_json(capsys.readouterr().err)
    assert err["error"] == "JobSpecError"
    assert "n >= 1" in err["message"]


def test_signature(capsys):
    return_code = cli.main(["signature", "-p", "3", "-v", "x,y", "-i", "x*y", "--emax", "2", "--json"])

    payload = json.loads(capsys.readouterr().out)
    assert return_code == 0
    assert [r["value"] for r in payload["results"]] == ["1/3", "1/9"]


# --- check ---

@patch('fpure_cli.cli.builtin_corpus', return_value=[])
@patch('fpure_cli.cli.run_suite')
def test_check_reports_failures(mock_run_suite, mock_corpus, capsys):
    # Arrange
    result = SuiteResult("tensor")
    result.add({"instance": "a"}, True)
    result.add({"instance": "b"}, False)
    mock_run_suite.return_value = [result]

    # Act
    return_code = cli.main(["check", "--suite", "tensor", "--emax", "1"])

    # Assert
    out = capsys.readouterr().out
    assert return_code == 4
    mock_run_suite.assert_called_once_with("tensor", [], 1)
    assert "failures in tensor:" in out
    assert "2 checks, 1 failures" in out


@patch('fpure_cli.cli.builtin_corpus', return_value=[])
@patch('fpure_cli.cli.run_suite')
def test_check_passes(mock_run_suite, mock_corpus, capsys):
    result = SuiteResult("scaling")
    result.add({"instance": "a"}, True)
    mock_run_suite.return_value = [result]

    return_code = cli.main(["check", "--suite", "scaling", "--json"])

    payload = json.loads(capsys.readouterr().out)
    assert return_code == 0
    assert payload["failures"] == 0
    mock_run_suite.assert_called_once_with("scaling", [], 2)


def test_check_unknown_corpus(capsys):
    return_code = cli.main(["check", "--corpus", "elsewhere"])
    assert return_code == 2


# --- errors and exit codes ---

def test_syntax_error_json(capsys):
    return_code = cli.main(["fpt", "-p", "3", "-v", "x,y", "-i", "x +", "--json"])

    error = error_json(capsys.readouterr().err)
    assert return_code == 2
    assert error["error"] == "PolynomialSyntaxError"
    assert error["exit_code"] == 2
    assert "position 3" in error["message"]


def test_unknown_variable(capsys):
    assert cli.main(["fpt", "-p", "3", "-v", "x,y", "-i", "x*v"]) == 2


def test_non_prime_characteristic(capsys):
    assert cli.main(["fedder", "-p", "4", "-v", "x,y", "-i", "x*y"]) == 2


def test_missing_characteristic(capsys):
    assert cli.main(["fedder", "-v", "x,y", "-i", "x*y"]) == 2


def test_level_zero_rejected(capsys):
    assert cli.main(["fedder", "-p", "3", "-v", "x,y", "-i", "x*y", "-e", "0"]) == 2


def test_budget_exhausted(mocker, capsys):
    mocker.patch('fpure_cli.cli.compute_level', side_effect=BudgetExhaustedError())

    return_code = cli.main(["theta", "-p", "3", "-v", "x,y", "-i", "x*y", "--json"])

    assert return_code == 3
    assert error_json(capsys.readouterr().err)["error"] == "BudgetExhaustedError"


def test_budget_flag_sets_pair_budget(mocker, capsys):
    cli.main(["theta", "-p", "3", "-v", "x,y", "-i", "x*y", "--budget", "77"])
    assert config.PAIR_BUDGET == 77
    assert cli.main(["theta", "-p", "3", "-v", "x,y", "-i", "x*y", "--budget", "0"]) == 2


def test_unexpected_error_is_internal(mocker, capsys):
    mocker.patch.dict(cli.COMMANDS, {"fpt": MagicMock(side_effect=RuntimeError("boom"))})

    return_code = cli.main(["fpt", "-p", "3", "-v", "x,y", "-i", "x*y", "--json"])

    error = error_json(capsys.readouterr().err)
    assert return_code == 4
    assert error["error"] == "InternalError"
    assert error["message"] == "boom"


def test_missing_command():
    with pytest.raises(SystemExit):
        cli.main([])


# --- cache ---

def test_cache_replays_identical_bytes(mocker, capsys, tmp_path):
    argv = ["fpt", "-p", "3", "-v", "x,y,z,w", "-i", QUADRIC, "--emax", "2", "--json",
            "--cache-dir", str(tmp_path)]
    assert cli.main(argv) == 0
    first = capsys.readouterr().out

    recompute = MagicMock(side_effect=AssertionError("recomputed"))
    mocker.patch.dict(cli.COMMANDS, {"fpt": recompute})
    assert cli.main(argv) == 0
    second = capsys.readouterr().out

    assert first == second
    recompute.assert_not_called()


def test_damaged_cache_is_bypassed(capsys, tmp_path):
    with open(config.get_cache_db_path(str(tmp_path)), "wb") as fh:
        fh.write(b"not a database" * 128)

    return_code = cli.main(["theta", "-p", "3", "-v", "x,y", "-i", "x*y", "--json", "--cache-dir", str(tmp_path)])

    payload = json.loads(capsys.readouterr().out)
    assert return_code == 0
    assert payload["status"] == "ok"


def test_run_disposes_cache_engine(mocker, capsys, tmp_path):
    engine, session = MagicMock(), MagicMock()
    mocker.patch('fpure_cli.cli.open_cache', return_value=(engine, session))
    mocker.patch('fpure_cli.cli.load_report', return_value=None)
    store = mocker.patch('fpure_cli.cli.store_report')

    assert cli.main(["theta", "-p", "3", "-v", "x,y", "-i", "x*y", "--cache-dir", str(tmp_path)]) == 0

    store.assert_called_once()
    session.close.assert_called_once()
    engine.dispose.assert_called_once()


def test_cache_key_ignores_spelling(tmp_path):
    parser = cli.build_parser()
    a = cli.build_job(parser.parse_args(["fpt", "-p", "3", "-v", "x,y", "-i", "x*y + y^2"]))
    b = cli.build_job(parser.parse_args(["fpt", "-p", "3", "-v", "x,y", "-i", "y^2+ y *x"]))
    assert a.key_dict() == b.key_dict()


def test_reset_cache_command(tmp_path, capsys):
    cli.main(["theta", "-p", "3", "-v", "x,y", "-i", "x*y", "--cache-dir", str(tmp_path)])
    assert cli.main(["reset-cache", "--cache-dir", str(tmp_path)]) == 0
    assert os.path.exists(config.get_cache_db_path(str(tmp_path)))


def test_reset_cache_needs_directory(capsys):
    assert cli.main(["reset-cache"]) == 2


@patch('fpure_cli.cli.reset_cache', return_value=False)
def test_reset_cache_failure(mock_reset, tmp_path, capsys):
    assert cli.main(["reset-cache", "--cache-dir", str(tmp_path)]) == 4
    mock_reset.assert_called_once_with(str(tmp_path))


# --- input files and logging ---

def test_read_input_file_rejects_unknown_keys(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("p = 3\ncolour = blue\n", encoding="utf-8")
    with pytest.raises(JobSpecError, match="bad.txt:2"):
        cli.read_input_file(str(path))


def test_read_input_file_missing(tmp_path):
    with pytest.raises(JobSpecError, match="cannot read input file"):
        cli.read_input_file(str(tmp_path / "absent.txt"))


def test_split_list():
    assert cli._split_list('"x*y"; "z^2 - w"') == ["x*y", "z^2 - w"]
    assert cli._split_list("x1, x2,x3") == ["x1", "x2", "x3"]


def test_setup_logging_adds_file_handler(tmp_path):
    log_file = str(tmp_path / "fpure.log")
    cli.setup_logging(log_file, verbose=True)
    try:
        handlers = [h for h in cli.logger.handlers if isinstance(h, logging.FileHandler)]
        assert len(handlers) == 1
        assert cli.logger.level == logging.DEBUG
        cli.logger.info("hello")
        handlers[0].flush()
        with open(log_file, encoding="utf-8") as fh:
            assert "hello" in fh.read()
    finally:
        for h in [h for h in cli.logger.handlers if isinstance(h, logging.FileHandler)]:
            cli.logger.removeHandler(h)
            h.close()
        cli.setup_logging()
