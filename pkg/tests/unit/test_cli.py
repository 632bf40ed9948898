# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

"""Tests for the cli module."""

import json

import numpy as np
import pytest

import cli
from constants import CONFIG_FILE_PATH, EXIT_FAILURE, EXIT_OK, EXIT_USAGE, THREADS_ENV_VAR
from exceptions import InputFormatError, InvalidParameterError
from lab_types import Frame, GroundTruth, OperatorMap, PropertyTally, Sigma, SuiteSummary

DEFAULTS = {"seed": 1, "tol": 1e-8, "samples": 30, "threads": 1, "log_level": "WARNING"}


@pytest.fixture(name="lab")
def lab_fixture():
    """Return a command line bound to test defaults."""
    return cli.WignerLabCli(DEFAULTS)


def write_frame(path, columns):
    """Write a frame file and return its path."""
    path.write_text(Frame(columns=np.asarray(columns, dtype=complex)).model_dump_json())
    return path


def test_load_defaults_reads_options_file():
    """
    arrange: Take the shipped options file.
    act: Load the defaults.
    assert: Every option has its documented default.
    """
    defaults = cli.load_defaults(CONFIG_FILE_PATH)

    assert defaults == {
        "seed": 1,
        "tol": 1e-8,
        "samples": 200,
        "threads": 0,
        "log_level": "WARNING",
    }


def test_load_defaults_rejects_broken_file(tmp_path):
    """
    arrange: Write an options file without an options key.
    act: Load the defaults.
    assert: InputFormatError is raised.
    """
    path = tmp_path / "config.yaml"
    path.write_text("seed: 1\n")

    with pytest.raises(InputFormatError):
        cli.load_defaults(path)


def test_build_config_precedence(lab, monkeypatch):
    """
    arrange: Set the thread variable and pass --seed.
    act: Build the config.
    assert: The command line beats the defaults and the environment sets threads.
    """
    monkeypatch.setenv(THREADS_ENV_VAR, "3")
    args = lab.parser.parse_args(["verify", "graph", "--seed", "9"])

    config = cli.build_config(args, DEFAULTS)

    assert config.seed == 9
    assert config.samples == 30
    assert config.threads == 3


def test_bad_thread_variable_is_a_usage_error(lab, monkeypatch, capsys):
    """
    arrange: Set the thread variable to a word.
    act: Run a command.
    assert: Exit code 2 with a message on stderr.
    """
    monkeypatch.setenv(THREADS_ENV_VAR, "many")

    code = lab.run(["verify", "graph"])

    assert code == EXIT_USAGE
    assert "Invalid options" in capsys.readouterr().err


def test_invalid_option_value_is_a_usage_error(lab):
    """
    arrange: Take the command line.
    act: Run with a negative tolerance.
    assert: Exit code 2.
    """
    assert lab.run(["verify", "graph", "--tol", "-1"]) == EXIT_USAGE


@pytest.mark.parametrize(
    "request_, message",
    [
        pytest.param(cli.GenRequest("lu", 3, 3), "0 < k < n", id="k equals n"),
        pytest.param(cli.GenRequest("luw", 3, 2, m=1), "m ≥ k", id="m below k"),
        pytest.param(cli.GenRequest("luw", 3, 1, m=3, n_prime=4), "cannot hold", id="small n'"),
        pytest.param(cli.GenRequest("doubled", 3, 1, n_prime=5), "even", id="odd n'"),
        pytest.param(cli.GenRequest("collapse", 3, 1, m=4), "0 < m", id="large m"),
    ],
)
def test_generate_rejects_inconsistent_parameters(request_, message):
    """
    arrange: Take requests with inconsistent parameters.
    act: Generate.
    assert: InvalidParameterError names the problem.
    """
    with pytest.raises(InvalidParameterError, match=message):
        cli.generate(request_)


def test_generate_padded_defaults():
    """
    arrange: Ask for luw without m or n'.
    act: Generate.
    assert: m = k + 1 inside C^(n + 2), with the matching ground truth.
    """
    operator, truth = cli.generate(cli.GenRequest("luw", 3, 1, sigma=Sigma.CONJUGATION))

    assert (operator.n, operator.n_prime, operator.m) == (3, 5, 2)
    assert truth.padding.rank == 1
    assert truth.isometry.sigma is Sigma.CONJUGATION


def test_generate_doubled():
    """
    arrange: Ask for a doubled operator on C^2.
    act: Generate.
    assert: It lands in C^4 with m = 2k.
    """
    operator, truth = cli.generate(cli.GenRequest("doubled", 2, 1))

    assert operator.n_prime == 4
    assert truth.m == 2


def test_generate_complemented_conjugation():
    """
    arrange: Ask for lperp-lu on C^4 with k = 2.
    act: Generate.
    assert: The operator stays on C^4 with m = n − k and the truth keeps U.
    """
    operator, truth = cli.generate(cli.GenRequest("lperp-lu", 4, 2, seed=3))

    assert (operator.n, operator.n_prime, operator.k, operator.m) == (4, 4, 2, 2)
    assert truth.m == 2
    assert truth.isometry.target_dim == 4


def test_gen_writes_operator_and_truth(lab, tmp_path):
    """
    arrange: Pick an output path.
    act: Generate a conjugate-linear L_U.
    assert: Exit 0, the operator file loads and a ground truth sidecar sits next to it.
    """
    out = tmp_path / "lu.json"

    code = lab.run(["gen", "lu", "--n", "4", "--k", "2", "--sigma", "conj", "--out", str(out)])

    assert code == EXIT_OK
    operator = OperatorMap.model_validate_json(out.read_text())
    truth = GroundTruth.model_validate_json((tmp_path / "lu.json.truth.json").read_text())
    assert (operator.n, operator.k, operator.m) == (4, 2, 2)
    assert truth.kind == "lu"
    assert truth.isometry.sigma is Sigma.CONJUGATION


def test_gen_is_deterministic(lab, tmp_path):
    """
    arrange: Pick two output paths.
    act: Generate the same operator twice with the same seed.
    assert: The files are byte identical.
    """
    first, second = tmp_path / "a.json", tmp_path / "b.json"

    for path in (first, second):
        lab.run(["gen", "luw", "--n", "3", "--k", "1", "--seed", "5", "--out", str(path)])

    assert first.read_bytes() == second.read_bytes()


def test_gen_usage_error(lab, tmp_path):
    """
    arrange: Pick k = n.
    act: Generate.
    assert: Exit code 2 and no file.
    """
    out = tmp_path / "bad.json"

    assert lab.run(["gen", "lperp", "--n", "2", "--k", "2", "--out", str(out)]) == EXIT_USAGE
    assert not out.exists()


def test_check_passes_for_conjugation(lab, tmp_path, capsys):
    """
    arrange: Generate L_U with n = 4, k = 2, sigma = conj.
    act: Check it.
    assert: Exit 0 with m = 2 and three passing reports.
    """
    out = tmp_path / "lu.json"
    lab.run(["gen", "lu", "--n", "4", "--k", "2", "--sigma", "conj", "--out", str(out)])
    capsys.readouterr()

    code = lab.run(["check", "--in", str(out)])

    summary = json.loads(capsys.readouterr().out)
    assert code == EXIT_OK
    assert summary["passed"] and summary["inferred_m"] == 2
    assert [report["condition"] for report in summary["reports"]] == ["L1", "L2", "L3"]


def test_check_orthocomplement(lab, tmp_path, capsys):
    """
    arrange: Generate L⊥ with n = 4, k = 1.
    act: Check it.
    assert: Rank k projections go to rank n − k projections.
    """
    out = tmp_path / "lperp.json"
    lab.run(["gen", "lperp", "--n", "4", "--k", "1", "--out", str(out)])
    capsys.readouterr()

    lab.run(["check", "--in", str(out)])

    assert json.loads(capsys.readouterr().out)["inferred_m"] == 3


def test_check_fails_for_collapse(lab, tmp_path, capsys):
    """
    arrange: Generate a collapse with n = 3, k = 1.
    act: Check it.
    assert: Exit 1 with L2 failed.
    """
    out = tmp_path / "collapse.json"
    lab.run(["gen", "collapse", "--n", "3", "--k", "1", "--out", str(out)])
    capsys.readouterr()

    code = lab.run(["check", "--in", str(out)])

    reports = {r["condition"]: r["passed"] for r in json.loads(capsys.readouterr().out)["reports"]}
    assert code == EXIT_FAILURE
    assert reports["L1"] and not reports["L2"]


def test_check_skips_L3_after_L1_failure(lab, tmp_path, capsys):
    """
    arrange: Write half the identity on C^2 with k = 1.
    act: Check it.
    assert: Exit 1 and only L1 and L2 are reported.
    """
    path = tmp_path / "half.json"
    path.write_text(OperatorMap(n=2, n_prime=2, k=1, matrix=0.5 * np.eye(4)).model_dump_json())

    code = lab.run(["check", "--in", str(path)])

    summary = json.loads(capsys.readouterr().out)
    assert code == EXIT_FAILURE
    assert [report["condition"] for report in summary["reports"]] == ["L1", "L2"]


def test_check_needs_k(lab, tmp_path):
    """
    arrange: Write an operator without a recorded k.
    act: Check it without --k.
    assert: Exit code 2.
    """
    path = tmp_path / "identity.json"
    path.write_text(OperatorMap(n=2, n_prime=2, matrix=np.eye(4)).model_dump_json())

    assert lab.run(["check", "--in", str(path)]) == EXIT_USAGE


@pytest.mark.parametrize(
    "content",
    [pytest.param(None, id="missing"), pytest.param("{not json", id="malformed")],
)
def test_check_bad_input_file(lab, tmp_path, content):
    """
    arrange: Point at a missing or malformed file.
    act: Check it.
    assert: Exit code 2.
    """
    path = tmp_path / "operator.json"
    if content is not None:
        path.write_text(content)

    assert lab.run(["check", "--in", str(path), "--k", "1"]) == EXIT_USAGE


def test_decompose_padded_operator(lab, tmp_path, capsys):
    """
    arrange: Generate L_UW with n = 3, k = 1, m = 2.
    act: Decompose it.
    assert: Exit 0 with a W augmented classification and aliased U and W.
    """
    out = tmp_path / "luw.json"
    lab.run(["gen", "luw", "--n", "3", "--k", "1", "--m", "2", "--out", str(out)])
    capsys.readouterr()

    code = lab.run(["decompose", "--in", str(out)])

    result = json.loads(capsys.readouterr().out)
    assert code == EXIT_OK
    assert result["tag"] == "WAugmented"
    assert result["W"]["rank"] == 1
    assert result["U"]["sigma"] == "id"


def test_decompose_rejection_exit_code(lab, tmp_path, capsys):
    """
    arrange: Generate a collapse.
    act: Decompose it.
    assert: Exit 1 with a rejection for L2.
    """
    out = tmp_path / "collapse.json"
    lab.run(["gen", "collapse", "--n", "3", "--k", "1", "--out", str(out)])
    capsys.readouterr()

    code = lab.run(["decompose", "--in", str(out)])

    result = json.loads(capsys.readouterr().out)
    assert code == EXIT_FAILURE
    assert (result["tag"], result["reason"]) == ("Rejected", "L2")


def test_xset_orthogonal_lines(lab, tmp_path, capsys):
    """
    arrange: Write orthogonal lines of C^2.
    act: Analyze X_1(X, Y).
    assert: Compatible full interval of local dimension 2.
    """
    first = write_frame(tmp_path / "x.json", [[1], [0]])
    second = write_frame(tmp_path / "y.json", [[0], [1]])

    code = lab.run(["xset", str(first), str(second), "--count", "3"])

    report = json.loads(capsys.readouterr().out)
    assert code == EXIT_OK
    assert report["classification"] == "CompatibleFullInterval"
    assert report["count"] == 3
    assert {"X", "Y"} <= set(report["sample"])
    assert all(entry == {"jacobian": 2, "pca": 2} for entry in report["local_dimensions"])


def test_xset_identical_frames(lab, tmp_path, capsys):
    """
    arrange: Write the same plane twice.
    act: Analyze X_2(X, X).
    assert: A single member of local dimension 0.
    """
    plane = write_frame(tmp_path / "x.json", np.eye(3)[:, :2])

    lab.run(["xset", str(plane), str(plane)])

    report = json.loads(capsys.readouterr().out)
    assert report["count"] == 1
    assert report["local_dimensions"] == [{"jacobian": 0, "pca": 0}]


def test_xset_usage_errors(lab, tmp_path):
    """
    arrange: Write a line and a plane.
    act: Analyze them, and a valid pair with --count 0.
    assert: Exit code 2 both times.
    """
    line = write_frame(tmp_path / "line.json", [[1], [0], [0]])
    plane = write_frame(tmp_path / "plane.json", np.eye(3)[:, :2])

    assert lab.run(["xset", str(line), str(plane)]) == EXIT_USAGE
    assert lab.run(["xset", str(line), str(line), "--count", "0"]) == EXIT_USAGE


def test_verify_prints_summary(lab, mocker, capsys):
    """
    arrange: Replace the suite runner with a failing summary.
    act: Run verify.
    assert: The summary is printed and the exit code is 1.
    """
    summary = SuiteSummary(
        suite="graph",
        seed=1,
        properties={"distance_formula": PropertyTally(passed=1, total=2)},
        ok=False,
    )
    runner = mocker.patch("cli.run_suite", return_value=summary)

    code = lab.run(["verify", "graph", "--seed", "4"])

    assert code == EXIT_FAILURE
    assert runner.call_args.args[0] == "graph"
    assert runner.call_args.args[1].seed == 4
    assert json.loads(capsys.readouterr().out)["properties"]["distance_formula"]["total"] == 2


def test_unknown_suite_is_rejected_by_the_parser(lab):
    """
    arrange: Take the command line.
    act: Ask for an unknown suite.
    assert: argparse exits with code 2.
    """
    with pytest.raises(SystemExit) as exc_info:
        lab.run(["verify", "nonsense"])

    assert exc_info.value.code == EXIT_USAGE


def test_main_exits_with_handler_code(mocker):
    """
    arrange: Replace the command line runner.
    act: Call main.
    assert: It exits with the runner's code.
    """
    mocker.patch.object(cli.WignerLabCli, "run", return_value=EXIT_FAILURE)

    with pytest.raises(SystemExit) as exc_info:
        cli.main()

    assert exc_info.value.code == EXIT_FAILURE
