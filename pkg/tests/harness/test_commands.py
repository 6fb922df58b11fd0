import pytest

from qcurv import errors
from qcurv.flow import FlowResult
from qcurv.harness import commands, exit_status, parse_config, run_command
from qcurv.io import read_csv, read_json, read_meta
from qcurv.spectral import conformal_constant

RUN = "[run]\nn = 3\nsigma = 0.25\nL = 8\n"


def _config(extra=""):
    return parse_config(RUN + extra)


class TestSpectrum:
    def test_outputs(self, tmp_path):
        config = _config()
        assert run_command("spectrum", config, tmp_path) == commands.EXIT_SUCCESS
        rows = list(read_csv(tmp_path / "spectrum.csv"))
        assert len(rows) == 11
        assert float(rows[0]["eigenvalue"]) == pytest.approx(conformal_constant(3, 0.25), rel=1e-14)
        assert [int(row["multiplicity"]) for row in rows[:4]] == [1, 4, 9, 16]
        eigenvalues = [float(row["eigenvalue"]) for row in rows]
        assert eigenvalues == sorted(eigenvalues)
        meta = read_meta(tmp_path / "spectrum.csv")
        assert meta["config_digest"] == config.digest
        assert meta["seed"] == "0"
        summary = read_json(tmp_path / "constants.json")
        assert summary["meta"]["config_digest"] == config.digest
        assert summary["conformal_constant"] == pytest.approx(conformal_constant(3, 0.25))

    def test_reproducible(self, tmp_path):
        config = _config()
        for name in ("a", "b"):
            assert run_command("spectrum", config, tmp_path / name) == commands.EXIT_SUCCESS
        assert (tmp_path / "a" / "spectrum.csv").read_bytes() == (
            tmp_path / "b" / "spectrum.csv"
        ).read_bytes()

    def test_negative_kmax(self, tmp_path):
        config = _config("[spectrum]\nkmax = -1\n")
        assert run_command("spectrum", config, tmp_path) == commands.EXIT_CONFIG


def test_bubble_residual(tmp_path):
    config = _config("[bubble-residual]\nlambda = 2.0\ntruncations = 8, 16, 32\n")
    assert run_command("bubble-residual", config, tmp_path) == commands.EXIT_SUCCESS
    rows = list(read_csv(tmp_path / "bubble_residual.csv"))
    residuals = [float(row["residual"]) for row in rows]
    assert [int(row["L"]) for row in rows] == [8, 16, 32]
    assert residuals[2] < residuals[0]


class TestExistence:
    def test_linear_k_is_negative(self, tmp_path):
        config = _config("[K]\nfamily = linear\n[existence]\nstarts = 20\n")
        assert run_command("existence", config, tmp_path) == commands.EXIT_NEGATIVE
        rows = list(read_csv(tmp_path / "critical_points.csv"))
        assert sorted(int(row["morse_index"]) for row in rows) == [0, 3]
        report = read_json(tmp_path / "existence.json")["report"]
        assert report["pinching_ratio"] == pytest.approx(3.0)
        assert report["a1"] == 1
        assert not report["verdicts"]["multi_peak"]["holds"]
        assert not report["verdicts"]["index_count"]["holds"]

    def test_two_peak_k_holds(self, tmp_path):
        config = _config("[K]\nfamily = two-peak\nepsilon = 0.005\n[existence]\nstarts = 40\n")
        assert run_command("existence", config, tmp_path) == commands.EXIT_SUCCESS
        rows = list(read_csv(tmp_path / "critical_points.csv"))
        assert sorted(int(row["morse_index"]) for row in rows) == [0, 0, 1, 1, 2, 2, 3, 3]
        report = read_json(tmp_path / "existence.json")["report"]
        assert report["a1"] == 2
        assert report["verdicts"]["multi_peak"]["holds"]
        assert report["verdicts"]["index_count"]["holds"]

    def test_sigma_outside_hypothesis(self, tmp_path):
        config = parse_config("[run]\nn = 3\nsigma = 0.6\n[existence]\nstarts = 4\n")
        assert run_command("existence", config, tmp_path) == commands.EXIT_CONFIG


FLOW_RUN = "[run]\nn = 3\nsigma = 0.25\nL = 16\n"


class TestFlow:
    def test_iteration_cap(self, tmp_path):
        config = _config("[K]\nfamily = linear\n[flow]\nmax_iter = 3\n")
        assert run_command("flow", config, tmp_path) == commands.EXIT_NEGATIVE
        report = read_json(tmp_path / "flow_report.json")
        assert report["meta"]["config_digest"] == config.digest
        assert "kazdan_warner" not in report
        assert (tmp_path / "flow_final.field").exists()
        assert (tmp_path / "flow_trace.csv").exists()

    def test_unit_k_converges(self, tmp_path):
        config = parse_config(FLOW_RUN + "[flow]\ntrace = false\n", command="flow")
        assert run_command("flow", config, tmp_path) == commands.EXIT_SUCCESS
        report = read_json(tmp_path / "flow_report.json")
        assert report["result"]["status"] == "converged"
        assert report["kazdan_warner_ok"] is True
        assert len(report["kazdan_warner"]) == 4
        assert not (tmp_path / "flow_trace.csv").exists()

    def test_failed_kazdan_warner_gate_is_negative(self, tmp_path, monkeypatch):
        def resting(u0, K, sigma, options):
            return FlowResult(
                "converged", u0, [1.0], [0.0], 0, diagnostics={"kazdan_warner_ok": False}
            )

        monkeypatch.setattr(commands, "flow_run", resting)
        config = parse_config(FLOW_RUN + "[K]\nfamily = linear\n", command="flow")
        assert run_command("flow", config, tmp_path) == commands.EXIT_NEGATIVE
        report = read_json(tmp_path / "flow_report.json")
        assert report["result"]["status"] == "converged"
        assert report["kazdan_warner_ok"] is False

    def test_non_zonal_k_rejected(self, tmp_path):
        text = FLOW_RUN + "[K]\nfamily = two-peak\n"
        with pytest.raises(errors.ConfigurationError, match="line 6: .*axially symmetric"):
            _ = parse_config(text, command="flow")
        assert run_command("flow", parse_config(text), tmp_path) == commands.EXIT_CONFIG

    @pytest.mark.slow
    def test_linear_k_concentrates(self, tmp_path):
        config = parse_config(
            "[run]\nn = 3\nsigma = 0.25\nL = 32\n[K]\nfamily = linear\n", command="flow"
        )
        assert run_command("flow", config, tmp_path) == commands.EXIT_SUCCESS
        report = read_json(tmp_path / "flow_report.json")
        assert report["result"]["status"] == "concentrated"
        assert report["result"]["bubble_fit"]["params"]
        assert "kazdan_warner" not in report


def test_numerical_failure_writes_diagnostics(tmp_path, monkeypatch):
    def failing(*args, **kwargs):
        raise errors.CalibrationError("residual too large", {"worst_residual": 1.0})

    monkeypatch.setattr(commands, "calibrate_constants", failing)
    assert run_command("expansion-verify", _config(), tmp_path) == commands.EXIT_NUMERICAL
    failure = read_json(tmp_path / "expansion-verify_failure.json")
    assert failure["error"] == "CalibrationError"
    assert failure["diagnostics"] == {"worst_residual": 1.0}


def test_unknown_command(tmp_path):
    assert run_command("plot", _config(), tmp_path) == commands.EXIT_CONFIG


@pytest.mark.parametrize(
    "exc, status",
    [
        (errors.ConfigurationError("x"), 2),
        (errors.HypothesisError("x"), 2),
        (errors.ParameterDomainError("x"), 2),
        (errors.CalibrationError("x"), 3),
        (errors.NondegeneracyError("x"), 3),
        (errors.IncompleteInventoryError("x"), 3),
    ],
)
def test_exit_status(exc, status):
    assert exit_status(exc) == status
