import numpy as np
import pytest

from qcurv import errors, io
from qcurv.bubbles import bubble_field
from qcurv.flow import (
    FlowOptions,
    flow_run,
    kazdan_warner_integral,
    peak_ratio,
    subcritical_branch,
    subcritical_solve,
)
from qcurv.spectral import beckner_constant, constant_field, zero_field
from qcurv.sphere import north_pole


class TestFlowOptions:
    @pytest.mark.parametrize(
        "kwargs",
        [{"tol": 0.0}, {"armijo_c1": 1.5}, {"max_iter": 0}, {"check_every": 0}],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(errors.ParameterDomainError):
            _ = FlowOptions(**kwargs)

    def test_lambda_threshold(self):
        assert FlowOptions().lambda_threshold(32) == 4.0
        assert FlowOptions().lambda_threshold(16384) == 1e3
        assert FlowOptions(concentration_lambda=50.0).lambda_threshold(32) == 50.0


class TestFlowRun:
    def test_unit_k_converges(self, perturbed_constant):
        options = FlowOptions(detect_concentration=False)
        result = flow_run(perturbed_constant, 1.0, 0.25, options)
        assert result.status == "converged"
        assert result.gradient_norm_history[-1] < 1e-8
        assert result.final_level == pytest.approx(beckner_constant(3, 0.25), rel=1e-6)
        assert result.diagnostics["kazdan_warner_ok"] is True
        for j in range(1, 5):
            assert abs(kazdan_warner_integral(result.final_field, 1.0, 0.25, j).normalized) < 1e-5

    def test_level_history_non_increasing(self, perturbed_constant, linear_k):
        options = FlowOptions(max_iter=150, detect_concentration=False)
        result = flow_run(perturbed_constant, linear_k, 0.25, options)
        levels = np.asarray(result.level_history)
        assert levels.size == result.step_count + 1
        assert np.all(np.diff(levels) <= 0.0)
        assert result.final_level == pytest.approx(result.diagnostics["level_exact"], rel=1e-8)

    def test_max_iterations(self, perturbed_constant, linear_k):
        result = flow_run(perturbed_constant, linear_k, 0.25, FlowOptions(max_iter=3))
        assert result.status == "max_iterations"
        assert result.step_count == 3
        assert result.diagnostics["stalled"] is False

    def test_trace(self, perturbed_constant, linear_k, tmp_path):
        path = tmp_path / "trace.csv"
        options = FlowOptions(
            max_iter=5, detect_concentration=False, trace_path=path, trace_meta={"seed": 0}
        )
        result = flow_run(perturbed_constant, linear_k, 0.25, options)
        rows = list(io.read_csv(path))
        assert len(rows) == result.step_count + 1
        assert [row["step"] for row in rows] == [str(i) for i in range(len(rows))]
        assert io.read_meta(path) == {"seed": "0"}

    def test_to_dict(self, perturbed_constant, linear_k):
        result = flow_run(perturbed_constant, linear_k, 0.25, FlowOptions(max_iter=2))
        report = result.to_dict()
        assert report["status"] == "max_iterations"
        assert report["field"] == {"n": 3, "L": 16, "zonal": True}

    def test_zero_field(self, linear_k):
        with pytest.raises(errors.DegenerateInputError):
            _ = flow_run(zero_field(3, 8, True), linear_k, 0.25)

    def test_resting_bubble_beyond_threshold(self):
        # K = 1 makes every bubble a solution; only the threshold separates the outcomes
        u0 = bubble_field(north_pole(3), 3.0, 3, 0.25, 32)
        below = flow_run(u0, 1.0, 0.25, FlowOptions(max_iter=50, concentration_lambda=5.0))
        assert below.status == "converged"
        assert below.diagnostics["resolution_limited"] is False
        assert below.diagnostics["kazdan_warner_ok"] is True
        above = flow_run(u0, 1.0, 0.25, FlowOptions(max_iter=50, concentration_lambda=2.0))
        assert above.status == "concentrated"
        assert above.diagnostics["resolution_limited"] is True
        params, _ = above.bubble_fit
        assert params.lambdas.max() == pytest.approx(3.0, rel=1e-3)
        assert "kazdan_warner" not in above.diagnostics

    def test_subcritical_skips_final_fit(self):
        result = subcritical_solve(1.0, 0.25, 0.1, n=3, L=32)
        assert result.status == "converged"
        assert result.diagnostics["concentration_checks"] == []
        assert "kazdan_warner" not in result.diagnostics

    @pytest.mark.slow
    @pytest.mark.parametrize("check_every", [None, 10])
    def test_linear_k_concentrates(self, linear_k, coordinate_field, check_every):
        u0 = constant_field(3, 32, True, 1.0) + 0.1 * coordinate_field(3, 32, True)
        options = FlowOptions() if check_every is None else FlowOptions(check_every=check_every)
        result = flow_run(u0, linear_k, 0.25, options)
        assert result.status == "concentrated"
        params, fit = result.bubble_fit
        assert params.lambdas.max() > options.lambda_threshold(32)
        # the bubble sits at the maximum of K
        assert params.centers[int(np.argmax(params.lambdas))].coords[-1] == pytest.approx(1.0)
        assert np.all(np.diff(result.level_history) <= 0.0)


class TestSubcritical:
    def test_exponent_range(self, linear_k):
        with pytest.raises(errors.ParameterDomainError):
            _ = subcritical_solve(linear_k, 0.25, 0.5, L=8)
        with pytest.raises(errors.ParameterDomainError):
            _ = subcritical_solve(linear_k, 0.25, 0.0, L=8)

    def test_needs_dimension(self):
        with pytest.raises(errors.ConfigurationError):
            _ = subcritical_solve(1.0, 0.25, 0.1)

    def test_constant_is_critical(self):
        result = subcritical_solve(1.0, 0.25, 0.1, n=3, L=8)
        assert result.status == "converged"
        assert result.step_count == 0
        assert result.diagnostics["exponent"] == pytest.approx(2.3)

    def test_linear_k_solves(self, linear_k):
        options = FlowOptions(detect_concentration=False)
        result = subcritical_solve(linear_k, 0.25, 0.2, options, L=16)
        assert result.status == "converged"
        assert peak_ratio(result.final_field) > 1.0

    @pytest.mark.slow
    def test_warm_start(self, linear_k):
        options = FlowOptions(detect_concentration=False)
        eps = [0.3, 0.25]
        warm = subcritical_branch(linear_k, 0.25, eps, options, L=16, warm_start=True)
        cold = subcritical_branch(linear_k, 0.25, eps, options, L=16, warm_start=False)
        assert all(point.result.status == "converged" for point in warm + cold)
        assert warm[1].result.step_count < cold[1].result.step_count
        assert warm[1].level == pytest.approx(cold[1].level, rel=1e-8)


def test_peak_ratio_of_constant():
    assert peak_ratio(constant_field(3, 8, True, 2.0)) == pytest.approx(1.0)
