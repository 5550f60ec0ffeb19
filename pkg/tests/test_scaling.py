import numpy as np
import numpy.testing as npt
import pytest

from ptzgs.errors import ValidationError
from ptzgs.scaling import ScalingSpec, StageSchedule, envelope, rho, rho_ratio


class TestRho:
    def test_one_at_start(self):
        spec = ScalingSpec(0.0, 0.3, 2.3)
        assert rho(spec, 0.0) == 1.0

    def test_direct_substitution(self):
        spec = ScalingSpec(0.0, 1.0, 2.0)
        assert rho(spec, 0.5) == pytest.approx(4.0)

    def test_one_after_deadline(self):
        spec = ScalingSpec(0.0, 1.0, 2.0)
        assert rho(spec, 6.0) == 1.0

    def test_one_before_start(self):
        spec = ScalingSpec(2.0, 1.0, 2.0)
        assert rho(spec, 1.0) == 1.0
        assert rho(spec, 2.0) == 1.0

    def test_grows_unboundedly_towards_deadline(self):
        spec = ScalingSpec(0.0, 0.3, 2.3)
        assert rho(spec, 0.3 - 3e-5) > 1e9

    def test_vectorized_matches_scalar(self):
        spec = ScalingSpec(0.5, 0.3, 2.3)
        ts = np.array([0.0, 0.5, 0.6, 0.79, 0.81, 5.0])
        npt.assert_allclose(rho(spec, ts), [rho(spec, float(t)) for t in ts])

    def test_continuous_at_start(self):
        spec = ScalingSpec(1.0, 0.5, 3.0)
        assert rho(spec, 1.0) == 1.0
        assert rho(spec, 1.0 + 1e-12) == pytest.approx(1.0, rel=1e-9)

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValidationError):
            ScalingSpec(0.0, 0.0, 1.0)
        with pytest.raises(ValidationError):
            ScalingSpec(0.0, 1.0, -2.0)


class TestRhoRatio:
    def test_value_at_start(self):
        spec = ScalingSpec(0.0, 0.3, 2.3)
        assert rho_ratio(spec, 0.0) == pytest.approx(2.3 / 0.3)

    def test_near_deadline_example(self):
        spec = ScalingSpec(0.0, 0.3, 2.3)
        assert rho_ratio(spec, 0.29) == pytest.approx(230.0, rel=1e-12)

    def test_zero_outside_window(self):
        spec = ScalingSpec(1.0, 0.5, 2.0)
        assert rho_ratio(spec, 0.5) == 0.0
        assert rho_ratio(spec, 1.5) == 0.0
        assert rho_ratio(spec, 7.0) == 0.0

    def test_vectorized_matches_scalar(self):
        spec = ScalingSpec(0.2, 0.4, 1.7)
        ts = np.array([0.0, 0.2, 0.3, 0.59, 0.6, 1.0])
        npt.assert_allclose(rho_ratio(spec, ts), [rho_ratio(spec, float(t)) for t in ts])

    def test_matches_finite_difference_log_derivative(self):
        spec = ScalingSpec(0.1, 0.7, 2.5)
        step = 1e-7 * spec.duration
        ts = np.linspace(spec.t_start + 0.01 * spec.duration,
                         spec.t_start + 0.99 * spec.duration, 100)
        for t in ts:
            fd = (rho(spec, t + step) - rho(spec, t - step)) / (2.0 * step * rho(spec, t))
            assert rho_ratio(spec, t) == pytest.approx(fd, rel=1e-6)

    def test_monotonically_increasing_on_window(self):
        spec = ScalingSpec(0.0, 1.0, 2.0)
        ts = np.linspace(0.0, 1.0 - 1e-6, 500)
        vals = rho_ratio(spec, ts)
        assert np.all(np.diff(vals) > 0)


class TestEnvelope:
    def test_anchor_value(self):
        spec = ScalingSpec(0.0, 1.0, 2.0)
        assert envelope(spec, 0.0, kappa=0.5, alpha=2.0, V0=3.7) == pytest.approx(3.7)

    def test_matches_closed_form_decay(self):
        # alpha=2 with kappa > 0 is the closed form rho^-2 exp(-kappa (t - t0))
        spec = ScalingSpec(0.0, 1.0, 2.0)
        kappa = 1.0
        ts = np.linspace(0.0, 1.0 - 1e-4, 50)
        want = rho(spec, ts) ** (-2.0) * np.exp(-kappa * ts)
        npt.assert_allclose(envelope(spec, ts, kappa, 2.0, 1.0), want, rtol=1e-12)

    def test_vanishes_at_deadline(self):
        spec = ScalingSpec(0.0, 0.3, 2.3)
        assert envelope(spec, 0.3 - 3e-5, kappa=0.0, alpha=1.0, V0=1.0) < 1e-9

    def test_nonincreasing_on_window(self):
        spec = ScalingSpec(0.5, 0.8, 1.5)
        ts = np.linspace(0.5, 1.3 - 1e-6, 400)
        vals = envelope(spec, ts, kappa=0.3, alpha=0.7, V0=2.0)
        assert np.all(np.diff(vals) <= 0)

    def test_rejects_bad_arguments(self):
        spec = ScalingSpec(0.0, 1.0, 2.0)
        with pytest.raises(ValidationError):
            envelope(spec, 0.5, kappa=-1.0, alpha=1.0, V0=1.0)
        with pytest.raises(ValidationError):
            envelope(spec, 0.5, kappa=0.0, alpha=0.0, V0=1.0)
        with pytest.raises(ValidationError):
            envelope(spec, 0.5, kappa=0.0, alpha=1.0, V0=-2.0)


class TestStageSchedule:
    def test_two_stage_contiguity(self):
        sched = StageSchedule.two_stage(0.1, 3.0, 0.2, 2.5)
        assert sched.n_stages == 2
        assert sched.stages[1].t_start == pytest.approx(0.1)
        assert sched.final_deadline == pytest.approx(0.3)
        assert sched.deadlines == [pytest.approx(0.1), pytest.approx(0.3)]

    def test_guard_points(self):
        sched = StageSchedule.single_stage(0.3, 2.3, epsilon_rel=1e-4)
        assert sched.guard(0) == pytest.approx(0.3 - 1e-4 * 0.3)

    def test_rejects_gap_between_stages(self):
        stages = (ScalingSpec(0.0, 0.1, 3.0), ScalingSpec(0.2, 0.2, 2.5))
        with pytest.raises(ValidationError, match="contiguous"):
            StageSchedule(stages)

    def test_rejects_empty(self):
        with pytest.raises(ValidationError):
            StageSchedule(())

    def test_rejects_bad_epsilon(self):
        with pytest.raises(ValidationError):
            StageSchedule.single_stage(0.3, 2.3, epsilon_rel=0.0)

    def test_nonzero_start(self):
        sched = StageSchedule.two_stage(0.1, 3.0, 0.2, 2.5, t0=1.0)
        assert sched.t0 == 1.0
        assert sched.final_deadline == pytest.approx(1.3)
        assert rho_ratio(sched.stages[0], 0.9) == 0.0
        assert rho_ratio(sched.stages[0], 1.0) == pytest.approx(30.0)
