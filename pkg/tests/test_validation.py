import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bridgesampler import (
    ConfigError,
    DomainError,
    GaussianConditionalModel,
    GaussianSummary,
    OraclePredictor,
    affine_flow_coefficients,
    affine_flow_field,
    check_theorem1,
    check_theorem2,
    check_theorem3,
    coeffs,
    convergence_study,
    expected_kl_start,
    expected_kl_start_mc,
    fit_order,
    gaussian_flow_oracle,
    kl_gaussian,
    make_time_grid,
    marginal_score_exact,
    optimal_gaussian_projection,
    pf_ode_drift,
    rk4_path,
    sample_batch,
    start_summary,
    wasserstein1_1d,
)

# Worked start-KL pair for q_data = N(0, 1), y = 2, tau = 0.9 on the unit
# Brownian bridge: the posterior start costs b^2 / (2 c^2) = 1/18 and the
# one-step start adds the variance mismatch between 0.1 and 0.09.
KL_POST_WORKED = 0.05555555555555556
KL_EM_WORKED = 0.058430853282197964


class TestKlGaussian:
    def test_identical_is_zero(self):
        p = GaussianSummary(mean=np.array([1.0, -2.0]), variance=np.array([0.5, 3.0]))
        assert kl_gaussian(p, p) == 0.0

    def test_mean_shift(self):
        p = GaussianSummary(mean=np.zeros(1), variance=np.ones(1))
        q = GaussianSummary(mean=np.ones(1), variance=np.ones(1))
        assert kl_gaussian(p, q) == pytest.approx(0.5, rel=1e-15)

    def test_variance_ratio(self):
        p = GaussianSummary(mean=np.zeros(1), variance=np.array([2.0]))
        q = GaussianSummary(mean=np.zeros(1), variance=np.ones(1))
        assert kl_gaussian(p, q) == pytest.approx(0.5 * (1.0 - np.log(2.0)), rel=1e-14)

    def test_degenerate_variance_rejected(self):
        p = GaussianSummary(mean=np.zeros(1), variance=np.ones(1))
        q = GaussianSummary(mean=np.zeros(1), variance=np.zeros(1))
        with pytest.raises(DomainError):
            kl_gaussian(p, q)

    def test_shape_mismatch_rejected(self):
        p = GaussianSummary(mean=np.zeros(1), variance=np.ones(1))
        q = GaussianSummary(mean=np.zeros(2), variance=np.ones(2))
        with pytest.raises(DomainError):
            kl_gaussian(p, q)

    @given(
        m1=st.floats(-5, 5),
        m2=st.floats(-5, 5),
        v1=st.floats(0.01, 10),
        v2=st.floats(0.01, 10),
    )
    @settings(max_examples=60, deadline=None)
    def test_nonnegative(self, m1, m2, v1, v2):
        p = GaussianSummary(mean=np.array([m1]), variance=np.array([v1]))
        q = GaussianSummary(mean=np.array([m2]), variance=np.array([v2]))
        assert kl_gaussian(p, q) >= 0.0


class TestStartSummary:
    def test_post_worked(self, gauss1, bb):
        summ = start_summary(gauss1, bb, np.array([2.0]), 0.9, "post")
        assert summ.mean[0] == pytest.approx(1.8, rel=1e-14)
        assert summ.variance[0] == pytest.approx(0.09, rel=1e-12)

    def test_em_worked(self, gauss1, bb):
        summ = start_summary(gauss1, bb, np.array([2.0]), 0.9, "em")
        assert summ.mean[0] == pytest.approx(1.8, rel=1e-12)
        assert summ.variance[0] == pytest.approx(0.1, rel=1e-12)

    def test_rejections(self, gauss1, bb):
        with pytest.raises(ConfigError):
            start_summary(gauss1, bb, np.array([2.0]), 0.9, "midpoint")
        for tau in (0.0, bb.T, -0.1):
            with pytest.raises(ConfigError):
                start_summary(gauss1, bb, np.array([2.0]), tau, "post")


class TestExpectedKlStart:
    def test_worked_pair(self, gauss1, bb):
        y = np.array([2.0])
        assert expected_kl_start(gauss1, bb, y, 0.9, "post") == pytest.approx(
            KL_POST_WORKED, rel=1e-12
        )
        assert expected_kl_start(gauss1, bb, y, 0.9, "em") == pytest.approx(
            KL_EM_WORKED, rel=1e-12
        )

    def test_point_mass_limit(self, bb):
        model = GaussianConditionalModel.isotropic(1, mean_offset=0.5, var=1e-12)
        assert expected_kl_start(model, bb, np.array([2.0]), 0.9, "post") < 1e-10

    def test_mixture_rejected(self, mixture1, bb):
        with pytest.raises(TypeError):
            expected_kl_start(mixture1, bb, np.array([1.0]), 0.5, "post")

    @pytest.mark.parametrize("kind", ["post", "em"])
    def test_monte_carlo_agrees(self, gauss2, bb, kind):
        y = np.full(2, 2.0)
        closed = expected_kl_start(gauss2, bb, y, 0.7, kind)
        mc = expected_kl_start_mc(gauss2, bb, y, 0.7, kind, 10**6, np.random.default_rng(5))
        assert mc == pytest.approx(closed, rel=0.01)


class TestTheorem1:
    @pytest.mark.parametrize("schedule", ["bb", "vp"])
    def test_passes_on_both_schedules(self, schedule, bb, vp, gauss2):
        s = bb if schedule == "bb" else vp
        report = check_theorem1(gauss2, s, np.full(2, 2.0))
        assert report.passed
        errors = report.series["error"]
        # Epsilons fall by decades, so first-order approach means the error
        # ratio between neighbours sits near 10.
        for e1, e2 in zip(errors, errors[1:]):
            assert 5.0 < e1 / e2 < 20.0

    def test_degenerate_condition(self, gauss2, bb):
        # y = 2/3 solves y = 0.25 y + 0.5: the drift limit is exactly zero
        # and every evaluation lands on it to roundoff.
        report = check_theorem1(gauss2, bb, 2.0 / 3.0)
        assert report.passed
        assert "floor" in report.note
        assert max(report.series["error"]) < 1e-12

    def test_ascending_epsilons_fail(self, gauss2, bb):
        report = check_theorem1(gauss2, bb, np.full(2, 2.0), epsilons=(1e-5, 1e-4, 1e-3, 1e-2))
        assert not report.passed
        assert "monotonically" in report.note


class TestTheorem2:
    @pytest.mark.parametrize("schedule", ["bb", "vp"])
    def test_passes_on_both_schedules(self, schedule, bb, vp, gauss2):
        s = bb if schedule == "bb" else vp
        report = check_theorem2(gauss2, s, np.full(2, 2.0), np.random.default_rng(3))
        assert report.passed
        norms = report.series["drift_norm"]
        assert norms[-1] > 10.0 * norms[0]

    def test_zero_noise_exception(self, gauss2, bb):
        report = check_theorem2(
            gauss2, bb, np.full(2, 2.0), np.random.default_rng(0), z=np.zeros(2)
        )
        assert report.passed
        assert "measure-zero" in report.note


class TestTheorem3:
    def test_strict_improvement(self, gauss2, bb):
        taus = np.linspace(0.1, 0.9, 9)
        report = check_theorem3(gauss2, bb, [-2.0, -0.5, 0.5, 1.0, 2.0], taus)
        assert report.passed
        assert min(report.series["gap"]) > 0.0

    def test_forced_post_comparator(self, gauss2, bb):
        report = check_theorem3(gauss2, bb, [2.0], [0.3, 0.6, 0.9], comparator="post")
        assert report.passed
        assert "comparator forced to post" in report.note
        assert max(abs(g) for g in report.series["gap"]) <= 1e-15

    def test_unknown_comparator(self, gauss2, bb):
        with pytest.raises(ConfigError):
            check_theorem3(gauss2, bb, [2.0], [0.5], comparator="sde")


class TestProjection:
    def test_recovers_closed_form(self, gauss1, bb):
        summ = optimal_gaussian_projection(gauss1, bb, np.array([2.0]), 0.9)
        assert summ.mean[0] == pytest.approx(1.8, abs=1e-8)
        assert summ.variance[0] == pytest.approx(0.09, abs=1e-8)

    def test_variance_independent_of_condition(self, gauss2, bb):
        v1 = optimal_gaussian_projection(gauss2, bb, np.full(2, -1.0), 0.6).variance
        v2 = optimal_gaussian_projection(gauss2, bb, np.full(2, 3.0), 0.6).variance
        assert np.allclose(v1, v2, rtol=1e-9)
        assert v1[0] == pytest.approx(coeffs(bb, 0.6).c2, abs=1e-8)

    def test_rejections(self, gauss1, mixture1, bb):
        with pytest.raises(TypeError):
            optimal_gaussian_projection(mixture1, bb, np.array([1.0]), 0.5)
        with pytest.raises(ConfigError):
            optimal_gaussian_projection(gauss1, bb, np.array([1.0]), bb.T)


class TestAffineFlow:
    @pytest.mark.parametrize("schedule", ["bb", "vp"])
    def test_matches_generic_drift(self, schedule, bb, vp, gauss2):
        s = bb if schedule == "bb" else vp
        y = np.full(2, 2.0)
        rng = np.random.default_rng(8)
        for _ in range(25):
            t = float(rng.uniform(0.05, 0.95)) * s.T
            x = rng.standard_normal(2) * 2.0
            M, v = affine_flow_coefficients(gauss2, s, y, t)
            score = marginal_score_exact(gauss2, x, y, t, s)
            generic = pf_ode_drift(s, x, y, t, score).value
            assert np.allclose(M * x + v, generic, rtol=1e-12, atol=1e-13)

    def test_defined_at_zero(self, gauss2, bb):
        M, v = affine_flow_coefficients(gauss2, bb, np.full(2, 2.0), 0.0)
        assert np.all(np.isfinite(M)) and np.all(np.isfinite(v))
        field = affine_flow_field(gauss2, bb, np.full(2, 2.0))
        assert np.all(np.isfinite(field(np.zeros(2), 0.0)))

    def test_rejections(self, gauss2, mixture1, bb):
        with pytest.raises(DomainError):
            affine_flow_coefficients(gauss2, bb, np.full(2, 2.0), bb.T)
        with pytest.raises(TypeError):
            affine_flow_coefficients(mixture1, bb, np.array([1.0]), 0.5)


class TestRk4Path:
    def test_decay_field(self):
        out = rk4_path(lambda x, t: -x, np.array([1.0]), 0.0, 1.0, 200)
        assert out[0] == pytest.approx(np.exp(-1.0), abs=1e-10)

    def test_step_count_contract(self):
        with pytest.raises(ConfigError):
            rk4_path(lambda x, t: -x, np.array([1.0]), 0.0, 1.0, 0)


class TestFlowOracle:
    def test_marginal_push_recovers_data_moments(self, gauss1, bb):
        # Transporting the exact pinned marginal from tau to 0 must land on
        # the data moments; only the final Euler sub-step perturbs it.
        y = np.array([2.0])
        cf = coeffs(bb, 0.9)
        marginal = GaussianSummary(
            mean=cf.a * y + cf.b * gauss1.mean0(y),
            variance=np.array([cf.c2 + cf.b**2 * float(gauss1.var[0])]),
        )
        out = gaussian_flow_oracle(gauss1, bb, y, marginal, 0.9, n_steps=4000)
        assert out.mean[0] == pytest.approx(0.0, abs=1e-7)
        assert out.variance[0] == pytest.approx(1.0, abs=1e-7)

    def test_posterior_push_contracts_variance(self, gauss1, bb):
        # Start variance c^2 is scaled by var0 / (c^2 + b^2 var0) on the way
        # down: 0.09 * 1 / 0.1 = 0.9 for the worked instance.
        y = np.array([2.0])
        start = start_summary(gauss1, bb, y, 0.9, "post")
        out = gaussian_flow_oracle(gauss1, bb, y, start, 0.9, n_steps=4000)
        assert out.variance[0] == pytest.approx(0.9, abs=1e-7)

    def test_zero_variance_stays_zero(self, gauss1, bb):
        y = np.array([2.0])
        start = GaussianSummary(mean=np.array([1.8]), variance=np.zeros(1))
        out = gaussian_flow_oracle(gauss1, bb, y, start, 0.9, n_steps=500)
        assert out.variance[0] == 0.0

    def test_rejections(self, gauss1, bb):
        start = GaussianSummary(mean=np.zeros(1), variance=np.ones(1))
        with pytest.raises(ConfigError):
            gaussian_flow_oracle(gauss1, bb, np.array([2.0]), start, bb.T)
        with pytest.raises(ConfigError):
            gaussian_flow_oracle(gauss1, bb, np.array([2.0]), start, 0.9, n_steps=1)


class TestFitOrder:
    def test_quadratic_errors(self):
        hs = np.array([0.1, 0.05, 0.025, 0.0125])
        assert fit_order(hs, hs**2) == pytest.approx(2.0, abs=1e-12)

    def test_rejections(self):
        with pytest.raises(DomainError):
            fit_order([0.1, 0.05], [1e-3, 0.0])
        with pytest.raises(DomainError):
            fit_order([0.1, 0.05, 0.025], [1e-3, 1e-4])


class TestConvergence:
    def test_bare_stepper_orders(self, gauss2, bb):
        rng = np.random.default_rng(0)
        sizes = (10, 20, 40, 80)
        heun = convergence_study("heun", gauss2, bb, np.full(2, 2.0), sizes, 1, rng)
        euler = convergence_study("euler", gauss2, bb, np.full(2, 2.0), sizes, 1, rng)
        assert 1.9 <= heun.order <= 2.1
        assert 0.9 <= euler.order <= 1.1

    def test_ode_leg_order(self, gauss2, bb):
        study = convergence_study(
            "odes3", gauss2, bb, np.full(2, 2.0), (8, 16, 32), 4, np.random.default_rng(17), tau=0.9
        )
        assert 1.7 <= study.order <= 2.3
        assert study.errors == sorted(study.errors, reverse=True)

    def test_sde_strong_order(self, gauss2, bb):
        study = convergence_study(
            "em_sde", gauss2, bb, np.full(2, 2.0), (8, 16, 32, 64), 4, np.random.default_rng(17)
        )
        assert 0.8 <= study.order <= 1.2

    def test_rejections(self, gauss2, bb):
        rng = np.random.default_rng(0)
        with pytest.raises(ConfigError):
            convergence_study("milstein", gauss2, bb, np.full(2, 2.0), (8, 16), 2, rng)
        with pytest.raises(ConfigError):
            convergence_study("em_sde", gauss2, bb, np.full(2, 2.0), (10, 100), 2, rng)


class TestWasserstein:
    def test_identical_samples(self):
        xs = np.array([0.3, -1.0, 2.0])
        assert wasserstein1_1d(xs, xs.copy()) == 0.0

    def test_unit_shift(self):
        assert wasserstein1_1d(np.zeros(2), np.ones(2)) == 1.0

    def test_rejections(self):
        with pytest.raises(DomainError):
            wasserstein1_1d(np.zeros(3), np.zeros(2))
        with pytest.raises(DomainError):
            wasserstein1_1d(np.array([]), np.array([]))

    def test_same_distribution_is_small(self):
        xs = np.random.default_rng(100).standard_normal(10**4)
        ys = np.random.default_rng(200).standard_normal(10**4)
        assert wasserstein1_1d(xs, ys) < 0.06


class TestHorizonLayerVariance:
    """The Heun leg's variance amplification is predictable step by step.

    For Gaussian data the leg integrates an affine field, so each Heun step
    multiplies the per-dimension standard deviation by a known scalar and the
    discrete output variance follows from a product.  Near the horizon the
    field's contraction rate scales like 1 / (T - t), which a uniform grid
    cannot resolve; the discrete variance therefore sits persistently above
    what the exact flow transports.  This test pins both facts: the product
    rule predicts the sampler's output variance to Monte Carlo accuracy, and
    the prediction exceeds the exact-flow push.
    """

    def test_discrete_variance_prediction(self, gauss2, bb):
        y = np.full(2, 2.0)
        grid = make_time_grid(bb, 64)
        tau = grid.tau

        def rate(t):
            return float(affine_flow_coefficients(gauss2, bb, y, t)[0][0])

        leg = grid.times[:-1][::-1]
        amp = 1.0
        for k in range(len(leg) - 2):
            t_from, t_to = float(leg[k]), float(leg[k + 1])
            h = t_to - t_from
            m0, m1 = rate(t_from), rate(t_to)
            amp *= 1.0 + 0.5 * h * (m0 + m1 + h * m0 * m1)
        amp *= 1.0 - float(leg[-2]) * rate(float(leg[-2]))
        predicted = coeffs(bb, tau).c2 * amp**2

        exact = gaussian_flow_oracle(
            gauss2, bb, y, start_summary(gauss2, bb, y, tau, "post"), tau, n_steps=2000
        )
        assert predicted > exact.variance[0]

        runs = 2000
        batch = sample_batch("odes3", OraclePredictor(gauss2, bb), y, grid, bb, 31415, runs)
        empirical = batch.x0.var(axis=0, ddof=1)
        band = 4.0 * predicted * np.sqrt(2.0 / (runs - 1))
        assert np.all(np.abs(empirical - predicted) < band)
