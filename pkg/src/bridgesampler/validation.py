"""Exact oracles and checkers that make the sampler's claims testable.

Everything here exists to compare sampler behaviour against quantities that
are computable in closed form for the analytic data models: horizon limits
of the SDE drift, divergence of the flow-ODE drift, expected start KLs, the
optimal Gaussian start projection, and moment transport through the flow
ODE (affine in the state for Gaussian data, hence exactly integrable).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .dynamics import (
    pf_ode_drift,
    reverse_sde_drift,
    reverse_sde_nonlinear,
    score_from_predictor,
    sde_limit_drift,
)
from .errors import ConfigError, ConvergenceError, DomainError
from .models import (
    GaussianConditionalModel,
    GaussianMixtureConditionalModel,
    OraclePredictor,
    posterior_mean,
    sample_x0,
)
from .samplers import _ode_leg, em_sde_sample, ode_drift_fn, posterior_start
from .schedule import BridgeSchedule, TimeGrid, alpha, coeffs, make_time_grid, rho2

START_KINDS = ("post", "em")
T1_EPSILONS = (1e-2, 1e-3, 1e-4, 1e-5)
T2_EPSILONS = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6)


@dataclass(frozen=True)
class GaussianSummary:
    """Diagonal Gaussian described by its mean and per-dimension variance."""

    mean: np.ndarray
    variance: np.ndarray

    def __post_init__(self):
        mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        var = np.atleast_1d(np.asarray(self.variance, dtype=float))
        if mean.shape != var.shape:
            raise DomainError(f"mean shape {mean.shape} != variance shape {var.shape}")
        if np.any(var < 0) or not np.all(np.isfinite(mean)) or not np.all(np.isfinite(var)):
            raise DomainError("summary needs finite mean and nonnegative variance")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "variance", var)


@dataclass
class TheoremReport:
    """Outcome of one structural check: swept series plus a verdict.

    The verdict is a pure function of the recorded series and tolerance, so
    reports can be re-judged from their CSV rows alone.
    """

    check_id: str
    param_name: str
    params: tuple
    series: dict[str, list[float]]
    tolerance: float
    passed: bool
    note: str = ""


def kl_gaussian(p: GaussianSummary, q: GaussianSummary) -> float:
    """KL(p || q) between diagonal Gaussians, summed over dimensions."""
    if p.mean.shape != q.mean.shape:
        raise DomainError("summaries must share a dimension")
    if np.any(p.variance <= 0) or np.any(q.variance <= 0):
        raise DomainError("KL requires strictly positive variances")
    ratio = p.variance / q.variance
    return float(
        np.sum(0.5 * (ratio - 1.0 - np.log(ratio)) + (p.mean - q.mean) ** 2 / (2.0 * q.variance))
    )


def _prior_moments(model, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-dimension mean and variance of q_data(. | y)."""
    if isinstance(model, GaussianConditionalModel):
        return model.mean0(y), model.var.copy()
    means = model.component_means(y)
    mean = model.weights @ means
    second = model.weights @ (means**2 + model.var[None, :])
    return mean, second - mean**2


def start_summary(model, s: BridgeSchedule, y: np.ndarray, tau: float, kind: str) -> GaussianSummary:
    """Moments of the Gaussian start distribution at tau.

    "post": N(a_tau y + b_tau x0_hat_T, c_tau^2 I), the bridge kernel at the
    horizon-time prediction.  "em": one Euler-Maruyama step of the reverse
    SDE from T, N(y + drift_T (tau - T), g^2(T)(T - tau) I).
    """
    if kind not in START_KINDS:
        raise ConfigError(f"unknown start kind {kind!r}; choose from {START_KINDS}")
    if not (0.0 < tau < s.T):
        raise ConfigError(f"start time must satisfy 0 < tau < T, got {tau}")
    y = np.atleast_1d(np.asarray(y, dtype=float))
    x0_hat_T = model.mean0(y)
    cf = coeffs(s, tau)
    if kind == "post":
        mean = cf.a * y + cf.b * x0_hat_T
        var = np.full(y.shape, cf.c2)
    else:
        drift = s.f(s.T) * y - s.g2(s.T) * sde_limit_drift(s, y, x0_hat_T)
        mean = y + drift * (tau - s.T)
        var = np.full(y.shape, s.g2(s.T) * (s.T - tau))
    return GaussianSummary(mean=mean, variance=var)


def expected_kl_start(model: GaussianConditionalModel, s: BridgeSchedule, y, tau: float, kind: str) -> float:
    """E_{X0 ~ q_data} KL(start || N(a_tau y + b_tau X0, c_tau^2 I)) in closed form.

    For the "post" start this collapses to b_tau^2 sum(var) / (2 c_tau^2);
    the "em" start adds the variance mismatch and any mean offset.
    """
    if not isinstance(model, GaussianConditionalModel):
        raise TypeError("closed-form expected KL requires the Gaussian model")
    y = np.atleast_1d(np.asarray(y, dtype=float))
    summ = start_summary(model, s, y, tau, kind)
    cf = coeffs(s, tau)
    mean_truth = cf.a * y + cf.b * model.mean0(y)
    ratio = summ.variance / cf.c2
    var_term = float(np.sum(0.5 * (ratio - 1.0 - np.log(ratio))))
    mean_term = float(
        (np.sum((summ.mean - mean_truth) ** 2) + cf.b**2 * np.sum(model.var)) / (2.0 * cf.c2)
    )
    return var_term + mean_term


def expected_kl_start_mc(
    model: GaussianConditionalModel,
    s: BridgeSchedule,
    y,
    tau: float,
    kind: str,
    draws: int,
    rng: np.random.Generator,
) -> float:
    """Monte Carlo estimate of expected_kl_start over X0 draws."""
    if not isinstance(model, GaussianConditionalModel):
        raise TypeError("expected KL cross-check requires the Gaussian model")
    y = np.atleast_1d(np.asarray(y, dtype=float))
    summ = start_summary(model, s, y, tau, kind)
    cf = coeffs(s, tau)
    x0s = sample_x0(model, y, rng, size=draws)
    ratio = summ.variance / cf.c2
    const = float(np.sum(0.5 * (ratio - 1.0 - np.log(ratio))))
    dev = summ.mean[None, :] - (cf.a * y[None, :] + cf.b * x0s)
    return const + float(np.mean(np.sum(dev * dev, axis=1)) / (2.0 * cf.c2))


def check_theorem1(model, s: BridgeSchedule, y, epsilons=T1_EPSILONS) -> TheoremReport:
    """Horizon limit of the SDE drift bracket: finite and attained.

    Evaluates the predictor-form bracket at the pinned state y for times
    T - eps and compares against the closed-form limit.  Passes when the
    errors decrease monotonically along the given epsilons (taken in the
    order supplied) and the final error is below 1e-3 (1 + |limit|).
    """
    y = np.asarray(y, dtype=float)
    if y.ndim == 0:
        y = np.full(model.dim, float(y))
    limit = sde_limit_drift(s, y, model.mean0(y))
    scale = 1.0 + float(np.linalg.norm(limit))
    errors = []
    for eps in epsilons:
        t = s.T - float(eps)
        m = posterior_mean(model, y, y, t, s)
        bracket = reverse_sde_nonlinear(s, y, y, t, x0_hat=m).value
        errors.append(float(np.linalg.norm(bracket - limit)))
    floor = 1e-12 * scale
    monotone = all(e2 <= e1 + floor for e1, e2 in zip(errors, errors[1:]))
    tolerance = 1e-3 * scale
    passed = monotone and errors[-1] < tolerance
    note = "" if monotone else "errors did not decrease monotonically"
    if max(errors) <= floor:
        note = "errors at roundoff floor for every epsilon (degenerate case)"
    return TheoremReport(
        check_id="T1",
        param_name="epsilon",
        params=tuple(float(e) for e in epsilons),
        series={"error": errors},
        tolerance=tolerance,
        passed=passed,
        note=note,
    )


def check_theorem2(
    model,
    s: BridgeSchedule,
    y,
    rng: np.random.Generator,
    epsilons=T2_EPSILONS,
    x0: np.ndarray | None = None,
    z: np.ndarray | None = None,
) -> TheoremReport:
    """Divergence of the flow-ODE drift at the horizon.

    Places the state on a noisy forward draw a y + b x0 + c z at T - eps and
    records the drift norm.  Passes when the norms strictly increase along
    the sweep, grow by more than 10x overall, and |drift| c_{T-eps}
    stabilizes within 20% over the last two decades (the 1/c growth law).
    A zero noise draw is the measure-zero exception where the drift stays
    bounded; it is reported as such rather than as a failure.
    """
    y = np.asarray(y, dtype=float)
    if y.ndim == 0:
        y = np.full(model.dim, float(y))
    if x0 is None:
        x0 = sample_x0(model, y, rng)
    if z is None:
        z = rng.standard_normal(y.shape)
    z = np.asarray(z, dtype=float)
    degenerate = float(np.linalg.norm(z)) < 1e-9

    norms, products = [], []
    for eps in epsilons:
        t = s.T - float(eps)
        cf = coeffs(s, t)
        x = cf.a * y + cf.b * np.asarray(x0, dtype=float) + cf.c * z
        score = score_from_predictor(posterior_mean(model, x, y, t, s), x, y, t, s)
        drift = pf_ode_drift(s, x, y, t, score).value
        norms.append(float(np.linalg.norm(drift)))
        products.append(norms[-1] * cf.c)

    if degenerate:
        return TheoremReport(
            check_id="T2",
            param_name="epsilon",
            params=tuple(float(e) for e in epsilons),
            series={"drift_norm": norms, "drift_norm_times_c": products},
            tolerance=0.2,
            passed=True,
            note="zero noise draw: measure-zero exception, drift stays bounded",
        )

    increasing = all(n2 > n1 for n1, n2 in zip(norms, norms[1:]))
    grew = norms[-1] > 10.0 * norms[0]
    tail = products[-3:]
    ref = float(np.mean(tail))
    stable = ref > 0 and max(abs(p - ref) for p in tail) <= 0.2 * ref
    return TheoremReport(
        check_id="T2",
        param_name="epsilon",
        params=tuple(float(e) for e in epsilons),
        series={"drift_norm": norms, "drift_norm_times_c": products},
        tolerance=0.2,
        passed=increasing and grew and stable,
        note="" if (increasing and grew) else "drift norm did not diverge as expected",
    )


def check_theorem3(
    model: GaussianConditionalModel,
    s: BridgeSchedule,
    ys,
    taus,
    comparator: str = "em",
) -> TheoremReport:
    """Start-distribution optimality: expected KL(post) <= expected KL(comparator).

    Sweeps a grid of conditions and start times.  Strict improvement is
    required whenever the comparator variance differs from c_tau^2; forcing
    comparator="post" degenerates every pair to equality, which is reported
    as a pass with a note.
    """
    if comparator not in START_KINDS:
        raise ConfigError(f"unknown comparator {comparator!r}")
    gaps, kl_posts, kl_others = [], [], []
    params = []
    strict_ok = True
    for y in ys:
        y_vec = np.asarray(y, dtype=float)
        if y_vec.ndim == 0:
            y_vec = np.full(model.dim, float(y_vec))
        for tau in taus:
            kl_post = expected_kl_start(model, s, y_vec, float(tau), "post")
            kl_other = expected_kl_start(model, s, y_vec, float(tau), comparator)
            params.append(float(tau))
            kl_posts.append(kl_post)
            kl_others.append(kl_other)
            gaps.append(kl_other - kl_post)
            other_var = float(start_summary(model, s, y_vec, float(tau), comparator).variance[0])
            if abs(other_var - coeffs(s, float(tau)).c2) > 1e-12 * max(other_var, 1.0):
                strict_ok = strict_ok and (kl_other - kl_post > 0.0)
    passed = all(g >= -1e-12 for g in gaps) and strict_ok
    note = ""
    if comparator == "post":
        note = "comparator forced to post: degenerate equality, trivially optimal"
    return TheoremReport(
        check_id="T3",
        param_name="tau",
        params=tuple(params),
        series={"kl_post": kl_posts, f"kl_{comparator}": kl_others, "gap": gaps},
        tolerance=1e-12,
        passed=passed,
        note=note,
    )


def optimal_gaussian_projection(
    model: GaussianConditionalModel, s: BridgeSchedule, y, tau: float
) -> GaussianSummary:
    """Numerically minimize the expected start KL over isotropic Gaussians.

    Minimizes E_{X0} KL(N(mu, sigma^2 I) || N(a y + b X0, c^2 I)) over mu
    and sigma with an exact gradient.  The minimizer must match the closed
    form mu* = a_tau y + b_tau mu0(y), sigma* = c_tau; a solver that cannot
    reach its tolerance raises instead of returning a stale point.
    """
    if not isinstance(model, GaussianConditionalModel):
        raise TypeError("projection optimum requires the Gaussian model")
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if not (0.0 < tau < s.T):
        raise ConfigError(f"start time must satisfy 0 < tau < T, got {tau}")
    d = y.size
    cf = coeffs(s, tau)
    m_post = cf.a * y + cf.b * model.mean0(y)
    spread = cf.b**2 * float(np.sum(model.var))

    def objective(params):
        mu, u = params[:d], params[d]
        sig2 = np.exp(2.0 * u)
        ratio = sig2 / cf.c2
        val = 0.5 * d * (ratio - 1.0 - np.log(ratio))
        val += (float(np.sum((mu - m_post) ** 2)) + spread) / (2.0 * cf.c2)
        grad = np.empty(d + 1)
        grad[:d] = (mu - m_post) / cf.c2
        grad[d] = d * (ratio - 1.0)
        return val, grad

    # Start from the EM summary, a genuinely different point.
    em = start_summary(model, s, y, tau, "em")
    x_init = np.concatenate([em.mean, [0.5 * np.log(em.variance[0])]])
    # ftol must be crushed too: the default relative-reduction stop fires
    # while the gradient is still around 1e-6.
    res = optimize.minimize(
        objective,
        x_init,
        jac=True,
        method="L-BFGS-B",
        options={"gtol": 1e-13, "ftol": 1e-18, "maxiter": 2000},
    )
    grad_norm = float(np.linalg.norm(res.jac))
    if not res.success and grad_norm > 1e-10:
        raise ConvergenceError(f"projection solver stalled: {res.message}")
    mu_star = res.x[:d]
    sig_star2 = float(np.exp(2.0 * res.x[d]))
    return GaussianSummary(mean=mu_star, variance=np.full(d, sig_star2))


def affine_flow_coefficients(
    model: GaussianConditionalModel, s: BridgeSchedule, y: np.ndarray, t: float
) -> tuple[np.ndarray, np.ndarray]:
    """Per-dimension (M, v) with flow-ODE drift M(t) x + v(t) for Gaussian data.

    Exists because the exact score is affine in the state, making the drift
    affine too; valid on [0, T) including t = 0 where the generic score
    formula is singular but the affine coefficients are not.
    """
    if not isinstance(model, GaussianConditionalModel):
        raise TypeError("affine flow coefficients require the Gaussian model")
    if not (0.0 <= t < s.T):
        raise DomainError(f"affine coefficients defined for 0 <= t < T, got {t}")
    y = np.atleast_1d(np.asarray(y, dtype=float))
    cf = coeffs(s, t)
    a_t = float(alpha(s, t))
    denom_score = cf.c2 + cf.b**2 * model.var
    denom_h = a_t * a_t * (float(rho2(s, s.T)) - float(rho2(s, t)))
    f_t, g2_t = s.f(t), s.g2(t)
    M = f_t + g2_t / (2.0 * denom_score) - g2_t / denom_h
    mu_marg = cf.a * y + cf.b * model.mean0(y)
    v = g2_t * ((a_t / float(alpha(s, s.T))) * y / denom_h - mu_marg / (2.0 * denom_score))
    return np.broadcast_to(M, y.shape).astype(float), v


def affine_flow_field(model: GaussianConditionalModel, s: BridgeSchedule, y: np.ndarray):
    """State-space drift closure of the affine flow, usable down to t = 0."""

    def drift(x, t):
        M, v = affine_flow_coefficients(model, s, y, float(t))
        return M * x + v

    return drift


def rk4_path(drift, x0: np.ndarray, t_from: float, t_to: float, n_steps: int) -> np.ndarray:
    """Classical fixed-step RK4 for dx/dt = drift(x, t); reference integrator."""
    if n_steps < 1:
        raise ConfigError("n_steps must be >= 1")
    x = np.array(x0, dtype=float, copy=True)
    h = (t_to - t_from) / n_steps
    t = t_from
    for _ in range(n_steps):
        k1 = drift(x, t)
        k2 = drift(x + 0.5 * h * k1, t + 0.5 * h)
        k3 = drift(x + 0.5 * h * k2, t + 0.5 * h)
        k4 = drift(x + h * k3, t + h)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t += h
    return x


def gaussian_flow_oracle(
    model: GaussianConditionalModel,
    s: BridgeSchedule,
    y,
    start: GaussianSummary,
    tau: float,
    n_steps: int = 20000,
) -> GaussianSummary:
    """Transport Gaussian moments from tau to 0 through the exact flow ODE.

    The affine drift closes the moment equations: d(mean)/dt = M mean + v
    and d(var)/dt = 2 M var.  They are integrated with fixed-step RK4 down
    to the last sub-knot and a single Euler step onto 0, mirroring how the
    samplers land.  Pushing the exact marginal moments recovers the data
    moments; pushing a zero-variance start keeps variance at zero.
    """
    if not (0.0 < tau < s.T):
        raise ConfigError(f"start time must satisfy 0 < tau < T, got {tau}")
    if n_steps < 2:
        raise ConfigError("n_steps must be >= 2")
    y = np.atleast_1d(np.asarray(y, dtype=float))

    def moment_drift(u, t):
        d = u.size // 2
        M, v = affine_flow_coefficients(model, s, y, float(t))
        return np.concatenate([M * u[:d] + v, 2.0 * M * u[d:]])

    u = np.concatenate([start.mean, start.variance])
    t1 = tau / n_steps
    u = rk4_path(moment_drift, u, tau, t1, n_steps - 1)
    u = u + (0.0 - t1) * moment_drift(u, t1)
    d = y.size
    return GaussianSummary(mean=u[:d], variance=np.maximum(u[d:], 0.0))


def fit_order(hs, errors) -> float:
    """Least-squares slope of log error against log step size."""
    hs = np.asarray(hs, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if hs.size != errors.size or hs.size < 2:
        raise DomainError("need matching h and error arrays with >= 2 points")
    if np.any(errors <= 0):
        raise DomainError("errors must be positive to fit a slope in log space")
    return float(np.polyfit(np.log(hs), np.log(errors), 1)[0])


@dataclass
class ConvergenceStudy:
    """Per-grid errors and the fitted order for one sampler family."""

    family: str
    grid_sizes: tuple
    hs: list[float] = field(default_factory=list)
    errors: list[float] = field(default_factory=list)

    @property
    def order(self) -> float:
        return fit_order(self.hs, self.errors)


def _ode_leg_study(model, s, y, tau, grid_sizes, runs, rng) -> ConvergenceStudy:
    """Heun-leg order: integrate from common starts, compare against fine RK4.

    Starts, reference, and coarse legs are all batched over a leading run
    axis; every field involved is elementwise in the state.
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    predictor = OraclePredictor(model, s)
    x0_hat = model.mean0(y)
    starts = np.stack([posterior_start(x0_hat, y, tau, s, rng) for _ in range(runs)])
    reference = rk4_path(affine_flow_field(model, s, y), starts, tau, 0.0, 20000)
    drift = ode_drift_fn(predictor, y, s)
    study = ConvergenceStudy(family="odes3", grid_sizes=tuple(grid_sizes))
    for n in grid_sizes:
        times = np.linspace(0.0, tau, int(n) + 1)[::-1]
        out = _ode_leg(drift, starts, times)
        study.hs.append(tau / int(n))
        study.errors.append(float(np.mean(np.linalg.norm(out - reference, axis=-1))))
    return study


def _em_sde_study(model, s, y, grid_sizes, runs, rng) -> ConvergenceStudy:
    """Strong order of the SDE baseline against a fine path with shared noise."""
    sizes = sorted(int(n) for n in grid_sizes)
    ref_n = 16384
    for n in sizes:
        if ref_n % n != 0:
            raise ConfigError(f"grid size {n} must divide the {ref_n}-step reference")
    y = np.atleast_1d(np.asarray(y, dtype=float))
    predictor = OraclePredictor(model, s)

    def em_with_noise(times, dW):
        # dW has shape (runs, len(times) - 1, dim); the state walks all runs
        # at once since drift and score broadcast over the leading axis.
        x = np.broadcast_to(y, dW.shape[0:1] + y.shape).copy()
        for k in range(len(times) - 1):
            t = float(times[k])
            if k == 0:
                drift = s.f(t) * x - s.g2(t) * sde_limit_drift(s, y, predictor(y, y, s.T))
            else:
                score = score_from_predictor(predictor(x, y, t), x, y, t, s)
                drift = reverse_sde_drift(s, x, y, t, score=score).value
            x = x + drift * (float(times[k + 1]) - t) + s.g(t) * dW[:, k]
        return x

    # Both paths walk T -> 0 consuming the same increment stream, so the
    # coarse increments are plain block sums of the fine ones.
    study = ConvergenceStudy(family="em_sde", grid_sizes=tuple(sizes))
    h_ref = s.T / ref_n
    dW_fine = np.sqrt(h_ref) * rng.standard_normal((runs, ref_n, y.size))
    times_ref = np.linspace(0.0, s.T, ref_n + 1)[::-1]
    x_ref = em_with_noise(times_ref, dW_fine)
    for n in sizes:
        block = ref_n // n
        dW = dW_fine.reshape(runs, n, block, y.size).sum(axis=2)
        times = np.linspace(0.0, s.T, n + 1)[::-1]
        x_n = em_with_noise(times, dW)
        study.hs.append(s.T / n)
        study.errors.append(float(np.mean(np.linalg.norm(x_n - x_ref, axis=-1))))
    return study


def _linear_field_study(family: str, grid_sizes) -> ConvergenceStudy:
    """Order of the bare steppers on dx/dt = -x with exact reference."""
    from .samplers import euler_update, heun_update

    stepper = heun_update if family == "heun" else euler_update
    drift = lambda x, t: -x
    exact = float(np.exp(-1.0))
    study = ConvergenceStudy(family=family, grid_sizes=tuple(grid_sizes))
    for n in grid_sizes:
        x = np.array([1.0])
        ts = np.linspace(0.0, 1.0, int(n) + 1)
        for k in range(int(n)):
            x = stepper(drift, x, float(ts[k]), float(ts[k + 1]))
        study.hs.append(1.0 / int(n))
        study.errors.append(abs(float(x[0]) - exact))
    return study


def convergence_study(
    sampler_family: str,
    model,
    s: BridgeSchedule,
    y,
    grid_sizes,
    runs: int,
    rng: np.random.Generator,
    tau: float | None = None,
) -> ConvergenceStudy:
    """Errors against a fine reference for one family; see convergence_order."""
    if sampler_family in ("heun", "euler"):
        return _linear_field_study(sampler_family, grid_sizes)
    if tau is None:
        tau = 0.9 * s.T
    if sampler_family == "odes3":
        return _ode_leg_study(model, s, y, tau, grid_sizes, runs, rng)
    if sampler_family == "em_sde":
        return _em_sde_study(model, s, y, grid_sizes, runs, rng)
    raise ConfigError(f"unknown sampler family {sampler_family!r}")


def convergence_order(
    sampler_family: str,
    model,
    s: BridgeSchedule,
    y,
    grid_sizes,
    runs: int,
    rng: np.random.Generator,
    tau: float | None = None,
) -> float:
    """Fitted empirical order of one sampler family.

    "odes3" measures the Heun leg (with its final Euler step) against a
    20000-step RK4 reference on the exact affine field, from common start
    draws.  "em_sde" measures strong error against a 16384-step path driven
    by the same Brownian increments.  "heun"/"euler" exercise the bare
    steppers on a linear test field.
    """
    return convergence_study(sampler_family, model, s, y, grid_sizes, runs, rng, tau).order


def wasserstein1_1d(xs: np.ndarray, ys: np.ndarray) -> float:
    """W1 distance between equal-size 1-d samples: mean |sorted difference|."""
    xs = np.asarray(xs, dtype=float).ravel()
    ys = np.asarray(ys, dtype=float).ravel()
    if xs.size != ys.size or xs.size == 0:
        raise DomainError("W1 needs two nonempty samples of equal size")
    return float(np.mean(np.abs(np.sort(xs) - np.sort(ys))))
