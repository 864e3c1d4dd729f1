"""Bridge samplers: the stochastic-start ODE sampler and its baselines.

All samplers walk a shared time grid 0 = t_0 < ... < t_N = T backwards from
the pinned endpoint y.  The flow-ODE samplers replace the singular first
leg [tau, T] (tau = t_{N-1}) with a closed-form start, then integrate the
probability-flow ODE with Heun steps and a single Euler step onto t_0 = 0,
for exactly 2N - 2 predictor evaluations.  The Euler-Maruyama baseline
integrates the reverse SDE over the full grid with one evaluation per step,
using the finite horizon limit of the drift for its first step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import (
    pf_ode_drift,
    reverse_sde_drift,
    score_from_predictor,
    sde_limit_drift,
)
from .errors import ConfigError, NonFiniteStateError
from .schedule import BridgeSchedule, TimeGrid, coeffs

METHODS = ("odes3", "em_sde", "em_start_heun", "deterministic_start_heun")


@dataclass(frozen=True)
class SamplerConfig:
    """Which sampler to run and on what grid."""

    method: str
    grid: TimeGrid
    seed: int = 0
    record_trajectory: bool = False

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"unknown sampler method {self.method!r}; choose from {METHODS}")


@dataclass
class SampleRun:
    """One sampler output: final state, evaluation count, provenance."""

    x0: np.ndarray
    nfe: int
    seed: int | None
    trajectory: list[tuple[float, np.ndarray]] | None = None


@dataclass
class BatchResult:
    """Stacked outputs of independent runs with derived per-run seeds."""

    x0: np.ndarray          # (runs, d)
    nfe: np.ndarray         # (runs,)
    base_seed: int


def _as_generator(rng) -> tuple[np.random.Generator, int | None]:
    if isinstance(rng, np.random.Generator):
        return rng, None
    seed = int(rng)
    return np.random.default_rng(seed), seed


def _run_generator(base_seed: int, run_index: int) -> np.random.Generator:
    """Per-run generator derived from (base seed, run index)."""
    return np.random.default_rng([int(base_seed), int(run_index)])


def _require_finite(x: np.ndarray, t: float) -> None:
    if not np.all(np.isfinite(x)):
        raise NonFiniteStateError(f"sampler state became non-finite at t = {t}")


def posterior_start(
    x0_hat_T: np.ndarray, y: np.ndarray, tau: float, s: BridgeSchedule, rng: np.random.Generator
) -> np.ndarray:
    """Draw the start state from N(a_tau y + b_tau x0_hat, c_tau^2 I).

    This is the bridge kernel evaluated at the horizon-time prediction, the
    best Gaussian surrogate for the true marginal at tau.  Collapses to y
    as tau -> T.
    """
    if not (0.0 < tau < s.T):
        raise ConfigError(f"start time must satisfy 0 < tau < T, got {tau}")
    cf = coeffs(s, tau)
    y = np.asarray(y, dtype=float)
    x0_hat_T = np.asarray(x0_hat_T, dtype=float)
    mean = cf.a * y + cf.b * x0_hat_T
    return mean + cf.c * rng.standard_normal(mean.shape)


def em_start(
    x0_hat_T: np.ndarray, y: np.ndarray, tau: float, s: BridgeSchedule, rng: np.random.Generator
) -> np.ndarray:
    """Single Euler-Maruyama step of the reverse SDE from T down to tau.

    Mean y + (f(T) y + g^2(T) (y - alpha_T x0_hat) / (alpha_T^2 rho_T^2))
    (tau - T), variance g^2(T) (T - tau) I.  The drift is the horizon limit
    form, the only one defined at t = T.
    """
    if not (0.0 < tau < s.T):
        raise ConfigError(f"start time must satisfy 0 < tau < T, got {tau}")
    y = np.asarray(y, dtype=float)
    drift = s.f(s.T) * y - s.g2(s.T) * sde_limit_drift(s, y, x0_hat_T)
    mean = y + drift * (tau - s.T)
    std = float(np.sqrt(s.g2(s.T) * (s.T - tau)))
    return mean + std * rng.standard_normal(mean.shape)


def euler_update(drift, x: np.ndarray, t_from: float, t_to: float) -> np.ndarray:
    """One explicit Euler step of dx/dt = drift(x, t) from t_from to t_to."""
    return x + (t_to - t_from) * drift(x, t_from)


def heun_update(drift, x: np.ndarray, t_from: float, t_to: float) -> np.ndarray:
    """One Heun (explicit trapezoid) step: Euler predictor, averaged corrector."""
    h = t_to - t_from
    d1 = drift(x, t_from)
    d2 = drift(x + h * d1, t_to)
    return x + 0.5 * h * (d1 + d2)


def ode_drift_fn(predictor, y: np.ndarray, s: BridgeSchedule):
    """Flow-ODE drift closure x, t -> d(x, t) built from a predictor."""
    y = np.asarray(y, dtype=float)

    def drift(x: np.ndarray, t: float) -> np.ndarray:
        score = score_from_predictor(predictor(x, y, t), x, y, t, s)
        return pf_ode_drift(s, x, y, t, score).value

    return drift


def heun_step(
    predictor, x: np.ndarray, t_from: float, t_to: float, y: np.ndarray, s: BridgeSchedule
) -> np.ndarray:
    """One Heun step of the flow ODE between two interior grid times.

    Exactly two predictor evaluations.  Both endpoints must lie strictly
    inside (0, T) where the drift is defined.
    """
    if not (0.0 < t_to < t_from < s.T):
        raise ConfigError(
            f"heun step needs 0 < t_to < t_from < T, got ({t_from}, {t_to})"
        )
    return heun_update(ode_drift_fn(predictor, y, s), x, t_from, t_to)


def _ode_leg(drift, x: np.ndarray, times: np.ndarray, trajectory=None) -> np.ndarray:
    """Integrate the flow ODE along descending knots [tau, ..., t_1, 0].

    Heun steps throughout except the last interval, which is Euler only so
    the drift is never evaluated at t = 0.
    """
    for k in range(len(times) - 1):
        t_from, t_to = float(times[k]), float(times[k + 1])
        if k == len(times) - 2:
            x = euler_update(drift, x, t_from, t_to)
        else:
            x = heun_update(drift, x, t_from, t_to)
        _require_finite(x, t_to)
        if trajectory is not None:
            trajectory.append((t_to, np.array(x, copy=True)))
    return x


def _start_trajectory(record: bool, s: BridgeSchedule, y, tau, x):
    if not record:
        return None
    return [(s.T, np.array(y, dtype=float, copy=True)), (float(tau), np.array(x, copy=True))]


def odes3_sample(
    predictor,
    y: np.ndarray,
    grid: TimeGrid,
    s: BridgeSchedule,
    rng,
    record_trajectory: bool = False,
) -> SampleRun:
    """ODE sampling with a stochastic start.

    One predictor call at the horizon feeds the posterior-style start draw
    at tau; Heun steps then carry the state to t_1 and a final Euler step
    lands on 0.  Evaluation count is exactly 2N - 2 for an N-interval grid.
    """
    gen, seed = _as_generator(rng)
    y = np.asarray(y, dtype=float)
    nfe0 = predictor.nfe
    x0_hat = predictor(y, y, s.T)
    x = posterior_start(x0_hat, y, grid.tau, s, gen)
    trajectory = _start_trajectory(record_trajectory, s, y, grid.tau, x)
    x = _ode_leg(ode_drift_fn(predictor, y, s), x, grid.times[:-1][::-1], trajectory)
    return SampleRun(x0=x, nfe=predictor.nfe - nfe0, seed=seed, trajectory=trajectory)


def em_start_heun_sample(
    predictor,
    y: np.ndarray,
    grid: TimeGrid,
    s: BridgeSchedule,
    rng,
    record_trajectory: bool = False,
) -> SampleRun:
    """Ablation of odes3: identical ODE legs, Euler-Maruyama start draw."""
    gen, seed = _as_generator(rng)
    y = np.asarray(y, dtype=float)
    nfe0 = predictor.nfe
    x0_hat = predictor(y, y, s.T)
    x = em_start(x0_hat, y, grid.tau, s, gen)
    trajectory = _start_trajectory(record_trajectory, s, y, grid.tau, x)
    x = _ode_leg(ode_drift_fn(predictor, y, s), x, grid.times[:-1][::-1], trajectory)
    return SampleRun(x0=x, nfe=predictor.nfe - nfe0, seed=seed, trajectory=trajectory)


def deterministic_start_heun(
    predictor,
    y: np.ndarray,
    grid: TimeGrid,
    s: BridgeSchedule,
    record_trajectory: bool = False,
) -> SampleRun:
    """Ablation with the start noise removed: X_tau is set to the start mean.

    Fully deterministic given y, hence the variance-collapse signature this
    baseline exists to exhibit.  Takes no random generator at all.
    """
    y = np.asarray(y, dtype=float)
    nfe0 = predictor.nfe
    x0_hat = predictor(y, y, s.T)
    cf = coeffs(s, grid.tau)
    x = cf.a * y + cf.b * np.asarray(x0_hat, dtype=float)
    trajectory = _start_trajectory(record_trajectory, s, y, grid.tau, x)
    x = _ode_leg(ode_drift_fn(predictor, y, s), x, grid.times[:-1][::-1], trajectory)
    return SampleRun(x0=x, nfe=predictor.nfe - nfe0, seed=None, trajectory=trajectory)


def em_sde_sample(
    predictor,
    y: np.ndarray,
    grid: TimeGrid,
    s: BridgeSchedule,
    rng,
    record_trajectory: bool = False,
    noise_scale: float = 1.0,
) -> SampleRun:
    """Euler-Maruyama over the reverse SDE on the full grid; N evaluations.

    The first step leaves t = T using the closed-form horizon drift; every
    later step uses the score-based drift at its left knot.  noise_scale
    exists for diagnostics (0 degenerates to explicit Euler on the SDE
    drift) and is 1 for actual sampling.
    """
    gen, seed = _as_generator(rng)
    y = np.asarray(y, dtype=float)
    nfe0 = predictor.nfe
    x = np.array(y, copy=True)
    times = grid.times[::-1]  # [T, tau, ..., t_1, 0]
    trajectory = [(s.T, np.array(y, copy=True))] if record_trajectory else None
    for k in range(len(times) - 1):
        t, t_next = float(times[k]), float(times[k + 1])
        if k == 0:
            x0_hat = predictor(y, y, s.T)
            drift = s.f(t) * x - s.g2(t) * sde_limit_drift(s, y, x0_hat)
        else:
            score = score_from_predictor(predictor(x, y, t), x, y, t, s)
            drift = reverse_sde_drift(s, x, y, t, score=score).value
        dt = t_next - t
        z = gen.standard_normal(x.shape)
        x = x + drift * dt + noise_scale * s.g(t) * np.sqrt(-dt) * z
        _require_finite(x, t_next)
        if trajectory is not None:
            trajectory.append((t_next, np.array(x, copy=True)))
    return SampleRun(x0=x, nfe=predictor.nfe - nfe0, seed=seed, trajectory=trajectory)


_SAMPLERS = {
    "odes3": odes3_sample,
    "em_sde": em_sde_sample,
    "em_start_heun": em_start_heun_sample,
}


def run_sampler(cfg: SamplerConfig, predictor, y: np.ndarray, s: BridgeSchedule, rng=None) -> SampleRun:
    """Dispatch one run according to a SamplerConfig."""
    if cfg.method == "deterministic_start_heun":
        return deterministic_start_heun(predictor, y, cfg.grid, s, cfg.record_trajectory)
    source = cfg.seed if rng is None else rng
    return _SAMPLERS[cfg.method](predictor, y, cfg.grid, s, source, cfg.record_trajectory)


def sample_batch(
    method: str,
    predictor,
    y: np.ndarray,
    grid: TimeGrid,
    s: BridgeSchedule,
    base_seed: int,
    runs: int,
) -> BatchResult:
    """Independent runs with per-run generators derived from (seed, index).

    Flow-ODE methods draw each run's start noise from its own generator and
    integrate all runs together; every lane is bitwise identical to the
    corresponding scalar run.  The SDE baseline is integrated run by run
    since it draws noise at every step.
    """
    if method not in METHODS:
        raise ConfigError(f"unknown sampler method {method!r}")
    if runs < 1:
        raise ConfigError("runs must be >= 1")
    y = np.asarray(y, dtype=float)
    d = y.size

    if method == "em_sde":
        outs = np.empty((runs, d))
        nfes = np.empty(runs, dtype=int)
        for i in range(runs):
            run = em_sde_sample(predictor, y, grid, s, _run_generator(base_seed, i))
            outs[i] = run.x0
            nfes[i] = run.nfe
        return BatchResult(x0=outs, nfe=nfes, base_seed=base_seed)

    nfe0 = predictor.nfe
    x0_hat = predictor(y, y, s.T)
    cf = coeffs(s, grid.tau)
    if method == "deterministic_start_heun":
        starts = np.broadcast_to(cf.a * y + cf.b * x0_hat, (runs, d)).copy()
    else:
        noise = np.stack(
            [_run_generator(base_seed, i).standard_normal(d) for i in range(runs)]
        )
        if method == "odes3":
            starts = cf.a * y + cf.b * x0_hat + cf.c * noise
        else:  # em_start_heun
            drift = s.f(s.T) * y - s.g2(s.T) * sde_limit_drift(s, y, x0_hat)
            mean = y + drift * (grid.tau - s.T)
            std = float(np.sqrt(s.g2(s.T) * (s.T - grid.tau)))
            starts = mean + std * noise
    x = _ode_leg(ode_drift_fn(predictor, y, s), starts, grid.times[:-1][::-1])
    # Each batched predictor call covers every lane once.
    per_run_nfe = predictor.nfe - nfe0
    return BatchResult(x0=x, nfe=np.full(runs, per_run_nfe, dtype=int), base_seed=base_seed)
