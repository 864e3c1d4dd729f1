"""Analytic conditional data models used as exact stand-ins for predictors.

Each model specifies q_data(x0 | y) in closed form, so the posterior mean
E[X0 | X_t = x, y] under the pinned kernel N(a x0-weighted mean, c^2 I) is
available exactly.  Wrapping a model in OraclePredictor yields a drop-in
replacement for a trained network that is correct to floating point,
which is what makes sampler output distributions checkable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .errors import ConfigError, DomainError
from .schedule import BridgeSchedule, coeffs


def _vector(x, dim: int, name: str) -> np.ndarray:
    out = np.broadcast_to(np.asarray(x, dtype=float), (dim,)).copy()
    if not np.all(np.isfinite(out)):
        raise ConfigError(f"{name} must be finite")
    return out


@dataclass(frozen=True)
class GaussianConditionalModel:
    """q_data(x0 | y) = N(A y + u, diag(var)).

    The mean map is affine in the condition y; the covariance is diagonal
    with strictly positive entries.
    """

    mean_matrix: np.ndarray
    mean_offset: np.ndarray
    var: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.mean_matrix, dtype=float))
        if A.shape[0] != A.shape[1]:
            raise ConfigError(f"mean_matrix must be square, got shape {A.shape}")
        d = A.shape[0]
        object.__setattr__(self, "mean_matrix", A)
        object.__setattr__(self, "mean_offset", _vector(self.mean_offset, d, "mean_offset"))
        var = _vector(self.var, d, "var")
        if np.any(var <= 0):
            raise ConfigError("var entries must be strictly positive")
        object.__setattr__(self, "var", var)

    @classmethod
    def isotropic(cls, dim: int, mean_scale: float = 0.0, mean_offset=0.0, var=1.0):
        """Convenience constructor with A = mean_scale * I."""
        return cls(
            mean_matrix=mean_scale * np.eye(dim),
            mean_offset=np.broadcast_to(np.asarray(mean_offset, dtype=float), (dim,)),
            var=np.broadcast_to(np.asarray(var, dtype=float), (dim,)),
        )

    @property
    def dim(self) -> int:
        return self.mean_matrix.shape[0]

    def mean0(self, y: np.ndarray) -> np.ndarray:
        """Prior mean E[X0 | y] = A y + u."""
        return self.mean_matrix @ np.asarray(y, dtype=float) + self.mean_offset


@dataclass(frozen=True)
class GaussianMixtureConditionalModel:
    """q_data(x0 | y) = sum_k w_k N(m_k(y), diag(var)) with shared covariance.

    Component means are m_k(y) = mean_scale * y + offset_k, covering both
    fixed components (mean_scale = 0) and components that track the
    condition.  Weights are normalized at construction; the input must
    already sum to 1 within 1e-12.
    """

    weights: np.ndarray
    offsets: np.ndarray
    var: np.ndarray
    mean_scale: float = 0.0

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ConfigError("weights must be a nonempty vector")
        if np.any(w < 0):
            raise ConfigError("weights must be nonnegative")
        if abs(float(w.sum()) - 1.0) > 1e-12:
            raise ConfigError(f"weights must sum to 1 within 1e-12, got {w.sum()!r}")
        object.__setattr__(self, "weights", w / w.sum())
        offsets = np.atleast_2d(np.asarray(self.offsets, dtype=float))
        if offsets.shape[0] != w.size:
            raise ConfigError(
                f"offsets has {offsets.shape[0]} rows for {w.size} weights"
            )
        object.__setattr__(self, "offsets", offsets)
        var = _vector(self.var, offsets.shape[1], "var")
        if np.any(var <= 0):
            raise ConfigError("var entries must be strictly positive")
        object.__setattr__(self, "var", var)

    @property
    def dim(self) -> int:
        return self.offsets.shape[1]

    @property
    def n_components(self) -> int:
        return self.weights.size

    def component_means(self, y: np.ndarray) -> np.ndarray:
        """Component means m_k(y), shape (K, d)."""
        return self.mean_scale * np.asarray(y, dtype=float)[None, :] + self.offsets

    def mean0(self, y: np.ndarray) -> np.ndarray:
        """Prior mean E[X0 | y] = sum_k w_k m_k(y)."""
        return self.weights @ self.component_means(y)


ConditionalModel = GaussianConditionalModel | GaussianMixtureConditionalModel


def sample_x0(model: ConditionalModel, y: np.ndarray, rng: np.random.Generator, size=None):
    """Draw x0 ~ q_data(. | y); shape (d,) or (size, d)."""
    y = np.asarray(y, dtype=float)
    n = 1 if size is None else int(size)
    std = np.sqrt(model.var)
    if isinstance(model, GaussianConditionalModel):
        out = model.mean0(y)[None, :] + std[None, :] * rng.standard_normal((n, model.dim))
    else:
        ks = rng.choice(model.n_components, size=n, p=model.weights)
        means = model.component_means(y)[ks]
        out = means + std[None, :] * rng.standard_normal((n, model.dim))
    return out[0] if size is None else out


def forward_sample(
    s: BridgeSchedule, x0: np.ndarray, y: np.ndarray, t: float, rng: np.random.Generator
) -> np.ndarray:
    """Draw from the pinned kernel N(a_t y + b_t x0, c_t^2 I).

    Exact at the endpoints: returns x0 at t = 0 and y at t = T for any draw.
    """
    cf = coeffs(s, t)
    x0 = np.asarray(x0, dtype=float)
    y = np.asarray(y, dtype=float)
    z = rng.standard_normal(np.broadcast(x0, y).shape)
    return cf.a * y + cf.b * x0 + cf.c * z


def posterior_mean(model: ConditionalModel, x_t: np.ndarray, y: np.ndarray, t: float, s: BridgeSchedule):
    """E[X0 | X_t = x_t, y] under model prior and the pinned kernel.

    Defined for 0 < t < T; at t = T the kernel is a point mass at y, so the
    state must equal y and the posterior mean reduces to the prior mean.
    Broadcasts over leading axes of x_t.
    """
    x_t = np.asarray(x_t, dtype=float)
    y = np.asarray(y, dtype=float)
    if t == s.T:
        if not np.allclose(x_t, np.broadcast_to(y, x_t.shape), rtol=0.0, atol=1e-12):
            raise DomainError("at t = T the state must equal the pinned endpoint y")
        prior = model.mean0(y)
        return np.broadcast_to(prior, x_t.shape).copy()
    if not (0.0 < t < s.T):
        raise DomainError(f"posterior mean defined on (0, T]; got t = {t}")

    cf = coeffs(s, t)
    resid = (x_t - cf.a * y) * (cf.b / cf.c2)
    prec = 1.0 / model.var + cf.b * cf.b / cf.c2

    if isinstance(model, GaussianConditionalModel):
        return (model.mean0(y) / model.var + resid) / prec

    # Mixture: responsibility-weighted conjugate means, log-sum-exp normalized.
    means = model.component_means(y)                       # (K, d)
    evid_var = cf.c2 + cf.b * cf.b * model.var             # (d,)
    dev = x_t[..., None, :] - cf.a * y - cf.b * means      # (..., K, d)
    log_r = np.log(model.weights) - 0.5 * np.sum(dev * dev / evid_var, axis=-1)
    log_r = log_r - logsumexp(log_r, axis=-1, keepdims=True)
    comp_post = (means / model.var + resid[..., None, :]) / prec  # (..., K, d)
    return np.sum(np.exp(log_r)[..., None] * comp_post, axis=-2)


def marginal_score_exact(
    model: GaussianConditionalModel, x_t: np.ndarray, y: np.ndarray, t: float, s: BridgeSchedule
) -> np.ndarray:
    """Score of the pinned marginal q(x_t | y) for Gaussian data, in closed form.

    The marginal is N(a y + b mu0(y), (c^2 + b^2 var) I) so the score is
    -(x_t - a y - b mu0) / (c^2 + b^2 var), the independent cross-check for
    the predictor-based score conversion.
    """
    if not isinstance(model, GaussianConditionalModel):
        raise TypeError("closed-form marginal score requires the Gaussian model")
    if not (0.0 < t < s.T):
        raise DomainError(f"marginal score defined on (0, T); got t = {t}")
    cf = coeffs(s, t)
    x_t = np.asarray(x_t, dtype=float)
    y = np.asarray(y, dtype=float)
    total_var = cf.c2 + cf.b * cf.b * model.var
    return -(x_t - cf.a * y - cf.b * model.mean0(y)) / total_var


class OraclePredictor:
    """Exact x0-predictor backed by a conditional model.

    Callable as predictor(x_t, y, t); every call increments nfe by exactly
    one, which is what sampler evaluation counts are measured against.  Keep
    one instance per run (the counter is plain Python state).
    """

    def __init__(self, model: ConditionalModel, s: BridgeSchedule):
        self.model = model
        self.schedule = s
        self.nfe = 0

    def __call__(self, x_t: np.ndarray, y: np.ndarray, t: float) -> np.ndarray:
        self.nfe += 1
        return posterior_mean(self.model, x_t, y, t, self.schedule)

    def reset(self) -> None:
        self.nfe = 0
