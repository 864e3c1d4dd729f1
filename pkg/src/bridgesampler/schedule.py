"""Noise schedules for linear bridge processes and their derived coefficients.

A schedule is the pair (f, g) of a linear forward SDE

    dX = f(t) X dt + g(t) dW,        t in [0, T],

together with the two accumulated quantities

    alpha_t = exp(int_0^t f(u) du),
    rho_t^2 = int_0^t g(u)^2 / alpha_u^2 du.

Pinning the endpoint X_T = y turns the forward marginal at time t into the
Gaussian N(a_t y + b_t x0, c_t^2 I) with

    a_t   = rho_t^2 alpha_t / (rho_T^2 alpha_T),
    b_t   = alpha_t (1 - rho_t^2 / rho_T^2),
    c_t^2 = alpha_t^2 rho_t^2 (1 - rho_t^2 / rho_T^2).

Both schedule families below admit closed forms for alpha and rho^2, so the
coefficients are exact up to floating point and can be cross-checked against
direct quadrature of the defining integrals.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainError

SPACINGS = ("uniform", "quadratic")


class BridgeSchedule(ABC):
    """Drift/diffusion pair of a linear forward SDE on [0, T]."""

    kind: str
    T: float

    @abstractmethod
    def f(self, t: float) -> float:
        """Linear drift coefficient f(t)."""

    @abstractmethod
    def g2(self, t: float) -> float:
        """Squared diffusion coefficient g(t)^2."""

    def g(self, t: float) -> float:
        """Diffusion coefficient g(t)."""
        return float(np.sqrt(self.g2(t)))

    @abstractmethod
    def _alpha(self, t):
        """Closed form of exp(int_0^t f)."""

    @abstractmethod
    def _rho2(self, t):
        """Closed form of int_0^t g^2 / alpha^2."""


@dataclass(frozen=True)
class BrownianBridgeSchedule(BridgeSchedule):
    """Driftless schedule f = 0, g = sigma.

    alpha_t = 1 and rho_t^2 = sigma^2 t, so the pinned coefficients reduce to
    a_t = t/T, b_t = 1 - t/T, c_t^2 = sigma^2 t (T - t) / T.
    """

    T: float = 1.0
    sigma: float = 1.0
    kind: str = field(default="brownian_bridge", init=False)

    def __post_init__(self):
        if not (self.T > 0):
            raise ConfigError(f"horizon T must be positive, got {self.T}")
        if not (self.sigma > 0):
            raise ConfigError(f"sigma must be positive, got {self.sigma}")

    def f(self, t):
        return 0.0

    def g2(self, t):
        return self.sigma**2

    def g(self, t):
        return self.sigma

    def _alpha(self, t):
        return np.ones_like(np.asarray(t, dtype=float))[()]

    def _rho2(self, t):
        return self.sigma**2 * np.asarray(t, dtype=float)[()]


@dataclass(frozen=True)
class VariancePreservingSchedule(BridgeSchedule):
    """Variance-preserving schedule f = -beta(t)/2, g^2 = beta(t).

    beta ramps linearly from beta_min at t = 0 to beta_max at t = T.  With
    B(t) = int_0^t beta = beta_min t + (beta_max - beta_min) t^2 / (2T) the
    closed forms are alpha_t = exp(-B(t)/2) and rho_t^2 = exp(B(t)) - 1.
    """

    T: float = 1.0
    beta_min: float = 0.1
    beta_max: float = 20.0
    kind: str = field(default="variance_preserving", init=False)

    def __post_init__(self):
        if not (self.T > 0):
            raise ConfigError(f"horizon T must be positive, got {self.T}")
        if self.beta_min < 0 or self.beta_max < self.beta_min:
            raise ConfigError(
                f"need 0 <= beta_min <= beta_max, got ({self.beta_min}, {self.beta_max})"
            )
        if self.beta_max <= 0:
            # beta identically zero has no noise and no bridge.
            raise ConfigError("beta_max must be positive")

    def beta(self, t):
        return self.beta_min + (self.beta_max - self.beta_min) * np.asarray(t, dtype=float) / self.T

    def beta_integral(self, t):
        t = np.asarray(t, dtype=float)
        return self.beta_min * t + (self.beta_max - self.beta_min) * t**2 / (2.0 * self.T)

    def f(self, t):
        return -0.5 * self.beta(t)

    def g2(self, t):
        return self.beta(t)

    def _alpha(self, t):
        return np.exp(-0.5 * self.beta_integral(t))[()]

    def _rho2(self, t):
        # expm1 keeps full precision near t = 0 where B(t) is tiny.
        return np.expm1(self.beta_integral(t))[()]


def make_schedule(kind: str, T: float = 1.0, **params) -> BridgeSchedule:
    """Build a schedule by kind name; unknown kinds raise ConfigError."""
    if kind == "brownian_bridge":
        return BrownianBridgeSchedule(T=T, **params)
    if kind == "variance_preserving":
        return VariancePreservingSchedule(T=T, **params)
    raise ConfigError(f"unknown schedule kind {kind!r}")


def _check_time(s: BridgeSchedule, t) -> None:
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0) or np.any(t > s.T):
        raise DomainError(f"time {t} outside [0, {s.T}]")


def alpha(s: BridgeSchedule, t):
    """exp(int_0^t f(u) du), evaluated in closed form.  Requires 0 <= t <= T."""
    _check_time(s, t)
    return s._alpha(t)


def rho2(s: BridgeSchedule, t):
    """int_0^t g(u)^2 / alpha_u^2 du, evaluated in closed form.

    Strictly increasing in t for valid parameters; rho2(s, 0) = 0.
    """
    _check_time(s, t)
    return s._rho2(t)


@dataclass(frozen=True)
class BridgeCoeffs:
    """Pinned-endpoint kernel coefficients (a_t, b_t, c_t) at one time.

    The kernel given x0 and endpoint y is N(a y + b x0, c^2 I).  Endpoint
    identities hold exactly: (a, b, c) = (0, alpha_0, 0) at t = 0 and
    (1, 0, 0) at t = T.
    """

    a: float
    b: float
    c: float
    t: float

    def __post_init__(self):
        if self.c < 0:
            raise DomainError(f"c must be nonnegative, got {self.c}")
        if not np.all(np.isfinite([self.a, self.b, self.c, self.t])):
            raise DomainError("non-finite bridge coefficient")

    @property
    def c2(self) -> float:
        return self.c * self.c


def coeffs(s: BridgeSchedule, t: float) -> BridgeCoeffs:
    """Kernel coefficients (a_t, b_t, c_t) for schedule s at time t."""
    _check_time(s, t)
    t = float(t)
    a_t = float(alpha(s, t))
    r_t = float(rho2(s, t))
    a_T = float(alpha(s, s.T))
    r_T = float(rho2(s, s.T))
    ratio = r_t / r_T
    a = ratio * a_t / a_T
    b = a_t * (1.0 - ratio)
    c2 = a_t * a_t * r_t * (1.0 - ratio)
    return BridgeCoeffs(a=a, b=b, c=float(np.sqrt(max(c2, 0.0))), t=t)


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing knots 0 = t_0 < t_1 < ... < t_N = T.

    The second-to-last knot is the handoff time tau at which samplers switch
    from the closed-form start to numerical integration.  t_1 > 0 always, so
    drifts are never evaluated at the singular endpoints.
    """

    times: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        object.__setattr__(self, "times", times)
        if times.ndim != 1 or times.size < 3:
            raise ConfigError("grid needs at least 3 knots (N >= 2)")
        if times[0] != 0.0:
            raise ConfigError("grid must start at exactly 0")
        if np.any(np.diff(times) <= 0):
            raise ConfigError("grid knots must be strictly increasing")
        if times[1] <= 0.0:
            raise ConfigError("t_1 must be positive")

    @property
    def N(self) -> int:
        """Number of intervals."""
        return self.times.size - 1

    @property
    def T(self) -> float:
        return float(self.times[-1])

    @property
    def tau(self) -> float:
        """Handoff time t_{N-1}: last knot before the horizon."""
        return float(self.times[-2])


def make_time_grid(
    s: BridgeSchedule,
    N: int,
    spacing: str = "uniform",
    t_min: float | None = None,
) -> TimeGrid:
    """Build an (N+1)-knot grid on [0, T] with the requested spacing.

    "uniform" places t_i = i T / N.  "quadratic" applies the symmetric warp
    w(u) = 2u^2 for u <= 1/2 and 1 - 2(1-u)^2 otherwise, which concentrates
    knots near both endpoints.  t_min is a positive guard on the first
    interior knot; the construction fails if t_1 <= t_min.
    """
    if N < 2:
        raise ConfigError(f"grid needs N >= 2 intervals, got {N}")
    if spacing not in SPACINGS:
        raise ConfigError(f"unknown spacing {spacing!r}; choose from {SPACINGS}")
    if t_min is None:
        t_min = 1e-9 * s.T
    if not (t_min > 0):
        raise ConfigError(f"t_min must be positive, got {t_min}")

    u = np.arange(N + 1, dtype=float) / N
    if spacing == "quadratic":
        u = np.where(u <= 0.5, 2.0 * u**2, 1.0 - 2.0 * (1.0 - u) ** 2)
    times = s.T * u
    times[-1] = s.T  # exact horizon regardless of rounding
    if times[1] <= t_min:
        raise ConfigError(
            f"first interior knot t_1 = {times[1]:.3e} is not above t_min = {t_min:.3e}"
        )
    return TimeGrid(times=times)
