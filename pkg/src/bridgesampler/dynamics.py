"""Drift fields of the reverse-time bridge SDE and its probability-flow ODE.

With s(x, t) the score of the pinned marginal and h(x, t) the endpoint
attraction term, the two generative processes share the structure

    reverse SDE:  dX = [f X - g^2 (s - h)] dt + g dW,
    flow ODE:     dX = [f X - g^2 (s/2 - h)] dt,

so ode_drift = sde_drift + g^2 s / 2 pointwise.  The nonlinear bracket
(s - h) collapses to -(x - alpha_t x0_hat) / (alpha_t^2 rho_t^2) when the
score is expressed through a predicted x0, and that form has a well-defined
limit at the horizon while the ODE drift diverges there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteStateError, SingularTimeError
from .schedule import BridgeSchedule, alpha, coeffs, rho2

KINDS = ("reverse_sde_nonlinear", "sde_total", "pf_ode_total")


@dataclass(frozen=True)
class DriftEvaluation:
    """A drift value tagged with its time and which field produced it."""

    value: np.ndarray
    t: float
    kind: str

    def __post_init__(self):
        object.__setattr__(self, "value", np.asarray(self.value, dtype=float))
        if self.kind not in KINDS:
            raise ValueError(f"unknown drift kind {self.kind!r}")
        if not np.all(np.isfinite(self.value)):
            raise NonFiniteStateError(f"non-finite {self.kind} drift at t = {self.t}")


def _open_interval(s: BridgeSchedule, t: float, what: str) -> None:
    if not (0.0 < t < s.T):
        raise SingularTimeError(f"{what} is defined only for 0 < t < T; got t = {t}")


def h_drift(s: BridgeSchedule, x_t: np.ndarray, y: np.ndarray, t: float) -> np.ndarray:
    """Endpoint attraction ((alpha_t/alpha_T) y - x_t) / (alpha_t^2 (rho_T^2 - rho_t^2)).

    This is the gradient of the log transition density to the pinned
    endpoint.  Defined for 0 <= t < T; it diverges at the horizon.
    """
    if not (0.0 <= t < s.T):
        raise SingularTimeError(f"h drift is defined only for 0 <= t < T; got t = {t}")
    a_t = float(alpha(s, t))
    denom = a_t * a_t * (float(rho2(s, s.T)) - float(rho2(s, t)))
    return ((a_t / float(alpha(s, s.T))) * np.asarray(y, dtype=float) - np.asarray(x_t, dtype=float)) / denom


def score_from_predictor(
    d_out: np.ndarray, x_t: np.ndarray, y: np.ndarray, t: float, s: BridgeSchedule
) -> np.ndarray:
    """Convert a predicted x0 into the pinned-marginal score.

    score = (b_t d_out - x_t + a_t y) / c_t^2.  When d_out is the exact
    posterior mean this equals the exact marginal score.
    """
    _open_interval(s, t, "score conversion")
    cf = coeffs(s, t)
    return (cf.b * np.asarray(d_out, dtype=float) - np.asarray(x_t, dtype=float) + cf.a * np.asarray(y, dtype=float)) / cf.c2


def reverse_sde_nonlinear(
    s: BridgeSchedule,
    x_t: np.ndarray,
    y: np.ndarray,
    t: float,
    score: np.ndarray | None = None,
    x0_hat: np.ndarray | None = None,
) -> DriftEvaluation:
    """Nonlinear bracket (score - h) of the reverse SDE drift.

    Accepts either the score directly or a predicted x0, in which case the
    algebraically equal form -(x_t - alpha_t x0_hat) / (alpha_t^2 rho_t^2)
    is used.  The two routes agree to roundoff and their common limit at
    t -> T is sde_limit_drift.
    """
    _open_interval(s, t, "reverse SDE bracket")
    if (score is None) == (x0_hat is None):
        raise ValueError("provide exactly one of score or x0_hat")
    if score is not None:
        value = np.asarray(score, dtype=float) - h_drift(s, x_t, y, t)
    else:
        a_t = float(alpha(s, t))
        value = -(np.asarray(x_t, dtype=float) - a_t * np.asarray(x0_hat, dtype=float)) / (
            a_t * a_t * float(rho2(s, t))
        )
    return DriftEvaluation(value=value, t=t, kind="reverse_sde_nonlinear")


def reverse_sde_drift(
    s: BridgeSchedule,
    x_t: np.ndarray,
    y: np.ndarray,
    t: float,
    score: np.ndarray | None = None,
    x0_hat: np.ndarray | None = None,
) -> DriftEvaluation:
    """Full reverse SDE drift f(t) x_t - g^2(t) (score - h)."""
    bracket = reverse_sde_nonlinear(s, x_t, y, t, score=score, x0_hat=x0_hat)
    value = s.f(t) * np.asarray(x_t, dtype=float) - s.g2(t) * bracket.value
    return DriftEvaluation(value=value, t=t, kind="sde_total")


def pf_ode_drift(
    s: BridgeSchedule, x_t: np.ndarray, y: np.ndarray, t: float, score: np.ndarray
) -> DriftEvaluation:
    """Probability-flow ODE drift f(t) x_t - g^2(t) (score/2 - h).

    Defined only on the open interval: the halved score makes the field
    genuinely singular at the horizon (its norm grows like 1/c_t), which is
    why samplers start strictly inside.
    """
    _open_interval(s, t, "flow ODE drift")
    x_t = np.asarray(x_t, dtype=float)
    value = s.f(t) * x_t - s.g2(t) * (0.5 * np.asarray(score, dtype=float) - h_drift(s, x_t, y, t))
    return DriftEvaluation(value=value, t=t, kind="pf_ode_total")


def sde_limit_drift(s: BridgeSchedule, y: np.ndarray, x0_hat_T: np.ndarray) -> np.ndarray:
    """Horizon limit of the reverse SDE bracket: -(y - alpha_T x0_hat) / (alpha_T^2 rho_T^2).

    Finite for any predicted x0, which is what lets SDE samplers take their
    first step exactly at t = T.
    """
    a_T = float(alpha(s, s.T))
    r_T = float(rho2(s, s.T))
    value = -(np.asarray(y, dtype=float) - a_T * np.asarray(x0_hat_T, dtype=float)) / (a_T * a_T * r_T)
    if not np.all(np.isfinite(value)):
        raise NonFiniteStateError("non-finite horizon drift limit")
    return value
