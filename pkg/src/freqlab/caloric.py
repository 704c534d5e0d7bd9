"""Backward caloric weight and its closed-form derivatives.

The weight centered at x0 with horizon T and shift lam is

    G(x, t) = (T - t + lam)^(-n/2) * exp(-|x - x0|^2 / (4(T - t + lam)))

a positive solution of the backward heat equation dG/dt + Lap G = 0, which
is what makes it the right multiplier for frequency quantities.  All
derivative formulas are closed-form in s = T - t + lam; finite-difference
cross-checks live in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidGeometry, TimeOutOfRange


@dataclass(frozen=True)
class CaloricWeight:
    """Weight parameters: center x0, horizon T, positive shift lam."""

    center: tuple[float, ...]
    horizon: float
    shift: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if not (self.horizon > 0 and np.isfinite(self.horizon)):
            raise InvalidGeometry("horizon T must be positive and finite")
        if not (self.shift > 0 and np.isfinite(self.shift)):
            raise InvalidGeometry("shift lam must be positive and finite")

    @property
    def dim(self) -> int:
        return len(self.center)


def _prep(w: CaloricWeight, x, t: float):
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[1] != w.dim:
        raise InvalidGeometry(
            f"points have dimension {x.shape[1]}, weight has {w.dim}"
        )
    if not (0.0 <= t <= w.horizon):
        raise TimeOutOfRange(f"t={t} outside [0, {w.horizon}]")
    s = w.horizon - t + w.shift
    d = x - np.asarray(w.center)
    return x, s, d


def eval_weight(w: CaloricWeight, x, t: float) -> np.ndarray:
    """G at points x (N, dim) and time t; returns (N,)."""
    _, s, d = _prep(w, x, t)
    r2 = np.sum(d * d, axis=1)
    return s ** (-w.dim / 2.0) * np.exp(-r2 / (4.0 * s))


def eval_weight_gradient(w: CaloricWeight, x, t: float) -> np.ndarray:
    """Spatial gradient of G, (N, dim): -(x - x0)/(2s) * G."""
    _, s, d = _prep(w, x, t)
    g = eval_weight(w, x, t)
    return -d / (2.0 * s) * g[:, None]


def eval_weight_hessian(w: CaloricWeight, x, t: float) -> np.ndarray:
    """Second spatial derivatives of G, (N, dim, dim)."""
    _, s, d = _prep(w, x, t)
    g = eval_weight(w, x, t)
    outer = d[:, :, None] * d[:, None, :] / (4.0 * s * s)
    eye = np.eye(w.dim) / (2.0 * s)
    return (outer - eye) * g[:, None, None]


def eval_weight_time_derivative(w: CaloricWeight, x, t: float) -> np.ndarray:
    """dG/dt, (N,): (n/(2s) - |x-x0|^2/(4 s^2)) * G."""
    _, s, d = _prep(w, x, t)
    r2 = np.sum(d * d, axis=1)
    g = eval_weight(w, x, t)
    return (w.dim / (2.0 * s) - r2 / (4.0 * s * s)) * g


def check_heat_identity(w: CaloricWeight, x, t: float) -> float:
    """Max relative residual of dG/dt + Lap G = 0 over the points."""
    gt = eval_weight_time_derivative(w, x, t)
    lap = np.trace(eval_weight_hessian(w, x, t), axis1=1, axis2=2)
    g = eval_weight(w, x, t)
    scale = np.maximum(np.abs(gt), g / (w.horizon - t + w.shift))
    scale = np.maximum(scale, np.finfo(float).tiny)
    return float(np.max(np.abs(gt + lap) / scale))
