"""Power-law singularity fitting: extract the blow-up time T*, the rate
exponent gamma, and the amplitude A of a diverging series y ~ A (T*-t)^(-gamma).

Three-parameter fit via a golden-section search on T* with a closed-form
inner linear regression in log space; derivative-free and deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

__all__ = ["RateFit", "fit_power_law", "trailing_decade_window"]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class RateFit:
    t_star: float
    gamma: float
    amplitude: float
    residual: float  # rms misfit of log y
    window: tuple[float, float]

    def __post_init__(self):
        if not (self.t_star > self.window[1]):
            raise ValidationError("fitted t_star must exceed the window end")
        if not (self.gamma > 0.0):
            raise ValidationError(f"fitted gamma must be positive, got {self.gamma}")
        if not (self.residual >= 0.0):
            raise ValidationError("residual must be non-negative")

    def to_json_dict(self) -> dict:
        return {
            "t_star": self.t_star,
            "gamma": self.gamma,
            "amplitude": self.amplitude,
            "residual": self.residual,
            "window": [self.window[0], self.window[1]],
        }


def _regress(log_y: np.ndarray, log_s: np.ndarray) -> tuple[float, float, float]:
    """Least squares for log y = log A - gamma * log s; returns
    (gamma, log A, sum of squared residuals)."""
    x_mean = log_s.mean()
    y_mean = log_y.mean()
    dx = log_s - x_mean
    dy = log_y - y_mean
    denom = float(dx @ dx)
    slope = float(dx @ dy) / denom if denom > 0 else 0.0
    resid = dy - slope * dx
    return -slope, y_mean - slope * x_mean, float(resid @ resid)


def trailing_decade_window(times, values, top: float | None = None) -> tuple[float, float]:
    """Window covering the trailing decade of growth, [top/10, top] in value.

    ``top`` defaults to the final (largest) value of the series.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if top is None:
        top = float(values[-1])
    lo_mask = values >= top / 10.0
    hi_mask = values <= top
    mask = lo_mask & hi_mask
    if not mask.any():
        raise ValidationError("no nodes in the trailing decade of growth")
    idx = np.nonzero(mask)[0]
    return float(times[idx[0]]), float(times[idx[-1]])


def fit_power_law(times, values, window: tuple[float, float] | None = None) -> RateFit:
    """Fit y ~ A (T*-t)^(-gamma) on the given time window.

    Requires the windowed series to be strictly positive and increasing with
    at least 20 nodes.  T* is bracketed in [t_hi, t_hi + 10 (t_hi - t_lo)]
    and located by golden-section search on the inner-regression misfit.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.ndim != 1 or times.shape != values.shape:
        raise ValidationError("times and values must be matching 1-d arrays")
    if window is None:
        window = (float(times[0]), float(times[-1]))
    t_lo, t_hi = float(window[0]), float(window[1])
    if not (t_hi > t_lo):
        raise ValidationError("window must have positive length")
    mask = (times >= t_lo) & (times <= t_hi)
    t = times[mask]
    y = values[mask]
    if t.size < 20:
        raise ValidationError(f"need >= 20 nodes in window, got {t.size}")
    if np.any(y <= 0.0):
        raise ValidationError("series must be strictly positive on the window")
    if np.any(np.diff(y) <= 0.0):
        raise ValidationError("series must be strictly increasing on the window")

    log_y = np.log(y)
    span = t_hi - t_lo
    t_end = float(t[-1])

    def misfit(t_star: float) -> float:
        return _regress(log_y, np.log(t_star - t))[2]

    # golden-section on [t_end+, t_hi + 10 span]
    lo = t_end + 1e-12 * span
    hi = t_hi + 10.0 * span
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = misfit(c), misfit(d)
    for _ in range(200):
        if b - a < 1e-13 * span:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = misfit(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = misfit(d)
    t_star = 0.5 * (a + b)
    gamma, log_a, ss = _regress(log_y, np.log(t_star - t))
    return RateFit(
        t_star=t_star,
        gamma=gamma,
        amplitude=math.exp(log_a),
        residual=math.sqrt(ss / t.size),
        window=(t_lo, t_hi),
    )
