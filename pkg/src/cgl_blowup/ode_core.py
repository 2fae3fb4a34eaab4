"""Blow-up ODE machinery for weakly coupled two-component systems.

The systems integrated here have the form

    f' + (omega/(q+1)) f = (p+1) C_p g^p,
    g' + (omega/(p+1)) g = (q+1) C_q f^q,

with exponents p*q > 1 and positive data, so every certified solution leaves
any compact set in finite time.  The module provides the closed-form single
blow-up solution, an embedded adaptive Runge-Kutta 5(4) integrator with PI
step control that terminates cleanly at a blow-up threshold, the exact
conserved quantity C_q f^{q+1} - C_p g^{p+1} (damped version decays like
e^{-omega t}), explicit lower-bound curves and lifespan bounds, and an
empirical comparison check for ordered trajectory pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DomainError, IntegrationError, ValidationError

__all__ = [
    "SingleODESpec",
    "CoupledODESpec",
    "Trajectory",
    "BoundReport",
    "ComparisonVerdict",
    "single_blowup_solution",
    "single_blowup_time",
    "integrate_coupled",
    "tail_corrected_lifespan",
    "conserved_residual",
    "conserved_residual_scaled",
    "undamped_bounds",
    "damped_bounds",
    "check_comparison",
    "mirrored_spec",
]

COMPLETED = "completed"
BLOWUP = "blow_up_threshold_reached"
STEP_COLLAPSE = "step_size_collapse"


# ---------------------------------------------------------------------------
# specs

@dataclass(frozen=True)
class SingleODESpec:
    """Data for f' = mu * f^rho, f(0) = f0 with rho > 1, mu > 0, f0 > 0."""

    rho: float
    mu: float
    f0: float

    def __post_init__(self):
        if not (self.rho > 1.0):
            raise ValidationError(f"rho must exceed 1, got {self.rho}")
        if not (self.mu > 0.0):
            raise ValidationError(f"mu must be positive, got {self.mu}")
        if not (self.f0 > 0.0):
            raise ValidationError(f"f0 must be positive, got {self.f0}")


def single_blowup_time(spec: SingleODESpec) -> float:
    """Blow-up time f0^(1-rho) / ((rho-1) mu) of the closed-form solution."""
    return spec.f0 ** (1.0 - spec.rho) / ((spec.rho - 1.0) * spec.mu)


def single_blowup_solution(spec: SingleODESpec, t: float) -> float:
    """Evaluate {f0^(1-rho) - (rho-1) mu t}^(-1/(rho-1)) for 0 <= t < T_f."""
    t_f = single_blowup_time(spec)
    if t < 0.0 or t >= t_f:
        raise DomainError(
            f"t={t} outside [0, T_f) with T_f={t_f}", blow_up_time=t_f
        )
    base = spec.f0 ** (1.0 - spec.rho) - (spec.rho - 1.0) * spec.mu * t
    return base ** (-1.0 / (spec.rho - 1.0))


@dataclass(frozen=True)
class CoupledODESpec:
    """Coefficients and data of the coupled system; omega = 0 is undamped."""

    p: float
    q: float
    C_p: float
    C_q: float
    omega: float
    f0: float
    g0: float

    def __post_init__(self):
        if not (self.p > 0.0 and self.q > 0.0):
            raise ValidationError("exponents p, q must be positive")
        if not (self.p * self.q > 1.0):
            raise ValidationError(
                f"need p*q > 1 (bound formulas have pq-1 denominators), "
                f"got pq={self.p * self.q}"
            )
        if not (self.C_p > 0.0 and self.C_q > 0.0):
            raise ValidationError("C_p and C_q must be positive")
        if not (self.omega >= 0.0):
            raise ValidationError("omega must be non-negative")
        if not (self.f0 > 0.0 and self.g0 > 0.0):
            raise ValidationError("initial data must be positive")

    @property
    def exponent_caveat(self) -> bool:
        """True when p < 1 or q < 1 (outside the fully verified regime)."""
        return self.p < 1.0 or self.q < 1.0


def mirrored_spec(spec: CoupledODESpec) -> CoupledODESpec:
    """Swap the roles of the two components."""
    return CoupledODESpec(
        p=spec.q, q=spec.p, C_p=spec.C_q, C_q=spec.C_p,
        omega=spec.omega, f0=spec.g0, g0=spec.f0,
    )


# ---------------------------------------------------------------------------
# trajectories

@dataclass(frozen=True)
class Trajectory:
    """Time-sampled (f, g) path with a termination status."""

    times: np.ndarray
    values: np.ndarray  # shape (n, 2), columns f and g
    status: str
    threshold: Optional[float] = None

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)
        if t.ndim != 1 or v.shape != (t.size, 2):
            raise ValidationError("times must be 1-d and values (n, 2)")
        if t.size and np.any(np.diff(t) <= 0.0):
            raise ValidationError("times must be strictly increasing")
        if not np.all(np.isfinite(v)) or np.any(v < 0.0):
            raise ValidationError("values must be finite and non-negative")
        if self.status not in (COMPLETED, BLOWUP, STEP_COLLAPSE):
            raise ValidationError(f"unknown status {self.status!r}")
        if self.status == BLOWUP:
            if self.threshold is None or v[-1].max() < self.threshold * (1 - 1e-12):
                raise ValidationError(
                    "blow_up_threshold_reached requires final max(f,g) >= threshold"
                )

    @property
    def f(self) -> np.ndarray:
        return self.values[:, 0]

    @property
    def g(self) -> np.ndarray:
        return self.values[:, 1]

    def escape_time(self) -> Optional[float]:
        """Threshold-crossing time, or None if the run never crossed."""
        return float(self.times[-1]) if self.status == BLOWUP else None

    def to_csv(self, path) -> None:
        from .serialize import write_csv

        write_csv(path, "t,f,g", [self.times, self.f, self.g])


def _rhs(spec: CoupledODESpec, f: float, g: float) -> tuple[float, float]:
    df = (spec.p + 1.0) * spec.C_p * g ** spec.p - spec.omega / (spec.q + 1.0) * f
    dg = (spec.q + 1.0) * spec.C_q * f ** spec.q - spec.omega / (spec.p + 1.0) * g
    return df, dg


def _hermite(theta, h, w0, d0, w1, d1):
    t2 = theta * theta
    t3 = t2 * theta
    return (
        (2 * t3 - 3 * t2 + 1) * w0
        + (t3 - 2 * t2 + theta) * h * d0
        + (-2 * t3 + 3 * t2) * w1
        + (t3 - t2) * h * d1
    )


_SAFETY = 0.9
_MIN_FAC = 0.2
_MAX_FAC = 6.0
_K_ALPHA = 0.7 / 5.0  # PI controller, proportional exponent for order 5
_K_BETA = 0.4 / 5.0   # PI controller, integral exponent


def integrate_coupled(
    spec: CoupledODESpec,
    t_end: float,
    tol: float = 1e-10,
    blowup_threshold: float = 1e6,
    max_steps: int = 2_000_000,
) -> Trajectory:
    """Integrate the coupled system with an embedded Dormand-Prince 5(4) pair.

    Stops at ``t_end``, at the first crossing of ``blowup_threshold`` by
    max(f, g) (located inside the step with a cubic Hermite model), or when
    the adaptive step collapses below 1e-14 of the current time scale near
    blow-up.  The returned trajectory records every accepted step.
    """
    if not (0.0 < tol <= 1e-3):
        raise ValidationError(f"tol must lie in (0, 1e-3], got {tol}")
    if not (blowup_threshold > max(spec.f0, spec.g0)):
        raise ValidationError("blowup_threshold must exceed max(f0, g0)")
    if not (t_end > 0.0):
        raise ValidationError("t_end must be positive")

    p, q, omega = spec.p, spec.q, spec.omega
    cp_fac = (p + 1.0) * spec.C_p
    cq_fac = (q + 1.0) * spec.C_q
    om_f = omega / (q + 1.0)
    om_g = omega / (p + 1.0)

    def rhs(f, g):
        return cp_fac * g ** p - om_f * f, cq_fac * f ** q - om_g * g

    t = 0.0
    f, g = spec.f0, spec.g0
    df, dg = rhs(f, g)

    ts = [0.0]
    fs = [f]
    gs = [g]

    # initial step from the local solution scale
    scale = min(abs(f) / max(abs(df), 1e-300), abs(g) / max(abs(dg), 1e-300))
    h = min(1e-2 * scale, t_end) if scale > 0 else t_end * 1e-6
    h = max(h, 1e-300)

    err_prev = 1.0
    status = None
    last_clipped = False

    for _ in range(max_steps):
        if t >= t_end * (1.0 - 1e-15):
            status = COMPLETED
            break
        t_scale = max(abs(t), 1e-3 * abs(t_end))
        if h < 1e-14 * t_scale:
            status = STEP_COLLAPSE
            break
        last_clipped = h >= t_end - t
        if last_clipped:
            h = t_end - t

        # Dormand-Prince stages (FSAL: df, dg hold the derivative at (t, f, g))
        k1f, k1g = df, dg
        yf = f + h * 0.2 * k1f
        yg = g + h * 0.2 * k1g
        k2f, k2g = rhs(yf, yg)
        yf = f + h * (0.075 * k1f + 0.225 * k2f)
        yg = g + h * (0.075 * k1g + 0.225 * k2g)
        k3f, k3g = rhs(yf, yg)
        yf = f + h * (44 / 45 * k1f - 56 / 15 * k2f + 32 / 9 * k3f)
        yg = g + h * (44 / 45 * k1g - 56 / 15 * k2g + 32 / 9 * k3g)
        k4f, k4g = rhs(yf, yg)
        yf = f + h * (19372 / 6561 * k1f - 25360 / 2187 * k2f
                      + 64448 / 6561 * k3f - 212 / 729 * k4f)
        yg = g + h * (19372 / 6561 * k1g - 25360 / 2187 * k2g
                      + 64448 / 6561 * k3g - 212 / 729 * k4g)
        k5f, k5g = rhs(yf, yg)
        yf = f + h * (9017 / 3168 * k1f - 355 / 33 * k2f + 46732 / 5247 * k3f
                      + 49 / 176 * k4f - 5103 / 18656 * k5f)
        yg = g + h * (9017 / 3168 * k1g - 355 / 33 * k2g + 46732 / 5247 * k3g
                      + 49 / 176 * k4g - 5103 / 18656 * k5g)
        k6f, k6g = rhs(yf, yg)
        fn = f + h * (35 / 384 * k1f + 500 / 1113 * k3f + 125 / 192 * k4f
                      - 2187 / 6784 * k5f + 11 / 84 * k6f)
        gn = g + h * (35 / 384 * k1g + 500 / 1113 * k3g + 125 / 192 * k4g
                      - 2187 / 6784 * k5g + 11 / 84 * k6g)
        if not (math.isfinite(fn) and math.isfinite(gn)):
            raise IntegrationError(
                f"non-finite state at t={t}", last_node=(t, f, g)
            )
        k7f, k7g = rhs(fn, gn)

        ef = h * (71 / 57600 * k1f - 71 / 16695 * k3f + 71 / 1920 * k4f
                  - 17253 / 339200 * k5f + 22 / 525 * k6f - 1 / 40 * k7f)
        eg = h * (71 / 57600 * k1g - 71 / 16695 * k3g + 71 / 1920 * k4g
                  - 17253 / 339200 * k5g + 22 / 525 * k6g - 1 / 40 * k7g)
        sc_f = tol * max(abs(f), abs(fn)) + 1e-300
        sc_g = tol * max(abs(g), abs(gn)) + 1e-300
        err = math.sqrt(0.5 * ((ef / sc_f) ** 2 + (eg / sc_g) ** 2))

        if err <= 1.0:
            crossed = max(fn, gn) >= blowup_threshold
            if crossed:
                theta = 1.0
                for w0, d0, w1, d1 in ((f, k1f, fn, k7f), (g, k1g, gn, k7g)):
                    if w1 < blowup_threshold:
                        continue
                    lo, hi = 0.0, 1.0
                    for _ in range(60):
                        mid = 0.5 * (lo + hi)
                        if _hermite(mid, h, w0, d0, w1, d1) >= blowup_threshold:
                            hi = mid
                        else:
                            lo = mid
                    theta = min(theta, hi)
                t = t + theta * h
                f = _hermite(theta, h, f, k1f, fn, k7f)
                g = _hermite(theta, h, g, k1g, gn, k7g)
                ts.append(t)
                fs.append(f)
                gs.append(g)
                status = BLOWUP
                break
            t = t + h
            f, g = fn, gn
            df, dg = k7f, k7g
            ts.append(t)
            fs.append(f)
            gs.append(g)
            if err == 0.0:
                fac = _MAX_FAC
            else:
                fac = _SAFETY * err ** (-_K_ALPHA) * err_prev ** _K_BETA
                fac = min(_MAX_FAC, max(_MIN_FAC, fac))
            err_prev = max(err, 1e-10)
            if not last_clipped:
                h *= fac
        else:
            h *= max(_MIN_FAC, _SAFETY * err ** (-0.2))
    else:
        raise IntegrationError("step budget exhausted", last_node=(t, f, g))

    if status is None:
        status = COMPLETED

    return Trajectory(
        times=np.array(ts),
        values=np.column_stack([fs, gs]),
        status=status,
        threshold=blowup_threshold if status == BLOWUP else None,
    )


def tail_corrected_lifespan(traj: Trajectory, spec: CoupledODESpec) -> float:
    """Threshold-crossing time plus the closed-form tail of the dominating
    single blow-up ODE fitted at the final node.

    For w ~ A (T - t)^(-gamma) the remaining time is gamma * w / w', with
    gamma = (p+1)/(pq-1) when f dominates and (q+1)/(pq-1) when g does, so
    the reported lifespan is insensitive to the threshold to first order.
    """
    if traj.status != BLOWUP:
        raise ValidationError("tail correction needs a threshold-crossing run")
    t1 = float(traj.times[-1])
    f1, g1 = float(traj.f[-1]), float(traj.g[-1])
    df1, dg1 = _rhs(spec, f1, g1)
    if f1 >= g1:
        w, dw = f1, df1
        rho = spec.p * (spec.q + 1.0) / (spec.p + 1.0)
    else:
        w, dw = g1, dg1
        rho = spec.q * (spec.p + 1.0) / (spec.q + 1.0)
    if dw <= 0.0:
        raise ValidationError("final node is not escaping (w' <= 0)")
    assert rho > 1.0  # guaranteed by pq > 1
    return t1 + w / ((rho - 1.0) * dw)


# ---------------------------------------------------------------------------
# conserved quantity

def _fg_products(traj: Trajectory, spec: CoupledODESpec):
    F = spec.C_q * traj.f ** (spec.q + 1.0)
    G = spec.C_p * traj.g ** (spec.p + 1.0)
    return F, G


def conserved_residual(traj: Trajectory, spec: CoupledODESpec) -> float:
    """max over nodes of |(F-G)e^(omega t) - (F(0)-G(0))| / max(1, |F(0)-G(0)|)
    with F = C_q f^(q+1), G = C_p g^(p+1).

    Note: with nodes stored as doubles the achievable floor of this quantity
    grows like eps * max(F, G); see ``conserved_residual_scaled`` for the
    floating-point-meaningful variant.
    """
    F, G = _fg_products(traj, spec)
    drift = (F - G) * np.exp(spec.omega * traj.times) - (F[0] - G[0])
    return float(np.max(np.abs(drift)) / max(1.0, abs(F[0] - G[0])))


def conserved_residual_scaled(traj: Trajectory, spec: CoupledODESpec) -> float:
    """Drift of the conserved quantity normalized node-wise by the magnitude
    of the quantities being differenced, max(1, |F(0)-G(0)|, (F+G)e^(omega t)).

    This is the sharpest conservation statement float64 node storage can
    support; an accurate integration keeps it at rounding level.
    """
    F, G = _fg_products(traj, spec)
    ew = np.exp(spec.omega * traj.times)
    drift = np.abs((F - G) * ew - (F[0] - G[0]))
    denom = np.maximum(1.0, np.maximum(abs(F[0] - G[0]), (F + G) * ew))
    return float(np.max(drift / denom))


# ---------------------------------------------------------------------------
# explicit bounds

@dataclass(frozen=True)
class BoundReport:
    """Lower-bound curve for g (and the induced one for f), the lifespan
    bound, and whether the hypothesis validating them holds."""

    hypothesis_satisfied: bool
    lifespan_bound: Optional[float] = None
    lower_bound_curve: Optional[Callable[[float], float]] = None
    f_lower_bound_curve: Optional[Callable[[float], float]] = None
    omega: float = 0.0
    exponent_caveat: bool = False

    def __post_init__(self):
        if self.hypothesis_satisfied and not (
            self.lifespan_bound is not None and self.lifespan_bound > 0.0
        ):
            raise ValidationError("satisfied hypothesis requires a positive bound")

    def to_json_dict(self, sample_times=None) -> dict:
        out = {
            "hypothesis_satisfied": bool(self.hypothesis_satisfied),
            "lifespan_bound": self.lifespan_bound,
            "omega": self.omega,
            "exponent_caveat": bool(self.exponent_caveat),
        }
        if sample_times is not None and self.lower_bound_curve is not None:
            out["lower_bound_times"] = [float(t) for t in sample_times]
            out["lower_bound"] = [
                float(self.lower_bound_curve(float(t))) for t in sample_times
            ]
        return out


def _f_from_g_curve(spec: CoupledODESpec, g_curve):
    """Lower bound for f induced from a g lower bound through the conserved
    quantity: f^{q+1} e^{omega t} = C_p/C_q g^{p+1} e^{omega t} + const."""
    pp, qq = spec.p + 1.0, spec.q + 1.0
    ratio = spec.C_p / spec.C_q
    const = spec.f0 ** qq - ratio * spec.g0 ** pp

    def f_curve(t: float) -> float:
        g = max(g_curve(t), 0.0)
        val = ratio * g ** pp + const * math.exp(-spec.omega * t)
        return val ** (1.0 / qq) if val > 0.0 else 0.0

    return f_curve


def undamped_bounds(spec: CoupledODESpec) -> BoundReport:
    """Explicit lower-bound curve and lifespan bound for the omega = 0 system.

    Requires C_q f0^{q+1} >= C_p g0^{p+1}; otherwise the report only records
    that the hypothesis failed.  The lifespan bound is exactly the blow-up
    time of the lower-bound curve.
    """
    if spec.omega != 0.0:
        raise ValidationError("undamped bounds require omega = 0")
    p, q = spec.p, spec.q
    pp, qq, D = p + 1.0, q + 1.0, p * q - 1.0
    F0 = spec.C_q * spec.f0 ** qq
    G0 = spec.C_p * spec.g0 ** pp
    if not (F0 >= G0):
        return BoundReport(False, exponent_caveat=spec.exponent_caveat)

    A = (
        spec.C_p ** (D / (pp * qq))
        * spec.C_q ** (-D / (pp * qq))
        * spec.f0 ** (-D / pp)
    )
    B = 2.0 ** (-p * q / qq) * D * spec.C_p ** (q / qq) * spec.C_q ** (1.0 / qq)
    shift = (spec.C_q * spec.f0 ** qq / spec.C_p - spec.g0 ** pp) ** (1.0 / pp)
    lifespan = (
        2.0 ** (p * q / qq) / D
        * spec.C_p ** (-1.0 / pp)
        * spec.C_q ** (-p / pp)
        * spec.f0 ** (-D / pp)
    )

    def g_curve(t: float) -> float:
        base = A - B * t
        if base <= 0.0:
            return math.inf
        return base ** (-qq / D) - shift

    return BoundReport(
        hypothesis_satisfied=True,
        lifespan_bound=lifespan,
        lower_bound_curve=g_curve,
        f_lower_bound_curve=_f_from_g_curve(spec, g_curve),
        omega=0.0,
        exponent_caveat=spec.exponent_caveat,
    )


def damped_hypothesis_terms(spec: CoupledODESpec) -> tuple[float, float]:
    """The two quantities whose maximum f0 must strictly exceed for the
    damped bounds to certify blow-up."""
    p, q = spec.p, spec.q
    pp, qq, D = p + 1.0, q + 1.0, p * q - 1.0
    term_damping = (
        2.0 ** ((pp / qq) * (p * q / D))
        * (qq * pp) ** (-pp / D)
        * spec.omega ** (pp / D)
        * spec.C_p ** (-1.0 / D)
        * spec.C_q ** (-p / D)
    )
    term_ordering = (spec.C_p / spec.C_q) ** (1.0 / qq) * spec.g0 ** (pp / qq)
    return term_damping, term_ordering


def damped_bounds(spec: CoupledODESpec) -> BoundReport:
    """Lower-bound curve and lifespan bound for the damped (omega > 0) system.

    The hypothesis is strict: f0 must exceed both the damping-strength term
    and the initial-ordering term.  When it holds the logarithm argument of
    the lifespan formula automatically lies in (0, 1), so the bound is
    finite, and it converges to the undamped bound as omega -> 0+.
    """
    if not (spec.omega > 0.0):
        raise ValidationError("damped bounds require omega > 0")
    p, q = spec.p, spec.q
    pp, qq, D = p + 1.0, q + 1.0, p * q - 1.0
    term1, term2 = damped_hypothesis_terms(spec)
    # strict inequalities, no tolerance slack
    if not (max(term1, term2) < spec.f0):
        return BoundReport(False, omega=spec.omega,
                           exponent_caveat=spec.exponent_caveat)

    a = (spec.C_p / spec.C_q) ** (D / (pp * qq)) * spec.f0 ** (-D / pp)
    b = (
        2.0 ** (-p * q / qq)
        * qq * pp / spec.omega
        * spec.C_q ** (1.0 / qq)
        * spec.C_p ** (q / qq)
    )
    shift = (spec.C_q * spec.f0 ** qq / spec.C_p - spec.g0 ** pp) ** (1.0 / pp)
    decay = spec.omega * D / (pp * qq)

    x = (
        2.0 ** (p * q / qq) / (qq * pp)
        * spec.omega
        * spec.C_q ** (-p / pp)
        * spec.C_p ** (-1.0 / pp)
        * spec.f0 ** (-D / pp)
    )
    assert 0.0 < x < 1.0  # equivalent to term1 < f0
    lifespan = -(qq * pp) / (spec.omega * D) * math.log1p(-x)

    omega = spec.omega

    def g_curve(t: float) -> float:
        base = a - b * (-math.expm1(-decay * t))
        if base <= 0.0:
            return math.inf
        return math.exp(-omega * t / pp) * (base ** (-qq / D) - shift)

    return BoundReport(
        hypothesis_satisfied=True,
        lifespan_bound=lifespan,
        lower_bound_curve=g_curve,
        f_lower_bound_curve=_f_from_g_curve(spec, g_curve),
        omega=spec.omega,
        exponent_caveat=spec.exponent_caveat,
    )


# ---------------------------------------------------------------------------
# comparison of trajectory pairs

@dataclass(frozen=True)
class ComparisonVerdict:
    passed: bool
    first_violation_index: Optional[int] = None
    first_violation_time: Optional[float] = None
    component: Optional[str] = None


def check_comparison(sub: Trajectory, super_: Trajectory) -> ComparisonVerdict:
    """Check strict componentwise ordering sub < super at all common nodes.

    Trajectories on different grids are resampled onto the union of their
    nodes inside the overlapping time range by monotone cubic interpolation.
    Returns the first violating node when strictness fails anywhere.
    """
    lo = max(sub.times[0], super_.times[0])
    hi = min(sub.times[-1], super_.times[-1])
    if not (hi > lo or (hi == lo and sub.times.size and super_.times.size)):
        raise ValidationError("trajectories have no overlapping time range")

    grid = np.union1d(sub.times, super_.times)
    grid = grid[(grid >= lo) & (grid <= hi)]
    if grid.size == 0:
        raise ValidationError("empty common grid")

    def resample(traj):
        if traj.times.size < 2:
            return np.repeat(traj.values, grid.size, axis=0)
        interp = PchipInterpolator(traj.times, traj.values, axis=0)
        return interp(grid)

    vs = resample(sub)
    vp = resample(super_)
    ok = vp > vs
    bad = ~(ok[:, 0] & ok[:, 1])
    if not bad.any():
        return ComparisonVerdict(True)
    i = int(np.argmax(bad))
    comp = "f" if not ok[i, 0] else "g"
    return ComparisonVerdict(
        False,
        first_violation_index=i,
        first_violation_time=float(grid[i]),
        component=comp,
    )
