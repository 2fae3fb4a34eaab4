"""Seeded parameter sampling for the verification sweeps."""

from __future__ import annotations

import numpy as np

from .ode_core import CoupledODESpec, damped_bounds, undamped_bounds


def sample_coupled_spec(rng: np.random.Generator, allow_damping: bool = True) -> CoupledODESpec:
    """Draw one spec with p, q in [1, 4], pq > 1, omega in {0} or [0.1, 2]."""
    while True:
        p = float(rng.uniform(1.0, 4.0))
        q = float(rng.uniform(1.0, 4.0))
        if p * q > 1.0 + 1e-9:
            break
    omega = 0.0
    if allow_damping and rng.uniform() < 0.5:
        omega = float(rng.uniform(0.1, 2.0))
    return CoupledODESpec(
        p=p,
        q=q,
        C_p=float(np.exp(rng.uniform(np.log(0.2), np.log(3.0)))),
        C_q=float(np.exp(rng.uniform(np.log(0.2), np.log(3.0)))),
        omega=omega,
        f0=float(rng.uniform(0.5, 3.0)),
        g0=float(rng.uniform(0.5, 3.0)),
    )


def sample_coupled_specs(seed: int, n: int, allow_damping: bool = True) -> list[CoupledODESpec]:
    rng = np.random.default_rng(seed)
    return [sample_coupled_spec(rng, allow_damping) for _ in range(n)]


def sample_hypothesis_specs(seed: int, n: int) -> list[CoupledODESpec]:
    """Draw n specs whose blow-up bounds are certified (mixed omega = 0 / > 0).

    Rejection sampling against the respective hypothesis; the draw sequence
    is deterministic in the seed.
    """
    rng = np.random.default_rng(seed)
    out: list[CoupledODESpec] = []
    want_damped = False
    while len(out) < n:
        spec = sample_coupled_spec(rng, allow_damping=want_damped)
        if want_damped and spec.omega == 0.0:
            continue
        report = damped_bounds(spec) if spec.omega > 0.0 else undamped_bounds(spec)
        if report.hypothesis_satisfied:
            out.append(spec)
            want_damped = not want_damped
    return out
