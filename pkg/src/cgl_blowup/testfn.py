"""Compactly supported weight phi = psi^2 built from the first Dirichlet
eigenfunction psi of -Laplace on the unit ball (n = 1, 2, 3).

psi is normalized by max psi = psi(0) = 1 and extended by zero outside B(1),
so phi is C^1 on R^n (phi and its radial derivative vanish at r = 1) and
satisfies -Laplace(phi) = 2*lam*phi - 2|grad psi|^2 <= lambda_eff * phi with
lambda_eff = 2*lam.  All evaluators are radial, vectorized and total on R^n.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import j0, j1

from .errors import ValidationError

__all__ = ["TestFunctionData", "build_test_function", "verify_phi_inequality"]

_SURFACE = {1: 2.0, 2: 2.0 * np.pi, 3: 4.0 * np.pi}  # |S^{n-1}|


def _sinc(x):
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-4
    xs = np.where(small, 1.0, x)
    out = np.where(small, 1.0 - x * x / 6.0 + x ** 4 / 120.0, np.sin(xs) / xs)
    return out


def _dsinc(x):
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-4
    xs = np.where(small, 1.0, x)
    out = np.where(
        small,
        -x / 3.0 + x ** 3 / 30.0,
        (np.cos(xs) - np.sin(xs) / xs) / xs,
    )
    return out


def _dsinc_over_x(x):
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-4
    xs = np.where(small, 1.0, x)
    out = np.where(
        small,
        -1.0 / 3.0 + x * x / 10.0,
        (np.cos(xs) - np.sin(xs) / xs) / (xs * xs),
    )
    return out


def _j1_over_x(x):
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-8
    xs = np.where(small, 1.0, x)
    return np.where(small, 0.5, j1(xs) / xs)


@dataclass(frozen=True)
class TestFunctionData:
    """Radial weight phi = psi^2 with its eigenvalue and L^1 norm."""

    n: int
    lam: float          # Dirichlet eigenvalue of psi
    lambda_eff: float   # effective constant in -Laplace(phi) <= lambda_eff*phi
    l1_norm: float      # integral of phi over B(1)
    bessel_zero: float  # first zero of J_0 (n = 2 only, else 0)

    # -- psi and radial derivatives -----------------------------------------

    def psi(self, r):
        r = np.asarray(r, dtype=float)
        inside = r < 1.0
        if self.n == 1:
            val = np.cos(0.5 * np.pi * r)
        elif self.n == 2:
            val = j0(self.bessel_zero * r)
        else:
            val = _sinc(np.pi * r)
        return np.where(inside, val, 0.0)

    def dpsi(self, r):
        r = np.asarray(r, dtype=float)
        inside = r < 1.0
        if self.n == 1:
            val = -0.5 * np.pi * np.sin(0.5 * np.pi * r)
        elif self.n == 2:
            k = self.bessel_zero
            val = -k * j1(k * r)
        else:
            val = np.pi * _dsinc(np.pi * r)
        return np.where(inside, val, 0.0)

    def _ddpsi(self, r):
        r = np.asarray(r, dtype=float)
        if self.n == 1:
            return -((0.5 * np.pi) ** 2) * np.cos(0.5 * np.pi * r)
        if self.n == 2:
            k = self.bessel_zero
            return -k * k * (j0(k * r) - _j1_over_x(k * r))
        # spherical: sinc'' = -sinc - 2 sinc'/x
        x = np.pi * r
        return np.pi ** 2 * (-_sinc(x) - 2.0 * _dsinc_over_x(x))

    def _dpsi_over_r(self, r):
        r = np.asarray(r, dtype=float)
        if self.n == 1:
            small = r < 1e-8
            rs = np.where(small, 1.0, r)
            return np.where(
                small,
                -((0.5 * np.pi) ** 2),
                -0.5 * np.pi * np.sin(0.5 * np.pi * r) / rs,
            )
        if self.n == 2:
            k = self.bessel_zero
            return -k * k * _j1_over_x(k * r)
        return np.pi ** 2 * _dsinc_over_x(np.pi * r)

    # -- phi = psi^2 ---------------------------------------------------------

    def phi(self, r):
        return self.psi(r) ** 2

    def dphi(self, r):
        return 2.0 * self.psi(r) * self.dpsi(r)

    def lap_phi(self, r):
        """Radial Laplacian of phi, evaluated from the closed forms of psi
        (zero outside the support)."""
        r = np.asarray(r, dtype=float)
        inside = r < 1.0
        val = 2.0 * self.dpsi(r) ** 2 + 2.0 * self.psi(r) * self._ddpsi(r)
        if self.n > 1:
            val = val + (self.n - 1) * 2.0 * self.psi(r) * self._dpsi_over_r(r)
        return np.where(inside, val, 0.0)

    def lap_psi(self, r):
        r = np.asarray(r, dtype=float)
        inside = r < 1.0
        val = self._ddpsi(r)
        if self.n > 1:
            val = val + (self.n - 1) * self._dpsi_over_r(r)
        return np.where(inside, val, 0.0)

    def profile(self, resolution: int):
        """Radial samples (r, phi, lap_phi) on [0, 1]."""
        r = np.linspace(0.0, 1.0, resolution)
        return r, self.phi(r), self.lap_phi(r)

    def to_csv(self, path, resolution: int = 1024) -> None:
        from .serialize import write_csv

        r, phi, lap = self.profile(resolution)
        write_csv(path, "r,phi,lap_phi", [r, phi, lap])


def build_test_function(n: int) -> TestFunctionData:
    """First Dirichlet eigenpair of the unit ball, squared.

    n=1: psi = cos(pi x / 2), lam = pi^2/4.  n=2: psi = J0(j01 r), lam = j01^2
    with the zero bracketed in [2, 3] and refined to 1e-14.  n=3:
    psi = sin(pi r)/(pi r), lam = pi^2.  The L^1 norm is computed by adaptive
    radial quadrature (relative tolerance well below 1e-10).
    """
    if n not in (1, 2, 3):
        raise ValidationError(f"dimension must be 1, 2 or 3, got {n}")
    if n == 1:
        lam = 0.25 * np.pi ** 2
        zero = 0.0
    elif n == 2:
        zero = brentq(j0, 2.0, 3.0, xtol=1e-14, rtol=8.9e-16)
        lam = zero * zero
    else:
        lam = np.pi ** 2
        zero = 0.0
    tf = TestFunctionData(n=n, lam=float(lam), lambda_eff=float(2 * lam),
                          l1_norm=1.0, bessel_zero=float(zero))
    integrand = lambda r: float(tf.phi(r)) * r ** (n - 1)
    val, err = quad(integrand, 0.0, 1.0, epsabs=1e-14, epsrel=1e-13, limit=200)
    l1 = _SURFACE[n] * val
    object.__setattr__(tf, "l1_norm", float(l1))
    return tf


def verify_phi_inequality(tf: TestFunctionData, grid_resolution: int) -> float:
    """Max over radial samples of -Laplace(phi) - lambda_eff * phi.

    Non-positive (to rounding) for a valid construction; the slack is
    -2 |grad psi|^2.
    """
    if grid_resolution < 64:
        raise ValidationError("grid_resolution must be at least 64")
    r = np.linspace(0.0, 1.0, grid_resolution)
    violation = -tf.lap_phi(r) - tf.lambda_eff * tf.phi(r)
    return float(np.max(violation))
