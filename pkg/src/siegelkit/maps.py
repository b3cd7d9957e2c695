"""Closed-form holomorphic maps and model geometry for the quadratic family.

Everything here is double-precision and vectorized over numpy arrays; the
quadratic family is normalized so all members share the critical value
-4/27.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

TWO_PI = 2.0 * math.pi

CRITICAL_VALUE = -4.0 / 27.0

# model geometry constants
ELLIPSE_CENTER_X = -0.18
ELLIPSE_AX = 1.24
ELLIPSE_AY = 1.04
RADIUS_OUTER = (4.0 / 27.0) * math.exp(4.0 * math.pi)
RADIUS_INNER = (4.0 / 27.0) * math.exp(-4.0 * math.pi)
RADIUS_TRAP = (4.0 / 27.0) * math.exp(3.0 * math.pi)


class QuadMap:
    """The normalized quadratic q(z) = e^{2 pi i a} z + (27/16) e^{4 pi i a} z^2.

    Carries the closed-form fixed points and critical data, plus the
    covering tau onto the twice-punctured sphere and the lift of q under it.
    """

    def __init__(self, alpha: float):
        alpha = float(alpha)
        if not 0.0 < alpha < 1.0:
            raise DomainError("alpha must lie in (0,1)")
        self.alpha = alpha
        self.lam = cmath.exp(2j * math.pi * alpha)
        self.c2 = (27.0 / 16.0) * self.lam**2
        self.sigma = (16.0 / 27.0) * cmath.exp(-4j * math.pi * alpha) * (1.0 - self.lam)
        self.cp = -(8.0 / 27.0) * cmath.exp(-2j * math.pi * alpha)
        self.cv = CRITICAL_VALUE

    # -- polynomial --------------------------------------------------------
    def f(self, z):
        return self.lam * z + self.c2 * z * z

    def df(self, z):
        return self.lam + 2.0 * self.c2 * z

    def f_iter(self, z, n: int):
        for _ in range(n):
            z = self.f(z)
        return z

    def finv(self, z, anchor):
        """Preimage of z under q nearest to `anchor` (closed-form roots)."""
        disc = np.sqrt(self.lam * self.lam + 4.0 * self.c2 * np.asarray(z, complex))
        r1 = (-self.lam + disc) / (2.0 * self.c2)
        r2 = (-self.lam - disc) / (2.0 * self.c2)
        pick = np.abs(r1 - anchor) <= np.abs(r2 - anchor)
        return np.where(pick, r1, r2)

    def finv_both(self, z):
        disc = np.sqrt(self.lam * self.lam + 4.0 * self.c2 * np.asarray(z, complex))
        return ((-self.lam + disc) / (2.0 * self.c2),
                (-self.lam - disc) / (2.0 * self.c2))

    # -- covering ----------------------------------------------------------
    def uvar(self, w):
        return np.exp(-2j * math.pi * self.alpha * np.asarray(w, complex))

    def tau(self, w):
        return self.sigma / (1.0 - self.uvar(w))

    def dtau(self, w):
        u = self.uvar(w)
        return -self.sigma * 2j * math.pi * self.alpha * u / (1.0 - u) ** 2

    def tau_inv(self, z, anchor):
        """Branch of the covering inverse nearest to `anchor`.

        All branches differ by integer multiples of the period 1/alpha; the
        candidate periods adjacent to the rounded offset are compared so the
        selection is stable on the principal-log seam.
        """
        z = np.asarray(z, dtype=complex)
        base = np.log(1.0 - self.sigma / z) / (-2j * math.pi * self.alpha)
        k0 = np.round((np.real(anchor) - np.real(base)) * self.alpha)
        best = base + k0 / self.alpha
        for dk in (-1.0, 1.0):
            cand = base + (k0 + dk) / self.alpha
            pick = np.abs(cand - anchor) < np.abs(best - anchor)
            best = np.where(pick, cand, best)
        return best


# ---------------------------------------------------------------------------
# modified exponential
# ---------------------------------------------------------------------------

def exp_modified(zeta):
    """Anti-holomorphic covering zeta -> -(4/27) conj(e^{2 pi i zeta})."""
    return -(4.0 / 27.0) * np.conj(np.exp(2j * math.pi * np.asarray(zeta, complex)))


def log_modified(z, anchor):
    """Preimage of z under the modified exponential nearest to `anchor`.

    Branches differ by integer translations; normalized so that the image
    of -4/27 can be any integer, selected by the anchor.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise DomainError("the modified exponential omits 0")
    base = np.conj(np.log(-27.0 * z / 4.0) / (2j * math.pi))
    k0 = np.round(np.real(anchor) - np.real(base))
    best = base + k0
    for dk in (-1.0, 1.0):
        cand = base + (k0 + dk)
        pick = np.abs(cand - anchor) < np.abs(best - anchor)
        best = np.where(pick, cand, best)
    return best


# ---------------------------------------------------------------------------
# model geometry
# ---------------------------------------------------------------------------

def cubic_model(z):
    """P(z) = z (1+z)^2, the parabolic model with critical value -4/27."""
    z = np.asarray(z, dtype=complex)
    return z * (1.0 + z) ** 2


def psi1(z):
    z = np.asarray(z, dtype=complex)
    return -4.0 * z / (1.0 + z) ** 2


def in_ellipse(w) -> np.ndarray:
    """Membership in the closed ellipse E of the model domain."""
    w = np.asarray(w, dtype=complex)
    out = (((w.real - ELLIPSE_CENTER_X) / ELLIPSE_AX) ** 2
           + (w.imag / ELLIPSE_AY) ** 2) <= 1.0
    return out & np.isfinite(w.real)


def in_domain_U(z) -> np.ndarray:
    """Membership of z in U = psi1(complement of E).

    psi1(w) = z reduces to z w^2 + (2z+4) w + z = 0, whose two roots are
    reciprocal; z is in U iff at least one root lies outside E (the root
    continuously connected to w = infinity <-> z = 0).
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.zeros(z.shape, dtype=bool)
    small = np.abs(z) < 1e-14
    out[small] = True  # z = 0 is psi1(infinity), and infinity is outside E
    zz = z[~small]
    if zz.size:
        disc = np.sqrt((2.0 * zz + 4.0) ** 2 - 4.0 * zz * zz)
        w1 = (-(2.0 * zz + 4.0) + disc) / (2.0 * zz)
        w2 = (-(2.0 * zz + 4.0) - disc) / (2.0 * zz)
        out[~small] = (~in_ellipse(w1)) | (~in_ellipse(w2))
    return out if out.shape != (1,) else out.reshape(())


@dataclass(frozen=True)
class ModelGeometry:
    """Compiled-in model geometry constants with an audit dump."""

    ellipse_center_x: float = ELLIPSE_CENTER_X
    ellipse_ax: float = ELLIPSE_AX
    ellipse_ay: float = ELLIPSE_AY
    radius_outer: float = RADIUS_OUTER
    radius_inner: float = RADIUS_INNER
    radius_trap: float = RADIUS_TRAP
    critical_value: float = CRITICAL_VALUE

    def to_json(self) -> dict:
        return {
            "ellipse": {"center_x": self.ellipse_center_x,
                        "semi_axis_x": self.ellipse_ax,
                        "semi_axis_y": self.ellipse_ay},
            "radius_outer": self.radius_outer,
            "radius_inner": self.radius_inner,
            "radius_trap": self.radius_trap,
            "critical_value": self.critical_value,
            "cubic_model_critical_point": -1.0 / 3.0,
        }


# ---------------------------------------------------------------------------
# Koebe distortion bounds
# ---------------------------------------------------------------------------

def koebe_bounds(z):
    """Distortion bounds for univalent f on the disk with f(0)=0, f'(0)=1.

    Returns (growth_lo, growth_hi, deriv_lo, deriv_hi, arg_bound) at |z|.
    """
    r = abs(complex(z)) if np.isscalar(z) or isinstance(z, complex) else np.abs(z)
    if np.any(np.asarray(r) >= 1.0):
        raise DomainError("Koebe bounds require |z| < 1")
    growth_lo = r / (1.0 + r) ** 2
    growth_hi = r / (1.0 - r) ** 2
    deriv_lo = (1.0 - r) / (1.0 + r) ** 3
    deriv_hi = (1.0 + r) / (1.0 - r) ** 3
    arg_bound = 2.0 * np.log((1.0 + r) / (1.0 - r))
    return growth_lo, growth_hi, deriv_lo, deriv_hi, arg_bound


def koebe_function(z):
    """The extremal function k(z) = z/(1-z)^2."""
    z = np.asarray(z, dtype=complex)
    return z / (1.0 - z) ** 2
