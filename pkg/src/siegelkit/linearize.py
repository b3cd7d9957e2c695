"""Linearizing power series of the quadratic and the Siegel boundary oracle.

The linearizer h solves h(lam w) = q(h(w)), h(w) = w + O(w^2).  Coefficients
are computed through a scale-invariant recursion (coefficients of h(s w)/s,
which stay O(1) when s is near the conformal radius), with multiplier angles
frac(k alpha) evaluated at extended precision so the small divisors
lam^k - lam carry no accumulated phase error.

The boundary estimate is self-validating: the truncated series is trusted on
the largest circle where its conjugacy residual |q(h_K(w)) - h_K(lam w)|
stays below tolerance, then pushed outward by a curvature-capped radial
extrapolation.  The plain circle at 0.995 of the estimated conformal radius
is kept alongside as the unrefined reference curve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from mpmath import mp

from .cfrac import RotationNumber, brjuno_sum
from .errors import DomainError, SmallDivisorOverflow
from .geom import point_in_polygon
from .maps import QuadMap

TWO_PI = 2.0 * math.pi


def multiplier_powers(rot_or_alpha, n: int, dps: int = 60) -> np.ndarray:
    """e^{2 pi i k alpha} for k = 0..n with extended-precision angle reduction."""
    with mp.workdps(dps):
        if isinstance(rot_or_alpha, RotationNumber):
            a = rot_or_alpha.value()
        else:
            a = mp.mpf(rot_or_alpha)
        out = np.empty(n + 1, dtype=complex)
        # incremental fractional parts stay exact at working precision
        fr = mp.mpf(0)
        for k in range(n + 1):
            out[k] = complex(mp.cos(2 * mp.pi * fr), mp.sin(2 * mp.pi * fr))
            fr = mp.frac(fr + a)
    return out


def linearize_coeffs(rot_or_alpha, n_terms: int, scale: float,
                     divisor_floor: float = 1e-13,
                     dps: int = 60) -> np.ndarray:
    """Scaled linearizer coefficients H with h(s w) = s sum_k H_k w^k, H_1 = 1."""
    lamk = multiplier_powers(rot_or_alpha, n_terms, dps=dps)
    lam = lamk[1]
    divisors = lamk[2:] - lam
    small = np.abs(divisors) < divisor_floor
    if np.any(small):
        k_bad = int(np.argmax(small)) + 2
        raise SmallDivisorOverflow(
            "|lam^%d - lam| = %.2e below the precision floor"
            % (k_bad, abs(divisors[k_bad - 2])), k=k_bad)
    c2 = (27.0 / 16.0) * lam * lam * scale
    H = np.zeros(n_terms + 1, dtype=complex)
    H[1] = 1.0
    for k in range(2, n_terms + 1):
        H[k] = c2 * np.dot(H[1:k], H[k - 1:0:-1]) / divisors[k - 2]
    return H


def _poly_eval(H, w):
    acc = np.zeros_like(w)
    for k in range(len(H) - 1, 0, -1):
        acc = acc * w + H[k]
    return acc * w


def _poly_deriv(H, w):
    acc = np.zeros_like(w)
    for k in range(len(H) - 1, 0, -1):
        acc = acc * w + k * H[k]
    return acc


def radius_estimates(H: np.ndarray, scale: float):
    """(hadamard, slope-fit) estimates of the conformal radius.

    hadamard: 1/limsup|c_k|^{1/k} over the tail window; slope-fit: least
    squares on log|H_k| vs k over the tail half.
    """
    k = np.arange(1, len(H))
    mag = np.abs(H[1:])
    good = mag > 1e-280
    kk = k[good]
    lm = np.log(mag[good])
    tail = kk > max(50, kk.max() // 2)
    A = np.vstack([kk[tail], np.ones(int(tail.sum()))]).T
    slope = np.linalg.lstsq(A, lm[tail], rcond=None)[0][0]
    rho_slope = scale * math.exp(-slope)
    window = kk > 50
    rho_had = scale / math.exp(float(np.max(lm[window] / kk[window])))
    return rho_had, rho_slope


@dataclass
class SiegelBoundaryOracle:
    """Independent Siegel-disk data from the linearizing series."""

    alpha: float
    scale: float
    coeffs: np.ndarray
    rho_hadamard: float
    rho_slope: float
    radius_validated: float  # largest residual-validated evaluation radius
    boundary: np.ndarray  # refined boundary polyline (complex)
    inner_circle: np.ndarray  # plain image of |w| = 0.995 * rho_hadamard
    conformal_radius: float
    diagnostics: dict = field(default_factory=dict)

    def curve_at(self, radius: float, n_theta: int = 4096) -> np.ndarray:
        th = np.linspace(0.0, TWO_PI, n_theta, endpoint=False)
        w = (radius / self.scale) * np.exp(1j * th)
        return self.scale * _poly_eval(self.coeffs, w)

    def contains(self, z) -> np.ndarray:
        """Membership inside the refined boundary polygon."""
        return point_in_polygon(np.atleast_1d(np.asarray(z, complex)),
                                self.boundary)

    def conjugacy_residual(self, radius: float, q: QuadMap,
                           n_theta: int = 1024) -> float:
        th = np.linspace(0.0, TWO_PI, n_theta, endpoint=False)
        w = (radius / self.scale) * np.exp(1j * th)
        hv = self.scale * _poly_eval(self.coeffs, w)
        lhs = q.f(hv)
        rhs = self.scale * _poly_eval(self.coeffs, q.lam * w)
        return float(np.abs(lhs - rhs).max())


def linearization_boundary(rot: RotationNumber, terms: int = 4096,
                           n_theta: int = 4096,
                           residual_tol: float = 1e-3,
                           extrapolation_cap: float = 3e-3,
                           brjuno_depth: int = 12) -> SiegelBoundaryOracle:
    """Siegel boundary estimate from the linearizing series.

    Requires a Brjuno-partial-finite rotation number; the coefficient scale
    is the Yoccoz-size guess e^{-B(alpha)} so the recursion stays in range.
    """
    bp = brjuno_sum(rot, brjuno_depth)
    if bp.tail_flag == "diverging":
        raise DomainError("Brjuno sum diverging: no Siegel disk to approximate")
    alpha = rot.value_float()
    q = QuadMap(alpha)
    scale = math.exp(-bp.best(0))
    H = linearize_coeffs(rot, terms, scale, dps=rot.dps)
    rho_had, rho_slope = radius_estimates(H, scale)

    # largest residual-validated circle
    factors = np.linspace(0.984, 1.006, 45)
    r_val = 0.98 * rho_had
    for fac in factors:
        r = fac * rho_had
        oracle_stub = SiegelBoundaryOracle(
            alpha=alpha, scale=scale, coeffs=H, rho_hadamard=rho_had,
            rho_slope=rho_slope, radius_validated=r, boundary=np.empty(0),
            inner_circle=np.empty(0), conformal_radius=rho_had)
        if oracle_stub.conjugacy_residual(r, q, n_theta=512) < residual_tol:
            r_val = r
    th = np.linspace(0.0, TWO_PI, n_theta, endpoint=False)
    wv = (r_val / scale) * np.exp(1j * th)
    base = scale * _poly_eval(H, wv)
    dbase = _poly_deriv(H, wv) * np.exp(1j * th)

    # corner-ray calibration of the radius against the known boundary point cp
    i_star = int(np.argmin(np.abs(base - q.cp)))
    d = dbase[i_star]
    t_star = float(np.real(np.conj(d) * (q.cp - base[i_star])) / abs(d) ** 2)
    rho_cal = r_val + max(t_star, 0.0)
    ray_miss = float(abs(base[i_star] + t_star * d - q.cp))

    # curvature-capped radial extrapolation toward the calibrated radius
    move = np.minimum(rho_cal - r_val,
                      extrapolation_cap / np.maximum(np.abs(dbase), 1e-12))
    boundary = base + move * dbase

    inner = (0.995 * rho_had / scale) * np.exp(1j * th)
    inner_circle = scale * _poly_eval(H, inner)

    return SiegelBoundaryOracle(
        alpha=alpha, scale=scale, coeffs=H,
        rho_hadamard=rho_had, rho_slope=rho_slope,
        radius_validated=r_val, boundary=boundary,
        inner_circle=inner_circle, conformal_radius=rho_cal,
        diagnostics={
            "brjuno": bp.best(0),
            "log_rho_plus_B": math.log(rho_cal) + bp.best(0),
            "corner_ray_miss": ray_miss,
            "corner_slope": float(abs(d)),
            "validated_factor": r_val / rho_had,
            "terms": terms,
        })


def critical_orbit(q: QuadMap, n: int = 200000,
                   drop_transient: int = 0) -> np.ndarray:
    """Forward orbit of the critical point (dense in the boundary for
    bounded type)."""
    out = np.empty(n, dtype=complex)
    z = complex(q.cp)
    for i in range(n):
        z = q.lam * z + q.c2 * z * z
        out[i] = z
    return out[drop_transient:]
