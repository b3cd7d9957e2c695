"""Numerical perturbed Fatou coordinates for the quadratic family.

The coordinate is built in the covering plane of tau.  The lift of the
quadratic under tau has the cancellation-free closed form

    F(w) = w + 1 - Log(lam (2 - lam - u) / (1 - lam u)) / (2 pi i alpha),

with u = e^{-2 pi i alpha w}, exact at any height (both fixed points of the
quadratic are absorbed algebraically, so no catastrophic cancellation occurs
near either end of the cylinder).

The Fatou coordinate itself is produced in two stages:

1. *Column welding.*  On a vertical anchor column the conjugacy defect of
   the near-translation is solved as a cohomological equation: the correction
   u(w) = L(w) - w is expanded in horizontal-exponential modes e^{mu (w-s0)}
   (diagonalizing the unit translation) plus two explicit logarithmic step
   atoms that absorb the different translation lengths at the two cylinder
   ends, and the mildly nonlinear equation u(F(x)) - u(x) = -(F(x)-x-1) is
   settled by a Picard iteration.  Converges geometrically; the welding
   residual is recorded.

2. *First-passage propagation.*  Any point is transported to the welded
   landing strip by forward/backward lift orbits and the Abel relation; the
   construction makes the functional equation exact along orbits, so the
   only error budget is the welding residual at seam crossings.

The final additive constant is fixed by Phi(cv) = 1.
"""

from __future__ import annotations

import json
import math
import os
import struct
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import constants
from .cfrac import RotationNumber, brjuno_sum
from .errors import (BranchAmbiguous, DomainError, NewtonDiverged,
                     OrbitEscaped, OutOfExtendedDomain, ResidualTooLarge)
from .maps import QuadMap, exp_modified

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# lifted map
# ---------------------------------------------------------------------------

class LiftedMap:
    """The lift F of a quadratic under its covering tau, with F ~ w + 1."""

    def __init__(self, q: QuadMap, alpha_max: float = constants.ALPHA_MAX,
                 lattice_margin: float = 0.7):
        if q.alpha > alpha_max:
            raise DomainError(
                "alpha=%.4f exceeds alpha_max=%.3f; the perturbed petal "
                "machinery needs a small rotation number" % (q.alpha, alpha_max))
        self.q = q
        self.alpha = q.alpha
        self.lattice_margin = lattice_margin
        # asymptotic translation at the bottom end (repelling fixed point)
        self.b_bottom = -np.log(2.0 - q.lam) / (2j * math.pi * q.alpha)
        # probe the branch: the lift must be a near-translation high up
        probe = 0.43 / q.alpha + 1j * (2.5 / q.alpha)
        defect = abs(self.F(probe) - probe - 1.0)
        if defect > 1e-6:
            raise BranchAmbiguous(
                "lift is not near-translation at the probe column "
                "(defect %.2e); alpha too large" % defect)

    # closed-form translation defect; no cancellation at either end
    def eps(self, w):
        u = self.q.uvar(w)
        lam = self.q.lam
        return -np.log(lam * (2.0 - lam - u) / (1.0 - lam * u)) / (
            2j * math.pi * self.alpha)

    def F(self, w):
        return w + 1.0 + self.eps(w)

    def dF(self, w):
        u = self.q.uvar(w)
        lam = self.q.lam
        return 1.0 + u * (lam / (1.0 - lam * u) - 1.0 / (2.0 - lam - u))

    def Finv(self, W):
        """Inverse lift by fixed-point warmup plus Newton on F."""
        W = np.asarray(W, dtype=complex)
        w = W - 1.0
        for _ in range(3):
            w = W - 1.0 - self.eps(w)
        for _ in range(12):
            delta = (self.F(w) - W) / self.dF(w)
            w = w - delta
            if np.max(np.abs(delta)) < 1e-13:
                break
        return w

    def in_validity(self, w) -> np.ndarray:
        """Outside the excluded disks around the covering's pole lattice."""
        w = np.asarray(w, dtype=complex)
        k = np.round(np.real(w) * self.alpha)
        return np.abs(w - k / self.alpha) >= self.lattice_margin

    def semiconjugacy_residual(self, w) -> np.ndarray:
        """|tau(F(w)) - q(tau(w))| (diagnostic, moderate heights only)."""
        return np.abs(self.q.tau(self.F(w)) - self.q.f(self.q.tau(w)))


# ---------------------------------------------------------------------------
# welding
# ---------------------------------------------------------------------------

class _StepAtom:
    """Holomorphic step A with A(w+1)-A(w) -> 0 at +i inf and -> -1 at -i inf.

    A(w) = -Log(1 - e^{2 pi i rho (w - w0)}) / (2 pi i rho); the zeros of the
    argument sit on the horizontal lattice w0 + Z/rho, placed far outside the
    evaluation strip, and A grows linearly (slope -1) at the bottom, matching
    the changed translation length near the repelling end.
    """

    def __init__(self, rho: float, w0: complex):
        self.rho = rho
        self.w0 = w0

    def val(self, w):
        qv = np.exp(2j * math.pi * self.rho * (np.asarray(w, complex) - self.w0))
        return -np.log1p(-qv) / (2j * math.pi * self.rho)

    def dval(self, w):
        qv = np.exp(2j * math.pi * self.rho * (np.asarray(w, complex) - self.w0))
        return qv / (1.0 - qv)


class _ColumnWeld:
    """Cohomological solve for u = L - id on a vertical anchor column."""

    def __init__(self, lift: LiftedMap, s0: float, half_window: float,
                 n_line: int = 4096, mu_max: float = 3.5,
                 n_picard: int = 24, target: float = 2e-11):
        self.lift = lift
        self.s0 = s0
        self.Y = half_window
        self.N = n_line
        self.P = 2.0 * half_window
        y = -self.Y + self.P * np.arange(self.N) / self.N
        self.xline = s0 + 1j * y
        rho = 14.0 / self.P
        per = 1.0 / rho
        w01 = s0 + 0.5 + per / 2.0 + 0.0j
        w02 = s0 + 0.5 + per / 2.0 - 1j * self.Y / 3.0
        self.atoms = (_StepAtom(rho, w01), _StepAtom(rho, w02))
        self.acoef = np.zeros(2, dtype=complex)
        k = np.fft.fftfreq(self.N, d=1.0 / self.N)
        self.mu = TWO_PI * k / self.P
        self.keep = (np.abs(self.mu) <= mu_max) & (k != 0)
        self.mu_keep = self.mu[self.keep]
        self.vc_keep = np.zeros(self.mu_keep.shape, dtype=complex)
        self.residual_history: list = []
        self._solve(n_picard, target)

    # mode sums -------------------------------------------------------------
    def _modes(self, w):
        wa = np.atleast_1d(np.asarray(w, dtype=complex))
        return np.exp(np.multiply.outer(wa - self.s0, self.mu_keep))

    def v(self, w):
        out = self._modes(w) @ self.vc_keep
        return out.reshape(np.shape(w)) if np.shape(w) else out[0]

    def dv(self, w):
        out = self._modes(w) @ (self.vc_keep * self.mu_keep)
        return out.reshape(np.shape(w)) if np.shape(w) else out[0]

    def u(self, w):
        out = self.v(w)
        for a_c, at in zip(self.acoef, self.atoms):
            out = out + a_c * at.val(w)
        return out

    def du(self, w):
        out = self.dv(w)
        for a_c, at in zip(self.acoef, self.atoms):
            out = out + a_c * at.dval(w)
        return out

    def lam_val(self, w):
        return w + self.u(w)

    # solve -------------------------------------------------------------------
    def _solve(self, n_picard: int, target: float):
        lift = self.lift
        Fx = lift.F(self.xline)
        eps = Fx - self.xline - 1.0
        # total per-atom difference A(F(x)) - A(x)
        d1 = self.atoms[0].val(Fx) - self.atoms[0].val(self.xline)
        d2 = self.atoms[1].val(Fx) - self.atoms[1].val(self.xline)
        m1, m2 = np.mean(d1), np.mean(d2)
        # bottom decay of the inhomogeneity pins the total atom weight
        b = lift.b_bottom
        a_sum = (b - 1.0) / b
        for _ in range(n_picard):
            vcorr = (self.v(Fx) - self.v(self.xline + 1.0)
                     if len(self.residual_history) else 0.0)
            base = -eps - vcorr
            t = (np.mean(base) - a_sum * m1) / (m2 - m1)
            self.acoef = np.array([a_sum - t, t])
            g = base - self.acoef[0] * d1 - self.acoef[1] * d2
            ghat = np.fft.fft(g) / self.N * np.exp(1j * self.mu * self.Y)
            vhat = np.zeros(self.N, dtype=complex)
            nz = self.keep
            vhat[nz] = ghat[nz] / (np.exp(self.mu[nz]) - 1.0)
            self.vc_keep = vhat[self.keep]
            res = float(np.abs(self.lam_val(Fx) - self.lam_val(self.xline) - 1.0).max())
            self.residual_history.append(res)
            if res < target:
                break

    @property
    def residual(self) -> float:
        return self.residual_history[-1]


# ---------------------------------------------------------------------------
# the coordinate
# ---------------------------------------------------------------------------

class FatouCoordinate:
    """Evaluator for the perturbed Fatou coordinate of one quadratic.

    phi_w / phi_z evaluate the coordinate (normalized so phi(cv) = 1);
    inverse_w / inverse_z invert it by Newton with analytic derivatives.
    All entry points are vectorized and safe for concurrent use once built.
    """

    def __init__(self, q_or_alpha, n_line: int = 4096,
                 alpha_max: float = constants.ALPHA_MAX,
                 weld_target: float = 2e-11):
        q = q_or_alpha if isinstance(q_or_alpha, QuadMap) else QuadMap(q_or_alpha)
        self.q = q
        self.alpha = q.alpha
        self.lift = LiftedMap(q, alpha_max=alpha_max)
        self.s0 = 0.43 / q.alpha  # off the principal-log seam at 1/(2 alpha)
        self.Ywin = 4.6 / q.alpha
        self.weld = _ColumnWeld(self.lift, self.s0, self.Ywin,
                                n_line=n_line, target=weld_target)
        if self.weld.residual > 1e-8:
            raise ResidualTooLarge(
                "column welding stalled at %.2e" % self.weld.residual,
                diagnostics={"history": self.weld.residual_history})
        self.y_clamp = self.Ywin - 12.0
        self.max_steps = int(2.0 / q.alpha) + 80
        self.w_cv = complex(q.tau_inv(complex(q.cv), 0.2 / q.alpha + 0.0j))
        self.C = 0.0
        self.C = complex(1.0 - self.E(self.w_cv))
        self.w_cp = complex(q.tau_inv(complex(q.cp), self.w_cv - 1.0))
        # usable right margin of the coordinate strip (measured, not assumed)
        probe = 1.0 / q.alpha - 0.75 + 0.5j
        self.margin_right = float(np.floor(np.real(self.E(probe) + self.C)))
        self.k_hat = int(math.floor(1.0 / q.alpha) - self.margin_right)

    # -- first-passage evaluator -------------------------------------------
    def E(self, w, with_derivative: bool = False, strict: bool = False):
        """Abel-propagated coordinate in the covering plane (un-normalized).

        Points whose passage orbit fails to reach the landing strip within
        the step budget come back as NaN (or raise OrbitEscaped when
        strict); this keeps mixed-domain vector queries usable.
        """
        w = np.atleast_1d(np.asarray(w, dtype=complex))
        shape = w.shape
        w = w.ravel().copy()
        n = np.zeros(w.shape, dtype=np.int64)
        deriv = np.ones(w.shape, dtype=complex) if with_derivative else None
        lift = self.lift
        for _ in range(self.max_steps):
            left = np.real(w) < self.s0
            if not np.any(left):
                break
            if with_derivative:
                deriv[left] *= lift.dF(w[left])
            w[left] = lift.F(w[left])
            n[left] += 1
        for _ in range(self.max_steps):
            right = np.real(w) >= self.s0 + 1.0
            if not np.any(right):
                break
            w[right] = lift.Finv(w[right])
            if with_derivative:
                deriv[right] /= lift.dF(w[right])
            n[right] -= 1
        bad = ~((np.real(w) >= self.s0 - 1e-9)
                & (np.real(w) < self.s0 + 1.0 + 1e-9))
        bad |= ~np.isfinite(w.real) | ~np.isfinite(w.imag)
        if np.any(bad):
            if strict:
                raise OrbitEscaped(
                    "%d points did not reach the landing strip"
                    % int(np.count_nonzero(bad)))
            w = np.where(bad, self.s0 + 0.5 + 0.0j, w)
        dy = np.clip(np.imag(w) - self.y_clamp, 0.0, None)
        wc = w - 1j * dy
        lam = wc + self.weld.u(wc) + 1j * dy
        out = lam - n
        if np.any(bad):
            out = np.where(bad, np.nan + 1j * np.nan, out)
        if with_derivative:
            dlam = 1.0 + self.weld.du(wc)
            dout = dlam * deriv
            if np.any(bad):
                dout = np.where(bad, np.nan + 1j * np.nan, dout)
            return out.reshape(shape), dout.reshape(shape)
        return out.reshape(shape)

    def phi_w(self, w):
        return self.E(w) + self.C

    def dphi_w(self, w):
        return self.E(w, with_derivative=True)[1]

    # -- z-plane access ------------------------------------------------------
    def lift_z(self, z, anchor=None):
        """Petal representative of tau^{-1}(z).

        Without an anchor the branch is canonical: the principal
        representative, shifted by one period when the coordinate value
        shows the point belongs to the right sliver of the petal.
        """
        z = np.asarray(z, dtype=complex)
        if anchor is not None:
            return self.q.tau_inv(z, anchor)
        base = np.log(1.0 - self.q.sigma / z) / (-2j * math.pi * self.alpha)
        k = np.floor(np.real(base) * self.alpha)
        w = base - k / self.alpha
        phi = self.E(w) + self.C
        wrap = np.real(phi) < -0.5
        if np.any(wrap):
            w = np.where(wrap, w + 1.0 / self.alpha, w)
        return w

    def phi_z(self, z, anchor=None):
        return self.E(self.lift_z(z, anchor)) + self.C

    # -- inversion -----------------------------------------------------------
    def inverse_w(self, zeta, w_guess=None, tol: float = 1e-11,
                  max_iter: int = 40):
        """Newton solve of E(w) + C = zeta in the covering plane.

        Points that leave the evaluator's reach come back NaN; genuinely
        unconverged finite points raise NewtonDiverged.
        """
        zeta = np.atleast_1d(np.asarray(zeta, dtype=complex))
        w = (zeta - self.C if w_guess is None
             else np.broadcast_to(np.asarray(w_guess, complex), zeta.shape).copy())
        w = np.array(w, dtype=complex)
        active = np.ones(w.shape, dtype=bool)
        for _ in range(max_iter):
            val, dval = self.E(w[active], with_derivative=True)
            step = (val + self.C - zeta[active]) / dval
            w_act = w[active] - step
            w[active] = w_act
            still = np.abs(step) >= tol
            dead = ~np.isfinite(step.real)
            w[np.flatnonzero(active)[dead]] = np.nan + 1j * np.nan
            idx = np.flatnonzero(active)
            active[idx] = still & ~dead
            if not np.any(active):
                break
        else:
            raise NewtonDiverged("coordinate inversion did not reach %.1e "
                                 "for %d points" % (tol, int(active.sum())))
        return w

    def inverse_z(self, zeta, tol: float = 1e-11):
        """Phi^{-1}(zeta) for zeta inside the coordinate strip."""
        return self.q.tau(self.inverse_w(zeta, tol=tol))

    # -- diagnostics ----------------------------------------------------------
    def abel_residual(self, w) -> np.ndarray:
        """|phi(F(w)) - phi(w) - 1| with fresh evaluations on both sides."""
        return np.abs(self.phi_w(self.lift.F(np.asarray(w, complex)))
                      - self.phi_w(w) - 1.0)

    def to_state(self) -> dict:
        return {
            "alpha": self.alpha,
            "welding_residual": self.weld.residual,
            "normalization": {"C_re": self.C.real, "C_im": self.C.imag},
            "margin_right": self.margin_right,
            "k_hat": self.k_hat,
        }


def build_lift(q: QuadMap, alpha_max: float = constants.ALPHA_MAX) -> LiftedMap:
    """Construct the unique near-translation lift of a quadratic."""
    return LiftedMap(q, alpha_max=alpha_max)


# ---------------------------------------------------------------------------
# sampled grid + cache
# ---------------------------------------------------------------------------

@dataclass
class FatouGrid:
    """Sampled coordinate on a rectangle lattice in the covering plane."""

    alpha: float
    re_bounds: tuple
    im_bounds: tuple
    resolution: tuple  # (n_re, n_im)
    values: np.ndarray  # complex, shape (n_im, n_re)
    normalization: dict = field(default_factory=dict)
    residual_max: float = float("nan")
    residual_mean: float = float("nan")
    residual_quantile99: float = float("nan")
    residual_nodes: int = 0
    usable: bool = True

    def axes(self):
        re = np.linspace(self.re_bounds[0], self.re_bounds[1], self.resolution[0])
        im = np.linspace(self.im_bounds[0], self.im_bounds[1], self.resolution[1])
        return re, im

    def interp(self, w):
        """Complex bilinear interpolation on the lattice."""
        re, im = self.axes()
        w = np.asarray(w, dtype=complex)
        x = (np.real(w) - re[0]) / (re[1] - re[0])
        y = (np.imag(w) - im[0]) / (im[1] - im[0])
        i = np.clip(np.floor(x).astype(int), 0, len(re) - 2)
        j = np.clip(np.floor(y).astype(int), 0, len(im) - 2)
        fx = x - i
        fy = y - j
        v = self.values
        return ((1 - fx) * (1 - fy) * v[j, i] + fx * (1 - fy) * v[j, i + 1]
                + (1 - fx) * fy * v[j + 1, i] + fx * fy * v[j + 1, i + 1])

    # -- cache -----------------------------------------------------------
    def save(self, path: str):
        header = {
            "alpha": self.alpha,
            "re_bounds": list(self.re_bounds),
            "im_bounds": list(self.im_bounds),
            "resolution": list(self.resolution),
            "normalization": self.normalization,
            "residuals": {"max": self.residual_max, "mean": self.residual_mean,
                          "q99": self.residual_quantile99,
                          "nodes": self.residual_nodes},
            "usable": self.usable,
        }
        blob = json.dumps(header).encode()
        data = np.ascontiguousarray(self.values.astype("<c16"))
        with open(path, "wb") as fh:
            fh.write(struct.pack("<I", len(blob)))
            fh.write(blob)
            fh.write(data.tobytes())

    @staticmethod
    def load(path: str) -> "FatouGrid":
        with open(path, "rb") as fh:
            (hlen,) = struct.unpack("<I", fh.read(4))
            header = json.loads(fh.read(hlen).decode())
            res = header["resolution"]
            raw = fh.read(16 * res[0] * res[1])
        values = np.frombuffer(raw, dtype="<c16").reshape(res[1], res[0])
        grid = FatouGrid(
            alpha=header["alpha"],
            re_bounds=tuple(header["re_bounds"]),
            im_bounds=tuple(header["im_bounds"]),
            resolution=tuple(res),
            values=values.copy(),
            normalization=header.get("normalization", {}),
            usable=header.get("usable", True),
        )
        r = header.get("residuals", {})
        grid.residual_max = r.get("max", float("nan"))
        grid.residual_mean = r.get("mean", float("nan"))
        grid.residual_quantile99 = r.get("q99", float("nan"))
        grid.residual_nodes = r.get("nodes", 0)
        return grid


def default_region(alpha: float, eta: Optional[float] = None):
    """Default grid rectangle: one period width with margins."""
    top = 3.0 / alpha
    if eta is not None:
        top = max(top, eta + 3.0)
    return (1.0, 1.0 / alpha - 1.0), (-3.0, top)


def fatou_coordinate(coord_or_lift, region=None, resolution=(400, 400),
                     residual_bound: float = 1e-6,
                     residual_samples: int = 20000,
                     rng_seed: int = 7) -> FatouGrid:
    """Sample the coordinate on a lattice and audit the Abel equation.

    The residual audit re-evaluates phi at f-images of random interior
    nodes through the evaluator (not the lattice interpolant), which is the
    accuracy actually offered to downstream consumers.
    """
    coord = (coord_or_lift if isinstance(coord_or_lift, FatouCoordinate)
             else FatouCoordinate(coord_or_lift.q))
    alpha = coord.alpha
    if region is None:
        region = default_region(alpha)
    (re0, re1), (im0, im1) = region
    n_re, n_im = resolution
    re = np.linspace(re0, re1, n_re)
    im = np.linspace(im0, im1, n_im)
    W = re[None, :] + 1j * im[:, None]
    values = coord.phi_w(W.ravel()).reshape(W.shape)

    rng = np.random.default_rng(rng_seed)
    ws = (rng.uniform(re0 + 0.5, re1 - 1.5, residual_samples)
          + 1j * rng.uniform(im0 + 0.2, im1 - 0.2, residual_samples))
    res = coord.abel_residual(ws)
    grid = FatouGrid(alpha=alpha, re_bounds=(re0, re1), im_bounds=(im0, im1),
                     resolution=(n_re, n_im), values=values,
                     normalization=coord.to_state()["normalization"])
    grid.residual_max = float(res.max())
    grid.residual_mean = float(res.mean())
    grid.residual_quantile99 = float(np.quantile(res, 0.99))
    grid.residual_nodes = residual_samples
    if grid.residual_quantile99 > residual_bound:
        grid.usable = False
        raise ResidualTooLarge(
            "grid residual q99=%.2e exceeds %.1e" % (
                grid.residual_quantile99, residual_bound),
            diagnostics={"grid": grid})
    return grid


# ---------------------------------------------------------------------------
# extended inverse
# ---------------------------------------------------------------------------

def fatou_inverse(coord: FatouCoordinate, zeta, j_max: int = 64,
                  tol: float = 1e-9):
    """Phi^{-1} on the strip, extended rightward by the dynamics.

    For zeta beyond the usable margin, pulls back by an integer translation
    and pushes forward with the quadratic: Phi^{-1}(zeta) = q^{j}(
    Phi^{-1}(zeta - j)).  Raises OutOfExtendedDomain past j_max.
    """
    zeta = np.atleast_1d(np.asarray(zeta, dtype=complex))
    out = np.empty(zeta.shape, dtype=complex)
    hi = coord.margin_right - 0.5
    j = np.ceil(np.maximum(np.real(zeta) - hi, 0.0)).astype(int)
    if np.any(j > j_max):
        raise OutOfExtendedDomain("extension needs j=%d > j_max=%d"
                                  % (int(j.max()), j_max))
    if np.any(np.real(zeta) - j < -0.5):
        raise OutOfExtendedDomain("zeta lies left of the coordinate strip")
    base = coord.inverse_z(zeta - j)
    for val in np.unique(j):
        sel = j == val
        out[sel] = coord.q.f_iter(base[sel], int(val))
    # audit where the result stays in the strip
    check = j == 0
    if np.any(check):
        err = np.abs(coord.phi_z(out[check]) - zeta[check])
        if err.max() > tol:
            raise NewtonDiverged("inverse audit failed at %.2e" % err.max())
    return out.reshape(zeta.shape)


# ---------------------------------------------------------------------------
# measured constants
# ---------------------------------------------------------------------------

def measure_constants(coord: FatouCoordinate, n_samples: int = 4000,
                      rng_seed: int = 11) -> dict:
    """Empirical suprema of the quantitative comparison lemmas.

    D2  : sup |L^{-1}(zeta) - zeta| / log(1 + 1/alpha).
    D3  : sup deviation of Im Exp^{-1}(Phi^{-1}) from its two-regime profile.
    D5a : sup of alpha * |Im Phi(Exp(zeta)) - (Im zeta - log(1/alpha)/2pi)/alpha|
          on the upper regime (linear-envelope constant).
    D5b : sup |log(3 + Im Phi(Exp(zeta))) - 2 pi Im zeta| on the lower regime.
    Every figure reports the sample count that produced it.
    """
    alpha = coord.alpha
    rng = np.random.default_rng(rng_seed)
    inv_a = 1.0 / alpha
    log1a = math.log(1.0 / alpha)

    # --- D2 over the coordinate rectangle ---------------------------------
    n = n_samples
    zeta = (rng.uniform(0.5, coord.margin_right - 1.0, n)
            + 1j * rng.uniform(-2.5, 2.0 * inv_a, n))
    w = coord.inverse_w(zeta)
    ok = np.isfinite(w.real)
    n_failed = int(np.count_nonzero(~ok))
    zeta, w = zeta[ok], w[ok]
    D2 = float(np.max(np.abs(w - zeta)) / math.log(1.0 + inv_a))

    # --- D3: image heights under the anti-holomorphic unprojection --------
    zv = coord.q.tau(w)
    im_chi = -np.log(27.0 * np.abs(zv) / 4.0) / TWO_PI
    hi = np.imag(zeta) >= inv_a
    dev_hi = np.abs(im_chi[hi] - (alpha * np.imag(zeta[hi]) + log1a / TWO_PI))
    lo = ~hi
    profile = np.minimum(np.log1p(np.abs(zeta[lo])),
                         np.log1p(np.abs(zeta[lo] - inv_a))) / TWO_PI
    dev_lo = np.abs(im_chi[lo] - profile)
    D3 = float(max(dev_hi.max() if dev_hi.size else 0.0,
                   dev_lo.max() if dev_lo.size else 0.0))

    # --- D5 via the forward projection step -------------------------------
    # sample zeta in the band whose image lands in (0,2] x [-2, inf)
    band_re = rng.uniform(0.55, 1.45, n)
    band_im = rng.uniform(-0.3, log1a / TWO_PI + 4.0, n)
    zeta_band = band_re + 1j * band_im
    z_img = exp_modified(zeta_band)
    phi_img = coord.phi_z(z_img)
    good = (np.real(phi_img) > 0.0) & (np.real(phi_img) <= 2.0) & \
           (np.imag(phi_img) >= -2.0)
    zb = zeta_band[good]
    ph = phi_img[good]
    upper = np.imag(zb) >= log1a / TWO_PI + 1.0
    dev_a = alpha * np.abs(np.imag(ph[upper])
                           - (np.imag(zb[upper]) - log1a / TWO_PI) / alpha)
    lower = ~upper
    dev_b = np.abs(np.log(3.0 + np.maximum(np.imag(ph[lower]), -2.933))
                   - TWO_PI * np.imag(zb[lower]))
    D5a = float(dev_a.max()) if dev_a.size else float("nan")
    D5b = float(dev_b.max()) if dev_b.size else float("nan")

    return {
        "alpha": alpha,
        "D2": D2,
        "D3": D3,
        "D5a": D5a,
        "D5b": D5b,
        "D5": max(D5a, D3),
        "sigma_ratio": abs(coord.q.sigma) / alpha,
        "samples": {"rect": int(n), "rect_failed": n_failed,
                    "band": int(np.count_nonzero(good)),
                    "band_upper": int(np.count_nonzero(upper)),
                    "band_lower": int(np.count_nonzero(lower))},
    }


# ---------------------------------------------------------------------------
# sector sets
# ---------------------------------------------------------------------------

@dataclass
class SectorSpec:
    """The pair of boxes in the coordinate plane whose pullback is renormalized."""

    alpha: float
    eta: float
    M: float
    level: int
    re_lo: float = 0.5
    re_hi: float = 1.5
    im_lo: float = -2.0
    im_cap: float = 0.0  # sampling cap for the unbounded upper box
    brjuno_next: float = 0.0

    def contains(self, zeta) -> np.ndarray:
        zeta = np.asarray(zeta, dtype=complex)
        return ((self.re_lo <= zeta.real) & (zeta.real <= self.re_hi)
                & (zeta.imag > self.im_lo))

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "eta": self.eta, "M": self.M,
                "level": self.level,
                "box": [self.re_lo, self.re_hi, self.im_lo],
                "im_cap": self.im_cap, "brjuno_next": self.brjuno_next}


def sector_sets(coord: FatouCoordinate, rot: RotationNumber, n: int,
                M: float = constants.M_DEFAULT, depth: int = 12) -> SectorSpec:
    """Height eta_n = B(alpha_{n+1}) / 2 pi + M / alpha_n and its boxes."""
    bp = brjuno_sum(rot, max(depth, n + 1))
    b_next = bp.best(n + 1)
    alpha_n = float(rot.shifted_value(n))
    if abs(alpha_n - coord.alpha) > 1e-12:
        raise DomainError("coordinate was built for a different level")
    eta = b_next / TWO_PI + M / alpha_n
    if eta < 2.0:
        raise DomainError("height eta=%.3f < 2; increase M" % eta)
    return SectorSpec(alpha=alpha_n, eta=eta, M=M, level=n,
                      im_cap=eta + 6.0, brjuno_next=b_next)


def resolve_cache_dir(cli_value: Optional[str]) -> Optional[str]:
    """--cache-dir wins, then the SIEGEL_CACHE environment variable."""
    if cli_value:
        return cli_value
    return os.environ.get("SIEGEL_CACHE") or None
