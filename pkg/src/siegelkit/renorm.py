"""One step of near-parabolic renormalization for the quadratic family.

The sector is produced by pulling the pair of coordinate boxes back through
the quadratic with per-sample branch continuity (Newton-predictor anchors);
the return index is the smallest pullback count whose image fits inside the
open coordinate strip with half-a-unit margin.  The renormalized map is the
sector return straightened by the Fatou coordinate and projected by the
modified exponential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (DomainError, KMaxExceeded, MeshPointOutsideSector,
                     OutOfExtendedDomain)
from .fatou import FatouCoordinate, SectorSpec, fatou_inverse
from .maps import exp_modified

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# sector pullback
# ---------------------------------------------------------------------------

def _pullback_chain(q, z, collision_tol: float = 1e-7, seed=None):
    """One preimage step along an ordered chain of samples.

    Without a seed, the first sample (anchored at the origin's access,
    where the rotation branch is unambiguous) uses a backward Newton
    predictor; with seed=(src, preimage) it continues from an already
    pulled-back neighbor.  Every later sample picks the root nearest its
    predecessor's preimage, which keeps the whole chain on one connected
    component of the pullback even through the wrap past the coordinate
    cut.  Returns the new chain and a mask of near-collisions with the
    critical point.
    """
    r1, r2 = q.finv_both(z)
    collide = np.abs(r1 - r2) < collision_tol
    out = np.empty_like(z)
    if seed is None:
        prev_src = z[0]
        prev = z[0] - (q.f(z[0]) - z[0]) / q.df(z[0])
    else:
        prev_src, prev = seed
    for i in range(len(z)):
        expected = prev + (z[i] - prev_src)
        out[i] = r1[i] if abs(r1[i] - expected) <= abs(r2[i] - expected) \
            else r2[i]
        prev = out[i]
        prev_src = z[i]
    return out, collide


@dataclass
class SectorReturn:
    """Pullback sector data for one renormalization step."""

    alpha: float
    k_f: int
    eta: float
    # named boundary polylines: phi-plane sources and their pulled-back
    # z-points and coordinate values at the final k
    left_zeta: np.ndarray = field(default=None)
    left_phi: np.ndarray = field(default=None)
    left_z: np.ndarray = field(default=None)
    crossbar_zeta: np.ndarray = field(default=None)
    crossbar_phi: np.ndarray = field(default=None)
    crossbar_z: np.ndarray = field(default=None)
    right_phi: np.ndarray = field(default=None)
    right_z: np.ndarray = field(default=None)
    audit: list = field(default_factory=list)
    collisions: int = 0

    def re_interval_at(self, im: float):
        """Horizontal extent of the sector image at a given height."""
        left = _interp_re_at_height(self.left_phi, im)
        right = _interp_re_at_height(self.right_phi, im)
        return left, right

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "k_f": self.k_f, "eta": self.eta,
                "collisions": self.collisions, "audit": self.audit}


def _interp_re_at_height(phi: np.ndarray, im: float) -> float:
    ims = np.imag(phi)
    res = np.real(phi)
    order = np.argsort(ims)
    ims, res = ims[order], res[order]
    if im <= ims[0]:
        return float(res[0])
    if im >= ims[-1]:
        return float(res[-1])
    return float(np.interp(im, ims, res))


def find_kf(coord: FatouCoordinate, sector: SectorSpec, k_max: int = 12,
            n_side: int = 400, collision_tol: float = 1e-7) -> SectorReturn:
    """Smallest pullback count bringing both boxes inside the strip margin.

    Containment is tested on the pulled-back boundary cloud of the boxes
    (the coordinate is continuous, so a connected region lies in the strip
    iff its boundary does), using the measured right margin of the strip.
    """
    eta, cap = sector.eta, sector.im_cap
    # one ordered chain around the boxes, anchored at the origin's access:
    # down the left edge, across the bottom, up the right edge, out the top
    im_side = np.concatenate([
        np.linspace(-1.95, eta - 1.0, n_side // 2),
        np.linspace(eta - 1.0, cap, n_side // 2),
    ])
    left = sector.re_lo + 1j * im_side
    right = sector.re_hi + 1j * im_side
    bottom = np.linspace(sector.re_lo, sector.re_hi, n_side // 4) - 1.95j
    chain = np.concatenate([left[::-1], bottom, right])
    n_l = len(left)
    bar = np.linspace(sector.re_lo, sector.re_hi, n_side // 4) + 1j * eta
    zeta0 = np.concatenate([chain, bar])

    q = coord.q
    z_chain = coord.inverse_z(chain)
    z_bar = coord.inverse_z(bar)
    hi_margin = coord.margin_right - 0.5
    # chain index of the left-edge sample nearest the crossbar corner
    idx_eta = n_l - 1 - int(np.argmin(np.abs(im_side - eta)))
    audit = []
    collide_count = 0
    for k in range(1, k_max + 1):
        chain_src = z_chain
        z_chain, coll = _pullback_chain(q, z_chain, collision_tol=collision_tol)
        collide_count += int(np.count_nonzero(coll))
        # crossbar chained from the matching left-edge corner sample
        z_bar, coll2 = _pullback_chain(
            q, z_bar, collision_tol=collision_tol,
            seed=(chain_src[idx_eta], z_chain[idx_eta]))
        collide_count += int(np.count_nonzero(coll2))
        phi = coord.phi_z(np.concatenate([z_chain, z_bar]))
        re = np.real(phi)
        inside = (re > 0.0) & (re < hi_margin)
        audit.append({"k": k, "re_min": float(np.nanmin(re)),
                      "re_max": float(np.nanmax(re)),
                      "nan": int(np.count_nonzero(~np.isfinite(re))),
                      "outside": int(np.count_nonzero(~inside))})
        if bool(np.all(inside)):
            phi_chain = phi[:len(z_chain)]
            phi_bar = phi[len(z_chain):]
            sr = SectorReturn(
                alpha=coord.alpha, k_f=k, eta=eta,
                left_zeta=chain[:n_l][::-1],
                left_phi=phi_chain[:n_l][::-1],
                left_z=z_chain[:n_l][::-1],
                right_phi=phi_chain[-n_l:], right_z=z_chain[-n_l:],
                crossbar_zeta=bar, crossbar_phi=phi_bar, crossbar_z=z_bar,
                audit=audit, collisions=collide_count)
            _audit_forward(coord, sr, sector)
            return sr
    raise KMaxExceeded("no containment for k <= %d (audit: %s)"
                       % (k_max, audit))


def _audit_forward(coord: FatouCoordinate, sr: SectorReturn,
                   sector: SectorSpec, n_check: int = 60,
                   tol: float = 1e-4):
    """Forward check: k_f quadratic steps return sector samples to the boxes."""
    idx = np.linspace(0, len(sr.left_z) - 1, n_check).astype(int)
    z = sr.left_z[idx]
    z = coord.q.f_iter(z, sr.k_f)
    phi = coord.phi_z(z)
    err = np.abs(phi - sr.left_zeta[idx])
    if float(err.max()) > tol:
        raise DomainError("forward audit of the sector failed at %.2e"
                          % float(err.max()))
    sr.audit.append({"forward_residual": float(err.max())})


# ---------------------------------------------------------------------------
# renormalized map
# ---------------------------------------------------------------------------

@dataclass
class RenormalizedMap:
    """Sampled near-parabolic renormalization around the origin."""

    alpha: float
    k_f: int
    mesh_z: np.ndarray
    values: np.ndarray
    multiplier: complex
    multiplier_target: complex
    multiplier_error: float
    representative_residual: float
    domain_radius: float
    skipped: int = 0

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha, "k_f": self.k_f,
            "multiplier": [self.multiplier.real, self.multiplier.imag],
            "multiplier_target": [self.multiplier_target.real,
                                  self.multiplier_target.imag],
            "multiplier_error": self.multiplier_error,
            "representative_residual": self.representative_residual,
            "domain_radius": self.domain_radius,
            "skipped": self.skipped,
            "mesh_points": int(self.mesh_z.size),
        }


def _sector_representative(coord: FatouCoordinate, sr: SectorReturn, z):
    """The exponential preimage of z lying in the sector's coordinate image."""
    z = np.asarray(z, dtype=complex)
    im = np.log(4.0 / (27.0 * np.abs(z))) / TWO_PI
    re_frac = np.mod(-np.angle(-27.0 * np.conj(z) / 4.0) / TWO_PI, 1.0)
    out = np.empty(z.shape, dtype=complex)
    bad = np.zeros(z.shape, dtype=bool)
    for i, (yy, fr) in enumerate(np.nditer((im, re_frac))):
        lo, hi = sr.re_interval_at(float(yy))
        base = math.floor(lo) + float(fr)
        cand = base if base >= lo else base + 1.0
        if cand > hi + 0.75:
            bad[i] = True
        out[i] = cand + 1j * float(yy)
    if np.any(bad):
        raise MeshPointOutsideSector(
            "%d mesh points missed the sector strip" % int(bad.sum()))
    return out


def renormalize(coord: FatouCoordinate, sr: SectorReturn,
                r0: float = 2e-3, n_angles: int = 96,
                radii_factors=(0.5, 1.0, 2.0, 8.0, 64.0),
                n_representative: int = 32) -> RenormalizedMap:
    """Sample the renormalized map near 0 and estimate its multiplier.

    Mesh points on circles |z| = c * r0; each maps through: sector
    representative -> coordinate inverse -> k_f quadratic steps ->
    coordinate -> modified exponential.  The multiplier is the constant
    term of a least-squares fit of Rf(z)/z on the smallest circle.
    """
    q = coord.q
    th = np.linspace(0.0, TWO_PI, n_angles, endpoint=False)
    mesh = np.concatenate([c * r0 * np.exp(1j * th) for c in radii_factors])
    zeta = _sector_representative(coord, sr, mesh)
    w = coord.inverse_w(zeta)
    z_pt = q.tau(w)
    back = np.abs(exp_modified(zeta) - mesh)
    if back.max() > 1e-10 * (1.0 + np.abs(mesh).max()):
        raise DomainError("sector representative failed to project back")
    z_ret = q.f_iter(z_pt, sr.k_f)
    psi = coord.phi_z(z_ret)
    values = exp_modified(psi)

    # multiplier via least squares m0 + m1 z on the smallest circle
    sel = slice(0, n_angles)
    ratio = values[sel] / mesh[sel]
    A = np.vstack([np.ones(n_angles), mesh[sel]]).T
    m0, _m1 = np.linalg.lstsq(A, ratio, rcond=None)[0]
    target = np.exp(2j * math.pi * ((1.0 / coord.alpha) % 1.0))

    # representative independence: route a subsample through zeta + 1
    idx = np.linspace(0, mesh.size - 1, n_representative).astype(int)
    z2 = fatou_inverse(coord, zeta[idx] + 1.0)
    z2_ret = q.f_iter(z2, sr.k_f)
    psi2 = coord.phi_z(z2_ret)
    rep_res = float(np.abs(exp_modified(psi2) - values[idx]).max())

    return RenormalizedMap(
        alpha=coord.alpha, k_f=sr.k_f, mesh_z=mesh, values=values,
        multiplier=complex(m0), multiplier_target=complex(target),
        multiplier_error=float(abs(m0 - target)),
        representative_residual=rep_res,
        domain_radius=float(np.abs(mesh).max()))


# ---------------------------------------------------------------------------
# lifts between coordinate planes
# ---------------------------------------------------------------------------

def chi_lift_curve(coord: FatouCoordinate, zeta_curve, j: int = 0,
                   normalize_band: bool = True) -> np.ndarray:
    """Anti-holomorphic lift of Phi^{-1} along a curve of coordinate points.

    Computes chi with Exp(chi(zeta)) = Phi^{-1}(zeta) by phase continuity
    along the curve, then shifts by an integer so the real part starts in
    [1, 2) (the normalized branch), plus the requested translation j.
    """
    zeta = np.asarray(zeta_curve, dtype=complex)
    z = fatou_inverse(coord, zeta)
    # raw anti-holomorphic logarithm: Exp(chi) = z  <=>
    # chi = conj(log(-27 z / 4)) / (2 pi i) + integer
    raw = np.conj(np.log(-27.0 * z / 4.0)) / (2j * math.pi)
    re = np.real(raw)
    im = np.imag(raw)
    # unwrap the real part along the curve (period 1)
    jumps = np.diff(re)
    shift = np.concatenate([[0.0], np.cumsum(np.round(jumps))])
    re_cont = re - shift
    if normalize_band:
        offset = math.floor(re_cont[0]) - 1.0
        re_cont = re_cont - offset
    chi = re_cont + 1j * im + float(j)
    if np.any(im <= -2.0):
        raise DomainError("lift left the Im > -2 band")
    return chi


def chi_lift_point(coord: FatouCoordinate, zeta, j: int = 0,
                   n_path: int = 160) -> complex:
    """Lift of a single coordinate point along a basepoint path.

    The branch is anchored at the basepoint zeta* = 1 (whose inverse is the
    critical value, lifted to 1), continued along an L-shaped path that
    stays inside the extended domain.
    """
    zeta = complex(zeta)
    leg1 = np.linspace(1.0, 1.0 + 1j * zeta.imag, n_path // 2)
    leg2 = np.linspace(1.0 + 1j * zeta.imag, zeta, n_path // 2)
    path = np.concatenate([leg1, leg2[1:]])
    chi = chi_lift_curve(coord, path, j=0, normalize_band=False)
    chi = chi - (round(chi[0].real) - 1.0)
    return complex(chi[-1] + j)
