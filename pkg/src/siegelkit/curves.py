"""Boundary curve towers, the canonical arc, and convergence diagnostics.

Level n of a tower is the coordinate plane of the quadratic with rotation
number alpha_n (the n-th Gauss iterate); the planes are connected by the
anti-holomorphic lifts of the modified exponential.  Curves are stored as
dense parameterized polylines; free reparameterizations fixed only at their
endpoints are realized arclength-proportionally, which makes every check
deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from . import constants
from .cfrac import RotationNumber, brjuno_sum, s_lower, s_upper
from .errors import (DomainError, JunctionGap, NestingViolation,
                     SingletonSearchFailed)
from .fatou import FatouCoordinate, SectorSpec, fatou_inverse, sector_sets
from .geom import (hausdorff, point_in_polygon, polyline_self_intersects,
                   resample_polyline)
from .linearize import SiegelBoundaryOracle, critical_orbit, linearization_boundary
from .maps import exp_modified
from .renorm import SectorReturn, find_kf

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# parameterized curves
# ---------------------------------------------------------------------------

@dataclass
class CoordCurve:
    """A parameterized polyline in a coordinate plane."""

    t: np.ndarray
    zeta: np.ndarray
    level: Tuple[int, int] = (0, 0)  # (n, i)
    plane: int = 0  # which coordinate plane the points live in
    mesh_bound: float = float("nan")

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.zeta = np.asarray(self.zeta, dtype=complex)
        if np.any(np.diff(self.t) < 0):
            raise DomainError("curve parameterization must be nondecreasing")
        self.mesh_bound = float(np.abs(np.diff(self.zeta)).max())

    def eval(self, t):
        t = np.asarray(t, dtype=float)
        return (np.interp(t, self.t, self.zeta.real)
                + 1j * np.interp(t, self.t, self.zeta.imag))

    def endpoint_values(self):
        return complex(self.zeta[0]), complex(self.zeta[-1])


def _arclength_piece(points: np.ndarray, t_lo: float, t_hi: float,
                     n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Arclength-proportional parameterization of a polyline piece."""
    pts = resample_polyline(points, n)
    t = np.linspace(t_lo, t_hi, n)
    return t, pts


# ---------------------------------------------------------------------------
# per-level data
# ---------------------------------------------------------------------------

@dataclass
class LevelData:
    """Everything one renormalization level contributes to the tower."""

    n: int
    alpha: float
    a_next: int  # digit a_{n+1} = floor(1/alpha_n)
    coord: FatouCoordinate
    sector: SectorSpec
    sector_return: SectorReturn
    eta: float

    @property
    def k_f(self) -> int:
        return self.sector_return.k_f

    @property
    def k_hat(self) -> int:
        return self.coord.k_hat


class TowerBuilder:
    """Caches coordinates and levels of a renormalization tower."""

    def __init__(self, rot: RotationNumber, M: float = constants.M_DEFAULT,
                 depth_hint: int = 12):
        self.rot = rot
        self.M = M
        self.depth_hint = depth_hint
        self._coords: Dict[float, FatouCoordinate] = {}
        self._levels: Dict[int, LevelData] = {}
        self._gammas: Dict[Tuple[int, int], CoordCurve] = {}

    def coordinate(self, alpha: float) -> FatouCoordinate:
        key = round(alpha, 14)
        if key not in self._coords:
            self._coords[key] = FatouCoordinate(alpha)
        return self._coords[key]

    def level(self, n: int) -> LevelData:
        if n not in self._levels:
            alpha_n = float(self.rot.shifted_value(n))
            coord = self.coordinate(alpha_n)
            sector = sector_sets(coord, self.rot, n, M=self.M,
                                 depth=self.depth_hint)
            sr = find_kf(coord, sector)
            self._levels[n] = LevelData(
                n=n, alpha=alpha_n, a_next=self.rot.digit(n + 1),
                coord=coord, sector=sector, sector_return=sr,
                eta=sector.eta)
        return self._levels[n]

    # -- tower curves -------------------------------------------------------
    def gamma(self, n: int, i: int) -> CoordCurve:
        if (n, i) not in self._gammas:
            if i == 0:
                self._gammas[(n, i)] = build_gamma0(self.level(n))
            else:
                child = self.gamma(n + 1, i - 1)
                self._gammas[(n, i)] = lift_curve(
                    child, self.level(n + 1), self.level(n).a_next,
                    level_tag=(n, i))
        return self._gammas[(n, i)]


# ---------------------------------------------------------------------------
# the level-0 curve of each plane
# ---------------------------------------------------------------------------

def _left_boundary_crossing(sr: SectorReturn, height: float):
    """The singleton where the left sector boundary crosses a height."""
    phi = sr.left_phi
    im = np.imag(phi)
    sign = im - height
    hits = np.nonzero(np.diff(np.sign(sign)) != 0)[0]
    if len(hits) == 0:
        raise SingletonSearchFailed(
            "horizontal line Im=%.3f missed the sector boundary" % height)
    # keep the crossing nearest the expected top-left corner
    idx = hits[np.argmax(im[hits])] if len(hits) > 1 else hits[0]
    frac = (height - im[idx]) / (im[idx + 1] - im[idx])
    point = phi[idx] + frac * (phi[idx + 1] - phi[idx])
    return complex(point), idx, float(frac)


def build_gamma0(level: LevelData, samples_per_piece: int = 48) -> CoordCurve:
    """The piecewise level curve at height eta in one coordinate plane.

    Pieces: a horizontal run at height eta, a drop along the left sector
    boundary to the corner, the top edge of the pullback octagon, and its
    forward translates; the free reparameterizations are realized
    arclength-proportionally.
    """
    a = level.a_next
    k_f = level.k_f
    k_hat = level.k_hat
    eta = level.eta
    sr = level.sector_return
    if a <= k_hat + k_f + 1:
        raise DomainError("digit %d too small for the curve layout "
                          "(needs > k_hat + k_f + 1 = %d)" % (a, k_hat + k_f + 1))

    t1 = 1.0 - (k_hat + k_f + 1.0) / a
    t2 = 1.0 - float(k_f) / a

    u_prime = a - k_hat - k_f - 0.5 + 1j * eta
    u_point, idx_cross, _ = _left_boundary_crossing(sr, eta)
    u_dprime = complex(sr.crossbar_phi[0])

    # piece (a0): horizontal segment from 1/2 + eta i to u'
    n_a = max(2 * samples_per_piece, 6 * int(a))
    t_a = np.linspace(0.0, t1, n_a)
    z_a = a * t_a + 0.5 + 1j * eta

    # piece (b0): [u', u_point] segment plus the short boundary arc to u''
    im_left = np.imag(sr.left_phi)
    i_corner = int(np.argmin(np.abs(sr.left_phi - u_dprime)))
    lo, hi = sorted((idx_cross, i_corner))
    arc = sr.left_phi[lo:hi + 1]
    if idx_cross > i_corner:
        arc = arc[::-1]
    seg = np.linspace(u_prime, u_point, samples_per_piece)
    beta = np.concatenate([seg, arc, [u_dprime]])
    t_b, z_b = _arclength_piece(beta, t1, t2, 2 * samples_per_piece)

    # piece (c0): the top edge of the octagon from u'' to u''+1
    bar = np.concatenate([[u_dprime], sr.crossbar_phi, [u_dprime + 1.0]])
    # enforce orientation u'' -> u'' + 1
    if abs(bar[1] - u_dprime) > abs(bar[-2] - u_dprime):
        bar = np.concatenate([[u_dprime], sr.crossbar_phi[::-1], [u_dprime + 1.0]])
    t_c, z_c = _arclength_piece(bar, t2, t2 + 1.0 / a, samples_per_piece)

    # pieces (d0): forward translates of (c0)
    ts = [t_a, t_b, t_c]
    zs = [z_a, z_b, z_c]
    for j in range(1, k_f):
        ts.append(t_c + j / a)
        zs.append(z_c + j)
    t = np.concatenate(ts)
    z = np.concatenate(zs)
    order = np.argsort(t, kind="stable")
    return CoordCurve(t=t[order], zeta=z[order], level=(level.n, 0),
                      plane=level.n)


def thicken(curve: CoordCurve, a_next: int, n_eval: int = 4096) -> CoordCurve:
    """The one-unit forward thickening used by the inductive lift."""
    a = float(a_next)
    t = np.linspace(0.0, 1.0, n_eval)
    body = t <= 1.0 - 1.0 / a
    z = np.empty(n_eval, dtype=complex)
    z[body] = curve.eval(t[body] * a / (a - 1.0))
    z[~body] = curve.eval(t[~body]) + 1.0
    return CoordCurve(t=t, zeta=z, level=curve.level, plane=curve.plane)


# ---------------------------------------------------------------------------
# lifting a curve one level down the tower
# ---------------------------------------------------------------------------

def lift_curve(child: CoordCurve, child_level: LevelData, a_next: int,
               level_tag: Tuple[int, int], samples_per_piece: int = 24,
               junction_tol: float = 1e-6) -> CoordCurve:
    """Assemble the next tower curve from translated anti-holomorphic lifts.

    The child curve is traversed backwards piece by piece; continuity of the
    lift across piece junctions is equivalent to the child's closed-curve
    identity, whose residual is checked here.
    """
    a = int(a_next)
    coord = child_level.coord
    tilde = thicken(child, child_level.a_next)

    t_pieces = []
    params = []
    sources = []
    n0 = 4 * samples_per_piece
    t0 = np.linspace(0.0, 1.0 / a, n0)
    t_pieces.append(t0)
    params.append(1.0 - a * t0)
    sources.append(tilde)
    for j in range(1, a):
        tj = np.linspace(j / a, (j + 1) / a, samples_per_piece)
        t_pieces.append(tj)
        params.append(j + 1.0 - a * tj)
        sources.append(child)

    t_all = np.concatenate(t_pieces)
    zeta_child = np.concatenate([src.eval(np.clip(p, 0.0, 1.0))
                                 for src, p in zip(sources, params)])

    # junction residual: the child's endpoint identity in its own plane
    z_first = fatou_inverse(coord, np.array([child.zeta[0], child.zeta[-1]]))
    junction_gap = float(abs(z_first[0] - z_first[1]))
    if junction_gap > junction_tol:
        raise JunctionGap("closed-curve identity residual %.2e exceeds %.1e"
                          % (junction_gap, junction_tol))

    z_pts = fatou_inverse(coord, zeta_child)
    chi = _lift_continuous(z_pts)
    # normalized branch: the minimum real part starts in [1, 2)
    chi = chi - (math.floor(float(np.min(chi.real))) - 1.0)

    # dedupe parameter collisions at piece junctions
    keep = np.concatenate([[True], np.diff(t_all) > 1e-12])
    out = CoordCurve(t=t_all[keep], zeta=chi[keep], level=level_tag,
                     plane=level_tag[0])
    out.junction_gap = junction_gap
    return out


def _lift_continuous(z: np.ndarray) -> np.ndarray:
    """Anti-holomorphic exponential lift with phase continuity."""
    raw = np.conj(np.log(-27.0 * z / 4.0)) / (2j * math.pi)
    re = np.real(raw)
    im = np.imag(raw)
    jumps = np.round(np.diff(re))
    shift = np.concatenate([[0.0], np.cumsum(jumps)])
    return (re - shift) + 1j * im


# ---------------------------------------------------------------------------
# convergence diagnostics
# ---------------------------------------------------------------------------

@dataclass
class ConvergenceReport:
    alpha: float
    depth: int
    sup_gaps: list
    hausdorff_to_oracle: list
    closed_curve_residuals: list
    self_intersections: list
    imag_windows: list

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha, "depth": self.depth,
            "sup_gaps": self.sup_gaps,
            "hausdorff_to_oracle": self.hausdorff_to_oracle,
            "closed_curve_residuals": self.closed_curve_residuals,
            "self_intersections": self.self_intersections,
            "imag_windows": self.imag_windows,
        }


def convergence_report(tower: TowerBuilder, depth: int,
                       oracle: Optional[SiegelBoundaryOracle] = None,
                       n_t: int = 4096) -> ConvergenceReport:
    """Sup-norm gaps between consecutive tower curves plus boundary distances."""
    curves = [tower.gamma(0, i) for i in range(depth + 1)]
    coord0 = tower.level(0).coord
    t = np.linspace(0.0, 1.0, n_t)
    vals = [c.eval(t) for c in curves]
    sup_gaps = [float(np.abs(vals[i] - vals[i + 1]).max())
                for i in range(depth)]
    closed = []
    z_images = []
    selfx = []
    for c in curves:
        ends = fatou_inverse(coord0, np.array(list(c.endpoint_values())))
        closed.append(float(abs(ends[0] - ends[1])))
        zc = fatou_inverse(coord0, c.eval(np.linspace(0.0, 1.0, 2048)))
        z_images.append(zc)
        selfx.append(bool(polyline_self_intersects(zc, closed=True)))
    hd = []
    if oracle is not None:
        orb = critical_orbit(tower.level(0).coord.q, n=400000)
        boundary_cloud = np.concatenate([oracle.boundary, orb[::4]])
        for zc in z_images:
            hd.append(float(hausdorff(zc, boundary_cloud)))
    windows = []
    for i, c in enumerate(curves):
        windows.append([float(np.imag(c.zeta).min()),
                        float(np.imag(c.zeta).max())])
    return ConvergenceReport(
        alpha=tower.level(0).alpha, depth=depth, sup_gaps=sup_gaps,
        hausdorff_to_oracle=hd, closed_curve_residuals=closed,
        self_intersections=selfx, imag_windows=windows)


# ---------------------------------------------------------------------------
# the canonical arc
# ---------------------------------------------------------------------------

MHO_RE = (0.25, 1.75)
MHO_PRIME_RE = (0.5, 1.5)
MHO_IM_FLOOR = -2.0
MHO_PRIME_IM_FLOOR = -1.75


def strip_membership(zeta, prime: bool = False) -> np.ndarray:
    """Membership in the half-infinite strip (closure for the primed one)."""
    zeta = np.asarray(zeta, dtype=complex)
    lo, hi = MHO_PRIME_RE if prime else MHO_RE
    floor = MHO_PRIME_IM_FLOOR if prime else MHO_IM_FLOOR
    pad = 1e-9
    return ((zeta.real >= lo - pad) & (zeta.real <= hi + pad)
            & (zeta.imag >= floor - pad))


def phi_alpha_reparam(alpha: float, t):
    """The increasing reparameterization used by the arc construction."""
    t = np.asarray(t, dtype=float)
    log1a = math.log(1.0 / alpha)
    out = np.where(t >= log1a / TWO_PI,
                   (t - log1a / TWO_PI + 1.0) / alpha,
                   np.exp(TWO_PI * np.minimum(t, log1a / TWO_PI)))
    return out


def boundary_strip_curve(sign: int, im_values: np.ndarray) -> np.ndarray:
    """A side of the primed strip boundary with prescribed vertical profile."""
    re = 1.5 if sign > 0 else 0.5
    bottom_t = np.linspace(0.0, 1.0, 33)[:-1]
    bottom = (sign * bottom_t / 2.0) + 1.0 - 1.75j
    side = re + 1j * im_values
    return np.concatenate([bottom, side])


@dataclass
class ArcLevel:
    """One level of the nested arc construction."""

    i: int
    plus: np.ndarray  # zeta samples in the level-0 plane after lifting
    minus: np.ndarray
    k_polygon: np.ndarray  # z-plane boundary polygon of K_i
    initial_point: complex


@dataclass
class ArcApproximation:
    levels: list
    gamma_plus_profiles: list  # per level: vertical profiles before lifting
    arc_zeta: np.ndarray  # deepest boundary curve in the level-0 plane
    arc_z: np.ndarray  # its z-plane image (the arc estimate)
    nesting_ok: bool
    initial_point_gaps: list

    def to_json(self) -> dict:
        return {
            "depth": len(self.levels) - 1,
            "nesting_ok": self.nesting_ok,
            "initial_point_gaps": self.initial_point_gaps,
        }


def build_arc(tower: TowerBuilder, levels: int, n_t: int = 600,
              im_cap: float = 25.0) -> ArcApproximation:
    """Finite-depth approximation of the canonical arc.

    Builds the reparameterized strip boundary curves at the deepest level,
    then lifts them down with the anti-holomorphic inverse branch that fixes
    the strip (value 1 at the critical value), recording the K-nest.
    """
    rot = tower.rot
    # vertical profiles: level-n profile is phi_alpha_n applied to level-(n-1)
    t_param = np.linspace(1.0, 9.0, n_t)
    prof = [t_param - 11.0 / 4.0]  # level 0 profile: Im = t - 11/4
    for n in range(1, levels + 1):
        alpha_n = float(rot.shifted_value(n))
        prev = prof[-1]
        prof.append(phi_alpha_reparam(alpha_n, prev)
                    - math.exp(-7.0 * math.pi / 2.0) - 7.0 / 4.0)

    out_levels = []
    gaps = []
    nesting_ok = True
    prev_polygon = None
    arc_zeta = None
    for depth in range(levels + 1):
        cap = min(float(np.max(prof[depth])), im_cap)
        ims = np.clip(prof[depth], MHO_PRIME_IM_FLOOR + 0.01, cap)
        plus = boundary_strip_curve(+1, ims)
        minus = boundary_strip_curve(-1, ims)
        for i in range(depth, 0, -1):
            # one lift step: Phi_i^{-1} followed by the strip branch of the
            # anti-holomorphic logarithm, landing in plane i-1
            plus = _log_lift_into_strip(tower.level(i).coord, plus)
            minus = _log_lift_into_strip(tower.level(i).coord, minus)
            plus, minus = minus, plus  # anti-holomorphic lifts swap sides
        coord0 = tower.level(0).coord
        zp = fatou_inverse(coord0, plus)
        zm = fatou_inverse(coord0, minus)
        polygon = np.concatenate([zp, [0.0 + 0.0j], zm[::-1]])
        init = 0.5 * (zp[0] + zm[0])
        gaps.append(float(abs(init - (-4.0 / 27.0))))
        if prev_polygon is not None:
            probe = polygon[5:-5:7]
            inside = point_in_polygon(probe, prev_polygon)
            if not bool(np.all(inside)):
                nesting_ok = False
        prev_polygon = polygon
        out_levels.append(ArcLevel(i=depth, plus=plus, minus=minus,
                                   k_polygon=polygon, initial_point=init))
        arc_zeta = plus
    return ArcApproximation(
        levels=out_levels, gamma_plus_profiles=prof, arc_zeta=arc_zeta,
        arc_z=fatou_inverse(tower.level(0).coord, arc_zeta),
        nesting_ok=nesting_ok, initial_point_gaps=gaps)


def _log_lift_into_strip(coord: FatouCoordinate, zeta_curve: np.ndarray
                         ) -> np.ndarray:
    """One arc-lift step: coordinate inverse followed by the strip branch
    of the anti-holomorphic logarithm."""
    z = fatou_inverse(coord, zeta_curve)
    lifted = _lift_continuous(z)
    med = float(np.median(lifted.real))
    lifted = lifted - round(med - 1.0)
    return lifted


# ---------------------------------------------------------------------------
# arc point dynamics
# ---------------------------------------------------------------------------

@dataclass
class ArcOrbitResult:
    zeta0: complex
    numeric: list  # zeta_n while coordinate planes exist
    envelope: list  # (lower, upper) Im bounds for deeper steps
    verdict: str  # "certified" | "escaped" | "inconclusive"
    certified_at: Optional[int] = None


def s_alpha_step(coord_next: FatouCoordinate, zeta) -> np.ndarray:
    """One arc step: project by the modified exponential, read the next
    coordinate."""
    return coord_next.phi_z(exp_modified(np.asarray(zeta, complex)))


def s_alpha_orbit(tower: TowerBuilder, zeta0: complex, depth: int,
                  numeric_levels: int, M: float,
                  D3: float, D5: float,
                  brjuno_depth: int = 16) -> ArcOrbitResult:
    """Track an arc point through the tower, then by arithmetic envelopes."""
    rot = tower.rot
    bp = brjuno_sum(rot, max(brjuno_depth, depth + 1))
    numeric = []
    zeta = complex(zeta0)
    verdict = "inconclusive"
    certified_at = None
    for n in range(1, numeric_levels + 1):
        zeta = complex(s_alpha_step(tower.level(n).coord, zeta))
        numeric.append(zeta)
        if zeta.imag >= bp.best(n + 1) / TWO_PI + M:
            verdict = "certified"
            certified_at = n
            break
    envelope = []
    if verdict != "certified":
        y = numeric[-1].imag if numeric else complex(zeta0).imag
        lo, hi = y, y
        start = len(numeric) + 1
        for n in range(start, depth + 1):
            alpha_n = float(rot.shifted_value(n))
            # both envelopes jump down at their branch points, so interval
            # propagation takes grid extremes over the current interval
            ys = np.linspace(lo, hi, 33)
            lo = min(s_lower(alpha_n, float(v), D3=D3, D5=D5) for v in ys)
            hi = max(s_upper(alpha_n, float(v), D4=D3 + 1.0, D5=D5) for v in ys)
            envelope.append((float(lo), float(hi)))
            if lo >= bp.best(n + 1) / TWO_PI + M:
                verdict = "certified"
                certified_at = n
                break
            if hi < bp.best(n + 1) / TWO_PI - 2.0 * D5:
                verdict = "escaped"
                certified_at = n
                break
    return ArcOrbitResult(zeta0=complex(zeta0), numeric=numeric,
                          envelope=envelope, verdict=verdict,
                          certified_at=certified_at)


def tilde_h_status(results: list, depth: int) -> dict:
    """Aggregate arc-point verdicts into a tilde-class certificate."""
    kinds = [r.verdict for r in results]
    if all(k == "certified" for k in kinds):
        return {"kind": "certified", "depth": depth, "points": len(results)}
    if any(k == "escaped" for k in kinds):
        return {"kind": "escaped-below", "depth": depth,
                "escaped": kinds.count("escaped"), "points": len(results)}
    return {"kind": "inconclusive", "depth": depth,
            "certified": kinds.count("certified"), "points": len(results)}


def siegel_oracle(rot: RotationNumber, terms: int = 4096
                  ) -> SiegelBoundaryOracle:
    """Convenience re-export of the independent boundary oracle."""
    return linearization_boundary(rot, terms=terms)
