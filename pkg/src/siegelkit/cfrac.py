"""Arithmetic of rotation numbers.

Digit streams are the source of truth: every derived real (the value, the
Gauss orbit, Brjuno partial sums) is recomputed from the digits at a
configurable precision instead of being iterated in floating point, so a
deep orbit never inherits the exponential error growth of the Gauss map.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import mpmath
from mpmath import mp

from . import constants
from .errors import DigitsExhausted, DomainError, PrecisionExhausted

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# digit streams
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Tail:
    """Rule generating digits past the explicit prefix."""

    kind: str  # "constant" | "periodic" | "explicit-only"
    data: tuple = ()

    def digit(self, i):
        """0-indexed digit of the tail."""
        if self.kind == "constant":
            return self.data[0]
        if self.kind == "periodic":
            return self.data[i % len(self.data)]
        raise DigitsExhausted("digit stream has no tail rule")

    @staticmethod
    def constant(a: int) -> "Tail":
        return Tail("constant", (int(a),))

    @staticmethod
    def periodic(period: Sequence[int]) -> "Tail":
        return Tail("periodic", tuple(int(a) for a in period))

    @staticmethod
    def explicit_only() -> "Tail":
        return Tail("explicit-only")


class RotationNumber:
    """An irrational in (0,1) given by its continued-fraction digits.

    Parameters
    ----------
    digits : explicit digit prefix a_1, a_2, ...
    tail : rule for digits beyond the prefix (default: constant continuation
        of the last explicit digit is *not* assumed; an explicit-only tail
        raises when read past the end).
    dps : significant decimal digits used for derived real values.
    """

    def __init__(self, digits: Sequence[int], tail: Optional[Tail] = None,
                 dps: int = constants.PRECISION_DPS):
        digits = tuple(int(a) for a in digits)
        if any(a < 1 for a in digits):
            raise DomainError("continued-fraction digits must be >= 1")
        if tail is None:
            tail = Tail.explicit_only()
        if tail.kind in ("constant", "periodic") and any(a < 1 for a in tail.data):
            raise DomainError("tail digits must be >= 1")
        self.digits = digits
        self.tail = tail
        self.dps = int(dps)
        self._value_cache = {}

    # -- constructors ------------------------------------------------------
    @staticmethod
    def constant(a: int, dps: int = constants.PRECISION_DPS) -> "RotationNumber":
        return RotationNumber((), Tail.constant(a), dps=dps)

    @staticmethod
    def golden(dps: int = constants.PRECISION_DPS) -> "RotationNumber":
        return RotationNumber((), Tail.constant(1), dps=dps)

    @staticmethod
    def from_value(x, depth: int, dps: int = constants.PRECISION_DPS,
                   floor_digits: int = constants.PRECISION_FLOOR_DIGITS
                   ) -> "RotationNumber":
        """Extract `depth` digits of x in (0,1) by the Gauss map."""
        with mp.workdps(dps):
            t = mp.mpf(x)
            if not 0 < t < 1:
                raise DomainError("value must lie in (0,1)")
            digits = []
            budget = dps
            for _ in range(depth):
                inv = 1 / t
                a = int(mp.floor(inv))
                budget -= 2 * max(float(mp.log10(inv)), 0.0) + 1
                if budget < floor_digits:
                    raise PrecisionExhausted(
                        "only %d digits extracted before the precision floor"
                        % len(digits))
                t = inv - a
                if t <= mp.mpf(10) ** (-dps + floor_digits):
                    raise PrecisionExhausted(
                        "value is rational to working precision after %d digits"
                        % len(digits))
                digits.append(a)
        return RotationNumber(digits, Tail.explicit_only(), dps=dps)

    # -- digits ------------------------------------------------------------
    def digit(self, n: int) -> int:
        """1-indexed digit a_n."""
        if n < 1:
            raise DomainError("digit index starts at 1")
        if n <= len(self.digits):
            return self.digits[n - 1]
        return self.tail.digit(n - 1 - len(self.digits))

    def digits_prefix(self, depth: int):
        return [self.digit(n) for n in range(1, depth + 1)]

    def materializable_depth(self) -> Optional[int]:
        """None means unbounded (tail rule present)."""
        if self.tail.kind == "explicit-only":
            return len(self.digits)
        return None

    def is_high_type(self, N: int, depth: int) -> bool:
        """Every materialized digit up to `depth` is >= N."""
        try:
            return all(self.digit(n) >= N for n in range(1, depth + 1))
        except DigitsExhausted:
            return all(a >= N for a in self.digits)

    # -- values ------------------------------------------------------------
    def _tail_value(self):
        """Exact value (current mp context) of the pure tail [0; t1, t2, ...]."""
        if self.tail.kind == "constant":
            a = self.tail.data[0]
            return (mp.sqrt(a * a + 4) - a) / 2
        if self.tail.kind == "periodic":
            # x = 1/(b1 + 1/(b2 + ... + 1/(bp + x))) -> Moebius fixed point
            A, B, C, D = 1, 0, 0, 1  # matrix acting as (A x + B)/(C x + D)
            for b in reversed(self.tail.data):
                # innermost first: x -> b + x, then reciprocal at the end of
                # each level: x -> 1/(b + x)
                A, B, C, D = C, D, A + b * C, B + b * D
            # solve x = (A x + B)/(C x + D)
            c2, c1, c0 = C, D - A, -B
            disc = mp.sqrt(c1 * c1 - 4 * c2 * c0)
            for root in ((-c1 + disc) / (2 * c2), (-c1 - disc) / (2 * c2)):
                if 0 < root < 1:
                    return root
            raise DomainError("periodic tail has no fixed point in (0,1)")
        raise DigitsExhausted("explicit-only stream has no exact tail value")

    def shifted_value(self, n: int):
        """alpha_n = [0; a_{n+1}, a_{n+2}, ...] as an mpf at self.dps."""
        if n in self._value_cache:
            return self._value_cache[n]
        with mp.workdps(self.dps):
            prefix = self.digits[n:] if n < len(self.digits) else ()
            if self.tail.kind == "explicit-only":
                if n >= len(self.digits):
                    raise DigitsExhausted(
                        "Gauss orbit requested past the explicit digits")
                # finite continued fraction: close with the last digit exactly;
                # the value is rational and only trusted to the convergent gap.
                x = mp.mpf(0)
            else:
                if n >= len(self.digits):
                    shift = (n - len(self.digits)) % (
                        1 if self.tail.kind == "constant" else len(self.tail.data))
                    rolled = Tail(self.tail.kind,
                                  self.tail.data[shift:] + self.tail.data[:shift])
                    x = RotationNumber((), rolled, dps=self.dps)._tail_value()
                    self._value_cache[n] = x
                    return x
                x = self._tail_value()
            for a in reversed(prefix):
                x = 1 / (a + x)
            self._value_cache[n] = x
        return self._value_cache[n]

    def value(self):
        """alpha itself as an mpf at self.dps."""
        return self.shifted_value(0)

    def value_float(self) -> float:
        return float(self.value())

    # -- serialization -----------------------------------------------------
    def to_json(self) -> dict:
        out = {"digits": list(self.digits)}
        if self.tail.kind == "constant":
            out["tail"] = {"kind": "constant", "a": self.tail.data[0]}
        elif self.tail.kind == "periodic":
            out["tail"] = {"kind": "periodic", "period": list(self.tail.data)}
        else:
            out["tail"] = {"kind": "explicit-only"}
        out["dps"] = self.dps
        return out

    @staticmethod
    def from_json(obj) -> "RotationNumber":
        if isinstance(obj, str):
            obj = json.loads(obj)
        tail = obj.get("tail", {"kind": "explicit-only"})
        kind = tail["kind"]
        if kind == "constant":
            t = Tail.constant(tail["a"])
        elif kind == "periodic":
            t = Tail.periodic(tail["period"])
        else:
            t = Tail.explicit_only()
        return RotationNumber(obj.get("digits", ()), t,
                              dps=obj.get("dps", constants.PRECISION_DPS))

    def __repr__(self):
        tail = self.tail.kind
        if self.tail.data:
            tail += str(list(self.tail.data))
        return "RotationNumber(%s, tail=%s)" % (list(self.digits[:8]), tail)


# ---------------------------------------------------------------------------
# Gauss map and orbits
# ---------------------------------------------------------------------------

def gauss_step(alpha, dps: int = constants.PRECISION_DPS,
               floor_digits: int = constants.PRECISION_FLOOR_DIGITS):
    """One application of the Gauss map G(x) = 1/x - floor(1/x).

    Raises PrecisionExhausted when the step would leave fewer than
    `floor_digits` trustworthy digits (inputs are treated as exact at `dps`).
    """
    with mp.workdps(dps):
        x = mp.mpf(alpha)
        if not 0 < x < 1:
            raise DomainError("Gauss map argument must lie in (0,1)")
        inv = 1 / x
        a = mp.floor(inv)
        out = inv - a
        lost = 2 * max(float(mp.log10(inv)), 0.0)
        if dps - lost < floor_digits:
            raise PrecisionExhausted(
                "Gauss step loses ~%.0f digits of %d available" % (lost, dps))
        if out <= mp.mpf(10) ** (-(dps - floor_digits)):
            raise PrecisionExhausted("argument is rational to working precision")
        return out


@dataclass
class GaussOrbit:
    """Materialized Gauss orbit of a rotation number.

    alphas[n] is alpha_n as an mpf, betas[n] = alpha_0 ... alpha_n with
    betas[-1] meaning beta_{-1} = 1 handled via the `beta` accessor.
    """

    rot: RotationNumber
    depth: int
    alphas: list = field(default_factory=list)
    betas: list = field(default_factory=list)
    convergents: list = field(default_factory=list)
    depth_cap: Optional[int] = None

    @staticmethod
    def build(rot: RotationNumber, depth: int) -> "GaussOrbit":
        cap = value_iteration_cap(rot, depth)
        md = rot.materializable_depth()
        if md is not None and depth > md:
            raise DigitsExhausted(
                "depth %d exceeds the %d explicit digits" % (depth, md))
        with mp.workdps(rot.dps):
            alphas = [rot.shifted_value(n) for n in range(depth + 1)]
            betas = []
            acc = mp.mpf(1)
            for a in alphas:
                acc = acc * a
                betas.append(acc)
        orbit = GaussOrbit(rot=rot, depth=depth, alphas=alphas, betas=betas,
                           convergents=convergents(rot, depth),
                           depth_cap=cap)
        return orbit

    def beta(self, n: int):
        """beta_n, with beta_{-1} = 1."""
        if n == -1:
            return mp.mpf(1)
        return self.betas[n]

    def digit_identity_holds(self) -> bool:
        """floor(1/alpha_{n-1}) == a_n exactly for all materialized n."""
        with mp.workdps(self.rot.dps):
            for n in range(1, self.depth + 1):
                if int(mp.floor(1 / self.alphas[n - 1])) != self.rot.digit(n):
                    return False
        return True


def value_iteration_cap(rot: RotationNumber, depth: int) -> int:
    """Largest depth a value-based Gauss iteration could certify.

    The forward error of d Gauss steps is amplified by roughly prod q_n^2;
    the cap is where 2*log10(q_d) eats the precision budget.  Digit-derived
    orbits are exact, but the cap is still reported so callers know when a
    plain floating restart would have failed.
    """
    budget = rot.dps - constants.PRECISION_FLOOR_DIGITS
    q_prev, q = 0, 1
    cap = 0
    for n in range(1, depth + 1):
        try:
            a = rot.digit(n)
        except DigitsExhausted:
            break
        q_prev, q = q, a * q + q_prev
        if 2 * math.log10(q) > budget:
            break
        cap = n
    return cap


def convergents(rot: RotationNumber, depth: int):
    """[(p_1,q_1), ..., (p_depth, q_depth)] as exact integers."""
    p_prev, p = 1, 0
    q_prev, q = 0, 1
    out = []
    for n in range(1, depth + 1):
        a = rot.digit(n)
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        out.append((p, q))
    return out


# ---------------------------------------------------------------------------
# Brjuno sums
# ---------------------------------------------------------------------------

@dataclass
class BrjunoPartial:
    """Partial Brjuno sums of every level of a Gauss orbit.

    partials[n] = B_depth(alpha_n) = sum_{j=n}^{depth} (beta_{j-1}/beta_{n-1})
    log(1/alpha_j); exact_limits[n] is the closed-form limit when the digit
    tail is eventually constant/periodic, else None.
    """

    rot: RotationNumber
    depth: int
    partials: list
    exact_limits: list
    tail_flag: str  # "converged" | "diverging" | "unknown"

    def partial(self, n: int = 0) -> float:
        return float(self.partials[n])

    def limit(self, n: int = 0) -> Optional[float]:
        v = self.exact_limits[n]
        return None if v is None else float(v)

    def best(self, n: int = 0) -> float:
        """Exact limit when available, else the partial sum."""
        v = self.exact_limits[n]
        return float(self.partials[n] if v is None else v)

    def to_json(self) -> dict:
        return {
            "depth": self.depth,
            "partials": [float(x) for x in self.partials],
            "exact_limits": [None if x is None else float(x)
                             for x in self.exact_limits],
            "tail_flag": self.tail_flag,
        }


def _brjuno_tail_limit(rot: RotationNumber, level: int):
    """Closed-form B(alpha_level) when the stream at `level` is eventually
    constant or periodic; None otherwise.  Must run inside an mp context."""
    if rot.tail.kind == "explicit-only":
        return None
    # roll forward to the tail, accumulating prefix terms
    # B(alpha_n) = log(1/alpha_n) + alpha_n B(alpha_{n+1})
    n = level
    prefix_terms = []
    weights = []
    acc = mp.mpf(1)
    while n < len(rot.digits):
        a_n = rot.shifted_value(n)
        prefix_terms.append(mp.log(1 / a_n))
        weights.append(acc)
        acc = acc * a_n
        n += 1
    # pure-tail Brjuno value at level n (inside the tail)
    if rot.tail.kind == "constant":
        x = rot.shifted_value(n)
        tail_val = mp.log(1 / x) / (1 - x)
    else:
        period = len(rot.tail.data)
        xs = [rot.shifted_value(n + i) for i in range(period)]
        total = mp.mpf(0)
        w = mp.mpf(1)
        for x in xs:
            total += w * mp.log(1 / x)
            w = w * x
        tail_val = total / (1 - w)
    out = tail_val * acc
    for t, w in zip(prefix_terms, weights):
        out += w * t
    return out


def brjuno_sum(rot: RotationNumber, depth: int,
               diverging_threshold: float = constants.BRJUNO_DIVERGING_THRESHOLD
               ) -> BrjunoPartial:
    """Partial Brjuno sums B_depth(alpha_n) for all levels n <= depth."""
    if depth < 0:
        raise DomainError("depth must be >= 0")
    orbit = GaussOrbit.build(rot, depth)
    with mp.workdps(rot.dps):
        logs = [mp.log(1 / a) for a in orbit.alphas]
        partials = [mp.mpf(0)] * (depth + 1)
        partials[depth] = logs[depth]
        for n in range(depth - 1, -1, -1):
            partials[n] = logs[n] + orbit.alphas[n] * partials[n + 1]
        exacts = []
        for n in range(depth + 1):
            try:
                exacts.append(_brjuno_tail_limit(rot, n))
            except DigitsExhausted:
                exacts.append(None)
    if exacts[0] is not None:
        flag = "converged"
    elif float(partials[0]) > diverging_threshold:
        flag = "diverging"
    else:
        flag = "unknown"
    return BrjunoPartial(rot=rot, depth=depth, partials=partials,
                         exact_limits=exacts, tail_flag=flag)


# ---------------------------------------------------------------------------
# Yoccoz machinery
# ---------------------------------------------------------------------------

def yoccoz_r(alpha, x):
    """Yoccoz's comparison map r_alpha.

    Exponential branch below log(1/alpha), affine expansion above; the
    closed branch at the junction is the affine one.  Works on floats and
    mpmath numbers alike.
    """
    is_mp = isinstance(alpha, mpmath.mpf) or isinstance(x, mpmath.mpf)
    log1a = mp.log(1 / mp.mpf(alpha)) if is_mp else math.log(1.0 / alpha)
    if x >= log1a:
        return (x - log1a + 1) / (mp.mpf(alpha) if is_mp else alpha)
    return mp.exp(x) if is_mp else math.exp(x)


def s_upper(alpha, y, D4: float = constants.D4_DEFAULT,
            D5: float = constants.D5_DEFAULT):
    """Upper comparison envelope for the imaginary part of one arc step."""
    is_mp = isinstance(alpha, mpmath.mpf) or isinstance(y, mpmath.mpf)
    log1a = mp.log(1 / mp.mpf(alpha)) if is_mp else math.log(1.0 / alpha)
    twopi = 2 * mp.pi if is_mp else TWO_PI
    if y >= log1a / twopi + D4:
        return (y - log1a / twopi + D5) / alpha
    return (mp.exp(D5 + twopi * y) if is_mp
            else math.exp(D5) * math.exp(TWO_PI * y))


def s_lower(alpha, y, D3: float = constants.D3_DEFAULT,
            D5: float = constants.D5_DEFAULT):
    """Lower comparison envelope for the imaginary part of one arc step."""
    is_mp = isinstance(alpha, mpmath.mpf) or isinstance(y, mpmath.mpf)
    log1a = mp.log(1 / mp.mpf(alpha)) if is_mp else math.log(1.0 / alpha)
    twopi = 2 * mp.pi if is_mp else TWO_PI
    if y >= log1a / twopi + D3 + 1:
        return (y - log1a / twopi - D3) / alpha
    if is_mp:
        return mp.exp(twopi * y - D5) - 3
    return math.exp(TWO_PI * y - D5) - 3.0


def tilde_height(rot: RotationNumber, n: int, M: float, depth: int) -> float:
    """Arc-level height floor: B(alpha_{n+1})/(2 pi) + M (partial-sum based)."""
    bp = brjuno_sum(rot, max(depth, n + 1))
    return bp.best(n + 1) / TWO_PI + M


# ---------------------------------------------------------------------------
# Herman status
# ---------------------------------------------------------------------------

@dataclass
class HermanStatus:
    kind: str  # "certified" | "pattern-observed" | "inconclusive"
    depth: int
    witnesses: list = field(default_factory=list)  # per m: first good n
    pattern_depth: Optional[int] = None
    detail: str = ""

    def to_json(self) -> dict:
        return {"kind": self.kind, "depth": self.depth,
                "witnesses": self.witnesses,
                "pattern_depth": self.pattern_depth, "detail": self.detail}


def r_composition(rot: RotationNumber, m: int, n: int, x0=0.0):
    """r_{alpha_{n-1}} o ... o r_{alpha_m}(x0) at working precision."""
    with mp.workdps(rot.dps):
        x = mp.mpf(x0)
        for k in range(m, n):
            x = yoccoz_r(rot.shifted_value(k), x)
        return x


def herman_status(rot: RotationNumber, depth: int) -> HermanStatus:
    """Finite-depth Herman check via the arithmetic characterization.

    For every starting level m < depth, compose the comparison maps from 0
    and look for the first n <= depth whose composition dominates the Brjuno
    sum of alpha_n (exact limit when the tail is known, else the partial sum,
    which only weakens the certificate).  For eventually constant/periodic
    digit streams the Gauss shift is eventually periodic, so a level m deep
    in the tail inherits the witness of its shift-equivalent earlier level;
    such witnesses are recorded as ("periodic", m').  If instead every
    tested composition stays below log(1/alpha) at each step, the
    anti-linearization pattern is reported; a finite run is evidence only,
    never a proof.
    """
    bp = brjuno_sum(rot, depth)
    witnesses = []
    pattern_all = True
    prefix = len(rot.digits)
    period: Optional[int] = None
    if rot.tail.kind == "constant":
        period = 1
    elif rot.tail.kind == "periodic":
        period = len(rot.tail.data)
    with mp.workdps(rot.dps):
        for m in range(depth):
            x = mp.mpf(0)
            hit = None
            below_all = True
            for n in range(m + 1, depth + 1):
                x = yoccoz_r(rot.shifted_value(n - 1), x)
                if x >= mp.log(1 / rot.shifted_value(n)):
                    below_all = False
                target = bp.exact_limits[n]
                if target is None:
                    target = bp.partials[n]
                if x >= target:
                    hit = n
                    break
            if hit is None and period is not None and m > prefix:
                m_equiv = prefix + (m - prefix) % period
                if m_equiv < m and witnesses[m_equiv] is not None:
                    hit = ("periodic", m_equiv)
            witnesses.append(hit)
            if m == 0 and (not below_all or hit is not None):
                # the pattern claim is a full-window statement from level 0
                pattern_all = False
    if witnesses and all(w is not None for w in witnesses):
        return HermanStatus(kind="certified", depth=depth,
                            witnesses=witnesses,
                            detail="every m < depth has a dominating "
                                   "composition (tail periodicity used "
                                   "where noted)")
    if pattern_all and depth >= 1:
        return HermanStatus(kind="pattern-observed", depth=depth,
                            witnesses=witnesses, pattern_depth=depth,
                            detail="anti-linearization pattern observed to "
                                   "depth %d; a finite run is evidence, not "
                                   "a proof" % depth)
    return HermanStatus(kind="inconclusive", depth=depth, witnesses=witnesses,
                        detail="neither pattern resolved within depth")


# ---------------------------------------------------------------------------
# forced anti-Herman digit towers
# ---------------------------------------------------------------------------

_EXP_SAFE = 709.0  # overflow threshold for math.exp
_NORM_FLOOR = 6.6  # exp(6.6) > 709, so normalized levels dominate strictly


@dataclass(frozen=True)
class TowerValue:
    """A positive real stored as an iterated logarithm.

    level=0 stores the number itself in `value`; level=k stores
    log^(k)(number).  Values produced by the anti-Herman digit construction
    grow as an exponential tower, so materializing them past the first few
    levels is impossible; this keeps comparisons exact at every depth.
    Normalized form keeps level >= 1 values in (6.6, 709], which makes a
    higher level strictly dominant.
    """

    level: int
    value: float

    @staticmethod
    def of(x: float) -> "TowerValue":
        return TowerValue(0, float(x))

    def normalized(self) -> "TowerValue":
        lv, v = self.level, self.value
        while lv >= 1 and v <= _NORM_FLOOR:
            lv -= 1
            v = math.exp(v)
        return TowerValue(lv, v)

    def exp(self) -> "TowerValue":
        if self.level == 0 and self.value < _EXP_SAFE:
            return TowerValue(0, math.exp(self.value))
        return TowerValue(self.level + 1, self.value)

    def log(self) -> "TowerValue":
        if self.level >= 1:
            return TowerValue(self.level - 1, self.value).normalized()
        return TowerValue(0, math.log(self.value))

    def __gt__(self, other: "TowerValue") -> bool:
        a, b = self.normalized(), other.normalized()
        if a.level != b.level:
            return a.level > b.level
        return a.value > b.value

    def as_int(self):
        """Exact integer when materializable, else None."""
        if self.level == 0 and self.value < 2**62:
            return int(self.value)
        return None


def build_antiherman_digits(depth: int, margin: float = 0.5, base: int = 25):
    """Digit stream forcing the anti-linearization pattern to `depth` steps.

    Chooses a_{k+1} ~ exp(x_k + margin) where x_k is the k-step composition
    of the comparison maps started at 0, which keeps every composition on
    the exponential branch, so r_{...} o ... o r(0) < log(1/alpha_k) holds at
    each step by construction.  Digits explode as an exponential tower;
    they are returned as TowerValue records (exact ints while they fit).

    Returns (digits, xs, checks): digits[j] represents a_{j+1}, xs[k] the
    composition value after k+1 steps, checks[k] the verified inequality
    log(a_{k+1}) > x_k at step k+1.
    """
    digits = [TowerValue.of(float(base))]  # a_1
    xs = []
    checks = []
    x = TowerValue.of(0.0)
    for _ in range(depth):
        x = x.exp()  # exponential branch of the comparison map
        xs.append(x)
        if x.level == 0 and x.value + margin < _EXP_SAFE:
            a = TowerValue(0, float(math.floor(math.exp(x.value + margin))) + 1.0)
        else:
            a = TowerValue(x.level + 1, x.value + margin).normalized()
        digits.append(a)
        checks.append(a.log() > x)
    return digits, xs, checks


# ---------------------------------------------------------------------------
# comparison-inequality propagation (one-step checks)
# ---------------------------------------------------------------------------

def key_inequality_step(alpha, x, y, D4, D5):
    """One step of the upper-envelope comparison: returns (x', y').

    x' = r_alpha(x), y' = s^u_alpha(y).  All mpmath to survive the extreme
    thresholds the branch analysis requires.
    """
    with mp.workdps(40):
        a = mp.mpf(alpha)
        return yoccoz_r(a, mp.mpf(x)), s_upper(a, mp.mpf(y), D4=D4, D5=D5)


def key_inequality_dual_step(alpha, x, y, D3, D5):
    """One step of the lower-envelope comparison: returns (x', y')."""
    with mp.workdps(40):
        a = mp.mpf(alpha)
        return yoccoz_r(a, mp.mpf(x)), s_lower(a, mp.mpf(y), D3=D3, D5=D5)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

@dataclass
class ClassificationReport:
    rot_json: dict
    high_type: dict
    bounded_type: dict
    brjuno: dict
    herman: dict
    tilde_h: Optional[dict] = None

    def to_json(self) -> dict:
        out = {
            "rotation_number": self.rot_json,
            "high_type": self.high_type,
            "bounded_type": self.bounded_type,
            "brjuno": self.brjuno,
            "herman": self.herman,
        }
        if self.tilde_h is not None:
            out["tilde_h"] = self.tilde_h
        return out


def classify(rot: RotationNumber, depth: int,
             N: int = constants.HIGH_TYPE_N) -> ClassificationReport:
    """Finite-depth membership certificates for a rotation number."""
    bp = brjuno_sum(rot, depth)
    herman = herman_status(rot, depth)
    digits = rot.digits_prefix(min(
        depth, rot.materializable_depth() or depth))
    bounded = {
        "flag": bool(digits) or rot.tail.kind in ("constant", "periodic"),
        "depth": depth,
        "sup_digit": max(digits) if digits else None,
        "tail_bounded": rot.tail.kind in ("constant", "periodic"),
    }
    if herman.kind == "certified" and any(w is None for w in herman.witnesses):
        raise AssertionError("certified report carries a missing witness")
    return ClassificationReport(
        rot_json=rot.to_json(),
        high_type={"N": N, "verified_depth": depth,
                   "holds": rot.is_high_type(N, depth)},
        bounded_type=bounded,
        brjuno=bp.to_json(),
        herman=herman.to_json(),
    )
