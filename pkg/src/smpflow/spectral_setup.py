"""Two-interval spectral geometry.

The rational map ``V(z) = a*z + b - 1/z`` (a > 0) pulls ``[-2, 2]`` back to a
union of two closed intervals ``E = [b0, a0] \\ (a1, b1)`` with 0 inside the
inner gap.  Period-two five-diagonal SMP operators with spectrum E are
parametrized by points ``(p0, p1)`` of the real isospectral curve

    p0^2 + p1^2 + a^2 p0^2 p1^2 + b p0 p1 = 1/a,

and are certified here through the magic-formula residual
``a*A + b*I - A^{-1} - S^2 - S^{-2} = 0``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

if TYPE_CHECKING:  # pragma: no cover
    from .smp_core import SmpOperator

__all__ = [
    "CurveParams",
    "TwoIntervalSet",
    "CurvePoint",
    "CurveError",
    "MagicFormulaError",
    "band_endpoints",
    "v_eval",
    "delta_eval",
    "curve_residual",
    "require_on_curve",
    "curve_solve_p1",
    "feasible_p0_max",
    "build_periodic_smp",
    "magic_residual",
]

TOL_CURVE = 1e-10
# Guard distance to E for delta_eval.  A point at height 1e-9 above a band
# has 1 - |Delta| of the same order, so the guard must sit well below that.
TOL_BOUNDARY = 1e-12


class CurveError(ValueError):
    """A point failed the isospectral-curve membership test."""


class MagicFormulaError(RuntimeError):
    """A constructed operator failed the magic-formula residual gate."""


@dataclass(frozen=True)
class CurveParams:
    """Parameters (a, b) of V(z) = a*z + b - 1/z; a must be positive."""

    a: float
    b: float

    def __post_init__(self) -> None:
        if not self.a > 0:
            raise ValueError(f"a must be positive, got {self.a}")

    def to_json(self) -> dict:
        return {"a": self.a, "b": self.b}

    @classmethod
    def from_json(cls, obj: dict) -> "CurveParams":
        return cls(a=float(obj["a"]), b=float(obj["b"]))


@dataclass(frozen=True)
class TwoIntervalSet:
    """Endpoints of E = [b0, a0] \\ (a1, b1), ordered b0 < a1 < 0 < b1 < a0."""

    b0: float
    a1: float
    b1: float
    a0: float

    def __post_init__(self) -> None:
        if not (self.b0 < self.a1 < 0.0 < self.b1 < self.a0):
            raise ValueError(
                f"endpoints must satisfy b0 < a1 < 0 < b1 < a0, got "
                f"({self.b0}, {self.a1}, {self.b1}, {self.a0})"
            )

    @property
    def diameter(self) -> float:
        return self.a0 - self.b0

    def distance(self, x: float) -> float:
        """Distance from a real x to the set E."""
        if self.b0 <= x <= self.a1 or self.b1 <= x <= self.a0:
            return 0.0
        if x < self.b0:
            return self.b0 - x
        if x > self.a0:
            return x - self.a0
        # inside the inner gap
        return min(x - self.a1, self.b1 - x)

    def to_json(self) -> dict:
        return {"b0": self.b0, "a1": self.a1, "b1": self.b1, "a0": self.a0}

    @classmethod
    def from_json(cls, obj: dict) -> "TwoIntervalSet":
        return cls(*(float(obj[k]) for k in ("b0", "a1", "b1", "a0")))


@dataclass(frozen=True)
class CurvePoint:
    """A point (p0, p1); curve membership is checked against CurveParams."""

    p0: float
    p1: float

    def negated(self) -> "CurvePoint":
        return CurvePoint(-self.p0, -self.p1)


def v_eval(params: CurveParams, z: complex) -> complex:
    """Evaluate V(z) = a*z + b - 1/z.  Raises at the pole z = 0."""
    if z == 0:
        raise ZeroDivisionError("V has a pole at z = 0")
    return params.a * z + params.b - 1.0 / z


def _quadratic_roots(a2: float, a1: float, a0: float) -> tuple[float, float]:
    """Real roots of a2 x^2 + a1 x + a0 with positive discriminant.

    Cancellation-safe: the large-magnitude root is formed first, the other
    by Vieta.  Returned in increasing order.
    """
    disc = a1 * a1 - 4.0 * a2 * a0
    s = math.sqrt(disc)
    q = -0.5 * (a1 + math.copysign(s, a1)) if a1 != 0.0 else 0.5 * s
    r1 = q / a2
    r2 = a0 / q if q != 0.0 else -a1 / a2 - r1
    return (r1, r2) if r1 <= r2 else (r2, r1)


def band_endpoints(params: CurveParams) -> TwoIntervalSet:
    """Endpoints of E = V^{-1}([-2, 2]).

    They are the roots of a z^2 + (b -+ 2) z - 1 = 0; each quadratic has one
    root of each sign (the root product is -1/a), so the required ordering
    holds automatically.
    """
    a, b = params.a, params.b
    lo_p2, hi_p2 = _quadratic_roots(a, b + 2.0, -1.0)  # V = -2
    lo_m2, hi_m2 = _quadratic_roots(a, b - 2.0, -1.0)  # V = +2
    return TwoIntervalSet(b0=lo_p2, a1=lo_m2, b1=hi_p2, a0=hi_m2)


def delta_eval(
    params: CurveParams, z: complex, tol_boundary: float = TOL_BOUNDARY
) -> complex:
    """The root of w^2 - V(z) w + 1 = 0 with |w| < 1, defined off E.

    The two roots multiply to 1, so exactly one lies strictly inside the
    unit disk whenever z is off E.  Both roots are computed with the
    cancellation-safe formula and the smaller modulus is returned.
    """
    v = v_eval(params, complex(z))
    s = cmath.sqrt(v * v - 4.0)
    # pick the sign that avoids cancellation in v +/- s
    w_big = 0.5 * (v + s) if abs(v + s) >= abs(v - s) else 0.5 * (v - s)
    w = 1.0 / w_big
    if abs(w) >= 1.0 - tol_boundary:
        raise ValueError(
            f"z = {z} is on or too close to E (|Delta| = {abs(w):.17g})"
        )
    return w


def curve_residual(params: CurveParams, p0: float, p1: float) -> float:
    """Signed defect p0^2 + p1^2 + a^2 p0^2 p1^2 + b p0 p1 - 1/a."""
    a, b = params.a, params.b
    return p0 * p0 + p1 * p1 + (a * p0 * p1) ** 2 + b * p0 * p1 - 1.0 / a


def require_on_curve(
    params: CurveParams, p: CurvePoint, tol: float = TOL_CURVE
) -> None:
    """Raise CurveError unless p satisfies the curve equation.

    The residual is compared relative to the scale max(1, 1/a).
    """
    scale = max(1.0, 1.0 / params.a)
    res = abs(curve_residual(params, p.p0, p.p1))
    if res > tol * scale:
        raise CurveError(
            f"point ({p.p0}, {p.p1}) is off the isospectral curve: "
            f"residual {res:.3e} exceeds {tol:.1e} * {scale:g}"
        )


def curve_solve_p1(params: CurveParams, p0: float) -> list[float]:
    """Real p1 solving the curve equation for a given p0.

    The curve equation is quadratic in p1:
    (1 + a^2 p0^2) p1^2 + b p0 p1 + (p0^2 - 1/a) = 0.
    Returns [], [double root], or the two roots in increasing order.
    """
    a, b = params.a, params.b
    c2 = 1.0 + (a * p0) ** 2
    c1 = b * p0
    c0 = p0 * p0 - 1.0 / a
    disc = c1 * c1 - 4.0 * c2 * c0
    if disc < 0.0:
        return []
    if disc == 0.0:
        return [-c1 / (2.0 * c2)]
    return list(_quadratic_roots(c2, c1, c0))


def feasible_p0_max(params: CurveParams, tol: float = 1e-14) -> float:
    """Largest |p0| admitting a real p1 on the curve.

    The discriminant of curve_solve_p1 is even in p0, positive at 0 and
    eventually negative; its positive zero is bracketed by doubling and
    located by bisection.
    """

    def disc(p0: float) -> float:
        a, b = params.a, params.b
        c2 = 1.0 + (a * p0) ** 2
        return (b * p0) ** 2 - 4.0 * c2 * (p0 * p0 - 1.0 / a)

    hi = 1.0
    while disc(hi) > 0.0:
        hi *= 2.0
        if hi > 1e12:  # pragma: no cover - unreachable for valid params
            raise RuntimeError("failed to bracket the feasible p0 range")
    lo = 0.0
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if disc(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return lo


def build_periodic_smp(
    params: CurveParams,
    p: CurvePoint,
    tol_curve: float = TOL_CURVE,
    magic_window: int = 48,
    magic_tol: float = 1e-10,
) -> "SmpOperator":
    """Period-two SMP operator for a curve point.

    Closed forms: r1 = 1/a, q0 = a p0 p1, q1 = -b/a - a p0 p1.  The result
    is gated by the magic-formula residual so a wrong closed form cannot
    propagate silently.
    """
    from .smp_core import SmpOperator

    require_on_curve(params, p, tol_curve)
    a, b = params.a, params.b
    r1 = 1.0 / a
    q1 = -b / a - a * p.p0 * p.p1
    op = SmpOperator(
        curve=params,
        left_tail=p,
        right_tail=p,
        k_min=0,
        p_core=(p.p0, p.p1),
        q_odd_core=(q1,),
        r_odd_core=(r1,),
    )
    res = magic_residual(op, params, magic_window)
    if res > magic_tol:
        raise MagicFormulaError(
            f"periodic construction failed the magic-formula gate: "
            f"residual {res:.3e} > {magic_tol:.1e}"
        )
    return op


def magic_residual(
    A: "SmpOperator", params: CurveParams | None = None, n_window: int = 64
) -> float:
    """Max-entry residual of a*A + b*I - A^{-1} - S^2 - S^{-2}.

    The A^{-1} bands come from padded solves (see smp_core); entries of
    A^{-1} beyond distance 2 from the diagonal enter the residual directly
    since S^2 + S^{-2} has none.  Evaluated over an n_window-wide window
    centered on the core.
    """
    from .smp_core import inverse_band_entries

    if params is None:
        params = A.curve
    a, b = params.a, params.b
    mid = (A.k_min + A.k_max) // 2
    k_lo = mid - n_window // 2
    k_lo -= k_lo % 2  # even alignment
    k_hi = k_lo + n_window - 1
    bands = inverse_band_entries(A, k_lo, k_hi)
    worst = bands.off_band_max
    for k in range(k_lo, k_hi + 1):
        worst = max(worst, abs(a * A.q(k) + b - bands.sigma(k)))
        worst = max(worst, abs(a * A.p(k) - bands.pi(k)))
        if k % 2 == 0:
            worst = max(worst, abs(-bands.rho(k) - 1.0))
        elif k - 2 >= k_lo:
            worst = max(worst, abs(a * A.r(k) - bands.outer_odd(k) - 1.0))
    return worst
