"""Exact rational scalars, Gaussian rationals, intervals, and exact circle geometry.

Everything here is exact: values are `fractions.Fraction`, points in the plane are
Gaussian rationals, and intervals/balls are closed sets with rational data.  Square
roots of rationals are the only irrationalities that appear; they are handled either
exactly (perfect squares) or through adaptively refined rational enclosures.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Iterable, Optional, Sequence, Union

from .errors import DegenerateGeometryError, EnclosureError

Rational = Fraction
Q = Fraction  # short alias used throughout the library

RationalLike = Union[Fraction, int, str]


def rat(x: RationalLike) -> Fraction:
    """Parse a rational from an int, Fraction, or a "p/q" / decimal string."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def rat_str(x: Fraction) -> str:
    """Serialize a rational as "p/q" (or "p" for integers); parses back exactly."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def sqrt_exact(x: Fraction) -> Optional[Fraction]:
    """Exact square root of a nonnegative rational, or None if it is irrational."""
    if x < 0:
        raise ValueError("sqrt of negative rational")
    n, d = x.numerator, x.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def sqrt_interval(x: Fraction, err: Fraction = Q(1, 10**30)) -> "RationalInterval":
    """Rational enclosure of sqrt(x) with width at most `err` (exact for perfect squares)."""
    if x < 0:
        raise ValueError("sqrt of negative rational")
    exact = sqrt_exact(x)
    if exact is not None:
        return RationalInterval(exact, exact)
    # scale so that integer sqrt gives the requested resolution
    m = Q(1)
    while m * m * err * err < 1:
        m *= 2
    scaled = x * m * m
    lo_int = isqrt(scaled.numerator // scaled.denominator)
    lo = Fraction(lo_int, 1) / m
    hi = Fraction(lo_int + 1, 1) / m
    # tighten: lo may undershoot by one grid step
    if lo * lo > x:
        lo -= Fraction(1, 1) / m
    if hi * hi < x:
        hi += Fraction(1, 1) / m
    return RationalInterval(lo, hi)


def _round_down(x: Fraction, bits: int) -> Fraction:
    scale = 1 << bits
    return Fraction((x.numerator * scale) // x.denominator, scale)


def _round_up(x: Fraction, bits: int) -> Fraction:
    scale = 1 << bits
    return Fraction(-((-x.numerator * scale) // x.denominator), scale)


@dataclass(frozen=True)
class GaussianRational:
    """Exact complex number with rational real and imaginary parts."""

    re: Fraction
    im: Fraction = Q(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    # -- field operations (all exact) --
    def __add__(self, o: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re + o.re, self.im + o.im)

    def __sub__(self, o: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, o: "GaussianRational") -> "GaussianRational":
        return GaussianRational(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    def __truediv__(self, o: "GaussianRational") -> "GaussianRational":
        d = o.re * o.re + o.im * o.im
        if d == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussianRational(
            (self.re * o.re + self.im * o.im) / d,
            (self.im * o.re - self.re * o.im) / d,
        )

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def abs_sq(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def is_real(self) -> bool:
        return self.im == 0

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    # -- serialization: {"re": "p/q", "im": "p/q"} --
    def to_json(self) -> dict:
        return {"re": rat_str(self.re), "im": rat_str(self.im)}

    @classmethod
    def from_json(cls, data) -> "GaussianRational":
        if isinstance(data, dict):
            return cls(rat(data["re"]), rat(data.get("im", 0)))
        return cls(rat(data))

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __repr__(self) -> str:
        if self.im == 0:
            return f"GQ({rat_str(self.re)})"
        return f"GQ({rat_str(self.re)}, {rat_str(self.im)})"


GQ = GaussianRational


def gq(re: RationalLike, im: RationalLike = 0) -> GaussianRational:
    return GaussianRational(rat(re), rat(im))


@dataclass(frozen=True)
class RationalInterval:
    """Closed interval [lo, hi] with exact rational endpoints.

    Lifted operations are enclosures: the true value of `x op y` lies in the result
    for every x in the first and y in the second operand.  With exact endpoints the
    enclosures here are tight (no rounding happens unless `outward_round` is used).
    """

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise EnclosureError(f"interval endpoints out of order: {self.lo} > {self.hi}")

    @classmethod
    def point(cls, x: RationalLike) -> "RationalInterval":
        v = rat(x)
        return cls(v, v)

    @classmethod
    def hull_of(cls, values: Iterable[Fraction]) -> "RationalInterval":
        vals = list(values)
        return cls(min(vals), max(vals))

    # -- queries --
    def width(self) -> Fraction:
        return self.hi - self.lo

    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x: Fraction) -> bool:
        return self.lo <= x <= self.hi

    def contains_interval(self, o: "RationalInterval") -> bool:
        return self.lo <= o.lo and o.hi <= self.hi

    def intersects(self, o: "RationalInterval") -> bool:
        return self.lo <= o.hi and o.lo <= self.hi

    def strictly_positive(self) -> bool:
        return self.lo > 0

    def strictly_negative(self) -> bool:
        return self.hi < 0

    def hull(self, o: "RationalInterval") -> "RationalInterval":
        return RationalInterval(min(self.lo, o.lo), max(self.hi, o.hi))

    # -- arithmetic --
    def __add__(self, o: "RationalInterval") -> "RationalInterval":
        return RationalInterval(self.lo + o.lo, self.hi + o.hi)

    def __sub__(self, o: "RationalInterval") -> "RationalInterval":
        return RationalInterval(self.lo - o.hi, self.hi - o.lo)

    def __neg__(self) -> "RationalInterval":
        return RationalInterval(-self.hi, -self.lo)

    def __mul__(self, o: "RationalInterval") -> "RationalInterval":
        prods = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return RationalInterval(min(prods), max(prods))

    def __truediv__(self, o: "RationalInterval") -> "RationalInterval":
        if o.lo <= 0 <= o.hi:
            raise EnclosureError("division by interval containing 0")
        recips = (1 / o.lo, 1 / o.hi)
        return self * RationalInterval(min(recips), max(recips))

    def scale(self, c: Fraction) -> "RationalInterval":
        c = Fraction(c)
        if c >= 0:
            return RationalInterval(self.lo * c, self.hi * c)
        return RationalInterval(self.hi * c, self.lo * c)

    def shift(self, c: Fraction) -> "RationalInterval":
        return RationalInterval(self.lo + c, self.hi + c)

    def __pow__(self, k: int) -> "RationalInterval":
        if not isinstance(k, int) or k < 0:
            raise ValueError("interval power expects a nonnegative integer exponent")
        if k == 0:
            return RationalInterval.point(1)
        if k % 2 == 1 or self.lo >= 0:
            return RationalInterval(self.lo**k, self.hi**k)
        if self.hi <= 0:
            return RationalInterval(self.hi**k, self.lo**k)
        # even power of an interval straddling 0
        return RationalInterval(Q(0), max(self.lo**k, self.hi**k))

    def abs(self) -> "RationalInterval":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return RationalInterval(Q(0), max(-self.lo, self.hi))

    def sqrt(self, err: Fraction = Q(1, 10**30)) -> "RationalInterval":
        if self.lo < 0:
            raise EnclosureError("sqrt of interval with negative endpoint")
        return RationalInterval(
            sqrt_interval(self.lo, err).lo, sqrt_interval(self.hi, err).hi
        )

    def outward_round(self, bits: int) -> "RationalInterval":
        """Round endpoints outward onto a dyadic grid; controls denominator growth."""
        return RationalInterval(_round_down(self.lo, bits), _round_up(self.hi, bits))

    def to_json(self) -> dict:
        return {"lo": rat_str(self.lo), "hi": rat_str(self.hi)}

    def __repr__(self) -> str:
        return f"[{rat_str(self.lo)}, {rat_str(self.hi)}]"


def interval_ops(a: RationalInterval, b: RationalInterval, op: str) -> RationalInterval:
    """Dispatch a lifted interval operation by name: +, -, *, /, power."""
    if op == "+":
        return a + b
    if op in ("-", "−"):
        return a - b
    if op in ("*", "x", "×"):
        return a * b
    if op in ("/", "÷"):
        return a / b
    if op == "power":
        if b.lo != b.hi or b.lo.denominator != 1:
            raise EnclosureError("power expects an exact integer exponent interval")
        return a ** int(b.lo)
    raise ValueError(f"unknown interval op {op!r}")


@dataclass(frozen=True)
class EnclosureBall:
    """Closed ball with exact center and exact squared radius.

    In one dimension (center.im == 0) the ball is the closed interval
    [center - r, center + r].  Radii are stored squared so that all ball data stays
    rational under Moebius images; `radius_exact` recovers the radius when the
    squared radius is a perfect square (which holds throughout the 1-D pipeline).
    """

    center: GaussianRational
    radius_sq: Fraction
    dimension: int = 2

    def __post_init__(self):
        object.__setattr__(self, "radius_sq", Fraction(self.radius_sq))
        if self.radius_sq < 0:
            raise ValueError("negative squared radius")
        if self.dimension not in (1, 2):
            raise ValueError("dimension must be 1 or 2")
        if self.dimension == 1 and self.center.im != 0:
            raise ValueError("1-D ball must have a real center")

    @classmethod
    def from_interval(cls, lo: RationalLike, hi: RationalLike) -> "EnclosureBall":
        lo, hi = rat(lo), rat(hi)
        if lo > hi:
            raise ValueError("interval endpoints out of order")
        c = (lo + hi) / 2
        r = (hi - lo) / 2
        return cls(GaussianRational(c), r * r, dimension=1)

    @classmethod
    def from_center_radius(
        cls, center: GaussianRational, radius: RationalLike, dimension: int = 2
    ) -> "EnclosureBall":
        r = rat(radius)
        return cls(center, r * r, dimension=dimension)

    def radius_exact(self) -> Optional[Fraction]:
        return sqrt_exact(self.radius_sq)

    def radius_interval(self, err: Fraction = Q(1, 10**30)) -> RationalInterval:
        return sqrt_interval(self.radius_sq, err)

    def as_interval(self) -> RationalInterval:
        if self.dimension != 1:
            raise ValueError("as_interval requires a 1-D ball")
        r = self.radius_exact()
        if r is None:
            raise EnclosureError("1-D ball with irrational radius cannot be an exact interval")
        return RationalInterval(self.center.re - r, self.center.re + r)

    def contains_point(self, p: GaussianRational) -> bool:
        return (p - self.center).abs_sq() <= self.radius_sq

    def contains_point_strict(self, p: GaussianRational) -> bool:
        return (p - self.center).abs_sq() < self.radius_sq

    def contains_ball(self, o: "EnclosureBall", strict: bool = False) -> bool:
        """Certified containment of the closed ball `o`: |c1-c2| + r2 <= r1."""
        diff = SqrtSum.of((Q(1), (o.center - self.center).abs_sq()), (Q(1), o.radius_sq))
        rhs = SqrtSum.of((Q(1), self.radius_sq))
        cmp = diff.compare(rhs)
        return cmp < 0 if strict else cmp <= 0

    def intersects_ball(self, o: "EnclosureBall") -> bool:
        """Certified test of closed-ball intersection: |c1-c2| <= r1 + r2."""
        lhs = SqrtSum.of((Q(1), (o.center - self.center).abs_sq()))
        rhs = SqrtSum.of((Q(1), self.radius_sq), (Q(1), o.radius_sq))
        return lhs.compare(rhs) <= 0

    def to_json(self) -> dict:
        return {
            "center": self.center.to_json(),
            "radius_sq": rat_str(self.radius_sq),
            "dimension": self.dimension,
        }

    def __repr__(self) -> str:
        r = self.radius_exact()
        rtxt = rat_str(r) if r is not None else f"sqrt({rat_str(self.radius_sq)})"
        return f"Ball({self.center!r}, r={rtxt})"


class SqrtSum:
    """Finite sum sum_k coef_k * sqrt(radicand_k) with exact rational data.

    Supports exact evaluation when every radicand is a perfect square and certified
    comparison in general, by refining interval enclosures of each root until the
    order is decided.  Two genuinely equal irrational sums can only be certified
    equal when both reduce to the same exact rational; otherwise comparison stops
    at `max_bits` and raises.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Sequence[tuple]):
        cleaned = []
        for coef, radicand in terms:
            coef, radicand = Fraction(coef), Fraction(radicand)
            if radicand < 0:
                raise ValueError("negative radicand")
            if coef == 0 or radicand == 0:
                continue
            root = sqrt_exact(radicand)
            if root is not None:
                cleaned.append((coef * root, Q(1)))  # fold exact roots into the coefficient
            else:
                cleaned.append((coef, radicand))
        self.terms = tuple(cleaned)

    @classmethod
    def of(cls, *terms) -> "SqrtSum":
        return cls(terms)

    def exact_value(self) -> Optional[Fraction]:
        total = Q(0)
        for coef, radicand in self.terms:
            if radicand != 1:
                return None
            total += coef
        return total

    def enclosure(self, err: Fraction = Q(1, 10**30)) -> RationalInterval:
        lo = hi = Q(0)
        for coef, radicand in self.terms:
            root = sqrt_interval(radicand, err)
            piece = root.scale(coef)
            lo += piece.lo
            hi += piece.hi
        return RationalInterval(lo, hi)

    def compare(self, other: "SqrtSum", max_bits: int = 4096) -> int:
        """Certified three-way comparison: -1, 0, or +1."""
        se, oe = self.exact_value(), other.exact_value()
        if se is not None and oe is not None:
            return (se > oe) - (se < oe)
        err = Q(1, 2**32)
        while True:
            a, b = self.enclosure(err), other.enclosure(err)
            if a.hi < b.lo:
                return -1
            if a.lo > b.hi:
                return 1
            if err.denominator.bit_length() > max_bits:
                raise EnclosureError(
                    "sqrt-sum comparison undecided at maximum refinement; "
                    "operands may be equal irrationals"
                )
            err = err * err


def circumcenter(
    p1: GaussianRational, p2: GaussianRational, p3: GaussianRational
) -> GaussianRational:
    """Exact circumcenter of three points (equidistant in squared distance).

    Raises DegenerateGeometryError for coincident or collinear inputs.
    """
    if p1 == p2 or p2 == p3 or p1 == p3:
        raise DegenerateGeometryError("coincident points have no circumcircle")
    ax, ay, bx, by, cx, cy = p1.re, p1.im, p2.re, p2.im, p3.re, p3.im
    d = 2 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if d == 0:
        raise DegenerateGeometryError("collinear points have no circumcircle")
    sa, sb, sc = p1.abs_sq(), p2.abs_sq(), p3.abs_sq()
    ux = (sa * (by - cy) + sb * (cy - ay) + sc * (ay - by)) / d
    uy = (sa * (cx - bx) + sb * (ax - cx) + sc * (bx - ax)) / d
    return GaussianRational(ux, uy)


def _affine_ball_image(a: GaussianRational, b: GaussianRational, ball: EnclosureBall) -> EnclosureBall:
    return EnclosureBall(a * ball.center + b, a.abs_sq() * ball.radius_sq, ball.dimension)


def _inversion_ball_image(ball: EnclosureBall) -> EnclosureBall:
    """Image of a closed ball under z -> 1/z; the pole 0 must lie strictly outside."""
    m = ball.center.abs_sq() - ball.radius_sq
    if m <= 0:
        from .errors import PoleCollisionError

        raise PoleCollisionError("pole lies inside or on the ball")
    return EnclosureBall(
        ball.center.conjugate() / GaussianRational(m),
        ball.radius_sq / (m * m),
        ball.dimension,
    )


def mobius_ball_image_coeffs(
    a: GaussianRational,
    b: GaussianRational,
    c: GaussianRational,
    d: GaussianRational,
    ball: EnclosureBall,
) -> EnclosureBall:
    """Exact image ball of a closed ball under z -> (az+b)/(cz+d), pole outside.

    Decomposes the map into affine steps and one inversion, each of which sends
    balls to balls with rational center and squared radius.
    """
    det = a * d - b * c
    if det.is_zero():
        raise DegenerateGeometryError("singular Moebius coefficients")
    if c.is_zero():
        return _affine_ball_image(a / d, b / d, ball)
    w = _affine_ball_image(c, d, ball)
    w = _inversion_ball_image(w)
    return _affine_ball_image((b * c - a * d) / c, a / c, w)


def mobius_ball_image(map_like, ball: EnclosureBall) -> EnclosureBall:
    """Exact ball image under a Moebius or affine map.

    `map_like` is anything exposing `mobius_coefficients() -> (a, b, c, d)` (see
    `ConformalMap`).  When the source radius is rational the result is cross-checked
    against the circumcenter of three boundary-point images, which is the
    three-points-determine-a-circle construction.
    """
    a, b, c, d = map_like.mobius_coefficients()
    image = mobius_ball_image_coeffs(a, b, c, d, ball)
    r = ball.radius_exact()
    if r is not None and r > 0 and not c.is_zero():
        one_r = GaussianRational(r)
        i_r = GaussianRational(0, r)
        pts = [
            _mobius_point(a, b, c, d, ball.center + one_r),
            _mobius_point(a, b, c, d, ball.center + i_r),
            _mobius_point(a, b, c, d, ball.center - one_r),
        ]
        cc = circumcenter(*pts)
        if cc != image.center or (pts[0] - cc).abs_sq() != image.radius_sq:
            raise EnclosureError("Moebius ball image failed its circumcenter cross-check")
    return image


def _mobius_point(a, b, c, d, z: GaussianRational) -> GaussianRational:
    den = c * z + d
    if den.is_zero():
        from .errors import PoleCollisionError

        raise PoleCollisionError("point maps to infinity")
    return (a * z + b) / den


def pairwise_ball_span(balls: Sequence[EnclosureBall]) -> tuple:
    """Exact diameter of a finite union of balls: max over pairs of |ci-cj|+ri+rj.

    Returns (value, (index_i, index_j)) where `value` is exact when the maximizing
    pair has rational separation and radii; all other pairs are certified strictly
    smaller through enclosure refinement.  This is the quantity the planar
    short-word verification maximizes over its nine-ball cover.
    """
    if not balls:
        raise ValueError("empty ball collection")
    sums = {}
    for i, j in itertools.combinations_with_replacement(range(len(balls)), 2):
        bi, bj = balls[i], balls[j]
        sums[(i, j)] = SqrtSum.of(
            (Q(1), (bi.center - bj.center).abs_sq()),
            (Q(1), bi.radius_sq),
            (Q(1), bj.radius_sq),
        )
    # locate the maximum by certified pairwise comparison
    best = max(sums, key=lambda k: float(sums[k].enclosure(Q(1, 10**40)).midpoint()))
    for key, s in sums.items():
        if key == best:
            continue
        if s.compare(sums[best]) > 0:
            best = key
    value = sums[best].exact_value()
    if value is None:
        raise EnclosureError(
            "maximal pair separation is not an exact rational; "
            "use enclosure() on the SqrtSum instead"
        )
    return value, best
