"""Conformal maps, system validation, and certified derivative/diameter bounds.

Five map kinds are supported: affine and Moebius maps on the line, their complex
(planar, holomorphic) versions, and affine maps on the line perturbed by a
piecewise-quadratic bump with continuous piecewise-linear derivative.  All map
data is exact; evaluation at rational points is exact, and images of intervals
and balls are exact for every kind.

A validated `IFSystem` carries the derived invariant domain V (a padded convex
neighborhood of the map images, following the standard construction), certified
distortion data (the comparability constant K and Hoelder data), and caches of
per-word cylinder enclosures, derivative bounds, and diameter bounds.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from .arith import (
    EnclosureBall,
    GaussianRational,
    Q,
    RationalInterval,
    SqrtSum,
    gq,
    mobius_ball_image_coeffs,
    rat,
    rat_str,
    sqrt_exact,
    sqrt_interval,
)
from .enclosures import exp_interval, pow_interval
from .errors import EnclosureError, InvalidSystemError, PoleCollisionError
from .words import Word

Point = Union[Fraction, GaussianRational]

AFFINE_1D = "affine-1d"
MOBIUS_1D = "mobius-1d"
AFFINE_COMPLEX = "affine-complex"
MOBIUS_COMPLEX = "mobius-complex"
PERTURBED_AFFINE_1D = "perturbed-affine-1d"

_ONE_D_KINDS = (AFFINE_1D, MOBIUS_1D, PERTURBED_AFFINE_1D)


@dataclass(frozen=True)
class PiecewisePolynomial:
    """Compactly supported piecewise polynomial of degree <= 2, C^1 on the line.

    `pieces[k]` holds coefficients (c0, c1, c2) for breakpoints[k] <= x <
    breakpoints[k+1]; the function is identically zero outside the breakpoint
    range.  Continuity and derivative continuity are checked exactly, including
    against the zero extension at both ends.
    """

    breakpoints: tuple
    pieces: tuple

    def __post_init__(self):
        bps = tuple(Fraction(b) for b in self.breakpoints)
        pcs = tuple(tuple(Fraction(c) for c in p) for p in self.pieces)
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "pieces", pcs)
        if len(bps) < 2 or len(pcs) != len(bps) - 1:
            raise ValueError("need n breakpoints and n-1 pieces")
        if any(b1 >= b2 for b1, b2 in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly ascending")
        if any(len(p) > 3 for p in pcs):
            raise ValueError("piece degree must be at most 2")
        for k in range(1, len(bps) - 1):
            x = bps[k]
            if self._piece_val(pcs[k - 1], x) != self._piece_val(pcs[k], x):
                raise ValueError(f"discontinuous at breakpoint {x}")
            if self._piece_der(pcs[k - 1], x) != self._piece_der(pcs[k], x):
                raise ValueError(f"derivative jump at breakpoint {x}")
        for x, p in ((bps[0], pcs[0]), (bps[-1], pcs[-1])):
            if self._piece_val(p, x) != 0:
                raise ValueError("must vanish at the support boundary")
            if self._piece_der(p, x) != 0:
                raise ValueError("derivative must vanish at the support boundary")

    @staticmethod
    def _piece_val(p, x: Fraction) -> Fraction:
        v = Q(0)
        for c in reversed(p):
            v = v * x + c
        return v

    @staticmethod
    def _piece_der(p, x: Fraction) -> Fraction:
        v = Q(0)
        for k in range(len(p) - 1, 0, -1):
            v = v * x + k * p[k]
        return v

    def support(self) -> RationalInterval:
        return RationalInterval(self.breakpoints[0], self.breakpoints[-1])

    def evaluate(self, x: Fraction) -> Fraction:
        x = Fraction(x)
        bps = self.breakpoints
        if x <= bps[0] or x >= bps[-1]:
            return Q(0)
        for k in range(len(self.pieces)):
            if bps[k] <= x < bps[k + 1]:
                return self._piece_val(self.pieces[k], x)
        return Q(0)

    def derivative(self, x: Fraction) -> Fraction:
        x = Fraction(x)
        bps = self.breakpoints
        if x <= bps[0] or x >= bps[-1]:
            return Q(0)
        for k in range(len(self.pieces)):
            if bps[k] <= x < bps[k + 1]:
                return self._piece_der(self.pieces[k], x)
        return Q(0)

    def _ranges_on(self, lo: Fraction, hi: Fraction, der: bool) -> RationalInterval:
        """Exact range of the function (or its derivative) over [lo, hi]."""
        out = None
        bps = self.breakpoints
        if lo < bps[0] or hi > bps[-1]:
            out = RationalInterval.point(0)
        for k in range(len(self.pieces)):
            a, b = max(lo, bps[k]), min(hi, bps[k + 1])
            if a > b:
                continue
            p = self.pieces[k]
            vals = [self._piece_der(p, a), self._piece_der(p, b)] if der else [
                self._piece_val(p, a),
                self._piece_val(p, b),
            ]
            if not der and len(p) == 3 and p[2] != 0:
                vertex = -p[1] / (2 * p[2])
                if a <= vertex <= b:
                    vals.append(self._piece_val(p, vertex))
            piece_iv = RationalInterval(min(vals), max(vals))
            out = piece_iv if out is None else out.hull(piece_iv)
        return out if out is not None else RationalInterval.point(0)

    def range_on(self, lo: Fraction, hi: Fraction) -> RationalInterval:
        return self._ranges_on(Fraction(lo), Fraction(hi), der=False)

    def derivative_range_on(self, lo: Fraction, hi: Fraction) -> RationalInterval:
        return self._ranges_on(Fraction(lo), Fraction(hi), der=True)

    def derivative_lipschitz(self) -> Fraction:
        """Lipschitz constant of the (piecewise linear) derivative."""
        return max((abs(2 * p[2]) if len(p) == 3 else Q(0)) for p in self.pieces)

    def vanishes_on(self, iv: RationalInterval) -> bool:
        return self.range_on(iv.lo, iv.hi) == RationalInterval.point(0)

    def to_json(self) -> dict:
        return {
            "breakpoints": [rat_str(b) for b in self.breakpoints],
            "pieces": [[rat_str(c) for c in p] for p in self.pieces],
        }

    @classmethod
    def from_json(cls, data: dict) -> "PiecewisePolynomial":
        return cls(
            tuple(rat(b) for b in data["breakpoints"]),
            tuple(tuple(rat(c) for c in p) for p in data["pieces"]),
        )


def _parse_coeff(value) -> GaussianRational:
    """Parse a coefficient: rational string "p/q", complex "a+bi" / "-2i", or dict."""
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, dict):
        return GaussianRational.from_json(value)
    if isinstance(value, (int, Fraction)):
        return GaussianRational(rat(value))
    text = str(value).strip().replace(" ", "")
    if "i" not in text:
        return GaussianRational(rat(text))
    body = text[:-1] if text.endswith("i") else text
    # split a+bi / a-bi at the last sign that is not a leading sign or inside a fraction
    for pos in range(len(body) - 1, 0, -1):
        if body[pos] in "+-" and body[pos - 1] not in "+-/":
            re_part, im_part = body[:pos], body[pos:]
            im_part = im_part if im_part not in ("+", "-") else im_part + "1"
            return GaussianRational(rat(re_part), rat(im_part))
    if body in ("", "+", "-"):
        body += "1"
    return GaussianRational(Q(0), rat(body))


def _coeff_str(z: GaussianRational):
    if z.im == 0:
        return rat_str(z.re)
    return z.to_json()


@dataclass(frozen=True)
class ConformalMap:
    """One injective conformal contraction, with exact coefficients.

    Affine and Moebius kinds are stored through their coefficient row
    (a, b, c, d) meaning x -> (a x + b)/(c x + d); affine kinds have c = 0, d = 1.
    The perturbed kind is x -> a x + b + g(x) with g a PiecewisePolynomial.
    """

    kind: str
    a: GaussianRational
    b: GaussianRational
    c: GaussianRational = field(default_factory=lambda: gq(0))
    d: GaussianRational = field(default_factory=lambda: gq(1))
    perturbation: Optional[PiecewisePolynomial] = None

    # -- constructors --
    @classmethod
    def affine_1d(cls, a, b) -> "ConformalMap":
        return cls(AFFINE_1D, gq(rat(a)), gq(rat(b)))

    @classmethod
    def mobius_1d(cls, a, b, c, d) -> "ConformalMap":
        return cls(MOBIUS_1D, gq(rat(a)), gq(rat(b)), gq(rat(c)), gq(rat(d)))

    @classmethod
    def affine_complex(cls, a, b) -> "ConformalMap":
        return cls(AFFINE_COMPLEX, _parse_coeff(a), _parse_coeff(b))

    @classmethod
    def mobius_complex(cls, a, b, c, d) -> "ConformalMap":
        return cls(
            MOBIUS_COMPLEX, _parse_coeff(a), _parse_coeff(b), _parse_coeff(c), _parse_coeff(d)
        )

    @classmethod
    def perturbed_affine_1d(cls, a, b, g: PiecewisePolynomial) -> "ConformalMap":
        return cls(PERTURBED_AFFINE_1D, gq(rat(a)), gq(rat(b)), perturbation=g)

    def __post_init__(self):
        if self.kind not in (AFFINE_1D, MOBIUS_1D, AFFINE_COMPLEX, MOBIUS_COMPLEX, PERTURBED_AFFINE_1D):
            raise ValueError(f"unknown map kind {self.kind!r}")
        if self.kind == PERTURBED_AFFINE_1D and self.perturbation is None:
            raise ValueError("perturbed kind needs a perturbation")
        det = self.a * self.d - self.b * self.c
        if det.is_zero():
            raise ValueError("singular map coefficients")

    # -- basic structure --
    @property
    def one_dimensional(self) -> bool:
        return self.kind in _ONE_D_KINDS

    @property
    def is_similarity(self) -> bool:
        return self.kind in (AFFINE_1D, AFFINE_COMPLEX)

    @property
    def is_matrix_kind(self) -> bool:
        return self.kind != PERTURBED_AFFINE_1D

    def mobius_coefficients(self):
        return (self.a, self.b, self.c, self.d)

    def det(self) -> GaussianRational:
        return self.a * self.d - self.b * self.c

    def pole(self) -> Optional[GaussianRational]:
        if self.c.is_zero():
            return None
        return -self.d / self.c

    def inverse(self) -> "ConformalMap":
        if self.kind == PERTURBED_AFFINE_1D:
            raise ValueError("perturbed maps have no closed-form inverse")
        return ConformalMap(self.kind, self.d, -self.b, -self.c, self.a)

    # -- exact evaluation --
    def evaluate(self, x: Point) -> Point:
        if self.one_dimensional:
            xr = x.re if isinstance(x, GaussianRational) else Fraction(x)
            if isinstance(x, GaussianRational) and x.im != 0:
                raise ValueError("1-D map applied to a non-real point")
            if self.kind == AFFINE_1D:
                return self.a.re * xr + self.b.re
            if self.kind == PERTURBED_AFFINE_1D:
                return self.a.re * xr + self.b.re + self.perturbation.evaluate(xr)
            den = self.c.re * xr + self.d.re
            if den == 0:
                raise PoleCollisionError("evaluation at the pole")
            return (self.a.re * xr + self.b.re) / den
        z = x if isinstance(x, GaussianRational) else GaussianRational(Fraction(x))
        den = self.c * z + self.d
        if den.is_zero():
            raise PoleCollisionError("evaluation at the pole")
        return (self.a * z + self.b) / den

    def __call__(self, x: Point) -> Point:
        return self.evaluate(x)

    def derivative(self, x: Point) -> Point:
        if self.kind == AFFINE_1D:
            return self.a.re
        if self.kind == PERTURBED_AFFINE_1D:
            return self.a.re + self.perturbation.derivative(Fraction(x))
        if self.kind == MOBIUS_1D:
            xr = Fraction(x)
            den = self.c.re * xr + self.d.re
            if den == 0:
                raise PoleCollisionError("derivative at the pole")
            return self.det().re / (den * den)
        z = x if isinstance(x, GaussianRational) else GaussianRational(Fraction(x))
        if self.kind == AFFINE_COMPLEX:
            return self.a
        den = self.c * z + self.d
        if den.is_zero():
            raise PoleCollisionError("derivative at the pole")
        return self.det() / (den * den)

    def fixed_point_exact(self) -> Optional[Point]:
        """Exact fixed point when one exists in closed rational form."""
        if self.kind == AFFINE_1D:
            return self.b.re / (1 - self.a.re)
        if self.kind == AFFINE_COMPLEX:
            return self.b / (gq(1) - self.a)
        if self.kind == PERTURBED_AFFINE_1D:
            x0 = self.b.re / (1 - self.a.re)
            if self.evaluate(x0) == x0:
                return x0
            return None
        # Moebius: c x^2 + (d - a) x - b = 0
        if self.c.is_zero():
            if self.d == self.a:
                return None  # a translation after normalization: no fixed point
            return self.b / (self.d - self.a) if self.kind == MOBIUS_COMPLEX else (
                self.b.re / (self.d.re - self.a.re)
            )
        if self.kind == MOBIUS_1D:
            cc, dd, aa, bb = self.c.re, self.d.re, self.a.re, self.b.re
            disc = (dd - aa) ** 2 + 4 * cc * bb
            root = sqrt_exact(disc) if disc >= 0 else None
            if root is None:
                return None
            # the attracting fixed point is the one with |derivative| < 1
            for sgn in (1, -1):
                x = ((aa - dd) + sgn * root) / (2 * cc)
                den = cc * x + dd
                if den != 0 and abs(self.det().re) < den * den:
                    return x
            return None
        # complex Moebius: z = 0 is fixed when b = 0; return it only when it is
        # the attracting fixed point (derivative modulus below one there)
        if self.b.is_zero() and not self.d.is_zero():
            if self.det().abs_sq() < self.d.abs_sq() ** 2:
                return gq(0)
        return None

    # -- exact set images --
    def image_interval(self, iv: RationalInterval) -> RationalInterval:
        """Exact image of a closed interval (1-D kinds)."""
        if not self.one_dimensional:
            raise ValueError("interval image requires a 1-D map")
        if self.kind == MOBIUS_1D:
            p = self.pole()
            if p is not None and iv.contains(p.re):
                raise PoleCollisionError("pole inside the interval")
        lo_img = self.evaluate(iv.lo)
        hi_img = self.evaluate(iv.hi)
        if self.kind == PERTURBED_AFFINE_1D:
            sign = self.derivative_sign()
            lo_img, hi_img = (lo_img, hi_img) if sign > 0 else (hi_img, lo_img)
            return RationalInterval(lo_img, hi_img)
        return RationalInterval(min(lo_img, hi_img), max(lo_img, hi_img))

    def image_ball(self, ball: EnclosureBall) -> EnclosureBall:
        """Exact image of a closed ball (or 1-D interval stored as a ball)."""
        if ball.dimension == 1:
            if not self.one_dimensional:
                raise ValueError("dimension mismatch")
            img = self.image_interval(ball.as_interval())
            return EnclosureBall.from_interval(img.lo, img.hi)
        p = self.pole()
        if p is not None and ball.contains_point(p):
            raise PoleCollisionError("pole inside the ball")
        return mobius_ball_image_coeffs(self.a, self.b, self.c, self.d, ball)

    # -- certified derivative data --
    def derivative_sign(self) -> int:
        """Global derivative sign for 1-D kinds (constant away from any pole)."""
        if self.kind == AFFINE_1D:
            return 1 if self.a.re > 0 else -1
        if self.kind == MOBIUS_1D:
            # phi' = det/(cx+d)^2 keeps the determinant's sign off the pole
            return 1 if self.det().re > 0 else -1
        if self.kind == PERTURBED_AFFINE_1D:
            rng = self.perturbation.derivative_range_on(
                self.perturbation.breakpoints[0], self.perturbation.breakpoints[-1]
            )
            full = RationalInterval(self.a.re + rng.lo, self.a.re + rng.hi).hull(
                RationalInterval.point(self.a.re)
            )
            if full.strictly_positive():
                return 1
            if full.strictly_negative():
                return -1
            raise InvalidSystemError("perturbed map derivative is not sign-definite")
        raise ValueError("derivative_sign applies to 1-D kinds only")

    def derivative_abs_range_interval(self, iv: RationalInterval) -> RationalInterval:
        """Exact range of |phi'| over a closed interval (1-D kinds)."""
        if self.kind == AFFINE_1D:
            v = abs(self.a.re)
            return RationalInterval(v, v)
        if self.kind == PERTURBED_AFFINE_1D:
            rng = self.perturbation.derivative_range_on(iv.lo, iv.hi)
            return RationalInterval(self.a.re + rng.lo, self.a.re + rng.hi).abs()
        p = self.pole()
        if p is not None and iv.contains(p.re):
            raise PoleCollisionError("pole inside the interval")
        cc, dd = self.c.re, self.d.re
        den = RationalInterval.hull_of([(cc * iv.lo + dd) ** 2, (cc * iv.hi + dd) ** 2])
        return RationalInterval(abs(self.det().re) / den.hi, abs(self.det().re) / den.lo)

    def derivative_abs_sq_range_ball(self, ball: EnclosureBall) -> RationalInterval:
        """Certified range of |phi'|^2 over a closed planar ball."""
        if self.kind == AFFINE_COMPLEX:
            v = self.a.abs_sq()
            return RationalInterval(v, v)
        if self.kind != MOBIUS_COMPLEX:
            iv = ball.as_interval()
            r = self.derivative_abs_range_interval(iv)
            return r**2
        m = self.c * ball.center + self.d
        rho = self.c.abs_sq() * ball.radius_sq
        msq = m.abs_sq()
        if msq <= rho:
            raise PoleCollisionError("pole inside or on the ball")
        cross = sqrt_interval(msq * rho)
        den_sq = RationalInterval(msq + rho - 2 * cross.hi, msq + rho + 2 * cross.hi)
        if den_sq.lo <= 0:
            den_sq = RationalInterval(Q(0), den_sq.hi)
            raise PoleCollisionError("ball too close to the pole for a certified bound")
        det_sq = self.det().abs_sq()
        return RationalInterval(det_sq / den_sq.hi**2, det_sq / den_sq.lo**2)

    def derivative_abs_range_ball(self, ball: EnclosureBall) -> RationalInterval:
        """Certified range of |phi'| over a ball (exact endpoints when they are rational)."""
        if ball.dimension == 1:
            return self.derivative_abs_range_interval(ball.as_interval())
        sq = self.derivative_abs_sq_range_ball(ball)
        return RationalInterval(sqrt_interval(sq.lo).lo, sqrt_interval(sq.hi).hi)

    def hoelder_constants(self, domain: EnclosureBall):
        """(alpha, c) with |phi'(x) - phi'(y)| <= c |x-y|^alpha on the domain."""
        if self.is_similarity:
            return Q(1), Q(0)
        if self.kind == PERTURBED_AFFINE_1D:
            return Q(1), self.perturbation.derivative_lipschitz()
        # Moebius: |phi''| = 2|c||det| / |cx+d|^3
        if domain.dimension == 1:
            iv = domain.as_interval()
            cc, dd = self.c.re, self.d.re
            den_min = min(abs(cc * iv.lo + dd), abs(cc * iv.hi + dd))
            p = self.pole()
            if p is not None and iv.contains(p.re):
                raise PoleCollisionError("pole inside the domain")
            return Q(1), 2 * abs(self.c.re) * abs(self.det().re) / den_min**3
        m = self.c * domain.center + self.d
        rho = self.c.abs_sq() * domain.radius_sq
        msq = m.abs_sq()
        if msq <= rho:
            raise PoleCollisionError("pole inside or on the domain")
        # lower bound for |cz+d| over the ball
        den_lo = sqrt_interval(msq).lo - sqrt_interval(rho).hi
        if den_lo <= 0:
            raise PoleCollisionError("domain too close to the pole")
        c_abs_hi = sqrt_interval(self.c.abs_sq()).hi
        det_abs_hi = sqrt_interval(self.det().abs_sq()).hi
        return Q(1), 2 * c_abs_hi * det_abs_hi / den_lo**3

    def log_derivative_lipschitz(self, domain: EnclosureBall) -> Fraction:
        """Upper bound for the Lipschitz constant of log|phi'| on the domain."""
        if self.is_similarity:
            return Q(0)
        if self.kind == PERTURBED_AFFINE_1D:
            iv = domain.as_interval()
            lo = self.derivative_abs_range_interval(iv).lo
            return self.perturbation.derivative_lipschitz() / lo
        # Moebius: |grad log|phi'|| = 2 / |z - pole| <= 2|c| / |cz+d|
        if domain.dimension == 1:
            iv = domain.as_interval()
            cc, dd = self.c.re, self.d.re
            den_min = min(abs(cc * iv.lo + dd), abs(cc * iv.hi + dd))
            return 2 * abs(cc) / den_min
        m = self.c * domain.center + self.d
        rho = self.c.abs_sq() * domain.radius_sq
        den_lo = sqrt_interval(m.abs_sq()).lo - sqrt_interval(rho).hi
        if den_lo <= 0:
            raise PoleCollisionError("domain too close to the pole")
        return 2 * sqrt_interval(self.c.abs_sq()).hi / den_lo

    # -- serialization --
    def to_json(self) -> dict:
        out = {"kind": self.kind, "a": _coeff_str(self.a), "b": _coeff_str(self.b)}
        if not self.c.is_zero() or self.d != gq(1):
            out["c"] = _coeff_str(self.c)
            out["d"] = _coeff_str(self.d)
        if self.perturbation is not None:
            out["perturbation"] = self.perturbation.to_json()
        return out

    @classmethod
    def from_json(cls, data: dict) -> "ConformalMap":
        kind = data["kind"]
        a, b = _parse_coeff(data["a"]), _parse_coeff(data["b"])
        c = _parse_coeff(data.get("c", 0))
        d = _parse_coeff(data.get("d", 1))
        pert = (
            PiecewisePolynomial.from_json(data["perturbation"])
            if "perturbation" in data
            else None
        )
        return cls(kind, a, b, c, d, perturbation=pert)


@dataclass(frozen=True)
class DistortionData:
    """Certified distortion constants for a validated system.

    K is the two-sided comparability constant between |phi_w(x)-phi_w(y)| and
    ||phi_w'|| |x-y| over V; alpha/c are the Hoelder data of the single maps on V;
    `holder_composed_c` bounds the Hoelder constant of every composed derivative,
    c K^2 / (1 - gamma^alpha).  All values are certified upper bounds.
    """

    K: Fraction
    alpha: Fraction
    c: Fraction
    holder_composed_c: Fraction
    K0: Fraction
    gamma_max: Fraction
    min_deriv_lo: Fraction
    v_padding: Fraction

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("K must be at least 1")
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")
        if self.c < 0:
            raise ValueError("c must be nonnegative")

    def to_json(self) -> dict:
        return {
            "K": rat_str(self.K),
            "alpha": rat_str(self.alpha),
            "c": rat_str(self.c),
            "holder_composed_c": rat_str(self.holder_composed_c),
            "K0": rat_str(self.K0),
            "gamma_max": rat_str(self.gamma_max),
            "min_deriv_lo": rat_str(self.min_deriv_lo),
        }


def construct_invariant_domain(maps: Sequence[ConformalMap], omega: EnclosureBall):
    """Derive the convex invariant domain V from Omega, with its padding distance.

    Follows the classical construction: images of Omega are certified strictly inside
    Omega, the padding is a quarter of the certified distance from the image union
    to the complement, and V is the convex hull (1-D) or a certified enclosing
    ball (2-D) of the padded images.  Returns (V, d) and certifies
    phi_i(closure(V)) inside V for every map; failures name the offending index.
    """
    if len(maps) < 2:
        raise InvalidSystemError("a system needs at least N >= 2 maps")
    if omega.dimension == 1:
        om = omega.as_interval()
        images = []
        for idx, m in enumerate(maps):
            try:
                img = m.image_interval(om)
            except PoleCollisionError as e:
                raise InvalidSystemError(f"map {idx + 1}: {e}") from e
            if not (om.lo < img.lo and img.hi < om.hi):
                raise InvalidSystemError(
                    f"map {idx + 1} does not send closure(Omega) strictly inside Omega"
                )
            images.append(img)
        union = images[0]
        for img in images[1:]:
            union = union.hull(img)
        dist = min(union.lo - om.lo, om.hi - union.hi)
        d = dist / 4
        v = RationalInterval(union.lo - d, union.hi + d)
        v_ball = EnclosureBall.from_interval(v.lo, v.hi)
        for idx, m in enumerate(maps):
            img = m.image_interval(v)
            if not (v.lo < img.lo and img.hi < v.hi):
                raise InvalidSystemError(f"map {idx + 1} does not contract V (1-D)")
        return v_ball, d

    # planar case: V is a certified enclosing ball centered at Omega's center
    r_om_sq = omega.radius_sq
    reach_hi = Q(0)
    dist_lo = None
    r_om_hi = sqrt_interval(r_om_sq).hi
    r_om_lo = sqrt_interval(r_om_sq).lo
    for idx, m in enumerate(maps):
        try:
            img = m.image_ball(omega)
        except PoleCollisionError as e:
            raise InvalidSystemError(f"map {idx + 1}: {e}") from e
        sep = sqrt_interval((img.center - omega.center).abs_sq())
        ri = sqrt_interval(img.radius_sq)
        reach_hi = max(reach_hi, sep.hi + ri.hi)
        gap = r_om_lo - sep.hi - ri.hi
        if gap <= 0:
            raise InvalidSystemError(
                f"map {idx + 1} does not send closure(Omega) strictly inside Omega"
            )
        dist_lo = gap if dist_lo is None else min(dist_lo, gap)
    d = dist_lo / 4
    r_v = reach_hi + d
    if r_v >= r_om_lo:
        raise InvalidSystemError("padded image union does not fit inside Omega")
    v_ball = EnclosureBall(omega.center, r_v * r_v, dimension=2)
    for idx, m in enumerate(maps):
        img = m.image_ball(v_ball)
        if not v_ball.contains_ball(img, strict=True):
            raise InvalidSystemError(f"map {idx + 1} does not contract V (2-D)")
    return v_ball, d


def _distortion_data(maps, v_ball: EnclosureBall, d: Fraction) -> DistortionData:
    gamma_max = Q(0)
    min_lo = None
    alpha = Q(1)
    c_max = Q(0)
    c_log_max = Q(0)
    for m in maps:
        rng = m.derivative_abs_range_ball(v_ball)
        gamma_max = max(gamma_max, rng.hi)
        min_lo = rng.lo if min_lo is None else min(min_lo, rng.lo)
        a_m, c_m = m.hoelder_constants(v_ball)
        alpha = min(alpha, a_m)
        c_max = max(c_max, c_m)
        c_log_max = max(c_log_max, m.log_derivative_lipschitz(v_ball))
    if gamma_max >= 1:
        raise InvalidSystemError("contraction fails on V: sup |phi'| >= 1")
    if min_lo is None or min_lo <= 0:
        raise InvalidSystemError("derivative lower bound on V is not positive")

    diam_v = 2 * sqrt_interval(v_ball.radius_sq).hi
    if c_log_max == 0:
        k0 = Q(1)
    else:
        # telescoped ratio bound: log K0 <= c_log * diam(V) / (1 - gamma)
        exponent = c_log_max * diam_v / (1 - gamma_max)
        k0 = exp_interval(RationalInterval.point(exponent)).hi
    if v_ball.dimension == 1:
        k = k0  # mean-value argument on the interval V needs no further inflation
    else:
        k = k0 * max(Q(1), diam_v / d)
    if alpha == 1:
        denom_lo = 1 - gamma_max
    else:
        denom_lo = 1 - pow_interval(gamma_max, alpha).hi
    if denom_lo <= 0:
        raise InvalidSystemError("contraction too weak for a Hoelder composition bound")
    holder_c = c_max * k * k / denom_lo
    return DistortionData(
        K=k,
        alpha=alpha,
        c=c_max,
        holder_composed_c=holder_c,
        K0=k0,
        gamma_max=gamma_max,
        min_deriv_lo=min_lo,
        v_padding=d,
    )


class IFSystem:
    """A validated conformal iterated function system with certified caches."""

    def __init__(
        self,
        maps: Sequence[ConformalMap],
        omega: EnclosureBall,
        name: Optional[str] = None,
        word_cap: int = 32,
    ):
        if len(maps) < 2:
            raise InvalidSystemError("a system needs at least N >= 2 maps")
        dims = {1 if m.one_dimensional else 2 for m in maps}
        if len(dims) != 1:
            raise InvalidSystemError("maps mix dimensions")
        self.dimension = dims.pop()
        if omega.dimension != self.dimension:
            raise InvalidSystemError("Omega dimension does not match the maps")
        self.maps = tuple(maps)
        self.omega = omega
        self.name = name
        self.word_cap = word_cap
        self.v_domain, self.v_padding = construct_invariant_domain(self.maps, omega)
        self.distortion = _distortion_data(self.maps, self.v_domain, self.v_padding)
        self.is_similarity_system = all(m.is_similarity for m in self.maps)
        self.is_matrix_system = all(m.is_matrix_kind for m in self.maps)
        self._matrix_cache = {(): tuple(gq(x) for x in (1, 0, 0, 1))}
        self._encl_cache = {}
        self._deriv_cache = {}
        self._diam_cache = {}
        self._diam_hi_cache = {}
        self._f_hull = self._compute_f_hull() if self.dimension == 1 else None
        self._f_probes = self._compute_probe_points()

    # -- basic info --
    @property
    def n_maps(self) -> int:
        return len(self.maps)

    def _compute_f_hull(self) -> Optional[RationalInterval]:
        """Exact hull [min F, max F] for 1-D systems of increasing maps."""
        fixes = []
        for m in self.maps:
            try:
                if m.derivative_sign() != 1:
                    return None
            except (ValueError, InvalidSystemError):
                return None
            fx = m.fixed_point_exact()
            if fx is None:
                return None
            fixes.append(Fraction(fx))
        return RationalInterval(min(fixes), max(fixes))

    def _compute_probe_points(self):
        """A small exact sample of attractor points: map fixed points and their
        images under words of length up to two."""
        pts = []
        for m in self.maps:
            fx = m.fixed_point_exact()
            if fx is not None:
                pts.append(fx if isinstance(fx, GaussianRational) else Fraction(fx))
        if not pts:
            return tuple()
        extended = list(pts)
        for m in self.maps:
            for p in pts:
                img = m.evaluate(p)
                extended.append(img)
                for m2 in self.maps:
                    extended.append(m2.evaluate(img))
        seen, uniq = set(), []
        for p in extended:
            key = (p.re, p.im) if isinstance(p, GaussianRational) else (Fraction(p), None)
            if key not in seen:
                seen.add(key)
                uniq.append(p)
        return tuple(uniq)

    @property
    def f_hull(self) -> Optional[RationalInterval]:
        return self._f_hull

    def diam_f_bounds(self) -> RationalInterval:
        """Certified bounds for diam(F)."""
        if self._f_hull is not None:
            w = self._f_hull.width()
            return RationalInterval(w, w)
        lo = Q(0)
        pts = self._f_probes
        for p, q2 in itertools.combinations(pts, 2):
            dsq = (
                (p - q2).abs_sq()
                if isinstance(p, GaussianRational)
                else (Fraction(p) - Fraction(q2)) ** 2
            )
            lo = max(lo, sqrt_interval(dsq).lo)
        hi = 2 * sqrt_interval(self.v_domain.radius_sq).hi
        return RationalInterval(lo, hi)

    # -- exact composed evaluation --
    def evaluate_word(self, word: Word, x: Point) -> Point:
        for s in reversed(word.symbols):
            x = self.maps[s - 1].evaluate(x)
        return x

    def word_matrix(self, word: Word):
        """Composed Moebius coefficients for matrix-kind systems (cached)."""
        if not self.is_matrix_system:
            raise ValueError("matrix composition needs affine/Moebius maps only")
        key = word.symbols
        cached = self._matrix_cache.get(key)
        if cached is not None:
            return cached
        a1, b1, c1, d1 = self.word_matrix(Word(key[:-1], self.n_maps))
        m = self.maps[key[-1] - 1]
        a2, b2, c2, d2 = m.mobius_coefficients()
        out = (
            a1 * a2 + b1 * c2,
            a1 * b2 + b1 * d2,
            c1 * a2 + d1 * c2,
            c1 * b2 + d1 * d2,
        )
        self._matrix_cache[key] = out
        return out

    def word_map(self, word: Word) -> ConformalMap:
        """The composed map as a single ConformalMap (matrix kinds only)."""
        a, b, c, d = self.word_matrix(word)
        if self.dimension == 1:
            kind = MOBIUS_1D if not c.is_zero() else AFFINE_1D
            if kind == AFFINE_1D:
                return ConformalMap.affine_1d(a.re / d.re, b.re / d.re)
            return ConformalMap(MOBIUS_1D, a, b, c, d)
        kind = MOBIUS_COMPLEX if not c.is_zero() else AFFINE_COMPLEX
        if kind == AFFINE_COMPLEX:
            return ConformalMap(AFFINE_COMPLEX, a / d, b / d)
        return ConformalMap(MOBIUS_COMPLEX, a, b, c, d)

    # -- certified cylinder data --
    def cylinder_enclosure(self, word: Word) -> EnclosureBall:
        """Exact enclosure of phi_word(V)."""
        key = word.symbols
        cached = self._encl_cache.get(key)
        if cached is not None:
            return cached
        if not key:
            out = self.v_domain
        elif self.is_matrix_system:
            out = self.word_map(word).image_ball(self.v_domain)
        else:
            inner = self.cylinder_enclosure(Word(key[1:], self.n_maps))
            out = self.maps[key[0] - 1].image_ball(inner)
        self._encl_cache[key] = out
        return out

    def cylinder_deriv_bounds(self, word: Word) -> RationalInterval:
        """Certified [inf, sup] of |phi_word'| over V."""
        key = word.symbols
        cached = self._deriv_cache.get(key)
        if cached is not None:
            return cached
        if not key:
            out = RationalInterval.point(1)
        elif self.is_matrix_system:
            out = self.word_map(word).derivative_abs_range_ball(self.v_domain)
        else:
            # chain rule with cylinder-localized factor ranges
            inner_word = Word(key[1:], self.n_maps)
            inner = self.cylinder_deriv_bounds(inner_word)
            encl = self.cylinder_enclosure(inner_word)
            factor = self.maps[key[0] - 1].derivative_abs_range_ball(encl)
            out = factor * inner
        self._deriv_cache[key] = out
        return out

    def cylinder_diam_upper(self, word: Word) -> Fraction:
        """Certified upper bound for diam(phi_word(F)); cheap (no probe images)."""
        if self._f_hull is not None:
            return self.cylinder_diam_bounds(word).hi  # exact and already cheap
        key = word.symbols
        cached = self._diam_hi_cache.get(key)
        if cached is None:
            cached = 2 * sqrt_interval(self.cylinder_enclosure(word).radius_sq).hi
            self._diam_hi_cache[key] = cached
        return cached

    def cylinder_diam_bounds(self, word: Word) -> RationalInterval:
        """Certified [lower, upper] bounds for diam(phi_word(F))."""
        key = word.symbols
        cached = self._diam_cache.get(key)
        if cached is not None:
            return cached
        if self._f_hull is not None:
            a = self.evaluate_word(word, self._f_hull.lo)
            b = self.evaluate_word(word, self._f_hull.hi)
            w = abs(Fraction(b) - Fraction(a))
            out = RationalInterval(w, w)
        else:
            encl = self.cylinder_enclosure(word)
            hi = 2 * sqrt_interval(encl.radius_sq).hi
            lo = Q(0)
            for p, q2 in itertools.combinations(self._f_probes, 2):
                pi = self.evaluate_word(word, p)
                qi = self.evaluate_word(word, q2)
                dsq = (
                    (pi - qi).abs_sq()
                    if isinstance(pi, GaussianRational)
                    else (Fraction(pi) - Fraction(qi)) ** 2
                )
                lo = max(lo, sqrt_interval(dsq).lo)
            out = RationalInterval(lo, hi)
        self._diam_cache[key] = out
        return out

    def cylinder_f_interval(self, word: Word) -> RationalInterval:
        """Exact hull of phi_word(F) for 1-D systems with an exact attractor hull."""
        if self._f_hull is None:
            raise EnclosureError("no exact attractor hull for this system")
        a = Fraction(self.evaluate_word(word, self._f_hull.lo))
        b = Fraction(self.evaluate_word(word, self._f_hull.hi))
        return RationalInterval(min(a, b), max(a, b))

    # -- serialization --
    def to_json(self) -> dict:
        omega = (
            {"lo": rat_str(self.omega.as_interval().lo), "hi": rat_str(self.omega.as_interval().hi)}
            if self.dimension == 1
            else self.omega.to_json()
        )
        return {
            "dimension": self.dimension,
            "omega": omega,
            "maps": [m.to_json() for m in self.maps],
            **({"name": self.name} if self.name else {}),
        }

    @classmethod
    def from_json(cls, data: dict) -> "IFSystem":
        dim = int(data["dimension"])
        om = data["omega"]
        if dim == 1:
            omega = EnclosureBall.from_interval(rat(om["lo"]), rat(om["hi"]))
        else:
            omega = EnclosureBall(
                GaussianRational.from_json(om["center"]), rat(om["radius_sq"]), 2
            )
        maps = [ConformalMap.from_json(m) for m in data["maps"]]
        return cls(maps, omega, name=data.get("name"))

    def __repr__(self) -> str:
        return f"IFSystem({self.name or 'anonymous'}, N={self.n_maps}, dim={self.dimension})"


def evaluate(target, x: Point, word: Optional[Word] = None) -> Point:
    """Exact evaluation of a single map, or of phi_word for a system and word."""
    if isinstance(target, ConformalMap):
        return target.evaluate(x)
    if word is None:
        raise ValueError("system evaluation needs a word")
    return target.evaluate_word(word, x)


def derivative_bounds(system: IFSystem, word: Word) -> RationalInterval:
    """Certified enclosure of [inf_V |phi_w'|, sup_V |phi_w'|]."""
    return system.cylinder_deriv_bounds(word)


def holder_composed_check(system: IFSystem, word: Word, sample_pairs: int = 100) -> dict:
    """Empirical check of the composed-derivative Hoelder bound on sampled pairs.

    Samples deterministic rational pairs in V, computes the worst ratio
    |phi_w'(x) - phi_w'(y)| / (||phi_w'|| |x-y|^alpha), and compares it against
    the certified constant c K^2/(1 - gamma^alpha).  The ratio uses the certified
    lower bound of ||phi_w'|| so a reported pass is conservative.
    """
    dist = system.distortion
    if dist.alpha != 1:
        raise NotImplementedError("sampled check implemented for alpha = 1 kinds")
    if system.dimension == 1:
        v = system.v_domain.as_interval()
        span = v.width()
        points = [v.lo + span * Q(k, sample_pairs + 1) for k in range(1, sample_pairs + 1)]
    else:
        c0 = system.v_domain.center
        r_lo = sqrt_interval(system.v_domain.radius_sq).lo
        points = [
            c0 + GaussianRational(r_lo * Q(k, 2 * sample_pairs), r_lo * Q(k % 7 - 3, 7 * sample_pairs))
            for k in range(1, sample_pairs + 1)
        ]
    norm_lo = system.cylinder_deriv_bounds(word).lo
    worst = Q(0)
    for x, y in zip(points, points[1:]):
        dx = system_derivative_at(system, word, x)
        dy = system_derivative_at(system, word, y)
        if isinstance(dx, GaussianRational):
            num = sqrt_interval((dx - dy).abs_sq()).hi
            dxy = sqrt_interval((x - y).abs_sq()).lo
        else:
            num = abs(dx - dy)
            dxy = abs(Fraction(x) - Fraction(y))
        if dxy == 0:
            continue
        worst = max(worst, num / (norm_lo * dxy))
    bound = dist.holder_composed_c
    return {
        "word": word.display(),
        "max_ratio": worst,
        "certified_bound": bound,
        "passes": worst <= bound,
        "pairs": len(points) - 1,
    }


def system_derivative_at(system: IFSystem, word: Word, x: Point) -> Point:
    """Exact derivative of the composed map at a point (chain rule, right to left)."""
    if system.dimension == 1:
        acc = Q(1)
        xr = Fraction(x)
        for s in reversed(word.symbols):
            m = system.maps[s - 1]
            acc *= Fraction(m.derivative(xr))
            xr = Fraction(m.evaluate(xr))
        return acc
    acc = gq(1)
    z = x if isinstance(x, GaussianRational) else GaussianRational(Fraction(x))
    for s in reversed(word.symbols):
        m = system.maps[s - 1]
        acc = acc * m.derivative(z)
        z = m.evaluate(z)
    return acc
