from fractions import Fraction as Q

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cil.arith import (
    EnclosureBall,
    GaussianRational,
    RationalInterval,
    SqrtSum,
    circumcenter,
    gq,
    interval_ops,
    mobius_ball_image,
    rat,
    rat_str,
    sqrt_exact,
    sqrt_interval,
)
from cil.errors import DegenerateGeometryError, EnclosureError, PoleCollisionError
from cil.ifs import ConformalMap


rationals = st.fractions(min_value=-100, max_value=100, max_denominator=1000)


@st.composite
def intervals(draw):
    a, b = draw(rationals), draw(rationals)
    return RationalInterval(min(a, b), max(a, b))


def test_rational_serialization_round_trip():
    for x in (Q(0), Q(-9, 10), Q(901, 1000), Q(1604949, 3455617), Q(7)):
        assert rat(rat_str(x)) == x


@given(rationals)
def test_rational_round_trip_property(x):
    assert rat(rat_str(x)) == x


def test_gaussian_rational_field_ops():
    z = gq(Q(1, 2), Q(-3, 4))
    w = gq(Q(2, 3), Q(5))
    assert (z + w) - w == z
    assert (z * w) / w == z
    assert z * z.conjugate() == gq(z.abs_sq())
    assert GaussianRational.from_json(z.to_json()) == z
    with pytest.raises(ZeroDivisionError):
        z / gq(0)


def test_interval_ops_examples():
    assert interval_ops(RationalInterval(1, 2), RationalInterval(-1, 3), "*") == RationalInterval(-2, 6)
    assert interval_ops(RationalInterval(1, 1), RationalInterval(0, 0), "+") == RationalInterval(1, 1)
    assert interval_ops(RationalInterval(2, 3), RationalInterval.point(2), "power") == RationalInterval(4, 9)
    with pytest.raises(EnclosureError):
        interval_ops(RationalInterval(1, 2), RationalInterval(-1, 1), "/")


def test_interval_even_power_straddling_zero():
    assert RationalInterval(-2, 3) ** 2 == RationalInterval(0, 9)


@given(intervals(), intervals(), intervals(), intervals())
@settings(max_examples=200)
def test_inclusion_monotonicity(a, ap, b, bp):
    big_a = a.hull(ap)
    big_b = b.hull(bp)
    for op in ("+", "-", "*"):
        small = interval_ops(a, b, op)
        large = interval_ops(big_a, big_b, op)
        assert large.contains_interval(small)


@given(intervals(), intervals(), rationals, rationals)
@settings(max_examples=200)
def test_interval_ops_enclose_point_values(a, b, s, t):
    x = a.lo + (a.hi - a.lo) * (s - Q(-100)) / Q(200)
    y = b.lo + (b.hi - b.lo) * (t - Q(-100)) / Q(200)
    assert (a + b).contains(x + y)
    assert (a - b).contains(x - y)
    assert (a * b).contains(x * y)


def test_sqrt_exact_and_interval():
    assert sqrt_exact(Q(4, 9)) == Q(2, 3)
    assert sqrt_exact(Q(2)) is None
    iv = sqrt_interval(Q(2), Q(1, 10**20))
    assert iv.lo**2 <= 2 <= iv.hi**2
    assert iv.width() <= Q(1, 10**19)


def test_sqrt_sum_comparison():
    # sqrt(2) + sqrt(3) < sqrt(10), and equality of exact sums is decided exactly
    a = SqrtSum.of((Q(1), Q(2)), (Q(1), Q(3)))
    b = SqrtSum.of((Q(1), Q(10)))
    assert a.compare(b) == -1
    c = SqrtSum.of((Q(2), Q(9, 4)))  # = 3 exactly
    assert c.exact_value() == 3
    assert c.compare(SqrtSum.of((Q(3), Q(1)))) == 0


def test_circumcenter_examples():
    assert circumcenter(gq(0), gq(1), gq(0, 1)) == gq(Q(1, 2), Q(1, 2))
    assert circumcenter(gq(1), gq(0, 1), gq(-1)) == gq(0)
    with pytest.raises(DegenerateGeometryError):
        circumcenter(gq(0), gq(1), gq(2))
    with pytest.raises(DegenerateGeometryError):
        circumcenter(gq(0), gq(0), gq(1))


def test_circumcenter_equidistance_is_exact():
    p1, p2, p3 = gq(Q(1, 3), Q(2, 7)), gq(Q(-5, 2), Q(1)), gq(Q(0), Q(-4, 9))
    c = circumcenter(p1, p2, p3)
    d1, d2, d3 = ((p - c).abs_sq() for p in (p1, p2, p3))
    assert d1 == d2 == d3


def _phi3():
    return ConformalMap.mobius_complex(1, 0, 2, gq(0, -4))  # z / (2(z - 2i))


def test_mobius_ball_image_known_values():
    phi3 = _phi3()
    img = mobius_ball_image(phi3, EnclosureBall.from_center_radius(gq(0), Q(901, 1000), 2))
    assert img.center == gq(Q(-811801, 6376398))
    assert img.radius_sq == Q(901000, 3188199) ** 2
    img2 = mobius_ball_image(phi3, EnclosureBall.from_center_radius(gq(0), Q(100, 111), 2))
    assert img2.center == gq(Q(-1250, 9821))
    assert img2.radius_sq == Q(2775, 9821) ** 2


def test_identity_affine_ball_image():
    ident = ConformalMap.affine_complex(1, 0)
    ball = EnclosureBall.from_center_radius(gq(Q(1, 3), Q(-2, 5)), Q(7, 11), 2)
    assert mobius_ball_image(ident, ball) == ball


def test_mobius_ball_image_inverse_round_trip():
    phi3 = _phi3()
    ball = EnclosureBall.from_center_radius(gq(0), Q(901, 1000), 2)
    img = mobius_ball_image(phi3, ball)
    back = mobius_ball_image(phi3.inverse(), img)
    assert back.center == ball.center and back.radius_sq == ball.radius_sq


def test_mobius_pole_collision():
    phi3 = _phi3()
    with pytest.raises(PoleCollisionError):
        phi3.image_ball(EnclosureBall.from_center_radius(gq(0, 2), Q(1, 10), 2))


def test_pairwise_ball_span_requires_rational_maximum():
    from cil.arith import pairwise_ball_span

    balls = [
        EnclosureBall.from_center_radius(gq(0), Q(1, 4), 2),
        EnclosureBall.from_center_radius(gq(3), Q(1, 4), 2),
    ]
    span, pair = pairwise_ball_span(balls)
    assert span == Q(7, 2) and pair == (0, 1)
    skew = [
        EnclosureBall.from_center_radius(gq(0), Q(1, 4), 2),
        EnclosureBall.from_center_radius(gq(1, 1), Q(1, 4), 2),  # separation sqrt(2)
    ]
    with pytest.raises(EnclosureError):
        pairwise_ball_span(skew)


def test_outward_rounding_controls_denominators():
    iv = RationalInterval(Q(1, 3), Q(2, 3)).outward_round(8)
    assert iv.lo <= Q(1, 3) and iv.hi >= Q(2, 3)
    assert iv.lo.denominator <= 256 and iv.hi.denominator <= 256
