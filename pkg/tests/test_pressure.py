import math
from fractions import Fraction as Q

import pytest

from cil.enclosures import log_value
from cil.examples import load_system
from cil.pressure import pressure_bracket, pressure_root


def test_cantor_closed_form():
    cant = load_system("cantor-1-3")
    for s, n in ((Q(0), 3), (Q(1, 2), 4), (Q(2, 3), 6)):
        est = pressure_bracket(cant, s, n)
        truth = log_value(Q(2)).midpoint() - s * log_value(Q(3)).midpoint()
        assert est.lower.lo <= truth <= est.upper.hi
        assert est.upper.hi - est.lower.lo < Q(1, 10**20)


def test_triple_overlap_pressure_at_one():
    tri = load_system("triple-overlap")
    est = pressure_bracket(tri, Q(1), 3)
    assert est.lower.lo <= 0 <= est.upper.hi
    assert est.sign() is None  # genuinely zero: no certified sign


def test_upper_bound_monotone_along_depth_doubling():
    wsc = load_system("wsc")
    s = Q(1, 2)
    uppers = [pressure_bracket(wsc, s, n).upper.hi for n in (1, 2, 4)]
    assert uppers[0] >= uppers[1] >= uppers[2]


def test_pressure_strictly_decreasing_in_s():
    cant = load_system("cantor-1-3")
    grid = [Q(k, 8) for k in range(0, 9)]
    vals = [pressure_bracket(cant, s, 4) for s in grid]
    for a, b in zip(vals, vals[1:]):
        assert a.lower.lo > b.upper.hi or (a.upper.hi > b.upper.hi and a.lower.lo > b.lower.lo)


def test_root_brackets_closed_forms():
    expect = {
        "cantor-1-3": math.log(2) / math.log(3),
        "interval-1-2": 1.0,
        "triple-overlap": 1.0,
    }
    for name, value in expect.items():
        rb = pressure_root(load_system(name), tol=Q(1, 10**6))
        assert rb.certified
        assert rb.width <= Q(1, 10**6)
        assert abs(float(rb.midpoint()) - value) <= 1.0e-6


def test_root_sign_conditions_certified():
    cant = load_system("cantor-1-3")
    rb = pressure_root(cant, tol=Q(1, 10**5))
    assert pressure_bracket(cant, rb.s_lo, rb.depth).lower.lo > 0
    assert pressure_bracket(cant, rb.s_hi, rb.depth).upper.hi < 0


def test_duplicating_a_map_raises_the_root():
    cant_root = pressure_root(load_system("cantor-1-3"), tol=Q(1, 10**6))
    tri_root = pressure_root(load_system("triple-overlap"), tol=Q(1, 10**6))
    assert cant_root.s_hi < tri_root.s_lo


def test_input_validation():
    cant = load_system("cantor-1-3")
    with pytest.raises(ValueError):
        pressure_bracket(cant, Q(-1), 2)
    with pytest.raises(ValueError):
        pressure_root(cant, tol=Q(0))
