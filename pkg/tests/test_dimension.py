from fractions import Fraction as Q

import pytest

from cil.arith import EnclosureBall, RationalInterval
from cil.dimension import (
    ahlfors_check,
    box_dimension_estimate,
    content_estimate,
    covering_number,
    covering_envelope,
    quasi_constant,
    uniform_perfectness,
    window_multiplicity,
)
from cil.errors import EnclosureError
from cil.examples import load_system
from cil.ifs import ConformalMap, IFSystem
from cil.pressure import pressure_root

LOG2_OVER_LOG3 = 0.6309297535714574


def test_covering_numbers_cantor():
    cant = load_system("cantor-1-3")
    assert covering_number(cant, Q(1, 9)).n_r == 4
    assert covering_number(cant, Q(1, 2)).n_r == 1
    for n in range(1, 7):
        cc = covering_number(cant, Q(1, 3**n))
        assert cc.n_r == 2**n and cc.exact


def test_box_dimension_slopes():
    cant = load_system("cantor-1-3")
    fit = box_dimension_estimate(cant, [Q(1, 3**k) for k in range(2, 8)])
    assert abs(fit.slope - LOG2_OVER_LOG3) < 1e-9  # counts are exact powers
    interval = load_system("interval-1-2")
    fit2 = box_dimension_estimate(interval, [Q(1, 2**k) for k in range(2, 8)])
    assert abs(fit2.slope - 1.0) < 1e-9
    tri = load_system("triple-overlap")
    fit3 = box_dimension_estimate(tri, [Q(1, 3**k) for k in range(3, 8)])
    assert 0.60 <= fit3.slope <= 0.66


def test_window_multiplicity():
    hulls = [RationalInterval(Q(0), Q(1, 9)), RationalInterval(Q(2, 9), Q(3, 9))]
    assert window_multiplicity(hulls, Q(1, 9)) == 2  # an interval can bridge the gap
    assert window_multiplicity(hulls, Q(1, 100)) == 1


def test_content_estimates_cantor():
    cant = load_system("cantor-1-3")
    s = pressure_root(cant, tol=Q(1, 10**6)).midpoint()
    plain = content_estimate(cant, s, delta=None)
    assert plain.upper <= 1
    assert 0 < plain.lower <= plain.upper
    for n in (2, 4):
        capped = content_estimate(cant, s, delta=Q(1, 3**n))
        assert capped.upper <= Q(1) + Q(1, 10**4)
        assert capped.upper >= plain.upper  # finer caps can only raise the infimum
    off = content_estimate(
        cant, s, delta=None, subset=EnclosureBall.from_interval(Q(2), Q(3))
    )
    assert off.upper == 0 and off.lower == 0


def test_ahlfors_cantor_bracket_contains_one():
    cant = load_system("cantor-1-3")
    s = pressure_root(cant, tol=Q(1, 10**6)).midpoint()
    rep = ahlfors_check(cant, s, samples=100, r_schedule=[Q(1, 9), Q(1, 27)], sample_depth=6)
    zero_ratios = [iv for x, _, iv in rep.ratios if x == 0]
    assert zero_ratios and all(iv.lo <= 1 <= iv.hi * Q(101, 100) for iv in zero_ratios)
    assert rep.envelope.lo >= Q(1, 4) and rep.envelope.hi <= 4


def test_content_upper_ordered_across_caps():
    cant = load_system("cantor-1-3")
    s = pressure_root(cant, tol=Q(1, 10**6)).midpoint()
    for subset in (None, EnclosureBall.from_interval(Q(0), Q(1, 2))):
        u_inf = content_estimate(cant, s, None, subset).upper
        for n in (2, 4, 6):
            assert content_estimate(cant, s, Q(1, 3**n), subset).upper >= u_inf


def test_ahlfors_seed_independence_smoke():
    cant = load_system("cantor-1-3")
    s = pressure_root(cant, tol=Q(1, 10**6)).midpoint()
    schedule = [Q(1, 9), Q(1, 27), Q(1, 81)]
    rep0 = ahlfors_check(cant, s, samples=30, r_schedule=schedule, sample_depth=6)
    rep1 = ahlfors_check(
        cant, s, samples=30, r_schedule=schedule, sample_depth=6, seed_point=Q(1)
    )
    for rep in (rep0, rep1):
        assert rep.envelope.lo >= Q(1, 4) and rep.envelope.hi <= 4


def test_ahlfors_triple_overlap_envelope_degrades():
    tri = load_system("triple-overlap")
    spreads = {}
    for depth in (4, 8):
        rep = ahlfors_check(tri, Q(1), samples=50, r_schedule=[Q(1, 3**depth)], sample_depth=depth)
        spreads[depth] = rep.degradation()
    assert spreads[8] >= 2 * spreads[4]


def test_uniform_perfectness():
    cant = load_system("cantor-1-3")
    rep = uniform_perfectness(cant, samples=12, r_schedule=[Q(1, 3**k) for k in range(1, 9)])
    assert rep.all_witnessed and rep.H <= 4
    interval = load_system("interval-1-2")
    rep2 = uniform_perfectness(interval, samples=12, r_schedule=[Q(1, 2**k) for k in range(1, 8)])
    assert rep2.all_witnessed and rep2.H <= 2


def test_uniform_perfectness_degenerate_system():
    # both maps fix the origin: the attractor is a single point
    maps = [ConformalMap.affine_1d(Q(1, 3), 0), ConformalMap.affine_1d(Q(1, 2), 0)]
    system = IFSystem(maps, EnclosureBall.from_interval(-1, 1))
    with pytest.raises(EnclosureError):
        uniform_perfectness(system, samples=4, r_schedule=[Q(1, 4)])


def test_quasi_constant_cantor():
    cant = load_system("cantor-1-3")
    qc = quasi_constant(cant, r_schedule=[Q(1, 9), Q(1, 27)])
    assert qc.D == 3
    assert qc.witnesses and all(w["ratios_inside"] for w in qc.witnesses)


def test_quasi_constant_shortword_finite():
    sw = load_system("shortword")
    qc = quasi_constant(sw)
    assert qc.D >= 1


def test_covering_envelope_contains_counts():
    cant = load_system("cantor-1-3")
    rb = pressure_root(cant, tol=Q(1, 10**6))
    s_bracket = RationalInterval(rb.s_lo, rb.s_hi)
    content = content_estimate(cant, rb.midpoint(), delta=None)
    for n in range(2, 7):
        r = Q(1, 3**n)
        env = covering_envelope(cant, s_bracket, content.lower, r)
        n_r = covering_number(cant, r).n_r
        assert env.lo <= n_r <= env.hi
