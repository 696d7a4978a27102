from fractions import Fraction as Q

import pytest

from cil.arith import EnclosureBall, RationalInterval
from cil.attractor import (
    NaturalMeasure,
    cut_masses_total,
    cylinder,
    measure_of_ball,
    sample_attractor,
)
from cil.errors import DepthCapError
from cil.examples import load_system
from cil.words import Word, all_words, generation_cut


def test_cylinder_cantor_example():
    cant = load_system("cantor-1-3")
    cyl = cylinder(cant, Word((2, 1), 2))
    assert cant.cylinder_f_interval(Word((2, 1), 2)) == RationalInterval(Q(2, 3), Q(7, 9))
    assert cyl.diam == RationalInterval(Q(1, 9), Q(1, 9))
    assert cyl.deriv == RationalInterval(Q(1, 9), Q(1, 9))


def test_cylinder_wsc_diameter_is_power_of_three():
    wsc = load_system("wsc")
    for word in (Word((3,), 3), Word((1, 3), 3), Word((3, 2, 3), 3)):
        d = wsc.cylinder_diam_bounds(word)
        assert d == RationalInterval(Q(1, 3 ** len(word)), Q(1, 3 ** len(word)))


def test_cylinder_shortword_diameter_lower_bound():
    sw = load_system("shortword")
    cyl = cylinder(sw, Word((3, 2), 3))
    assert cyl.diam.lo >= Q(1604949, 3455617)
    assert cyl.diam.hi >= cyl.diam.lo


def test_cylinder_nesting():
    for name in ("cantor-1-3", "wsc"):
        system = load_system(name)
        for word in all_words(system.n_maps, 2):
            outer = system.cylinder_f_interval(word.prefix(1))
            inner = system.cylinder_f_interval(word)
            assert outer.contains_interval(inner)
    sw = load_system("shortword")
    for word in all_words(3, 2):
        outer = sw.cylinder_enclosure(word.prefix(1))
        inner = sw.cylinder_enclosure(word)
        assert outer.contains_ball(inner, strict=True)


def test_cylinder_depth_cap():
    cant = load_system("cantor-1-3")
    with pytest.raises(DepthCapError):
        cylinder(cant, Word((1,) * 40, 2))


def test_sample_attractor_cantor():
    cant = load_system("cantor-1-3")
    s1 = sample_attractor(cant, 1)
    assert list(s1.points) == [Q(0), Q(2, 3)]
    s2 = sample_attractor(cant, 2)
    assert list(s2.points) == [Q(0), Q(2, 9), Q(2, 3), Q(8, 9)]
    assert s2.seed == Q(0)


def test_sample_attractor_wsc_collapses():
    wsc = load_system("wsc")
    s2 = sample_attractor(wsc, 2)
    # nine words evaluate to only four distinct points: maps 1 and 3 agree on F
    assert list(s2.points) == [Q(0), Q(2, 9), Q(2, 3), Q(8, 9)]


def test_sample_refinement():
    cant = load_system("cantor-1-3")
    s2, s3 = sample_attractor(cant, 2), sample_attractor(cant, 3)
    diam3 = Q(1, 27)
    for p in s2.points:
        assert any(abs(p - q) <= diam3 for q in s3.points)


def test_natural_measure_weights():
    mu = NaturalMeasure.uniform(2)
    assert mu.mass(Word((1, 2, 1), 2)) == Q(1, 8)
    with pytest.raises(ValueError):
        NaturalMeasure((Q(1, 2), Q(1, 3)))
    tri = load_system("triple-overlap")
    mu3 = NaturalMeasure.s_conformal(tri, Q(1))
    assert mu3.weights == (Q(1, 3), Q(1, 3), Q(1, 3))


def test_measure_additivity_on_cuts():
    cant = load_system("cantor-1-3")
    mu = NaturalMeasure.uniform(2)
    for scale in (Q(1, 3), Q(1, 27), Q(1, 100)):
        cut = generation_cut(cant, scale)
        assert cut_masses_total(mu, cant, list(cut)) == 1


def test_measure_of_ball_cantor():
    cant = load_system("cantor-1-3")
    mu = NaturalMeasure.uniform(2)
    for n in (1, 2, 4):
        ball = EnclosureBall.from_interval(-Q(1, 3**n), Q(1, 3**n))
        bracket = measure_of_ball(mu, cant, ball, depth=n)
        assert bracket == RationalInterval(Q(1, 2**n), Q(1, 2**n))
    far = EnclosureBall.from_interval(5, 6)
    assert measure_of_ball(mu, cant, far, depth=3) == RationalInterval(0, 0)
    everything = EnclosureBall.from_interval(-10, 10)
    assert measure_of_ball(mu, cant, everything, depth=3) == RationalInterval(1, 1)


def test_measure_bracket_tightens_with_depth():
    cant = load_system("cantor-1-3")
    mu = NaturalMeasure.uniform(2)
    ball = EnclosureBall.from_interval(Q(1, 10), Q(1, 2))
    b2 = measure_of_ball(mu, cant, ball, depth=2)
    b5 = measure_of_ball(mu, cant, ball, depth=5)
    assert b2.contains_interval(b5)
