from fractions import Fraction as Q

import pytest

from cil.examples import load_system
from cil.separation import (
    Magnification,
    WitnessScheduleInfeasible,
    amplify_wsc_failure,
    build_weak_tangent,
    choice_of_q,
    count_phi,
    equivalence_of_restrictions,
    exact_overlap_scan,
    ilc_search,
)
from cil.words import Word


def test_count_phi_cantor_basic():
    cant = load_system("cantor-1-3")
    sc = count_phi(cant, Q(0), Q(1, 9))
    assert sc.phi_count == 1 and sc.sigma_count == 1 and sc.ambiguous == 0
    assert [w.display() for w in sc.witnesses] == ["11"]


def test_count_phi_touching_ball_counts_closed_intersection():
    cant = load_system("cantor-1-3")
    # B(0, 2/9) touches the cylinder [2/9, 1/3] at a single attractor point
    sc = count_phi(cant, Q(0), Q(2, 9))
    assert sc.sigma_count == 2 and sc.ambiguous == 0


def test_count_phi_wsc_modes():
    wsc = load_system("wsc")
    cant = load_system("cantor-1-3")
    for n in range(1, 7):
        r = Q(1, 3**n)
        unres = count_phi(wsc, Q(0), r, mode="unrestricted")
        res = count_phi(wsc, Q(0), r, mode="restricted")
        plain = count_phi(cant, Q(0), r, mode="restricted")
        assert unres.phi_count >= n
        assert res.phi_count == plain.phi_count  # merged classes match the plain system
        assert res.phi_count <= unres.phi_count <= unres.sigma_count


def test_count_phi_planar_system():
    from cil.arith import gq

    sw = load_system("shortword")
    sc = count_phi(sw, gq(Q(95, 634)), Q(1, 5), max_len=64)
    assert sc.phi_count >= 1 and sc.phi_count == sc.sigma_count
    assert sc.ambiguous == 0 and sc.near_attractor
    far = count_phi(sw, gq(5, 5), Q(1, 5), max_len=64)
    assert far.phi_count == 0 and not far.near_attractor


def test_equivalence_of_restrictions():
    wsc = load_system("wsc")
    eq13 = equivalence_of_restrictions(wsc, Word((1,), 3), Word((3,), 3))
    assert eq13.value is True
    cant = load_system("cantor-1-3")
    eq12 = equivalence_of_restrictions(cant, Word((1,), 2), Word((2,), 2))
    assert eq12.value is False
    same = equivalence_of_restrictions(cant, Word((1, 2), 2), Word((1, 2), 2))
    assert same.value is True


def test_equivalence_is_an_equivalence_relation_on_certified_answers():
    wsc = load_system("wsc")
    words = [Word(s, 3) for s in ((1,), (3,), (2,), (1, 1), (1, 3), (3, 1), (3, 3), (2, 1))]
    val = {}
    for a in words:
        for b in words:
            val[(a, b)] = equivalence_of_restrictions(wsc, a, b).value
    for a in words:
        assert val[(a, a)] is True
        for b in words:
            assert val[(a, b)] == val[(b, a)]
            for c in words:
                if val[(a, b)] is True and val[(b, c)] is True:
                    assert val[(a, c)] is True


def test_exact_overlap_scan():
    tri = load_system("triple-overlap")
    pair = exact_overlap_scan(tri, 2)
    assert pair is not None and len(pair[0]) == 1 and len(pair[1]) == 1
    assert exact_overlap_scan(load_system("cantor-1-3"), 5) is None
    wsc_pair = exact_overlap_scan(load_system("wsc"), 1)
    assert wsc_pair == (Word((1,), 3), Word((3,), 3))


def test_ilc_search_cantor_floor():
    cant = load_system("cantor-1-3")
    rep = ilc_search(cant, max_len=6)
    assert rep.best is not None
    assert rep.floor == Q(1, 3)  # cross-length analytic floor dominates
    assert rep.best.delta.lo >= rep.floor


def test_ilc_search_beta_finds_near_identity_witness():
    beta = load_system("beta-near-overlap")
    rep = ilc_search(beta, max_len=14, target=Q(1, 20))
    assert rep.target_met
    assert rep.best.delta.hi == Q(139037, 4000000)
    assert len(rep.best.i) == 5
    # the witness difference really is the stated translation gap
    diff = abs(
        Q(beta.evaluate_word(rep.best.i, Q(0))) - Q(beta.evaluate_word(rep.best.j, Q(0)))
    )
    assert diff == rep.best.delta.hi * Q(1, 3**5)
    assert rep.exact_overlaps == ()


def test_ilc_search_monotone_in_max_len():
    beta = load_system("beta-near-overlap")
    prev = None
    for max_len in (4, 6, 8, 11):
        best = ilc_search(beta, max_len=max_len).best.delta.hi
        if prev is not None:
            assert best <= prev
        prev = best


def test_ilc_search_generic_path_on_perturbed_system():
    wsc = load_system("wsc")
    rep = ilc_search(wsc, max_len=4)
    # distinct-restriction cylinders never meet: no near-identity witness exists,
    # while the digit-swap overlaps are all detected
    assert rep.best is None
    assert len(rep.exact_overlaps) > 0
    assert not rep.partial
    deep = ilc_search(wsc, max_len=14)
    assert deep.partial  # the word budget caps the generic enumeration honestly


def test_choice_of_q():
    assert choice_of_q(load_system("beta-near-overlap")) == 2
    assert choice_of_q(load_system("cantor-1-3")) == 2


def test_amplify_beta():
    beta = load_system("beta-near-overlap")
    rep = amplify_wsc_failure(beta, 4)
    assert rep.q == 2 and rep.bound == 2
    assert rep.guarantee_met
    # independent re-measurement at the constructed location and scale
    sc = count_phi(beta, rep.x, rep.r, mode="restricted", max_len=len(rep.words[0]) + rep.q + 4)
    assert sc.phi_count >= rep.bound
    assert rep.count.phi_count == sc.phi_count


def test_amplify_n1_trivial():
    beta = load_system("beta-near-overlap")
    rep = amplify_wsc_failure(beta, 1)
    assert rep.count.phi_count >= 1


def test_amplify_infeasible_on_cantor():
    with pytest.raises(WitnessScheduleInfeasible):
        amplify_wsc_failure(load_system("cantor-1-3"), 4)


def test_magnification_exact():
    mag = Magnification(Q(1, 2), Q(1, 4))
    assert mag.apply(Q(3, 4)) == 1
    assert mag.apply(Q(1, 4)) == -1
    with pytest.raises(ValueError):
        Magnification(Q(0), Q(0))


def test_tangent_beta():
    beta = load_system("beta-near-overlap")
    t4 = build_weak_tangent(beta, 4)
    t8 = build_weak_tangent(beta, 8)
    for rep in (t4, t8):
        assert rep.normalized_points[0] == 1 and rep.normalized_points[-1] == -1
        assert all(a > b for a, b in zip(rep.points, rep.points[1:]))
        assert rep.max_gap <= rep.gap_bound()
        assert sum(rep.normalized_gaps) == 2
    assert t8.max_gap <= t4.max_gap


def test_tangent_points_lie_in_their_cylinders():
    beta = load_system("beta-near-overlap")
    rep = build_weak_tangent(beta, 3)
    for point, word in zip(rep.points, rep.words):
        hull = beta.cylinder_f_interval(word)
        assert hull.contains(point)


def test_tangent_infeasible_on_cantor():
    with pytest.raises(WitnessScheduleInfeasible):
        build_weak_tangent(load_system("cantor-1-3"), 4)


def test_tangent_strict_schedule_reports_infeasibility():
    beta = load_system("beta-near-overlap")
    with pytest.raises(WitnessScheduleInfeasible):
        build_weak_tangent(beta, 8, strict_schedule=True)
