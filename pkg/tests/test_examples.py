from fractions import Fraction as Q

import pytest

from cil.examples import (
    REGISTRY,
    list_systems,
    load_system,
    verify_named_system,
    verify_shortword_example,
    verify_wsc_example,
    wsc_bump,
)
from cil.ifs import IFSystem, PiecewisePolynomial


def test_registry_contents():
    names = {entry["name"] for entry in list_systems()}
    assert {"cantor-1-3", "interval-1-2", "triple-overlap", "beta-near-overlap",
            "shortword", "wsc"} <= names
    with pytest.raises(KeyError):
        load_system("no-such-system")


def test_registry_round_trip_exact_coefficients():
    for name in REGISTRY:
        system = load_system(name)
        clone = IFSystem.from_json(system.to_json())
        for m1, m2 in zip(system.maps, clone.maps):
            assert m1.mobius_coefficients() == m2.mobius_coefficients()
            assert m1.perturbation == m2.perturbation


def test_bump_value_at_first_breakpoint_from_both_branches():
    g = wsc_bump()
    left = PiecewisePolynomial._piece_val(g.pieces[0], Q(5, 12))
    right = PiecewisePolynomial._piece_val(g.pieces[1], Q(5, 12))
    assert left == right == Q(1, 2880)


def test_shortword_verification():
    report = verify_shortword_example()
    assert report["passed"]
    by_id = {c["id"]: c for c in report["claims"]}
    assert by_id["b"]["gap"] == "1604949/3455617"
    assert by_id["d"]["span"] == "1604949/3455617"
    assert set(by_id["d"]["maximizing_pair"]) == {"321", "32221"}
    assert by_id["e"]["passed"]


def test_wsc_verification():
    report = verify_wsc_example(8)
    assert report["passed"]
    by_id = {c["id"]: c for c in report["claims"]}
    assert by_id["a"]["sup_g"] == "1/1440"
    assert by_id["a"]["breakpoint_value"] == "1/2880"
    assert by_id["b"]["passed"]
    assert by_id["c"]["passed"]
    counts = by_id["d"]["unrestricted"]
    assert all(c >= n for n, c in enumerate(counts, start=1))
    assert by_id["d"]["restricted_max"] <= 4


def test_verify_dispatch():
    assert verify_named_system("shortword")["passed"]
    with pytest.raises(KeyError):
        verify_named_system("cantor-1-3")
