"""Built-in named systems and bit-exact verification of the two worked examples.

The registry holds the standard pedagogical systems backing the acceptance
suite (middle-thirds Cantor set, the full interval, a duplicated-map overlap
system, and a rational near-overlap surrogate), the planar three-map system
whose short-word diameter coincidence is certified exactly, and the perturbed
Cantor system separating the two separation-count flavors.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional

from .arith import EnclosureBall, Q, gq, pairwise_ball_span, rat_str, sqrt_exact
from .ifs import ConformalMap, IFSystem, PiecewisePolynomial
from .separation import count_phi, equivalence_of_restrictions
from .words import Word


@dataclass(frozen=True)
class NamedSystem:
    name: str
    description: str
    factory: Callable[[], IFSystem]
    expected_claims: tuple = ()

    def build(self) -> IFSystem:
        system = self.factory()
        return system


def _cantor() -> IFSystem:
    maps = [ConformalMap.affine_1d(Q(1, 3), 0), ConformalMap.affine_1d(Q(1, 3), Q(2, 3))]
    return IFSystem(maps, EnclosureBall.from_interval(Q(-1, 4), Q(5, 4)), name="cantor-1-3")


def _interval() -> IFSystem:
    maps = [ConformalMap.affine_1d(Q(1, 2), 0), ConformalMap.affine_1d(Q(1, 2), Q(1, 2))]
    return IFSystem(maps, EnclosureBall.from_interval(Q(-1, 4), Q(5, 4)), name="interval-1-2")


def _triple_overlap() -> IFSystem:
    maps = [
        ConformalMap.affine_1d(Q(1, 3), 0),
        ConformalMap.affine_1d(Q(1, 3), 0),
        ConformalMap.affine_1d(Q(1, 3), Q(2, 3)),
    ]
    return IFSystem(maps, EnclosureBall.from_interval(Q(-1, 4), Q(5, 4)), name="triple-overlap")


BETA = Q(1414213, 4000000)  # rational stand-in near sqrt(2)/4, forcing near-coincidences


def _beta_near_overlap() -> IFSystem:
    maps = [
        ConformalMap.affine_1d(Q(1, 3), 0),
        ConformalMap.affine_1d(Q(1, 3), BETA),
        ConformalMap.affine_1d(Q(1, 3), Q(2, 3)),
    ]
    return IFSystem(maps, EnclosureBall.from_interval(Q(-1, 4), Q(3, 2)), name="beta-near-overlap")


def _shortword() -> IFSystem:
    maps = [
        ConformalMap.affine_complex(Q(1, 1000), Q(-9, 10)),
        ConformalMap.affine_complex(gq(0, Q(19, 20)), 0),
        ConformalMap.mobius_complex(1, 0, 2, gq(0, -4)),  # z / (2(z - 2i))
    ]
    omega = EnclosureBall.from_center_radius(gq(0), Q(901, 1000), 2)
    return IFSystem(maps, omega, name="shortword")


def wsc_bump() -> PiecewisePolynomial:
    """The compact C^1 bump supported on (1/3, 2/3) used by the perturbed system."""
    return PiecewisePolynomial(
        breakpoints=(Q(1, 3), Q(5, 12), Q(7, 12), Q(2, 3)),
        pieces=(
            (Q(1, 180), Q(-6, 180), Q(9, 180)),
            (Q(-17, 1440), Q(9, 180), Q(-9, 180)),
            (Q(8, 360), Q(-8, 120), Q(6, 120)),
        ),
    )


def _wsc() -> IFSystem:
    maps = [
        ConformalMap.affine_1d(Q(1, 3), 0),
        ConformalMap.affine_1d(Q(1, 3), Q(2, 3)),
        ConformalMap.perturbed_affine_1d(Q(1, 3), 0, wsc_bump()),
    ]
    return IFSystem(maps, EnclosureBall.from_interval(Q(-1, 4), Q(5, 4)), name="wsc")


REGISTRY: Dict[str, NamedSystem] = {
    ns.name: ns
    for ns in [
        NamedSystem("cantor-1-3", "middle-thirds Cantor set {x/3, x/3 + 2/3}", _cantor),
        NamedSystem("interval-1-2", "the unit interval {x/2, x/2 + 1/2}", _interval),
        NamedSystem(
            "triple-overlap",
            "Cantor set with a duplicated first map: exact overlap at length 1",
            _triple_overlap,
        ),
        NamedSystem(
            "beta-near-overlap",
            "three translations with an irrational-surrogate middle offset",
            _beta_near_overlap,
        ),
        NamedSystem("shortword", "planar system with diam(phi_32 F) = diam(phi_3 F)", _shortword),
        NamedSystem("wsc", "perturbed Cantor system separating the two count flavors", _wsc),
    ]
}


def list_systems() -> List[dict]:
    return [{"name": ns.name, "description": ns.description} for ns in REGISTRY.values()]


def load_system(name: str) -> IFSystem:
    if name not in REGISTRY:
        raise KeyError(f"unknown named system {name!r}; known: {sorted(REGISTRY)}")
    return REGISTRY[name].build()


# ---------------------------------------------------------------------------
# verification: the planar short-word system
# ---------------------------------------------------------------------------

def _claim(claims: list, cid: str, description: str, passed: bool, **detail):
    claims.append({"id": cid, "description": description, "passed": bool(passed), **detail})


GAMMA_WORDS = ("31", "33", "321", "323", "3221", "3223", "32221", "32222", "32223")
SPAN_TARGET = Q(1604949, 3455617)


def verify_shortword_example() -> dict:
    """Certify the planar system's exact ball data and the diameter coincidence.

    All sub-claims are decided in exact rational / Gaussian-rational arithmetic;
    square-root comparisons in the nine-ball cover are settled by certified
    enclosure refinement, with the maximizing pair exactly rational.
    """
    claims: list = []
    system = load_system("shortword")
    phi1, phi2, phi3 = system.maps
    omega = system.omega

    img1 = phi1.image_ball(omega)
    img2 = phi2.image_ball(omega)
    img3 = phi3.image_ball(omega)
    _claim(
        claims,
        "a1",
        "images of Omega are the stated balls",
        img1.center == gq(Q(-9, 10))
        and img1.radius_sq == Q(901, 10**6) ** 2
        and img2.center == gq(0)
        and img2.radius_sq == (Q(19, 20) * Q(901, 1000)) ** 2
        and img3.center == gq(Q(-811801, 6376398))
        and img3.radius_sq == Q(901000, 3188199) ** 2,
        c3=rat_str(Q(-811801, 6376398)),
        r3=rat_str(Q(901000, 3188199)),
    )
    _claim(
        claims,
        "a2",
        "closures of the three images lie inside Omega",
        all(omega.contains_ball(img, strict=True) for img in (img1, img2, img3)),
    )
    contraction = all(
        m.derivative_abs_sq_range_ball(omega).hi < 1 for m in system.maps
    )
    _claim(claims, "a3", "derivative moduli stay below one on Omega", contraction)

    w = phi1.fixed_point_exact()
    q1 = system.evaluate_word(Word((3, 2), 3), w)
    q2 = system.evaluate_word(Word((3, 2, 2, 2), 3), w)
    gap_sq = (q1 - q2).abs_sq()
    _claim(
        claims,
        "b",
        "fixed point and the two probe values match the stated rationals",
        w == gq(Q(-100, 111))
        and q1 == gq(Q(95, 634))
        and q2 == gq(Q(-6859, 21802))
        and gap_sq == SPAN_TARGET**2,
        w=rat_str(Q(-100, 111)),
        q1=rat_str(Q(95, 634)),
        q2=rat_str(Q(-6859, 21802)),
        gap=rat_str(SPAN_TARGET),
    )

    big = EnclosureBall.from_center_radius(gq(0), Q(100, 111), 2)
    imgs = [m.image_ball(big) for m in system.maps]
    stated = [
        (gq(Q(-9, 10)), Q(1, 1110) ** 2),
        (gq(0), Q(95, 111) ** 2),
        (gq(Q(-1250, 9821)), Q(2775, 9821) ** 2),
    ]
    _claim(
        claims,
        "c",
        "the three images of B(0, 100/111) are the stated balls and sit inside it,"
        " so the attractor lies in B(0, 100/111)",
        all(
            img.center == ctr and img.radius_sq == rsq and big.contains_ball(img)
            for img, (ctr, rsq) in zip(imgs, stated)
        ),
    )

    balls = []
    for text in GAMMA_WORDS:
        word = Word.parse(text, 3)
        ball = big
        for s in reversed(word.symbols):
            ball = system.maps[s - 1].image_ball(ball)
        balls.append(ball)
    span, (bi, bj) = pairwise_ball_span(balls)
    _claim(
        claims,
        "d",
        "nine-ball cover span equals the stated rational exactly",
        span == SPAN_TARGET,
        span=rat_str(span),
        maximizing_pair=[GAMMA_WORDS[bi], GAMMA_WORDS[bj]],
    )

    # lower bound (b) <= diam(phi_32 F) <= diam(phi_3 F) <= cover span (d): equality
    _claim(
        claims,
        "e",
        "diam(phi_32(F)) = diam(phi_3(F)) = 1604949/3455617",
        span == SPAN_TARGET and gap_sq == SPAN_TARGET**2,
        value=rat_str(SPAN_TARGET),
    )
    return {
        "example": "shortword",
        "passed": all(c["passed"] for c in claims),
        "claims": claims,
    }


# ---------------------------------------------------------------------------
# verification: the perturbed Cantor system
# ---------------------------------------------------------------------------

def _quadratic_roots_in(piece, lo: Fraction, hi: Fraction) -> Optional[List[Fraction]]:
    """Rational roots of a degree <= 2 piece inside [lo, hi]; None when irrational
    roots might lie inside (decided by exact sign checks on the discriminant)."""
    c0, c1, c2 = (list(piece) + [Q(0), Q(0)])[:3]
    if c2 == 0:
        if c1 == 0:
            return [] if c0 != 0 else None
        root = -c0 / c1
        return [root] if lo <= root <= hi else []
    disc = c1 * c1 - 4 * c0 * c2
    if disc < 0:
        return []
    root_disc = sqrt_exact(disc)
    if root_disc is None:
        # irrational roots: certify their position against [lo, hi] by sign tests
        vals = [c0 + c1 * x + c2 * x * x for x in (lo, hi)]
        vertex = -c1 / (2 * c2)
        if vals[0] * vals[1] < 0:
            return None  # one root strictly inside
        if lo <= vertex <= hi and (c0 + c1 * vertex + c2 * vertex**2) * vals[0] < 0:
            return None  # two roots inside
        return []
    return [
        r
        for r in ((-c1 + root_disc) / (2 * c2), (-c1 - root_disc) / (2 * c2))
        if lo <= r <= hi
    ]


def verify_wsc_example(n_max: int = 10) -> dict:
    """Certify the perturbed system's bump data, its exact overlap, the closed
    form of the one-bump words, and the unbounded/ bounded count dichotomy."""
    claims: list = []
    system = load_system("wsc")
    g = wsc_bump()

    # (a) C^1 regularity is enforced at construction; certify positivity, the
    # exact extrema of g, and the derivative sign pattern.
    support = g.support()
    zero_locs: List[Fraction] = []
    interior_ok = True
    bps = g.breakpoints
    for k, piece in enumerate(g.pieces):
        roots = _quadratic_roots_in(piece, bps[k], bps[k + 1])
        if roots is None:
            interior_ok = False
            break
        zero_locs.extend(roots)
    positivity = interior_ok and all(z in (support.lo, support.hi) for z in zero_locs)
    g_range = g.range_on(support.lo, support.hi)
    der_up = g.derivative_range_on(Q(1, 3), Q(1, 2))
    der_down = g.derivative_range_on(Q(1, 2), Q(2, 3))
    _claim(
        claims,
        "a",
        "bump is C^1, positive on its open support, with derivative in (0, 1/120]"
        " rising then [-1/120, 0) falling",
        positivity
        and g_range.lo == 0
        and g_range.hi == Q(1, 1440)
        and der_up.lo == 0
        and der_up.hi == Q(1, 120)
        and der_down.lo == Q(-1, 120)
        and der_down.hi == 0,
        sup_g=rat_str(g_range.hi),
        sup_location=rat_str(Q(1, 2)),
        breakpoint_value=rat_str(g.evaluate(Q(5, 12))),
        breakpoint_value_matches_both_branches=(
            PiecewisePolynomial._piece_val(g.pieces[0], Q(5, 12))
            == PiecewisePolynomial._piece_val(g.pieces[1], Q(5, 12))
            == Q(1, 2880)
        ),
    )

    # (b) the perturbed map agrees with the plain contraction on the attractor
    eq = equivalence_of_restrictions(system, Word((1,), 3), Word((3,), 3))
    _claim(
        claims,
        "b",
        "maps 1 and 3 restrict to the same map on the attractor",
        eq.value is True,
        provenance=eq.provenance,
    )

    # (c) closed form of the words with a single perturbed letter
    def one_bump_word(k: int, n: int) -> Word:
        syms = tuple(3 if pos == k else 1 for pos in range(1, n + 1))
        return Word(syms, 3)

    samples = [Q(0), Q(1), Q(5, 12), Q(5, 4), Q(-7, 3)]
    closed_ok = True
    for n in range(1, min(n_max, 6) + 1):
        for k in range(1, n + 1):
            w = one_bump_word(k, n)
            for x in samples:
                direct = system.evaluate_word(w, x)
                formula = x / Q(3) ** n + Q(3) ** (1 - k) * g.evaluate(Q(3) ** (k - n) * x)
                if direct != formula:
                    closed_ok = False
    _claim(
        claims,
        "c",
        "one-bump words evaluate to scaled translate plus rescaled bump, exactly",
        closed_ok,
        sampled_points=[rat_str(x) for x in samples],
    )

    # (d) global-map counts grow at least linearly while restricted counts stay flat
    unrestricted = []
    restricted = []
    grows = True
    for n in range(1, n_max + 1):
        r = Q(1, 3**n)
        cu = count_phi(system, Q(0), r, mode="unrestricted")
        cr = count_phi(system, Q(0), r, mode="restricted")
        unrestricted.append(cu.phi_count)
        restricted.append(cr.phi_count)
        if cu.phi_count < n:
            grows = False
    rest_max = max(restricted)
    _claim(
        claims,
        "d",
        "global-map count at (0, 3^-n) is at least n while the restricted count"
        " stays bounded",
        grows and rest_max <= 4,
        unrestricted=unrestricted,
        restricted=restricted,
        restricted_max=rest_max,
    )
    return {
        "example": "wsc",
        "n_max": n_max,
        "passed": all(c["passed"] for c in claims),
        "claims": claims,
    }


def verify_named_system(name: str, **kwargs) -> dict:
    if name == "shortword":
        return verify_shortword_example()
    if name == "wsc":
        return verify_wsc_example(**kwargs)
    raise KeyError(f"no verification procedure for {name!r}")
