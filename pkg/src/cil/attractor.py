"""Cylinder sets, attractor samples, and the natural self-conformal measure."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .arith import EnclosureBall, GaussianRational, Q, RationalInterval, rat_str
from .enclosures import DEFAULT_PRECISION, pow_interval
from .errors import BudgetExceededError, DepthCapError
from .ifs import IFSystem, Point
from .words import Word, all_words

SAMPLE_POINT_GUARD = 10**7


@dataclass(frozen=True)
class CylinderSet:
    """One construction piece phi_word(F) with its certified data."""

    word: Word
    enclosure: EnclosureBall
    deriv: RationalInterval
    diam: RationalInterval

    def __post_init__(self):
        if self.diam.lo > self.diam.hi:
            raise ValueError("diameter bounds out of order")


def cylinder(system: IFSystem, word: Word) -> CylinderSet:
    """Certified cylinder data: exact enclosure, derivative bounds, diameter bounds."""
    if len(word) > system.word_cap:
        raise DepthCapError(f"word length {len(word)} exceeds cap {system.word_cap}")
    return CylinderSet(
        word=word,
        enclosure=system.cylinder_enclosure(word),
        deriv=system.cylinder_deriv_bounds(word),
        diam=system.cylinder_diam_bounds(word),
    )


@dataclass(frozen=True)
class AttractorSample:
    """Exact points phi_w(seed) over all words w of one depth, deduplicated."""

    points: tuple
    depth: int
    seed: Point
    words: tuple  # one representative word per distinct point, parallel to `points`

    def __len__(self) -> int:
        return len(self.points)

    def csv_rows(self):
        """One point per row: exact rational strings plus decimal renderings."""
        rows = [("word", "re", "im", "re_approx", "im_approx")]
        for p, w in zip(self.points, self.words):
            if isinstance(p, GaussianRational):
                re, im = p.re, p.im
            else:
                re, im = Fraction(p), Q(0)
            rows.append((w.display(), rat_str(re), rat_str(im), float(re), float(im)))
        return rows


def sample_attractor(
    system: IFSystem, depth: int, seed: Optional[Point] = None
) -> AttractorSample:
    """Evaluate every word of the given depth at an exact attractor seed.

    The default seed is the fixed point of the first map, so every sample point is
    an exact attractor point.  Points are deduplicated by exact equality (the
    library's map kinds evaluate exactly); systems with exact overlaps therefore
    collapse to fewer distinct points.
    """
    if depth > system.word_cap:
        raise DepthCapError(f"depth {depth} exceeds word cap {system.word_cap}")
    if system.n_maps**depth > SAMPLE_POINT_GUARD:
        raise BudgetExceededError(f"{system.n_maps}**{depth} sample points exceed the guard")
    if seed is None:
        seed = system.maps[0].fixed_point_exact()
        if seed is None:
            raise ValueError("first map has no exact fixed point; pass a seed explicitly")
    seen = {}
    for w in all_words(system.n_maps, depth):
        p = system.evaluate_word(w, seed)
        key = (p.re, p.im) if isinstance(p, GaussianRational) else Fraction(p)
        if key not in seen:
            seen[key] = (p, w)
    pts = sorted(seen.values(), key=lambda t: (t[0].re, t[0].im) if isinstance(t[0], GaussianRational) else t[0])
    return AttractorSample(
        points=tuple(p for p, _ in pts),
        depth=depth,
        seed=seed,
        words=tuple(w for _, w in pts),
    )


@dataclass(frozen=True)
class NaturalMeasure:
    """Self-similar probability with exact per-symbol weights, multiplicative on words."""

    weights: tuple

    def __post_init__(self):
        ws = tuple(Fraction(w) for w in self.weights)
        object.__setattr__(self, "weights", ws)
        if any(w <= 0 for w in ws):
            raise ValueError("weights must be positive")
        if sum(ws) != 1:
            raise ValueError("weights must sum to exactly 1")

    @classmethod
    def uniform(cls, n: int) -> "NaturalMeasure":
        return cls(tuple(Q(1, n) for _ in range(n)))

    @classmethod
    def s_conformal(
        cls, system: IFSystem, s: Fraction, prec: int = DEFAULT_PRECISION
    ) -> "NaturalMeasure":
        """Weights proportional to ||phi_i'||^s, rationalized so they sum to exactly 1.

        The enclosure midpoints are normalized and the last weight absorbs the
        rounding, keeping cut masses exactly additive.  For systems whose maps
        share one contraction modulus this is exactly the uniform vector.
        """
        s = Fraction(s)
        norms = [system.cylinder_deriv_bounds(Word((i + 1,), system.n_maps)).hi for i in range(system.n_maps)]
        if len(set(norms)) == 1:
            return cls.uniform(system.n_maps)
        raw = [pow_interval(v, s, prec).midpoint() for v in norms]
        total = sum(raw)
        ws = [Fraction(r / total).limit_denominator(10**12) for r in raw[:-1]]
        ws.append(1 - sum(ws))
        return cls(tuple(ws))

    def mass(self, word: Word) -> Fraction:
        m = Q(1)
        for s in word.symbols:
            m *= self.weights[s - 1]
        return m


def _cylinder_hull(system: IFSystem, word: Word) -> Union[RationalInterval, EnclosureBall]:
    """Tightest available certified superset of phi_word(F)."""
    if system.f_hull is not None:
        return system.cylinder_f_interval(word)
    return system.cylinder_enclosure(word)


def _classify_against_ball(system: IFSystem, word: Word, ball: EnclosureBall) -> str:
    """'inside', 'outside', or 'boundary' for phi_word(F) against a closed ball."""
    hull = _cylinder_hull(system, word)
    if isinstance(hull, RationalInterval):
        biv = ball.as_interval()
        if biv.contains_interval(hull):
            return "inside"
        if not biv.intersects(hull):
            return "outside"
        return "boundary"
    if ball.contains_ball(hull):
        return "inside"
    if not ball.intersects_ball(hull):
        return "outside"
    return "boundary"


def measure_of_ball(
    mu: NaturalMeasure, system: IFSystem, ball: EnclosureBall, depth: int
) -> RationalInterval:
    """Certified bracket [mass certainly inside, mass possibly intersecting] for mu(B).

    Walks the word tree to the given depth, pruning subtrees whose hulls are
    certainly inside (mass fully counted) or certainly outside (mass dropped);
    boundary cylinders at full depth count toward the upper bound only.
    """
    if depth > system.word_cap:
        raise DepthCapError(f"depth {depth} exceeds word cap {system.word_cap}")
    lo = hi = Q(0)
    stack = [Word((), system.n_maps)]
    while stack:
        w = stack.pop()
        cls = _classify_against_ball(system, w, ball)
        if cls == "outside":
            continue
        if cls == "inside":
            m = mu.mass(w)
            lo += m
            hi += m
            continue
        if len(w) >= depth:
            hi += mu.mass(w)
            continue
        for sym in range(1, system.n_maps + 1):
            stack.append(w.child(sym))
    return RationalInterval(lo, hi)


def cut_masses_total(mu: NaturalMeasure, system: IFSystem, words: Sequence[Word]) -> Fraction:
    """Exact total mass of a word collection (1 for any generation cut)."""
    return sum((mu.mass(w) for w in words), start=Q(0))
