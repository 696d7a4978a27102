"""Covering numbers, box-dimension fits, Hausdorff content estimates, Ahlfors
regularity diagnostics, uniform perfectness, and the quasi-self-similarity
constant.

Universally quantified "for all x and r" claims become "for all tested x and r":
every report carries the schedules it was tested on, upper bounds come from
concrete covers, and lower bounds from exact packings or mass distribution.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .arith import EnclosureBall, GaussianRational, Q, RationalInterval, rat_str, sqrt_interval
from .attractor import NaturalMeasure, measure_of_ball, sample_attractor
from .enclosures import DEFAULT_PRECISION, pow_interval
from .errors import DepthCapError, EnclosureError
from .ifs import IFSystem
from .words import all_words, generation_cut


# ---------------------------------------------------------------------------
# covering numbers and box dimension
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoveringCount:
    """Ball-covering count at one scale: greedy upper bound and packing lower bound."""

    r: Fraction
    n_r: int
    method: str
    packing_lower: int

    @property
    def exact(self) -> bool:
        return self.n_r == self.packing_lower

    def to_json(self) -> dict:
        return {
            "r": rat_str(self.r),
            "n_r": self.n_r,
            "packing_lower": self.packing_lower,
            "method": self.method,
            "exact": self.exact,
        }


def _cut_hulls_sorted(system: IFSystem, r: Fraction) -> List[RationalInterval]:
    cut = generation_cut(system, r, max_len=system.word_cap)
    if system.f_hull is not None:
        hulls = [system.cylinder_f_interval(w) for w in cut]
    else:
        hulls = []
        for w in cut:
            e = system.cylinder_enclosure(w)
            rad = sqrt_interval(e.radius_sq).hi
            hulls.append(RationalInterval(e.center.re - rad, e.center.re + rad))
    hulls.sort(key=lambda h: (h.lo, h.hi))
    return hulls


def covering_number(system: IFSystem, r: Fraction, method: str = "greedy-ball") -> CoveringCount:
    """Greedy ball-cover count of the attractor at radius r, with a packing lower bound.

    The greedy pass walks the generation-cut cylinder hulls left to right and
    places a closed ball (interval of length 2r) at each first uncovered point;
    this is a genuine cover, so the count is a certified upper bound for the
    covering number.  The packing pass greedily collects attractor points of
    pairwise distance > 2r (each such point needs its own ball), giving a
    certified lower bound; the two match on well-separated named systems.
    """
    r = Fraction(r)
    if r <= 0:
        raise ValueError("radius must be positive")
    if system.dimension != 1:
        raise NotImplementedError("covering counts are implemented for 1-D systems")
    hulls = _cut_hulls_sorted(system, r)
    count = 0
    covered_up_to: Optional[Fraction] = None
    for h in hulls:
        start = h.lo
        while covered_up_to is None or h.hi > covered_up_to:
            anchor = start if covered_up_to is None else max(start, covered_up_to)
            covered_up_to = anchor + 2 * r
            count += 1
    # packing lower bound from exact attractor points two generations deeper:
    # hull endpoints are attractor points for exact-hull systems, sample points
    # otherwise
    if system.f_hull is not None:
        fine = _cut_hulls_sorted(system, r / 9)
        points = sorted({h.lo for h in fine} | {h.hi for h in fine})
    else:
        depth = min(_depth_for_scale(system, r) + 2, 12)
        points = [Fraction(p) for p in sample_attractor(system, depth).points]
    packing = 0
    last = None
    for p in points:
        if last is None or p - last > 2 * r:
            packing += 1
            last = p
    return CoveringCount(r=r, n_r=count, method=method, packing_lower=packing)


@dataclass(frozen=True)
class BoxDimensionFit:
    """Least-squares slope of log N_r against log(1/r)."""

    slope: float
    intercept: float
    residual: float
    counts: tuple  # (r, CoveringCount) pairs

    def to_json(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "residual": self.residual,
            "points": [c.to_json() for _, c in self.counts],
        }

    def csv_rows(self) -> List[Tuple[str, int]]:
        return [(rat_str(r), c.n_r) for r, c in self.counts]


def box_dimension_estimate(system: IFSystem, r_schedule: Sequence[Fraction]) -> BoxDimensionFit:
    """Fit the covering-count scaling exponent over a geometric radius schedule."""
    rs = [Fraction(r) for r in r_schedule]
    if len(rs) < 2:
        raise ValueError("need at least two scales")
    counts = [(r, covering_number(system, r)) for r in rs]
    xs = np.array([-np.log(float(r)) for r, _ in counts])
    ys = np.array([np.log(c.n_r) for _, c in counts])
    coeffs, residuals, *_ = np.polyfit(xs, ys, 1, full=True)
    resid = float(residuals[0]) if len(residuals) else 0.0
    return BoxDimensionFit(
        slope=float(coeffs[0]), intercept=float(coeffs[1]), residual=resid, counts=tuple(counts)
    )


# ---------------------------------------------------------------------------
# Hausdorff content
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ContentEstimate:
    """Two-sided content estimate at one exponent and diameter cap.

    `upper` is the value of the best concrete cover found (cut cylinders clipped
    to the subset, a single-hull cover when admissible, and a greedy 1-D merge
    pass); `lower` comes from mass distribution with a density constant
    certified over the tested scale range.
    """

    s: Fraction
    delta: Optional[Fraction]  # None means no diameter cap (the plain content)
    upper: Fraction
    lower: Fraction
    cover_size: int
    density_constant: Optional[Fraction] = None

    def to_json(self) -> dict:
        return {
            "s": rat_str(self.s),
            "delta": rat_str(self.delta) if self.delta is not None else None,
            "upper": rat_str(self.upper),
            "lower": rat_str(self.lower),
            "upper_approx": float(self.upper),
            "lower_approx": float(self.lower),
            "cover_size": self.cover_size,
        }


def _subset_interval(system: IFSystem, subset: Optional[EnclosureBall]) -> Optional[RationalInterval]:
    if subset is None:
        return None
    return subset.as_interval()


def _pow_hi(x: Fraction, s: Fraction, prec: int) -> Fraction:
    if x == 0:
        return Q(0)
    return pow_interval(x, s, prec).hi


def _pow_lo(x: Fraction, s: Fraction, prec: int) -> Fraction:
    if x <= 0:
        return Q(0)
    return pow_interval(x, s, prec).lo


def window_multiplicity(hulls: Sequence[RationalInterval], t: Fraction) -> int:
    """Exact maximum number of hulls a closed interval of length t can meet."""
    best = 0
    anchors = [h.hi for h in hulls] + [h.lo for h in hulls]
    for a in anchors:
        lo, hi = a, a + t
        best = max(best, sum(1 for h in hulls if h.lo <= hi and h.hi >= lo))
        lo, hi = a - t, a
        best = max(best, sum(1 for h in hulls if h.lo <= hi and h.hi >= lo))
    return best


def content_estimate(
    system: IFSystem,
    s: Fraction,
    delta: Optional[Fraction] = None,
    subset: Optional[EnclosureBall] = None,
    mu: Optional[NaturalMeasure] = None,
    prec: int = DEFAULT_PRECISION,
) -> ContentEstimate:
    """Upper and lower bounds for the s-dimensional content of F intersected with a subset.

    Every cover admissible at a diameter cap is admissible without one, so the
    uncapped estimate minimizes over a geometric schedule of capped covers; this
    keeps the reported upper bounds ordered the way the contents themselves are.
    """
    s = Fraction(s)
    if s < 0:
        raise ValueError("exponent must be nonnegative")
    delta = Fraction(delta) if delta is not None else None
    if system.dimension != 1 or system.f_hull is None:
        raise NotImplementedError("content estimation is implemented for exact 1-D systems")
    if delta is not None:
        return _content_core(system, s, delta, delta, subset, mu, prec)
    base = system.diam_f_bounds().hi / 3
    best = None
    for k in range(7):
        est = _content_core(system, s, base / 3**k, None, subset, mu, prec)
        if best is None or est.upper < best.upper:
            best = est
    return best


def _content_core(
    system: IFSystem,
    s: Fraction,
    scale: Fraction,
    cap: Optional[Fraction],
    subset: Optional[EnclosureBall],
    mu: Optional[NaturalMeasure],
    prec: int,
) -> ContentEstimate:
    """Best cover at one cut scale under an optional diameter cap, plus the
    mass-distribution lower bound certified against that cut."""
    sub_iv = _subset_interval(system, subset)
    cut = generation_cut(system, scale, max_len=system.word_cap)
    pieces = []
    for w in cut:
        h = system.cylinder_f_interval(w)
        if sub_iv is not None:
            if not h.intersects(sub_iv):
                continue
            h = RationalInterval(max(h.lo, sub_iv.lo), min(h.hi, sub_iv.hi))
        pieces.append(h)
    pieces.sort(key=lambda h: (h.lo, h.hi))
    if not pieces:
        return ContentEstimate(s=s, delta=cap, upper=Q(0), lower=Q(0), cover_size=0)

    candidates: List[Tuple[Fraction, int]] = []
    cut_val = sum(_pow_hi(h.width(), s, prec) for h in pieces)
    candidates.append((cut_val, len(pieces)))
    hull_all = RationalInterval(pieces[0].lo, max(h.hi for h in pieces))
    if cap is None or hull_all.width() <= cap:
        candidates.append((_pow_hi(hull_all.width(), s, prec), 1))
    # greedy merge: join adjacent pieces when the merged power is certified no worse
    merged = [pieces[0]]
    merged_val = [_pow_hi(pieces[0].width(), s, prec)]
    for h in pieces[1:]:
        join = RationalInterval(merged[-1].lo, max(merged[-1].hi, h.hi))
        if cap is None or join.width() <= cap:
            joined = _pow_hi(join.width(), s, prec)
            if joined <= merged_val[-1] + _pow_hi(h.width(), s, prec):
                merged[-1] = join
                merged_val[-1] = joined
                continue
        merged.append(h)
        merged_val.append(_pow_hi(h.width(), s, prec))
    candidates.append((sum(merged_val), len(merged)))
    upper, cover_size = min(candidates, key=lambda c: c[0])

    # mass-distribution lower bound, density certified over the tested cut
    mu = mu or NaturalMeasure.uniform(system.n_maps)
    hulls_full = [system.cylinder_f_interval(w) for w in cut]
    masses = [mu.mass(w) for w in cut]
    t = max(h.width() for h in hulls_full)
    if t == 0:
        return ContentEstimate(s=s, delta=cap, upper=upper, lower=Q(0), cover_size=cover_size)
    w_mult = window_multiplicity(hulls_full, t)
    gamma = w_mult * max(masses) / _pow_lo(t, s, prec)
    if sub_iv is None:
        mass_lo = Q(1)
    else:
        ball = EnclosureBall.from_interval(sub_iv.lo, sub_iv.hi)
        mass_lo = measure_of_ball(mu, system, ball, depth=max(len(w) for w in cut)).lo
    lower = mass_lo / gamma if gamma > 0 else Q(0)
    return ContentEstimate(
        s=s, delta=cap, upper=upper, lower=min(lower, upper), cover_size=cover_size,
        density_constant=gamma,
    )


# ---------------------------------------------------------------------------
# Ahlfors regularity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AhlforsReport:
    """Certified ratio brackets mu(B(x,r))/r^s over sampled locations and scales."""

    s: Fraction
    envelope: RationalInterval
    ratios: tuple  # (x, r, RationalInterval) triples
    sample_size: int
    schedule: tuple

    def min_lower(self) -> Fraction:
        return min(r.lo for _, _, r in self.ratios)

    def max_upper(self) -> Fraction:
        return max(r.hi for _, _, r in self.ratios)

    def degradation(self) -> Fraction:
        """Envelope spread hi/lo: any admissible regularity constant C satisfies C^2 >= this."""
        lo = self.min_lower()
        if lo <= 0:
            raise EnclosureError("degenerate lower ratio; spread is unbounded")
        return self.max_upper() / lo

    def to_json(self) -> dict:
        return {
            "s": rat_str(self.s),
            "envelope_lo": rat_str(self.envelope.lo),
            "envelope_hi": rat_str(self.envelope.hi),
            "envelope_lo_approx": float(self.envelope.lo),
            "envelope_hi_approx": float(self.envelope.hi),
            "sample_size": self.sample_size,
            "schedule": [rat_str(r) for r in self.schedule],
        }


def _depth_for_scale(system: IFSystem, r: Fraction) -> int:
    depth = 1
    while True:
        worst = max(system.cylinder_diam_bounds(w).hi for w in all_words(system.n_maps, depth))
        if worst <= r:
            return depth
        depth += 1
        if depth > system.word_cap:
            raise DepthCapError("no depth matches the requested scale under the cap")


def ahlfors_check(
    system: IFSystem,
    s: Fraction,
    samples: int,
    r_schedule: Sequence[Fraction],
    mu: Optional[NaturalMeasure] = None,
    sample_depth: Optional[int] = None,
    rng_seed: int = 0,
    seed_point=None,
    prec: int = DEFAULT_PRECISION,
) -> AhlforsReport:
    """Ratio envelope of mu(B(x, r))/r^s over sampled attractor points and scales.

    Each ratio is a certified bracket: the measure bracket from cylinder
    classification at a depth matched to r, divided by an enclosure of r^s.
    `seed_point` replaces the default attractor-sample seed (the first map's
    fixed point) for sample-independence checks.
    """
    s = Fraction(s)
    rs = sorted((Fraction(r) for r in r_schedule), reverse=True)
    if not rs:
        raise ValueError("empty radius schedule")
    mu = mu or NaturalMeasure.uniform(system.n_maps)
    depth_needed = _depth_for_scale(system, rs[-1])
    sample = sample_attractor(system, sample_depth or min(depth_needed, 10), seed=seed_point)
    rng = random.Random(rng_seed)
    idx = list(range(len(sample.points)))
    if len(idx) > samples:
        idx = sorted(rng.sample(idx, samples))
    pts = [sample.points[i] for i in idx]
    ratios = []
    for r in rs:
        depth = _depth_for_scale(system, r)
        rs_pow = pow_interval(r, s, prec)
        for x in pts:
            if system.dimension == 1:
                ball = EnclosureBall.from_interval(Fraction(x) - r, Fraction(x) + r)
            else:
                ball = EnclosureBall(x, r * r, dimension=2)
            m = measure_of_ball(mu, system, ball, depth)
            ratios.append((x, r, RationalInterval(m.lo / rs_pow.hi, m.hi / rs_pow.lo)))
    env = RationalInterval(min(t[2].lo for t in ratios), max(t[2].hi for t in ratios))
    return AhlforsReport(
        s=s, envelope=env, ratios=tuple(ratios), sample_size=len(pts), schedule=tuple(rs)
    )


# ---------------------------------------------------------------------------
# uniform perfectness
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UniformPerfectnessEstimate:
    """Smallest tested annulus constant with witnessed non-empty annuli everywhere."""

    H: Fraction
    certified_upto: Fraction
    tested_pairs: int
    all_witnessed: bool

    def to_json(self) -> dict:
        return {
            "H": rat_str(self.H),
            "certified_upto": rat_str(self.certified_upto),
            "tested_pairs": self.tested_pairs,
            "all_witnessed": self.all_witnessed,
        }


def uniform_perfectness(
    system: IFSystem,
    samples: int,
    r_schedule: Sequence[Fraction],
    sample_depth: Optional[int] = None,
    rng_seed: int = 0,
    h_cap: int = 2**20,
) -> UniformPerfectnessEstimate:
    """Doubling search for H such that every tested annulus B(x,r) minus B(x,r/H) meets F.

    Witnesses are exact attractor sample points with r/H < |p - x| <= r, so the
    witness sample must resolve below the finest annulus scale; by default it is
    taken two generations deeper.  The reported H is the maximum over all tested
    (x, r) of the smallest doubling H that works.
    """
    if sample_depth is None:
        sample_depth = min(_depth_for_scale(system, min(Fraction(r) for r in r_schedule)) + 2, 12)
    sample = sample_attractor(system, sample_depth)
    if len(sample.points) < 2:
        raise EnclosureError("attractor sample is degenerate (fewer than two points)")
    rng = random.Random(rng_seed)
    idx = list(range(len(sample.points)))
    if len(idx) > samples:
        idx = sorted(rng.sample(idx, samples))
    pts = [sample.points[i] for i in idx]
    all_pts = sample.points
    rs = [Fraction(r) for r in r_schedule]
    worst_h = Q(2)
    tested = 0
    all_ok = True
    for x in pts:
        for r in rs:
            tested += 1
            h = Q(2)
            while h <= h_cap:
                ok = False
                for p in all_pts:
                    if isinstance(p, GaussianRational):
                        dsq = (p - x).abs_sq()
                        inside = dsq <= r * r
                        outside_core = dsq > (r / h) ** 2
                    else:
                        d = abs(Fraction(p) - Fraction(x))
                        inside = d <= r
                        outside_core = d > r / h
                    if inside and outside_core:
                        ok = True
                        break
                if ok:
                    break
                h *= 2
            if h > h_cap:
                all_ok = False
            else:
                worst_h = max(worst_h, h)
    return UniformPerfectnessEstimate(
        H=worst_h, certified_upto=min(rs), tested_pairs=tested, all_witnessed=all_ok
    )


# ---------------------------------------------------------------------------
# quasi-self-similarity constant
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuasiConstants:
    """Certified upper bound for the scaled-copy bi-Lipschitz constant D.

    D = max(1, K^2 diam(F) / min ||phi_i'||, 2K / diam(F)) with every factor taken
    in the certified direction; the witness list records sampled (x, r) pairs where
    a construction word was found whose cylinder sits in B(x, r) with scaling
    ratios inside [r/D, D r].
    """

    D: Fraction
    K: Fraction
    diam_f: RationalInterval
    min_deriv: Fraction
    witnesses: tuple

    def to_json(self) -> dict:
        return {
            "D": rat_str(self.D),
            "D_approx": float(self.D),
            "K": rat_str(self.K),
            "diam_f_lo": rat_str(self.diam_f.lo),
            "diam_f_hi": rat_str(self.diam_f.hi),
            "min_deriv": rat_str(self.min_deriv),
            "witnesses": list(self.witnesses),
        }


def quasi_constant(
    system: IFSystem,
    witness_samples: int = 6,
    r_schedule: Optional[Sequence[Fraction]] = None,
    sample_depth: int = 6,
) -> QuasiConstants:
    """The scaled-copy constant from certified K, diameter, and derivative bounds."""
    dist = system.distortion
    diam = system.diam_f_bounds()
    if diam.lo <= 0:
        raise EnclosureError("attractor diameter lower bound is degenerate")
    d_const = max(
        Q(1),
        dist.K**2 * diam.hi / dist.min_deriv_lo,
        2 * dist.K / diam.lo,
    )
    witnesses = []
    if r_schedule:
        sample = sample_attractor(system, sample_depth)
        rng = random.Random(0)
        idx = list(range(len(sample.points)))
        if len(idx) > witness_samples:
            idx = sorted(rng.sample(idx, witness_samples))
        for i in idx:
            x, w = sample.points[i], sample.words[i]
            for r in r_schedule:
                r = Fraction(r)
                found = None
                for n in range(1, len(w) + 1):
                    prefix = w.prefix(n)
                    if system.f_hull is None:
                        break
                    hull = system.cylinder_f_interval(prefix)
                    c = Fraction(x)
                    if c - r <= hull.lo and hull.hi <= c + r:
                        deriv = system.cylinder_deriv_bounds(prefix)
                        lo_ratio = deriv.lo / dist.K
                        hi_ratio = deriv.hi
                        ok = (r / d_const <= lo_ratio) and (hi_ratio <= d_const * r)
                        found = {
                            "x": rat_str(c),
                            "r": rat_str(r),
                            "word": prefix.display(),
                            "ratios_inside": ok,
                        }
                        break
                if found:
                    witnesses.append(found)
    return QuasiConstants(
        D=d_const, K=dist.K, diam_f=diam, min_deriv=dist.min_deriv_lo, witnesses=tuple(witnesses)
    )


def covering_envelope(
    system: IFSystem,
    s_bracket: RationalInterval,
    content_lower: Fraction,
    r: Fraction,
    prec: int = DEFAULT_PRECISION,
) -> RationalInterval:
    """Certified covering-count envelope [2^-s H_inf_lo r^-s, D^s r^-s].

    Evaluated outward over the whole exponent bracket so the true covering count
    lies inside whenever the true dimension does.
    """
    r = Fraction(r)
    d_const = quasi_constant(system).D
    los, his = [], []
    for s in (s_bracket.lo, s_bracket.hi):
        r_pow = pow_interval(r, s, prec)
        two_pow = pow_interval(Q(2), s, prec)
        d_pow = pow_interval(d_const, s, prec)
        los.append(content_lower / (two_pow.hi * r_pow.hi))
        his.append(d_pow.hi / r_pow.lo)
    return RationalInterval(min(los), max(his))
