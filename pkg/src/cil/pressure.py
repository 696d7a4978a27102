"""The pressure function with rigorous two-sided brackets and a certified root.

For each depth n the sums sum_{|w|=n} ||phi_w'||^s computed from certified
derivative bounds give an upper bound (1/n) log S_n^hi (subadditivity) and a
lower bound (1/n)(log S_n^lo - 2 s log K) (supermultiplicativity through the
distortion constant K).  The root finder bisects on s, deepening n whenever the
bracket at the current depth cannot decide the sign.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .arith import Q, RationalInterval, rat_str
from .enclosures import DEFAULT_PRECISION, log_interval, pow_interval
from .errors import BudgetExceededError
from .ifs import IFSystem
from .words import Word, all_words

DEFAULT_WORD_BUDGET = 400_000


@dataclass(frozen=True)
class PressureEstimate:
    """Certified bracket for P(s) at one depth; P(s) lies in [lower.lo, upper.hi]."""

    s: Fraction
    n: int
    upper: RationalInterval
    lower: RationalInterval

    def bracket(self) -> RationalInterval:
        return RationalInterval(self.lower.lo, self.upper.hi)

    def sign(self) -> Optional[int]:
        """Certified sign of P(s): +1, -1, or None when the bracket straddles 0."""
        if self.lower.lo > 0:
            return 1
        if self.upper.hi < 0:
            return -1
        return None

    def to_json(self) -> dict:
        return {
            "s": rat_str(self.s),
            "n": self.n,
            "upper": rat_str(self.upper.hi),
            "lower": rat_str(self.lower.lo),
            "upper_approx": float(self.upper.hi),
            "lower_approx": float(self.lower.lo),
        }


@dataclass(frozen=True)
class RootBracket:
    """Certified bracket for the pressure zero: P(s_lo) > 0 > P(s_hi)."""

    s_lo: Fraction
    s_hi: Fraction
    depth: int
    certified: bool
    evaluations: int = 0

    @property
    def width(self) -> Fraction:
        return self.s_hi - self.s_lo

    def midpoint(self) -> Fraction:
        return (self.s_lo + self.s_hi) / 2

    def to_json(self) -> dict:
        return {
            "s_lo": rat_str(self.s_lo),
            "s_hi": rat_str(self.s_hi),
            "depth": self.depth,
            "certified": self.certified,
            "width": rat_str(self.width),
            "s_lo_approx": float(self.s_lo),
            "s_hi_approx": float(self.s_hi),
        }


def _norm_sums(system: IFSystem, s: Fraction, n: int, prec: int, budget: int):
    """Certified [S_lo, S_hi] enclosing sum over length-n words of ||phi_w'||^s."""
    one_syms = [system.cylinder_deriv_bounds(Word((i,), system.n_maps)) for i in range(1, system.n_maps + 1)]
    if all(b.lo == b.hi for b in one_syms) and system.is_similarity_system:
        # constant contraction moduli: the sum factorizes exactly
        per = [pow_interval(b.lo, s, prec) for b in one_syms]
        total = per[0]
        for p in per[1:]:
            total = total + p
        return total**n
    if system.n_maps**n > budget:
        raise BudgetExceededError(f"{system.n_maps}**{n} words exceed the pressure budget")
    lo = hi = Q(0)
    cache = {}
    for w in all_words(system.n_maps, n):
        d = system.cylinder_deriv_bounds(w)
        key = (d.lo, d.hi)
        powed = cache.get(key)
        if powed is None:
            powed = (
                pow_interval(d.lo, s, prec) if d.lo > 0 else RationalInterval.point(0),
                pow_interval(d.hi, s, prec),
            )
            cache[key] = powed
        lo += powed[0].lo
        hi += powed[1].hi
    return RationalInterval(lo, hi)


def pressure_bracket(
    system: IFSystem,
    s: Fraction,
    n: int,
    prec: int = DEFAULT_PRECISION,
    budget: int = DEFAULT_WORD_BUDGET,
) -> PressureEstimate:
    """Certified two-sided bracket for P(s) at depth n."""
    s = Fraction(s)
    if s < 0:
        raise ValueError("pressure is defined for s >= 0")
    if n < 1:
        raise ValueError("depth must be at least 1")
    sums = _norm_sums(system, s, n, prec, budget)
    upper = log_interval(RationalInterval.point(sums.hi), prec).scale(Q(1, n))
    k = system.distortion.K
    if k == 1 or s == 0:
        penalty = RationalInterval.point(0)
    else:
        penalty = log_interval(RationalInterval.point(k), prec).scale(2 * s / n)
    lower = log_interval(RationalInterval.point(sums.lo), prec).scale(Q(1, n)) - penalty
    return PressureEstimate(s=s, n=n, upper=upper, lower=lower)


def pressure_root(
    system: IFSystem,
    tol: Fraction = Q(1, 10**6),
    max_depth: int = 32,
    start_depth: int = 1,
    prec: int = DEFAULT_PRECISION,
    budget: int = DEFAULT_WORD_BUDGET,
) -> RootBracket:
    """Certified bracket of width <= tol around the unique zero of the pressure.

    Bisection on s with certified sign decisions; when a sign is undecidable at
    the current depth, the depth doubles (the subadditive upper bound is monotone
    along that schedule).  If depth or word budgets run out the tightest bracket
    achieved is returned flagged `certified=False` rather than failing silently.
    """
    tol = Fraction(tol)
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    n = start_depth
    evals = 0
    # depth escalation cannot tighten the bracket when the sums already factorize
    # exactly and no distortion penalty is paid
    depth_helps = not (system.is_similarity_system and system.distortion.K == 1)

    def certified_sign(s: Fraction):
        nonlocal n, evals
        while True:
            evals += 1
            try:
                sgn = pressure_bracket(system, s, n, prec, budget).sign()
            except BudgetExceededError:
                return None
            if sgn is not None or not depth_helps or n * 2 > max_depth:
                return sgn
            n *= 2

    # P(0) = log N > 0 for N >= 2; expand s_hi until the sign is certified negative.
    # An undecidable sign means P(s_hi) is (certifiably close to) zero, so a nudge
    # of half the tolerance to the right must cross it: the pressure is strictly
    # decreasing.
    s_lo, s_hi = Q(0), Q(1)
    certified = True
    while True:
        sgn = certified_sign(s_hi)
        if sgn == -1:
            break
        if sgn == 1:
            s_lo, s_hi = s_hi, s_hi * 2
            continue
        s_hi = s_hi + tol / 2
        if certified_sign(s_hi) == -1:
            break
        certified = False
        break
    while certified and s_hi - s_lo > tol:
        mid = (s_lo + s_hi) / 2
        sgn = certified_sign(mid)
        if sgn == 1:
            s_lo = mid
        elif sgn == -1:
            s_hi = mid
        else:
            # the zero sits (numerically) at mid: pin it between two nudges
            probe = min(tol / 4, (s_hi - s_lo) / 8)
            moved = False
            if certified_sign(mid - probe) == 1:
                s_lo = mid - probe
                moved = True
            if certified_sign(mid + probe) == -1:
                s_hi = mid + probe
                moved = True
            if s_hi - s_lo <= tol:
                break
            if not moved:
                certified = False
                break
    return RootBracket(s_lo=s_lo, s_hi=s_hi, depth=n, certified=certified, evaluations=evals)
