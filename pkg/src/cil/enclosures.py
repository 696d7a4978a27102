"""Certified enclosures of logs, exponentials, and rational powers.

Endpoints are computed with MPFR directed rounding (via gmpy2) and returned as
exact dyadic rationals, so results compose with the exact interval arithmetic in
`arith`.  The working precision is a parameter everywhere; 128 bits is the default
and the CIL_PRECISION_BITS environment variable overrides it for the CLI.
"""

from __future__ import annotations

import os
from fractions import Fraction
from typing import Union

import gmpy2

from .arith import RationalInterval
from .errors import EnclosureError

DEFAULT_PRECISION = 128


def working_precision(default: int = DEFAULT_PRECISION) -> int:
    """Precision in bits, honoring the CIL_PRECISION_BITS environment override."""
    env = os.environ.get("CIL_PRECISION_BITS")
    if env:
        bits = int(env)
        if bits < 53:
            raise ValueError("precision must be at least 53 bits")
        return bits
    return default


def _mpfr_to_frac(x) -> Fraction:
    n, d = x.as_integer_ratio()
    return Fraction(int(n), int(d))


def _down(x: Fraction, prec: int):
    with gmpy2.context(precision=prec, round=gmpy2.RoundDown):
        return gmpy2.mpfr(gmpy2.mpq(x.numerator, x.denominator))


def _up(x: Fraction, prec: int):
    with gmpy2.context(precision=prec, round=gmpy2.RoundUp):
        return gmpy2.mpfr(gmpy2.mpq(x.numerator, x.denominator))


IntervalLike = Union[RationalInterval, Fraction, int]


def _as_interval(x: IntervalLike) -> RationalInterval:
    if isinstance(x, RationalInterval):
        return x
    return RationalInterval.point(Fraction(x))


def log_interval(x: IntervalLike, prec: int = DEFAULT_PRECISION) -> RationalInterval:
    """Enclosure of the natural log over a positive interval."""
    iv = _as_interval(x)
    if iv.lo <= 0:
        raise EnclosureError("log of interval touching zero")
    with gmpy2.context(precision=prec, round=gmpy2.RoundDown):
        lo = gmpy2.log(_down(iv.lo, prec))
    with gmpy2.context(precision=prec, round=gmpy2.RoundUp):
        hi = gmpy2.log(_up(iv.hi, prec))
    return RationalInterval(_mpfr_to_frac(lo), _mpfr_to_frac(hi))


def exp_interval(x: IntervalLike, prec: int = DEFAULT_PRECISION) -> RationalInterval:
    iv = _as_interval(x)
    with gmpy2.context(precision=prec, round=gmpy2.RoundDown):
        lo = gmpy2.exp(_down(iv.lo, prec))
    with gmpy2.context(precision=prec, round=gmpy2.RoundUp):
        hi = gmpy2.exp(_up(iv.hi, prec))
    return RationalInterval(_mpfr_to_frac(lo), _mpfr_to_frac(hi))


def pow_interval(
    base: IntervalLike, exponent: Fraction, prec: int = DEFAULT_PRECISION
) -> RationalInterval:
    """Enclosure of base**exponent for a positive base interval and exact rational exponent.

    Integer exponents are dispatched to exact interval powers; otherwise the result
    goes through exp(exponent * log(base)) with outward rounding at each step.
    """
    iv = _as_interval(base)
    exponent = Fraction(exponent)
    if exponent == 0:
        return RationalInterval.point(1)
    if exponent.denominator == 1:
        k = int(exponent)
        if k > 0:
            return iv**k
        if iv.lo <= 0 <= iv.hi:
            raise EnclosureError("negative power of interval containing 0")
        return RationalInterval.point(1) / (iv ** (-k))
    if iv.lo <= 0:
        raise EnclosureError("rational power of interval touching zero")
    lg = log_interval(iv, prec)
    prod = lg.scale(exponent)  # exact: rational times dyadic endpoints
    return exp_interval(prod, prec)


def log_value(x: Fraction, prec: int = DEFAULT_PRECISION) -> RationalInterval:
    return log_interval(RationalInterval.point(x), prec)
