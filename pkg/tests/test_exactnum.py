import math
from fractions import Fraction

import gmpy2
import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from normcf import exactnum as en
from normcf.exactnum import Interval, Ordering, QuadSurd, compare, refine, root_pth, surd

from .conftest import IDENTITY_CASES

rationals = st.fractions(min_value=-1000, max_value=1000, max_denominator=10**6)
nonzero = rationals.filter(lambda q: q != 0)
squarefree = st.sampled_from([2, 3, 5, 6, 7, 10, 11, 13, 15, 17, 19, 21, 22, 23, 29, 30])


def surds(d=None):
    d_strat = st.just(d) if d is not None else squarefree
    return st.builds(
        surd,
        st.integers(-50, 50),
        st.integers(-50, 50).filter(bool),
        d_strat,
        st.integers(1, 60),
    )


def mp_value(x, dps=60):
    with mpmath.workdps(dps):
        if isinstance(x, QuadSurd):
            return (mpmath.mpf(x.a) + x.b * mpmath.sqrt(x.d)) / x.c
        return mpmath.mpf(x.numerator) / x.denominator


# ---------------------------------------------------------------------------
# worked examples


def test_compare_golden_against_decimal():
    phi = surd(1, 1, 5, 2)
    assert compare(phi, Fraction(809, 500)) is Ordering.GREATER


def test_compare_identity_equal():
    x = surd(3, -2, 7, 5)
    assert compare(x, x) is Ordering.EQUAL
    r = en.root(Fraction(3), Fraction(5, 2))
    assert compare(Fraction(2, 3), Fraction(2, 3)) is Ordering.EQUAL
    # an irrational non-surd compared with itself cannot be certified equal
    assert compare(r, r, max_bits=256) is Ordering.AMBIGUOUS


def test_compare_overlapping_interval_is_ambiguous():
    iv = Interval.from_bounds(Fraction(4999, 10000), Fraction(5001, 10000), 64)
    assert compare(iv, Fraction(1, 2), max_bits=128) is Ordering.AMBIGUOUS


def test_refine_sqrt2():
    iv = refine(surd(0, 1, 2), Fraction(1, 2**20))
    assert iv.width <= Fraction(1, 2**20)
    assert iv.lo**2 <= 2 <= iv.hi**2
    assert abs(iv.mid() - Fraction(14142135623730951, 10**16)) < Fraction(1, 2**20)


def test_refine_third_and_golden():
    iv = refine(Fraction(1, 3), Fraction(1, 2**40))
    assert iv.contains(Fraction(1, 3))
    iv = refine(surd(1, 1, 5, 2), Fraction(1, 2**10))
    assert iv.width <= Fraction(1, 2**10)
    # integer-sqrt oracle: phi lies in [lo_o, lo_o + 1/n]
    n = 10**12
    lo_o = Fraction(n + int(gmpy2.isqrt(5 * n * n)), 2 * n)
    assert iv.lo <= lo_o + Fraction(1, n) and lo_o <= iv.hi


def test_root_pth_examples():
    assert root_pth(4, 2, Fraction(1, 2**40)).contains(2)
    iv = root_pth(2, 2, Fraction(1, 2**30))
    # Newton oracle on integers
    s = gmpy2.isqrt(2 * 4**40)
    assert iv.lo <= Fraction(int(s) + 1, 2**40) and Fraction(int(s), 2**40) <= iv.hi
    for p in (1, Fraction(3, 2), 7, Fraction(22, 7)):
        assert root_pth(1, p, Fraction(1, 2**50)).contains(1)


def test_root_pth_non_integer_exponent():
    iv = root_pth(5, Fraction(7, 2), Fraction(1, 2**60))
    assert abs(float(iv.mid()) - 5 ** (2 / 7)) < 1e-15


def test_refine_cap_exhausted():
    x = en.Real(lambda prec: Interval.from_bounds(0, 1, prec))
    with pytest.raises(en.PrecisionExhausted):
        refine(x, Fraction(1, 2**10), max_bits=256)


def test_surd_rational_collapses():
    assert surd(3, 2, 4, 7) == Fraction(7, 7)
    assert isinstance(surd(0, 1, 9, 1), Fraction)


def test_surd_invariants():
    x = surd(4, 6, 12, 8)  # (4 + 12 sqrt3)/8 = (1 + 3 sqrt3)/2
    assert (x.a, x.b, x.d, x.c) == (1, 3, 3, 2)
    y = surd(1, 1, 5, -2)
    assert y.c > 0 and math.gcd(y.a, y.b, y.c) == 1


def test_format_forms():
    assert en.format_exact(surd(5, 1, 5, 10)) == "(5+√5)/10"
    assert en.format_exact(surd(0, 1, 3, 2)) == "√3/2"
    s = en.format_enclosure(surd(0, 1, 2), 10)
    assert s.startswith("1.4142135624~")


# ---------------------------------------------------------------------------
# invariants


OPS = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": lambda a, b: a / b,
}


@settings(max_examples=IDENTITY_CASES)
@given(rationals, nonzero, st.sampled_from(sorted(OPS)), st.integers(8, 200))
def test_enclosure_soundness(a, b, op, prec):
    exact = OPS[op](a, b)
    iv = OPS[op](Interval.point(a, prec), Interval.point(b, prec))
    assert iv.lo <= exact <= iv.hi


@settings(max_examples=IDENTITY_CASES)
@given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6).filter(bool), st.integers(2, 500), st.integers(1, 10**6).filter(bool))
def test_surd_canonicalization_idempotent_and_value_preserving(a, b, d, c):
    x = surd(a, b, d, c)
    if isinstance(x, Fraction):
        k = math.isqrt(d)
        assert k * k == d
        assert x == Fraction(a + b * k, c)
        return
    y = surd(x.a, x.b, x.d, x.c)
    assert y.key() == x.key()
    iv = x.to_interval(200)
    with mpmath.workdps(70):
        val = (mpmath.mpf(a) + b * mpmath.sqrt(d)) / c
        assert mpmath.mpf(iv.lo.numerator) / iv.lo.denominator <= val + mpmath.mpf(10) ** -55
        assert val - mpmath.mpf(10) ** -55 <= mpmath.mpf(iv.hi.numerator) / iv.hi.denominator


@settings(max_examples=IDENTITY_CASES)
@given(surds(5), surds(5), rationals)
def test_surd_field_identities(x, y, q):
    assert (x + y) - y == x
    assert x * y == y * x
    assert x * (y + q) == x * y + x * q
    assert (x / y) * y == x
    assert x * x.conjugate() == x.norm()
    assert x.inverse() * x == 1


@settings(max_examples=IDENTITY_CASES)
@given(st.one_of(surds(2), rationals), st.one_of(surds(2), rationals), st.one_of(surds(2), rationals))
def test_compare_antisymmetric_transitive(x, y, z):
    xy, yx = compare(x, y), compare(y, x)
    assert xy.value == -yx.value
    if compare(x, y) is not Ordering.GREATER and compare(y, z) is not Ordering.GREATER:
        assert compare(x, z) is not Ordering.GREATER
    assert (xy is Ordering.EQUAL) == (x == y)
    assert xy.value == (mp_value(x) > mp_value(y)) - (mp_value(x) < mp_value(y))


@settings(max_examples=2000)
@given(surds())
def test_surd_floor_matches_oracle(x):
    assert math.floor(x) == int(mpmath.floor(mp_value(x)))


@settings(max_examples=2000)
@given(st.fractions(min_value=0, max_value=100, max_denominator=1000), st.integers(2, 9))
def test_root_roundtrip(x, n):
    r = en.root(x, n)
    iv = en.refine(r, Fraction(1, 2**80))
    with mpmath.workdps(40):
        oracle = mpmath.root(mpmath.mpf(x.numerator) / x.denominator, n)
        assert abs(mpmath.mpf(iv.mid().numerator) / iv.mid().denominator - oracle) < mpmath.mpf(2) ** -70


def test_interval_pow_and_log():
    iv = Interval.point(3, 128).pow(Interval.point(Fraction(1, 3), 128))
    assert abs(float(iv.mid()) - 3 ** (1 / 3)) < 1e-15
    l2 = en.log2_interval(128)
    with mpmath.workdps(60):
        ln2 = mpmath.log(2)
        assert mpmath.mpf(l2.lo.numerator) / l2.lo.denominator <= ln2 <= mpmath.mpf(l2.hi.numerator) / l2.hi.denominator
