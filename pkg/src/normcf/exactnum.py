"""Exact and certified arithmetic.

Numbers come in two tiers:

* exact values: ``int``, :class:`fractions.Fraction` and :class:`QuadSurd`
  (elements ``(a + b*sqrt(d))/c`` of a real quadratic field);
* :class:`Real`, a lazily evaluated real number that can produce an
  :class:`Interval` enclosure at any requested binary precision.

Arithmetic between exact values of a common field stays exact; anything
else degrades to :class:`Real`.  Comparisons between exact values are
decided exactly, everything else by refining enclosures up to a precision
cap, beyond which the answer is :attr:`Ordering.AMBIGUOUS`.
"""
from __future__ import annotations

import enum
import math
import os
from fractions import Fraction
from functools import lru_cache
from numbers import Rational as _RationalABC

import gmpy2
import mpmath
from mpmath.libmp import (
    from_int,
    from_man_exp,
    from_rational,
    libmpi,
    mpf_cmp,
    mpf_floor,
    mpf_sub,
    round_ceiling,
    round_floor,
    to_int,
    to_rational,
    to_str,
)

def mpf_max(a, b):
    return a if mpf_cmp(a, b) >= 0 else b


def mpf_min(a, b):
    return a if mpf_cmp(a, b) <= 0 else b


DEFAULT_MAX_BITS = int(os.environ.get("NORMCF_MAX_BITS", "4096"))
START_BITS = 64


class PrecisionExhausted(ArithmeticError):
    """An enclosure could not be made tight enough under the precision cap."""


class AmbiguousComparison(ArithmeticError):
    """Two values could not be ordered under the precision cap."""


class _Unresolved(ArithmeticError):
    # raised inside an enclosure computation that needs more precision
    pass


class Ordering(enum.Enum):
    LESS = -1
    EQUAL = 0
    GREATER = 1
    AMBIGUOUS = 2


# ---------------------------------------------------------------------------
# intervals with dyadic endpoints


class Interval:
    """Closed interval ``[lo, hi]`` with dyadic (binary floating) endpoints.

    All operations round outward, so the result always contains the exact
    image of the operands.
    """

    __slots__ = ("_v", "prec")

    def __init__(self, v, prec: int):
        self._v = v
        self.prec = prec

    # construction -----------------------------------------------------
    @classmethod
    def point(cls, x, prec: int) -> "Interval":
        if isinstance(x, int):
            f = from_int(x)
            return cls((f, f), prec)
        x = Fraction(x)
        lo = from_rational(x.numerator, x.denominator, prec, round_floor)
        hi = from_rational(x.numerator, x.denominator, prec, round_ceiling)
        return cls((lo, hi), prec)

    @classmethod
    def from_bounds(cls, lo, hi, prec: int) -> "Interval":
        a, b = Fraction(lo), Fraction(hi)
        if a > b:
            raise ValueError("empty interval")
        return cls(
            (
                from_rational(a.numerator, a.denominator, prec, round_floor),
                from_rational(b.numerator, b.denominator, prec, round_ceiling),
            ),
            prec,
        )

    @classmethod
    def dyadic(cls, lo_man: int, hi_man: int, exp: int, prec: int) -> "Interval":
        return cls((from_man_exp(lo_man, exp), from_man_exp(hi_man, exp)), prec)

    # accessors --------------------------------------------------------
    @property
    def lo(self) -> Fraction:
        p, q = to_rational(self._v[0])
        return Fraction(p, q)

    @property
    def hi(self) -> Fraction:
        p, q = to_rational(self._v[1])
        return Fraction(p, q)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __float__(self) -> float:
        return float(self.mid())

    def contains(self, x) -> bool:
        if isinstance(x, QuadSurd):
            return compare(x, self.lo) != Ordering.LESS and compare(x, self.hi) != Ordering.GREATER
        x = Fraction(x)
        return self.lo <= x <= self.hi

    def sign(self) -> int | None:
        """+1 / -1 if the interval excludes zero, 0 if it is {0}, else None."""
        lo, hi = self._v
        if mpf_cmp(lo, from_int(0)) > 0:
            return 1
        if mpf_cmp(hi, from_int(0)) < 0:
            return -1
        if mpf_cmp(lo, from_int(0)) == 0 and mpf_cmp(hi, from_int(0)) == 0:
            return 0
        return None

    def overlaps(self, other: "Interval") -> bool:
        return libmpi.mpi_overlap(self._v, other._v)

    def __repr__(self) -> str:
        return "Interval[{}, {}]".format(
            to_str(self._v[0], 20), to_str(self._v[1], 20)
        )

    # arithmetic -------------------------------------------------------
    def _p(self, other):
        return max(self.prec, other.prec)

    def __add__(self, o):
        return Interval(libmpi.mpi_add(self._v, o._v, self._p(o)), self._p(o))

    def __sub__(self, o):
        return Interval(libmpi.mpi_sub(self._v, o._v, self._p(o)), self._p(o))

    def __mul__(self, o):
        return Interval(libmpi.mpi_mul(self._v, o._v, self._p(o)), self._p(o))

    def __truediv__(self, o):
        if o.sign() is None or o.sign() == 0:
            raise _Unresolved("division by an interval containing zero")
        return Interval(libmpi.mpi_div(self._v, o._v, self._p(o)), self._p(o))

    def __neg__(self):
        return Interval(libmpi.mpi_neg(self._v), self.prec)

    def __abs__(self):
        return Interval(libmpi.mpi_abs(self._v), self.prec)

    def sqrt(self):
        lo, hi = self._v
        if mpf_cmp(hi, from_int(0)) < 0:
            raise ValueError("sqrt of a negative interval")
        lo = mpf_max(lo, from_int(0))
        return Interval(libmpi.mpi_sqrt((lo, hi), self.prec), self.prec)

    def exp(self):
        return Interval(libmpi.mpi_exp(self._v, self.prec), self.prec)

    def log(self):
        if self.sign() != 1:
            raise _Unresolved("log of an interval not bounded away from zero")
        return Interval(libmpi.mpi_log(self._v, self.prec), self.prec)

    def pow_int(self, n: int):
        return Interval(libmpi.mpi_pow_int(self._v, n, self.prec), self.prec)

    def pow(self, e: "Interval"):
        """``self ** e`` for ``self >= 0`` (clipped) and ``e > 0``."""
        lo, hi = self._v
        if mpf_cmp(hi, from_int(0)) < 0:
            raise ValueError("real power of a negative interval")
        if e.sign() != 1:
            raise ValueError("exponent must be positive")
        zero = from_int(0)
        lo = mpf_max(lo, zero)
        p = max(self.prec, e.prec)
        if mpf_cmp(hi, zero) == 0:
            return Interval((zero, zero), p)
        if mpf_cmp(lo, zero) == 0:
            top = libmpi.mpi_pow(((hi, hi)), e._v, p)[1]
            return Interval((zero, top), p)
        return Interval(libmpi.mpi_pow((lo, hi), e._v, p), p)

    def floor_if_decided(self) -> int | None:
        a = int(to_int(mpf_floor(self._v[0])))
        b = int(to_int(mpf_floor(self._v[1])))
        return a if a == b else None

    @staticmethod
    def maximum(a: "Interval", b: "Interval") -> "Interval":
        return Interval(
            (mpf_max(a._v[0], b._v[0]), mpf_max(a._v[1], b._v[1])), max(a.prec, b.prec)
        )

    @staticmethod
    def minimum(a: "Interval", b: "Interval") -> "Interval":
        return Interval(
            (mpf_min(a._v[0], b._v[0]), mpf_min(a._v[1], b._v[1])), max(a.prec, b.prec)
        )

    @staticmethod
    def hull(a: "Interval", b: "Interval") -> "Interval":
        return Interval(
            (mpf_min(a._v[0], b._v[0]), mpf_max(a._v[1], b._v[1])), max(a.prec, b.prec)
        )

    def width_mpf(self):
        return mpf_sub(self._v[1], self._v[0], self.prec, round_ceiling)


# ---------------------------------------------------------------------------
# quadratic surds


@lru_cache(maxsize=4096)
def squarefree_split(n: int) -> tuple[int, int]:
    """Return ``(k, d)`` with ``n = k*k*d`` and ``d`` squarefree."""
    if n <= 0:
        raise ValueError("expected a positive integer")
    k, d = 1, 1
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            k *= p ** (e // 2)
            if e % 2:
                d *= p
        p += 1 if p == 2 else 2
        if p > 10**6:
            break
    if p > 10**6 and m > 1:
        r = gmpy2.isqrt(m)
        if r * r == m:
            k *= int(r)
            m = 1
    d *= m
    return k, d


def _isqrt_floor_signed(b: int, d: int) -> int:
    """floor(b*sqrt(d)) for squarefree d > 1."""
    r = int(gmpy2.isqrt(b * b * d))
    return r if b >= 0 else -r - 1


class QuadSurd:
    """The real number ``(a + b*sqrt(d)) / c`` with ``b != 0``.

    Stored canonically: ``d > 1`` squarefree, ``c > 0``, ``gcd(a, b, c) = 1``.
    Use :func:`surd` to construct; it collapses ``b == 0`` to a Fraction.
    """

    __slots__ = ("a", "b", "d", "c")

    def __init__(self, a: int, b: int, d: int, c: int):
        if b == 0:
            raise ValueError("QuadSurd needs b != 0; use surd()")
        if c == 0:
            raise ZeroDivisionError("zero denominator")
        if d <= 1:
            raise ValueError("d must be a squarefree integer > 1")
        if c < 0:
            a, b, c = -a, -b, -c
        g = math.gcd(math.gcd(a, b), c)
        self.a, self.b, self.d, self.c = a // g, b // g, d, c // g

    # structural ---------------------------------------------------------
    def key(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.d, self.c)

    def __hash__(self):
        return hash(("QuadSurd",) + self.key())

    def __repr__(self):
        return f"QuadSurd({self.a}, {self.b}, {self.d}, {self.c})"

    def __str__(self):
        return format_exact(self)

    def conjugate(self) -> "QuadSurd":
        return QuadSurd(self.a, -self.b, self.d, self.c)

    def norm(self) -> Fraction:
        return Fraction(self.a * self.a - self.b * self.b * self.d, self.c * self.c)

    # numeric ------------------------------------------------------------
    def sign(self) -> int:
        a, b, d = self.a, self.b, self.d
        if a >= 0 and b > 0:
            return 1
        if a <= 0 and b < 0:
            return -1
        # opposite signs: compare a^2 with b^2 d, never equal as d is squarefree
        if a > 0:
            return 1 if a * a > b * b * d else -1
        return 1 if b * b * d > a * a else -1

    def __floor__(self) -> int:
        k = _isqrt_floor_signed(self.b, self.d)
        return (self.a + k) // self.c

    def __ceil__(self) -> int:
        return math.floor(self) + 1

    def to_interval(self, prec: int) -> Interval:
        # floor(x * 2^k) is exact; the enclosure has width 2^-k
        k = prec + 4
        scaled = QuadSurd(self.a << k, self.b << k, self.d, self.c)
        f = math.floor(scaled)
        return Interval.dyadic(f, f + 1, -k, prec)

    def __float__(self):
        return float(self.to_interval(80).mid())

    def __bool__(self):
        return True

    # arithmetic ---------------------------------------------------------
    def _coerce(self, o):
        if isinstance(o, int):
            return (o, 0, 1)
        if isinstance(o, Fraction):
            return (o.numerator, 0, o.denominator)
        if isinstance(o, QuadSurd) and o.d == self.d:
            return (o.a, o.b, o.c)
        return None

    def __add__(self, o):
        t = self._coerce(o)
        if t is None:
            return _real_binop(self, o, "+")
        a2, b2, c2 = t
        return surd(self.a * c2 + a2 * self.c, self.b * c2 + b2 * self.c, self.d, self.c * c2)

    __radd__ = __add__

    def __neg__(self):
        return QuadSurd(-self.a, -self.b, self.d, self.c)

    def __pos__(self):
        return self

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __sub__(self, o):
        t = self._coerce(o)
        if t is None:
            return _real_binop(self, o, "-")
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        t = self._coerce(o)
        if t is None:
            return _real_binop(self, o, "*")
        a2, b2, c2 = t
        a, b, d, c = self.a, self.b, self.d, self.c
        return surd(a * a2 + b * b2 * d, a * b2 + a2 * b, d, c * c2)

    __rmul__ = __mul__

    def inverse(self):
        n = self.a * self.a - self.b * self.b * self.d
        return surd(self.c * self.a, -self.c * self.b, self.d, n)

    def __truediv__(self, o):
        t = self._coerce(o)
        if t is None:
            return _real_binop(self, o, "/")
        if isinstance(o, (int, Fraction)):
            if o == 0:
                raise ZeroDivisionError
            o = Fraction(o)
            return surd(self.a * o.denominator, self.b * o.denominator, self.d, self.c * o.numerator)
        return self * o.inverse()

    def __rtruediv__(self, o):
        return self.inverse() * o

    def __pow__(self, n):
        if isinstance(n, int):
            if n < 0:
                return self.inverse() ** (-n)
            r = Fraction(1)
            base = self
            while n:
                if n & 1:
                    r = r * base
                base = base * base
                n >>= 1
            return r
        return power(self, n)

    # comparisons --------------------------------------------------------
    def __eq__(self, o):
        if isinstance(o, QuadSurd):
            return self.key() == o.key()
        if isinstance(o, (int, Fraction, float)):
            return False
        return NotImplemented

    def _cmp(self, o) -> int:
        r = compare(self, o)
        if r is Ordering.AMBIGUOUS:
            raise AmbiguousComparison(f"cannot order {self!r} and {o!r}")
        return r.value

    def __lt__(self, o):
        return self._cmp(o) < 0

    def __le__(self, o):
        return self._cmp(o) <= 0

    def __gt__(self, o):
        return self._cmp(o) > 0

    def __ge__(self, o):
        return self._cmp(o) >= 0


def surd(a: int, b: int, d: int, c: int = 1):
    """Build ``(a + b*sqrt(d))/c``; square factors of ``d`` are pulled out.

    Returns a Fraction when the value is rational.
    """
    if c == 0:
        raise ZeroDivisionError("zero denominator")
    if d < 0:
        raise ValueError("only real quadratic fields are supported")
    if b == 0 or d == 0:
        return Fraction(a, c)
    k, d2 = squarefree_split(d)
    if d2 == 1:
        return Fraction(a + b * k, c)
    return QuadSurd(a, b * k, d2, c)


def sqrt_int(n: int):
    """Exact square root of a non-negative integer as Fraction or QuadSurd."""
    return surd(0, 1, n, 1) if n else Fraction(0)


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction, QuadSurd))


# ---------------------------------------------------------------------------
# lazily certified reals


class Real:
    """A real number known through enclosures at any binary precision.

    ``gen(prec)`` must return an :class:`Interval` containing the value; it
    may raise ``_Unresolved`` when ``prec`` is too low to say anything
    useful.  Enclosures are memoised per precision.
    """

    __slots__ = ("_gen", "_memo", "hint")

    def __init__(self, gen, hint: float | None = None):
        self._gen = gen
        self._memo: dict[int, Interval] = {}
        self.hint = hint

    def enclose(self, prec: int) -> Interval:
        iv = self._memo.get(prec)
        if iv is None:
            iv = self._gen(prec)
            self._memo[prec] = iv
        return iv

    def __float__(self):
        return float(refine(self, Fraction(1, 1 << 60)))

    def __repr__(self):
        try:
            return f"Real(~{float(self)!r})"
        except ArithmeticError:
            return "Real(?)"

    # arithmetic -----------------------------------------------------------
    def __add__(self, o):
        return _real_binop(self, o, "+")

    def __radd__(self, o):
        return _real_binop(o, self, "+")

    def __sub__(self, o):
        return _real_binop(self, o, "-")

    def __rsub__(self, o):
        return _real_binop(o, self, "-")

    def __mul__(self, o):
        return _real_binop(self, o, "*")

    def __rmul__(self, o):
        return _real_binop(o, self, "*")

    def __truediv__(self, o):
        return _real_binop(self, o, "/")

    def __rtruediv__(self, o):
        return _real_binop(o, self, "/")

    def __neg__(self):
        return Real(lambda prec: -self.enclose(prec))

    def __abs__(self):
        return Real(lambda prec: abs(self.enclose(prec)))

    def __pow__(self, n):
        return power(self, n)

    def _cmp(self, o) -> int:
        r = compare(self, o)
        if r is Ordering.AMBIGUOUS:
            raise AmbiguousComparison(f"cannot order {self!r} and {o!r}")
        return r.value

    def __lt__(self, o):
        return self._cmp(o) < 0

    def __le__(self, o):
        return self._cmp(o) <= 0

    def __gt__(self, o):
        return self._cmp(o) > 0

    def __ge__(self, o):
        return self._cmp(o) >= 0

    __hash__ = None


def as_real(x) -> Real:
    """Lift any scalar to a :class:`Real`."""
    if isinstance(x, Real):
        return x
    if isinstance(x, QuadSurd):
        return Real(x.to_interval)
    if isinstance(x, (int, Fraction)):
        return Real(lambda prec, _x=x: Interval.point(_x, prec))
    if isinstance(x, float):
        return Real(lambda prec, _x=Fraction(x): Interval.point(_x, prec))
    if isinstance(x, Interval):
        # a fixed enclosure cannot be refined further
        return Real(lambda prec, _x=x: _x)
    raise TypeError(f"cannot lift {type(x).__name__} to Real")


_OPS = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": lambda a, b: a / b,
}


def _real_binop(x, y, op):
    if isinstance(x, (mpmath.mpf, float)) or isinstance(y, (mpmath.mpf, float)):
        return NotImplemented
    a, b = as_real(x), as_real(y)
    f = _OPS[op]
    guard = 8
    return Real(lambda prec: f(a.enclose(prec + guard), b.enclose(prec + guard)))


def real_from_bisection(pred, lo: Fraction, hi: Fraction) -> Real:
    """Certified root of a monotone sign change on ``[lo, hi]``.

    ``pred(x: Interval) -> Interval`` evaluates a function that is negative
    left of the root and positive right of it.  The enclosure at precision
    ``prec`` is obtained by bisecting until the bracket is narrower than
    ``2**-prec`` or the sign at the midpoint can no longer be decided.
    """
    lo, hi = Fraction(lo), Fraction(hi)

    def gen(prec):
        a, b = lo, hi
        target = Fraction(1, 1 << prec)
        while b - a > target:
            m = (a + b) / 2
            # round the midpoint to a short dyadic to keep sizes bounded
            m = Fraction(math.floor(m * (1 << (prec + 8))), 1 << (prec + 8))
            if not (a < m < b):
                break
            try:
                s = pred(Interval.point(m, prec + 16)).sign()
            except _Unresolved:
                s = None
            if s is None:
                break
            if s == 0:
                return Interval.point(m, prec)
            if s > 0:
                b = m
            else:
                a = m
        return Interval.from_bounds(a, b, prec)

    return Real(gen)


# ---------------------------------------------------------------------------
# elementary operations on any scalar


def enclose(x, prec: int) -> Interval:
    if isinstance(x, QuadSurd):
        return x.to_interval(prec)
    if isinstance(x, (int, Fraction)):
        return Interval.point(x, prec)
    if isinstance(x, Real):
        return x.enclose(prec)
    if isinstance(x, float):
        return Interval.point(Fraction(x), prec)
    if isinstance(x, Interval):
        return x
    raise TypeError(f"cannot enclose {type(x).__name__}")


def refine(x, width, max_bits: int | None = None) -> Interval:
    """Return an enclosure of ``x`` with ``hi - lo <= width``."""
    cap = max_bits or DEFAULT_MAX_BITS
    width = Fraction(width)
    if width <= 0:
        raise ValueError("width must be positive")
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        iv = Interval.point(x, max(START_BITS, -_log2_floor(width) + 8))
        if iv.width <= width:
            return iv
    prec = max(START_BITS, min(cap, -_log2_floor(width) + 8))
    while True:
        try:
            iv = enclose(x, prec)
            if iv.width <= width:
                return iv
        except _Unresolved:
            pass
        if prec >= cap:
            raise PrecisionExhausted(f"could not reach width {float(width):.3g} within {cap} bits")
        prec = min(cap, prec * 2)


def _log2_floor(x: Fraction) -> int:
    x = Fraction(x)
    return x.numerator.bit_length() - x.denominator.bit_length() - 1


def compare(x, y, max_bits: int | None = None) -> Ordering:
    """Three-way comparison; ``AMBIGUOUS`` if undecided at ``max_bits``."""
    if isinstance(x, (int, Fraction)) and isinstance(y, (int, Fraction)):
        return Ordering((x > y) - (x < y))
    if is_exact(x) and is_exact(y):
        if isinstance(x, QuadSurd) and isinstance(y, QuadSurd) and x.d != y.d:
            pass  # different fields: values differ, decide by refinement
        else:
            diff = x - y
            s = diff.sign() if isinstance(diff, QuadSurd) else (diff > 0) - (diff < 0)
            return Ordering(s)
    cap = max_bits or DEFAULT_MAX_BITS
    prec = START_BITS
    diff = as_real(x) - as_real(y) if not (is_exact(x) and is_exact(y)) else None
    while True:
        try:
            if diff is None:
                a, b = enclose(x, prec), enclose(y, prec)
                if a.hi < b.lo:
                    return Ordering.LESS
                if a.lo > b.hi:
                    return Ordering.GREATER
            else:
                s = diff.enclose(prec).sign()
                if s is not None and s != 0:
                    return Ordering(s)
        except _Unresolved:
            pass
        if prec >= cap:
            return Ordering.AMBIGUOUS
        prec = min(cap, prec * 2)


def sign(x, max_bits: int | None = None) -> int:
    """Sign of ``x``; raises :class:`AmbiguousComparison` if undecidable."""
    r = compare(x, 0, max_bits)
    if r is Ordering.AMBIGUOUS:
        raise AmbiguousComparison("sign undecided at precision cap")
    return r.value


def floor(x, max_bits: int | None = None) -> int:
    """Exact floor; raises :class:`AmbiguousComparison` when ``x`` sits
    (numerically) on an integer."""
    if isinstance(x, (int, Fraction, QuadSurd)):
        return math.floor(x)
    if isinstance(x, float):
        return math.floor(x)
    cap = max_bits or DEFAULT_MAX_BITS
    prec = START_BITS
    while True:
        try:
            f = x.enclose(prec).floor_if_decided()
            if f is not None:
                return f
        except _Unresolved:
            pass
        if prec >= cap:
            raise AmbiguousComparison("floor undecided at precision cap")
        prec = min(cap, prec * 2)


def nabs(x):
    if isinstance(x, Real):
        return abs(x)
    if is_exact(x):
        return -x if compare(x, 0) is Ordering.LESS else x
    return abs(x)


def nmax(*xs):
    if any(isinstance(x, Real) for x in xs):
        rs = [as_real(x) for x in xs]

        def gen(prec):
            out = rs[0].enclose(prec)
            for r in rs[1:]:
                out = Interval.maximum(out, r.enclose(prec))
            return out

        return Real(gen)
    if all(is_exact(x) for x in xs):
        best = xs[0]
        for x in xs[1:]:
            r = compare(x, best)
            if r is Ordering.AMBIGUOUS:
                return nmax(*(as_real(x) for x in xs))
            if r is Ordering.GREATER:
                best = x
        return best
    return max(xs)


def nmin(*xs):
    return -nmax(*(-x for x in xs))


def _exact_int_root(n: int, k: int):
    r, exact = gmpy2.iroot(n, k)
    return int(r) if exact else None


def _exact_root(x, n: int):
    """Exact ``x**(1/n)`` for exact ``x >= 0`` if it lies in the same field."""
    if isinstance(x, int):
        x = Fraction(x)
    if isinstance(x, Fraction):
        if x < 0:
            raise ValueError("root of a negative number")
        p = _exact_int_root(x.numerator, n)
        q = _exact_int_root(x.denominator, n)
        if p is not None and q is not None:
            return Fraction(p, q)
        if n == 2:
            # sqrt(p/q) = sqrt(p*q)/q lands in a quadratic field; finding the
            # squarefree part of a large radicand would mean factoring it
            if (x.numerator * x.denominator).bit_length() > 60:
                return None
            return surd(0, 1, x.numerator * x.denominator, x.denominator)
        if n % 2 == 0:
            s = _exact_root(x, 2)
            return _exact_root(s, n // 2) if s is not None else None
        return None
    if isinstance(x, QuadSurd):
        if n == 2:
            return _surd_sqrt(x)
        if n % 2 == 0:
            s = _surd_sqrt(x)
            return _exact_root(s, n // 2) if s is not None else None
        return None
    return None


def _surd_sqrt(x: QuadSurd):
    # (u + w sqrt d)^2 = A + B sqrt d with A = a/c, B = b/c:
    # u^2 + d w^2 = A, 2 u w = B  =>  u^2 = (A +- sqrt(A^2 - d B^2)) / 2
    if x.sign() < 0:
        raise ValueError("sqrt of a negative number")
    A = Fraction(x.a, x.c)
    B = Fraction(x.b, x.c)
    disc = A * A - x.d * B * B
    if disc < 0:
        return None
    s = _exact_root(disc, 2)
    if not isinstance(s, Fraction):
        return None
    for u2 in ((A + s) / 2, (A - s) / 2):
        if u2 <= 0:
            continue
        u = _exact_root(u2, 2)
        if not isinstance(u, Fraction):
            continue
        w = B / (2 * u)
        cand = Fraction(u) + w * surd(0, 1, x.d)
        if isinstance(cand, QuadSurd) and cand.sign() > 0 and cand * cand == x:
            return cand
        if isinstance(cand, QuadSurd) and cand.sign() < 0 and cand * cand == x:
            return -cand
    return None


def root(x, n):
    """``x ** (1/n)`` for ``x >= 0`` and a positive integer or rational ``n``.

    Exact whenever the root lies in the field of ``x``; a :class:`Real`
    otherwise.
    """
    if isinstance(x, float):
        return x ** (1.0 / float(n))
    if isinstance(x, mpmath.mpf):
        return mpmath.root(x, int(n)) if isinstance(n, int) else x ** (1 / mpmath.mpf(n))
    if isinstance(n, Fraction) and n.denominator == 1:
        n = n.numerator
    if isinstance(n, Fraction):
        if n.denominator <= 64 and n.numerator <= 4096:
            # x^(q/p) with n = p/q
            return root(power(x, n.denominator), n.numerator)
        xr = as_real(x)
        inv = 1 / n
        return Real(lambda prec: xr.enclose(prec + 16).pow(Interval.point(inv, prec + 16)))
    if n == 1:
        return x
    if is_exact(x) and n <= 4096:
        r = _exact_root(x, n)
        if r is not None:
            return r
    xr = as_real(x)
    if n == 2:
        return Real(lambda prec: xr.enclose(prec + 8).sqrt())

    def gen(prec):
        iv = xr.enclose(prec + 16)
        return iv.pow(Interval.point(Fraction(1, n), prec + 16))

    return Real(gen)


def power(x, e):
    """``x ** e`` for ``x >= 0`` (any ``x`` when ``e`` is an integer)."""
    if isinstance(e, Fraction) and e.denominator == 1:
        e = e.numerator
    if isinstance(x, float):
        return x ** float(e)
    if isinstance(x, mpmath.mpf):
        return x ** (e if isinstance(e, int) else mpmath.mpf(e.numerator) / e.denominator)
    if isinstance(e, int) and abs(e) <= 4096:
        if is_exact(x):
            if isinstance(x, QuadSurd):
                return x.__pow__(e)
            return Fraction(x) ** e
        xr = as_real(x)
        if e >= 0:
            return Real(lambda prec: xr.enclose(prec + 8).pow_int(e))
        return 1 / power(xr, -e)
    if isinstance(e, Fraction):
        if is_exact(x) and e.denominator <= 64 and abs(e.numerator) <= 4096:
            num = e.numerator
            r = root(power(x, abs(num)), e.denominator)
            return r if num > 0 else 1 / r
    # generic real exponent
    if compare(e, 0) is Ordering.LESS:
        return 1 / power(x, -e)
    if compare(e, 0) is Ordering.EQUAL:
        return Fraction(1)
    xr = as_real(x)
    er = as_real(e)

    def gen(prec):
        return xr.enclose(prec + 16).pow(er.enclose(prec + 16))

    return Real(gen)


def root_pth(x, p, width) -> Interval:
    """Certified enclosure of ``x**(1/p)`` of width at most ``width``."""
    if compare(x, 0) is Ordering.LESS:
        raise ValueError("root_pth needs x >= 0")
    if isinstance(p, Real):
        pr = p

        def gen(prec):
            pi = pr.enclose(prec + 16)
            return enclose(x, prec + 16).pow(Interval.point(1, prec + 16) / pi)

        return refine(Real(gen), width)
    p = Fraction(p)
    if p < 1:
        raise ValueError("p must be >= 1")
    return refine(root(x, p), width)


def log2_interval(prec: int) -> Interval:
    two = Interval.point(2, prec)
    return two.log()


def to_fraction(x) -> Fraction:
    """Parse a decimal string / number into an exact Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        return Fraction(x)
    raise TypeError(f"not a rational: {x!r}")


def to_float(x) -> float:
    if isinstance(x, float):
        return x
    if isinstance(x, (int, Fraction)):
        return float(x)
    if isinstance(x, mpmath.mpf):
        return float(x)
    return float(refine(x, Fraction(1, 1 << 60)).mid())


# ---------------------------------------------------------------------------
# formatting


def format_exact(x) -> str | None:
    """Exact string form, ``(a+b√d)/c`` for surds; None for Reals."""
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, QuadSurd):
        b = abs(x.b)
        rad = f"{b}√{x.d}" if b != 1 else f"√{x.d}"
        if x.a == 0:
            num = rad if x.b > 0 else f"-{rad}"
            return num if x.c == 1 else f"{num}/{x.c}"
        num = f"{x.a}{'+' if x.b > 0 else '-'}{rad}"
        return num if x.c == 1 else f"({num})/{x.c}"
    return None


def format_enclosure(x, digits: int = 20) -> str:
    """Decimal with an error exponent: ``<decimal>~<e>`` means |x - decimal| <= 10**e."""
    width = Fraction(1, 10 ** (digits + 1))
    iv = refine(x, width)
    mid = iv.mid()
    scaled = mid * 10**digits
    r = math.floor(scaled + Fraction(1, 2))
    err = abs(Fraction(r, 10**digits) - mid) + iv.width / 2
    e = -digits
    while Fraction(10) ** e < err:
        e += 1
    sgn = "-" if r < 0 else ""
    r = abs(r)
    s = str(r).rjust(digits + 1, "0")
    return f"{sgn}{s[:-digits]}.{s[-digits:]}~{e}"


def format_approx(x: float, err: float) -> str:
    """A float result with a stated (not certified) error bound, as ``<decimal>~<e>``."""
    e = math.ceil(math.log10(err)) if err > 0 else -17
    e = max(e, -17)
    digits = max(0, -e + 1)
    return f"{x:.{digits}f}~{e}"


def format_scalar(x, digits: int = 20) -> str:
    ex = format_exact(x)
    if ex is not None:
        return ex
    return format_enclosure(x, digits)
