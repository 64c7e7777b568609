"""Regular continued fractions, the pair (u_n, v_n) and the Gauss map.

For ``alpha = [b_0; b_1, b_2, ...]`` with convergents ``r_n/s_n``:

* ``u_n = [0; b_{n+1}, b_{n+2}, ...]`` is the tail value,
* ``v_n = s_{n-1}/s_n = [0; b_n, ..., b_1]`` with ``v_0 = 0``.

Seeds: ``r_{-2} = 0, r_{-1} = 1, s_{-2} = 1, s_{-1} = 0``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2
import numpy as np

from . import exactnum as en
from .exactnum import Interval, QuadSurd, Real, surd


class RationalAlpha(ValueError):
    pass


class PrefixExhausted(LookupError):
    pass


class AlphaParseError(ValueError):
    pass


# ---------------------------------------------------------------------------
# alpha specifications


class AlphaSpec:
    spec: str

    def exact_value(self):
        """QuadSurd value, or None when alpha is not a quadratic irrational."""
        return None

    def digit_stream(self) -> "DigitStream":
        raise NotImplementedError

    def is_eventually_periodic(self) -> bool:
        return self.exact_value() is not None

    def __str__(self):
        return self.spec


@dataclass(frozen=True)
class Surd(AlphaSpec):
    value: QuadSurd

    def __post_init__(self):
        if not isinstance(self.value, QuadSurd):
            raise RationalAlpha("alpha must be irrational")

    @property
    def spec(self):
        v = self.value
        return f"surd:{v.a},{v.b},{v.d},{v.c}"

    def exact_value(self):
        return self.value

    def digit_stream(self):
        return SurdStream(self.value)


@dataclass(frozen=True)
class PeriodicDigits(AlphaSpec):
    b0: int
    preperiod: tuple
    period: tuple

    def __post_init__(self):
        object.__setattr__(self, "preperiod", tuple(self.preperiod))
        object.__setattr__(self, "period", tuple(self.period))
        if not self.period:
            raise AlphaParseError("period must be non-empty")
        if any(d < 1 for d in self.preperiod + self.period):
            raise AlphaParseError("partial quotients must be positive")

    @property
    def spec(self):
        pre = ",".join(map(str, self.preperiod))
        per = ",".join(map(str, self.period))
        return f"cf:{self.b0};{pre};({per})"

    def exact_value(self):
        return periodic_value(self.b0, self.preperiod, self.period)

    def digit_stream(self):
        return SurdStream(self.exact_value())


@dataclass(frozen=True)
class ArithmeticDigits(AlphaSpec):
    """``b_k = start + (k-1)*step`` for ``k >= 1``."""

    b0: int
    start: int
    step: int

    def __post_init__(self):
        if self.start < 1 or self.step < 0:
            raise AlphaParseError("need start >= 1 and step >= 0")

    @property
    def spec(self):
        return f"cf-arith:{self.b0};{self.start},{self.step}"

    def exact_value(self):
        if self.step == 0:
            return periodic_value(self.b0, (), (self.start,))
        return None

    def digit_stream(self):
        if self.step == 0:
            return SurdStream(self.exact_value())
        return FuncStream(self.b0, lambda k: self.start + (k - 1) * self.step)


@dataclass(frozen=True)
class PrefixDigits(AlphaSpec):
    b0: int
    digits: tuple

    def __post_init__(self):
        object.__setattr__(self, "digits", tuple(self.digits))
        if any(d < 1 for d in self.digits):
            raise AlphaParseError("partial quotients must be positive")

    @property
    def spec(self):
        return f"cf-prefix:{self.b0};" + ",".join(map(str, self.digits))

    def digit_stream(self):
        return PrefixStream(self.b0, self.digits)

    def representative(self) -> QuadSurd:
        """A concrete element of the cylinder: the prefix followed by all ones."""
        return periodic_value(self.b0, self.digits, (1,))


@dataclass(frozen=True)
class RandomUniform(AlphaSpec):
    """Uniform alpha in (0, 1) defined by a seeded stream of random bits."""

    seed: int

    @property
    def spec(self):
        return f"random:{self.seed}"

    def digit_stream(self):
        return RandomStream(self.seed)


def periodic_value(b0: int, pre, period) -> QuadSurd:
    """Exact value of ``[b0; pre, (period)]``."""
    # purely periodic x = [q1; q2, ..., qk, x] = (A x + B)/(C x + D)
    A, B, C, D = 1, 0, 0, 1
    for q in period:
        A, B, C, D = A * q + B, A, C * q + D, C
    # C x^2 + (D - A) x - B = 0, root x > 1
    disc = (D - A) ** 2 + 4 * B * C
    x = surd(A - D, 1, disc, 2 * C)
    for q in reversed(pre):
        x = q + 1 / x
    val = b0 + 1 / x
    if not isinstance(val, QuadSurd):
        raise RationalAlpha("periodic expansion gave a rational")
    return val


# ---------------------------------------------------------------------------
# digit streams


class DigitStream:
    """Lazily produced regular partial quotients."""

    def digit(self, k: int) -> int:
        raise NotImplementedError

    def available(self) -> int | None:
        """Number of known digits (None if unbounded)."""
        return None

    def alpha_enclosure(self, prec: int) -> Interval:
        raise NotImplementedError


class SurdStream(DigitStream):
    def __init__(self, alpha: QuadSurd):
        if not isinstance(alpha, QuadSurd):
            raise RationalAlpha("alpha must be irrational")
        self.alpha = alpha
        b0 = math.floor(alpha)
        self._digits = [b0]
        self._u = [alpha - b0]  # u_n, exact
        self._seen = {self._u[0].key(): 0}
        self.preperiod = None  # index n at which u_n first repeats
        self.period = None

    def _extend(self, n):
        while len(self._digits) <= n:
            if self.period is not None:
                k = len(self._digits)
                src = self.preperiod + 1 + (k - self.preperiod - 1) % self.period
                self._digits.append(self._digits[src])
                self._u.append(self._u[src])
                continue
            x = 1 / self._u[-1]
            b = math.floor(x)
            u = x - b
            self._digits.append(b)
            self._u.append(u)
            key = u.key()
            if key in self._seen:
                i = self._seen[key]
                self.preperiod, self.period = i, len(self._u) - 1 - i
            else:
                self._seen[key] = len(self._u) - 1

    def digit(self, k):
        self._extend(k)
        return self._digits[k]

    def u(self, n) -> QuadSurd:
        self._extend(n)
        return self._u[n]

    def find_period(self, limit: int = 100000):
        """(i, L): u_{i+L} = u_i, so digits b_{k} repeat with period L for k > i."""
        k = 0
        while self.period is None:
            k += 64
            if k > limit:
                raise RuntimeError("period not found")
            self._extend(k)
        return self.preperiod, self.period

    def alpha_enclosure(self, prec):
        return self.alpha.to_interval(prec)


class FuncStream(DigitStream):
    def __init__(self, b0, f):
        self.b0 = b0
        self.f = f

    def digit(self, k):
        return self.b0 if k == 0 else self.f(k)

    def alpha_enclosure(self, prec):
        return cylinder_enclosure(self, 0, prec, include_b0=True)


class PrefixStream(DigitStream):
    def __init__(self, b0, digits):
        self.b0 = b0
        self.digits = digits

    def digit(self, k):
        if k == 0:
            return self.b0
        if k > len(self.digits):
            raise PrefixExhausted(f"digit {k} beyond the prefix of length {len(self.digits)}")
        return self.digits[k - 1]

    def available(self):
        return len(self.digits) + 1

    def alpha_enclosure(self, prec):
        return cylinder_enclosure(self, 0, prec, include_b0=True)


class RandomStream(DigitStream):
    """alpha in [k/2^N, (k+1)/2^N], refined 64 bits at a time on demand."""

    CHUNK = 64

    def __init__(self, seed: int):
        self.seed = seed
        self._rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
        self.k = 0
        self.N = 0
        self._digits = [0]
        self._draw(256)

    def _draw(self, bits):
        while bits > 0:
            word = int.from_bytes(self._rng.bytes(self.CHUNK // 8), "big")
            self.k = (self.k << self.CHUNK) | word
            self.N += self.CHUNK
            bits -= self.CHUNK
        self._recompute()

    def _recompute(self):
        lo = cf_of_rational(self.k, 1 << self.N)
        hi = cf_of_rational(self.k + 1, 1 << self.N)
        common = 0
        while common < min(len(lo), len(hi)) and lo[common] == hi[common]:
            common += 1
        # the last shared digit may still change in the tail; keep one fewer
        self._digits = lo[: max(1, common - 1)]

    def digit(self, k):
        while len(self._digits) <= k:
            # about 3.4 bits per digit on average; ask for 4 and round up
            missing = k + 1 - len(self._digits)
            bits = max(self.CHUNK * 4, -(-(4 * missing + 64) // self.CHUNK) * self.CHUNK)
            self._draw(bits)
        return self._digits[k]

    def prefix(self, count: int) -> list[int]:
        """``[b_0, ..., b_{count-1}]``."""
        self.digit(count - 1)
        return self._digits[:count]

    def alpha_enclosure(self, prec):
        while self.N < prec + 2:
            self._draw(prec + 2 - self.N)
        return Interval.from_bounds(Fraction(self.k, 1 << self.N), Fraction(self.k + 1, 1 << self.N), prec)

    def float_value(self) -> float:
        return self.k / 2.0**self.N if self.N < 1000 else float(Fraction(self.k, 1 << self.N))


def cf_of_rational(p: int, q: int) -> list[int]:
    out = []
    p, q = gmpy2.mpz(p), gmpy2.mpz(q)
    while q:
        a, r = gmpy2.f_divmod(p, q)
        out.append(int(a))
        p, q = q, r
    return out


def cylinder_enclosure(stream: DigitStream, n: int, prec: int, include_b0=False) -> Interval:
    """Enclosure of ``[0; b_{n+1}, b_{n+2}, ...]`` (or of alpha when ``include_b0``).

    Uses as many digits as needed for width ``2**-prec``; when the stream
    runs out, the widest valid cylinder is returned.
    """
    start = n + 1
    # Moebius x = (A y + B)/(C y + D) after consuming digits
    A, B, C, D = 0, 1, 1, 0  # x = 1/y
    if include_b0:
        A, B, C, D = 1, 0, 0, 1
        start = 0
    target = Fraction(1, 1 << prec)
    k = start
    lo = hi = None
    while True:
        try:
            b = stream.digit(k)
        except PrefixExhausted:
            break
        # y = b + 1/y'
        A, B = A * b + B, A
        C, D = C * b + D, C
        k += 1
        # tail y' in [1, inf]: endpoints A/C and (A+B)/(C+D)
        e1 = Fraction(A, C) if C else None
        e2 = Fraction(A + B, C + D)
        if e1 is not None:
            lo, hi = min(e1, e2), max(e1, e2)
            if hi - lo <= target:
                break
    if lo is None:
        if include_b0:
            raise PrefixExhausted("no digits")
        lo, hi = Fraction(0), Fraction(1)
    return Interval.from_bounds(lo, hi, prec)


# ---------------------------------------------------------------------------
# the regular continued fraction


class RegularCF:
    """Append-only memoized regular expansion of an AlphaSpec."""

    def __init__(self, alpha: AlphaSpec):
        self.alpha = alpha
        self.stream = alpha.digit_stream()
        self.exact = alpha.exact_value()
        self._r = [0, 1]  # r_{-2}, r_{-1}
        self._s = [1, 0]
        self._b = []
        self._u_real = {}
        self._alpha_real = None

    # digits and convergents --------------------------------------------
    def b(self, n: int) -> int:
        while len(self._b) <= n:
            k = len(self._b)
            d = self.stream.digit(k)
            if k > 0 and d < 1:
                raise ValueError("partial quotients must be positive")
            self._b.append(d)
            self._r.append(d * self._r[-1] + self._r[-2])
            self._s.append(d * self._s[-1] + self._s[-2])
        return self._b[n]

    def digits(self, count: int) -> list[int]:
        self.b(count - 1)
        return self._b[:count]

    def rs(self, n: int) -> tuple[int, int]:
        if n >= 0:
            self.b(n)
        return self._r[n + 2], self._s[n + 2]

    def v(self, n: int) -> Fraction:
        if n == 0:
            return Fraction(0)
        return Fraction(self.rs(n - 1)[1], self.rs(n)[1])

    def u(self, n: int):
        if isinstance(self.stream, SurdStream):
            return self.stream.u(n)
        r = self._u_real.get(n)
        if r is None:
            stream = self.stream

            def gen(prec, _n=n):
                return cylinder_enclosure(stream, _n, prec)

            r = Real(gen)
            self._u_real[n] = r
        return r

    def uv(self, n: int):
        return self.u(n), self.v(n)

    def uv_float(self, n: int) -> tuple[float, float]:
        return en.to_float(self.u(n)), float(self.v(n))

    def alpha_value(self):
        """alpha itself, exact or as a Real."""
        if self.exact is not None:
            return self.exact
        if self._alpha_real is None:
            self._alpha_real = Real(self.stream.alpha_enclosure)
        return self._alpha_real

    def theta(self, n: int):
        """``s_n*alpha - r_n``; exact for quadratic alpha."""
        r, s = self.rs(n)
        if self.exact is not None:
            return s * self.exact - r
        # s_n alpha - r_n from one enclosure of alpha; the cancellation costs
        # about log2(s_n s_{n+1}) bits, covered by the guard
        stream = self.stream
        guard = 2 * s.bit_length() + 16

        def gen(prec):
            bits = prec + guard
            a = stream.alpha_enclosure(bits)
            return a * Interval.point(s, bits) - Interval.point(r, bits)

        return Real(gen)

    def period(self):
        """(preperiod index, period length) of u_n for quadratic alpha, else None."""
        if isinstance(self.stream, SurdStream):
            return self.stream.find_period()
        return None


def gauss_T(u, v):
    """``T(u, v) = (1/u - floor(1/u), 1/(v + floor(1/u)))`` and ``T(0, v) = (0, 0)``."""
    if isinstance(u, float):
        if u == 0:
            return 0.0, 0.0
        x = 1.0 / u
        b = math.floor(x)
        return x - b, 1.0 / (v + b)
    if en.is_exact(u) and u == 0:
        return Fraction(0), Fraction(0)
    x = 1 / u
    b = en.floor(x)
    return x - b, 1 / (v + b)


def omega_density(u, v):
    """Invariant density ``1/(log 2 * (1 + u v)**2)``."""
    if isinstance(u, float) or isinstance(v, float) or isinstance(u, np.ndarray):
        return 1.0 / (math.log(2) * (1.0 + u * v) ** 2)
    w = 1 + u * v
    ur = en.as_real(w)
    return Real(lambda prec: Interval.point(1, prec + 8) / (en.log2_interval(prec + 8) * ur.enclose(prec + 8).pow_int(2)))


def omega_rect_mass(u0, u1, v0, v1) -> float:
    """Invariant mass of ``[u0, u1] x [v0, v1]`` (closed form, float)."""
    L = math.log1p
    return (L(u1 * v1) - L(u1 * v0) - L(u0 * v1) + L(u0 * v0)) / math.log(2)


# ---------------------------------------------------------------------------
# grammar


def parse_alpha(spec: str) -> AlphaSpec:
    """``surd:a,b,d,c`` | ``cf:b0;p1,...;(q1,...)`` | ``cf-arith:b0;start,step``
    | ``cf-prefix:b0;d1,...`` | ``random:<seed>``."""
    s = spec.strip()
    try:
        if s.startswith("surd:"):
            parts = [int(x) for x in s[5:].split(",")]
            if len(parts) == 3:
                parts.append(1)
            if len(parts) != 4:
                raise AlphaParseError("surd needs a,b,d,c")
            a, b, d, c = parts
            if c == 0 or d < 0:
                raise AlphaParseError("bad surd")
            val = surd(a, b, d, c)
            if not isinstance(val, QuadSurd):
                raise RationalAlpha("alpha is rational")
            return Surd(val)
        if s.startswith("cf:"):
            m = re.fullmatch(r"cf:\s*(-?\d+)\s*;\s*([\d,\s]*)\s*;\s*\(([\d,\s]+)\)\s*", s)
            if not m:
                raise AlphaParseError(f"bad periodic spec {spec!r}")
            pre = [int(x) for x in m.group(2).split(",") if x.strip()]
            per = [int(x) for x in m.group(3).split(",") if x.strip()]
            return PeriodicDigits(int(m.group(1)), tuple(pre), tuple(per))
        if s.startswith("cf-arith:"):
            b0, rest = s[9:].split(";")
            start, step = (int(x) for x in rest.split(","))
            return ArithmeticDigits(int(b0), start, step)
        if s.startswith("cf-prefix:"):
            b0, rest = s[10:].split(";")
            ds = tuple(int(x) for x in rest.split(",") if x.strip())
            return PrefixDigits(int(b0), ds)
        if s.startswith("random:"):
            seed = int(s[7:])
            if not 0 <= seed < 1 << 64:
                raise AlphaParseError("seed must be a 64-bit unsigned integer")
            return RandomUniform(seed)
    except (ValueError, TypeError) as e:
        if isinstance(e, (AlphaParseError, RationalAlpha)):
            raise
        raise AlphaParseError(f"bad alpha spec {spec!r}: {e}") from e
    raise AlphaParseError(f"unknown alpha spec {spec!r}")
