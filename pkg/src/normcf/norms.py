"""Strongly symmetric norms on the plane.

A norm ``F`` is strongly symmetric when ``F(x, y) = F(|x|, |y|)`` and it is
normalized by ``F(1, 0) = F(0, 1) = 1``.  The stretched norm is
``F_t(x, y) = F(x/t, t*y)``.

Polygonal norms are stored through their facets: ``F(x, y) = max_i a_i|x| + b_i|y|``
with exact coefficients, which makes every stretching problem solvable
inside the coefficient field.  Throughout, ``w`` denotes ``t**2``.
"""
from __future__ import annotations

import math
import re
from abc import ABC, abstractmethod
from fractions import Fraction

import mpmath
import numpy as np

from . import exactnum as en
from .exactnum import (
    Interval,
    Ordering,
    QuadSurd,
    Real,
    compare,
    enclose,
    is_exact,
    nabs,
    nmax,
    power,
    root,
    surd,
)

SQRT2 = surd(0, 1, 2)
INF = math.inf


class PreconditionViolated(ValueError):
    pass


class NormParseError(ValueError):
    pass


def _rough_float(x):
    """A float near ``x``, or None when ``x`` cannot be pinned to 2^-40."""
    for width in (Fraction(1, 1 << 60), Fraction(1, 1 << 40)):
        try:
            return float(en.refine(x, width).mid()) if not isinstance(x, float) else x
        except en.PrecisionExhausted:
            continue
    return None


def _is_floatlike(x) -> bool:
    return isinstance(x, (float, np.floating, mpmath.mpf))


def _is_mp(x) -> bool:
    return isinstance(x, mpmath.mpf)


class Norm(ABC):
    """Base class; subclasses implement the four evaluation back ends."""

    spec: str

    # evaluation ---------------------------------------------------------
    def __call__(self, x, y):
        if _is_floatlike(x) or _is_floatlike(y):
            if _is_mp(x) or _is_mp(y):
                return self._evalf(mpmath.mpf(x), mpmath.mpf(y))
            return self._evalf(float(x), float(y))
        return self._eval_exact(x, y)

    def eval(self, P):
        return self(P[0], P[1])

    @abstractmethod
    def _evalf(self, x, y):
        """Evaluate at float or mpf coordinates."""

    @abstractmethod
    def _eval_exact(self, x, y):
        """Evaluate at exact or Real coordinates (result exact when possible)."""

    @abstractmethod
    def eval_iv(self, x: Interval, y: Interval) -> Interval:
        """Interval enclosure of F over a box."""

    @abstractmethod
    def eval_np(self, x, y):
        """Vectorized float evaluation."""

    @property
    def facets(self):
        """Facet list ``[(a_i, b_i)]`` for polygonal norms, else None."""
        return None

    # stretching ---------------------------------------------------------
    def stretched(self, t, x, y):
        return self(x / t, y * t)

    def stretched_sq(self, w, x, y):
        """``F_t(x, y)**2`` with ``w = t**2``."""
        t = root(w, 2) if not _is_floatlike(w) else w**0.5
        v = self.stretched(t, x, y)
        return v * v

    def equalize_w(self, P, Q):
        """Return ``w = t**2`` with ``F_t(P) = F_t(Q)``.

        Requires the coordinates of ``P`` and ``Q`` to be ordered oppositely
        (``|x_P| < |x_Q|`` and ``|y_P| > |y_Q|``, or the mirror), which is
        what makes the crossing unique.
        """
        t = self.equalize_t(P, Q)
        return t * t

    def equalize_t(self, P, Q):
        """The unique ``t > 0`` with ``F_t(P) = F_t(Q)``."""
        dx, _ = _orientation(P, Q)
        if any(_is_floatlike(c) for c in (*P, *Q)):
            return self._equalize_t_float(P, Q)
        return self._equalize_t_certified(P, Q, dx)

    # generic certified bisection on log2 t ------------------------------
    def _equalize_t_float(self, P, Q):
        f = lambda t: self.stretched(t, P[0], P[1]) - self.stretched(t, Q[0], Q[1])
        lo, hi = _bracket(lambda t: float(f(t)))
        if lo == hi:
            return lo
        return _bisect_float(lambda t: float(f(t)), lo, hi)

    def _equalize_t_certified(self, P, Q, dx):
        fl = lambda t: float(
            self.stretched(t, float(en.to_float(P[0])), float(en.to_float(P[1])))
            - self.stretched(t, float(en.to_float(Q[0])), float(en.to_float(Q[1])))
        )
        lo, hi = _bracket(fl)
        # widen the float bracket a little, then certify by interval bisection
        lo, hi = Fraction(lo) / 2 if lo > 0 else Fraction(0), Fraction(hi) * 2
        if lo == 0:
            lo = Fraction(1, 1 << 40)
        sgn = 1 if dx < 0 else -1  # G(t) = F_t(P) - F_t(Q) increases when |x_P| < |x_Q|

        def pred(t_iv: Interval) -> Interval:
            prec = t_iv.prec
            px, py = enclose(P[0], prec), enclose(P[1], prec)
            qx, qy = enclose(Q[0], prec), enclose(Q[1], prec)
            g = self.eval_iv(px / t_iv, py * t_iv) - self.eval_iv(qx / t_iv, qy * t_iv)
            return g if sgn > 0 else -g

        return en.real_from_bisection(pred, lo, hi)

    # boundary -------------------------------------------------------------
    def boundary_point(self, theta):
        """Point on the unit sphere in direction ``theta`` (float or mpf)."""
        if _is_mp(theta):
            c, s = mpmath.cos(theta), mpmath.sin(theta)
        else:
            c, s = math.cos(theta), math.sin(theta)
        r = self(c, s)
        return (c / r, s / r)

    def boundary_np(self, theta):
        c, s = np.cos(theta), np.sin(theta)
        r = self.eval_np(c, s)
        return c / r, s / r

    def area(self, dps: int = 30):
        """Area of the unit ball by adaptive quadrature over one quadrant."""
        with mpmath.workdps(dps):
            f = lambda th: 1 / self(mpmath.cos(th), mpmath.sin(th)) ** 2
            pts = [0, mpmath.pi / 8, mpmath.pi / 4, 3 * mpmath.pi / 8, mpmath.pi / 2]
            return 2 * mpmath.quad(f, pts)

    def __repr__(self):
        return f"<{type(self).__name__} {self.spec}>"

    def __eq__(self, other):
        return isinstance(other, Norm) and self.spec == other.spec

    def __hash__(self):
        return hash(self.spec)


def _orientation(P, Q):
    """Signs of |x_P| - |x_Q| and |y_P| - |y_Q|; rejects non-crossing pairs."""
    def s(a, b):
        if _is_floatlike(a) or _is_floatlike(b):
            d = abs(float(a)) - abs(float(b))
            return (d > 0) - (d < 0)
        r = compare(nabs(a), nabs(b))
        if r is Ordering.AMBIGUOUS:
            raise en.AmbiguousComparison("cannot order coordinates")
        return r.value

    dx, dy = s(P[0], Q[0]), s(P[1], Q[1])
    if dx == 0 and dy == 0:
        raise PreconditionViolated("P and Q have equal coordinate sizes")
    if dx * dy >= 0:
        raise PreconditionViolated("one point dominates the other; no unique stretch equalizes them")
    return dx, dy


def _bracket(f):
    """Float bracket [lo, hi] of the sign change of a monotone f on (0, inf)."""
    f1 = f(1.0)
    if f1 == 0:
        return 1.0, 1.0
    lo, hi = 1.0, 1.0
    # try both directions, doubling
    for _ in range(2000):
        hi *= 2.0
        if f(hi) * f1 <= 0:
            return hi / 2, hi
        lo /= 2.0
        if f(lo) * f1 <= 0:
            return lo, lo * 2
    raise PreconditionViolated("no stretch factor found")


def _bisect_float(f, lo, hi, iters=200):
    flo = f(lo)
    for _ in range(iters):
        mid = (lo + hi) / 2
        if mid == lo or mid == hi:
            break
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return (lo + hi) / 2


# ---------------------------------------------------------------------------
# polygonal norms


def _prune_facets(facets):
    """Drop duplicate and componentwise-dominated facets (exact)."""
    out = []
    for i, (a, b) in enumerate(facets):
        dominated = False
        for j, (c, d) in enumerate(facets):
            if i == j:
                continue
            ge_a = compare(c, a) is not Ordering.LESS
            ge_b = compare(d, b) is not Ordering.LESS
            if ge_a and ge_b and ((c, d) != (a, b) or j < i):
                dominated = True
                break
        if not dominated:
            out.append((a, b))
    return out


def _to_field(x):
    if isinstance(x, int):
        return Fraction(x)
    return x


class PolygonalNorm(Norm):
    """``F(x, y) = max_i a_i|x| + b_i|y|`` with exact non-negative facets."""

    def __init__(self, facets, spec: str):
        fs = [(_to_field(a), _to_field(b)) for a, b in facets]
        self._facets = tuple(_prune_facets(fs))
        self.spec = spec
        self._ff = np.array([[float(a), float(b)] for a, b in self._facets])

    @property
    def facets(self):
        return self._facets

    def _evalf(self, x, y):
        ax, ay = abs(x), abs(y)
        if _is_mp(x):
            return max(_mpf_of(a) * ax + _mpf_of(b) * ay for a, b in self._facets)
        return max(a * ax + b * ay for a, b in self._ff)

    def _eval_exact(self, x, y):
        ax, ay = nabs(x), nabs(y)
        return nmax(*(a * ax + b * ay for a, b in self._facets))

    def eval_iv(self, x, y):
        ax, ay = abs(x), abs(y)
        prec = max(x.prec, y.prec)
        out = None
        for a, b in self._facets:
            v = enclose(a, prec) * ax + enclose(b, prec) * ay
            out = v if out is None else Interval.maximum(out, v)
        return out

    def eval_np(self, x, y):
        ax = np.abs(np.asarray(x, dtype=float))
        ay = np.abs(np.asarray(y, dtype=float))
        out = None
        for a, b in self._ff:
            v = a * ax + b * ay
            out = v if out is None else np.maximum(out, v)
        return out

    # exact stretching --------------------------------------------------
    def _scaled_max(self, x, y, w):
        # t * F_t(x, y) = max_i a_i|x| + b_i|y| w
        ax, ay = nabs(x), nabs(y)
        return nmax(*(a * ax + b * ay * w for a, b in self._facets))

    def stretched_sq(self, w, x, y):
        if _is_floatlike(w):
            return super().stretched_sq(w, x, y)
        m = self._scaled_max(x, y, w)
        return m * m / w

    def equalize_w(self, P, Q):
        if any(_is_floatlike(c) for c in (*P, *Q)):
            t = self._equalize_t_float(P, Q)
            return t * t
        _orientation(P, Q)
        xp, yp, xq, yq = (nabs(c) for c in (*P, *Q))
        fx = [_rough_float(c) for c in (xp, yp, xq, yq)]
        cands = []
        # float solution to preselect the active facets; inputs known only
        # coarsely (finite digit prefixes) skip straight to the bisection
        tf = None if None in fx else self._equalize_t_float((fx[0], fx[1]), (fx[2], fx[3]))
        wf = None if tf is None else tf * tf
        for i, (a, b) in enumerate(self._facets if wf is not None else ()):
            for j, (c, d) in enumerate(self._facets):
                # a xp + b yp w = c xq + d yq w
                den_f = float(b) * fx[1] - float(d) * fx[3]
                if den_f == 0:
                    continue
                wij = (float(c) * fx[2] - float(a) * fx[0]) / den_f
                if wij > 0 and abs(wij - wf) <= 1e-7 * max(1.0, wf):
                    cands.append((i, j))
        cands.sort(key=lambda ij: (ij[0], ij[1]))
        for i, j in cands:
            a, b = self._facets[i]
            c, d = self._facets[j]
            den = b * yp - d * yq
            if is_exact(den) and den == 0:
                continue
            w = (c * xq - a * xp) / den
            if self._verify_equal(P, Q, w, i, j):
                return w
        # fall back to certified bisection
        t = self._equalize_t_certified(P, Q, _orientation(P, Q)[0])
        return t * t

    def _verify_equal(self, P, Q, w, i, j):
        xp, yp, xq, yq = (nabs(c) for c in (*P, *Q))
        lhs = [a * xp + b * yp * w for a, b in self._facets]
        rhs = [a * xq + b * yq * w for a, b in self._facets]
        if all(is_exact(z) for z in lhs + rhs + [w]):
            return compare(w, 0) is Ordering.GREATER and max_exact(lhs) == lhs[i] and max_exact(rhs) == rhs[j]
        # Real data: facet i must dominate on the left and facet j on the right
        for k in range(len(self._facets)):
            if k != i and compare(lhs[k], lhs[i], max_bits=512) is Ordering.GREATER:
                return False
            if k != j and compare(rhs[k], rhs[j], max_bits=512) is Ordering.GREATER:
                return False
        return True

    def equalize_t(self, P, Q):
        w = self.equalize_w(P, Q)
        if isinstance(w, float):
            return math.sqrt(w)
        return root(w, 2)

    def vertices(self):
        """Vertices of the unit ball in the closed first quadrant, by angle."""
        pts = []
        fs = self._facets
        for i in range(len(fs)):
            for j in range(i + 1, len(fs)):
                a, b = fs[i]
                c, d = fs[j]
                det = a * d - b * c
                if is_exact(det) and det == 0:
                    continue
                x = (d - b) / det
                y = (a - c) / det
                if compare(x, 0) is Ordering.LESS or compare(y, 0) is Ordering.LESS:
                    continue
                if self(x, y) == 1:
                    pts.append((x, y))
        for x, y in ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))):
            if self(x, y) == 1 and (x, y) not in pts:
                pts.append((x, y))
        uniq = []
        for p in pts:
            if p not in uniq:
                uniq.append(p)
        uniq.sort(key=lambda p: math.atan2(en.to_float(p[1]), en.to_float(p[0])))
        return uniq


def max_exact(xs):
    best = xs[0]
    for x in xs[1:]:
        if compare(x, best) is Ordering.GREATER:
            best = x
    return best


def _mpf_of(x):
    if isinstance(x, (int, Fraction)):
        return mpmath.mpf(x.numerator) / x.denominator if isinstance(x, Fraction) else mpmath.mpf(x)
    if isinstance(x, QuadSurd):
        return (x.a + x.b * mpmath.sqrt(x.d)) / x.c
    return mpmath.mpf(en.to_float(x))


# ---------------------------------------------------------------------------
# p-norms


class PNorm(Norm):
    """The p-norm ``(|x|^p + |y|^p)^(1/p)``, ``1 <= p <= inf``."""

    def __init__(self, p):
        if p == INF or (isinstance(p, str) and p in ("inf", "∞")):
            self.p = INF
            self.spec = "p:inf"
        else:
            p = Fraction(p) if not isinstance(p, Fraction) else p
            if p < 1:
                raise ValueError("p must be at least 1")
            self.p = p
            self.spec = "p:" + _fmt_decimal(p)
        self._poly = None
        if self.p == 1:
            self._poly = PolygonalNorm([(1, 1)], self.spec)
        elif self.p == INF:
            self._poly = PolygonalNorm([(1, 0), (0, 1)], self.spec)

    @property
    def is_inf(self):
        return self.p == INF

    @property
    def facets(self):
        return self._poly.facets if self._poly else None

    def p_float(self):
        return INF if self.is_inf else float(self.p)

    def _evalf(self, x, y):
        ax, ay = abs(x), abs(y)
        if self.is_inf:
            return max(ax, ay)
        if self.p == 1:
            return ax + ay
        if self.p == 2:
            return mpmath.sqrt(ax * ax + ay * ay) if _is_mp(ax) else math.hypot(ax, ay)
        if _is_mp(ax):
            p = mpmath.mpf(self.p.numerator) / self.p.denominator
        else:
            p = float(self.p)
            m = max(ax, ay)
            if m == 0:
                return 0.0
            # factor out the max to avoid underflow
            return m * ((ax / m) ** p + (ay / m) ** p) ** (1 / p)
        if ax == 0 and ay == 0:
            return mpmath.mpf(0)
        return (ax**p + ay**p) ** (1 / p)

    def _eval_exact(self, x, y):
        if self._poly is not None:
            return self._poly._eval_exact(x, y)
        ax, ay = nabs(x), nabs(y)
        s = power(ax, self.p) + power(ay, self.p)
        return root(s, self.p)

    def eval_iv(self, x, y):
        if self._poly is not None:
            return self._poly.eval_iv(x, y)
        ax, ay = abs(x), abs(y)
        prec = max(x.prec, y.prec)
        if self.p.denominator == 1:
            n = self.p.numerator
            s = ax.pow_int(n) + ay.pow_int(n)
        else:
            pi = Interval.point(self.p, prec)
            s = ax.pow(pi) + ay.pow(pi)
        return s.pow(Interval.point(Fraction(1) / self.p, prec))

    def eval_np(self, x, y):
        ax = np.abs(np.asarray(x, dtype=float))
        ay = np.abs(np.asarray(y, dtype=float))
        if self.is_inf:
            return np.maximum(ax, ay)
        if self.p == 1:
            return ax + ay
        if self.p == 2:
            return np.hypot(ax, ay)
        p = float(self.p)
        m = np.maximum(ax, ay)
        safe = np.where(m > 0, m, 1.0)
        return np.where(m > 0, m * ((ax / safe) ** p + (ay / safe) ** p) ** (1 / p), 0.0)

    def stretched_sq(self, w, x, y):
        if self._poly is not None:
            return self._poly.stretched_sq(w, x, y)
        if self.p == 2 and not _is_floatlike(w):
            return x * x / w + y * y * w
        return super().stretched_sq(w, x, y)

    def equalize_w(self, P, Q):
        if self._poly is not None:
            return self._poly.equalize_w(P, Q)
        if any(_is_floatlike(c) for c in (*P, *Q)):
            t = self._equalize_t_float(P, Q)
            return t * t
        _orientation(P, Q)
        # t^(2p) = (|x_Q|^p - |x_P|^p) / (|y_P|^p - |y_Q|^p)
        xp, yp, xq, yq = (power(nabs(c), self.p) for c in (*P, *Q))
        ratio = (xq - xp) / (yp - yq)
        return root(ratio, self.p)

    def equalize_t(self, P, Q):
        if self._poly is not None:
            return self._poly.equalize_t(P, Q)
        if any(_is_floatlike(c) for c in (*P, *Q)):
            return self._equalize_t_float(P, Q)
        _orientation(P, Q)
        xp, yp, xq, yq = (power(nabs(c), self.p) for c in (*P, *Q))
        ratio = (xq - xp) / (yp - yq)
        return root(ratio, 2 * self.p)

    def equalize_t_np(self, Px, Py, Qx, Qy):
        """Vectorized closed-form stretch factor for float arrays."""
        if self._poly is not None:
            return equalize_t_np(self, Px, Py, Qx, Qy)
        p = float(self.p)
        xp, yp, xq, yq = (np.abs(np.asarray(c, dtype=float)) ** p for c in (Px, Py, Qx, Qy))
        return ((xq - xp) / (yp - yq)) ** (1 / (2 * p))


def equalize_t_np(F: Norm, Px, Py, Qx, Qy, iters: int = 80):
    """Vectorized float stretch factor by bisection on log t."""
    if isinstance(F, PNorm) and F._poly is None:
        return F.equalize_t_np(Px, Py, Qx, Qy)
    Px, Py, Qx, Qy = np.broadcast_arrays(*(np.asarray(c, dtype=float) for c in (Px, Py, Qx, Qy)))
    orient = np.sign(np.abs(Qx) - np.abs(Px))  # +1: gap increases in t
    lo = np.full(Px.shape, -60.0)
    hi = np.full(Px.shape, 60.0)

    def gap(lt):
        t = np.exp2(lt)
        return orient * (F.eval_np(Px / t, Py * t) - F.eval_np(Qx / t, Qy * t))

    for _ in range(iters):
        mid = (lo + hi) / 2
        g = gap(mid)
        pos = g > 0
        hi = np.where(pos, mid, hi)
        lo = np.where(pos, lo, mid)
    return np.exp2((lo + hi) / 2)


# ---------------------------------------------------------------------------
# scaling and composition


class Scaled(Norm):
    """``c * F``; not normalized on its own, used inside compositions."""

    def __init__(self, c, inner: Norm):
        self.c = c
        self.inner = inner
        self.spec = f"scaled({_fmt_number(c)};{inner.spec})"

    @property
    def facets(self):
        fs = self.inner.facets
        if fs is None:
            return None
        return [(self.c * a, self.c * b) for a, b in fs]

    def _evalf(self, x, y):
        c = _mpf_of(self.c) if _is_mp(x) else float(self.c)
        return c * self.inner._evalf(x, y)

    def _eval_exact(self, x, y):
        return self.c * self.inner._eval_exact(x, y)

    def eval_iv(self, x, y):
        return enclose(self.c, max(x.prec, y.prec)) * self.inner.eval_iv(x, y)

    def eval_np(self, x, y):
        return float(self.c) * self.inner.eval_np(x, y)


class Composed(Norm):
    """``K(P) = s * H(F(P), G(P))`` with ``s = 1/K(1, 0)``."""

    def __init__(self, outer: Norm, left: Norm, right: Norm):
        self.outer, self.left, self.right = outer, left, right
        k10 = outer._eval_exact(left._eval_exact(Fraction(1), Fraction(0)),
                                right._eval_exact(Fraction(1), Fraction(0)))
        self.scale = 1 / k10
        self.spec = f"compose({outer.spec};{left.spec};{right.spec})"
        self._poly = None
        fo, fl, fr = outer.facets, left.facets, right.facets
        if fo is not None and fl is not None and fr is not None:
            facets = []
            for a, b in fo:
                for c, d in fl:
                    for e, f in fr:
                        facets.append(
                            (self.scale * (a * c + b * e), self.scale * (a * d + b * f))
                        )
            self._poly = PolygonalNorm(facets, self.spec)

    @property
    def facets(self):
        return self._poly.facets if self._poly else None

    def as_polygonal(self):
        return self._poly

    def _evalf(self, x, y):
        s = _mpf_of(self.scale) if _is_mp(x) else float(self.scale)
        return s * self.outer._evalf(self.left._evalf(x, y), self.right._evalf(x, y))

    def _eval_exact(self, x, y):
        return self.scale * self.outer._eval_exact(self.left._eval_exact(x, y), self.right._eval_exact(x, y))

    def eval_iv(self, x, y):
        prec = max(x.prec, y.prec)
        return enclose(self.scale, prec) * self.outer.eval_iv(self.left.eval_iv(x, y), self.right.eval_iv(x, y))

    def eval_np(self, x, y):
        return float(self.scale) * self.outer.eval_np(self.left.eval_np(x, y), self.right.eval_np(x, y))

    def stretched_sq(self, w, x, y):
        if self._poly is not None:
            return self._poly.stretched_sq(w, x, y)
        return super().stretched_sq(w, x, y)

    def equalize_w(self, P, Q):
        if self._poly is not None:
            return self._poly.equalize_w(P, Q)
        return super().equalize_w(P, Q)

    def equalize_t(self, P, Q):
        if self._poly is not None:
            return self._poly.equalize_t(P, Q)
        return super().equalize_t(P, Q)


def compose(H: Norm, F: Norm, G: Norm) -> Composed:
    return Composed(H, F, G)


# ---------------------------------------------------------------------------
# the two octagons

HALF_SQRT2 = SQRT2 / 2
SQRT2_M1 = SQRT2 - 1


class Octagon1(PolygonalNorm):
    """``max(|x|, |y|, (|x|+|y|)/sqrt 2)``."""

    def __init__(self):
        super().__init__([(1, 0), (0, 1), (HALF_SQRT2, HALF_SQRT2)], "oct1")


class Octagon2(PolygonalNorm):
    """``max(|x| + (sqrt2-1)|y|, (sqrt2-1)|x| + |y|)``."""

    def __init__(self):
        super().__init__([(1, SQRT2_M1), (SQRT2_M1, 1)], "oct2")


def oct1_by_composition() -> Composed:
    return compose(PNorm(INF), Scaled(HALF_SQRT2, PNorm(1)), PNorm(INF))


def oct2_by_composition() -> Composed:
    return compose(PNorm(1), Scaled(HALF_SQRT2, PNorm(1)), PNorm(INF))


# ---------------------------------------------------------------------------
# spec grammar


def _fmt_decimal(p: Fraction) -> str:
    if p.denominator == 1:
        return str(p.numerator)
    # terminating decimals print as decimals, others as a/b
    d = p.denominator
    while d % 2 == 0:
        d //= 2
    while d % 5 == 0:
        d //= 5
    if d != 1:
        return f"{p.numerator}/{p.denominator}"
    s = f"{float(p):.15g}"
    if Fraction(s) == p:
        return s
    return f"{p.numerator}/{p.denominator}"


def _fmt_number(c) -> str:
    if isinstance(c, QuadSurd):
        return f"surd:{c.a},{c.b},{c.d},{c.c}"
    return _fmt_decimal(Fraction(c))


def parse_number(s: str):
    """Rational decimal, ``a/b``, or ``surd:a,b,d,c``."""
    s = s.strip()
    if s.startswith("surd:"):
        parts = s[5:].split(",")
        if len(parts) not in (3, 4):
            raise NormParseError(f"bad surd literal {s!r}")
        try:
            vals = [int(x) for x in parts]
        except ValueError as e:
            raise NormParseError(f"bad surd literal {s!r}") from e
        if len(vals) == 3:
            vals.append(1)
        a, b, d, c = vals
        if c == 0 or d < 0:
            raise NormParseError(f"bad surd literal {s!r}")
        return surd(a, b, d, c)
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as e:
        raise NormParseError(f"bad number {s!r}") from e


def _split_args(body: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in body:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise NormParseError("unbalanced parentheses")
        if ch == ";" and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth != 0:
        raise NormParseError("unbalanced parentheses")
    parts.append("".join(cur))
    return [p.strip() for p in parts]


_CALL = re.compile(r"^(compose|scaled)\((.*)\)$", re.S)


def parse_norm(spec: str) -> Norm:
    """Parse ``p:<decimal|inf>``, ``oct1``, ``oct2``, ``compose(H;F;G)``.

    ``scaled(<number>;<spec>)`` is accepted inside compositions.
    """
    s = spec.strip()
    if s == "oct1":
        return Octagon1()
    if s == "oct2":
        return Octagon2()
    if s.startswith("p:"):
        body = s[2:].strip()
        if body in ("inf", "∞", "Inf", "INF"):
            return PNorm(INF)
        try:
            p = Fraction(body)
        except (ValueError, ZeroDivisionError) as e:
            raise NormParseError(f"bad exponent in {spec!r}") from e
        if p < 1:
            raise NormParseError("p must be at least 1")
        return PNorm(p)
    m = _CALL.match(s)
    if m:
        name, body = m.group(1), m.group(2)
        args = _split_args(body)
        if name == "compose":
            if len(args) != 3:
                raise NormParseError("compose takes three norms")
            return compose(*(parse_norm(a) for a in args))
        if len(args) != 2:
            raise NormParseError("scaled takes a number and a norm")
        c = parse_number(args[0])
        if compare(c, 0) is not Ordering.GREATER:
            raise NormParseError("scale must be positive")
        return Scaled(c, parse_norm(args[1]))
    raise NormParseError(f"unknown norm spec {spec!r}")


def is_normalized(F: Norm) -> bool:
    return F(Fraction(1), Fraction(0)) == 1 and F(Fraction(0), Fraction(1)) == 1
