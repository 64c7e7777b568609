"""Critical determinants of strongly symmetric norm balls.

For p-norms the minimum is the smaller of two closed-form branches,

    Delta0(p) = (1 - 2**-p)**(1/p)
    Delta1(p) = 2**(-2/p) * (1 + tau) / (1 - tau),   tau**p + 1 = 2*(1 - tau)**p,

which tie at p = 1 and p = 2 and cross again at rho in (2.57, 2.58).  For any
other norm the critical determinant is the least area of a parallelogram
with one vertex at the origin and the other three on the unit sphere;
:func:`delta_general` searches for it numerically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np
from scipy.optimize import brentq

from . import exactnum as en
from .exactnum import Interval, Ordering, QuadSurd, Real, compare, surd
from .norms import INF, Norm, PNorm, PolygonalNorm, Octagon1, Octagon2

SQRT2 = surd(0, 1, 2)
SQRT3 = surd(0, 1, 3)


class NoSolution(RuntimeError):
    pass


@dataclass(frozen=True)
class TauP:
    p: object
    tau: object  # exact or Real

    def enclosure(self, width=Fraction(1, 1 << 60)) -> Interval:
        return en.refine(self.tau, width)


@dataclass(frozen=True)
class CritResult:
    delta: object
    pair: tuple  # ((x, y), (x', y')) with P, P', P + P' on the unit sphere
    branch: str  # "Zero" | "One" | "General"

    def delta_float(self) -> float:
        return en.to_float(self.delta) if not isinstance(self.delta, float) else self.delta


# ---------------------------------------------------------------------------
# tau_p and the two branches


def _p_iv(p, prec):
    return Interval.point(Fraction(p), prec)


def tau_p(p, width=Fraction(1, 1 << 60)) -> TauP:
    """The root of ``tau**p + 1 = 2*(1 - tau)**p`` in ``(0, 1/2)``."""
    p = Fraction(p)
    if p < 1:
        raise ValueError("p must be at least 1")
    if p == 1:
        return TauP(p, Fraction(1, 3))
    if p == 2:
        return TauP(p, 2 - SQRT3)
    if p.denominator == 1:
        n = p.numerator

        def pred(t: Interval) -> Interval:
            one = Interval.point(1, t.prec)
            return t.pow_int(n) + one - (one - t).pow_int(n) * Interval.point(2, t.prec)

    else:

        def pred(t: Interval) -> Interval:
            one = Interval.point(1, t.prec)
            e = _p_iv(p, t.prec)
            return t.pow(e) + one - (one - t).pow(e) * Interval.point(2, t.prec)

    return TauP(p, en.real_from_bisection(pred, Fraction(0), Fraction(1, 2)))


def delta0(p):
    """``(1 - 2**-p)**(1/p)``."""
    if p == INF:
        return Fraction(1)
    p = Fraction(p)
    if p.denominator == 1:
        return en.root(1 - Fraction(1, 2**p.numerator), p.numerator)

    def gen(prec):
        g = prec + 16
        one = Interval.point(1, g)
        two_p = Interval.point(2, g).pow(_p_iv(p, g))
        return (one - one / two_p).pow(Interval.point(1 / p, g))

    return Real(gen)


def delta1(p):
    """``2**(-2/p) * (1 + tau_p)/(1 - tau_p)``."""
    if p == INF:
        return Fraction(1)
    p = Fraction(p)
    tau = tau_p(p).tau
    ratio = (1 + tau) / (1 - tau)
    if p == 1:
        return Fraction(1, 4) * ratio
    if p == 2:
        return ratio / 2
    c = en.root(Fraction(1, 4), p)  # 2**(-2/p)
    return c * ratio


def _two_pow_neg_inv(p):
    """``2**(-1/p)``."""
    return en.root(Fraction(1, 2), p)


def delta_p(p, width=None) -> CritResult:
    """Critical determinant of the p-norm ball with a minimizing pair."""
    if p == INF or p == "inf":
        one, zero = Fraction(1), Fraction(0)
        return CritResult(one, ((one, zero), (zero, one)), "One")
    p = Fraction(p)
    if p < 1:
        raise ValueError("p must be at least 1")
    if p == 1:
        h = Fraction(1, 2)
        return CritResult(h, ((Fraction(1), Fraction(0)), (-h, h)), "One")
    d0, d1 = delta0(p), delta1(p)
    if p == 2:
        branch = "Zero"
    else:
        r = compare(d0, d1)
        if r is Ordering.AMBIGUOUS:
            raise en.PrecisionExhausted("branches undecided")
        branch = "Zero" if r is Ordering.LESS else "One"
    if branch == "Zero":
        # P = (1, 0), P' = (1/2, (2^p - 1)^(1/p)/2); return (P', -P) so P' - P is the third vertex
        y = _half_root_2p_minus_1(p)
        pair = ((Fraction(1, 2), y), (Fraction(-1), Fraction(0)))
        return CritResult(d0, pair, branch)
    c = _two_pow_neg_inv(p)
    tau = tau_p(p).tau
    a = c / (1 - tau)
    b = c * tau / (1 - tau)
    # P = (a, -b), P' = (c, c); P - P' = (b, -a) is on the sphere
    return CritResult(d1, ((a, -b), (-c, -c)), branch)


def _half_root_2p_minus_1(p: Fraction):
    if p.denominator == 1:
        return en.root(Fraction(2**p.numerator - 1), p.numerator) / 2

    def gen(prec):
        g = prec + 16
        v = Interval.point(2, g).pow(_p_iv(p, g)) - Interval.point(1, g)
        return v.pow(Interval.point(1 / p, g)) / Interval.point(2, g)

    return Real(gen)


def _gap_float(p: float) -> float:
    if p == 2:
        return 0.0
    tau = brentq(lambda t: t**p + 1 - 2 * (1 - t) ** p, 1e-300, 0.5, xtol=1e-17, rtol=1e-15)
    d0 = (1 - 2.0**-p) ** (1 / p)
    d1 = 2.0 ** (-2 / p) * (1 + tau) / (1 - tau)
    return d0 - d1


def rho(width=Fraction(1, 1 << 30)) -> Interval:
    """Enclosure of the crossover ``Delta0(rho) = Delta1(rho)``.

    The crossover is located in floating point and the returned bracket is
    then certified by deciding the sign of ``Delta0 - Delta1`` exactly at
    both rational endpoints.
    """
    width = Fraction(width)

    def g(p):  # negative when branch Zero is the smaller
        r = compare(delta0(p), delta1(p))
        if r is Ordering.AMBIGUOUS:
            raise en.PrecisionExhausted("crossover sign undecided")
        return r.value

    guess = brentq(_gap_float, 2.5, 2.6, xtol=1e-15)
    half = max(width / 2, Fraction(1, 1 << 40))
    g0 = Fraction(guess).limit_denominator(1 << 50)
    lo, hi = g0 - half / 2, g0 + half / 2
    # widen until the certified signs bracket the root
    for _ in range(60):
        if g(lo) < 0 < g(hi):
            return Interval.from_bounds(lo, hi, 128)
        lo, hi = g0 - (g0 - lo) * 2, g0 + (hi - g0) * 2
        if hi - lo > width:
            break
    # fall back to certified bisection on the starting bracket
    lo, hi = Fraction(5, 2), Fraction(13, 5)
    if not (g(lo) < 0 < g(hi)):
        raise NoSolution("crossover not bracketed")
    while hi - lo > width:
        mid = (lo + hi) / 2
        if g(mid) < 0:
            lo = mid
        else:
            hi = mid
    return Interval.from_bounds(lo, hi, 128)


def rho_sign_changes(samples: int = 41) -> int:
    """Number of sign changes of Delta0 - Delta1 on a rational grid of (2, 3]."""
    vals = []
    for k in range(1, samples + 1):
        p = 2 + Fraction(k, samples)
        vals.append(compare(delta0(p), delta1(p)).value)
    return sum(1 for a, b in zip(vals, vals[1:]) if a != b)


# ---------------------------------------------------------------------------
# general norms


def _bp(F: Norm, th: float):
    c, s = math.cos(th), math.sin(th)
    r = F(c, s)
    return c / r, s / r


def _partner(F: Norm, th: float):
    """phi in (th, th + pi) with F(P(phi) - P(th)) = 1, and the area."""
    P = _bp(F, th)

    def g(ph):
        Q = _bp(F, ph)
        return F(Q[0] - P[0], Q[1] - P[1]) - 1.0

    ph = brentq(g, th + 1e-12, th + math.pi - 1e-12, xtol=1e-15, rtol=1e-15, maxiter=200)
    Q = _bp(F, ph)
    return ph, abs(P[0] * Q[1] - P[1] * Q[0]), P, Q


def delta_general(F: Norm, grid: int = 96, polish_iters: int = 80) -> CritResult:
    """Least area of an origin-anchored parallelogram inscribed in the unit ball.

    Grid search over the direction of one vertex followed by golden-section
    refinement around the best cells.
    """
    if grid < 8:
        raise ValueError("grid must be at least 8")
    # strong symmetry: the area function has period pi/2
    thetas = np.linspace(0.0, math.pi / 2, grid, endpoint=False)
    try:
        areas = [(_partner(F, th)[1], th) for th in thetas]
    except ValueError as e:
        raise NoSolution(str(e)) from e
    areas.sort()
    h = (math.pi / 2) / grid
    best = None
    invphi = (math.sqrt(5) - 1) / 2
    for _, th0 in areas[:4]:
        a, b = th0 - h, th0 + h
        c, d = b - invphi * (b - a), a + invphi * (b - a)
        fc, fd = _partner(F, c)[1], _partner(F, d)[1]
        for _ in range(polish_iters):
            if fc < fd:
                b, d, fd = d, c, fc
                c = b - invphi * (b - a)
                fc = _partner(F, c)[1]
            else:
                a, c, fc = c, d, fd
                d = a + invphi * (b - a)
                fd = _partner(F, d)[1]
        th = (a + b) / 2
        ph, area, P, Q = _partner(F, th)
        if best is None or area < best[0]:
            best = (area, P, Q)
    area, P, Q = best
    # P, Q and Q - P lie on the sphere: report (Q, -P)
    return CritResult(area, ((Q[0], Q[1]), (-P[0], -P[1])), "General")


def ball_area(F: Norm) -> float:
    if isinstance(F, PNorm):
        if F.p == INF:
            return 4.0
        p = float(F.p)
        return 4 * math.gamma(1 + 1 / p) ** 2 / math.gamma(1 + 2 / p)
    return float(F.area())


def minkowski_lower_bound(F: Norm) -> float:
    return ball_area(F) / 4


OCT1_DELTA = SQRT2 - Fraction(1, 2)
OCT2_DELTA = (3 * SQRT2 + 2) / 8


def _same_polygon(F: Norm, G: PolygonalNorm) -> bool:
    fs = F.facets
    return fs is not None and set(map(_key, fs)) == set(map(_key, G.facets))


def _key(ab):
    return tuple(x.key() if isinstance(x, QuadSurd) else ("q", Fraction(x)) for x in ab)


def critical_determinant(F: Norm):
    """Delta(F): exact for p-norms with closed forms and the two octagons,
    a float from :func:`delta_general` otherwise."""
    if isinstance(F, PNorm):
        return delta_p(F.p).delta
    if _same_polygon(F, Octagon1()):
        return OCT1_DELTA
    if _same_polygon(F, Octagon2()):
        return OCT2_DELTA
    return delta_general(F).delta


def critdet(F: Norm) -> CritResult:
    """CritResult for any norm: closed form for p-norms, search otherwise."""
    if isinstance(F, PNorm):
        return delta_p(F.p)
    return delta_general(F)
