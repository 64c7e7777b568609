"""The F-continued fraction.

The semi-regular expansion attached to a norm ``F`` is obtained from the
regular one by omitting every regular index ``n`` whose natural-extension
point ``(u_n, v_n)`` lies in the singularization area ``S_F``.  Omitting
``n`` rewrites the digits ``b_n, 1, b_{n+2}`` as ``b_n + 1, -1, b_{n+2} + 1``.

:func:`lattice_oracle` recomputes the same convergents from scratch by
stretching the unit ball of ``F`` across the lattice
``{(q, p - q*alpha)}``; it shares no code with the expansion.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from . import exactnum as en
from .exactnum import AmbiguousComparison, Ordering, QuadSurd, compare, power
from .norms import INF, Norm, PNorm, PolygonalNorm
from .regcf import AlphaSpec, PrefixDigits, RandomStream, RegularCF

HALF = Fraction(1, 2)


class Membership(enum.Enum):
    IN = "In"
    OUT = "Out"
    BOUNDARY = "Boundary"

    @property
    def singularizes(self) -> bool:
        return self is not Membership.OUT


class CapExceeded(RuntimeError):
    pass


def _decide(lhs, rhs, strict_in: str) -> Membership:
    """``strict_in='<'``: In when lhs < rhs; ``'>'``: In when lhs > rhs."""
    r = compare(lhs, rhs)
    if r is Ordering.AMBIGUOUS:
        raise AmbiguousComparison("membership undecided at the precision cap")
    if r is Ordering.EQUAL:
        return Membership.BOUNDARY
    inside = (r is Ordering.LESS) if strict_in == "<" else (r is Ordering.GREATER)
    return Membership.IN if inside else Membership.OUT


def in_singularization_area(F: Norm, u, v) -> Membership:
    """Classify ``(u, v)`` in ``[0,1) x [0,1]`` against the closed area ``S_F``."""
    if isinstance(u, float) or isinstance(v, float):
        return _membership_float(F, u, v)
    r = compare(u, HALF)
    if r is Ordering.AMBIGUOUS:
        raise AmbiguousComparison("u undecided against 1/2")
    if r is Ordering.LESS:
        return Membership.OUT
    if en.is_exact(v) and v == 0:
        return Membership.BOUNDARY if r is Ordering.EQUAL else Membership.IN
    if en.is_exact(v) and v == 1:
        return Membership.OUT
    if isinstance(F, PNorm):
        p = F.p
        if p == INF:
            return Membership.OUT
        if p == 1:
            # v <= 2 - 1/u  <=>  u >= 1/(2 - v)
            return _decide(u, 1 / (2 - v), ">")
        if p == 2:
            return _decide(u * (2 + v), 1 + 2 * v, ">")
        lhs = (power(1 + v, p) - 1) * (1 - power(u, p))
        rhs = (1 - power(v, p)) * (power(u, p) - power(1 - u, p))
        return _decide(lhs, rhs, "<")
    # general path: P = (1, -u), P' = (v, 1) at the equalizing stretch
    w = F.equalize_w((Fraction(1), -u), (v, Fraction(1)))
    lhs = F.stretched_sq(w, 1 + v, 1 - u)
    rhs = F.stretched_sq(w, Fraction(1), u)
    return _decide(lhs, rhs, "<")


def _membership_float(F: Norm, u: float, v: float) -> Membership:
    if u < 0.5:
        return Membership.OUT
    if v == 0:
        return Membership.IN
    if v >= 1:
        return Membership.OUT
    if isinstance(F, PNorm):
        if F.p == INF:
            return Membership.OUT
        p = float(F.p)
        lhs = ((1 + v) ** p - 1) * (1 - u**p)
        rhs = (1 - v**p) * (u**p - (1 - u) ** p)
    else:
        t = F.equalize_t((1.0, -u), (v, 1.0))
        lhs = F.stretched(t, 1 + v, 1 - u)
        rhs = F.stretched(t, 1.0, u)
    if lhs == rhs:
        return Membership.BOUNDARY
    return Membership.IN if lhs < rhs else Membership.OUT


# ---------------------------------------------------------------------------
# S-expansion


@dataclass
class SemiRegularCF:
    norm: Norm
    alpha: AlphaSpec
    regular: RegularCF
    a0: int
    terms: list = field(default_factory=list)  # (eps_m, a_m), m >= 1
    convergents: list = field(default_factory=list)  # (p_m, q_m), m >= 0
    gamma: list = field(default_factory=list)  # gamma_m, m >= 0
    retained: list = field(default_factory=list)  # regular index n_m
    singularized: list = field(default_factory=list)
    boundary: list = field(default_factory=list)  # indices decided by equality

    def __len__(self):
        return len(self.convergents)

    def gap(self, m: int) -> int:
        prev = self.retained[m - 1] if m > 0 else -1
        return self.retained[m] - prev

    def q(self) -> list[int]:
        return [q for _, q in self.convergents]


def s_expand(F: Norm, alpha: AlphaSpec | RegularCF, m_terms: int) -> SemiRegularCF:
    """Expand ``alpha`` into at least ``m_terms + 1`` convergents ``m = 0..m_terms``."""
    reg = alpha if isinstance(alpha, RegularCF) else RegularCF(alpha)
    spec = reg.alpha
    retained: list[int] = []
    omitted: list[int] = []
    boundary: list[int] = []
    n = 0
    last_omitted = -10
    while len(retained) <= m_terms:
        u, v = reg.uv(n)
        mem = in_singularization_area(F, u, v)
        if mem is Membership.BOUNDARY:
            boundary.append(n)
        if mem.singularizes:
            if last_omitted == n - 1:
                raise RuntimeError(f"consecutive omissions at {n - 1} and {n}")
            if reg.b(n + 1) != 1:
                raise RuntimeError(f"omitted index {n} is not followed by the digit 1")
            omitted.append(n)
            last_omitted = n
        else:
            retained.append(n)
        n += 1

    convs = [reg.rs(k) for k in retained]
    a0 = convs[0][0]
    cf = SemiRegularCF(F, spec, reg, a0, retained=retained, singularized=omitted, boundary=boundary)
    cf.convergents = convs
    # digits by Cramer on p_m = a p_{m-1} + eps p_{m-2}, q likewise
    prev2, prev1 = (0, 1), (1, 0)  # (p_{-2}, q_{-2}), (p_{-1}, q_{-1})
    eps_prod = 1
    cf.gamma = [1]
    for m, (p, q) in enumerate(convs):
        if m == 0:
            prev2, prev1 = prev1, (p, q)
            continue
        (p1, q1), (p2, q2) = prev1, prev2
        det = p1 * q2 - p2 * q1
        a, ra = divmod(p * q2 - p2 * q, det)
        eps, re = divmod(p1 * q - p * q1, det)
        if ra or re or eps not in (1, -1) or a < 1:
            raise RuntimeError(f"inconsistent semi-regular digits at m={m}")
        cf.terms.append((eps, a))
        eps_prod *= eps
        cf.gamma.append((-1) ** m * eps_prod)
        prev2, prev1 = prev1, (p, q)
    return cf


def munu(cf: SemiRegularCF, m: int):
    """``(mu_m, nu_m)``: exact for quadratic alpha, else Real/Fraction."""
    reg = cf.regular
    n = cf.retained[m]
    g = cf.gap(m)
    if g == 1:
        return reg.u(n), reg.v(n)
    return -reg.u(n) * reg.u(n - 1), reg.v(n) * reg.v(n - 1)


def munu_float(cf: SemiRegularCF, m: int) -> tuple[float, float]:
    mu, nu = munu(cf, m)
    return en.to_float(mu), float(nu)


# ---------------------------------------------------------------------------
# necessary condition for best approximations


def necessary_condition(p, cf: RegularCF, n: int) -> bool:
    """``s_n |r_n - alpha s_n| <= (4**(1/p) * Delta_p)**-1``."""
    from .critdet import delta_p

    if p == INF:
        raise ValueError("needs finite p")
    p = Fraction(p)
    r, s = cf.rs(n)
    lhs = s * en.nabs(cf.theta(n))
    if p == 1:
        thr = HALF
    elif p == 2:
        thr = 1 / en.sqrt_int(3)  # (2 * sqrt3/2)^-1
    else:
        d = delta_p(p).delta
        thr = 1 / (en.root(4, p) * d)
    res = compare(lhs, thr)
    if res is Ordering.AMBIGUOUS:
        raise AmbiguousComparison("threshold comparison undecided")
    return res is not Ordering.GREATER


# ---------------------------------------------------------------------------
# lattice oracle


@dataclass
class BestApprox:
    q: int
    p: int  # numerator for alpha itself (shift undone)
    x: object  # mpf, equals q
    y: object  # mpf, p' - q alpha'
    t: object  # stretch at which the point joined the minimal basis


def _alpha_mpf(alpha: AlphaSpec, prec: int):
    reg = RegularCF(alpha)
    if isinstance(alpha, PrefixDigits):
        val = alpha.representative()
    elif reg.exact is not None:
        val = reg.exact
    else:
        iv = en.refine(reg.alpha_value(), Fraction(1, 1 << (prec + 8)))
        m = iv.mid()
        return mpmath.mpf(m.numerator) / m.denominator
    return (val.a + val.b * mpmath.sqrt(val.d)) / val.c


def _cross_time(F: Norm, P, Q):
    """t with F_t(P) = F_t(Q) at mpf precision."""
    if isinstance(F, PNorm) and F.p not in (1, INF):
        p = mpmath.mpf(F.p.numerator) / F.p.denominator
        xp, yp, xq, yq = (abs(c) ** p for c in (*P, *Q))
        return ((xq - xp) / (yp - yq)) ** (1 / (2 * p))
    if F.facets is not None:
        return _cross_time_polygon(F, P, Q)
    f = lambda t: F(P[0] / t, P[1] * t) - F(Q[0] / t, Q[1] * t)
    lo, hi = mpmath.mpf(1), mpmath.mpf(1)
    f1 = f(lo)
    while True:
        hi *= 2
        if f(hi) * f1 <= 0:
            lo = hi / 2
            break
        lo /= 2
        if f(lo) * f1 <= 0:
            hi = lo * 2
            break
    return mpmath.findroot(f, (lo, hi), solver="anderson")


def _cross_time_polygon(F: Norm, P, Q):
    # t * F_t(x, y) = max_i a_i|x| + b_i|y| w: the equation is piecewise linear in w
    fac = [(_mp(a), _mp(b)) for a, b in F.facets]
    xp, yp, xq, yq = (abs(c) for c in (*P, *Q))
    L = lambda w: max(a * xp + b * yp * w for a, b in fac)
    R = lambda w: max(a * xq + b * yq * w for a, b in fac)
    best = None
    for a, b in fac:
        for c, d in fac:
            den = b * yp - d * yq
            if den == 0:
                continue
            w = (c * xq - a * xp) / den
            if w <= 0:
                continue
            err = abs(L(w) - R(w))
            if best is None or err < best[0]:
                best = (err, w)
    return mpmath.sqrt(best[1])


def _mp(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    if isinstance(x, int):
        return mpmath.mpf(x)
    if isinstance(x, QuadSurd):
        return (x.a + x.b * mpmath.sqrt(x.d)) / x.c
    return mpmath.mpf(en.to_float(x))


def _reduce(b1, b2, sx, sy):
    """Lagrange-Gauss reduction in the metric diag(sx, sy)."""
    def dot(u, v):
        return u[2] * v[2] * sx * sx + u[3] * v[3] * sy * sy

    while True:
        if dot(b1, b1) > dot(b2, b2):
            b1, b2 = b2, b1
        mu = int(mpmath.nint(dot(b1, b2) / dot(b1, b1)))
        if mu == 0:
            return b1, b2
        b2 = tuple(b2[i] - mu * b1[i] for i in range(4))


def _points_in_box(alpha_s, X0, X1, Y):
    """Lattice points (q, p, x, y) with X0 < x <= X1 and |y| <= Y, y = p - q*alpha_s."""
    sx, sy = 1 / X1, 1 / Y
    # basis vectors carry (q, p, x, y)
    e1 = (1, 0, mpmath.mpf(1), -alpha_s)
    e2 = (0, 1, mpmath.mpf(0), mpmath.mpf(1))
    b1, b2 = _reduce(e1, e2, sx, sy)
    # coefficients of z = c1 b1 + c2 b2 for z in the scaled box [-1,1]^2
    m11, m12 = b1[2] * sx, b2[2] * sx
    m21, m22 = b1[3] * sy, b2[3] * sy
    det = m11 * m22 - m12 * m21
    k1 = int(mpmath.floor((abs(m22) + abs(m12)) / abs(det))) + 1
    k2 = int(mpmath.floor((abs(m21) + abs(m11)) / abs(det))) + 1
    if (2 * k1 + 1) * (2 * k2 + 1) > 4_000_000:
        raise CapExceeded("search box too large")
    out = []
    for c1 in range(-k1, k1 + 1):
        for c2 in range(-k2, k2 + 1):
            q = c1 * b1[0] + c2 * b2[0]
            p = c1 * b1[1] + c2 * b2[1]
            if q <= 0:
                continue
            x = mpmath.mpf(q)
            y = p - q * alpha_s
            if X0 < x <= X1 and abs(y) <= Y:
                out.append((q, p, x, y))
    return out


def lattice_oracle(F: Norm, alpha: AlphaSpec, m_terms: int, q_cap: int, prec: int = 600) -> list[BestApprox]:
    """Best approximations P_0, ..., P_{m_terms} found by stretching ``F``'s ball."""
    with mpmath.workprec(prec):
        a = _alpha_mpf(alpha, prec)
        shift = int(mpmath.floor(a + mpmath.mpf(1) / 2))
        a_s = a - shift
        tie = mpmath.mpf(2) ** (-(prec // 4))
        prev = (mpmath.mpf(0), mpmath.mpf(1))
        P = (mpmath.mpf(1), -a_s)
        t = _cross_time(F, prev, P)
        out = [BestApprox(1, shift, P[0], P[1], t)]
        while len(out) <= m_terms:
            xP, yP = P
            t_lo = t
            t_hi = 2 * t_lo
            Y = xP / t_lo**2 + abs(yP)
            found = None
            while True:
                X = xP + abs(yP) * t_hi**2
                Xc = min(X, mpmath.mpf(q_cap))
                best = None
                for q, p, x, y in _points_in_box(a_s, xP, Xc, Y):
                    if abs(y) >= abs(yP):
                        continue
                    tq = _cross_time(F, P, (x, y))
                    if best is None or tq < best[0] * (1 - tie) or (
                        abs(tq - best[0]) <= tie * best[0] and q > best[1]
                    ):
                        best = (tq, q, p, x, y)
                if best is not None and best[0] <= t_hi:
                    if xP + abs(yP) * best[0] ** 2 > q_cap:
                        raise CapExceeded(f"next best approximation may exceed q_cap={q_cap}")
                    found = best
                    break
                if X >= q_cap:
                    raise CapExceeded(f"no best approximation with q <= {q_cap}")
                t_hi *= 2
            tq, q, p, x, y = found
            if not tq > t:
                raise RuntimeError("stretch factors must increase strictly")
            out.append(BestApprox(q, p + shift * q, x, y, tq))
            P, t = (x, y), tq
        return out
