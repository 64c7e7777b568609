"""The Dirichlet-improvement value delta_F(alpha).

``delta_F(alpha; m) = Delta(F) * D_F(mu_m, nu_m)`` and ``delta_F(alpha)`` is
its limsup over ``m``.  For p-norms

    D_p(u, v) = (1/(1+uv)) * ((1 - |u|^p v^p)^2 / ((1 - |u|^p)(1 - v^p)))^(1/p),

with ``D_inf(u, v) = 1/(1+uv)``.  For a general norm ``D_F(u, v)`` is
``F_t(1, -u)**2 / (1 + uv)`` at the stretch ``t`` where ``F_t(1, -u) = F_t(v, 1)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import exactnum as en
from .critdet import critical_determinant, delta_p
from .exactnum import Ordering, QuadSurd, compare, nmax, power, root, surd
from .fcf import Membership, in_singularization_area, munu, s_expand
from .norms import INF, Norm, PNorm, equalize_t_np
from .regcf import ArithmeticDigits, AlphaSpec, RegularCF, SurdStream, periodic_value

BETA = surd(-1, 1, 5, 2)
SQRT5 = surd(0, 1, 5)


# ---------------------------------------------------------------------------
# D_p and D_F


def D_p(p, u, v):
    """Closed form of ``D_p``; exact when the value lies in the field of u, v."""
    if isinstance(u, (float, np.ndarray)) or isinstance(v, (float, np.ndarray)):
        return D_p_np(p, u, v)
    w = 1 + u * v
    if p == INF:
        return 1 / w
    p = Fraction(p)
    au = en.nabs(u)
    up, vp = power(au, p), power(v, p)
    inner = (1 - up * vp) ** 2 / ((1 - up) * (1 - vp))
    return root(inner, p) / w


def D_p_np(p, u, v):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    w = 1.0 + u * v
    if p == INF:
        return 1.0 / w
    p = float(p)
    up, vp = np.abs(u) ** p, v**p
    inner = (1.0 - up * vp) ** 2 / ((1.0 - up) * (1.0 - vp))
    out = inner ** (1.0 / p) / w
    return float(out) if out.ndim == 0 else out


def D_F(F: Norm, u, v, generic: bool = False):
    """``D_F(u, v)``; p-norms use the closed form unless ``generic`` is set."""
    if isinstance(F, PNorm) and not generic:
        return D_p(F.p, u, v)
    if isinstance(u, float) or isinstance(v, float):
        t = F.equalize_t((1.0, -u), (float(v), 1.0))
        val = F.stretched(t, 1.0, -u)
        return val * val / (1.0 + u * v)
    one = Fraction(1)
    w = F.equalize_w((one, -u), (v, one))
    return F.stretched_sq(w, one, u) / (1 + u * v)


def D_F_np(F: Norm, u, v):
    """Vectorized float ``D_F``."""
    if isinstance(F, PNorm):
        return D_p_np(F.p, u, v)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    one = np.ones_like(u)
    t = equalize_t_np(F, one, -u, v, one)
    val = F.eval_np(one / t, -u * t)
    return val * val / (1.0 + u * v)


def delta_constant(F: Norm):
    return critical_determinant(F)


# ---------------------------------------------------------------------------
# sequences and limsup


@dataclass
class DeltaSeq:
    norm: Norm
    alpha: AlphaSpec
    delta: object  # Delta(F)
    terms: list = field(default_factory=list)  # (m, value)

    def floats(self) -> list[float]:
        return [en.to_float(v) for _, v in self.terms]


@dataclass
class DeltaResult:
    value: object
    status: str  # "ExactCycle" | "ExactLimit" | "Truncated"
    limit_points: list = field(default_factory=list)  # [(mu*, nu*, delta)]
    lower_bound: object = None
    terms_used: int = 0
    alpha_shift: int = 0
    window_max: object = None  # running max of delta(alpha; m) over the tail window
    tail: list = field(default_factory=list)

    def value_float(self) -> float:
        return en.to_float(self.value)


def delta_seq(F: Norm, alpha: AlphaSpec, m_terms: int, cf=None) -> DeltaSeq:
    """``delta_F(alpha; m)`` for ``m = 0..m_terms``."""
    cf = cf or s_expand(F, alpha, m_terms)
    Delta = delta_constant(F)
    out = DeltaSeq(F, alpha, Delta)
    for m in range(m_terms + 1):
        mu, nu = munu(cf, m)
        out.terms.append((m, Delta * D_F(F, mu, nu)))
    return out


def min_delta_p(p):
    """Least value of ``delta_p(alpha)`` over all irrational alpha."""
    if p == INF:
        return (SQRT5 + 5) / 10
    p = Fraction(p)
    d = delta_p(p).delta
    if p <= 2:
        return d
    return d / 10 * (SQRT5 + 5) * root((power(BETA, p) + 1) ** 2, p)


def _floor_bound(F: Norm):
    if isinstance(F, PNorm):
        return min_delta_p(F.p)
    return Fraction(1, 2)


def delta_limsup(F: Norm, alpha: AlphaSpec, m_terms: int = 200) -> DeltaResult:
    """``delta_F(alpha)`` with its attainment data."""
    reg = RegularCF(alpha)
    if reg.exact is not None:
        return _delta_cycle(F, reg, m_terms)
    cf = s_expand(F, reg, m_terms)
    seq = delta_seq(F, alpha, m_terms, cf)
    window = seq.terms[m_terms // 2:]
    wmax = nmax(*(v for _, v in window))
    if isinstance(alpha, ArithmeticDigits) and alpha.step >= 1:
        # digits grow without bound, so (mu_m, nu_m) -> (0, 0) and D_F -> 1
        Delta = seq.delta
        return DeltaResult(
            Delta, "ExactLimit", [(Fraction(0), Fraction(0), Delta)], Delta, m_terms,
            cf.a0, wmax, [v for _, v in window],
        )
    return DeltaResult(
        wmax, "Truncated", [], _floor_bound(F), m_terms, cf.a0, wmax,
        [v for _, v in window],
    )


def _delta_cycle(F: Norm, reg: RegularCF, m_terms: int) -> DeltaResult:
    stream: SurdStream = reg.stream
    pre, L = stream.find_period()
    Le = L if L % 2 == 0 else 2 * L
    n0 = pre + L + 2  # inside the periodic regime, with n0 - 2 also periodic
    Delta = delta_constant(F)

    def vstar(n):
        # limit of v_{n + k Le}: the reversed period read backwards from b_n
        cyc = tuple(reg.b(n - j) for j in range(L))
        return periodic_value(0, (), cyc)

    def eventual_membership(n):
        u, vs = reg.u(n), vstar(n)
        mem = in_singularization_area(F, u, vs)
        if mem is not Membership.BOUNDARY:
            return mem
        # the limit sits on the boundary: read the side of approach from late terms
        late = [in_singularization_area(F, *reg.uv(n + k * Le)) for k in (6, 7, 8)]
        if len(set(late)) != 1 or late[0] is Membership.BOUNDARY:
            raise en.AmbiguousComparison("approach side to a boundary limit point is undecided")
        return late[0]

    residues = list(range(n0, n0 + Le + 1))
    keep = {n: not eventual_membership(n).singularizes for n in residues}

    points = []
    for n in range(n0 + 1, n0 + Le + 1):
        if not keep[n]:
            continue
        if keep[n - 1]:
            mu, nu = reg.u(n), vstar(n)
        else:
            mu, nu = -reg.u(n) * reg.u(n - 1), vstar(n) * vstar(n - 1)
        val = Delta * D_F(F, mu, nu)
        points.append((mu, nu, val))
    value = nmax(*(p[2] for p in points))
    cf = s_expand(F, reg, min(m_terms, 8))
    return DeltaResult(value, "ExactCycle", points, value, m_terms, cf.a0, None, [])


def running_max(values) -> list:
    out, best = [], None
    for v in values:
        best = v if best is None else max(best, v)
        out.append(best)
    return out
