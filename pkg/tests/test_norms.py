import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from normcf.exactnum import Interval, is_exact, refine, root, surd
from normcf.norms import (
    INF,
    NormParseError,
    Octagon1,
    Octagon2,
    PNorm,
    compose,
    is_normalized,
    oct1_by_composition,
    oct2_by_composition,
    parse_norm,
)

from .conftest import IDENTITY_CASES, PROPERTY_CASES

NORM_SPECS = ["p:1", "p:3/2", "p:2", "p:3", "p:4", "p:5/2", "p:inf", "oct1", "oct2",
              "compose(p:2;p:1;p:inf)"]
NORMS = [parse_norm(s) for s in NORM_SPECS]
norms = st.sampled_from(NORMS)
coords = st.floats(-50, 50, allow_nan=False)
small_q = st.fractions(min_value=-20, max_value=20, max_denominator=200)


def direct_p(p, x, y):
    """Reference p-norm in mpmath, independent of the library."""
    with mpmath.workdps(40):
        if p == INF:
            return max(abs(mpmath.mpf(x)), abs(mpmath.mpf(y)))
        p = mpmath.mpf(p.numerator) / p.denominator
        return (abs(mpmath.mpf(x)) ** p + abs(mpmath.mpf(y)) ** p) ** (1 / p)


def same(a, b):
    """Exact equality, or overlapping tight enclosures for non-exact values."""
    if is_exact(a) and is_exact(b):
        return a == b
    w = Fraction(1, 2**120)
    return refine(a, w).overlaps(refine(b, w))


# ---------------------------------------------------------------------------
# examples


def test_eval_examples():
    assert PNorm(2)(Fraction(3), Fraction(4)) == 5
    assert PNorm(INF)(Fraction(-2), Fraction(1)) == 2
    assert Octagon1()(Fraction(1), Fraction(0)) == 1


def test_eval_stretched_examples():
    for F in NORMS:
        P = (Fraction(3, 7), Fraction(-2, 5))
        assert same(F.stretched(Fraction(1), *P), F(*P))
    assert PNorm(INF).stretched(Fraction(2), Fraction(4), Fraction(1)) == 2
    assert PNorm(1).stretched(Fraction(2), Fraction(2), Fraction(3)) == 7


def test_equalize_examples():
    F = PNorm(2)
    P = (Fraction(3, 5), Fraction(4, 5))
    Q = (Fraction(4, 5), Fraction(3, 5))
    assert F.equalize_t(P, Q) == 1
    t = PNorm(INF).equalize_t((Fraction(1), Fraction(1, 2)), (Fraction(2), Fraction(1, 4)))
    assert t == 2
    # p = 2 closed form t = ((1 - v^2)/(1 - u^2))^(1/4)
    u, v = Fraction(1, 3), Fraction(3, 5)
    t = PNorm(2).equalize_t((Fraction(1), -u), (v, Fraction(1)))
    expected = ((1 - v**2) / (1 - u**2)) ** 0.25
    assert abs(float(t) - expected) < 1e-14


def test_equalize_float_matches_exact():
    for F in NORMS:
        u, v = Fraction(2, 7), Fraction(5, 9)
        te = F.equalize_t((Fraction(1), -u), (v, Fraction(1)))
        tf = F.equalize_t((1.0, -float(u)), (float(v), 1.0))
        assert abs(float(te) - tf) < 1e-10, F.spec


def test_compose_examples():
    O1 = oct1_by_composition()
    K = compose(PNorm(1), PNorm(1), PNorm(1))
    for x, y in [(Fraction(1), Fraction(0)), (Fraction(2, 3), Fraction(-5, 7)), (Fraction(-3), Fraction(4))]:
        assert same(K(x, y), PNorm(1)(x, y))
    H = compose(PNorm(2), PNorm(3), PNorm(3))
    assert same(H(Fraction(1), Fraction(0)), 1)
    assert is_normalized(O1) and is_normalized(oct2_by_composition())


def test_octagon_direct_vs_composition():
    pairs = [(Octagon1(), oct1_by_composition()), (Octagon2(), oct2_by_composition())]
    rng = np.random.default_rng(7)
    for A, B in pairs:
        for _ in range(300):
            x, y = (Fraction(int(k), 97) for k in rng.integers(-500, 500, 2))
            assert A(x, y) == B(x, y)
        # surd coordinates stay exact in Q(sqrt2)
        x, y = surd(1, 1, 2, 3), surd(-2, 1, 2, 5)
        assert A(x, y) == B(x, y)


R = surd(-1, 1, 2)  # sqrt2 - 1
H = surd(0, 1, 2, 2)  # sqrt2 / 2
OCT_VERTICES = {
    "oct1": [(Fraction(1), R), (R, Fraction(1))],
    "oct2": [(Fraction(1), Fraction(0)), (H, H), (Fraction(0), Fraction(1))],
}


def _reflections(pts):
    return {(sx * x, sy * y) for x, y in pts for sx in (1, -1) for sy in (1, -1)}


@pytest.mark.parametrize("F", [Octagon1(), Octagon2()], ids=lambda F: F.spec)
def test_octagon_vertices_on_sphere(F):
    true = _reflections(OCT_VERTICES[F.spec])
    assert len(true) == 8
    for x, y in true:
        assert F(x, y) == 1
        assert len(_active_lines(F, x, y)) >= 2
    found = {P for P in _reflections(F.vertices()) if len(_active_lines(F, *P)) >= 2}
    assert found == true


def _active_lines(F, x, y):
    """Supporting lines of the ball through (x, y); two or more mark a corner."""
    signs = lambda c: (1, -1) if c == 0 else ((1,) if c > 0 else (-1,))
    return {
        (a * sx, b * sy)
        for a, b in F.facets
        if a * abs(x) + b * abs(y) == 1
        for sx in signs(x)
        for sy in signs(y)
    }


def test_boundary_point_examples():
    for F in NORMS:
        x, y = F.boundary_point(0.0)
        assert x == pytest.approx(1.0) and y == pytest.approx(0.0, abs=1e-15)
    x, y = PNorm(2).boundary_point(math.pi / 4)
    assert x == pytest.approx(math.sqrt(2) / 2) and y == pytest.approx(math.sqrt(2) / 2)
    x, y = PNorm(1).boundary_point(math.pi / 4)
    assert x == pytest.approx(0.5) and y == pytest.approx(0.5)


@pytest.mark.parametrize("bad", ["p:0.5", "p:", "p:abc", "hex", "compose(p:1;p:2)", "compose(p:1;p:2;p:3", ""])
def test_parse_errors(bad):
    with pytest.raises(NormParseError):
        parse_norm(bad)


def test_parse_roundtrip():
    for s in NORM_SPECS:
        assert parse_norm(parse_norm(s).spec) == parse_norm(s)


def test_area_known_values():
    assert float(PNorm(2).area()) == pytest.approx(math.pi, rel=1e-12)
    assert float(PNorm(1).area()) == pytest.approx(2.0, rel=1e-12)
    assert float(PNorm(INF).area()) == pytest.approx(4.0, rel=1e-12)
    # oct1 = square with corners cut at (sqrt2-1, 1): area 8(sqrt2-1)
    assert float(Octagon1().area()) == pytest.approx(8 * (math.sqrt(2) - 1), rel=1e-12)


# ---------------------------------------------------------------------------
# invariants


@settings(max_examples=IDENTITY_CASES)
@given(norms, small_q, small_q)
def test_strong_symmetry_exact(F, x, y):
    v = F(x, y)
    assert same(F(-x, y), v) and same(F(x, -y), v) and same(F(-x, -y), v)
    assert same(F(abs(x), abs(y)), v)


@settings(max_examples=IDENTITY_CASES)
@given(norms, coords, coords, st.floats(0.01, 100))
def test_homogeneity(F, x, y, c):
    assert F(c * x, c * y) == pytest.approx(c * F(x, y), rel=1e-12, abs=1e-300)


@settings(max_examples=IDENTITY_CASES)
@given(norms, coords, coords, coords, coords)
def test_triangle_inequality(F, x1, y1, x2, y2):
    assert F(x1 + x2, y1 + y2) <= F(x1, y1) + F(x2, y2) + 1e-12 * (abs(x1) + abs(x2) + abs(y1) + abs(y2) + 1)


@settings(max_examples=PROPERTY_CASES)
@given(norms, small_q, small_q, small_q, small_q)
def test_triangle_inequality_certified(F, x1, y1, x2, y2):
    prec = 128
    iv = lambda q: Interval.point(q, prec)
    lhs = F.eval_iv(iv(x1 + x2), iv(y1 + y2))
    rhs = F.eval_iv(iv(x1), iv(y1)) + F.eval_iv(iv(x2), iv(y2))
    assert lhs.lo <= rhs.hi


@settings(max_examples=IDENTITY_CASES)
@given(norms, coords, coords, st.floats(0, 1), st.floats(0, 1))
def test_monotonicity(F, x, y, a, b):
    assert F(a * x, b * y) <= F(x, y) * (1 + 1e-13) + 1e-300


@settings(max_examples=IDENTITY_CASES)
@given(norms, coords, coords)
def test_sandwich_between_sup_and_one_norm(F, x, y):
    v = F(x, y)
    tol = 1e-12 * (abs(x) + abs(y))
    assert max(abs(x), abs(y)) - tol <= v <= abs(x) + abs(y) + tol


@settings(max_examples=IDENTITY_CASES)
@given(st.sampled_from([f for f in NORMS if isinstance(f, PNorm)]), coords, coords)
def test_pnorm_matches_reference(F, x, y):
    ref = direct_p(F.p, x, y)
    assert F(x, y) == pytest.approx(float(ref), rel=1e-13, abs=1e-300)


@settings(max_examples=IDENTITY_CASES)
@given(norms, coords, coords, st.floats(1, 20), st.floats(1, 20), st.floats(0, 1))
def test_convexity_in_t(F, x, y, t1, t2, s):
    t1, t2 = min(t1, t2), max(t1, t2)
    tm = s * t1 + (1 - s) * t2
    lhs = F.stretched(tm, x, y)
    rhs = s * F.stretched(t1, x, y) + (1 - s) * F.stretched(t2, x, y)
    assert lhs <= rhs * (1 + 1e-12) + 1e-300


@settings(max_examples=PROPERTY_CASES)
@given(norms, st.floats(0.01, 0.99), st.floats(0.01, 0.99))
def test_equalize_uniqueness_by_sign_sampling(F, u, v):
    P, Q = (1.0, -u), (v, 1.0)
    t = F.equalize_t(P, Q)
    assert F.stretched(t, *P) == pytest.approx(F.stretched(t, *Q), rel=1e-9)
    ts = np.exp(np.linspace(math.log(t) - 6, math.log(t) + 6, 241))
    g = np.array([F.stretched(s, *P) - F.stretched(s, *Q) for s in ts])
    nz = np.sign(g[np.abs(g) > 1e-12])
    assert np.count_nonzero(np.diff(nz)) == 1


@settings(max_examples=PROPERTY_CASES)
@given(norms, st.floats(0, math.pi / 2))
def test_boundary_point_on_sphere(F, th):
    x, y = F.boundary_point(th)
    assert F(x, y) == pytest.approx(1.0, rel=1e-13)
    assert math.atan2(y, x) == pytest.approx(th, abs=1e-12)


def test_root_used_by_p_norm_exact_paths():
    # p = 2 at a Pythagorean point is exact, p = 4 at (1, 1) is 2^(1/4)
    assert PNorm(2)(Fraction(5), Fraction(12)) == 13
    v = PNorm(4)(Fraction(1), Fraction(1))
    assert abs(float(v) - 2**0.25) < 1e-15
    assert float(root(Fraction(2), 4)) == pytest.approx(float(v), rel=1e-15)
