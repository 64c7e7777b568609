from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from normcf import exactnum as en
from normcf.dynamics import in_S_np
from normcf.exactnum import surd
from normcf.fcf import (
    Membership,
    in_singularization_area,
    lattice_oracle,
    munu,
    necessary_condition,
    s_expand,
)
from normcf.norms import parse_norm
from normcf.regcf import PeriodicDigits, RandomUniform, RegularCF, Surd

from .conftest import IDENTITY_CASES, PROPERTY_CASES

BETA = surd(-1, 1, 5, 2)
SQ2M1 = surd(-1, 1, 2)
A3 = surd(-1, 1, 3, 2)
TEST_NORMS = ["p:1", "p:3/2", "p:2", "p:3", "p:4", "p:inf", "oct1", "oct2"]

periodic_alphas = st.builds(
    PeriodicDigits,
    st.integers(-3, 3),
    st.lists(st.integers(1, 6), max_size=4),
    st.lists(st.integers(1, 4), min_size=1, max_size=4),
)


def regular_expansion(cf, k):
    return [(1, b) for b in cf.regular.digits(k + 1)[1:]]


# ---------------------------------------------------------------------------
# examples


def test_membership_examples():
    assert in_singularization_area(parse_norm("p:1"), Fraction(3, 4), Fraction(1, 2)) is Membership.IN
    assert in_singularization_area(parse_norm("p:2"), Fraction(3, 5), Fraction(9, 10)) is Membership.OUT
    for s in TEST_NORMS:
        F = parse_norm(s)
        for v in (Fraction(0), Fraction(1, 3), Fraction(1)):
            assert in_singularization_area(F, Fraction(2, 5), v) is Membership.OUT


def test_membership_boundary_cases():
    F = parse_norm("p:1")
    # v = 2 - 1/u exactly: u = 2/3, v = 1/2
    assert in_singularization_area(F, Fraction(2, 3), Fraction(1, 2)) is Membership.BOUNDARY
    # v = 0 rule: In for u > 1/2, Boundary at u = 1/2
    assert in_singularization_area(F, Fraction(1, 2), Fraction(0)) is Membership.BOUNDARY
    assert in_singularization_area(parse_norm("p:inf"), Fraction(3, 5), Fraction(0)) is Membership.IN
    # p = 2: u(2 + v) = 1 + 2v at u = 2/3, v = 1/4 (both sides 3/2)
    assert in_singularization_area(parse_norm("p:2"), Fraction(2, 3), Fraction(1, 4)) is Membership.BOUNDARY


def test_s_expand_sup_norm_golden():
    cf = s_expand(parse_norm("p:inf"), Surd(BETA), 10)
    assert cf.a0 == 1
    assert cf.terms[0] == (-1, 2)
    assert all(t == (1, 1) for t in cf.terms[1:])


@pytest.mark.parametrize("s", TEST_NORMS)
def test_s_expand_sqrt2_is_regular(s):
    cf = s_expand(parse_norm(s), Surd(SQ2M1), 20)
    assert cf.singularized == []
    assert cf.terms == regular_expansion(cf, 20)


def test_s_expand_p2_sqrt3_is_regular():
    cf = s_expand(parse_norm("p:2"), Surd(A3), 30)
    assert cf.singularized == []
    assert cf.terms == regular_expansion(cf, 30)


def test_munu_examples():
    for s in ("p:1", "p:2", "oct1"):
        cf = s_expand(parse_norm(s), Surd(SQ2M1), 30)
        for m in range(1, 31):
            mu, nu = munu(cf, m)
            assert mu == SQ2M1
        # nu_30 = q_29/q_30 is within 1/q_30^2 of sqrt2 - 1
        assert en.compare(en.nabs(nu - SQ2M1), Fraction(1, 10**20)) is en.Ordering.LESS
    cf = s_expand(parse_norm("p:inf"), Surd(BETA), 20)
    for m in range(len(cf.terms) - 1):
        mu, nu = munu(cf, m)
        if cf.terms[m][0] == -1:  # eps_{m+1} = -1
            assert mu < 0
        assert -1 < mu < 1 and 0 <= nu < 1


def test_necessary_condition_examples():
    cf = RegularCF(Surd(BETA))
    for n in range(40):
        assert necessary_condition(1, cf, n) is (en.compare(cf.rs(n)[1] * abs(cf.theta(n)), Fraction(1, 2)) is not en.Ordering.GREATER)
    # s_n |theta_n| -> 1/sqrt5 < 1/2, so late terms satisfy the bound
    assert all(necessary_condition(1, cf, n) for n in range(5, 40))
    # alpha = [0; 1, 5, ...]: s_0 |theta_0| = alpha > 1/2 fails
    cf = RegularCF(PeriodicDigits(0, (1,), (5,)))
    assert necessary_condition(1, cf, 0) is False


def test_lattice_oracle_examples():
    for s in ("p:1", "p:2", "p:4", "p:inf"):
        F = parse_norm(s)
        cf = s_expand(F, Surd(SQ2M1), 30)
        orc = lattice_oracle(F, Surd(SQ2M1), 30, q_cap=10**30)
        assert [b.q for b in orc[:31]] == cf.q()[:31], s
        ts = [b.t for b in orc]
        assert all(a < b for a, b in zip(ts, ts[1:]))
        reg = RegularCF(Surd(SQ2M1))
        convs = {reg.rs(n) for n in range(60)}
        assert all((b.p, b.q) in convs for b in orc)


def test_lattice_oracle_singularizing_case():
    F = parse_norm("p:inf")
    cf = s_expand(F, Surd(BETA), 25)
    orc = lattice_oracle(F, Surd(BETA), 25, q_cap=10**20)
    assert [b.q for b in orc] == cf.q()[:26]


# ---------------------------------------------------------------------------
# invariants


def _check_identities(cf):
    convs = cf.convergents
    for m in range(1, len(convs)):
        eps, a = cf.terms[m - 1]
        (p, q), (p1, q1) = convs[m], convs[m - 1]
        p2, q2 = convs[m - 2] if m >= 2 else (1, 0)
        assert a >= 1 and eps in (1, -1)
        assert p == a * p1 + eps * p2 and q == a * q1 + eps * q2
        # det identity with gamma_m = (-1)^m eps_1 ... eps_m
        assert q * p1 - p * q1 == cf.gamma[m]
    for m in range(1, len(cf.terms)):
        assert cf.terms[m - 1][1] + cf.terms[m][0] >= 1
    assert any(cf.terms[m - 1][1] + cf.terms[m][0] >= 2 for m in range(1, len(cf.terms)))
    regular = {cf.regular.rs(n) for n in range(cf.retained[-1] + 1)}
    omitted = {cf.regular.rs(n) for n in cf.singularized}
    for pq in convs:
        assert pq in regular and pq not in omitted
    for n in cf.singularized:
        assert cf.regular.b(n + 1) == 1


@settings(max_examples=IDENTITY_CASES)
@given(periodic_alphas, st.sampled_from(["p:1", "p:2", "p:inf"]))
def test_identities_fast_norms(alpha, s):
    _check_identities(s_expand(parse_norm(s), alpha, 12))


@settings(max_examples=PROPERTY_CASES)
@given(periodic_alphas, st.sampled_from(["p:3", "p:5/2", "oct1", "oct2"]))
def test_identities_general_norms(alpha, s):
    _check_identities(s_expand(parse_norm(s), alpha, 10))


@settings(max_examples=PROPERTY_CASES)
@given(st.integers(0, 2**64 - 1), st.sampled_from(["p:1", "p:2", "p:4", "p:inf", "oct1"]))
def test_identities_random_alpha(seed, s):
    _check_identities(s_expand(parse_norm(s), RandomUniform(seed), 40))


def _grid_256():
    i = np.arange(256)
    # cell centres of [1/2, 1) x [0, 1]: u = (512 + 2i + 1)/1024, v = (2j + 1)/512
    un, vn = np.meshgrid(512 + 2 * i + 1, 2 * i + 1, indexing="ij")
    return un.ravel(), vn.ravel()


@pytest.mark.parametrize("s", ["p:2", "p:3", "p:4", "oct1", "oct2", "p:3/2"])
def test_S_contained_in_S1(s):
    F = parse_norm(s)
    un, vn = _grid_256()
    U, V = un / 1024.0, vn / 512.0
    inside, undecided = in_S_np(F, U, V, 1e-12)
    for k in np.flatnonzero(undecided):
        mem = in_singularization_area(F, Fraction(int(un[k]), 1024), Fraction(int(vn[k]), 512))
        inside[k] = mem.singularizes
    # exact integer test of v <= 2 - 1/u, i.e. u (2 - v) >= 1
    in_s1 = un * (1024 - vn) >= 1024 * 512
    assert not np.any(inside & ~in_s1)
    assert inside.sum() > 0 or s == "p:inf"


def test_S1_grid_matches_exact_membership():
    F = parse_norm("p:1")
    un, vn = _grid_256()
    rng = np.random.default_rng(0)
    for k in rng.choice(len(un), 300, replace=False):
        u, v = Fraction(int(un[k]), 1024), Fraction(int(vn[k]), 512)
        assert in_singularization_area(F, u, v).singularizes == (u * (2 - v) >= 1)


@pytest.mark.parametrize("s", TEST_NORMS + ["compose(p:2;p:1;p:inf)"])
def test_diagonal_excluded(s):
    F = parse_norm(s)
    for k in range(1, 20):
        x = Fraction(k, 20)
        assert in_singularization_area(F, x, x) is Membership.OUT, (s, x)


@settings(max_examples=PROPERTY_CASES, deadline=None)
@given(st.integers(0, 2**64 - 1), st.sampled_from(["p:1", "p:2", "p:4", "p:inf", "oct1"]))
def test_oracle_equivalence_random(seed, s):
    F = parse_norm(s)
    reg = RegularCF(RandomUniform(seed))
    from normcf.regcf import PrefixDigits

    alpha = PrefixDigits(reg.b(0), tuple(reg.digits(61)[1:]))
    cf = s_expand(F, alpha, 20)
    orc = lattice_oracle(F, alpha, 20, q_cap=10**200)
    assert [b.q for b in orc] == cf.q()[:21]


@settings(max_examples=PROPERTY_CASES)
@given(st.integers(0, 2**64 - 1))
def test_minkowski_sufficiency_p1(seed):
    reg = RegularCF(RandomUniform(seed))
    cf = s_expand(parse_norm("p:1"), reg, 40)
    top = cf.retained[-1]
    expected = [n for n in range(top + 1) if necessary_condition(1, reg, n)]
    assert cf.retained == expected


@settings(max_examples=PROPERTY_CASES)
@given(st.integers(0, 2**64 - 1), st.sampled_from(["p:1", "p:2", "p:inf", "oct1"]))
def test_mu_bounded(seed, s):
    cf = s_expand(parse_norm(s), RandomUniform(seed), 30)
    for m in range(31):
        mu, nu = munu(cf, m)
        assert -1 < en.to_float(mu) < 1 and 0 <= nu < 1


def test_polygonal_norm_on_short_prefix():
    # late terms of a 60-digit prefix know u only to ~1e-17, which must not
    # block the exact facet decision of a polygonal norm
    from normcf.regcf import PrefixDigits

    reg = RegularCF(RandomUniform(1002))
    alpha = PrefixDigits(reg.b(0), tuple(reg.digits(61)[1:]))
    F = parse_norm("oct1")
    cf = s_expand(F, alpha, 30)
    assert cf.q()[:31] == [b.q for b in lattice_oracle(F, alpha, 30, q_cap=10**400)][:31]
