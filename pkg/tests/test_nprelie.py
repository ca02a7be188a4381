import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nary import catalog
from nary.core import LinearMap, StructureTensor
from nary.nlie import adjoint_rep, check_n_lie, check_rep, coadjoint_rep, rb_search, semidirect_nlie, verify
from nary.nprelie import (
    NPreLieAlgebra,
    NPreLieRep,
    check_nprelie,
    check_o_operator_nprelie,
    check_pre_rep,
    check_rota_baxter_nprelie,
    commuting_rb_nprelie,
    dual_l_pre_rep,
    dual_pre_rep,
    l_pattern,
    left_rep,
    left_right_mult,
    mu,
    r_pattern,
    rho_tilde,
    semidirect_nprelie,
    sub_adjacent,
    zero_pre_rep,
)
from nary.report import PreconditionError

import oracles

rationals = st.fractions(min_value=-4, max_value=4, max_denominator=3).filter(bool)


def npl_violations(P):
    pr = oracles.dense(P.product)
    n, d = P.arity, P.dim
    bad = {"npl-1": set(), "npl-2": set()}
    for xs in itertools.product(range(d), repeat=n - 1):
        for ys in itertools.product(range(d), repeat=n):
            if oracles.npl1(pr, n, xs, ys):
                bad["npl-1"].add(xs + ys)
    for xs in itertools.product(range(d), repeat=n):
        for ys in itertools.product(range(d), repeat=n - 1):
            if oracles.npl2(pr, n, xs, ys):
                bad["npl-2"].add(xs + ys)
    return bad


def pre_rep_violations(rho, name, idx):
    """Evaluate one printed identity at a reported 0-based tuple."""
    n = rho.arity
    pr, l, r = oracles.dense(rho.algebra.product), oracles.dense(rho.l), oracles.dense(rho.r)
    fn = oracles.pre_rep_identities(pr, l, r, n)[name]
    split = {"identity-1": n - 1, "identity-2": n, "identity-3": n - 2, "identity-4": n - 1}[name]
    return fn(idx[:split], idx[split:-1], idx[-1])


# ---------------------------------------------------------------------------
# products

def test_catalog_products(PL, P3):
    assert PL.product.entries == {(2, 1): {1: 1}, (2, 2): {2: -1}}
    assert P3.product.entries == {(0, 2, 1): {1: 1}, (0, 2, 2): {2: -1}}
    assert check_nprelie(PL).ok and check_nprelie(P3).ok
    assert not any(npl_violations(P3).values())


def test_perturbation_is_located():
    P = NPreLieAlgebra(catalog.get("P3").product.with_entry((0, 2, 1), {0: 1, 1: 1}))
    report = check_nprelie(P)
    assert not report.ok
    bad = npl_violations(P)
    blocks = {"npl-1": [(0, 2), (2, 4)], "npl-2": [(0, 3)]}
    for fam in ("npl-1", "npl-2"):
        reported = {v.args for v in report.violations if v.identity == fam}
        assert reported == oracles.canonical_set(bad[fam], blocks[fam])


def test_flipping_the_last_p3_entry_keeps_the_identities():
    # {e1,e3,e3} only feeds terms that vanish, so its value is unconstrained
    for value in ({2: 1}, {0: 1}, {1: 2}):
        P = NPreLieAlgebra(catalog.get("P3").product.with_entry((0, 2, 2), value))
        assert check_nprelie(P).ok
        assert not any(npl_violations(P).values())


@settings(max_examples=20, deadline=None)
@given(rationals)
def test_p3_family_is_n_pre_lie(a):
    P = catalog.get(f"P3({a.numerator}/{a.denominator})" if a.denominator > 1 else f"P3({a.numerator})")
    assert check_nprelie(P).ok
    assert check_n_lie(sub_adjacent(P, force=True)).ok


def test_sub_adjacent_by_hand(PL, P3):
    # [x1,x2,x3]^C = sum_i (-1)^(3-i) {..^x_i.., x_i}; only {e1,e3,e2} survives
    assert sub_adjacent(P3).bracket.entries == {(0, 1, 2): {1: Fraction(-1)}}
    # n = 2: [x,y] = x o y - y o x
    assert sub_adjacent(PL).bracket.entries == {(1, 2): {1: Fraction(-1)}}


# ---------------------------------------------------------------------------
# representations

def test_adjoint_pre_rep(P3):
    rho = left_right_mult(P3)
    assert rho.l_matrix((0, 2)).columns() == [{}, {1: 1}, {2: -1}]
    assert check_pre_rep(rho).ok


def test_mu_equals_rho_tilde(P3):
    rho = verify(left_right_mult(P3))
    rt = rho_tilde(rho)
    for idx in itertools.combinations(range(3), 2):
        assert mu(rho, idx) == rt.matrix(idx)


def test_rho_tilde_of_adjoint_is_ad(P3, PL):
    for P in (P3, PL):
        rt = rho_tilde(verify(left_right_mult(P)))
        assert rt.action == adjoint_rep(verify(sub_adjacent(P))).action


def test_l_with_zero_r(P3):
    C = verify(sub_adjacent(P3))
    for l in (adjoint_rep(C), coadjoint_rep(C)):
        n, d, m = 3, 3, l.module_dim
        zero_r = StructureTensor.zero(m, r_pattern(n), (d,) * (n - 1) + (m,))
        rho = NPreLieRep(P3, m, StructureTensor(m, l_pattern(n), dict(l.action.entries), l.action.slot_dims), zero_r)
        assert check_pre_rep(rho).ok
        assert rho_tilde(verify(rho)).action == l.action
        assert dual_l_pre_rep(verify(rho)).l == dual_pre_rep(verify(rho)).l


def test_flipped_r_is_located(P3):
    rho = left_right_mult(P3)
    key = (0, 2, 2)
    flipped = {k: -c for k, c in rho.r.entries[key].items()}
    bad = NPreLieRep(P3, 3, rho.l, rho.r.with_entry(key, flipped))
    report = check_pre_rep(bad)
    fams = [v for v in report.violations if v.identity.startswith("identity-")]
    assert fams and len(fams) == len(report.violations)
    for v in fams:
        assert oracles.clean(pre_rep_violations(bad, v.identity, tuple(i - 1 for i in v.args)))


def test_benign_r_flips_agree_with_oracle(P3):
    # sign flips that happen to preserve every identity, confirmed exhaustively
    rho = left_right_mult(P3)
    n, d = 3, 3
    shapes = {"identity-1": (2, 2), "identity-2": (3, 1), "identity-3": (1, 3), "identity-4": (2, 2)}
    for key in ((0, 1, 2), (2, 1, 0)):
        flipped = {k: -c for k, c in rho.r.entries[key].items()}
        cand = NPreLieRep(P3, 3, rho.l, rho.r.with_entry(key, flipped))
        assert check_pre_rep(cand).ok
        for name, (a, b) in shapes.items():
            for xs in itertools.product(range(d), repeat=a):
                for ys in itertools.product(range(d), repeat=b):
                    for u in range(d):
                        assert not oracles.clean(pre_rep_violations(cand, name, xs + ys + (u,)))


def test_zero_pre_rep(P3):
    assert check_pre_rep(zero_pre_rep(P3, 2)).ok


def test_dual_pre_rep(P3):
    rho = verify(left_right_mult(P3))
    dual = dual_pre_rep(rho)
    assert check_pre_rep(dual).ok
    # (ad*, -R*) with M* = -M^T
    ad = adjoint_rep(verify(sub_adjacent(P3)))
    for idx in itertools.combinations(range(3), 2):
        assert dual.l_matrix(idx) == ad.matrix(idx).T.scale(-1)
    for idx in itertools.product(range(3), repeat=2):
        assert dual.r_matrix(idx) == rho.r_matrix(idx).T


def test_literal_identities_fail_for_pl_dual(PL):
    dual = dual_pre_rep(verify(left_right_mult(PL)))
    assert check_pre_rep(dual).ok
    literal = check_pre_rep(dual, literal=True)
    assert not literal.ok
    # the semidirect product is nevertheless pre-Lie
    assert check_nprelie(semidirect_nprelie(dual, force=True)).ok


# ---------------------------------------------------------------------------
# semidirect products

def test_semidirect_adjoint(P3):
    rho = verify(left_right_mult(P3))
    S = semidirect_nprelie(rho)
    assert S.dim == 6 and check_nprelie(S).ok


@pytest.mark.parametrize("dual", [False, True])
def test_semidirect_square(P3, dual):
    rho = verify(left_right_mult(P3))
    if dual:
        rho = verify(dual_pre_rep(rho))
    lhs = sub_adjacent(verify(semidirect_nprelie(rho)))
    rhs = semidirect_nlie(rho_tilde(rho), force=True)
    assert lhs.bracket == rhs.bracket


def test_zero_rep_semidirect(P3):
    S = semidirect_nprelie(zero_pre_rep(P3, 2), force=True)
    assert all(max(k) < 3 for k in S.product.entries)


# ---------------------------------------------------------------------------
# O-operators

def test_o_operator_for_adjoint(P3, PL):
    for P in (P3, PL):
        rho = left_right_mult(P)
        assert check_o_operator_nprelie(LinearMap.zero(P.dim), rho).ok
        # with T = id the condition reduces to the vanishing of the r-sum, which fails here
        report = check_o_operator_nprelie(LinearMap.identity(P.dim), rho)
        assert not report.ok
        r = oracles.dense(rho.r)
        for v in report.violations:
            us = tuple(i - 1 for i in v.args)
            n = P.arity
            rsum = {}
            for i in range(n - 1):
                oracles._add(rsum, r(*oracles.omit(us, i), us[i]), (-1) ** i)
            assert oracles.clean(rsum)


def test_rb_search_on_p3(P3):
    found = rb_search(P3)
    assert len(found) == 11
    for P in found:
        assert check_rota_baxter_nprelie(P3, P).ok
    assert not check_rota_baxter_nprelie(P3, LinearMap.diag([1, 1, 0])).ok or LinearMap.diag([1, 1, 0]) in found


def test_left_rep_passes(P3):
    assert check_rep(left_rep(P3)).ok


def test_commuting_rb(S3):
    zero = LinearMap.zero(4)
    P, report = commuting_rb_nprelie(S3, zero, zero)
    assert P.product.is_zero() and report.ok
    for P1 in rb_search(S3)[:6]:
        Q, report = commuting_rb_nprelie(S3, P1, P1)
        assert report.ok and check_nprelie(Q).ok
    with pytest.raises(PreconditionError):
        commuting_rb_nprelie(S3, LinearMap.identity(4), zero)
