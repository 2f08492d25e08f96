import random

import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from hirzebruch.families import MANIFOLDS
from hirzebruch.feqsolve import FeqParams, q_values
from hirzebruch.ideal import (Budget, BudgetExceeded, MonomialOrder, buchberger, eliminate,
                              membership, normal_form, radical_membership, saturate_by_variable)
from hirzebruch.poly import MultiPoly, VarContext, parse_poly, same_up_to_scale

from conftest import relation_set

C3 = VarContext(["q1", "q2", "q3"])


def P(text, ctx=C3):
    return parse_poly(text, ctx)


def test_monomial_ideal_is_its_own_basis():
    gb = buchberger([P("q1"), P("q3")])
    assert sorted(p.to_string() for p in gb.polys) == ["q1", "q3"]


def test_lex_basis_passes_s_pair_criterion():
    order = MonomialOrder(C3, "lex", ranking=["q3", "q2", "q1"])
    gb = buchberger([P("q1^2 - q2"), P("q1*q2 - q3")], order)
    assert gb.is_groebner()
    texts = {p.to_string() for p in gb.polys}
    assert "q1*q3 - q2^2" in texts or "-q1*q3 + q2^2" in texts


def test_generators_reduce_to_zero():
    gens = [P("q1^2 - q2"), P("q1*q2 - q3"), P("q3^2 + q1")]
    gb = buchberger(gens)
    for g in gens:
        assert normal_form(g, gb).is_zero()


def test_normal_form_idempotent_and_irreducible():
    gens = [P("q1^2 - q2"), P("q1*q2 - q3")]
    gb = buchberger(gens)
    p = P("q1^5 + 3*q2^3 - q3*q1 + 7")
    r = normal_form(p, gb)
    assert normal_form(r, gb) == r
    lms = gb.leading_monomials()
    for e in r.terms:
        assert not any(all(a <= b for a, b in zip(m, e)) for m in lms)


def test_n4_membership_claims():
    rs = relation_set(4)
    order = MonomialOrder(rs.ctx, weights=rs.weights)
    assert membership(parse_poly("c*q3^2", rs.ctx), rs.generators(), order)
    assert not membership(parse_poly("q1", rs.ctx), rs.generators(), order)
    assert membership(rs.ctx.zero(), rs.generators(), order)


def test_q1_not_in_n4_ideal_witness():
    # a Todd point with q1 != 0 satisfies every n = 4 generator
    rs = relation_set(4)
    q = q_values(FeqParams(*MANIFOLDS[0].parametrize(1, 2)), 9)
    assert rs.check_q_point(q)["ok"] and q[0] != 0


def test_membership_scale_invariant():
    rs = relation_set(4)
    order = MonomialOrder(rs.ctx, weights=rs.weights)
    p = parse_poly("c*q3^2", rs.ctx)
    assert membership(p * mpq(-7, 3), rs.generators(), order)


def test_n5_c_zero_powers():
    sp = relation_set(5, c_zero=True)
    ctx = sp.ctx
    p5 = sp.reduce(parse_poly("5*q1^5 + 30*q1^3*q2 + 9*q1*q2^2 + 22*q1^2*q3 + q2*q3 + 5*q5", ctx))
    p6 = sp.reduce(parse_poly("(11*q1^2 + 3*q2)^3 - 4*(18*q1^3 + 6*q1*q2 - q3)^2", ctx))
    order = MonomialOrder(ctx, weights=sp.weights)
    gens = sp.generators()
    assert membership(p5 ** 2, gens, order)
    assert membership(p6 ** 3, gens, order)
    assert not membership(p5, gens, order)


def test_elimination_trivial_case():
    ctx = VarContext(["q1", "q2", "q3", "c"])
    gens = [parse_poly("c - 3*(q1^2 + q2)", ctx), parse_poly("(q1^2 + q2)*q3^2", ctx)]
    out = eliminate(gens, ["q1", "q2", "q3"], weights=(1, 2, 3, 2))
    assert len(out) == 1 and same_up_to_scale(out[0], gens[1])


def test_elimination_of_everything():
    ctx = VarContext(["x", "y"])
    consistent = [parse_poly("x - 1", ctx), parse_poly("y - 2", ctx)]
    assert eliminate(consistent, []) == []
    inconsistent = [parse_poly("x - 1", ctx), parse_poly("x - 2", ctx)]
    out = eliminate(inconsistent, [])
    assert len(out) == 1 and out[0].is_constant()


def test_n5_c_zero_elimination_cuts_out_level_five_relation():
    sp = relation_set(5, c_zero=True)
    out = eliminate(sp.generators(), ["q1", "q2", "q3", "q4"], weights=sp.weights, degree_bound=12)
    target = sp.reduce(parse_poly("(11*q1^2 + 3*q2)^3 - 4*(18*q1^3 + 6*q1*q2 - q3)^2", sp.ctx))
    order = MonomialOrder(sp.ctx, weights=sp.weights)
    # the relation vanishes on the eliminated variety; only its cube lies in the ideal
    assert radical_membership(target, out)
    assert membership(target ** 3, out, order)
    assert not membership(target, out, order)


def test_saturation_removes_q1_component():
    sat = saturate_by_variable([P("q1*q2"), P("q1*q3")], "q1")
    assert sorted(p.to_string() for p in sat) == ["q2", "q3"]


def test_radical_membership():
    gens = [P("q1^2")]
    assert radical_membership(P("q1"), gens)
    assert not radical_membership(P("q2"), gens)


def test_budget_exceeded_carries_count():
    rs = relation_set(6)
    order = MonomialOrder(rs.ctx, weights=rs.weights)
    with pytest.raises(BudgetExceeded) as info:
        buchberger(rs.generators(), order, budget=Budget(max_pairs=2))
    assert info.value.pairs_reduced == 2


def test_coefficient_budget():
    gens = [P("q1^2 - 3/7*q2"), P("q1*q2 - 11/13*q3"), P("q3^2 - 5/3*q1")]
    with pytest.raises(BudgetExceeded):
        buchberger(gens, budget=Budget(max_coeff_bits=2))


def test_truncated_basis_refuses_higher_degrees():
    gb = buchberger([P("q1^2 - q2")], degree_bound=2)
    with pytest.raises(ValueError):
        gb.normal_form(P("q1^4"))


def test_membership_is_pointwise_sound():
    rs = relation_set(4)
    order = MonomialOrder(rs.ctx, weights=rs.weights)
    p = parse_poly("c*q3^2", rs.ctx)
    assert membership(p, rs.generators(), order)
    for spec, params in [(MANIFOLDS[0], (2, 3)), (MANIFOLDS[2], (1, 4)), (MANIFOLDS[4], (3, -1))]:
        qs = q_values(FeqParams(*spec.parametrize(*params)), 9)
        env = {f"q{k}": v for k, v in enumerate(qs, 1)}
        env["c"] = rs.solved_expr("c").eval(env)
        assert p.eval(env) == 0


small = st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2),
                           st.integers(-3, 3).filter(bool)), min_size=1, max_size=3)


@settings(max_examples=25, deadline=None)
@given(st.lists(small, min_size=1, max_size=3))
def test_random_bases_satisfy_buchberger_criterion(gen_specs):
    gens = [MultiPoly(C3, {(a, b, c): mpq(k) for a, b, c, k in spec}) for spec in gen_specs]
    gens = [g for g in gens if g]
    if not gens:
        return
    gb = buchberger(gens)
    assert gb.is_groebner()
    for g in gens:
        assert gb.contains(g)
