import pytest
from gmpy2 import mpq

from hirzebruch.families import KricheverParams, krichever_to_q
from hirzebruch.feqsolve import (FeqParams, RecurrenceError, feq_residual, first_nonzero_residual,
                                 q_values, solve_feq, universal_q)
from hirzebruch.poly import VarContext, parse_poly
from hirzebruch.series import USeries

from conftest import rand_rat

KCTX = VarContext(["alpha", "wp", "wp1", "g2"])


def test_zero_parameters_give_identity():
    f = solve_feq(FeqParams(0, 0, 0, 0), 12)
    assert f.coeffs == [0, 1] + [0] * 11


def test_first_coefficients_from_q():
    ctx = VarContext(["q1", "q2", "q3", "q4"])
    f = solve_feq(FeqParams.symbolic(ctx), 6)
    assert f.coeffs[2] == parse_poly("-q1", ctx)
    assert f.coeffs[3] == parse_poly("q1^2 - q2", ctx)
    assert f.coeffs[5] == parse_poly("q1^4 - 3*q1^2*q2 + 2*q1*q3 + q2^2 - q4", ctx)


def test_krichever_expansion_through_z5():
    a, wp, wp1, g2 = KCTX.gens()
    f = solve_feq(FeqParams(*krichever_to_q(KricheverParams(a, wp, wp1, g2))), 6)
    assert f.coeffs[2] == a
    assert f.coeffs[3] == (a ** 2 + wp) / 2
    assert f.coeffs[4] == (a ** 3 + 3 * a * wp - wp1) / 6
    assert f.coeffs[5] == (a ** 4 + 6 * a ** 2 * wp + 9 * wp ** 2 - 4 * a * wp1 - g2 * mpq(3, 5)) / 24


def test_level_two_solution_is_odd(rng):
    for _ in range(5):
        f = solve_feq(FeqParams(0, rand_rat(rng), 0, rand_rat(rng)), 15)
        assert all(not f.coeffs[k] for k in range(0, 16, 2))


def test_random_points_solve_exactly(rng):
    for _ in range(20):
        p = FeqParams(*(rand_rat(rng) for _ in range(4)))
        f = solve_feq(p, 14)
        assert feq_residual(f, p.q1, p.q2, p.q3).is_zero()


def test_todd_series_solves_equation():
    from hirzebruch.families import ToddParams, todd_series
    f = todd_series(ToddParams(1, 0), 12)
    assert feq_residual(f, mpq(-1, 2), mpq(1, 12), 0).is_zero()


def test_residual_reports_first_failure():
    f = USeries([0, 1, 1, 0, 0, 0])
    k, val = first_nonzero_residual(f, 0, 0, 0)
    assert (k, val) == (0, -6)


def test_uniqueness_and_q4_perturbation(rng):
    base = [rand_rat(rng) for _ in range(4)]
    f1 = solve_feq(FeqParams(*base), 12)
    f2 = solve_feq(FeqParams(*base), 12)
    assert f1 == f2
    bumped = base[:3] + [base[3] + mpq(3, 7)]
    g = solve_feq(FeqParams(*bumped), 12)
    assert g.coeffs[5] - f1.coeffs[5] == mpq(-3, 7)
    assert g.coeffs[:5] == f1.coeffs[:5]


def test_short_orders_rejected():
    with pytest.raises(ValueError):
        solve_feq(FeqParams(0, 0, 0, 0), 4)


def test_universal_q5_matches_pointwise(rng):
    u = universal_q(9)
    for _ in range(5):
        p = [rand_rat(rng) for _ in range(4)]
        qs = q_values(FeqParams(*p), 9)
        env = dict(zip(["q1", "q2", "q3", "q4"], p))
        assert [u[f"q{k}"].eval(env) for k in range(5, 10)] == qs[4:9]


def test_universal_q_agrees_with_n3_relations_on_the_variety():
    # the differences vanish on every n = 3 solution; they lie in the radical,
    # not necessarily in the ideal itself
    from conftest import relation_set
    from hirzebruch.ideal import radical_membership
    rs = relation_set(3)
    u = universal_q(8, rs.ctx)
    for k in (5, 6, 7, 8):
        diff = rs.reduce(u[f"q{k}"] - rs.ctx.var(f"q{k}"))
        assert radical_membership(diff, rs.residual)


def test_symbolic_slope_is_checked():
    # slope is always a rational constant; a polynomial in a_m would be a bug
    from hirzebruch.feqsolve import _as_rational_slope
    ctx = VarContext(["x"])
    with pytest.raises(RecurrenceError):
        _as_rational_slope(ctx.var("x"))
