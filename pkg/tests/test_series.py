import pytest

from hirzebruch.exact import rat
from hirzebruch.expand import symbolic_q_series
from hirzebruch.poly import VarContext, parse_poly
from hirzebruch.series import (MSeries, SeriesError, USeries, f_from_q, mseries_mul, q_from_f,
                               q_series, useries_compose_linear, useries_invert)

CTX = VarContext(["q1", "q2", "q3", "q4"])


def test_f_coefficients_from_q():
    Q = symbolic_q_series(CTX, 4)
    f = f_from_q(Q)
    assert f.coeffs[2] == parse_poly("-q1", CTX)
    assert f.coeffs[3] == parse_poly("q1^2 - q2", CTX)
    assert f.coeffs[5] == parse_poly("q1^4 - 3*q1^2*q2 + 2*q1*q3 + q2^2 - q4", CTX)


def test_q_one_gives_identity():
    f = f_from_q(q_series([], 6))
    assert f.coeffs == [0, 1] + [0] * 6


def test_invert_round_trip_symbolic():
    Q = symbolic_q_series(CTX, 4)
    assert q_from_f(f_from_q(Q)) == Q


def test_invert_involution_on_units():
    s = USeries([rat(2), rat(1, 3), rat(-5), rat(7, 2)])
    assert useries_invert(useries_invert(s)) == s


def test_invert_rejects_non_units():
    with pytest.raises(SeriesError):
        useries_invert(USeries([0, 0, 1]))
    with pytest.raises(SeriesError):
        useries_invert(USeries([CTX.var("q1"), 1]))


def test_product_with_inverse_is_one():
    s = USeries([rat(1), rat(3), rat(-2, 5), rat(1, 7), rat(4)])
    prod = s * s.reciprocal()
    assert prod.coeffs == [1, 0, 0, 0, 0]


def test_compose_linear_identity():
    m = useries_compose_linear(USeries([0, 1, 0]), 0, 1, 2, 2)
    assert m.terms == {(0, 1): 1, (1, 0): -1}


def test_compose_linear_square():
    m = useries_compose_linear(USeries([0, 0, 1]), 0, 1, 2, 2)
    assert m.terms == {(0, 2): 1, (1, 1): -2, (2, 0): 1}


def test_compose_linear_symbolic_with_translation():
    Q = symbolic_q_series(CTX, 3)
    m = useries_compose_linear(Q, 0, 1, 2, 3, zero_var=0)
    assert m.coefficient((0, 2)) == CTX.var("q2")


def test_compose_needs_enough_terms():
    with pytest.raises(SeriesError):
        useries_compose_linear(USeries([1, 1]), 0, 1, 2, 3)


def _vandermonde(n, D):
    v = MSeries.one(n, D)
    for k in range(n):
        for l in range(k + 1, n):
            v = v * (MSeries.variable(l, n, D) - MSeries.variable(k, n, D))
    return v


def test_vandermonde_matches_determinant_oracle():
    from itertools import permutations
    v = _vandermonde(3, 3)
    oracle = {}
    for perm in permutations(range(3)):
        sign = 1
        for i in range(3):
            for j in range(i + 1, 3):
                if perm[i] > perm[j]:
                    sign = -sign
        oracle[tuple(perm)] = sign
    assert v.terms == oracle
    assert len(v.terms) == 6


def test_mseries_unit_and_single_term():
    a = MSeries(2, 3, {(1, 0): 2, (0, 2): -1})
    assert mseries_mul(a, MSeries.one(2, 3)) == a
    assert (MSeries.variable(0, 2, 3) * MSeries.variable(1, 2, 3)).terms == {(1, 1): 1}


def test_truncation_consistency():
    Q = USeries([1, rat(1, 2), rat(-1, 3), 2, 5, rat(1, 7)])
    hi = useries_compose_linear(Q, 0, 2, 3, 5) * useries_compose_linear(Q, 1, 2, 3, 5)
    lo = useries_compose_linear(Q, 0, 2, 3, 3) * useries_compose_linear(Q, 1, 2, 3, 3)
    assert hi.restrict(3) == lo


def test_mismatched_mseries():
    with pytest.raises(SeriesError):
        MSeries.one(2, 3) * MSeries.one(3, 3)


def test_derivative_and_shifts():
    s = USeries([1, 2, 3])
    assert s.derivative().coeffs == [2, 6]
    assert s.shift_up(2).shift_down(2) == s
    with pytest.raises(SeriesError):
        s.shift_down(1)
