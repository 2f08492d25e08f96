import cmath
import math

import numpy as np
import pytest

from hirzebruch.families import ToddParams, todd_series, MANIFOLDS, rational_series
from hirzebruch import wnum

L = wnum.Lattice(1.0, 0.3 + 1.2j)


def test_lattice_orientation_enforced():
    with pytest.raises(ValueError):
        wnum.Lattice(1.0, 0.3 - 1.2j)


def test_weierstrass_equation():
    for z in (0.2 + 0.1j, 0.37 - 0.21j, -0.1 + 0.45j):
        assert wnum.weierstrass_residual(L, z) < 1e-9


def test_parity():
    z = 0.23 + 0.11j
    assert abs(complex(L.wp(-z)) - complex(L.wp(z))) < 1e-10
    assert abs(complex(L.zeta(-z)) + complex(L.zeta(z))) < 1e-10


def test_legendre_identity():
    assert wnum.legendre_residual(L) < 1e-9
    assert wnum.legendre_residual(wnum.Lattice(0.8 + 0.2j, -0.1 + 0.9j)) < 1e-9


def test_derivative_consistency():
    z = 0.31 - 0.07j
    wp = complex(L.wp(z))
    assert abs(wnum.central_difference(L.zeta, z) + wp) / abs(wp) < 1e-6
    ratio = wnum.central_difference(L.sigma, z) / complex(L.sigma(z))
    assert abs(ratio - complex(L.zeta(z))) / abs(complex(L.zeta(z))) < 1e-6
    dwp = wnum.central_difference(L.wp, z)
    assert abs(dwp - complex(L.wp_prime(z))) / abs(dwp) < 1e-6


def test_pole_detection():
    with pytest.raises(wnum.PoleError):
        L.wp(L.omega)


def test_square_lattice_has_no_g3():
    sq = wnum.Lattice(1.0, 1j)
    g2, g3 = sq.invariants
    assert abs(g3) < 1e-9 * abs(g2)


def test_todd_function_matches_series():
    f = wnum.todd_numeric(1, 0)
    z = 0.01 * cmath.exp(0.4j)
    assert abs(complex(f(np.array([z]))[0]) - (cmath.exp(z) - 1)) < 1e-15
    coeffs = todd_series(ToddParams(1, 0), 5).coeffs
    slope = wnum.series_error_slope(f, coeffs)
    assert slope >= 5 * 0.9


def test_level_functions_match_exact_series():
    # numeric q-values of the level-N function lie on M_N and its series agrees
    for N in (2, 3, 4):
        fam = wnum.level_numeric(L, N)
        q = wnum.krichever_q_values(L, fam.params["alpha"], fam.params["rho"])
        env = dict(zip(["q1", "q2", "q3", "q4"], q))
        for rel in MANIFOLDS[N].relations:
            val = sum(complex(float(c)) * np.prod([env[v] ** k for v, k in zip(rel.ctx.names, e)])
                      for e, c in rel.terms.items())
            assert abs(val) < 1e-8


def test_level_periodicity():
    zs = np.array([0.1 + 0.05j, 0.2 - 0.1j, -0.15 + 0.2j])
    for N in (2, 3):
        f = wnum.level_numeric(L, N)
        assert wnum.periodicity_residual(f, L.omega, 1.0, zs) < 1e-8
        eps = cmath.exp(-2j * math.pi / N)
        assert wnum.periodicity_residual(f, L.omega_p, eps, zs) < 1e-8


def test_krichever_period_factor():
    alpha, rho = 0.3 - 0.2j, 0.27 + 0.31j
    f = wnum.krichever_numeric(L, alpha, rho)
    zs = np.array([0.1 + 0.05j, -0.2 + 0.1j])
    for period in (L.omega, L.omega_p):
        factor = wnum.krichever_period_factor(L, alpha, rho, period)
        assert wnum.periodicity_residual(f, period, factor, zs) < 1e-8


@pytest.mark.parametrize("n,c", [(3, 1), (4, 0), (5, 1), (6, 0)])
def test_tanh_identities(n, c):
    rep = wnum.hfe_residual_numeric(wnum.tanh_numeric(), n, wnum.sample_tuples(n, 100, n), c)
    assert rep.samples == 100 and rep.max_residual < 1e-9


def test_level_three_n_six():
    rep = wnum.hfe_residual_numeric(wnum.level_numeric(L, 3), 6, wnum.sample_tuples(6, 100, 7), 0)
    assert rep.max_residual < 1e-7


def test_wrong_c_is_detected():
    rep = wnum.hfe_residual_numeric(wnum.tanh_numeric(), 3, wnum.sample_tuples(3, 20, 1), 0)
    assert rep.max_residual > 0.5


def test_degenerate_tuples_are_skipped():
    rep = wnum.hfe_residual_numeric(wnum.tanh_numeric(), 3, [np.array([0.1, 0.1, 0.2])], 1)
    assert rep.skipped == 1 and rep.samples == 0


def test_rational_series_error_slope():
    coeffs = rational_series(2, 5).coeffs
    slope = wnum.series_error_slope(wnum.rational_numeric(2), coeffs)
    assert slope >= 5 * 0.9


def test_sampling_is_reproducible():
    a = wnum.sample_tuples(4, 5, 11)
    b = wnum.sample_tuples(4, 5, 11)
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
