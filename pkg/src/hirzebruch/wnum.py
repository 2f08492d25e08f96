"""Double-precision checks of the analytic side.

Weierstrass ``sigma, zeta, wp, wp'`` come from the Jacobi theta function
``theta_1`` in the nome ``q = exp(i pi omega'/omega)``, with full periods
``omega, omega'``.  On top of them sit numeric versions of every solution
family and Monte-Carlo residuals of the functional equation.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

THETA_TOL = 1e-16
THETA_MAX_TERMS = 400
POLE_TOL = 1e-9


class PoleError(ValueError):
    """Evaluation point too close to a pole."""


def _finite(x):
    arr = np.asarray(x)
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite complex value")
    return x


def _theta1_derivs(v, q):
    """``theta_1`` and its first three ``v``-derivatives at array ``v``."""
    v = np.asarray(v, dtype=complex)
    out = [np.zeros_like(v) for _ in range(4)]
    for n in range(THETA_MAX_TERMS):
        m = 2 * n + 1
        coef = 2 * (-1) ** n * q ** ((n + 0.5) ** 2)
        s, c = np.sin(m * v), np.cos(m * v)
        terms = (coef * s, coef * m * c, -coef * m * m * s, -coef * m ** 3 * c)
        for acc, t in zip(out, terms):
            acc += t
        scale = max(float(np.max(np.abs(out[0]))), float(np.max(np.abs(out[1]))), 1e-300)
        if n > 2 and float(np.max(np.abs(terms[3]))) < THETA_TOL * scale:
            break
    return out


@dataclass
class Lattice:
    """Lattice generated by ``omega, omega'`` with ``Im(omega'/omega) > 0``."""

    omega: complex
    omega_p: complex
    nome: complex = field(init=False)
    eta1: complex = field(init=False)

    def __post_init__(self):
        self.omega = complex(_finite(self.omega))
        self.omega_p = complex(_finite(self.omega_p))
        if self.omega == 0:
            raise ValueError("omega must be nonzero")
        tau = self.omega_p / self.omega
        if tau.imag <= 0:
            raise ValueError("need Im(omega'/omega) > 0; swap the sign of omega'")
        self.nome = cmath.exp(1j * math.pi * tau)
        if abs(self.nome) >= 1:
            raise ValueError("nome must lie inside the unit disc")
        d = _theta1_derivs(np.array([0j]), self.nome)
        w1 = self.omega / 2
        self._th1p0 = d[1][0]
        self.eta1 = -(math.pi ** 2 / (12 * w1)) * d[3][0] / d[1][0]

    @property
    def tau(self):
        return self.omega_p / self.omega

    def _check_pole(self, z):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        # coordinates in the (omega, omega') basis
        m = np.array([[self.omega.real, self.omega_p.real], [self.omega.imag, self.omega_p.imag]])
        xy = np.linalg.solve(m, np.vstack([z.real, z.imag]))
        frac = xy - np.round(xy)
        near = frac[0] * self.omega + frac[1] * self.omega_p
        if np.any(np.abs(near) < POLE_TOL * abs(self.omega)):
            raise PoleError("point coincides with a lattice point")

    def _parts(self, z):
        w1 = self.omega / 2
        v = np.pi * np.asarray(z, dtype=complex) / self.omega
        th = _theta1_derivs(v, self.nome)
        return w1, th

    def sigma(self, z):
        w1, th = self._parts(z)
        z = np.asarray(z, dtype=complex)
        return (2 * w1 / np.pi) * np.exp(self.eta1 * z * z / (2 * w1)) * th[0] / self._th1p0

    def zeta(self, z):
        self._check_pole(z)
        w1, th = self._parts(z)
        z = np.asarray(z, dtype=complex)
        return self.eta1 * z / w1 + (np.pi / (2 * w1)) * th[1] / th[0]

    def wp(self, z):
        self._check_pole(z)
        w1, th = self._parts(z)
        r1, r2 = th[1] / th[0], th[2] / th[0]
        return -self.eta1 / w1 - (np.pi / (2 * w1)) ** 2 * (r2 - r1 * r1)

    def wp_prime(self, z):
        self._check_pole(z)
        w1, th = self._parts(z)
        r1, r2, r3 = th[1] / th[0], th[2] / th[0], th[3] / th[0]
        return -(np.pi / (2 * w1)) ** 3 * (r3 - 3 * r2 * r1 + 2 * r1 ** 3)

    def half_period_values(self):
        w, wp_ = self.omega, self.omega_p
        return tuple(complex(self.wp(h)) for h in (w / 2, wp_ / 2, (w + wp_) / 2))

    @property
    def invariants(self):
        """``(g2, g3)``."""
        e = self.half_period_values()
        return 2 * sum(x * x for x in e), 4 * e[0] * e[1] * e[2]


def weier_eval(L: Lattice, z):
    """``(sigma, zeta, wp, wp')`` at ``z``."""
    return (complex(L.sigma(z)), complex(L.zeta(z)), complex(L.wp(z)), complex(L.wp_prime(z)))


def weierstrass_residual(L: Lattice, z) -> float:
    """Relative residual of ``wp'^2 = 4 wp^3 - g2 wp - g3``."""
    g2, g3 = L.invariants
    p, dp = complex(L.wp(z)), complex(L.wp_prime(z))
    rhs = 4 * p ** 3 - g2 * p - g3
    return abs(dp * dp - rhs) / max(abs(dp * dp), abs(rhs), 1.0)


def legendre_residual(L: Lattice) -> float:
    lhs = complex(L.zeta(L.omega / 2)) * L.omega_p - complex(L.zeta(L.omega_p / 2)) * L.omega
    return abs(lhs - 1j * math.pi)


# ------------------------------------------------------------------ families
@dataclass
class NumericFamily:
    """A solution family as a callable ``f(z)`` plus metadata."""

    name: str
    func: object
    c: object = None  # callable n -> expected c, or None
    params: dict = field(default_factory=dict)

    def __call__(self, z):
        return self.func(np.asarray(z, dtype=complex))

    def expected_c(self, n):
        return None if self.c is None else self.c(n)


def todd_numeric(a, b) -> NumericFamily:
    a, b = complex(a), complex(b)
    if a == b:
        return rational_numeric(-a)

    def f(z):
        return (np.exp(a * z) - np.exp(b * z)) / (a * np.exp(b * z) - b * np.exp(a * z))

    def c(n):
        return (-1) ** (n + 1) * sum(a ** i * b ** (n - 1 - i) for i in range(n))

    return NumericFamily("todd", f, c, {"a": a, "b": b})


def tanh_numeric() -> NumericFamily:
    fam = todd_numeric(1, -1)
    return NumericFamily("tanh", np.tanh, fam.c, {})


def rational_numeric(q1) -> NumericFamily:
    q1 = complex(q1)
    return NumericFamily("rational", lambda z: z / (1 + q1 * z), lambda n: n * q1 ** (n - 1), {"q1": q1})


def singular_krichever_numeric(alpha, kappa, eta, c=None) -> NumericFamily:
    alpha, kappa, eta = complex(alpha), complex(kappa), complex(eta)

    def f(z):
        if eta == 0:
            return z * np.exp((alpha - kappa) * z) / (1 - kappa * z)
        sh = np.sinh(eta * z)
        return np.exp((alpha - kappa) * z) * sh / (eta * np.cosh(eta * z) - kappa * sh)

    return NumericFamily("singkr", f, c, {"alpha": alpha, "kappa": kappa, "eta": eta})


def elliptic_sh_numeric(N: int, k: int, eta=1.0) -> NumericFamily:
    """``exp(alpha z) sh(eta z)/eta`` with ``N alpha = (N - 2k) eta``; ``c = 0`` for ``N | n``."""
    eta = complex(eta)
    alpha = eta * (N - 2 * k) / N
    fam = singular_krichever_numeric(alpha, eta, eta, c=lambda n: 0 if n % N == 0 else None)
    fam.name = "sh"
    fam.params.update({"N": N, "k": k})
    return fam


def krichever_numeric(L: Lattice, alpha, rho) -> NumericFamily:
    """``sigma(z) sigma(rho) / sigma(rho - z) * exp(alpha z - zeta(rho) z)``."""
    alpha, rho = complex(alpha), complex(rho)
    s_rho, z_rho = complex(L.sigma(rho)), complex(L.zeta(rho))

    def f(z):
        return L.sigma(z) * s_rho / L.sigma(rho - z) * np.exp((alpha - z_rho) * z)

    fam = NumericFamily("krichever", f, None, {"alpha": alpha, "rho": rho})
    fam.lattice = L
    return fam


def krichever_period_factor(L: Lattice, alpha, rho, period: complex) -> complex:
    """Multiplier of the Krichever function under ``z -> z + period`` (a lattice generator)."""
    return cmath.exp(alpha * period + 2 * complex(L.zeta(period / 2)) * rho
                     - complex(L.zeta(rho)) * period)


def level_numeric(L: Lattice, N: int) -> NumericFamily:
    """Elliptic function of level ``N``: ``alpha = zeta(omega/N) - 2 zeta(omega/2)/N``, ``rho = omega/N``."""
    if N < 2:
        raise ValueError("level must be at least 2")
    rho = L.omega / N
    alpha = complex(L.zeta(rho)) - 2 * complex(L.zeta(L.omega / 2)) / N
    fam = krichever_numeric(L, alpha, rho)
    fam.name = f"level{N}"
    fam.c = lambda n: 0 if n % N == 0 else None
    fam.params.update({"N": N})
    return fam


def krichever_q_values(L: Lattice, alpha, rho):
    """``(q1, q2, q3, q4)`` of the Krichever function from ``(alpha, wp(rho), wp'(rho), g2)``."""
    g2, _ = L.invariants
    p, dp = complex(L.wp(rho)), complex(L.wp_prime(rho))
    q1 = -alpha
    q2 = (alpha ** 2 - p) / 2
    q3 = (dp / 2 - q1 ** 3 + 3 * q1 * q2) / 3
    q4 = (g2 / 20 - q2 ** 2 + 2 * q1 * q3) / 2
    return (q1, q2, q3, q4)


# ------------------------------------------------------------------ residuals
@dataclass
class ResidualReport:
    max_residual: float
    samples: int
    skipped: int

    def __float__(self):
        return self.max_residual


def hfe_residual_numeric(f, n: int, points, c) -> ResidualReport:
    """``max |sum_i prod_{j != i} 1/f(z_j - z_i) - c|`` over point tuples.

    Tuples that hit a zero or pole of ``f`` are skipped and counted.
    """
    worst, used, skipped = 0.0, 0, 0
    c = complex(c)
    for tup in points:
        z = np.asarray(tup, dtype=complex)
        if z.shape != (n,):
            raise ValueError(f"each tuple needs {n} points")
        total = 0j
        try:
            with np.errstate(all="raise"):
                for i in range(n):
                    d = np.delete(z, i) - z[i]
                    vals = np.asarray(f(d), dtype=complex)
                    total += complex(np.prod(1.0 / vals))
        except (FloatingPointError, ZeroDivisionError, PoleError):
            skipped += 1
            continue
        if not cmath.isfinite(total):
            skipped += 1
            continue
        worst = max(worst, abs(total - c))
        used += 1
    return ResidualReport(worst, used, skipped)


def sample_tuples(n: int, count: int, seed: int, radius=0.4, min_sep=0.08):
    """Seeded tuples of ``n`` points in a disc with pairwise separation ``>= min_sep``."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        r = radius * np.sqrt(rng.random(n))
        th = 2 * np.pi * rng.random(n)
        z = r * np.exp(1j * th)
        d = np.abs(z[:, None] - z[None, :]) + np.eye(n)
        if d.min() >= min_sep:
            out.append(z)
    return out


def periodicity_residual(f, period: complex, factor: complex, points) -> float:
    """``max |f(z + period) - factor f(z)| / |f(z)|``."""
    z = np.asarray(points, dtype=complex)
    a, b = f(z + period), factor * f(z)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))


def eval_series(coeffs, z):
    """Evaluate an exact series (rational coefficients) at complex ``z``."""
    z = np.asarray(z, dtype=complex)
    acc = np.zeros_like(z)
    for c in reversed([complex(float(x.numerator) / float(x.denominator)) if hasattr(x, "denominator")
                       else complex(x) for x in coeffs]):
        acc = acc * z + c
    return acc


def series_error_slope(f, coeffs, radii=(1e-1, 1e-2), direction=cmath.exp(0.3j)) -> float:
    """``log(err(r1)/err(r2)) / log(r1/r2)`` for the truncated series vs. the function."""
    errs = []
    for r in radii:
        z = r * direction
        errs.append(abs(complex(f(np.array([z]))[0]) - complex(eval_series(coeffs, np.array([z]))[0])))
    if min(errs) == 0:
        return math.inf
    return math.log(errs[0] / errs[1]) / math.log(radii[0] / radii[1])


def central_difference(fn, z, h=1e-5):
    return (complex(fn(z + h)) - complex(fn(z - h))) / (2 * h)
