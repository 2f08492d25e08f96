"""Solution families and the parameter manifolds ``M_N`` in ``(q1, q2, q3, q4)``.

Every generator works over exact rationals or over symbolic parameters
(:class:`MultiPoly`), so manifold identities can be checked as polynomial
identities rather than at sample points.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial

from gmpy2 import mpq

from .exact import rat
from .feqsolve import FeqParams, solve_feq
from .poly import MultiPoly, VarContext, parse_poly
from .series import USeries, f_from_q, q_from_f

Q_CTX = VarContext(["q1", "q2", "q3", "q4"])


class FamilyError(ValueError):
    pass


def _num(x):
    return x if isinstance(x, MultiPoly) else rat(x)


def _complete_h(a, b, k):
    """``h_k(a, b) = sum a^i b^(k-i)``."""
    acc = 0
    for i in range(k + 1):
        acc = acc + a ** i * b ** (k - i)
    return acc


def _exp_series(x, K):
    out, term = [], mpq(1)
    for k in range(K + 1):
        out.append(term if k == 0 else x ** k * mpq(1, factorial(k)))
    return USeries(out)


# ------------------------------------------------------------------- Todd
@dataclass(frozen=True)
class ToddParams:
    a: object
    b: object

    def __post_init__(self):
        object.__setattr__(self, "a", _num(self.a))
        object.__setattr__(self, "b", _num(self.b))

    @property
    def degenerate(self):
        d = self.a - self.b
        return not d


def todd_series(p: ToddParams, K: int) -> USeries:
    """``(e^{az} - e^{bz}) / (a e^{bz} - b e^{az})`` through ``z^K``.

    Numerator and denominator are divided by ``a - b`` first, which leaves
    polynomial coefficients in ``a, b``; ``a = b`` gives ``z / (1 - a z)``.
    """
    a, b = p.a, p.b
    if p.degenerate:
        return rational_series(-a, K)
    num = [_complete_h(a, b, k) * mpq(1, factorial(k + 1)) for k in range(K)]
    den = [mpq(1), mpq(0)] + [-(a * b) * _complete_h(a, b, k - 2) * mpq(1, factorial(k))
                              for k in range(2, K)]
    ratio = USeries(num) * USeries(den).reciprocal()
    return ratio.shift_up(1)


def todd_q(p: ToddParams):
    """``(q1, q2, q3, q4)`` of the Todd series."""
    return tuple(q_from_f(todd_series(p, 5)).coeffs[1:5])


def todd_c(p: ToddParams, n: int):
    """Value of ``c`` for the Todd genus: ``(-1)^(n+1) h_{n-1}(a, b)``."""
    if n < 1:
        raise FamilyError("n must be positive")
    return (-1) ** (n + 1) * _complete_h(p.a, p.b, n - 1)


def todd_c_from_q(q1, q2, n: int):
    """Same value as :func:`todd_c`, written in ``q1, q2`` of a point of ``M_0``.

    Uses ``a + b = -2 q1`` and ``ab = q1^2 - 3 q2``.
    """
    e1, e2 = -2 * _num(q1), _num(q1) ** 2 - 3 * _num(q2)
    h_prev, h = 0, 1
    for _ in range(n - 1):
        h_prev, h = h, e1 * h - e2 * h_prev
    return (-1) ** (n + 1) * h


# ------------------------------------------------------------------ rational
def rational_series(q1, K: int) -> USeries:
    """``z / (1 + q1 z)``."""
    q1 = _num(q1)
    return USeries([0] + [(-q1) ** k for k in range(K)])


def rational_c(q1, n: int):
    return n * _num(q1) ** (n - 1)


# ------------------------------------------------------- singular Krichever
@dataclass(frozen=True)
class SingularKricheverParams:
    alpha: object
    kappa: object
    eta: object

    def __post_init__(self):
        for name in ("alpha", "kappa", "eta"):
            object.__setattr__(self, name, _num(getattr(self, name)))


def _singkr_q(p: SingularKricheverParams, K: int) -> USeries:
    # Q = e^{(kappa - alpha) z} (C - kappa z S) / S with C = ch(eta z), z S = sh(eta z)
    eta2 = p.eta * p.eta
    C, S = [], []
    for k in range(K + 1):
        if k % 2:
            C.append(0)
            S.append(0)
        else:
            C.append(eta2 ** (k // 2) * mpq(1, factorial(k)))
            S.append(eta2 ** (k // 2) * mpq(1, factorial(k + 1)))
    C, S = USeries(C), USeries(S)
    num = C - S.shift_up(1).truncate(K) * p.kappa
    return _exp_series(p.kappa - p.alpha, K) * num * S.reciprocal()


def singular_krichever_series(p: SingularKricheverParams, K: int) -> USeries:
    """``exp(alpha z - kappa z) / (eta cth(eta z) - kappa)`` through ``z^K``; ``eta = 0`` allowed."""
    return f_from_q(_singkr_q(p, K - 1))


def singular_krichever_q(p: SingularKricheverParams):
    return tuple(_singkr_q(p, 4).coeffs[1:5])


# ----------------------------------------------------------------- Krichever
@dataclass(frozen=True)
class KricheverParams:
    alpha: object
    wp: object
    wp1: object
    g2: object

    def __post_init__(self):
        for name in ("alpha", "wp", "wp1", "g2"):
            object.__setattr__(self, name, _num(getattr(self, name)))

    @property
    def g3(self):
        return 4 * self.wp ** 3 - self.g2 * self.wp - self.wp1 ** 2

    @property
    def discriminant(self):
        return self.g2 ** 3 - 27 * self.g3 ** 2


def krichever_to_q(p: KricheverParams):
    q1 = -p.alpha
    q2 = (p.alpha ** 2 - p.wp) * mpq(1, 2)
    q3 = (p.wp1 * mpq(1, 2) - q1 ** 3 + 3 * q1 * q2) * mpq(1, 3)
    q4 = (p.g2 * mpq(1, 20) - q2 ** 2 + 2 * q1 * q3) * mpq(1, 2)
    return (q1, q2, q3, q4)


def q_to_krichever(q1, q2, q3, q4) -> KricheverParams:
    q1, q2, q3, q4 = (_num(x) for x in (q1, q2, q3, q4))
    return KricheverParams(
        alpha=-q1,
        wp=q1 ** 2 - 2 * q2,
        wp1=2 * (q1 ** 3 - 3 * q1 * q2 + 3 * q3),
        g2=20 * (q2 ** 2 - 2 * q1 * q3 + 2 * q4),
    )


def krichever_series(p: KricheverParams, K: int) -> USeries:
    disc = p.discriminant
    if not isinstance(disc, MultiPoly) and not disc:
        raise FamilyError("g2^3 - 27 g3^2 = 0: degenerate lattice, use singular_krichever_series")
    return solve_feq(FeqParams(*krichever_to_q(p)), K)


# ----------------------------------------------------------------- manifolds
def _m2(q2, q4):
    return (mpq(0), _num(q2), mpq(0), _num(q4))


def _m0(q1, q2):
    q2 = _num(q2)
    return (_num(q1), q2, mpq(0), -q2 ** 2 * mpq(1, 5))


def _m3(q1, q3):
    q1, q3 = _num(q1), _num(q3)
    return (q1, -q1 ** 2, q3, -q1 * (4 * q3 + q1 ** 3) * mpq(1, 5))


def _m4(q1, q2):
    q1, q2 = _num(q1), _num(q2)
    return (q1, q2, -q1 * (q1 ** 2 + 3 * q2),
            (q1 ** 4 + 6 * q1 ** 2 * q2 + 7 * q2 ** 2) * mpq(1, 10))


def _sign(s):
    s = int(s)
    if s not in (1, -1):
        raise FamilyError("branch sign must be +1 or -1")
    return s


def _m5(q1, t, sign=1):
    q1, t, sign = _num(q1), _num(t), _sign(sign)
    q2 = (t ** 2 - 11 * q1 ** 2) * mpq(1, 3)
    q3 = 18 * q1 ** 3 + 6 * q1 * q2 - sign * t ** 3 * mpq(1, 2)
    q4 = -(q1 ** 4 + 6 * q1 ** 2 * q2 + 2 * q2 ** 2 + 4 * q1 * q3)
    return (q1, q2, q3, q4)


def _m6(q1, s, sign=1):
    q1, s, sign = _num(q1), _num(s), _sign(sign)
    q2 = s ** 2 * mpq(1, 162) - q1 ** 2
    r = (-13 * q1 ** 2 - 9 * q2 + sign * q1 * s) * mpq(1, 3)  # q3 = q1 r
    q3 = q1 * r
    q4 = -(5 * q1 ** 4 + 50 * q1 ** 2 * q2 + 51 * q2 ** 2 + 48 * q1 ** 2 * r + 24 * q2 * r) * mpq(1, 30)
    return (q1, q2, q3, q4)


P5_TEXT = "5*q1^5 + 50*q1^3*q2 + 51*q1*q2^2 + 48*q1^2*q3 + 24*q2*q3 + 30*q1*q4"
P6_TEXT = "(13*q1^3 + 9*q1*q2 + 3*q3)^2 - 162*q1^4*(q1^2 + q2)"
P7_TEXT = ("56*q1^5*q2 + 576*q1^3*q2^2 + 648*q1*q2^3 - 15*q1^4*q3 + 474*q1^2*q2*q3"
           " + 279*q2^2*q3 - 144*q1*q3^2 - 90*q3*q4")


def level6_polynomials(ctx: VarContext = Q_CTX):
    """``(P5, P6, P7)`` cutting out ``M_2`` together with ``M_6``."""
    return tuple(parse_poly(t, ctx) for t in (P5_TEXT, P6_TEXT, P7_TEXT))


@lru_cache(maxsize=None)
def _m6_relations():
    from .ideal import saturate_by_variable
    return tuple(saturate_by_variable(list(level6_polynomials()), "q1"))


@dataclass(frozen=True)
class ManifoldSpec:
    N: int
    param_names: tuple
    _relations: tuple = field(repr=False)
    _param: object = field(repr=False)
    branches: tuple = (None,)

    @property
    def relations(self):
        if self.N == 6 and not self._relations:
            return list(_m6_relations())
        return [parse_poly(t, Q_CTX) for t in self._relations]

    def parametrize(self, *params):
        """Point ``(q1, q2, q3, q4)``; parameters may be rationals or polynomials."""
        if len(params) not in (len(self.param_names), len(self.param_names) + 1):
            raise FamilyError(f"M{self.N} expects parameters {self.param_names}")
        if len(params) == len(self.param_names) + 1 and self.branches == (None,):
            raise FamilyError(f"M{self.N} has no branch parameter")
        return self._param(*params)

    @property
    def label(self):
        return f"M{self.N}"


MANIFOLDS = {
    0: ManifoldSpec(0, ("q1", "q2"), ("q3", "5*q4 + q2^2"), _m0),
    2: ManifoldSpec(2, ("q2", "q4"), ("q1", "q3"), _m2),
    3: ManifoldSpec(3, ("q1", "q3"), ("q2 + q1^2", "5*q4 + q1*(4*q3 + q1^3)"), _m3),
    4: ManifoldSpec(4, ("q1", "q2"),
                    ("q3 + q1*(q1^2 + 3*q2)", "10*q4 - (q1^4 + 6*q1^2*q2 + 7*q2^2)"), _m4),
    5: ManifoldSpec(5, ("q1", "t"),
                    ("q1^4 + 6*q1^2*q2 + 2*q2^2 + 4*q1*q3 + q4",
                     "(11*q1^2 + 3*q2)^3 - 4*(18*q1^3 + 6*q1*q2 - q3)^2"), _m5, (1, -1)),
    6: ManifoldSpec(6, ("q1", "s"), (), _m6, (1, -1)),
}


def on_manifold(spec: ManifoldSpec, point) -> bool:
    """True iff every defining relation of ``spec`` vanishes at ``point``."""
    vals = dict(zip(("q1", "q2", "q3", "q4"), (_num(x) for x in point)))
    return all(not r.eval(vals) for r in spec.relations)


@dataclass
class LevelSeries:
    N: int
    q: tuple
    f: USeries
    branch: int | None = None


def level_series(N: int, params, K: int) -> LevelSeries:
    """Solution of the third-order equation at the parametrized point of ``M_N``."""
    if N not in (2, 3, 4, 5, 6):
        raise FamilyError("level must be one of 2..6")
    spec = MANIFOLDS[N]
    params = list(params)
    branch = None
    if spec.branches != (None,):
        branch = _sign(params[2]) if len(params) > 2 else 1
        params = params[:2] + [branch]
    q = spec.parametrize(*params)
    return LevelSeries(N, q, solve_feq(FeqParams(*q), K), branch)


def elliptic_sh_params(N: int, k: int, eta) -> SingularKricheverParams:
    """``exp(alpha z) sh(eta z)/eta`` with ``N alpha = (N - 2k) eta``."""
    eta = _num(eta)
    return SingularKricheverParams(alpha=eta * mpq(N - 2 * k, N), kappa=eta, eta=eta)


# ------------------------------------------------------------------ registry
@dataclass
class FamilySpec:
    """A named family at concrete parameters.

    ``series(K)`` gives ``f`` through ``z^K``; ``expected_c(n)`` is the value
    of ``c`` the family must produce for ``n``, or None when ``n`` is not
    admissible (e.g. ``N`` does not divide ``n``).
    """

    name: str
    params: tuple
    series: object
    expected_c: object
    branch: int | None = None

    def q_values(self, kmax: int):
        Q = q_from_f(self.series(kmax + 1))
        return list(Q.coeffs[1:kmax + 1])

    def admissible(self, n: int) -> bool:
        return self.expected_c(n) is not None


FAMILY_PARAMS = {
    "todd": ("a", "b"),
    "rational": ("q1",),
    "singkr": ("alpha", "kappa", "eta"),
    "krichever": ("alpha", "wp", "wp1", "g2"),
    "m0": ("q1", "q2"),
    "level2": ("q2", "q4"),
    "level3": ("q1", "q3"),
    "level4": ("q1", "q2"),
    "level5": ("q1", "t", "[sign]"),
    "level6": ("q1", "s", "[sign]"),
}


def resolve_family(name: str, params) -> FamilySpec:
    """Build a :class:`FamilySpec` from a CLI-style name and parameter list."""
    name = name.lower()
    if name not in FAMILY_PARAMS:
        raise FamilyError(f"unknown family {name!r}; choose from {sorted(FAMILY_PARAMS)}")
    params = tuple(_num(p) for p in params)
    needed = [p for p in FAMILY_PARAMS[name] if not p.startswith("[")]
    optional = len(FAMILY_PARAMS[name]) - len(needed)
    if not len(needed) <= len(params) <= len(needed) + optional:
        raise FamilyError(f"{name} expects parameters {FAMILY_PARAMS[name]}")

    if name == "todd":
        tp = ToddParams(*params)
        return FamilySpec(name, params, lambda K: todd_series(tp, K), lambda n: todd_c(tp, n))
    if name == "rational":
        return FamilySpec(name, params, lambda K: rational_series(params[0], K),
                          lambda n: rational_c(params[0], n))
    if name == "singkr":
        sp = SingularKricheverParams(*params)
        return FamilySpec(name, params, lambda K: singular_krichever_series(sp, K), lambda n: None)
    if name == "krichever":
        kp = KricheverParams(*params)
        return FamilySpec(name, params, lambda K: krichever_series(kp, K), lambda n: None)
    if name == "m0":
        q = _m0(*params)
        return FamilySpec(name, params, lambda K: solve_feq(FeqParams(*q), max(K, 5)),
                          lambda n: todd_c_from_q(q[0], q[1], n))
    N = int(name[-1])
    spec = MANIFOLDS[N]
    branch = None
    if spec.branches != (None,):
        branch = _sign(params[2]) if len(params) > 2 else 1
        params = params[:2] + (branch,)
    q = spec.parametrize(*params)
    return FamilySpec(name, params, lambda K: solve_feq(FeqParams(*q), max(K, 5)),
                      lambda n: mpq(0) if n % N == 0 else None, branch)
