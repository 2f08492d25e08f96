"""Series solutions of the third-order equation

    f f''' - 3 f' f'' = 6 q1 f'^2 + 12 q2 f f' + 12 q3 f^2,   f = z + O(z^2).

Given ``(q1, q2, q3, q4)`` the solution is unique: the first four
coefficients follow from ``Q = z/f = 1 + q1 z + ... + q4 z^4`` and every later
coefficient is forced by one linear equation.  Coefficients may be rationals
or :class:`MultiPoly` (symbolic mode).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from gmpy2 import mpq

from .exact import rat
from .poly import MultiPoly, VarContext
from .series import SeriesError, USeries, f_from_q, q_from_f, q_series

MIN_TERMS = 5


class RecurrenceError(ArithmeticError):
    """The linear equation for the next coefficient degenerated."""


def _coerce(x):
    return x if isinstance(x, MultiPoly) else rat(x)


@dataclass(frozen=True)
class FeqParams:
    q1: object
    q2: object
    q3: object
    q4: object

    def __post_init__(self):
        for name in ("q1", "q2", "q3", "q4"):
            object.__setattr__(self, name, _coerce(getattr(self, name)))

    def as_tuple(self):
        return (self.q1, self.q2, self.q3, self.q4)

    @classmethod
    def symbolic(cls, ctx: VarContext | None = None):
        ctx = ctx or VarContext(["q1", "q2", "q3", "q4"])
        return cls(*(ctx.var(f"q{i}") for i in range(1, 5)))


def _nz(x):
    return bool(x)


def feq_coefficient(a, N: int, q1, q2, q3):
    """Coefficient of ``z^N`` in LHS - RHS, with ``a[i]`` the coefficient of ``z^i`` in f.

    Needs ``a`` up to index ``N + 2``.
    """
    acc = 0
    for i in range(N + 1):
        j = N - i
        ai = a[i]
        if _nz(ai):
            b = a[j + 3]
            if _nz(b):
                acc = acc + ai * b * ((j + 3) * (j + 2) * (j + 1))
            b = a[j + 1]
            if _nz(b):
                acc = acc - ai * b * (12 * (j + 1)) * q2
            b = a[j]
            if _nz(b):
                acc = acc - ai * b * 12 * q3
        d1 = a[i + 1]
        if _nz(d1):
            b = a[j + 2]
            if _nz(b):
                acc = acc - d1 * b * (3 * (i + 1) * (j + 2) * (j + 1))
            b = a[j + 1]
            if _nz(b):
                acc = acc - d1 * b * (6 * (i + 1) * (j + 1)) * q1
    return acc


def _as_rational_slope(x):
    if isinstance(x, MultiPoly):
        if not x.is_constant():
            raise RecurrenceError("recurrence slope is not a constant")
        x = x.constant_value()
    return mpq(x)


def solve_feq(p: FeqParams, K: int) -> USeries:
    """Series solution ``f`` with coefficients of ``z^0 .. z^K``."""
    if K < MIN_TERMS:
        raise ValueError(f"need K >= {MIN_TERMS}, got {K}")
    q1, q2, q3, q4 = p.as_tuple()
    head = f_from_q(q_series([q1, q2, q3, q4], 4))  # z^0..z^5
    a = list(head.coeffs) + [0] * (K + 3 - head.order)
    # orders below z^4 are identities in q1..q3; check them
    for N in range(0, 4):
        if _nz(feq_coefficient(a, N, q1, q2, q3)):
            raise RecurrenceError(f"initial coefficients violate the equation at z^{N}")
    for m in range(6, K + 1):
        a[m] = 0
        r0 = feq_coefficient(a, m - 2, q1, q2, q3)
        a[m] = 1
        r1 = feq_coefficient(a, m - 2, q1, q2, q3)
        slope = _as_rational_slope(r1 - r0)
        if not slope:
            raise RecurrenceError(f"vanishing leading coefficient at z^{m}")
        a[m] = -r0 / slope if not isinstance(r0, MultiPoly) else r0.scale(-1 / slope)
    return USeries(a[:K + 1])


def feq_residual(f: USeries, q1, q2, q3) -> USeries:
    """LHS - RHS of the equation; coefficients ``z^0 .. z^{K-2}`` are exact."""
    K = f.order
    if K < MIN_TERMS:
        raise SeriesError(f"need at least z^{MIN_TERMS} in f, got order {K}")
    q1, q2, q3 = (_coerce(x) for x in (q1, q2, q3))
    a = list(f.coeffs) + [0, 0, 0]
    return USeries([feq_coefficient(a, N, q1, q2, q3) for N in range(K - 1)])


def first_nonzero_residual(f: USeries, q1, q2, q3):
    """``(k, value)`` of the first nonzero residual coefficient, or None."""
    r = feq_residual(f, q1, q2, q3)
    k = r.first_nonzero()
    return None if k is None else (k, r.coeffs[k])


def q_values(p: FeqParams, kmax: int):
    """``[q1, ..., q_kmax]`` of the solution."""
    f = solve_feq(p, max(kmax + 1, MIN_TERMS))
    Q = q_from_f(f)
    return list(Q.coeffs[1:kmax + 1])


@lru_cache(maxsize=None)
def _universal(kmax: int):
    ctx = VarContext(["q1", "q2", "q3", "q4"])
    return ctx, tuple(q_values(FeqParams.symbolic(ctx), kmax))


def universal_q(kmax: int, ctx: VarContext | None = None):
    """``{"q5": poly, ..., "q_kmax": poly}`` in ``q1..q4`` for every solution.

    Returned in ``ctx`` when given (it must contain ``q1..q4``).
    """
    base, qs = _universal(kmax)
    out = {}
    for k in range(5, kmax + 1):
        poly = qs[k - 1]
        out[f"q{k}"] = poly.change_context(ctx) if ctx is not None else poly
    return out
