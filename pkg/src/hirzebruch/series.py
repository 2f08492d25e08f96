"""Truncated power series.

:class:`USeries` is a univariate series ``c_0 + c_1 z + ... + c_K z^K + O(z^{K+1})``
whose coefficients are rationals or :class:`~hirzebruch.poly.MultiPoly`.
:class:`MSeries` is a series in ``z_1..z_n`` truncated by total degree.
Arithmetic never claims precision beyond what its inputs carry.
"""

from __future__ import annotations

from math import comb

from gmpy2 import mpq

from .poly import MultiPoly


class SeriesError(ArithmeticError):
    pass


def _is_zero(x) -> bool:
    return not x


def _as_unit(x):
    """Return the rational value of ``x`` if it is a nonzero constant, else None."""
    if isinstance(x, MultiPoly):
        if x.is_constant() and x:
            return x.constant_value()
        return None
    if x:
        return mpq(x)
    return None


class USeries:
    """Univariate truncated series; ``coeffs[k]`` is the coefficient of ``z^k``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        coeffs = list(coeffs)
        if not coeffs:
            raise SeriesError("a series needs at least the constant coefficient")
        self.coeffs = coeffs

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, k):
        return self.coeffs[k]

    def __repr__(self):
        body = " + ".join(f"({c})*z^{k}" for k, c in enumerate(self.coeffs) if not _is_zero(c))
        return f"USeries({body or '0'} + O(z^{self.order + 1}))"

    def truncate(self, K: int) -> "USeries":
        if K > self.order:
            raise SeriesError(f"cannot extend a series of order {self.order} to {K}")
        return USeries(self.coeffs[:K + 1])

    def __add__(self, other):
        other = _promote(other, self.order)
        K = min(self.order, other.order)
        return USeries([self.coeffs[k] + other.coeffs[k] for k in range(K + 1)])

    __radd__ = __add__

    def __neg__(self):
        return USeries([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-_promote(other, self.order))

    def __rsub__(self, other):
        return _promote(other, self.order) - self

    def __mul__(self, other):
        if not isinstance(other, USeries):
            return USeries([c * other for c in self.coeffs])
        K = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        out = []
        for k in range(K + 1):
            acc = 0
            for i in range(k + 1):
                if not _is_zero(a[i]) and not _is_zero(b[k - i]):
                    acc = acc + a[i] * b[k - i]
            out.append(acc)
        return USeries(out)

    __rmul__ = __mul__

    def derivative(self) -> "USeries":
        if self.order == 0:
            raise SeriesError("derivative of an order-0 series carries no information")
        return USeries([self.coeffs[k] * k for k in range(1, self.order + 1)])

    def shift_up(self, k: int = 1) -> "USeries":
        """Multiply by ``z^k``."""
        return USeries([0] * k + self.coeffs)

    def shift_down(self, k: int = 1) -> "USeries":
        """Divide by ``z^k``; the dropped coefficients must vanish."""
        for j in range(k):
            if not _is_zero(self.coeffs[j]):
                raise SeriesError(f"coefficient of z^{j} is nonzero; cannot divide by z^{k}")
        if k > self.order:
            raise SeriesError("nothing left after division")
        return USeries(self.coeffs[k:])

    def reciprocal(self) -> "USeries":
        """Multiplicative inverse; the constant term must be a nonzero rational."""
        inv0 = _as_unit(self.coeffs[0])
        if inv0 is None:
            raise SeriesError("constant term is not a unit")
        inv0 = 1 / inv0
        a = self.coeffs
        b = [inv0]
        for k in range(1, self.order + 1):
            acc = 0
            for i in range(1, k + 1):
                if not _is_zero(a[i]) and not _is_zero(b[k - i]):
                    acc = acc + a[i] * b[k - i]
            b.append(-acc * inv0)
        return USeries(b)

    def is_zero(self) -> bool:
        return all(_is_zero(c) for c in self.coeffs)

    def first_nonzero(self):
        """Index of the first nonzero coefficient, or None."""
        for k, c in enumerate(self.coeffs):
            if not _is_zero(c):
                return k
        return None

    def map(self, fn) -> "USeries":
        return USeries([fn(c) for c in self.coeffs])

    def __eq__(self, other):
        if not isinstance(other, USeries):
            return NotImplemented
        return len(self) == len(other) and all(
            _is_zero(a - b) for a, b in zip(self.coeffs, other.coeffs))


def _promote(x, K):
    if isinstance(x, USeries):
        return x
    return USeries([x] + [0] * K)


def useries_invert(s: USeries) -> USeries:
    """Invert a unit series, or turn ``s = z*u`` (``u`` a unit) into ``z/s``.

    For ``Q = z/f`` this gives ``1/Q``; for ``f`` it gives ``Q``.
    """
    if _as_unit(s.coeffs[0]) is not None:
        return s.reciprocal()
    if _is_zero(s.coeffs[0]) and s.order >= 1 and _as_unit(s.coeffs[1]) is not None:
        return s.shift_down(1).reciprocal()
    raise SeriesError("series is neither a unit nor z times a unit")


def f_from_q(Q: USeries) -> USeries:
    """``f = z/Q``; a Q-series of order K yields f of order K+1."""
    return Q.reciprocal().shift_up(1)


def q_from_f(f: USeries) -> USeries:
    """``Q = z/f``; an f-series of order K yields Q of order K-1."""
    return useries_invert(f)


def q_series(qs, K: int) -> USeries:
    """``Q(z) = 1 + sum q_k z^k`` truncated at ``K``; missing ``q_k`` are taken as zero."""
    coeffs = [mpq(1)] + list(qs[:K])
    coeffs += [0] * (K + 1 - len(coeffs))
    return USeries(coeffs)


# ---------------------------------------------------------------------------
class MSeries:
    """Series in ``z_1..z_n`` truncated at total degree ``D``."""

    __slots__ = ("n", "D", "terms")

    def __init__(self, n: int, D: int, terms=None):
        self.n = n
        self.D = D
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != n:
                raise SeriesError("exponent vector length differs from n")
            if sum(e) <= D and not _is_zero(c):
                clean[e] = c
        self.terms = clean

    @classmethod
    def one(cls, n, D):
        return cls(n, D, {(0,) * n: mpq(1)})

    @classmethod
    def variable(cls, i, n, D):
        e = [0] * n
        e[i] = 1
        return cls(n, D, {tuple(e): mpq(1)})

    def _check(self, other):
        if not isinstance(other, MSeries) or other.n != self.n or other.D != self.D:
            raise SeriesError("MSeries operands differ in variable count or truncation")

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return MSeries(self.n, self.D, out)

    def __neg__(self):
        return MSeries(self.n, self.D, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, k):
        return MSeries(self.n, self.D, {e: c * k for e, c in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, MSeries):
            return self.scale(other)
        self._check(other)
        D = self.D
        out = {}
        by_deg = sorted(other.terms.items(), key=lambda t: sum(t[0]))
        for ea, ca in self.terms.items():
            room = D - sum(ea)
            for eb, cb in by_deg:
                if sum(eb) > room:
                    break
                e = tuple(x + y for x, y in zip(ea, eb))
                prod = ca * cb
                out[e] = out[e] + prod if e in out else prod
        return MSeries(self.n, D, out)

    def restrict(self, D: int) -> "MSeries":
        if D > self.D:
            raise SeriesError("cannot raise the truncation degree")
        return MSeries(self.n, D, self.terms)

    def homogeneous_part(self, d: int):
        return {e: c for e, c in self.terms.items() if sum(e) == d}

    def coefficient(self, exps):
        return self.terms.get(tuple(exps), 0)

    def __eq__(self, other):
        if not isinstance(other, MSeries):
            return NotImplemented
        if (self.n, self.D) != (other.n, other.D):
            return False
        keys = set(self.terms) | set(other.terms)
        return all(_is_zero(self.terms.get(k, 0) - other.terms.get(k, 0)) for k in keys)


def mseries_mul(a: MSeries, b: MSeries) -> MSeries:
    return a * b


def useries_compose_linear(s: USeries, i: int, j: int, n: int, D: int, zero_var=None) -> MSeries:
    """Expand ``s(z_j - z_i)`` in ``z_1..z_n`` up to total degree ``D`` (0-based indices).

    ``zero_var`` optionally names a variable set to zero (translation reduction).
    The series must carry at least ``D + 1`` coefficients.
    """
    if i == j:
        raise SeriesError("compose_linear needs distinct indices")
    if not (0 <= i < n and 0 <= j < n):
        raise SeriesError("index out of range")
    if s.order < D:
        raise SeriesError(f"series of order {s.order} cannot be expanded to degree {D}")
    terms = {}
    for k in range(D + 1):
        ck = s.coeffs[k]
        if _is_zero(ck):
            continue
        for t in range(k + 1):
            # C(k, t) z_j^{k-t} (-z_i)^t
            if zero_var == j and k - t:
                continue
            if zero_var == i and t:
                continue
            e = [0] * n
            e[j] += k - t
            e[i] += t
            coef = comb(k, t) * (-1 if t % 2 else 1)
            key = tuple(e)
            val = ck * coef
            terms[key] = terms[key] + val if key in terms else val
    return MSeries(n, D, terms)
