"""Sparse multivariate polynomials over the rationals.

A :class:`MultiPoly` lives in a :class:`VarContext`, an ordered tuple of
variable names.  Terms are stored as ``{exponent tuple: mpq}`` with zero
coefficients never kept.  Values are immutable.

The canonical text form lists terms in the context's graded order (total
degree first, then lexicographic in context order), e.g.
``5*q1^4 + 150*q1^2*q2 - 20*q4``.
"""

from __future__ import annotations

import ast
import operator
from functools import reduce
from math import gcd, lcm

from gmpy2 import mpq

from .exact import Rational, format_rational, rat


class ContextMismatch(ValueError):
    pass


class UnknownVariable(KeyError):
    pass


class VarContext:
    """Ordered, duplicate-free variable names.  Order fixes monomial tie-breaks."""

    __slots__ = ("names", "_index")

    def __init__(self, names):
        names = tuple(str(n) for n in names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        for n in names:
            if not n.isidentifier():
                raise ValueError(f"invalid variable name {n!r}")
        self.names = names
        self._index = {n: i for i, n in enumerate(names)}

    @classmethod
    def q_context(cls, m: int, extra=("c",)) -> "VarContext":
        """Context ``q1..qm`` followed by ``extra`` names."""
        return cls([f"q{k}" for k in range(1, m + 1)] + list(extra))

    def __len__(self):
        return len(self.names)

    def __iter__(self):
        return iter(self.names)

    def __contains__(self, name):
        return name in self._index

    def __eq__(self, other):
        return isinstance(other, VarContext) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"VarContext({list(self.names)})"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownVariable(name) from None

    def var(self, name: str) -> "MultiPoly":
        e = [0] * len(self.names)
        e[self.index(name)] = 1
        return MultiPoly._raw(self, {tuple(e): mpq(1)})

    def gens(self):
        return tuple(self.var(n) for n in self.names)

    def zero(self) -> "MultiPoly":
        return MultiPoly._raw(self, {})

    def one(self) -> "MultiPoly":
        return self.constant(1)

    def constant(self, value) -> "MultiPoly":
        value = rat(value)
        if value == 0:
            return self.zero()
        return MultiPoly._raw(self, {(0,) * len(self.names): value})

    def monomial(self, exps, coef=1) -> "MultiPoly":
        exps = tuple(int(e) for e in exps)
        if len(exps) != len(self.names):
            raise ValueError("exponent vector length differs from context size")
        return MultiPoly(self, {exps: coef})


def _grlex_key(exps):
    # ascending sort of this key = descending graded-lex order
    return (-sum(exps), tuple(-e for e in exps))


def _add_exps(a, b):
    return tuple(map(operator.add, a, b))


class MultiPoly:
    """Immutable polynomial with rational coefficients in a named context."""

    __slots__ = ("ctx", "terms", "_hash")

    def __init__(self, ctx: VarContext, terms=None):
        clean = {}
        n = len(ctx)
        for exps, coef in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != n:
                raise ValueError("exponent vector length differs from context size")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            coef = rat(coef)
            if coef:
                clean[exps] = clean.get(exps, 0) + coef
                if not clean[exps]:
                    del clean[exps]
        self.ctx = ctx
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, ctx, terms):
        # trusted constructor: terms already clean
        p = object.__new__(cls)
        p.ctx = ctx
        p.terms = terms
        p._hash = None
        return p

    # ------------------------------------------------------------------ basics
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_value(self) -> Rational:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.terms.get((0,) * len(self.ctx), mpq(0))

    def __len__(self):
        return len(self.terms)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def weighted_degree(self, weights) -> int:
        return max((sum(w * x for w, x in zip(weights, e)) for e in self.terms), default=-1)

    def is_homogeneous(self, weights=None) -> bool:
        if weights is None:
            weights = (1,) * len(self.ctx)
        degs = {sum(w * x for w, x in zip(weights, e)) for e in self.terms}
        return len(degs) <= 1

    def degree(self, var: str) -> int:
        i = self.ctx.index(var)
        return max((e[i] for e in self.terms), default=-1)

    def variables(self):
        """Names of variables that actually occur, in context order."""
        used = [False] * len(self.ctx)
        for e in self.terms:
            for i, x in enumerate(e):
                if x:
                    used[i] = True
        return [n for n, u in zip(self.ctx.names, used) if u]

    def coefficient(self, var: str, k: int) -> "MultiPoly":
        """Coefficient of ``var**k``, as a polynomial free of ``var``."""
        i = self.ctx.index(var)
        out = {}
        for e, c in self.terms.items():
            if e[i] == k:
                out[e[:i] + (0,) + e[i + 1:]] = c
        return MultiPoly._raw(self.ctx, out)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]))

    def leading_term(self):
        """``(exps, coef)`` of the largest term in graded-lex order."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = min(self.terms, key=_grlex_key)
        return e, self.terms[e]

    # ------------------------------------------------------------- arithmetic
    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            if other.ctx != self.ctx:
                raise ContextMismatch(f"{self.ctx} vs {other.ctx}")
            return other
        try:
            return self.ctx.constant(other)
        except TypeError:
            return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if len(self.terms) < len(other.terms):
            a, b = other.terms, self.terms
        else:
            a, b = self.terms, other.terms
        out = dict(a)
        for e, c in b.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v = v + c
                if v:
                    out[e] = v
                else:
                    del out[e]
        return MultiPoly._raw(self.ctx, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw(self.ctx, {e: -c for e, c in self.terms.items()})

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def scale(self, k) -> "MultiPoly":
        k = rat(k)
        if not k:
            return self.ctx.zero()
        return MultiPoly._raw(self.ctx, {e: c * k for e, c in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        if other.ctx != self.ctx:
            raise ContextMismatch(f"{self.ctx} vs {other.ctx}")
        out = {}
        get = out.get
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                e = tuple(map(operator.add, ea, eb))
                v = get(e)
                out[e] = ca * cb if v is None else v + ca * cb
        return MultiPoly._raw(self.ctx, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, MultiPoly):
            other = other.constant_value()
        other = rat(other)
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        return self.scale(1 / other)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers")
        result = self.ctx.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.ctx == other.ctx and self.terms == other.terms
        try:
            other = rat(other)
        except TypeError:
            return NotImplemented
        return self.is_constant() and self.constant_value() == other

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ctx, frozenset(self.terms.items())))
        return self._hash

    # ---------------------------------------------------------- substitution
    def eval(self, point) -> Rational:
        """Evaluate at ``point`` (mapping name -> rational); every used variable must be bound."""
        vals = []
        for name in self.ctx.names:
            vals.append(point.get(name))
        total = mpq(0)
        for e, c in self.terms.items():
            t = c
            for i, x in enumerate(e):
                if x:
                    v = vals[i]
                    if v is None:
                        raise UnknownVariable(f"no value for {self.ctx.names[i]}")
                    t = t * rat(v) ** x
            total += t
        return total

    def subs(self, bindings) -> "MultiPoly":
        return substitute(self, bindings)

    def change_context(self, ctx: VarContext) -> "MultiPoly":
        """Re-embed into ``ctx`` by variable name."""
        if ctx == self.ctx:
            return self
        pos = []
        for i, name in enumerate(self.ctx.names):
            pos.append(ctx._index.get(name))
        n = len(ctx)
        out = {}
        for e, c in self.terms.items():
            new = [0] * n
            for i, x in enumerate(e):
                if x:
                    j = pos[i]
                    if j is None:
                        raise UnknownVariable(
                            f"{self.ctx.names[i]} not present in target context")
                    new[j] = x
            out[tuple(new)] = c
        return MultiPoly._raw(ctx, out)

    # ------------------------------------------------------------------ text
    def to_string(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                (n if x == 1 else f"{n}^{x}") for n, x in zip(self.ctx.names, e) if x)
            neg = c < 0
            a = -c if neg else c
            if not mono:
                body = format_rational(a)
            elif a == 1:
                body = mono
            else:
                body = f"{format_rational(a)}*{mono}"
            if not parts:
                parts.append(f"-{body}" if neg else body)
            else:
                parts.append(f"- {body}" if neg else f"+ {body}")
        return " ".join(parts)

    __str__ = to_string

    def __repr__(self):
        return f"MultiPoly({self.to_string()!r})"

    def to_json(self) -> dict:
        return {
            "vars": list(self.ctx.names),
            "terms": [{"coef": format_rational(c), "exps": list(e)}
                      for e, c in self.sorted_terms()],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "MultiPoly":
        ctx = VarContext(doc["vars"])
        return cls(ctx, {tuple(t["exps"]): rat(t["coef"]) for t in doc["terms"]})


# ---------------------------------------------------------------------------
def poly_arith(p: MultiPoly, q: MultiPoly, op: str) -> MultiPoly:
    if not (isinstance(p, MultiPoly) and isinstance(q, MultiPoly)):
        raise TypeError("poly_arith expects two MultiPoly values")
    if p.ctx != q.ctx:
        raise ContextMismatch(f"{p.ctx} vs {q.ctx}")
    if op == "+":
        return p + q
    if op == "-":
        return p - q
    if op in ("*", "×"):
        return p * q
    raise ValueError(f"unknown operator {op!r}")


def substitute(p: MultiPoly, bindings) -> MultiPoly:
    """Simultaneously replace variables by polynomials or rationals.

    Polynomial images must share one context, which becomes the result's
    context; unbound variables are carried over by name.
    """
    for name in bindings:
        if name not in p.ctx:
            raise UnknownVariable(name)
    targets = {v.ctx for v in bindings.values() if isinstance(v, MultiPoly)}
    if len(targets) > 1:
        raise ContextMismatch("substitution images live in different contexts")
    target = targets.pop() if targets else p.ctx

    if target == p.ctx and all(not isinstance(v, MultiPoly) for v in bindings.values()):
        return _partial_eval(p, {p.ctx.index(k): rat(v) for k, v in bindings.items()})

    images = []
    for name in p.ctx.names:
        if name in bindings:
            v = bindings[name]
            images.append(v if isinstance(v, MultiPoly) else target.constant(v))
        else:
            if name not in target:
                raise UnknownVariable(f"{name} has no image in the target context")
            images.append(target.var(name))
    powers = [dict() for _ in images]

    def power(i, k):
        cache = powers[i]
        if k not in cache:
            cache[k] = images[i] ** k
        return cache[k]

    acc = {}
    for e, c in p.terms.items():
        t = target.constant(c)
        for i, x in enumerate(e):
            if x:
                t = t * power(i, x)
                if not t:
                    break
        for te, tc in t.terms.items():
            v = acc.get(te, 0) + tc
            if v:
                acc[te] = v
            else:
                acc.pop(te, None)
    return MultiPoly._raw(target, acc)


def _partial_eval(p: MultiPoly, vals) -> MultiPoly:
    out = {}
    for e, c in p.terms.items():
        t = c
        ne = list(e)
        for i, v in vals.items():
            x = e[i]
            if x:
                t = t * v ** x
                ne[i] = 0
        if t:
            ne = tuple(ne)
            s = out.get(ne, 0) + t
            if s:
                out[ne] = s
            else:
                out.pop(ne, None)
    return MultiPoly._raw(p.ctx, out)


def primitive(p: MultiPoly):
    """Split ``p = scale * prim`` with ``prim`` integral, content 1 and positive leading coefficient."""
    if not p.terms:
        return mpq(0), p
    dens = reduce(lcm, (int(c.denominator) for c in p.terms.values()), 1)
    nums = reduce(gcd, (int(c.numerator * (dens // c.denominator)) for c in p.terms.values()), 0)
    scale = mpq(nums, dens)
    if p.leading_term()[1] < 0:
        scale = -scale
    inv = 1 / scale
    return scale, MultiPoly._raw(p.ctx, {e: c * inv for e, c in p.terms.items()})


def canonicalize(p: MultiPoly) -> MultiPoly:
    """Primitive integral form with positive leading coefficient; idempotent."""
    return primitive(p)[1]


def same_up_to_scale(p: MultiPoly, q: MultiPoly) -> bool:
    return canonicalize(p) == canonicalize(q)


# ----------------------------------------------------------------- parsing
_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul}


def parse_poly(text: str, ctx: VarContext) -> MultiPoly:
    """Parse a polynomial written with ``+ - * / ^`` (or ``**``), integers and context names.

    Division is only allowed by constants.
    """
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse polynomial {text!r}: {exc.msg}") from None

    def walk(node):
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
            return ctx.constant(node.value)
        if isinstance(node, ast.Name):
            return ctx.var(node.id)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = walk(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            if type(node.op) in _BINOPS:
                return _BINOPS[type(node.op)](walk(node.left), walk(node.right))
            if isinstance(node.op, ast.Div):
                den = walk(node.right)
                if not den.is_constant():
                    raise ValueError("division by a non-constant polynomial")
                return walk(node.left) / den.constant_value()
            if isinstance(node.op, ast.Pow):
                exp = walk(node.right)
                if not exp.is_constant() or exp.constant_value().denominator != 1:
                    raise ValueError("exponent must be a non-negative integer")
                return walk(node.left) ** int(exp.constant_value())
        raise ValueError(f"unsupported syntax in polynomial {text!r}")

    return walk(tree)
