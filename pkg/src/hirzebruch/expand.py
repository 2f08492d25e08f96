"""Polynomial relations on series coefficients imposed by the functional equation.

With ``Q(z) = z/f(z) = 1 + sum q_k z^k`` the equation reads::

    sum_i prod_{j != i} Q(z_j - z_i) / (z_j - z_i) = c.

Multiplying by the Vandermonde product ``V = prod_{k<l} (z_l - z_k)`` gives
the polynomial identity ``A = sum_i (-1)^(i-1) prod_{j!=i} Q(z_j - z_i) V_i - c V = 0``
where ``V_i`` is the Vandermonde product of the remaining variables.  Every
coefficient of ``A`` is a polynomial in ``q_1, q_2, ...`` and ``c``; the
coefficient of a monomial of total degree ``d`` is weighted-homogeneous of
weight ``d - (n-1)(n-2)/2`` when ``q_k`` has weight ``k`` and ``c`` weight ``n-1``.

Two collection methods are available:

``"alternant"`` (default)
    ``A`` is antisymmetric and translation invariant, so its coefficients at
    monomials ``z^e`` with ``0 = e_1 < e_2 < ... < e_n`` span the same space of
    relations as all of its coefficients.  These are computed in closed form.
``"full"``
    Builds ``A`` as a multivariate series and keeps every coefficient.  Slow;
    used as an independent cross-check at small orders.

The collected relations are then triangularised weight by weight: ``c`` and
``q_w`` are solved when they occur linearly with a constant coefficient, and
what remains is the residual ideal describing the solution manifold.
"""

from __future__ import annotations

import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

from gmpy2 import mpq

from .poly import MultiPoly, VarContext, canonicalize, parse_poly, substitute
from .series import MSeries, USeries, useries_compose_linear

log = logging.getLogger(__name__)


class InsufficientOrderError(ValueError):
    """Raised when the truncation order cannot see the coefficients ``q_1..q_n``."""


def vandermonde_degree(n: int) -> int:
    return n * (n - 1) // 2


def min_order(n: int) -> int:
    return vandermonde_degree(n) + n


def max_weight(n: int, D: int) -> int:
    """Largest relation weight visible at z-degree ``D``."""
    return D - (n - 1) * (n - 2) // 2


def order_for_weight(n: int, w: int) -> int:
    """Smallest z-degree ``D`` at which relations of weight ``w`` appear."""
    return w + (n - 1) * (n - 2) // 2


def hfe_context(n: int, D: int) -> VarContext:
    return VarContext.q_context(max_weight(n, D))


def hfe_weights(ctx: VarContext, n: int):
    out = []
    for name in ctx.names:
        if name == "c":
            out.append(n - 1)
        elif name.startswith("q") and name[1:].isdigit():
            out.append(int(name[1:]))
        else:
            out.append(1)
    return tuple(out)


def _check_order(n: int, D: int):
    if n < 3:
        raise ValueError("n must be at least 3; n = 2 admits arbitrary solutions")
    need = min_order(n)
    if D < need:
        w = max_weight(n, D) + 1
        missing = f"q{w}" if w >= 1 else "c"
        raise InsufficientOrderError(
            f"insufficient order D={D} for n={n}: the coefficient of z-degree {D + 1} "
            f"(weight {w}, first involving {missing}) is missing; need D >= {need}")


# ---------------------------------------------------------------- alternant
def _det_terms(rows):
    """Expand ``det[q_{r - s}]`` for row indices ``rows``, columns ``s = 0..m-1``.

    Returns ``{sorted q-index tuple: int}`` with ``q_0 = 1`` dropped.
    """
    m = len(rows)
    out = {}
    for perm in itertools.permutations(range(m)):
        key = []
        ok = True
        for r, s in zip(rows, perm):
            k = r - s
            if k < 0:
                ok = False
                break
            if k:
                key.append(k)
        if not ok:
            continue
        sign = _perm_sign(perm)
        key = tuple(sorted(key))
        out[key] = out.get(key, 0) + sign
    return {k: v for k, v in out.items() if v}


@lru_cache(maxsize=None)
def _perm_sign(perm):
    sign = 1
    p = list(perm)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


@lru_cache(maxsize=200_000)
def _det_cached(rows):
    # the determinant is antisymmetric in its rows: cache on the sorted tuple
    if len(set(rows)) != len(rows):
        return {}
    order = sorted(range(len(rows)), key=lambda a: rows[a])
    sign = _perm_sign(tuple(order))
    base = _det_sorted(tuple(rows[a] for a in order))
    if sign == 1:
        return base
    return {k: -v for k, v in base.items()}


@lru_cache(maxsize=200_000)
def _det_sorted(rows):
    return _det_terms(rows)


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def alternant_coefficient(e):
    """Coefficient of ``z^e`` in ``sum_i (-1)^(i-1) prod_{j!=i} Q(z_j - z_i) V_i``.

    Returned as ``{sorted q-index tuple: int}``.  The ``-c V`` part is handled
    by the caller (it only touches ``e = (0, 1, ..., n-1)``).
    """
    n = len(e)
    acc = {}
    for i in range(n):
        others = e[:i] + e[i + 1:]
        sign_i = -1 if i % 2 else 1
        if e[i] % 2:
            sign_i = -sign_i
        for t in _compositions(e[i], n - 1):
            rows = tuple(a + b for a, b in zip(others, t))
            det = _det_cached(rows)
            if not det:
                continue
            mult = sign_i
            for a, b in zip(others, t):
                if b:
                    mult *= comb(a + b, b)
            for key, v in det.items():
                acc[key] = acc.get(key, 0) + mult * v
    return {k: v for k, v in acc.items() if v}


def increasing_exponents(n: int, d: int, anchored: bool = True):
    """Strictly increasing exponent vectors of total degree ``d``.

    With ``anchored`` the smallest exponent is 0 (translation reduction).
    """
    def rec(prefix, remaining, slots, low):
        if slots == 0:
            if remaining == 0:
                yield tuple(prefix)
            return
        # minimal sum of the remaining strictly increasing slots starting at low
        for v in range(low, remaining + 1):
            if v * slots + slots * (slots - 1) // 2 > remaining:
                break
            yield from rec(prefix + [v], remaining - v, slots - 1, v + 1)

    if anchored:
        yield from rec([0], d, n - 1, 1)
    else:
        yield from rec([], d, n, 0)


def _key_to_poly(key_terms, ctx, c_coef=0):
    m = len(ctx) - 1
    terms = {}
    for key, v in key_terms.items():
        e = [0] * (m + 1)
        for k in key:
            if k > m:
                raise InsufficientOrderError(f"q{k} outside the context")
            e[k - 1] += 1
        terms[tuple(e)] = mpq(v)
    if c_coef:
        e = [0] * (m + 1)
        e[m] = 1
        terms[tuple(e)] = mpq(c_coef)
    return MultiPoly(ctx, terms)


def _alternant_job(e):
    return e, alternant_coefficient(e)


def collect_alternant(n: int, D: int, reduce_translation: bool = True, threads: int = 1):
    """Relations from the alternant coefficients, as ``{weight: [(exps, MultiPoly)]}``."""
    ctx = hfe_context(n, D)
    base = vandermonde_degree(n)
    delta = tuple(range(n))
    exps = []
    for d in range(base, D + 1):
        exps.extend(increasing_exponents(n, d, anchored=reduce_translation))
    if threads > 1 and len(exps) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_alternant_job, exps, chunksize=1))
    else:
        results = [_alternant_job(e) for e in exps]
    out = {}
    for e, coef in results:
        poly = _key_to_poly(coef, ctx, c_coef=-1 if e == delta else 0)
        w = sum(e) - (n - 1) * (n - 2) // 2
        out.setdefault(w, []).append((e, poly))
    return ctx, out


# --------------------------------------------------------------------- full
def symbolic_q_series(ctx: VarContext, K: int) -> USeries:
    coeffs = [ctx.one()]
    for k in range(1, K + 1):
        coeffs.append(ctx.var(f"q{k}") if f"q{k}" in ctx else ctx.zero())
    return USeries(coeffs)


def cleared_hfe_series(n: int, D: int, reduce_translation: bool = True, perm=None):
    """``A = (LHS - c) V`` as a multivariate series, built term by term.

    ``perm`` relabels the variables (``z_k -> z_perm[k]``) before expansion.
    """
    ctx = hfe_context(n, D)
    Q = symbolic_q_series(ctx, D)
    perm = tuple(range(n)) if perm is None else tuple(perm)
    zero_var = perm[n - 1] if reduce_translation else None

    def lin(k, l):
        # z_l - z_k under relabelling
        return useries_compose_linear(USeries([0, mpq(1)] + [0] * (D - 1)), perm[k], perm[l], n, D, zero_var)

    total = MSeries(n, D)
    for i in range(n):
        term = MSeries.one(n, D)
        for j in range(n):
            if j != i:
                term = term * useries_compose_linear(Q, perm[i], perm[j], n, D, zero_var)
        for k in range(n):
            for l in range(k + 1, n):
                if i not in (k, l):
                    term = term * lin(k, l)
        total = total + (term if i % 2 == 0 else -term)
    V = MSeries.one(n, D)
    for k in range(n):
        for l in range(k + 1, n):
            V = V * lin(k, l)
    total = total - V.scale(ctx.var("c"))
    return ctx, total


def collect_full(n: int, D: int, reduce_translation: bool = True, perm=None):
    """Every coefficient of ``A``, grouped by weight."""
    ctx, A = cleared_hfe_series(n, D, reduce_translation, perm)
    out = {}
    shift = (n - 1) * (n - 2) // 2
    for e in sorted(A.terms):
        coef = A.terms[e]
        if not isinstance(coef, MultiPoly):
            coef = ctx.constant(coef)
        if coef:
            out.setdefault(sum(e) - shift, []).append((e, coef))
    return ctx, out


# ------------------------------------------------------------- relation set
@dataclass
class RelationSet:
    """Triangularised relations for one ``(n, D)``.

    ``solved`` holds ``(var, expr)`` pairs with ``expr`` free of solved
    variables; ``residual`` holds canonical generators in the free variables.
    """

    ctx: VarContext
    n: int
    D: int
    solved: list = field(default_factory=list)
    residual: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def weights(self):
        return hfe_weights(self.ctx, self.n)

    def solved_dict(self):
        return dict(self.solved)

    def solved_expr(self, var: str) -> MultiPoly:
        for v, e in self.solved:
            if v == var:
                return e
        raise KeyError(f"{var} is not solved")

    def free_variables(self):
        solved = {v for v, _ in self.solved}
        return [v for v in self.ctx.names if v not in solved]

    def generators(self):
        """Full generator list: ``var - expr`` for solved variables, then residuals."""
        return [self.ctx.var(v) - e for v, e in self.solved] + list(self.residual)

    def reduce(self, p: MultiPoly) -> MultiPoly:
        """Eliminate solved variables from ``p`` (re-embedded in this context)."""
        p = p.change_context(self.ctx)
        binds = {v: e for v, e in self.solved if v in set(p.variables())}
        return substitute(p, binds) if binds else p

    def evaluate(self, values):
        """Evaluate at a point given by the free variables (extra entries ignored).

        Returns ``(solved_values, residual_values)`` as dicts/lists of rationals.
        """
        free = {v: values[v] for v in self.free_variables() if v in values}
        solved_vals = {v: e.eval(free) for v, e in self.solved}
        return solved_vals, [r.eval(free) for r in self.residual]

    def check_q_point(self, qvals):
        """Check the series with coefficients ``qvals[k-1] = q_k`` against every relation.

        Returns a dict with the implied ``c`` (if solved), the mismatches of
        solved ``q`` expressions and the residual evaluations.
        """
        point = {f"q{k}": mpq(v) for k, v in enumerate(qvals, start=1) if f"q{k}" in self.ctx}
        missing = [v for v in self.ctx.names if v != "c" and v not in point]
        if missing:
            raise ValueError(f"series too short: no value for {missing[0]}")
        solved_vals, residual_vals = self.evaluate(point)
        c_val = solved_vals.pop("c", None)
        mismatch = {v: point[v] - val for v, val in solved_vals.items() if point[v] != val}
        ok = not mismatch and all(r == 0 for r in residual_vals)
        return {"c": c_val, "solved_mismatch": mismatch, "residual": residual_vals, "ok": ok}


def _pivot_order(ctx: VarContext, n: int):
    """Variable priority for solving: ``c`` first, then ``q_m, q_{m-1}, ...``."""
    weights = hfe_weights(ctx, n)
    names = list(ctx.names)

    def prio(name):
        if name == "c":
            return (2, 0)
        if name.startswith("q") and name[1:].isdigit():
            return (1, int(name[1:]))
        return (0, 0)

    return sorted(names, key=prio, reverse=True), weights


def _linear_const_coef(g: MultiPoly, var: str):
    """Coefficient of ``var`` if ``g`` is linear in ``var`` with a constant coefficient."""
    i = g.ctx.index(var)
    coef = None
    for e, c in g.terms.items():
        x = e[i]
        if x == 0:
            continue
        if x > 1 or any(e[:i]) or any(e[i + 1:]):
            return None
        coef = c
    return coef


def _rref_weight(rels, ctx, pivot_vars, weights):
    """Row-reduce relations of one weight; pivot columns for ``pivot_vars`` come first."""
    mono_set = set()
    for r in rels:
        mono_set.update(r.terms)
    pivot_monos = []
    for v in pivot_vars:
        e = [0] * len(ctx)
        e[ctx.index(v)] = 1
        e = tuple(e)
        if e in mono_set:
            pivot_monos.append(e)
    others = sorted(mono_set - set(pivot_monos),
                    key=lambda e: (-sum(w * x for w, x in zip(weights, e)), tuple(-x for x in reversed(e))))
    cols = pivot_monos + others
    index = {e: j for j, e in enumerate(cols)}
    rows = []
    for r in rels:
        row = {index[e]: c for e, c in r.terms.items()}
        if row:
            rows.append(row)
    basis = []  # list of (pivot col, row dict) kept reduced
    for row in rows:
        for pc, prow in basis:
            a = row.get(pc)
            if a:
                for j, v in prow.items():
                    nv = row.get(j, 0) - a * v
                    if nv:
                        row[j] = nv
                    else:
                        row.pop(j, None)
        if not row:
            continue
        pc = min(row)
        inv = 1 / row[pc]
        row = {j: v * inv for j, v in row.items()}
        for k, (qc, qrow) in enumerate(basis):
            a = qrow.get(pc)
            if a:
                for j, v in row.items():
                    nv = qrow.get(j, 0) - a * v
                    if nv:
                        qrow[j] = nv
                    else:
                        qrow.pop(j, None)
        basis.append((pc, row))
    basis.sort(key=lambda t: t[0])
    return [(cols[pc], MultiPoly._raw(ctx, {cols[j]: v for j, v in row.items()})) for pc, row in basis]


def triangularize_by_weight(ctx: VarContext, n: int, by_weight):
    """Weight-by-weight elimination of ``c`` and ``q_w``; returns ``(solved, residual)``."""
    solved = {}
    solved_list = []
    residual = []
    weights = hfe_weights(ctx, n)
    for w in sorted(by_weight):
        rels = []
        for _, r in by_weight[w]:
            used = set(r.variables())
            binds = {v: e for v, e in solved.items() if v in used}
            rels.append(substitute(r, binds) if binds else r)
        rels = [r for r in rels if r]
        if not rels:
            continue
        cands = []
        if "c" in ctx and weights[ctx.index("c")] == w:
            cands.append("c")
        if f"q{w}" in ctx:
            cands.append(f"q{w}")
        for mono, row in _rref_weight(rels, ctx, cands, weights):
            pivot_var = None
            if sum(mono) == 1:
                name = ctx.names[mono.index(1)]
                if name in cands:
                    pivot_var = name
            if pivot_var is not None:
                expr = ctx.var(pivot_var) - row
                if pivot_var in expr.variables():
                    raise AssertionError("pivot variable survived row reduction")
                solved[pivot_var] = expr
                solved_list.append((pivot_var, expr))
            else:
                residual.append(canonicalize(row))
    return solved_list, _dedup(residual)


def _dedup(polys):
    seen = set()
    out = []
    for p in polys:
        if p and p not in seen:
            seen.add(p)
            out.append(p)
    return out


def triangularize(ctx: VarContext, n: int, solved, generators):
    """Generic elimination loop used after specialisation.

    Repeatedly solves a generator that is linear with constant coefficient in
    the highest-priority variable (``c``, then highest-index ``q``); ties go
    to the generator of lowest total degree.
    """
    order, _ = _pivot_order(ctx, n)
    rank = {v: i for i, v in enumerate(order)}
    solved = list(solved)
    gens = _dedup([canonicalize(g) for g in generators if g])
    while True:
        best = None
        for g in gens:
            for v in g.variables():
                a = _linear_const_coef(g, v)
                if a is None:
                    continue
                key = (rank[v], g.total_degree(), g.to_string())
                if best is None or key < best[0]:
                    best = (key, g, v, a)
        if best is None:
            break
        _, g, v, a = best
        expr = (ctx.var(v) - g / a)
        solved = [(u, substitute(e, {v: expr}) if v in e.variables() else e) for u, e in solved]
        solved.append((v, expr))
        gens = _dedup([canonicalize(substitute(h, {v: expr})) for h in gens if h is not g])
        gens = [h for h in gens if h]
    return solved, gens


def expand_hfe(n: int, D: int, method: str = "alternant", reduce_translation: bool = True,
               threads: int = 1) -> RelationSet:
    """Derive the relation set of the functional equation for ``n`` at z-degree ``D``."""
    _check_order(n, D)
    if method == "alternant":
        ctx, by_weight = collect_alternant(n, D, reduce_translation, threads)
    elif method == "full":
        ctx, by_weight = collect_full(n, D, reduce_translation)
    else:
        raise ValueError(f"unknown method {method!r}")
    solved, residual = triangularize_by_weight(ctx, n, by_weight)
    residual.sort(key=lambda p: (p.weighted_degree(hfe_weights(ctx, n)), p.to_string()))
    return RelationSet(ctx, n, D, solved, residual,
                       meta={"method": method, "reduce_translation": reduce_translation})


def specialize(rs: RelationSet, bindings) -> RelationSet:
    """Substitute ``bindings`` (name -> rational or polynomial) and re-eliminate."""
    ctx = rs.ctx
    binds = {}
    for k, v in bindings.items():
        if k not in ctx:
            raise KeyError(f"unknown variable {k}")
        binds[k] = v.change_context(ctx) if isinstance(v, MultiPoly) else mpq(v)
    new_gens = []
    solved = []
    for var, expr in rs.solved:
        e2 = substitute(expr, binds)
        if var in binds:
            val = binds[var]
            val = val if isinstance(val, MultiPoly) else ctx.constant(val)
            new_gens.append(substitute(val, binds) - e2)
        else:
            solved.append((var, e2))
    gens = [substitute(r, binds) for r in rs.residual] + new_gens
    solved, residual = triangularize(ctx, rs.n, solved, gens)
    residual.sort(key=lambda p: (p.weighted_degree(hfe_weights(ctx, rs.n)), p.to_string()))
    meta = dict(rs.meta)
    meta["bindings"] = {k: str(v) for k, v in bindings.items()}
    return RelationSet(ctx, rs.n, rs.D, solved, residual, meta)


# ---------------------------------------------------------------- documents
def to_document(rs: RelationSet, wall_time=None) -> dict:
    return {
        "n": rs.n,
        "D": rs.D,
        "vars": list(rs.ctx.names),
        "solved": [{"var": v, "expr": e.to_string()} for v, e in rs.solved],
        "residual": [r.to_string() for r in rs.residual],
        "meta": rs.meta,
        "wall_time": wall_time,
    }


def from_document(doc: dict) -> RelationSet:
    ctx = VarContext(doc["vars"])
    solved = [(s["var"], parse_poly(s["expr"], ctx)) for s in doc["solved"]]
    residual = [parse_poly(r, ctx) for r in doc["residual"]]
    return RelationSet(ctx, doc["n"], doc["D"], solved, residual, dict(doc.get("meta", {})))
