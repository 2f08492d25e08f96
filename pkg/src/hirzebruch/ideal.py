"""Gröbner bases, normal forms, ideal membership and elimination.

Buchberger's algorithm with the Gebauer-Moeller pair criteria and the sugar
selection strategy, over exact rationals.  When the generators are
homogeneous for the order's weights, pairs are processed degree by degree
and the computation can stop at a degree bound: a basis truncated at degree
``d`` decides membership of every homogeneous polynomial of degree ``<= d``.

Monomials are encoded internally as tuples ``prefix(e) + e`` whose ascending
Python order is the descending monomial order; ``e`` itself sits at the tail
for divisibility tests.
"""

from __future__ import annotations

import heapq
import logging
import os
from dataclasses import dataclass, field

from gmpy2 import mpq

from .poly import MultiPoly, VarContext, canonicalize

log = logging.getLogger(__name__)

DEFAULT_MAX_PAIRS = int(os.environ.get("HFE_MAX_PAIRS", "1000000"))


class BudgetExceeded(RuntimeError):
    """The resource budget ran out before the basis was complete."""

    def __init__(self, message, pairs_reduced, basis_size):
        super().__init__(message)
        self.pairs_reduced = pairs_reduced
        self.basis_size = basis_size


@dataclass
class Budget:
    max_pairs: int = DEFAULT_MAX_PAIRS
    max_coeff_bits: int | None = None


def default_weights(ctx: VarContext):
    """``q_k`` gets weight ``k``; every other variable weight 1."""
    out = []
    for name in ctx.names:
        if name.startswith("q") and name[1:].isdigit():
            out.append(int(name[1:]))
        else:
            out.append(1)
    return tuple(out)


class MonomialOrder:
    """A monomial order on a context.

    ``kind`` is ``"grevlex"`` (weighted degree, then reverse lexicographic),
    ``"lex"`` or ``"block"`` (an elimination order: the ``eliminate`` block
    compared first by weighted grevlex, ties broken by grevlex on the rest).

    ``ranking`` lists variable names from smallest to largest; by default the
    context order, i.e. ``q1 < q2 < ... < c``.
    """

    def __init__(self, ctx: VarContext, kind="grevlex", weights=None, ranking=None, eliminate=()):
        self.ctx = ctx
        self.kind = kind
        self.weights = tuple(weights) if weights is not None else default_weights(ctx)
        if len(self.weights) != len(ctx):
            raise ValueError("one weight per variable required")
        if any(w <= 0 for w in self.weights):
            raise ValueError("weights must be positive")
        ranking = list(ranking) if ranking is not None else list(ctx.names)
        if sorted(ranking) != sorted(ctx.names):
            raise ValueError("ranking must list every context variable once")
        self.ranking = tuple(ranking)
        self._rank_idx = tuple(ctx.index(v) for v in ranking)
        self.eliminate = tuple(eliminate)
        if kind == "block":
            elim = set(self.eliminate)
            if not elim <= set(ctx.names):
                raise ValueError("unknown variables in elimination block")
            self._blocks = (
                tuple(i for i in self._rank_idx if ctx.names[i] in elim),
                tuple(i for i in self._rank_idx if ctx.names[i] not in elim),
            )
        elif kind not in ("grevlex", "lex"):
            raise ValueError(f"unknown order kind {kind!r}")
        self._identity = self._rank_idx == tuple(range(len(ctx)))

    def __repr__(self):
        extra = f", eliminate={list(self.eliminate)}" if self.kind == "block" else ""
        return f"MonomialOrder({self.kind}, smallest->largest={list(self.ranking)}{extra})"

    def describe(self) -> str:
        return repr(self)

    def prefix(self, e):
        w = self.weights
        if self.kind == "grevlex":
            deg = -sum(a * b for a, b in zip(w, e))
            if self._identity:
                return (deg,)
            return (deg,) + tuple(e[i] for i in self._rank_idx)
        if self.kind == "lex":
            return tuple(-e[i] for i in reversed(self._rank_idx))
        out = ()
        for block in self._blocks:
            out += (-sum(w[i] * e[i] for i in block),) + tuple(e[i] for i in block)
        return out

    def encode(self, e):
        return self.prefix(e) + tuple(e)

    @property
    def offset(self):
        return len(self.prefix((0,) * len(self.ctx)))

    def wdeg(self, e):
        return sum(a * b for a, b in zip(self.weights, e))


# ---------------------------------------------------------------- internals
class _Poly:
    """Internal polynomial: terms sorted by the order, leading term first."""

    __slots__ = ("terms", "lm", "lc", "raw", "sugar", "mask")

    def __init__(self, terms, sugar, off):
        # terms: list of (T, coef) sorted ascending by T (descending monomial order)
        self.terms = terms
        self.lm, self.lc = terms[0]
        self.raw = self.lm[off:]
        self.sugar = sugar
        self.mask = _mask(self.raw)


def _mask(raw):
    m = 0
    for i, x in enumerate(raw):
        if x:
            m |= 1 << i
    return m


def _divides(a, b):
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


class _Engine:
    def __init__(self, order: MonomialOrder, budget: Budget):
        self.order = order
        self.off = order.offset
        self.n = len(order.ctx)
        self.budget = budget
        self.basis = []  # list of _Poly (monic)
        self.active = []  # indices usable as reducers and pair partners
        self.pairs = []  # heap of (sugar, lcm T, i, j)
        self.pairs_reduced = 0

    def encode_poly(self, p: MultiPoly):
        enc = self.order.encode
        terms = sorted(((enc(e), c) for e, c in p.terms.items()), key=lambda t: t[0])
        return terms

    def to_multipoly(self, terms):
        off = self.off
        return MultiPoly._raw(self.order.ctx, {T[off:]: c for T, c in terms})

    def make_T(self, raw):
        return self.order.encode(raw)

    def find_reducer(self, raw, mask):
        basis = self.basis
        for i in self.active:
            g = basis[i]
            if g.mask & ~mask:
                continue
            if _divides(g.raw, raw):
                return g
        return None

    def reduce(self, terms, full=True):
        """Reduce ``terms`` (dict T -> coef) by the active basis."""
        f = terms
        heap = list(f)
        heapq.heapify(heap)
        rem = []
        off = self.off
        while heap:
            t = heapq.heappop(heap)
            c = f.pop(t, None)
            if c is None:
                continue
            raw = t[off:]
            g = self.find_reducer(raw, _mask(raw))
            if g is None:
                rem.append((t, c))
                if not full:
                    # remaining terms are already in f; drain them in order
                    rest = sorted(f.items(), key=lambda kv: kv[0])
                    rem.extend(rest)
                    return rem
                continue
            m = tuple(x - y for x, y in zip(t, g.lm))
            for tg, cg in g.terms[1:]:
                tt = tuple(x + y for x, y in zip(tg, m))
                v = f.get(tt)
                if v is None:
                    f[tt] = -c * cg
                    heapq.heappush(heap, tt)
                else:
                    v = v - c * cg
                    if v:
                        f[tt] = v
                    else:
                        del f[tt]
        return rem

    def monic(self, terms, sugar):
        lc = terms[0][1]
        if lc != 1:
            inv = 1 / lc
            terms = [(t, c * inv) for t, c in terms]
        bits = self.budget.max_coeff_bits
        if bits is not None:
            for _, c in terms:
                if c.numerator.bit_length() > bits or c.denominator.bit_length() > bits:
                    raise BudgetExceeded(
                        f"coefficient size exceeded {bits} bits",
                        self.pairs_reduced, len(self.basis))
        return _Poly(terms, sugar, self.off)

    def lcm_raw(self, a, b):
        return tuple(x if x > y else y for x, y in zip(a, b))

    def add(self, h: _Poly):
        """Insert ``h`` and update pairs with the Gebauer-Moeller criteria."""
        basis = self.basis
        k = len(basis)
        basis.append(h)
        hraw = h.raw
        enc = self.order.encode
        wdeg = self.order.wdeg

        # candidate new pairs
        new = []
        for i in self.active:
            g = basis[i]
            l = self.lcm_raw(g.raw, hraw)
            coprime = not (g.mask & h.mask)
            s = max(g.sugar + wdeg(l) - wdeg(g.raw), h.sugar + wdeg(l) - wdeg(hraw))
            new.append((l, i, coprime, s))

        # chain criterion on the new pairs: drop (i,h) if lcm strictly divisible by another lcm(j,h)
        kept = []
        for idx, (l, i, cop, s) in enumerate(new):
            dominated = False
            for jdx, (l2, j, _, _) in enumerate(new):
                if jdx != idx and l2 != l and _divides(l2, l):
                    dominated = True
                    break
            if not dominated:
                kept.append((l, i, cop, s))
        # among equal lcms keep one; drop the whole class if any member is coprime
        by_lcm = {}
        for item in kept:
            by_lcm.setdefault(item[0], []).append(item)
        survivors = []
        for l, items in by_lcm.items():
            if any(it[2] for it in items):
                continue
            survivors.append(min(items, key=lambda it: it[1]))

        # chain criterion on old pairs
        old = []
        for s, T, i, j in self.pairs:
            l = T[self.off:]
            if _divides(hraw, l):
                li = self.lcm_raw(basis[i].raw, hraw)
                lj = self.lcm_raw(basis[j].raw, hraw)
                if li != l and lj != l:
                    continue
            old.append((s, T, i, j))
        for l, i, _, s in survivors:
            old.append((s, enc(l), i, k))
        heapq.heapify(old)
        self.pairs = old

        # elements whose leading monomial is divisible by lm(h) leave the active set
        self.active = [i for i in self.active if not _divides(hraw, basis[i].raw)]
        self.active.append(k)

    def spoly(self, i, j):
        gi, gj = self.basis[i], self.basis[j]
        l = self.lcm_raw(gi.raw, gj.raw)
        T = self.order.encode(l)
        mi = tuple(x - y for x, y in zip(T, gi.lm))
        mj = tuple(x - y for x, y in zip(T, gj.lm))
        f = {}
        for t, c in gi.terms[1:]:
            f[tuple(x + y for x, y in zip(t, mi))] = c
        for t, c in gj.terms[1:]:
            tt = tuple(x + y for x, y in zip(t, mj))
            v = f.get(tt, 0) - c
            if v:
                f[tt] = v
            else:
                f.pop(tt, None)
        wdeg = self.order.wdeg
        sugar = max(gi.sugar + wdeg(l) - wdeg(gi.raw), gj.sugar + wdeg(l) - wdeg(gj.raw))
        return f, sugar

    def run(self, gens, degree_bound=None):
        enc_polys = []
        for g in gens:
            if g:
                terms = self.encode_poly(g)
                enc_polys.append((g.weighted_degree(self.order.weights), terms))
        enc_polys.sort(key=lambda t: (t[0], t[1][0][0]))
        truncated = False
        for sugar, terms in enc_polys:
            if degree_bound is not None and sugar > degree_bound:
                truncated = True
                continue
            rem = self.reduce(dict(terms))
            if rem:
                self.add(self.monic(rem, sugar))
        budget = self.budget.max_pairs
        while self.pairs:
            s, T, i, j = heapq.heappop(self.pairs)
            if degree_bound is not None and s > degree_bound:
                truncated = True
                self.pairs = []
                break
            if self.pairs_reduced >= budget:
                raise BudgetExceeded(
                    f"S-pair budget of {budget} reductions exhausted",
                    self.pairs_reduced, len(self.basis))
            f, sugar = self.spoly(i, j)
            self.pairs_reduced += 1
            if not f:
                continue
            rem = self.reduce(f)
            if rem:
                self.add(self.monic(rem, sugar))
        return truncated

    def reduced_basis(self):
        """Inter-reduce the active elements into the reduced Gröbner basis."""
        basis = self.basis
        act = sorted(self.active, key=lambda i: basis[i].lm, reverse=True)
        out = []
        for idx, i in enumerate(act):
            g = basis[i]
            others = [k for k in act if k != i]
            saved = self.active
            self.active = others
            tail = self.reduce(dict(g.terms[1:])) if len(g.terms) > 1 else []
            self.active = saved
            out.append(_Poly([g.terms[0]] + sorted(tail, key=lambda t: t[0]), g.sugar, self.off))
        out.sort(key=lambda g: g.lm)
        return out


# --------------------------------------------------------------------- API
@dataclass
class GroebnerBasis:
    """A (possibly degree-truncated) reduced Gröbner basis."""

    ctx: VarContext
    order: MonomialOrder
    polys: list
    truncated_at: int | None = None
    homogeneous: bool = False
    stats: dict = field(default_factory=dict)

    def _engine(self):
        eng = _Engine(self.order, Budget(max_pairs=0))
        for p in self.polys:
            eng.basis.append(_Poly(eng.encode_poly(p), p.weighted_degree(self.order.weights), eng.off))
        eng.active = list(range(len(eng.basis)))
        return eng

    def normal_form(self, p: MultiPoly) -> MultiPoly:
        p = p.change_context(self.ctx)
        if self.truncated_at is not None:
            deg = p.weighted_degree(self.order.weights)
            if deg > self.truncated_at:
                raise ValueError(
                    f"basis truncated at degree {self.truncated_at}; cannot reduce degree {deg}")
        eng = self._engine()
        rem = eng.reduce(dict(eng.encode_poly(p)))
        return eng.to_multipoly(rem)

    def contains(self, p: MultiPoly) -> bool:
        return not self.normal_form(p)

    def leading_monomials(self):
        eng = self._engine()
        return [eng.basis[i].raw for i in eng.active]

    def __len__(self):
        return len(self.polys)

    def is_groebner(self) -> bool:
        """Check that every S-polynomial of the basis reduces to zero."""
        eng = self._engine()
        n = len(eng.basis)
        for i in range(n):
            for j in range(i + 1, n):
                if self.truncated_at is not None:
                    l = eng.lcm_raw(eng.basis[i].raw, eng.basis[j].raw)
                    if self.order.wdeg(l) > self.truncated_at:
                        continue
                f, _ = eng.spoly(i, j)
                if f and eng.reduce(f):
                    return False
        return True


def _homogeneous(gens, weights):
    return all(g.is_homogeneous(weights) for g in gens)


def buchberger(gens, order: MonomialOrder | None = None, degree_bound=None,
               budget: Budget | None = None) -> GroebnerBasis:
    """Reduced Gröbner basis of ``gens``.

    ``degree_bound`` truncates the computation; only honoured when the
    generators are homogeneous for the order's weights.
    """
    gens = [g for g in gens if g]
    if not gens and order is None:
        raise ValueError("need an order or at least one generator to fix the context")
    ctx = order.ctx if order is not None else gens[0].ctx
    order = order or MonomialOrder(ctx)
    gens = [g.change_context(ctx) for g in gens]
    homog = _homogeneous(gens, order.weights)
    if degree_bound is not None and not homog:
        degree_bound = None
    eng = _Engine(order, budget or Budget())
    truncated = eng.run(gens, degree_bound)
    red = eng.reduced_basis()
    polys = [canonicalize(eng.to_multipoly(g.terms)) for g in red]
    # keep monic representation for reduction
    polys = [p / _lc(p, order) for p in polys]
    return GroebnerBasis(ctx, order, polys,
                         truncated_at=degree_bound if (truncated or degree_bound is not None) else None,
                         homogeneous=homog,
                         stats={"pairs_reduced": eng.pairs_reduced, "basis_size": len(polys)})


def _lc(p: MultiPoly, order: MonomialOrder):
    e = min(p.terms, key=order.encode)
    return p.terms[e]


def leading_monomial(p: MultiPoly, order: MonomialOrder):
    return min(p.terms, key=order.encode)


def normal_form(p: MultiPoly, gb: GroebnerBasis) -> MultiPoly:
    return gb.normal_form(p)


def homogeneous_components(p: MultiPoly, weights):
    comps = {}
    for e, c in p.terms.items():
        d = sum(a * b for a, b in zip(weights, e))
        comps.setdefault(d, {})[e] = c
    return {d: MultiPoly._raw(p.ctx, t) for d, t in sorted(comps.items())}


def membership(p: MultiPoly, gens, order: MonomialOrder | None = None,
               budget: Budget | None = None, return_basis=False):
    """Decide ``p in <gens>``.

    For homogeneous generators the basis is only computed up to the degree of
    ``p`` and each homogeneous component of ``p`` is tested separately.
    """
    if not p:
        return (True, None) if return_basis else True
    gens = [g for g in gens if g]
    ctx = order.ctx if order is not None else (gens[0].ctx if gens else p.ctx)
    order = order or MonomialOrder(ctx)
    p = p.change_context(ctx)
    if not gens:
        return (False, None) if return_basis else False
    gens = [g.change_context(ctx) for g in gens]
    if _homogeneous(gens, order.weights):
        bound = p.weighted_degree(order.weights)
        gb = buchberger(gens, order, degree_bound=bound, budget=budget)
        ok = all(gb.contains(comp) for comp in homogeneous_components(p, order.weights).values())
    else:
        gb = buchberger(gens, order, budget=budget)
        ok = gb.contains(p)
    return (ok, gb) if return_basis else ok


def eliminate(gens, keep, budget: Budget | None = None, weights=None, degree_bound=None):
    """Generators of ``<gens>`` intersected with the polynomial ring in ``keep``.

    Uses a block elimination order (the eliminated block dominates); the
    result is returned in the original context.
    """
    gens = [g for g in gens if g]
    if not gens:
        return []
    ctx = gens[0].ctx
    keep = set(keep)
    unknown = keep - set(ctx.names)
    if unknown:
        raise KeyError(f"unknown variables {sorted(unknown)}")
    elim = [v for v in ctx.names if v not in keep]
    order = MonomialOrder(ctx, "block", weights=weights, eliminate=elim)
    gb = buchberger(gens, order, degree_bound=degree_bound, budget=budget)
    drop = {ctx.index(v) for v in elim}
    out = []
    for g in gb.polys:
        if all(not e[i] for e in g.terms for i in drop):
            out.append(canonicalize(g))
    return out


def saturate_by_variable(gens, var: str, weights=None, budget: Budget | None = None):
    """Generators of ``<gens> : var^infinity`` for homogeneous ``gens``.

    Computes a weighted grevlex basis with ``var`` the smallest variable and
    divides each element by the largest power of ``var`` dividing it.
    """
    gens = [g for g in gens if g]
    ctx = gens[0].ctx
    ranking = [var] + [v for v in ctx.names if v != var]
    order = MonomialOrder(ctx, "grevlex", weights=weights, ranking=ranking)
    if not _homogeneous(gens, order.weights):
        raise ValueError("saturation by a variable requires homogeneous generators")
    gb = buchberger(gens, order, budget=budget)
    i = ctx.index(var)
    out = []
    for g in gb.polys:
        k = min(e[i] for e in g.terms)
        if k:
            g = MultiPoly._raw(ctx, {e[:i] + (e[i] - k,) + e[i + 1:]: c for e, c in g.terms.items()})
        out.append(canonicalize(g))
    return _dedup_polys(out)


def radical_membership(p: MultiPoly, gens, budget: Budget | None = None) -> bool:
    """Rabinowitsch test: ``p`` vanishes on the variety of ``gens`` iff ``1 in <gens, 1 - t p>``."""
    ctx = p.ctx
    t = "_t"
    while t in ctx:
        t = "_" + t
    big = VarContext(list(ctx.names) + [t])
    gens2 = [g.change_context(big) for g in gens] + [big.one() - big.var(t) * p.change_context(big)]
    gb = buchberger(gens2, MonomialOrder(big), budget=budget)
    return any(g.is_constant() and g for g in gb.polys)


def _dedup_polys(polys):
    seen, out = set(), []
    for p in polys:
        if p and p not in seen:
            seen.add(p)
            out.append(p)
    return out
