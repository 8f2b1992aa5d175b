"""Groebner bases, saturation, Hilbert series and minors of polynomial matrices.

Two independent routes to graded dimensions live here: Buchberger's
algorithm followed by the Hilbert series of the leading-term ideal, and
plain ranks of Macaulay matrices.  Tests play them against each other.
"""

from __future__ import annotations

import heapq
import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

import numpy as np

from . import gfp
from .polyring import (
    NBASE,
    GradedBasis,
    Polynomial,
    Ring,
    from_vector,
    multiples_matrix,
    random_form,
    to_vector,
)


class Ideal:
    """A list of generators in one ring."""

    def __init__(self, gens, ring: Ring | None = None):
        gens = [g for g in gens if not g.is_zero()]
        if ring is None:
            if not gens:
                raise ValueError("ring required for the zero ideal")
            ring = gens[0].ring
        for g in gens:
            if g.ring != ring:
                raise ValueError("generators live in different rings")
        self.gens = gens
        self.ring = ring

    def is_homogeneous(self) -> bool:
        return all(g.is_homogeneous() for g in self.gens)

    def __add__(self, other):
        other_gens = other.gens if isinstance(other, Ideal) else list(other)
        return Ideal(self.gens + other_gens, self.ring)

    def __len__(self):
        return len(self.gens)

    def __repr__(self):
        return f"Ideal({len(self.gens)} generators)"


def irrelevant_ideal(ring: Ring) -> Ideal:
    return Ideal([ring.var(i) for i in range(NBASE)], ring)


# --- monomial helpers ---------------------------------------------------------


def _divides(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _disjoint(a, b) -> bool:
    return all(x == 0 or y == 0 for x, y in zip(a, b))


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


# --- reduction ----------------------------------------------------------------


def _reduce(f: Polynomial, basis, full: bool = True) -> Polynomial:
    """Remainder of f on division by monic polynomials ``basis``.

    The working polynomial is a dict keyed by order keys with a max-heap of
    pending monomials, so each step touches only the terms it changes.
    """
    ring = f.ring
    if not f.terms or not basis:
        return f
    p = ring.p
    key = ring.order.key
    leads = [(g.lm, g) for g in basis]
    coef: dict = {}
    mono: dict = {}
    heap = []
    for m, c in f.terms:
        k = key(m)
        coef[k] = c
        mono[k] = m
        heap.append(-k)
    heapq.heapify(heap)
    rem = []
    while heap:
        k = -heapq.heappop(heap)
        c = coef.pop(k, 0)
        if c == 0:
            continue
        m = mono[k]
        for lm, g in leads:
            if _divides(lm, m):
                break
        else:
            rem.append((m, c))
            if not full:
                break
            continue
        u = _sub(m, lm)
        for mg, cg in g.terms[1:]:
            mm = tuple(x + y for x, y in zip(u, mg))
            kk = key(mm)
            old = coef.get(kk)
            if old is None:
                mono[kk] = mm
                heapq.heappush(heap, -kk)
                coef[kk] = (-c * cg) % p
            else:
                coef[kk] = (old - c * cg) % p
    if not full:
        # leading term is irreducible; keep the untouched tail as is
        rest = sorted(((mono[k], c) for k, c in coef.items() if c), key=lambda t: key(t[0]), reverse=True)
        return Polynomial(ring, tuple(rem + rest))
    return Polynomial(ring, tuple(rem))


def _spoly(f: Polynomial, g: Polynomial) -> Polynomial:
    lcm = _lcm(f.lm, g.lm)
    a = f.mul_term(_sub(lcm, f.lm), 1)
    b = g.mul_term(_sub(lcm, g.lm), 1)
    return a - b


@dataclass(frozen=True)
class GroebnerBasis:
    """A reduced Groebner basis: monic, auto-reduced, sorted by leading term."""

    elements: tuple
    ring: Ring
    origin: Ideal | None = field(default=None, compare=False, repr=False)

    @property
    def order(self):
        return self.ring.order

    def leading_monomials(self):
        return [g.lm for g in self.elements]

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def contains(self, f: Polynomial) -> bool:
        return normal_form(f, self).is_zero()

    def ideal(self) -> Ideal:
        return Ideal(list(self.elements), self.ring)


def buchberger(I) -> GroebnerBasis:
    """Reduced Groebner basis by Buchberger's algorithm.

    Pairs are taken by the normal strategy (smallest lcm degree, then sugar,
    then the order of the lcm); useless pairs are discarded with the
    Gebauer-Moeller criteria.
    """
    if not isinstance(I, Ideal):
        I = Ideal(list(I))
    ring = I.ring
    key = ring.order.key
    polys: list = []
    sugar: list = []
    active: list = []
    pairs: list = []

    def push_pair(i, j):
        lcm = _lcm(polys[i].lm, polys[j].lm)
        s = max(sugar[i] + sum(lcm) - sum(polys[i].lm), sugar[j] + sum(lcm) - sum(polys[j].lm))
        heapq.heappush(pairs, (sum(lcm), s, key(lcm), i, j))

    def update(h):
        lm_h = polys[h].lm
        cand = [(g, _lcm(polys[g].lm, lm_h)) for g in active]
        keep = []
        for idx, (g, l) in enumerate(cand):
            if _disjoint(polys[g].lm, lm_h):
                keep.append((g, l))
                continue
            others = [l2 for _, l2 in cand[idx + 1 :]] + [l2 for _, l2 in keep]
            if not any(_divides(l2, l) for l2 in others):
                keep.append((g, l))
        new_pairs = [(g, l) for g, l in keep if not _disjoint(polys[g].lm, lm_h)]
        # B-criterion on the existing pairs
        survivors = []
        for item in pairs:
            _, _, _, i, j = item
            l = _lcm(polys[i].lm, polys[j].lm)
            if (
                _divides(lm_h, l)
                and _lcm(polys[i].lm, lm_h) != l
                and _lcm(polys[j].lm, lm_h) != l
            ):
                continue
            survivors.append(item)
        pairs[:] = survivors
        heapq.heapify(pairs)
        for g, _ in new_pairs:
            push_pair(g, h)
        active[:] = [g for g in active if not _divides(lm_h, polys[g].lm)] + [h]

    def add(f):
        polys.append(f)
        sugar.append(f.degree())
        update(len(polys) - 1)

    start = sorted((g.monic() for g in I.gens), key=lambda g: (g.degree(), key(g.lm)))
    for g in start:
        r = _reduce(g, [polys[i] for i in active])
        if r:
            add(r.monic())
    while pairs:
        _, s, _, i, j = heapq.heappop(pairs)
        r = _reduce(_spoly(polys[i], polys[j]), [polys[k] for k in active])
        if r:
            polys.append(r.monic())
            sugar.append(s)
            update(len(polys) - 1)
    return GroebnerBasis(_interreduce([polys[i] for i in active]), ring, I)


def _interreduce(gens) -> tuple:
    if not gens:
        return ()
    ring = gens[0].ring
    key = ring.order.key
    minimal = [g for g in gens if not any(h.lm != g.lm and _divides(h.lm, g.lm) for h in gens)]
    minimal.sort(key=lambda g: key(g.lm))
    out = []
    for g in minimal:
        others = [h for h in minimal if h is not g]
        out.append(_reduce(g, others).monic() if others else g.monic())
    return tuple(out)


def normal_form(f: Polynomial, G) -> Polynomial:
    """Fully reduced remainder of f modulo a Groebner basis."""
    elements = G.elements if isinstance(G, GroebnerBasis) else tuple(G)
    return _reduce(f, [g if g.lc == 1 else g.monic() for g in elements])


def is_groebner(G: GroebnerBasis) -> bool:
    """Buchberger's criterion: every S-polynomial reduces to zero."""
    els = list(G.elements)
    for a, b in itertools.combinations(els, 2):
        if _disjoint(a.lm, b.lm):
            continue
        if _reduce(_spoly(a, b), els):
            return False
    return True


# --- Hilbert series -----------------------------------------------------------


def _minimalize(gens):
    gens = sorted(set(gens), key=sum)
    out = []
    for g in gens:
        if not any(_divides(h, g) for h in out):
            out.append(g)
    return tuple(sorted(out))


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_add(a, b):
    out = [0] * max(len(a), len(b))
    for i, x in enumerate(a):
        out[i] += x
    for i, x in enumerate(b):
        out[i] += x
    return out


@lru_cache(maxsize=200_000)
def _numerator(gens) -> tuple:
    """Numerator N(t) of the Hilbert series N(t)/(1-t)^n of k[x]/(gens)."""
    if not gens:
        return (1,)
    if any(sum(g) == 0 for g in gens):
        return (0,)
    # base case: pairwise coprime generators give a product formula
    supports = [frozenset(i for i, e in enumerate(g) if e) for g in gens]
    if all(not (a & b) for a, b in itertools.combinations(supports, 2)):
        out = [1]
        for g in gens:
            d = sum(g)
            out = _poly_mul(out, [1] + [0] * (d - 1) + [-1])
        return tuple(out)
    # pivot on the variable shared by the most non-coprime generators
    n = len(gens[0])
    counts = [0] * n
    for g in gens:
        if sum(1 for e in g if e) > 1:
            for i, e in enumerate(g):
                if e:
                    counts[i] += 1
    var = max(range(n), key=lambda i: counts[i])
    # pure powers of var are excluded, so var^e is never already in the ideal
    exps = sorted(g[var] for g in gens if g[var] and sum(1 for x in g if x) > 1)
    e = exps[len(exps) // 2]
    pivot = tuple(e if i == var else 0 for i in range(n))
    with_pivot = _minimalize(list(gens) + [pivot])
    quotient = _minimalize([tuple(max(x - y, 0) for x, y in zip(g, pivot)) for g in gens])
    a = list(_numerator(with_pivot))
    b = [0] * e + list(_numerator(quotient))
    return tuple(_trim(_poly_add(a, b)))


def _trim(a):
    a = list(a)
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


@dataclass(frozen=True)
class HilbertData:
    """Hilbert series K(t)/(1-t)^r of R/I with K(1) != 0.

    ``dimension`` is the dimension of the projective scheme (r - 1, so -1 for
    the empty scheme) and ``degree`` is K(1).
    """

    numerator: tuple
    nvars: int
    reduced_numerator: tuple
    affine_dimension: int

    @property
    def dimension(self) -> int:
        return self.affine_dimension - 1

    @property
    def degree(self) -> int:
        return sum(self.reduced_numerator)

    @property
    def regularity(self) -> int:
        """Degree from which the Hilbert function agrees with the polynomial."""
        return max(0, len(self.reduced_numerator) - self.affine_dimension)

    def hilbert_function(self, d: int) -> int:
        if d < 0:
            return 0
        r = self.affine_dimension
        if r == 0:
            k = self.reduced_numerator
            return k[d] if d < len(k) else 0
        return sum(c * comb(d - i + r - 1, r - 1) for i, c in enumerate(self.reduced_numerator) if d >= i)

    def hilbert_polynomial(self):
        """Coefficients (constant term first) as Fractions."""
        r = self.affine_dimension
        if r == 0:
            return [Fraction(0)]
        total = [Fraction(0)] * r
        for i, c in enumerate(self.reduced_numerator):
            # binomial(n - i + r - 1, r - 1) as a polynomial in n
            poly = [Fraction(1)]
            for j in range(1, r):
                poly = _fpoly_mul(poly, [Fraction(j - i, 1), Fraction(1)])
            fact = Fraction(1, factorial(r - 1))
            for k, a in enumerate(poly):
                total[k] += c * a * fact
        return total

    def hilbert_polynomial_value(self, n: int) -> Fraction:
        return sum(a * n**k for k, a in enumerate(self.hilbert_polynomial()))


def _fpoly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def hilbert_from_monomials(leads, nvars: int = NBASE) -> HilbertData:
    num = list(_numerator(_minimalize([tuple(m[:nvars]) for m in leads])))
    k = list(num)
    r = nvars
    while r > 0 and sum(k) == 0:
        # divide by (1 - t)
        q = []
        acc = 0
        for c in k[:-1]:
            acc += c
            q.append(acc)
        k = _trim(q) if q else [0]
        r -= 1
    return HilbertData(tuple(num), nvars, tuple(_trim(k)), r)


def hilbert(G: GroebnerBasis) -> HilbertData:
    """Hilbert data of R/I from the leading monomials of a Groebner basis."""
    if G.ring.aux:
        raise ValueError("Hilbert series only for the base ring")
    return hilbert_from_monomials(G.leading_monomials(), NBASE)


# --- Macaulay matrices --------------------------------------------------------


def macaulay_matrix(gens, d: int) -> np.ndarray:
    blocks = [multiples_matrix(g, d) for g in gens if g.homogeneous_degree() <= d]
    size = GradedBasis(d).size
    blocks = [b for b in blocks if b.shape[0]]
    if not blocks:
        return np.zeros((0, size), dtype=np.int64)
    return np.vstack(blocks)


def graded_piece_dim(I: Ideal, d: int) -> int:
    """dim I_d as the rank of the Macaulay matrix; no Groebner basis involved."""
    if d < 0:
        return 0
    if not I.is_homogeneous():
        raise ValueError("Macaulay oracle needs homogeneous generators")
    return gfp.rank(macaulay_matrix(I.gens, d), I.ring.p)


class GradedTruncation:
    """Reduced echelon bases of the graded pieces I_d, built degree by degree.

    I_{d+1} is spanned by the variables times I_d together with the
    generators of degree d+1, so each piece costs one elimination.
    """

    def __init__(self, gens, p: int):
        self.p = p
        self.gens: dict = {}
        self.add(gens)

    def add(self, gens):
        for g in gens:
            if g.is_zero():
                continue
            d = g.homogeneous_degree()
            if d is None:
                raise ValueError("generators must be homogeneous")
            self.gens.setdefault(d, []).append(to_vector(g, d))
        self.low = min(self.gens) if self.gens else 0
        self.pieces: dict = {}

    def piece(self, d: int):
        if d in self.pieces:
            return self.pieces[d]
        size = GradedBasis(d).size
        rows = []
        if d - 1 >= self.low:
            prev, _ = self.piece(d - 1)
            if len(prev):
                base = GradedBasis(d - 1)
                for v in range(NBASE):
                    block = np.zeros((len(prev), size), dtype=np.int64)
                    block[:, base.shift(v)] = prev
                    rows.append(block)
        if d in self.gens:
            rows.append(np.array(self.gens[d], dtype=np.int64))
        if rows:
            E, piv = gfp.echelon(np.vstack(rows), self.p, full=True)
        else:
            E, piv = np.zeros((0, size), dtype=np.int64), np.zeros(0, dtype=np.int64)
        self.pieces[d] = (E, piv)
        return E, piv


def _colon_descent(top, D: int, ell: Polynomial, p: int):
    """Pieces {f : ell^(D-e) f in I_D} for e <= D, given an echelon basis of I_D."""
    out = {D: top}
    for e in range(D - 1, -1, -1):
        E, piv = out[e + 1]
        X = gfp.reduce_rows(multiples_matrix(ell, e + 1), E, piv, p)
        ker = gfp.kernel(np.ascontiguousarray(X.T), p)
        out[e] = gfp.echelon(ker, p, full=True) if len(ker) else (ker, np.zeros(0, dtype=np.int64))
    return out


@dataclass
class Saturation:
    """Result of a truncated saturation: pieces J_e, e <= D, and its generators."""

    pieces: dict
    top: int
    hilbert_function: list
    generators: list
    gb: GroebnerBasis | None = None


def _min_generators(pieces, upto: int, ring: Ring):
    p = ring.p
    gens = []
    for e in range(0, upto + 1):
        E, piv = pieces[e]
        if not len(E):
            continue
        if e >= 1 and pieces.get(e - 1) is not None and len(pieces[e - 1][0]):
            prev = pieces[e - 1][0]
            base = GradedBasis(e - 1)
            size = GradedBasis(e).size
            blocks = []
            for v in range(NBASE):
                block = np.zeros((len(prev), size), dtype=np.int64)
                block[:, base.shift(v)] = prev
                blocks.append(block)
            S, spiv = gfp.echelon(np.vstack(blocks), p, full=True)
            R = gfp.reduce_rows(E, S, spiv, p)
            new, _ = gfp.echelon(R, p, full=True)
        else:
            new = E
        gens.extend(from_vector(v, e, ring) for v in new)
    return gens


def _is_nonzerodivisor(G: GroebnerBasis, h: Polynomial) -> bool:
    """h is a nonzerodivisor on R/J iff HS(R/(J + h)) = (1 - t^deg h) HS(R/J)."""
    ring = G.ring
    Gh = buchberger(Ideal(list(G.elements) + [h], ring))
    lhs = list(hilbert(Gh).numerator)
    e = h.homogeneous_degree()
    rhs = _poly_add(list(hilbert(G).numerator), [0] * e + [-c for c in hilbert(G).numerator])
    return _trim(list(lhs)) == _trim(list(rhs))


def saturate_truncated(I: Ideal, h: Polynomial, *, start: int | None = None, max_degree: int = 14,
                       zero_dimensional: bool = False, truncation: GradedTruncation | None = None) -> Saturation:
    """I : h^infinity by linear algebra on graded pieces.

    For the top degree D the pieces {f : h^k f in I_D} are computed for every
    lower degree.  They generate an ideal J with I in J in I : h^inf, and J
    is the saturation exactly when h is a nonzerodivisor modulo J, which is
    checked through Hilbert series.  D grows until that holds; in the
    zero-dimensional case the exact check only runs once the Hilbert
    function has levelled off.
    """
    ring = I.ring
    p = ring.p
    if h.homogeneous_degree() != 1:
        raise ValueError("truncated saturation expects a linear form")
    T = truncation or GradedTruncation(I.gens, p)
    D = start if start is not None else max(g.homogeneous_degree() for g in I.gens) + 1
    previous = None
    while D <= max_degree:
        pieces = _colon_descent(T.piece(D), D, h, p)
        hf = [GradedBasis(e).size - len(pieces[e][0]) for e in range(D + 1)]
        ready = True
        if zero_dimensional:
            ready = previous is not None and previous == hf[: len(previous)] and D >= 2 and hf[-1] == hf[-2] == hf[-3]
        if ready:
            gens = _min_generators(pieces, D, ring)
            G = buchberger(Ideal(gens, ring))
            if _is_nonzerodivisor(G, h):
                return Saturation(pieces, D, hf, gens, G)
        previous = hf
        D += 1
    raise RuntimeError("saturation did not stabilise below degree %d" % max_degree)


def generic_element(J: Ideal, rng: random.Random) -> Polynomial:
    """Random combination of the generators of J, padded to a common degree."""
    ring = J.ring
    top = max(g.homogeneous_degree() for g in J.gens)
    total = ring.zero
    for g in J.gens:
        total = total + g * random_form(top - g.homogeneous_degree(), ring, rng)
    return total


def saturate(I: Ideal, J: Ideal, method: str = "rabinowitsch", seed: int = 0) -> Ideal:
    """I : J^infinity, returned with a reduced Groebner basis as generators.

    For J with several generators a seeded generic element h of J is used:
    the associated primes of I not containing J avoid a generic h, so
    I : J^inf = I : h^inf.  ``rabinowitsch`` eliminates t from I + (1 - t h);
    ``macaulay`` runs the truncated linear-algebra colon (h must be linear,
    which a generic element of the irrelevant ideal is).
    """
    ring = I.ring
    if not J.gens:
        return Ideal(list(buchberger(I).elements), ring)
    rng = random.Random(seed)
    h = J.gens[0] if len(J.gens) == 1 else generic_element(J, rng)
    if method == "macaulay":
        sat = saturate_truncated(I, h)
        return Ideal(list(sat.gb.elements), ring)
    if method != "rabinowitsch":
        raise ValueError(method)
    big = ring.with_order("block", aux=1)
    t = big.var(NBASE)
    gens = [big.embed(g) for g in I.gens] + [big.one - t * big.embed(h)]
    G = buchberger(Ideal(gens, big))
    kept = [ring.embed(g) for g in G.elements if g.degree() >= 0 and not any(m[NBASE] for m, _ in g.terms)]
    return Ideal(list(buchberger(Ideal(kept, ring)).elements), ring)


def saturate_irrelevant(I: Ideal, seed: int = 0, max_degree: int = 14, zero_dimensional: bool = True):
    """Saturation by (z0..z4) for a homogeneous I; returns (GroebnerBasis, Saturation)."""
    ring = I.ring
    rng = random.Random(seed)
    ell = random_form(1, ring, rng)
    sat = saturate_truncated(I, ell, max_degree=max_degree, zero_dimensional=zero_dimensional)
    return sat.gb, sat


# --- minors --------------------------------------------------------------------


def _entry_degrees(M):
    """Row and column degree shifts with deg M[i][j] = col[j] - row[i]."""
    rows, cols = len(M), len(M[0])
    row = [None] * rows
    col = [None] * cols
    row[0] = 0
    changed = True
    while changed:
        changed = False
        for i in range(rows):
            for j in range(cols):
                f = M[i][j]
                if f.is_zero():
                    continue
                d = f.homogeneous_degree()
                if d is None:
                    raise ValueError("matrix entries must be homogeneous")
                if row[i] is not None and col[j] is None:
                    col[j] = row[i] + d
                    changed = True
                elif col[j] is not None and row[i] is None:
                    row[i] = col[j] - d
                    changed = True
                elif row[i] is not None and col[j] is not None and col[j] - row[i] != d:
                    raise ValueError("matrix is not homogeneous")
        if not changed and (None in row or None in col):
            k = row.index(None) if None in row else None
            if k is not None:
                row[k] = 0
                changed = True
            else:
                col[col.index(None)] = 0
                changed = True
    return row, col


class MinorEvaluator:
    """Minors of a homogeneous polynomial matrix by evaluation and interpolation."""

    def __init__(self, M, ring: Ring, seed: int = 0):
        self.M = M
        self.ring = ring
        self.p = ring.p
        self.rows, self.cols = len(M), len(M[0])
        self.row_deg, self.col_deg = _entry_degrees(M)
        self.rng = np.random.default_rng(seed)
        self._points: dict = {}

    def _setup(self, d: int):
        if d in self._points:
            return self._points[d]
        p = self.p
        basis = GradedBasis(d)
        for _ in range(20):
            pts = self.rng.integers(0, p, size=(basis.size, NBASE))
            V = _monomial_values(basis.exps, pts, p)
            try:
                Vinv = gfp.inverse(V, p)
                break
            except ZeroDivisionError:
                continue
        else:
            raise RuntimeError("no interpolation nodes found")
        vals = np.zeros((basis.size, self.rows, self.cols), dtype=np.int64)
        for i in range(self.rows):
            for j in range(self.cols):
                f = self.M[i][j]
                if f.terms:
                    vals[:, i, j] = _evaluate(f, pts, p)
        self._points[d] = (Vinv, vals)
        return self._points[d]

    def degree(self, rows, cols) -> int:
        return sum(self.col_deg[j] for j in cols) - sum(self.row_deg[i] for i in rows)

    def minors(self, selections):
        """Polynomials for a list of (rows, cols) selections."""
        by_degree: dict = {}
        for k, (r, c) in enumerate(selections):
            by_degree.setdefault(self.degree(r, c), []).append(k)
        out = [None] * len(selections)
        for d, ks in by_degree.items():
            if d < 0:
                for k in ks:
                    out[k] = self.ring.zero
                continue
            Vinv, vals = self._setup(d)
            stack = np.stack([vals[:, list(selections[k][0])][:, :, list(selections[k][1])] for k in ks], axis=1)
            n_pts = stack.shape[0]
            dets = gfp.batch_det(stack.reshape(-1, stack.shape[2], stack.shape[3]), self.p).reshape(n_pts, len(ks))
            coeffs = gfp.matmul(Vinv, dets, self.p)
            for col, k in enumerate(ks):
                out[k] = from_vector(coeffs[:, col], d, self.ring)
        return out


    def classes(self):
        """Row and column index groups of equal degree shift."""
        rows: dict = {}
        cols: dict = {}
        for i, d in enumerate(self.row_deg):
            rows.setdefault(d, []).append(i)
        for j, d in enumerate(self.col_deg):
            cols.setdefault(d, []).append(j)
        return [rows[d] for d in sorted(rows)], [cols[d] for d in sorted(cols)]

    def compressed(self, samples, rng: random.Random):
        """det(a P b) for random a, b mixing rows/columns within degree classes.

        ``samples`` holds pairs (row counts, column counts) per class.  By
        Cauchy-Binet each value is a random combination of all minors with
        those class counts.
        """
        row_cls, col_cls = self.classes()
        out = []
        by_degree: dict = {}
        for rc, cc in samples:
            a_rows, b_cols = [], []
            for cls, n in zip(row_cls, rc):
                for _ in range(n):
                    a_rows.append([(i, rng.randrange(self.p)) for i in cls])
            for cls, n in zip(col_cls, cc):
                for _ in range(n):
                    b_cols.append([(j, rng.randrange(self.p)) for j in cls])
            d = sum(self.col_deg[cls[0]] * n for cls, n in zip(col_cls, cc)) - sum(
                self.row_deg[cls[0]] * n for cls, n in zip(row_cls, rc)
            )
            k = len(a_rows)
            a = np.zeros((k, self.rows), dtype=np.int64)
            b = np.zeros((self.cols, k), dtype=np.int64)
            for r, entries in enumerate(a_rows):
                for i, c in entries:
                    a[r, i] = c
            for c_, entries in enumerate(b_cols):
                for j, c in entries:
                    b[j, c_] = c
            by_degree.setdefault(d, []).append((len(out), a, b))
            out.append(None)
        for d, items in by_degree.items():
            if d < 0:
                for idx, _, _ in items:
                    out[idx] = self.ring.zero
                continue
            Vinv, vals = self._setup(d)
            mats = []
            for _, a, b in items:
                left = np.einsum("ri,nij->nrj", a, vals) % self.p
                mats.append(np.einsum("nrj,jc->nrc", left, b) % self.p)
            stack = np.stack(mats, axis=1)
            n_pts, m, k = stack.shape[0], stack.shape[1], stack.shape[2]
            dets = gfp.batch_det(stack.reshape(-1, k, k), self.p).reshape(n_pts, m)
            coeffs = gfp.matmul(Vinv, dets, self.p)
            for col, (idx, _, _) in enumerate(items):
                out[idx] = from_vector(coeffs[:, col], d, self.ring)
        return out


def _monomial_values(exps, pts, p):
    """V[i, j] = monomial j evaluated at point i."""
    n_pts = pts.shape[0]
    out = np.ones((n_pts, exps.shape[0]), dtype=np.int64)
    for v in range(NBASE):
        top = int(exps[:, v].max()) if exps.size else 0
        powers = np.ones((n_pts, top + 1), dtype=np.int64)
        for e in range(1, top + 1):
            powers[:, e] = powers[:, e - 1] * pts[:, v] % p
        out = out * powers[:, exps[:, v]] % p
    return out


def _evaluate(f: Polynomial, pts, p):
    exps = np.array([m[:NBASE] for m, _ in f.terms], dtype=np.int64)
    coeffs = np.array([c for _, c in f.terms], dtype=np.int64)
    vals = _monomial_values(exps, pts, p)
    return gfp.matmul(vals, coeffs.reshape(-1, 1), p).ravel()


def _all_selections(rows, cols, k):
    return [(r, c) for r in itertools.combinations(range(rows), k) for c in itertools.combinations(range(cols), k)]


@dataclass
class MinorStream:
    """Bookkeeping of a streamed minors computation."""

    used: int
    total: int
    batches: int
    span: dict


class _SpanTracker:
    """Row-echelon span of forms, kept separately for each degree."""

    def __init__(self, p: int):
        self.p = p
        self.spaces: dict = {}

    def add(self, polys) -> bool:
        """Insert forms; True if the span grew."""
        grew = False
        by_degree: dict = {}
        for f in polys:
            if f.terms:
                by_degree.setdefault(f.homogeneous_degree(), []).append(f)
        for d, fs in by_degree.items():
            rows = np.array([to_vector(f, d) for f in fs], dtype=np.int64)
            old = self.spaces.get(d)
            if old is not None:
                rows = gfp.reduce_rows(rows, old[0], old[1], self.p)
                if not rows.any():
                    continue
                rows = np.vstack([old[0], rows])
            E, piv = gfp.echelon(rows, self.p, full=True)
            if old is None or len(piv) > len(old[1]):
                grew = True
            self.spaces[d] = (E, piv)
        return grew

    def dims(self) -> dict:
        return {d: len(v[1]) for d, v in sorted(self.spaces.items())}


def minors_ideal(M, k: int, budget: int = 512, seed: int = 0, extra=(), batch: int = 64,
                 expected_degree: int | None = None, stream_info: list | None = None) -> Ideal:
    """Ideal of the k x k minors of a matrix of homogeneous polynomials.

    With at most ``budget`` minors all are computed.  Otherwise the stream
    draws batches of determinants of random compressions a M b (one per
    degree pattern at least), each a generic combination of minors, and
    stops once a whole batch leaves the span in every degree unchanged.
    The returned generators are a basis of that span.  If
    ``expected_degree`` is given, the saturation (with ``extra`` added) must
    be zero-dimensional of that degree.
    """
    rows, cols = len(M), len(M[0])
    if not 1 <= k <= min(rows, cols):
        raise ValueError("minor size out of range")
    ring = next(f.ring for row in M for f in row)
    total = comb(rows, k) * comb(cols, k)
    ev = MinorEvaluator(M, ring, seed)
    span = _SpanTracker(ring.p)
    if total <= budget:
        selections = _all_selections(rows, cols, k)
        for i in range(0, total, 4 * batch):
            span.add(ev.minors(selections[i : i + 4 * batch]))
        used, batches = total, 1
    else:
        rng = random.Random(seed)
        row_cls, col_cls = ev.classes()
        patterns = [
            (rc, cc)
            for rc in _count_patterns([len(c) for c in row_cls], k)
            for cc in _count_patterns([len(c) for c in col_cls], k)
        ]
        weights = [_pattern_weight(rc, row_cls) * _pattern_weight(cc, col_cls) for rc, cc in patterns]
        batches = 0
        used = 0
        while True:
            chunk = list(patterns) + rng.choices(patterns, weights, k=max(batch - len(patterns), 0))
            batches += 1
            used += len(chunk)
            if not span.add(ev.compressed(chunk, rng)) and span.spaces:
                break
    gens = [from_vector(row, d, ring) for d, (E, _) in sorted(span.spaces.items()) for row in E]
    if stream_info is not None:
        stream_info.append(MinorStream(used, total, batches, span.dims()))
    if expected_degree is not None:
        G, _ = saturate_irrelevant(Ideal(gens + list(extra), ring), seed)
        _check_degree(hilbert(G).degree, expected_degree)
    return Ideal(gens, ring)


def _count_patterns(sizes, k):
    """Tuples (k_1, ...) with 0 <= k_i <= sizes[i] summing to k."""
    if not sizes:
        return [()] if k == 0 else []
    out = []
    for first in range(min(sizes[0], k) + 1):
        out.extend((first,) + rest for rest in _count_patterns(sizes[1:], k - first))
    return out


def _pattern_weight(counts, classes) -> int:
    w = 1
    for n, cls in zip(counts, classes):
        w *= comb(len(cls), n)
    return w


def _check_degree(found, expected):
    if found != expected:
        raise DegreeMismatch(f"saturated minors ideal has degree {found}, expected {expected}")


class DegreeMismatch(RuntimeError):
    pass
