"""Singular schemes of quartic sections of Q, node counting, reducedness,
the defect of a point set on Q, and a brute-force point oracle for small
primes.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

import numpy as np

from . import gfp
from .groebner import (
    GradedTruncation,
    GroebnerBasis,
    Ideal,
    buchberger,
    graded_piece_dim,
    hilbert,
    normal_form,
    saturate_irrelevant,
)
from .polyring import NBASE, GradedBasis, Polynomial, linear_change_of_coordinates, random_invertible, to_vector
from .quadric import QuadricContext


@dataclass
class SingularScheme:
    ideal: Ideal
    gb: GroebnerBasis
    degree: int
    dimension: int

    @property
    def isolated(self) -> bool:
        return self.dimension <= 0


def jacobian_minors(q: Polynomial, f: Polynomial):
    dq = [q.diff(i) for i in range(NBASE)]
    df = [f.diff(i) for i in range(NBASE)]
    out = []
    for i, j in itertools.combinations(range(NBASE), 2):
        m = dq[i] * df[j] - dq[j] * df[i]
        if not m.is_zero():
            out.append(m)
    return out


def singular_scheme(q: Polynomial, f: Polynomial, ctx: QuadricContext | None = None, seed: int = 0) -> SingularScheme:
    """Saturated ideal of the points where the Jacobian of (q, f) drops rank."""
    ring = q.ring
    I = Ideal([q, f] + jacobian_minors(q, f), ring)
    try:
        G, _ = saturate_irrelevant(I, seed)
    except RuntimeError:
        # Hilbert function never levels off: a curve or surface of singularities
        G = buchberger(I)
        H = hilbert(G)
        return SingularScheme(Ideal(list(G.elements), ring), G, H.degree, H.dimension)
    H = hilbert(G)
    return SingularScheme(Ideal(list(G.elements), ring), G, H.degree, H.dimension)


def _gb_of(I) -> GroebnerBasis:
    return I if isinstance(I, GroebnerBasis) else buchberger(I)


def count_points(I) -> int:
    """Length of a zero-dimensional projective scheme."""
    H = hilbert(_gb_of(I))
    if H.dimension != 0:
        raise ValueError("scheme is not zero-dimensional")
    return H.degree


@dataclass
class NodeSet:
    ideal: Ideal
    count: int
    reduced: bool
    trials: int
    eliminant: list  # coefficients of the characteristic polynomial, leading first


def _standard_part(trunc: GradedTruncation, d: int):
    E, piv = trunc.piece(d)
    size = GradedBasis(d).size
    std = np.setdiff1d(np.arange(size), piv)
    return E, piv, std


def _multiplication_matrix(trunc: GradedTruncation, d: int, var: int, p: int) -> np.ndarray:
    """Matrix of z_var : (R/I)_d -> (R/I)_{d+1} on standard monomials."""
    _, _, std = _standard_part(trunc, d)
    E1, piv1, std1 = _standard_part(trunc, d + 1)
    base = GradedBasis(d)
    cols = base.shift(var)[std]
    vecs = np.zeros((len(std), GradedBasis(d + 1).size), dtype=np.int64)
    vecs[np.arange(len(std)), cols] = 1
    red = gfp.reduce_rows(vecs, E1, piv1, p) if len(E1) else vecs
    return red[:, std1]


def charpoly(M: np.ndarray, p: int) -> list:
    """det(x I - M), leading coefficient first, by the division-free Berkowitz recurrence."""
    M = np.asarray(M, dtype=np.int64) % p
    n = M.shape[0]
    C = [1]
    for k in range(n):
        row, col, A = M[k, :k], M[:k, k], M[:k, :k]
        t = [1, -int(M[k, k]) % p]
        v = col.copy()
        for _ in range(k):
            t.append(-int(row @ v % p) % p)
            v = gfp.matmul(A, v.reshape(-1, 1), p).ravel()
        C = [sum(t[i - j] * C[j] for j in range(len(C)) if 0 <= i - j < len(t)) % p for i in range(k + 2)]
    return C


def _poly_trim(a):
    i = 0
    while i < len(a) and a[i] == 0:
        i += 1
    return a[i:]


def _poly_mod(a, b, p):
    a = list(a)
    inv = pow(b[0], -1, p)
    while len(a) >= len(b):
        c = a[0] * inv % p
        for i in range(len(b)):
            a[i] = (a[i] - c * b[i]) % p
        a = _poly_trim(a)
        if not a:
            break
    return a


def poly_gcd(a, b, p):
    a, b = _poly_trim([x % p for x in a]), _poly_trim([x % p for x in b])
    while b:
        a, b = b, _poly_mod(a, b, p)
    return a


def is_squarefree(a, p: int) -> bool:
    n = len(a) - 1
    if n <= 0:
        return True
    deriv = [(c * (n - i)) % p for i, c in enumerate(a[:-1])]
    return len(poly_gcd(a, deriv, p)) == 1


def is_reduced(I, trials: int = 5, seed: int = 0) -> NodeSet:
    """One-sided reducedness test for a zero-dimensional saturated ideal.

    Each trial moves to random coordinates and takes the characteristic
    polynomial of multiplication by z4/z0 on (R/I)_d past the regularity;
    its roots are the values of z4/z0 at the points, with multiplicity.  A
    squarefree result of full degree proves the scheme is reduced.
    """
    G = _gb_of(I)
    ring = G.ring
    p = ring.p
    H = hilbert(G)
    if H.dimension != 0:
        raise ValueError("scheme is not zero-dimensional")
    count = H.degree
    d = max(H.regularity, 0) + 1
    while H.hilbert_function(d) != count:
        d += 1
    rng = random.Random(seed)
    last: list = []
    for trial in range(1, trials + 1):
        T = random_invertible(rng, p)
        gens = [linear_change_of_coordinates(g, T) for g in G.elements]
        trunc = GradedTruncation(gens, p)
        m0 = _multiplication_matrix(trunc, d, 0, p)
        m4 = _multiplication_matrix(trunc, d, NBASE - 1, p)
        if m0.shape != (count, count):
            continue
        try:
            inv0 = gfp.inverse(m0, p)
        except ZeroDivisionError:
            continue
        last = charpoly(gfp.matmul(m4, inv0, p), p)
        if is_squarefree(last, p) and len(last) - 1 == count:
            return NodeSet(Ideal(list(G.elements), ring), count, True, trial, last)
    return NodeSet(Ideal(list(G.elements), ring), count, False, trials, last)


@dataclass
class DefectResult:
    d: int
    h0_cubics: int
    route: str


def defect(J, count: int, ctx: QuadricContext | None = None) -> DefectResult:
    """d = h0(I_w(3)) - 30 + |w| from the cubic piece of the saturated ideal."""
    ideal = J.ideal() if isinstance(J, GroebnerBasis) else J
    ring = ideal.ring
    if ctx is not None:
        if not normal_form(ctx.q, _gb_of(ideal)).is_zero():
            raise ValueError("ideal does not contain q")
    h0 = graded_piece_dim(ideal, 3) - 5
    return DefectResult(h0 - 30 + count, h0, "groebner")


def cubic_basis_mod_q(ctx: QuadricContext) -> list:
    """Thirty cubic monomials spanning R_3 / (q)_3."""
    G = ctx.gb()
    leads = {g.lm for g in G.elements}
    out = []
    for m in GradedBasis(3).mons:
        if not any(all(a >= b for a, b in zip(m, l)) for l in leads):
            out.append(m)
    return out


def defect_of_points(points, ctx: QuadricContext) -> int:
    """d for an explicit set of F_p-points of Q: |w| minus the rank of cubic evaluation."""
    if not points:
        return 0
    p = ctx.p
    mons = np.array(cubic_basis_mod_q(ctx), dtype=np.int64)
    pts = np.array(points, dtype=np.int64) % p
    vals = np.ones((len(pts), len(mons)), dtype=np.int64)
    for v in range(NBASE):
        for e in range(1, 4):
            mask = mons[:, v] >= e
            vals[:, mask] = vals[:, mask] * pts[:, v : v + 1] % p
    return len(points) - gfp.rank(vals, p)


def projective_points(p: int) -> np.ndarray:
    """All points of P^4(F_p), first nonzero coordinate equal to 1."""
    out = []
    for lead in range(NBASE):
        rest = NBASE - lead - 1
        grid = np.array(list(itertools.product(range(p), repeat=rest)), dtype=np.int64).reshape(p**rest, rest)
        block = np.zeros((len(grid), NBASE), dtype=np.int64)
        block[:, lead] = 1
        block[:, lead + 1 :] = grid
        out.append(block)
    return np.vstack(out)


def enumerate_oracle(I, p: int | None = None) -> list:
    """Rational points of V(I) by exhaustive evaluation (small primes only)."""
    ideal = I.ideal() if isinstance(I, GroebnerBasis) else I
    p = p or ideal.ring.p
    if p > 13:
        raise ValueError("enumeration is meant for p <= 13")
    pts = projective_points(p)
    alive = np.ones(len(pts), dtype=bool)
    for g in ideal.gens:
        if g.is_zero():
            continue
        exps = np.array([m[:NBASE] for m, _ in g.terms], dtype=np.int64)
        coeffs = np.array([c for _, c in g.terms], dtype=np.int64) % p
        val = np.zeros(len(pts), dtype=np.int64)
        for e, c in zip(exps, coeffs):
            term = np.full(len(pts), c, dtype=np.int64)
            for v in range(NBASE):
                for _ in range(e[v]):
                    term = term * pts[:, v] % p
            val = (val + term) % p
        alive &= val == 0
    return [tuple(int(x) for x in pt) for pt in pts[alive]]
