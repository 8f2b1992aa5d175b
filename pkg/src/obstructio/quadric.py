"""The quadric threefold, its spinor matrix factorization, and maps between
presented sheaves on it.

A sheaf is presented as the cokernel of a matrix R of forms between graded
free modules: a generator of degree g stands for a summand O(-g).  O(k) is
presented by the 1x1 matrix (q) and S(k) by the 4x4 Clifford matrix Gamma,
with generators in degree 1 - k.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from . import gfp
from .groebner import Ideal, buchberger, macaulay_matrix, normal_form
from .polyring import GradedBasis, Polynomial, Ring, from_vector, poly_arrays, to_vector


# --- matrices of polynomials -------------------------------------------------


def mat_mul(A, B, ring: Ring):
    n, k, m = len(A), len(B), len(B[0]) if B else 0
    out = [[ring.zero] * m for _ in range(n)]
    for i in range(n):
        for j in range(m):
            acc: dict = {}
            for t in range(k):
                a, b = A[i][t], B[t][j]
                if a.terms and b.terms:
                    for ma, ca in a.terms:
                        for mb, cb in b.terms:
                            mm = tuple(x + y for x, y in zip(ma, mb))
                            acc[mm] = acc.get(mm, 0) + ca * cb
            out[i][j] = ring.from_dict(acc)
    return out


def mat_add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_scale(A, c: int):
    return [[a.scale(c) for a in row] for row in A]


def transpose(A):
    return [list(col) for col in zip(*A)] if A else []


def const_matrix(M, ring: Ring):
    return [[ring.const(int(x)) for x in row] for row in np.asarray(M)]


def identity(n: int, ring: Ring, scale=None):
    s = ring.one if scale is None else scale
    return [[s if i == j else ring.zero for j in range(n)] for i in range(n)]


def is_zero_matrix(A) -> bool:
    return all(a.is_zero() for row in A for a in row)


def evaluate_matrix(A, point, p: int) -> np.ndarray:
    return np.array([[a(point) for a in row] for row in A], dtype=np.int64) % p


def divide_exact(f: Polynomial, g: Polynomial) -> Polynomial:
    """f / g, raising if g does not divide f."""
    ring = f.ring
    inv = ring.field.inv(g.lc)
    quot: dict = {}
    r = f
    while r.terms:
        m, c = r.terms[0]
        u = tuple(x - y for x, y in zip(m, g.lm))
        if min(u) < 0:
            raise ArithmeticError("division is not exact")
        coeff = c * inv % ring.p
        quot[u] = coeff
        r = r - g.mul_term(u, coeff)
    return ring.from_dict(quot)


def det_poly(A, ring: Ring) -> Polynomial:
    """Determinant by cofactor expansion (small matrices only)."""
    n = len(A)
    if n == 0:
        return ring.one
    if n == 1:
        return A[0][0]
    total = ring.zero
    for j in range(n):
        if A[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1 :] for row in A[1:]]
        term = A[0][j] * det_poly(minor, ring)
        total = total + (term if j % 2 == 0 else -term)
    return total


# --- the quadric -------------------------------------------------------------


@dataclass
class QuadricContext:
    ring: Ring
    q: Polynomial
    gram: np.ndarray

    @property
    def p(self):
        return self.ring.p

    _gb = None

    def gb(self):
        if self._gb is None:
            self._gb = buchberger(Ideal([self.q], self.ring))
        return self._gb


def standard_quadric(F=None) -> QuadricContext:
    """q = z0*z1 + z2*z3 + z4^2 with its symmetric Gram matrix."""
    ring = F if isinstance(F, Ring) else Ring(F if F is not None else gfp.DEFAULT_PRIME)
    z = ring.gens()
    q = z[0] * z[1] + z[2] * z[3] + z[4] ** 2
    p = ring.p
    half = ring.field.half()
    gram = np.zeros((5, 5), dtype=np.int64)
    gram[0, 1] = gram[1, 0] = half
    gram[2, 3] = gram[3, 2] = half
    gram[4, 4] = 1
    if gfp.rank(gram, p) != 5:
        raise ValueError("quadric is singular")
    return QuadricContext(ring, q, gram)


def quadric_value(ctx: QuadricContext, point) -> int:
    v = np.asarray(point, dtype=np.int64) % ctx.p
    return int(gfp.matmul(v.reshape(1, -1), gfp.matmul(ctx.gram, v.reshape(-1, 1), ctx.p), ctx.p)[0, 0])


@dataclass
class MatrixFactorization:
    A: list
    B: list
    det_scalar: int


def clifford_generators(p: int):
    """Five 4x4 matrices with g_i g_j + g_j g_i = 2 b(e_i, e_j), b the polar form of q.

    Each hyperbolic plane contributes the raising/lowering pair on F^2; the
    grading operator sigma keeps the two planes anticommuting and squares to
    one, so it serves for z4.
    """
    up = np.array([[0, 1], [0, 0]])
    down = np.array([[0, 0], [1, 0]])
    sigma = np.array([[1, 0], [0, -1]])
    one = np.eye(2, dtype=np.int64)
    gens = [np.kron(up, one), np.kron(down, one), np.kron(sigma, up), np.kron(sigma, down), np.kron(sigma, sigma)]
    return [g % p for g in gens]


def gamma_matrix(ring: Ring):
    """Gamma(z) = sum z_i g_i, a 4x4 matrix of linear forms with Gamma^2 = q I."""
    gens = clifford_generators(ring.p)
    out = []
    for r in range(4):
        row = []
        for c in range(4):
            row.append(ring.from_dict({ring.var(i).lm: int(gens[i][r, c]) for i in range(5)}))
        out.append(row)
    return out


def clifford_mf(ctx: QuadricContext) -> MatrixFactorization:
    """(A, B) with A B = B A = q I_4; here both factors equal Gamma(z)."""
    ring = ctx.ring
    G = gamma_matrix(ring)
    target = identity(4, ring, ctx.q)
    if mat_mul(G, G, ring) != target:
        raise RuntimeError("Clifford relations failed")
    d = det_poly(G, ring)
    q2 = ctx.q * ctx.q
    scalar = d.lc * ring.field.inv(q2.lc) % ring.p
    if d != q2.scale(scalar):
        raise RuntimeError("determinant is not a multiple of q^2")
    return MatrixFactorization(G, [row[:] for row in G], scalar)


# --- sheaf symbols and presentations -------------------------------------------


@dataclass(frozen=True)
class Atom:
    kind: str  # "O", "S" or "SS" (the last only for cohomology)
    twist: int

    def __post_init__(self):
        if self.kind not in ("O", "S", "SS"):
            raise ValueError(f"unsupported atom kind {self.kind!r}")

    def __str__(self):
        return {"O": "O", "S": "S", "SS": "S(x)S"}[self.kind] + f"({self.twist})"

    @property
    def rank(self):
        return {"O": 1, "S": 2, "SS": 4}[self.kind]

    def dual(self, shift: int = 0) -> "Atom":
        """Atom of (self)^dual(shift), using S^dual = S(1)."""
        if self.kind == "O":
            return Atom("O", shift - self.twist)
        if self.kind == "S":
            return Atom("S", 1 - self.twist + shift)
        raise ValueError("no dual for %s" % self.kind)


@dataclass(frozen=True)
class SheafSymbol:
    atoms: tuple

    @property
    def rank(self):
        return sum(a.rank for a in self.atoms)

    def dual(self, shift: int = 0) -> "SheafSymbol":
        return SheafSymbol(tuple(a.dual(shift) for a in self.atoms))

    def __str__(self):
        return " + ".join(str(a) for a in self.atoms)


def symbol(*atoms) -> SheafSymbol:
    return SheafSymbol(tuple(Atom(k, t) for k, t in atoms))


@dataclass
class PresentedSheaf:
    """coker(R : sum O(-r_j) -> sum O(-g_i)) with block structure by atom."""

    gen_degrees: list
    rel_degrees: list
    R: list
    symbol: SheafSymbol
    ring: Ring
    gen_blocks: list = field(default_factory=list)
    rel_blocks: list = field(default_factory=list)

    @property
    def ngens(self):
        return len(self.gen_degrees)

    @property
    def nrels(self):
        return len(self.rel_degrees)


def presentation(atom: Atom, ctx: QuadricContext) -> PresentedSheaf:
    ring = ctx.ring
    k = atom.twist
    if abs(k) > 8:
        raise ValueError("twist out of range")
    if atom.kind == "O":
        return PresentedSheaf([-k], [2 - k], [[ctx.q]], SheafSymbol((atom,)), ring, [(0, 1)], [(0, 1)])
    if atom.kind == "S":
        G = gamma_matrix(ring)
        return PresentedSheaf([1 - k] * 4, [2 - k] * 4, G, SheafSymbol((atom,)), ring, [(0, 4)], [(0, 4)])
    raise ValueError("cannot present %s" % atom)


def direct_sum(parts, ring: Ring) -> PresentedSheaf:
    gens, rels, atoms, gb, rb = [], [], [], [], []
    for P in parts:
        gb.append((len(gens), len(gens) + P.ngens))
        rb.append((len(rels), len(rels) + P.nrels))
        gens += P.gen_degrees
        rels += P.rel_degrees
        atoms += list(P.symbol.atoms)
    R = [[ring.zero] * len(rels) for _ in gens]
    for P, (g0, _), (r0, _) in zip(parts, gb, rb):
        for i in range(P.ngens):
            for j in range(P.nrels):
                R[g0 + i][r0 + j] = P.R[i][j]
    return PresentedSheaf(gens, rels, R, SheafSymbol(tuple(atoms)), ring, gb, rb)


def present(sym: SheafSymbol, ctx: QuadricContext) -> PresentedSheaf:
    return direct_sum([presentation(a, ctx) for a in sym.atoms], ctx.ring)


def module_matrix(M, row_degrees, col_degrees, n: int) -> np.ndarray:
    """Degree-n Macaulay matrix of the column span of M inside sum R(-row_deg)."""
    offsets = [0]
    for d in row_degrees:
        offsets.append(offsets[-1] + (GradedBasis(n - d).size if n - d >= 0 else 0))
    width = offsets[-1]
    blocks = []
    for j, cd in enumerate(col_degrees):
        e = n - cd
        if e < 0:
            continue
        src = GradedBasis(e)
        block = np.zeros((src.size, width), dtype=np.int64)
        for i, rd in enumerate(row_degrees):
            f = M[i][j]
            if f.is_zero():
                continue
            target = GradedBasis(n - rd)
            exps, coeffs = poly_arrays(f)
            idx = target.lookup(src.exps[:, None, :] + exps[None, :, :]) + offsets[i]
            rows = np.repeat(np.arange(src.size), len(coeffs))
            np.add.at(block, (rows, idx.ravel()), np.tile(coeffs, src.size))
        blocks.append(block)
    if not blocks:
        return np.zeros((0, width), dtype=np.int64)
    return np.vstack(blocks)


def cokernel_dim(M, row_degrees, col_degrees, n: int, p: int) -> int:
    width = sum(GradedBasis(n - d).size for d in row_degrees if n - d >= 0)
    mat = module_matrix(M, row_degrees, col_degrees, n)
    return width - (gfp.rank(mat, p) if mat.shape[0] else 0)


def hilbert_function(P: PresentedSheaf, n: int) -> int:
    return cokernel_dim(P.R, P.gen_degrees, P.rel_degrees, n, P.ring.p)


# --- maps between presented sheaves ------------------------------------------------


@dataclass
class SheafMapMatrix:
    """U on generators and V on relations with U R_src = R_tgt V."""

    U: list
    V: list
    source: PresentedSheaf
    target: PresentedSheaf

    def descends(self) -> bool:
        ring = self.source.ring
        lhs = mat_mul(self.U, self.source.R, ring)
        rhs = mat_mul(self.target.R, self.V, ring)
        return lhs == rhs

    def __add__(self, other):
        return SheafMapMatrix(mat_add(self.U, other.U), mat_add(self.V, other.V), self.source, self.target)

    def scale(self, c: int):
        return SheafMapMatrix(mat_scale(self.U, c), mat_scale(self.V, c), self.source, self.target)


class _Layout:
    """Coordinates for matrices of forms with prescribed entry degrees."""

    def __init__(self, degs):
        self.degs = degs
        self.slots = []
        pos = 0
        for i, row in enumerate(degs):
            for j, d in enumerate(row):
                if d >= 0:
                    n = GradedBasis(d).size
                    self.slots.append((i, j, d, pos))
                    pos += n
        self.size = pos

    def to_vector(self, A) -> np.ndarray:
        v = np.zeros(self.size, dtype=np.int64)
        for i, j, d, pos in self.slots:
            f = A[i][j]
            if f.terms:
                v[pos : pos + GradedBasis(d).size] = to_vector(f, d)
        for i, row in enumerate(self.degs):
            for j, d in enumerate(row):
                if d < 0 and not A[i][j].is_zero():
                    raise ValueError("entry of negative degree is nonzero")
        return v

    def from_vector(self, v, ring: Ring):
        rows, cols = len(self.degs), len(self.degs[0]) if self.degs else 0
        A = [[ring.zero] * cols for _ in range(rows)]
        for i, j, d, pos in self.slots:
            A[i][j] = from_vector(v[pos : pos + GradedBasis(d).size], d, ring)
        return A


def _mult_columns(layout: _Layout, fixed, fixed_on_right: bool, out_degs):
    """Matrix of the linear map X -> X*fixed or fixed*X in coordinates.

    Rows index output coefficients (layout for out_degs), columns index the
    unknown coefficients of X.
    """
    out = _Layout(out_degs)
    mat = np.zeros((out.size, layout.size), dtype=np.int64)
    out_pos = {(i, j): (d, pos) for i, j, d, pos in out.slots}
    for i, j, d, pos in layout.slots:
        basis = GradedBasis(d)
        if fixed_on_right:
            # X[i][j] * fixed[j][c] contributes to out[i][c]
            targets = [(i, c, fixed[j][c]) for c in range(len(fixed[0]))]
        else:
            # fixed[r][i] * X[i][j] contributes to out[r][j]
            targets = [(r, j, fixed[r][i]) for r in range(len(fixed))]
        for oi, oj, f in targets:
            if f.is_zero():
                continue
            od, opos = out_pos[(oi, oj)]
            exps, coeffs = poly_arrays(f)
            tb = GradedBasis(od)
            idx = tb.lookup(basis.exps[:, None, :] + exps[None, :, :]) + opos
            cols = np.repeat(np.arange(basis.size) + pos, len(coeffs))
            np.add.at(mat, (idx.ravel(), cols), np.tile(coeffs, basis.size))
    return mat, out


class HomSpace:
    """Hom(src, tgt) as graded-module maps modulo null-homotopies."""

    def __init__(self, src: PresentedSheaf, tgt: PresentedSheaf):
        ring = src.ring
        p = ring.p
        self.src, self.tgt, self.ring = src, tgt, ring
        u_degs = [[s - t for s in src.gen_degrees] for t in tgt.gen_degrees]
        v_degs = [[s - t for s in src.rel_degrees] for t in tgt.rel_degrees]
        w_degs = [[s - t for s in src.gen_degrees] for t in tgt.rel_degrees]
        out_degs = [[s - t for s in src.rel_degrees] for t in tgt.gen_degrees]
        self.u_layout, self.v_layout, self.w_layout = _Layout(u_degs), _Layout(v_degs), _Layout(w_degs)
        nu = self.u_layout.size
        # U R_src - R_tgt V = 0
        left, _ = _mult_columns(self.u_layout, src.R, True, out_degs)
        right, _ = _mult_columns(self.v_layout, tgt.R, False, out_degs)
        system = np.concatenate([left, (-right) % p], axis=1) % p
        sol = gfp.kernel(system, p) if system.shape[1] else np.zeros((0, 0), dtype=np.int64)
        # null-homotopies (U, V) = (R_tgt W, W R_src)
        hu, _ = _mult_columns(self.w_layout, tgt.R, False, u_degs)
        hv, _ = _mult_columns(self.w_layout, src.R, True, v_degs)
        homot = np.concatenate([hu, hv], axis=0).T % p
        self.H, self.hpiv = gfp.echelon(homot, p, full=True) if homot.size else (homot, np.zeros(0, dtype=np.int64))
        if np.any(self.hpiv >= nu):
            raise RuntimeError("homotopy with vanishing generator part")
        reduced = gfp.reduce_rows(sol, self.H, self.hpiv, p) if len(sol) else sol
        self.B, self.bpiv = gfp.echelon(reduced, p, full=True) if len(reduced) else (reduced, np.zeros(0, dtype=np.int64))
        if np.any(self.bpiv >= nu):
            raise RuntimeError("hom space element with vanishing generator part")
        self.nu = nu

    @property
    def dim(self) -> int:
        return len(self.B)

    def element(self, coeffs) -> SheafMapMatrix:
        v = gfp.matmul(np.asarray(coeffs, dtype=np.int64).reshape(1, -1), self.B, self.ring.p).ravel() if self.dim else np.zeros(self.nu + self.v_layout.size, dtype=np.int64)
        return self._from_full(v)

    def _from_full(self, v) -> SheafMapMatrix:
        U = self.u_layout.from_vector(v[: self.nu], self.ring)
        V = self.v_layout.from_vector(v[self.nu :], self.ring)
        return SheafMapMatrix(U, V, self.src, self.tgt)

    def basis(self):
        return [self._from_full(row) for row in self.B]

    def full_vector(self, phi: SheafMapMatrix) -> np.ndarray:
        return np.concatenate([self.u_layout.to_vector(phi.U), self.v_layout.to_vector(phi.V)])

    def coordinates(self, phi: SheafMapMatrix) -> np.ndarray:
        """Coordinates of phi modulo null-homotopies in the chosen basis."""
        p = self.ring.p
        v = gfp.reduce_rows(self.full_vector(phi).reshape(1, -1), self.H, self.hpiv, p)
        c = v[0, self.bpiv].copy()
        residual = (v[0] - gfp.matmul(c.reshape(1, -1), self.B, p).ravel()) % p if self.dim else v[0]
        if np.any(residual):
            raise ValueError("map does not descend to the cokernels")
        return c

    def random_element(self, rng: random.Random) -> SheafMapMatrix:
        return self.element([rng.randrange(self.ring.p) for _ in range(self.dim)])


def hom_space(src: PresentedSheaf, tgt: PresentedSheaf):
    """Basis of Hom(src, tgt) modulo null-homotopies."""
    return HomSpace(src, tgt).basis()


# --- duality ---------------------------------------------------------------------


@dataclass
class DualityData:
    """Constant Z, W with Z Gamma = Gamma^T W.

    Z identifies coker(Gamma) with the dual presentation coker(Gamma^T) on
    generators.  Z is scaled so that its first nonzero entry is 1; W then
    equals sign * Z^T, and ``sign`` is an invariant of the form.
    """

    Z: np.ndarray
    W: np.ndarray
    sign: int
    p: int

    @property
    def Winv_T(self):
        return gfp.inverse(self.W, self.p).T.copy()


def spinor_duality(ctx: QuadricContext) -> DualityData:
    p = ctx.p
    gens = clifford_generators(p)
    # unknowns: Z (16) then W (16); equations Z g_i - g_i^T W = 0 for each i
    rows = []
    for g in gens:
        for r in range(4):
            for c in range(4):
                eq = np.zeros(32, dtype=np.int64)
                for k in range(4):
                    eq[r * 4 + k] += g[k, c]  # Z[r,k] g[k,c]
                    eq[16 + k * 4 + c] -= g[k, r]  # (g^T)[r,k] W[k,c]
                rows.append(eq)
    ker = gfp.kernel(np.array(rows) % p, p)
    if len(ker) != 1:
        raise RuntimeError("spinor duality is not unique up to scalar")
    v = ker[0]
    first = v[np.nonzero(v[:16])[0][0]]
    v = v * pow(int(first), -1, p) % p
    Z, W = v[:16].reshape(4, 4), v[16:].reshape(4, 4)
    if np.array_equal(W, Z.T % p):
        sign = 1
    elif np.array_equal(W, (-Z.T) % p):
        sign = -1
    else:
        raise RuntimeError("duality intertwiner is neither symmetric nor alternating")
    return DualityData(Z, W, sign, p)


def _atom_duality(atom: Atom, D: DualityData):
    if atom.kind == "O":
        return np.ones((1, 1), dtype=np.int64), np.ones((1, 1), dtype=np.int64)
    return D.Z, D.Winv_T


def adjoint(phi: SheafMapMatrix, D: DualityData) -> SheafMapMatrix:
    """The map induced by dualising phi : E^dual(-k) -> E and twisting back.

    Block (i, j) of the result is W_i^{-T} V_ji^T Z_j, where (Z, W)
    identify each source atom with the dual of the matching target atom
    (both are 1 for line bundles, so these blocks are transposes).
    """
    src, tgt = phi.source, phi.target
    ring = src.ring
    p = ring.p
    if len(src.gen_blocks) != len(tgt.gen_blocks):
        raise ValueError("source and target have different block structure")
    n, m = tgt.ngens, src.ngens
    U = [[ring.zero] * m for _ in range(n)]
    for i, (ti0, ti1) in enumerate(tgt.gen_blocks):
        for j, (sj0, sj1) in enumerate(src.gen_blocks):
            # V block from source relations of atom i to target relations of atom j
            ri0, ri1 = src.rel_blocks[i]
            rj0, rj1 = tgt.rel_blocks[j]
            Vji = [row[ri0:ri1] for row in phi.V[rj0:rj1]]
            _, WinvT_i = _atom_duality(tgt.symbol.atoms[i], D)
            Zj, _ = _atom_duality(tgt.symbol.atoms[j], D)
            block = mat_mul(mat_mul(const_matrix(WinvT_i, ring), transpose(Vji), ring), const_matrix(Zj, ring), ring)
            for a in range(ti1 - ti0):
                for b in range(sj1 - sj0):
                    U[ti0 + a][sj0 + b] = block[a][b]
    return SheafMapMatrix(U, lift_relations(U, src, tgt), src, tgt)


def lift_relations(U, src: PresentedSheaf, tgt: PresentedSheaf):
    """The unique V with U R_src = R_tgt V (R_tgt is block diagonal, invertible off Q)."""
    ring = src.ring
    UR = mat_mul(U, src.R, ring)
    V = [[ring.zero] * src.nrels for _ in range(tgt.nrels)]
    for (g0, g1), (r0, r1), atom in zip(tgt.gen_blocks, tgt.rel_blocks, tgt.symbol.atoms):
        block = [row for row in UR[g0:g1]]
        if atom.kind == "O":
            sol = [[divide_exact(f, tgt.R[g0][r0]) if f.terms else ring.zero for f in block[0]]]
        else:
            # Gamma^{-1} = Gamma / q
            G = [row[r0:r1] for row in tgt.R[g0:g1]]
            prod = mat_mul(G, block, ring)
            q = mat_mul(G, G, ring)[0][0]
            sol = [[divide_exact(f, q) if f.terms else ring.zero for f in row] for row in prod]
        for a, row in enumerate(sol):
            V[r0 + a] = row
    return V


def symmetrize(phi: SheafMapMatrix, D: DualityData) -> SheafMapMatrix:
    """(phi + phi^dagger) / 2."""
    half = phi.source.ring.field.half()
    return (phi + adjoint(phi, D)).scale(half)


def is_symmetric(phi: SheafMapMatrix, D: DualityData) -> bool:
    psi = adjoint(phi, D)
    return psi.U == phi.U and psi.V == phi.V
