"""Barth's construction: symmetric sections Phi : E^dual(-4-delta) -> E on the
quadric, the quartic surface det(Phi) = 0 and the even set where the
cokernel has rank two.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

import numpy as np

from . import gfp
from .groebner import (
    GroebnerBasis,
    HilbertData,
    Ideal,
    buchberger,
    hilbert,
    minors_ideal,
    normal_form,
    saturate_irrelevant,
)
from .polyring import Polynomial, from_vector, multiples_matrix, parse_poly, random_form
from .quadric import (
    HomSpace,
    QuadricContext,
    SheafMapMatrix,
    SheafSymbol,
    adjoint,
    cokernel_dim,
    det_poly,
    is_symmetric,
    lift_relations,
    present,
    spinor_duality,
    standard_quadric,
    symbol,
    symmetrize,
    transpose,
)


class DegenerateSection(RuntimeError):
    """The sampled section fails a genericity check; resample."""


@dataclass(frozen=True)
class FamilySpec:
    tag: str
    delta: int
    bundle: SheafSymbol
    expected_nodes: int
    expected_defect: int

    @property
    def source(self) -> SheafSymbol:
        return self.bundle.dual(-4 - self.delta)

    @property
    def line_bundles(self) -> bool:
        return all(a.kind == "O" for a in self.bundle.atoms)

    @property
    def entry_degrees(self):
        """Degrees of Phi's entries for sums of line bundles."""
        a = [-x.twist for x in self.bundle.atoms]
        return [[4 + self.delta - ai - aj for aj in a] for ai in a]


FAMILIES = {
    "E1": FamilySpec("E1", 0, symbol(("O", -1), ("O", -1), ("O", -2)), 16, 1),
    "E2": FamilySpec("E2", 0, symbol(("O", -1), ("S", -1)), 20, 0),
    "E3": FamilySpec("E3", 0, symbol(("S", -1), ("S", -1)), 24, 0),
    "O1": FamilySpec("O1", 1, symbol(("O", -1), ("O", -2)), 12, 1),
    "O2": FamilySpec("O2", 1, symbol(*[("O", -2)] * 4), 20, 0),
    "O3": FamilySpec("O3", 1, symbol(("S", -1)), 20, 1),
}


def family(tag: str) -> FamilySpec:
    try:
        return FAMILIES[tag]
    except KeyError:
        raise ValueError(f"unknown family {tag!r}") from None


@dataclass
class SymmetricSpace:
    """Hom(E^dual(-k), E) with the subspace fixed by the adjoint."""

    hom: HomSpace
    basis: np.ndarray  # rows: Hom coordinates of a basis of the fixed space

    @property
    def dim(self) -> int:
        return len(self.basis)


_SYM_CACHE: dict = {}


def symmetric_space(fam: FamilySpec, ctx: QuadricContext) -> SymmetricSpace:
    key = (fam.tag, ctx.p)
    if key in _SYM_CACHE:
        return _SYM_CACHE[key]
    p = ctx.p
    D = spinor_duality(ctx)
    H = HomSpace(present(fam.source, ctx), present(fam.bundle, ctx))
    T = np.array([H.coordinates(adjoint(b, D)) for b in H.basis()], dtype=np.int64)
    # c T = c  <=>  (T - I)^t c^t = 0
    A = (T - np.eye(H.dim, dtype=np.int64)) % p
    basis = gfp.kernel(np.ascontiguousarray(A.T), p)
    _SYM_CACHE[key] = SymmetricSpace(H, basis)
    return _SYM_CACHE[key]


@dataclass
class BarthSection:
    family: FamilySpec
    phi: SheafMapMatrix
    p: int
    seed: int
    coefficients: list = field(default_factory=list)

    def to_json(self) -> str:
        record = {
            "family": self.family.tag,
            "p": self.p,
            "seed": self.seed,
            "blocks": [[str(f) for f in row] for row in self.phi.U],
        }
        return json.dumps(record, sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str, ctx: QuadricContext | None = None) -> "BarthSection":
        record = json.loads(text)
        fam = family(record["family"])
        ctx = ctx or standard_quadric(record["p"])
        if ctx.p != record["p"]:
            raise ValueError("prime mismatch")
        U = [[parse_poly(s, ctx.ring) for s in row] for row in record["blocks"]]
        src, tgt = present(fam.source, ctx), present(fam.bundle, ctx)
        phi = SheafMapMatrix(U, lift_relations(U, src, tgt), src, tgt)
        return cls(fam, phi, ctx.p, record["seed"])


def sample_section(fam: FamilySpec, ctx: QuadricContext, seed: int) -> BarthSection:
    """Random symmetric section, deterministic in (p, seed)."""
    ring = ctx.ring
    rng = random.Random(seed)
    src, tgt = present(fam.source, ctx), present(fam.bundle, ctx)
    if fam.line_bundles:
        degs = fam.entry_degrees
        n = len(degs)
        U = [[ring.zero] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                U[i][j] = U[j][i] = random_form(degs[i][j], ring, rng)
        return BarthSection(fam, SheafMapMatrix(U, lift_relations(U, src, tgt), src, tgt), ctx.p, seed)
    space = symmetric_space(fam, ctx)
    coeffs = [rng.randrange(ctx.p) for _ in range(space.dim)]
    c = gfp.matmul(np.array([coeffs], dtype=np.int64), space.basis, ctx.p).ravel()
    phi = symmetrize(space.hom.element(c), spinor_duality(ctx))
    return BarthSection(fam, phi, ctx.p, seed, coeffs)


@dataclass
class SurfacePresentation:
    section: BarthSection
    P: list
    row_degrees: list
    col_degrees: list
    f: Polynomial | None = None

    @property
    def generators(self) -> int:
        return len(self.row_degrees)

    @property
    def shape(self):
        return (len(self.P), len(self.P[0]))

    def hilbert_function(self, n: int) -> int:
        return cokernel_dim(self.P, self.row_degrees, self.col_degrees, n, self.section.p)


def assemble_presentation(section: BarthSection) -> SurfacePresentation:
    """coker[R_E | Phi] presents the cokernel sheaf of Phi."""
    phi = section.phi
    tgt, src = phi.target, phi.source
    P = [list(r) + list(u) for r, u in zip(tgt.R, phi.U)]
    return SurfacePresentation(section, P, list(tgt.gen_degrees), list(tgt.rel_degrees) + list(src.gen_degrees))


def _canonical(f: Polynomial, ctx: QuadricContext) -> Polynomial:
    g = normal_form(f, ctx.gb())
    if g.is_zero():
        raise DegenerateSection("quartic lies in (q)")
    return g.monic()


def quartic_from_minors(pres: SurfacePresentation, ctx: QuadricContext, seed: int = 0) -> Polynomial:
    """The quartic modulo q cut out by the maximal minors of the presentation."""
    I = minors_ideal(pres.P, pres.generators, seed=seed, extra=(ctx.q,))
    _, sat = saturate_irrelevant(I + Ideal([ctx.q], ctx.ring), seed, zero_dimensional=False)
    if sat.top < 4:
        raise DegenerateSection("saturation too short")
    E, _ = sat.pieces[4]
    Q, qpiv = gfp.echelon(multiples_matrix(ctx.q, 4), ctx.p)
    rest = gfp.reduce_rows(E, Q, qpiv, ctx.p)
    R, _ = gfp.echelon(rest, ctx.p) if len(rest) else (rest, None)
    if len(R) != 1:
        raise DegenerateSection(f"{len(R)} quartics modulo q in the determinantal ideal")
    return _canonical(from_vector(R[0], 4, ctx.ring), ctx)


def extract_quartic(pres: SurfacePresentation, ctx: QuadricContext, seed: int = 0) -> Polynomial:
    if pres.section.family.line_bundles:
        f = _canonical(det_poly(pres.section.phi.U, ctx.ring), ctx)
    else:
        f = quartic_from_minors(pres, ctx, seed)
    if f.homogeneous_degree() != 4:
        raise DegenerateSection("determinant is not a quartic")
    pres.f = f
    return f


@dataclass
class EvenSet:
    ideal: Ideal
    gb: GroebnerBasis
    hilbert: HilbertData

    @property
    def degree(self) -> int:
        return self.hilbert.degree

    @property
    def dimension(self) -> int:
        return self.hilbert.dimension


def even_set_ideal(pres: SurfacePresentation, ctx: QuadricContext, seed: int = 0, stream_info=None) -> EvenSet:
    """Saturated ideal of the locus where the cokernel needs two generators."""
    fam = pres.section.family
    q = Ideal([ctx.q], ctx.ring)
    if fam.line_bundles:
        M, k = pres.section.phi.U, len(pres.section.phi.U) - 1
    else:
        M, k = pres.P, pres.generators - 1
    I = minors_ideal(M, k, seed=seed, extra=(ctx.q,), stream_info=stream_info) + q
    try:
        G, _ = saturate_irrelevant(I, seed)
    except RuntimeError as exc:
        raise DegenerateSection("even set is not zero-dimensional") from exc
    H = hilbert(G)
    if H.dimension != 0:
        raise DegenerateSection("even set is not zero-dimensional")
    return EvenSet(Ideal(list(G.elements), ctx.ring), G, H)


def section_from_matrix(fam: FamilySpec, U, ctx: QuadricContext, seed: int = 0) -> BarthSection:
    """Wrap a hand-built matrix Phi (line-bundle families or explicit U)."""
    src, tgt = present(fam.source, ctx), present(fam.bundle, ctx)
    return BarthSection(fam, SheafMapMatrix(U, lift_relations(U, src, tgt), src, tgt), ctx.p, seed)


def is_symmetric_section(section: BarthSection) -> bool:
    if section.family.line_bundles:
        return section.phi.U == transpose(section.phi.U)
    return is_symmetric(section.phi, spinor_duality(standard_quadric(section.phi.source.ring)))
