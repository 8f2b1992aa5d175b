import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from obstructio import gfp
from obstructio.cohomology import cohom
from obstructio.groebner import Ideal, buchberger, normal_form
from obstructio.quadric import (
    Atom,
    HomSpace,
    SheafSymbol,
    adjoint,
    clifford_mf,
    det_poly,
    evaluate_matrix,
    hilbert_function,
    identity,
    is_symmetric,
    mat_mul,
    module_matrix,
    present,
    presentation,
    quadric_value,
    spinor_duality,
    standard_quadric,
    symbol,
    symmetrize,
    transpose,
)

S = lambda k: Atom("S", k)
O = lambda k: Atom("O", k)


def test_small_prime_quadric_is_smooth():
    ctx = standard_quadric(7)
    assert gfp.rank(ctx.gram, 7) == 5


def test_gram_matrix_reproduces_q(ctx):
    rng = random.Random(0)
    for _ in range(5):
        pt = [rng.randrange(ctx.p) for _ in range(5)]
        assert quadric_value(ctx, pt) == ctx.q(pt)


def test_points_on_and_off(ctx):
    assert ctx.q((1, 0, 0, 0, 0)) == 0
    assert ctx.q((1, 1, 0, 0, 0)) == 1


def test_clifford_factorization(ctx):
    mf = clifford_mf(ctx)
    target = identity(4, ctx.ring, ctx.q)
    assert mat_mul(mf.A, mf.B, ctx.ring) == target
    assert mat_mul(mf.B, mf.A, ctx.ring) == target


def test_clifford_determinant(ctx):
    mf = clifford_mf(ctx)
    d = det_poly(mf.A, ctx.ring)
    q2 = ctx.q * ctx.q
    assert normal_form(d, buchberger(Ideal([q2], ctx.ring))).is_zero()
    assert d == q2.scale(mf.det_scalar)


def test_rank_on_quadric(ctx):
    mf = clifford_mf(ctx)
    assert gfp.rank(evaluate_matrix(mf.A, (1, 0, 0, 0, 0), ctx.p), ctx.p) == 2


@given(st.integers(0, 10**6))
def test_rank_two_at_random_points_of_q(seed):
    ctx = standard_quadric(31991)
    rng = random.Random(seed)
    # points with z0 = 1: solve z1 = -(z2 z3 + z4^2)
    z2, z3, z4 = (rng.randrange(ctx.p) for _ in range(3))
    pt = (1, (-(z2 * z3 + z4 * z4)) % ctx.p, z2, z3, z4)
    assert ctx.q(pt) == 0
    A = clifford_mf(ctx).A
    assert gfp.rank(evaluate_matrix(A, pt, ctx.p), ctx.p) == 2


def test_spinor_presentation_values(ctx):
    P = presentation(S(0), ctx)
    assert hilbert_function(P, 1) == 4
    assert hilbert_function(P, 0) == 0
    assert hilbert_function(presentation(O(-2), ctx), 2) == 1


@pytest.mark.parametrize("atom", [O(0), O(-1), O(2), S(0), S(-1), S(1)])
def test_presentations_match_cohomology(ctx, atom):
    P = presentation(atom, ctx)
    for n in range(-2, 7):
        assert hilbert_function(P, n) == cohom(SheafSymbol((atom,)), n).h[0]


def test_q_kills_generators(ctx):
    P = present(symbol(("O", -1), ("S", -1)), ctx)
    zero = ctx.ring.zero
    for i in range(P.ngens):
        # q e_i lives in degree gen_degree + 2 and must lie in the relation span
        n = P.gen_degrees[i] + 2
        M = module_matrix(P.R, P.gen_degrees, P.rel_degrees, n)
        v = module_matrix([[ctx.q if r == i else zero] for r in range(P.ngens)], P.gen_degrees, [n], n)
        assert gfp.rank(np.vstack([M, v]), ctx.p) == gfp.rank(M, ctx.p)


@pytest.mark.parametrize(
    "src, tgt, dim",
    [(S(-2), S(-1), 15), (O(-3), S(-1), 16), (S(-3), S(-1), 49)],
)
def test_hom_dimensions(ctx, src, tgt, dim):
    H = HomSpace(presentation(src, ctx), presentation(tgt, ctx))
    assert H.dim == dim


@pytest.mark.parametrize(
    "src, tgt",
    [(O(-3), O(-1)), (S(-2), O(-1)), (O(-3), S(-1)), (S(-2), S(-1)), (S(-3), S(-1))],
)
def test_hom_dimension_is_h0_of_hom_sheaf(ctx, src, tgt):
    H = HomSpace(presentation(src, ctx), presentation(tgt, ctx))
    # Hom(A, B) = H^0(A^dual (x) B)
    dual = src.dual()
    kinds = {("O", "O"): "O", ("O", "S"): "S", ("S", "O"): "S", ("S", "S"): "SS"}
    sheaf = Atom(kinds[(dual.kind, tgt.kind)], dual.twist + tgt.twist)
    assert H.dim == cohom(SheafSymbol((sheaf,)), 0).h[0]


def test_hom_elements_descend(ctx):
    H = HomSpace(presentation(S(-3), ctx), presentation(S(-1), ctx))
    assert all(phi.descends() for phi in H.basis()[:10])


def test_duality_is_an_involution(ctx):
    D = spinor_duality(ctx)
    H = HomSpace(presentation(S(-3), ctx), presentation(S(-1), ctx))
    phi = H.random_element(random.Random(3))
    twice = adjoint(adjoint(phi, D), D)
    assert twice.U == phi.U and twice.V == phi.V


def test_duality_sign_recorded(ctx):
    D = spinor_duality(ctx)
    assert D.sign in (1, -1)
    assert np.array_equal(D.W, (D.sign * D.Z.T) % ctx.p)


@given(st.integers(0, 10**6))
def test_symmetrize_is_a_projection(seed):
    ctx = standard_quadric(31991)
    D = spinor_duality(ctx)
    H = HomSpace(present(symbol(("S", -2)), ctx), present(symbol(("S", -1)), ctx))
    phi = symmetrize(H.random_element(random.Random(seed)), D)
    assert is_symmetric(phi, D)
    again = symmetrize(phi, D)
    assert again.U == phi.U


def test_line_bundle_symmetrize_is_transpose_average(ctx):
    from obstructio.polyring import random_form

    rng = random.Random(1)
    src = present(symbol(("O", -3), ("O", -3)), ctx)
    tgt = present(symbol(("O", -2), ("O", -2)), ctx)
    U = [[random_form(1, ctx.ring, rng) for _ in range(2)] for _ in range(2)]
    from obstructio.quadric import SheafMapMatrix, lift_relations

    phi = SheafMapMatrix(U, lift_relations(U, src, tgt), src, tgt)
    sym = symmetrize(phi, spinor_duality(ctx))
    half = ctx.ring.field.half()
    expected = [[(U[i][j] + U[j][i]).scale(half) for j in range(2)] for i in range(2)]
    assert sym.U == expected
    assert sym.U == transpose(sym.U)


def test_coordinates_reject_non_maps(ctx):
    H = HomSpace(presentation(S(-2), ctx), presentation(S(-1), ctx))
    phi = H.basis()[0]
    broken = type(phi)(phi.U, [row[:] for row in phi.V], phi.source, phi.target)
    broken.V[0][0] = broken.V[0][0] + ctx.ring.var(0)
    with pytest.raises(ValueError):
        H.coordinates(broken)
