"""Quick invariant checks shared by the ``selftest`` command."""

from __future__ import annotations

import random
from math import comb

from . import gfp
from .barth import FAMILIES
from .cohomology import cohom, predicted_defect, riemann_roch
from .groebner import Ideal, buchberger, graded_piece_dim, hilbert
from .polyring import Ring, random_form
from .quadric import (
    Atom,
    HomSpace,
    SheafSymbol,
    clifford_mf,
    hilbert_function,
    identity,
    mat_mul,
    presentation,
    standard_quadric,
)


def run_selfchecks():
    out = []
    F = gfp.PrimeField(31991)
    rng = random.Random(0)
    a, b, c = (rng.randrange(1, F.p) for _ in range(3))
    ok = (a * (b + c) - a * b - a * c) % F.p == 0 and a * F.inv(a) % F.p == 1
    out.append(("field axioms", ok, ""))

    ring = Ring(31991)
    gens = [random_form(2, ring, rng) for _ in range(3)]
    H = hilbert(buchberger(Ideal(gens, ring)))
    ok = all(H.hilbert_function(d) == ring_dim(d) - graded_piece_dim(Ideal(gens, ring), d) for d in range(7))
    out.append(("Groebner basis against Macaulay matrices", ok, ""))

    ctx = standard_quadric(ring)
    mf = clifford_mf(ctx)
    ok = mat_mul(mf.A, mf.B, ring) == identity(4, ring, ctx.q) == mat_mul(mf.B, mf.A, ring)
    text = "; ".join("[" + ", ".join(str(x) for x in row) + "]" for row in mf.A)
    out.append(("Clifford identity", ok, text))

    S = lambda k: presentation(Atom("S", k), ctx)
    O = lambda k: presentation(Atom("O", k), ctx)
    dims = [HomSpace(S(-2), S(-1)).dim, HomSpace(O(-3), S(-1)).dim, HomSpace(S(-3), S(-1)).dim]
    out.append(("Hom dimensions", dims == [15, 16, 49], str(dims)))

    spinor = [hilbert_function(S(0), n) for n in range(5)]
    table = [cohom(SheafSymbol((Atom("S", 0),)), n).h[0] for n in range(5)]
    out.append(("spinor sections", spinor == table, str(spinor)))

    ok = all(
        cohom(SheafSymbol((Atom(k, 0),)), n).euler == riemann_roch(SheafSymbol((Atom(k, 0),)), n)
        for k in ("O", "S", "SS")
        for n in range(-6, 7)
    )
    out.append(("cohomology tables against Riemann-Roch", ok, ""))

    preds = {t: predicted_defect(f) for t, f in FAMILIES.items()}
    ok = all(preds[t] == f.expected_defect for t, f in FAMILIES.items())
    out.append(("resolution defects", ok, str(preds)))
    return out


def ring_dim(d: int) -> int:
    return comb(d + 4, 4)
