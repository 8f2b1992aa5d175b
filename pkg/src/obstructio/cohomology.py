"""Cohomology of twists of O, S and S(x)S on the quadric threefold.

Closed forms for h^i, Euler characteristics by Hirzebruch-Riemann-Roch as an
independent check, and a defect predictor that chases the long exact
sequences of the symmetric resolution of the ideal of the node set.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .quadric import Atom, SheafSymbol


@dataclass(frozen=True)
class CohomTable:
    symbol: SheafSymbol
    twist: int
    h: tuple

    @property
    def euler(self) -> int:
        return sum((-1) ** i * x for i, x in enumerate(self.h))


def _h0_line(n: int) -> int:
    return comb(n + 4, 4) - comb(n + 2, 4) if n >= 0 else 0


def _spinor_poly(n: int) -> int:
    return 2 * n * (n + 1) * (n + 2) // 3


def _spinor_square_poly(n: int) -> int:
    return (2 * n * n + 2 * n - 3) * (2 * n + 1) // 3


def atom_cohomology(atom: Atom, n: int = 0) -> tuple:
    """(h0, h1, h2, h3) of atom(n)."""
    m = atom.twist + n
    if atom.kind == "O":
        # Serre duality with K = O(-3)
        return (_h0_line(m), 0, 0, _h0_line(-3 - m))
    if atom.kind == "S":
        return (_spinor_poly(m) if m >= 0 else 0, 0, 0, -_spinor_poly(m) if m <= -2 else 0)
    if atom.kind == "SS":
        if m >= 1:
            return (_spinor_square_poly(m), 0, 0, 0)
        if m == 0:
            return (0, 1, 0, 0)
        if m == -1:
            return (0, 0, 1, 0)
        return (0, 0, 0, -_spinor_square_poly(m))
    raise ValueError("unsupported atom %s" % atom)


def cohom(sym: SheafSymbol, n: int = 0) -> CohomTable:
    h = [0, 0, 0, 0]
    for atom in sym.atoms:
        for i, x in enumerate(atom_cohomology(atom, n)):
            h[i] += x
    return CohomTable(sym, n, tuple(h))


# --- Riemann-Roch -------------------------------------------------------------
# Classes are polynomials in the hyperplane class H with H^3 = 2 points.

_TODD = (Fraction(1), Fraction(3, 2), Fraction(13, 12), Fraction(1, 2))
_CH = {
    "O": (Fraction(1), Fraction(0), Fraction(0), Fraction(0)),
    # c1 = -H, c2 = line = H^2/2
    "S": (Fraction(2), Fraction(-1), Fraction(0), Fraction(1, 12)),
}


def _trunc_mul(a, b):
    out = [Fraction(0)] * 4
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            if i + j < 4:
                out[i + j] += x * y
    return tuple(out)


def chern_character(atom: Atom):
    base = _CH["S"] if atom.kind == "SS" else _CH[atom.kind]
    ch = _trunc_mul(base, base) if atom.kind == "SS" else base
    m = atom.twist
    twist = tuple(Fraction(m**k, [1, 1, 2, 6][k]) for k in range(4))
    return _trunc_mul(ch, twist)


def riemann_roch(sym: SheafSymbol, n: int = 0) -> int:
    total = Fraction(0)
    for atom in sym.atoms:
        shifted = Atom(atom.kind, atom.twist + n)
        top = _trunc_mul(chern_character(shifted), _TODD)[3]
        total += 2 * top
    if total.denominator != 1:
        raise ArithmeticError("non-integral Euler characteristic")
    return int(total)


# --- Euler characteristic formulas -------------------------------------------


@dataclass(frozen=True)
class ChiSpec:
    delta: int
    nodes: int

    def __post_init__(self):
        if self.delta not in (0, 1):
            raise ValueError("delta must be 0 or 1")
        if self.nodes % 4:
            raise ValueError("node count must be divisible by 4")
        if self.delta == 1 and self.nodes % 8 != 4:
            raise ValueError("odd even sets have size 4 mod 8")


def chi_F(n: int, spec: ChiSpec) -> int:
    d, w = spec.delta, spec.nodes
    return (2 * n - d) * (2 * n - d - 2) - w // 4 + 6


def chi_FS(n: int, spec: ChiSpec) -> int:
    d, w = spec.delta, spec.nodes
    return 8 * n * (n - 2 - d) + 16 + 10 * d - w // 2


# --- defect through the symmetric resolution ----------------------------------


def _tensor(a: Atom, b: Atom) -> Atom:
    kinds = {("O", "O"): "O", ("O", "S"): "S", ("S", "O"): "S", ("S", "S"): "SS"}
    return Atom(kinds[(a.kind, b.kind)], a.twist + b.twist)


def _virtual_cohomology(terms: Counter, n: int = 0) -> tuple:
    h = [0, 0, 0, 0]
    for atom, mult in terms.items():
        for i, x in enumerate(atom_cohomology(atom, n)):
            h[i] += mult * x
    if min(h) < 0:
        raise ArithmeticError("virtual sheaf has negative cohomology")
    return tuple(h)


def _twisted(terms: Counter, k: int) -> Counter:
    return Counter({Atom(a.kind, a.twist + k): m for a, m in terms.items()})


def _exterior_square(atoms) -> Counter:
    out: Counter = Counter()
    for i, j in itertools.combinations(range(len(atoms)), 2):
        out[_tensor(atoms[i], atoms[j])] += 1
    for a in atoms:
        if a.kind == "S":
            out[Atom("O", 2 * a.twist - 1)] += 1
    return out


def _symmetric_square(atoms) -> Counter:
    out: Counter = Counter()
    for i, j in itertools.combinations(range(len(atoms)), 2):
        out[_tensor(atoms[i], atoms[j])] += 1
    for a in atoms:
        if a.kind == "O":
            out[Atom("O", 2 * a.twist)] += 1
        else:
            # S^2 S(a) = S(x)S(2a) minus its summand Lambda^2 = O(2a - 1)
            out[Atom("SS", 2 * a.twist)] += 1
            out[Atom("O", 2 * a.twist - 1)] -= 1
    return out


def _endomorphisms(atoms) -> Counter:
    dual = [a.dual() for a in atoms]
    out: Counter = Counter()
    for a in atoms:
        for b in dual:
            out[_tensor(a, b)] += 1
    out[Atom("O", 0)] -= 1  # traceless part
    return out


def resolution_terms(bundle: SheafSymbol, delta: int):
    """Cohomology of the three bundle terms resolving I_w(3)."""
    atoms = list(bundle.atoms)
    dual = [a.dual() for a in atoms]
    left = _twisted(_exterior_square(dual), -5 - delta)
    middle = _twisted(_endomorphisms(atoms), -1)
    right = _twisted(_symmetric_square(atoms), 3 + delta)
    return tuple(_virtual_cohomology(t) for t in (left, middle, right))


def _quotient_options(hx, hy):
    """All cohomology vectors of Z in 0 -> X -> Y -> Z -> 0 compatible with the LES."""
    choices = [range(min(hx[i], hy[i]) + 1) for i in range(1, 4)]
    out = set()
    for ranks in itertools.product(*choices):
        r = (hx[0],) + ranks
        if hx[0] > hy[0]:
            continue
        hz = []
        for i in range(4):
            nxt = hx[i + 1] - r[i + 1] if i < 3 else 0
            hz.append(hy[i] - r[i] + nxt)
        out.add(tuple(hz))
    return out


def h0_ideal_options(bundle: SheafSymbol, delta: int) -> set:
    """Possible values of h0(I_w(3)) allowed by the two long exact sequences."""
    ha, hb, hc = resolution_terms(bundle, delta)
    values = set()
    for hk in _quotient_options(ha, hb):
        for hi in _quotient_options(hk, hc):
            values.add(hi[0])
    return values


@dataclass(frozen=True)
class DefectInterval:
    low: int
    high: int

    def __contains__(self, d: int) -> bool:
        return self.low <= d <= self.high


def predicted_defect(family):
    """d = h0(I_w(3)) - 30 + |w| from the resolution; an interval if not forced."""
    opts = h0_ideal_options(family.bundle, family.delta)
    ds = sorted(h - 30 + family.expected_nodes for h in opts)
    if len(ds) == 1:
        return ds[0]
    return DefectInterval(ds[0], ds[-1])
