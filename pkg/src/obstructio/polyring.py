"""Sparse multivariate polynomials over F_p.

The base variables are z0..z4; elimination computations append auxiliary
variables t0, t1, ... after them.  A polynomial is an immutable tuple of
(exponent tuple, coefficient) pairs kept in strictly descending order.
"""

from __future__ import annotations

import random
import re
from functools import lru_cache
from itertools import combinations_with_replacement

import numpy as np

from . import gfp
from .gfp import PrimeField

NBASE = 5
MAX_EXP = 255
_W = 8


class MonomialOrder:
    """grevlex, lex, or a block order eliminating the trailing ``aux`` variables.

    Every monomial gets an integer key so that comparing keys compares
    monomials.  Keys are cached per order instance.
    """

    def __init__(self, kind: str = "grevlex", nvars: int = NBASE, aux: int = 0):
        if kind not in ("grevlex", "lex", "block"):
            raise ValueError(f"unknown monomial order {kind!r}")
        if kind == "block" and aux < 1:
            raise ValueError("block order needs at least one auxiliary variable")
        self.kind = kind
        self.nvars = nvars
        self.aux = aux if kind == "block" else 0
        self._cache: dict = {}

    def __eq__(self, other):
        return (
            isinstance(other, MonomialOrder)
            and (self.kind, self.nvars, self.aux) == (other.kind, other.nvars, other.aux)
        )

    def __hash__(self):
        return hash((self.kind, self.nvars, self.aux))

    def __repr__(self):
        if self.kind == "block":
            return f"block-elimination({self.aux})"
        return self.kind

    @staticmethod
    def _grevlex(m) -> int:
        key = sum(m)
        for e in reversed(m):
            key = (key << _W) | (MAX_EXP - e)
        return key

    def key(self, m) -> int:
        k = self._cache.get(m)
        if k is not None:
            return k
        if self.kind == "grevlex":
            k = self._grevlex(m)
        elif self.kind == "lex":
            k = 0
            for e in m:
                k = (k << _W) | e
        else:
            nb = self.nvars - self.aux
            k = (self._grevlex(m[nb:]) << (_W * (nb + 2))) | self._grevlex(m[:nb])
        self._cache[m] = k
        return k


def compare_monomials(m1, m2, order: MonomialOrder) -> int:
    """-1, 0 or 1 as m1 <, =, > m2."""
    k1, k2 = order.key(tuple(m1)), order.key(tuple(m2))
    return (k1 > k2) - (k1 < k2)


def _check_exponents(m):
    if max(m, default=0) > MAX_EXP:
        raise OverflowError("exponent exceeds %d" % MAX_EXP)
    return m


class Ring:
    """Polynomial ring F_p[z0..z4, t0..] with a fixed monomial order."""

    def __init__(self, field: PrimeField | int = gfp.DEFAULT_PRIME, order: str = "grevlex", aux: int = 0):
        self.field = field if isinstance(field, PrimeField) else PrimeField(field)
        self.p = self.field.p
        self.aux = aux
        self.nvars = NBASE + aux
        self.order = MonomialOrder(order, self.nvars, aux)
        self.names = [f"z{i}" for i in range(NBASE)] + [f"t{i}" for i in range(aux)]
        self.zero = Polynomial(self, ())
        self.one = self.const(1)

    def __eq__(self, other):
        return isinstance(other, Ring) and self.p == other.p and self.order == other.order

    def __hash__(self):
        return hash((self.p, self.order))

    def __repr__(self):
        return f"Ring(p={self.p}, vars={self.nvars}, order={self.order})"

    def with_order(self, order: str, aux: int | None = None) -> "Ring":
        return Ring(self.field, order, self.aux if aux is None else aux)

    # constructors
    def from_dict(self, d) -> "Polynomial":
        p = self.p
        key = self.order.key
        items = [(m, c % p) for m, c in d.items() if c % p]
        items.sort(key=lambda t: key(t[0]), reverse=True)
        return Polynomial(self, tuple(items))

    def const(self, c: int) -> "Polynomial":
        return self.from_dict({(0,) * self.nvars: c})

    def var(self, i: int) -> "Polynomial":
        m = [0] * self.nvars
        m[i] = 1
        return Polynomial(self, ((tuple(m), 1),))

    def gens(self):
        return [self.var(i) for i in range(self.nvars)]

    def monomial(self, m, c: int = 1) -> "Polynomial":
        m = _check_exponents(tuple(m))
        return self.from_dict({m: c})

    def embed(self, f: "Polynomial") -> "Polynomial":
        """Move f into this ring, padding or dropping trailing auxiliaries."""
        n = self.nvars
        d = {}
        for m, c in f.terms:
            if any(m[n:]):
                raise ValueError("polynomial uses variables absent from target ring")
            mm = tuple(m[:n]) + (0,) * (n - len(m))
            d[mm] = c
        return self.from_dict(d)

    def monomials(self, d: int):
        """Monomials of degree d in the base variables, descending."""
        return [m + (0,) * self.aux for m in graded_monomials(d)]

    def parse(self, text: str) -> "Polynomial":
        return parse_poly(text, self)


class Polynomial:
    __slots__ = ("ring", "terms")

    def __init__(self, ring: Ring, terms):
        self.ring = ring
        self.terms = terms

    # basic queries
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    @property
    def lm(self):
        return self.terms[0][0]

    @property
    def lc(self) -> int:
        return self.terms[0][1]

    def degree(self) -> int:
        return max((sum(m) for m, _ in self.terms), default=-1)

    def homogeneous_degree(self):
        """The common degree of all terms, or None."""
        degs = {sum(m) for m, _ in self.terms}
        if len(degs) == 1:
            return degs.pop()
        return None if degs else -1

    def is_homogeneous(self) -> bool:
        return self.homogeneous_degree() is not None

    def as_dict(self):
        return dict(self.terms)

    def coefficient(self, m) -> int:
        return dict(self.terms).get(tuple(m), 0)

    # arithmetic
    def _check(self, other):
        if other.ring != self.ring:
            raise ValueError("polynomials live in different rings")

    def __add__(self, other):
        if isinstance(other, int):
            other = self.ring.const(other)
        self._check(other)
        d = dict(self.terms)
        for m, c in other.terms:
            d[m] = d.get(m, 0) + c
        return self.ring.from_dict(d)

    __radd__ = __add__

    def __neg__(self):
        p = self.ring.p
        return Polynomial(self.ring, tuple((m, p - c) for m, c in self.terms))

    def __sub__(self, other):
        if isinstance(other, int):
            other = self.ring.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: int) -> "Polynomial":
        p = self.ring.p
        c %= p
        if c == 0:
            return self.ring.zero
        return Polynomial(self.ring, tuple((m, a * c % p) for m, a in self.terms))

    def mul_term(self, mono, c: int) -> "Polynomial":
        p = self.ring.p
        c %= p
        if c == 0:
            return self.ring.zero
        out = []
        for m, a in self.terms:
            mm = tuple(x + y for x, y in zip(m, mono))
            out.append((mm, a * c % p))
        if out and max(max(m) for m, _ in out) > MAX_EXP:
            raise OverflowError("exponent exceeds %d" % MAX_EXP)
        return Polynomial(self.ring, tuple(out))

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        self._check(other)
        if len(other.terms) == 1:
            return self.mul_term(*other.terms[0])
        if len(self.terms) == 1:
            return other.mul_term(*self.terms[0])
        d: dict = {}
        for m1, c1 in self.terms:
            for m2, c2 in other.terms:
                m = tuple(x + y for x, y in zip(m1, m2))
                d[m] = d.get(m, 0) + c1 * c2
        if d and max(max(m) for m in d) > MAX_EXP:
            raise OverflowError("exponent exceeds %d" % MAX_EXP)
        return self.ring.from_dict(d)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result = self.ring.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def monic(self) -> "Polynomial":
        if not self.terms:
            return self
        return self.scale(self.ring.field.inv(self.lc))

    def diff(self, i: int) -> "Polynomial":
        d = {}
        for m, c in self.terms:
            if m[i]:
                mm = list(m)
                mm[i] -= 1
                d[tuple(mm)] = c * m[i]
        return self.ring.from_dict(d)

    def __call__(self, *point) -> int:
        if len(point) == 1 and not isinstance(point[0], int):
            point = tuple(point[0])
        p = self.ring.p
        total = 0
        for m, c in self.terms:
            t = c
            for x, e in zip(point, m):
                if e:
                    t = t * pow(int(x), e, p) % p
            total += t
        return total % p

    def __eq__(self, other):
        if isinstance(other, int):
            return self == self.ring.const(other)
        return isinstance(other, Polynomial) and self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __repr__(self):
        return f"Polynomial({to_text(self)!r})"

    def __str__(self):
        return to_text(self)


def poly_arith(op: str, a: Polynomial, b):
    """Dispatch for add, mul and scalar_mul."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "scalar_mul":
        return a.scale(int(b))
    raise ValueError(op)


@lru_cache(maxsize=None)
def graded_monomials(d: int, n: int = NBASE):
    """All degree-d exponent tuples in n variables, grevlex-descending."""
    if d < 0:
        return ()
    mons = []
    for combo in combinations_with_replacement(range(n), d):
        m = [0] * n
        for i in combo:
            m[i] += 1
        mons.append(tuple(m))
    mons.sort(key=MonomialOrder._grevlex, reverse=True)
    return tuple(mons)


def to_text(f: Polynomial) -> str:
    if not f.terms:
        return "0"
    names = f.ring.names
    parts = []
    for m, c in f.terms:
        factors = []
        for name, e in zip(names, m):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        if not factors:
            parts.append(str(c))
        elif c == 1:
            parts.append("*".join(factors))
        else:
            parts.append(f"{c}*" + "*".join(factors))
    return " + ".join(parts)


_TERM = re.compile(r"\s*([+-])?\s*([^+-]+)")


def parse_poly(text: str, ring: Ring) -> Polynomial:
    """Inverse of to_text; also accepts '-' signs and any term order."""
    text = text.strip()
    if text in ("", "0"):
        return ring.zero
    index = {name: i for i, name in enumerate(ring.names)}
    d: dict = {}
    pos = 0
    for match in _TERM.finditer(text):
        if match.start() != pos and text[pos : match.start()].strip():
            raise ValueError(f"cannot parse {text!r}")
        pos = match.end()
        sign, body = match.group(1), match.group(2).strip()
        coeff = 1
        mono = [0] * ring.nvars
        for factor in body.split("*"):
            factor = factor.strip()
            if not factor:
                raise ValueError(f"empty factor in {text!r}")
            if factor.isdigit():
                coeff *= int(factor)
                continue
            name, _, exp = factor.partition("^")
            if name not in index:
                raise ValueError(f"unknown variable {name!r}")
            mono[index[name]] += int(exp) if exp else 1
        if sign == "-":
            coeff = -coeff
        m = _check_exponents(tuple(mono))
        d[m] = d.get(m, 0) + coeff
    if text[pos:].strip():
        raise ValueError(f"cannot parse {text!r}")
    return ring.from_dict(d)


def random_form(d: int, ring: Ring, seed) -> Polynomial:
    """Homogeneous form of degree d in z0..z4 with uniform random coefficients."""
    if d < 0:
        raise ValueError("degree must be non-negative")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    p = ring.p
    return ring.from_dict({m: rng.randrange(p) for m in ring.monomials(d)})


def linear_change_of_coordinates(f: Polynomial, T) -> Polynomial:
    """Substitute z_i -> sum_j T[i][j] z_j in the base variables."""
    ring = f.ring
    p = ring.p
    T = np.asarray(T.a if hasattr(T, "a") else T, dtype=np.int64) % p
    if T.shape != (NBASE, NBASE) or gfp.det(T, p) == 0:
        raise ValueError("coordinate change must be an invertible 5x5 matrix")
    images = []
    for i in range(NBASE):
        images.append(ring.from_dict({ring.var(j).lm: int(T[i, j]) for j in range(NBASE)}))
    powers = [{0: ring.one} for _ in range(NBASE)]

    def power(i, e):
        cache = powers[i]
        if e not in cache:
            cache[e] = power(i, e - 1) * images[i]
        return cache[e]

    total: dict = {}
    for m, c in f.terms:
        term = ring.const(c)
        for i in range(NBASE):
            if m[i]:
                term = term * power(i, m[i])
        aux = tuple(m[NBASE:])
        for mm, cc in term.terms:
            key = mm[:NBASE] + aux if aux else mm
            total[key] = total.get(key, 0) + cc
    return ring.from_dict(total)


def random_invertible(rng: random.Random, p: int, n: int = NBASE) -> np.ndarray:
    while True:
        T = np.array([[rng.randrange(p) for _ in range(n)] for _ in range(n)], dtype=np.int64)
        if gfp.det(T, p):
            return T


# --- dense graded pieces (used only by Macaulay-matrix routines) ------------


class GradedBasis:
    """Monomials of one degree in the base variables with vectorised lookup."""

    _cache: dict = {}

    def __new__(cls, d: int):
        obj = cls._cache.get(d)
        if obj is None:
            obj = super().__new__(cls)
            obj._build(d)
            cls._cache[d] = obj
        return obj

    def _build(self, d):
        self.d = d
        self.mons = graded_monomials(d)
        self.exps = np.array(self.mons, dtype=np.int64).reshape(-1, NBASE)
        self.size = len(self.mons)
        self.radix = (d + 1) ** np.arange(NBASE, dtype=np.int64)
        self.table = np.full((d + 1) ** NBASE, -1, dtype=np.int64)
        self.table[self.exps @ self.radix] = np.arange(self.size)
        self.index = {m: i for i, m in enumerate(self.mons)}

    def lookup(self, exps: np.ndarray) -> np.ndarray:
        return self.table[exps @ self.radix]

    def shift(self, var: int) -> np.ndarray:
        """Index in degree d+1 of z_var times each monomial of degree d."""
        up = GradedBasis(self.d + 1)
        e = self.exps.copy()
        e[:, var] += 1
        return up.lookup(e)


def poly_arrays(f: Polynomial):
    """(exponents, coefficients) arrays of a polynomial in the base variables."""
    if any(any(m[NBASE:]) for m, _ in f.terms):
        raise ValueError("auxiliary variables present")
    exps = np.array([m[:NBASE] for m, _ in f.terms], dtype=np.int64).reshape(-1, NBASE)
    coeffs = np.array([c for _, c in f.terms], dtype=np.int64)
    return exps, coeffs


def to_vector(f: Polynomial, d: int) -> np.ndarray:
    basis = GradedBasis(d)
    v = np.zeros(basis.size, dtype=np.int64)
    if f.terms:
        exps, coeffs = poly_arrays(f)
        if np.any(exps.sum(axis=1) != d):
            raise ValueError("polynomial is not homogeneous of degree %d" % d)
        v[basis.lookup(exps)] = coeffs
    return v


def from_vector(v, d: int, ring: Ring) -> Polynomial:
    mons = GradedBasis(d).mons
    pad = (0,) * ring.aux
    v = np.asarray(v) % ring.p
    nz = np.nonzero(v)[0]
    if ring.order.kind == "grevlex":
        # basis order is already grevlex-descending
        return Polynomial(ring, tuple((mons[i] + pad, int(v[i])) for i in nz))
    return ring.from_dict({mons[i] + pad: int(v[i]) for i in nz})


def multiples_matrix(f: Polynomial, d: int) -> np.ndarray:
    """Rows m*f for every monomial m of degree d - deg f, in degree-d coordinates."""
    df = f.homogeneous_degree()
    e = d - df
    target = GradedBasis(d)
    if e < 0 or not f.terms:
        return np.zeros((0, target.size), dtype=np.int64)
    src = GradedBasis(e)
    exps, coeffs = poly_arrays(f)
    idx = target.lookup(src.exps[:, None, :] + exps[None, :, :])
    out = np.zeros((src.size, target.size), dtype=np.int64)
    rows = np.repeat(np.arange(src.size), len(coeffs))
    out[rows, idx.ravel()] = np.tile(coeffs, src.size)
    return out
