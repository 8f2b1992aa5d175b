"""Prime fields and dense exact linear algebra over them.

Matrices are numpy int64 arrays with entries in [0, p).  The elimination
kernel is compiled with numba; p must stay below 2**31 so that products of
two residues fit in a signed 64-bit word.
"""

from __future__ import annotations

import numpy as np
from numba import njit

DEFAULT_PRIME = 31991
_FORBIDDEN = (2, 3, 5)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for s in small:
        if n % s == 0:
            return n == s
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class PrimeField:
    """The field F_p.  Elements are handled as plain ints in [0, p)."""

    __slots__ = ("p",)

    def __init__(self, p: int = DEFAULT_PRIME):
        p = int(p)
        if p in _FORBIDDEN:
            raise ValueError(f"characteristic {p} is not supported")
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if p >= 2**31:
            raise ValueError("modulus must be below 2**31")
        self.p = p

    def __repr__(self):
        return f"PrimeField({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("F", self.p))

    def __call__(self, value: int) -> "FieldElement":
        return FieldElement(value, self)

    def reduce(self, a: int) -> int:
        return a % self.p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("inverse of zero in F_%d" % self.p)
        return pow(a, -1, self.p)

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def half(self) -> int:
        return (self.p + 1) // 2

    def signed(self, a: int) -> int:
        """Representative in (-p/2, p/2]."""
        a %= self.p
        return a - self.p if a > self.p // 2 else a


class FieldElement:
    """A residue class with operator overloading, mostly for interactive use."""

    __slots__ = ("value", "field")

    def __init__(self, value: int, field: PrimeField):
        self.field = field
        self.value = int(value) % field.p

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError("field mismatch")
            return other.value
        return int(other) % self.field.p

    def __add__(self, other):
        return FieldElement(self.value + self._coerce(other), self.field)

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.value - self._coerce(other), self.field)

    def __rsub__(self, other):
        return FieldElement(self._coerce(other) - self.value, self.field)

    def __mul__(self, other):
        return FieldElement(self.value * self._coerce(other), self.field)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(-self.value, self.field)

    def inverse(self):
        return FieldElement(self.field.inv(self.value), self.field)

    def __truediv__(self, other):
        return self * FieldElement(self._coerce(other), self.field).inverse()

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.field.p
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.field.p))

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value} (mod {self.field.p})"


def fe_inverse(a, F: PrimeField) -> int:
    return F.inv(int(a))


# --- compiled kernels -------------------------------------------------------


@njit(cache=True)
def _inv_mod(a, p):
    t, newt, r, newr = 0, 1, p, a % p
    while newr != 0:
        q = r // newr
        t, newt = newt, t - q * newt
        r, newr = newr, r - q * newr
    if t < 0:
        t += p
    return t


@njit(cache=True)
def _echelon(a, p, full):
    """In-place row echelon form of ``a`` mod p.

    Pivots are chosen as the first nonzero entry in the current column.
    With ``full`` the result is the reduced echelon form.  Returns the pivot
    columns; rows past the rank are zero on exit.
    """
    m, n = a.shape
    pivots = np.empty(min(m, n), np.int64)
    nz = np.empty(n, np.int64)
    r = 0
    for c in range(n):
        if r == m:
            break
        piv = -1
        for i in range(r, m):
            if a[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(c, n):
                tmp = a[r, j]
                a[r, j] = a[piv, j]
                a[piv, j] = tmp
        inv = _inv_mod(a[r, c], p)
        cnt = 0
        for j in range(c, n):
            if a[r, j] != 0:
                a[r, j] = a[r, j] * inv % p
                nz[cnt] = j
                cnt += 1
        start = 0 if full else r + 1
        for i in range(start, m):
            if i == r:
                continue
            f = a[i, c]
            if f == 0:
                continue
            for k in range(cnt):
                j = nz[k]
                a[i, j] = (a[i, j] - f * a[r, j]) % p
        pivots[r] = c
        r += 1
    return pivots[:r].copy()


@njit(cache=True)
def _reduce_rows(x, basis, pivots, p):
    """Reduce each row of x against a reduced echelon basis, in place."""
    m = x.shape[0]
    n = x.shape[1]
    for k in range(pivots.shape[0]):
        c = pivots[k]
        for i in range(m):
            f = x[i, c]
            if f == 0:
                continue
            for j in range(n):
                b = basis[k, j]
                if b != 0:
                    x[i, j] = (x[i, j] - f * b) % p


def as_matrix(rows, p: int, cols: int | None = None) -> np.ndarray:
    a = np.array(rows, dtype=np.int64)
    if a.ndim == 1:
        a = a.reshape(0 if a.size == 0 else 1, -1) if cols is None else a.reshape(-1, cols)
    if a.size == 0 and cols is not None:
        a = np.zeros((a.shape[0], cols), dtype=np.int64)
    return np.mod(a, p)


def echelon(a: np.ndarray, p: int, full: bool = True):
    """Return (E, pivots) with E the (reduced) echelon form, zero rows dropped."""
    a = np.ascontiguousarray(np.mod(a, p), dtype=np.int64)
    if a.shape[0] == 0 or a.shape[1] == 0:
        return a[:0], np.zeros(0, dtype=np.int64)
    piv = _echelon(a, p, full)
    return a[: len(piv)].copy(), piv


def rank(a: np.ndarray, p: int) -> int:
    return len(echelon(a, p, full=False)[1])


def reduce_rows(x: np.ndarray, basis: np.ndarray, pivots: np.ndarray, p: int) -> np.ndarray:
    """Rows of x reduced modulo the row space of a reduced echelon basis."""
    x = np.ascontiguousarray(np.mod(x, p), dtype=np.int64)
    if len(pivots) and x.shape[0]:
        _reduce_rows(x, np.ascontiguousarray(basis), np.ascontiguousarray(pivots), p)
    return x


def kernel(a: np.ndarray, p: int) -> np.ndarray:
    """Basis of the right kernel {v : a v = 0}, one vector per row."""
    m, n = a.shape
    e, piv = echelon(a, p, full=True)
    free = [j for j in range(n) if j not in set(piv.tolist())]
    ker = np.zeros((len(free), n), dtype=np.int64)
    for k, j in enumerate(free):
        ker[k, j] = 1
        if len(piv):
            ker[k, piv] = (-e[:, j]) % p
    return ker


def matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Exact product mod p, via float64 BLAS in chunks that cannot round."""
    a = np.asarray(a, dtype=np.int64) % p
    b = np.asarray(b, dtype=np.int64) % p
    inner = a.shape[1]
    if inner == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    step = max(1, int(2**52 // ((p - 1) ** 2)))
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    af = a.astype(np.float64)
    bf = b.astype(np.float64)
    for s in range(0, inner, step):
        part = af[:, s : s + step] @ bf[s : s + step]
        out = (out + np.mod(part, p).astype(np.int64)) % p
    return out


def inverse(a: np.ndarray, p: int) -> np.ndarray:
    n = a.shape[0]
    aug = np.concatenate([np.mod(a, p), np.eye(n, dtype=np.int64)], axis=1)
    e, piv = echelon(aug, p, full=True)
    if len(piv) < n or piv[n - 1] != n - 1:
        raise ZeroDivisionError("singular matrix")
    return e[:, n:].copy()


def det(a: np.ndarray, p: int) -> int:
    a = np.array(a, dtype=np.int64) % p
    n = a.shape[0]
    d = 1
    for c in range(n):
        rows = np.nonzero(a[c:, c])[0]
        if len(rows) == 0:
            return 0
        r = c + rows[0]
        if r != c:
            a[[c, r]] = a[[r, c]]
            d = -d
        d = d * int(a[c, c]) % p
        inv = pow(int(a[c, c]), -1, p)
        f = a[c + 1 :, c] * inv % p
        a[c + 1 :] = (a[c + 1 :] - np.outer(f, a[c])) % p
    return d % p


def batch_det(mats: np.ndarray, p: int) -> np.ndarray:
    """Determinants of a stack of square matrices, shape (N, k, k)."""
    a = np.array(mats, dtype=np.int64) % p
    n_mat, k, _ = a.shape
    d = np.ones(n_mat, dtype=np.int64)
    idx = np.arange(n_mat)
    for c in range(k):
        nonzero = a[:, c:, c] != 0
        has = nonzero.any(axis=1)
        d[~has] = 0
        r = c + np.argmax(nonzero, axis=1)
        swap = has & (r != c)
        if swap.any():
            rows_c = a[idx[swap], c].copy()
            a[idx[swap], c] = a[idx[swap], r[swap]]
            a[idx[swap], r[swap]] = rows_c
            d[swap] = (-d[swap]) % p
        piv = a[:, c, c].copy()
        piv[~has] = 1
        d = d * (a[:, c, c] % p) % p
        inv = _vec_pow(piv, p - 2, p)
        f = a[:, c + 1 :, c] * inv[:, None] % p
        a[:, c + 1 :, :] = (a[:, c + 1 :, :] - f[:, :, None] * a[:, c, None, :]) % p
    return d % p


def _vec_pow(x: np.ndarray, e: int, p: int) -> np.ndarray:
    result = np.ones_like(x)
    base = x % p
    while e:
        if e & 1:
            result = result * base % p
        base = base * base % p
        e >>= 1
    return result


class MatrixGF:
    """Dense matrix over F_p with row-major int64 storage."""

    def __init__(self, entries, field: PrimeField, cols: int | None = None):
        self.field = field
        self.a = as_matrix(entries, field.p, cols)

    @property
    def rows(self):
        return self.a.shape[0]

    @property
    def cols(self):
        return self.a.shape[1]

    def __matmul__(self, other):
        if isinstance(other, MatrixGF):
            return MatrixGF(matmul(self.a, other.a, self.field.p), self.field)
        v = np.asarray(other, dtype=np.int64).reshape(-1, 1)
        return matmul(self.a, v, self.field.p).ravel()

    def transpose(self):
        return MatrixGF(self.a.T.copy(), self.field)

    def __eq__(self, other):
        return isinstance(other, MatrixGF) and self.field == other.field and np.array_equal(self.a, other.a)

    def __repr__(self):
        return f"MatrixGF({self.rows}x{self.cols} over F_{self.field.p})"


def mat_rank_kernel(M: MatrixGF):
    """Rank and a kernel basis (list of int vectors) of M."""
    p = M.field.p
    if M.cols == 0:
        return 0, []
    if M.rows == 0:
        return 0, [list(r) for r in np.eye(M.cols, dtype=np.int64)]
    ker = kernel(M.a, p)
    return M.cols - len(ker), [list(map(int, v)) for v in ker]


def mat_solve(M: MatrixGF, b):
    """A solution x of M x = b, or None when the system is inconsistent."""
    p = M.field.p
    b = np.asarray(b, dtype=np.int64) % p
    if b.shape != (M.rows,):
        raise ValueError("right-hand side has wrong length")
    aug = np.concatenate([M.a, b.reshape(-1, 1)], axis=1)
    e, piv = echelon(aug, p, full=True)
    if len(piv) and piv[-1] == M.cols:
        return None
    x = np.zeros(M.cols, dtype=np.int64)
    x[piv] = e[:, M.cols]
    return [int(v) for v in x]
