"""Prime-power fields, the tower GF(q) <= GF(q^n), and linear algebra over them.

Elements are plain integers in [0, p^m): the base-p digits are the coefficients
over the polynomial basis {1, x, ..., x^(m-1)}. All bulk arithmetic works on
numpy integer arrays so that profiles over whole projective spaces vectorize.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

MAX_ORDER = 2**20
MAX_DEGREE = 16
_TABLE_LIMIT = 1024  # full add/mul tables up to this field order


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


def prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def prime_power(q: int) -> tuple[int, int]:
    """Split q = p^e, raising ValueError if q is not a prime power."""
    if q < 2:
        raise ValueError(f"{q} is not a prime power")
    fs = prime_factors(q)
    if len(fs) != 1:
        raise ValueError(f"{q} is not a prime power")
    p, e = fs[0], 0
    while q > 1:
        q //= p
        e += 1
    return p, e


# -- polynomials over GF(p), coefficient lists low -> high -------------------

def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _polymod(a, f, p):
    a = list(a)
    df = len(f) - 1
    inv_lead = pow(f[-1], p - 2, p)
    while len(_trim(a)) - 1 >= df:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - df
        for i, fc in enumerate(f):
            a[shift + i] = (a[shift + i] - c * fc) % p
    return a


def _polymulmod(a, b, f, p):
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _polymod(out, f, p)


def _x_pow_mod(e, f, p):
    result, base = [1], _polymod([0, 1], f, p)
    while e:
        if e & 1:
            result = _polymulmod(result, base, f, p)
        base = _polymulmod(base, base, f, p)
        e >>= 1
    return result


def is_irreducible(f, p) -> bool:
    """Trial division by every monic polynomial of degree 1..deg(f)//2."""
    m = len(f) - 1
    if m <= 1:
        return m == 1
    for d in range(1, m // 2 + 1):
        for tail in product(range(p), repeat=d):
            g = list(tail) + [1]
            if not _trim(_polymod(f, g, p)):
                return False
    return True


def _is_primitive(f, p) -> bool:
    m = len(f) - 1
    if f[0] == 0:
        return False
    order = p**m - 1
    if _x_pow_mod(order, f, p) != [1]:
        return False
    return all(_x_pow_mod(order // l, f, p) != [1] for l in prime_factors(order))


@lru_cache(maxsize=None)
def defining_polynomial(p: int, m: int) -> tuple[int, ...]:
    """Deterministic defining polynomial for GF(p^m).

    m = 1 uses the polynomial x. Otherwise the first primitive monic polynomial
    in the order of its coefficient vector (c_0, ..., c_{m-1}) read as a base-p
    integer, so x itself generates the multiplicative group.
    """
    if m == 1:
        return (0, 1)
    for code in range(p**m):
        tail = [(code // p**i) % p for i in range(m)]
        f = tail + [1]
        if _is_primitive(f, p):
            return tuple(f)
    raise RuntimeError(f"no primitive polynomial found for GF({p}^{m})")


def _primitive_root(p: int) -> int:
    if p == 2:
        return 1
    fs = prime_factors(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // l, p) != 1 for l in fs):
            return g
    raise RuntimeError("unreachable")


# -- fields -----------------------------------------------------------------

@dataclass(frozen=True)
class FieldSpec:
    p: int
    m: int
    poly: tuple[int, ...]

    @property
    def order(self) -> int:
        return self.p**self.m

    def to_json(self):
        return [self.p, self.m, list(self.poly)]


class GF:
    """Arithmetic context for GF(p^m) acting on integer-encoded elements."""

    def __init__(self, p: int, m: int):
        if not is_prime(p):
            raise ValueError(f"characteristic {p} is not prime")
        if not 1 <= m <= MAX_DEGREE or p**m > MAX_ORDER:
            raise ValueError(f"GF({p}^{m}) is outside the supported range")
        poly = defining_polynomial(p, m)
        if not is_irreducible(list(poly), p):
            raise RuntimeError(f"defining polynomial {poly} is reducible")
        self.spec = FieldSpec(p, m, poly)
        self.p, self.m = p, m
        self.order = Q = p**m
        self.gen = _primitive_root(p) if m == 1 else p

        self._ipow = p ** np.arange(m, dtype=np.int64)
        step = self._mul_gen_table().tolist()
        exp = np.empty(2 * (Q - 1), dtype=np.int64)
        log = np.full(Q, -1, dtype=np.int64)
        seq, v = [], 1
        for _ in range(Q - 1):
            seq.append(v)
            v = step[v]
        exp[:Q - 1] = seq
        log[exp[:Q - 1]] = np.arange(Q - 1)
        if v != 1 or np.count_nonzero(log[1:] < 0):
            raise RuntimeError(f"generator of GF({p}^{m}) does not have full order")
        exp[Q - 1:] = exp[:Q - 1]
        self._exp, self._log = exp, log

        self._add_tab = self._mul_tab = None
        if Q <= _TABLE_LIMIT:
            a = np.arange(Q)
            self._add_tab = self._add_digits(a[:, None], a[None, :])
            self._mul_tab = self._mul_log(a[:, None], a[None, :])
        self._neg = self._neg_digits(np.arange(Q))

    def __repr__(self):
        return f"GF({self.p}^{self.m})" if self.m > 1 else f"GF({self.p})"

    def __reduce__(self):
        return (field_make, (self.p, self.m))

    def _mul_gen_table(self) -> np.ndarray:
        """Image of every element under multiplication by the generator."""
        p, m, Q = self.p, self.m, self.p**self.m
        a = np.arange(Q, dtype=np.int64)
        if m == 1:
            return a * self.gen % p
        f = np.array(self.spec.poly[:m], dtype=np.int64)
        d = (a[:, None] // self._ipow) % p
        top = d[:, -1:]
        shifted = np.concatenate([np.zeros((Q, 1), dtype=np.int64), d[:, :-1]], axis=1)
        return ((shifted - top * f) % p) @ self._ipow

    def digits(self, a) -> np.ndarray:
        """Coefficient vectors, shape a.shape + (m,)."""
        a = np.asarray(a, dtype=np.int64)
        return (a[..., None] // self._ipow) % self.p

    def from_digits(self, d) -> np.ndarray:
        d = np.asarray(d, dtype=np.int64) % self.p
        return d @ self._ipow

    def _add_digits(self, a, b):
        if self.p == 2:
            return np.bitwise_xor(a, b)
        return self.from_digits(self.digits(a) + self.digits(b))

    def _neg_digits(self, a):
        if self.p == 2:
            return np.asarray(a, dtype=np.int64)
        return self.from_digits(-self.digits(a))

    def _mul_log(self, a, b):
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        out = self._exp[(self._log[a] + self._log[b]) % (self.order - 1)]
        return np.where((a == 0) | (b == 0), 0, out)

    # vectorized field operations on integer arrays (broadcasting)
    def add(self, a, b):
        if self._add_tab is not None:
            return self._add_tab[a, b]
        return self._add_digits(a, b)

    def neg(self, a):
        return self._neg[a]

    def sub(self, a, b):
        return self.add(a, self._neg[b])

    def mul(self, a, b):
        if self._mul_tab is not None:
            return self._mul_tab[a, b]
        return self._mul_log(a, b)

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of zero")
        return self._exp[(self.order - 1 - self._log[a]) % (self.order - 1)]

    def pow(self, a, e: int):
        a = np.asarray(a, dtype=np.int64)
        if e == 0:
            return np.ones_like(a)
        out = self._exp[(self._log[a] * e) % (self.order - 1)]
        return np.where(a == 0, 0, out)

    def log(self, a):
        return self._log[a]

    def exp(self, i):
        return self._exp[np.asarray(i) % (self.order - 1)]

    def elements(self) -> np.ndarray:
        return np.arange(self.order, dtype=np.int64)

    def dot(self, a, b):
        """Sum over the last axis of a*b (broadcast)."""
        prod = self.mul(a, b)
        return self.sum(prod, axis=-1)

    def sum(self, a, axis=-1):
        a = np.asarray(a, dtype=np.int64)
        if self.p == 2:
            return np.bitwise_xor.reduce(a, axis=axis)
        a = np.moveaxis(a, axis, 0)
        out = np.zeros(a.shape[1:], dtype=np.int64)
        for row in a:
            out = self.add(out, row)
        return out

    def matmul(self, A, B):
        """Matrix product over the field; supports leading batch dimensions."""
        A, B = np.asarray(A, dtype=np.int64), np.asarray(B, dtype=np.int64)
        out = None
        for t in range(A.shape[-1]):
            term = self.mul(A[..., :, t, None], B[..., t, None, :])
            out = term if out is None else self.add(out, term)
        if out is None:
            return np.zeros(A.shape[:-1] + B.shape[-1:], dtype=np.int64)
        return out

    def __call__(self, value: int) -> "Elem":
        return Elem(self, int(value))


@lru_cache(maxsize=None)
def field_make(p: int, m: int) -> GF:
    return GF(p, m)


def field_of_order(q: int) -> GF:
    p, e = prime_power(q)
    return field_make(p, e)


class Elem:
    """Scalar convenience wrapper; bulk code uses GF methods on arrays."""

    __slots__ = ("field", "value")

    def __init__(self, field: GF, value: int):
        if not 0 <= value < field.order:
            raise ValueError(f"{value} is not an element of {field}")
        self.field, self.value = field, value

    def _check(self, other):
        if isinstance(other, int):
            return other
        if other.field is not self.field:
            raise TypeError(f"cannot mix {self.field} and {other.field}")
        return other.value

    def __add__(self, o):
        return Elem(self.field, int(self.field.add(self.value, self._check(o))))

    def __sub__(self, o):
        return Elem(self.field, int(self.field.sub(self.value, self._check(o))))

    def __mul__(self, o):
        return Elem(self.field, int(self.field.mul(self.value, self._check(o))))

    def __truediv__(self, o):
        return self * Elem(self.field, int(self.field.inv(self._check(o))))

    def __neg__(self):
        return Elem(self.field, int(self.field.neg(self.value)))

    def __pow__(self, e: int):
        if e < 0:
            return Elem(self.field, int(self.field.inv(self.value))) ** (-e)
        return Elem(self.field, int(self.field.pow(self.value, e)))

    def inverse(self):
        return Elem(self.field, int(self.field.inv(self.value)))

    def __eq__(self, o):
        if isinstance(o, Elem):
            return self.field is o.field and self.value == o.value
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.field.m, self.value))

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.field}({self.value})"


# -- linear algebra over a field ---------------------------------------------

def rref(F: GF, M) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form with zero rows dropped, plus pivot columns."""
    A = np.array(M, dtype=np.int64, copy=True)
    if A.ndim != 2:
        raise ValueError("rref expects a matrix")
    rows, cols = A.shape
    r, pivots = 0, []
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        i = r + nz[0]
        if i != r:
            A[[r, i]] = A[[i, r]]
        A[r] = F.mul(A[r], F.inv(A[r, c]))
        col = A[:, c].copy()
        col[r] = 0
        mask = col != 0
        if mask.any():
            A[mask] = F.sub(A[mask], F.mul(col[mask, None], A[r][None, :]))
        pivots.append(c)
        r += 1
    return A[:r], pivots


def rank(F: GF, M) -> int:
    M = np.asarray(M)
    if M.size == 0:
        return 0
    return len(rref(F, M)[1])


def nullspace(F: GF, M, ncols: int | None = None) -> np.ndarray:
    """RREF basis (as rows) of {x : M x = 0}."""
    M = np.asarray(M, dtype=np.int64)
    if M.size == 0:
        n = ncols if ncols is not None else M.shape[-1]
        return np.eye(n, dtype=np.int64)
    R, piv = rref(F, M)
    n = M.shape[1]
    free = [c for c in range(n) if c not in piv]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for j, fc in enumerate(free):
        basis[j, fc] = 1
        for i, pc in enumerate(piv):
            basis[j, pc] = F.neg(R[i, fc])
    if basis.shape[0] == 0:
        return basis
    return rref(F, basis)[0]


# -- towers -----------------------------------------------------------------

class Tower:
    """GF(q) embedded in GF(q^n), with F_q-coordinates on GF(q^n).

    The F_q-basis of GF(q^n) is {1, a, ..., a^(n-1)} with a the generator of
    GF(q^n).
    """

    def __init__(self, base: GF, n: int):
        if n < 1:
            raise ValueError("extension degree must be >= 1")
        p, e = base.p, base.m
        if p ** (e * n) > MAX_ORDER or e * n > MAX_DEGREE:
            raise ValueError(f"GF({base.order}^{n}) exceeds the supported size")
        self.base, self.n = base, n
        self.q = base.order
        self.ext = ext = field_make(p, e * n)
        self.Q = ext.order

        if e == 1:
            embed = np.arange(p, dtype=np.int64)
        else:
            gamma = self._find_root(base, ext)
            embed = np.zeros(self.q, dtype=np.int64)
            nz = np.arange(1, self.q)
            embed[1:] = ext.exp(ext.log(gamma) * base.log(nz))
        self.embed_table = embed
        self.alpha = ext.gen if ext.m > 1 else 1
        self.basis = np.array([int(ext.pow(self.alpha, i)) for i in range(n)], dtype=np.int64)
        self._coords = None

    @staticmethod
    def _find_root(base: GF, ext: GF) -> int:
        step = (ext.order - 1) // (base.order - 1)
        f = base.spec.poly
        for k in range(1, base.order - 1 + 1):
            gamma = int(ext.exp(k * step))
            acc = 0
            for c in reversed(f):
                acc = int(ext.add(ext.mul(acc, gamma), c))
            if acc == 0 and np.gcd(k, base.order - 1) == 1:
                return gamma
        raise RuntimeError("subfield generator not found")

    def __repr__(self):
        return f"Tower(GF({self.q}) < GF({self.Q}))"

    def __reduce__(self):
        return (tower_make, (self.base.p, self.base.m, self.n))

    def embed(self, a):
        return self.embed_table[np.asarray(a, dtype=np.int64)]

    @property
    def coords_table(self) -> np.ndarray:
        if self._coords is None:
            n, q, ext = self.n, self.q, self.ext
            combos = np.indices((q,) * n).reshape(n, -1).T  # (q^n, n)
            vals = ext.sum(ext.mul(self.embed(combos), self.basis[None, :]), axis=-1)
            table = np.full((self.Q, n), -1, dtype=np.int64)
            table[vals] = combos
            if np.any(table < 0):
                raise RuntimeError("polynomial basis does not span GF(q^n) over GF(q)")
            self._coords = table
        return self._coords

    def coords(self, x):
        return self.coords_table[np.asarray(x, dtype=np.int64)]

    def from_coords(self, c):
        c = np.asarray(c, dtype=np.int64)
        return self.ext.sum(self.ext.mul(self.embed(c), self.basis), axis=-1)

    def frobenius(self, x):
        return self.ext.pow(x, self.q)

    def subfield(self) -> np.ndarray:
        return self.embed_table.copy()


@lru_cache(maxsize=None)
def tower_make(p: int, e: int, n: int) -> Tower:
    return Tower(field_make(p, e), n)


def _as_ints(v, field: GF):
    if isinstance(v, np.ndarray):
        arr = v.astype(np.int64)
    else:
        vals = []
        for x in v:
            if isinstance(x, Elem):
                if x.field is not field:
                    raise TypeError(f"entry from {x.field}, expected {field}")
                vals.append(x.value)
            else:
                vals.append(int(x))
        arr = np.array(vals, dtype=np.int64)
    if arr.size and (arr.min() < 0 or arr.max() >= field.order):
        raise ValueError(f"entries are not elements of {field}")
    return arr


def flatten(v, tower: Tower) -> np.ndarray:
    """GF(q^n)^r -> GF(q)^(rn); works row-wise on 2-d input."""
    arr = _as_ints(v, tower.ext) if not isinstance(v, np.ndarray) else v.astype(np.int64)
    if arr.size and (arr.min() < 0 or arr.max() >= tower.Q):
        raise ValueError("vector entries are not in the extension field")
    c = tower.coords(arr)
    return c.reshape(arr.shape[:-1] + (arr.shape[-1] * tower.n,))


def unflatten(c, tower: Tower) -> np.ndarray:
    c = np.asarray(c, dtype=np.int64)
    if c.shape[-1] % tower.n:
        raise ValueError("length is not a multiple of the extension degree")
    grouped = c.reshape(c.shape[:-1] + (c.shape[-1] // tower.n, tower.n))
    return tower.from_coords(grouped)


def batch_rank(F: GF, A) -> np.ndarray:
    """Ranks of a stack of matrices A with shape (B, m, n), eliminated in lockstep."""
    A = np.array(A, dtype=np.int64, copy=True)
    if A.ndim != 3:
        raise ValueError("batch_rank expects a (B, m, n) array")
    B, m, n = A.shape
    rk = np.zeros(B, dtype=np.int64)
    if B == 0 or m == 0 or n == 0:
        return rk
    rows = np.arange(m)
    bidx = np.arange(B)
    for c in range(n):
        live = rk < m
        if not live.any():
            break
        cand = (A[:, :, c] != 0) & (rows[None, :] >= rk[:, None])
        has = cand.any(axis=1) & live
        if not has.any():
            continue
        b = bidx[has]
        piv = cand[b].argmax(axis=1)
        tgt = rk[b]
        prow = A[b, piv].copy()
        A[b, piv] = A[b, tgt]
        A[b, tgt] = prow
        prow = F.mul(prow, F.inv(prow[:, c])[:, None])
        A[b, tgt] = prow
        below = rows[None, :] > tgt[:, None]  # (len(b), m)
        coef = np.where(below, A[b, :, c], 0)
        A[b] = F.sub(A[b], F.mul(coef[:, :, None], prow[:, None, :]))
        rk[b] += 1
    return rk
