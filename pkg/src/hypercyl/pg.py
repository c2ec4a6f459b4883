"""Points, subspaces and counting in PG(N, Q).

Every subspace is stored by its canonical RREF basis. A k-space of PG(N, Q) is
also the zero set of N-k independent linear forms; that dual description is
what all the bulk incidence counts use.
"""
from __future__ import annotations

from itertools import combinations

import numpy as np

from .galois import GF, nullspace, rref

GUARDS = {"points": 10**7, "subspaces": 10**6}
CEILINGS = {"points": 5 * 10**7, "subspaces": 5 * 10**6}


class GuardError(RuntimeError):
    """Raised instead of truncating an enumeration that is too large."""


def set_guard(name: str, value: int) -> None:
    if value > CEILINGS[name]:
        raise ValueError(f"guard {name}={value} above hard ceiling {CEILINGS[name]}")
    GUARDS[name] = value


def space_size(k: int, Q: int) -> int:
    """[k]_Q, the number of points of a (k-1)-space."""
    if k < 0:
        raise ValueError("k must be non-negative")
    return (Q**k - 1) // (Q - 1)


def gaussian_binomial(a: int, b: int, Q: int) -> int:
    if a < 0 or b < 0:
        raise ValueError("arguments must be non-negative")
    if b > a:
        return 0
    num = den = 1
    for i in range(b):
        num *= Q ** (a - i) - 1
        den *= Q ** (i + 1) - 1
    assert num % den == 0
    return num // den


# -- points ------------------------------------------------------------------

def normalize(F: GF, V) -> np.ndarray:
    """Scale each row so its first nonzero entry is 1."""
    V = np.asarray(V, dtype=np.int64)
    single = V.ndim == 1
    V = np.atleast_2d(V)
    nz = V != 0
    if not nz.any(axis=1).all():
        raise ValueError("the zero vector is not a projective point")
    lead = V[np.arange(len(V)), nz.argmax(axis=1)]
    out = F.mul(V, F.inv(lead)[:, None])
    return out[0] if single else out


def point_keys(V, Q: int) -> np.ndarray:
    """Integer code of each (normalized) row; orders rows lexicographically."""
    V = np.atleast_2d(np.asarray(V, dtype=np.int64))
    key = np.zeros(len(V), dtype=np.int64)
    for j in range(V.shape[1]):
        key = key * Q + V[:, j]
    return key


def _all_tails(Q: int, length: int) -> np.ndarray:
    if length == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.indices((Q,) * length).reshape(length, -1).T.astype(np.int64)


def enumerate_points(F: GF, N: int) -> np.ndarray:
    """All normalized points of PG(N, Q) as rows, in lexicographic order."""
    Q = F.order
    total = space_size(N + 1, Q)
    if total > GUARDS["points"]:
        raise GuardError(f"PG({N},{Q}) has {total} points, above the guard")
    blocks = []
    for lead in range(N, -1, -1):
        tails = _all_tails(Q, N - lead)
        block = np.zeros((len(tails), N + 1), dtype=np.int64)
        block[:, lead] = 1
        block[:, lead + 1:] = tails
        blocks.append(block)
    return np.concatenate(blocks)


# -- subspaces -----------------------------------------------------------------

class Subspace:
    """A projective subspace of PG(N, Q) given by its canonical RREF basis."""

    __slots__ = ("field", "N", "basis", "_dual")

    def __init__(self, field: GF, N: int, rows, _canonical: bool = False, _dual=None):
        rows = np.asarray(rows, dtype=np.int64).reshape(-1, N + 1)
        if not _canonical and len(rows):
            rows = rref(field, rows)[0]
        self.field, self.N, self.basis = field, N, rows
        self.basis.flags.writeable = False
        self._dual = _dual

    @classmethod
    def from_dual(cls, field: GF, N: int, dual_rows) -> "Subspace":
        D = np.asarray(dual_rows, dtype=np.int64).reshape(-1, N + 1)
        if len(D):
            D = rref(field, D)[0]
        basis = nullspace(field, D, N + 1) if len(D) else np.eye(N + 1, dtype=np.int64)
        return cls(field, N, basis, _canonical=True, _dual=D)

    @classmethod
    def empty(cls, field: GF, N: int) -> "Subspace":
        return cls(field, N, np.zeros((0, N + 1), dtype=np.int64), _canonical=True)

    @classmethod
    def whole(cls, field: GF, N: int) -> "Subspace":
        return cls(field, N, np.eye(N + 1, dtype=np.int64), _canonical=True)

    @property
    def dim(self) -> int:
        return len(self.basis) - 1

    @property
    def dual(self) -> np.ndarray:
        """RREF rows of linear forms vanishing exactly on this subspace."""
        if self._dual is None:
            if len(self.basis) == 0:
                self._dual = np.eye(self.N + 1, dtype=np.int64)
            else:
                self._dual = nullspace(self.field, self.basis, self.N + 1)
        return self._dual

    @property
    def key(self) -> tuple:
        return (self.N, self.field.order, self.basis.tobytes())

    def __eq__(self, other):
        return isinstance(other, Subspace) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"Subspace(dim={self.dim}, N={self.N}, Q={self.field.order}, basis={self.basis.tolist()})"

    def points(self) -> np.ndarray:
        """All normalized points of the subspace (lexicographic order)."""
        k = len(self.basis)
        if k == 0:
            return np.zeros((0, self.N + 1), dtype=np.int64)
        coeffs = enumerate_points(self.field, k - 1)
        pts = normalize(self.field, self.field.matmul(coeffs, self.basis))
        return pts[np.argsort(point_keys(pts, self.field.order))]

    def local_coords(self, V) -> np.ndarray:
        """Coordinates of points of this subspace w.r.t. its RREF basis."""
        V = np.atleast_2d(np.asarray(V, dtype=np.int64))
        piv = np.argmax(self.basis != 0, axis=1)
        return V[:, piv]


def _check_ambient(A: Subspace, B: Subspace):
    if A.N != B.N or A.field is not B.field:
        raise ValueError("subspaces live in different ambient spaces")


def span(A: Subspace, B: Subspace) -> Subspace:
    _check_ambient(A, B)
    return Subspace(A.field, A.N, np.vstack([A.basis, B.basis]))


def meet(A: Subspace, B: Subspace) -> Subspace:
    _check_ambient(A, B)
    return Subspace.from_dual(A.field, A.N, np.vstack([A.dual, B.dual]))


def incident(P, A: Subspace) -> bool:
    P = np.asarray(P, dtype=np.int64)
    if P.shape != (A.N + 1,):
        raise ValueError("point is not in the ambient of the subspace")
    return not np.any(A.field.dot(A.dual, P[None, :]))


def _rref_family(F: GF, rows: int, cols: int) -> np.ndarray:
    """All RREF matrices of full rank `rows`, lexicographically sorted."""
    Q = F.order
    if rows == 0:
        return np.zeros((1, 0, cols), dtype=np.int64)
    out = []
    for piv in combinations(range(cols), rows):
        free = [(i, j) for i in range(rows) for j in range(piv[i] + 1, cols) if j not in piv]
        tails = _all_tails(Q, len(free))
        block = np.zeros((len(tails), rows, cols), dtype=np.int64)
        for i, c in enumerate(piv):
            block[:, i, c] = 1
        for t, (i, j) in enumerate(free):
            block[:, i, j] = tails[:, t]
        out.append(block)
    allm = np.concatenate(out)
    flat = allm.reshape(len(allm), -1)
    order = np.lexsort(flat.T[::-1])
    return allm[order]


def kspace_duals(F: GF, N: int, k: int) -> np.ndarray:
    """Dual matrices (shape (M, N-k, N+1)) of every k-space of PG(N, Q)."""
    if not -1 <= k <= N:
        raise ValueError("dimension out of range")
    count = gaussian_binomial(N + 1, k + 1, F.order)
    if count > GUARDS["subspaces"]:
        raise GuardError(f"{count} {k}-spaces in PG({N},{F.order}) exceed the guard")
    return _rref_family(F, N - k, N + 1)


def enumerate_kspaces(F: GF, N: int, k: int):
    """Stream of all k-spaces of PG(N, Q) in deterministic order."""
    for D in kspace_duals(F, N, k):
        yield Subspace.from_dual(F, N, D)


def enumerate_hyperplanes(F: GF, N: int):
    for a in enumerate_points(F, N):
        yield Subspace.from_dual(F, N, a[None, :])


def enumerate_kspaces_through(A: Subspace, k: int):
    """Stream of every k-space containing A."""
    F, N = A.field, A.N
    if not A.dim <= k <= N:
        raise ValueError("need dim A <= k <= N")
    count = gaussian_binomial(N - A.dim, k - A.dim, F.order)
    if count > GUARDS["subspaces"]:
        raise GuardError(f"{count} spaces through the given subspace exceed the guard")
    piv = [int(np.argmax(row != 0)) for row in A.basis]
    comp = [c for c in range(N + 1) if c not in piv]
    E = np.zeros((len(comp), N + 1), dtype=np.int64)
    E[np.arange(len(comp)), comp] = 1
    extra = k - A.dim
    if extra == 0:
        yield A
        return
    for M in _rref_family(F, extra, len(comp)):
        yield Subspace(F, N, np.vstack([A.basis, F.matmul(M, E)]))


def incidence(F: GF, duals: np.ndarray, points: np.ndarray, chunk: int = 2048) -> np.ndarray:
    """Boolean matrix: subspace i (given by duals[i]) contains point j."""
    duals = np.asarray(duals, dtype=np.int64)
    points = np.atleast_2d(np.asarray(points, dtype=np.int64))
    M, s = len(duals), len(points)
    out = np.zeros((M, s), dtype=bool)
    if s == 0:
        return out
    if duals.shape[1] == 0:
        out[:] = True
        return out
    PT = points.T
    for lo in range(0, M, chunk):
        vals = F.matmul(duals[lo:lo + chunk], PT)  # (m, c, s)
        out[lo:lo + chunk] = ~np.any(vals, axis=1)
    return out


def subspace_vectors(F: GF, rows) -> np.ndarray:
    """Every vector of the row space (Q^m of them), zero first."""
    rows = np.atleast_2d(np.asarray(rows, dtype=np.int64))
    vecs = np.zeros((1, rows.shape[1]), dtype=np.int64)
    for b in rows:
        vecs = np.concatenate([F.add(vecs, F.mul(c, b)[None, :]) for c in range(F.order)])
    return vecs


def cone_points(F: GF, vertex_rows, base_points, include_vertex: bool = True) -> np.ndarray:
    """Points on the lines joining the vertex subspace to each base point."""
    base = np.atleast_2d(np.asarray(base_points, dtype=np.int64))
    vertex_rows = np.asarray(vertex_rows, dtype=np.int64).reshape(-1, base.shape[1])
    V = subspace_vectors(F, vertex_rows) if len(vertex_rows) else np.zeros((1, base.shape[1]), dtype=np.int64)
    chunks = [normalize(F, F.add(P[None, :], V)) for P in base]
    if include_vertex and len(vertex_rows):
        chunks.append(normalize(F, V[1:]))
    if not chunks:
        return np.zeros((0, base.shape[1]), dtype=np.int64)
    pts = np.concatenate(chunks)
    keys = point_keys(pts, F.order)
    _, first = np.unique(keys, return_index=True)
    return pts[first]
