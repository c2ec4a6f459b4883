"""F_q-linear sets in PG(r-1, q^n).

A linear set is stored through an F_q-basis of its subspace U of GF(q^n)^r.
Two independent routes compute weights:

* the stacked route (point_weight, subspace_weight): for W spanned over
  GF(q^n) by w_1..w_m, dim_Fq(U meet W) = k + nm - rank_Fq(flat(U) | flat(l_j w_t))
  where l_j runs through the F_q-basis of GF(q^n);
* the dual route (used by the bulk sweeps): if W is cut out by linear forms D
  then U meet W is the kernel of u -> D u, so its dimension is k - rank_Fq(D U).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import pg
from .galois import Tower, batch_rank, flatten, rank, tower_make


class LinearSet:
    def __init__(self, tower: Tower, r: int, basis):
        B = np.asarray(basis, dtype=np.int64).reshape(-1, r)
        if B.size and (B.min() < 0 or B.max() >= tower.Q):
            raise ValueError("basis entries are not in GF(q^n)")
        self.tower, self.r = tower, r
        self.basis = B
        self.basis.flags.writeable = False
        self.k = len(B)
        if self.k and rank(tower.base, flatten(B, tower)) != self.k:
            raise ValueError("basis vectors are not F_q-linearly independent")
        self._spectrum = None

    # -- basic data ------------------------------------------------------------
    @property
    def q(self) -> int:
        return self.tower.q

    @property
    def n(self) -> int:
        return self.tower.n

    @property
    def ext(self):
        return self.tower.ext

    def __repr__(self):
        return f"LinearSet(q={self.q}, n={self.n}, r={self.r}, rank={self.k})"

    def vectors(self) -> np.ndarray:
        """All q^k vectors of U, zero vector first."""
        if self.q ** self.k > pg.GUARDS["points"]:
            raise pg.GuardError(f"|U| = {self.q}^{self.k} exceeds the guard")
        ext, t = self.ext, self.tower
        vecs = np.zeros((1, self.r), dtype=np.int64)
        scal = t.embed(np.arange(self.q))
        for b in self.basis:
            shifted = [ext.add(vecs, ext.mul(c, b)[None, :]) for c in scal]
            vecs = np.concatenate(shifted)
        return vecs

    def _spectrum_data(self):
        if self._spectrum is None:
            V = self.vectors()[1:]
            if len(V) == 0:
                pts = np.zeros((0, self.r), dtype=np.int64)
                w = np.zeros(0, dtype=np.int64)
            else:
                P = pg.normalize(self.ext, V)
                keys = pg.point_keys(P, self.tower.Q)
                uk, first, counts = np.unique(keys, return_index=True, return_counts=True)
                pts = P[first]
                # each point of weight w carries q^w - 1 nonzero vectors of U
                w = np.rint(np.log(counts + 1) / np.log(self.q)).astype(np.int64)
                if np.any(self.q ** w - 1 != counts):
                    raise RuntimeError("vector counts per point are not of the form q^w - 1")
            self._spectrum = (pts, w)
        return self._spectrum

    def points(self) -> np.ndarray:
        """Normalized points of L_U, lexicographically sorted."""
        return self._spectrum_data()[0]

    def point_weights(self) -> np.ndarray:
        return self._spectrum_data()[1]

    def size(self) -> int:
        return len(self.points())

    def weight_spectrum(self) -> list[int]:
        """[N_1, ..., N_k] with N_i the number of points of weight i."""
        w = self.point_weights()
        return [int(np.count_nonzero(w == i)) for i in range(1, self.k + 1)]

    # -- weights -------------------------------------------------------------------
    def _check_ambient(self, V):
        V = np.atleast_2d(np.asarray(V, dtype=np.int64))
        if V.shape[-1] != self.r:
            raise ValueError(f"expected vectors of length {self.r}")
        return V

    def _stacked_weight(self, W: np.ndarray) -> int:
        t = self.tower
        W = self._check_ambient(W)
        m = len(W)
        if m == 0:
            return 0
        scaled = self.ext.mul(t.basis[:, None, None], W[None, :, :]).reshape(-1, self.r)
        rows = [flatten(scaled, t)]
        if self.k:
            rows.insert(0, flatten(self.basis, t))
        return self.k + self.n * m - rank(t.base, np.vstack(rows))

    def point_weight(self, P) -> int:
        P = np.asarray(P, dtype=np.int64)
        if P.shape != (self.r,):
            raise ValueError("point is not in the ambient space")
        return self._stacked_weight(P[None, :])

    def subspace_weight(self, S: pg.Subspace) -> int:
        if S.N != self.r - 1 or S.field is not self.ext:
            raise ValueError("subspace is not in the ambient space")
        return self._stacked_weight(S.basis)

    def dual_weights(self, duals) -> np.ndarray:
        """Weights of many subspaces, each given by its (c, r) dual matrix."""
        D = np.asarray(duals, dtype=np.int64)
        if D.ndim != 3 or D.shape[2] != self.r:
            raise ValueError("duals must have shape (M, c, r)")
        M, c, _ = D.shape
        if self.k == 0 or c == 0:
            return np.full(M, self.k, dtype=np.int64)
        vals = self.ext.matmul(D, self.basis.T)  # (M, c, k)
        coords = self.tower.coords(vals)  # (M, c, k, n)
        mats = coords.transpose(0, 2, 1, 3).reshape(M, self.k, c * self.n)
        return self.k - batch_rank(self.tower.base, mats)

    def contains_subspace(self, S: pg.Subspace) -> bool:
        """Pointwise test that every point of S lies in L_U."""
        if S.N != self.r - 1 or S.field is not self.ext:
            raise ValueError("subspace is not in the ambient space")
        mine = set(pg.point_keys(self.points(), self.tower.Q).tolist()) if self.k else set()
        theirs = pg.point_keys(S.points(), self.tower.Q).tolist() if S.dim >= 0 else []
        return all(x in mine for x in theirs)

    def spans_ambient(self) -> bool:
        return self.k > 0 and rank(self.ext, self.basis) == self.r

    # -- derived sets ----------------------------------------------------------------
    def extend(self, v) -> "LinearSet":
        """The linear set of U + <v>_Fq."""
        v = self._check_ambient(v)
        return LinearSet(self.tower, self.r, np.vstack([self.basis, v]))

    def pad(self, extra: int) -> "LinearSet":
        """Same U inside GF(q^n)^(r+extra), trailing coordinates zero."""
        B = np.hstack([self.basis, np.zeros((self.k, extra), dtype=np.int64)])
        return LinearSet(self.tower, self.r + extra, B)

    # -- io --------------------------------------------------------------------------
    def to_json(self) -> dict:
        b = self.tower.base
        return {"tower": [b.p, b.m, self.n], "r": self.r, "basis": self.basis.tolist()}

    @classmethod
    def from_json(cls, obj) -> "LinearSet":
        if isinstance(obj, str):
            obj = json.loads(obj)
        p, e, n = obj["tower"]
        return cls(tower_make(p, e, n), obj["r"], obj["basis"])


# -- scatteredness ---------------------------------------------------------------

def is_h_scattered(L: LinearSet, h: int) -> bool:
    if not 1 <= h <= L.r - 1:
        raise ValueError("need 1 <= h <= r-1")
    if not L.spans_ambient():
        return False
    D = pg.kspace_duals(L.ext, L.r - 1, h - 1)
    for lo in range(0, len(D), 4096):
        if np.any(L.dual_weights(D[lo:lo + 4096]) > h):
            return False
    return True


def is_properly_maximum(L: LinearSet, h: int) -> bool:
    if (L.r * L.n) % (h + 1):
        return False
    if L.k != L.r * L.n // (h + 1):
        return False
    return is_h_scattered(L, h)


# -- hyperplane profiles -----------------------------------------------------------

@dataclass
class HyperplaneProfile:
    joint: dict = field(default_factory=dict)  # (weight, size) -> count

    @property
    def by_weight(self) -> dict:
        out: dict = {}
        for (w, _), c in self.joint.items():
            out[w] = out.get(w, 0) + c
        return dict(sorted(out.items()))

    @property
    def by_size(self) -> dict:
        out: dict = {}
        for (_, s), c in self.joint.items():
            out[s] = out.get(s, 0) + c
        return dict(sorted(out.items()))

    @property
    def total(self) -> int:
        return sum(self.joint.values())

    def csv_rows(self) -> list[tuple[int, int, int]]:
        return [(w, s, c) for (w, s), c in sorted(self.joint.items())]


def hyperplane_profile(L: LinearSet) -> HyperplaneProfile:
    """Weight and intersection size of every hyperplane of PG(r-1, q^n)."""
    F, N = L.ext, L.r - 1
    if pg.space_size(L.r, F.order) > pg.GUARDS["subspaces"]:
        raise pg.GuardError("too many hyperplanes")
    A = pg.enumerate_points(F, N)
    w = L.dual_weights(A[:, None, :])
    pts = L.points() if L.k else np.zeros((0, L.r), dtype=np.int64)
    sizes = pg.incidence(F, A[:, None, :], pts).sum(axis=1)
    joint: dict = {}
    for a, b in zip(w.tolist(), sizes.tolist()):
        joint[(a, b)] = joint.get((a, b), 0) + 1
    return HyperplaneProfile(dict(sorted(joint.items())))


# -- closed forms ------------------------------------------------------------------

def _check_div(n: int, r: int, h: int) -> int:
    if (r * n) % (h + 1):
        raise ValueError(f"(h+1) = {h + 1} does not divide rn = {r * n}")
    return r * n // (h + 1)


def predicted_t(q: int, n: int, r: int, h: int) -> list[int]:
    """Number of hyperplanes of weight rn/(h+1) - n + i, for i = 0..h."""
    top = _check_div(n, r, h)
    # a spanning set needs rank rn/(h+1) >= r, so h < n; and h-1 <= r-2
    if not 1 <= h <= min(r - 1, n - 1):
        raise ValueError(f"no properly maximum {h}-scattered set in PG({r - 1},{q}^{n})")
    gb = pg.gaussian_binomial
    out = []
    for i in range(h + 1):
        acc = 0
        for j in range(h - i + 1):
            e = top * (h - i - j + 1)
            acc += (-1) ** j * gb(n - i, j, q) * q ** (j * (j - 1) // 2) * (q**e - 1)
        num = gb(n, i, q) * acc
        if num % (q**n - 1):
            raise ArithmeticError(f"t_{i} is not an integer for {(q, n, r, h)}")
        out.append(num // (q**n - 1))
    return out


def predicted_cone_profile(q: int, n: int, r: int, d: int, h: int) -> dict:
    """(weight, size) -> count for the hyperplanes of the cone over a properly
    maximum h-scattered base in d coordinates with vertex in the other r-d."""
    D = _check_div(n, d, h)
    Q = q**n
    sz, out = pg.space_size, {}
    t = predicted_t(q, n, d, h)
    # hyperplanes through the vertex
    for i in range(h + 1):
        g = D - n + i
        key = (g + n * (r - d), q ** (n * (r - d)) * sz(g, q) + sz(r - d, Q))
        out[key] = out.get(key, 0) + t[i]
    # the others
    if r > d:
        key = (n * (r - d - 1) + D, q ** (n * (r - d - 1)) * sz(D, q) + sz(r - d - 1, Q))
        out[key] = out.get(key, 0) + sz(r, Q) - sz(d, Q)
    return dict(sorted(out.items()))
