"""Rank-metric codes in GF(q^n)^l and their F_q-systems."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import pg
from .constructions import cone_from_params, construction_one
from .galois import Tower, batch_rank, flatten, nullspace, prime_power, rank, tower_make
from .linset import LinearSet


def rank_weight(v, tower: Tower) -> int:
    """dim_Fq of the F_q-span of the entries of v."""
    v = np.asarray(v, dtype=np.int64).reshape(-1)
    if not np.any(v):
        return 0
    return rank(tower.base, tower.coords(v))


def rank_weights(V, tower: Tower) -> np.ndarray:
    """Row-wise rank weights of a (M, l) array."""
    V = np.atleast_2d(np.asarray(V, dtype=np.int64))
    return batch_rank(tower.base, tower.coords(V))


@dataclass
class RankCode:
    tower: Tower
    G: np.ndarray
    _dist: dict = field(default=None, repr=False)

    def __post_init__(self):
        self.G = np.atleast_2d(np.asarray(self.G, dtype=np.int64))
        if rank(self.tower.ext, self.G) != self.G.shape[0]:
            raise ValueError("generator rows are dependent over GF(q^n)")

    @property
    def k(self) -> int:
        return self.G.shape[0]

    @property
    def length(self) -> int:
        return self.G.shape[1]

    def is_nondegenerate(self) -> bool:
        cols = flatten(self.G.T, self.tower)
        return rank(self.tower.base, cols) == self.length

    def to_json(self) -> dict:
        b = self.tower.base
        return {"tower": [b.p, b.m, self.tower.n], "k": self.k, "n": self.length,
                "rows": self.G.tolist()}

    @classmethod
    def from_json(cls, obj) -> "RankCode":
        if isinstance(obj, str):
            obj = json.loads(obj)
        p, e, n = obj["tower"]
        return cls(tower_make(p, e, n), obj["rows"])


def system_from_rank_code(C: RankCode) -> LinearSet:
    if not C.is_nondegenerate():
        raise ValueError("code is degenerate")
    return LinearSet(C.tower, C.k, C.G.T)


def rank_code_from_system(U: LinearSet) -> RankCode:
    if not U.spans_ambient():
        raise ValueError("system does not span GF(q^n)^k")
    return RankCode(U.tower, U.basis.T.copy())


def _messages(C: RankCode, limit: int, samples: int, seed: int):
    """Every x in GF(q^n)^k when there are at most `limit`, else seeded samples."""
    Q, k = C.tower.Q, C.k
    if Q**k <= limit:
        return np.indices((Q,) * k).reshape(k, -1).T, True
    rng = np.random.default_rng(seed)
    return rng.integers(0, Q, size=(samples, k)), False


def rank_distribution(C: RankCode, limit: int = 10**7, samples: int = 10**4, seed: int = 0) -> dict:
    if C._dist is None:
        X, exhaustive = _messages(C, limit, samples, seed)
        parts = []
        for lo in range(0, len(X), 1 << 14):
            cw = C.tower.ext.matmul(X[lo:lo + (1 << 14)], C.G)
            parts.append(rank_weights(cw, C.tower))
        w = np.concatenate(parts)
        vals, cnt = np.unique(w, return_counts=True)
        C._dist = {"exhaustive": exhaustive, "counts": dict(zip(vals.tolist(), cnt.tolist()))}
    return C._dist


def check_relweight(C: RankCode, limit: int = 10**7, samples: int = 10**4, seed: int = 0) -> dict:
    """w(xG) = l - dim_Fq(U meet x^perp), with the right side computed from a
    GF(q^n)-basis of x^perp and the stacked subspace weight of U."""
    U = system_from_rank_code(C)
    ext = C.tower.ext
    X, exhaustive = _messages(C, limit, samples, seed)
    bad, checked, max_meet = [], 0, 0
    for x in X:
        direct = rank_weight(ext.matmul(x[None, :], C.G)[0], C.tower)
        if np.any(x):
            perp = nullspace(ext, x[None, :], C.k)
            meet = U._stacked_weight(perp)
            max_meet = max(max_meet, meet)
        else:
            meet = U.k
        if direct != C.length - meet:
            bad.append(x.tolist())
        checked += 1
    return {"checked": checked, "exhaustive": exhaustive, "failures": bad[:10],
            "ok": not bad, "d_from_system": C.length - max_meet}


def minimum_rank_distance(C: RankCode) -> int:
    counts = rank_distribution(C)["counts"]
    return min(w for w in counts if w > 0)


def cone_rank_code(q: int, n: int, r: int, d: int, h: int) -> RankCode:
    c = cone_from_params(q, n, r, d, h)
    return rank_code_from_system(c.linset)


def construction_one_rank_code(q: int, n: int, r: int, d: int, h: int) -> RankCode:
    B = construction_one(cone_from_params(q, n, r, d, h))
    return rank_code_from_system(B.linset)


def cone_rank_parameters(q, n, r, d, h) -> tuple[int, int, int]:
    return d * n // (h + 1) + n * (r - d), r, n - h


def construction_one_rank_parameters(q, n, r, d, h) -> tuple[int, int, int]:
    return d * n // (h + 1) + n * (r - d) + 1, r + 1, 1


def random_rank_code(tower: Tower, k: int, length: int, seed: int) -> RankCode:
    """Seeded random nondegenerate code; needs k <= length <= k n."""
    if not k <= length <= k * tower.n:
        raise ValueError("a nondegenerate code of dimension k needs k <= length <= kn")
    rng = np.random.default_rng(seed)
    while True:
        G = rng.integers(0, tower.Q, size=(k, length))
        if rank(tower.ext, G) == k and rank(tower.base, flatten(G.T, tower)) == length:
            return RankCode(tower, G)


def rank_suite(q: int, n: int, k: int, seed: int = 0) -> list[tuple[str, RankCode]]:
    """The codes of dimension k built for (q, n): a cone code over a Moore
    line, a Construction 1 code (k >= 3) and a seeded random code."""
    p, e = prime_power(q)
    codes = []
    if k >= 2 and n >= 2:
        codes.append((f"cone(q={q},n={n},r={k},d=2,h=1)", cone_rank_code(q, n, k, 2, 1)))
    if k >= 3 and n >= 2:
        codes.append((f"construction1(q={q},n={n},r={k - 1},d=2,h=1)",
                      construction_one_rank_code(q, n, k - 1, 2, 1)))
    T = tower_make(p, e, n)
    codes.append((f"random(seed={seed},len={min(k * n, k + 1)})", random_rank_code(T, k, min(k * n, k + 1), seed)))
    return codes
