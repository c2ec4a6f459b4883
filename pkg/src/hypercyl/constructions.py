"""Builders for scattered sets, cones, the two affine extensions of a cone,
conic-plus-nucleus hyperovals and hypercylinders.

Coordinates: the base of a cone lives in the first d coordinates, its vertex
in the last r-d. The affine extensions embed PG(r-1, q^n) as the hyperplane
x_r = 0 of PG(r, q^n) and adjoin y = e_r.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import pg
from .galois import field_of_order, prime_power, tower_make
from .linset import LinearSet, hyperplane_profile, is_properly_maximum, predicted_t
from .psets import PointSet, subspace_sizes


class VerificationError(RuntimeError):
    pass


def _tower(q: int, n: int):
    p, e = prime_power(q)
    return tower_make(p, e, n)


def _qdiv(n: int, d: int, h: int) -> int:
    if (d * n) % (h + 1):
        raise ValueError(f"h+1 = {h + 1} does not divide dn = {d * n}")
    return d * n // (h + 1)


# -- scattered sets --------------------------------------------------------------

def moore_h_scattered(q: int, n: int, r: int, h: int, verify: bool = True) -> LinearSet:
    """Direct sum of r/(h+1) blocks {(x, x^q, ..., x^(q^h))}."""
    if h < 1 or r % (h + 1):
        raise ValueError("need h >= 1 and (h+1) | r")
    if n < h + 1:
        raise ValueError("need n >= h+1")
    T = _tower(q, n)
    ext = T.ext
    block = np.stack([ext.pow(T.basis, q**j) for j in range(h + 1)], axis=1)  # (n, h+1)
    nb = r // (h + 1)
    rows = np.zeros((n * nb, r), dtype=np.int64)
    for b in range(nb):
        rows[b * n:(b + 1) * n, b * (h + 1):(b + 1) * (h + 1)] = block
    L = LinearSet(T, r, rows)
    if verify and not is_properly_maximum(L, h):
        raise VerificationError(f"Moore construction {(q, n, r, h)} is not properly maximum")
    return L


def subgeometry(q: int, n: int, r: int) -> LinearSet:
    """U = GF(q)^r inside GF(q^n)^r."""
    T = _tower(q, n)
    return LinearSet(T, r, np.eye(r, dtype=np.int64))


# -- cones -------------------------------------------------------------------------

def cone_size(q: int, n: int, r: int, d: int, h: int) -> int:
    D = _qdiv(n, d, h)
    return q ** (n * (r - d)) * pg.space_size(D, q) + pg.space_size(r - d, q**n)


@dataclass
class ConeSpec:
    base: LinearSet
    r: int
    h: int
    linset: LinearSet

    @property
    def d(self) -> int:
        return self.base.r

    @property
    def params(self) -> tuple:
        return (self.base.q, self.base.n, self.r, self.d, self.h)

    def vertex(self) -> pg.Subspace:
        F, r, d = self.base.ext, self.r, self.d
        if r == d:
            return pg.Subspace.empty(F, r - 1)
        E = np.zeros((r - d, r), dtype=np.int64)
        E[np.arange(r - d), np.arange(d, r)] = 1
        return pg.Subspace(F, r - 1, E)

    def to_json(self) -> dict:
        return {"params": dict(zip("qnrdh", self.params)), "base": self.base.to_json(),
                "linset": self.linset.to_json()}


def cone(base: LinearSet, r: int, h: int, verify: bool = True) -> ConeSpec:
    d = base.r
    if d > r:
        raise ValueError("base has more coordinates than the ambient")
    if verify and not is_properly_maximum(base, h):
        raise VerificationError("cone base is not properly maximum h-scattered")
    T, n = base.tower, base.n
    rows = [np.hstack([base.basis, np.zeros((base.k, r - d), dtype=np.int64)])]
    for j in range(d, r):
        blk = np.zeros((n, r), dtype=np.int64)
        blk[:, j] = T.basis
        rows.append(blk)
    L = LinearSet(T, r, np.vstack(rows))
    return ConeSpec(base, r, h, L)


def cone_from_params(q: int, n: int, r: int, d: int, h: int) -> ConeSpec:
    return cone(moore_h_scattered(q, n, d, h), r, h)


def verify_cone_case_split(F, vertex: pg.Subspace, base_space: pg.Subspace, base_points) -> dict:
    """Hyperplane sizes of cone(vertex, base) against the two-case formula.

    Hyperplanes through the vertex meet the cone in [r-d]_Q + m Q^(r-d) points
    with m the size of their trace on the base; the others in
    [r-d-1]_Q + |B| Q^(r-d-1). Here r-d is the vector dimension of the vertex.
    """
    N = vertex.N
    Q = F.order
    B = PointSet(F, N, base_points)
    C = PointSet(F, N, pg.cone_points(F, vertex.basis, B.points))
    D, sizes = subspace_sizes(C, N - 1)
    _, bsz = subspace_sizes(B, N - 1)
    v = len(vertex.basis)
    if v:
        through = pg.incidence(F, D, vertex.points()).all(axis=1)
    else:
        through = np.ones(len(D), dtype=bool)
    expect = np.where(through, pg.space_size(v, Q) + bsz * Q**v,
                      pg.space_size(max(v - 1, 0), Q) + len(B) * Q ** max(v - 1, 0))
    bad = np.flatnonzero(expect != sizes)
    return {"ok": len(bad) == 0, "hyperplanes": len(D), "mismatches": bad.tolist()}


# -- the two affine extensions ------------------------------------------------------

@dataclass
class AffineExtensionSpec:
    cone: ConeSpec
    variant: str  # "B" or "K"
    linset: LinearSet  # U' = U + <e_r> in GF(q^n)^(r+1)

    @property
    def ambient(self) -> int:
        return self.cone.r

    def infinity(self) -> pg.Subspace:
        F = self.linset.ext
        return pg.Subspace.from_dual(F, self.ambient, np.eye(self.ambient + 1, dtype=np.int64)[-1:])

    def points(self) -> PointSet:
        F, r = self.linset.ext, self.ambient
        B = PointSet(F, r, self.linset.points())
        if self.variant == "B":
            return B
        at_inf = B.points[:, -1] == 0
        LU = PointSet(F, r, B.points[at_inf])
        affine = B.points[~at_inf]
        pinf = pg.enumerate_points(F, r - 1)
        pinf = np.hstack([pinf, np.zeros((len(pinf), 1), dtype=np.int64)])
        rest = pinf[~LU.mask(pinf)]
        return PointSet(F, r, np.vstack([affine, rest]))

    def to_json(self) -> dict:
        return {"variant": self.variant, "cone": self.cone.to_json(),
                "linset": self.linset.to_json(), "points": self.points().to_json()}


def _extend(c: ConeSpec, variant: str) -> AffineExtensionSpec:
    L = c.linset.pad(1)
    y = np.zeros(c.r + 1, dtype=np.int64)
    y[-1] = 1
    return AffineExtensionSpec(c, variant, L.extend(y))


def construction_one(c: ConeSpec) -> AffineExtensionSpec:
    return _extend(c, "B")


def construction_two(c: ConeSpec) -> AffineExtensionSpec:
    return _extend(c, "K")


# predicted values ------------------------------------------------------------

def construction_one_size(q, n, r, d, h) -> int:
    D = _qdiv(n, d, h)
    return q ** (n * (r - d)) * pg.space_size(D + 1, q) + pg.space_size(r - d, q**n)


def construction_two_size(q, n, r, d, h) -> int:
    D = _qdiv(n, d, h)
    return q ** (n * (r - d)) * (pg.space_size(d, q**n) - pg.space_size(D, q) + q**D)


def construction_two_size_r_eq_d(q, n, r, h) -> int:
    D = _qdiv(n, r, h)
    return pg.space_size(r, q**n) - pg.space_size(D, q) + q**D


def construction_one_families(q, n, r, d, h) -> list[dict]:
    """Hyperplane sizes of B as cases a)-e), each flagged with whether the
    theorem lists it (b and d with i=0 are the cases shown not to occur)."""
    D = _qdiv(n, d, h)
    Q, sz = q**n, pg.space_size
    base = q ** (n * (r - d))
    fam = [{"case": "a", "size": base * sz(D, q) + sz(r - d, Q), "listed": True}]
    if r > d:
        low = q ** (n * (r - d - 1))
        fam.append({"case": "b", "size": low * sz(D, q) + sz(r - d - 1, Q), "listed": False})
        fam.append({"case": "c", "size": low * sz(D + 1, q) + sz(r - d - 1, Q), "listed": True})
    for i in range(h + 1):
        g = D - n + i
        fam.append({"case": f"d{i}", "size": base * sz(g, q) + sz(r - d, Q), "listed": i >= 1})
        fam.append({"case": f"e{i}", "size": base * (sz(g, q) + q**g) + sz(r - d, Q), "listed": True})
    return fam


def construction_one_weights(q, n, r, d, h) -> set[int]:
    """Possible weights of hyperplanes of PG(r, q^n) with respect to U'."""
    D = _qdiv(n, d, h)
    w = {n * (r - d) + D}
    if r > d:
        w.add(n * (r - d - 1) + D + 1)
    for i in range(h + 1):
        g = D - n + i
        w.update({n * (r - d) + g, n * (r - d) + g + 1})
    return w


def construction_two_families(q, n, r, d, h) -> list[dict]:
    D = _qdiv(n, d, h)
    Q, sz = q**n, pg.space_size
    base = q ** (n * (r - d))
    fam = [{"case": "infinity", "size": base * (sz(d, Q) - sz(D, q))}]
    if r > d:
        fam.append({"case": "off-vertex", "size": q ** (n * (r - d - 1)) * (sz(d, Q) - sz(D, q) + q**D)})
    for i in range(h + 1):
        g = D - n + i
        for j in (0, 1):
            beta = 0 if (j == 0 and i >= 1) else q**g
            fam.append({"case": f"through-vertex i={i} j={j}", "size": base * (sz(d - 1, Q) - sz(g, q) + beta)})
    return fam


def check_construction(spec: AffineExtensionSpec) -> dict:
    """Enumerate hyperplanes and compare with the predicted families."""
    q, n, r, d, h = spec.cone.params
    S = spec.points()
    F = S.field
    _, sizes = subspace_sizes(S, r - 1)
    realized = sorted(set(sizes.tolist()))
    out = {"params": dict(zip("qnrdh", (q, n, r, d, h))), "variant": spec.variant,
           "size": len(S), "realized": realized}
    inf = spec.infinity()
    pinf = inf.points()
    if spec.variant == "B":
        out["predicted_size"] = construction_one_size(q, n, r, d, h)
        fam = construction_one_families(q, n, r, d, h)
        listed = sorted({f["size"] for f in fam if f["listed"]})
        excluded = sorted({f["size"] for f in fam if not f["listed"]} - set(listed))
        out.update(listed=listed, excluded=excluded,
                   listed_unrealized=sorted(set(listed) - set(realized)),
                   unlisted_realized=sorted(set(realized) - set(listed)))
        prof = hyperplane_profile(spec.linset)
        out["weights"] = sorted(prof.by_weight)
        out["weights_allowed"] = sorted(construction_one_weights(q, n, r, d, h))
        at_inf = PointSet(F, r, pinf[S.mask(pinf)])
        out["infinity_is_LU"] = at_inf == PointSet(F, r, spec.cone.linset.pad(1).points())
        out["ok"] = (out["size"] == out["predicted_size"] and not out["listed_unrealized"]
                     and not out["unlisted_realized"]
                     and set(out["weights"]) <= set(out["weights_allowed"]) and out["infinity_is_LU"])
    else:
        out["predicted_size"] = construction_two_size(q, n, r, d, h)
        fam = construction_two_families(q, n, r, d, h)
        listed = sorted({f["size"] for f in fam})
        out.update(listed=listed,
                   listed_unrealized=sorted(set(listed) - set(realized)),
                   unlisted_realized=sorted(set(realized) - set(listed)))
        LU = PointSet(F, r, spec.cone.linset.pad(1).points())
        at_inf = PointSet(F, r, pinf[S.mask(pinf)])
        out["infinity_is_complement"] = at_inf == PointSet(F, r, pinf[~LU.mask(pinf)])
        if q == 2:
            out["distinct_sizes_bound"] = 2 * h + 3
        out["ok"] = (out["size"] == out["predicted_size"] and not out["unlisted_realized"]
                     and out["infinity_is_complement"]
                     and (q != 2 or len(realized) <= 2 * h + 3))
    return out


# -- hyperovals and hypercylinders ---------------------------------------------------

def hyperoval_conic_nucleus(q: int) -> PointSet:
    """The conic Y^2 = XZ together with its nucleus (0:1:0)."""
    p, _ = prime_power(q)
    if p != 2:
        raise ValueError("hyperovals need q even")
    F = field_of_order(q)
    t = F.elements()
    pts = np.stack([np.ones_like(t), t, F.mul(t, t)], axis=1)
    pts = np.vstack([pts, [[0, 0, 1], [0, 1, 0]]])
    return PointSet(F, 2, pts)


def hypercylinder_vertex(q: int, r: int) -> pg.Subspace:
    F = field_of_order(q)
    E = np.zeros((r - 2, r + 1), dtype=np.int64)
    E[np.arange(r - 2), np.arange(3, r + 1)] = 1
    return pg.Subspace(F, r, E)


def hypercylinder(q: int, r: int, hyperoval: PointSet | None = None) -> PointSet:
    """Cone over a hyperoval of the plane x_3 = ... = x_r = 0 with vertex
    x_0 = x_1 = x_2 = 0, vertex removed."""
    from .psets import is_hyperoval

    if r < 3:
        raise ValueError("need r >= 3")
    H = hyperoval_conic_nucleus(q) if hyperoval is None else hyperoval
    if H.N != 2 or H.Q != q or not is_hyperoval(H):
        raise ValueError("basis is not a hyperoval of PG(2,q)")
    F = H.field
    base = np.hstack([H.points, np.zeros((len(H), r - 2), dtype=np.int64)])
    V = hypercylinder_vertex(q, r)
    pts = pg.cone_points(F, V.basis, base, include_vertex=False)
    return PointSet(F, r, pts)


def predicted_t_check(q, n, r, h) -> dict:
    """Closed-form t_i against the enumerated hyperplane weights of the Moore set."""
    L = moore_h_scattered(q, n, r, h)
    prof = hyperplane_profile(L)
    top = r * n // (h + 1)
    t = predicted_t(q, n, r, h)
    got = [prof.by_weight.get(top - n + i, 0) for i in range(h + 1)]
    extra = {w: c for w, c in prof.by_weight.items() if not top - n <= w <= top - n + h}
    return {"params": [q, n, r, h], "predicted": t, "enumerated": got,
            "other_weights": extra, "ok": got == t and not extra}
