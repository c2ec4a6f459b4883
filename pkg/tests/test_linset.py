import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from hypercyl import pg
from hypercyl.constructions import cone_from_params, moore_h_scattered, subgeometry
from hypercyl.galois import flatten, rank, tower_make
from hypercyl.linset import (LinearSet, hyperplane_profile, is_h_scattered, is_properly_maximum,
                             predicted_cone_profile, predicted_t)

TOWERS = [(2, 1, 2), (2, 1, 3), (3, 1, 2), (2, 2, 2)]


def random_linset(T, r, k, rng):
    while True:
        B = rng.integers(0, T.Q, size=(k, r))
        if rank(T.base, flatten(B, T)) == k:
            return LinearSet(T, r, B)


def brute_weights(L):
    """point key -> weight, by counting the nonzero vectors of U on each point."""
    V = L.vectors()[1:]
    keys = pg.point_keys(pg.normalize(L.ext, V), L.tower.Q)
    u, c = np.unique(keys, return_counts=True)
    w = np.rint(np.log(c + 1) / np.log(L.q)).astype(int)
    assert np.all(L.q ** w - 1 == c)
    return dict(zip(u.tolist(), w.tolist()))


def point_dual(F, P):
    return pg.Subspace(F, len(P) - 1, P[None, :]).dual


linsets = st.builds(lambda t, r, k, s: (t, r, k, s), st.sampled_from(TOWERS), st.integers(2, 3),
                    st.integers(1, 4), st.integers(0, 2**32 - 1))


@given(linsets)
def test_point_weight_three_routes(args):
    t, r, k, seed = args
    T = tower_make(*t)
    assume(k <= r * T.n)
    L = random_linset(T, r, k, np.random.default_rng(seed))
    brute = brute_weights(L)
    P = pg.enumerate_points(L.ext, r - 1)
    keys = pg.point_keys(P, T.Q).tolist()
    stacked = [L.point_weight(x) for x in P]
    dual = L.dual_weights(np.stack([point_dual(L.ext, x) for x in P]))
    assert stacked == dual.tolist() == [brute.get(kk, 0) for kk in keys]


@given(linsets)
def test_cardinality_identities(args):
    t, r, k, seed = args
    T = tower_make(*t)
    assume(k <= r * T.n)
    L = random_linset(T, r, k, np.random.default_rng(seed))
    N = L.weight_spectrum()
    q = L.q
    assert L.size() <= pg.space_size(k, q)
    assert sum(N) == L.size()
    assert sum(Ni * pg.space_size(i + 1, q) for i, Ni in enumerate(N)) == pg.space_size(k, q)


@given(linsets)
def test_contains_subspace_matches_weight_criterion(args):
    t, r, k, seed = args
    T = tower_make(*t)
    assume(k <= r * T.n)
    rng = np.random.default_rng(seed)
    L = random_linset(T, r, k, rng)
    for s in range(r):
        for S in pg.enumerate_kspaces(L.ext, r - 1, s):
            assert L.contains_subspace(S) == (L.subspace_weight(S) >= s * L.n + 1)


@given(linsets)
def test_extension_point_weights(args):
    t, r, k, seed = args
    T = tower_make(*t)
    assume(k <= (r - 1) * T.n)
    rng = np.random.default_rng(seed)
    L = random_linset(T, r, k, rng)
    assume(rank(L.ext, L.basis) < r)
    while True:
        v = rng.integers(0, T.Q, size=r)
        if rank(L.ext, np.vstack([L.basis, v])) == rank(L.ext, L.basis) + 1:
            break
    L1 = L.extend(v)
    assert L1.size() == L.size() + L.q ** k
    old = set(pg.point_keys(L.points(), T.Q).tolist())
    new = [w for key, w in zip(pg.point_keys(L1.points(), T.Q).tolist(), L1.point_weights()) if key not in old]
    assert len(new) == L.q ** k and set(new) == {1}


@given(linsets)
def test_weight_by_intersection(args):
    t, r, k, seed = args
    T = tower_make(*t)
    assume(k <= (r - 1) * T.n)
    rng = np.random.default_rng(seed)
    L = random_linset(T, r, k, rng)
    assume(rank(L.ext, L.basis) < r)
    while True:
        v = rng.integers(0, T.Q, size=r)
        if rank(L.ext, np.vstack([L.basis, v])) == rank(L.ext, L.basis) + 1:
            break
    L1 = L.extend(v)
    F = L.ext
    old = set(pg.point_keys(L.points(), T.Q).tolist())
    newpts = np.array([p for p in L1.points() if pg.point_keys(p[None, :], T.Q)[0] not in old])
    checked = 0
    for s in range(r - 1):
        D = pg.kspace_duals(F, r - 1, s)
        w = L.dual_weights(D)
        in_old = pg.incidence(F, D, L.points()).sum(axis=1)
        in_new = pg.incidence(F, D, L1.points()).sum(axis=1)
        hits_new = pg.incidence(F, D, newpts).any(axis=1)
        sel = (w > 0) & hits_new
        assert np.all(in_new[sel] == in_old[sel] + L.q ** w[sel])
        checked += int(sel.sum())
    assume(checked > 0)


def test_point_weight_examples():
    c = cone_from_params(2, 2, 3, 2, 1)
    L = c.linset
    assert L.point_weight(np.array([0, 0, 1])) == 2  # vertex has weight n
    outside = [p for p in pg.enumerate_points(L.ext, 2) if p.tolist() not in L.points().tolist()][0]
    assert L.point_weight(outside) == 0
    M = moore_h_scattered(2, 3, 2, 1)
    assert all(M.point_weight(p) == 1 for p in M.points())
    with pytest.raises(ValueError):
        M.point_weight(np.array([1, 0, 0]))


def test_subspace_weight_examples():
    M = moore_h_scattered(2, 3, 3, 2)
    F = M.ext
    assert M.subspace_weight(pg.Subspace.whole(F, 2)) == M.k
    P = [p for p in pg.enumerate_points(F, 2) if M.point_weight(p) == 0][0]
    assert M.subspace_weight(pg.Subspace(F, 2, P[None, :])) == 0
    top = 3 * 3 // 3
    rng = np.random.default_rng(5)
    H = pg.kspace_duals(F, 2, 1)
    for i in rng.choice(len(H), 20, replace=False):
        w = M.subspace_weight(pg.Subspace.from_dual(F, 2, H[i]))
        assert top - 3 <= w <= top - 3 + 2


def test_weight_spectrum_examples():
    M = moore_h_scattered(2, 3, 2, 1)
    assert M.weight_spectrum() == [pg.space_size(3, 2), 0, 0]
    c = cone_from_params(2, 2, 3, 2, 1)
    assert c.linset.weight_spectrum() == [12, 1, 0, 0] and c.linset.size() == 13
    E = LinearSet(tower_make(2, 1, 2), 2, np.zeros((0, 2)))
    assert E.weight_spectrum() == [] and E.size() == 0


def test_contains_subspace_examples():
    c = cone_from_params(2, 2, 4, 2, 1)  # vertex is a line
    L = c.linset
    V = c.vertex()
    assert V.dim == 1 and L.contains_subspace(V) and L.subspace_weight(V) >= L.n + 1
    M = moore_h_scattered(2, 2, 4, 1)
    for H in list(pg.enumerate_hyperplanes(M.ext, 3))[:40]:
        w = M.subspace_weight(H)
        assert w <= 4 * 2 // 2 - 2 + 1 < 2 * 2 + 1
        assert not M.contains_subspace(H)


def test_scatteredness_examples():
    S = subgeometry(2, 3, 3)
    assert is_h_scattered(S, 2) and S.k == 3
    assert is_h_scattered(moore_h_scattered(2, 3, 2, 1, verify=False), 1)
    T = tower_make(2, 1, 2)
    bad = LinearSet(T, 2, [[1, 0], [T.alpha, 0]])  # two independent vectors on one point
    assert not is_h_scattered(bad, 1)
    for args in [(2, 2, 2, 1), (2, 3, 2, 1), (2, 3, 3, 2)]:
        assert is_properly_maximum(moore_h_scattered(*args, verify=False), args[3])
    assert not is_properly_maximum(S, 1)
    # PG(2,2) in PG(2,4) has rank 3 = rn/(h+1): a properly maximum scattered set
    assert is_properly_maximum(subgeometry(2, 2, 3), 1)
    assert not is_properly_maximum(subgeometry(2, 3, 2), 1)


@given(st.sampled_from([(2, 1, 2), (2, 1, 3), (3, 1, 2)]), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_scattered_rank_bound(t, h, seed):
    T = tower_make(*t)
    r = 3
    assume(h <= r - 1)
    k = int(np.random.default_rng(seed).integers(r, r * T.n // (h + 1) + 2))
    L = random_linset(T, r, k, np.random.default_rng(seed))
    if is_h_scattered(L, h):
        assert k == r or k <= r * T.n // (h + 1)


def test_hyperplane_profile_subline():
    M = moore_h_scattered(2, 2, 2, 1)
    prof = hyperplane_profile(M)
    assert prof.by_weight == {0: 2, 1: 3}
    assert prof.total == pg.space_size(2, 4)
    assert prof.csv_rows() == [(0, 0, 2), (1, 1, 3)]


@pytest.mark.parametrize("args", [(2, 2, 2, 1), (2, 3, 2, 1), (3, 2, 2, 1), (2, 3, 3, 2), (2, 2, 4, 1)])
def test_profile_of_properly_maximum_sets(args):
    q, n, r, h = args
    M = moore_h_scattered(q, n, r, h, verify=False)
    prof = hyperplane_profile(M)
    top = r * n // (h + 1)
    t = predicted_t(q, n, r, h)
    assert prof.total == pg.space_size(r, q**n)
    assert prof.by_weight == {top - n + i: t[i] for i in range(h + 1)}
    for (w, s), _ in prof.joint.items():
        assert s == pg.space_size(w, q)


def test_predicted_t_examples():
    assert predicted_t(2, 2, 2, 1) == [2, 3]
    for args in [(2, 2, 2, 1), (2, 3, 2, 1), (3, 2, 2, 1), (2, 3, 3, 2), (2, 4, 2, 1), (3, 3, 3, 2),
                 (2, 4, 3, 2), (4, 2, 2, 1), (2, 2, 4, 1), (5, 2, 4, 1), (2, 3, 4, 2)]:
        q, n, r, h = args
        t = predicted_t(*args)
        assert sum(t) == pg.space_size(r, q**n)
        assert all(x > 0 for x in t)
    for bad in [(2, 3, 2, 2), (3, 3, 2, 2), (2, 2, 4, 3)]:
        with pytest.raises(ValueError):
            predicted_t(*bad)


def test_predicted_cone_profile_matches_enumeration():
    for args in [(2, 2, 3, 2, 1), (2, 2, 2, 2, 1), (2, 3, 3, 2, 1), (3, 2, 3, 2, 1)]:
        c = cone_from_params(*args)
        assert hyperplane_profile(c.linset).joint == predicted_cone_profile(*args)


def test_json_round_trip():
    M = moore_h_scattered(2, 3, 2, 1)
    M2 = LinearSet.from_json(M.to_json())
    assert np.array_equal(M.basis, M2.basis) and M2.r == 2


def test_rejects_dependent_basis():
    T = tower_make(2, 1, 2)
    with pytest.raises(ValueError):
        LinearSet(T, 2, [[1, 0], [1, 0]])
    with pytest.raises(ValueError):
        LinearSet(T, 2, [[5, 0]])
