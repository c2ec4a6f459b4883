"""Acceptance criteria, each checked at its stated tolerance and time limit.

One PASS/FAIL line per criterion is printed and collected in the terminal
summary under "acceptance criteria".
"""
import importlib.util
import pathlib
import time

import numpy as np

from hypercyl import codes_hamming as ch
from hypercyl import codes_rank as cr
from hypercyl import constructions as cons
from hypercyl import pg
from hypercyl.galois import rank
from hypercyl.linset import hyperplane_profile, predicted_cone_profile, predicted_t
from hypercyl.psets import (PointSet, even_set_bound, falsification_trials, is_even_set, is_hyperoval,
                            profile, recognize_hypercylinder, verify_plane_km_theorem, verify_space_theorem)

ROOT = pathlib.Path(__file__).resolve().parents[1]


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def test_criterion_1_ti_exactness(acceptance_log):
    oks, worst = [], 0.0
    for q, n, r, h in [(2, 2, 2, 1), (2, 3, 2, 1), (3, 2, 2, 1), (2, 3, 3, 2)]:
        def run():
            prof = hyperplane_profile(cons.moore_h_scattered(q, n, r, h))
            top = r * n // (h + 1)
            got = [prof.by_weight.get(top - n + i, 0) for i in range(h + 1)]
            extra = set(prof.by_weight) - {top - n + i for i in range(h + 1)}
            return got == predicted_t(q, n, r, h) and not extra
        ok, dt = _timed(run)
        oks.append(ok and dt < 60)
        worst = max(worst, dt)
    assert acceptance_log(1, "t_i closed form equals enumerated hyperplane weights (4 cases, slowest)",
                          all(oks), worst, 60)


def test_criterion_2_cone_profile(acceptance_log):
    def run():
        q, n, r, d, h = 2, 2, 3, 2, 1
        c = cons.cone_from_params(q, n, r, d, h)
        prof = hyperplane_profile(c.linset)
        F = c.linset.ext
        plane = pg.Subspace(F, r - 1, np.eye(r, dtype=np.int64)[:d])
        split = cons.verify_cone_case_split(F, c.vertex(), plane, c.base.pad(r - d).points())
        return (prof.joint == predicted_cone_profile(q, n, r, d, h) and split["ok"]
                and c.linset.size() == cons.cone_size(q, n, r, d, h))
    ok, dt = _timed(run)
    assert acceptance_log(2, "cone (2,2,3,2,1) hyperplane profile matches both cases", ok, dt, 10)


def test_criterion_3_construction_one_type(acceptance_log):
    def run():
        res = cons.check_construction(cons.construction_one(cons.cone_from_params(2, 2, 2, 2, 1)))
        return (res["ok"] and res["realized"] == res["listed"]
                and not set(res["excluded"]) & set(res["realized"]))
    ok, dt = _timed(run)
    assert acceptance_log(3, "construction 1 (2,2,2,1), r=d: type set realized, excluded case absent", ok, dt, 10)


def test_criterion_4_construction_two(acceptance_log):
    def hyperoval():
        K = cons.construction_two(cons.cone_from_params(2, 2, 2, 2, 1)).points()
        lines = profile(K, 1)
        return len(K) == 6 and K.N == 2 and K.Q == 4 and set(lines.support) <= {0, 2} and is_hyperoval(K)
    ok, dt = _timed(hyperoval)
    oks, worst = [ok and dt < 10], dt
    for q, n, r, d, h in [(2, 2, 3, 2, 1), (2, 3, 2, 2, 1), (2, 2, 4, 2, 1)]:
        def run():
            K = cons.construction_two(cons.cone_from_params(q, n, r, d, h)).points()
            return len(K) == 2 ** (n * (r - d)) * (pg.space_size(d, 2**n) + 1)
        ok, dt = _timed(run)
        oks.append(ok and dt < 10)
        worst = max(worst, dt)
    assert acceptance_log(4, "construction 2 gives a hyperoval of PG(2,4); q=2 size formula on 3 more sets",
                          all(oks), worst, 10)


def test_criterion_5_hypercylinder_suite(acceptance_log):
    def plane_case():
        q, r = 4, 3
        S = cons.hypercylinder(q, r)
        w = recognize_hypercylinder(S)
        fz = falsification_trials(S, 100, seed=2024)
        return (len(S) == 24
                and profile(S, 1).is_type_exact({0, 2, 4})
                and profile(S, 2).is_type_exact({0, 6, 8})
                and verify_plane_km_theorem(S, q).passed
                and len(verify_plane_km_theorem(S, q).items) == 9
                and w is not None and w.vertex == cons.hypercylinder_vertex(q, r) and w.cylinder() == S
                and fz["rejected"] == 100)
    ok1, dt1 = _timed(plane_case)
    r1 = acceptance_log("5a", "hypercylinder in PG(3,4): size, types, nine items, round trip, 100 perturbations",
                        ok1, dt1, 60)

    def space_case():
        S = cons.hypercylinder(4, 4)
        rep = verify_space_theorem(S, 16)
        w = recognize_hypercylinder(S)
        return len(S) == 96 and rep.passed and w is not None and w.cylinder() == S
    ok2, dt2 = _timed(space_case)
    r2 = acceptance_log("5b", "hypercylinder in PG(4,4): size 96, space theorem items pass", ok2, dt2, 600)
    assert r1 and r2


def _even_sets():
    cyl = {(q, r): cons.hypercylinder(q, r) for q, r in [(2, 3), (4, 3), (8, 3), (2, 4), (4, 4)]}
    out = [(f"hypercylinder q={q} r={r}", S, True) for (q, r), S in cyl.items()]
    out += [(f"hyperoval q={q}", cons.hyperoval_conic_nucleus(q), False) for q in (2, 4, 8)]
    F = cyl[(4, 3)].field
    rng = np.random.default_rng(11)
    for k in range(3):
        # image of the hypercylinder under a random invertible map, then symmetric difference
        while True:
            M = rng.integers(0, 4, size=(4, 4))
            if rank(F, M) == 4:
                break
        S = cyl[(4, 3)]
        T = PointSet(F, 3, F.matmul(S.points, M))
        both = PointSet(F, 3, T.points[S.mask(T.points)])
        out.append((f"symmetric difference {k}", S.union(T).difference(both), False))
    for N in (2, 3, 4):
        F2 = cyl[(2, 3)].field
        P = pg.enumerate_points(F2, N)
        H = PointSet(F2, N, P[P[:, 0] != 0])
        out.append((f"affine part of PG({N},2)", H, False))
    return out


def test_criterion_6_even_set_bound(acceptance_log):
    def run():
        bad = []
        for name, S, is_cyl in _even_sets():
            if not len(S):
                continue
            assert is_even_set(S), name
            b = even_set_bound(S.Q, S.N)
            if len(S) < b or (is_cyl and len(S) != b):
                bad.append(name)
        return not bad
    ok, dt = _timed(run)
    assert acceptance_log(6, "even sets meet the size bound, hypercylinders with equality", ok, dt)


def test_criterion_7_hamming_codes(acceptance_log):
    def sweeps():
        C = ch.hypercylinder_code(4, 3)
        A1 = ch.weights_by_codewords(C)
        A2 = ch.weights_by_hyperplanes(C)
        return C, A1, A2
    (C, A1, A2), dt = _timed(sweeps)
    ok = ((C.n, C.k, ch.minimum_distance(A1)) == (24, 4, 16) and C.field.order == 4
          and ch.nonzero_weights(A1) == [16, 18, 24] and A1 == A2 and sum(A1) == 256)
    r1 = acceptance_log("7a", "hypercylinder code is [24,4,16]_4, weights {16,18,24}, sweeps agree", ok, dt, 1)
    v, dt = _timed(lambda: ch.stability_decide(C, 4, 3, 4))
    r2 = acceptance_log("7b", "stability decision returns the hypercylinder verdict", v.hypercylinder, dt)
    assert r1 and r2


def test_criterion_8_rank_codes(acceptance_log):
    def relweight():
        bad = []
        for q, n in [(2, 2), (2, 3), (3, 2)]:
            for k in (2, 3):
                for name, C in cr.rank_suite(q, n, k, seed=0):
                    res = cr.check_relweight(C)
                    if not (res["ok"] and res["exhaustive"]):
                        bad.append((q, n, k, name))
        return not bad
    ok, dt = _timed(relweight)
    r1 = acceptance_log("8a", "weight identity holds for every codeword, exhaustive", ok, dt, 60)

    def families():
        good = True
        for q, n in [(2, 2), (2, 3), (3, 2)]:
            h = 1
            for r in (2, 3):
                C = cr.cone_rank_code(q, n, r, 2, h)
                W = {w for w in cr.rank_distribution(C)["counts"] if w > 0}
                good &= W <= {n - i for i in range(h + 1)} and min(W) == n - h
            B = cr.construction_one_rank_code(q, n, 2, 2, h)
            W = {w for w in cr.rank_distribution(B)["counts"] if w > 0}
            good &= min(W) == 1 and W <= {1} | set(range(n - h, n + 2))
        return good
    ok, dt = _timed(families)
    r2 = acceptance_log("8b", "cone codes have d = n-h; construction 1 codes have d = 1 and allowed weights", ok, dt)
    assert r1 and r2


def test_criterion_9_substitute_and_oval_sweep(acceptance_log):
    # the converse classification over all sets of the given size and type is not
    # run; its stand-in is the round trip plus perturbation harness of criterion 5
    def run():
        ok = True
        for q, r in [(2, 3), (4, 3), (8, 3), (4, 4), (2, 4)]:
            S = cons.hypercylinder(q, r)
            w = recognize_hypercylinder(S)
            ok &= w is not None and w.cylinder() == S and is_hyperoval(w.basis)
        spec = importlib.util.spec_from_file_location("segre_sweep", ROOT / "scripts" / "segre_sweep.py")
        mod = importlib.util.module_from_spec(spec)
        spec.loader.exec_module(mod)
        res = mod.sweep(mod.SweepConfig(q=5))
        return ok and res["subsets"] == 736281 and res["ovals"] == 3100 and res["all_conics"]
    ok, dt = _timed(run)
    assert acceptance_log(9, "substitute: round trips on 5 hypercylinders; every oval of PG(2,5) is a conic",
                          ok, dt)
