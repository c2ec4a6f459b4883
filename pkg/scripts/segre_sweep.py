"""Exhaustive sweep of (q+1)-subsets of PG(2,q), q odd: every oval should lie on a conic.

    python scripts/segre_sweep.py --q 5
"""
import argparse
import itertools
import json
import time
from dataclasses import asdict, dataclass

import numpy as np

from hypercyl import pg
from hypercyl.galois import batch_rank, field_of_order


@dataclass
class SweepConfig:
    q: int = 5
    chunk: int = 1 << 16


def _collinear_table(F, P):
    # det of every triple of points, via rank of the stacked 3x3 matrices
    n = len(P)
    idx = np.indices((n, n, n)).reshape(3, -1).T
    M = P[idx]  # (n^3, 3, 3)
    return (batch_rank(F, M) < 3).reshape(n, n, n)


def _monomials(F, P):
    x, y, z = P[:, 0], P[:, 1], P[:, 2]
    return np.stack([F.mul(x, x), F.mul(y, y), F.mul(z, z), F.mul(x, y), F.mul(x, z), F.mul(y, z)], axis=-1)


def sweep(cfg: SweepConfig) -> dict:
    F = field_of_order(cfg.q)
    if F.p == 2:
        raise ValueError("ovals are conics only for q odd")
    P = pg.enumerate_points(F, 2)
    col = _collinear_table(F, P)
    mono = _monomials(F, P)
    k = cfg.q + 1
    triples = np.array(list(itertools.combinations(range(k), 3)))
    combos = itertools.combinations(range(len(P)), k)
    subsets = arcs = conics = 0
    while True:
        block = np.array(list(itertools.islice(combos, cfg.chunk)), dtype=np.int64)
        if not len(block):
            break
        subsets += len(block)
        T = block[:, triples]  # (B, 20, 3)
        is_arc = ~col[T[..., 0], T[..., 1], T[..., 2]].any(axis=1)
        A = block[is_arc]
        arcs += len(A)
        # a nonzero quadratic form vanishes on the set iff the monomial rows have rank <= 5
        on_conic = batch_rank(F, mono[A]) <= 5
        conics += int(on_conic.sum())
    return {"q": cfg.q, "subsets": subsets, "ovals": arcs, "on_a_conic": conics,
            "all_conics": arcs == conics}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--q", type=int, default=5)
    args = ap.parse_args(argv)
    cfg = SweepConfig(q=args.q)
    t0 = time.perf_counter()
    res = sweep(cfg)
    res["seconds"] = round(time.perf_counter() - t0, 2)
    print(json.dumps({"config": asdict(cfg), **res}, indent=2))
    return 0 if res["all_conics"] else 1


if __name__ == "__main__":
    raise SystemExit(main())
