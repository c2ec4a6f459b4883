"""Command-line entry point: construct | verify | code | catalog.

Every output embeds the RunConfig that produced it. JSON is written with
sorted keys and CSV files start with a `# config=` line, so the same
config and seed give byte-identical files.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from . import pg
from . import codes_hamming as ch
from . import codes_rank as cr
from . import constructions as cons
from .linset import hyperplane_profile, is_properly_maximum, predicted_cone_profile
from .psets import (PointSet, even_set_bound, falsification_trials,
                    is_even_set, is_hyperoval, recognize_hypercylinder,
                    verify_plane_km_theorem, verify_space_theorem)

EXIT_PASS, EXIT_FAIL, EXIT_SKIPPED = 0, 1, 2
DEFAULT_GUARDS = dict(pg.GUARDS)


@dataclass
class RunConfig:
    command: str
    target: str | None = None
    params: dict = field(default_factory=dict)
    input: str | None = None
    out: str | None = None
    seed: int = 0
    workers: int = 1
    guards: dict = field(default_factory=dict)

    def header(self) -> str:
        return "# config=" + json.dumps(asdict(self), sort_keys=True, separators=(",", ":"))


# -- output helpers ----------------------------------------------------------------

def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _csv(cfg: RunConfig, header, rows) -> str:
    buf = io.StringIO()
    buf.write(cfg.header() + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _emit(cfg: RunConfig, files: dict[str, str]) -> None:
    """Write name -> text into cfg.out, or print everything when no directory is given."""
    if cfg.out is None:
        for name in sorted(files):
            if len(files) > 1:
                sys.stdout.write(f"==> {name} <==\n")
            sys.stdout.write(files[name])
        return
    os.makedirs(cfg.out, exist_ok=True)
    for name, text in files.items():
        with open(os.path.join(cfg.out, name), "w", newline="") as fh:
            fh.write(text)


def _with_config(cfg: RunConfig, obj: dict) -> dict:
    return {"config": asdict(cfg), **obj}


def _pick(args, names) -> dict:
    return {k: getattr(args, k) for k in names if getattr(args, k, None) is not None}


def _need(params: dict, names) -> list[int]:
    missing = [k for k in names if k not in params]
    if missing:
        raise ValueError("missing parameters: " + ", ".join("--" + m for m in missing))
    return [params[k] for k in names]


def _load_pointset(path: str) -> PointSet:
    with open(path) as fh:
        obj = json.load(fh)
    # accept both a bare point set and the file written by `construct`
    return PointSet.from_json(obj.get("object", obj))


# -- construct -----------------------------------------------------------------------

def cmd_construct(cfg: RunConfig) -> int:
    p, obj = cfg.params, cfg.target
    summary: dict = {"object": obj}
    if obj == "moore":
        q, n, r, h = _need(p, "qnrh")
        L = cons.moore_h_scattered(q, n, r, h)
        payload = L.to_json()
        summary.update(rank=L.k, predicted_rank=r * n // (h + 1), size=L.size(),
                       properly_maximum=is_properly_maximum(L, h))
    elif obj == "cone":
        q, n, r, d, h = _need(p, "qnrdh")
        c = cons.cone_from_params(q, n, r, d, h)
        payload = c.to_json()
        summary.update(rank=c.linset.k, predicted_rank=d * n // (h + 1) + n * (r - d),
                       size=c.linset.size(), predicted_size=cons.cone_size(q, n, r, d, h))
    elif obj in ("construction1", "construction2"):
        q, n, r, d, h = _need(p, "qnrdh")
        c = cons.cone_from_params(q, n, r, d, h)
        spec = cons.construction_one(c) if obj == "construction1" else cons.construction_two(c)
        payload = spec.to_json()
        S = spec.points()
        pred = (cons.construction_one_size if obj == "construction1" else cons.construction_two_size)(q, n, r, d, h)
        summary.update(size=len(S), predicted_size=pred, rank=spec.linset.k)
        if obj == "construction2" and q == 2:
            summary["even_set"] = is_even_set(S)
            if r == 2:
                summary["hyperoval"] = is_hyperoval(S)
    elif obj == "hyperoval":
        (q,) = _need(p, "q")
        H = cons.hyperoval_conic_nucleus(q)
        payload = H.to_json()
        summary.update(size=len(H), predicted_size=q + 2, hyperoval=is_hyperoval(H))
    elif obj == "hypercylinder":
        q, r = _need(p, "qr")
        S = cons.hypercylinder(q, r)
        payload = S.to_json()
        summary.update(size=len(S), predicted_size=q ** (r - 1) + 2 * q ** (r - 2),
                       vertex=cons.hypercylinder_vertex(q, r).basis.tolist())
    else:
        raise ValueError(f"unknown object {obj}")
    sizes_ok = all(summary[k] == summary["predicted_" + k] for k in ("size", "rank")
                   if "predicted_" + k in summary)
    summary["matches_prediction"] = sizes_ok
    _emit(cfg, {f"{obj}.json": _dump(_with_config(cfg, {"object": payload})),
                f"{obj}.summary.json": _dump(_with_config(cfg, {"summary": summary}))})
    return EXIT_PASS if sizes_ok else EXIT_FAIL


# -- verify --------------------------------------------------------------------------

def _verify_ti(p):
    q, n, r, h = _need(p, "qnrh")
    res = cons.predicted_t_check(q, n, r, h)
    res["other_weights"] = {str(k): v for k, v in res["other_weights"].items()}
    return [{"check": "t_i closed form vs enumeration", "pass": res["ok"], "detail": res}]


def _verify_cone_profile(p):
    q, n, r, d, h = _need(p, "qnrdh")
    c = cons.cone_from_params(q, n, r, d, h)
    prof = hyperplane_profile(c.linset)
    pred = predicted_cone_profile(q, n, r, d, h)
    enum = {f"{w},{s}": k for (w, s), k in prof.joint.items()}
    want = {f"{w},{s}": k for (w, s), k in pred.items()}
    return [
        {"check": "cone size", "pass": c.linset.size() == cons.cone_size(q, n, r, d, h),
         "detail": {"enumerated": c.linset.size(), "predicted": cons.cone_size(q, n, r, d, h)}},
        {"check": "hyperplane (weight,size) profile", "pass": enum == want,
         "detail": {"enumerated": enum, "predicted": want}},
    ]


def _verify_construction(p, which):
    q, n, r, h = _need(p, "qnrh")
    d = p.get("d", r)
    c = cons.cone_from_params(q, n, r, d, h)
    spec = cons.construction_one(c) if which == 1 else cons.construction_two(c)
    res = cons.check_construction(spec)
    checks = [{"check": f"construction {which} hyperplane type", "pass": res["ok"], "detail": res}]
    if which == 2 and q == 2:
        S = spec.points()
        checks.append({"check": "q = 2 size formula",
                       "pass": len(S) == 2 ** (n * (r - d)) * (pg.space_size(d, 2**n) + 1),
                       "detail": {"size": len(S)}})
        if r == 2 and d == 2:
            checks.append({"check": "hyperoval", "pass": is_hyperoval(S)})
    return checks


def _target_set(p, cfg, N):
    if cfg.input:
        return _load_pointset(cfg.input)
    (q,) = _need(p, "q")
    return cons.hypercylinder(q, N)


def _verify_km_plane(p, cfg):
    S = _target_set(p, cfg, 3)
    t = p.get("t", S.Q)
    rep = verify_plane_km_theorem(S, t)
    return [{"check": i["name"], "pass": i["pass"], **({"detail": i["witness"]} if "witness" in i else {})}
            for i in rep.items]


def _verify_km_space(p, cfg):
    S = _target_set(p, cfg, p.get("r", 4))
    t = p.get("t", S.Q ** (S.N - 2))
    rep = verify_space_theorem(S, t)
    out = [{"check": i["name"], "pass": i["pass"], **({"detail": i["witness"]} if "witness" in i else {})}
           for i in rep.items]
    out.append({"check": "even-set bound", "pass": len(S) >= even_set_bound(S.Q, S.N) and is_even_set(S)})
    return out


def _verify_stability(p, cfg):
    q, r = _need(p, "qr")
    trials = p.get("trials", 100)
    S = cons.hypercylinder(q, r)
    C = ch.hypercylinder_code(q, r)
    checks = []
    try:
        v = ch.stability_decide(C, q, r, q ** (r - 2))
        checks.append({"check": "stability verdict", "pass": v.hypercylinder, "detail": v.to_json()})
    except ch.HypothesisError as e:
        checks.append({"check": "stability verdict", "skipped": True, "detail": str(e)})
    w = recognize_hypercylinder(S)
    rt = w is not None and w.cylinder() == S
    checks.append({"check": "recognition round trip", "pass": rt,
                   "detail": w.to_json() if w is not None else None})
    fz = falsification_trials(S, trials, cfg.seed)
    checks.append({"check": f"{trials} one-point perturbations rejected",
                   "pass": fz["rejected"] == trials, "detail": fz})
    return checks


def _verify_rank(p, cfg):
    q, n, k = _need(p, "qnk")
    checks = []
    for name, C in cr.rank_suite(q, n, k, cfg.seed):
        res = cr.check_relweight(C, seed=cfg.seed)
        dist = cr.rank_distribution(C, seed=cfg.seed)
        res["d"] = min(w for w in dist["counts"] if w > 0)
        res["ok"] = res["ok"] and res["d"] == res["d_from_system"]
        checks.append({"check": f"relweight identity for {name}", "pass": res["ok"],
                       "detail": {"length": C.length, "k": C.k, **res,
                                  "weights": {str(a): b for a, b in dist["counts"].items()}}})
    return checks


def cmd_verify(cfg: RunConfig) -> tuple[int, dict]:
    p, tgt = cfg.params, cfg.target
    dispatch = {
        "ti-formula": lambda: _verify_ti(p),
        "cone-profile": lambda: _verify_cone_profile(p),
        "construction1-type": lambda: _verify_construction(p, 1),
        "construction2-type": lambda: _verify_construction(p, 2),
        "km-plane": lambda: _verify_km_plane(p, cfg),
        "km-space": lambda: _verify_km_space(p, cfg),
        "stability": lambda: _verify_stability(p, cfg),
        "rank-duality": lambda: _verify_rank(p, cfg),
    }
    if tgt not in dispatch:
        raise ValueError(f"unknown target {tgt}")
    try:
        checks = dispatch[tgt]()
    except pg.GuardError as e:
        checks = [{"check": tgt, "skipped": True, "detail": f"guard: {e}"}]
    ran = [c for c in checks if not c.get("skipped")]
    if any(not c["pass"] for c in ran):
        status, code = "fail", EXIT_FAIL
    elif not ran:
        status, code = "skipped", EXIT_SKIPPED
    else:
        status, code = "pass", EXIT_PASS
    report = _with_config(cfg, {"target": tgt, "status": status, "checks": checks})
    _emit(cfg, {f"verify-{tgt}.json": _dump(report)})
    return code, report


# -- code ----------------------------------------------------------------------------

def cmd_code(cfg: RunConfig) -> int:
    p = cfg.params
    if cfg.target == "hamming":
        if cfg.input:
            S = _load_pointset(cfg.input)
            C = ch.code_from_system(ch.ProjectiveSystem.from_pointset(S))
            pred = None
        else:
            q, r = _need(p, "qr")
            C = ch.hypercylinder_code(q, r)
            pred = {"parameters": list(ch.hypercylinder_parameters(q, r)),
                    "weights": ch.hypercylinder_weights(q, r)}
        A = ch.weight_distribution(C)
        info = {"n": C.n, "k": C.k, "d": ch.minimum_distance(A), "Q": C.field.order,
                "weights": ch.nonzero_weights(A), "projective": C.is_projective()}
        ok = pred is None or (pred["parameters"] == [C.n, C.k, info["d"]] and pred["weights"] == info["weights"])
        rows = [(w, c) for w, c in enumerate(A) if c]
        files = {"hamming.json": _dump(_with_config(cfg, {"code": C.to_json(), "summary": info, "predicted": pred})),
                 "hamming.weights.csv": _csv(cfg, ["weight", "count"], rows)}
    elif cfg.target == "rank":
        q, n, r, d, h = _need(p, "qnrdh")
        if p.get("family", "cone") == "cone":
            C = cr.cone_rank_code(q, n, r, d, h)
            pred = cr.cone_rank_parameters(q, n, r, d, h)
            allowed = {n - i for i in range(h + 1)}
        else:
            C = cr.construction_one_rank_code(q, n, r, d, h)
            pred = cr.construction_one_rank_parameters(q, n, r, d, h)
            allowed = {1} | set(range(n - h, n + 2))
        dist = cr.rank_distribution(C, seed=cfg.seed)
        ws = sorted(w for w in dist["counts"] if w > 0)
        info = {"length": C.length, "k": C.k, "d": ws[0], "weights": ws, "exhaustive": dist["exhaustive"],
                "field": f"{q ** n}/{q}"}
        ok = list(pred) == [C.length, C.k, ws[0]] and set(ws) <= allowed
        rows = sorted(dist["counts"].items())
        files = {"rank.json": _dump(_with_config(cfg, {"code": C.to_json(), "summary": info,
                                                        "predicted": {"parameters": list(pred),
                                                                      "weights_allowed": sorted(allowed)}})),
                 "rank.weights.csv": _csv(cfg, ["rank_weight", "count"], rows)}
    else:
        raise ValueError(f"unknown code family {cfg.target}")
    _emit(cfg, files)
    return EXIT_PASS if ok else EXIT_FAIL


# -- catalog -------------------------------------------------------------------------

GRIDS = {
    "small": [
        ("hamming-hypercylinder", (2, 3)), ("hamming-hypercylinder", (4, 3)),
        ("hamming-hypercylinder", (2, 4)), ("hamming-hypercylinder", (8, 3)),
        ("hamming-hypercylinder", (4, 4)),
        ("rank-cone", (2, 2, 2, 2, 1)), ("rank-cone", (2, 3, 2, 2, 1)), ("rank-cone", (3, 2, 2, 2, 1)),
        ("rank-cone", (2, 2, 3, 2, 1)), ("rank-cone", (2, 3, 3, 2, 1)), ("rank-cone", (2, 3, 3, 3, 2)),
        ("rank-construction1", (2, 2, 2, 2, 1)), ("rank-construction1", (2, 3, 2, 2, 1)),
        ("rank-construction1", (3, 2, 2, 2, 1)), ("rank-construction1", (2, 2, 3, 2, 1)),
    ],
}


def catalog_row(entry, seed: int = 0):
    family, params = entry
    if family == "hamming-hypercylinder":
        C = ch.hypercylinder_code(*params)
        A = ch.weight_distribution(C)
        counts = {w: c for w, c in enumerate(A) if c and w}
        length, k = C.n, C.k
    else:
        C = (cr.cone_rank_code if family == "rank-cone" else cr.construction_one_rank_code)(*params)
        counts = {w: c for w, c in cr.rank_distribution(C, seed=seed)["counts"].items() if w}
        length, k = C.length, C.k
    ws = sorted(counts)
    return (family, " ".join(map(str, params)), length, k, ws[0],
            " ".join(map(str, ws)), " ".join(str(counts[w]) for w in ws))


def cmd_catalog(cfg: RunConfig) -> int:
    grid = GRIDS[cfg.params.get("grid", "small")]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as ex:
            rows = list(ex.map(catalog_row, grid, [cfg.seed] * len(grid)))
    else:
        rows = [catalog_row(e, cfg.seed) for e in grid]
    head = ["family", "params", "length", "dimension", "min_distance", "weights", "counts"]
    _emit(cfg, {"catalog.csv": _csv(cfg, head, rows)})
    return EXIT_PASS


# -- argument parsing ----------------------------------------------------------------

PARAMS = ("p", "e", "q", "n", "r", "d", "h", "t", "k")


def _add_params(sp, names):
    for k in names:
        sp.add_argument(f"--{k}", type=int)


def build_parser() -> argparse.ArgumentParser:
    # global flags are accepted before or after the subcommand; only the top
    # level carries defaults so a later subparser never overwrites them
    def globals_(parser, top):
        dflt = (lambda v: v) if top else (lambda v: argparse.SUPPRESS)
        parser.add_argument("--seed", type=int, default=dflt(0))
        parser.add_argument("--workers", type=int, default=dflt(os.cpu_count() or 1),
                            help="process cap for parallel paths (default: available cores)")
        parser.add_argument("--out", default=dflt(None), help="output directory (default: stdout)")
        parser.add_argument("--max-points", type=int, default=dflt(None),
                            help=f"point guard, at most {int(pg.CEILINGS['points'])}")
        parser.add_argument("--max-subspaces", type=int, default=dflt(None),
                            help=f"subspace guard, at most {int(pg.CEILINGS['subspaces'])}")
        return parser

    common = globals_(argparse.ArgumentParser(add_help=False), top=False)
    ap = globals_(argparse.ArgumentParser(prog="hypercyl", description=__doc__.splitlines()[0]), top=True)
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", parents=[common], help="build an object and compare it with its predicted size")
    c.add_argument("object", choices=["moore", "cone", "construction1", "construction2", "hyperoval",
                                      "hypercylinder"])
    _add_params(c, "qnrdh")

    v = sub.add_parser("verify", parents=[common], help="run a theorem suite")
    v.add_argument("target", choices=["ti-formula", "cone-profile", "construction1-type", "construction2-type",
                                      "km-plane", "km-space", "stability", "rank-duality"])
    _add_params(v, "qnrdhtk")
    v.add_argument("--trials", type=int)
    v.add_argument("--input", help="point set JSON for km-plane / km-space")

    cd = sub.add_parser("code", help="extract a code and its weight distribution")
    cs = cd.add_subparsers(dest="family", required=True)
    hm = cs.add_parser("hamming", parents=[common])
    src = hm.add_mutually_exclusive_group(required=True)
    src.add_argument("--hypercylinder", action="store_true")
    src.add_argument("--from-set", dest="input")
    _add_params(hm, "qr")
    rk = cs.add_parser("rank", parents=[common])
    kind = rk.add_mutually_exclusive_group(required=True)
    kind.add_argument("--cone", dest="kind", action="store_const", const="cone")
    kind.add_argument("--construction1", dest="kind", action="store_const", const="construction1")
    _add_params(rk, "qnrdh")

    cat = sub.add_parser("catalog", parents=[common], help="one CSV row per code of a parameter grid")
    cat.add_argument("--grid", choices=sorted(GRIDS), default="small")
    return ap


def config_from_args(args) -> RunConfig:
    params = _pick(args, PARAMS + ("trials", "grid"))
    target = getattr(args, "object", None) or getattr(args, "target", None) or getattr(args, "family", None)
    if args.command == "code" and args.family == "rank":
        params["family"] = args.kind
    if args.command == "catalog":
        target = args.grid
    guards = dict(DEFAULT_GUARDS)
    if args.max_points is not None:
        guards["points"] = args.max_points
    if args.max_subspaces is not None:
        guards["subspaces"] = args.max_subspaces
    for v in params.values():
        if isinstance(v, int) and v < 0:
            raise ValueError("parameters must be non-negative")
    return RunConfig(command=args.command, target=target, params=params,
                     input=getattr(args, "input", None), out=args.out, seed=args.seed,
                     workers=max(1, args.workers), guards=guards)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        for name, val in cfg.guards.items():
            pg.set_guard(name, val)
        t0 = time.perf_counter()
        if cfg.command == "construct":
            code = cmd_construct(cfg)
        elif cfg.command == "verify":
            code, _ = cmd_verify(cfg)
        elif cfg.command == "code":
            code = cmd_code(cfg)
        else:
            code = cmd_catalog(cfg)
        print(f"[{cfg.command}] exit {code} in {time.perf_counter() - t0:.2f}s", file=sys.stderr)
        return code
    except (ValueError, ArithmeticError, cons.VerificationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
