"""Run the catalog grid twice and check the CSV output is byte-identical.

    python scripts/run_catalog.py --out results/ --seed 0
"""
import argparse
import hashlib
import os
from dataclasses import dataclass

from hypercyl.cli import main as cli_main


@dataclass
class CatalogConfig:
    out: str = "results"
    grid: str = "small"
    seed: int = 0
    workers: int = 1


def run(cfg: CatalogConfig) -> str:
    argv = ["--out", cfg.out, "--seed", str(cfg.seed), "--workers", str(cfg.workers),
            "catalog", "--grid", cfg.grid]
    if cli_main(argv) != 0:
        raise SystemExit("catalog run failed")
    with open(os.path.join(cfg.out, "catalog.csv"), "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results")
    ap.add_argument("--grid", default="small")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    cfg = CatalogConfig(**vars(ap.parse_args(argv)))
    a, b = run(cfg), run(cfg)
    print(f"sha256 {a}\nrerun  {b}\n{'identical' if a == b else 'DIFFERENT'}")
    return 0 if a == b else 1


if __name__ == "__main__":
    raise SystemExit(main())
