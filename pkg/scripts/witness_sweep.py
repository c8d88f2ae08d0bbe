"""Sweep witness construction over fields, dimensions and word shapes.

    python scripts/witness_sweep.py --runs 200 --seed 0
"""

import argparse
import json
import time
from collections import Counter
from dataclasses import asdict, dataclass, field

import numpy as np

from wordmaps.field import field_make
from wordmaps.witness import construct_witness, max_admissible_d, random_instance
from wordmaps.words import evaluate, random_word

FIELDS = {2: (2, 1), 3: (3, 1), 4: (2, 2), 5: (5, 1), 7: (7, 1), 8: (2, 3), 9: (3, 2)}


@dataclass
class SweepConfig:
    runs: int = 100
    seed: int = 0
    qs: tuple[int, ...] = (2, 3, 4, 5)
    ns: tuple[int, ...] = (8, 12, 16)
    lengths: tuple[int, int] = (2, 6)
    variables: tuple[int, int] = (1, 3)
    group: str = "GL"
    out: str | None = None
    extra: dict = field(default_factory=dict)


def run(cfg: SweepConfig) -> dict:
    tally = Counter()
    worst_margin = None
    start = time.perf_counter()
    for k in range(cfg.runs):
        rng = np.random.default_rng([cfg.seed, k])
        q = cfg.qs[k % len(cfg.qs)]
        n = cfg.ns[(k // len(cfg.qs)) % len(cfg.ns)]
        F = field_make(*FIELDS[q])
        l = int(rng.integers(cfg.lengths[0], cfg.lengths[1] + 1))
        r = int(rng.integers(cfg.variables[0], cfg.variables[1] + 1))
        w = random_word(F, n, l, r, rng, boundary=True)
        d = max_admissible_d(w, cfg.group)
        if d == 0:
            tally["skipped_d0"] += 1
            continue
        src, tgt = random_instance(w, d, rng)
        res = construct_witness(w, src, tgt, cfg.group, seed=k)
        g = evaluate(w, res.h)
        tally["exact" if all(np.array_equal(g.apply(s), t) for s, t in zip(src, tgt)) else "mismatch"] += 1
        for c in res.trace.certificates():
            tally["certificates"] += 1
            tally["certificate_violations"] += not c["holds"]
            margin = c["rhs"] - c["lhs"]
            worst_margin = margin if worst_margin is None else min(worst_margin, margin)
    return {
        "config": asdict(cfg),
        "tally": dict(tally),
        "smallest_certificate_margin": worst_margin,
        "seconds": round(time.perf_counter() - start, 2),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--runs", type=int, default=SweepConfig.runs)
    ap.add_argument("--seed", type=int, default=SweepConfig.seed)
    ap.add_argument("--group", choices=["GL", "SL"], default="GL")
    ap.add_argument("--out")
    a = ap.parse_args()
    report = run(SweepConfig(runs=a.runs, seed=a.seed, group=a.group, out=a.out))
    text = json.dumps(report, indent=2, default=str)
    if a.out:
        with open(a.out, "w") as fh:
            fh.write(text + "\n")
    print(text)


if __name__ == "__main__":
    main()
