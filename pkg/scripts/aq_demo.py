"""Levelwise image floors in the A(q) tower, with and without perturbed constants.

    python scripts/aq_demo.py --q 3 --levels 1 6 --epsilon 1/8
"""

import argparse
import json
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from wordmaps.field import field_make
from wordmaps.tower import aq_sweep
from wordmaps.words import random_word


@dataclass
class DemoConfig:
    q: int = 2
    base_n: int = 2
    length: int = 3
    r: int = 2
    levels: tuple[int, int] = (1, 6)
    epsilon: Fraction = Fraction(1, 8)
    seed: int = 0


def run(cfg: DemoConfig) -> dict:
    F = field_make(cfg.q)
    rng = np.random.default_rng(cfg.seed)
    w = random_word(F, cfg.base_n, cfg.length, cfg.r, rng, boundary=True)
    lo, hi = cfg.levels
    reps = aq_sweep(w, range(lo, hi + 1), cfg.epsilon, cfg.seed)
    return {"config": {k: str(v) for k, v in asdict(cfg).items()}, "levels": [rep.to_json() for rep in reps]}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--q", type=int, default=2)
    ap.add_argument("--base-n", type=int, default=2)
    ap.add_argument("--length", type=int, default=3)
    ap.add_argument("--levels", type=int, nargs=2, default=(1, 6))
    ap.add_argument("--epsilon", type=Fraction, default=Fraction(1, 8))
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    cfg = DemoConfig(q=a.q, base_n=a.base_n, length=a.length, levels=tuple(a.levels), epsilon=a.epsilon, seed=a.seed)
    print(json.dumps(run(cfg), indent=2))


if __name__ == "__main__":
    main()
