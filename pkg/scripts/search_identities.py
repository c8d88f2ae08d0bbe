"""Exhaustive search for short mixed identities in small matrix groups.

    python scripts/search_identities.py --group GL --n 2 --q 2 --max-length 5
"""

import argparse
import json
from collections import Counter
from dataclasses import asdict, dataclass

from wordmaps.identities import enumerate_group, identity_set, normal_form, shortest_identity_search


@dataclass
class SearchConfig:
    group: str = "GL"
    n: int = 2
    q: int = 2
    r: int = 1
    max_length: int = 5
    budget: int = 10**8
    compare_unpruned: bool = True


def run(cfg: SearchConfig) -> dict:
    G = enumerate_group(cfg.group, cfg.n, cfg.q)
    kw = dict(mode="all", stop_at_first=False, budget=cfg.budget)
    pruned = shortest_identity_search(G, cfg.r, cfg.max_length, prune=True, **kw)
    out = {
        "config": asdict(cfg),
        "group": G.describe(),
        "minimal_length": pruned.minimal_length,
        "pruned_hits_by_length": dict(Counter(rec["length"] for rec in pruned.identities)),
        "examples": [rec["word"] for rec in pruned.identities[:5]],
    }
    if cfg.compare_unpruned:
        full = shortest_identity_search(G, cfg.r, cfg.max_length, prune=False, **kw)
        out["unpruned_hits_by_length"] = dict(Counter(rec["length"] for rec in full.identities))
        a = {normal_form(G, w) for w in identity_set(pruned)}
        b = {normal_form(G, w) for w in identity_set(full)}
        out["normal_forms_agree"] = a == b
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--group", choices=["GL", "SL", "PSL"], default="GL")
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--q", type=int, default=2)
    ap.add_argument("--r", type=int, default=1)
    ap.add_argument("--max-length", type=int, default=5)
    ap.add_argument("--budget", type=int, default=10**8)
    ap.add_argument("--no-compare", action="store_true")
    a = ap.parse_args()
    cfg = SearchConfig(a.group, a.n, a.q, a.r, a.max_length, a.budget, not a.no_compare)
    print(json.dumps(run(cfg), indent=2, default=str))


if __name__ == "__main__":
    main()
