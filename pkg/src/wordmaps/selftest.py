"""Quick invariant checks behind ``wordmaps selftest``; each returns a small dict."""

from __future__ import annotations

import itertools

import numpy as np

from .field import field_make
from .identities import enumerate_group, is_law
from .linalg import MatrixFq, Subspace, random_invertible, subspace_intersect, subspace_preimage
from .seminorm import projective_dist, projective_norm
from .tower import TowerElement, diagonal_embed, normalized_norm
from .witness import construct_witness, max_admissible_d, random_instance
from .words import random_word


def check_field_axioms(seed: int) -> dict:
    bad = 0
    for p, e in [(2, 1), (3, 1), (2, 2), (3, 2), (2, 3)]:
        F = field_make(p, e)
        a, b, c = (F.elements()[:, None, None], F.elements()[None, :, None], F.elements()[None, None, :])
        bad += int(np.any(F.mul(a, F.add(b, c)) != F.add(F.mul(a, b), F.mul(a, c))))
        nz = F.nonzero()
        bad += int(np.any(F.mul(nz, F.inv(nz)) != 1))
    return {"ok": bad == 0, "violations": bad}


def check_subspace_oracle(seed: int, trials: int = 40) -> dict:
    F = field_make(2)
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(trials):
        n = int(rng.integers(2, 6))
        A = Subspace.from_vectors(F, n, F.random(rng, (int(rng.integers(0, n + 1)), n)))
        B = Subspace.from_vectors(F, n, F.random(rng, (int(rng.integers(0, n + 1)), n)))
        every = np.array(list(itertools.product(range(2), repeat=n)), dtype=np.int64)
        inter = {tuple(v) for v in every if A.contains(v) and B.contains(v)}
        bad += int(inter != {tuple(v) for v in subspace_intersect(A, B).vectors()})
        c = F.random(rng, (n, n))
        pre = {tuple(v) for v in every if B.contains(F.matmul(v, c))}
        bad += int(pre != {tuple(v) for v in subspace_preimage(MatrixFq(F, c), B).vectors()})
    return {"ok": bad == 0, "violations": bad, "trials": trials}


def check_seminorm(seed: int, trials: int = 30) -> dict:
    F = field_make(3)
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(trials):
        g, h, k = (random_invertible(F, 6, rng) for _ in range(3))
        bad += int(projective_norm(g @ h) > projective_norm(g) + projective_norm(h))
        bad += int(projective_dist(g, h) != projective_dist(h, g))
        bad += int(projective_norm(k @ g @ k.inv()) != projective_norm(g))
    return {"ok": bad == 0, "violations": bad, "trials": trials}


def check_witness(seed: int, trials: int = 10) -> dict:
    rng = np.random.default_rng(seed)
    bad = 0
    for t in range(trials):
        F = field_make(*[(2, 1), (3, 1), (2, 2), (5, 1)][t % 4])
        w = random_word(F, 8, int(rng.integers(2, 4)), int(rng.integers(1, 3)), rng, boundary=True)
        d = max_admissible_d(w, "GL")
        if d < 1:
            continue
        src, tgt = random_instance(w, d, rng)
        res = construct_witness(w, src, tgt, "GL", seed=t)
        bad += int(not res.verified)
    return {"ok": bad == 0, "violations": bad, "trials": trials}


def check_tower(seed: int, trials: int = 10) -> dict:
    rng = np.random.default_rng(seed)
    bad = 0
    for q in (2, 3):
        F = field_make(q)
        for _ in range(trials):
            g = TowerElement(1, random_invertible(F, 2, rng))
            bad += int(normalized_norm(diagonal_embed(g, 3)) != normalized_norm(g))
    return {"ok": bad == 0, "violations": bad}


def check_identity(seed: int) -> dict:
    G = enumerate_group("GL", 2, 2)
    law = is_law([(1, 1)] * 6, G)
    not_law = not is_law([(1, 1)] * 2, G)
    return {"ok": law and not_law and G.order == 6, "x6_is_law": law}


CHECKS = {
    "field_axioms": check_field_axioms,
    "subspace_oracle": check_subspace_oracle,
    "seminorm_axioms": check_seminorm,
    "witness_soundness": check_witness,
    "tower_isometry": check_tower,
    "identity_exponent": check_identity,
}


def run_selftest(seed: int = 0) -> dict:
    results = {}
    for name, fn in CHECKS.items():
        results[name] = fn(seed)
    return {"ok": all(r["ok"] for r in results.values()), "seed": seed, "checks": results}
