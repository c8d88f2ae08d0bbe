"""Diameter bounds for word images in GL_n(q) and SL_n(q)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from .errors import HypothesesFail, NotReduced, SingularWord, TooShort
from .linalg import MatrixFq, _rank, mat_det, mat_inv, random_invertible
from .seminorm import critical_length, projective_norm
from .witness import _group, caveat_applies, construct_witness, transitivity_degree
from .words import (
    WordWithConstants,
    evaluate,
    is_reduced,
    is_singular,
    strong_reduction_chain,
)


def diameter_floor_exact(w: WordWithConstants) -> Fraction:
    if not is_reduced(w):
        raise NotReduced("diameter floor needs a reduced word")
    if w.l < 2:
        raise TooShort(f"diameter floor needs l >= 2, got {w.l}")
    return Fraction(critical_length(w), w.l) - 1


def diameter_floor(w: WordWithConstants) -> int:
    """ceil(crit / l) - 1, the integer form of crit / l - 1."""
    return math.ceil(diameter_floor_exact(w))


def pair_degree(w: WordWithConstants, group: str = "GL") -> int:
    """d = floor(min(crit - 1, D) / l), with the extra d*l < n headroom for SL."""
    crit = critical_length(w)
    d = min(crit - 1, transitivity_degree(w.n, group)) // w.l
    if _group(group) == "SL":
        while d > 0 and d * w.l >= w.n:
            d -= 1
    return max(d, 0)


@dataclass
class DistantPair:
    g: MatrixFq
    h: MatrixFq
    dist: int
    d: int
    min_rank: int
    tuples: tuple[list[MatrixFq], list[MatrixFq]]


def realize_distant_pair(w: WordWithConstants, seed=0, group: str = "GL") -> DistantPair:
    """Two witnesses g = w(h), h = w(h') with g^{-1}h moving a d-frame off itself.

    In normalized coordinates the sources are e_1..e_d, the first targets
    e_{d+1}..e_{2d} and the second targets e_i + e_{d+i}.  Then
    (g^{-1}h - lam) sends e_{d+i} to e_i + (1 - lam) e_{d+i}, which are
    independent for every lam, so rank(g^{-1}h - lam) >= d.
    """
    group = _group(group)
    if w.l < 2:
        raise HypothesesFail("realize_distant_pair needs l >= 2", ["length"])
    if not is_reduced(w):
        raise HypothesesFail("realize_distant_pair needs a reduced word", ["reduced"])
    n, F = w.n, w.field
    d = pair_degree(w, group)
    if d < 1:
        raise HypothesesFail("d = floor(min(crit - 1, D) / l) is 0", ["transitivity_bound"])
    if 2 * d > n:
        raise HypothesesFail(f"2d = {2 * d} exceeds n = {n}", ["pair_headroom"])
    eye = np.eye(n, dtype=np.int64)
    src = eye[:d]
    tgt_a = eye[d : 2 * d]
    tgt_b = (eye[:d] + eye[d : 2 * d]) % F.p
    # pull the normalized frames back through the boundary constants
    c0, cl = w.constants[0], w.constants[-1]
    src = F.matmul(src, mat_inv(c0).data)
    tgt_a = F.matmul(tgt_a, cl.data)
    tgt_b = F.matmul(tgt_b, cl.data)
    ra = construct_witness(w, src, tgt_a, group, seed)
    rb = construct_witness(w, src, tgt_b, group, [int(seed), 1])
    g = evaluate(w, ra.h)
    h = evaluate(w, rb.h)
    delta = mat_inv(g) @ h
    ranks = [_rank(F, delta.minus_scalar(lam).data) for lam in range(1, F.q)]
    return DistantPair(g, h, projective_norm(delta), d, min(ranks), (ra.h, rb.h))


def _random_tuple(w: WordWithConstants, rng: np.random.Generator, group: str) -> list[MatrixFq]:
    out = []
    for _ in range(w.r):
        m = random_invertible(w.field, w.n, rng)
        if group == "SL":
            F = w.field
            data = m.data.copy()
            data[0] = F.mul(data[0], int(F.inv(mat_det(m))))
            m = MatrixFq(F, data)
        out.append(m)
    return out


def image_samples(w: WordWithConstants, samples: int, seed=0, group: str = "GL") -> list[MatrixFq]:
    """Seeded image points; the first k points do not depend on ``samples``."""
    group = _group(group)
    rng = np.random.default_rng(seed)
    return [evaluate(w, _random_tuple(w, rng, group)) for _ in range(samples)]


def empirical_diameter(w: WordWithConstants, samples: int, seed=0, group: str = "GL") -> int:
    """Max pairwise projective distance over sampled image points (a lower bound on diam)."""
    if samples < 2:
        raise ValueError("empirical_diameter needs at least 2 samples")
    pts = image_samples(w, samples, seed, group)
    invs = [mat_inv(p) for p in pts]
    best = 0
    for a in range(len(pts)):
        for b in range(a + 1, len(pts)):
            if best == w.n:
                return best
            best = max(best, projective_norm(invs[a] @ pts[b]))
    return best


def chain_constant(length: int) -> Fraction:
    """B(w) = 1 / ((1 + 2l)^floor(l/2) * l)."""
    return Fraction(1, (1 + 2 * length) ** (length // 2) * length)


def diameter_lower_bound(w: WordWithConstants, seed=0, samples: int = 4, group: str = "GL") -> tuple[int, str]:
    """Best certified lower bound on diam(w(G^r)) and where it came from."""
    best, source = 0, "none"
    if w.l >= 2 and is_reduced(w) and pair_degree(w, group) >= 1:
        best, source = realize_distant_pair(w, seed, group).dist, "constructed"
    if samples >= 2 and best < w.n:
        emp = empirical_diameter(w, samples, seed, group)
        if emp > best:
            best, source = emp, "sampled"
    return best, source


@dataclass
class ChainStep:
    length: int
    crit: int
    lower_bound: int
    source: str
    ineq_ok: bool
    step_ok: bool | None = None
    one_sided: bool = False


@dataclass
class ChainReport:
    B: Fraction
    n: int
    lower_bound: int
    verdict: bool
    steps: list[ChainStep] = dc_field(default_factory=list)

    @property
    def chain_length(self) -> int:
        return len(self.steps) - 1


def chain_bound(w: WordWithConstants, seed=0, samples: int = 4, group: str = "GL") -> ChainReport:
    """Check n * B(w) <= lb(diam) + 1 and the per-step chain inequalities on lower bounds."""
    if is_singular(w):
        raise SingularWord("chain bound needs a non-singular word")
    if not is_reduced(w):
        raise NotReduced("chain bound needs a reduced word")
    steps: list[ChainStep] = []
    for wj in strong_reduction_chain(w):
        lb, src = diameter_lower_bound(wj, seed, samples, group)
        crit = critical_length(wj, require_reduced=False)
        step = ChainStep(wj.l, crit, lb, src, wj.l * (lb + 1) >= crit)
        if steps:
            prev = steps[-1]
            step.step_ok = lb + 1 <= (1 + 2 * prev.length) * (prev.lower_bound + 1)
            step.one_sided = "none" in (src, prev.source)
        steps.append(step)
    B = chain_constant(w.l)
    lb0 = steps[0].lower_bound
    return ChainReport(B, w.n, lb0, w.n * B <= lb0 + 1, steps)


def rank_d_subquotient_check(w: WordWithConstants, d: int, samples: int = 50, seed=0, group: str = "GL") -> bool:
    """Every sampled rank-d target frame is reached from e_1..e_d by some w(h)."""
    if d == 0:
        return True
    rng = np.random.default_rng(seed)
    F, n = w.field, w.n
    src = F.matmul(np.eye(n, dtype=np.int64)[:d], mat_inv(w.constants[0]).data)
    for s in range(samples):
        while True:
            tgt = F.random(rng, (d, n))
            if _rank(F, tgt) == d:
                break
        if caveat_applies(w):
            # targets must meet span(e_1..e_d) trivially after normalization
            while _rank(F, np.vstack([np.eye(n, dtype=np.int64)[:d], tgt])) < 2 * d:
                tgt = F.random(rng, (d, n))
        construct_witness(w, src, F.matmul(tgt, w.constants[-1].data), group, seed=s)
    return True


@dataclass
class DiameterReport:
    theoretical_floor: int
    floor_exact: Fraction
    realized: int | None
    d: int
    empirical_max: int
    chain_bound: Fraction | None
    chain_verdict: bool | None
    n: int
    l: int
    crit: int
    group: str
    samples: int
    seed: int

    def to_json(self) -> dict:
        return {
            "theoretical_floor": self.theoretical_floor,
            "floor_exact": str(self.floor_exact),
            "realized": self.realized,
            "d": self.d,
            "empirical_max": self.empirical_max,
            "chain_bound": None if self.chain_bound is None else str(self.chain_bound),
            "chain_verdict": self.chain_verdict,
            "n": self.n,
            "l": self.l,
            "crit": self.crit,
            "group": self.group,
            "samples": self.samples,
            "seed": self.seed,
        }


def diameter_report(w: WordWithConstants, samples: int = 8, seed: int = 0, group: str = "GL") -> DiameterReport:
    group = _group(group)
    floor = diameter_floor(w)
    d = pair_degree(w, group)
    realized = realize_distant_pair(w, seed, group).dist if d >= 1 else None
    emp = empirical_diameter(w, samples, seed, group) if samples >= 2 else 0
    if is_singular(w):
        B, verdict = None, None
    else:
        rep = chain_bound(w, seed, samples, group)
        B, verdict = rep.B, rep.verdict
    return DiameterReport(
        floor, diameter_floor_exact(w), realized, d, emp, B, verdict,
        w.n, w.l, critical_length(w), group, samples, seed,
    )
