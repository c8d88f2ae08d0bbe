"""Finite levels of the tower GL_2(q) < GL_4(q) < ... under diagonal embeddings.

Only finite levels are ever built; the normalized metric makes the embeddings
isometric, so level-indexed reports stand in for the completion.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from .errors import LevelDecrease, LevelMismatch, Singular, ValidationError
from .image import diameter_floor
from .linalg import MatrixFq, _rank
from .seminorm import critical_length, projective_dist, projective_norm
from .words import WordWithConstants

MAX_LEVEL = 8
PERTURB_RETRIES = 64


@dataclass(frozen=True, eq=False)
class TowerElement:
    level: int
    matrix: MatrixFq

    def __post_init__(self):
        if self.matrix.shape != (2**self.level, 2**self.level):
            raise ValidationError(f"level {self.level} needs a {2**self.level}x{2**self.level} matrix")
        if _rank(self.matrix.field, self.matrix.data) < self.matrix.rows:
            raise Singular("tower elements must be invertible")

    @property
    def field(self):
        return self.matrix.field

    def __matmul__(self, other: "TowerElement") -> "TowerElement":
        if other.level != self.level:
            raise LevelMismatch("multiply at a common level")
        return TowerElement(self.level, self.matrix @ other.matrix)

    def inv(self) -> "TowerElement":
        return TowerElement(self.level, self.matrix.inv())

    def __eq__(self, other) -> bool:
        return isinstance(other, TowerElement) and self.level == other.level and self.matrix == other.matrix

    def __hash__(self) -> int:
        return hash((self.level, self.matrix))


def level_of(n: int) -> int:
    if n < 1 or n & (n - 1):
        raise ValidationError(f"dimension {n} is not a power of two")
    return n.bit_length() - 1


def embed_matrix(m: MatrixFq, copies: int) -> MatrixFq:
    return MatrixFq(m.field, np.kron(np.eye(copies, dtype=np.int64), m.data))


def diagonal_embed(g: TowerElement, target_level: int) -> TowerElement:
    if target_level < g.level:
        raise LevelDecrease(f"cannot embed level {g.level} into level {target_level}")
    if target_level == g.level:
        return g
    return TowerElement(target_level, embed_matrix(g.matrix, 2 ** (target_level - g.level)))


def normalized_norm(g: TowerElement) -> Fraction:
    return Fraction(projective_norm(g.matrix), 2**g.level)


def normalized_dist(a: TowerElement, b: TowerElement) -> Fraction:
    if a.level != b.level:
        raise LevelMismatch(f"levels {a.level} and {b.level} differ; embed first")
    return Fraction(projective_dist(a.matrix, b.matrix), 2**a.level)


def random_tower_element(field, level: int, rng: np.random.Generator) -> TowerElement:
    from .linalg import random_invertible

    return TowerElement(level, random_invertible(field, 2**level, rng))


def low_rank_perturbation(c: MatrixFq, rank: int, rng: np.random.Generator) -> MatrixFq:
    """c (I + E) with rank E <= rank, retried until invertible."""
    F, N = c.field, c.rows
    if rank == 0:
        return c
    for _ in range(PERTURB_RETRIES):
        E = F.matmul(F.random(rng, (N, rank)), F.random(rng, (rank, N)))
        idx = np.arange(N)
        E[idx, idx] = F.add(E[idx, idx], 1)
        if _rank(F, E) == N:
            return c @ MatrixFq(F, E)
    raise Singular(f"no invertible rank-{rank} perturbation found in {PERTURB_RETRIES} tries")


def embed_word(w: WordWithConstants, level: int) -> WordWithConstants:
    base = level_of(w.n)
    if level < base:
        raise LevelDecrease(f"word lives at level {base}, cannot move to {level}")
    k = 2 ** (level - base)
    return WordWithConstants(w.field, 2**level, w.r, w.letters, tuple(embed_matrix(c, k) for c in w.constants))


@dataclass
class LevelReport:
    level: int
    dim: int
    crit: int
    crit_normalized: Fraction
    floor: int
    floor_normalized: Fraction
    positive: bool
    status: str
    epsilon: Fraction
    perturbed_floor_normalized: Fraction | None = None
    difference: Fraction | None = None
    bound: Fraction | None = None
    within_bound: bool | None = None
    perturbation_dists: list[Fraction] = dc_field(default_factory=list)

    def to_json(self) -> dict:
        def s(x):
            return None if x is None else str(x)

        return {
            "level": self.level,
            "dim": self.dim,
            "crit": self.crit,
            "crit_normalized": s(self.crit_normalized),
            "floor": self.floor,
            "floor_normalized": s(self.floor_normalized),
            "positive": self.positive,
            "status": self.status,
            "epsilon": s(self.epsilon),
            "perturbed_floor_normalized": s(self.perturbed_floor_normalized),
            "difference": s(self.difference),
            "bound": s(self.bound),
            "within_bound": self.within_bound,
            "perturbation_dists": [str(x) for x in self.perturbation_dists],
        }


def _floor_normalized(crit: int, l: int, level: int) -> Fraction:
    return (Fraction(crit, l) - 1) / 2**level


def levelwise_image_floor(
    w: WordWithConstants,
    m: int,
    epsilon: Fraction | int | str = 0,
    seed: int = 0,
    max_level: int = MAX_LEVEL,
) -> LevelReport:
    """Normalized diameter floor at level m, and its stability under eps-perturbed constants."""
    epsilon = Fraction(epsilon)
    if epsilon < 0:
        raise ValidationError("epsilon must be non-negative")
    if m > max_level:
        raise ValidationError(f"level {m} exceeds the cap {max_level}")
    wm = embed_word(w, m)
    N = 2**m
    crit = critical_length(wm)
    floor_int = diameter_floor(wm)
    floor_norm = _floor_normalized(crit, wm.l, m)
    positive = floor_norm > 0
    rep = LevelReport(
        m, N, crit, Fraction(crit, N), floor_int, floor_norm, positive,
        "certified" if positive else "hypotheses_fail", epsilon,
    )
    rank = int(epsilon * N)  # floor, so that rank / N <= epsilon
    rng = np.random.default_rng([seed, m])
    perturbed = [low_rank_perturbation(c, rank, rng) for c in wm.constants]
    rep.perturbation_dists = [Fraction(projective_dist(c, cp), N) for c, cp in zip(wm.constants, perturbed)]
    wp = wm.with_constants(perturbed)
    crit_p = critical_length(wp, require_reduced=False)
    rep.perturbed_floor_normalized = _floor_normalized(crit_p, wm.l, m)
    rep.difference = abs(rep.perturbed_floor_normalized - floor_norm)
    rep.bound = 2 * (wm.l + 1) * epsilon
    rep.within_bound = rep.difference <= rep.bound and all(d <= epsilon for d in rep.perturbation_dists)
    return rep


def aq_sweep(w: WordWithConstants, levels: range, epsilon=0, seed: int = 0) -> list[LevelReport]:
    return [levelwise_image_floor(w, m, epsilon, seed) for m in levels]
