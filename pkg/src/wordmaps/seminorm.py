"""The projective rank seminorm on GL_n(q) and quantities derived from it."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import NotInvertible, NotReduced
from .field import FieldSpec
from .linalg import MatrixFq, _rank, mat_inv, rank_batch
from .words import WordWithConstants, classify_indices, is_reduced


def projective_norm(g: MatrixFq) -> int:
    """min over nonzero lam of rank(g - lam I); zero exactly on scalar matrices."""
    if not g.is_square:
        raise NotInvertible("projective norm of a non-square matrix")
    if g.is_scalar():
        if g.data[0, 0] == 0:
            raise NotInvertible("the zero matrix is not invertible")
        return 0
    F = g.field
    n = g.rows
    idx = np.arange(n)
    best = n
    if _rank(F, g.data) < n:
        raise NotInvertible("matrix is singular")
    for lam in range(1, F.q):
        d = g.data.copy()
        d[idx, idx] = F.sub(d[idx, idx], lam)
        best = min(best, _rank(F, d))
        if best == 1:
            break
    return best


def projective_dist(g: MatrixFq, h: MatrixFq) -> int:
    return projective_norm(mat_inv(g) @ h)


def projective_dist_batch(F: FieldSpec, gs: np.ndarray, hs: np.ndarray) -> np.ndarray:
    """Distances for stacks of invertible matrices (B, n, n).

    rank(g^-1 h - lam I) = rank(h - lam g), so no inverse is formed.
    """
    gs = np.asarray(gs, dtype=np.int64)
    hs = np.asarray(hs, dtype=np.int64)
    best = np.full(gs.shape[0], gs.shape[1], dtype=np.int64)
    for lam in range(1, F.q):
        best = np.minimum(best, rank_batch(F, F.sub(hs, F.mul(gs, lam))))
    return best


def projective_norm_batch(F: FieldSpec, gs: np.ndarray) -> np.ndarray:
    gs = np.asarray(gs, dtype=np.int64)
    eye = np.broadcast_to(np.eye(gs.shape[1], dtype=np.int64), gs.shape)
    return projective_dist_batch(F, eye, gs)


def normalized_norm(g: MatrixFq, dim: int | None = None) -> Fraction:
    return Fraction(projective_norm(g), g.rows if dim is None else dim)


def group_diameter(n: int) -> int:
    """diam(GL_n(q)) in the projective rank metric."""
    return n


def critical_length(w: WordWithConstants, require_reduced: bool = True) -> int:
    if require_reduced and not is_reduced(w):
        raise NotReduced(f"critical length needs a reduced word: {is_reduced(w).offending}")
    crit = group_diameter(w.n)
    for c in classify_indices(w).critical_constants:
        crit = min(crit, projective_norm(c))
    return crit


def rootless_companion(field: FieldSpec, n: int) -> MatrixFq:
    """Companion matrix of the first monic degree-n polynomial without roots in F_q.

    Companion matrices are cyclic, so rank(C - lam I) = n unless lam is a root;
    the result therefore has projective norm n.
    """
    import itertools

    from .linalg import companion

    xs = field.elements()
    powers = [np.ones(field.q, dtype=np.int64)]
    for _ in range(n):
        powers.append(field.mul(powers[-1], xs))
    for low in itertools.product(range(field.q), repeat=n):
        if low[0] == 0:
            continue
        val = powers[n].copy()
        for k, c in enumerate(low):
            if c:
                val = field.add(val, field.mul(powers[k], c))
        if np.all(val != 0):
            return companion(field, list(low) + [1])
    raise AssertionError("every polynomial has a root")
