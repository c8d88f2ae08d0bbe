"""Exact linear algebra over F_q.

Vectors are 1-D int64 arrays of field codes and are acted on from the right,
``v.g`` being ``v @ g``.  Subspaces are stored as reduced row echelon bases,
which makes equal subspaces compare bit-identically.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import (
    AmbientMismatch,
    DependentInput,
    NotComplement,
    NotScalarOnW,
    Singular,
    UnionCoversSpace,
)
from .field import FieldSpec

AVOID_RANDOM_TRIES = 256


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.int64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class MatrixFq:
    field: FieldSpec
    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.int64)
        if data.ndim != 2:
            raise ValueError(f"matrix data must be 2-D, got shape {data.shape}")
        if data.size and (data.min() < 0 or data.max() >= self.field.q):
            raise ValueError("matrix entries out of range for the field")
        object.__setattr__(self, "data", _frozen(data))

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "MatrixFq":
        return cls(field, np.eye(n, dtype=np.int64))

    @classmethod
    def zeros(cls, field: FieldSpec, rows: int, cols: int | None = None) -> "MatrixFq":
        return cls(field, np.zeros((rows, rows if cols is None else cols), dtype=np.int64))

    @classmethod
    def scalar(cls, field: FieldSpec, n: int, lam: int) -> "MatrixFq":
        return cls(field, np.eye(n, dtype=np.int64) * int(lam))

    @classmethod
    def from_rows(cls, field: FieldSpec, rows) -> "MatrixFq":
        return cls(field, np.array([[field.element(x) for x in row] for row in rows], dtype=np.int64))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def _check(self, other: "MatrixFq"):
        if self.field != other.field:
            raise AmbientMismatch("matrices live over different fields")

    def __matmul__(self, other: "MatrixFq") -> "MatrixFq":
        self._check(other)
        if self.cols != other.rows:
            raise AmbientMismatch(f"cannot multiply {self.shape} by {other.shape}")
        return MatrixFq(self.field, self.field.matmul(self.data, other.data))

    def __add__(self, other: "MatrixFq") -> "MatrixFq":
        self._check(other)
        return MatrixFq(self.field, self.field.add(self.data, other.data))

    def __sub__(self, other: "MatrixFq") -> "MatrixFq":
        self._check(other)
        return MatrixFq(self.field, self.field.sub(self.data, other.data))

    def scale(self, lam: int) -> "MatrixFq":
        return MatrixFq(self.field, self.field.mul(self.data, int(lam)))

    def minus_scalar(self, lam: int) -> "MatrixFq":
        """``self - lam * I`` for square matrices."""
        d = self.data.copy()
        idx = np.arange(self.rows)
        d[idx, idx] = self.field.sub(d[idx, idx], int(lam))
        return MatrixFq(self.field, d)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MatrixFq):
            return NotImplemented
        return self.field == other.field and np.array_equal(self.data, other.data)

    def __hash__(self) -> int:
        return hash((self.field, self.data.shape, self.data.tobytes()))

    def __repr__(self) -> str:
        return f"MatrixFq(q={self.field.q}, {self.data.tolist()})"

    def is_identity(self) -> bool:
        return self.is_square and np.array_equal(self.data, np.eye(self.rows, dtype=np.int64))

    def is_scalar(self) -> bool:
        if not self.is_square:
            return False
        d = self.data
        diag = np.diagonal(d)
        return bool(np.all(diag == diag[0]) and np.count_nonzero(d) == np.count_nonzero(diag))

    def rank(self) -> int:
        return mat_rank(self)

    def inv(self) -> "MatrixFq":
        return mat_inv(self)

    def det(self) -> int:
        return mat_det(self)

    def transpose(self) -> "MatrixFq":
        return MatrixFq(self.field, self.data.T)

    def apply(self, v: np.ndarray) -> np.ndarray:
        """Right action on a row vector: ``v.g``."""
        return self.field.matmul(np.asarray(v, dtype=np.int64), self.data)


# -- elimination ---------------------------------------------------------------


def rref(F: FieldSpec, a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of a code array; returns (R, pivot columns)."""
    R = np.array(a, dtype=np.int64, copy=True)
    if R.ndim != 2:
        raise ValueError("rref expects a 2-D array")
    rows, cols = R.shape
    pivots: list[int] = []
    r = 0
    prime = F.e == 1
    p = F.p
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(R[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            R[[r, piv]] = R[[piv, r]]
        lead = int(R[r, c])
        if lead != 1:
            R[r] = F.mul(R[r], int(F.inv(lead)))
        col = R[:, c].copy()
        col[r] = 0
        others = np.flatnonzero(col)
        if others.size:
            if prime:
                R[others] = (R[others] - col[others, None] * R[r]) % p
            else:
                R[others] = F.sub(R[others], F.mul(col[others, None], R[r][None, :]))
        pivots.append(c)
        r += 1
    return R[:r], pivots


def _rank(F: FieldSpec, a: np.ndarray) -> int:
    R = np.array(a, dtype=np.int64, copy=True)
    rows, cols = R.shape
    r = 0
    prime = F.e == 1
    p = F.p
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(R[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            R[[r, piv]] = R[[piv, r]]
        below = r + 1 + np.flatnonzero(R[r + 1 :, c])
        if below.size:
            lead_inv = int(F.inv(int(R[r, c])))
            if prime:
                f = (R[below, c] * lead_inv) % p
                R[below] = (R[below] - f[:, None] * R[r]) % p
            else:
                f = F.mul(R[below, c], lead_inv)
                R[below] = F.sub(R[below], F.mul(f[:, None], R[r][None, :]))
        r += 1
    return r


def _eliminate_batch(F: FieldSpec, R: np.ndarray, ncols: int, full: bool) -> np.ndarray:
    """In-place elimination on a stack (B, rows, cols) over the first ncols columns.

    Each matrix keeps its own pivot row counter; returns the ranks.  With
    ``full`` the pivot column is also cleared above the pivot (Gauss-Jordan).
    """
    B, rows, _ = R.shape
    rank = np.zeros(B, dtype=np.int64)
    ar = np.arange(rows)
    bidx = np.arange(B)
    for c in range(ncols):
        live = rank < rows
        cand = (R[:, :, c] != 0) & (ar[None, :] >= rank[:, None]) & live[:, None]
        has = cand.any(axis=1)
        if not has.any():
            continue
        b = bidx[has]
        piv = np.argmax(cand[b], axis=1)
        r = rank[b]
        top, low = R[b, r].copy(), R[b, piv].copy()
        R[b, r], R[b, piv] = low, top
        lead_inv = F.inv(R[b, r, c])
        R[b, r] = F.mul(R[b, r], lead_inv[:, None])
        f = R[b, :, c].copy()
        f[np.arange(b.size), r] = 0
        if not full:
            f[ar[None, :] < r[:, None]] = 0
        R[b] = F.sub(R[b], F.mul(f[:, :, None], R[b, r][:, None, :]))
        rank[b] += 1
    return rank


def rank_batch(F: FieldSpec, mats: np.ndarray) -> np.ndarray:
    """Ranks of a stack of matrices, shape (B, rows, cols)."""
    R = np.array(mats, dtype=np.int64, copy=True)
    return _eliminate_batch(F, R, R.shape[2], full=False)


def inv_batch(F: FieldSpec, mats: np.ndarray) -> np.ndarray:
    """Inverses of a stack of square matrices; raises Singular if any is singular."""
    mats = np.asarray(mats, dtype=np.int64)
    B, n, _ = mats.shape
    aug = np.concatenate([mats, np.broadcast_to(np.eye(n, dtype=np.int64), (B, n, n))], axis=2)
    if np.any(_eliminate_batch(F, aug, n, full=True) < n):
        raise Singular("a matrix in the batch is singular")
    return aug[:, :, n:]


def mat_rank(m: MatrixFq) -> int:
    return _rank(m.field, m.data)


def mat_inv(m: MatrixFq) -> MatrixFq:
    if not m.is_square:
        raise AmbientMismatch(f"cannot invert a {m.shape} matrix")
    n = m.rows
    aug = np.hstack([m.data, np.eye(n, dtype=np.int64)])
    R, pivots = rref(m.field, aug)
    if len(pivots) < n or pivots[n - 1] >= n:
        raise Singular("matrix is singular")
    return MatrixFq(m.field, R[:, n:])


def mat_det(m: MatrixFq) -> int:
    if not m.is_square:
        raise AmbientMismatch(f"determinant of a {m.shape} matrix")
    F = m.field
    R = np.array(m.data, copy=True)
    n = m.rows
    det = 1
    for c in range(n):
        nz = np.flatnonzero(R[c:, c])
        if nz.size == 0:
            return 0
        piv = c + int(nz[0])
        if piv != c:
            R[[c, piv]] = R[[piv, c]]
            det = int(F.neg(det))
        lead = int(R[c, c])
        det = int(F.mul(det, lead))
        below = c + 1 + np.flatnonzero(R[c + 1 :, c])
        if below.size:
            f = F.mul(R[below, c], int(F.inv(lead)))
            R[below] = F.sub(R[below], F.mul(f[:, None], R[c][None, :]))
    return det


def nullspace(F: FieldSpec, a: np.ndarray) -> np.ndarray:
    """Rows spanning ``{y : a @ y = 0}`` (right kernel), in RREF."""
    a = np.asarray(a, dtype=np.int64)
    cols = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(cols, dtype=np.int64)
    R, pivots = rref(F, a)
    pset = set(pivots)
    free = [c for c in range(cols) if c not in pset]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    if free:
        basis[np.arange(len(free)), free] = 1
        if pivots:
            basis[:, pivots] = F.neg(R[:, free].T)
    if basis.shape[0] == 0:
        return basis
    return rref(F, basis)[0]


# -- subspaces -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Subspace:
    field: FieldSpec
    ambient_dim: int
    basis: np.ndarray
    pivots: tuple[int, ...] = dc_field(default=())

    @classmethod
    def from_vectors(cls, field: FieldSpec, n: int, vectors) -> "Subspace":
        vecs = np.asarray(vectors, dtype=np.int64).reshape(-1, n) if len(vectors) else np.zeros((0, n), dtype=np.int64)
        R, piv = rref(field, vecs)
        return cls(field, n, _frozen(R), tuple(piv))

    @classmethod
    def zero(cls, field: FieldSpec, n: int) -> "Subspace":
        return cls(field, n, _frozen(np.zeros((0, n), dtype=np.int64)), ())

    @classmethod
    def full(cls, field: FieldSpec, n: int) -> "Subspace":
        return cls(field, n, _frozen(np.eye(n, dtype=np.int64)), tuple(range(n)))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self.field == other.field
            and self.ambient_dim == other.ambient_dim
            and np.array_equal(self.basis, other.basis)
        )

    def __hash__(self) -> int:
        return hash((self.field, self.ambient_dim, self.basis.tobytes()))

    def __repr__(self) -> str:
        return f"Subspace(n={self.ambient_dim}, dim={self.dim}, basis={self.basis.tolist()})"

    def contains(self, v) -> bool:
        return subspace_contains(self, v)

    def __contains__(self, v) -> bool:
        return subspace_contains(self, v)

    def annihilator(self) -> np.ndarray:
        """Matrix N (n x (n-dim)) with ``x in self`` iff ``x @ N == 0``."""
        return nullspace(self.field, self.basis).T

    def image(self, g: MatrixFq) -> "Subspace":
        if self.dim == 0:
            return self
        return Subspace.from_vectors(self.field, self.ambient_dim, self.field.matmul(self.basis, g.data))

    def vectors(self) -> np.ndarray:
        """All q^dim elements (small subspaces only)."""
        F = self.field
        if self.dim == 0:
            return np.zeros((1, self.ambient_dim), dtype=np.int64)
        coeffs = np.array(list(itertools.product(range(F.q), repeat=self.dim)), dtype=np.int64)
        return F.matmul(coeffs, self.basis)


def _check_ambient(a: Subspace, b: Subspace):
    if a.field != b.field or a.ambient_dim != b.ambient_dim:
        raise AmbientMismatch("subspaces live in different ambient spaces")


def subspace_from_vectors(field: FieldSpec, n: int, vectors) -> Subspace:
    return Subspace.from_vectors(field, n, vectors)


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    _check_ambient(a, b)
    if a.dim == 0:
        return b
    if b.dim == 0:
        return a
    return Subspace.from_vectors(a.field, a.ambient_dim, np.vstack([a.basis, b.basis]))


def subspace_intersect(a: Subspace, b: Subspace) -> Subspace:
    """Double annihilator: x lies in both iff it is killed by both annihilators."""
    _check_ambient(a, b)
    F, n = a.field, a.ambient_dim
    if a.dim == 0 or b.dim == 0:
        return Subspace.zero(F, n)
    if a.dim == n:
        return b
    if b.dim == n:
        return a
    ann = np.hstack([a.annihilator(), b.annihilator()])
    return Subspace.from_vectors(F, n, nullspace(F, ann.T))


def subspace_contains(s: Subspace, v) -> bool:
    v = np.asarray(v, dtype=np.int64)
    if v.shape != (s.ambient_dim,):
        raise AmbientMismatch(f"vector of length {v.shape} in ambient dimension {s.ambient_dim}")
    if s.dim == 0:
        return not v.any()
    coeffs = v[list(s.pivots)]
    return bool(np.array_equal(s.field.matmul(coeffs, s.basis), v))


def subspace_preimage(c: MatrixFq, s: Subspace) -> Subspace:
    """``{v : v.c in s}`` for a square, possibly singular c."""
    if c.field != s.field or c.shape != (s.ambient_dim, s.ambient_dim):
        raise AmbientMismatch("preimage map does not match the subspace")
    F, n = s.field, s.ambient_dim
    if s.dim == n:
        return Subspace.full(F, n)
    cn = F.matmul(c.data, s.annihilator())
    return Subspace.from_vectors(F, n, nullspace(F, cn.T))


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def avoid_union(subs, ambient: int, seed, field: FieldSpec | None = None) -> np.ndarray:
    """A vector of F_q^n lying outside every subspace in ``subs``.

    Seeded random candidates first, then a deterministic sweep of the space.
    """
    subs = list(subs)
    if field is None:
        if not subs:
            raise ValueError("field is required when no subspaces are given")
        field = subs[0].field
    for s in subs:
        if s.ambient_dim != ambient or s.field != field:
            raise AmbientMismatch("subspace does not live in the requested ambient space")
        if s.dim >= ambient:
            raise UnionCoversSpace("a full-dimensional subspace cannot be avoided")
    rng = _as_rng(seed)

    def ok(v):
        return v.any() and not any(subspace_contains(s, v) for s in subs)

    for _ in range(AVOID_RANDOM_TRIES):
        v = field.random(rng, ambient)
        if ok(v):
            return v
    for tup in itertools.product(range(field.q), repeat=ambient):
        v = np.array(tup, dtype=np.int64)
        if ok(v):
            return v
    raise UnionCoversSpace("the union of the given subspaces covers the whole space")


def basis_extend(vectors, n: int, field: FieldSpec) -> MatrixFq:
    """Extend independent rows to an invertible n x n matrix with standard basis vectors."""
    vecs = np.asarray(vectors, dtype=np.int64).reshape(-1, n) if len(vectors) else np.zeros((0, n), dtype=np.int64)
    k = vecs.shape[0]
    if _rank(field, vecs) < k:
        raise DependentInput("input vectors are linearly dependent")
    rows = list(vecs)
    span = Subspace.from_vectors(field, n, vecs)
    for i in range(n):
        if len(rows) == n:
            break
        e = np.zeros(n, dtype=np.int64)
        e[i] = 1
        if not subspace_contains(span, e):
            rows.append(e)
            span = Subspace.from_vectors(field, n, np.array(rows))
    return MatrixFq(field, np.array(rows, dtype=np.int64))


def eigen_spectrum(g: MatrixFq) -> list[tuple[int, int]]:
    """Pairs (lambda, n - rank(g - lambda I)) for every lambda in F_q with nonzero nullity."""
    if not g.is_square:
        raise AmbientMismatch("eigen_spectrum needs a square matrix")
    n = g.rows
    out = []
    for lam in range(g.field.q):
        d = n - mat_rank(g.minus_scalar(lam))
        if d > 0:
            out.append((lam, d))
    return out


def invariant_complement(g: MatrixFq, lam: int, w_space: Subspace, u_space: Subspace) -> tuple[Subspace, Subspace]:
    """Given g = lam on W and U + W = V direct, return (U + U.g, W') with W' <= W a complement."""
    _check_ambient(w_space, u_space)
    F, n = g.field, g.rows
    if w_space.dim:
        img = F.matmul(w_space.basis, g.data)
        if not np.array_equal(img, F.mul(w_space.basis, int(lam))):
            raise NotScalarOnW(f"g does not act as the scalar {lam} on W")
    if u_space.dim + w_space.dim != n or subspace_intersect(u_space, w_space).dim != 0:
        raise NotComplement("U and W are not complementary")
    u_prime = subspace_sum(u_space, u_space.image(g))
    k = subspace_intersect(u_prime, w_space)
    chosen: list[np.ndarray] = []
    acc = k
    for w in w_space.basis:
        if not subspace_contains(acc, w):
            chosen.append(w)
            acc = subspace_sum(acc, Subspace.from_vectors(F, n, w[None, :]))
    w_prime = Subspace.from_vectors(F, n, np.array(chosen)) if chosen else Subspace.zero(F, n)
    return u_prime, w_prime


def random_invertible(field: FieldSpec, n: int, rng: np.random.Generator) -> MatrixFq:
    while True:
        a = field.random(rng, (n, n))
        if _rank(field, a) == n:
            return MatrixFq(field, a)


def random_independent(field: FieldSpec, n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    while True:
        a = field.random(rng, (k, n))
        if _rank(field, a) == k:
            return a


def companion(field: FieldSpec, poly) -> MatrixFq:
    """Companion matrix (row convention) of a monic polynomial, coefficients low to high."""
    poly = [int(c) for c in poly]
    n = len(poly) - 1
    m = np.zeros((n, n), dtype=np.int64)
    for i in range(n - 1):
        m[i, i + 1] = 1
    for j in range(n):
        m[n - 1, j] = field.neg(poly[j])
    return MatrixFq(field, m)
