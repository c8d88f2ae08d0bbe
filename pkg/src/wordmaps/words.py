"""Words with constants in GL_n(q) * F_r.

A word ``c_0 x_{i(1)}^{e(1)} c_1 ... x_{i(l)}^{e(l)} c_l`` keeps its l letters and
its l+1 constants in two parallel tuples.  Constant c_j sits between letter j
and letter j+1 (1-based letters), so ``letters[j-1]`` and ``letters[j]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    AlreadyStrong,
    DimensionMismatch,
    NotReduced,
    Singular,
    SingularInput,
    WordError,
)
from .field import FieldSpec
from .linalg import MatrixFq, mat_inv, mat_rank


@dataclass(frozen=True, order=True)
class Letter:
    var: int
    exp: int

    def __post_init__(self):
        if self.var < 1:
            raise WordError(f"variable index must be >= 1, got {self.var}")
        if self.exp not in (1, -1):
            raise WordError(f"letter exponent must be +1 or -1, got {self.exp}")

    def inverse(self) -> "Letter":
        return Letter(self.var, -self.exp)

    def __str__(self) -> str:
        return f"x{self.var}" if self.exp == 1 else f"x{self.var}^-1"


@dataclass(frozen=True, eq=False)
class WordWithConstants:
    field: FieldSpec
    n: int
    r: int
    letters: tuple[Letter, ...]
    constants: tuple[MatrixFq, ...]

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(self.letters))
        object.__setattr__(self, "constants", tuple(self.constants))
        if self.n < 2:
            raise DimensionMismatch("n = 1 is degenerate; words need n >= 2")
        if len(self.constants) != len(self.letters) + 1:
            raise WordError("a word of length l needs exactly l + 1 constants")
        for L in self.letters:
            if L.var > self.r:
                raise WordError(f"letter {L} exceeds the variable count r = {self.r}")
        for c in self.constants:
            if c.field != self.field or c.shape != (self.n, self.n):
                raise DimensionMismatch("constant does not live in GL_n(q) of the word")

    @classmethod
    def build(cls, field: FieldSpec, n: int, letters, constants=None, r: int | None = None, check=True) -> "WordWithConstants":
        """Letters may be Letter objects or (var, exp) pairs; constants a list or {j: matrix}."""
        letters = tuple(L if isinstance(L, Letter) else Letter(*L) for L in letters)
        ident = MatrixFq.identity(field, n)
        consts = [ident] * (len(letters) + 1)
        if isinstance(constants, dict):
            for j, c in constants.items():
                consts[j] = c
        elif constants is not None:
            consts = list(constants)
        if r is None:
            r = max((L.var for L in letters), default=1)
        w = cls(field, n, r, letters, tuple(consts))
        if check:
            for j, c in enumerate(w.constants):
                if not c.is_identity() and mat_rank(c) < n:
                    raise Singular(f"constant c_{j} is not invertible")
        return w

    @property
    def l(self) -> int:
        return len(self.letters)

    def __len__(self) -> int:
        return self.l

    def __eq__(self, other) -> bool:
        if not isinstance(other, WordWithConstants):
            return NotImplemented
        return (
            self.field == other.field
            and self.n == other.n
            and self.r == other.r
            and self.letters == other.letters
            and self.constants == other.constants
        )

    def __hash__(self) -> int:
        return hash((self.field, self.n, self.r, self.letters, self.constants))

    def __str__(self) -> str:
        parts = []
        for j, c in enumerate(self.constants):
            if not c.is_identity():
                parts.append(f"c{j}")
            if j < self.l:
                parts.append(str(self.letters[j]))
        return "*".join(parts) if parts else "1"

    def with_constants(self, constants) -> "WordWithConstants":
        return WordWithConstants(self.field, self.n, self.r, self.letters, tuple(constants))


@dataclass(frozen=True)
class IndexClassification:
    j0: tuple[int, ...]
    jplus: tuple[int, ...]
    jminus: tuple[int, ...]
    critical_constants: tuple[MatrixFq, ...]


def index_kind(w: WordWithConstants, j: int) -> str:
    """'0', '+' or '-' for an interior index 1 <= j <= l-1."""
    a, b = w.letters[j - 1], w.letters[j]
    if a.var != b.var:
        return "0"
    return "+" if a.exp == b.exp else "-"


def classify_indices(w: WordWithConstants) -> IndexClassification:
    j0, jp, jm = [], [], []
    for j in range(1, w.l):
        {"0": j0, "+": jp, "-": jm}[index_kind(w, j)].append(j)
    return IndexClassification(tuple(j0), tuple(jp), tuple(jm), tuple(w.constants[j] for j in jm))


@dataclass(frozen=True)
class ReducedCheck:
    ok: bool
    offending: tuple[tuple[int, str], ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def is_reduced(w: WordWithConstants) -> ReducedCheck:
    """Reducedness relative to the scalar matrices (the centraliser of SL_n or GL_n)."""
    bad = []
    for j in range(1, w.l):
        c = w.constants[j]
        if index_kind(w, j) == "-":
            if c.is_scalar():
                bad.append((j, "critical constant is scalar"))
        elif c.is_scalar() and not c.is_identity():
            bad.append((j, "non-identity scalar constant"))
    return ReducedCheck(not bad, tuple(bad))


def reduce(w: WordWithConstants) -> WordWithConstants:
    """Normal form modulo centrality of scalars; scalars are collected into c_0."""
    letters = list(w.letters)
    consts = list(w.constants)
    ident = MatrixFq.identity(w.field, w.n)
    changed = True
    while changed:
        changed = False
        for j in range(1, len(letters)):
            c = consts[j]
            if not c.is_scalar():
                continue
            a, b = letters[j - 1], letters[j]
            if a.var == b.var and a.exp == -b.exp:
                merged = consts[j - 1] @ c @ consts[j + 1]
                letters = letters[: j - 1] + letters[j + 1 :]
                consts = consts[: j - 1] + [merged] + consts[j + 2 :]
                changed = True
                break
            if not c.is_identity():
                consts[0] = c @ consts[0]
                consts[j] = ident
                changed = True
                break
    return WordWithConstants(w.field, w.n, w.r, tuple(letters), tuple(consts))


def free_reduce(w: WordWithConstants, is_trivial=None) -> WordWithConstants:
    """Free-product reduction: only ``x^e c x^-e`` with trivial c collapses."""
    if is_trivial is None:
        is_trivial = MatrixFq.is_identity
    letters = list(w.letters)
    consts = list(w.constants)
    j = 1
    while j < len(letters):
        a, b = letters[j - 1], letters[j]
        if a.var == b.var and a.exp == -b.exp and is_trivial(consts[j]):
            merged = consts[j - 1] @ consts[j] @ consts[j + 1]
            letters = letters[: j - 1] + letters[j + 1 :]
            consts = consts[: j - 1] + [merged] + consts[j + 2 :]
            j = max(1, j - 1)
        else:
            j += 1
    return WordWithConstants(w.field, w.n, w.r, tuple(letters), tuple(consts))


def free_reduce_letters(letters) -> tuple[Letter, ...]:
    stack: list[Letter] = []
    for L in letters:
        if stack and stack[-1] == L.inverse():
            stack.pop()
        else:
            stack.append(L)
    return tuple(stack)


def content(w: WordWithConstants) -> tuple[Letter, ...]:
    return free_reduce_letters(w.letters)


def is_singular(w: WordWithConstants) -> bool:
    return not content(w)


def evaluate(w: WordWithConstants, h) -> MatrixFq:
    """``c_0 h_{i(1)}^{e(1)} c_1 ... h_{i(l)}^{e(l)} c_l``."""
    h = list(h)
    if len(h) != w.r:
        raise DimensionMismatch(f"expected {w.r} matrices, got {len(h)}")
    for hk in h:
        if hk.field != w.field or hk.shape != (w.n, w.n):
            raise DimensionMismatch("substituted matrix does not match the word's GL_n(q)")
    inverses: dict[int, MatrixFq] = {}
    used = {L.var for L in w.letters}
    for k in used:
        try:
            inverses[k] = mat_inv(h[k - 1])
        except Singular as exc:
            raise SingularInput(f"h_{k} is not invertible") from exc
    F = w.field
    acc = w.constants[0].data
    for j, L in enumerate(w.letters):
        m = h[L.var - 1] if L.exp == 1 else inverses[L.var]
        acc = F.matmul(acc, m.data)
        c = w.constants[j + 1]
        if not c.is_identity():
            acc = F.matmul(acc, c.data)
    return MatrixFq(F, acc)


def concat(w1: WordWithConstants, w2: WordWithConstants) -> WordWithConstants:
    if w1.field != w2.field or w1.n != w2.n:
        raise DimensionMismatch("words live in different groups")
    mid = w1.constants[-1] @ w2.constants[0]
    return WordWithConstants(
        w1.field,
        w1.n,
        max(w1.r, w2.r),
        w1.letters + w2.letters,
        w1.constants[:-1] + (mid,) + w2.constants[1:],
    )


def strong_reduction_step(w: WordWithConstants) -> WordWithConstants:
    """Drop the critical constant of least projective norm and cancel its letter pair."""
    from .seminorm import projective_norm

    if not is_reduced(w):
        raise NotReduced("strong reduction needs a reduced word")
    jm = classify_indices(w).jminus
    if not jm:
        raise AlreadyStrong("word has no critical indices")
    norms = [(projective_norm(w.constants[j]), j) for j in jm]
    _, j = min(norms)
    consts = list(w.constants)
    consts[j] = MatrixFq.identity(w.field, w.n)
    return reduce(w.with_constants(consts))


def strong_reduction_chain(w: WordWithConstants) -> list[WordWithConstants]:
    chain = [w]
    while classify_indices(chain[-1]).jminus:
        chain.append(strong_reduction_step(chain[-1]))
    return chain


def random_word(
    field: FieldSpec,
    n: int,
    l: int,
    r: int,
    rng: np.random.Generator,
    *,
    boundary: bool = False,
    min_critical_norm: int = 1,
) -> WordWithConstants:
    """A random reduced word; interior constants are random invertible matrices."""
    from .linalg import random_invertible
    from .seminorm import projective_norm

    letters = [Letter(int(rng.integers(1, r + 1)), int(rng.choice([-1, 1]))) for _ in range(l)]
    ident = MatrixFq.identity(field, n)
    consts = [ident] * (l + 1)
    for j in range(1, l):
        while True:
            c = random_invertible(field, n, rng)
            a, b = letters[j - 1], letters[j]
            crit = a.var == b.var and a.exp == -b.exp
            norm = projective_norm(c)
            if norm == 0:
                continue
            if crit and norm < min_critical_norm:
                continue
            consts[j] = c
            break
    if boundary:
        consts[0] = random_invertible(field, n, rng)
        consts[-1] = random_invertible(field, n, rng)
    return WordWithConstants(field, n, max(r, 1), tuple(letters), tuple(consts))
