import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wordmaps.errors import AlreadyStrong, DimensionMismatch, NotReduced, SingularInput, WordError
from wordmaps.field import field_make
from wordmaps.linalg import MatrixFq, random_invertible
from wordmaps.seminorm import projective_norm
from wordmaps.words import (
    Letter,
    WordWithConstants,
    classify_indices,
    concat,
    content,
    evaluate,
    is_reduced,
    is_singular,
    random_word,
    reduce,
    strong_reduction_chain,
    strong_reduction_step,
)

from conftest import SMALL_FIELDS

X, Xi, Y, Yi = (1, 1), (1, -1), (2, 1), (2, -1)


def word(F, n, letters, consts=None, r=None):
    return WordWithConstants.build(F, n, letters, consts, r=r)


def unipotent(F, n, k):
    """I + N with N^2 = 0 and rank N = k (k <= n/2); projective norm k."""
    a = np.eye(n, dtype=np.int64)
    for i in range(k):
        a[i, n - k + i] = 1
    return MatrixFq(F, a)


@pytest.fixture
def rng():
    return np.random.default_rng(11)


def test_letter_validation():
    with pytest.raises(WordError):
        Letter(0, 1)
    with pytest.raises(WordError):
        Letter(1, 2)
    assert str(Letter(2, -1)) == "x2^-1"


def test_word_validation(F2, F3):
    with pytest.raises(DimensionMismatch):
        word(F2, 1, [X])
    with pytest.raises(DimensionMismatch):
        word(F2, 2, [X], [MatrixFq.identity(F3, 2)] * 2)
    with pytest.raises(WordError):
        WordWithConstants(F2, 2, 1, (Letter(2, 1),), (MatrixFq.identity(F2, 2),) * 2)


def test_classify_examples(F2):
    c = unipotent(F2, 4, 1)
    cls = classify_indices(word(F2, 4, [X, Y]))
    assert cls.j0 == (1,) and cls.jplus == () and cls.jminus == ()
    assert classify_indices(word(F2, 4, [X, Xi], {1: c})).jminus == (1,)
    assert classify_indices(word(F2, 4, [X, X], {1: c})).jplus == (1,)


def test_is_reduced_examples(F3):
    c = unipotent(F3, 4, 2)
    lam = MatrixFq.scalar(F3, 4, 2)
    assert is_reduced(word(F3, 4, [X, Xi], {1: c}))
    chk = is_reduced(word(F3, 4, [X, Xi], {1: lam}))
    assert not chk and chk.offending[0][0] == 1
    chk = is_reduced(word(F3, 4, [X, Y], {1: lam}))
    assert not chk and chk.offending[0][0] == 1
    # identity between inverse letters is unreduced as well
    assert not is_reduced(word(F3, 4, [X, Xi]))


def test_reduce_examples(F3, rng):
    lam = MatrixFq.scalar(F3, 3, 2)
    w = reduce(word(F3, 3, [X, Xi], {1: lam}))
    assert w.l == 0 and w.constants[0] == lam
    c = random_invertible(F3, 3, rng)
    while c.is_scalar():
        c = random_invertible(F3, 3, rng)
    w = word(F3, 3, [X, Y], {1: c})
    assert reduce(w) == w
    w = word(F3, 3, [X, Y], {1: lam @ c})
    folded = word(F3, 3, [X, Y], {0: lam, 1: c})
    red = reduce(w)
    # a non-scalar constant is left alone; lam c has no canonical split
    assert red == w
    for _ in range(5):
        h = [random_invertible(F3, 3, rng) for _ in range(2)]
        assert evaluate(folded, h) == evaluate(w, h) == evaluate(red, h)
    w = word(F3, 3, [X, Y, X], {1: lam, 2: c})
    red = reduce(w)
    assert red.constants[0] == lam and red.constants[1].is_identity()
    for _ in range(5):
        h = [random_invertible(F3, 3, rng) for _ in range(2)]
        assert evaluate(red, h) == evaluate(w, h)


def test_content_examples(F2, rng):
    c = random_invertible(F2, 3, rng)
    letters = [X, Xi] * 3
    w = word(F2, 3, letters, [c, c.inv(), c, c.inv(), c, c.inv(), MatrixFq.identity(F2, 3)])
    assert content(w) == () and is_singular(w)
    assert content(word(F2, 3, [X] * 6)) == (Letter(1, 1),) * 6
    w = word(F2, 3, [X, Yi], {0: c, 1: c})
    assert content(w) == (Letter(1, 1), Letter(2, -1)) and not is_singular(w)


def test_evaluate_examples(F3, rng):
    g, c = random_invertible(F3, 3, rng), random_invertible(F3, 3, rng)
    assert evaluate(word(F3, 3, [X]), [g]) == g
    assert evaluate(word(F3, 3, [X, Xi]), [g]).is_identity()
    got = evaluate(word(F3, 3, [X], [c, c.inv()]), [g])
    # left-to-right vs right-to-left association
    assert got == c @ (g @ c.inv())
    assert got == (c @ g) @ c.inv()


def test_evaluate_errors(F2, F3):
    w = word(F2, 2, [X, Y])
    I = MatrixFq.identity(F2, 2)
    with pytest.raises(DimensionMismatch):
        evaluate(w, [I])
    with pytest.raises(DimensionMismatch):
        evaluate(w, [I, MatrixFq.identity(F3, 2)])
    with pytest.raises(SingularInput):
        evaluate(w, [I, MatrixFq.zeros(F2, 2)])


def test_strong_reduction_examples(F2):
    c = unipotent(F2, 4, 2)
    w = word(F2, 4, [X, Xi], {1: c})
    s = strong_reduction_step(w)
    # c_1 is replaced by 1 before cancelling, so the word collapses to 1
    assert s.l == 0 and s.constants[0].is_identity()
    with pytest.raises(AlreadyStrong):
        strong_reduction_step(word(F2, 4, [X, Y]))
    with pytest.raises(NotReduced):
        strong_reduction_step(word(F2, 4, [X, Xi]))


def test_strong_reduction_removes_smallest_norm_first(F2):
    n = 8
    c, d = unipotent(F2, n, 1), unipotent(F2, n, 3)
    assert projective_norm(c) == 1 and projective_norm(d) == 3
    w = word(F2, n, [X, Xi, Y, Yi], {1: c, 2: d, 3: d})
    s = strong_reduction_step(w)
    assert s.l == 2 and s.letters == (Letter(2, 1), Letter(2, -1))
    assert s.constants[1] == d


def test_strong_reduction_tie_breaks_on_smallest_index(F2):
    n = 6
    c1, c2 = unipotent(F2, n, 2), MatrixFq(F2, unipotent(F2, n, 2).data.T.copy())
    w = word(F2, n, [X, Xi, Y, Yi], {1: c1, 2: unipotent(F2, n, 3), 3: c2})
    s = strong_reduction_step(w)
    # index 1 removed: the surviving critical constant is c2
    assert s.letters == (Letter(2, 1), Letter(2, -1)) and s.constants[1] == c2


words_strategy = st.builds(
    lambda pe, l, r, seed, boundary: random_word(
        field_make(*pe), 4, l, r, np.random.default_rng(seed), boundary=boundary
    ),
    st.sampled_from(SMALL_FIELDS[:4]),
    st.integers(0, 6),
    st.integers(1, 3),
    st.integers(0, 2**32 - 1),
    st.booleans(),
)


@given(words_strategy)
def test_classify_is_a_partition(w):
    cls = classify_indices(w)
    parts = cls.j0 + cls.jplus + cls.jminus
    assert sorted(parts) == list(range(1, w.l))
    assert len(set(parts)) == len(parts)


@given(words_strategy)
def test_random_words_are_reduced(w):
    assert is_reduced(w)


@given(words_strategy, words_strategy, st.integers(0, 2**32 - 1))
def test_evaluate_is_multiplicative_under_concat(w1, w2, seed):
    if w1.field != w2.field:
        w2 = random_word(w1.field, 4, w2.l, w2.r, np.random.default_rng(seed))
    rng = np.random.default_rng(seed)
    w = concat(w1, w2)
    h = [random_invertible(w1.field, 4, rng) for _ in range(w.r)]
    assert evaluate(w, h) == evaluate(w1, h[: w1.r]) @ evaluate(w2, h[: w2.r])


@given(st.sampled_from(SMALL_FIELDS[:4]), st.integers(0, 2**32 - 1))
def test_reduce_preserves_evaluation(pe, seed):
    # words with scalar constants sprinkled in, so reduce actually has work
    F = field_make(*pe)
    rng = np.random.default_rng(seed)
    n = 3
    l = int(rng.integers(1, 7))
    letters = [Letter(int(rng.integers(1, 3)), int(rng.choice([-1, 1]))) for _ in range(l)]
    consts = []
    for _ in range(l + 1):
        if rng.random() < 0.5:
            consts.append(MatrixFq.scalar(F, n, int(rng.integers(1, F.q))))
        else:
            consts.append(random_invertible(F, n, rng))
    w = WordWithConstants(F, n, 2, tuple(letters), tuple(consts))
    red = reduce(w)
    assert red.l <= w.l and (w.l - red.l) % 2 == 0
    for _ in range(20):
        h = [random_invertible(F, n, rng) for _ in range(2)]
        assert evaluate(red, h) == evaluate(w, h)
    for j in range(1, red.l):
        c = red.constants[j]
        a, b = red.letters[j - 1], red.letters[j]
        if a.var == b.var and a.exp == -b.exp:
            assert not c.is_scalar()
        else:
            assert c.is_identity() or not c.is_scalar()


@given(words_strategy)
def test_strong_reduction_chain_properties(w):
    chain = strong_reduction_chain(w)
    assert chain[0] == w
    for prev, nxt in zip(chain, chain[1:]):
        assert is_reduced(nxt)
        # one-sided: lengths only drop, and by an even amount
        assert nxt.l <= prev.l - 2 and (prev.l - nxt.l) % 2 == 0
    assert classify_indices(chain[-1]).jminus == ()
