from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wordmaps.errors import HypothesesFail, NotReduced, SingularWord, TooShort
from wordmaps.field import field_make
from wordmaps.linalg import MatrixFq, _rank, random_invertible
from wordmaps.image import (
    chain_bound,
    chain_constant,
    diameter_floor,
    diameter_floor_exact,
    diameter_report,
    empirical_diameter,
    image_samples,
    pair_degree,
    rank_d_subquotient_check,
    realize_distant_pair,
)
from wordmaps.seminorm import critical_length
from wordmaps.words import WordWithConstants, is_singular, random_word


def unipotent(F, n, k):
    a = np.eye(n, dtype=np.int64)
    for i in range(k):
        a[i, n - k + i] = 1
    return MatrixFq(F, a)


def crit_word(F, n, k):
    """x1 c x1^-1 x2 with ||c|| = k, so crit = k and l = 3."""
    return WordWithConstants.build(F, n, [(1, 1), (1, -1), (2, 1)], {1: unipotent(F, n, k)})


def test_floor_examples(F2):
    w = WordWithConstants.build(F2, 24, [(1, 1), (1, -1)], {1: unipotent(F2, 24, 12)})
    assert critical_length(w) == 12 and diameter_floor(w) == 5
    w = WordWithConstants.build(F2, 16, [(1, 1), (2, 1)] * 2)
    assert diameter_floor(w) == 3
    w = WordWithConstants.build(F2, 4, [(1, 1), (1, -1)], {1: unipotent(F2, 4, 1)})
    assert diameter_floor(w) == 0
    # ceil(7/3) - 1 = 2 while the exact value is 4/3
    w = crit_word(F2, 16, 7)
    assert diameter_floor_exact(w) == Fraction(4, 3) and diameter_floor(w) == 2


def test_floor_errors(F2):
    with pytest.raises(NotReduced):
        diameter_floor(WordWithConstants.build(F2, 4, [(1, 1), (1, -1)]))
    with pytest.raises(TooShort):
        diameter_floor(WordWithConstants.build(F2, 4, [(1, 1)]))


def test_distant_pair_small_d(F2):
    # d = 1 at n = 3
    w = WordWithConstants.build(F2, 3, [(1, 1), (2, 1)])
    assert pair_degree(w) == 1
    pair = realize_distant_pair(w, seed=0)
    assert pair.d == 1 and pair.dist >= 1


def test_distant_pair_strong_word_n12(F3):
    w = WordWithConstants.build(F3, 12, [(1, 1), (2, 1)])
    pair = realize_distant_pair(w, seed=5)
    # 3d = 15 > n, yet the construction only needs 2d <= n
    assert pair.d == 5 and pair.dist >= 5 and pair.min_rank >= 5


def test_distant_pair_hypotheses(F2):
    with pytest.raises(HypothesesFail) as exc:
        realize_distant_pair(WordWithConstants.build(F2, 4, [(1, 1)]))
    assert exc.value.violations == ["length"]
    with pytest.raises(HypothesesFail) as exc:
        realize_distant_pair(WordWithConstants.build(F2, 4, [(1, 1), (1, -1), (2, 1)], {1: unipotent(F2, 4, 1)}))
    assert exc.value.violations == ["transitivity_bound"]


@settings(max_examples=15)
@given(st.sampled_from([(2, 1), (3, 1), (2, 2)]), st.integers(2, 4), st.integers(1, 2), st.integers(0, 2**32 - 1))
def test_distant_pair_certificate(pe, l, r, seed):
    F = field_make(*pe)
    rng = np.random.default_rng(seed)
    w = random_word(F, 10, l, r, rng, boundary=True)
    pair = realize_distant_pair(w, seed)
    d = min(critical_length(w) - 1, w.n) // l
    assert pair.d == d
    delta = pair.g.inv() @ pair.h
    for lam in range(1, F.q):
        assert _rank(F, delta.minus_scalar(lam).data) >= d
    assert pair.dist >= d
    # ||w|| (lb + 1) >= crit at desk scale
    assert l * (pair.dist + 1) >= critical_length(w)


def test_empirical_diameter_examples(F2):
    c = random_invertible(F2, 3, np.random.default_rng(0))
    const = WordWithConstants.build(F2, 3, [], [c])
    assert empirical_diameter(const, 10, seed=1) == 0
    x = WordWithConstants.build(F2, 2, [(1, 1)])
    assert empirical_diameter(x, 40, seed=1) == 2
    with pytest.raises(ValueError):
        empirical_diameter(x, 1)


def test_image_samples_are_nested(F3):
    w = WordWithConstants.build(F3, 4, [(1, 1), (2, 1)])
    a = image_samples(w, 3, seed=2)
    b = image_samples(w, 6, seed=2)
    assert all(x == y for x, y in zip(a, b))


def test_chain_constant_examples():
    assert chain_constant(2) == Fraction(1, 10)
    assert chain_constant(4) == Fraction(1, 324)
    assert chain_constant(1) == Fraction(1, 1)


def test_chain_bound_strong_word(F2):
    w = WordWithConstants.build(F2, 12, [(1, 1), (2, 1)])
    rep = chain_bound(w, seed=0)
    assert rep.chain_length == 0
    step = rep.steps[0]
    assert step.ineq_ok and w.l * (step.lower_bound + 1) >= step.crit
    assert rep.verdict


def test_chain_bound_errors(F2):
    c = unipotent(F2, 6, 2)
    singular = WordWithConstants.build(F2, 6, [(1, 1), (1, -1)], {1: c})
    with pytest.raises(SingularWord):
        chain_bound(singular)
    with pytest.raises(NotReduced):
        chain_bound(WordWithConstants.build(F2, 6, [(1, 1), (1, -1), (2, 1)]))


@settings(max_examples=8)
@given(st.sampled_from([(2, 1), (3, 1)]), st.integers(2, 5), st.integers(0, 2**32 - 1))
def test_chain_bound_random_nonsingular(pe, l, seed):
    F = field_make(*pe)
    rng = np.random.default_rng(seed)
    while True:
        w = random_word(F, 12, l, 2, rng, boundary=True)
        if not is_singular(w):
            break
    rep = chain_bound(w, seed, samples=3)
    assert rep.verdict == (w.n * rep.B <= rep.lower_bound + 1)
    assert all(s.ineq_ok for s in rep.steps if s.source != "none")
    assert [s.length for s in rep.steps] == sorted((s.length for s in rep.steps), reverse=True)


def test_rank_d_subquotient(F3):
    w = WordWithConstants.build(F3, 8, [(1, 1), (2, 1)])
    assert rank_d_subquotient_check(w, 3, samples=10, seed=1)
    assert rank_d_subquotient_check(w, 0)
    with pytest.raises(HypothesesFail):
        rank_d_subquotient_check(w, 4, samples=2)


def test_diameter_report_json(F2):
    w = crit_word(F2, 12, 5)
    rep = diameter_report(w, samples=4, seed=3)
    js = rep.to_json()
    assert js["floor_exact"] == "2/3" and js["theoretical_floor"] == 1
    assert js["d"] == 1 and js["realized"] >= 1
    assert diameter_report(w, samples=4, seed=3).to_json() == js
