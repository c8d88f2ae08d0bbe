import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wordmaps.errors import HypothesesFail
from wordmaps.field import field_make
from wordmaps.linalg import MatrixFq, _rank, mat_det, random_invertible
from wordmaps.witness import (
    TrajectoryTrace,
    build_trajectories,
    check_hypotheses,
    construct_witness,
    counting_certificate,
    max_admissible_d,
    normalize_for_witness,
    random_instance,
    solve_group_elements,
    standard_instance,
)
from wordmaps.words import WordWithConstants, evaluate, random_word


def eye(n):
    return np.eye(n, dtype=np.int64)


def strong(F, n, l=2):
    return WordWithConstants.build(F, n, [(k % 2 + 1, 1) for k in range(l)])


def test_admissible_d_examples(F3):
    w = strong(F3, 12)
    assert max_admissible_d(w, "GL") == 5
    assert check_hypotheses(w, eye(12)[:5], eye(12)[5:10])
    rep = check_hypotheses(w, eye(12)[:6], eye(12)[6:12])
    assert not rep and "transitivity_bound" in rep.violations
    # SL: D = n - 1 and d l < n
    assert max_admissible_d(w, "SL") == 5
    assert max_admissible_d(strong(F3, 11), "SL") == 5
    assert max_admissible_d(strong(F3, 10), "SL") == 4


def test_trivial_intersection_clause(F2):
    c = random_invertible(F2, 4, np.random.default_rng(1))
    w = WordWithConstants.build(F2, 4, [(1, 1), (1, 1), (1, -1)], {1: c, 2: c})
    e1 = eye(4)[:1]
    rep = check_hypotheses(w, e1, e1)
    assert "trivial_intersection" in rep.violations


def test_other_violations_are_named(F2):
    w = WordWithConstants.build(F2, 4, [(1, 1)])
    rep = check_hypotheses(w, eye(4)[:1], eye(4)[1:2])
    assert "length" in rep.violations
    w = WordWithConstants.build(F2, 4, [(1, 1), (1, -1)])
    assert "reduced" in check_hypotheses(w, eye(4)[:1], eye(4)[1:2]).violations
    w = strong(F2, 4)
    rep = check_hypotheses(w, np.array([[1, 0, 0, 0], [1, 0, 0, 0]]), eye(4)[:2])
    assert "sources_independent" in rep.violations
    c = random_invertible(F2, 4, np.random.default_rng(0))
    w = WordWithConstants.build(F2, 4, [(1, 1), (2, 1)], {0: c})
    assert "boundary_constants" in check_hypotheses(w, eye(4)[:1], eye(4)[1:2]).violations


def test_normalize(F3):
    rng = np.random.default_rng(3)
    w = strong(F3, 3)
    src, tgt = eye(3)[:1], eye(3)[1:2]
    wt, s, t = normalize_for_witness(w, src, tgt)
    assert wt is w and np.array_equal(s, src) and np.array_equal(t, tgt)
    c = random_invertible(F3, 3, rng)
    w = WordWithConstants.build(F3, 3, [(1, 1)], {0: c})
    wt, s, t = normalize_for_witness(w, src, tgt)
    assert all(k.is_identity() for k in wt.constants)
    assert np.array_equal(s[0], c.apply(src[0])) and np.array_equal(t, tgt)


def test_empty_trace(F2):
    tr = build_trajectories(strong(F2, 4), np.zeros((0, 4)), np.zeros((0, 4)))
    assert tr.d == 0 and tr.steps == []
    res = construct_witness(strong(F2, 4), np.zeros((0, 4)), np.zeros((0, 4)))
    assert all(h.is_identity() for h in res.h)


def test_solve_single_pair(F2):
    tr = TrajectoryTrace(
        1, 1, 2, (1,), (1,), np.array([[[1, 0]]]), np.array([[[0, 1]]]), {}
    )
    w = WordWithConstants.build(F2, 2, [(1, 1)], r=2)
    h = solve_group_elements(tr, w, "GL")
    assert h[0] == MatrixFq.from_rows(F2, [[0, 1], [1, 0]])
    assert h[1].is_identity()


def test_solve_sl_fixes_determinant(F3):
    tr = TrajectoryTrace(
        1, 1, 3, (1,), (1,), np.array([[[1, 0, 0]]]), np.array([[[0, 2, 0]]]), {}
    )
    w = WordWithConstants.build(F3, 3, [(1, 1)])
    (h,) = solve_group_elements(tr, w, "SL")
    assert mat_det(h) == 1 and np.array_equal(h.apply([1, 0, 0]), [0, 2, 0])


def test_construct_examples(F2, F3):
    res = construct_witness(strong(F2, 4), eye(4)[:1], eye(4)[1:2])
    assert res.verified
    assert np.array_equal(evaluate(res.word, res.h).apply(eye(4)[0]), eye(4)[1])
    src, tgt = eye(12)[:2], eye(12)[2:4]
    res = construct_witness(strong(F3, 12), src, tgt, seed=4)
    g = evaluate(res.word, res.h)
    for u, t in zip(src, tgt):
        assert np.array_equal(g.apply(u), t)
    with pytest.raises(HypothesesFail) as exc:
        construct_witness(strong(F3, 12), eye(12)[:6], eye(12)[6:])
    assert "transitivity_bound" in exc.value.violations


def test_counting_certificate_arithmetic():
    cert = counting_certificate(3, 12, 2, 2, [(1, 4), (2, 3)])
    assert cert["m"] == 2
    assert cert["lhs"] == (3 - 2 + 1) * 3**3 + 3**3 * 3**4 + 3**3 * 3**3
    assert cert["rhs"] == 3**12 - 1 and cert["holds"]


def test_determinism(F3):
    rng = np.random.default_rng(9)
    w = random_word(F3, 12, 3, 2, rng, boundary=True)
    d = max_admissible_d(w)
    src, tgt = random_instance(w, d, rng)
    a = construct_witness(w, src, tgt, seed=17)
    b = construct_witness(w, src, tgt, seed=17)
    assert all(x == y for x, y in zip(a.h, b.h))
    assert np.array_equal(a.trace.v_plus, b.trace.v_plus)
    assert a.trace.to_json(F3) == b.trace.to_json(F3)


FIELDS = [(2, 1), (3, 1), (2, 2), (5, 1)]


@settings(max_examples=30)
@given(
    st.sampled_from(FIELDS),
    st.sampled_from([6, 8, 12]),
    st.integers(2, 4),
    st.integers(1, 3),
    st.sampled_from(["GL", "SL"]),
    st.integers(0, 2**32 - 1),
)
def test_witness_soundness_and_trace_invariants(pe, n, l, r, group, seed):
    F = field_make(*pe)
    rng = np.random.default_rng(seed)
    w = random_word(F, n, l, r, rng, boundary=True)
    d = max_admissible_d(w, group)
    src, tgt = random_instance(w, d, rng)
    res = construct_witness(w, src, tgt, group, seed=seed)
    g = evaluate(w, res.h)
    for u, t in zip(src, tgt):
        assert np.array_equal(g.apply(u), t)
    if group == "SL":
        assert all(mat_det(h) == 1 for h in res.h)
    tr = res.trace
    wt, s2, t2 = normalize_for_witness(w, src, tgt)
    for i in range(d):
        assert np.array_equal(tr.v_in(i, 0), s2[i])
        assert np.array_equal(tr.v_out(i, l - 1), t2[i])
        for j in range(1, l):
            assert np.array_equal(tr.v_in(i, j), wt.constants[j].apply(tr.v_out(i, j - 1)))
    for k in range(1, w.r + 1):
        plus, minus = tr.pairs(k)
        assert _rank(F, plus) == plus.shape[0] and _rank(F, minus) == minus.shape[0]
        for a, b in zip(plus, minus):
            assert np.array_equal(res.h[k - 1].apply(a), b)
    for step in tr.steps:
        for _, sp in step.avoided:
            assert not sp.contains(step.chosen)
        assert step.dim_bound_ok
    assert all(c["holds"] and c["lhs"] < c["rhs"] for c in tr.certificates())


def test_standard_instance_shape(F2):
    src, tgt = standard_instance(strong(F2, 8), 3)
    assert src.shape == tgt.shape == (3, 8)
    assert np.array_equal(np.vstack([src, tgt]), eye(8)[:6])
