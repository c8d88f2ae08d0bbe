import itertools
import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from wordmaps.field import field_make

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", max_examples=300, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

SMALL_FIELDS = [(2, 1), (3, 1), (2, 2), (5, 1), (3, 2), (2, 3)]


@pytest.fixture
def F2():
    return field_make(2)


@pytest.fixture
def F3():
    return field_make(3)


@pytest.fixture
def F4():
    return field_make(2, 2)


def all_vectors(F, n):
    """Every vector of F_q^n as rows of an int array."""
    return np.array(list(itertools.product(range(F.q), repeat=n)), dtype=np.int64).reshape(-1, n)


def span_set(F, rows, n):
    """Brute-force span: all F_q-combinations of the rows."""
    rows = np.asarray(rows, dtype=np.int64).reshape(-1, n)
    out = set()
    for coeffs in itertools.product(range(F.q), repeat=rows.shape[0]):
        v = np.zeros(n, dtype=np.int64)
        for c, r in zip(coeffs, rows):
            v = F.add(v, F.mul(r, c))
        out.add(tuple(int(x) for x in v))
    return out


def image_rank(F, m):
    """rank as log_q of |{v.m}|, by enumeration."""
    m = np.asarray(m)
    vecs = all_vectors(F, m.shape[0])
    img = {tuple(r) for r in F.matmul(vecs, m).tolist()}
    k = 0
    while F.q**k < len(img):
        k += 1
    assert F.q**k == len(img)
    return k
