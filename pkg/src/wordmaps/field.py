"""Finite fields F_q with q = p^e.

Elements are stored as integer codes ``sum(c_i * p**i)`` where ``c_0..c_{e-1}``
are the coefficients (low to high) of the canonical representative in
F_p[t]/(modulus).  All arithmetic is vectorised over numpy int64 arrays of
codes, so matrices are plain 2-D arrays of codes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DegreeZero, FieldTooLarge, NonPrime

DEFAULT_MAX_Q = 2**16
_ADD_TABLE_MAX_Q = 1024


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


# -- polynomial helpers over F_p (coefficient lists, low to high) -----------


def _poly_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: list[int], m: list[int], p: int) -> list[int]:
    a = _poly_trim(list(a))
    dm = len(m) - 1
    inv_lead = pow(m[-1], -1, p)
    while len(a) - 1 >= dm:
        coef = (a[-1] * inv_lead) % p
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - coef * mi) % p
        _poly_trim(a)
    return a


def _poly_mulmod(a: list[int], b: list[int], m: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_mod(out, m, p)


def is_irreducible(poly: tuple[int, ...] | list[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    poly = _poly_trim(list(poly))
    deg = len(poly) - 1
    if deg < 1:
        return False
    if deg == 1:
        return True
    for k in range(1, deg // 2 + 1):
        for low in itertools.product(range(p), repeat=k):
            divisor = list(low) + [1]
            if not _poly_mod(poly, divisor, p):
                return False
    return True


def smallest_irreducible(p: int, e: int) -> tuple[int, ...]:
    """Lexicographically smallest (low-to-high coefficient list) monic irreducible."""
    for low in itertools.product(range(p), repeat=e):
        cand = tuple(low) + (1,)
        if is_irreducible(cand, p):
            return cand
    raise AssertionError(f"no irreducible polynomial of degree {e} over F_{p}")


@dataclass(frozen=True)
class FieldSpec:
    p: int
    e: int
    modulus: tuple[int, ...]

    @property
    def q(self) -> int:
        return self.p**self.e

    @property
    def is_prime_field(self) -> bool:
        return self.e == 1

    def __repr__(self) -> str:
        return f"FieldSpec(p={self.p}, e={self.e}, modulus={list(self.modulus)})"

    # -- element conversion ------------------------------------------------

    def coeffs(self, code: int) -> list[int]:
        out = []
        for _ in range(self.e):
            out.append(int(code) % self.p)
            code = int(code) // self.p
        return out

    def from_coeffs(self, coeffs) -> int:
        coeffs = list(coeffs)
        if len(coeffs) != self.e or any(not 0 <= c < self.p for c in coeffs):
            raise ValueError(f"expected {self.e} residues mod {self.p}, got {coeffs}")
        return sum(int(c) * self.p**i for i, c in enumerate(coeffs))

    def element(self, obj) -> int:
        """Accept an int code (prime fields) or a coefficient list."""
        if isinstance(obj, (list, tuple)):
            return self.from_coeffs(obj)
        code = int(obj)
        if self.e == 1:
            return code % self.p
        if not 0 <= code < self.q:
            raise ValueError(f"element code {code} out of range for F_{self.q}")
        return code

    def to_json(self, code: int):
        return int(code) if self.e == 1 else self.coeffs(code)

    def elements(self) -> np.ndarray:
        return np.arange(self.q, dtype=np.int64)

    def nonzero(self) -> np.ndarray:
        return np.arange(1, self.q, dtype=np.int64)

    # -- tables --------------------------------------------------------------

    @cached_property
    def _pow_p(self) -> np.ndarray:
        return self.p ** np.arange(self.e, dtype=np.int64)

    @cached_property
    def _log_exp(self) -> tuple[np.ndarray, np.ndarray]:
        q, p, m = self.q, self.p, list(self.modulus)
        for g in range(2, q):
            gpoly = _poly_trim(self.coeffs(g))
            exp = np.zeros(2 * (q - 1), dtype=np.int64)
            cur = [1]
            order = 0
            seen_one = False
            for k in range(q - 1):
                code = sum(c * p**i for i, c in enumerate(cur))
                if k > 0 and code == 1:
                    seen_one = True
                    break
                exp[k] = code
                cur = _poly_mulmod(cur, gpoly, m, p)
                order += 1
            if seen_one or order != q - 1:
                continue
            exp[q - 1 :] = exp[: q - 1]
            log = np.zeros(q, dtype=np.int64)
            log[exp[: q - 1]] = np.arange(q - 1)
            return log, exp
        # q == 2 has the trivial generator 1
        return np.zeros(q, dtype=np.int64), np.ones(2 * (q - 1), dtype=np.int64)

    @cached_property
    def _inv_table(self) -> np.ndarray:
        q = self.q
        inv = np.zeros(q, dtype=np.int64)
        if self.e == 1:
            for a in range(1, q):
                inv[a] = pow(a, -1, q)
        else:
            log, exp = self._log_exp
            nz = np.arange(1, q)
            inv[nz] = exp[(q - 1 - log[nz]) % (q - 1)]
        return inv

    @cached_property
    def _neg_table(self) -> np.ndarray:
        codes = np.arange(self.q, dtype=np.int64)
        digits = (codes[:, None] // self._pow_p) % self.p
        return ((-digits) % self.p) @ self._pow_p

    @cached_property
    def _add_table(self) -> np.ndarray | None:
        if self.q > _ADD_TABLE_MAX_Q:
            return None
        codes = np.arange(self.q, dtype=np.int64)
        digits = (codes[:, None] // self._pow_p) % self.p
        s = (digits[:, None, :] + digits[None, :, :]) % self.p
        return s @ self._pow_p

    @cached_property
    def _mul_table(self) -> np.ndarray | None:
        if self.q > _ADD_TABLE_MAX_Q:
            return None
        log, exp = self._log_exp
        codes = np.arange(self.q, dtype=np.int64)
        t = exp[log[codes][:, None] + log[codes][None, :]]
        t[0, :] = 0
        t[:, 0] = 0
        return t

    # -- vectorised arithmetic ---------------------------------------------

    def add(self, a, b):
        if self.e == 1:
            return (np.asarray(a) + b) % self.p
        if self.p == 2:
            return np.bitwise_xor(a, b)
        table = self._add_table
        if table is not None:
            return table[a, b]
        a = np.asarray(a)[..., None]
        b = np.asarray(b)[..., None]
        digits = ((a // self._pow_p) + (b // self._pow_p)) % self.p
        return digits @ self._pow_p

    def neg(self, a):
        if self.e == 1:
            return (-np.asarray(a)) % self.p
        if self.p == 2:
            return np.asarray(a)
        return self._neg_table[a]

    def sub(self, a, b):
        if self.e == 1:
            return (np.asarray(a) - b) % self.p
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self.e == 1:
            return (np.asarray(a) * b) % self.p
        table = self._mul_table
        if table is not None:
            return table[a, b]
        a = np.asarray(a)
        b = np.asarray(b)
        log, exp = self._log_exp
        out = exp[log[a] + log[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def inv(self, a):
        a = np.asarray(a)
        if np.any(a == 0):
            raise ZeroDivisionError("zero has no inverse")
        return self._inv_table[a]

    def sum(self, a, axis):
        a = np.asarray(a)
        if self.e == 1:
            return a.sum(axis=axis) % self.p
        if self.p == 2:
            return np.bitwise_xor.reduce(a, axis=axis)
        digits = (a[..., None] // self._pow_p) % self.p
        ax = axis if axis >= 0 else axis - 1
        return (digits.sum(axis=ax) % self.p) @ self._pow_p

    def matmul(self, a, b):
        """Matrix product of code arrays; leading axes broadcast."""
        if self.e == 1:
            return (np.asarray(a) @ np.asarray(b)) % self.p
        a = np.asarray(a)
        b = np.asarray(b)
        if b.ndim == 1:
            return self.sum(self.mul(a, b), axis=-1)
        if a.ndim == 1:
            return self.sum(self.mul(a[:, None], b), axis=0)
        return self.sum(self.mul(a[..., :, :, None], b[..., None, :, :]), axis=-2)

    def random(self, rng: np.random.Generator, size) -> np.ndarray:
        return rng.integers(0, self.q, size=size, dtype=np.int64)


_FIELD_CACHE: dict[tuple[int, int], FieldSpec] = {}


def field_make(p: int, e: int = 1, max_q: int = DEFAULT_MAX_Q) -> FieldSpec:
    """Build F_{p^e} with the lexicographically smallest monic irreducible modulus."""
    if e < 1:
        raise DegreeZero(f"extension degree must be >= 1, got {e}")
    if not is_prime(p):
        raise NonPrime(f"{p} is not prime")
    if p**e > max_q:
        raise FieldTooLarge(f"q = {p}^{e} exceeds the bound {max_q}")
    key = (p, e)
    if key not in _FIELD_CACHE:
        _FIELD_CACHE[key] = FieldSpec(p, e, smallest_irreducible(p, e))
    return _FIELD_CACHE[key]


def field_from_q(q: int, max_q: int = DEFAULT_MAX_Q) -> FieldSpec:
    for p in range(2, q + 1):
        if q % p == 0:
            e = 0
            r = q
            while r % p == 0:
                r //= p
                e += 1
            if r != 1:
                raise NonPrime(f"{q} is not a prime power")
            return field_make(p, e, max_q)
    raise NonPrime(f"{q} is not a prime power")
