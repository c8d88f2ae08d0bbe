"""Mixed identities on tiny matrix groups: exhaustive checks and bounded search.

Groups are tabulated once (multiplication and inverse tables over element
indices), after which a word is evaluated on every substitution at once as a
vector of element indices.  Candidate words are enumerated per letter pattern;
the last constant is never enumerated, because ``w`` is an identity exactly
when the prefix ``c_0 x.. c_{l-1} x`` is constant on G^r, and then c_l is the
inverse of that constant.
"""

from __future__ import annotations

import itertools
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field as dc_field
from functools import cached_property, reduce as _fold
from pathlib import Path

import numpy as np

from .errors import BudgetExceeded, EmptyWord, GroupTooLarge, NotInGroup, TrivialWord, ValidationError
from .field import FieldSpec, field_from_q
from .linalg import MatrixFq
from .words import Letter, WordWithConstants, free_reduce, free_reduce_letters

KINDS = ("GL", "SL", "PSL")
DEFAULT_ORDER_CAP = 500
DEFAULT_BUDGET = 10**8
_MAX_RAW = 2**20
_CHUNK = 2**22


def group_order(kind: str, n: int, q: int) -> int:
    gl = math.prod(q**n - q**i for i in range(n))
    if kind == "GL":
        return gl
    sl = gl // (q - 1)
    return sl if kind == "SL" else sl // math.gcd(n, q - 1)


def _det_batch(F: FieldSpec, mats: np.ndarray) -> np.ndarray:
    """Leibniz expansion over a batch of small matrices."""
    n = mats.shape[-1]
    total = np.zeros(mats.shape[:-2], dtype=np.int64)
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for a in range(n) for b in range(a + 1, n) if perm[a] > perm[b])
        term = np.ones(mats.shape[:-2], dtype=np.int64)
        for i, j in enumerate(perm):
            term = F.mul(term, mats[..., i, j])
        total = F.sub(total, term) if inversions % 2 else F.add(total, term)
    return total


def _canonical_projective(F: FieldSpec, mats: np.ndarray) -> np.ndarray:
    """Scale each matrix so its first nonzero entry (row-major) is 1."""
    flat = mats.reshape(mats.shape[0], -1)
    first = flat[np.arange(flat.shape[0]), np.argmax(flat != 0, axis=1)]
    return F.mul(flat, F.inv(first)[:, None]).reshape(mats.shape)


@dataclass(eq=False)
class SmallGroup:
    kind: str
    n: int
    field: FieldSpec
    mats: np.ndarray  # (order, n, n), sorted by code
    mul: np.ndarray
    inv: np.ndarray
    identity: int

    @property
    def order(self) -> int:
        return self.mats.shape[0]

    @property
    def q(self) -> int:
        return self.field.q

    def __repr__(self) -> str:
        return f"SmallGroup({self.kind}_{self.n}({self.q}), order={self.order})"

    @cached_property
    def _codes(self) -> np.ndarray:
        return _encode(self.field, self.mats)

    @property
    def elements(self) -> list[MatrixFq]:
        return [MatrixFq(self.field, m) for m in self.mats]

    def element(self, i: int) -> MatrixFq:
        return MatrixFq(self.field, self.mats[i])

    def canonical(self, mats: np.ndarray) -> np.ndarray:
        mats = np.asarray(mats, dtype=np.int64)
        if self.kind == "PSL":
            mats = _canonical_projective(self.field, mats.reshape(-1, self.n, self.n)).reshape(mats.shape)
        return mats

    def index_of_array(self, mats: np.ndarray) -> np.ndarray:
        mats = self.canonical(np.asarray(mats, dtype=np.int64).reshape(-1, self.n, self.n))
        codes = _encode(self.field, mats)
        idx = np.searchsorted(self._codes, codes)
        idx = np.minimum(idx, self.order - 1)
        if not np.array_equal(self._codes[idx], codes):
            raise NotInGroup(f"matrix is not an element of {self.kind}_{self.n}({self.q})")
        return idx

    def index(self, m: MatrixFq) -> int:
        if m.field != self.field or m.shape != (self.n, self.n):
            raise NotInGroup("matrix lives over a different field or dimension")
        return int(self.index_of_array(m.data[None])[0])

    def is_trivial(self, m: MatrixFq) -> bool:
        return m.is_scalar() if self.kind == "PSL" else m.is_identity()

    @cached_property
    def center(self) -> np.ndarray:
        comm = np.all(self.mul == self.mul.T, axis=1)
        return np.flatnonzero(comm)

    @cached_property
    def element_orders(self) -> np.ndarray:
        orders = np.zeros(self.order, dtype=np.int64)
        cur = np.arange(self.order)
        for k in range(1, self.order + 1):
            hit = (cur == self.identity) & (orders == 0)
            orders[hit] = k
            if orders.all():
                break
            cur = self.mul[cur, np.arange(self.order)]
        return orders

    @property
    def exponent(self) -> int:
        return _fold(math.lcm, (int(o) for o in self.element_orders), 1)

    @cached_property
    def conjugacy_classes(self) -> list[np.ndarray]:
        """Classes in order of their least element index."""
        g = np.arange(self.order)
        seen = np.zeros(self.order, dtype=bool)
        out = []
        for c in range(self.order):
            if seen[c]:
                continue
            cls = np.unique(self.mul[self.mul[g, c], self.inv[g]])
            seen[cls] = True
            out.append(cls)
        return out

    def conjugator_to_rep(self, c: int) -> tuple[int, int]:
        """(rep, g) with g c g^{-1} = rep, rep the least element of the class, g least."""
        g = np.arange(self.order)
        conj = self.mul[self.mul[g, c], self.inv[g]]
        rep = int(conj.min())
        return rep, int(np.flatnonzero(conj == rep)[0])

    def describe(self) -> dict:
        return {"kind": self.kind, "n": self.n, "p": self.field.p, "e": self.field.e, "order": self.order}


def _encode(F: FieldSpec, mats: np.ndarray) -> np.ndarray:
    flat = mats.reshape(mats.shape[0], -1)
    weights = F.q ** np.arange(flat.shape[1] - 1, -1, -1, dtype=np.int64)
    return flat @ weights


_GROUP_CACHE: dict[tuple, SmallGroup] = {}


def enumerate_group(kind: str, n: int, q: int, cap: int = DEFAULT_ORDER_CAP) -> SmallGroup:
    """GL_n(q), SL_n(q) or PSL_n(q) with elements sorted by their entry code."""
    kind = kind.upper()
    if kind not in KINDS:
        raise ValidationError(f"group kind must be one of {KINDS}, got {kind!r}")
    F = field_from_q(q)
    expected = group_order(kind, n, q)
    if expected > cap:
        raise GroupTooLarge(f"|{kind}_{n}({q})| = {expected} exceeds the cap {cap}")
    if q ** (n * n) > _MAX_RAW:
        raise GroupTooLarge(f"too many raw matrices to scan for {kind}_{n}({q})")
    key = (kind, n, q)
    if key in _GROUP_CACHE:
        return _GROUP_CACHE[key]
    codes = np.arange(q ** (n * n), dtype=np.int64)
    weights = q ** np.arange(n * n - 1, -1, -1, dtype=np.int64)
    mats = ((codes[:, None] // weights) % q).reshape(-1, n, n)
    det = _det_batch(F, mats)
    mats = mats[det != 0] if kind == "GL" else mats[det == 1]
    if kind == "PSL":
        mats = np.unique(_canonical_projective(F, mats).reshape(len(mats), -1), axis=0).reshape(-1, n, n)
    order = mats.shape[0]
    if order != expected:
        raise AssertionError(f"enumerated {order} elements, the order formula gives {expected}")
    G = SmallGroup(kind, n, F, mats, np.zeros(0), np.zeros(0), 0)
    prods = F.matmul(mats[:, None], mats[None, :])
    G.mul = G.index_of_array(prods).reshape(order, order)
    G.identity = int(G.index_of_array(np.eye(n, dtype=np.int64)[None])[0])
    G.inv = np.argmax(G.mul == G.identity, axis=1)
    _GROUP_CACHE[key] = G
    return G


# -- exhaustive checks ----------------------------------------------------------


def _tuple_matrices(G: SmallGroup, r: int, start: int, stop: int) -> list[np.ndarray]:
    t = np.arange(start, stop)
    coords = [(t // G.order**(r - 1 - k)) % G.order for k in range(r)]
    return [G.mats[c] for c in coords]


def is_trivial_in_free_product(w: WordWithConstants, G: SmallGroup) -> bool:
    red = free_reduce(w, G.is_trivial)
    return red.l == 0 and G.is_trivial(red.constants[0])


def is_mixed_identity(w: WordWithConstants, G: SmallGroup, chunk: int = 1024):
    """(True, None) or (False, counterexample tuple); evaluation runs on matrices, not tables."""
    if w.field != G.field or w.n != G.n:
        raise ValidationError("word and group live over different GL_n(q)")
    for c in w.constants:
        G.index(c)
    if is_trivial_in_free_product(w, G):
        raise TrivialWord("word is trivial in G * F_r")
    F = G.field
    inv_mats = np.array([m.inv().data for m in G.elements])
    total = G.order**w.r
    for start in range(0, total, chunk):
        stop = min(total, start + chunk)
        tuples = _tuple_matrices(G, w.r, start, stop)
        t = np.arange(start, stop)
        inv_tuples = [inv_mats[(t // G.order**(w.r - 1 - k)) % G.order] for k in range(w.r)]
        acc = np.broadcast_to(w.constants[0].data, (stop - start, G.n, G.n))
        for j, L in enumerate(w.letters):
            m = tuples[L.var - 1] if L.exp == 1 else inv_tuples[L.var - 1]
            acc = F.matmul(acc, m)
            c = w.constants[j + 1]
            if not c.is_identity():
                acc = F.matmul(acc, c.data)
        if G.kind == "PSL":
            diag = np.einsum("tii->ti", acc)
            off = acc.copy()
            idx = np.arange(G.n)
            off[:, idx, idx] = 0
            good = ~off.any(axis=(1, 2)) & np.all(diag == diag[:, :1], axis=1)
        else:
            good = np.all(acc == np.eye(G.n, dtype=np.int64), axis=(1, 2))
        if not good.all():
            bad = int(np.flatnonzero(~good)[0])
            return False, [MatrixFq(F, m[bad]) for m in tuples]
    return True, None


def is_law(letters, G: SmallGroup) -> bool:
    """A constant-free word (sequence of Letters) vanishing on all of G^r."""
    letters = free_reduce_letters(L if isinstance(L, Letter) else Letter(*L) for L in letters)
    if not letters:
        raise EmptyWord("a law needs a nonempty freely reduced word")
    w = WordWithConstants.build(G.field, G.n, letters, check=False)
    return is_mixed_identity(w, G)[0]


# -- search ---------------------------------------------------------------------


@dataclass(frozen=True)
class IndexWord:
    """A word whose constants are element indices of a SmallGroup."""

    letters: tuple[tuple[int, int], ...]
    consts: tuple[int, ...]

    @property
    def l(self) -> int:
        return len(self.letters)

    def to_word(self, G: SmallGroup, r: int) -> WordWithConstants:
        return WordWithConstants(
            G.field, G.n, r, tuple(Letter(v, e) for v, e in self.letters), tuple(G.element(c) for c in self.consts)
        )

    def singular(self) -> bool:
        return not free_reduce_letters(Letter(v, e) for v, e in self.letters)

    def dsl(self, G: SmallGroup) -> str:
        parts = []
        for j, c in enumerate(self.consts):
            if c != G.identity:
                parts.append(f"g{c}")
            if j < self.l:
                v, e = self.letters[j]
                parts.append(f"x{v}" if e == 1 else f"x{v}^-1")
        return "*".join(parts) if parts else "1"


def letter_patterns(r: int, l: int, nonsingular_only: bool) -> list[tuple[tuple[int, int], ...]]:
    out = []
    for pat in itertools.product([(v, e) for v in range(1, r + 1) for e in (1, -1)], repeat=l):
        if nonsingular_only and not free_reduce_letters(Letter(v, e) for v, e in pat):
            continue
        out.append(pat)
    return out


def _critical_positions(pat) -> set[int]:
    return {j for j in range(1, len(pat)) if pat[j - 1][0] == pat[j][0] and pat[j - 1][1] == -pat[j][1]}


def _first_occurrences(pat) -> list[int]:
    seen, out = set(), []
    for p, (v, _) in enumerate(pat):
        if v not in seen:
            seen.add(v)
            out.append(p)
    return out


def constant_options(G: SmallGroup, pat, prune: bool) -> tuple[list[np.ndarray], dict[str, int]]:
    """Per-position choices for c_0..c_{l-1} and the number of candidates each rule removed."""
    l = len(pat)
    full = np.arange(G.order)
    if not prune:
        return [full] * l, _scale_removed(G, pat, [full] * l, prune)
    fixed = set(_first_occurrences(pat))
    crit = _critical_positions(pat)
    noncentral = np.setdiff1d(full, G.center)
    reps = np.array([int(c[0]) for c in G.conjugacy_classes])
    first_free = min((j for j in range(l) if j not in fixed), default=None)
    opts = []
    for j in range(l):
        if j in fixed:
            opts.append(np.array([G.identity]))
            continue
        base = noncentral if j in crit else full
        opts.append(np.intersect1d(reps, base) if j == first_free else base)
    return opts, _scale_removed(G, pat, opts, prune)


def _scale_removed(G: SmallGroup, pat, opts, prune) -> dict[str, int]:
    """Candidates removed per rule, counting the full tail of each removed prefix."""
    l = len(pat)
    out = {"substitution": 0, "conjugation": 0, "reduced": 0}
    if not prune:
        return out
    fixed = set(_first_occurrences(pat))
    crit = _critical_positions(pat)
    first_free = min((j for j in range(l) if j not in fixed), default=None)
    ncentral = G.center.size
    before = 1
    for j in range(l):
        tail = G.order ** (l - 1 - j)
        if j in fixed:
            out["substitution"] += before * (G.order - 1) * tail
        else:
            base = G.order - (ncentral if j in crit else 0)
            out["reduced"] += before * (G.order - base) * tail
            if j == first_free:
                out["conjugation"] += before * (base - opts[j].size) * tail
        before *= opts[j].size
    return out


def _candidates(opts) -> int:
    return math.prod(o.size for o in opts)


def _search_pattern(G: SmallGroup, r: int, pat, prune: bool) -> list[IndexWord]:
    """All identities with letter pattern ``pat`` (c_l determined)."""
    T = G.order**r
    t = np.arange(T)
    coords = [(t // G.order**(r - 1 - k)) % G.order for k in range(r)]
    letter_vals = {(v, e): (coords[v - 1] if e == 1 else G.inv[coords[v - 1]]) for v, e in pat}
    opts, _ = constant_options(G, pat, prune)
    l = len(pat)
    found: list[IndexWord] = []

    def rec(state: np.ndarray, chosen: np.ndarray, j: int):
        if j == l:
            const = np.all(state == state[:, :1], axis=1)
            for row in np.flatnonzero(const):
                cl = int(G.inv[state[row, 0]])
                found.append(IndexWord(tuple(pat), tuple(int(c) for c in chosen[row]) + (cl,)))
            return
        o = opts[j]
        rows = state.shape[0]
        step = max(1, _CHUNK // max(1, o.size * T))
        for a in range(0, rows, step):
            s = state[a : a + step]
            nxt = G.mul[s[:, None, :], o[None, :, None]].reshape(-1, T)
            nxt = G.mul[nxt, letter_vals[pat[j]][None, :]]
            ch = np.hstack([np.repeat(chosen[a : a + step], o.size, axis=0), np.tile(o, s.shape[0])[:, None]])
            rec(nxt, ch, j + 1)

    rec(np.zeros((1, T), dtype=np.int64) + G.identity, np.zeros((1, 0), dtype=np.int64), 0)
    if not prune:
        found = [w for w in found if not _index_trivial(G, w)]
    return found


def _index_trivial(G: SmallGroup, w: IndexWord) -> bool:
    """Free-product triviality on index words: x^e c x^-e with c = 1 collapses."""
    letters, consts = list(w.letters), list(w.consts)
    j = 1
    while j < len(letters):
        (v1, e1), (v2, e2) = letters[j - 1], letters[j]
        if v1 == v2 and e1 == -e2 and consts[j] == G.identity:
            merged = int(G.mul[G.mul[consts[j - 1], consts[j]], consts[j + 1]])
            letters = letters[: j - 1] + letters[j + 1 :]
            consts = consts[: j - 1] + [merged] + consts[j + 2 :]
            j = max(1, j - 1)
        else:
            j += 1
    return not letters and consts[0] == G.identity


def normal_form(G: SmallGroup, w: IndexWord) -> IndexWord:
    """Apply the pruning symmetries: cancel central critical constants, then (ii), then (i)."""
    letters, consts = list(w.letters), list(w.consts)
    central = set(int(z) for z in G.center)
    changed = True
    while changed:
        changed = False
        for j in range(1, len(letters)):
            (v1, e1), (v2, e2) = letters[j - 1], letters[j]
            if v1 == v2 and e1 == -e2 and consts[j] in central:
                merged = int(G.mul[G.mul[consts[j - 1], consts[j]], consts[j + 1]])
                letters = letters[: j - 1] + letters[j + 1 :]
                consts = consts[: j - 1] + [merged] + consts[j + 2 :]
                changed = True
                break
    for p in _first_occurrences(letters):
        v, e = letters[p]
        c = consts[p]
        ci = int(G.inv[c])
        for qpos, (v2, e2) in enumerate(letters):
            if v2 != v:
                continue
            if e2 == e:
                consts[qpos] = int(G.mul[consts[qpos], ci])
            else:
                consts[qpos + 1] = int(G.mul[c, consts[qpos + 1]])
    fixed = set(_first_occurrences(letters))
    free = [j for j in range(len(letters)) if j not in fixed]
    if free:
        _, g = G.conjugator_to_rep(consts[free[0]])
        gi = int(G.inv[g])
        consts = [int(G.mul[G.mul[g, c], gi]) for c in consts]
    return IndexWord(tuple(letters), tuple(consts))


@dataclass
class SearchReport:
    group: dict
    r: int
    max_length: int
    mode: str
    prune: bool
    minimal_length: int | None = None
    identities: list[dict] = dc_field(default_factory=list)
    pruned: dict[str, int] = dc_field(default_factory=lambda: {"substitution": 0, "conjugation": 0, "reduced": 0})
    candidates: int = 0
    evaluations: int = 0
    levels_completed: int = -1
    complete: bool = False
    wall_time: float = 0.0

    def to_json(self, include_time: bool = False) -> dict:
        d = asdict(self)
        if not include_time:
            d.pop("wall_time")
        return d


def _identity_record(G: SmallGroup, r: int, w: IndexWord) -> dict:
    F = G.field
    return {
        "length": w.l,
        "word": w.dsl(G),
        "letters": [list(L) for L in w.letters],
        "constants": [[[F.to_json(x) for x in row] for row in G.mats[c].tolist()] for c in w.consts],
        "constant_indices": list(w.consts),
        "singular": w.singular(),
    }


def _pattern_key(pat) -> str:
    return "_".join(f"{v}{'p' if e == 1 else 'm'}" for v, e in pat) or "empty"


def _worker(args):
    kind, n, q, r, pat, prune = args
    G = enumerate_group(kind, n, q)
    return [(w.letters, w.consts) for w in _search_pattern(G, r, pat, prune)]


def _run_patterns(G: SmallGroup, r: int, pats, prune: bool, workers: int, checkpoint: Path | None) -> list[IndexWord]:
    results: dict[tuple, list] = {}
    todo = []
    for pat in pats:
        path = checkpoint / f"{len(pat)}__{_pattern_key(pat)}.json" if checkpoint else None
        if path is not None and path.exists():
            results[pat] = [(tuple(map(tuple, a)), tuple(b)) for a, b in json.loads(path.read_text())]
        else:
            todo.append(pat)
    jobs = [(G.kind, G.n, G.q, r, pat, prune) for pat in todo]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outs = list(pool.map(_worker, jobs))
    else:
        outs = [_worker(j) for j in jobs]
    for pat, out in zip(todo, outs):
        results[pat] = out
        if checkpoint is not None:
            checkpoint.mkdir(parents=True, exist_ok=True)
            path = checkpoint / f"{len(pat)}__{_pattern_key(pat)}.json"
            path.write_text(json.dumps([[list(map(list, a)), list(b)] for a, b in out]))
    words = [IndexWord(a, b) for pat in pats for a, b in results[pat]]
    return sorted(words, key=lambda w: (w.l, w.letters, w.consts))


def shortest_identity_search(
    G: SmallGroup,
    r: int = 1,
    max_l: int = 4,
    mode: str = "nonsingular-only",
    prune: bool = True,
    budget: int = DEFAULT_BUDGET,
    workers: int = 1,
    checkpoint: str | os.PathLike | None = None,
    stop_at_first: bool = True,
    verify: bool = True,
) -> SearchReport:
    """Identities of length <= max_l, by increasing length.

    With ``stop_at_first`` the search ends at the first length that has any
    identity; otherwise every identity up to ``max_l`` is reported.
    """
    if mode not in ("all", "nonsingular-only"):
        raise ValidationError(f"mode must be 'all' or 'nonsingular-only', got {mode!r}")
    if r < 1:
        raise ValidationError("r must be at least 1")
    start = time.perf_counter()
    rep = SearchReport(G.describe(), r, max_l, mode, prune)
    ckpt = Path(checkpoint) if checkpoint is not None else None
    T = G.order**r
    for l in range(0, max_l + 1):
        if l == 0:
            # constant words: c_0 is an identity only if trivial, and then the word is trivial
            rep.levels_completed = 0
            continue
        pats = letter_patterns(r, l, mode == "nonsingular-only")
        level_candidates = 0
        for pat in pats:
            opts, removed = constant_options(G, pat, prune)
            level_candidates += _candidates(opts)
            for k, v in removed.items():
                rep.pruned[k] += v
        if rep.evaluations + level_candidates * T > budget:
            rep.wall_time = time.perf_counter() - start
            raise BudgetExceeded(
                f"length {l} needs {level_candidates * T} evaluations; budget left {budget - rep.evaluations}", rep
            )
        found = _run_patterns(G, r, pats, prune, workers, ckpt)
        rep.candidates += level_candidates
        rep.evaluations += level_candidates * T
        for w in found:
            if verify:
                ok, _ = is_mixed_identity(w.to_word(G, r), G)
                if not ok:
                    raise AssertionError(f"table search reported a non-identity {w.dsl(G)}")
            rep.identities.append(_identity_record(G, r, w))
        rep.levels_completed = l
        if found and rep.minimal_length is None:
            rep.minimal_length = l
        if found and stop_at_first:
            break
    rep.complete = True
    rep.wall_time = time.perf_counter() - start
    return rep


def identity_set(report: SearchReport) -> set[IndexWord]:
    return {IndexWord(tuple(tuple(L) for L in rec["letters"]), tuple(rec["constant_indices"])) for rec in report.identities}
