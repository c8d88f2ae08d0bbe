"""Explicit witnesses for linear transitivity of word maps.

Given a reduced word w and independent vectors u_1..u_d, t_1..t_d, build
h_1..h_r in GL_n(q) (or SL_n(q)) with ``u_i . w(h) = t_i``.  Every letter
x_k^{+-1} of w sends a vector v^{e} to v^{-e}, and h_k is chosen to map all
``v^+`` vectors attached to variable k onto the matching ``v^-`` vectors.
The intermediate vectors are picked one at a time, each avoiding a small
union of subspaces so that the per-variable families stay independent.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import (
    AvoidanceImpossible,
    CertificateViolated,
    DeterminantUnfixable,
    DimensionMismatch,
    HypothesesFail,
    IndependenceBroken,
    UnionCoversSpace,
    VerificationFailed,
)
from .linalg import (
    MatrixFq,
    Subspace,
    _rank,
    avoid_union,
    basis_extend,
    eigen_spectrum,
    mat_det,
    mat_inv,
    subspace_contains,
    subspace_intersect,
    subspace_preimage,
    subspace_sum,
)
from .seminorm import critical_length, projective_norm
from .words import WordWithConstants, evaluate, index_kind, is_reduced

GROUPS = ("GL", "SL")


def _group(group: str) -> str:
    g = group.upper()
    if g not in GROUPS:
        raise ValueError(f"group must be one of {GROUPS}, got {group!r}")
    return g


def _vectors(w: WordWithConstants, vecs) -> np.ndarray:
    arr = np.asarray(vecs, dtype=np.int64)
    if arr.size == 0:
        return np.zeros((0, w.n), dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != w.n:
        raise DimensionMismatch(f"expected vectors of length {w.n}, got shape {arr.shape}")
    if arr.min() < 0 or arr.max() >= w.field.q:
        raise DimensionMismatch("vector entries out of range for the field")
    return arr


@dataclass
class HypothesisReport:
    ok: bool
    violations: list[str]
    d: int
    l: int
    n: int
    group: str
    crit: int | None = None
    D: int | None = None
    bound: int | None = None

    def __bool__(self) -> bool:
        return self.ok


def transitivity_degree(n: int, group: str) -> int:
    return n if _group(group) == "GL" else n - 1


def max_admissible_d(w: WordWithConstants, group: str = "GL") -> int:
    """Largest d with d * l <= min(crit - 1, D) (and d * l < n for SL)."""
    crit = critical_length(w)
    D = transitivity_degree(w.n, group)
    d = min(crit - 1, D) // w.l
    if _group(group) == "SL":
        while d > 0 and d * w.l >= w.n:
            d -= 1
    return max(d, 0)


def caveat_applies(w: WordWithConstants) -> bool:
    """First and last letter are the same variable with opposite signs."""
    a, b = w.letters[0], w.letters[-1]
    return a.var == b.var and a.exp == -b.exp


def check_hypotheses(w: WordWithConstants, sources, targets, group: str = "GL") -> HypothesisReport:
    group = _group(group)
    src = _vectors(w, sources)
    tgt = _vectors(w, targets)
    d = src.shape[0]
    rep = HypothesisReport(True, [], d, w.l, w.n, group)

    def fail(name):
        rep.ok = False
        rep.violations.append(name)

    if w.l < 2:
        fail("length")
    reduced = bool(is_reduced(w))
    if not reduced:
        fail("reduced")
    if not (w.constants[0].is_identity() and w.constants[-1].is_identity()):
        fail("boundary_constants")
    if tgt.shape[0] != d:
        fail("equal_counts")
    if _rank(w.field, src) < d:
        fail("sources_independent")
    if _rank(w.field, tgt) < tgt.shape[0]:
        fail("targets_independent")
    if reduced:
        rep.crit = critical_length(w)
        rep.D = transitivity_degree(w.n, group)
        rep.bound = min(rep.crit - 1, rep.D)
        if d * w.l > rep.bound:
            fail("transitivity_bound")
    if group == "SL" and d > 0 and d * w.l >= w.n:
        fail("sl_headroom")
    if w.l >= 1 and d > 0 and caveat_applies(w) and tgt.shape[0] == d:
        U = Subspace.from_vectors(w.field, w.n, src)
        T = Subspace.from_vectors(w.field, w.n, tgt)
        if subspace_intersect(U, T).dim:
            fail("trivial_intersection")
    return rep


def normalize_for_witness(w: WordWithConstants, sources, targets):
    """Strip c_0 and c_l: u.c_0 w~(h) c_l = t  iff  (u.c_0) w~(h) = t.c_l^{-1}."""
    src = _vectors(w, sources)
    tgt = _vectors(w, targets)
    c0, cl = w.constants[0], w.constants[-1]
    ident = MatrixFq.identity(w.field, w.n)
    if c0.is_identity() and cl.is_identity():
        return w, src, tgt
    F = w.field
    new_src = F.matmul(src, c0.data) if src.shape[0] else src
    new_tgt = F.matmul(tgt, mat_inv(cl).data) if tgt.shape[0] else tgt
    wt = w.with_constants((ident,) + w.constants[1:-1] + (ident,))
    return wt, new_src, new_tgt


@dataclass
class AvoidanceStep:
    i: int
    j: int
    case: str
    avoided: list[tuple[str, Subspace]]
    chosen: np.ndarray
    dim_bound_ok: bool
    certificate: dict | None = None


@dataclass
class TrajectoryTrace:
    d: int
    l: int
    n: int
    signs: tuple[int, ...]
    vars: tuple[int, ...]
    v_plus: np.ndarray
    v_minus: np.ndarray
    anchors: dict[tuple[int, int], Subspace]
    steps: list[AvoidanceStep] = dc_field(default_factory=list)

    def v_in(self, i: int, j: int) -> np.ndarray:
        """v_{i,j}^{e(j)}, 0-based indices."""
        return self.v_plus[i, j] if self.signs[j] == 1 else self.v_minus[i, j]

    def v_out(self, i: int, j: int) -> np.ndarray:
        return self.v_minus[i, j] if self.signs[j] == 1 else self.v_plus[i, j]

    def pairs(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        """All (v^+, v^-) attached to variable k, lexicographic in (i, j)."""
        idx = [(i, j) for i in range(self.d) for j in range(self.l) if self.vars[j] == k]
        n = self.n
        if not idx:
            return np.zeros((0, n), dtype=np.int64), np.zeros((0, n), dtype=np.int64)
        plus = np.array([self.v_plus[i, j] for i, j in idx])
        minus = np.array([self.v_minus[i, j] for i, j in idx])
        return plus, minus

    def certificates(self) -> list[dict]:
        return [s.certificate for s in self.steps if s.certificate is not None]

    def to_json(self, field) -> dict:
        enc = lambda v: [field.to_json(x) for x in v]
        return {
            "d": self.d,
            "l": self.l,
            "n": self.n,
            "v_plus": [[enc(v) for v in row] for row in self.v_plus],
            "v_minus": [[enc(v) for v in row] for row in self.v_minus],
            "anchors": {f"x{k}{'+' if s == 1 else '-'}": sp.dim for (k, s), sp in sorted(self.anchors.items())},
            "steps": [
                {
                    "i": s.i + 1,
                    "j": s.j + 1,
                    "case": s.case,
                    "avoided": [[name, sp.dim] for name, sp in s.avoided],
                    "chosen": enc(s.chosen),
                    "dim_bound_ok": s.dim_bound_ok,
                    "certificate": None
                    if s.certificate is None
                    else {k: (str(v) if isinstance(v, int) and abs(v) > 2**53 else v) for k, v in s.certificate.items()},
                }
                for s in self.steps
            ],
        }


def counting_certificate(q: int, n: int, d: int, l: int, spectrum: list[tuple[int, int]]) -> dict:
    """Exact count of vectors excluded at a critical step versus q^n - 1."""
    nz = [(lam, dk) for lam, dk in spectrum if lam != 0]
    m = len(nz)
    base = q ** (d * l - 1)
    lhs = (q - m + 1) * base + sum(base * q**dk for _, dk in nz)
    rhs = q**n - 1
    return {"q": q, "n": n, "d": d, "l": l, "m": m, "d_k": [dk for _, dk in nz], "lhs": lhs, "rhs": rhs, "holds": lhs < rhs}


def build_trajectories(w: WordWithConstants, sources, targets, seed=0) -> TrajectoryTrace:
    """Choose every intermediate vector by induction over (i, j) in lexicographic order."""
    F, n, l = w.field, w.n, w.l
    src = _vectors(w, sources)
    tgt = _vectors(w, targets)
    d = src.shape[0]
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    signs = tuple(L.exp for L in w.letters)
    vars_ = tuple(L.var for L in w.letters)
    U = Subspace.from_vectors(F, n, src)
    W = Subspace.from_vectors(F, n, tgt)
    first = (vars_[0], signs[0])
    last = (vars_[-1], -signs[-1])

    def anchor(key):
        a, b = key == first, key == last
        if a and b:
            return subspace_sum(U, W)
        if a:
            return U
        if b:
            return W
        return Subspace.zero(F, n)

    anchors = {(k, s): anchor((k, s)) for k in range(1, w.r + 1) for s in (1, -1)}
    trace = TrajectoryTrace(
        d, l, n, signs, vars_,
        np.zeros((d, l, n), dtype=np.int64),
        np.zeros((d, l, n), dtype=np.int64),
        anchors,
    )
    if d == 0:
        return trace

    class_vecs: dict[tuple[int, int], list[np.ndarray]] = {key: [] for key in anchors}
    class_span: dict[tuple[int, int], Subspace] = {key: Subspace.zero(F, n) for key in anchors}
    spectra: dict[int, list[tuple[int, int]]] = {}
    dl = d * l

    def put(i, j, sign, vec):
        key = (vars_[j], sign)
        if subspace_contains(class_span[key], vec):
            raise IndependenceBroken(f"v_{{{i + 1},{j + 1}}}^{sign:+d} falls into the span of its family")
        (trace.v_plus if sign == 1 else trace.v_minus)[i, j] = vec
        class_vecs[key].append(vec)
        class_span[key] = Subspace.from_vectors(F, n, np.array(class_vecs[key]))

    for i in range(d):
        prev_out = None
        for j in range(l):
            k, e = vars_[j], signs[j]
            vin = src[i] if j == 0 else F.matmul(prev_out, w.constants[j].data)
            put(i, j, e, vin)
            if j == l - 1:
                put(i, j, -e, tgt[i])
                break
            own = subspace_sum(class_span[(k, -e)], anchors[(k, -e)])
            avoided = [("own_family", own)]
            dim_ok = own.dim <= dl - 1
            c = w.constants[j + 1]
            certificate = None
            if index_kind(w, j + 1) == "-":
                case = "2"
                for lam in range(F.q):
                    pre = subspace_preimage(c.minus_scalar(lam), own)
                    avoided.append((f"preimage_lambda={lam}", pre))
                if j + 1 not in spectra:
                    spectra[j + 1] = eigen_spectrum(c)
                    cn = projective_norm(c)
                    for lam, dk in spectra[j + 1]:
                        if lam and n - dk < cn:
                            raise CertificateViolated(f"eigenvalue {lam} has n - d_k < ||c_{j + 1}||")
                certificate = counting_certificate(F.q, n, d, l, spectra[j + 1])
                certificate["actual_excluded_bound"] = sum(F.q**sp.dim for _, sp in avoided)
                certificate["i"], certificate["j"] = i + 1, j + 1
                if not certificate["holds"]:
                    raise CertificateViolated(f"counting certificate fails at step ({i + 1}, {j + 1})")
            else:
                case = "1"
                k2, e2 = vars_[j + 1], signs[j + 1]
                nxt = subspace_sum(class_span[(k2, e2)], anchors[(k2, e2)])
                dim_ok = dim_ok and nxt.dim <= dl - 1
                avoided.append(("next_family_preimage", subspace_preimage(c, nxt)))
            try:
                vout = avoid_union([sp for _, sp in avoided], n, rng, field=F)
            except UnionCoversSpace as exc:
                raise AvoidanceImpossible(f"no admissible vector at step ({i + 1}, {j + 1})") from exc
            for name, sp in avoided:
                if subspace_contains(sp, vout):
                    raise AvoidanceImpossible(f"chosen vector lies in {name}")
            trace.steps.append(AvoidanceStep(i, j, case, avoided, vout, dim_ok, certificate))
            put(i, j, -e, vout)
            prev_out = vout
    return trace


def solve_group_elements(trace: TrajectoryTrace, w: WordWithConstants, group: str = "GL") -> list[MatrixFq]:
    """h_k = S^{-1} T with S, T the extended families of v^+ and v^- for variable k."""
    group = _group(group)
    F, n = w.field, w.n
    out = []
    for k in range(1, w.r + 1):
        plus, minus = trace.pairs(k)
        cnt = plus.shape[0]
        if cnt == 0:
            out.append(MatrixFq.identity(F, n))
            continue
        S = basis_extend(plus, n, F)
        T = basis_extend(minus, n, F)
        h = mat_inv(S) @ T
        if group == "SL":
            det = mat_det(h)
            if det != 1:
                if cnt >= n:
                    raise DeterminantUnfixable(f"no free basis row for variable x{k}")
                t = T.data.copy()
                t[cnt] = F.mul(t[cnt], int(F.inv(det)))
                h = mat_inv(S) @ MatrixFq(F, t)
        out.append(h)
    return out


@dataclass
class WitnessResult:
    h: list[MatrixFq]
    trace: TrajectoryTrace
    group: str
    word: WordWithConstants
    sources: np.ndarray
    targets: np.ndarray
    verified: bool = True


def construct_witness(w: WordWithConstants, sources, targets, group: str = "GL", seed=0) -> WitnessResult:
    group = _group(group)
    src = _vectors(w, sources)
    tgt = _vectors(w, targets)
    wt, s2, t2 = normalize_for_witness(w, src, tgt)
    rep = check_hypotheses(wt, s2, t2, group)
    if not rep.ok:
        raise HypothesesFail(f"hypotheses violated: {', '.join(rep.violations)}", rep.violations)
    trace = build_trajectories(wt, s2, t2, seed)
    h = solve_group_elements(trace, wt, group)
    g = evaluate(w, h)
    F = w.field
    for i in range(src.shape[0]):
        if not np.array_equal(g.apply(src[i]), tgt[i]):
            raise VerificationFailed(f"u_{i + 1}.w(h) != t_{i + 1}")
    if group == "SL" and any(mat_det(hk) != 1 for hk in h):
        raise VerificationFailed("an h_k is not in SL")
    return WitnessResult(h, trace, group, w, src, tgt, True)


def standard_instance(w: WordWithConstants, d: int):
    """Sources e_1..e_d and targets e_{d+1}..e_{2d} (2d <= n)."""
    n = w.n
    eye = np.eye(n, dtype=np.int64)
    return eye[:d], eye[d : 2 * d]


def random_instance(w: WordWithConstants, d: int, rng: np.random.Generator):
    """Random independent sources/targets, with trivially intersecting spans when required."""
    from .linalg import random_independent

    F, n = w.field, w.n
    wt = w
    if caveat_applies(w):
        both = random_independent(F, n, 2 * d, rng)
        src, tgt = both[:d], both[d:]
    else:
        src = random_independent(F, n, d, rng)
        tgt = random_independent(F, n, d, rng)
    # pull back through the boundary constants so the normalised triple is the random one
    c0, cl = wt.constants[0], wt.constants[-1]
    if not c0.is_identity():
        src = F.matmul(src, mat_inv(c0).data)
    if not cl.is_identity():
        tgt = F.matmul(tgt, cl.data)
    return src, tgt
