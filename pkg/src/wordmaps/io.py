"""JSON schemas and the word DSL.

Matrix file:    {"field": {"p": 2, "e": 1}, "n": 4, "matrix": [[...], ...]}
Constants file: {"field": {...}, "n": 4, "constants": {"c1": [[...]], ...}}
Tuple file:     {"field": {...}, "n": 4, "tuple": [[[...]], ...]}
Vectors file:   {"field": {...}, "n": 4, "sources": [[...]], "targets": [[...]]}

Extension-field entries are coefficient lists (low to high), prime-field
entries plain integers.  Words are written as ``c0*x1*c1*x2^-1*c2``; any
identifier other than ``x<k>`` names a constant.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError, WordMapsError
from .field import FieldSpec, field_make
from .linalg import MatrixFq
from .words import Letter, WordWithConstants

_TOKEN = re.compile(r"\s*(?:(x)(\d+)(\^-1)?(?![A-Za-z0-9_])|([A-Za-z_][A-Za-z0-9_]*)|(\*))")


def load_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise ParseError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def field_to_json(F: FieldSpec) -> dict:
    return {"p": F.p, "e": F.e}


def field_from_json(obj) -> FieldSpec:
    try:
        return field_make(int(obj["p"]), int(obj.get("e", 1)))
    except (KeyError, TypeError, AttributeError) as exc:
        raise ParseError(f"bad field object: {obj!r}") from exc


def _rows_to_codes(F: FieldSpec, rows) -> np.ndarray:
    try:
        return np.array([[F.element(x) for x in row] for row in rows], dtype=np.int64)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad matrix entries: {exc}") from exc


def matrix_rows(m: MatrixFq) -> list:
    return [[m.field.to_json(x) for x in row] for row in m.data.tolist()]


def vector_json(F: FieldSpec, v) -> list:
    return [F.to_json(x) for x in np.asarray(v).tolist()]


def matrix_to_json(m: MatrixFq) -> dict:
    return {"field": field_to_json(m.field), "n": m.rows, "matrix": matrix_rows(m)}


def _check_square(F: FieldSpec, n: int, rows, what: str) -> MatrixFq:
    codes = _rows_to_codes(F, rows)
    if codes.shape != (n, n):
        raise ValidationError(f"{what}: expected a {n}x{n} matrix, got shape {codes.shape}")
    return MatrixFq(F, codes)


def _header(obj: dict) -> tuple[FieldSpec, int]:
    if not isinstance(obj, dict) or "field" not in obj or "n" not in obj:
        raise ParseError("expected an object with 'field' and 'n'")
    return field_from_json(obj["field"]), int(obj["n"])


def matrix_from_json(obj: dict) -> MatrixFq:
    F, n = _header(obj)
    if "matrix" not in obj:
        raise ParseError("matrix file lacks 'matrix'")
    return _check_square(F, n, obj["matrix"], "matrix")


def constants_from_json(obj: dict) -> tuple[FieldSpec, int, dict[str, MatrixFq]]:
    F, n = _header(obj)
    consts = obj.get("constants", {})
    if not isinstance(consts, dict):
        raise ParseError("'constants' must be an object")
    out = {}
    for name, rows in consts.items():
        if re.fullmatch(r"x\d+", name):
            raise ParseError(f"constant name {name!r} clashes with a variable")
        out[name] = _check_square(F, n, rows, f"constant {name}")
    return F, n, out


def tuple_from_json(obj: dict) -> tuple[FieldSpec, int, list[MatrixFq]]:
    F, n = _header(obj)
    if "tuple" not in obj:
        raise ParseError("tuple file lacks 'tuple'")
    return F, n, [_check_square(F, n, rows, f"h_{k + 1}") for k, rows in enumerate(obj["tuple"])]


def vectors_from_json(obj: dict) -> tuple[FieldSpec, int, np.ndarray, np.ndarray]:
    F, n = _header(obj)

    def block(key):
        rows = obj.get(key, [])
        arr = _rows_to_codes(F, rows) if rows else np.zeros((0, n), dtype=np.int64)
        if arr.shape[1] != n:
            raise ValidationError(f"{key}: vectors must have length {n}")
        return arr

    return F, n, block("sources"), block("targets")


def tokenize(text: str) -> list[tuple]:
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected input at column {pos + 1}: {text[pos:pos + 10]!r}")
        if m.group(1):
            out.append(("var", int(m.group(2)), -1 if m.group(3) else 1))
        elif m.group(4):
            out.append(("const", m.group(4)))
        else:
            out.append(("star",))
        pos = m.end()
    return out


def parse_word(text: str, field: FieldSpec, n: int, constants: dict[str, MatrixFq] | None = None, r: int | None = None) -> WordWithConstants:
    """Parse ``atom ('*' atom)*``; adjacent constants multiply, missing ones are I."""
    constants = constants or {}
    toks = tokenize(text)
    if not toks:
        raise ParseError("empty word")
    atoms = []
    for k, t in enumerate(toks):
        want_atom = k % 2 == 0
        if want_atom == (t[0] == "star"):
            raise ParseError(f"malformed word near token {k + 1} of {text!r}")
        if t[0] != "star":
            atoms.append(t)
    if toks[-1][0] == "star":
        raise ParseError("word ends with '*'")
    ident = MatrixFq.identity(field, n)
    letters: list[Letter] = []
    consts: list[MatrixFq] = [ident]
    for a in atoms:
        if a[0] == "var":
            if a[1] < 1:
                raise ParseError("variables are numbered from x1")
            letters.append(Letter(a[1], a[2]))
            consts.append(ident)
        else:
            if a[1] not in constants:
                raise ValidationError(f"constant {a[1]!r} is not defined in the constants file")
            c = constants[a[1]]
            if c.field != field or c.shape != (n, n):
                raise ValidationError(f"constant {a[1]!r} does not live in GL_{n}({field.q})")
            consts[-1] = consts[-1] @ c
    if r is None:
        r = max((L.var for L in letters), default=1)
    try:
        return WordWithConstants(field, n, r, tuple(letters), tuple(consts))
    except WordMapsError:
        raise
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc


def word_to_json(w: WordWithConstants) -> dict:
    """Word text plus a constants table, naming each non-identity constant c<j>."""
    names = {}
    parts = []
    for j, c in enumerate(w.constants):
        if not c.is_identity():
            names[f"c{j}"] = matrix_rows(c)
            parts.append(f"c{j}")
        if j < w.l:
            parts.append(str(w.letters[j]))
    return {
        "field": field_to_json(w.field),
        "n": w.n,
        "r": w.r,
        "word": "*".join(parts),
        "constants": names,
    }


def word_from_json(obj: dict) -> WordWithConstants:
    F, n, consts = constants_from_json(obj)
    text = obj.get("word", "")
    if not text:
        raise ParseError("word object lacks 'word'")
    return parse_word(text, F, n, consts, obj.get("r"))


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))
