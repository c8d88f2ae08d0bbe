"""wordmaps command line.

Every subcommand prints one JSON document (sorted keys) on stdout, or writes it
to --out.  Exit status: 0 success, 1 domain error (JSON error object), 2 usage.

    wordmaps norm --matrix m.json
    wordmaps classify --word w.txt --constants c.json
    wordmaps witness --word w.txt --constants c.json --vectors v.json --seed 7
    wordmaps search-identity --group gl --n 2 --p 2 --max-length 6
    wordmaps aq-demo --word w.txt --constants c.json --levels 2..5 --epsilon 1/8 --seed 1
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import io
from .errors import ParseError, ValidationError, WordMapsError

COMMANDS = (
    "eval", "reduce", "classify", "norm", "crit-length", "witness", "diameter",
    "check-identity", "search-identity", "aq-demo", "selftest",
)
SEEDED = {"witness", "diameter", "aq-demo"}
MAX_SAMPLES = 256
MAX_BUDGET = 10**10


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    word: str | None = None
    constants: str | None = None
    matrix: str | None = None
    tuple: str | None = None
    vectors: str | None = None
    group: str | None = None
    n: int | None = None
    p: int | None = None
    e: int = 1
    r: int = 1
    seed: int | None = None
    samples: int = 8
    budget: int = 10**8
    max_length: int = 4
    mode: str = "nonsingular-only"
    prune: bool = True
    epsilon: Fraction = Fraction(0)
    levels: tuple[int, int] | None = None
    workers: int = 1
    checkpoint: str | None = None
    pretty: bool = False
    out: str | None = None

    def validate(self):
        if self.command in SEEDED and self.seed is None:
            raise UsageError(f"{self.command} is randomized and needs --seed")
        if self.seed is not None and not 0 <= self.seed < 2**64:
            raise UsageError("--seed must be an unsigned 64-bit integer")
        if not 2 <= self.samples <= MAX_SAMPLES:
            raise ValidationError(f"--samples must lie in [2, {MAX_SAMPLES}]")
        if not 1 <= self.budget <= MAX_BUDGET:
            raise ValidationError(f"--budget must lie in [1, {MAX_BUDGET}]")
        if self.workers < 1:
            raise ValidationError("--workers must be positive")
        if self.epsilon < 0 or self.epsilon > 1:
            raise ValidationError("--epsilon must lie in [0, 1]")


def _need(cfg: RunConfig, *names):
    missing = [f"--{x.replace('_', '-')}" for x in names if getattr(cfg, x) is None]
    if missing:
        raise UsageError(f"{cfg.command} requires {', '.join(missing)}")


def _load_word(cfg: RunConfig):
    _need(cfg, "word")
    try:
        text = Path(cfg.word).read_text()
    except FileNotFoundError as exc:
        raise ParseError(f"no such file: {cfg.word}") from exc
    if cfg.constants is not None:
        F, n, consts = io.constants_from_json(io.load_json(cfg.constants))
    else:
        _need(cfg, "n", "p")
        from .field import field_make

        F, n, consts = field_make(cfg.p, cfg.e), cfg.n, {}
    return io.parse_word(text, F, n, consts)


# -- subcommands -------------------------------------------------------------------


def cmd_eval(cfg: RunConfig) -> dict:
    from .words import evaluate

    w = _load_word(cfg)
    _need(cfg, "tuple")
    F, n, h = io.tuple_from_json(io.load_json(cfg.tuple))
    if F != w.field or n != w.n:
        raise ValidationError(f"tuple lives in GL_{n}({F.q}) but the word in GL_{w.n}({w.field.q})")
    return {"matrix": io.matrix_to_json(evaluate(w, h))}


def cmd_reduce(cfg: RunConfig) -> dict:
    from .words import is_reduced, reduce

    w = _load_word(cfg)
    red = reduce(w)
    check = is_reduced(red)
    return {"word": io.word_to_json(red), "reduced": check.ok, "offending": [list(x) for x in check.offending]}


def cmd_classify(cfg: RunConfig) -> dict:
    from .words import classify_indices, content, is_reduced

    w = _load_word(cfg)
    c = classify_indices(w)
    return {
        "l": w.l,
        "J0": list(c.j0),
        "J+": list(c.jplus),
        "J-": list(c.jminus),
        "reduced": bool(is_reduced(w)),
        "content": "*".join(str(L) for L in content(w)),
        "singular": not content(w),
    }


def cmd_norm(cfg: RunConfig) -> dict:
    from .seminorm import projective_norm

    _need(cfg, "matrix")
    m = io.matrix_from_json(io.load_json(cfg.matrix))
    return {"projective_norm": projective_norm(m)}


def cmd_crit_length(cfg: RunConfig) -> dict:
    from .seminorm import critical_length, group_diameter

    w = _load_word(cfg)
    return {"critical_length": critical_length(w), "diameter": group_diameter(w.n), "l": w.l}


def cmd_witness(cfg: RunConfig) -> dict:
    from .witness import construct_witness

    w = _load_word(cfg)
    _need(cfg, "vectors")
    F, n, src, tgt = io.vectors_from_json(io.load_json(cfg.vectors))
    if F != w.field or n != w.n:
        raise ValidationError("vectors and word live over different spaces")
    res = construct_witness(w, src, tgt, (cfg.group or "gl").upper(), cfg.seed)
    return {
        "group": res.group,
        "h": [io.matrix_to_json(hk) for hk in res.h],
        "verified": res.verified,
        "trace": res.trace.to_json(F),
    }


def cmd_diameter(cfg: RunConfig) -> dict:
    from .image import diameter_report

    w = _load_word(cfg)
    return diameter_report(w, cfg.samples, cfg.seed, (cfg.group or "gl").upper()).to_json()


def _group_from_cfg(cfg: RunConfig):
    from .identities import enumerate_group

    _need(cfg, "group")
    if cfg.constants is not None:
        F, n, _ = io.constants_from_json(io.load_json(cfg.constants))
        return enumerate_group(cfg.group, n, F.q)
    _need(cfg, "n", "p")
    return enumerate_group(cfg.group, cfg.n, cfg.p**cfg.e)


def cmd_check_identity(cfg: RunConfig) -> dict:
    from .identities import is_mixed_identity
    from .words import is_singular

    G = _group_from_cfg(cfg)
    w = _load_word(cfg)
    ok, counter = is_mixed_identity(w, G)
    return {
        "group": G.describe(),
        "identity": ok,
        "singular": is_singular(w),
        "counterexample": None if counter is None else [io.matrix_rows(h) for h in counter],
    }


def cmd_search_identity(cfg: RunConfig) -> dict:
    from .identities import shortest_identity_search

    G = _group_from_cfg(cfg)
    rep = shortest_identity_search(
        G, cfg.r, cfg.max_length, cfg.mode, cfg.prune, cfg.budget, cfg.workers, cfg.checkpoint
    )
    return rep.to_json()


def cmd_aq_demo(cfg: RunConfig) -> dict:
    from .tower import aq_sweep, level_of

    w = _load_word(cfg)
    base = level_of(w.n)
    lo, hi = cfg.levels if cfg.levels is not None else (base, base + 3)
    if lo < base:
        raise ValidationError(f"levels start below the word's level {base}")
    reps = aq_sweep(w, range(lo, hi + 1), cfg.epsilon, cfg.seed)
    return {"word_level": base, "epsilon": str(cfg.epsilon), "levels": [r.to_json() for r in reps]}


def cmd_selftest(cfg: RunConfig) -> dict:
    from .selftest import run_selftest

    return run_selftest(seed=cfg.seed or 0)


HANDLERS = {
    "eval": cmd_eval,
    "reduce": cmd_reduce,
    "classify": cmd_classify,
    "norm": cmd_norm,
    "crit-length": cmd_crit_length,
    "witness": cmd_witness,
    "diameter": cmd_diameter,
    "check-identity": cmd_check_identity,
    "search-identity": cmd_search_identity,
    "aq-demo": cmd_aq_demo,
    "selftest": cmd_selftest,
}


# -- argument parsing --------------------------------------------------------------


def _levels(text: str) -> tuple[int, int]:
    try:
        a, b = text.split("..")
        lo, hi = int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"levels must look like A..B, got {text!r}")
    if lo > hi or lo < 0:
        raise argparse.ArgumentTypeError(f"empty level range {text!r}")
    return lo, hi


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wordmaps", description="Word maps with constants over GL_n(q).")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--word", help="word DSL file")
    ap.add_argument("--constants", help="constants JSON file")
    ap.add_argument("--matrix", help="matrix JSON file")
    ap.add_argument("--tuple", help="substitution tuple JSON file")
    ap.add_argument("--vectors", help="sources/targets JSON file")
    ap.add_argument("--group", type=str.lower, choices=("gl", "sl", "psl"))
    ap.add_argument("--n", type=int)
    ap.add_argument("--p", type=int)
    ap.add_argument("--e", type=int, default=1)
    ap.add_argument("--r", type=int, default=1)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--samples", type=int, default=8)
    ap.add_argument("--budget", type=int, default=10**8)
    ap.add_argument("--max-length", type=int, default=4)
    ap.add_argument("--mode", choices=("all", "nonsingular-only"), default="nonsingular-only")
    ap.add_argument("--no-prune", dest="prune", action="store_false")
    ap.add_argument("--epsilon", type=_rational, default=Fraction(0))
    ap.add_argument("--levels", type=_levels)
    ap.add_argument("--workers", type=int, default=None)
    ap.add_argument("--checkpoint", help="directory for per-pattern search checkpoints")
    ap.add_argument("--pretty", action="store_true", help="render the report as an indented table")
    ap.add_argument("--out", help="write the report here instead of stdout")
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    workers = ns.workers
    if workers is None:
        workers = int(os.environ.get("WORDMAPS_WORKERS", "1"))
    return RunConfig(
        command=ns.command, word=ns.word, constants=ns.constants, matrix=ns.matrix, tuple=ns.tuple,
        vectors=ns.vectors, group=ns.group, n=ns.n, p=ns.p, e=ns.e, r=ns.r, seed=ns.seed,
        samples=ns.samples, budget=ns.budget, max_length=ns.max_length, mode=ns.mode, prune=ns.prune,
        epsilon=ns.epsilon, levels=ns.levels, workers=workers, checkpoint=ns.checkpoint,
        pretty=ns.pretty, out=ns.out,
    )


def render_pretty(obj, indent: int = 0) -> str:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        width = max((len(str(k)) for k in obj), default=0)
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v and not _is_flat_list(v):
                lines.append(f"{pad}{str(k)}:")
                lines.append(render_pretty(v, indent + 1))
            else:
                lines.append(f"{pad}{str(k).ljust(width)}  {_scalar(v)}")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            if isinstance(v, (dict, list)) and not _is_flat_list(v):
                lines.append(f"{pad}[{i}]")
                lines.append(render_pretty(v, indent + 1))
            else:
                lines.append(f"{pad}[{i}] {_scalar(v)}")
    else:
        lines.append(pad + _scalar(obj))
    return "\n".join(lines)


def _is_flat_list(v) -> bool:
    return isinstance(v, list) and all(not isinstance(x, dict) for x in v) and len(io.dumps(v)) <= 72


def _scalar(v) -> str:
    return io.dumps(v) if isinstance(v, (list, dict, bool)) or v is None else str(v)


def run(cfg: RunConfig) -> tuple[int, dict]:
    try:
        cfg.validate()
        report = HANDLERS[cfg.command](cfg)
        if cfg.command == "selftest" and not report["ok"]:
            return 1, report
        return 0, report
    except WordMapsError as exc:
        return 1, {"error": exc.code, "message": str(exc)}
    except ValueError as exc:
        return 1, {"error": ValidationError.code, "message": str(exc)}


def main(argv=None) -> int:
    ap = build_parser()
    ns = ap.parse_args(argv)
    cfg = config_from_args(ns)
    try:
        status, report = run(cfg)
    except UsageError as exc:
        ap.print_usage(sys.stderr)
        print(f"wordmaps: error: {exc}", file=sys.stderr)
        return 2
    text = render_pretty(report) if cfg.pretty else io.dumps(report)
    if cfg.out and status == 0:
        Path(cfg.out).write_text(text + "\n")
    else:
        print(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
