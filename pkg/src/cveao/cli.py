"""Command-line front end.

Exit codes: 0 success, 1 validation or decode failure, 2 input error.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .barnes import LiftError, barnes_lift
from .channel import (
    DecoderConfig,
    Fixed,
    GaussianIID,
    SingleMode,
    SqueezingModel,
    StructuredS0,
    append_csv,
    extract_syndrome,
    make_decoder,
    run_trials,
    s0_error,
    stats_row,
)
from .circuit import DecompositionError, bloch_messiah, emit_circuit
from .code import canonical_code, example_code, validate
from .exact import DEFAULT_TOL, exact
from .formats import ParseError, format_code, format_matrix, parse_matrix, parse_vector, read_code
from .symplectic import product_matrix, symplectic_residual

OK, FAILED, BAD_INPUT = 0, 1, 2


class InputError(Exception):
    """Bad command-line input; reported with exit code 2."""


def _stamp(args, what: str) -> str | None:
    if args.no_timestamp:
        return None
    now = datetime.now(timezone.utc).replace(microsecond=0).isoformat()
    return f"{what}, cveao {__version__}, {now}"


def _write(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _load_code(path: str):
    try:
        return read_code(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _load_matrix(path: str) -> np.ndarray:
    try:
        return parse_matrix(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


# --------------------------------------------------------------------------- noise specs


def _kv(body: str) -> dict[str, str]:
    out = {}
    for part in filter(None, body.split(",")):
        key, sep, val = part.partition("=")
        if not sep or not key:
            raise InputError(f"expected key=value, got {part!r}")
        out[key.strip()] = val.strip()
    return out


def parse_noise(spec: str, code):
    """Noise model and matching decoder config from a spec string."""
    kind, _, body = spec.partition(":")
    try:
        if kind == "gaussian":
            fields = _kv(body)
            if set(fields) != {"sigma"}:
                raise InputError("gaussian noise takes exactly sigma=<float>")
            return GaussianIID(float(fields["sigma"])), None
        if kind == "s0":
            fields = _kv(body)
            if set(fields) - {"alpha", "beta"}:
                raise InputError("s0 noise takes only alpha=<file>,beta=<file>")
            cfg = DecoderConfig.zero(code.params)
            alpha = _load_matrix(fields["alpha"]) if "alpha" in fields else cfg.alpha
            beta = _load_matrix(fields["beta"]) if "beta" in fields else cfg.beta
            shape = (code.params.k, code.params.l + 2 * code.params.c)
            alpha = alpha.reshape(shape) if alpha.size == 0 else alpha
            beta = beta.reshape(shape) if beta.size == 0 else beta
            cfg = DecoderConfig(alpha, beta)
            cfg.check(code.params)
            return StructuredS0(cfg), cfg
        if kind == "single":
            fields = _kv(body)
            if set(fields) != {"mode", "p", "x"}:
                raise InputError("single noise takes mode=<i>,p=<f>,x=<f>")
            mode = int(fields["mode"])
            if not 1 <= mode <= code.n:
                raise InputError(f"mode {mode} outside 1..{code.n}")
            return SingleMode(mode, float(fields["p"]), float(fields["x"])), None
        if kind == "fixed":
            if body == "zero":
                return Fixed(), None
            if not body:
                raise InputError("fixed noise needs a file or 'zero'")
            e = np.asarray(parse_vector(Path(body).read_text()), dtype=float)
            if e.shape != (2 * code.n,):
                raise InputError(f"fixed error has {e.size} entries, expected {2 * code.n}")
            return Fixed(e), None
    except (ValueError, ParseError) as exc:
        raise InputError(f"bad noise spec {spec!r}: {exc}") from None
    except OSError as exc:
        raise InputError(f"bad noise spec {spec!r}: {exc}") from None
    raise InputError(f"unknown noise family {kind!r} (gaussian, s0, single, fixed)")


# --------------------------------------------------------------------------- commands


def cmd_validate(args) -> int:
    code = _load_code(args.code)
    report = validate(code, args.tol)
    print(report)
    return OK if report.ok else FAILED


def cmd_canonical(args) -> int:
    if min(args.k, args.l, args.r, args.c) < 0:
        raise InputError("code parameters must be nonnegative")
    code = canonical_code(args.k, args.l, args.r, args.c)
    label = f"canonical code k={args.k} l={args.l} r={args.r} c={args.c}"
    _write(format_code(code, _stamp(args, label)), args.out)
    return OK


def cmd_example(args) -> int:
    _write(format_code(example_code(), _stamp(args, "worked example code")), args.out)
    return OK


def _s0_from_args(code, items: list[str]) -> np.ndarray:
    p = code.params
    sizes = {"a": p.l, "b": p.l, "c": p.r, "d": p.r, "a1": p.c, "a2": p.c}
    vals = {}
    for item in items:
        key, sep, body = item.partition("=")
        if not sep or key not in sizes:
            raise InputError(f"bad S0 parameter {item!r}; use a=, b=, c=, d=, a1=, a2=")
        vals[key] = parse_vector(body) if body else exact(np.zeros(0))
    parts = []
    for key, size in sizes.items():
        v = vals.get(key, exact(np.zeros(size)))
        if v.shape != (size,):
            raise InputError(f"S0 parameter {key} needs {size} entries, got {v.size}")
        parts.append(v)
    return s0_error(code, *parts)


def cmd_syndrome(args) -> int:
    code = _load_code(args.code)
    if args.s0 is not None:
        e = _s0_from_args(code, args.s0)
    else:
        src = args.error
        try:
            text = Path(src).read_text() if Path(src).is_file() else src
        except OSError as exc:
            raise InputError(f"cannot read {src}: {exc.strerror}") from None
        e = parse_vector(text)
    if e.shape != (2 * code.n,):
        raise InputError(f"error vector has {e.size} entries, code needs {2 * code.n}")
    print(extract_syndrome(code, e))
    return OK


def cmd_simulate(args) -> int:
    code = _load_code(args.code)
    report = validate(code, args.tol)
    if not report.ok:
        print(report, file=sys.stderr)
        return FAILED
    noise, cfg = parse_noise(args.noise, code)
    if args.trials < 1:
        raise InputError("--trials must be at least 1")
    if args.seed < 0:
        raise InputError("--seed must be nonnegative")
    try:
        squeezing = SqueezingModel(args.squeezing_db)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    decoder = make_decoder(code, cfg, args.decoder)
    stats = run_trials(code, noise, cfg, squeezing, args.trials, args.seed, decoder=decoder)
    row = stats_row(Path(args.code).stem, noise, squeezing, args.trials, args.seed, stats)
    if args.out:
        append_csv(args.out, row)
    csv.writer(sys.stdout, lineterminator="\n").writerow(row.values())
    return OK


def cmd_synthesize(args) -> int:
    m = _load_matrix(args.symplectic)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
        raise InputError(f"expected a 2n x 2n matrix, got shape {m.shape}")
    y = np.asarray(m, dtype=float)
    res = symplectic_residual(y)
    if res > args.tol:
        raise InputError(f"matrix is not symplectic (residual {res:.3e})")
    try:
        d = bloch_messiah(y, args.tol)
    except DecompositionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FAILED
    header = _stamp(args, f"circuit for {Path(args.symplectic).name}, reconstruction residual {d.residual(y):.3e}")
    _write(emit_circuit(d, header), args.out)
    return OK


def cmd_import_discrete(args) -> int:
    rows = _load_matrix(args.binary)
    try:
        binary = np.array([[int(x) for x in row] for row in rows], dtype=int)
    except (TypeError, ValueError):
        raise InputError("binary matrix must have integer entries") from None
    if args.target == "zero":
        target = "zero"
    else:
        target = np.array([[int(x) for x in row] for row in _load_matrix(args.target)], dtype=int)
    try:
        signed = barnes_lift(binary, target, seed=args.seed)
    except LiftError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FAILED
    except ValueError as exc:
        raise InputError(str(exc)) from None
    table = product_matrix(signed)
    want = np.zeros_like(table) if isinstance(target, str) else target
    if not np.array_equal(table, want):  # pragma: no cover - barnes_lift guarantees this
        print("error: lifted rows miss the target pattern", file=sys.stderr)
        return FAILED
    _write(format_matrix(signed, _stamp(args, f"signed lift of {Path(args.binary).name}")), args.out)
    return OK


# --------------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS, help="float tolerance (default 1e-9)")
    common.add_argument(
        "--no-timestamp", action="store_true", default=argparse.SUPPRESS, help="omit the timestamp comment"
    )

    parser = argparse.ArgumentParser(prog="cveao", description=__doc__.splitlines()[0], parents=[common])
    parser.add_argument("--version", action="version", version=f"cveao {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check a code file")
    p.add_argument("code")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("canonical", parents=[common], help="write a canonical code")
    for name in ("k", "l", "r", "c"):
        p.add_argument(f"--{name}", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_canonical)

    p = sub.add_parser("example", parents=[common], help="write the worked example code")
    p.add_argument("--out")
    p.set_defaults(func=cmd_example)

    p = sub.add_parser("syndrome", parents=[common], help="syndrome of an error vector")
    p.add_argument("code")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--error", help="inline vector or a file holding one")
    g.add_argument("--s0", nargs="+", metavar="KEY=VALUES", help="S0 generators, e.g. a=1,2 a1=3")
    p.set_defaults(func=cmd_syndrome)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo trials, one CSV row")
    p.add_argument("code")
    p.add_argument("--noise", required=True)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--squeezing-db", type=float, default=math.inf)
    p.add_argument("--decoder", choices=("linear", "single_mode"), default="linear")
    p.add_argument("--out", help="CSV file to append to")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("synthesize", parents=[common], help="circuit from a symplectic matrix")
    p.add_argument("--symplectic", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("import-discrete", parents=[common], help="sign-lift a binary check matrix")
    p.add_argument("binary")
    p.add_argument("--target", default="zero", help="'zero' or a file with the product pattern")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_import_discrete)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.tol = getattr(args, "tol", DEFAULT_TOL)
    args.no_timestamp = getattr(args, "no_timestamp", False)
    try:
        return args.func(args)
    except (InputError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
