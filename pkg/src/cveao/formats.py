"""Text formats for matrices, vectors and codes.

Matrices are one row per line with whitespace-separated entries (``p/q``,
integers or decimals, all read exactly); a blank line ends a block and ``#``
starts a comment. A code file looks like::

    params n=4 k=1 l=1 r=1 c=1
    roles info:1 ancilla:2 gauge:3 ebit:4
    F
    ancilla 0 1 0 0 0 0 0 0 ; 0 0
    ebit_z  0 0 0 1 0 0 0 0 ; -1 0
    ebit_x  0 0 0 0 0 0 0 1 ; 0 1
    G
    0 0 1 0 0 0 0 0
    0 0 0 0 0 0 1 0
    UPSILON
    I

with 1-based mode indices. ``UPSILON`` (the stored encoding) is optional and
``I`` stands for the identity.
"""

from __future__ import annotations

import re
from fractions import Fraction
from pathlib import Path

import numpy as np

from .code import Code, CodeParams, Role, RowKind
from .exact import exact, eye, fmt_scalar, is_exact, to_fraction, zeros


class ParseError(ValueError):
    def __init__(self, line: int, message: str, source: str | None = None):
        where = f"{source}:{line}" if source else f"line {line}"
        super().__init__(f"{where}: {message}")
        self.line = line


def _strip(raw: str) -> str:
    return raw.split("#", 1)[0].strip()


def _entries(tokens, lineno: int) -> list[Fraction]:
    try:
        return [to_fraction(t) for t in tokens]
    except (ValueError, ZeroDivisionError):
        raise ParseError(lineno, f"bad number in {' '.join(tokens)!r}") from None


def _rows_to_matrix(rows: list[list[Fraction]], lineno: int) -> np.ndarray:
    widths = {len(r) for r in rows}
    if len(widths) > 1:
        raise ParseError(lineno, f"rows have different lengths {sorted(widths)}")
    return exact(rows)


def parse_matrix_blocks(text: str) -> list[np.ndarray]:
    """All blocks of a matrix file as exact arrays."""
    blocks: list[np.ndarray] = []
    rows: list[list[Fraction]] = []
    first = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            if rows:
                blocks.append(_rows_to_matrix(rows, first))
                rows = []
            continue
        line = _strip(raw)
        if not line:
            continue
        if not rows:
            first = lineno
        rows.append(_entries(line.split(), lineno))
    if rows:
        blocks.append(_rows_to_matrix(rows, first))
    return blocks


def parse_matrix(text: str) -> np.ndarray:
    blocks = parse_matrix_blocks(text)
    if not blocks:
        raise ParseError(1, "no matrix found")
    if len(blocks) > 1:
        raise ParseError(1, f"expected one matrix block, found {len(blocks)}")
    return blocks[0]


def format_matrix(m, header: str | None = None) -> str:
    m = np.atleast_2d(np.asarray(m))
    lines = [f"# {header}"] if header else []
    lines += [" ".join(fmt_scalar(x) for x in row) for row in m]
    return "\n".join(lines) + "\n"


def parse_vector(text: str) -> np.ndarray:
    """Vector from inline text (commas or whitespace) or a one-row matrix file body."""
    tokens = [t for t in re.split(r"[\s,]+", _strip_all(text)) if t]
    if not tokens:
        raise ParseError(1, "empty vector")
    return exact(_entries(tokens, 1))


def _strip_all(text: str) -> str:
    return " ".join(_strip(line) for line in text.splitlines())


def read_text(path: str | Path) -> str:
    return Path(path).read_text()


# --------------------------------------------------------------------------- codes


_PARAM = re.compile(r"^(n|k|l|r|c)=(\d+)$")


def _parse_params(line: str, lineno: int) -> CodeParams:
    found = {}
    for tok in line.split()[1:]:
        m = _PARAM.match(tok)
        if not m:
            raise ParseError(lineno, f"bad parameter {tok!r}")
        found[m.group(1)] = int(m.group(2))
    missing = [x for x in "nklrc" if x not in found]
    if missing:
        raise ParseError(lineno, f"missing parameters {', '.join(missing)}")
    try:
        return CodeParams(**found)
    except ValueError as exc:
        raise ParseError(lineno, str(exc)) from None


def _parse_roles(line: str, lineno: int, n: int) -> tuple[Role, ...]:
    roles: list[Role | None] = [None] * n
    for tok in line.split()[1:]:
        name, _, idx = tok.partition(":")
        try:
            role = Role(name)
        except ValueError:
            raise ParseError(lineno, f"unknown role {name!r}") from None
        for part in filter(None, idx.split(",")):
            try:
                i = int(part)
            except ValueError:
                raise ParseError(lineno, f"bad mode index {part!r}") from None
            if not 1 <= i <= n:
                raise ParseError(lineno, f"mode {i} outside 1..{n}")
            if roles[i - 1] is not None:
                raise ParseError(lineno, f"mode {i} given two roles")
            roles[i - 1] = role
    unset = [i + 1 for i, r in enumerate(roles) if r is None]
    if unset:
        raise ParseError(lineno, f"modes without a role: {unset}")
    return tuple(roles)  # type: ignore[arg-type]


def parse_code(text: str, source: str | None = None) -> Code:
    params = roles = None
    section = None
    f_rows, kinds, g_rows, u_rows = [], [], [], []
    last = 0

    def err(lineno, msg):
        return ParseError(lineno, msg, source)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        last = lineno
        word = line.split()[0]
        if word == "params":
            if params is not None:
                raise err(lineno, "duplicate params line")
            try:
                params = _parse_params(line, lineno)
            except ParseError as exc:
                raise err(lineno, str(exc).split(": ", 1)[1]) from None
            continue
        if word == "roles":
            if params is None:
                raise err(lineno, "roles line before params")
            try:
                roles = _parse_roles(line, lineno, params.n)
            except ParseError as exc:
                raise err(lineno, str(exc).split(": ", 1)[1]) from None
            continue
        if word in ("F", "G", "UPSILON") and len(line.split()) == 1:
            if params is None or roles is None:
                raise err(lineno, f"section {word} before params and roles")
            section = word
            continue
        if params is None:
            raise err(lineno, "expected a params line")
        n, c = params.n, params.c
        if section == "F":
            try:
                kind = RowKind(word)
            except ValueError:
                raise err(lineno, f"unknown row kind {word!r}") from None
            left, sep, right = line[len(word) :].partition(";")
            if not sep:
                raise err(lineno, "F row needs ';' between Alice and Bob entries")
            a = _entries(left.split(), lineno)
            b = _entries(right.split(), lineno)
            if len(a) != 2 * n or len(b) != 2 * c:
                raise err(lineno, f"F row has {len(a)} + {len(b)} entries, expected {2 * n} + {2 * c}")
            f_rows.append(a + b)
            kinds.append(kind)
        elif section == "G":
            g = _entries(line.split(), lineno)
            if len(g) != 2 * n:
                raise err(lineno, f"G row has {len(g)} entries, expected {2 * n}")
            g_rows.append(g)
        elif section == "UPSILON":
            if line == "I":
                u_rows.append("I")
                continue
            u = _entries(line.split(), lineno)
            if len(u) != 2 * n:
                raise err(lineno, f"UPSILON row has {len(u)} entries, expected {2 * n}")
            u_rows.append(u)
        else:
            raise err(lineno, f"unexpected line {line!r}")

    if params is None:
        raise err(max(last, 1), "missing params line")
    if roles is None:
        raise err(max(last, 1), "missing roles line")
    n, c = params.n, params.c
    m = len(f_rows)
    full = exact(f_rows) if m else zeros((0, 2 * n + 2 * c), True)
    gauge = exact(g_rows) if g_rows else zeros((0, 2 * n), True)
    if gauge.shape[0] % 2:
        raise err(last, "G needs an even number of rows")
    upsilon = None
    if u_rows == ["I"]:
        upsilon = eye(2 * n, True)
    elif u_rows:
        if "I" in u_rows or len(u_rows) != 2 * n:
            raise err(last, f"UPSILON must be 'I' or {2 * n} rows")
        upsilon = exact(u_rows)
    try:
        return Code(params, roles, tuple(kinds), full[:, : 2 * n], full[:, 2 * n :], gauge, upsilon)
    except ValueError as exc:
        raise err(last, str(exc)) from None


def format_code(code: Code, header: str | None = None) -> str:
    p = code.params
    lines = [f"# {header}"] if header else []
    lines.append(f"params n={p.n} k={p.k} l={p.l} r={p.r} c={p.c}")
    groups = []
    for role in (Role.INFO, Role.ANCILLA, Role.GAUGE, Role.EBIT):
        groups.append(f"{role.value}:" + ",".join(str(i + 1) for i in code.modes(role)))
    lines.append("roles " + " ".join(groups))
    lines.append("F")
    for kind, a, b in zip(code.kinds, code.alice, code.bob):
        left = " ".join(fmt_scalar(x) for x in a)
        right = " ".join(fmt_scalar(x) for x in b)
        lines.append(f"{kind.value} {left} ; {right}".rstrip())
    lines.append("G")
    lines += [" ".join(fmt_scalar(x) for x in row) for row in code.gauge]
    if code.upsilon is not None:
        lines.append("UPSILON")
        u = code.upsilon
        ident = eye(2 * p.n, is_exact(u))
        if u.shape == ident.shape and all(x == y for x, y in zip(u.flat, ident.flat)):
            lines.append("I")
        else:
            lines += [" ".join(fmt_scalar(x) for x in row) for row in u]
    return "\n".join(lines) + "\n"


def read_code(path: str | Path) -> Code:
    return parse_code(Path(path).read_text(), str(path))
