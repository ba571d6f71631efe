"""Passive-squeeze-passive factorization of symplectic matrices and its text form.

With ``Y = O P`` the polar decomposition, ``P`` is symmetric, positive and
symplectic, so ``P = W D W^T`` with ``W`` orthogonal symplectic and
``D = diag(1/g | g)``. The circuit is then ``post = O W``, ``squeeze = D``,
``pre = W^T``, applied in the order pre, squeeze, post.

Which member of each ``(w, Jw)`` eigenvector pair takes the x slot is decided
by how much of ``w`` and of ``O w`` lies in the x quadratures. Under inversion
the roles of ``w`` and ``Jw`` swap, so the gains of ``Y^-1`` come out as the
reciprocals of the gains of ``Y``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exact import DEFAULT_TOL, DimensionError
from .symplectic import symplectic_residual


class DecompositionError(ValueError):
    """The factorization could not be computed to the requested tolerance."""

    def __init__(self, message: str, condition: float | None = None):
        if condition is not None:
            message = f"{message} (condition number {condition:.3e})"
        super().__init__(message)
        self.condition = condition


def _max_abs(m: np.ndarray) -> float:
    return float(np.max(np.abs(m))) if m.size else 0.0


def passive_residual(m: np.ndarray) -> float:
    """Largest deviation from being both orthogonal and symplectic."""
    m = np.asarray(m, dtype=float)
    ortho = _max_abs(m.T @ m - np.eye(m.shape[0]))
    return max(ortho, symplectic_residual(m))


@dataclass(frozen=True)
class PassiveNetwork:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
            raise DimensionError(f"passive network must be 2n x 2n, got {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0] // 2

    def residual(self) -> float:
        return passive_residual(self.matrix)

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.matrix, np.eye(2 * self.n)))


@dataclass(frozen=True)
class SqueezeStage:
    gains: tuple[float, ...]

    def __post_init__(self):
        gains = tuple(float(g) for g in self.gains)
        if not all(g > 0 and math.isfinite(g) for g in gains):
            raise ValueError(f"squeeze gains must be positive and finite, got {gains}")
        object.__setattr__(self, "gains", gains)

    @property
    def n(self) -> int:
        return len(self.gains)

    @property
    def matrix(self) -> np.ndarray:
        g = np.array(self.gains)
        return np.diag(np.concatenate([1 / g, g]))

    @property
    def db(self) -> tuple[float, ...]:
        return tuple(20 * math.log10(g) for g in self.gains)


@dataclass(frozen=True)
class CircuitDecomposition:
    pre: PassiveNetwork
    squeeze: SqueezeStage
    post: PassiveNetwork

    def __post_init__(self):
        if not self.pre.n == self.squeeze.n == self.post.n:
            raise DimensionError("stage sizes differ")

    def matrix(self) -> np.ndarray:
        return self.post.matrix @ self.squeeze.matrix @ self.pre.matrix

    def residual(self, upsilon) -> float:
        return _max_abs(self.matrix() - np.asarray(upsilon, dtype=float))


def _j_apply(v: np.ndarray) -> np.ndarray:
    n = v.shape[0] // 2
    return np.concatenate([v[n:], -v[:n]])


def _x_weight(v: np.ndarray) -> float:
    n = v.shape[0] // 2
    return float(v[n:] @ v[n:])


def _sign_fix(v: np.ndarray) -> np.ndarray:
    i = int(np.argmax(np.abs(v)))
    return -v if v[i] < 0 else v


def bloch_messiah(upsilon, tol: float = DEFAULT_TOL) -> CircuitDecomposition:
    """Factor a symplectic matrix as ``post @ diag(1/g | g) @ pre``.

    Gains are sorted in descending order. Raises :class:`DecompositionError`
    for non-symplectic input or when the reconstruction misses ``tol``.
    """
    y = np.asarray(upsilon, dtype=float)
    if y.ndim != 2 or y.shape[0] != y.shape[1] or y.shape[0] % 2:
        raise DimensionError(f"expected a 2n x 2n matrix, got shape {y.shape}")
    n = y.shape[0] // 2
    if not np.all(np.isfinite(y)):
        raise DecompositionError("matrix has non-finite entries")
    cond = float(np.linalg.cond(y))
    res = symplectic_residual(y)
    if res > tol:
        raise DecompositionError(f"matrix is not symplectic: residual {res:.3e}", cond)

    u, s, vt = np.linalg.svd(y)
    outer = u @ vt  # y = outer @ p with p = vt.T diag(s) vt
    p = vt.T @ np.diag(s) @ vt
    eigvecs = vt  # rows, eigenvalues s in descending order

    chosen: list[np.ndarray] = []
    for w in eigvecs:
        if len(chosen) == n:
            break
        if chosen:
            basis = np.array(chosen + [_j_apply(v) for v in chosen])
            w = w - basis.T @ (basis @ w)
        norm = float(np.linalg.norm(w))
        if norm < 1e-6:
            continue
        w = w / norm
        jw = _j_apply(w)
        score = _x_weight(w) + _x_weight(outer @ w)
        if abs(score - 1) <= 1e-12:
            v = w if float(w @ p @ w) >= float(jw @ p @ jw) else jw
        else:
            v = w if score > 1 else jw
        chosen.append(_sign_fix(v))
    if len(chosen) != n:
        raise DecompositionError("could not separate the eigenvector pairs", cond)

    gains = [float(v @ p @ v) for v in chosen]
    order = sorted(range(n), key=lambda i: (-gains[i], i))
    vs = [chosen[i] for i in order]
    gains = [gains[i] for i in order]
    w_mat = np.zeros((2 * n, 2 * n))
    for i, v in enumerate(vs):
        w_mat[:, n + i] = v
        w_mat[:, i] = _j_apply(v)

    post = outer @ w_mat
    pre = w_mat.T
    if np.allclose(post, np.eye(2 * n), rtol=0, atol=1e-15):
        post = np.eye(2 * n)
    if np.allclose(pre, np.eye(2 * n), rtol=0, atol=1e-15):
        pre = np.eye(2 * n)
    gains = [1.0 if abs(g - 1) <= 1e-15 else g for g in gains]
    d = CircuitDecomposition(PassiveNetwork(pre), SqueezeStage(tuple(gains)), PassiveNetwork(post))
    recon = d.residual(y)
    passive = max(d.pre.residual(), d.post.residual())
    if recon > tol or passive > tol:
        raise DecompositionError(
            f"reconstruction residual {recon:.3e}, passive residual {passive:.3e} exceed tol {tol:.1e}",
            cond,
        )
    return d


# --------------------------------------------------------------------------- text form


def _fmt(x: float) -> str:
    x = float(x)
    return "0" if x == 0 else repr(x)


def _emit_passive(net: PassiveNetwork, label: str) -> list[str]:
    lines = [f"PASSIVE  # {label}"]
    if net.is_identity():
        lines.append("I")
    else:
        lines += [" ".join(_fmt(x) for x in row) for row in net.matrix]
    return lines


def emit_circuit(d: CircuitDecomposition, header: str | None = None) -> str:
    """Text description listing the stages in the order they act."""
    lines = []
    if header:
        lines.append(f"# {header}")
    lines += _emit_passive(d.pre, "applied first")
    lines.append("SQUEEZE")
    for i, (g, db) in enumerate(zip(d.squeeze.gains, d.squeeze.db), start=1):
        db = 0.0 if round(db, 4) == 0 else db
        lines.append(f"mode {i}: {db:.4f} dB gain={g!r}")
    lines += _emit_passive(d.post, "applied last")
    return "\n".join(lines) + "\n"


class CircuitParseError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def parse_circuit(text: str) -> CircuitDecomposition:
    sections: list[tuple[str, list[tuple[int, str]]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        word = line.split()[0]
        if word in ("PASSIVE", "SQUEEZE"):
            sections.append((word, []))
            continue
        if not sections:
            raise CircuitParseError(lineno, "content before the first section")
        sections[-1][1].append((lineno, line))
    if [s[0] for s in sections] != ["PASSIVE", "SQUEEZE", "PASSIVE"]:
        raise CircuitParseError(0, "expected sections PASSIVE, SQUEEZE, PASSIVE")

    gains = []
    for lineno, line in sections[1][1]:
        try:
            head, rest = line.split(":", 1)
            idx = int(head.split()[1])
            fields = rest.split()
            if idx != len(gains) + 1 or fields[1] != "dB":
                raise ValueError
            extra = dict(f.split("=", 1) for f in fields[2:])
            gains.append(float(extra["gain"]) if "gain" in extra else 10 ** (float(fields[0]) / 20))
        except (ValueError, IndexError, KeyError):
            raise CircuitParseError(lineno, f"bad squeeze line {line!r}") from None
    n = len(gains)

    def passive(body) -> PassiveNetwork:
        if len(body) == 1 and body[0][1] == "I":
            return PassiveNetwork(np.eye(2 * n))
        if len(body) != 2 * n:
            line = body[0][0] if body else 0
            raise CircuitParseError(line, f"passive section needs {2 * n} rows, got {len(body)}")
        rows = []
        for lineno, line in body:
            try:
                row = [float(x) for x in line.split()]
            except ValueError:
                raise CircuitParseError(lineno, f"bad matrix row {line!r}") from None
            if len(row) != 2 * n:
                raise CircuitParseError(lineno, f"row has {len(row)} entries, expected {2 * n}")
            rows.append(row)
        return PassiveNetwork(np.array(rows))

    return CircuitDecomposition(passive(sections[0][1]), SqueezeStage(tuple(gains)), passive(sections[2][1]))

