"""Entanglement-assisted operator codes on continuous-variable modes.

A :class:`Code` carries its check rows split into Alice's part (``2n`` columns)
and Bob's part (``2c`` columns, his halves of the entangled pairs), a gauge
matrix, per-mode role labels and per-row kinds. Everything downstream looks
rows and modes up by label, never by position, because the canonical layout and
the worked example order their modes differently.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exact import (
    DEFAULT_TOL,
    exact,
    eye,
    in_rowspace,
    is_exact,
    least_norm_solve,
    max_abs,
    nullspace,
    rank,
    unify,
    zeros,
)
from .symplectic import (
    flip_x,
    is_symplectic,
    pairs_to_matrix,
    product_matrix,
    symplectic_form,
    symplectic_gram_schmidt,
    symplectic_residual,
)


class Role(str, enum.Enum):
    INFO = "info"
    ANCILLA = "ancilla"
    GAUGE = "gauge"
    EBIT = "ebit"


class RowKind(str, enum.Enum):
    ANCILLA = "ancilla"
    EBIT_Z = "ebit_z"
    EBIT_X = "ebit_x"


class NotSymplecticError(ValueError):
    def __init__(self, residual: float):
        super().__init__(f"matrix is not symplectic (max |M J M^T - J| = {residual:.3e})")
        self.residual = residual


class InvalidCodeError(ValueError):
    def __init__(self, report: "ValidationReport"):
        super().__init__("code failed validation:\n" + str(report))
        self.report = report


@dataclass(frozen=True)
class CodeParams:
    n: int
    k: int
    l: int
    r: int
    c: int

    def __post_init__(self):
        if min(self.n, self.k, self.l, self.r, self.c) < 0:
            raise ValueError(f"negative code parameter in {self}")
        if self.n != self.k + self.l + self.r + self.c:
            raise ValueError(f"n must equal k + l + r + c, got {self}")

    @classmethod
    def from_counts(cls, k: int, l: int, r: int, c: int) -> "CodeParams":
        return cls(k + l + r + c, k, l, r, c)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Code:
    """Check matrix, gauge matrix and labels of one code.

    ``alice`` is ``(l + 2c) x 2n``, ``bob`` is ``(l + 2c) x 2c`` and ``gauge`` is
    ``2r x 2n`` with conjugate pairs in consecutive rows. ``upsilon`` is the
    encoding transformation when known (rows transform as ``row @ upsilon.T``).
    """

    params: CodeParams
    roles: tuple[Role, ...]
    kinds: tuple[RowKind, ...]
    alice: np.ndarray
    bob: np.ndarray
    gauge: np.ndarray
    upsilon: np.ndarray | None = None

    def __post_init__(self):
        n, c = self.params.n, self.params.c
        object.__setattr__(self, "roles", tuple(Role(x) for x in self.roles))
        object.__setattr__(self, "kinds", tuple(RowKind(x) for x in self.kinds))
        m = len(self.kinds)
        for name, arr, shape in (
            ("alice", self.alice, (m, 2 * n)),
            ("bob", self.bob, (m, 2 * c)),
        ):
            if np.shape(arr) != shape:
                raise ValueError(f"{name} block has shape {np.shape(arr)}, expected {shape}")
        g = np.shape(self.gauge)
        if len(g) != 2 or g[1] != 2 * n or g[0] % 2:
            raise ValueError(f"gauge matrix has shape {g}, expected (2r, {2 * n})")
        if len(self.roles) != n:
            raise ValueError(f"{len(self.roles)} role labels for {n} modes")
        if self.upsilon is not None and np.shape(self.upsilon) != (2 * n, 2 * n):
            raise ValueError(f"upsilon has shape {np.shape(self.upsilon)}")
        alice, bob, gauge = unify(self.alice, self.bob, self.gauge)
        object.__setattr__(self, "alice", _frozen(alice))
        object.__setattr__(self, "bob", _frozen(bob))
        object.__setattr__(self, "gauge", _frozen(gauge))
        if self.upsilon is not None:
            object.__setattr__(self, "upsilon", _frozen(self.upsilon))

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def exact(self) -> bool:
        return is_exact(self.alice)

    @property
    def full_rows(self) -> np.ndarray:
        """Check rows on all ``n + c`` modes, ordered ``(p_A p_B | x_A x_B)``."""
        n, c = self.n, self.params.c
        a, b = self.alice, self.bob
        return np.hstack([a[:, :n], b[:, :c], a[:, n:], b[:, c:]])

    @property
    def f_z(self) -> np.ndarray:
        return self.alice[:, : self.n]

    @property
    def f_x(self) -> np.ndarray:
        return self.alice[:, self.n :]

    @property
    def g_z(self) -> np.ndarray:
        return self.gauge[:, : self.n]

    @property
    def g_x(self) -> np.ndarray:
        return self.gauge[:, self.n :]

    def row_indices(self, *kinds: RowKind) -> list[int]:
        return [i for i, k in enumerate(self.kinds) if k in kinds]

    def rows_of(self, *kinds: RowKind) -> np.ndarray:
        """Alice parts of the check rows of the given kinds, in row order."""
        idx = self.row_indices(*kinds)
        return self.alice[idx] if idx else zeros((0, 2 * self.n), self.exact)

    @property
    def f_i(self) -> np.ndarray:
        return self.rows_of(RowKind.ANCILLA)

    @property
    def f_e(self) -> np.ndarray:
        return self.rows_of(RowKind.EBIT_Z, RowKind.EBIT_X)

    def modes(self, role: Role) -> list[int]:
        """0-based indices of Alice's modes with the given role."""
        return [i for i, r in enumerate(self.roles) if r == role]

    def syndrome_order(self) -> list[int]:
        """Row indices grouped as (ancilla, ebit_z, ebit_x), each in row order."""
        return (
            self.row_indices(RowKind.ANCILLA)
            + self.row_indices(RowKind.EBIT_Z)
            + self.row_indices(RowKind.EBIT_X)
        )

    def ebit_rows(self) -> list[tuple[int, int]]:
        """``(ebit_z row, ebit_x row)`` for each of Bob's modes, by the column Bob uses."""
        c = self.params.c
        out = []
        for j in range(c):
            z = [i for i in self.row_indices(RowKind.EBIT_Z) if self.bob[i, j] != 0]
            x = [i for i in self.row_indices(RowKind.EBIT_X) if self.bob[i, c + j] != 0]
            if len(z) != 1 or len(x) != 1:
                raise ValueError(f"Bob mode {j + 1} is not used by exactly one row of each ebit kind")
            out.append((z[0], x[0]))
        return out

    def gauge_displacements(self) -> np.ndarray:
        """Gauge rows as displacement vectors (the passively corrected errors)."""
        return flip_x(self.gauge)

    def stabilizer_displacements(self) -> np.ndarray:
        """Ancilla rows as displacement vectors (errors the ancillas absorb)."""
        return flip_x(self.f_i)

    def with_gauge(self, gauge: np.ndarray, r: int) -> "Code":
        """Copy with a different gauge matrix; surplus gauge modes become information modes."""
        p = self.params
        dropped = self.modes(Role.GAUGE)[r:]
        roles = tuple(Role.INFO if i in dropped else x for i, x in enumerate(self.roles))
        params = CodeParams(p.n, p.k + p.r - r, p.l, r, p.c)
        return Code(params, roles, self.kinds, self.alice, self.bob, gauge, self.upsilon)


def canonical_code(k: int, l: int, r: int, c: int, exact_mode: bool = True) -> Code:
    """Trivial encoder: information, ancilla, gauge and ebit modes in that order.

    Checks are the ancilla positions, then relative positions ``x_A - x_B`` and
    total momenta ``p_A + p_B`` of the ebits. Gauge pairs are ``(Z, X)`` per gauge mode.
    """
    params = CodeParams.from_counts(k, l, r, c)
    n = params.n
    one = Fraction(1) if exact_mode else 1.0
    m = l + 2 * c
    alice = zeros((m, 2 * n), exact_mode)
    bob = zeros((m, 2 * c), exact_mode)
    kinds: list[RowKind] = []
    for i in range(l):
        alice[i, k + i] = one
        kinds.append(RowKind.ANCILLA)
    ebit0 = k + l + r
    for j in range(c):
        alice[l + j, ebit0 + j] = one
        bob[l + j, j] = -one
        kinds.append(RowKind.EBIT_Z)
    for j in range(c):
        alice[l + c + j, n + ebit0 + j] = one
        bob[l + c + j, c + j] = one
        kinds.append(RowKind.EBIT_X)
    gauge = zeros((2 * r, 2 * n), exact_mode)
    for i in range(r):
        gauge[2 * i, k + l + i] = one
        gauge[2 * i + 1, n + k + l + i] = one
    roles = [Role.INFO] * k + [Role.ANCILLA] * l + [Role.GAUGE] * r + [Role.EBIT] * c
    return Code(params, tuple(roles), tuple(kinds), alice, bob, gauge, eye(2 * n, exact_mode))


def apply_symplectic(code: Code, upsilon, tol: float = DEFAULT_TOL) -> Code:
    """Encode with ``upsilon``: Alice's check rows and the gauge rows map to ``row @ upsilon.T``.

    Bob's columns are untouched; the stored encoding becomes ``upsilon @ code.upsilon``.
    """
    upsilon = np.asarray(upsilon)
    if upsilon.shape != (2 * code.n, 2 * code.n):
        raise ValueError(f"expected a {2 * code.n}x{2 * code.n} matrix, got {upsilon.shape}")
    if not is_symplectic(upsilon, tol):
        raise NotSymplecticError(symplectic_residual(upsilon))
    alice, gauge, ups = unify(code.alice, code.gauge, upsilon)
    bob = code.bob if is_exact(alice) else code.bob.astype(float)
    composed = ups if code.upsilon is None else ups @ unify(code.upsilon, ups)[0]
    return Code(
        code.params, code.roles, code.kinds, alice @ ups.T, bob, gauge @ ups.T, composed
    )


def codes_close(a: Code, b: Code, tol: float = 0.0) -> bool:
    """Entrywise comparison of two codes (labels must match exactly)."""
    if (a.params, a.roles, a.kinds) != (b.params, b.roles, b.kinds):
        return False
    for x, y in ((a.alice, b.alice), (a.bob, b.bob), (a.gauge, b.gauge)):
        if x.shape != y.shape:
            return False
        if x.size and max_abs(np.asarray(x, dtype=float) - np.asarray(y, dtype=float)) > tol:
            return False
        if tol == 0 and x.size and not all(p == q for p, q in zip(x.flat, y.flat)):
            return False
    return True


# --------------------------------------------------------------------------- validation


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""
    offending: tuple = ()


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[Check, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def __str__(self) -> str:
        lines = []
        for c in self.checks:
            tag = "PASS" if c.passed else "FAIL"
            lines.append(f"{tag} {c.name}" + (f": {c.detail}" if c.detail else ""))
        return "\n".join(lines)


def _nonzero(x, tol: float) -> bool:
    return x != 0 if isinstance(x, Fraction) else abs(float(x)) > tol


def _value_is(x, target: int, tol: float) -> bool:
    return x == target if isinstance(x, Fraction) else abs(float(x) - target) <= tol


def _check_counts(code: Code) -> Check:
    p = code.params
    problems = []
    counts = {role: len(code.modes(role)) for role in Role}
    expected = {Role.INFO: p.k, Role.ANCILLA: p.l, Role.GAUGE: p.r, Role.EBIT: p.c}
    for role, want in expected.items():
        if counts[role] != want:
            problems.append(f"{counts[role]} {role.value} modes, expected {want}")
    nk = {kind: len(code.row_indices(kind)) for kind in RowKind}
    for kind, want in ((RowKind.ANCILLA, p.l), (RowKind.EBIT_Z, p.c), (RowKind.EBIT_X, p.c)):
        if nk[kind] != want:
            problems.append(f"{nk[kind]} {kind.value} rows, expected {want}")
    if code.gauge.shape[0] != 2 * p.r:
        problems.append(f"{code.gauge.shape[0]} gauge rows, expected {2 * p.r}")
    return Check("params", not problems, "; ".join(problems))


def _check_bob(code: Code, tol: float) -> Check:
    c = code.params.c
    bad = []
    for i, kind in enumerate(code.kinds):
        row = code.bob[i]
        nz = [j for j in range(2 * c) if _nonzero(row[j], tol)]
        if kind == RowKind.ANCILLA:
            ok = not nz
        elif kind == RowKind.EBIT_Z:
            ok = len(nz) == 1 and nz[0] < c and _unit(row[nz[0]], tol)
        else:
            ok = len(nz) == 1 and nz[0] >= c and _unit(row[nz[0]], tol)
        if not ok:
            bad.append(i)
    if not bad:
        try:
            code.ebit_rows()
        except ValueError as exc:
            return Check("bob_blocks", False, str(exc))
    detail = ", ".join(f"row {i + 1}" for i in bad)
    return Check("bob_blocks", not bad, detail and f"bad Bob block on {detail}", tuple(bad))


def _unit(x, tol: float) -> bool:
    return _value_is(x, 1, tol) or _value_is(x, -1, tol)


def _check_commutation(code: Code, tol: float) -> Check:
    rows = code.full_rows
    if rows.shape[0] == 0:
        return Check("commutation", True)
    table = product_matrix(rows)
    bad = [
        (i, j)
        for i in range(rows.shape[0])
        for j in range(i + 1, rows.shape[0])
        if _nonzero(table[i, j], tol)
    ]
    detail = ", ".join(f"rows {i + 1},{j + 1} (product {table[i, j]})" for i, j in bad)
    return Check("commutation", not bad, detail and f"non-commuting {detail}", tuple(bad))


def _check_rank(code: Code, tol: float) -> Check:
    rows = code.full_rows
    m = rows.shape[0]
    got = rank(rows, tol) if m else 0
    if got == m:
        return Check("rank", True)
    first = next(i for i in range(m) if rank(rows[: i + 1], tol) < i + 1)
    return Check("rank", False, f"check rows have rank {got} < {m}; row {first + 1} is dependent", (first,))


def _check_gauge(code: Code, tol: float) -> Check:
    g = code.gauge
    if g.shape[0] == 0:
        return Check("gauge_pairing", True)
    table = product_matrix(g)
    bad = []
    for i in range(g.shape[0]):
        for j in range(i + 1, g.shape[0]):
            want = 1 if (i % 2 == 0 and j == i + 1) else 0
            if not _value_is(table[i, j], want, tol):
                bad.append((i, j))
    detail = ", ".join(f"rows {i + 1},{j + 1} (product {table[i, j]})" for i, j in bad)
    return Check("gauge_pairing", not bad, detail and f"bad gauge products {detail}", tuple(bad))


def _check_gauge_commutes(code: Code, tol: float) -> Check:
    if code.gauge.shape[0] == 0 or code.alice.shape[0] == 0:
        return Check("gauge_commutation", True)
    n, c = code.n, code.params.c
    g = code.gauge
    zb = zeros((g.shape[0], c), is_exact(g))
    g_full = np.hstack([g[:, :n], zb, g[:, n:], zb])
    table = product_matrix(g_full, code.full_rows)
    bad = [
        (i, j)
        for i in range(table.shape[0])
        for j in range(table.shape[1])
        if _nonzero(table[i, j], tol)
    ]
    detail = ", ".join(f"gauge row {i + 1} vs check row {j + 1}" for i, j in bad)
    return Check("gauge_commutation", not bad, detail and f"non-commuting {detail}", tuple(bad))


def _check_alice_rank(code: Code, tol: float) -> Check:
    stacked = np.vstack([code.alice, code.gauge])
    m = stacked.shape[0]
    got = rank(stacked, tol) if m else 0
    return Check(
        "alice_rank",
        got == m,
        "" if got == m else f"Alice check rows and gauge rows have rank {got} < {m}",
    )


def validate(code: Code, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Check every structural invariant of ``code``; failures are report entries."""
    counts = _check_counts(code)
    checks = [counts]
    try:
        checks.append(_check_bob(code, tol))
    except IndexError as exc:  # pragma: no cover - shapes are enforced by Code
        checks.append(Check("bob_blocks", False, str(exc)))
    checks += [
        _check_commutation(code, tol),
        _check_rank(code, tol),
        _check_gauge(code, tol),
        _check_gauge_commutes(code, tol),
        _check_alice_rank(code, tol),
    ]
    return ValidationReport(tuple(checks))


def require_valid(code: Code, tol: float = DEFAULT_TOL) -> None:
    report = validate(code, tol)
    if not report.ok:
        raise InvalidCodeError(report)


# --------------------------------------------------------------------------- worked example

_EX_FZ = [
    [1, -1, 0, 1, -1, 0, 0, 0],
    [1, 0, -1, 1, 0, -1, 0, 0],
    [0, 0, 0, 0, 0, 0, 1, -1],
    [0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 1],
    [0, 0, 0, 0, 0, 0, 0, 0],
]
_EX_FX = [
    [0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0],
    [1, 1, 1, 0, 0, 0, -1, -1],
    [0, 0, 0, 0, 0, 0, 0, 0],
    [1, 1, 1, -1, -1, -1, 0, 0],
]
_EX_GZ = [
    [0, 0, 0, 0, 0, 0, 0, 0],
    [1, -1, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 1, 0, -1, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0],
]
_EX_GX = [
    [0, 1, 0, 0, -1, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 1, 0, 0, -1, 0, 0],
]
# Bob's column for the two entangled rows (rows 4 and 5), as (p | x).
_EX_BOB = [[0, 0], [0, 0], [0, 0], [0, 1], [1, 0], [0, 0]]
_EX_KINDS = (
    RowKind.ANCILLA,
    RowKind.ANCILLA,
    RowKind.ANCILLA,
    RowKind.EBIT_X,
    RowKind.EBIT_Z,
    RowKind.ANCILLA,
)
_EX_ROLES = (
    Role.ANCILLA,
    Role.ANCILLA,
    Role.ANCILLA,
    Role.EBIT,
    Role.ANCILLA,
    Role.GAUGE,
    Role.GAUGE,
    Role.INFO,
)
EXAMPLE_PARAMS = CodeParams(8, 1, 4, 2, 1)


def example_code() -> Code:
    """Eight-mode code with one information mode, four ancillas, two gauge modes and one ebit."""
    alice = exact(np.hstack([_EX_FZ, _EX_FX]))
    gauge = exact(np.hstack([_EX_GZ, _EX_GX]))
    return Code(EXAMPLE_PARAMS, _EX_ROLES, _EX_KINDS, alice, exact(_EX_BOB), gauge)


def example_unencoded_code() -> Code:
    """The example before encoding: a canonical code laid out in the example's mode order."""
    n = 8
    alice = zeros((6, 2 * n), True)
    for row, mode in ((0, 0), (1, 1), (2, 2), (3, 3), (5, 4)):
        alice[row, mode] = Fraction(1)
    alice[4, n + 3] = Fraction(1)
    bob = exact([[0, 0], [0, 0], [0, 0], [-1, 0], [0, 1], [0, 0]])
    gauge = zeros((4, 2 * n), True)
    gauge[0, 5] = gauge[1, n + 5] = gauge[2, 6] = gauge[3, n + 6] = Fraction(1)
    kinds = (
        RowKind.ANCILLA,
        RowKind.ANCILLA,
        RowKind.ANCILLA,
        RowKind.EBIT_Z,
        RowKind.EBIT_X,
        RowKind.ANCILLA,
    )
    return Code(EXAMPLE_PARAMS, _EX_ROLES, kinds, alice, bob, gauge, eye(2 * n, True))


def example_encoding() -> np.ndarray:
    """A symplectic matrix taking :func:`example_unencoded_code` to the example's checks.

    Only the images of the check and gauge rows are pinned down; the remaining
    columns come from the basis completion in :func:`build_symplectic_basis`.
    """
    return encoding_from_basis(build_symplectic_basis(example_code()), _EX_ROLES)


# --------------------------------------------------------------------------- symplectic basis


@dataclass(frozen=True, eq=False)
class SymplecticBasis:
    """Symplectic basis adapted to a code, in check-row coordinates.

    Each pair ``(u, v)`` satisfies ``<u, v> = 1``; all other products vanish.
    ``logical_pairs[t]`` is ``(logical Z, logical X)`` of information mode ``t``.
    """

    stabilizers: np.ndarray
    destabilizers: np.ndarray
    ebit_pairs: tuple[tuple[np.ndarray, np.ndarray], ...]
    gauge_pairs: tuple[tuple[np.ndarray, np.ndarray], ...]
    logical_pairs: tuple[tuple[np.ndarray, np.ndarray], ...]
    ebit_signs: tuple = field(default=())

    def all_pairs(self) -> list[tuple[np.ndarray, np.ndarray]]:
        stab = list(zip(self.stabilizers, self.destabilizers))
        return stab + list(self.ebit_pairs) + list(self.gauge_pairs) + list(self.logical_pairs)

    def matrix(self) -> np.ndarray:
        """Rows ``[u_1 .. u_n ; v_1 .. v_n]``, a symplectic matrix."""
        return pairs_to_matrix(self.all_pairs())

    def __len__(self) -> int:
        return 2 * len(self.all_pairs())


def _is_standard(pairs, tol: float) -> bool:
    m = pairs_to_matrix(pairs)
    j = symplectic_form(len(pairs), is_exact(m))
    diff = product_matrix(m) - j
    if is_exact(diff):
        return all(x == 0 for x in diff.flat)
    return max_abs(diff) <= tol


def _known_pairs(code: Code, tol: float):
    stabilizers = code.f_i
    ebit_pairs, signs = [], []
    for zi, xi in code.ebit_rows():
        z, x = code.alice[zi], code.alice[xi]
        s = (product_matrix(z[None, :], x[None, :]))[0, 0]
        if not _nonzero(s, tol):
            raise ValueError(f"ebit rows {zi + 1} and {xi + 1} have zero product on Alice's side")
        ebit_pairs.append((z / s, x))
        signs.append(s)
    g = code.gauge
    gauge_pairs = [(g[2 * i], g[2 * i + 1]) for i in range(g.shape[0] // 2)]
    return stabilizers, ebit_pairs, gauge_pairs, tuple(signs)


def _frame_completion(code: Code):
    """Destabilizers and logicals as images of the unencoded frame under ``code.upsilon``."""
    ups = unify(code.upsilon, code.alice)[0]
    n = code.n

    def img(col: int) -> np.ndarray:
        return ups[:, col].copy()

    destab = [img(n + m) for m in code.modes(Role.ANCILLA)]
    logical = [(img(m), img(n + m)) for m in code.modes(Role.INFO)]
    return destab, logical


def _generic_completion(code: Code, stabilizers, hyperbolic, tol: float):
    exact_mode = code.exact
    n = code.n
    j = symplectic_form(n, exact_mode)
    hyp_rows = [v for pair in hyperbolic for v in pair]
    l = stabilizers.shape[0]
    destab = []
    if l:
        constraint = np.vstack([stabilizers] + [np.atleast_2d(v) for v in hyp_rows]) @ j
        rhs = zeros((constraint.shape[0], l), exact_mode)
        for i in range(l):
            rhs[i, i] = Fraction(1) if exact_mode else 1.0
        sol = least_norm_solve(constraint, rhs)
        destab = [sol[:, i].copy() for i in range(l)]
        for b in range(l):
            for a in range(b):
                coef = product_matrix(destab[a][None, :], destab[b][None, :])[0, 0]
                destab[b] = destab[b] + coef * stabilizers[a]
    known = [stabilizers] + [np.atleast_2d(v) for v in destab + hyp_rows]
    known = [k for k in known if k.size]
    span = np.vstack(known) if known else zeros((0, 2 * n), exact_mode)
    comp = nullspace(span @ j, tol) if span.shape[0] else eye(2 * n, exact_mode)
    logical = []
    if comp.shape[0]:
        pairs, iso = symplectic_gram_schmidt(comp, tol)
        if iso:
            raise ValueError("logical complement is degenerate")
        logical = pairs
    return destab, logical


def build_symplectic_basis(code: Code, tol: float = DEFAULT_TOL) -> SymplecticBasis:
    """Complete the stabilizer, ebit and gauge rows of ``code`` to a symplectic basis.

    Uses the stored encoding when it is consistent with the rows, otherwise
    fills in destabilizers by a minimum-norm solve and logicals by symplectic
    Gram-Schmidt on the remaining complement.
    """
    require_valid(code, tol)
    stabilizers, ebit_pairs, gauge_pairs, signs = _known_pairs(code, tol)
    hyperbolic = ebit_pairs + gauge_pairs
    n_s = stabilizers.shape[0]
    empty = zeros((0, 2 * code.n), code.exact)

    def assemble(destab, logical):
        return SymplecticBasis(
            stabilizers,
            np.vstack(destab) if destab else empty,
            tuple(ebit_pairs),
            tuple(gauge_pairs),
            tuple(tuple(p) for p in logical),
            signs,
        )

    if code.upsilon is not None:
        destab, logical = _frame_completion(code)
        pairs = list(zip(stabilizers, destab)) + hyperbolic + list(logical)
        if len(destab) == n_s and pairs and _is_standard(pairs, tol):
            return assemble(destab, logical)
    destab, logical = _generic_completion(code, stabilizers, hyperbolic, tol)
    basis = assemble(destab, logical)
    if basis.all_pairs() and not _is_standard(basis.all_pairs(), max(tol, 1e-7)):
        raise ValueError("basis completion failed to produce a symplectic basis")
    return basis


def encoding_from_basis(basis: SymplecticBasis, roles: Sequence[Role]) -> np.ndarray:
    """Symplectic matrix whose columns send each unencoded mode to its basis pair."""
    roles = [Role(r) for r in roles]
    n = len(roles)
    slots = {
        Role.ANCILLA: list(zip(basis.stabilizers, basis.destabilizers)),
        Role.EBIT: list(basis.ebit_pairs),
        Role.GAUGE: list(basis.gauge_pairs),
        Role.INFO: list(basis.logical_pairs),
    }
    counters = {role: 0 for role in Role}
    first = basis.stabilizers if basis.stabilizers.size else basis.all_pairs()[0][0][None, :]
    ups = zeros((2 * n, 2 * n), is_exact(first))
    for mode, role in enumerate(roles):
        u, v = slots[role][counters[role]]
        counters[role] += 1
        ups[:, mode] = u
        ups[:, n + mode] = v
    return ups


# --------------------------------------------------------------------------- correctability


def correctable_pair(code: Code, e, e2, tol: float = DEFAULT_TOL) -> bool:
    """Whether errors ``e`` and ``e2`` (Alice displacements) can be told apart or are equivalent.

    True iff their difference shifts some measured observable, or is a
    combination of ancilla-absorbed and gauge directions.
    """
    e, e2 = unify(e, e2)
    if e.shape != (2 * code.n,) or e2.shape != (2 * code.n,):
        raise ValueError(f"errors must have length {2 * code.n}")
    d = e - e2
    if is_exact(d) and all(x == 0 for x in d):
        return True
    d_row = flip_x(d)
    checks = code.alice
    if checks.shape[0]:
        prods = product_matrix(d_row[None, :], checks)
        if any(_nonzero(x, tol) for x in prods.flat):
            return True
    trivial = np.vstack([code.f_i, code.gauge])
    if trivial.shape[0] == 0:
        return max_abs(d) <= tol
    return in_rowspace(trivial, d_row, tol)


def _syndrome_matrix(code: Code) -> np.ndarray:
    """``S`` with ``S @ e`` the syndrome of displacement ``e`` in row order."""
    n = code.n
    a = code.alice
    return np.hstack([a[:, n:], a[:, :n]])


def single_mode_correctability(code: Code, tol: float = DEFAULT_TOL) -> bool:
    """True iff every pair of single-mode errors is correctable.

    For each pair of modes, the undetectable part of their joint displacement
    space must lie inside the ancilla-plus-gauge span.
    """
    require_valid(code, tol)
    n = code.n
    syn = _syndrome_matrix(code)
    trivial = np.vstack([code.f_i, code.gauge])
    for i in range(n):
        for j in range(i, n):
            cols = sorted({i, j, n + i, n + j})
            sub = syn[:, cols] if syn.shape[0] else zeros((0, len(cols)), code.exact)
            null = nullspace(sub, tol)
            for coef in null:
                v = zeros(2 * n, is_exact(null))
                v[cols] = coef
                v_row = flip_x(v)
                if trivial.shape[0] == 0 or not in_rowspace(trivial, v_row, tol):
                    return False
    return True
