"""Two-mode number tower.

Arrays are either exact (numpy ``object`` arrays holding :class:`fractions.Fraction`)
or binary floating point (``float64``). Every routine here dispatches on the dtype
of its input, so callers pick the mode once when they build their matrices.
Float-mode comparisons always take an explicit tolerance.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

DEFAULT_TOL = 1e-9


class DimensionError(ValueError):
    """Operands have incompatible shapes."""


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (bool, np.bool_)):
        return Fraction(int(x))
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, (float, np.floating)):
        return Fraction(float(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def is_exact(a) -> bool:
    return np.asarray(a).dtype == object


def exact(a) -> np.ndarray:
    """Return an object array of Fractions with the shape of ``a``."""
    arr = np.asarray(a, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx, x in np.ndenumerate(arr):
        out[idx] = to_fraction(x)
    return out


def as_float(a) -> np.ndarray:
    return np.asarray(a, dtype=float)


def like(a, template) -> np.ndarray:
    """Convert ``a`` into the number mode of ``template``."""
    return exact(a) if is_exact(template) else as_float(a)


def unify(*arrays) -> list[np.ndarray]:
    """Bring arrays to a common mode: exact only if all of them are exact."""
    if all(is_exact(a) for a in arrays):
        return [exact(a) for a in arrays]
    return [as_float(a) for a in arrays]


def zeros(shape, exact_mode: bool) -> np.ndarray:
    if exact_mode:
        out = np.empty(shape, dtype=object)
        out.fill(Fraction(0))
        return out
    return np.zeros(shape)


def eye(n: int, exact_mode: bool) -> np.ndarray:
    out = zeros((n, n), exact_mode)
    for i in range(n):
        out[i, i] = Fraction(1) if exact_mode else 1.0
    return out


def is_zero(a, tol: float = DEFAULT_TOL) -> bool:
    a = np.asarray(a)
    if a.size == 0:
        return True
    if is_exact(a):
        return all(x == 0 for x in a.flat)
    return float(np.max(np.abs(a))) <= tol


def max_abs(a) -> float:
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(max(abs(float(x)) for x in a.flat)) if is_exact(a) else float(np.max(np.abs(a)))


def _rref_exact(a: np.ndarray) -> tuple[list[list[Fraction]], list[int]]:
    rows, cols = a.shape
    m = [list(row) for row in a]
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        lead = m[r][c]
        if lead != 1:
            m[r] = [x / lead if x else x for x in m[r]]
        pivot_row = m[r]
        nz = [j for j in range(c, cols) if pivot_row[j] != 0]
        for i in range(rows):
            f = m[i][c]
            if i != r and f != 0:
                row = m[i]
                for j in nz:
                    row[j] -= f * pivot_row[j]
        pivots.append(c)
        r += 1
    return m, pivots


def rref(a) -> tuple[np.ndarray, tuple[int, ...]]:
    """Exact reduced row echelon form and pivot columns."""
    a = exact(np.atleast_2d(a))
    if a.size == 0:
        return a, ()
    m, pivots = _rref_exact(a)
    return np.array(m, dtype=object).reshape(a.shape), tuple(pivots)


def rank(a, tol: float = DEFAULT_TOL) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    a = np.atleast_2d(a)
    if is_exact(a):
        return len(rref(a)[1])
    s = np.linalg.svd(a, compute_uv=False)
    return int(np.sum(s > tol))


def nullspace(a, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Rows spanning ``{x : a @ x = 0}``."""
    a = np.atleast_2d(np.asarray(a))
    cols = a.shape[1]
    if is_exact(a):
        if a.shape[0] == 0:
            return eye(cols, True)
        r, pivots = rref(a)
        free = [c for c in range(cols) if c not in pivots]
        basis = zeros((len(free), cols), True)
        for k, f in enumerate(free):
            basis[k, f] = Fraction(1)
            for i, p in enumerate(pivots):
                basis[k, p] = -r[i, f]
        return basis
    if a.shape[0] == 0:
        return np.eye(cols)
    _, s, vt = np.linalg.svd(a)
    nnz = int(np.sum(s > tol))
    return vt[nnz:].copy()


def solve(a, b) -> np.ndarray:
    """Solve the square nonsingular system ``a @ x = b`` (``b`` may be 2-D)."""
    a, b = unify(a, b)
    if not is_exact(a):
        return np.linalg.solve(a, b)
    n = a.shape[0]
    vec = b.ndim == 1
    rhs = b.reshape(n, -1)
    aug = np.concatenate([a, rhs], axis=1)
    r, pivots = rref(aug)
    if tuple(pivots) != tuple(range(n)):
        raise np.linalg.LinAlgError("singular matrix")
    x = r[:n, n:]
    return x.reshape(-1) if vec else x


def particular_solution(a, b, tol: float = DEFAULT_TOL):
    """Some ``x`` with ``a @ x = b``, or ``None`` when the system is inconsistent.

    Exact mode sets free variables to zero; float mode takes the least-squares
    solution and accepts it when the residual norm is within ``tol``.
    """
    a, b = unify(np.atleast_2d(a), b)
    rows, cols = a.shape
    if not is_exact(a):
        x, *_ = np.linalg.lstsq(a, b, rcond=None)
        return x if float(np.linalg.norm(a @ x - b)) <= tol else None
    r, pivots = rref(np.concatenate([a, b.reshape(rows, 1)], axis=1))
    if cols in pivots:
        return None
    x = zeros(cols, True)
    for i, p in enumerate(pivots):
        x[p] = r[i, cols]
    return x


def least_norm_solve(a, b) -> np.ndarray:
    """Minimum-norm solution of the full-row-rank system ``a @ x = b``."""
    a, b = unify(a, b)
    if a.shape[0] == 0:
        return zeros((a.shape[1],) + b.shape[1:], is_exact(a))
    if is_exact(a):
        y = solve(a @ a.T, b)
        return a.T @ y
    return np.linalg.lstsq(a, b, rcond=None)[0]


def in_rowspace(basis, v, tol: float = DEFAULT_TOL) -> bool:
    """True iff ``v`` lies in the span of the rows of ``basis``.

    Exact mode compares ranks; float mode bounds the least-squares residual.
    """
    basis = np.asarray(basis)
    v = np.asarray(v)
    if basis.size == 0:
        return is_zero(v, tol)
    basis, v = unify(np.atleast_2d(basis), v)
    if is_exact(basis):
        if all(x == 0 for x in v):
            return True
        return rank(np.vstack([basis, v[None, :]])) == rank(basis)
    coef, *_ = np.linalg.lstsq(basis.T, v, rcond=None)
    return float(np.linalg.norm(basis.T @ coef - v)) <= tol


def fmt_scalar(x) -> str:
    """Text form used by every writer: ``p/q`` or integer for exact, ``repr`` for floats."""
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    x = float(x)
    if x == 0:
        return "0"
    return repr(x)
