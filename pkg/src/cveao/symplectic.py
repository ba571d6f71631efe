"""Phase-space vectors and the symplectic form.

A phase-space vector on ``m`` modes is a length ``2m`` array ordered
``(p_1 .. p_m | x_1 .. x_m)``. The symplectic product is

    <u, v> = u_p . v_x - u_x . v_p  =  u J v^T,   J = [[0, I], [-I, 0]].

Check rows and gauge rows of a code are coefficient vectors of quadrature
observables; error vectors are displacements. The two pictures are related by
negating the x-half (:func:`flip_x`), which turns the measured shift of an
observable into a symplectic product: ``syndrome_pairing(f, e) == <flip_x(e), f>``.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .exact import (
    DEFAULT_TOL,
    DimensionError,
    exact,
    eye,
    in_rowspace,
    is_exact,
    max_abs,
    rank,
    unify,
    zeros,
)


class LinearDependenceError(ValueError):
    """Raised when a routine that needs independent rows gets dependent ones."""

    def __init__(self, index: int):
        super().__init__(f"row {index} is linearly dependent on the rows before it")
        self.index = index


def _half(v: np.ndarray) -> int:
    if v.shape[-1] % 2:
        raise DimensionError(f"phase-space vectors need even length, got {v.shape[-1]}")
    return v.shape[-1] // 2


def symplectic_form(n: int, exact_mode: bool = False) -> np.ndarray:
    j = zeros((2 * n, 2 * n), exact_mode)
    one = Fraction(1) if exact_mode else 1.0
    for i in range(n):
        j[i, n + i] = one
        j[n + i, i] = -one
    return j


def flip_x(v) -> np.ndarray:
    """Negate the x-half of a vector (or of every row of a matrix)."""
    v = np.array(v, copy=True)
    n = _half(v)
    v[..., n:] = -v[..., n:]
    return v


def symplectic_product(u, v):
    u, v = unify(u, v)
    if u.shape != v.shape or u.ndim != 1:
        raise DimensionError(f"cannot pair vectors of shapes {u.shape} and {v.shape}")
    n = _half(u)
    return u[:n] @ v[n:] - u[n:] @ v[:n]


def product_matrix(a, b=None) -> np.ndarray:
    """Table of symplectic products between the rows of ``a`` and ``b``."""
    a = np.atleast_2d(np.asarray(a))
    b = a if b is None else np.atleast_2d(np.asarray(b))
    if a.shape[1] != b.shape[1]:
        raise DimensionError(f"row widths differ: {a.shape[1]} vs {b.shape[1]}")
    a, b = unify(a, b)
    n = _half(a)
    return a[:, :n] @ b[:, n:].T - a[:, n:] @ b[:, :n].T


def syndrome_pairing(f, e):
    """Shift of the observable with coefficient row ``f`` under the displacement ``e``."""
    f, e = unify(f, e)
    if f.shape != e.shape or f.ndim != 1:
        raise DimensionError(f"cannot pair vectors of shapes {f.shape} and {e.shape}")
    n = _half(f)
    return f[:n] @ e[n:] + f[n:] @ e[:n]


def symplectic_residual(m) -> float:
    """``max |M J M^T - J|`` for a square even-dimensional matrix."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    n = _half(m)
    j = symplectic_form(n, is_exact(m))
    return max_abs(m @ j @ m.T - j)


def is_symplectic(m, tol: float | None = None) -> bool:
    """True iff ``M J M^T = J`` (exactly for rational input, to ``tol`` for floats)."""
    m = np.asarray(m)
    if is_exact(m):
        n = _half(m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"expected a square matrix, got shape {m.shape}")
        j = symplectic_form(n, True)
        return all(x == 0 for x in (m @ j @ m.T - j).flat)
    return symplectic_residual(m) <= (DEFAULT_TOL if tol is None else tol)


def symplectic_inverse(m) -> np.ndarray:
    """``M^{-1} = -J M^T J`` for a symplectic ``M``."""
    m = np.asarray(m)
    j = symplectic_form(_half(m), is_exact(m))
    return -j @ m.T @ j


def rowspace_contains(basis, v, tol: float = DEFAULT_TOL) -> bool:
    basis = np.atleast_2d(np.asarray(basis))
    v = np.asarray(v)
    if basis.size and basis.shape[1] != v.shape[0]:
        raise DimensionError(f"ambient dimensions differ: {basis.shape[1]} vs {v.shape[0]}")
    return in_rowspace(basis, v, tol)


def symplectic_dual_contains(basis, v, tol: float = DEFAULT_TOL) -> bool:
    """True iff ``v`` has zero symplectic product with every row of ``basis``."""
    basis = np.atleast_2d(np.asarray(basis))
    v = np.asarray(v)
    if basis.size == 0:
        return True
    if basis.shape[1] != v.shape[0]:
        raise DimensionError(f"ambient dimensions differ: {basis.shape[1]} vs {v.shape[0]}")
    prods = product_matrix(v[None, :], basis)
    if is_exact(prods):
        return all(x == 0 for x in prods.flat)
    return float(np.max(np.abs(prods))) <= tol


def _first_dependent_row(rows: np.ndarray, tol: float) -> int | None:
    if rank(rows, tol) == rows.shape[0]:
        return None
    for i in range(rows.shape[0]):
        if rank(rows[: i + 1], tol) < i + 1:
            return i
    return None  # pragma: no cover


def symplectic_gram_schmidt(rows, tol: float = DEFAULT_TOL):
    """Split the span of independent ``rows`` into hyperbolic pairs and an isotropic part.

    Returns ``(pairs, isotropic)`` where every pair ``(u, v)`` has ``<u, v> = 1`` and
    all other products among the returned vectors vanish. Partners are chosen as
    the first nonzero product (exact) or the largest one in magnitude (float),
    ties going to the lowest index.
    """
    rows = np.atleast_2d(np.asarray(rows))
    if rows.size == 0:
        return [], []
    exact_mode = is_exact(rows)
    rows = exact(rows) if exact_mode else rows.astype(float)
    bad = _first_dependent_row(rows, tol)
    if bad is not None:
        raise LinearDependenceError(bad)

    pending = [r.copy() for r in rows]
    pairs: list[tuple[np.ndarray, np.ndarray]] = []
    isotropic: list[np.ndarray] = []
    while pending:
        u = pending.pop(0)
        prods = [symplectic_product(u, w) for w in pending]
        if exact_mode:
            partner = next((i for i, p in enumerate(prods) if p != 0), None)
        else:
            mags = [abs(p) for p in prods]
            partner = None
            if mags and max(mags) > tol:
                partner = mags.index(max(mags))
        if partner is None:
            isotropic.append(u)
            continue
        v = pending.pop(partner) / prods[partner]
        pending = [w - symplectic_product(w, v) * u + symplectic_product(w, u) * v for w in pending]
        pairs.append((u, v))
    return pairs, isotropic


def pairs_to_matrix(pairs) -> np.ndarray:
    """Stack ``[u_1 .. u_n ; v_1 .. v_n]``; symplectic when the pairs form a symplectic basis."""
    us = [u for u, _ in pairs]
    vs = [v for _, v in pairs]
    return np.vstack(us + vs)


def random_symplectic(
    n: int,
    rng: np.random.Generator,
    exact_mode: bool = False,
    max_entry: int = 1,
    max_cond: float | None = None,
) -> np.ndarray:
    """Random ``2n x 2n`` symplectic matrix from a Gram-Schmidt completion.

    Exact mode draws integer vectors with entries in ``[-max_entry, max_entry]``;
    float mode draws standard normals. ``max_cond`` rejects ill-conditioned draws.
    """
    for _ in range(1000):
        if exact_mode:
            raw = exact(rng.integers(-max_entry, max_entry + 1, size=(2 * n, 2 * n)))
        else:
            raw = rng.standard_normal((2 * n, 2 * n))
        try:
            pairs, iso = symplectic_gram_schmidt(raw)
        except LinearDependenceError:
            continue
        if iso:
            continue
        m = pairs_to_matrix(pairs)
        if max_cond is not None and np.linalg.cond(m.astype(float)) > max_cond:
            continue
        return m
    raise RuntimeError("could not draw a symplectic matrix")  # pragma: no cover


def identity(n: int, exact_mode: bool = True) -> np.ndarray:
    return eye(2 * n, exact_mode)


def displacement_image(e, upsilon) -> np.ndarray:
    """Image of displacement(s) ``e`` under the encoding whose rows map as ``row @ upsilon.T``.

    Keeps every syndrome pairing invariant: ``flip_x(flip_x(e) @ upsilon.T)``.
    """
    e, upsilon = unify(e, upsilon)
    return flip_x(flip_x(e) @ upsilon.T)
