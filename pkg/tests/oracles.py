"""Independent reference computations built on sympy.

Nothing here calls into the package's own linear algebra.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import sympy as sp


def sym(m) -> sp.Matrix:
    m = np.atleast_2d(np.asarray(m, dtype=object))
    return sp.Matrix(m.shape[0], m.shape[1], [sp.Rational(str(Fraction(x))) for x in m.flat])


def j_form(n: int) -> sp.Matrix:
    z, i = sp.zeros(n), sp.eye(n)
    return sp.Matrix(sp.BlockMatrix([[z, i], [-i, z]]))


def product_table(a, b=None) -> sp.Matrix:
    a = sym(a)
    b = a if b is None else sym(b)
    return a * j_form(a.shape[1] // 2) * b.T


def rank(m) -> int:
    m = sym(m)
    return 0 if m.shape[0] == 0 else m.rank()


def in_span(rows, v) -> bool:
    rows = sym(rows) if np.size(rows) else sp.zeros(0, len(v))
    v = sym([v])
    if rows.shape[0] == 0:
        return all(x == 0 for x in v)
    return rows.rank() == rows.col_join(v).rank()


def dual_contains(basis, v) -> bool:
    """``v`` in the symplectic dual, via an explicit nullspace of ``B J^T``."""
    b = sym(basis)
    null = (b * j_form(b.shape[1] // 2).T).nullspace()
    if not null:
        return all(x == 0 for x in sym([v]))
    return in_span(sp.Matrix.hstack(*null).T, v)


def pairing(f, e):
    """Shift of observable ``f`` under displacement ``e``, written out by hand."""
    n = len(f) // 2
    return sum(Fraction(f[i]) * Fraction(e[n + i]) + Fraction(f[n + i]) * Fraction(e[i]) for i in range(n))


def to_canonical_frame(d, upsilon):
    """Pull a displacement back through an encoding (inverse of the covariant image)."""
    n = len(d) // 2
    p = sp.diag(*([1] * n + [-1] * n))
    u = sym(upsilon)
    # forward image: d -> P U P d ; so back: d0 = P U^-1 P d
    back = p * u.inv() * p * sym([d]).T
    return [Fraction(int(x.p), int(x.q)) for x in back]


def canonical_correctable(d0, k: int, l: int, r: int, c: int) -> bool:
    """Correctability of a displacement difference in the canonical layout.

    Detected iff it moves an ancilla position or an ebit quadrature; harmless
    iff it lives only on ancilla momenta and gauge modes.
    """
    n = k + l + r + c
    p, x = d0[:n], d0[n:]
    anc = range(k, k + l)
    ebit = range(k + l + r, n)
    detected = any(x[i] != 0 for i in anc) or any(p[i] != 0 or x[i] != 0 for i in ebit)
    harmless = (
        all(p[i] == 0 and x[i] == 0 for i in range(k))
        and all(x[i] == 0 for i in anc)
        and all(p[i] == 0 and x[i] == 0 for i in ebit)
    )
    return detected or harmless


def canonical_syndrome(e, k: int, l: int, r: int, c: int):
    """(a, a1, a2) read off a canonical-layout displacement."""
    n = k + l + r + c
    e0 = k + l + r
    a = [e[n + k + i] for i in range(l)]
    a1 = [e[n + e0 + j] for j in range(c)]
    a2 = [e[e0 + j] for j in range(c)]
    return a, a1, a2
