"""Lift a binary stabilizer matrix to a real one by choosing signs.

Every ``1`` becomes ``+1`` or ``-1`` so that the real symplectic products between
rows match a target pattern. Small instances are searched exhaustively (row by
row, pruning on the products already fixed); larger ones fall back to seeded
random-restart hill climbing.
"""

from __future__ import annotations

import itertools

import numpy as np

from .symplectic import product_matrix

EXHAUSTIVE_LIMIT = 20
NODE_BUDGET = 2_000_000


class LiftError(RuntimeError):
    """No sign assignment meets the target pattern."""


def _check_inputs(rows: np.ndarray, target: np.ndarray) -> None:
    if rows.ndim != 2 or rows.shape[1] % 2:
        raise ValueError(f"binary rows must be a matrix with an even number of columns, got {rows.shape}")
    if not np.isin(rows, (0, 1)).all():
        raise ValueError("binary rows must contain only 0 and 1")
    m = rows.shape[0]
    if target.shape != (m, m):
        raise ValueError(f"target must be {m}x{m}, got {target.shape}")
    if not np.array_equal(target, -target.T):
        raise ValueError("target pattern must be antisymmetric")
    if not np.isin(target, (-1, 0, 1)).all():
        raise ValueError("target entries must be -1, 0 or 1")


def _violations(signed: np.ndarray, target: np.ndarray) -> int:
    table = product_matrix(signed)
    return int(np.count_nonzero(np.triu(table != target, 1)))


def _row_options(row: np.ndarray) -> list[np.ndarray]:
    support = np.flatnonzero(row)
    out = []
    for signs in itertools.product((1, -1), repeat=len(support)):
        v = np.zeros_like(row)
        v[support] = signs
        out.append(v)
    return out


def _backtrack(rows: np.ndarray, target: np.ndarray, budget: int):
    """Depth-first search over per-row sign choices. Returns (solution | None, finished)."""
    m, width = rows.shape
    n = width // 2
    options = [_row_options(r) for r in rows]
    chosen: list[np.ndarray] = []
    nodes = 0

    def consistent(v: np.ndarray) -> bool:
        i = len(chosen)
        for j, u in enumerate(chosen):
            if u[:n] @ v[n:] - u[n:] @ v[:n] != target[j, i]:
                return False
        return True

    stack = [0]
    while stack:
        i = len(stack) - 1
        opt = stack[-1]
        if opt >= len(options[i]):
            stack.pop()
            if chosen:
                chosen.pop()
            if stack:
                stack[-1] += 1
            continue
        nodes += 1
        if nodes > budget:
            return None, False
        v = options[i][opt]
        if consistent(v):
            chosen.append(v)
            if len(chosen) == m:
                return np.vstack(chosen), True
            stack.append(0)
        else:
            stack[-1] += 1
    return None, True


def _hill_climb(rows: np.ndarray, target: np.ndarray, seed: int, restarts: int, steps: int):
    rng = np.random.default_rng(seed)
    support = np.argwhere(rows == 1)
    for _ in range(restarts):
        signed = rows.astype(int).copy()
        flips = rng.integers(0, 2, size=len(support)).astype(bool)
        for (i, j), f in zip(support, flips):
            if f:
                signed[i, j] = -1
        score = _violations(signed, target)
        for _ in range(steps):
            if score == 0:
                return signed
            best = None
            for idx in rng.permutation(len(support)):
                i, j = support[idx]
                signed[i, j] *= -1
                s = _violations(signed, target)
                signed[i, j] *= -1
                if s < score:
                    best = (i, j, s)
                    break
            if best is None:
                break
            i, j, score = best
            signed[i, j] *= -1
        if score == 0:
            return signed
    return None


def barnes_lift(binary_rows, target, seed: int = 0, restarts: int = 200, steps: int = 500) -> np.ndarray:
    """Signed version of ``binary_rows`` whose real product table equals ``target``.

    ``target`` may be a full antisymmetric matrix or ``"zero"``. Zero entries of
    the input stay zero and rows already meeting the target come back unchanged.
    Raises :class:`LiftError` when the search is exhausted.
    """
    rows = np.asarray(binary_rows).astype(int)
    m = rows.shape[0]
    if isinstance(target, str):
        if target != "zero":
            raise ValueError(f"unknown target pattern {target!r}")
        target = np.zeros((m, m), dtype=int)
    target = np.asarray(target).astype(int)
    _check_inputs(rows, target)
    if m == 0:
        return rows.copy()

    free = int(rows.sum())
    budget = NODE_BUDGET if free <= EXHAUSTIVE_LIMIT else NODE_BUDGET // 4
    found, finished = _backtrack(rows, target, budget)
    if found is not None:
        return found
    if finished:
        raise LiftError(f"no sign assignment over {free} free signs meets the target")
    found = _hill_climb(rows, target, seed, restarts, steps)
    if found is None:
        raise LiftError(f"search exhausted after {restarts} restarts without meeting the target")
    return found
