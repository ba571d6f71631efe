"""Displacement channels, syndrome extraction, recovery and Monte Carlo trials.

Everything is in the Heisenberg picture: an error is a displacement vector on
Alice's ``n`` modes (Bob's halves are never hit), the syndrome is the shift of
each measured observable relative to the all-zero reference, and success means
the residual displacement does not move any logical observable.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .code import Code, CodeParams, Role, SymplecticBasis, build_symplectic_basis
from .exact import DEFAULT_TOL, eye, fmt_scalar, is_exact, particular_solution, solve, unify, zeros
from .symplectic import displacement_image, flip_x, product_matrix

BLOCK_SIZE = 1024
THRESHOLDS = (1e-9, 1e-2)
CSV_HEADER = (
    "code",
    "noise",
    "sigma",
    "squeezing_db",
    "trials",
    "seed",
    "rms_logical_p",
    "rms_logical_x",
    "mean_residual_norm",
    "frac_within_1e-9",
    "frac_within_1e-2",
)


@dataclass(frozen=True)
class Syndrome:
    """Measured shifts: ancilla positions ``a``, relative positions ``a1``, total momenta ``a2``."""

    a: np.ndarray
    a1: np.ndarray
    a2: np.ndarray

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([np.asarray(self.a), np.asarray(self.a1), np.asarray(self.a2)])

    @classmethod
    def from_vector(cls, v, params: CodeParams) -> "Syndrome":
        v = np.asarray(v)
        if v.shape != (params.l + 2 * params.c,):
            raise ValueError(f"syndrome has length {v.shape}, expected {params.l + 2 * params.c}")
        l, c = params.l, params.c
        return cls(v[:l], v[l : l + c], v[l + c :])

    def row_order(self, code: Code) -> np.ndarray:
        """Syndrome entries listed by the row of F that produced them."""
        v = self.vector
        out = np.empty_like(v)
        out[code.syndrome_order()] = v
        return out

    def __str__(self) -> str:
        parts = [" ".join(fmt_scalar(x) for x in part) for part in (self.a, self.a1, self.a2)]
        return " | ".join(parts)


@dataclass(frozen=True)
class DecoderConfig:
    """Linear models of the known maps from the syndrome to the information-mode error.

    ``alpha`` predicts the momentum kicks and ``beta`` the position shifts; both are
    ``k x (l + 2c)`` acting on the syndrome vector ``(a, a1, a2)``.
    """

    alpha: np.ndarray
    beta: np.ndarray

    @classmethod
    def zero(cls, params: CodeParams, exact_mode: bool = True) -> "DecoderConfig":
        shape = (params.k, params.l + 2 * params.c)
        return cls(zeros(shape, exact_mode), zeros(shape, exact_mode))

    def check(self, params: CodeParams) -> None:
        shape = (params.k, params.l + 2 * params.c)
        for name, m in (("alpha", self.alpha), ("beta", self.beta)):
            if np.shape(m) != shape:
                raise ValueError(f"{name} has shape {np.shape(m)}, expected {shape}")


def _cfg(cfg: DecoderConfig | None, params: CodeParams) -> DecoderConfig:
    if cfg is None:
        return DecoderConfig.zero(params)
    cfg.check(params)
    return cfg


def syndrome_matrix(code: Code) -> np.ndarray:
    """``S`` such that ``S @ e`` lists the syndrome in (ancilla, ebit_z, ebit_x) order."""
    order = code.syndrome_order()
    n = code.n
    a = code.alice[order]
    if not a.size:
        return zeros((0, 2 * n), code.exact)
    return np.hstack([a[:, n:], a[:, :n]])


def extract_syndrome(code: Code, e) -> Syndrome:
    e = np.asarray(e)
    if e.shape != (2 * code.n,):
        raise ValueError(f"error must have length {2 * code.n}, got {e.shape}")
    s, e = unify(syndrome_matrix(code), e)
    return Syndrome.from_vector(s @ e if s.size else zeros(0, is_exact(s)), code.params)


def canonical_recovery(syndrome: Syndrome, cfg: DecoderConfig | None, params: CodeParams) -> np.ndarray:
    """Displacement Bob undoes on a canonical code: ``(alpha, 0, 0, a2 | beta, a, 0, a1)``."""
    cfg = _cfg(cfg, params)
    k, l, r, c, n = params.k, params.l, params.r, params.c, params.n
    sv = syndrome.vector
    if sv.shape != (l + 2 * c,):
        raise ValueError("syndrome does not match the code parameters")
    sv, alpha, beta = unify(sv, cfg.alpha, cfg.beta)
    u = zeros(2 * n, is_exact(sv))
    if k:
        u[:k] = alpha @ sv
        u[n : n + k] = beta @ sv
    e0 = k + l + r
    u[e0 : e0 + c] = syndrome.a2
    u[n + k : n + k + l] = syndrome.a
    u[n + e0 : n + e0 + c] = syndrome.a1
    return u


class Decoder:
    """Linear decoder for a code, precomputed from its symplectic basis.

    The syndrome fixes the destabilizer and ebit-pair components of the error;
    the recovery cancels exactly those, plus the information-mode displacement
    predicted by ``cfg``.
    """

    def __init__(self, code: Code, cfg: DecoderConfig | None = None, basis: SymplecticBasis | None = None):
        self.code = code
        self.cfg = _cfg(cfg, code.params)
        self.basis = basis if basis is not None else build_symplectic_basis(code)
        b = self.basis
        n = code.n
        order = code.syndrome_order()
        checks = code.alice[order]
        correction = [row for row in b.destabilizers]
        for u, v in b.ebit_pairs:
            correction += [u, v]
        self.syndrome = syndrome_matrix(code)
        m = len(order)
        if m:
            span = np.vstack(correction)
            # gram[i, j] = <span_i, check_j>; solve coef @ gram = sigma for each unit sigma
            gram = product_matrix(span, checks)
            coef = solve(gram.T, eye(m, is_exact(gram))).T
            rec = flip_x(coef @ span)
        else:
            rec = zeros((0, 2 * n), code.exact)
        lz = [p[0] for p in b.logical_pairs]
        lx = [p[1] for p in b.logical_pairs]
        if lz and m:
            kick = flip_x(np.vstack(lz))
            shift = -flip_x(np.vstack(lx))
            rec, alpha, beta, kick, shift = unify(rec, self.cfg.alpha, self.cfg.beta, kick, shift)
            rec = rec + alpha.T @ kick + beta.T @ shift
        self.recovery = rec
        # residual[:, :k] are logical momentum kicks, residual[:, k:] logical position shifts
        if lz:
            obs = np.vstack(lx + lz)
            self.logical = np.hstack([obs[:, n:], obs[:, :n]])
        else:
            self.logical = zeros((0, 2 * n), code.exact)

    @property
    def k(self) -> int:
        return len(self.basis.logical_pairs)

    def recover(self, syndrome) -> np.ndarray:
        sv = syndrome.vector if isinstance(syndrome, Syndrome) else np.asarray(syndrome)
        rec, sv = unify(self.recovery, sv)
        if not rec.size:
            return zeros(2 * self.code.n, is_exact(rec))
        return sv @ rec

    def residual(self, net) -> np.ndarray:
        """``k x 2`` array of (logical momentum kick, logical position shift) per information mode."""
        lo, net = unify(self.logical, np.asarray(net))
        if not lo.size:
            return zeros((0, 2), is_exact(lo))
        vals = lo @ net
        k = self.k
        return np.stack([vals[:k], vals[k:]], axis=1)

    def recover_batch(self, sigma: np.ndarray) -> np.ndarray:
        """Float recoveries for a ``trials x (l + 2c)`` block of syndromes."""
        rec = np.asarray(self.recovery, dtype=float)
        if not rec.size:
            return np.zeros((sigma.shape[0], 2 * self.code.n))
        return sigma @ rec

    def as_float(self) -> tuple[np.ndarray, np.ndarray]:
        """Syndrome and logical read-out matrices in float mode."""
        return np.asarray(self.syndrome, dtype=float), np.asarray(self.logical, dtype=float)


class SingleModeDecoder(Decoder):
    """Decoder for errors confined to one (unknown) mode.

    Finds a mode whose displacements can produce the syndrome and undoes that
    displacement. When the code corrects every single-mode error, any mode that
    fits gives the same logical outcome. Syndromes no single mode explains fall
    back to the linear recovery.
    """

    def __init__(self, code: Code, cfg: DecoderConfig | None = None, basis=None, tol: float = DEFAULT_TOL):
        super().__init__(code, cfg, basis)
        self.tol = tol

    def _locate(self, sigma, syn) -> np.ndarray | None:
        n = self.code.n
        for i in range(n):
            y = particular_solution(syn[:, [i, n + i]], sigma, self.tol)
            if y is not None:
                e = zeros(2 * n, is_exact(y))
                e[i], e[n + i] = y[0], y[1]
                return e
        return None

    def recover(self, syndrome) -> np.ndarray:
        sv = syndrome.vector if isinstance(syndrome, Syndrome) else np.asarray(syndrome)
        syn, sv = unify(self.syndrome, sv)
        if not syn.size:
            return zeros(2 * self.code.n, is_exact(syn))
        e = self._locate(sv, syn)
        return e if e is not None else super().recover(sv)

    def recover_batch(self, sigma: np.ndarray) -> np.ndarray:
        syn = np.asarray(self.syndrome, dtype=float)
        out = np.zeros((sigma.shape[0], 2 * self.code.n))
        if not syn.size:
            return out
        linear = super().recover_batch(sigma)
        for t, s in enumerate(sigma):
            e = self._locate(s, syn)
            out[t] = linear[t] if e is None else e
        return out


def decode(code: Code, syndrome: Syndrome, cfg: DecoderConfig | None = None, strategy: str = "linear") -> np.ndarray:
    """Recovery displacement for ``syndrome``; ``strategy`` is ``"linear"`` or ``"single_mode"``."""
    return make_decoder(code, cfg, strategy).recover(syndrome)


def make_decoder(code: Code, cfg: DecoderConfig | None = None, strategy: str = "linear") -> Decoder:
    if strategy == "linear":
        return Decoder(code, cfg)
    if strategy == "single_mode":
        return SingleModeDecoder(code, cfg)
    raise ValueError(f"unknown decoding strategy {strategy!r}")


def residual_logical(code: Code, net) -> np.ndarray:
    return Decoder(code).residual(net)


# --------------------------------------------------------------------------- noise


def s0_error(code: Code, a, b, c, d, a1, a2, cfg: DecoderConfig | None = None) -> np.ndarray:
    """Error from the canonically correctable set, placed by mode role.

    In the unencoded frame the error is ``(alpha, b, c, a2 | beta, a, d, a1)``
    with ``alpha``/``beta`` the cfg maps applied to ``(a, a1, a2)``; a stored
    encoding carries it to the encoded frame.
    """
    p = code.params
    cfg = _cfg(cfg, p)
    a, b, c, d, a1, a2 = (np.asarray(x) for x in (a, b, c, d, a1, a2))
    for name, v, want in (("a", a, p.l), ("b", b, p.l), ("c", c, p.r), ("d", d, p.r), ("a1", a1, p.c), ("a2", a2, p.c)):
        if v.shape != (want,):
            raise ValueError(f"{name} has shape {v.shape}, expected ({want},)")
    sv = np.concatenate([a, a1, a2])
    parts = unify(sv, cfg.alpha, cfg.beta, b, c, d)
    sv, alpha, beta, b, c, d = parts
    a, a1, a2 = sv[: p.l], sv[p.l : p.l + p.c], sv[p.l + p.c :]
    n = p.n
    u = zeros(2 * n, is_exact(sv))
    info, anc, gauge, ebit = (code.modes(r) for r in (Role.INFO, Role.ANCILLA, Role.GAUGE, Role.EBIT))
    if info:
        u[info] = alpha @ sv
        u[[n + i for i in info]] = beta @ sv
    u[anc] = b
    u[[n + i for i in anc]] = a
    u[gauge] = c
    u[[n + i for i in gauge]] = d
    u[ebit] = a2
    u[[n + i for i in ebit]] = a1
    if code.upsilon is not None:
        u = displacement_image(u, code.upsilon)
    return u


@dataclass(frozen=True)
class GaussianIID:
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")

    def sample(self, code: Code, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.normal(0.0, self.sigma, size=(size, 2 * code.n))

    def label(self) -> str:
        return f"gaussian:sigma={self.sigma!r}"


@dataclass(frozen=True)
class StructuredS0:
    """Random members of the canonically correctable set; generators drawn N(0, scale^2)."""

    cfg: DecoderConfig | None = None
    scale: float = 1.0

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError(f"scale must be positive, got {self.scale}")

    def sample(self, code: Code, rng: np.random.Generator, size: int) -> np.ndarray:
        p = code.params
        cfg = _cfg(self.cfg, p)
        alpha = np.asarray(cfg.alpha, dtype=float)
        beta = np.asarray(cfg.beta, dtype=float)
        g = rng.normal(0.0, self.scale, size=(size, 2 * p.l + 2 * p.r + 2 * p.c))
        l, r, c = p.l, p.r, p.c
        a, b = g[:, :l], g[:, l : 2 * l]
        cc, d = g[:, 2 * l : 2 * l + r], g[:, 2 * l + r : 2 * l + 2 * r]
        a1, a2 = g[:, 2 * l + 2 * r : 2 * l + 2 * r + c], g[:, 2 * l + 2 * r + c :]
        sv = np.hstack([a, a1, a2])
        n = p.n
        u = np.zeros((size, 2 * n))
        info, anc, gauge, ebit = (code.modes(x) for x in (Role.INFO, Role.ANCILLA, Role.GAUGE, Role.EBIT))
        if info:
            u[:, info] = sv @ alpha.T
            u[:, [n + i for i in info]] = sv @ beta.T
        u[:, anc] = b
        u[:, [n + i for i in anc]] = a
        u[:, gauge] = cc
        u[:, [n + i for i in gauge]] = d
        u[:, ebit] = a2
        u[:, [n + i for i in ebit]] = a1
        if code.upsilon is not None:
            u = displacement_image(u, np.asarray(code.upsilon, dtype=float))
        return u

    def label(self) -> str:
        return "s0"


@dataclass(frozen=True)
class SingleMode:
    """Deterministic kick ``p`` and shift ``x`` on one mode (1-based)."""

    mode: int
    p: float
    x: float

    def sample(self, code: Code, rng: np.random.Generator, size: int) -> np.ndarray:
        if not 1 <= self.mode <= code.n:
            raise ValueError(f"mode {self.mode} outside 1..{code.n}")
        u = np.zeros((size, 2 * code.n))
        u[:, self.mode - 1] = self.p
        u[:, code.n + self.mode - 1] = self.x
        return u

    def label(self) -> str:
        return f"single:mode={self.mode},p={self.p!r},x={self.x!r}"


@dataclass(frozen=True)
class Fixed:
    error: np.ndarray | None = None  # None means the zero error

    def sample(self, code: Code, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.error is None:
            return np.zeros((size, 2 * code.n))
        e = np.asarray(self.error, dtype=float)
        if e.shape != (2 * code.n,):
            raise ValueError(f"fixed error has shape {e.shape}, expected ({2 * code.n},)")
        return np.tile(e, (size, 1))

    def label(self) -> str:
        return "fixed:zero" if self.error is None else "fixed"


@dataclass(frozen=True)
class SqueezingModel:
    """Finite squeezing as additive Gaussian noise on every syndrome component.

    The variance per component is ``10**(-db/10) / 2``; ``db = inf`` is ideal.
    """

    db: float = math.inf

    def __post_init__(self):
        if not self.db >= 0:
            raise ValueError(f"squeezing must be >= 0 dB, got {self.db}")

    @property
    def ideal(self) -> bool:
        return math.isinf(self.db)

    @property
    def std(self) -> float:
        return 0.0 if self.ideal else math.sqrt(10 ** (-self.db / 10) / 2)


# --------------------------------------------------------------------------- trials


@dataclass(frozen=True)
class TrialStats:
    trials: int
    rms_logical_p: tuple[float, ...]
    rms_logical_x: tuple[float, ...]
    mean_residual_norm: float
    fraction_within: dict = field(default_factory=dict)

    @property
    def rms_p(self) -> float:
        """RMS logical kick pooled over information modes."""
        v = self.rms_logical_p
        return math.sqrt(math.fsum(x * x for x in v) / len(v)) if v else 0.0

    @property
    def rms_x(self) -> float:
        v = self.rms_logical_x
        return math.sqrt(math.fsum(x * x for x in v) / len(v)) if v else 0.0


def _threads(threads: int | None) -> int:
    if threads is not None:
        return max(1, threads)
    env = os.environ.get("CVEAO_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_trials(
    code: Code,
    noise,
    cfg: DecoderConfig | None = None,
    squeezing: SqueezingModel | None = None,
    trials: int = 1000,
    seed: int = 0,
    thresholds: Sequence[float] = THRESHOLDS,
    threads: int | None = None,
    decoder: Decoder | None = None,
) -> TrialStats:
    """Sample errors, decode, and aggregate residual logical displacements.

    Trials are cut into fixed-size blocks, each with its own generator seeded
    by ``(seed, block)``; per-block sums are combined in block order, so the
    result depends only on ``(seed, trials)`` and not on the thread count.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    squeezing = squeezing or SqueezingModel()
    dec = decoder or Decoder(code, cfg)
    syn, logical = dec.as_float()
    k = dec.k
    thresholds = tuple(thresholds)
    n_blocks = -(-trials // BLOCK_SIZE)

    def block(b: int):
        size = min(BLOCK_SIZE, trials - b * BLOCK_SIZE)
        rng = np.random.default_rng([seed, b])
        e = noise.sample(code, rng, size)
        s = e @ syn.T
        if not squeezing.ideal and s.size:
            s = s + rng.normal(0.0, squeezing.std, size=s.shape)
        net = e - dec.recover_batch(s)
        res = net @ logical.T if logical.size else np.zeros((size, 0))
        norms = np.sqrt(np.sum(res * res, axis=1))
        sq = res * res
        return (
            np.sum(sq[:, :k], axis=0),
            np.sum(sq[:, k:], axis=0),
            float(np.sum(norms)),
            [int(np.count_nonzero(norms <= t)) for t in thresholds],
        )

    workers = min(_threads(threads), n_blocks)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(block, range(n_blocks)))
    else:
        parts = [block(b) for b in range(n_blocks)]

    sum_p = [math.fsum(float(p[0][t]) for p in parts) for t in range(k)]
    sum_x = [math.fsum(float(p[1][t]) for p in parts) for t in range(k)]
    norm = math.fsum(p[2] for p in parts)
    within = {t: sum(p[3][i] for p in parts) / trials for i, t in enumerate(thresholds)}
    return TrialStats(
        trials,
        tuple(math.sqrt(v / trials) for v in sum_p),
        tuple(math.sqrt(v / trials) for v in sum_x),
        norm / trials,
        within,
    )


def stats_row(code_name: str, noise, squeezing: SqueezingModel, trials: int, seed: int, stats: TrialStats) -> dict:
    sigma = getattr(noise, "sigma", None)
    return {
        "code": code_name,
        "noise": noise.label(),
        "sigma": "" if sigma is None else repr(float(sigma)),
        "squeezing_db": "inf" if squeezing.ideal else repr(float(squeezing.db)),
        "trials": str(trials),
        "seed": str(seed),
        "rms_logical_p": repr(stats.rms_p),
        "rms_logical_x": repr(stats.rms_x),
        "mean_residual_norm": repr(stats.mean_residual_norm),
        "frac_within_1e-9": repr(stats.fraction_within.get(1e-9, float("nan"))),
        "frac_within_1e-2": repr(stats.fraction_within.get(1e-2, float("nan"))),
    }


def append_csv(path: str | Path, row: dict) -> None:
    """Append one result row, writing the header if the file is new or empty."""
    path = Path(path)
    new = not path.exists() or path.stat().st_size == 0
    with path.open("a", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_HEADER, lineterminator="\n")
        if new:
            writer.writeheader()
        writer.writerow(row)
