"""
Induced p-norms of nonnegative matrices.

Exact at p = 1 (column sums), p = inf (row sums) and p = 2 (spectral power
iteration); for 1 < p < inf a nonlinear power method whose value is always
the ratio ‖Ac‖_p / ‖c‖_p at the returned witness, i.e. a certified lower
estimate of ‖A‖_p. On nonnegative A the supremum over all c equals the
supremum over c >= 0, since replacing c by |c| cannot decrease ‖Ac‖_p.
"""
import logging
import math
from functools import lru_cache
from typing import Dict, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .config import MAX_DENSE_SETS, MAX_ORACLE_DIM
from .embedding_operator import (
    DenseOperator,
    EmbeddingOperator,
    ExponentPair,
    KroneckerOperator,
    apply,
)
from .errors import CapacityError, DomainError, InputError
from .schemas import PNormResult, SolverSettings

logger = logging.getLogger(__name__)


def pnorm(x: np.ndarray, p: float) -> float:
    """Vector p-norm, scaled by the max entry so huge p cannot overflow."""
    x = np.abs(np.asarray(x, dtype=float))
    if x.size == 0:
        return 0.0
    top = float(x.max())
    if top == 0.0:
        return 0.0
    if math.isinf(p):
        return top
    if p == 1.0:
        return float(x.sum())
    return top * float(np.sum((x / top) ** p)) ** (1.0 / p)


def ratio(op: EmbeddingOperator, c: np.ndarray, p: float) -> float:
    denom = pnorm(c, p)
    if denom == 0.0:
        raise InputError("witness vector is identically zero")
    return pnorm(apply(op, c), p) / denom


def as_operator(a, exps: ExponentPair | None = None) -> EmbeddingOperator:
    if isinstance(a, EmbeddingOperator):
        return a
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InputError(f"expected a square matrix, got shape {a.shape}")
    return DenseOperator(exps=exps or ExponentPair.from_p(2.0), matrix=a)


# -------------------------------
# Endpoints
# -------------------------------
def norm_1(a) -> PNormResult:
    op = as_operator(a)
    if isinstance(op, KroneckerOperator):
        return norm_p_kronecker(op, ExponentPair.from_p(1.0))
    sums = op.column_sums()
    j = int(np.argmax(sums))
    witness = np.zeros(op.size)
    witness[j] = 1.0
    return PNormResult(value=float(sums[j]), method="column_sum", witness=witness)


def norm_inf(a) -> PNormResult:
    op = as_operator(a)
    if isinstance(op, KroneckerOperator):
        return norm_p_kronecker(op, ExponentPair.from_p(math.inf))
    sums = op.row_sums()
    i = int(np.argmax(sums))
    e = np.zeros(op.size)
    e[i] = 1.0
    witness = (op.apply_transpose(e) > 0).astype(float)
    return PNormResult(value=float(sums[i]), method="row_sum", witness=witness)


def norm_2(a, settings: SolverSettings | None = None) -> PNormResult:
    """Largest singular value by power iteration on c -> A^T A c."""
    op = as_operator(a)
    settings = settings or SolverSettings()
    if isinstance(op, KroneckerOperator):
        return norm_p_kronecker(op, ExponentPair.from_p(2.0))
    n = op.size
    v = np.ones(n) / math.sqrt(n)
    rayleigh = 0.0
    change = 0.0
    it = 0
    for it in range(1, settings.spectral_max_iters + 1):
        w = op.apply_transpose(op.apply(v))
        new = float(v @ w)
        size = float(np.linalg.norm(w))
        if size == 0.0:
            return PNormResult(value=0.0, method="spectral", iterations=it, witness=v)
        v = w / size
        change = abs(new - rayleigh) / new if new > 0 else 0.0
        rayleigh = new
        if change < settings.spectral_tol:
            break
    value = float(np.linalg.norm(op.apply(v)))
    return PNormResult(value=value, method="spectral", iterations=it, residual=change, witness=v)


# -------------------------------
# General p
# -------------------------------
def _power_iterate(op: EmbeddingOperator, c0: np.ndarray, exps: ExponentPair, settings: SolverSettings, record: bool):
    p, p_star = exps.p, exps.p_star
    c = c0 / pnorm(c0, p)
    y = op.apply(c)
    current = pnorm(y, p)
    best, best_c = current, c
    trace = [current] if record else None
    change = 0.0
    it = 0
    for it in range(1, settings.max_iters + 1):
        top = float(y.max())
        if top <= 0.0:
            break
        z = op.apply_transpose((y / top) ** (p - 1.0))
        ztop = float(z.max())
        if ztop <= 0.0:
            break
        c_new = (z / ztop) ** (p_star - 1.0)
        c_new = c_new / pnorm(c_new, p)
        y = op.apply(c_new)
        value = pnorm(y, p)
        if record:
            trace.append(value)
        change = abs(value - current) / value if value > 0 else 0.0
        if value > best:
            best, best_c = value, c_new
        current = value
        if change < settings.tol:
            break
    return best, best_c, it, change, trace


def default_starts(op: EmbeddingOperator, settings: SolverSettings) -> Dict[str, np.ndarray]:
    n = op.size
    starts = {
        "ones": np.ones(n),
        "best_column": norm_1(op).witness,
        "best_row": norm_inf(op).witness,
    }
    # sparse supports get a single random start; each iteration there is O(nnz)
    count = settings.random_starts if n <= MAX_DENSE_SETS else min(1, settings.random_starts)
    rng = np.random.default_rng(settings.seed)
    for k in range(count):
        starts[f"random_{k}"] = rng.uniform(0.05, 1.0, size=n)
    return starts


def norm_p(
    a,
    exps: ExponentPair,
    starts: Optional[Dict[str, np.ndarray]] = None,
    settings: SolverSettings | None = None,
    record_trace: bool = False,
) -> PNormResult:
    """
    Nonlinear power method for nonnegative A: y = Ac, z = A^T y^(p-1),
    c = z^(p*-1), renormalised. Runs from the default starts plus any
    caller-supplied named ones and returns the best ratio seen; the
    winning start name lands in result.candidate.
    """
    op = as_operator(a, exps)
    settings = settings or SolverSettings()
    if isinstance(op, KroneckerOperator):
        return norm_p_kronecker(op, exps)
    if exps.p == 1.0:
        return norm_1(op)
    if math.isinf(exps.p):
        return norm_inf(op)
    if op.min_entry() < 0:
        raise DomainError("the power method needs an entrywise nonnegative matrix")

    all_starts = default_starts(op, settings)
    all_starts.update({name: np.asarray(x, dtype=float) for name, x in (starts or {}).items()})

    best: PNormResult | None = None
    for name, c0 in all_starts.items():
        if c0.shape != (op.size,) or np.any(c0 < 0) or not np.any(c0 > 0):
            raise InputError(f"start '{name}' is not a nonzero nonnegative vector of size {op.size}")
        value, witness, iters, change, trace = _power_iterate(op, c0, exps, settings, record_trace)
        if best is None or value > best.value:
            best = PNormResult(
                value=value, method="power_method", iterations=iters,
                residual=change, witness=witness, trace=trace, candidate=name,
            )
    logger.debug(
        "norm_p(p=%s): %.12g from start '%s' after %d iterations",
        exps.label(), best.value, best.candidate, best.iterations,
    )
    return best


# -------------------------------
# Kronecker products
# -------------------------------
@lru_cache(maxsize=65536)
def _unit_upper_norm(a: float, p: float):
    """
    ‖[[1, a], [0, 1]]‖_p and its maximising direction (cos θ, sin θ).
    Closed forms at p in {1, 2, inf}; a bounded Brent search over θ otherwise.
    """
    if p == 1.0 or math.isinf(p):
        direction = (0.0, 1.0) if p == 1.0 else (1.0, 1.0)
        return 1.0 + a, direction
    if p == 2.0:
        sigma = (a + math.sqrt(a * a + 4.0)) / 2.0
        # right singular vector of [[1, a], [0, 1]] for sigma
        v = np.array([a, sigma * sigma - 1.0]) if a > 0 else np.array([1.0, 0.0])
        v = v / np.linalg.norm(v)
        return sigma, (float(v[0]), float(v[1]))

    def neg_log_ratio(theta):
        x, y = math.cos(theta), math.sin(theta)
        num = pnorm(np.array([x + a * y, y]), p)
        return -(math.log(num) - math.log(pnorm(np.array([x, y]), p)))

    found = minimize_scalar(neg_log_ratio, bounds=(0.0, math.pi / 2), method="bounded", options={"xatol": 1e-12})
    candidates = [(found.x, -found.fun), (0.0, 0.0), (math.pi / 2, -neg_log_ratio(math.pi / 2))]
    theta, log_value = max(candidates, key=lambda t: t[1])
    return math.exp(log_value), (math.cos(theta), math.sin(theta))


def norm_p_kronecker(op: EmbeddingOperator, exps: ExponentPair) -> PNormResult:
    """Π_j ‖[[1, γ_j m], [0, 1]]‖_p, in O(s)."""
    if not isinstance(op, KroneckerOperator):
        raise InputError(f"norm_p_kronecker needs Kronecker factors, got {op.kind}")
    log_value = 0.0
    directions = np.zeros((op.s, 2))
    for j, f in enumerate(op.factors):
        value, direction = _unit_upper_norm(float(f[0, 1]), exps.p)
        log_value += math.log(value)
        directions[j] = direction
    witness = None
    if op.s <= MAX_ORACLE_DIM:
        witness = np.array([1.0])
        for d in directions:
            witness = np.kron(d, witness)
    return PNormResult(value=math.exp(log_value), method="kronecker", witness=witness, factor_witnesses=directions)


# -------------------------------
# Oracle
# -------------------------------
def _simplex_grid(n: int, resolution: int) -> np.ndarray:
    """Integer points with n coordinates summing to resolution."""
    if n == 1:
        return np.array([[resolution]], dtype=float)
    pts = [
        np.concatenate(([first], rest))
        for first in range(resolution + 1)
        for rest in _simplex_grid(n - 1, resolution - first)
    ]
    return np.array(pts, dtype=float)


def brute_force_norm_p(a, exps: ExponentPair, seed: int = 0, samples: int = 4000) -> float:
    """
    Test oracle: best ratio over a grid of nonnegative directions (exhaustive
    simplex grid for n <= 3, seeded random directions above), refined by
    coordinate ascent with bounded scalar searches.
    """
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    if n > MAX_ORACLE_DIM:
        raise CapacityError(f"oracle dimension {n} exceeds {MAX_ORACLE_DIM}")
    p = exps.p

    def f(c):
        d = pnorm(c, p)
        return pnorm(a @ c, p) / d if d > 0 else 0.0

    if n <= 3:
        grid = _simplex_grid(n, 60 if n == 3 else 400)
    else:
        rng = np.random.default_rng(seed)
        grid = rng.dirichlet(np.ones(n), size=samples)
    grid = np.vstack([grid, np.eye(n), np.ones((1, n))])
    scores = np.array([f(c) for c in grid])
    best = float(scores.max())

    for idx in np.argsort(scores)[::-1][:8]:
        c = grid[idx].copy()
        current = f(c)
        for _ in range(200):
            before = current
            for i in range(n):
                hi = 4.0 * max(float(c.max()), 1e-3)

                def neg(t, i=i):
                    trial = c.copy()
                    trial[i] = t
                    return -f(trial)

                found = minimize_scalar(neg, bounds=(0.0, hi), method="bounded", options={"xatol": 1e-12})
                if -found.fun > current:
                    c[i] = found.x
                    current = -found.fun
            if current - before <= 1e-13 * current:
                break
        best = max(best, current)
    return best
