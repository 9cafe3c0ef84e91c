"""
Exact norms, lower bounds and upper bounds of the anchored -> ANOVA
embedding, and the assembly of a BoundReport for one (scheme, s, p).
"""
import logging
import math
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy.special import gammaln, logsumexp

from .config import MAX_ENDPOINT_DIM, REPORT_SLACK
from .embedding_operator import (
    ActiveSetOperator,
    CardinalityOperator,
    DenseOperator,
    EmbeddingOperator,
    ExponentPair,
    KroneckerOperator,
    build_operator,
    log_binomial,
)
from .errors import CapacityError, DomainError, InputError, InvariantBreach
from .matrix_pnorm import norm_p
from .schemas import BoundReport, PNormResult, SolverSettings
from .subset_lattice import (
    cardinality,
    diameter,
    format_mask,
    mask_from_coordinates,
    weighted_diameter_sum,
)
from .weights import (
    FiniteDiameterWeights,
    FiniteOrderWeights,
    PODWeights,
    ProductWeights,
    WeightScheme,
)

logger = logging.getLogger(__name__)

LOG2 = math.log(2.0)
FDW_CONFIRM_DIM = 12
LOG_OVERFLOW = 700.0


# -------------------------------
# Subset-lattice transforms over all 2^s masks
# -------------------------------
def _lattice_transform(values: np.ndarray, s: int, combine, upward: bool) -> np.ndarray:
    """
    upward=False: out[u] = combine over v ⊆ u of values[v]
    upward=True:  out[v] = combine over u ⊇ v of values[u]
    """
    out = np.array(values, dtype=float)
    for b in range(s):
        view = out.reshape(-1, 2, 1 << b)
        if upward:
            view[:, 0, :] = combine(view[:, 0, :], view[:, 1, :])
        else:
            view[:, 1, :] = combine(view[:, 1, :], view[:, 0, :])
    return out


def _popcounts(s: int) -> np.ndarray:
    pc = np.zeros(1, dtype=np.int64)
    for _ in range(s):
        pc = np.concatenate((pc, pc + 1))
    return pc


def _doubling_sum(terms: Sequence[float]) -> np.ndarray:
    """out[u] = Σ_{j∈u} terms[j-1] for every mask u."""
    out = np.zeros(1)
    for t in terms:
        out = np.concatenate((out, out + t))
    return out


def dense_log_weights(scheme: WeightScheme, s: int) -> np.ndarray:
    """log γ_u for all 2^s masks; -inf outside the support."""
    scheme.check_dimension(s)
    if s > MAX_ENDPOINT_DIM:
        raise CapacityError(f"subset enumeration at s={s} exceeds the cap s <= {MAX_ENDPOINT_DIM}")
    if isinstance(scheme, ProductWeights):
        return _doubling_sum([math.log(g) for g in scheme.factors(s)])
    pc = _popcounts(s)
    if isinstance(scheme, PODWeights):
        per_coord = [math.log(scheme.c) - scheme.beta2 * math.log(j) for j in range(1, s + 1)]
        return _doubling_sum(per_coord) + scheme.beta1 * gammaln(pc + 1)
    if isinstance(scheme, FiniteOrderWeights):
        return np.where(pc <= scheme.q, pc * math.log(scheme.omega), -np.inf)
    out = np.full(1 << s, -np.inf)
    for u in scheme.active_sets(s):
        out[u] = scheme.log_weight(u)
    return out


# -------------------------------
# Exact norms at the endpoints
# -------------------------------
def exact_norm_p1(scheme: WeightScheme, s: int, by_enumeration: bool = False) -> float:
    """
    max_{u∈U} Σ_{v⊆u} γ_u/γ_v. Closed forms for product, finite-order and
    finite-diameter weights; subset-sum enumeration otherwise (or when
    by_enumeration is set).
    """
    scheme.check_dimension(s)
    if not by_enumeration:
        if isinstance(scheme, ProductWeights):
            return float(np.exp(np.sum(np.log1p(scheme.factors(s)))))
        if isinstance(scheme, FiniteOrderWeights):
            return (1.0 + scheme.omega) ** min(scheme.q, s)
        if isinstance(scheme, FiniteDiameterWeights):
            return (1.0 + scheme.omega) ** min(scheme.q + 1, s)
    log_w = dense_log_weights(scheme, s)
    active = np.isfinite(log_w)
    inner = _lattice_transform(np.where(active, -log_w, -np.inf), s, np.logaddexp, upward=False)
    return float(np.exp((log_w + inner)[active].max()))


@lru_cache(maxsize=256)
def _confirm_fdw_empty_row(omega: float, q: int, s: int) -> None:
    scheme = FiniteDiameterWeights(omega=omega, q=q)
    rows = _pinf_rows(scheme, s)
    if int(np.argmax(rows)) != 0 and rows.max() > rows[0] * (1 + 1e-12):
        raise InvariantBreach(
            f"finite-diameter row sum at p=inf is maximal at {format_mask(int(np.argmax(rows)))}, not the empty set"
        )


def _pinf_rows(scheme: WeightScheme, s: int) -> np.ndarray:
    log_w = dense_log_weights(scheme, s)
    active = np.isfinite(log_w)
    pc = _popcounts(s)
    outer = _lattice_transform(log_w - pc * LOG2, s, np.logaddexp, upward=True)
    rows = np.zeros(log_w.size)
    rows[active] = np.exp(outer[active] + pc[active] * LOG2 - log_w[active])
    return rows


def exact_norm_pinf(scheme: WeightScheme, s: int, by_enumeration: bool = False) -> float:
    """max_{v∈U} Σ_{u⊇v, u∈U} γ_u / (2^{|u\\v|} γ_v)."""
    scheme.check_dimension(s)
    if not by_enumeration:
        if isinstance(scheme, ProductWeights):
            return float(np.exp(np.sum(np.log1p(np.asarray(scheme.factors(s)) / 2.0))))
        if isinstance(scheme, FiniteOrderWeights):
            top = min(scheme.q, s)
            half = math.log(scheme.omega / 2.0)
            rows = [
                logsumexp([log_binomial(s - j, k - j) + (k - j) * half for k in range(j, top + 1)])
                for j in range(top + 1)
            ]
            return float(np.exp(max(rows)))
        if isinstance(scheme, FiniteDiameterWeights):
            x = scheme.omega / 2.0
            value = 1.0 + s * x
            for ell in range(1, min(scheme.q, s - 1) + 1):
                value += weighted_diameter_sum(s, ell, x)
            check_q = min(scheme.q, FDW_CONFIRM_DIM - 1)
            _confirm_fdw_empty_row(scheme.omega, check_q, min(s, FDW_CONFIRM_DIM))
            return value
    return float(_pinf_rows(scheme, s).max())


# -------------------------------
# Lower bounds
# -------------------------------
def _indicator(index: Sequence[int], predicate) -> np.ndarray:
    return np.array([1.0 if predicate(u) else 0.0 for u in index])


def _structured_starts(scheme: WeightScheme, op: EmbeddingOperator, s: int, exps: ExponentPair) -> Dict[str, np.ndarray]:
    starts: Dict[str, np.ndarray] = {}
    if isinstance(op, CardinalityOperator):
        e = np.zeros(op.size)
        e[-1] = 1.0
        starts["top_cardinality"] = e
        return starts
    index = getattr(op, "index", ())
    if not index:
        return starts
    if isinstance(scheme, FiniteOrderWeights):
        top = min(scheme.q, s)
        starts["top_cardinality"] = _indicator(index, lambda u: cardinality(u) == top)
    elif isinstance(scheme, FiniteDiameterWeights):
        top = min(scheme.q, s - 1)
        starts["top_diameter"] = _indicator(index, lambda u: diameter(u) == top and u != 0)
        if not starts["top_diameter"].any():
            del starts["top_diameter"]
    elif isinstance(scheme, PODWeights):
        chains = {mask_from_coordinates(range(k, s + 1)) for k in range(1, s + 2)}
        starts["chains"] = _indicator(index, lambda u: u in chains)

    # single-set indicator of the column with the largest p-norm
    if isinstance(op, ActiveSetOperator):
        col = np.asarray(op.matrix.power(exps.p).sum(axis=0)).ravel()
    else:
        col = (op.to_dense() ** exps.p).sum(axis=0)
    e = np.zeros(op.size)
    e[int(np.argmax(col))] = 1.0
    starts["best_single_set"] = e
    return starts


def _class_bounds(scheme: WeightScheme, s: int, exps: ExponentPair) -> Dict[str, float]:
    """Closed-form lower bounds that hold for the scheme at (s, p)."""
    out: Dict[str, float] = {}
    if isinstance(scheme, FiniteOrderWeights) and scheme.q <= s:
        out["fow_explicit"] = fow_lower_bound_explicit(s, scheme.q, scheme.omega, exps)
    elif isinstance(scheme, FiniteDiameterWeights) and 1 <= scheme.q < s:
        out["fdw_explicit"] = fdw_lower_bound_explicit(s, scheme.q, scheme.omega, exps)
    elif isinstance(scheme, PODWeights):
        try:
            out["pod_chain"] = pod_chain_lower_bound(s, exps, scheme.c, scheme.beta1, scheme.beta2)
        except CapacityError:
            pass
    return out


def _endpoint_fallback(scheme: WeightScheme, s: int, exps: ExponentPair) -> float | None:
    if not exps.is_endpoint:
        return None
    try:
        return exact_norm_p1(scheme, s) if exps.p == 1.0 else exact_norm_pinf(scheme, s)
    except CapacityError:
        return None


def lower_bound_result(
    scheme: WeightScheme,
    s: int,
    exps: ExponentPair,
    settings: SolverSettings | None = None,
) -> Tuple[PNormResult, EmbeddingOperator | None]:
    """
    Induced p-norm of the embedding operator, raised to the simplified and
    class-specific closed-form bounds when one of those is larger. Schemes
    whose operator does not fit any representation fall back to the exact
    endpoint norms at p in {1, inf}, and POD to its closed-form candidates.
    """
    try:
        op = build_operator(scheme, s, exps)
    except CapacityError as e:
        exact = _endpoint_fallback(scheme, s, exps)
        if exact is not None:
            logger.info("s=%d: %s; using the exact endpoint norm", s, e.detail)
            return PNormResult(value=exact, method="closed_form", candidate="exact_endpoint"), None
        if not isinstance(scheme, PODWeights):
            raise
        logger.info("s=%d: %s; using closed-form POD bounds", s, e.detail)
        op = None

    if op is not None:
        skip = isinstance(op, KroneckerOperator) or exps.is_endpoint
        starts = {} if skip else _structured_starts(scheme, op, s, exps)
        result = norm_p(op, exps, starts=starts, settings=settings)
        if not result.candidate:
            result = result.model_copy(update={"candidate": result.method})
    else:
        result = PNormResult(value=0.0, method="closed_form")

    extra = dict(_class_bounds(scheme, s, exps))
    try:
        extra["simple"] = lower_bound_simple(scheme, s, exps)
    except CapacityError:
        pass
    for name, value in extra.items():
        if value > result.value:
            logger.debug("s=%d p=%s: closed form '%s' beats the iteration", s, exps.label(), name)
            result = PNormResult(value=value, method="closed_form", candidate=name)
    if result.value <= 0.0:
        raise CapacityError(f"no lower bound is computable for {scheme.describe()} at s={s}")
    return result, op


def lower_bound(scheme: WeightScheme, s: int, exps: ExponentPair, settings: SolverSettings | None = None) -> float:
    return lower_bound_result(scheme, s, exps, settings)[0].value


def _lower_lower_enumerated(scheme: WeightScheme, s: int, exps: ExponentPair) -> float:
    log_w = dense_log_weights(scheme, s)
    pc = _popcounts(s)
    scaled = np.where(np.isfinite(log_w), log_w + pc * math.log(exps.m), -np.inf)
    if math.isinf(exps.p):
        inner = _lattice_transform(np.where(np.isfinite(scaled), -scaled, -np.inf), s, np.maximum, upward=False)
        best = np.where(np.isfinite(log_w), scaled + inner, -np.inf).max()
        return float(np.exp(best))
    p = exps.p
    inner = _lattice_transform(np.where(np.isfinite(scaled), -p * scaled, -np.inf), s, np.logaddexp, upward=False)
    best = np.where(np.isfinite(log_w), p * scaled + inner, -np.inf).max()
    return float(np.exp(best / p))


def lower_bound_simple(scheme: WeightScheme, s: int, exps: ExponentPair) -> float:
    """
    max_{u∈U} (Σ_{v⊆u} γ_u^p m^{p|u\\v|} / γ_v^p)^{1/p}: the best
    single-set witness. Structured schemes take the maximising u in closed
    form; POD beyond the enumeration cap uses u = [s].
    """
    scheme.check_dimension(s)
    p, m = exps.p, exps.m
    if isinstance(scheme, ProductWeights):
        g = np.asarray(scheme.factors(s)) * m
        if math.isinf(p):
            return float(np.prod(np.maximum(1.0, g)))
        return float(np.exp(np.sum(np.log1p(g ** p)) / p))
    if isinstance(scheme, (FiniteOrderWeights, FiniteDiameterWeights)):
        size = min(scheme.q, s) if isinstance(scheme, FiniteOrderWeights) else min(scheme.q + 1, s)
        om = scheme.omega * m
        if math.isinf(p):
            return max(1.0, om) ** size
        return (1.0 + om ** p) ** (size / p)
    if isinstance(scheme, PODWeights) and s > MAX_ENDPOINT_DIM:
        return pod_column_lower_bound(s, exps, scheme.c, scheme.beta1, scheme.beta2)
    return _lower_lower_enumerated(scheme, s, exps)


# -------------------------------
# Upper bound
# -------------------------------
def upper_bound_interpolation(scheme: WeightScheme, s: int, exps: ExponentPair) -> float:
    """‖ι‖_p <= ‖ι‖_1^{1/p} ‖ι‖_∞^{1/p*}."""
    if exps.p == 1.0:
        return exact_norm_p1(scheme, s)
    if math.isinf(exps.p):
        return exact_norm_pinf(scheme, s)
    log_value = exps.inv_p * math.log(exact_norm_p1(scheme, s)) + exps.inv_p_star * math.log(
        exact_norm_pinf(scheme, s)
    )
    return math.exp(log_value)


# -------------------------------
# Product weights
# -------------------------------
def _gammas(gammas) -> np.ndarray:
    if isinstance(gammas, ProductWeights):
        gammas = gammas.gammas
    g = np.asarray(gammas, dtype=float)
    if g.ndim != 1 or np.any(g < 0):
        raise InputError("gammas must be a sequence of nonnegative reals")
    return g


def exact_norm_p2_product(gammas) -> float:
    """Π_j (1 + (γ_j/√3)(√(1+γ_j²/12) + γ_j³/√12))^{1/2}, as printed in the literature."""
    g = _gammas(gammas)
    factors = 1.0 + g / math.sqrt(3.0) * (np.sqrt(1.0 + g ** 2 / 12.0) + g ** 3 / math.sqrt(12.0))
    return float(np.exp(0.5 * np.sum(np.log(factors))))


def exact_norm_p2_product_corrected(gammas) -> float:
    """
    Same product with γ_j/√12 in the last term; each factor is then the
    squared spectral norm of [[1, γ_j/√3], [0, 1]].
    """
    g = _gammas(gammas)
    factors = 1.0 + g / math.sqrt(3.0) * (np.sqrt(1.0 + g ** 2 / 12.0) + g / math.sqrt(12.0))
    return float(np.exp(0.5 * np.sum(np.log(factors))))


def _interior(exps: ExponentPair, what: str) -> None:
    if exps.is_endpoint:
        raise DomainError(f"{what} needs 1 < p < inf; use the exact endpoint norms at p={exps.label()}")


def product_lower_bound(gammas, exps: ExponentPair) -> float:
    """Π_j (1 + γ_j ((p-1)/(p*+1))^{1/p*})^{1/p}."""
    _interior(exps, "product_lower_bound")
    g = _gammas(gammas)
    k = ((exps.p - 1.0) / (exps.p_star + 1.0)) ** exps.inv_p_star
    return float(np.exp(np.sum(np.log1p(g * k)) / exps.p))


def factor_lower_bound_product(gammas, exps: ExponentPair) -> float:
    """
    Π_j (1 + ((1 + c γ_j m)^p - 1)/(1 + c^p))^{1/p} at the fixed choice
    c = (p-1)^{-1/p}, before linearising (1 + x)^p.
    """
    _interior(exps, "factor_lower_bound_product")
    g = _gammas(gammas)
    p = exps.p
    c = (p - 1.0) ** (-1.0 / p)
    factors = 1.0 + np.expm1(p * np.log1p(c * g * exps.m)) / (1.0 + c ** p)
    return float(np.exp(np.sum(np.log(factors)) / p))


# -------------------------------
# Finite order weights
# -------------------------------
def _check_order(s: int, q: int, omega: float) -> None:
    if s < 1 or q < 1 or omega <= 0:
        raise DomainError(f"need s >= 1, q >= 1 and omega > 0, got s={s}, q={q}, omega={omega}")


def fow_lower_bound_explicit(s: int, q: int, omega: float, exps: ExponentPair) -> float:
    """m^q ω^q C(s,q)^{1-1/p}, from the indicator of {|u| = q}."""
    _check_order(s, q, omega)
    if q > s:
        raise DomainError(f"q={q} exceeds s={s}")
    log_value = q * (math.log(exps.m) + math.log(omega)) + log_binomial(s, q) * exps.inv_p_star
    return math.exp(log_value)


def fow_lower_bound_asymptotic(s: int, q: int, omega: float, exps: ExponentPair) -> float:
    """m^q ω^q (s-q)^{q(1-1/p)} / (q!)^{1-1/p}."""
    _check_order(s, q, omega)
    if q > s:
        raise DomainError(f"q={q} exceeds s={s}")
    if s == q:
        return 0.0
    log_value = q * (math.log(exps.m) + math.log(omega)) + exps.inv_p_star * (
        q * math.log(s - q) - math.lgamma(q + 1)
    )
    return math.exp(log_value)


# -------------------------------
# Finite diameter weights
# -------------------------------
def fdw_lower_bound_explicit(s: int, q: int, omega: float, exps: ExponentPair) -> float:
    """ω^q m² ((1+m)/2^{1/p})^{q-1} (s-q)^{1/p*}, from the indicator of {diam(u) = q}."""
    _check_order(s, q, omega)
    if q >= s:
        raise DomainError(f"need 1 <= q < s, got q={q}, s={s}")
    m = exps.m
    log_value = (
        q * math.log(omega)
        + 2 * math.log(m)
        + (q - 1) * (math.log1p(m) - exps.inv_p * LOG2)
        + exps.inv_p_star * math.log(s - q)
    )
    return math.exp(log_value)


# -------------------------------
# POD weights
# -------------------------------
def _check_pod(c: float, beta1: float, beta2: float) -> None:
    if c <= 0 or not 0 < beta1 < beta2:
        raise DomainError(f"POD weights need c > 0 and 0 < beta1 < beta2, got c={c}, beta1={beta1}, beta2={beta2}")


def _finish_log(log_value: float, log_scale: bool, what: str) -> float:
    if log_scale:
        return log_value
    if log_value > LOG_OVERFLOW:
        raise CapacityError(f"{what} overflows a double (log value {log_value:.6g}); request log_scale")
    return math.exp(log_value)


def pod_chain_lower_bound(
    s: int, exps: ExponentPair, c: float, beta1: float, beta2: float, log_scale: bool = False
) -> float:
    """
    (Σ_{k=1}^s (s!/(s-k+1)!)^{pβ1} (c m)^{p(k-1)} ((k-1)!)^{-pβ2})^{1/p}:
    the simplified bound at u = [s] restricted to the chains v = {k, ..., s}.
    Returns the natural log of the value when log_scale is set.
    """
    _check_pod(c, beta1, beta2)
    if s < 1:
        raise DomainError(f"dimension must be positive, got {s}")
    k = np.arange(1, s + 1)
    log_terms = (
        beta1 * (gammaln(s + 1) - gammaln(s - k + 2))
        + (k - 1) * (math.log(c) + math.log(exps.m))
        - beta2 * gammaln(k)
    )
    if math.isinf(exps.p):
        log_value = float(log_terms.max())
    else:
        log_value = float(logsumexp(exps.p * log_terms)) / exps.p
    return _finish_log(log_value, log_scale, "POD chain bound")


def _log_elementary_symmetric(log_x: np.ndarray) -> np.ndarray:
    """log e_r(x) for r = 0..n, by the running product Π(1 + x_j t)."""
    e = np.full(log_x.size + 1, -np.inf)
    e[0] = 0.0
    for i, lx in enumerate(log_x, start=1):
        e[1:i + 1] = np.logaddexp(e[1:i + 1], e[0:i] + lx)
    return e


def pod_column_lower_bound(
    s: int, exps: ExponentPair, c: float, beta1: float, beta2: float, log_scale: bool = False
) -> float:
    """
    The simplified bound at u = [s] summed over every v ⊆ [s]:
    Σ_k (s!/k!)^{pβ1} m^{p(s-k)} e_{s-k}((c/j^{β2})^p), grouped by |v| = k.
    """
    _check_pod(c, beta1, beta2)
    if s < 1:
        raise DomainError(f"dimension must be positive, got {s}")
    log_a = math.log(c) - beta2 * np.log(np.arange(1, s + 1))
    k = np.arange(s + 1)
    r = s - k
    base = beta1 * (gammaln(s + 1) - gammaln(k + 1)) + r * math.log(exps.m)
    if math.isinf(exps.p):
        # largest product over r removed coordinates takes the r smallest indices
        best_removed = np.concatenate(([0.0], np.cumsum(np.sort(log_a)[::-1])))
        log_value = float((base + best_removed[r]).max())
    else:
        p = exps.p
        log_e = _log_elementary_symmetric(p * log_a)
        log_value = float(logsumexp(p * base + log_e[r])) / p
    return _finish_log(log_value, log_scale, "POD column bound")


def pod_tau_lower_bound(s: int, tau: float, exps: ExponentPair, c: float, beta1: float, beta2: float) -> float:
    """a_τ (s+1-k')^τ with k' = ⌈τ/β1⌉ and a_τ = (c m)^{k'} / (k'!)^{β2}; needs s >= k' + 3."""
    _check_pod(c, beta1, beta2)
    if tau <= 0:
        raise DomainError(f"tau must be positive, got {tau}")
    k = math.ceil(tau / beta1)
    if s < k + 3:
        raise InputError(f"the single-term POD bound for tau={tau} needs s >= {k + 3}, got s={s}")
    log_a = k * (math.log(c) + math.log(exps.m)) - beta2 * math.lgamma(k + 1)
    return math.exp(log_a + tau * math.log(s + 1 - k))


# -------------------------------
# Growth rates
# -------------------------------
def _log_pairs(pairs: Sequence[Tuple[float, float]], offset: float = 0.0) -> Tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(pairs, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise InputError("growth fits need a sequence of (s, value) pairs")
    x = arr[:, 0] - offset
    if np.any(arr[:, 1] <= 0) or np.any(x <= 0):
        raise DomainError("growth fits need positive values and s > offset")
    return np.log(x), np.log(arr[:, 1])


def fit_growth_rate(pairs: Sequence[Tuple[float, float]], offset: float = 0.0) -> float:
    """Least-squares slope of log(value) against log(s - offset) over the last half of the points."""
    if len(pairs) < 5:
        raise InputError(f"growth fits need at least 5 points, got {len(pairs)}")
    x, y = _log_pairs(pairs, offset)
    half = len(x) // 2
    slope, _ = np.polyfit(x[half:], y[half:], 1)
    return float(slope)


def local_slopes(pairs: Sequence[Tuple[float, float]], offset: float = 0.0) -> List[float]:
    x, y = _log_pairs(pairs, offset)
    return [float(v) for v in np.diff(y) / np.diff(x)]


def classify_growth(pairs: Sequence[Tuple[float, float]], offset: float = 0.0) -> str:
    """'bounded', 'polynomial' or 'superpolynomial' from the local log-log slopes."""
    slopes = local_slopes(pairs, offset)
    if not slopes:
        raise InputError("growth classification needs at least two points")
    tail = slopes[-2:]
    if max(abs(v) for v in tail) < 0.05:
        return "bounded"
    rising = all(b >= a - 1e-9 for a, b in zip(slopes, slopes[1:]))
    if len(slopes) >= 3 and rising and slopes[-1] > slopes[0] + 0.25:
        return "superpolynomial"
    return "polynomial"


# -------------------------------
# Reports
# -------------------------------
def _exact(scheme: WeightScheme, s: int, exps: ExponentPair) -> float | None:
    try:
        if exps.p == 1.0:
            return exact_norm_p1(scheme, s)
        if math.isinf(exps.p):
            return exact_norm_pinf(scheme, s)
        if exps.p == 2.0 and isinstance(scheme, ProductWeights):
            return exact_norm_p2_product_corrected(scheme.factors(s))
    except CapacityError as e:
        logger.info("s=%d: no exact value (%s)", s, e.detail)
    return None


def summarize_witness(result: PNormResult, op: EmbeddingOperator | None, top: int = 3) -> str:
    if isinstance(op, KroneckerOperator) and result.factor_witnesses is not None:
        fw = result.factor_witnesses
        return f"factor directions, first=({fw[0, 0]:.6g},{fw[0, 1]:.6g})"
    if result.witness is None or op is None:
        return result.candidate
    w = np.asarray(result.witness)
    order = np.argsort(-w, kind="stable")[:top]
    if isinstance(op, CardinalityOperator):
        shown = ",".join(f"|u|={int(op.index[i])}" for i in order if w[i] > 0)
    elif isinstance(op, (DenseOperator, ActiveSetOperator)) and op.index:
        shown = ";".join(format_mask(op.index[i]) for i in order if w[i] > 0)
    else:
        shown = ",".join(str(int(i)) for i in order if w[i] > 0)
    return f"support={int(np.count_nonzero(w))} top={shown}"


def _ordered(low: float | None, high: float | None) -> bool:
    if low is None or high is None:
        return True
    return low <= high * (1.0 + REPORT_SLACK) + REPORT_SLACK


def check_report(report: BoundReport) -> BoundReport:
    """Raise InvariantBreach unless simple <= lower <= exact <= upper (relative slack)."""
    pairs = [
        ("lower_bound_simple", report.lower_bound_simple, "lower_bound", report.lower_bound),
        ("lower_bound", report.lower_bound, "exact", report.exact),
        ("exact", report.exact, "upper_bound", report.upper_bound),
        ("lower_bound", report.lower_bound, "upper_bound", report.upper_bound),
    ]
    for low_name, low, high_name, high in pairs:
        if not _ordered(low, high):
            raise InvariantBreach(
                f"{report.scheme} s={report.s} p={report.p_label()}: {low_name}={low!r} exceeds {high_name}={high!r}"
            )
    return report


def build_report(
    scheme: WeightScheme,
    s: int,
    exps: ExponentPair,
    settings: SolverSettings | None = None,
) -> BoundReport:
    result, op = lower_bound_result(scheme, s, exps, settings)
    try:
        simple = lower_bound_simple(scheme, s, exps)
    except CapacityError:
        simple = result.value
    try:
        upper = upper_bound_interpolation(scheme, s, exps)
    except CapacityError as e:
        logger.info("s=%d: no upper bound (%s)", s, e.detail)
        upper = None

    report = BoundReport(
        scheme=scheme.describe(),
        s=s,
        p=exps.p,
        lower_bound=result.value,
        lower_bound_simple=simple,
        exact=_exact(scheme, s, exps),
        upper_bound=upper,
        method=result.method,
        iterations=result.iterations,
        residual=result.residual,
        candidate=result.candidate,
        witness_summary=summarize_witness(result, op),
    )
    logger.debug("report %s", report.model_dump())
    return check_report(report)
