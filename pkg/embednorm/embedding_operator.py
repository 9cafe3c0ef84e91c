"""
The nonnegative coefficient operator behind the lower bound

    (Ac)_v = γ_v^{-1} Σ_{u ⊇ v, u ∈ U} c_u γ_u m^{|u \\ v|},

so the lower bound is the induced p-norm ‖A‖_p. Four representations:
dense (small supports), Kronecker factors (product weights), sparse
active-set adjacency (finite order / finite diameter supports) and the
cardinality-class reduction of finite-order weights.
"""
import logging
import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Dict, List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import sparse
from scipy.special import gammaln

from .config import MAX_DENSE_SETS, MAX_SPARSE_ENTRIES
from .errors import CapacityError, DomainError, InputError
from .subset_lattice import SubsetMask, cardinality, count_by_diameter, submasks
from .weights import (
    FiniteDiameterWeights,
    FiniteOrderWeights,
    PODWeights,
    ProductWeights,
    WeightScheme,
)

logger = logging.getLogger(__name__)

# |log γ_u| above this switches entry evaluation to log-space
LOG_WEIGHT_SWITCH = 300.0
P_CLAMP = 1e-12


# -------------------------------
# Exponents
# -------------------------------
class ExponentPair(BaseModel):
    """p, its conjugate p* and m = (p* + 1)^(-1/p*), with m = 1 at p* = ∞."""

    model_config = ConfigDict(frozen=True)

    p: float
    p_star: float
    m: float

    @classmethod
    def from_p(cls, p: float) -> "ExponentPair":
        p = float(p)
        if math.isnan(p) or p < 1.0:
            raise DomainError(f"exponent p must lie in [1, inf], got {p}")
        if p < 1.0 + P_CLAMP:
            p = 1.0
        if p == 1.0:
            return cls(p=1.0, p_star=math.inf, m=1.0)
        if math.isinf(p):
            return cls(p=math.inf, p_star=1.0, m=0.5)
        p_star = p / (p - 1.0)
        return cls(p=p, p_star=p_star, m=(p_star + 1.0) ** (-1.0 / p_star))

    @property
    def inv_p(self) -> float:
        return 0.0 if math.isinf(self.p) else 1.0 / self.p

    @property
    def inv_p_star(self) -> float:
        return 0.0 if math.isinf(self.p_star) else 1.0 / self.p_star

    @property
    def is_endpoint(self) -> bool:
        return self.p == 1.0 or math.isinf(self.p)

    def label(self) -> str:
        return "inf" if math.isinf(self.p) else f"{self.p:g}"


# -------------------------------
# Representations
# -------------------------------
@dataclass(frozen=True, eq=False)
class EmbeddingOperator:
    exps: ExponentPair

    kind = "abstract"

    @property
    def size(self) -> int:
        raise NotImplementedError

    def apply(self, c: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def apply_transpose(self, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def to_dense(self) -> np.ndarray:
        raise NotImplementedError

    def column_sums(self) -> np.ndarray:
        return self.apply_transpose(np.ones(self.size))

    def row_sums(self) -> np.ndarray:
        return self.apply(np.ones(self.size))

    def min_entry(self) -> float:
        return float(self.to_dense().min()) if self.size else 0.0

    def _check(self, c: np.ndarray) -> np.ndarray:
        c = np.asarray(c, dtype=float)
        if c.shape != (self.size,):
            raise InputError(f"coefficient vector of shape {c.shape} does not match operator size {self.size}")
        return c


@dataclass(frozen=True, eq=False)
class DenseOperator(EmbeddingOperator):
    matrix: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    index: Tuple[int, ...] = ()

    kind = "dense"

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def apply(self, c):
        return self.matrix @ self._check(c)

    def apply_transpose(self, y):
        return self.matrix.T @ self._check(y)

    def to_dense(self):
        return self.matrix

    def min_entry(self):
        return float(self.matrix.min()) if self.size else 0.0


@dataclass(frozen=True, eq=False)
class CardinalityOperator(DenseOperator):
    """
    Finite-order operator restricted to coefficients constant on each
    cardinality class, rescaled so its induced p-norm is the lifted ratio.
    index holds cardinalities 0..q'.
    """

    s: int = 0
    log_class_sizes: Tuple[float, ...] = ()

    kind = "cardinality"

    def lift(self, b: np.ndarray, masks: Sequence[SubsetMask]) -> np.ndarray:
        """Coefficients c_u = b_|u| / C(s,|u|)^(1/p) on the given masks."""
        b = self._check(b)
        scale = np.exp(-np.asarray(self.log_class_sizes) * self.exps.inv_p)
        return np.array([b[cardinality(u)] * scale[cardinality(u)] for u in masks])


@dataclass(frozen=True, eq=False)
class ActiveSetOperator(EmbeddingOperator):
    """
    Sparse row-major form: rows[v] lists (u, entry, |u \\ v|) for every
    active superset u of v; matrix is the same data in CSR for products.
    """

    matrix: sparse.csr_matrix = None
    index: Tuple[int, ...] = ()
    rows: Dict[int, List[Tuple[int, float, int]]] = field(default_factory=dict)

    kind = "active_set"

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def apply(self, c):
        return self.matrix @ self._check(c)

    def apply_transpose(self, y):
        return self.matrix.T @ self._check(y)

    def to_dense(self):
        return self.matrix.toarray()

    def min_entry(self):
        return float(self.matrix.data.min()) if self.matrix.nnz else 0.0


@dataclass(frozen=True, eq=False)
class KroneckerOperator(EmbeddingOperator):
    """
    factors[j] is [[1, γ_{j+1} m], [0, 1]]. Per coordinate index 0 means
    "j not in set"; the global index is the bitmask with coordinate 1 as
    the least significant bit.
    """

    factors: np.ndarray = field(default_factory=lambda: np.zeros((0, 2, 2)))

    kind = "kronecker"

    @property
    def s(self) -> int:
        return self.factors.shape[0]

    @property
    def size(self) -> int:
        return 1 << self.s

    def _contract(self, c: np.ndarray, transpose: bool) -> np.ndarray:
        s = self.s
        t = self._check(c).reshape((2,) * s)
        for j in range(s):
            f = self.factors[j].T if transpose else self.factors[j]
            axis = s - 1 - j
            t = np.moveaxis(np.tensordot(f, t, axes=([1], [axis])), 0, axis)
        return t.reshape(-1)

    def apply(self, c):
        return self._contract(c, transpose=False)

    def apply_transpose(self, y):
        return self._contract(y, transpose=True)

    def to_dense(self):
        if self.s > 12:
            raise CapacityError(f"refusing to expand a 2^{self.s} x 2^{self.s} Kronecker product")
        return reduce(np.kron, list(self.factors[::-1]))

    def min_entry(self):
        return float(self.factors.min())


# -------------------------------
# Builders
# -------------------------------
def _log_entries(log_w: np.ndarray) -> bool:
    finite = log_w[np.isfinite(log_w)]
    return bool(finite.size) and float(np.abs(finite).max()) > LOG_WEIGHT_SWITCH


def _superset_entries(scheme: WeightScheme, masks: List[SubsetMask], exps: ExponentPair):
    """Yield (row, column, entry, |u \\ v|) for every active pair v ⊆ u."""
    position = {u: i for i, u in enumerate(masks)}
    log_w = scheme.log_weights(masks)
    use_logs = _log_entries(log_w)
    weights = None if use_logs else np.array([scheme.weight(u) for u in masks])
    log_m = math.log(exps.m)

    for j, u in enumerate(masks):
        for v in submasks(u):
            i = position.get(v)
            if i is None:
                raise InputError("weight support is not downward closed")
            diff = cardinality(u) - cardinality(v)
            if use_logs:
                entry = math.exp(log_w[j] - log_w[i] + diff * log_m)
            else:
                entry = weights[j] / weights[i] * exps.m ** diff
            yield i, j, entry, diff


def build_dense(scheme: WeightScheme, s: int, exps: ExponentPair) -> DenseOperator:
    scheme.check_dimension(s)
    count = support_size(scheme, s)
    if count > MAX_DENSE_SETS:
        raise CapacityError(
            f"{count} active sets exceed the dense cap of {MAX_DENSE_SETS}; "
            "use the active-set or Kronecker representation"
        )
    masks = scheme.active_sets(s)
    a = np.zeros((len(masks), len(masks)))
    for i, j, entry, _ in _superset_entries(scheme, masks, exps):
        a[i, j] = entry
    return DenseOperator(exps=exps, matrix=a, index=tuple(masks))


def build_active_set(scheme: WeightScheme, s: int, exps: ExponentPair) -> ActiveSetOperator:
    scheme.check_dimension(s)
    if isinstance(scheme, (ProductWeights, PODWeights)) and 3 ** s > MAX_SPARSE_ENTRIES:
        raise CapacityError(f"3^{s} operator entries exceed the sparse cap of {MAX_SPARSE_ENTRIES}")
    masks = scheme.active_sets(s)
    entries = sum(1 << cardinality(u) for u in masks)
    if entries > MAX_SPARSE_ENTRIES:
        raise CapacityError(f"{entries} operator entries exceed the sparse cap of {MAX_SPARSE_ENTRIES}")
    rows_i, cols_j, data = [], [], []
    adjacency: Dict[int, List[Tuple[int, float, int]]] = {}
    for i, j, entry, diff in _superset_entries(scheme, masks, exps):
        rows_i.append(i)
        cols_j.append(j)
        data.append(entry)
        adjacency.setdefault(masks[i], []).append((masks[j], entry, diff))
    n = len(masks)
    matrix = sparse.coo_matrix((data, (rows_i, cols_j)), shape=(n, n)).tocsr()
    logger.debug("active-set operator: %d sets, %d entries", n, matrix.nnz)
    return ActiveSetOperator(exps=exps, matrix=matrix, index=tuple(masks), rows=adjacency)


def kronecker_factors(gammas: Sequence[float] | WeightScheme, exps: ExponentPair, s: int | None = None) -> KroneckerOperator:
    if isinstance(gammas, WeightScheme):
        if not isinstance(gammas, ProductWeights):
            raise InputError(f"Kronecker factors exist for product weights only, got {gammas.describe()}")
        gammas = gammas.factors(s if s is not None else len(gammas.gammas))
    g = np.asarray(gammas, dtype=float)
    if g.ndim != 1 or g.size == 0 or np.any(g <= 0):
        raise InputError("Kronecker factors need a nonempty sequence of positive gammas")
    factors = np.zeros((g.size, 2, 2))
    factors[:, 0, 0] = 1.0
    factors[:, 1, 1] = 1.0
    factors[:, 0, 1] = g * exps.m
    return KroneckerOperator(exps=exps, factors=factors)


def log_binomial(n: int, k: int) -> float:
    return float(gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1))


def build_cardinality(omega: float, q: int, s: int, exps: ExponentPair) -> CardinalityOperator:
    """
    M[j][k] = C(s,j)^(1/p) C(s-j,k-j) (ω m)^(k-j) / C(s,k)^(1/p) for j <= k <= min(q, s).
    """
    top = min(q, s)
    log_sizes = [log_binomial(s, k) for k in range(top + 1)]
    log_om = math.log(omega) + math.log(exps.m)
    a = np.zeros((top + 1, top + 1))
    for j in range(top + 1):
        for k in range(j, top + 1):
            a[j, k] = math.exp(
                (log_sizes[j] - log_sizes[k]) * exps.inv_p
                + log_binomial(s - j, k - j)
                + (k - j) * log_om
            )
    return CardinalityOperator(
        exps=exps, matrix=a, index=tuple(range(top + 1)), s=s, log_class_sizes=tuple(log_sizes)
    )


def support_size(scheme: WeightScheme, s: int) -> int:
    """|U| without materialising U where a count formula exists."""
    if isinstance(scheme, FiniteOrderWeights):
        return sum(math.comb(s, k) for k in range(min(scheme.q, s) + 1))
    if isinstance(scheme, FiniteDiameterWeights):
        return sum(count_by_diameter(s, ell) for ell in range(min(scheme.q, s - 1) + 1))
    if isinstance(scheme, (ProductWeights, PODWeights)):
        return 1 << s
    return len(scheme.active_sets(s))


def build_operator(scheme: WeightScheme, s: int, exps: ExponentPair) -> EmbeddingOperator:
    """Pick the representation that fits the scheme and the support size."""
    scheme.check_dimension(s)
    if isinstance(scheme, ProductWeights):
        return kronecker_factors(scheme, exps, s)
    small = support_size(scheme, s) <= MAX_DENSE_SETS
    if isinstance(scheme, FiniteOrderWeights):
        return build_dense(scheme, s, exps) if small else build_cardinality(scheme.omega, scheme.q, s, exps)
    return build_dense(scheme, s, exps) if small else build_active_set(scheme, s, exps)


def apply(op: EmbeddingOperator, c: np.ndarray) -> np.ndarray:
    return op.apply(c)
