"""
Function-space side of the lower bound, at small s.

For a nonnegative coefficient vector c the witness function is

    f(x) = Σ_u c_u γ_u Π_{j∈u} H(x_j),    H(x) = ∫_0^x h(t) dt,

with h the unit L_p function for which ∫ h(t)(1 - t) dt = m. Its anchored
norm is ‖c‖_p and its ANOVA norm is ‖Ac‖_p; the routines here evaluate
both by tensor Gauss-Legendre quadrature so the matrix form can be checked
against the definitions.
"""
import logging
import math
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .config import MAX_QUAD_DIM, QUAD_NODES, QUAD_PANEL_ORDER
from .embedding_operator import ExponentPair
from .errors import CapacityError, InputError, InvariantBreach, UnsupportedPathError
from .subset_lattice import SubsetMask, cardinality, coordinates
from .weights import WeightScheme

logger = logging.getLogger(__name__)

F_NORM_TOL = 1e-6


# -------------------------------
# Extremal univariate function
# -------------------------------
@dataclass(frozen=True)
class WitnessFunction:
    """h(t) = (p*+1)^{1/p} (1-t)^{p*-1} for 1 < p < inf; h ≡ 1 at p = 1."""

    exps: ExponentPair

    @property
    def constant(self) -> float:
        if self.exps.p == 1.0:
            return 1.0
        return (self.exps.p_star + 1.0) ** self.exps.inv_p

    def h(self, t):
        t = np.asarray(t, dtype=float)
        if self.exps.p == 1.0:
            return np.ones_like(t)
        return self.constant * (1.0 - t) ** (self.exps.p_star - 1.0)

    def H(self, x):
        x = np.asarray(x, dtype=float)
        if self.exps.p == 1.0:
            return x.copy()
        ps = self.exps.p_star
        return self.constant * (1.0 - (1.0 - x) ** ps) / ps


def extremal_h(exps: ExponentPair) -> WitnessFunction:
    if math.isinf(exps.p):
        raise UnsupportedPathError(
            "no quadrature witness at p=inf; the endpoint norms are computed analytically in bounds"
        )
    return WitnessFunction(exps=exps)


# -------------------------------
# Quadrature
# -------------------------------
@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """
    Composite Gauss-Legendre rule on [0, 1] with QUAD_PANEL_ORDER nodes per
    panel. Graded panels 0, 1/2, 3/4, ... accumulate at t = 1, where
    (1-t)^{p*-1} loses smoothness for p > 2.
    """

    n: int
    nodes: np.ndarray
    weights: np.ndarray
    graded: bool

    @classmethod
    def build(cls, n: int = QUAD_NODES, graded: bool = False) -> "QuadratureGrid":
        if n < QUAD_PANEL_ORDER or n % QUAD_PANEL_ORDER:
            raise InputError(f"quadrature points per axis must be a multiple of {QUAD_PANEL_ORDER}, got {n}")
        panels = n // QUAD_PANEL_ORDER
        if graded:
            breaks = np.concatenate((1.0 - 0.5 ** np.arange(panels), [1.0]))
        else:
            breaks = np.linspace(0.0, 1.0, panels + 1)
        x, w = np.polynomial.legendre.leggauss(QUAD_PANEL_ORDER)
        nodes, weights = [], []
        for a, b in zip(breaks[:-1], breaks[1:]):
            half = (b - a) / 2.0
            nodes.append(a + half * (x + 1.0))
            weights.append(half * w)
        return cls(n=n, nodes=np.concatenate(nodes), weights=np.concatenate(weights), graded=graded)

    @classmethod
    def for_exponent(cls, exps: ExponentPair, n: int = QUAD_NODES) -> "QuadratureGrid":
        return cls.build(n, graded=exps.p > 2.0)

    def integrate(self, f) -> float:
        return float(self.weights @ f(self.nodes))

    def tensor(self, dim: int):
        """Open-mesh node arrays and the product weight array for dim axes."""
        if dim > MAX_QUAD_DIM:
            raise CapacityError(f"tensor quadrature is capped at {MAX_QUAD_DIM} axes, got {dim}")
        if dim == 0:
            return [], np.ones(())
        mesh = np.ix_(*([self.nodes] * dim))
        weights = reduce(np.multiply.outer, [self.weights] * dim)
        return list(mesh), weights


# -------------------------------
# Witness evaluation
# -------------------------------
def _check(c: np.ndarray, scheme: WeightScheme, s: int):
    if s < 1 or s > MAX_QUAD_DIM:
        raise CapacityError(f"witness quadrature runs for 1 <= s <= {MAX_QUAD_DIM}, got s={s}")
    masks = scheme.active_sets(s)
    c = np.asarray(c, dtype=float)
    if c.shape != (len(masks),):
        raise InputError(f"coefficient vector of shape {c.shape} does not match {len(masks)} active sets")
    if np.any(c < 0):
        raise InputError("witness coefficients must be nonnegative")
    return c, masks


def _separable(s: int, factors) -> np.ndarray:
    """s-dimensional array Π_j factors[j] with coordinate j + 1 on axis j."""
    return reduce(np.multiply.outer, factors) if s > 1 else np.asarray(factors[0])


def anchored_eval(c, scheme: WeightScheme, exps: ExponentPair, x: Sequence[float]) -> float:
    """f(x) for the witness with coefficients c (indexed like scheme.active_sets(len(x)))."""
    x = np.asarray(x, dtype=float)
    s = x.size
    c, masks = _check(c, scheme, s)
    if np.any(x < 0) or np.any(x > 1):
        raise InputError("evaluation point must lie in [0, 1]^s")
    wf = extremal_h(exps)
    Hx = wf.H(x)
    total = 0.0
    for cu, u in zip(c, masks):
        term = cu * scheme.weight(u)
        for j in coordinates(u):
            term *= Hx[j - 1]
        total += term
    return float(total)


def anova_component(
    c, scheme: WeightScheme, exps: ExponentPair, v: SubsetMask, x: Sequence[float], grid: QuadratureGrid | None = None
) -> float:
    """
    f_{A,v}(x) = Σ_{u⊇v} c_u γ_u H̄^{|u\\v|} Π_{j∈v} (H(x_j) - H̄), with H̄ = ∫ H
    by quadrature; the components sum to f and integrate to zero for v ≠ ∅.
    """
    x = np.asarray(x, dtype=float)
    s = x.size
    c, masks = _check(c, scheme, s)
    wf = extremal_h(exps)
    grid = grid or QuadratureGrid.for_exponent(exps)
    h_bar = grid.integrate(wf.H)
    centered = wf.H(x) - h_bar
    total = 0.0
    for cu, u in zip(c, masks):
        if u & v != v:
            continue
        term = cu * scheme.weight(u) * h_bar ** (cardinality(u) - cardinality(v))
        for j in coordinates(v):
            term *= centered[j - 1]
        total += term
    return float(total)


# -------------------------------
# Norms
# -------------------------------
def _p_sum(values: np.ndarray, weights: np.ndarray, p: float) -> float:
    return float(np.sum(weights * np.abs(values) ** p))


def norm_F_quadrature(c, scheme: WeightScheme, exps: ExponentPair, s: int, grid: QuadratureGrid | None = None) -> float:
    """Anchored norm with every ‖f^{(u)}(·_u; 0)‖_p^p integrated on the tensor grid."""
    c, masks = _check(c, scheme, s)
    wf = extremal_h(exps)
    grid = grid or QuadratureGrid.for_exponent(exps)
    p = exps.p
    h_nodes = wf.h(grid.nodes)
    total = 0.0
    for cu, u in zip(c, masks):
        k = cardinality(u)
        if cu == 0.0:
            continue
        if k == 0:
            total += cu ** p
            continue
        gamma = scheme.weight(u)
        values = cu * gamma * _separable(k, [h_nodes] * k)
        _, weights = grid.tensor(k)
        total += gamma ** (-p) * _p_sum(values, weights, p)
    return total ** (1.0 / p)


def norm_F_numeric(c, scheme: WeightScheme, exps: ExponentPair, s: int, grid: QuadratureGrid | None = None) -> float:
    """(Σ_u c_u^p)^{1/p}, confirmed against the quadrature of the anchored norm."""
    c, _ = _check(c, scheme, s)
    extremal_h(exps)
    analytic = float(np.sum(c ** exps.p) ** exps.inv_p)
    numeric = norm_F_quadrature(c, scheme, exps, s, grid)
    if abs(numeric - analytic) > F_NORM_TOL * max(analytic, 1e-300):
        raise InvariantBreach(f"anchored norm quadrature {numeric!r} disagrees with (Σ c^p)^(1/p) = {analytic!r}")
    return analytic


def norm_H_numeric(c, scheme: WeightScheme, exps: ExponentPair, s: int, grid: QuadratureGrid | None = None) -> float:
    """
    ANOVA norm (Σ_v γ_v^{-p} ‖∫ f^{(v)}(·_v; t) dt‖_p^p)^{1/p} of the witness.
    For each v the mixed derivative is tabulated on the full s-dimensional
    grid, integrated over the axes outside v, then raised to p and
    integrated over the axes in v.
    """
    c, masks = _check(c, scheme, s)
    wf = extremal_h(exps)
    grid = grid or QuadratureGrid.for_exponent(exps)
    p = exps.p
    h_nodes = wf.h(grid.nodes)
    H_nodes = wf.H(grid.nodes)
    ones = np.ones(grid.n)
    coeff = {u: cu * scheme.weight(u) for cu, u in zip(c, masks)}

    total = 0.0
    for v in masks:
        derivative = np.zeros((grid.n,) * s)
        for u, cg in coeff.items():
            if u & v != v or cg == 0.0:
                continue
            factors = []
            for j in range(s):
                bit = 1 << j
                factors.append(h_nodes if v & bit else (H_nodes if u & bit else ones))
            derivative = derivative + cg * _separable(s, factors)
        # integrate out the coordinates outside v, highest axis first
        for j in reversed(range(s)):
            if not v & (1 << j):
                derivative = np.tensordot(derivative, grid.weights, axes=([j], [0]))
        k = cardinality(v)
        _, weights = grid.tensor(k)
        term = _p_sum(derivative, weights, p)
        total += scheme.weight(v) ** (-p) * term
        logger.debug("v=%s: ANOVA term %.12g", v, term)
    return total ** (1.0 / p)
