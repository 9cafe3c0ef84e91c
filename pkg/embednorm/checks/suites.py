"""
Oracle suites behind `embednorm verify`. Each takes the dimension cap and a
seed and reports the worst relative residual against its tolerance.
"""
import logging
import math

import numpy as np

from ..bounds import exact_norm_p1, exact_norm_pinf
from ..embedding_operator import ExponentPair, build_dense, build_operator, kronecker_factors
from ..matrix_pnorm import norm_1, norm_inf, norm_p, norm_p_kronecker, ratio
from ..schemas import SuiteResult
from ..subset_lattice import (
    brute_force_diameter_counts,
    cardinality,
    count_by_diameter,
    diameter,
    enumerate_subsets,
    submasks,
    weighted_diameter_sum,
)
from ..weights import ExplicitWeights, FiniteDiameterWeights, FiniteOrderWeights, ProductWeights, make_scheme
from ..witness_quadrature import QuadratureGrid, extremal_h, norm_F_numeric, norm_H_numeric

logger = logging.getLogger(__name__)

ENDPOINT_TOL = 1e-10
KRONECKER_TOL = 1e-6
EQELL_TOL = 1e-12
WITNESS_TOL = 1e-6
HOLDER_TOL = 1e-10


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def _result(name: str, residuals, tol: float, detail: str = "") -> SuiteResult:
    worst = max(residuals) if residuals else 0.0
    return SuiteResult(name=name, passed=worst <= tol, cases=len(residuals), worst_residual=worst, detail=detail)


def random_downward_closed(s: int, rng: np.random.Generator, generators: int = 3) -> ExplicitWeights:
    """Explicit weights on the down-closure of a few random subsets of [s]."""
    support = set()
    for u in rng.integers(0, 1 << s, size=generators):
        support.update(submasks(int(u)))
    table = {u: float(rng.uniform(0.2, 3.0)) for u in sorted(support)}
    table[0] = 1.0
    return make_scheme("explicit", table=table)


# -------------------------------
# Endpoint sharpness
# -------------------------------
def endpoint_suite(max_s: int, seed: int = 0, cases: int = 20) -> SuiteResult:
    rng = np.random.default_rng(seed)
    one, inf = ExponentPair.from_p(1.0), ExponentPair.from_p(math.inf)
    residuals = []

    for _ in range(cases):
        s = int(rng.integers(1, max_s + 1))
        scheme = random_downward_closed(s, rng)
        residuals.append(_rel(norm_1(build_operator(scheme, s, one)).value, exact_norm_p1(scheme, s)))
        residuals.append(_rel(norm_inf(build_operator(scheme, s, inf)).value, exact_norm_pinf(scheme, s)))

    structured = [
        ProductWeights(gammas=tuple(rng.uniform(0.05, 2.0, size=max_s))),
        FiniteOrderWeights(omega=float(rng.uniform(0.5, 2.0)), q=min(2, max_s)),
        FiniteDiameterWeights(omega=float(rng.uniform(0.5, 2.0)), q=max(1, min(2, max_s - 1))),
    ]
    for scheme in structured:
        for s in range(1, max_s + 1):
            residuals.append(_rel(exact_norm_p1(scheme, s), exact_norm_p1(scheme, s, by_enumeration=True)))
            residuals.append(_rel(exact_norm_pinf(scheme, s), exact_norm_pinf(scheme, s, by_enumeration=True)))
    return _result("endpoint", residuals, ENDPOINT_TOL)


# -------------------------------
# Kronecker multiplicativity
# -------------------------------
def kronecker_suite(max_s: int, seed: int = 0) -> SuiteResult:
    rng = np.random.default_rng(seed)
    residuals = []
    for s in sorted({1, max(1, max_s // 2), max_s}):
        scheme = ProductWeights(gammas=tuple(rng.uniform(0.05, 2.0, size=s)))
        for p in (1.0, 1.5, 2.0, 3.0, 7.0, math.inf):
            exps = ExponentPair.from_p(p)
            factored = norm_p_kronecker(kronecker_factors(scheme, exps, s), exps)
            # the tensor witness seeds the dense iteration; it must reproduce the product exactly
            starts = {"tensor": factored.witness} if factored.witness is not None else {}
            dense = norm_p(build_dense(scheme, s, exps), exps, starts=starts).value
            residuals.append(_rel(dense, factored.value))
    return _result("kronecker", residuals, KRONECKER_TOL)


# -------------------------------
# Diameter counting identity
# -------------------------------
def eqell_suite(max_s: int, seed: int = 0) -> SuiteResult:
    residuals = []
    mismatches = 0
    for s in range(1, max_s + 1):
        counts = brute_force_diameter_counts(s)
        for ell in range(s):
            if counts[ell] != count_by_diameter(s, ell):
                mismatches += 1
        if sum(count_by_diameter(s, ell) for ell in range(s)) != 1 << s:
            mismatches += 1
        for x in (0.25, 1.0, 2.0):
            sums = [0.0] * s
            for u in enumerate_subsets(s):
                sums[diameter(u)] += x ** cardinality(u)
            for ell in range(1, s):
                residuals.append(_rel(weighted_diameter_sum(s, ell, x), sums[ell]))
    if mismatches:
        residuals.append(float(mismatches))
    return _result("eqell", residuals, EQELL_TOL, detail=f"integer mismatches={mismatches}")


# -------------------------------
# Function-space oracle
# -------------------------------
def witness_suite(max_s: int, seed: int = 0, draws: int = 5) -> SuiteResult:
    rng = np.random.default_rng(seed)
    holder, ratios = [], []
    for p in (1.25, 1.5, 2.0, 3.0, 5.0):
        exps = ExponentPair.from_p(p)
        wf = extremal_h(exps)
        grid = QuadratureGrid.for_exponent(exps, n=128)
        holder.append(abs(grid.integrate(lambda t: wf.h(t) ** p) - 1.0))
        holder.append(abs(grid.integrate(lambda t: wf.h(t) * (1.0 - t)) - exps.m))

    for s in range(1, min(max_s, 2) + 1):
        for p in (1.5, 2.0, 3.0):
            exps = ExponentPair.from_p(p)
            grid = QuadratureGrid.for_exponent(exps, n=128)
            scheme = ProductWeights(gammas=tuple(rng.choice([0.5, 1.0, 2.0], size=s)))
            op = build_dense(scheme, s, exps)
            for _ in range(draws):
                c = rng.uniform(0.0, 1.0, size=op.size)
                matrix_ratio = ratio(op, c, p)
                function_ratio = norm_H_numeric(c, scheme, exps, s, grid) / norm_F_numeric(c, scheme, exps, s, grid)
                ratios.append(_rel(function_ratio, matrix_ratio))
    worst_holder, worst_ratio = max(holder), max(ratios, default=0.0)
    return SuiteResult(
        name="witness",
        passed=worst_holder <= HOLDER_TOL and worst_ratio <= WITNESS_TOL,
        cases=len(holder) + len(ratios),
        worst_residual=max(worst_holder, worst_ratio),
        detail=f"holder={worst_holder:.3g} ratio={worst_ratio:.3g}",
    )
