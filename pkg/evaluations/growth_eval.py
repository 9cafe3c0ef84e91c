import math

from embednorm.bounds import build_report, pod_chain_lower_bound, pod_column_lower_bound
from embednorm.embedding_operator import ExponentPair
from embednorm.utils_parse import parse_s_range
from embednorm.weights import FiniteDiameterWeights, FiniteOrderWeights
from evaluations.growth_metrics import (
    first_exceeding,
    is_nondecreasing,
    log_slopes,
    relative_gap,
    slope_error,
)

"""
Scaling studies for the structured weight classes: fitted growth exponents
of the lower bound against the rates the theory predicts, and how far the
interpolation upper bound sits above it at the largest s.
"""


def evaluate_finite_order():
    s_values = parse_s_range("32:1024:log")
    for q, p in [(1, 2.0), (2, 2.0), (2, 4.0)]:
        exps = ExponentPair.from_p(p)
        scheme = FiniteOrderWeights(omega=1.0, q=q)
        reports = [build_report(scheme, s, exps) for s in s_values]
        pairs = [(r.s, r.lower_bound) for r in reports]
        expected = q * (1.0 - 1.0 / p)

        print(f"FOW q={q} p={p:g}: expected slope {expected:.3f}")
        print("  slope error:", slope_error(pairs, expected))
        print("  gap at largest s:", relative_gap(reports[-1].lower_bound, reports[-1].upper_bound))


def evaluate_finite_diameter():
    s_values = parse_s_range("32:4096:log")
    for q, p in [(2, 2.0), (3, math.inf)]:
        exps = ExponentPair.from_p(p)
        scheme = FiniteDiameterWeights(omega=1.0, q=q)
        reports = [build_report(scheme, s, exps) for s in s_values]
        pairs = [(r.s, r.lower_bound) for r in reports]
        expected = exps.inv_p_star

        print(f"FDW q={q} p={exps.label()}: expected slope {expected:.3f} in s - q")
        print("  slope error:", slope_error(pairs, expected, offset=q))


def evaluate_pod():
    exps = ExponentPair.from_p(2.0)
    params = dict(c=1.0, beta1=0.5, beta2=1.0)
    s_values = parse_s_range("8:4096:log")
    chain = [(s, pod_chain_lower_bound(s, exps, log_scale=True, **params)) for s in s_values]
    column = [(s, pod_column_lower_bound(s, exps, log_scale=True, **params)) for s in s_values]

    print("POD c=1 beta1=0.5 beta2=1 p=2")
    for name, pairs in (("chain", chain), ("all subsets", column)):
        print(f"  {name}: exceeds s from", first_exceeding(pairs, 1.0, log_values=True))
        print(f"  {name}: exceeds s^2 from", first_exceeding(pairs, 2.0, log_values=True))
        print(f"  {name}: local slopes nondecreasing:", is_nondecreasing(log_slopes(pairs)))


if __name__ == "__main__":
    evaluate_finite_order()
    evaluate_finite_diameter()
    evaluate_pod()
