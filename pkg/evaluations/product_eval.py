from embednorm.bounds import (
    exact_norm_p2_product,
    exact_norm_p2_product_corrected,
    factor_lower_bound_product,
    product_lower_bound,
)
from embednorm.embedding_operator import ExponentPair, kronecker_factors
from embednorm.matrix_pnorm import norm_p_kronecker


def evaluate_orderings():
    exps = ExponentPair.from_p(2.0)
    for gamma in (0.1, 0.5, 1.0, 2.0):
        gammas = [gamma] * 10
        kron = norm_p_kronecker(kronecker_factors(gammas, exps), exps).value
        print(f"gamma={gamma:g} s=10")
        print("  closed-form lower bound:", product_lower_bound(gammas, exps))
        print("  fixed-c lower bound:    ", factor_lower_bound_product(gammas, exps))
        print("  factor-wise norm:       ", kron)
        print("  exact (spectral form):  ", exact_norm_p2_product_corrected(gammas))
        print("  printed formula:        ", exact_norm_p2_product(gammas))


def evaluate_summability():
    # summable gammas keep the lower bound bounded in s, 1/j does not
    exps = ExponentPair.from_p(2.0)
    for label, decay in (("1/j", 1), ("1/j^2", 2)):
        values = [
            product_lower_bound([1.0 / j ** decay for j in range(1, s + 1)], exps)
            for s in (100, 1000, 10000)
        ]
        print(f"gamma_j = {label}:", values)


if __name__ == "__main__":
    evaluate_orderings()
    evaluate_summability()
