import math

import numpy as np
import pytest

from embednorm.bounds import (
    build_report,
    check_report,
    classify_growth,
    dense_log_weights,
    exact_norm_p1,
    exact_norm_p2_product,
    exact_norm_p2_product_corrected,
    exact_norm_pinf,
    factor_lower_bound_product,
    fdw_lower_bound_explicit,
    fit_growth_rate,
    fow_lower_bound_asymptotic,
    fow_lower_bound_explicit,
    local_slopes,
    lower_bound,
    lower_bound_result,
    lower_bound_simple,
    pod_chain_lower_bound,
    pod_column_lower_bound,
    pod_tau_lower_bound,
    product_lower_bound,
    upper_bound_interpolation,
    _structured_starts,
)
from embednorm import embedding_operator
from embednorm.checks.suites import random_downward_closed
from embednorm.embedding_operator import (
    ActiveSetOperator,
    DenseOperator,
    ExponentPair,
    build_operator,
    kronecker_factors,
)
from embednorm.errors import CapacityError, DomainError, InputError, InvariantBreach
from embednorm.matrix_pnorm import norm_2, norm_p, norm_p_kronecker
from embednorm.schemas import BoundReport
from embednorm.subset_lattice import cardinality, diameter
from embednorm.weights import (
    FiniteDiameterWeights,
    FiniteOrderWeights,
    PODWeights,
    ProductWeights,
    make_scheme,
)


class TestExactNormP1:
    def test_product(self):
        assert exact_norm_p1(ProductWeights(gammas=(1.0, 1.0, 1.0)), 3) == pytest.approx(8.0)

    @pytest.mark.parametrize("s", [3, 10, 500])
    def test_finite_diameter(self, s):
        assert exact_norm_p1(FiniteDiameterWeights(omega=1.0, q=2), s) == 8.0

    def test_empty_support(self):
        assert exact_norm_p1(make_scheme("explicit", table={0: 1.0}), 1) == 1.0

    def test_product_identity(self, rng):
        for _ in range(100):
            s = int(rng.integers(1, 13))
            gammas = tuple(rng.uniform(1e-6, 2.0, size=s))
            expected = float(np.prod(1.0 + np.asarray(gammas)))
            value = exact_norm_p1(ProductWeights(gammas=gammas), s, by_enumeration=True)
            assert value == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("omega", [0.5, 1.0, 2.0])
    def test_finite_diameter_enumerated(self, omega):
        for s in range(2, 13):
            for q in range(1, s):
                value = exact_norm_p1(FiniteDiameterWeights(omega=omega, q=q), s, by_enumeration=True)
                assert value == pytest.approx((1.0 + omega) ** (q + 1), rel=1e-12)


class TestExactNormPInf:
    def test_single_coordinate(self):
        assert exact_norm_pinf(make_scheme("explicit", table={0: 1.0, 1: 1.0}), 1) == 1.5

    def test_product_single(self):
        assert exact_norm_pinf(ProductWeights(gammas=(0.8,)), 1) == pytest.approx(1.4)

    def test_finite_diameter(self):
        assert exact_norm_pinf(FiniteDiameterWeights(omega=2.0, q=1), 5) == pytest.approx(10.0)
        assert exact_norm_pinf(FiniteDiameterWeights(omega=2.0, q=1), 5, by_enumeration=True) == pytest.approx(10.0)

    def test_structured_against_enumeration(self, rng):
        for s in range(1, 11):
            schemes = [
                ProductWeights(gammas=tuple(rng.uniform(0.05, 2.0, size=s))),
                FiniteOrderWeights(omega=float(rng.uniform(0.2, 3.0)), q=int(rng.integers(1, s + 1))),
                FiniteDiameterWeights(omega=float(rng.uniform(0.2, 3.0)), q=int(rng.integers(1, s + 1))),
            ]
            for scheme in schemes:
                assert exact_norm_p1(scheme, s) == pytest.approx(exact_norm_p1(scheme, s, by_enumeration=True), rel=1e-12)
                assert exact_norm_pinf(scheme, s) == pytest.approx(
                    exact_norm_pinf(scheme, s, by_enumeration=True), rel=1e-12
                )

    def test_enumeration_cap(self):
        with pytest.raises(CapacityError):
            dense_log_weights(PODWeights(c=1.0, beta1=0.5, beta2=1.0), 21)


class TestLowerBound:
    def test_endpoint_sharpness(self, p1, pinf):
        rng = np.random.default_rng(1)
        for _ in range(50):
            s = int(rng.integers(1, 11))
            scheme = random_downward_closed(s, rng)
            assert lower_bound(scheme, s, p1) == pytest.approx(exact_norm_p1(scheme, s), rel=1e-10)
            assert lower_bound(scheme, s, pinf) == pytest.approx(exact_norm_pinf(scheme, s), rel=1e-10)

    def test_product_p2_single(self, p2):
        a = p2.m
        sigma = (a + math.sqrt(a * a + 4.0)) / 2.0
        value = lower_bound(ProductWeights(gammas=(1.0,)), 1, p2)
        assert value == pytest.approx(sigma, rel=1e-12)
        assert value <= exact_norm_p2_product((1.0,)) * (1 + 1e-12)

    def test_finite_order_dominates_explicit(self):
        for p in (1.5, 2.0, 3.0):
            exps = ExponentPair.from_p(p)
            for s in range(2, 15, 3):
                q = 2
                op = build_operator(FiniteOrderWeights(omega=1.0, q=q), s, exps)
                top = np.array([1.0 if cardinality(u) == q else 0.0 for u in op.index])
                value = norm_p(op, exps, starts={"top": top}).value
                assert fow_lower_bound_explicit(s, q, 1.0, exps) <= value * (1 + 1e-9)

    def test_finite_diameter_dominates_explicit(self):
        for p in (1.5, 2.0, 3.0, math.inf):
            exps = ExponentPair.from_p(p)
            for s in range(3, 15, 3):
                q = 2
                op = build_operator(FiniteDiameterWeights(omega=0.8, q=q), s, exps)
                top = np.array([1.0 if u and diameter(u) == q else 0.0 for u in op.index])
                value = norm_p(op, exps, starts={"top": top}).value
                assert fdw_lower_bound_explicit(s, q, 0.8, exps) <= value * (1 + 1e-9)

    def test_pod_without_operator(self, p2):
        result, op = lower_bound_result(PODWeights(c=1.0, beta1=0.5, beta2=1.0), 40, p2)
        assert op is None
        assert result.method == "closed_form"
        assert result.value >= pod_chain_lower_bound(40, p2, 1.0, 0.5, 1.0)

    def test_explicit_above_dense_cap(self, p1, pinf):
        table = {u: 1.0 for u in range(1 << 13) if cardinality(u) <= 7}
        scheme = make_scheme("explicit", table=table)
        assert isinstance(build_operator(scheme, 13, p1), ActiveSetOperator)
        assert lower_bound(scheme, 13, p1) == pytest.approx(exact_norm_p1(scheme, 13), rel=1e-10)
        assert exact_norm_p1(scheme, 13) == pytest.approx(128.0)
        assert lower_bound(scheme, 13, pinf) == pytest.approx(exact_norm_pinf(scheme, 13), rel=1e-10)

    def test_endpoint_fallback_past_sparse_cap(self, monkeypatch, p1, p2):
        monkeypatch.setattr(embedding_operator, "MAX_DENSE_SETS", 8)
        monkeypatch.setattr(embedding_operator, "MAX_SPARSE_ENTRIES", 20)
        scheme = make_scheme("explicit", table={u: 1.0 for u in range(32)})
        result, op = lower_bound_result(scheme, 5, p1)
        assert op is None
        assert result.candidate == "exact_endpoint"
        assert result.value == pytest.approx(32.0)
        with pytest.raises(CapacityError):
            lower_bound_result(scheme, 5, p2)

    def test_pod_sparse_matches_dense(self, monkeypatch, p2):
        scheme = PODWeights(c=0.8, beta1=0.5, beta2=1.5)
        dense = build_operator(scheme, 8, p2)
        monkeypatch.setattr(embedding_operator, "MAX_DENSE_SETS", 100)
        sparse_op = build_operator(scheme, 8, p2)
        assert isinstance(dense, DenseOperator)
        assert isinstance(sparse_op, ActiveSetOperator)
        assert sparse_op.index == dense.index
        np.testing.assert_allclose(sparse_op.to_dense(), dense.matrix, rtol=1e-14)


class TestLowerBoundSimple:
    def test_p1_is_exact(self, rng, p1):
        for _ in range(10):
            s = int(rng.integers(1, 9))
            scheme = random_downward_closed(s, rng)
            assert lower_bound_simple(scheme, s, p1) == pytest.approx(exact_norm_p1(scheme, s), rel=1e-12)

    def test_empty_support(self, p2):
        assert lower_bound_simple(make_scheme("explicit", table={0: 1.0}), 1, p2) == pytest.approx(1.0)

    def test_product_hand_value(self, p2):
        assert lower_bound_simple(ProductWeights(gammas=(1.0, 1.0)), 2, p2) == pytest.approx(4.0 / 3.0)

    @pytest.mark.parametrize("p", [1.5, 2.0, math.inf])
    def test_structured_against_enumeration(self, p):
        exps = ExponentPair.from_p(p)
        for scheme in (FiniteOrderWeights(omega=1.3, q=2), FiniteDiameterWeights(omega=0.7, q=2)):
            table = {u: scheme.weight(u) for u in scheme.active_sets(8)}
            explicit = make_scheme("explicit", table=table)
            assert lower_bound_simple(scheme, 8, exps) == pytest.approx(lower_bound_simple(explicit, 8, exps), rel=1e-12)

    @pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
    def test_below_lower_bound(self, rng, p):
        exps = ExponentPair.from_p(p)
        for _ in range(5):
            s = int(rng.integers(1, 8))
            scheme = random_downward_closed(s, rng)
            op = build_operator(scheme, s, exps)
            iterated = norm_p(op, exps, starts=_structured_starts(scheme, op, s, exps)).value
            assert lower_bound_simple(scheme, s, exps) <= iterated * (1 + 1e-9)


class TestUpperBound:
    def test_endpoints(self, rng, p1, pinf):
        scheme = random_downward_closed(6, rng)
        assert upper_bound_interpolation(scheme, 6, p1) == exact_norm_p1(scheme, 6)
        assert upper_bound_interpolation(scheme, 6, pinf) == exact_norm_pinf(scheme, 6)

    def test_finite_order(self, p2):
        scheme = FiniteOrderWeights(omega=1.0, q=1)
        upper = upper_bound_interpolation(scheme, 100, p2)
        assert upper == pytest.approx(math.sqrt(2.0 * 51.0))
        assert lower_bound(scheme, 100, p2) <= upper


class TestProductWeights:
    def test_printed_formula_limit(self):
        assert exact_norm_p2_product([1e-12] * 4) == pytest.approx(1.0, abs=1e-10)

    def test_printed_formula_value(self):
        expected = math.sqrt(1.0 + 2.0 * (math.sqrt(2.0) + 12.0))
        assert exact_norm_p2_product([math.sqrt(12.0)]) == pytest.approx(expected, rel=1e-14)
        assert expected == pytest.approx(5.2753, abs=1e-4)

    def test_corrected_formula_is_kronecker(self, rng, p2):
        gammas = rng.uniform(0.01, 3.0, size=7)
        kron = norm_p_kronecker(kronecker_factors(gammas, p2), p2).value
        assert exact_norm_p2_product_corrected(gammas) == pytest.approx(kron, rel=1e-12)

    def test_corrected_formula_is_spectral_norm(self, p2):
        scheme = ProductWeights(gammas=(0.3, 1.7, 1.0))
        dense = kronecker_factors(scheme, p2, 3).to_dense()
        assert exact_norm_p2_product_corrected(scheme.gammas) == pytest.approx(norm_2(dense).value, rel=1e-9)

    def test_product_lower_bound_single(self, p2):
        assert product_lower_bound([0.9], p2) == pytest.approx(math.sqrt(1.0 + 0.9 / math.sqrt(3.0)))

    def test_product_lower_bound_limit(self):
        assert product_lower_bound([1e-12] * 3, ExponentPair.from_p(3.0)) == pytest.approx(1.0)

    def test_endpoints_rejected(self, p1, pinf):
        for exps in (p1, pinf):
            with pytest.raises(DomainError):
                product_lower_bound([1.0], exps)
            with pytest.raises(DomainError):
                factor_lower_bound_product([1.0], exps)

    def test_three_way_ordering(self, p2):
        rng = np.random.default_rng(3)
        for _ in range(200):
            s = int(rng.integers(1, 11))
            small = rng.uniform(1e-6, 2.0, size=s)
            large = rng.uniform(1.0, 2.0, size=s)
            for gammas in (small, large):
                low = product_lower_bound(gammas, p2)
                kron = norm_p_kronecker(kronecker_factors(gammas, p2), p2).value
                assert low <= factor_lower_bound_product(gammas, p2) * (1 + 1e-12)
                assert factor_lower_bound_product(gammas, p2) <= kron * (1 + 1e-12)
                assert low <= exact_norm_p2_product(gammas)
            kron = norm_p_kronecker(kronecker_factors(large, p2), p2).value
            assert kron <= exact_norm_p2_product(large) * (1 + 1e-12)

    def test_summability(self, p2):
        def value(decay, s):
            return product_lower_bound([1.0 / j ** decay for j in range(1, s + 1)], p2)

        assert value(1, 10 ** 4) > 2.0 * value(1, 10 ** 2)
        assert abs(value(2, 10 ** 4) - value(2, 10 ** 3)) < 1e-3


class TestFiniteOrderBounds:
    def test_explicit_value(self, p2):
        assert fow_lower_bound_explicit(9, 1, 1.0, p2) == pytest.approx(math.sqrt(3.0))

    def test_explicit_p1(self, p1):
        assert fow_lower_bound_explicit(7, 2, 1.5, p1) == pytest.approx(2.25)

    def test_asymptotic_below_explicit(self):
        for p in (1.5, 2.0, 4.0):
            exps = ExponentPair.from_p(p)
            for q in (1, 2, 3):
                for s in (q, q + 1, 10, 100):
                    assert fow_lower_bound_asymptotic(s, q, 1.2, exps) <= fow_lower_bound_explicit(s, q, 1.2, exps)

    def test_q_exceeds_s(self, p2):
        with pytest.raises(DomainError):
            fow_lower_bound_explicit(2, 3, 1.0, p2)


class TestFiniteDiameterBounds:
    def test_explicit_value(self, pinf):
        assert fdw_lower_bound_explicit(5, 1, 1.0, pinf) == pytest.approx(1.0)

    def test_q1_has_no_middle_factor(self, p2):
        expected = 2.0 * p2.m ** 2 * math.sqrt(6.0)
        assert fdw_lower_bound_explicit(7, 1, 2.0, p2) == pytest.approx(expected)

    def test_domain(self, p2):
        with pytest.raises(DomainError):
            fdw_lower_bound_explicit(3, 3, 1.0, p2)

    def test_empty_row_is_maximal(self):
        for omega in (0.3, 1.0, 4.0):
            for q in (1, 2, 5):
                scheme = FiniteDiameterWeights(omega=omega, q=q)
                assert exact_norm_pinf(scheme, 12) == pytest.approx(
                    exact_norm_pinf(scheme, 12, by_enumeration=True), rel=1e-12
                )


class TestPODBounds:
    def test_singleton(self, p2):
        assert pod_chain_lower_bound(1, p2, 1.0, 0.5, 1.0) == pytest.approx(1.0)

    def test_at_least_one(self, p2):
        for s in (2, 5, 50):
            assert pod_chain_lower_bound(s, p2, 0.1, 0.5, 3.0) >= 1.0

    def test_direct_summation(self, p2):
        s, c, beta1, beta2 = 4, 1.0, 1.0, 2.0
        total = 0.0
        for k in range(1, s + 1):
            term = (math.factorial(s) / math.factorial(s - k + 1)) ** (2 * beta1)
            term *= (c * p2.m) ** (2 * (k - 1))
            term *= math.factorial(k - 1) ** (-2 * beta2)
            total += term
        assert pod_chain_lower_bound(s, p2, c, beta1, beta2) == pytest.approx(math.sqrt(total), rel=1e-12)

    def test_log_scale(self, p2):
        value = pod_chain_lower_bound(30, p2, 1.0, 0.5, 1.0)
        assert pod_chain_lower_bound(30, p2, 1.0, 0.5, 1.0, log_scale=True) == pytest.approx(math.log(value))

    def test_overflow(self, p2):
        with pytest.raises(CapacityError):
            pod_chain_lower_bound(4_000_000, p2, 1.0, 0.5, 1.0)
        assert pod_chain_lower_bound(4_000_000, p2, 1.0, 0.5, 1.0, log_scale=True) > 700.0

    @pytest.mark.parametrize("p", [1.5, 2.0, 3.0, math.inf])
    def test_column_dominates_chain(self, p):
        exps = ExponentPair.from_p(p)
        for s in range(1, 31):
            chain = pod_chain_lower_bound(s, exps, 0.8, 0.5, 1.5, log_scale=True)
            column = pod_column_lower_bound(s, exps, 0.8, 0.5, 1.5, log_scale=True)
            assert chain <= column + 1e-12

    @pytest.mark.parametrize("p", [1.5, 2.0, math.inf])
    def test_column_matches_enumeration(self, p):
        exps = ExponentPair.from_p(p)
        for s in (1, 4, 9):
            scheme = PODWeights(c=0.8, beta1=0.5, beta2=1.5)
            table = {u: scheme.weight(u) for u in range(1 << s)}
            column = pod_column_lower_bound(s, exps, 0.8, 0.5, 1.5)
            assert column <= lower_bound_simple(make_scheme("explicit", table=table), s, exps) * (1 + 1e-12)

    def test_tau_below_chain(self, p2):
        for tau in (1.0, 2.0):
            for s in range(7, 60):
                assert pod_tau_lower_bound(s, tau, p2, 1.0, 0.5, 1.0) <= pod_chain_lower_bound(s, p2, 1.0, 0.5, 1.0)

    def test_tau_needs_dimension(self, p2):
        with pytest.raises(InputError):
            pod_tau_lower_bound(4, 1.0, p2, 1.0, 0.5, 1.0)

    def test_parameters(self, p2):
        with pytest.raises(DomainError):
            pod_chain_lower_bound(5, p2, 1.0, 2.0, 1.0)


class TestGrowth:
    S = [2 ** k for k in range(3, 11)]

    def test_quadratic(self):
        assert fit_growth_rate([(s, s ** 2) for s in self.S]) == pytest.approx(2.0)

    def test_constant(self):
        assert fit_growth_rate([(s, 3.0) for s in self.S]) == pytest.approx(0.0, abs=1e-12)

    def test_offset(self):
        assert fit_growth_rate([(s, (s - 3) ** 0.5) for s in self.S], offset=3) == pytest.approx(0.5)

    def test_finite_order_explicit_rate(self, p2):
        pairs = [(s, fow_lower_bound_explicit(s, 2, 1.0, p2)) for s in range(32, 1025, 32)]
        assert fit_growth_rate(pairs) == pytest.approx(1.0, abs=0.05)

    def test_too_few_points(self):
        with pytest.raises(InputError):
            fit_growth_rate([(1, 1.0), (2, 2.0)])

    def test_nonpositive(self):
        with pytest.raises(DomainError):
            fit_growth_rate([(s, 0.0) for s in self.S])

    def test_local_slopes(self):
        np.testing.assert_allclose(local_slopes([(s, s ** 3) for s in self.S]), 3.0)

    def test_classes(self):
        assert classify_growth([(s, 2.0) for s in self.S]) == "bounded"
        assert classify_growth([(s, s ** 1.5) for s in self.S]) == "polynomial"
        assert classify_growth([(s, math.exp(math.sqrt(s))) for s in self.S]) == "superpolynomial"


class TestReports:
    def test_product_p1(self, p1):
        report = build_report(ProductWeights(gammas=(1.0, 1.0)), 2, p1)
        assert report.lower_bound == pytest.approx(4.0)
        assert report.exact == pytest.approx(4.0)
        assert report.upper_bound == pytest.approx(4.0)

    def test_product_p2_exact(self, p2):
        report = build_report(ProductWeights(gammas=(0.5, 1.5, 2.0)), 3, p2)
        assert report.method == "kronecker"
        assert report.exact == pytest.approx(report.lower_bound, rel=1e-12)

    @pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
    def test_ordering(self, p):
        exps = ExponentPair.from_p(p)
        for scheme, s in (
            (FiniteOrderWeights(omega=1.0, q=2), 12),
            (FiniteDiameterWeights(omega=2.0, q=3), 20),
            (PODWeights(c=0.5, beta1=0.5, beta2=2.0), 6),
        ):
            report = build_report(scheme, s, exps)
            assert report.lower_bound_simple <= report.lower_bound * (1 + 1e-9)
            assert report.lower_bound <= report.upper_bound * (1 + 1e-9)
            assert report.witness_summary

    def test_pod_large_dimension(self, p2):
        report = build_report(PODWeights(c=1.0, beta1=0.5, beta2=1.0), 40, p2)
        assert report.upper_bound is None
        assert report.exact is None
        assert report.lower_bound == pytest.approx(pod_column_lower_bound(40, p2, 1.0, 0.5, 1.0))

    def test_check_report(self):
        bad = BoundReport(scheme="x", s=1, p=2.0, lower_bound=2.0, lower_bound_simple=1.0, upper_bound=1.5, method="spectral")
        with pytest.raises(InvariantBreach):
            check_report(bad)
        good = bad.model_copy(update={"upper_bound": 2.0 * (1 + 1e-12)})
        assert check_report(good) is good
