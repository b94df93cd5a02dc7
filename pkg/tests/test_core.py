import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from twophoton_rabi.core import (ComplexPolynomial, ModelParams, ONE, check_ratio,
                                 inverse_differences, min_pairwise_distance, poly_arith,
                                 poly_derivative, poly_eval, poly_from_roots, symmetric_sums)
from twophoton_rabi.errors import DegenerateRoots, InvalidParameters
from twophoton_rabi.verify import separated_roots

finite = st.floats(-3, 3, allow_nan=False)
cplx = st.builds(complex, finite, finite)
polys = st.lists(cplx, max_size=7).map(ComplexPolynomial)


def close(p, coeffs, tol=1e-12):
    q = ComplexPolynomial(coeffs)
    return p.degree == q.degree and np.allclose(p.coeffs, q.coeffs, atol=tol, rtol=0)


class TestModelParams:
    def test_valid(self):
        p = ModelParams(delta=1.0, epsilon=0.1, omega=2.0, lam=0.5)
        assert p.ratio == 0.25

    @pytest.mark.parametrize("omega", [0.0, -1.0, math.nan])
    def test_omega_positive(self, omega):
        with pytest.raises(InvalidParameters):
            ModelParams(delta=1.0, epsilon=0.0, omega=omega, lam=0.2)

    def test_lambda_nonzero(self):
        with pytest.raises(InvalidParameters):
            ModelParams(delta=1.0, epsilon=0.0, omega=1.0, lam=0.0)

    def test_ratio_validation(self):
        assert check_ratio(-0.3) == -0.3
        with pytest.raises(InvalidParameters):
            check_ratio(0.0)


class TestPolynomial:
    def test_canonical_form(self):
        p = ComplexPolynomial([1, 2, 0, 0])
        assert p.degree == 1 and len(p.coeffs) == 2
        assert ComplexPolynomial([0, 0]).is_zero()
        assert ComplexPolynomial().degree == -1

    def test_from_roots_examples(self):
        assert poly_from_roots([]) == ONE
        assert close(poly_from_roots([1, -1]), [-1, 0, 1])
        assert close(poly_from_roots([0.5 + 0.5j, 0.5 - 0.5j]), [0.5, -1, 1])

    def test_derivative_examples(self):
        assert close(poly_derivative(ComplexPolynomial([-1, 0, 1])), [0, 2])
        assert poly_derivative(ComplexPolynomial([5])).is_zero()
        assert close(poly_derivative(ComplexPolynomial.monomial(4)), [0, 0, 0, 4])

    def test_arith_examples(self):
        zp1, zm1 = ComplexPolynomial([1, 1]), ComplexPolynomial([-1, 1])
        assert close(poly_arith(zp1, zm1, "mul"), [-1, 0, 1])
        z2 = ComplexPolynomial.monomial(2)
        assert poly_arith(z2, -z2, "add").is_zero()
        iz = ComplexPolynomial([0, 1j])
        assert close(poly_arith(iz, iz, "mul"), [0, 0, -1])
        with pytest.raises(ValueError):
            poly_arith(zp1, zm1, "div")

    def test_eval_examples(self):
        p = ComplexPolynomial([-1, 0, 1])
        assert poly_eval(p, 1) == 0
        assert poly_eval(p, 1j) == -2
        assert poly_eval(ONE, 3.7 - 2j) == 1

    def test_eval_vectorized(self):
        p = ComplexPolynomial([1, 2, 3])
        z = np.array([0.5, 1j, -2])
        assert np.allclose(poly_eval(p, z), [poly_eval(p, x) for x in z])

    @given(polys, polys)
    def test_product_rule(self, a, b):
        lhs = (a * b).derivative()
        rhs = a.derivative() * b + a * b.derivative()
        diff = lhs - rhs
        scale = 1 + max([0.0, *np.abs(lhs.coeffs)])
        assert diff.is_zero() or np.abs(diff.coeffs).max() < 1e-12 * scale

    @given(st.integers(1, 8), st.integers(0, 2**32 - 1))
    def test_roots_vanish(self, n, seed):
        roots = separated_roots(np.random.default_rng(seed), n)
        p = poly_from_roots(roots)
        for r in roots:
            assert abs(poly_eval(p, r)) < 1e-10 * (1 + abs(r)) ** n


class TestSymmetricSums:
    def test_pair(self):
        s1, s2, s3 = symmetric_sums([1, -1])
        assert (s1, s2, s3) == (0, 1, 0)

    def test_triple(self):
        s = symmetric_sums([1, 0, -1])
        assert np.allclose(s, (0, 3, 0), atol=1e-14)

    def test_six_random(self, rng):
        s = symmetric_sums(separated_roots(rng, 6))
        assert np.allclose(s, (0, 15, 0), atol=1e-10, rtol=0)

    @given(st.integers(2, 10), st.integers(0, 2**32 - 1))
    def test_identity(self, n, seed):
        s = symmetric_sums(separated_roots(np.random.default_rng(seed), n))
        assert np.allclose(s, (0, n * (n - 1) / 2, 0), atol=1e-10, rtol=0)

    def test_degenerate(self):
        with pytest.raises(DegenerateRoots):
            symmetric_sums([0.3, 0.3 + 1e-14])
        with pytest.raises(DegenerateRoots):
            inverse_differences([1.0, 1.0])

    def test_min_distance(self):
        assert min_pairwise_distance([0, 3, 1j]) == 1.0
        assert min_pairwise_distance([2.0]) == math.inf
