import numpy as np
import pytest
from hypothesis import given, strategies as st

from twophoton_rabi.alpha import select_branch
from twophoton_rabi.core import ComplexPolynomial, ModelParams, ONE, ZERO, poly_eval
from twophoton_rabi.ode import (OdeCoefficients, apply_operator, gauge_derivatives, ode_coefficients,
                                operator_residual, raw_residual_pointwise, residual_norm,
                                untransformed_coefficients)

finite = st.floats(-2, 2, allow_nan=False)
cplx = st.builds(complex, finite, finite)
params_st = st.builds(
    lambda d, e, w, l: ModelParams(delta=d, epsilon=e, omega=w, lam=l),
    st.floats(0, 2), st.floats(-1, 1), st.floats(0.5, 2), st.floats(0.05, 1.0))


def random_coeffs(rng, q4=0.0):
    v = rng.normal(size=8) + 1j * rng.normal(size=8)
    c = OdeCoefficients(*v)
    return c.perturbed("q4", q4 - c.q4)


class TestCoefficients:
    def test_hand_values(self):
        p = ModelParams(delta=0.0, epsilon=0.0, omega=1.0, lam=0.2)
        c = ode_coefficients(p, 0.1, 0.0)
        assert abs(c.a1 - 0.8) < 1e-14
        assert abs(c.b2 + 23.76) < 1e-12
        assert abs(c.p3 + 4.568) < 1e-12
        # (12 alpha lam + E + 2 omega + eps) / lam
        assert abs(c.b0 - 11.2) < 1e-12

    @given(params_st, cplx)
    def test_identity_gauge(self, p, E):
        c0 = ode_coefficients(p, 0.0, E).as_array()
        u = untransformed_coefficients(p, E).as_array()
        assert np.all(np.abs(c0 - u) <= 1e-14 * np.maximum(1, np.abs(u)) + 1e-14 * np.abs(u).max())

    @given(st.floats(0.05, 0.45), st.floats(-1, 1), st.sampled_from([1, 2, 3, 4]))
    def test_q4_vanishes_on_branches(self, lam, eps, idx):
        a = select_branch(lam, idx).value
        c = ode_coefficients(ModelParams(delta=0.5, epsilon=eps, omega=1.0, lam=lam), a, 0.3)
        assert abs(c.q4) < 1e-9

    def test_delta_override(self):
        p = ModelParams(delta=0.5, epsilon=0.1, omega=1.0, lam=0.3)
        a = ode_coefficients(p, 0.1, 1.0)
        b = ode_coefficients(p, 0.1, 1.0, delta_sq=0.25)
        assert a == b
        c = ode_coefficients(p, 0.1, 1.0, delta_sq=-1.0)
        assert abs((c.q0 - a.q0) * p.lam**2 - 1.25) < 1e-12

    def test_perturbed(self):
        c = ode_coefficients(ModelParams(delta=0.5, epsilon=0.1, omega=1.0, lam=0.3), 0.1, 1.0)
        d = c.perturbed("q0", 1e-3)
        assert d.q0 - c.q0 == pytest.approx(1e-3) and d.p1 == c.p1
        assert c.scale == np.abs(c.as_array()).max()


class TestApplyOperator:
    def test_zero(self, rng):
        assert apply_operator(random_coeffs(rng, 0.3), ZERO).is_zero()

    def test_constant(self, rng):
        c = random_coeffs(rng, 0.7)
        out = apply_operator(c, ONE)
        assert np.allclose(out.coeffs, [c.q0, 0, c.q2, 0, c.q4])

    def test_linear_with_reduced_q4(self, rng):
        c = random_coeffs(rng, 0.0)
        out = apply_operator(c, ComplexPolynomial([0, 1]))
        assert np.allclose(out.coeffs, [0, c.p1 + c.q0, 0, c.p3 + c.q2])

    @given(st.lists(cplx, min_size=2, max_size=7), st.integers(0, 2**32 - 1))
    def test_degree_bound(self, coeffs, seed):
        phi = ComplexPolynomial(coeffs)
        c = random_coeffs(np.random.default_rng(seed), 0.0)
        out = apply_operator(c, phi)
        if phi.degree >= 1:
            assert out.degree <= phi.degree + 2

    def test_forced_modes(self, rng):
        c = random_coeffs(rng, 1e-13)
        full = apply_operator(c, ONE, reduced=False)
        assert full.degree == 4
        assert apply_operator(c, ONE).degree <= 2

    @given(st.lists(cplx, min_size=1, max_size=6), st.integers(0, 2**32 - 1))
    def test_pointwise_derivatives(self, coeffs, seed):
        rng = np.random.default_rng(seed)
        c = random_coeffs(rng, 0.4)
        phi = ComplexPolynomial(coeffs)
        z = complex(*rng.normal(size=2))
        d = [poly_eval(phi, z)]
        q = phi
        for _ in range(4):
            q = q.derivative()
            d.append(poly_eval(q, z))
        direct = (d[4] + c.a1 * z * d[3] + (c.b2 * z**2 + c.b0) * d[2]
                  + (c.p3 * z**3 + c.p1 * z) * d[1] + (c.q4 * z**4 + c.q2 * z**2 + c.q0) * d[0])
        assert abs(poly_eval(apply_operator(c, phi), z) - direct) < 1e-9 * (1 + abs(direct))


class TestResidualNorm:
    def test_zero(self):
        assert residual_norm(ZERO) == 0.0

    def test_cancellation(self):
        z2 = ComplexPolynomial.monomial(2)
        assert residual_norm(z2 - z2) == 0.0

    def test_scaling(self):
        assert residual_norm(ComplexPolynomial([3, -4j]), scale=1.0) == 2.0

    def test_ground_state_constraint(self):
        from twophoton_rabi.bethe import ground_delta_squared, ground_energy
        p = ModelParams(delta=0.0, epsilon=0.05, omega=1.0, lam=0.2)
        a = select_branch(0.2).value
        E = ground_energy(a, p)
        c = ode_coefficients(p, a, E, delta_sq=ground_delta_squared(a, p, E))
        assert operator_residual(c, ONE) < 1e-10


class TestGauge:
    @given(st.lists(cplx, min_size=1, max_size=5), cplx, st.integers(0, 2**32 - 1))
    def test_derivatives_against_finite_differences(self, coeffs, a, seed):
        a = 0.4 * a / max(1.0, abs(a))
        phi = ComplexPolynomial(coeffs)
        z = 0.7 * complex(*np.random.default_rng(seed).normal(size=2))
        h = 1e-5
        d = gauge_derivatives(a, phi, np.array([z - h, z, z + h]))
        for k in range(4):
            fd = (d[k, 2] - d[k, 0]) / (2 * h)
            assert abs(fd - d[k + 1, 1]) < 1e-6 * (1 + abs(d[k + 1, 1]))

    def test_pointwise_consistency(self, rng):
        for _ in range(50):
            p = ModelParams(delta=rng.uniform(0, 2), epsilon=rng.uniform(-1, 1),
                            omega=rng.uniform(0.5, 2), lam=rng.uniform(0.05, 1))
            a = complex(*rng.uniform(-0.45, 0.45, 2))
            E = complex(*rng.normal(size=2))
            phi = ComplexPolynomial(rng.normal(size=7) + 1j * rng.normal(size=7))
            z = 2 * np.sqrt(rng.random(20)) * np.exp(2j * np.pi * rng.random(20))
            raw = raw_residual_pointwise(p, E, a, phi, z)
            gauge = np.exp(a * z * z) * poly_eval(apply_operator(ode_coefficients(p, a, E), phi,
                                                                 reduced=False), z)
            assert np.all(np.abs(raw - gauge) < 1e-8 * (1 + np.abs(gauge)))

    def test_origin(self):
        p = ModelParams(delta=0.3, epsilon=0.2, omega=1.0, lam=0.25)
        E = 0.7
        expected = (2 * p.lam**2 + p.epsilon**2 - E**2 - p.delta**2) / p.lam**2
        assert abs(raw_residual_pointwise(p, E, 0.0, ONE, 0.0) - expected) < 1e-12
        assert abs(expected) > 1e-3
        a = 0.17
        c = ode_coefficients(p, a, E)
        assert abs(raw_residual_pointwise(p, E, a, ONE, 0.0)
                   - poly_eval(apply_operator(c, ONE, reduced=False), 0.0)) < 1e-12
