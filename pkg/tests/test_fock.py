import math

import numpy as np
import pytest

from twophoton_rabi.core import ModelParams
from twophoton_rabi.errors import InvalidParameters, InvalidTruncation, TruncationUnstable
from twophoton_rabi.fock import (HamiltonianParams, build_hamiltonian, build_lab_hamiltonian,
                                 converged_level_match, spectrum, spin_rotation)


def uncoupled(delta, eps, omega, N):
    s = math.hypot(delta, eps)
    return np.sort([m * omega + sign * s for m in range(N + 1) for sign in (-1, 1)])


class TestMatrix:
    def test_structure(self):
        p = HamiltonianParams(delta=0.3, epsilon=0.2, omega=1.1, lam=0.1)
        h = build_hamiltonian(p, 6).entries
        assert h.shape == (14, 14)
        assert np.max(np.abs(h - h.T)) == 0
        assert h[0, 0] == pytest.approx(0.2) and h[1, 1] == pytest.approx(-0.2)
        assert h[2 * 3, 2 * 3] == pytest.approx(3.3 + 0.2)
        assert h[0, 1] == pytest.approx(0.3)
        # spin-up m=0 <-> m=2, spin-down with opposite sign
        assert h[0, 4] == pytest.approx(0.1 * math.sqrt(2))
        assert h[1, 5] == pytest.approx(-0.1 * math.sqrt(2))
        assert h[0, 2] == 0 and h[0, 3] == 0

    def test_coupling_element(self):
        p = HamiltonianParams(delta=0.0, epsilon=0.0, omega=1.0, lam=0.1)
        h = build_hamiltonian(p, 4).entries
        assert h[0, 4] == pytest.approx(0.1 * math.sqrt(2))
        assert h[2 * 2, 2 * 4] == pytest.approx(0.1 * math.sqrt(12))

    def test_small_truncation_rejected(self):
        p = HamiltonianParams(delta=0.0, epsilon=0.0, omega=1.0, lam=0.1)
        with pytest.raises(InvalidTruncation):
            build_hamiltonian(p, 2)
        with pytest.raises(InvalidTruncation):
            build_lab_hamiltonian(p, 3)

    def test_omega_positive(self):
        with pytest.raises(InvalidParameters):
            HamiltonianParams(delta=0.0, epsilon=0.0, omega=0.0, lam=0.0)

    def test_accepts_model_params(self):
        p = ModelParams(delta=0.5, epsilon=0.1, omega=1.0, lam=0.2)
        assert build_hamiltonian(p, 10).dim == 22

    def test_rotation_equivalence(self):
        p = HamiltonianParams(delta=0.7, epsilon=-0.3, omega=1.0, lam=0.15)
        U = spin_rotation(20)
        lab = build_lab_hamiltonian(p, 20).entries
        rotated = U @ lab @ U.T
        assert np.allclose(rotated, build_hamiltonian(p, 20).entries, atol=1e-14)
        assert np.allclose(spectrum(lab), spectrum(build_hamiltonian(p, 20)), atol=1e-10)


class TestSpectrum:
    @pytest.mark.parametrize("delta,eps,omega", [(1.0, 0.3, 1.0), (0.4, -0.7, 1.3)])
    def test_uncoupled(self, delta, eps, omega):
        vals = spectrum(build_hamiltonian(HamiltonianParams(delta, eps, omega, 0.0), 40))
        assert np.abs(vals - uncoupled(delta, eps, omega, 40)).max() < 1e-10

    def test_harmonic_ladder(self):
        vals = spectrum(build_hamiltonian(HamiltonianParams(0.0, 0.0, 0.8, 0.0), 10))
        assert np.allclose(vals, np.repeat(0.8 * np.arange(11), 2), atol=1e-12)

    def test_diagonal(self):
        assert np.array_equal(spectrum(np.diag([3.0, 1.0, 2.0])), [1.0, 2.0, 3.0])

    def test_trace(self, rng):
        a = rng.normal(size=(30, 30))
        m = a + a.T
        assert abs(spectrum(m).sum() - np.trace(m)) < 1e-8 * max(1.0, abs(np.trace(m)))

    def test_convergence_below_collapse(self):
        p = HamiltonianParams(delta=0.6, epsilon=0.2, omega=1.0, lam=0.45)
        lo = spectrum(build_hamiltonian(p, 80))[:10]
        hi = spectrum(build_hamiltonian(p, 160))[:10]
        assert np.abs(hi - lo).max() < 1e-8


class TestLevelMatch:
    def test_uncoupled_match(self):
        p = HamiltonianParams(delta=0.6, epsilon=0.8, omega=1.0, lam=0.0)
        m = converged_level_match(p, 1.0)
        assert m.matched and m.truncation == 40 and m.nearest == pytest.approx(1.0)

    def test_far_energy(self):
        p = HamiltonianParams(delta=0.6, epsilon=0.8, omega=1.0, lam=0.2)
        m = converged_level_match(p, 1e3)
        assert not m.matched

    def test_true_eigenvalue(self):
        p = HamiltonianParams(delta=0.6, epsilon=0.8, omega=1.0, lam=0.3)
        e = spectrum(build_hamiltonian(p, 200))[3]
        assert converged_level_match(p, e).matched

    def test_regime(self):
        with pytest.raises(InvalidParameters):
            converged_level_match(HamiltonianParams(0.5, 0.0, 1.0, 0.5), 0.0)

    def test_unstable(self):
        # ground level near collapse still drifts by ~4e-4 from N=20 to N=40
        p = HamiltonianParams(delta=0.5, epsilon=0.0, omega=1.0, lam=0.49)
        e = spectrum(build_hamiltonian(p, 40))[0]
        with pytest.raises(TruncationUnstable):
            converged_level_match(p, e, tol=1e-3, ladder=(10, 20, 40))
