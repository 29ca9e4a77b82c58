import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from onebit_csit.numerics import (
    InvalidDimensionError,
    RandomSource,
    ZeroMatrixError,
    dft_unitary,
    frobenius_normalize,
    top_eigvec,
)


def _random_hermitian_psd(n, seed):
    g = np.random.default_rng(seed)
    b = g.standard_normal((n, n)) + 1j * g.standard_normal((n, n))
    return b.conj().T @ b


class TestDFT:
    def test_n1(self):
        assert np.array_equal(dft_unitary(1), np.array([[1.0 + 0j]]))

    def test_n2(self):
        expected = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
        assert np.allclose(dft_unitary(2), expected, atol=1e-15)

    def test_entry_formula(self):
        n = 8
        f = dft_unitary(n)
        for p in range(n):
            for q in range(n):
                assert abs(f[p, q] - np.exp(-2j * np.pi * p * q / n) / np.sqrt(n)) < 1e-14

    @pytest.mark.parametrize("n", [1, 2, 8, 64, 128, 256])
    def test_unitary(self, n):
        f = dft_unitary(n)
        # plain triple loop for small n, matmul otherwise
        if n <= 8:
            g = np.array([[sum(np.conj(f[k, p]) * f[k, q] for k in range(n)) for q in range(n)]
                          for p in range(n)])
        else:
            g = f.conj().T @ f
        assert np.max(np.abs(g - np.eye(n))) < 1e-12

    def test_zero_size(self):
        with pytest.raises(InvalidDimensionError):
            dft_unitary(0)

    def test_cached_matrix_is_read_only(self):
        with pytest.raises(ValueError):
            dft_unitary(4)[0, 0] = 2.0


class TestTopEigvec:
    def test_diagonal(self):
        res = top_eigvec(np.diag([3.0, 1.0]))
        assert abs(abs(res.vector[0]) - 1.0) < 1e-12
        assert abs(res.value - 3.0) < 1e-12
        assert res.converged

    def test_identity(self):
        res = top_eigvec(np.eye(3))
        assert abs(np.linalg.norm(res.vector) - 1.0) < 1e-12
        assert abs(np.real(np.vdot(res.vector, res.vector)) - 1.0) < 1e-12
        assert abs(res.value - 1.0) < 1e-12

    def test_random_hermitian_vs_characteristic_polynomial(self):
        a = _random_hermitian_psd(4, seed=7)
        # oracle: largest real root of det(lambda I - a)
        roots = np.roots(np.poly(a))
        lam_max = max(np.real(roots))
        res = top_eigvec(a)
        v = res.vector
        assert abs(np.linalg.norm(v) - 1.0) < 1e-12
        assert abs(np.real(np.vdot(v, a @ v)) - lam_max) < 1e-8 * lam_max

    def test_start_vector_not_orthogonal_to_dft_channel(self):
        # all-ones start would be orthogonal to every column of this Gram matrix
        M = 16
        f = dft_unitary(M)
        h_a = np.zeros((2, M), dtype=complex)
        h_a[:, [3, 5]] = [[1.0, 0.5j], [-0.3, 2.0]]
        h = dft_unitary(2) @ h_a @ f.conj().T
        res = top_eigvec(h.conj().T @ h)
        lam = np.linalg.eigvalsh(h.conj().T @ h)[-1]
        assert abs(res.value - lam) < 1e-8 * lam

    def test_non_square(self):
        with pytest.raises(InvalidDimensionError):
            top_eigvec(np.ones((2, 3)))

    def test_unconverged_is_flagged(self):
        a = np.diag([1.0, 0.999999, 0.5])
        a[0, 1] = a[1, 0] = 1e-3
        res = top_eigvec(a, tol=1e-15, max_iter=3)
        assert not res.converged
        assert res.iterations == 3
        assert abs(np.linalg.norm(res.vector) - 1.0) < 1e-12

    @given(seed=st.integers(0, 2**31 - 1), alpha=st.floats(1e-3, 1e3))
    @settings(max_examples=40, deadline=None)
    def test_scale_invariance(self, seed, alpha):
        a = _random_hermitian_psd(5, seed)
        lam = np.linalg.eigvalsh(a)
        if (lam[-1] - lam[-2]) / lam[-1] <= 1e-6:
            return
        v1 = top_eigvec(a).vector
        v2 = top_eigvec(alpha * a).vector
        assert abs(np.vdot(v1, v2)) > 1 - 1e-8


class TestFrobeniusNormalize:
    def test_345(self):
        assert np.allclose(frobenius_normalize(np.array([[3.0, 4.0]])), [[0.6, 0.8]], atol=1e-15)

    def test_complex_diag(self):
        a = np.array([[1 + 1j, 0], [0, 1 - 1j]])
        assert np.allclose(frobenius_normalize(a), a / 2, atol=1e-15)

    def test_zero(self):
        with pytest.raises(ZeroMatrixError):
            frobenius_normalize(np.zeros((2, 2)))

    @given(seed=st.integers(0, 2**31 - 1), rows=st.integers(1, 6), cols=st.integers(1, 6))
    @settings(max_examples=50, deadline=None)
    def test_unit_norm_and_idempotent(self, seed, rows, cols):
        g = np.random.default_rng(seed)
        a = g.standard_normal((rows, cols)) + 1j * g.standard_normal((rows, cols))
        b = frobenius_normalize(a)
        assert abs(np.linalg.norm(b) - 1.0) < 1e-12
        assert np.max(np.abs(frobenius_normalize(b) - b)) < 1e-12
        # positive real multiple of the input
        ratio = b[a != 0] / a[a != 0]
        assert np.allclose(ratio, ratio[0]) and abs(ratio[0].imag) < 1e-12 and ratio[0].real > 0


class TestRandomSource:
    def test_same_seed_same_draws(self):
        a, b = RandomSource(42), RandomSource(42)
        assert np.array_equal(a.complex_normal((3, 4)), b.complex_normal((3, 4)))
        assert np.array_equal(a.signs(10), b.signs(10))
        assert a.integers(0, 100) == b.integers(0, 100)

    def test_spawn_is_deterministic_and_distinct(self):
        r = RandomSource(5)
        assert r.spawn(0, 1).seed == RandomSource(5).spawn(0, 1).seed
        assert r.spawn(0, 1).seed != r.spawn(1, 0).seed

    def test_zero_noise_keeps_other_draws(self):
        a, b = RandomSource(3), RandomSource(3, zero_noise=True)
        assert not np.any(b.noise((2, 2)))
        a.noise((2, 2))
        assert np.array_equal(a.signs(8), b.signs(8))

    def test_complex_normal_moments(self):
        z = RandomSource(1).complex_normal(200_000)
        assert abs(np.var(z.real) - 0.5) < 0.01
        assert abs(np.var(z.imag) - 0.5) < 0.01
        assert abs(np.mean(np.abs(z) ** 2) - 1.0) < 0.01
