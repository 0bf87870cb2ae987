import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phaseavg.models import RSWEModel
from phaseavg.numerics import (
    BlockOperator,
    GridSpec,
    ShapeError,
    SpectralState,
    apply_block,
    circular_convolution,
    conjugate_symmetry_defect,
    dft_forward,
    dft_inverse,
)

N = 32


def direct_dft(x):
    n = len(x)
    j = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(j, j) / n) @ x


def direct_idft(X):
    n = len(X)
    j = np.arange(n)
    return np.exp(2j * np.pi * np.outer(j, j) / n) @ X / n


def brute_convolution(a, b):
    n = len(a)
    return np.array([sum(a[j] * b[(i - j) % n] for j in range(n)) for i in range(n)]) / n


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


class TestGrid:
    def test_wavenumbers(self):
        g = GridSpec(8)
        assert list(g.k) == [0, 1, 2, 3, 4, -3, -2, -1]
        assert g.k[0] == 0
        assert list(g.k_odd) == [0, 1, 2, 3, 0, -3, -2, -1]

    @pytest.mark.parametrize("n", [0, 1, 12, 33])
    def test_rejects_non_power_of_two(self, n):
        with pytest.raises(ValueError):
            GridSpec(n)


class TestDFT:
    def test_constant(self):
        spec = dft_forward(np.full(N, 2.5), N)
        assert spec[0] == pytest.approx(N * 2.5)
        assert np.max(np.abs(spec[1:])) < 1e-12

    def test_single_harmonic(self):
        x = GridSpec(N).x
        spec = dft_forward(np.cos(x), N)
        assert spec[1] == pytest.approx(N / 2)
        assert spec[N - 1] == pytest.approx(N / 2)
        mask = np.ones(N, bool)
        mask[[1, N - 1]] = False
        assert np.max(np.abs(spec[mask])) < 1e-12

    def test_matches_direct_sum(self, rng):
        x = rng.standard_normal(N)
        assert np.max(np.abs(dft_forward(x) - direct_dft(x))) < 1e-12
        X = rng.standard_normal(N) + 1j * rng.standard_normal(N)
        assert np.max(np.abs(dft_inverse(X) - direct_idft(X))) < 1e-12

    def test_round_trip(self, rng):
        x = rng.standard_normal(N)
        assert np.max(np.abs(dft_inverse(dft_forward(x)) - x)) < 1e-12

    def test_inverse_of_delta_spectrum(self):
        spec = np.zeros(N, complex)
        spec[0] = N
        assert np.allclose(dft_inverse(spec), 1.0, atol=1e-14)

    def test_conjugate_symmetric_spectrum_gives_real_field(self, rng):
        spec = dft_forward(rng.standard_normal(N))
        assert np.max(np.abs(dft_inverse(spec).imag)) < 1e-12

    def test_parseval(self, rng):
        x = rng.standard_normal(N) + 1j * rng.standard_normal(N)
        X = dft_forward(x)
        assert np.sum(np.abs(x) ** 2) == pytest.approx(np.sum(np.abs(X) ** 2) / N, abs=1e-10)

    def test_length_mismatch(self):
        with pytest.raises(ShapeError):
            dft_forward(np.zeros(16), N)
        with pytest.raises(ShapeError):
            dft_inverse(np.zeros(16), N)


class TestConvolution:
    def test_identity(self, rng):
        one = np.zeros(N, complex)
        one[0] = N
        b = rng.standard_normal(N) + 1j * rng.standard_normal(N)
        assert np.allclose(circular_convolution(one, b), b, atol=1e-14)

    def test_zero(self, rng):
        b = rng.standard_normal(N)
        assert np.all(circular_convolution(np.zeros(N), b) == 0)

    def test_brute_force(self, rng):
        a = rng.standard_normal(N) + 1j * rng.standard_normal(N)
        b = rng.standard_normal(N) + 1j * rng.standard_normal(N)
        assert np.max(np.abs(circular_convolution(a, b) - brute_convolution(a, b))) < 1e-12

    def test_pointwise_product_oracle(self, rng):
        a = rng.standard_normal(N) + 1j * rng.standard_normal(N)
        b = rng.standard_normal(N) + 1j * rng.standard_normal(N)
        oracle = dft_forward(dft_inverse(a) * dft_inverse(b))
        assert np.max(np.abs(circular_convolution(a, b) - oracle)) < 1e-10

    def test_commutative_and_bilinear(self, rng):
        a, b, c = (rng.standard_normal(N) + 1j * rng.standard_normal(N) for _ in range(3))
        alpha, beta = 0.3 - 1.2j, 2.0 + 0.5j
        assert np.max(np.abs(circular_convolution(a, b) - circular_convolution(b, a))) < 1e-12
        lhs = circular_convolution(alpha * a + beta * c, b)
        rhs = alpha * circular_convolution(a, b) + beta * circular_convolution(c, b)
        assert np.max(np.abs(lhs - rhs)) < 1e-12

    def test_batched(self, rng):
        a = rng.standard_normal((5, N))
        b = rng.standard_normal((5, N))
        out = circular_convolution(a, b)
        for i in range(5):
            assert np.allclose(out[i], brute_convolution(a[i], b[i]), atol=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(ShapeError):
            circular_convolution(np.zeros(8), np.zeros(16))


class TestSpectralState:
    def test_from_real_fields_is_conjugate_symmetric(self, rng):
        state = SpectralState.from_physical(rng.standard_normal((3, N)))
        assert state.n_fields == 3 and state.n_modes == N
        assert state.is_conjugate_symmetric(1e-12)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            SpectralState(np.array([[1.0, np.nan]]))

    def test_immutable(self):
        s = SpectralState(np.zeros((2, 4)))
        with pytest.raises(ValueError):
            s.data[0, 0] = 1.0

    def test_arithmetic(self):
        a = SpectralState(np.ones((1, 4)))
        b = SpectralState(2 * np.ones((1, 4)))
        assert np.all((a + b).data == 3)
        assert np.all((2 * a - b).data == 0)

    def test_symmetry_defect_detects_asymmetry(self):
        x = np.zeros(8, complex)
        x[1] = 1.0
        assert conjugate_symmetry_defect(x) == pytest.approx(1.0)


def random_blocks(rng, n, m):
    return rng.standard_normal((n, m, m)) + 1j * rng.standard_normal((n, m, m))


class TestBlockOperator:
    def test_identity(self, rng):
        op = BlockOperator(np.broadcast_to(np.eye(3), (N, 3, 3)))
        x = rng.standard_normal((3, N)) + 1j * rng.standard_normal((3, N))
        assert np.array_equal(apply_block(op, x), x)

    def test_rswe_zero_mode(self):
        model = RSWEModel()
        x = np.zeros((3, N), complex)
        x[2, 0] = 1.0
        out = apply_block(model.L, x)
        assert np.all(out == 0)

    def test_dense_oracle(self, rng):
        op = BlockOperator(random_blocks(rng, 8, 3))
        x = rng.standard_normal((3, 8)) + 1j * rng.standard_normal((3, 8))
        dense = op.dense() @ x.reshape(-1)
        assert np.max(np.abs(apply_block(op, x).reshape(-1) - dense)) < 1e-13

    def test_state_in_state_out(self, rng):
        op = BlockOperator(random_blocks(rng, 4, 2))
        s = SpectralState(rng.standard_normal((2, 4)))
        assert isinstance(op(s), SpectralState)

    def test_linear(self, rng):
        op = BlockOperator(random_blocks(rng, 8, 3))
        x, y = (rng.standard_normal((3, 8)) + 1j * rng.standard_normal((3, 8)) for _ in range(2))
        a, b = 1.5 - 0.2j, -0.7j
        diff = op(a * x + b * y) - (a * op(x) + b * op(y))
        assert np.max(np.abs(diff)) < 1e-12

    def test_composition_associative(self, rng):
        A, B, C = (BlockOperator(random_blocks(rng, 8, 3)) for _ in range(3))
        diff = ((A @ B) @ C).blocks - (A @ (B @ C)).blocks
        assert np.max(np.abs(diff)) < 1e-12

    def test_skew_hermitian_tag_is_checked(self, rng):
        B = random_blocks(rng, 4, 3)
        with pytest.raises(ValueError):
            BlockOperator(B, skew_hermitian=True)
        BlockOperator(B - np.conj(np.swapaxes(B, 1, 2)), skew_hermitian=True)

    def test_shape_mismatch(self, rng):
        op = BlockOperator(random_blocks(rng, 4, 3))
        with pytest.raises(ShapeError):
            op(np.zeros((2, 4)))


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1), st.sampled_from([4, 8, 16, 32, 64]))
def test_parseval_property(seed, n):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    X = dft_forward(x)
    assert abs(np.sum(np.abs(x) ** 2) - np.sum(np.abs(X) ** 2) / n) < 1e-10 * max(1.0, np.sum(np.abs(x) ** 2))
