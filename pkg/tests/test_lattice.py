import numpy as np
import pytest
import scipy.linalg as spl

from errors import LatticeError, NumericalError, ParityViolation
from lattice import (LatticeOperator, LatticeSpec, Parity, build_S, build_T, circulant_block,
                     dense_operator_function, operator_function, wavenumbers)


class TestLatticeSpec:
    def test_rejects_small_extent(self):
        with pytest.raises(LatticeError):
            LatticeSpec.chain(3)

    def test_rejects_three_dimensions(self):
        with pytest.raises(LatticeError):
            LatticeSpec((8, 8, 8))

    def test_rejects_open_boundaries(self):
        with pytest.raises(LatticeError):
            LatticeSpec((8,), periodic=False)

    def test_lattice_error_is_value_error(self):
        with pytest.raises(ValueError):
            LatticeSpec.chain(2)

    def test_site_index_x_runs_fastest(self):
        lattice = LatticeSpec.square(5)
        assert lattice.site_index((2, 3)) == 17
        assert lattice.site_index((-1, 0)) == 4
        np.testing.assert_array_equal(lattice.coordinates([17]), [[2, 3]])

    def test_coordinates_out_of_range(self):
        with pytest.raises(LatticeError):
            LatticeSpec.chain(8).coordinates([8])

    def test_wavenumbers_sorted_by_index(self, chain8):
        qs = wavenumbers(chain8)
        assert [q.n[0] for q in qs] == list(range(-4, 4))
        assert qs[0].k[0] == pytest.approx(-np.pi)


class TestBuildOperators:
    def test_S_row_and_symbol(self, chain8):
        S = build_S(chain8)
        np.testing.assert_allclose(S.entries[0], [0, 0.5, 0, 0, 0, 0, 0, 0.5])
        k = 2 * np.pi * np.arange(8) / 8
        np.testing.assert_allclose(S.symbol.real, np.cos(k), atol=1e-14)
        np.testing.assert_allclose(S.entries, S.entries.T)

    def test_T_row_and_symbol(self, chain8):
        T = build_T(chain8)
        assert T.entries[0, 1] == pytest.approx(0.5)
        assert T.entries[0, 7] == pytest.approx(-0.5)
        np.testing.assert_allclose(T.entries, -T.entries.T)
        k = 2 * np.pi * np.arange(8) / 8
        np.testing.assert_allclose(T.symbol, 1j * np.sin(k), atol=1e-14)

    def test_plane_wave_is_eigenvector(self, chain8):
        T = build_T(chain8)
        x = np.arange(8)
        k = 2 * np.pi * 3 / 8
        wave = np.exp(1j * k * x)
        np.testing.assert_allclose(T.entries @ wave, 1j * np.sin(k) * wave, atol=1e-14)

    def test_square_S_symbol(self):
        lattice = LatticeSpec.square(6)
        S = build_S(lattice)
        k = 2 * np.pi * np.arange(6) / 6
        expected = 2 * np.cos(k)[:, None] + 2 * np.cos(k)[None, :]
        np.testing.assert_allclose(S.symbol.real, expected, atol=1e-13)
        np.testing.assert_allclose(S.entries.sum(axis=1), 4.0)

    def test_square_weight_override(self):
        S = build_S(LatticeSpec((6, 6), s_weight=0.5))
        np.testing.assert_allclose(S.entries.sum(axis=1), 2.0)

    def test_T_only_in_one_dimension(self):
        with pytest.raises(LatticeError):
            build_T(LatticeSpec.square(6))

    def test_circulant_block_matches_scipy(self, chain10, rng):
        kernel = rng.normal(size=10)
        block = circulant_block(kernel, chain10, np.arange(10))
        np.testing.assert_allclose(block, spl.circulant(kernel).T)


class TestOperatorFunction:
    def test_exp_S_matches_expm(self):
        lattice = LatticeSpec.chain(12)
        S = build_S(lattice)
        result = operator_function(S, np.exp, Parity.EVEN)
        np.testing.assert_allclose(result.entries, spl.expm(S.entries), atol=1e-10)

    def test_cos_alpha_S_matches_expm(self):
        S = build_S(LatticeSpec.chain(12))
        alpha = 3.0
        result = operator_function(S, lambda s: np.cos(alpha * s), Parity.EVEN)
        reference = 0.5 * (spl.expm(1j * alpha * S.entries) + spl.expm(-1j * alpha * S.entries))
        np.testing.assert_allclose(result.entries, reference.real, atol=1e-10)

    def test_sinh_alpha_T_is_antisymmetric(self):
        T = build_T(LatticeSpec.chain(12))
        alpha = 2.0
        result = operator_function(T, lambda t: np.sinh(alpha * t), Parity.ODD)
        reference = 0.5 * (spl.expm(alpha * T.entries) - spl.expm(-alpha * T.entries))
        np.testing.assert_allclose(result.entries, reference, atol=1e-10)
        np.testing.assert_allclose(result.entries, -result.entries.T, atol=1e-14)

    def test_cos_i_alpha_T_dense_agrees(self):
        T = build_T(LatticeSpec.chain(16))
        f = lambda t: np.cos(2.0j * t)  # noqa: E731
        fast = operator_function(T, f, Parity.EVEN)
        np.testing.assert_allclose(fast.entries, dense_operator_function(T, f), atol=1e-10)
        assert fast.check_duality() < 1e-10

    def test_imaginary_result_is_parity_violation(self, chain8):
        with pytest.raises(ParityViolation):
            operator_function(build_S(chain8), lambda s: 1j * s, Parity.EVEN)

    def test_wrong_parity_tag(self, chain8):
        with pytest.raises(ParityViolation):
            operator_function(build_T(chain8), lambda t: t + 1.0, Parity.ODD)

    def test_overflow_disables_dense_form(self, chain8):
        op = operator_function(build_S(chain8), lambda s: np.exp(1000.0 * s), Parity.EVEN)
        assert not op.is_real_space_available
        assert np.isinf(op.symbol_at((0,)).real)
        with pytest.raises(NumericalError):
            op.entries

    def test_from_kernel_imposes_parity(self, chain8):
        kernel = np.zeros(8)
        kernel[1] = 1.0
        op = LatticeOperator.from_kernel(chain8, kernel, Parity.EVEN)
        assert op.kernel[1] == pytest.approx(0.5)
        assert op.kernel[7] == pytest.approx(0.5)
