import logging

import numpy as np
import pytest

from correlations import (CorrelationPair, correlations_bdg, correlations_number_conserving,
                          correlations_number_conserving_dense, ground_state_correlations,
                          random_toeplitz_oracle, select_occupation)
from errors import IncompatibleModel, LatticeError
from lattice import LatticeOperator, LatticeSpec, Parity, build_S
from models import HamiltonianPair, ModelKind, ModelSpec, build_model
from spectral import diagonalize, diagonalize_number_conserving

LOCAL = ModelSpec(ModelKind.LOCAL_HOPPING)


def local_solution(lattice):
    return diagonalize_number_conserving(build_model(LOCAL, lattice), lattice)


class TestOccupation:
    def test_half_filling_hits_requested_fraction(self, chain8, caplog):
        sol = local_solution(chain8)
        with caplog.at_level(logging.WARNING, logger="correlations"):
            occ = select_occupation(sol, 0.5)
        assert occ.count == 4
        assert occ.fraction == 0.5
        assert "realized" not in caplog.text
        G = correlations_number_conserving(sol, occ).G
        assert G[0, 0].real == pytest.approx(0.5, abs=1e-14)
        np.testing.assert_allclose(np.diag(G), 0.5, atol=1e-14)

    def test_half_filling_on_400_sites(self, chain400):
        corr = ground_state_correlations(LOCAL, chain400)
        assert corr.filled == 200
        assert corr.G[0, 0].real == pytest.approx(0.5, abs=1e-12)

    def test_whole_policy_moves_to_nearer_boundary(self, caplog):
        lattice = LatticeSpec.square(4)
        sol = local_solution(lattice)
        # energies 2cos k1 + 2cos k2 come in runs of 1, 4, 6, 4, 1
        with caplog.at_level(logging.WARNING, logger="correlations"):
            occ = select_occupation(sol, 0.4)
        assert occ.count == 5
        assert occ.fraction == pytest.approx(5 / 16)
        assert occ.requested == 0.4
        assert "realized" in caplog.text
        assert select_occupation(sol, 0.4, multiplet_policy="split").count == 6

    def test_split_policy_fills_exactly(self, chain8):
        occ = select_occupation(local_solution(chain8), 0.5, multiplet_policy="split")
        assert occ.count == 4
        assert not occ.is_inversion_symmetric(chain8)

    def test_closed_shell(self, chain10):
        occ = select_occupation(local_solution(chain10), 0.5)
        assert occ.count == 5
        assert sorted(occ.indices[:, 0].tolist()) == [-5, -4, -3, 3, 4]
        assert occ.is_inversion_symmetric(chain10)

    def test_full_filling(self, chain10):
        assert select_occupation(local_solution(chain10), 1.0).count == 10

    def test_unknown_policy(self, chain10):
        with pytest.raises(IncompatibleModel):
            select_occupation(local_solution(chain10), 0.5, multiplet_policy="random")


class TestNumberConservingCorrelations:
    def test_half_filled_diagonal(self, chain10):
        corr = ground_state_correlations(LOCAL, chain10)
        assert corr.is_number_conserving
        np.testing.assert_allclose(np.diag(corr.G), 0.5, atol=1e-14)
        assert np.isrealobj(corr.G)

    def test_projector_and_trace(self):
        lattice = LatticeSpec.chain(64)
        corr = ground_state_correlations(ModelSpec(ModelKind.COMPACT_COS, alpha=10.0), lattice)
        G = corr.G
        np.testing.assert_allclose(G @ G, G, atol=1e-12)
        np.testing.assert_allclose(G, G.conj().T, atol=1e-14)
        assert np.trace(G).real == pytest.approx(corr.filled)

    def test_direct_summation(self, chain10):
        sol = local_solution(chain10)
        occ = select_occupation(sol, 0.5)
        G = correlations_number_conserving(sol, occ).G
        x, y = 2, 7
        expected = sum(np.exp(2j * np.pi * n * (x - y) / 10) for n in occ.indices[:, 0]) / 10
        assert G[x, y] == pytest.approx(expected.real, abs=1e-14)
        np.testing.assert_allclose(G, correlations_number_conserving_dense(sol, occ), atol=1e-12)

    def test_split_filling_is_complex_hermitian(self, chain8):
        sol = local_solution(chain8)
        G = correlations_number_conserving(sol, select_occupation(sol, 0.5, "split")).G
        assert np.iscomplexobj(G)
        np.testing.assert_allclose(G, G.conj().T, atol=1e-14)
        np.testing.assert_allclose(G @ G, G, atol=1e-12)

    def test_square_lattice_matches_plane_waves(self):
        lattice = LatticeSpec.square(6)
        sol = diagonalize(build_model(ModelSpec(ModelKind.COMPACT_SIN, alpha=0.7), lattice), lattice)
        occ = select_occupation(sol, 0.5)
        G = correlations_number_conserving(sol, occ).G
        np.testing.assert_allclose(G, correlations_number_conserving_dense(sol, occ), atol=1e-12)

    def test_noncompact_hopping_identity(self, chain100):
        nonlocal_G = ground_state_correlations(ModelSpec(ModelKind.NONCOMPACT_NL_HOPPING, alpha=30.0), chain100).G
        local_G = ground_state_correlations(ModelSpec(ModelKind.LOCAL_HOPPING, epsilon=-1.0), chain100).G
        np.testing.assert_allclose(nonlocal_G, local_G, atol=1e-10)

    def test_block_out_of_range(self, chain10):
        corr = ground_state_correlations(LOCAL, chain10)
        with pytest.raises(LatticeError):
            corr.block([0, 10])

    def test_block_of_block(self, chain10):
        corr = ground_state_correlations(LOCAL, chain10)
        with pytest.raises(LatticeError):
            corr.block([0, 1]).block([0])

    def test_needs_g(self, chain10):
        with pytest.raises(ValueError):
            CorrelationPair(chain10)


class TestBdGCorrelations:
    def test_local_pairing_structure(self, chain100):
        corr = ground_state_correlations(ModelSpec(ModelKind.LOCAL_PAIRING), chain100)
        G, F = corr.G, corr.F
        assert not corr.is_number_conserving
        np.testing.assert_allclose(G, G.T, atol=1e-14)
        np.testing.assert_allclose(F, -F.T, atol=1e-14)
        n = G.shape[0]
        gamma = np.block([[G, F], [-F, np.eye(n) - G]])
        np.testing.assert_allclose(gamma @ gamma, gamma, atol=1e-10)

    def test_zero_pairing_reduces_to_slater_determinant(self, chain10):
        zero = LatticeOperator.from_kernel(chain10, np.zeros(10), Parity.ODD)
        sol = diagonalize(HamiltonianPair(build_S(chain10), zero), chain10, method="dense")
        corr = correlations_bdg(sol)
        np.testing.assert_allclose(corr.F, 0.0, atol=1e-12)
        np.testing.assert_allclose(corr.G, ground_state_correlations(LOCAL, chain10).G, atol=1e-12)

    def test_rejects_number_conserving_solution(self, chain10):
        with pytest.raises(IncompatibleModel):
            correlations_bdg(local_solution(chain10))


class TestRandomToeplitz:
    def test_extensive_and_variance(self):
        stats = random_toeplitz_oracle(128, 50)
        assert stats.slope > 0.3
        assert stats.expected_variance == pytest.approx(1 / (8 * 128))
        assert 0.8 < stats.variance_ratio < 1.2

    def test_seed_is_reproducible(self):
        first = random_toeplitz_oracle(32, 3, seed=7)
        second = random_toeplitz_oracle(32, 3, seed=7)
        np.testing.assert_array_equal(first.mean_entropy, second.mean_entropy)

    def test_fermi_sea_is_not_extensive(self):
        occupation = np.zeros(64)
        occupation[:16] = 1.0
        occupation[-16:] = 1.0
        stats = random_toeplitz_oracle(64, 1, occupation=occupation)
        assert stats.slope < 0.15

    def test_minimum_size(self):
        with pytest.raises(LatticeError):
            random_toeplitz_oracle(8, 1)
