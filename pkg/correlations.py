"""
Ground-state correlation matrices G = <c+_x c_y> and F = <c+_x c+_y>.

Number-conserving ground states are Slater determinants of plane waves, so
G is circulant and is kept as its kernel; dense blocks are cut out of the
kernel on demand. BdG ground states carry dense G and F built from the
quasiparticle vectors.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from constants import (F_ANTISYMMETRY_TOL, F_SYMMETRIZE_TOL, REAL_G_TOL, TOEPLITZ_MIN_SIZE,
                       TOEPLITZ_OCCUPATION_VARIANCE, TOEPLITZ_SEED)
from errors import IncompatibleModel, LatticeError, NonAntisymmetricF, NumericalError
from lattice import LatticeSpec, circulant_block, kernel_from_symbol
from models import ModelSpec, build_model
from spectral import QuadraticSolution, SolutionKind, diagonalize, energies_degenerate

logger = logging.getLogger(__name__)

MULTIPLET_POLICIES = ("whole", "split")


@dataclass(frozen=True)
class OccupationSet:
    """Filled plane-wave modes.

    ``filled`` holds positions in the FFT-ordered momentum grid and
    ``indices`` the matching signed wavenumber indices.
    """
    filled: np.ndarray
    indices: np.ndarray
    fraction: float
    requested: float
    n_modes: int

    @property
    def count(self) -> int:
        return len(self.filled)

    def indicator(self, lattice: LatticeSpec) -> np.ndarray:
        """0/1 occupation on the momentum grid, shaped like the lattice."""
        occ = np.zeros(lattice.n_sites)
        occ[self.filled] = 1.0
        return occ.reshape(lattice.extent)

    def is_inversion_symmetric(self, lattice: LatticeSpec) -> bool:
        """True when the set is closed under k -> -k."""
        occ = self.indicator(lattice)
        mirrored = occ
        for axis in range(occ.ndim):
            mirrored = np.roll(np.flip(mirrored, axis=axis), 1, axis=axis)
        return bool(np.array_equal(occ, mirrored))


def _multiplet_bounds(energies: np.ndarray, position: int):
    """[start, stop) of the degenerate run containing energies[position]."""
    start = position
    while start > 0 and energies_degenerate(energies[start - 1], energies[start]):
        start -= 1
    stop = position + 1
    while stop < len(energies) and energies_degenerate(energies[stop - 1], energies[stop]):
        stop += 1
    return start, stop


def select_occupation(sol: QuadraticSolution, fraction: float,
                      multiplet_policy: str = "whole") -> OccupationSet:
    """Fill the M = round(fraction N) lowest modes.

    With the "whole" policy a degenerate multiplet straddling the Fermi level
    is never split unless M sits exactly in its middle: the count moves to
    the nearer multiplet boundary, and an equidistant M is filled as
    requested in solution order. "split" always fills exactly M modes.
    """
    if sol.kind is not SolutionKind.NUMBER_CONSERVING:
        raise IncompatibleModel("occupation selection needs a number-conserving solution")
    if multiplet_policy not in MULTIPLET_POLICIES:
        raise IncompatibleModel(f"multiplet policy must be one of {MULTIPLET_POLICIES}")
    n = sol.n_modes
    m = int(np.floor(fraction * n + 0.5))
    m = min(max(m, 0), n)
    count = m
    if multiplet_policy == "whole" and 0 < m < n and energies_degenerate(sol.energies[m - 1], sol.energies[m]):
        start, stop = _multiplet_bounds(sol.energies, m - 1)
        below, above = m - start, stop - m
        if below != above:
            count = start if below < above else stop
        else:
            logger.info("filling splits a %d-fold multiplet at the Fermi level", stop - start)
    realized = count / n
    if count != m:
        logger.warning("filling %.6g realized as %.6g (%d of %d modes): degenerate multiplet at the Fermi level",
                       fraction, realized, count, n)
    return OccupationSet(filled=np.asarray(sol.grid_index[:count]), indices=np.asarray(sol.modes[:count]),
                         fraction=realized, requested=float(fraction), n_modes=n)


class CorrelationPair:
    """G and F on a lattice or on a subregion of it.

    A translation-invariant G may be held as its kernel, G[x, y] =
    g_kernel[(y - x) mod extent]; the dense matrix is then built lazily.
    ``sites`` is None for the whole lattice, else the region's site list.
    """

    def __init__(self, lattice: LatticeSpec, G: Optional[np.ndarray] = None, F: Optional[np.ndarray] = None,
                 g_kernel: Optional[np.ndarray] = None, sites: Optional[np.ndarray] = None,
                 filled: Optional[int] = None):
        if G is None and g_kernel is None:
            raise ValueError("CorrelationPair needs G or its kernel")
        self.lattice = lattice
        self.g_kernel = g_kernel
        self.sites = None if sites is None else np.asarray(sites, dtype=int)
        self.filled = filled
        self._G = G
        self._F = F

    @property
    def size(self) -> int:
        return self.lattice.n_sites if self.sites is None else len(self.sites)

    @property
    def is_number_conserving(self) -> bool:
        return self._F is None

    @cached_property
    def G(self) -> np.ndarray:
        if self._G is not None:
            return self._G
        return circulant_block(self.g_kernel, self.lattice, np.arange(self.lattice.n_sites))

    @cached_property
    def F(self) -> np.ndarray:
        if self._F is not None:
            return self._F
        return np.zeros((self.size, self.size))

    def block(self, sites) -> "CorrelationPair":
        """Principal blocks of G and F on the given sites, in the given order."""
        sites = np.asarray(sites, dtype=int)
        if self.sites is not None:
            raise LatticeError("blocks can only be cut from a whole-lattice correlation pair")
        if sites.size and (sites.min() < 0 or sites.max() >= self.lattice.n_sites):
            raise LatticeError(f"site index out of range for {self.lattice.n_sites} sites")
        if self.g_kernel is not None and self._G is None:
            g = circulant_block(self.g_kernel, self.lattice, sites)
        else:
            g = self.G[np.ix_(sites, sites)]
        f = None if self._F is None else self._F[np.ix_(sites, sites)]
        return CorrelationPair(self.lattice, G=g, F=f, sites=sites)


def correlations_number_conserving(sol: QuadraticSolution, occ: OccupationSet) -> CorrelationPair:
    """G[x, y] = (1/N) sum_{n filled} exp(i k_n.(x - y)) via one FFT; F = 0."""
    lattice = sol.lattice
    kernel = kernel_from_symbol(occ.indicator(lattice))
    if occ.is_inversion_symmetric(lattice):
        imag = float(np.max(np.abs(kernel.imag)))
        if imag > REAL_G_TOL:
            raise NumericalError(f"inversion-symmetric filling produced complex G ({imag:.3e})", imag)
        kernel = kernel.real
    else:
        logger.debug("filled set not closed under k -> -k, keeping complex G")
    return CorrelationPair(lattice, g_kernel=kernel, filled=occ.count)


def correlations_number_conserving_dense(sol: QuadraticSolution, occ: OccupationSet) -> np.ndarray:
    """Reference G from explicit plane-wave outer products."""
    lattice = sol.lattice
    coords = lattice.coordinates(np.arange(lattice.n_sites))
    k = 2.0 * np.pi * occ.indices / np.array(lattice.extent)
    waves = np.exp(1j * coords @ k.T) / np.sqrt(lattice.n_sites)
    return waves @ waves.conj().T


def correlations_bdg(sol: QuadraticSolution) -> CorrelationPair:
    """G = sum_n v_n v_n^T and F = sum_n v_n u_n^T over the positive-energy modes."""
    if sol.kind is not SolutionKind.BDG:
        raise IncompatibleModel("BdG correlations need a BdG solution")
    G = sol.v.T @ sol.v
    F = sol.v.T @ sol.u
    G = 0.5 * (G + G.T)
    asym = float(np.max(np.abs(F + F.T)))
    # F inherits the eigensolver error ||H|| eps amplified by 1 / E_min
    condition = max(1.0, sol.norm / float(np.min(sol.energies)))
    limit = F_ANTISYMMETRY_TOL * condition
    if asym > limit:
        raise NonAntisymmetricF(f"F antisymmetry violated by {asym:.3e} (limit {limit:.3e})", asym)
    if asym > F_SYMMETRIZE_TOL:
        logger.debug("antisymmetrizing F (violation %.2e)", asym)
    F = 0.5 * (F - F.T)
    return CorrelationPair(sol.lattice, G=G, F=F)


def ground_state_correlations(model: ModelSpec, lattice: LatticeSpec, multiplet_policy: str = "whole",
                              bdg_method: str = "auto") -> CorrelationPair:
    """Build, diagonalize and fill a model; the full-lattice correlation pair."""
    H = build_model(model, lattice)
    if model.is_pairing:
        sol = diagonalize(H, lattice, method=bdg_method)
        return correlations_bdg(sol)
    sol = diagonalize(H, lattice)
    occ = select_occupation(sol, model.filling, multiplet_policy)
    logger.info("%s on %s: %d of %d modes filled", model.label, lattice.extent, occ.count, occ.n_modes)
    return correlations_number_conserving(sol, occ)


@dataclass(frozen=True)
class ToeplitzStatistics:
    """Result of the random-occupation experiment."""
    R: int
    trials: int
    seed: int
    L: np.ndarray
    mean_entropy: np.ndarray
    slope: float
    offdiag_variance: float
    expected_variance: float

    @property
    def variance_ratio(self) -> float:
        return self.offdiag_variance / self.expected_variance


def random_toeplitz_oracle(R: int, trials: int, seed: int = TOEPLITZ_SEED,
                           occupation: Optional[np.ndarray] = None) -> ToeplitzStatistics:
    """Entropy of states whose plane-wave occupations are fair coin flips.

    Each trial fills every mode with probability 1/2, builds G by FFT and
    computes S(L) for L = 1..R/2. A fixed ``occupation`` replaces the coin
    flips. The off-diagonal entries of Re G should have variance
    sigma0^2 / (2R) = 1 / (8R).
    """
    from entanglement import Subregion, entanglement_spectrum, restrict

    if R < TOEPLITZ_MIN_SIZE:
        raise LatticeError(f"random Toeplitz oracle needs R >= {TOEPLITZ_MIN_SIZE}")
    if trials < 1:
        raise LatticeError("at least one trial is required")
    lattice = LatticeSpec.chain(R)
    rng = np.random.Generator(np.random.Philox(seed))
    sizes = np.arange(1, R // 2 + 1)
    entropies = np.zeros((trials, len(sizes)))
    offdiag = []
    offsets = np.array([d for d in range(1, R) if 2 * d != R])

    for trial in range(trials):
        occ = occupation if occupation is not None else (rng.random(R) < 0.5).astype(float)
        kernel = kernel_from_symbol(np.asarray(occ, dtype=float))
        corr = CorrelationPair(lattice, g_kernel=kernel, filled=int(np.sum(occ)))
        for i, L in enumerate(sizes):
            entropies[trial, i] = entanglement_spectrum(restrict(corr, Subregion.interval(lattice, int(L)))).entropy
        offdiag.append(kernel.real[offsets])

    mean = entropies.mean(axis=0)
    slope = float(np.dot(sizes, mean) / np.dot(sizes, sizes))
    variance = float(np.var(np.concatenate(offdiag)))
    expected = TOEPLITZ_OCCUPATION_VARIANCE / (2.0 * R)
    logger.info("random Toeplitz R=%d trials=%d: slope %.4f, variance ratio %.3f", R, trials, slope,
                variance / expected)
    return ToeplitzStatistics(R, trials, seed, sizes, mean, slope, variance, expected)
