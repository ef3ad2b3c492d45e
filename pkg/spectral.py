"""
Diagonalization of quadratic Hamiltonians.

Number-conserving models are diagonal in the plane-wave basis, so their
spectrum is read off the symbol of A. Pairing models are solved through the
Bogoliubov-de Gennes matrix

    [[ A,  B],
     [-B, -A]]

either densely or block by block in momentum space.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
import scipy.linalg as spl
from scipy.stats import spearmanr

from constants import (BDG_COMPLETENESS_TOL, BDG_NORM_TOL, DEGENERACY_RTOL, EIGEN_RESIDUAL_TOL,
                       PARTICLE_HOLE_TOL, ZERO_MODE_TOL)
from errors import DegenerateZeroMode, EigensolverResidual, IncompatibleModel, NumericalError
from lattice import LatticeSpec, momentum_grid, wavenumber_indices
from models import HamiltonianPair, ModelSpec, band_energies, build_model

logger = logging.getLogger(__name__)

# Beyond this ratio ||H|| / E_min the dense eigensolver cannot resolve the
# low-energy quasiparticles and the momentum-space solver takes over.
BDG_DENSE_MAX_CONDITION = 1e8


class SolutionKind(Enum):
    NUMBER_CONSERVING = "NumberConserving"
    BDG = "BdG"


@dataclass
class QuadraticSolution:
    """Eigen-decomposition of a quadratic Hamiltonian.

    Number-conserving: ``modes[j]`` is the wavenumber index (one entry per
    axis) of ``energies[j]`` and ``grid_index[j]`` its position in the
    FFT-ordered momentum grid. BdG: ``u[j]`` and ``v[j]`` are the real
    coefficient vectors of the quasiparticle with energy ``energies[j]``.
    """
    kind: SolutionKind
    lattice: LatticeSpec
    energies: np.ndarray
    modes: Optional[np.ndarray] = None
    grid_index: Optional[np.ndarray] = None
    u: Optional[np.ndarray] = None
    v: Optional[np.ndarray] = None
    norm: float = 1.0
    method: str = "symbol"
    meta: dict = field(default_factory=dict)

    @property
    def n_modes(self) -> int:
        return len(self.energies)


def energies_degenerate(e1: float, e2: float, rtol: float = DEGENERACY_RTOL) -> bool:
    """Degeneracy rule shared by occupation and counting code; equal infinities count as degenerate."""
    if e1 == e2:
        return True
    if not (np.isfinite(e1) and np.isfinite(e2)):
        return False
    return abs(e1 - e2) < rtol * max(1.0, abs(e1))


def _signed_index_grid(lattice: LatticeSpec) -> np.ndarray:
    """(N, dim) array of signed wavenumber indices, flattened in FFT order."""
    axes = wavenumber_indices(lattice)
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1)


def _order_modes(energies: np.ndarray, modes: np.ndarray) -> np.ndarray:
    """Ascending energy; inside a degenerate run, ascending wavenumber index."""
    order = np.argsort(energies, kind="stable")
    start = 0
    while start < len(order):
        stop = start + 1
        while stop < len(order) and energies_degenerate(energies[order[stop - 1]], energies[order[stop]]):
            stop += 1
        if stop - start > 1:
            run = order[start:stop]
            keys = [modes[run, axis] for axis in reversed(range(modes.shape[1]))]
            order[start:stop] = run[np.lexsort(keys)]
        start = stop
    return order


def diagonalize_number_conserving(H: HamiltonianPair, lattice: LatticeSpec,
                                  dense_check: bool = False) -> QuadraticSolution:
    """Plane-wave spectrum of a number-conserving Hamiltonian.

    Energies are sorted ascending; degenerate energies are ordered by
    ascending wavenumber index. With ``dense_check`` the dense spectrum of A is compared as well.
    """
    if H.is_pairing:
        raise IncompatibleModel("pairing Hamiltonian passed to the number-conserving solver")
    energies = band_energies(H).ravel()
    modes = _signed_index_grid(lattice)
    order = _order_modes(energies, modes)
    finite = energies[np.isfinite(energies)]
    norm = float(np.max(np.abs(finite))) if finite.size else 1.0

    solution = QuadraticSolution(SolutionKind.NUMBER_CONSERVING, lattice, energies[order],
                                 modes=modes[order], grid_index=order, norm=norm)
    if dense_check:
        dense = spl.eigvalsh(H.A.entries)
        deviation = float(np.max(np.abs(np.sort(dense) - np.sort(energies))))
        if deviation > EIGEN_RESIDUAL_TOL * max(1.0, norm):
            raise EigensolverResidual(f"dense spectrum deviates from symbol by {deviation:.3e}", deviation)
        solution.meta["dense_deviation"] = deviation
        logger.debug("dense spectrum check passed, deviation %.2e", deviation)
    return solution


def bdg_matrix(H: HamiltonianPair) -> np.ndarray:
    """Real symmetric 2N x 2N Bogoliubov-de Gennes matrix."""
    A, B = H.A.entries, H.B.entries
    return np.block([[A, B], [-B, -A]])


def bdg_symbol_energies(H: HamiltonianPair) -> np.ndarray:
    """Positive quasiparticle energies from the per-k 2x2 blocks, sorted ascending."""
    return np.sort(band_energies(H).ravel())


def _check_zero_modes(energies: np.ndarray):
    smallest = float(np.min(np.abs(energies)))
    if smallest < ZERO_MODE_TOL:
        raise DegenerateZeroMode(f"BdG spectrum has a zero mode (|E| = {smallest:.3e}); "
                                 f"the ground state is not unique", smallest)


def _diagonalize_bdg_dense(H: HamiltonianPair, lattice: LatticeSpec) -> QuadraticSolution:
    n = lattice.n_sites
    hb = bdg_matrix(H)
    w, vecs = spl.eigh(hb)
    norm = float(np.max(np.abs(w)))
    residual = float(np.max(np.linalg.norm(hb @ vecs - vecs * w, axis=0)))
    if residual > EIGEN_RESIDUAL_TOL * max(1.0, norm):
        raise EigensolverResidual(f"BdG eigenpair residual {residual:.3e} exceeds contract", residual)
    energies = w[n:]
    _check_zero_modes(energies)
    u = vecs[:n, n:].T.copy()
    v = vecs[n:, n:].T.copy()
    return QuadraticSolution(SolutionKind.BDG, lattice, energies, u=u, v=v, norm=norm, method="dense",
                             meta={"residual": residual})


def _diagonalize_bdg_fourier(H: HamiltonianPair, lattice: LatticeSpec) -> QuadraticSolution:
    """Real quasiparticle vectors built from the k, -k plane-wave pairs."""
    r = lattice.n_sites
    (k,) = momentum_grid(lattice)
    a = H.A.symbol.real
    beta = H.B.symbol.imag
    energy = np.hypot(a, beta)
    _check_zero_modes(energy)
    x = np.arange(r)
    (signed,) = wavenumber_indices(lattice)

    rows = []
    for m in range(r):
        n = int(signed[m])
        partner = (-n) % r
        if n < 0 and partner != m:
            continue  # handled together with +|n|
        e, am, bm = energy[m], a[m], beta[m]
        if partner == m:
            # k = 0 or pi: beta vanishes, the mode is a pure particle or hole
            wave = np.cos(k[m] * x) / np.sqrt(r)
            if am >= 0:
                rows.append((e, n, wave, np.zeros(r)))
            else:
                rows.append((e, n, np.zeros(r), wave))
            continue
        c, s = np.cos(k[m] * x), np.sin(k[m] * x)
        if am >= 0:
            scale = 1.0 / np.sqrt(r * e * (e + am))
            p = (e + am) * scale
            q = bm * scale
            rows.append((e, -n, p * c, q * s))
            rows.append((e, n, p * s, -q * c))
        else:
            scale = 1.0 / np.sqrt(r * e * (e - am))
            p = (e - am) * scale
            q = bm * scale
            rows.append((e, -n, -q * s, p * c))
            rows.append((e, n, q * c, p * s))

    rows.sort(key=lambda row: (row[0], row[1]))
    energies = np.array([row[0] for row in rows])
    u = np.array([row[2] for row in rows])
    v = np.array([row[3] for row in rows])
    return QuadraticSolution(SolutionKind.BDG, lattice, energies, u=u, v=v,
                             norm=float(np.max(energy)), method="fourier")


def diagonalize_bdg(H: HamiltonianPair, lattice: LatticeSpec, method: str = "auto") -> QuadraticSolution:
    """Quasiparticle spectrum and (u, v) vectors of a pairing Hamiltonian.

    Args:
        H: Hamiltonian with A symmetric and B antisymmetric
        lattice: Lattice the operators live on
        method: "dense" (2N x 2N symmetric eigensolver), "fourier" (per-k
            2x2 blocks) or "auto", which uses the dense solver unless the
            spectrum is too ill-conditioned for it

    Returns:
        QuadraticSolution with the N nonnegative energies sorted ascending
    """
    if not H.is_pairing:
        raise IncompatibleModel("BdG solver needs a pairing matrix B")
    if lattice.dim != 1:
        raise IncompatibleModel("BdG models are 1-d only")
    if method == "auto":
        energies = band_energies(H)
        e_min = float(np.min(energies))
        condition = float(np.max(energies)) / e_min if e_min > 0 else np.inf
        method = "dense" if condition <= BDG_DENSE_MAX_CONDITION else "fourier"
        logger.debug("BdG condition %.3e, using %s solver", condition, method)
    if method == "dense":
        solution = _diagonalize_bdg_dense(H, lattice)
    elif method == "fourier":
        solution = _diagonalize_bdg_fourier(H, lattice)
    else:
        raise IncompatibleModel(f"unknown BdG method {method!r}")

    norms = np.sum(solution.u ** 2 + solution.v ** 2, axis=1)
    deviation = float(np.max(np.abs(norms - 1.0)))
    if deviation > BDG_NORM_TOL:
        raise NumericalError(f"BdG vectors not normalized (deviation {deviation:.3e})", deviation)
    logger.info("BdG spectrum on %d sites via %s solver: E in [%.6g, %.6g]", lattice.n_sites,
                solution.method, solution.energies[0], solution.energies[-1])
    return solution


def bdg_completeness_residual(sol: QuadraticSolution) -> float:
    """max |sum_n (u u^T + v v^T) - I|."""
    total = sol.u.T @ sol.u + sol.v.T @ sol.v
    return float(np.max(np.abs(total - np.eye(total.shape[0]))))


def particle_hole_residual(H: HamiltonianPair, sol: QuadraticSolution) -> float:
    """Largest ||Hb (v, u) + E (v, u)|| relative to ||H||."""
    A, B = H.A.entries, H.B.entries
    top = sol.v @ A.T + sol.u @ B.T + sol.energies[:, None] * sol.v
    bottom = -(sol.v @ B.T) - sol.u @ A.T + sol.energies[:, None] * sol.u
    residual = np.sqrt(np.sum(top ** 2, axis=1) + np.sum(bottom ** 2, axis=1))
    return float(np.max(residual)) / max(1.0, sol.norm)


def diagonalize(H: HamiltonianPair, lattice: LatticeSpec, **kwargs) -> QuadraticSolution:
    """Dispatch to the BdG or number-conserving solver."""
    if H.is_pairing:
        return diagonalize_bdg(H, lattice, **kwargs)
    return diagonalize_number_conserving(H, lattice, **kwargs)


@dataclass(frozen=True)
class FermiPointEstimate:
    """Fermi-surface crossings of a 1-d band and the implied central charge."""
    count: int
    c_eff_estimate: float
    fermi_energy: float


def half_gap_fermi_energy(energies_sorted: np.ndarray, filling: float) -> float:
    """Midpoint between the last filled and first empty level for M = round(f N)."""
    n = len(energies_sorted)
    m = int(np.floor(filling * n + 0.5))
    if m <= 0:
        return float(energies_sorted[0]) - 1.0
    if m >= n:
        return float(energies_sorted[-1]) + 1.0
    return 0.5 * (float(energies_sorted[m - 1]) + float(energies_sorted[m]))


def count_fermi_points(spec: ModelSpec, lattice: LatticeSpec,
                       fermi_energy: Optional[float] = None) -> FermiPointEstimate:
    """Count sign changes of E(k) - E_F once around the Brillouin zone.

    Each crossing carries central charge 1/2, so c_eff = count / 2. The
    default Fermi energy sits between the last filled and first empty
    level at the model's filling.
    """
    if lattice.dim != 1 or spec.is_pairing:
        raise IncompatibleModel("Fermi-point counting needs a 1-d number-conserving model")
    energies = band_energies(build_model(spec, lattice))
    if fermi_energy is None:
        fermi_energy = half_gap_fermi_energy(np.sort(energies), spec.filling)
    # FFT order -> ascending k
    along_k = np.fft.fftshift(energies)
    above = along_k - fermi_energy >= 0
    count = int(np.count_nonzero(above != np.roll(above, 1)))
    logger.info("%s: %d Fermi points at E_F = %.6g", spec.label, count, fermi_energy)
    return FermiPointEstimate(count, count / 2.0, float(fermi_energy))


def energy_rank_correlation(sol: QuadraticSolution) -> float:
    """Spearman correlation between energy rank and |k| rank of the modes (1-d)."""
    abs_k = np.abs(sol.modes[:, 0])
    return float(spearmanr(np.arange(sol.n_modes), abs_k)[0])
