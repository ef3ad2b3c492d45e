"""
Entanglement entropy of subregions from restricted correlation matrices.

For a Gaussian state the reduced density matrix of a region is fixed by the
blocks of G and F on it. The eigenvalues mu of (G - F - 1/2)(G + F - 1/2)
equal tanh^2(eps / 2) / 4 for the single-particle entanglement energies eps,
and the entropy is a sum of independent two-level contributions.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as spl
from scipy.special import entr, expit

from constants import MAX_ENTANGLEMENT_ENERGY, QUARTER_SNAP_TOL, SPECTRUM_IMAG_TOL, SPECTRUM_RANGE_TOL
from correlations import CorrelationPair, ground_state_correlations
from errors import LatticeError, SpectrumOutOfRange
from lattice import LatticeSpec
from models import ModelSpec

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Subregion:
    """Ordered set of lattice sites.

    Intervals and squares list their sites in row-major order (site index
    x + Rx*y, x fastest) starting from the anchor.
    """
    lattice: LatticeSpec
    sites: Tuple[int, ...]
    shape: str = "custom"
    size: int = 0
    anchor: Tuple[int, ...] = (0,)

    def __post_init__(self):
        sites = tuple(int(s) for s in self.sites)
        object.__setattr__(self, "sites", sites)
        if len(set(sites)) != len(sites):
            raise LatticeError("subregion sites must be distinct")
        if sites and (min(sites) < 0 or max(sites) >= self.lattice.n_sites):
            raise LatticeError(f"subregion leaves the {self.lattice.n_sites}-site lattice")

    @classmethod
    def interval(cls, lattice: LatticeSpec, length: int, anchor: int = 0) -> "Subregion":
        if lattice.dim != 1:
            raise LatticeError("intervals live on 1-d lattices; use Subregion.square in 2-d")
        r = lattice.extent[0]
        if not 1 <= length <= r:
            raise LatticeError(f"interval length must lie in [1, {r}], got {length}")
        sites = [(anchor + i) % r for i in range(length)]
        return cls(lattice, tuple(sites), "interval", length, (anchor % r,))

    @classmethod
    def square(cls, lattice: LatticeSpec, side: int, anchor: Sequence[int] = (0, 0)) -> "Subregion":
        if lattice.dim != 2:
            raise LatticeError("squares live on 2-d lattices")
        if not 1 <= side <= min(lattice.extent):
            raise LatticeError(f"square side must lie in [1, {min(lattice.extent)}], got {side}")
        x0, y0 = anchor
        sites = [lattice.site_index((x0 + x, y0 + y)) for y in range(side) for x in range(side)]
        return cls(lattice, tuple(sites), "square", side, (x0 % lattice.extent[0], y0 % lattice.extent[1]))

    @classmethod
    def of_size(cls, lattice: LatticeSpec, size: int) -> "Subregion":
        """Interval in 1-d, square in 2-d, anchored at the origin."""
        return cls.interval(lattice, size) if lattice.dim == 1 else cls.square(lattice, size)

    def complement(self) -> "Subregion":
        inside = set(self.sites)
        rest = [s for s in range(self.lattice.n_sites) if s not in inside]
        return Subregion(self.lattice, tuple(rest), "custom", len(rest), self.anchor)

    def __len__(self):
        return len(self.sites)


@dataclass(frozen=True)
class EntanglementSpectrum:
    """Single-particle entanglement energies (natural units, +inf allowed) and the entropy."""
    epsilons: np.ndarray
    entropy: float
    mu: Optional[np.ndarray] = None

    @property
    def entropy_bits(self) -> float:
        return self.entropy / np.log(2.0)


def restrict(corr: CorrelationPair, region: Subregion) -> CorrelationPair:
    """Blocks of G and F on the region's sites."""
    if region.lattice != corr.lattice:
        raise LatticeError("subregion belongs to a different lattice")
    return corr.block(np.array(region.sites, dtype=int))


def mode_entropy(epsilons: np.ndarray) -> np.ndarray:
    """log(1 + e^-eps) + eps / (1 + e^eps) per mode; zero for eps beyond the overflow cap."""
    eps = np.asarray(epsilons, dtype=float)
    out = np.zeros_like(eps)
    live = eps <= MAX_ENTANGLEMENT_ENERGY
    e = eps[live]
    out[live] = np.log1p(np.exp(-e)) + e * expit(-e)
    return out


def entanglement_spectrum(block: CorrelationPair) -> EntanglementSpectrum:
    """Entanglement energies and entropy of a region from its G and F blocks."""
    G = block.G
    F = block.F
    half = 0.5 * np.eye(G.shape[0])
    M = (G - F - half) @ (G + F - half)
    values = spl.eigvals(M)

    imag = float(np.max(np.abs(values.imag))) if values.size else 0.0
    if imag > SPECTRUM_IMAG_TOL:
        raise SpectrumOutOfRange(f"entanglement eigenvalues have imaginary parts up to {imag:.3e}", imag)
    mu = values.real
    if mu.size:
        low, high = float(mu.min()), float(mu.max())
        if low < -SPECTRUM_RANGE_TOL or high > 0.25 + SPECTRUM_RANGE_TOL:
            raise SpectrumOutOfRange(f"entanglement eigenvalues span [{low:.3e}, {high:.3e}], outside [0, 1/4]",
                                     max(-low, high - 0.25))
    mu = np.clip(mu, 0.0, 0.25)

    pure = mu >= 0.25 - QUARTER_SNAP_TOL
    eps = np.full(mu.shape, np.inf)
    eps[~pure] = 2.0 * np.arctanh(2.0 * np.sqrt(mu[~pure]))
    eps = np.sort(eps)
    entropy = float(np.sum(mode_entropy(eps)))
    return EntanglementSpectrum(eps, entropy, np.sort(mu))


def binary_entropy(block: CorrelationPair) -> float:
    """F = 0 shortcut: sum over eigenvalues z of G of -z log z - (1 - z) log(1 - z)."""
    z = np.clip(spl.eigvalsh(block.G), 0.0, 1.0)
    return float(np.sum(entr(z) + entr(1.0 - z)))


def entropy_of(model: ModelSpec, lattice: LatticeSpec, region: Subregion, **kwargs) -> float:
    """Entropy of one region in the model's ground state."""
    corr = ground_state_correlations(model, lattice, **kwargs)
    return entanglement_spectrum(restrict(corr, region)).entropy
