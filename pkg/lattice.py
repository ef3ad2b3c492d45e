"""
Lattice geometry and translation-invariant operators.

Sites of a 1-d chain are numbered 0..R-1. In 2-d the site (x, y) has index
x + Rx*y (x runs fastest). Every operator built here is circulant, so it is
stored by its kernel (row 0 reshaped to the lattice) and its symbol

    sigma(k) = sum_y O[0, y] exp(i k.y)

so the plane wave exp(i k.x) is an eigenvector with eigenvalue sigma(k).
The dense matrix O[x, y] = kernel[(y - x) mod extent] is only materialized
on request.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as spl

from constants import MIN_EXTENT, PARITY_TOL, S_WEIGHT_1D, S_WEIGHT_2D, SUPPORTED_DIMS, SYMBOL_TOL
from errors import LatticeError, NumericalError, ParityViolation

logger = logging.getLogger(__name__)


class Parity(Enum):
    """Symmetry of a real lattice operator."""
    EVEN = "even"  # symmetric, real symbol
    ODD = "odd"  # antisymmetric, imaginary symbol


@dataclass(frozen=True)
class LatticeSpec:
    """Periodic hypercubic lattice in one or two dimensions.

    Args:
        extent: Sites per axis, (R,) or (Rx, Ry)
        periodic: Must be True; open boundaries are not supported
        s_weight: Hopping weight per nearest neighbor in S. None picks 1/2 in
            1-d and 1 in 2-d.
    """
    extent: Tuple[int, ...]
    periodic: bool = True
    s_weight: Optional[float] = None

    def __post_init__(self):
        extent = tuple(int(r) for r in np.atleast_1d(self.extent))
        object.__setattr__(self, "extent", extent)
        if len(extent) not in SUPPORTED_DIMS:
            raise LatticeError(f"dimension must be one of {SUPPORTED_DIMS}, got {len(extent)}")
        if any(r < MIN_EXTENT for r in extent):
            raise LatticeError(f"every extent must be >= {MIN_EXTENT}, got {extent}")
        if not self.periodic:
            raise LatticeError("only periodic lattices are supported")

    @classmethod
    def chain(cls, sites: int, **kwargs) -> "LatticeSpec":
        return cls((sites,), **kwargs)

    @classmethod
    def square(cls, side: int, **kwargs) -> "LatticeSpec":
        return cls((side, side), **kwargs)

    @property
    def dim(self) -> int:
        return len(self.extent)

    @property
    def n_sites(self) -> int:
        return int(np.prod(self.extent))

    @property
    def neighbor_weight(self) -> float:
        if self.s_weight is not None:
            return float(self.s_weight)
        return S_WEIGHT_1D if self.dim == 1 else S_WEIGHT_2D

    def site_index(self, coords: Sequence[int]) -> int:
        """Site index of lattice coordinates, wrapping periodically."""
        wrapped = tuple(int(c) % r for c, r in zip(coords, self.extent))
        return int(np.ravel_multi_index(wrapped, self.extent, order="F"))

    def coordinates(self, sites) -> np.ndarray:
        """Coordinates of site indices as an (n, dim) integer array."""
        sites = np.asarray(sites, dtype=int)
        if np.any(sites < 0) or np.any(sites >= self.n_sites):
            raise LatticeError(f"site index out of range for {self.n_sites} sites")
        return np.stack(np.unravel_index(sites, self.extent, order="F"), axis=-1)

    def to_dict(self) -> dict:
        data = {"extent": list(self.extent)}
        if self.s_weight is not None:
            data["s_weight"] = self.s_weight
        return data


@dataclass(frozen=True)
class Wavenumber:
    """Integer index n and wavenumber k = 2 pi n / R per axis, n in [-R/2, R/2)."""
    n: Tuple[int, ...]
    k: Tuple[float, ...]


def wavenumber_indices(lattice: LatticeSpec) -> List[np.ndarray]:
    """Signed integer indices per axis in FFT order."""
    return [np.rint(np.fft.fftfreq(r, d=1.0 / r)).astype(int) for r in lattice.extent]


def momentum_grid(lattice: LatticeSpec) -> Tuple[np.ndarray, ...]:
    """Wavenumber arrays shaped like the lattice, in FFT order."""
    axes = [2.0 * np.pi * n / r for n, r in zip(wavenumber_indices(lattice), lattice.extent)]
    return tuple(np.meshgrid(*axes, indexing="ij"))


def wavenumbers(lattice: LatticeSpec) -> List[Wavenumber]:
    """All wavenumbers sorted by their integer indices."""
    axes = [np.sort(n) for n in wavenumber_indices(lattice)]
    grids = np.meshgrid(*axes, indexing="ij")
    result = []
    for n in zip(*(g.ravel() for g in grids)):
        n = tuple(int(v) for v in n)
        result.append(Wavenumber(n, tuple(2.0 * np.pi * v / r for v, r in zip(n, lattice.extent))))
    return result


def symbol_from_kernel(kernel: np.ndarray) -> np.ndarray:
    """sigma(k) = sum_d kernel[d] exp(i k.d), in FFT order."""
    return np.fft.ifftn(kernel) * kernel.size


def kernel_from_symbol(symbol: np.ndarray) -> np.ndarray:
    """Inverse of symbol_from_kernel."""
    return np.fft.fftn(symbol) / symbol.size


def circulant_block(kernel: np.ndarray, lattice: LatticeSpec, rows, cols=None) -> np.ndarray:
    """Matrix block O[rows, cols] of the circulant operator with this kernel."""
    cols = rows if cols is None else cols
    row_xy = lattice.coordinates(rows)
    col_xy = lattice.coordinates(cols)
    offsets = (col_xy[None, :, :] - row_xy[:, None, :]) % np.array(lattice.extent)
    return kernel[tuple(offsets[..., axis] for axis in range(lattice.dim))]


class LatticeOperator:
    """Translation-invariant operator on a periodic lattice."""

    def __init__(self, lattice: LatticeSpec, symbol: np.ndarray, kernel: Optional[np.ndarray],
                 parity: Parity, name: str = ""):
        self.lattice = lattice
        self.symbol = symbol
        self.kernel = kernel
        self.parity = parity
        self.name = name

    @classmethod
    def from_kernel(cls, lattice: LatticeSpec, kernel: np.ndarray, parity: Parity,
                    name: str = "") -> "LatticeOperator":
        kernel = _impose_parity(np.asarray(kernel, dtype=float), parity)
        symbol = _project_symbol(symbol_from_kernel(kernel), parity)
        return cls(lattice, symbol, kernel, parity, name)

    @cached_property
    def entries(self) -> np.ndarray:
        """Dense real N x N matrix in site order."""
        if self.kernel is None:
            raise NumericalError(f"operator {self.name or '?'} has non-finite symbol values; "
                                 f"no dense form exists")
        sites = np.arange(self.lattice.n_sites)
        return circulant_block(self.kernel, self.lattice, sites)

    @property
    def is_real_space_available(self) -> bool:
        return self.kernel is not None

    def symbol_at(self, n: Sequence[int]) -> complex:
        """Symbol value at integer wavenumber index n."""
        return complex(self.symbol[tuple(int(v) % r for v, r in zip(n, self.lattice.extent))])

    def symbol_values(self) -> np.ndarray:
        """Symbol values flattened in site order of the reciprocal lattice."""
        return self.symbol.ravel(order="F")

    def check_duality(self, tol: float = SYMBOL_TOL) -> float:
        """Max deviation between the kernel and the inverse FFT of the symbol."""
        if self.kernel is None:
            raise NumericalError(f"operator {self.name or '?'} has no finite kernel")
        deviation = float(np.max(np.abs(kernel_from_symbol(self.symbol) - self.kernel)))
        scale = max(1.0, float(np.max(np.abs(self.kernel))))
        if deviation > tol * scale:
            raise NumericalError(f"operator {self.name}: dense entries deviate from symbol by {deviation:.3e}",
                                 deviation)
        return deviation

    def __repr__(self):
        return f"LatticeOperator({self.name!r}, extent={self.lattice.extent}, parity={self.parity.value})"


def _reflect(kernel: np.ndarray) -> np.ndarray:
    """kernel[-d] for every offset d."""
    out = kernel
    for axis in range(kernel.ndim):
        out = np.roll(np.flip(out, axis=axis), 1, axis=axis)
    return out


def _impose_parity(kernel: np.ndarray, parity: Parity) -> np.ndarray:
    if parity is Parity.EVEN:
        return 0.5 * (kernel + _reflect(kernel))
    return 0.5 * (kernel - _reflect(kernel))


def _project_symbol(symbol: np.ndarray, parity: Parity) -> np.ndarray:
    if parity is Parity.EVEN:
        return symbol.real.astype(complex)
    return 1j * symbol.imag


def build_S(lattice: LatticeSpec) -> LatticeOperator:
    """Symmetric nearest-neighbor operator S.

    1-d: S[x, y] = (delta(x, y+1) + delta(x, y-1)) / 2, symbol cos k.
    2-d: weight 1 per neighbor by default, symbol 2 cos k1 + 2 cos k2.
    """
    w = lattice.neighbor_weight
    kernel = np.zeros(lattice.extent)
    for axis in range(lattice.dim):
        for step in (1, -1):
            offset = [0] * lattice.dim
            offset[axis] = step % lattice.extent[axis]
            kernel[tuple(offset)] += w
    return LatticeOperator.from_kernel(lattice, kernel, Parity.EVEN, name="S")


def build_T(lattice: LatticeSpec) -> LatticeOperator:
    """Antisymmetric central difference, (T f)(x) = (f(x+1) - f(x-1)) / 2.

    Row 0 is [0, 1/2, 0, ..., 0, -1/2] and the symbol is i sin k.
    """
    if lattice.dim != 1:
        raise LatticeError("T is only defined on 1-d lattices")
    r = lattice.extent[0]
    kernel = np.zeros(r)
    kernel[1] = 0.5
    kernel[r - 1] = -0.5
    return LatticeOperator.from_kernel(lattice, kernel, Parity.ODD, name="T")


def operator_function(op: LatticeOperator, f: Callable[[np.ndarray], np.ndarray], parity: Parity,
                      name: str = "") -> LatticeOperator:
    """Apply a scalar function to a circulant operator through its symbol.

    The result is real with the requested parity; an inverse transform with
    an imaginary part above tolerance means the parity tag does not match f.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        raw = np.asarray(f(op.symbol), dtype=complex)
    name = name or f"f({op.name})"
    if not np.all(np.isfinite(raw)):
        logger.debug("%s: symbol not finite everywhere, dense form disabled", name)
        return LatticeOperator(op.lattice, _project_symbol(raw, parity), None, parity, name)

    kernel = kernel_from_symbol(raw)
    scale = max(1.0, float(np.max(np.abs(kernel))))
    imag = float(np.max(np.abs(kernel.imag)))
    if imag > PARITY_TOL * scale:
        raise ParityViolation(f"{name}: reconstructed operator has imaginary part {imag:.3e}", imag)
    asym = float(np.max(np.abs(_impose_parity(kernel.real, _other(parity)))))
    if asym > PARITY_TOL * scale:
        raise ParityViolation(f"{name}: operator is not {parity.value} (residual {asym:.3e})", asym)
    return LatticeOperator.from_kernel(op.lattice, kernel.real, parity, name=name)


def _other(parity: Parity) -> Parity:
    return Parity.ODD if parity is Parity.EVEN else Parity.EVEN


def dense_operator_function(op: LatticeOperator, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Reference f(op) through a dense eigendecomposition of the matrix."""
    m = op.entries
    if op.parity is Parity.EVEN:
        values, vectors = spl.eigh(m)
    else:
        beta, vectors = spl.eigh(-1j * m)
        values = 1j * beta
    result = (vectors * f(values.astype(complex))) @ vectors.conj().T
    return result.real
