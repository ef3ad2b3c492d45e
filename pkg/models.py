"""
Catalog of the quadratic fermion Hamiltonians.

Every model is H = sum c+_x A_xy c_y (+ pairing terms with B) where A and B
are functions of the lattice operators S and T, built through their symbols.
"""

import logging
from dataclasses import asdict, dataclass
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from constants import DEFAULT_ALPHA, DEFAULT_EPSILON, DEFAULT_FILLING
from errors import IncompatibleModel
from lattice import LatticeOperator, LatticeSpec, Parity, Wavenumber, build_S, build_T, operator_function, wavenumbers

logger = logging.getLogger(__name__)


class ModelKind(Enum):
    LOCAL_HOPPING = "LocalHopping"
    LOCAL_SQUARED_HOPPING = "LocalSquaredHopping"
    LOCAL_PAIRING = "LocalPairing"
    NONCOMPACT_NL_PAIRING = "NoncompactNLPairing"
    COMPACT_NL_PAIRING = "CompactNLPairing"
    NONCOMPACT_NL_HOPPING = "NoncompactNLHopping"
    COMPACT_COS = "CompactCos"
    COMPACT_SIN = "CompactSin"

    @classmethod
    def parse(cls, value) -> "ModelKind":
        if isinstance(value, cls):
            return value
        for kind in cls:
            if value in (kind.value, kind.name) or str(value).lower() == kind.value.lower():
                return kind
        raise IncompatibleModel(f"unknown model kind {value!r}; choose from {[k.value for k in cls]}")


PAIRING_KINDS = {ModelKind.LOCAL_PAIRING, ModelKind.NONCOMPACT_NL_PAIRING, ModelKind.COMPACT_NL_PAIRING}

# Dimensions each kind is defined on
ALLOWED_DIMS = {
    ModelKind.LOCAL_HOPPING: (1, 2),
    ModelKind.LOCAL_SQUARED_HOPPING: (1, 2),
    ModelKind.LOCAL_PAIRING: (1,),
    ModelKind.NONCOMPACT_NL_PAIRING: (1,),
    ModelKind.COMPACT_NL_PAIRING: (1,),
    ModelKind.NONCOMPACT_NL_HOPPING: (1,),
    ModelKind.COMPACT_COS: (1,),
    ModelKind.COMPACT_SIN: (1, 2),
}


@dataclass(frozen=True)
class ModelSpec:
    """One Hamiltonian of the catalog and its parameters.

    Args:
        kind: Which Hamiltonian
        alpha: Dimensionless locality scale, >= 0
        epsilon: Energy scale
        filling: Particles per site, used by number-conserving kinds only
        nonrelativistic: CompactCos only; use (cos(alpha sin k) - 1) / alpha^2,
            which stays finite at alpha = 0
    """
    kind: ModelKind
    alpha: float = DEFAULT_ALPHA
    epsilon: float = DEFAULT_EPSILON
    filling: float = DEFAULT_FILLING
    nonrelativistic: bool = False

    def __post_init__(self):
        object.__setattr__(self, "kind", ModelKind.parse(self.kind))
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "epsilon", float(self.epsilon))
        object.__setattr__(self, "filling", float(self.filling))
        if not np.isfinite(self.alpha) or self.alpha < 0:
            raise IncompatibleModel(f"alpha must be a finite value >= 0, got {self.alpha}")
        if not 0.0 < self.filling <= 1.0:
            raise IncompatibleModel(f"filling must lie in (0, 1], got {self.filling}")
        if self.nonrelativistic and self.kind is not ModelKind.COMPACT_COS:
            raise IncompatibleModel("the nonrelativistic normalization applies to CompactCos only")

    @property
    def is_pairing(self) -> bool:
        return self.kind in PAIRING_KINDS

    @property
    def label(self) -> str:
        if self.kind in (ModelKind.LOCAL_HOPPING, ModelKind.LOCAL_SQUARED_HOPPING, ModelKind.LOCAL_PAIRING):
            return self.kind.value
        return f"{self.kind.value} alpha={self.alpha:g}"

    def to_dict(self) -> dict:
        data = asdict(self)
        data["kind"] = self.kind.value
        return data


@dataclass(frozen=True)
class HamiltonianPair:
    """Kinetic matrix A (symmetric) and optional pairing matrix B (antisymmetric)."""
    A: LatticeOperator
    B: Optional[LatticeOperator] = None

    @property
    def is_pairing(self) -> bool:
        return self.B is not None

    @property
    def lattice(self) -> LatticeSpec:
        return self.A.lattice


def _nonrelativistic_cos(alpha: float):
    # (cos(alpha x) - 1) / alpha^2 written as -2 sin^2(alpha x / 2) / alpha^2, x = i t
    if alpha == 0.0:
        return lambda t: 0.5 * t ** 2
    return lambda t: -2.0 * np.sin(0.5 * alpha * 1j * t) ** 2 / alpha ** 2


def build_model(spec: ModelSpec, lattice: LatticeSpec) -> HamiltonianPair:
    """Build the A (and B) matrices of a model on a lattice."""
    if lattice.dim not in ALLOWED_DIMS[spec.kind]:
        raise IncompatibleModel(f"{spec.kind.value} is not defined on a {lattice.dim}-d lattice")

    a, eps = spec.alpha, spec.epsilon
    kind = spec.kind
    S = build_S(lattice)
    even, odd = Parity.EVEN, Parity.ODD

    if kind is ModelKind.LOCAL_HOPPING:
        return HamiltonianPair(operator_function(S, lambda s: eps * s, even, "eps S"))
    if kind is ModelKind.LOCAL_SQUARED_HOPPING:
        return HamiltonianPair(operator_function(S, lambda s: eps * s ** 2, even, "eps S^2"))
    if kind is ModelKind.NONCOMPACT_NL_HOPPING:
        return HamiltonianPair(operator_function(S, lambda s: eps * np.exp(-a ** 2 * s), even,
                                                 "eps exp(-alpha^2 S)"))
    if kind is ModelKind.COMPACT_SIN:
        return HamiltonianPair(operator_function(S, lambda s: eps * np.sin(a * s), even, "eps sin(alpha S)"))

    T = build_T(lattice)
    if kind is ModelKind.COMPACT_COS:
        if spec.nonrelativistic:
            f = _nonrelativistic_cos(a)
            return HamiltonianPair(operator_function(T, lambda t: eps * f(t), even,
                                                     "eps (cos(i alpha T) - 1) / alpha^2"))
        return HamiltonianPair(operator_function(T, lambda t: eps * np.cos(1j * a * t), even,
                                                 "eps cos(i alpha T)"))
    if kind is ModelKind.LOCAL_PAIRING:
        return HamiltonianPair(operator_function(S, lambda s: eps * s, even, "S"),
                               operator_function(T, lambda t: eps * t, odd, "T"))
    if kind is ModelKind.NONCOMPACT_NL_PAIRING:
        return HamiltonianPair(operator_function(S, lambda s: eps * np.cosh(a * s), even, "cosh(alpha S)"),
                               operator_function(T, lambda t: eps * np.sinh(a * t), odd, "sinh(alpha T)"))
    if kind is ModelKind.COMPACT_NL_PAIRING:
        return HamiltonianPair(operator_function(S, lambda s: eps * np.cos(a * s), even, "cos(alpha S)"),
                               operator_function(T, lambda t: eps * np.sinh(-a * t), odd, "sinh(-alpha T)"))
    raise IncompatibleModel(f"no constructor for {kind.value}")


def band_energies(pair: HamiltonianPair) -> np.ndarray:
    """Energies on the FFT-ordered momentum grid; the positive BdG branch for pairing models."""
    a = pair.A.symbol.real
    if pair.B is None:
        return a
    return np.hypot(a, pair.B.symbol.imag)


def dispersion(spec: ModelSpec, lattice: LatticeSpec) -> List[Tuple[Wavenumber, float]]:
    """(wavenumber, energy) pairs sorted by wavenumber index."""
    pair = build_model(spec, lattice)
    energies = band_energies(pair)
    result = []
    for q in wavenumbers(lattice):
        idx = tuple(n % r for n, r in zip(q.n, lattice.extent))
        result.append((q, float(energies[idx])))
    return result
