"""
Entropy sweeps over subregion size and fits of the scaling laws

    Linear      S = d L
    Log1d       S = c0 + (c_eff / 3) log L
    AreaLog2d   S / L = const + (2 / 3) c_eff log L
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import linregress

from constants import DEFAULT_WORKERS, FIT_WINDOW_FRACTION_1D, MIN_FIT_SAMPLES
from correlations import CorrelationPair, ground_state_correlations
from entanglement import Subregion, entanglement_spectrum, restrict
from errors import DegenerateWindow, InsufficientSamples, UsageError
from lattice import LatticeSpec
from models import ModelSpec

logger = logging.getLogger(__name__)


class FitForm(Enum):
    LINEAR = "linear"
    LOG1D = "log1d"
    AREALOG2D = "arealog2d"

    @classmethod
    def parse(cls, value) -> "FitForm":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise UsageError(f"unknown fit form {value!r}; choose from {[f.value for f in cls]}")


@dataclass
class EntropyCurve:
    """Entropy samples S(L) of one model on one lattice."""
    model: ModelSpec
    lattice: LatticeSpec
    L: np.ndarray
    S: np.ndarray

    def __post_init__(self):
        self.L = np.asarray(self.L, dtype=int)
        self.S = np.asarray(self.S, dtype=float)
        if self.L.shape != self.S.shape:
            raise UsageError("entropy curve needs one S per L")
        if np.any(np.diff(self.L) <= 0):
            raise UsageError("subregion sizes must be strictly increasing")

    @property
    def samples(self) -> List[Tuple[int, float]]:
        return list(zip(self.L.tolist(), self.S.tolist()))

    def window(self, L_min: float, L_max: float) -> "EntropyCurve":
        keep = (self.L >= L_min) & (self.L <= L_max)
        return EntropyCurve(self.model, self.lattice, self.L[keep], self.S[keep])


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares fit of one scaling law over a window of L."""
    form: FitForm
    params: Dict[str, float]
    window: Tuple[float, float]
    residual: float
    n_samples: int
    chord: bool = False

    @property
    def c_eff(self) -> Optional[float]:
        return self.params.get("c_eff")

    @property
    def d(self) -> Optional[float]:
        return self.params.get("d")

    def predict(self, L, R: Optional[int] = None) -> np.ndarray:
        L = np.asarray(L, dtype=float)
        if self.form is FitForm.LINEAR:
            return self.params["d"] * L
        if self.form is FitForm.LOG1D:
            x = np.log(_chord(L, R)) if self.chord else np.log(L)
            return self.params["c0"] + self.c_eff / 3.0 * x
        return L * (self.params["const"] + 2.0 / 3.0 * self.c_eff * np.log(L))


def default_window_cap(lattice: LatticeSpec) -> float:
    """Largest L used by default fits, before finite-size saturation."""
    if lattice.dim == 1:
        return lattice.extent[0] / FIT_WINDOW_FRACTION_1D
    return min(lattice.extent) / 2.0 - 1.0


def _chord(L: np.ndarray, R: int) -> np.ndarray:
    return R / np.pi * np.sin(np.pi * L / R)


def sweep(model: ModelSpec, lattice: LatticeSpec, L_values: Iterable[int], workers: int = DEFAULT_WORKERS,
          corr: Optional[CorrelationPair] = None, **kwargs) -> EntropyCurve:
    """Entropy for every subregion size; the ground state is computed once.

    Args:
        model: Model to evaluate
        lattice: Lattice to place it on
        L_values: Interval lengths (1-d) or square sides (2-d)
        workers: Threads evaluating sizes concurrently; output order is by L
        corr: Precomputed full-lattice correlations to reuse
        **kwargs: Passed to ground_state_correlations

    Returns:
        EntropyCurve sorted by L
    """
    sizes = sorted({int(L) for L in L_values})
    if not sizes:
        raise UsageError("sweep needs at least one subregion size")
    limit = min(lattice.extent)
    if sizes[0] < 1 or sizes[-1] > limit:
        raise UsageError(f"subregion sizes must lie in [1, {limit}]")
    if corr is None:
        corr = ground_state_correlations(model, lattice, **kwargs)

    def evaluate(size: int) -> float:
        S = entanglement_spectrum(restrict(corr, Subregion.of_size(lattice, size))).entropy
        logger.debug("%s L=%d S=%.12g", model.label, size, S)
        return S

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            entropies = list(pool.map(evaluate, sizes))
    else:
        entropies = [evaluate(size) for size in sizes]
    return EntropyCurve(model, lattice, np.array(sizes), np.array(entropies))


def fit(curve: EntropyCurve, form, window: Optional[Sequence[float]] = None, chord: bool = False) -> ScalingFit:
    """Ordinary least squares of one scaling law on the linearized data."""
    form = FitForm.parse(form)
    if window is None:
        window = (float(curve.L.min()) if curve.L.size else 1.0, default_window_cap(curve.lattice))
    L_min, L_max = float(window[0]), float(window[1])
    part = curve.window(L_min, L_max)
    L, S = part.L.astype(float), part.S
    if L.size < MIN_FIT_SAMPLES:
        raise InsufficientSamples(f"{form.value} fit needs {MIN_FIT_SAMPLES} samples in [{L_min:g}, {L_max:g}], "
                                  f"found {L.size}")
    if np.all(L == L[0]):
        raise DegenerateWindow("all subregion sizes in the window coincide")

    if form is FitForm.LINEAR:
        d = float(np.dot(L, S) / np.dot(L, L))
        residual = S - d * L
        params = {"d": d}
    elif form is FitForm.LOG1D:
        x = np.log(_chord(L, curve.lattice.extent[0])) if chord else np.log(L)
        reg = linregress(x, S)
        params = {"c0": float(reg.intercept), "c_eff": 3.0 * float(reg.slope)}
        residual = S - (reg.intercept + reg.slope * x)
    else:
        x = np.log(L)
        y = S / L
        reg = linregress(x, y)
        params = {"const": float(reg.intercept), "c_eff": 1.5 * float(reg.slope)}
        residual = y - (reg.intercept + reg.slope * x)

    rms = float(np.sqrt(np.mean(residual ** 2)))
    result = ScalingFit(form, params, (L_min, L_max), rms, int(L.size), chord)
    logger.info("%s fit of %s on [%g, %g]: %s (rms %.3g)", form.value, curve.model.label, L_min, L_max,
                ", ".join(f"{k}={v:.6g}" for k, v in params.items()), rms)
    return result


@dataclass
class CrossoverReport:
    """Volume-law and logarithmic fits on either side of the locality scale."""
    alpha: float
    linear: Optional[ScalingFit]
    logarithmic: Optional[ScalingFit]
    flags: List[str] = field(default_factory=list)

    @property
    def A(self) -> Optional[float]:
        return None if self.linear is None else self.linear.d

    @property
    def c_eff(self) -> Optional[float]:
        return None if self.logarithmic is None else self.logarithmic.c_eff

    @property
    def B(self) -> Optional[float]:
        """c_eff / alpha (B' in 2-d)."""
        if self.c_eff is None or self.alpha <= 0:
            return None
        return self.c_eff / self.alpha

    @property
    def partial(self) -> bool:
        return bool(self.flags)


def crossover_report(curve: EntropyCurve, alpha: float, cap: Optional[float] = None) -> CrossoverReport:
    """Fit S = A L for L < alpha and the logarithmic law for alpha < L <= cap."""
    cap = default_window_cap(curve.lattice) if cap is None else cap
    log_form = FitForm.LOG1D if curve.lattice.dim == 1 else FitForm.AREALOG2D
    flags = []

    linear = None
    linear_top = min(alpha, cap)
    lin_L = curve.L[curve.L < linear_top]
    if lin_L.size >= MIN_FIT_SAMPLES:
        linear = fit(curve, FitForm.LINEAR, (float(lin_L.min()), float(lin_L.max())))
    else:
        flags.append("log-only")

    logarithmic = None
    log_L = curve.L[(curve.L > alpha) & (curve.L <= cap)]
    if log_L.size >= MIN_FIT_SAMPLES:
        logarithmic = fit(curve, log_form, (float(log_L.min()), float(log_L.max())))
    else:
        flags.append("linear-only")

    if flags:
        logger.warning("crossover report for alpha=%g is one-sided: %s", alpha, ", ".join(flags))
    return CrossoverReport(float(alpha), linear, logarithmic, flags)


@dataclass(frozen=True)
class LinearTrend:
    slope: float
    intercept: float
    r_squared: float


def linear_trend(x: Sequence[float], y: Sequence[float]) -> LinearTrend:
    """Regression of y on x, e.g. c_eff against alpha."""
    if len(x) < 2:
        raise InsufficientSamples("a trend needs at least two points")
    reg = linregress(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    return LinearTrend(float(reg.slope), float(reg.intercept), float(reg.rvalue ** 2))
