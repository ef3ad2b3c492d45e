"""
Geodesic lengths in the flat-to-AdS crossover metric and fits to entropy curves.

The vertical geodesic of the spatial slice has length

    l(L) = integral_0^L sqrt(tanh(alpha_c^2 / z^2)) dz

which grows like L for L << alpha_c and like alpha_c log L beyond. The
holographic entropy is S = a l(L) + b.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import quad, simpson
from scipy.optimize import minimize_scalar

from constants import (DEFAULT_METRIC_A, DEFAULT_METRIC_B, DEGENERATE_SCALE_TOL, GEODESIC_ABS_TOL,
                       GEODESIC_QUAD_LIMIT, METRIC_ALPHA_C_MIN, METRIC_FIT_MAX_ITER, METRIC_FIT_TOL,
                       METRIC_MIN_SAMPLES, SIMPSON_STEPS_PER_UNIT)
from errors import IncompatibleModel, InsufficientSamples, NonConvergence, NumericalError
from scaling import EntropyCurve, default_window_cap

logger = logging.getLogger(__name__)

# Log-spaced alpha_c values scanned before the bounded refinement
SCAN_POINTS = 48


@dataclass(frozen=True)
class MetricParams:
    """Locality scale alpha_c of the metric, entropy scale a (absorbs 1/2G) and offset b."""
    alpha_c: float
    a: float = DEFAULT_METRIC_A
    b: float = DEFAULT_METRIC_B

    def __post_init__(self):
        if not self.alpha_c > 0:
            raise IncompatibleModel(f"alpha_c must be positive, got {self.alpha_c}")
        if not self.a > 0:
            raise IncompatibleModel(f"a must be positive, got {self.a}")

    def to_dict(self) -> dict:
        return {"alpha_c": self.alpha_c, "a": self.a, "b": self.b}


def _integrand(alpha_c: float):
    def f(z):
        if z == 0.0:
            return 1.0
        return np.sqrt(np.tanh((alpha_c / z) ** 2))
    return f


def geodesic_length_with_error(alpha_c: float, L: float, tol: float = GEODESIC_ABS_TOL) -> Tuple[float, float]:
    """Adaptive quadrature of the geodesic length and its error estimate."""
    if alpha_c <= 0:
        raise IncompatibleModel("alpha_c must be positive")
    if L < 0:
        raise IncompatibleModel("L must be nonnegative")
    if L == 0:
        return 0.0, 0.0
    points = [alpha_c] if alpha_c < L else None
    value, error = quad(_integrand(alpha_c), 0.0, L, epsabs=tol, epsrel=0.0, limit=GEODESIC_QUAD_LIMIT,
                        points=points)
    return float(value), float(error)


def geodesic_length(alpha_c: float, L: float) -> float:
    """Length of the vertical geodesic anchored on an interval of size L."""
    return geodesic_length_with_error(alpha_c, L)[0]


def geodesic_lengths(alpha_c: float, L_values: Sequence[float]) -> np.ndarray:
    """Geodesic lengths at many L, integrating piecewise between sorted sizes."""
    L_values = np.asarray(L_values, dtype=float)
    order = np.argsort(L_values)
    f = _integrand(alpha_c)
    out = np.empty_like(L_values)
    total, previous = 0.0, 0.0
    for i in order:
        upper = L_values[i]
        if upper > previous:
            piece, _ = quad(f, previous, upper, epsabs=GEODESIC_ABS_TOL, epsrel=0.0, limit=GEODESIC_QUAD_LIMIT)
            total += piece
            previous = upper
        out[i] = total
    return out


def geodesic_length_simpson(alpha_c: float, L: float, steps: Optional[int] = None) -> float:
    """Fixed-step Simpson reference for the geodesic length."""
    if L == 0:
        return 0.0
    if steps is None:
        steps = int(np.ceil(SIMPSON_STEPS_PER_UNIT * max(1.0, L / alpha_c)))
    steps += steps % 2
    z = np.linspace(0.0, L, steps + 1)
    f = _integrand(alpha_c)
    return float(simpson(np.array([f(v) for v in z]), x=z))


def holographic_entropy(params: MetricParams, L) -> np.ndarray:
    """S = a l(L) + b at one or many sizes."""
    L_arr = np.atleast_1d(np.asarray(L, dtype=float))
    values = params.a * geodesic_lengths(params.alpha_c, L_arr) + params.b
    return values if np.ndim(L) else float(values[0])


def asymptotic_entropy(params: MetricParams, L) -> np.ndarray:
    """Closed-form branches a L + b (L < alpha_c) and a alpha_c (1 + log(L / alpha_c)) + b."""
    L = np.asarray(L, dtype=float)
    safe = np.maximum(L, params.alpha_c)
    far = params.alpha_c * (1.0 + np.log(safe / params.alpha_c))
    return params.a * np.where(L < params.alpha_c, L, far) + params.b


def pure_ads_length(alpha_c: float, L, cutoff: float = 1.0) -> np.ndarray:
    """alpha_c log(L / cutoff): the integrand alpha_c / z of pure AdS from a UV cutoff to L."""
    if alpha_c <= 0 or cutoff <= 0:
        raise IncompatibleModel("alpha_c and the cutoff must be positive")
    L = np.asarray(L, dtype=float)
    return alpha_c * np.log(np.maximum(L, cutoff) / cutoff)


@dataclass(frozen=True)
class MetricFit:
    """Least-squares metric parameters for an entropy curve."""
    alpha_c: float
    a: float
    b: float
    objective: float
    rms: float
    iterations: int
    degenerate: bool
    window: Tuple[float, float]

    @property
    def params(self) -> MetricParams:
        if self.degenerate:
            raise NumericalError("metric fit is degenerate (a -> 0); the curve carries no length dependence")
        return MetricParams(self.alpha_c, self.a, self.b)


def _project(alpha_c: float, L: np.ndarray, S: np.ndarray):
    """Best (a, b) for fixed alpha_c and the residual sum of squares."""
    g = geodesic_lengths(alpha_c, L)
    design = np.column_stack([g, np.ones_like(g)])
    coef, *_ = np.linalg.lstsq(design, S, rcond=None)
    residual = S - design @ coef
    return float(coef[0]), float(coef[1]), float(np.dot(residual, residual))


def fit_metric(curve: EntropyCurve, window: Optional[Sequence[float]] = None,
               start_alpha_c: Optional[float] = None) -> MetricFit:
    """Fit (alpha_c, a, b) to an entropy curve by least squares.

    For fixed alpha_c the best a and b solve a linear problem, so only
    alpha_c is searched: a log-spaced scan brackets the minimum and a bounded
    Brent search refines it to METRIC_FIT_TOL. The scan reaches past the
    larger of the window end and twice ``start_alpha_c`` (default: the
    model's alpha).
    """
    if window is None:
        window = (float(curve.L.min()) if curve.L.size else 1.0, default_window_cap(curve.lattice))
    part = curve.window(*window)
    L, S = part.L.astype(float), part.S
    if L.size < METRIC_MIN_SAMPLES:
        raise InsufficientSamples(f"metric fit needs {METRIC_MIN_SAMPLES} samples, found {L.size}")
    start = start_alpha_c if start_alpha_c is not None else max(curve.model.alpha, 1.0)
    upper = max(float(L.max()), 2.0 * start)

    grid = np.geomspace(METRIC_ALPHA_C_MIN, upper, SCAN_POINTS)
    scores = np.array([_project(x, L, S)[2] for x in grid])
    best = int(np.argmin(scores))
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, len(grid) - 1)]

    result = minimize_scalar(lambda x: _project(x, L, S)[2], bounds=(lo, hi), method="bounded",
                             options={"xatol": METRIC_FIT_TOL, "maxiter": METRIC_FIT_MAX_ITER})
    if not result.success:
        raise NonConvergence(f"metric fit did not converge after {result.nfev} evaluations")
    alpha_c = float(result.x) if result.fun <= scores[best] else float(grid[best])
    a, b, objective = _project(alpha_c, L, S)
    degenerate = abs(a) <= DEGENERATE_SCALE_TOL * max(1.0, float(np.max(np.abs(S))))
    if degenerate:
        logger.warning("metric fit is degenerate: entropy shows no length dependence")
    rms = float(np.sqrt(objective / L.size))
    logger.info("metric fit: alpha_c=%.6g a=%.6g b=%.6g rms=%.3g", alpha_c, a, b, rms)
    return MetricFit(alpha_c, a, b, objective, rms, SCAN_POINTS + int(result.nfev), degenerate,
                     (float(window[0]), float(window[1])))


def central_charge_ratio(fit: MetricFit, lattice_c_eff: float) -> float:
    """3 a alpha_c compared with the lattice c_eff; about 1 when the metric and the lattice agree."""
    return 3.0 * fit.a * fit.alpha_c / lattice_c_eff
