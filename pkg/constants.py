# Constants for the nonlocal fermion entanglement toolkit

VERSION = "1.1.0"

# Lattice geometry
MIN_EXTENT = 4  # smaller periodic lattices double-count the wraparound bond
SUPPORTED_DIMS = (1, 2)
S_WEIGHT_1D = 0.5  # per nearest neighbor
S_WEIGHT_2D = 1.0  # per nearest neighbor, literal 2-d definition (symbol 2cos k1 + 2cos k2)

# Model defaults
DEFAULT_EPSILON = 1.0  # energy scale
DEFAULT_FILLING = 0.5  # particles per site
DEFAULT_ALPHA = 0.0

# Numerical tolerances
SYMBOL_TOL = 1e-10  # dense entries vs inverse FFT of the symbol
PARITY_TOL = 1e-10  # imaginary residue of a reconstructed real operator
DEGENERACY_RTOL = 1e-10  # |Ei - Ej| < tol * max(1, |Ei|)
ZERO_MODE_TOL = 1e-12
BDG_NORM_TOL = 1e-10
BDG_COMPLETENESS_TOL = 1e-8
EIGEN_RESIDUAL_TOL = 1e-9  # relative to ||H||
PARTICLE_HOLE_TOL = 1e-9  # relative to ||H||
F_ANTISYMMETRY_TOL = 1e-10
F_SYMMETRIZE_TOL = 1e-12
REAL_G_TOL = 1e-10
SPECTRUM_RANGE_TOL = 1e-8
SPECTRUM_IMAG_TOL = 1e-8
QUARTER_SNAP_TOL = 1e-14  # mu this close to 1/4 contributes no entropy
MAX_ENTANGLEMENT_ENERGY = 700.0  # exp(eps) overflows beyond this

# Random-Toeplitz oracle
TOEPLITZ_MIN_SIZE = 16
TOEPLITZ_SEED = 20120401
TOEPLITZ_OCCUPATION_VARIANCE = 0.25  # variance of a fair binary occupation

# Scaling fits
MIN_FIT_SAMPLES = 3
FIT_WINDOW_FRACTION_1D = 4  # default window stops at R/4

# Holography
GEODESIC_ABS_TOL = 1e-10
GEODESIC_QUAD_LIMIT = 500
SIMPSON_STEPS_PER_UNIT = 400  # fixed-step oracle resolution
METRIC_MIN_SAMPLES = 5
METRIC_FIT_TOL = 1e-8
METRIC_FIT_MAX_ITER = 10000
METRIC_ALPHA_C_MIN = 1e-3
DEFAULT_METRIC_A = 0.6
DEFAULT_METRIC_B = 0.5
DEGENERATE_SCALE_TOL = 1e-8  # fitted a below this flags a flat curve

# Runtime
DEFAULT_WORKERS = 1
DEFAULT_LOG_LEVEL = "WARNING"
DEFAULT_OUTPUT_DIR = "output"
SETTINGS_FILE = "settings.json"
SETTINGS_SECTIONS = ("run", "output", "plot")
RECIPES_DIR = "recipes"
RECIPE_EXTENSIONS = [".cfg", ".json"]

# Output
CSV_PRECISION = 12  # significant digits
CSV_COMMENT = "#"
PLOT_FORMAT = "svg"
PLOT_WIDTH = 6.4  # inches
PLOT_HEIGHT = 4.8
PLOT_MARKERS = ["o", "s", "D", "^", "v", "p", "h", "*"]

# Exit codes
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
