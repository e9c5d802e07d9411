"""Constants and enums for the MB engine."""

from enum import Enum, IntEnum


class Side(Enum):
    """Position of a Gamma factor or Pochhammer symbol in a ratio."""
    NUM = "num"
    DEN = "den"

    @property
    def sign(self) -> int:
        return 1 if self is Side.NUM else -1

    def flipped(self) -> 'Side':
        return Side.DEN if self is Side.NUM else Side.NUM


class Tier(Enum):
    """Verification tier of a corpus identity."""
    EXPLICIT = "explicit"
    LITERATURE = "literature-definition-required"


class LhsKind(Enum):
    """How the left-hand side of an identity is evaluated."""
    NAMED = "named"
    INTEGRAL = "integral"
    PATH = "path"
    BLOCK = "block"


class ExitCode(IntEnum):
    """Process exit codes of the command-line interface."""
    OK = 0
    VERIFICATION_FAILED = 1
    USAGE = 2
    NON_CONVERGENT = 3


# Form letters. Single-variable letters name the five 2F1 representations,
# pair letters the F1-type, KdF-type and F2-type integrals.
SINGLE_LETTERS = "abcde"
PAIR_LETTERS = "klm"

# Letters tried by step enumeration; b, d and e read the same integrand
# shape as a and only re-parametrize it.
ENUMERATED_SINGLE_SOURCES = "ac"
ENUMERATED_PAIR_SOURCES = "klm"

# Symbolic layer
DEFAULT_VARIABLES = ("x", "y", "z")
DEFAULT_EQUALITY_SAMPLES = 5
DEFAULT_EQUALITY_SEED = 20240613
SAMPLE_MAX = 97
MAX_POLE_REDRAWS = 50

# Series summation
DEFAULT_SERIES_TOL = 1e-10
DEFAULT_MAXN_SINGLE = 2000
DEFAULT_MAXN_DOUBLE = 240
DEFAULT_MAXN_TRIPLE = 120
MIN_CONVERGENCE_SHELL = 4
MIN_DIVERGENCE_SHELL = 16
GROWTH_SHELLS = 3
DIRECT_POCHHAMMER_LIMIT = 64

# Quadrature
DEFAULT_QUAD_T_LOW = 40.0
DEFAULT_QUAD_H_LOW = 0.125
DEFAULT_QUAD_T_HIGH = 28.0
DEFAULT_QUAD_H_HIGH = 0.25
DEFAULT_QUAD_DELTA = 0.02
# default step never exceeds this fraction of the pole distance
QUAD_STEP_FRACTION_LOW = 0.35
QUAD_STEP_FRACTION_HIGH = 0.6
# nodes are spaced evenly in t up to about this scale, then stretch like sinh
QUAD_SCALE_LOW = 2.0
QUAD_SCALE_HIGH = 1.0
# step halving stops once the step-doubling difference is below rtol * |value|
QUAD_RTOL_LOW = 1e-7
QUAD_RTOL_HIGH = 1e-4
QUAD_MAX_REFINEMENTS_LOW = 3
QUAD_MAX_REFINEMENTS_HIGH = 1
CONTOUR_BOUND = 10.0
CONTOUR_MAX_MARGIN = 1.0
LOG_MAGNITUDE_LIMIT = 700.0
POLE_EPS = 1e-12

# Verification
TRANSFORM_TOL_LOW = 1e-4
TRANSFORM_TOL_HIGH = 1e-3

# Maps
DEFAULT_MAP_DEPTH = 4

# Files
DEFAULT_OUTPUT_DIR = "mbhf_output"
SEEDS_FILE = "seeds.v1.json"
NAMED_SERIES_FILE = "named-series.v1.json"
LITERATURE_SERIES_FILE = "literature-series.v1.json"
CORPUS_FILE = "identity-corpus.v1.json"
FIXTURES_DIR = "fixtures"

# Schema tags
SCHEMA_MB_INTEGRAL = "mb-integral.v1"
SCHEMA_HORN_SERIES = "horn-series.v1"
SCHEMA_SERIES_BLOCK = "series-block.v1"
SCHEMA_NAMED_SERIES = "named-series.v1"
SCHEMA_CORPUS = "identity-corpus.v1"
SCHEMA_MAP = "mb-map.v1"
SCHEMA_REPORT = "verify-report.v1"
SCHEMA_SEEDS = "mb-seeds.v1"
