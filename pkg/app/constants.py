"""
Application-wide constants.
Centralizes defaults, exit codes, and report strings.
"""

# Exit Codes
EXIT_OK = 0
EXIT_ASSERTION_FAILED = 1
EXIT_INPUT_ERROR = 2
EXIT_VERIFICATION_FAILURE = 3

# Jet Calculus
DEFAULT_MAX_ORDER = 8
MIN_MAX_ORDER = 2
MAX_MAX_ORDER = 16
MAX_PRIMES = 6

# Ansatz Defaults
DEFAULT_ZETA_DEGREE = 2
DEFAULT_ETA_T_DEGREE = 1
DEFAULT_ETA_X_DEGREE = 1
DEFAULT_GAUGE_T_DEGREE = 1
DEFAULT_GAUGE_DEGREE = 2
FREQUENCIES_AUTO = 'auto'
FREQUENCIES_NONE = 'none'

# Span Matching
SAMPLE_NUMERATOR_RANGE = 5
SAMPLE_MAX_DENOMINATOR = 7
SPAN_EXTRA_POINTS = 2
SPAN_MAX_ATTEMPTS = 3

# Numeric Integration
DEFAULT_T_END = 10.0
DEFAULT_STEP = 1e-3
DEFAULT_TOL_ABS = 1e-7
DEFAULT_TOL_REL = 1e-8
LEADING_DET_THRESHOLD = 1e-9

# Problem File
PROBLEM_FORMAT_VERSION = 1
SECTION_PARAMETERS = 'parameters'
SECTION_ANSATZ = 'ansatz'
SECTION_NUMERIC = 'numeric'
SECTION_TRANSFORM = 'transform'
SECTION_EXPECTED = 'expected'
KNOWN_SECTIONS = (
    SECTION_PARAMETERS,
    SECTION_ANSATZ,
    SECTION_NUMERIC,
    SECTION_TRANSFORM,
    SECTION_EXPECTED,
)
COMMENT_PREFIX = '#'

# Output
OUTPUT_FORMATS = ('human', 'machine')
DEFAULT_OUTPUT_FORMAT = 'human'
REPORT_SCHEMA_VERSION = '1'

# Logging Configuration
LOG_SEPARATOR = '=' * 72
LOG_SECTION_SEPARATOR = '-' * 40
LOG_MAX_BYTES = 5 * 1024 * 1024
LOG_BACKUP_COUNT = 3

# Messages
ERROR_MISSING_TRANSFORM = 'Problem file has no [transform] block'
ERROR_MISSING_NUMERIC = 'Problem file has no [numeric] block'
WARNING_ZERO_HORIZON = 't_end is 0: trajectory has a single sample'
WARNING_SHORT_HORIZON = 't_end {t_end:g} is shorter than half a step ({step:g}): trajectory has a single sample'
WARNING_HORIZON_ROUNDED = 't_end {t_end:g} is not a multiple of step {step:g}: integrating to {reached:g}'
