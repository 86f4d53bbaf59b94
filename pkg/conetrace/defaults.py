# make sure to never change/override the values here
# callers pass overrides as keyword arguments, None selects the value defined here

# absolute tolerance (radians) when classifying a transition as geometric
GEOMETRIC_TOL = 1e-9

# coarser guard used by the coefficient evaluator, cot blows up before the classifier notices
COEFFICIENT_GUARD_TOL = 1e-6

# relative tolerance when deciding that 2*pi/alpha is an integer
DIFFRACTIVE_CONE_TOL = 1e-9

# lengths closer than this are reported as one entry of the length spectrum
LENGTH_DEDUP_TOL = 1e-9

# slack on the length bound of the chain search
LENGTH_SLACK = 1e-9

# maximum number of search nodes of one enumeration
NODE_BUDGET = 10 ** 7

# start traversals handed to one worker process at a time
ENUMERATION_BATCH = 8

# mode sum: minimum truncation |k| <= K, damping schedule, acceptance of the extrapolation
DEFAULT_MODES = 10 ** 4
DAMPING_SCHEDULE = tuple(0.008 / 2 ** i for i in range(7))
EXTRAPOLATION_TOL = 1e-6
# number of decay lengths kept when the truncation is derived from the smallest damping
MODE_DECAY_LENGTHS = 36.0

# cutoff profile of the symbol, 'bump' or 'smoothstep'
CUTOFF_PROFILE = 'bump'

# quadrature of the symbol transform
TRANSFORM_NODES = 200
TRANSFORM_HORIZON = 60.0
TRANSFORM_EPSREL = 1e-10
TRANSFORM_EPSABS = 1e-13
CALIBRATION_TAUS = (1e-6, 2e-6)

# spectral comparison
PEAK_PROMINENCE = 5.0
TRACE_BLOCK_SIZE = 32

# check_hypotheses: triangle area tolerance relative to scale**2
COLLINEAR_TOL = 1e-12

# output formatting
CSV_FLOAT_FORMAT = '%.17g'
JSON_INDENT = 2

# enumeration cache
CACHE_ENV = 'CONETRACE_CACHE'
CACHE_DIR = '.conetrace-cache'
CACHE_FORMAT_VERSION = 1

# sign of the half-wave group evaluated on the links
SIGN_CONVENTION = 'exp(-i*pi*nu)'
