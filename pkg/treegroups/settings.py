"""
Settings Module

Default limits shared by the library and the command line. Every value can be
overridden per call (keyword argument) or per CLI flag.
"""

# Hard cap on tree depth; a portrait at level 30 already holds 2^30 - 1 bits
MAX_LEVEL = 30

# Closure of a group table stops (truncated=True) past this many elements
DEFAULT_CAP = 2 ** 24

# Bits of 2-adic precision for exponents k and (k - 1) / 2
DEFAULT_PRECISION = 16

# Exhaustive scans over W_n are limited to |W_4| = 32768 elements
BRUTE_FORCE_MAX_LEVEL = 4

# Constructive semirigidity refuses above this level
SEMIRIGID_MAX_LEVEL = 6

# Critical orbit iteration
DEFAULT_MAX_STEPS = 64
DEFAULT_HEIGHT_BOUND = 4096

# Number of chain generators b_i used for infinite postcritical orbits
DEFAULT_CHAIN_LENGTH = 8

DEFAULT_SEED = 0
