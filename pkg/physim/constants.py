"""
Simulators and cost ledgers for physical matrix-multiplication machines.
"""
import math
import sys


# Current OS
MAC = sys.platform == "darwin"
WINDOWS = sys.platform == "win32"

# Product details
PRODUCT = "physim"
TITLE = "Physical matrix-multiplication laboratory"

# The default folder where to get/put the configuration file
if MAC:
    CONF_DIR = f"~/.{PRODUCT}"
elif WINDOWS:
    CONF_DIR = f"%LOCALAPPDATA%/{PRODUCT}"
else:
    CONF_DIR = f"$XDG_CONFIG_HOME/{PRODUCT}"

# Environment variable holding the default seed
ENV_SEED = "PHYSIM_SEED"

# CLI exit codes
EXIT_PASS = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

# Sum of 1/d² over all d >= 1
BASEL = math.pi ** 2 / 6

# Leaves that do not route to an answer channel
GARBAGE = -1

# Operations per copied item (read + write)
COPY_OPS_PER_ITEM = 2

# Operations per matmul time block (read A, read B, accumulate)
MATMUL_OPS_PER_BLOCK = 3

# Upper bound on diffusion iterations
DEFAULT_MAX_STEPS = 10_000_000
