import os

# -------------------------------
# Nonlinear power method (general p)
# -------------------------------
PNORM_TOL = float(os.getenv("EMBEDNORM_PNORM_TOL", "1e-10"))
PNORM_MAX_ITERS = int(os.getenv("EMBEDNORM_PNORM_MAX_ITERS", "50000"))
RANDOM_STARTS = int(os.getenv("EMBEDNORM_RANDOM_STARTS", "8"))

# -------------------------------
# Spectral norm (p = 2)
# -------------------------------
SPECTRAL_TOL = float(os.getenv("EMBEDNORM_SPECTRAL_TOL", "1e-12"))
SPECTRAL_MAX_ITERS = int(os.getenv("EMBEDNORM_SPECTRAL_MAX_ITERS", "10000"))

# -------------------------------
# Capacity limits
# -------------------------------
MAX_ENUM_DIM = 30                      # full powerset enumeration
MAX_ENDPOINT_DIM = int(os.getenv("EMBEDNORM_MAX_ENUM_DIM", "20"))  # subset-sum closed forms
MAX_DENSE_SETS = int(os.getenv("EMBEDNORM_MAX_DENSE_SETS", "4096"))
MAX_SPARSE_ENTRIES = int(os.getenv("EMBEDNORM_MAX_SPARSE_ENTRIES", "2000000"))
MAX_QUAD_DIM = 3
MAX_ORACLE_DIM = 16

# -------------------------------
# Quadrature
# -------------------------------
QUAD_NODES = int(os.getenv("EMBEDNORM_QUAD_NODES", "64"))
QUAD_PANEL_ORDER = 8

# -------------------------------
# CLI
# -------------------------------
N_JOBS = int(os.getenv("EMBEDNORM_N_JOBS", "1"))
LOG_LEVEL = os.getenv("EMBEDNORM_LOG_LEVEL", "WARNING")
REPORT_SLACK = 1e-9
