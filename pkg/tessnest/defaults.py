"""
Environment-driven defaults for tessnest
"""

import os

# Voronoi guard width in units of the mean nucleus spacing 1/sqrt(gamma)
GUARD_MULTIPLIER: float = float(os.getenv("TESSNEST_GUARD_MULTIPLIER", "5.0"))
MAX_GUARD_DOUBLINGS: int = int(os.getenv("TESSNEST_MAX_GUARD_DOUBLINGS", "8"))

# Geometric tolerance relative to the window's circumscribed radius
EPSILON_SCALE: float = float(os.getenv("TESSNEST_EPSILON_SCALE", "1e-9"))

# Worker processes for replicate pools (0 = one per CPU)
THREADS: int = int(os.getenv("TESSNEST_THREADS", "0"))

# Asymptotic variance per unit area of PVT edge length, unit intensity
BRAKKE_CONSTANT: float = float(os.getenv("TESSNEST_BRAKKE", "1.0445685"))

# Simulated E Var of boundary crossings of the typical PVT cell by an
# independent unit PVT
INNER_VARIANCE_CONSTANT: float = 2.7023

BOOTSTRAP_RESAMPLES: int = 1000
