"""Deterministic numerical laboratory for focusing-mKdV soliton gases.

The package solves the exact meromorphic dressing problem for finite spectral
data, verifies the collapse of quadrature-domain condensates onto finite
soliton ensembles ("shielding"), and evaluates the elliptic step-like profile
of the ellipse gas through its genus-one theta model.

Reproducibility contract: all entry points are pure functions of their inputs,
reductions use fixed summation order, and BLAS threading is pinned below so a
given config produces byte-identical outputs for any worker-pool size.
"""

import os as _os

# Pin BLAS pools before numpy ever spins them up: grid-point parallelism is
# handled by our own pool (SSLAB_THREADS), and single-threaded kernels keep
# floating-point reduction order fixed across machines and pool sizes.
for _var in ("OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS", "OMP_NUM_THREADS",
             "NUMEXPR_NUM_THREADS", "VECLIB_MAXIMUM_THREADS"):
    _os.environ.setdefault(_var, "1")

__version__ = "0.1.0"
