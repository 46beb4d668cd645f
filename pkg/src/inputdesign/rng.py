"""Seeded random streams.

Every random draw in the package comes from a Philox4x64-10 counter-based
generator whose 128-bit key is ``(seed, stream)``, both unsigned 64-bit.
Streams are independent of call order, so per-index work can run in any
order or in parallel and still produce identical results.  Stream numbers
used by the package:

==========  ==========================================================
0           starting point of the spectral feasibility solver
1           phases and signs of the frequency-domain inverse
2           pair splits of the time-domain inverse
3           measurement noise in ``identify.simulate``
4           random inputs and baselines (``design.random_feasible``)
==========  ==========================================================

Batch commands derive the seed of item ``i`` as ``base_seed + i``.
"""

import numpy as np

SOLVER_START = 0
PHASES = 1
TDE_SPLIT = 2
NOISE = 3
BASELINE = 4


def stream(seed, index=0):
    """Philox generator keyed by ``(seed, index)``."""
    key = np.array([int(seed), int(index)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
