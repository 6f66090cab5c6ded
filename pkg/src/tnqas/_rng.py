"""Named RNG streams derived from one master seed.

Every stochastic stage (dmrg-init, fit-init, agent-init, env, shots) pulls
from its own stream so toggling one noise source never perturbs another.
"""
from __future__ import annotations

import zlib

import numpy as np


def named_stream(master_seed: int, *names: str) -> np.random.Generator:
    """Return a generator keyed by (master_seed, names).

    The same (seed, names) pair always yields the same stream; different
    names yield statistically independent streams.
    """
    keys = [zlib.crc32(str(n).encode("utf-8")) for n in names]
    ss = np.random.SeedSequence([int(master_seed) & 0xFFFFFFFF, *keys])
    return np.random.default_rng(ss)
