"""Counter-based RNG streams.

Every random draw in the package comes from a Philox generator keyed by
(seed, domain, sub). Philox is counter-based, so streams for distinct keys
are independent by construction and a given key always replays the same
sequence, which is what makes generation parallelizable by clause block and
experiment rows reproducible in isolation.
"""

import numpy as np

_MASK64 = (1 << 64) - 1

# key namespaces; sub-ids live in the low 32 bits
DOMAIN_GENERATION = 1
DOMAIN_SOLVER = 2

# solver sub-ids
SUB_UNIT_CLAUSE = 1
SUB_SHORTEST_CLAUSE = 2
SUB_WALKSAT = 3


def philox(seed: int, domain: int, sub: int) -> np.random.Generator:
    """Generator for the (seed, domain, sub) stream."""
    if sub < 0 or sub >= (1 << 32):
        raise ValueError("sub-id out of range")
    key = [int(seed) & _MASK64, (int(domain) << 32) | int(sub)]
    return np.random.Generator(np.random.Philox(key=key))
