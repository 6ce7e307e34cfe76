"""
Counter-based random streams.

All randomness in the lab flows through numpy's Philox bit generator
keyed by a 64-bit seed. Philox is counter-based: the i-th draw of a
stream depends only on (key, i), so an edge's coin flip is fixed by
(seed, edge index) no matter how or where the stream is consumed.
"""

import numpy as np

from src.utils.exceptions import ValidationError

_MASK64 = (1 << 64) - 1


def _check_seed(seed: int) -> int:
    if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
        raise ValidationError("Seed must be an integer", "seed", seed)
    if not (0 <= int(seed) <= _MASK64):
        raise ValidationError("Seed must be a 64-bit unsigned value", "seed", seed)
    return int(seed)


def philox_stream(seed: int, stream: int = 0) -> np.random.Generator:
    """
    Generator over the Philox stream keyed by (seed, stream).

    The second key word separates independent uses of the same seed
    (edges vs. partitions vs. random instances).
    """
    key = np.array([_check_seed(seed), stream & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def uniform_draws(seed: int, count: int, stream: int = 0) -> np.ndarray:
    """
    The first `count` uniforms in [0, 1) of a Philox stream.

    Draw i is a pure function of (seed, stream, i).
    """
    return philox_stream(seed, stream).random(count)


def derive_seed(master_seed: int, index: int) -> int:
    """
    Deterministic 64-bit child seed for trial `index`.

    Uses SeedSequence hashing so neighbouring indices give unrelated keys.
    """
    sequence = np.random.SeedSequence([_check_seed(master_seed), int(index)])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


# Stream identifiers
EDGE_STREAM = 0
PARTITION_STREAM = 1
INSTANCE_STREAM = 2
