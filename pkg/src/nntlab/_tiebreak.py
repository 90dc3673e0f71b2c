"""Deterministic tie-breaking shared by every tree builder.

When several candidates realise the minimum attachment distance (bitwise
equality of squared distances; guaranteed for the constant-metric rrt space,
probability zero elsewhere), the winner is drawn uniformly from the tied set
ordered by ascending index.  The draw is a pure 64-bit hash of
(tie_seed, node index), so naive, grid and compiled builders reproduce the
same choice without sharing any generator state.
"""

_M64 = (1 << 64) - 1


def _mix64(x: int) -> int:
    # splitmix64 finaliser
    x = (x + 0x9E3779B97F4A7C15) & _M64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _M64
    return x ^ (x >> 31)


def tie_pick(tie_seed: int, node: int, count: int) -> int:
    """Index in [0, count) of the winner among ``count`` tied candidates.

    ``node`` is the 0-based index of the node being attached.  The modulo
    bias is of order count / 2^64 and irrelevant at any realistic count.
    """
    if count < 1:
        raise ValueError("tie_pick needs at least one candidate")
    return _mix64(_mix64(tie_seed & _M64) ^ _mix64(node & _M64)) % count
