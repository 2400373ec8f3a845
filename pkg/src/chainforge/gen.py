"""Seeded random policies and partitions for testing and benchmarks."""

from __future__ import annotations

import random

from .policy import ChainPartition, Policy
from .poset import Poset


def _bit_indices(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def random_policy(n: int, density: float, seed: int) -> Policy:
    """A random n-label policy, deterministic per seed.

    Samples a DAG on a shuffled linear order with the given edge
    probability, transitively reduces it to covers, and assigns user
    counts uniformly from 0..5.
    """
    if n < 1:
        raise ValueError("need at least one element")
    if not 0.0 <= density <= 1.0:
        raise ValueError("density must be in [0, 1]")
    rng = random.Random(seed)
    labels = [f"x{i}" for i in range(n)]
    order = labels[:]
    rng.shuffle(order)

    direct: list[int] = [0] * n  # position i -> bitmask of sampled successors j > i
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                direct[i] |= 1 << j
    above: list[int] = [0] * n  # strict reachability over positions
    for i in range(n - 1, -1, -1):
        reach = direct[i]
        for j in _bit_indices(direct[i]):
            reach |= above[j]
        above[i] = reach

    # transitive reduction: keep i < j only when nothing sits strictly between
    covers = [
        (order[i], order[j])
        for i in range(n)
        for j in _bit_indices(above[i])
        if not any(above[k] >> j & 1 for k in _bit_indices(above[i]))
    ]

    counts = {lab: rng.randint(0, 5) for lab in labels}
    return Policy(Poset(labels, covers), counts)


def random_chain_partition(poset: Poset, rng: random.Random) -> ChainPartition:
    """A haphazard but always valid chain partition.

    Places elements in reverse linear-extension order; each element either
    extends a compatible chain at its bottom or opens a new chain.
    """
    chains: list[list[str]] = []
    for x in reversed(poset.linear_extension()):
        options: list[list[str] | None] = [c for c in chains if poset.lt(x, c[-1])]
        options.append(None)
        pick = rng.choice(options)
        if pick is None:
            chains.append([x])
        else:
            pick.append(x)
    return ChainPartition(tuple(tuple(c) for c in chains))
