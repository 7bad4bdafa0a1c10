"""Set partitions in strictly ordered form and Koszul signs.

A partition of [n] = {1, ..., n} is stored as a tuple of blocks; each block
is an ascending tuple of indices and blocks are ordered by their maximum.
All partition sums in the library iterate over the output of
`set_partitions`, whose order is fixed, so every computation downstream is
reproducible.
"""

from __future__ import annotations

from functools import lru_cache

DEFAULT_ARITY_CAP = 7

Partition = tuple  # tuple of ascending tuples, blocks ordered by max


class ArityCapError(RuntimeError):
    """Partition enumeration refused because the arity exceeds the cap."""


def _canon(blocks) -> Partition:
    return tuple(sorted((tuple(sorted(b)) for b in blocks), key=max))


@lru_cache(maxsize=None)
def set_partitions(n: int, cap: int = DEFAULT_ARITY_CAP) -> tuple:
    """All partitions of [n], ordered by block-max sequence then blocks."""
    if n < 1:
        raise ValueError("n must be positive")
    if n > cap:
        raise ArityCapError(f"arity {n} exceeds cap {cap}")
    parts = [((1,),)]
    for k in range(2, n + 1):
        grown = []
        for p in parts:
            for i in range(len(p)):
                grown.append(p[:i] + (p[i] + (k,),) + p[i + 1:])
            grown.append(p + ((k,),))
        parts = [_canon(p) for p in grown]
    parts.sort(key=lambda p: (tuple(max(b) for b in p), p))
    return tuple(parts)


def bell_number(n: int) -> int:
    """Independent Bell-number recurrence (triangle scheme)."""
    row = [1]
    for _ in range(n - 1):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        row = nxt
    return row[-1]


def koszul_sign(partition, degrees) -> int:
    """Sign of reordering v_1 x ... x v_n into block order.

    `degrees` lists the ghost number of v_1..v_n.  Computed by counting
    inversions between odd-degree elements, i.e. by explicit transpositions.
    """
    perm = [i for block in partition for i in block]
    n = len(perm)
    if len(degrees) != n:
        raise ValueError("degree list does not match partition size")
    sign = 1
    for a in range(n):
        if degrees[perm[a] - 1] % 2 == 0:
            continue
        for b in range(a + 1, n):
            if perm[a] > perm[b] and degrees[perm[b] - 1] % 2 != 0:
                sign = -sign
    return sign


def sort_sign(indices, degrees) -> tuple:
    """Stable-sort a tuple of indices, tracking the Koszul sign.

    `degrees[j]` is the ghost number of the element at position j of
    `indices`.  Returns (sorted_indices, sign); sign is 0 when two equal
    odd elements collide (their symmetric product vanishes).
    """
    items = list(zip(indices, degrees))
    sign = 1
    # insertion sort; counts transpositions of odd pairs
    for i in range(1, len(items)):
        j = i
        while j > 0 and items[j - 1][0] > items[j][0]:
            if items[j - 1][1] % 2 != 0 and items[j][1] % 2 != 0:
                sign = -sign
            items[j - 1], items[j] = items[j], items[j - 1]
            j -= 1
    for i in range(1, len(items)):
        if items[i - 1][0] == items[i][0] and items[i][1] % 2 != 0:
            return tuple(x for x, _ in items), 0
    return tuple(x for x, _ in items), sign


def distinguished_blocks(partition, n: int):
    """Yield (index i, block) pairs with |B_i| = n - |p| + 1.

    These are the admissible insertion points in the partition sums: every
    other block is then a singleton.
    """
    size = n - len(partition) + 1
    for i, block in enumerate(partition):
        if len(block) == size:
            yield i, block


def subsets(seq):
    """All subsets of seq as (subset, complement) pairs, order-preserving."""
    n = len(seq)
    for mask in range(1 << n):
        inc = tuple(seq[i] for i in range(n) if mask >> i & 1)
        exc = tuple(seq[i] for i in range(n) if not mask >> i & 1)
        yield inc, exc


def split_sign(subset, complement, degrees) -> int:
    """Koszul sign of reordering v_1..v_n into (v_subset, v_complement).

    `degrees` maps position index (1-based as in the sequences) to ghost
    number via degrees[i-1].
    """
    perm = list(subset) + list(complement)
    sign = 1
    for a in range(len(perm)):
        if degrees[perm[a] - 1] % 2 == 0:
            continue
        for b in range(a + 1, len(perm)):
            if perm[a] > perm[b] and degrees[perm[b] - 1] % 2 != 0:
                sign = -sign
    return sign
