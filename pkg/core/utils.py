"""
Bitset helpers. A subset of an indexed ground set of size n is an int whose
bit i is set when element i belongs to it.
"""
from typing import Iterable, Iterator, List, Sequence

import numpy as np


def full_mask(n: int) -> int:
    return (1 << n) - 1


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def iter_bits(mask: int) -> Iterator[int]:
    """Yield the indices of the set bits, lowest first."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def is_subset(a: int, b: int) -> bool:
    return a & ~b == 0


def canonical_order(masks: Iterable[int]) -> List[int]:
    """
    Deduplicate and sort masks by (size, value): the empty set first, the largest last.
    """
    return sorted(set(masks), key=lambda m: (popcount(m), m))


def intersection_closure(seeds: Iterable[int], top: int) -> List[int]:
    """
    Smallest intersection-closed family containing the seeds and top.
    Worklist saturation: every new member is intersected with the seeds only,
    which is enough because each member is an intersection of seeds.
    """
    gens = canonical_order(s & top for s in seeds)
    family = {top}
    queue = [top]
    for g in gens:
        if g not in family:
            family.add(g)
            queue.append(g)
    while queue:
        current = queue.pop()
        for g in gens:
            meet = current & g
            if meet not in family:
                family.add(meet)
                queue.append(meet)
    return canonical_order(family)


def names_of(mask: int, names: Sequence[str]) -> List[str]:
    return [names[i] for i in iter_bits(mask)]


def render(mask: int, names: Sequence[str]) -> str:
    """Human-readable form of a subset, e.g. {p,q}."""
    return "{" + ",".join(names_of(mask, names)) + "}"


# ------------------------- numpy mask arrays -------------------------
def fits_uint64(width: int) -> bool:
    return width <= 64


def mask_array(masks: Sequence[int]) -> np.ndarray:
    """Pack masks of a ground set with at most 64 elements into a uint64 array."""
    return np.array(list(masks), dtype=np.uint64)


def union_failures(family: Sequence[int], width: int, chunk: int = 256) -> Iterator[tuple]:
    """
    Yield (i, j) with i < j for every pair of members whose union is not a member.
    Vectorised over row chunks when the ground set fits in 64 bits.
    """
    members = list(family)
    n = len(members)
    if not fits_uint64(width):
        present = set(members)
        for i in range(n):
            for j in range(i + 1, n):
                if members[i] | members[j] not in present:
                    yield i, j
        return

    arr = mask_array(members)
    sorted_arr = np.sort(arr)
    for start in range(0, n, chunk):
        rows = arr[start:start + chunk]
        unions = np.bitwise_or.outer(rows, arr)
        pos = np.searchsorted(sorted_arr, unions)
        pos = np.minimum(pos, n - 1)
        missing = sorted_arr[pos] != unions
        ii, jj = np.nonzero(missing)
        for di, j in zip(ii.tolist(), jj.tolist()):
            i = start + di
            if i < j:
                yield i, j


def count_union_failures(family: Sequence[int], width: int, chunk: int = 256) -> int:
    """Number of unordered member pairs whose union is not a member."""
    members = list(family)
    n = len(members)
    if n < 2:
        return 0
    if not fits_uint64(width):
        return sum(1 for _ in union_failures(members, width))

    arr = mask_array(members)
    sorted_arr = np.sort(arr)
    total = 0
    for start in range(0, n, chunk):
        rows = arr[start:start + chunk]
        unions = np.bitwise_or.outer(rows, arr)
        pos = np.minimum(np.searchsorted(sorted_arr, unions), n - 1)
        missing = sorted_arr[pos] != unions
        # keep j > i only
        row_idx = np.arange(start, start + len(rows))[:, None]
        col_idx = np.arange(n)[None, :]
        total += int(np.count_nonzero(missing & (col_idx > row_idx)))
    return total


def meet_irreducible_masks(family: Sequence[int], top: int) -> List[int]:
    """
    Members m != top that differ from the intersection of their strict supersets.
    Every member is an intersection of these (top being the empty intersection).
    """
    members = list(family)
    result = []
    if fits_uint64(top.bit_length()) and len(members) > 64:
        arr = mask_array(members)
        all_ones = np.uint64(top)
        for m in members:
            if m == top:
                continue
            mm = np.uint64(m)
            supers = arr[((arr & mm) == mm) & (arr != mm)]
            meet = np.bitwise_and.reduce(supers) if supers.size else all_ones
            if int(meet) != m:
                result.append(m)
        return result

    for m in members:
        if m == top:
            continue
        meet = top
        for c in members:
            if c != m and m & ~c == 0:
                meet &= c
        if meet != m:
            result.append(m)
    return result
