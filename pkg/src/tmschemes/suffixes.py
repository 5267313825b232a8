"""Suffix-array utilities shared by the factor oracles and the measures.

Plain prefix-doubling construction plus Kasai's LCP computation; both are
adequate at the package's working scale (words up to a few hundred
thousand characters).
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterator

INF = float("inf")


@lru_cache(maxsize=32)
def sa_and_lcp(s: str) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Cached suffix array and LCP array for repeated queries on one word."""
    sa = suffix_array(s)
    return tuple(sa), tuple(lcp_array(s, sa))


def suffix_array(s: str) -> list[int]:
    """Start positions of the suffixes of ``s`` in lexicographic order."""
    n = len(s)
    if n == 0:
        return []
    rank = [ord(c) for c in s]
    sa = list(range(n))
    k = 1
    while True:
        def key(i):
            return (rank[i], rank[i + k] if i + k < n else -1)

        sa.sort(key=key)
        new_rank = [0] * n
        for j in range(1, n):
            new_rank[sa[j]] = new_rank[sa[j - 1]] + (key(sa[j]) != key(sa[j - 1]))
        rank = new_rank
        if rank[sa[-1]] == n - 1:
            return sa
        k <<= 1


def lcp_array(s: str, sa: list[int]) -> list[int]:
    """Kasai LCP values: lcp[r] = lcp(sa[r-1], sa[r]); lcp[0] = 0."""
    n = len(s)
    isa = [0] * n
    for r, i in enumerate(sa):
        isa[i] = r
    lcp = [0] * n
    h = 0
    for i in range(n):
        r = isa[i]
        if r == 0:
            h = 0
            continue
        j = sa[r - 1]
        while i + h < n and j + h < n and s[i + h] == s[j + h]:
            h += 1
        lcp[r] = h
        h = max(h - 1, 0)
    return lcp


def distinct_substring_counts(s: str) -> list[int]:
    """d[k] = number of distinct length-k substrings, for k = 1..len(s).

    Returned as a list indexed from 0 with d[0] unused (set to 0).
    Uses d_k = (n - k + 1) - #{adjacent suffix pairs with lcp >= k}.
    """
    n = len(s)
    counts = [0] * (n + 1)
    if n == 0:
        return counts
    sa = suffix_array(s)
    lcp = lcp_array(s, sa)
    hist = [0] * (n + 1)
    for v in lcp:
        hist[v] += 1
    ge = 0
    cnt_ge = [0] * (n + 2)
    for v in range(n, -1, -1):
        ge += hist[v]
        cnt_ge[v] = ge
    for k in range(1, n + 1):
        counts[k] = (n - k + 1) - cnt_ge[k]
    return counts


def substring_nodes(s: str, sa: list[int], lcp: list[int], leaf_value) -> Iterator[tuple]:
    """Walk the suffix-tree node set implied by the LCP array.

    ``leaf_value(rank)`` supplies a per-suffix number; each yielded node is
    ``(node_depth, parent_depth, left_rank, aggregated_min)`` where the
    aggregate is the minimum of leaf_value over the node's suffix interval.
    Leaf edges are yielded with node_depth = remaining suffix length.
    The root (depth 0) is not yielded.
    """
    n = len(s)
    if n == 0:
        return
    # leaf edges: parent depth = max of the two adjacent lcp values
    for r in range(n):
        up = max(lcp[r] if r > 0 else 0, lcp[r + 1] if r + 1 < n else 0)
        depth = n - sa[r]
        if depth > up:
            yield (depth, up, r, leaf_value(r))
    # internal lcp-intervals with aggregated minima
    stack = [[0, 0, leaf_value(0)]]  # [depth, left_rank, min_value]
    for r in range(1, n + 1):
        boundary = lcp[r] if r < n else 0
        left = r - 1
        carried = INF
        while stack and stack[-1][0] > boundary:
            depth, left, mn = stack.pop()
            mn = min(mn, carried)
            parent = max(boundary, stack[-1][0] if stack else 0)
            if depth > 0:
                yield (depth, parent, left, mn)
            carried = mn
        if stack and stack[-1][0] == boundary:
            stack[-1][2] = min(stack[-1][2], carried)
        else:
            # a fresh nested interval starts at rank r-1; its aggregate must
            # cover that leaf, which was previously folded into the parent
            stack.append([boundary, left, min(carried, leaf_value(r - 1))])
        if r < n:
            stack[-1][2] = min(stack[-1][2], leaf_value(r))
