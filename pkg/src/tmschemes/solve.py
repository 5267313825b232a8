"""Exact desk-scale solvers for the two NP-hard quantities: smallest
valid bidirectional scheme and smallest string attractor.

Both solvers enumerate candidates in a fixed lexicographic order, by
increasing size, so the first hit is simultaneously the optimum and the
canonical witness.  The search stream can be partitioned into chunks
evaluated by a worker pool; chunks are consumed in stream order, which
keeps results identical for every worker count.  Exhausting the time
budget yields an explicit bracket (proven lower bound, verified upper
bound witness) rather than a silent wrong answer.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from collections import deque
from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterable, Iterator, Optional

from .errors import BudgetError, InternalError, UsageError
from .schemes import Copy, Ground, MacroScheme, Phrase, validate
from .suffixes import INF, sa_and_lcp, substring_nodes
from .words import check_word


@dataclass(frozen=True)
class SearchLimits:
    """Caps on solver effort; solvers refuse words beyond max_word_length."""

    max_word_length: int
    time_budget: Optional[float] = None  # seconds
    worker_count: int = 1


SCHEME_LIMITS = SearchLimits(max_word_length=20)
ATTRACTOR_LIMITS = SearchLimits(max_word_length=64)


@dataclass(frozen=True)
class SearchOutcome:
    """Solver result: exact when lower == upper, else a bracket."""

    lower: int
    upper: int
    witness: object

    @property
    def exact(self) -> bool:
        return self.lower == self.upper

    @property
    def size(self) -> int:
        if not self.exact:
            raise UsageError(f"no exact value: bracket [{self.lower}, {self.upper}]")
        return self.upper


class _Deadline:
    def __init__(self, seconds: Optional[float]):
        self.at = None if seconds is None else time.monotonic() + seconds

    def check(self):
        if self.at is not None and time.monotonic() > self.at:
            raise BudgetError("time budget exhausted")


def _chunked(stream: Iterable, size: int) -> Iterator[list]:
    chunk = []
    for item in stream:
        chunk.append(item)
        if len(chunk) >= size:
            yield chunk
            chunk = []
    if chunk:
        yield chunk


def _first_hit(chunks: Iterator[list], evaluate, workers: int):
    """First non-None result of ``evaluate`` over chunks, in stream order."""
    if workers <= 1:
        for chunk in chunks:
            hit = evaluate(chunk)
            if hit is not None:
                return hit
        return None
    with ThreadPoolExecutor(max_workers=workers) as pool:
        pending = deque()
        try:
            for chunk in chunks:
                pending.append(pool.submit(evaluate, chunk))
                while pending and pending[0].done():
                    hit = pending.popleft().result()
                    if hit is not None:
                        return hit
                if len(pending) >= 4 * workers:
                    hit = pending.popleft().result()
                    if hit is not None:
                        return hit
            while pending:
                hit = pending.popleft().result()
                if hit is not None:
                    return hit
            return None
        finally:
            for fut in pending:
                fut.cancel()


# --- string attractors ----------------------------------------------------


def attractor_missing(w: str, positions: Iterable[int]) -> Optional[str]:
    """None when ``positions`` is a string attractor of ``w``; otherwise the
    shortest (then lexicographically smallest) substring none of whose
    occurrences contains a position of the set.

    A substring of length L occurring at starts O is hit exactly when some
    start s in O has an attractor position within [s, s+L-1].  Walking the
    suffix-tree intervals with the per-suffix distance to the next
    attractor position answers this for every distinct substring at once.
    """
    check_word(w)
    n = len(w)
    pos = sorted(set(positions))
    if pos and (pos[0] < 0 or pos[-1] >= n):
        raise UsageError(f"attractor positions out of range [0, {n})")
    if n == 0:
        return None
    posset = set(pos)
    cost = [INF] * n  # distance from i to the next attractor position >= i
    nxt = INF
    for i in range(n - 1, -1, -1):
        if i in posset:
            nxt = i
        cost[i] = nxt - i if nxt is not INF else INF
    sa, lcp = sa_and_lcp(w)
    best = None
    for depth, parent_depth, left_rank, mn in substring_nodes(
        w, sa, lcp, lambda r: cost[sa[r]]
    ):
        if mn > parent_depth:
            ell = parent_depth + 1
            cand = w[sa[left_rank] : sa[left_rank] + ell]
            if best is None or (len(cand), cand) < (len(best), best):
                best = cand
    return best


def is_attractor(w: str, positions: Iterable[int]) -> bool:
    """True when every distinct substring of ``w`` has an occurrence
    containing one of ``positions``."""
    return attractor_missing(w, positions) is None


def _coverage_masks(w: str) -> list[int]:
    """One bitmask per distinct substring: the union of positions covered
    by its occurrences.  A position set hits the substring iff it meets
    the union.  Reduced to the minimal masks (supersets dropped)."""
    n = len(w)
    masks: dict[str, int] = {}
    for length in range(1, n + 1):
        window = (1 << length) - 1
        for s in range(n - length + 1):
            masks.setdefault(w[s : s + length], 0)
            masks[w[s : s + length]] |= window << s
    unique = sorted(set(masks.values()), key=lambda m: (bin(m).count("1"), m))
    kept: list[int] = []
    for m in unique:
        if not any(k & m == k for k in kept):
            kept.append(m)
    return kept


def min_attractor(w: str, limits: SearchLimits = ATTRACTOR_LIMITS) -> SearchOutcome:
    """Smallest string attractor with its lexicographically smallest
    witness set, by exhaustive enumeration of position subsets in
    increasing size."""
    check_word(w)
    n = len(w)
    if n > limits.max_word_length:
        raise BudgetError(
            f"word length {n} exceeds the attractor search limit "
            f"{limits.max_word_length}"
        )
    if n == 0:
        return SearchOutcome(0, 0, ())
    deadline = _Deadline(limits.time_budget)
    masks = _coverage_masks(w)
    greedy = _greedy_attractor(n, masks)
    lower = len(set(w))

    def evaluate(chunk):
        deadline.check()
        for combo in chunk:
            s_mask = 0
            for p in combo:
                s_mask |= 1 << p
            if all(s_mask & m for m in masks):
                return combo
        return None

    for k in range(lower, n + 1):
        try:
            hit = _first_hit(
                _chunked(combinations(range(n), k), 2048),
                evaluate,
                limits.worker_count,
            )
        except BudgetError:
            return SearchOutcome(k, len(greedy), tuple(greedy))
        if hit is not None:
            if attractor_missing(w, hit) is not None:
                raise InternalError(f"witness {hit} failed re-verification")
            return SearchOutcome(k, k, tuple(hit))
    raise InternalError("the full position set is always an attractor")


def _greedy_attractor(n: int, masks: list[int]) -> list[int]:
    """Deterministic greedy cover; verified upper-bound witness."""
    remaining = list(masks)
    chosen: list[int] = []
    while remaining:
        best_p, best_cnt = -1, -1
        for p in range(n):
            bit = 1 << p
            cnt = sum(1 for m in remaining if m & bit)
            if cnt > best_cnt:
                best_p, best_cnt = p, cnt
        chosen.append(best_p)
        bit = 1 << best_p
        remaining = [m for m in remaining if not m & bit]
    return sorted(chosen)


def naive_is_attractor(w: str, positions: Iterable[int]) -> bool:
    """Reference check: direct scan over every distinct substring."""
    pos = set(positions)
    n = len(w)
    seen = set()
    for i in range(n):
        for j in range(i + 1, n + 1):
            sub = w[i:j]
            if sub in seen:
                continue
            seen.add(sub)
            covered = False
            k = w.find(sub)
            while k >= 0 and not covered:
                if any(k <= p < k + len(sub) for p in pos):
                    covered = True
                k = w.find(sub, k + 1)
            if not covered:
                return False
    return True


def naive_min_attractor(w: str) -> tuple[int, tuple[int, ...]]:
    """Reference solver: first subset, by size then lexicographic order,
    passing the reference check."""
    n = len(w)
    if n == 0:
        return 0, ()
    for k in range(1, n + 1):
        for combo in combinations(range(n), k):
            if naive_is_attractor(w, combo):
                return k, combo
    raise InternalError("unreachable: the full set is an attractor")


# --- smallest bidirectional scheme -----------------------------------------

_UNSET = -1
_BOT = -2


def _occurrence_lists(w: str) -> dict[str, list[int]]:
    occ: dict[str, list[int]] = {}
    n = len(w)
    for length in range(2, n + 1):
        for s in range(n - length + 1):
            occ.setdefault(w[s : s + length], []).append(s)
    return occ


def _parsing(starts: tuple[int, ...], n: int) -> list[tuple[int, int]]:
    ends = starts[1:] + (n,)
    return [(s, e - s) for s, e in zip(starts, ends)]


def _acyclic_after(f: list[int], positions: range) -> bool:
    """No cycle through any of ``positions`` in the partial source map;
    unassigned positions count as safe until they get a source."""
    for x0 in positions:
        x = x0
        walk = set()
        while x >= 0:
            if x in walk:
                return False
            walk.add(x)
            x = f[x]
    return True


def _search_parsing(w, phrases, occ, deadline) -> Optional[list[Optional[int]]]:
    """Backtrack over per-phrase source choices; None when no valid
    assignment exists.  Sources are tried in ascending order so the first
    complete assignment is canonical."""
    n = len(w)
    f = [_UNSET] * n
    copy_idx = []
    cands: list[list[int]] = []
    for start, length in phrases:
        if length == 1:
            f[start] = _BOT
        else:
            content = w[start : start + length]
            options = [s for s in occ.get(content, ()) if s != start]
            if not options:
                return None
            copy_idx.append((start, length))
            cands.append(options)

    chosen: list[Optional[int]] = [None] * len(copy_idx)

    def assign(i: int) -> bool:
        deadline.check()
        if i == len(copy_idx):
            return True
        start, length = copy_idx[i]
        for s in cands[i]:
            for off in range(length):
                f[start + off] = s + off
            if _acyclic_after(f, range(start, start + length)) and assign(i + 1):
                chosen[i] = s
                return True
            for off in range(length):
                f[start + off] = _UNSET
        return False

    if not assign(0):
        return None
    sources: list[Optional[int]] = []
    it = iter(chosen)
    for start, length in phrases:
        sources.append(None if length == 1 else next(it))
    return sources


def min_scheme(w: str, limits: SearchLimits = SCHEME_LIMITS) -> SearchOutcome:
    """Size of the smallest valid bidirectional scheme for ``w``, with the
    canonical witness (first found over parsings in lexicographic boundary
    order, sources ascending)."""
    check_word(w)
    n = len(w)
    if n > limits.max_word_length:
        raise BudgetError(
            f"word length {n} exceeds the scheme search limit {limits.max_word_length}"
        )
    if n == 0:
        return SearchOutcome(0, 0, MacroScheme(0, ()))
    deadline = _Deadline(limits.time_budget)
    letters = set(w)
    occ = _occurrence_lists(w)
    all_ground = MacroScheme(n, tuple(Ground(c) for c in w))

    def evaluate(chunk):
        for starts in chunk:
            phrases = _parsing(starts, n)
            ground_letters = {w[s] for s, length in phrases if length == 1}
            if ground_letters != letters:
                continue
            sources = _search_parsing(w, phrases, occ, deadline)
            if sources is not None:
                out: list[Phrase] = []
                for (start, length), src in zip(phrases, sources):
                    out.append(Ground(w[start]) if length == 1 else Copy(length, src))
                return MacroScheme(n, tuple(out))
        return None

    for k in range(len(letters), n + 1):
        stream = ((0,) + b for b in combinations(range(1, n), k - 1))
        try:
            hit = _first_hit(_chunked(stream, 256), evaluate, limits.worker_count)
        except BudgetError:
            return SearchOutcome(k, n, all_ground)
        if hit is not None:
            if not validate(hit, w).valid:
                raise InternalError("witness scheme failed re-verification")
            return SearchOutcome(k, k, hit)
    raise InternalError("unreachable: the all-ground scheme is always valid")


def naive_min_scheme(w: str) -> tuple[int, MacroScheme]:
    """Reference solver: enumerate parsings by size then boundary order;
    for each, try every combination of per-phrase occurrence choices and
    run the full validator on each complete scheme."""
    n = len(w)
    if n == 0:
        return 0, MacroScheme(0, ())
    for k in range(1, n + 1):
        for bounds in combinations(range(1, n), k - 1):
            phrases = _parsing((0,) + bounds, n)
            options = []
            ok = True
            for start, length in phrases:
                if length == 1:
                    options.append([None])
                else:
                    content = w[start : start + length]
                    cand = [
                        s
                        for s in range(n - length + 1)
                        if s != start and w[s : s + length] == content
                    ]
                    if not cand:
                        ok = False
                        break
                    options.append(cand)
            if not ok:
                continue
            for sources in product(*options):
                out: list[Phrase] = []
                for (start, length), src in zip(phrases, sources):
                    out.append(Ground(w[start]) if length == 1 else Copy(length, src))
                scheme = MacroScheme(n, tuple(out))
                if validate(scheme, w).valid:
                    return k, scheme
    raise InternalError("unreachable: the all-ground scheme is always valid")
