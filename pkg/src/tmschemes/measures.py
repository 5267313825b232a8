"""Auxiliary repetitiveness measures: substring-complexity maximum
(delta), greedy self-referential LZ77 size (z), run count of the
Burrows-Wheeler transform (r), and a consolidated report that evaluates
the inequality chain delta <= gamma <= b <= z and b <= 2r wherever the
exact values are available.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import log2
from typing import Optional

from . import solve
from .construct import upper_bound_scheme
from .errors import UsageError
from .schemes import Copy, Ground, MacroScheme, Phrase, validate
from .suffixes import distinct_substring_counts, lcp_array, suffix_array
from .words import check_word, thue_morse

SENTINEL = "$"  # compares below both letters


@dataclass(frozen=True)
class DeltaResult:
    value: Fraction
    k: int  # smallest substring length attaining the maximum


def delta(w: str) -> DeltaResult:
    """max over k of (distinct length-k substrings) / k, as an exact
    fraction, with the smallest attaining k."""
    check_word(w)
    if not w:
        raise UsageError("delta of the empty word is undefined")
    counts = distinct_substring_counts(w)
    best = Fraction(0)
    best_k = 1
    for k in range(1, len(w) + 1):
        v = Fraction(counts[k], k)
        if v > best:
            best, best_k = v, k
    return DeltaResult(best, best_k)


def naive_delta(w: str) -> Fraction:
    """Reference: enumerate substring sets per length directly."""
    if not w:
        raise UsageError("delta of the empty word is undefined")
    return max(
        Fraction(len({w[i : i + k] for i in range(len(w) - k + 1)}), k)
        for k in range(1, len(w) + 1)
    )


@dataclass(frozen=True)
class LzFactor:
    length: int
    source: Optional[int]  # None for a literal
    literal: Optional[str] = None


def lz77_factorize(w: str) -> list[LzFactor]:
    """Greedy left-to-right factorization: each factor is the longest
    prefix of the remainder that also occurs starting strictly earlier
    (self-overlap allowed), else one literal letter."""
    check_word(w)
    factors: list[LzFactor] = []
    n = len(w)
    p = 0
    while p < n:
        if w.find(w[p], 0, p) == -1:
            factors.append(LzFactor(1, None, w[p]))
            p += 1
            continue
        lo, hi = 1, n - p
        while lo < hi:  # longest L with w[p:p+L] occurring at some start < p
            mid = (lo + hi + 1) // 2
            if w.find(w[p : p + mid], 0, p - 1 + mid) != -1:
                lo = mid
            else:
                hi = mid - 1
        src = w.find(w[p : p + lo], 0, p - 1 + lo)
        factors.append(LzFactor(lo, src))
        p += lo
    return factors


def lz77_size(w: str) -> int:
    return len(lz77_factorize(w))


def lz_scheme(w: str) -> MacroScheme:
    """The LZ factorization as a valid bidirectional scheme: every copy
    points strictly left, so resolution always proceeds; length-1 factors
    are stored as grounds."""
    phrases: list[Phrase] = []
    pos = 0
    for f in lz77_factorize(w):
        if f.length == 1:
            phrases.append(Ground(w[pos]))
        else:
            phrases.append(Copy(f.length, f.source))
        pos += f.length
    return MacroScheme(len(w), tuple(phrases))


def bwt(w: str) -> str:
    """Burrows-Wheeler transform of w + sentinel (sentinel sorts lowest)."""
    check_word(w)
    s = w + SENTINEL
    sa = suffix_array(s)
    return "".join(s[i - 1] for i in sa)


def bwt_run_count(w: str) -> int:
    """Number of maximal equal-letter runs in the transform (sentinel
    included as its own run)."""
    b = bwt(w)
    return 1 + sum(1 for i in range(1, len(b)) if b[i] != b[i - 1])


def inverse_bwt(b: str) -> str:
    """Round-trip inverse; returns the word without the sentinel."""
    n = len(b)
    counts: dict[str, int] = {}
    ranks = []
    for c in b:
        ranks.append(counts.get(c, 0))
        counts[c] = counts.get(c, 0) + 1
    firsts = {}
    total = 0
    for c in sorted(counts):
        firsts[c] = total
        total += counts[c]
    row = b.index(SENTINEL)
    out = []
    for _ in range(n):
        c = b[row]
        out.append(c)
        row = firsts[c] + ranks[row]
    return "".join(reversed(out))[:-1]


def _tm_exponent(w: str) -> Optional[int]:
    """n when w equals the n-th Thue-Morse word, else None."""
    n = len(w)
    if n == 0 or n & (n - 1):
        return None
    exp = int(log2(n))
    return exp if thue_morse(exp) == w else None


def tm_attractor_upper_witness(exp: int, exact_limit: int = 32) -> tuple[int, ...]:
    """A verified small attractor for the exp-th Thue-Morse word.

    Solved exactly while 2**exp fits the exact limit; beyond that, each
    level's witness is searched among the previous level's witness with
    every position doubled and jittered by -1/0/+1, then verified.  Only
    verified sets are ever returned.
    """
    from itertools import product

    w = thue_morse(exp)
    if len(w) <= exact_limit:
        return tuple(solve.min_attractor(w).witness)
    prev = tm_attractor_upper_witness(exp - 1, exact_limit)
    n = len(w)
    candidates = set()
    for deltas in product((-1, 0, 1), repeat=len(prev)):
        cand = tuple(sorted(2 * p + d for p, d in zip(prev, deltas)))
        if len(set(cand)) == len(cand) and 0 <= cand[0] and cand[-1] < n:
            candidates.add(cand)
    for cand in sorted(candidates):
        if solve.attractor_missing(w, cand) is None:
            return cand
    raise UsageError(
        f"no lifted attractor of size {len(prev)} verified for exponent {exp}"
    )


@dataclass
class MeasureReport:
    n: int
    delta: DeltaResult
    gamma_exact: Optional[int]
    gamma_lower: Optional[int]
    gamma_upper: Optional[int]
    gamma_witness: Optional[tuple[int, ...]]
    b_exact: Optional[int]
    b_upper: Optional[int]
    b_witness: Optional[MacroScheme]
    z: int
    r: int
    chain: list[tuple[str, bool]] = field(default_factory=list)

    @property
    def chain_ok(self) -> bool:
        return all(holds for _, holds in self.chain)

    def lines(self) -> list[str]:
        out = [
            f"n={self.n}",
            f"delta_num={self.delta.value.numerator}",
            f"delta_den={self.delta.value.denominator}",
            f"delta_k={self.delta.k}",
        ]
        if self.gamma_exact is not None:
            out.append(f"gamma={self.gamma_exact}")
        else:
            out.append(f"gamma_lower={self.gamma_lower}")
            if self.gamma_upper is not None:
                out.append(f"gamma_upper={self.gamma_upper}")
        if self.b_exact is not None:
            out.append(f"b_exact={self.b_exact}")
        else:
            out.append(f"b_upper={self.b_upper}")
        out.append(f"z={self.z}")
        out.append(f"r={self.r}")
        out.append(f"chain_ok={'true' if self.chain_ok else 'false'}")
        return out


def report(
    w: str,
    scheme_exact_limit: int = 16,
    attractor_exact_limit: int = 32,
    time_budget: Optional[float] = None,
    workers: int = 1,
) -> MeasureReport:
    """All measures of one word; exact gamma and b where the limits allow,
    verified brackets otherwise."""
    check_word(w)
    if not w:
        raise UsageError("measures of the empty word are undefined")
    n = len(w)
    d = delta(w)
    z = lz77_size(w)
    r = bwt_run_count(w)

    gamma_exact = gamma_lower = gamma_upper = None
    gamma_witness = None
    if n <= attractor_exact_limit:
        out = solve.min_attractor(
            w, solve.SearchLimits(attractor_exact_limit, time_budget, workers)
        )
        if out.exact:
            gamma_exact, gamma_witness = out.upper, tuple(out.witness)
        else:
            gamma_lower, gamma_upper = out.lower, out.upper
            gamma_witness = tuple(out.witness)
    else:
        gamma_lower = len(set(w))
        exp = _tm_exponent(w)
        if exp is not None:
            witness = tm_attractor_upper_witness(exp, attractor_exact_limit)
            gamma_upper, gamma_witness = len(witness), witness
        else:
            masks = solve._coverage_masks(w) if n <= 256 else None
            if masks is not None:
                witness = tuple(solve._greedy_attractor(n, masks))
                if solve.attractor_missing(w, witness) is None:
                    gamma_upper, gamma_witness = len(witness), witness

    b_exact = b_upper = None
    b_witness = None
    if n <= scheme_exact_limit:
        out = solve.min_scheme(
            w, solve.SearchLimits(scheme_exact_limit, time_budget, workers)
        )
        if out.exact:
            b_exact, b_witness = out.upper, out.witness
        else:
            b_upper, b_witness = out.upper, out.witness
    else:
        exp = _tm_exponent(w)
        candidates: list[MacroScheme] = [lz_scheme(w)]
        if exp is not None and exp >= 2:
            candidates.append(upper_bound_scheme(exp))
        best = min(candidates, key=lambda s: s.size)
        if not validate(best, w).valid:
            raise UsageError("internal upper-bound scheme failed validation")
        b_upper, b_witness = best.size, best

    chain = []
    gamma_for_chain = gamma_exact
    b_for_chain = b_exact
    if gamma_for_chain is not None:
        chain.append(("delta<=gamma", d.value <= gamma_for_chain))
    if gamma_for_chain is not None and b_for_chain is not None:
        chain.append(("gamma<=b", gamma_for_chain <= b_for_chain))
    if b_for_chain is not None:
        chain.append(("b<=z", b_for_chain <= z))
        chain.append(("b<=2r", b_for_chain <= 2 * r))
    return MeasureReport(
        n=n,
        delta=d,
        gamma_exact=gamma_exact,
        gamma_lower=gamma_lower,
        gamma_upper=gamma_upper,
        gamma_witness=gamma_witness,
        b_exact=b_exact,
        b_upper=b_upper,
        b_witness=b_witness,
        z=z,
        r=r,
        chain=chain,
    )
