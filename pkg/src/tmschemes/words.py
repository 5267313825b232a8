"""Thue-Morse words, the doubling morphism, and structural factor oracles.

Words are plain ``str`` objects over the two-letter alphabet {a, b},
0-indexed, position 0 having even parity.  The oracles here check, by
direct computation, the structural facts the rest of the package relies
on: where aa/bb and abab/baba can occur, that the words are overlap-free,
and that every factor outside a small exempt set occurs at a single
parity only.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .errors import BudgetError, ParseError, UsageError
from .suffixes import sa_and_lcp

ALPHABET = "ab"

#: factors allowed to occur at both parities in a Thue-Morse word
PARITY_EXEMPT = frozenset({"a", "b", "ab", "ba", "aba", "bab"})

#: refuse to materialize words longer than this many characters
DEFAULT_MAX_LENGTH = 1 << 22


def check_word(w: str) -> str:
    """Validate that ``w`` uses only the letters a and b; return it."""
    if not set(w) <= {"a", "b"}:
        bad = sorted(set(w) - {"a", "b"})
        raise UsageError(f"word contains letters outside {{a, b}}: {bad}")
    return w


@dataclass(frozen=True)
class Morphism:
    """A letter-to-word substitution on the two-letter alphabet."""

    image_of_a: str
    image_of_b: str

    def apply(self, w: str) -> str:
        images = {"a": self.image_of_a, "b": self.image_of_b}
        return "".join(images[c] for c in w)


#: the doubling morphism a -> ab, b -> ba
TM_MORPHISM = Morphism("ab", "ba")


def apply_morphism(m: Morphism, w: str) -> str:
    """Image of ``w`` under ``m``, letter by letter."""
    check_word(w)
    return m.apply(w)


def thue_morse(n: int, max_length: int = DEFAULT_MAX_LENGTH) -> str:
    """The n-th Thue-Morse word: n-fold image of "a" under the doubling
    morphism.  Length 2**n; each word is a prefix of the next."""
    if n < 0:
        raise UsageError(f"exponent must be non-negative, got {n}")
    if 1 << n > max_length:
        raise BudgetError(
            f"t_{n} has length 2^{n} which exceeds the limit of {max_length} characters"
        )
    return _thue_morse_cached(n)


@lru_cache(maxsize=None)
def _thue_morse_cached(n: int) -> str:
    w = "a"
    table = str.maketrans({"a": "ab", "b": "ba"})
    for _ in range(n):
        w = w.translate(table)
    return w


def inverse_tm_morphism(w: str) -> str:
    """The unique preimage of ``w`` under the doubling morphism.

    Requires an even length and every two-letter block at an even
    position to be ab or ba; reports the index of the first bad block
    otherwise.
    """
    check_word(w)
    if len(w) % 2 != 0:
        raise UsageError(f"word of odd length {len(w)} has no preimage")
    out = []
    for i in range(0, len(w), 2):
        block = w[i : i + 2]
        if block == "ab":
            out.append("a")
        elif block == "ba":
            out.append("b")
        else:
            raise UsageError(f"block {block!r} at block index {i // 2} has no preimage")
    return "".join(out)


@dataclass(frozen=True)
class OccurrenceSet:
    """All start positions of one pattern in one word."""

    pattern: str
    positions: tuple[int, ...]
    parities: frozenset[int]


def occurrences(w: str, p: str) -> OccurrenceSet:
    """Every start position of ``p`` in ``w`` (overlaps included), sorted."""
    if not p:
        raise UsageError("empty pattern")
    positions = []
    i = w.find(p)
    while i >= 0:
        positions.append(i)
        i = w.find(p, i + 1)
    return OccurrenceSet(p, tuple(positions), frozenset(q % 2 for q in positions))


@dataclass(frozen=True)
class OverlapWitness:
    """Two occurrences of the same factor sharing a text position."""

    factor: str
    pos1: int
    pos2: int


def has_overlapping_factors(w: str) -> Optional[OverlapWitness]:
    """Search for a factor with two occurrences that share a position.

    Two occurrences at distance d share a position exactly when the text
    carries d+1 consecutive positions i with w[i] == w[i+d], so the scan
    runs over distances, smallest first, using bit arithmetic on the whole
    word at once.  Returns the witness with the smallest distance (and the
    leftmost start for that distance), or None.
    """
    check_word(w)
    n = len(w)
    mask = 0
    for i, c in enumerate(w):
        if c == "b":
            mask |= 1 << i
    for d in range(1, (n - 1) // 2 + 1):
        eq = ~(mask ^ (mask >> d)) & ((1 << (n - d)) - 1)
        run = eq
        have = 1
        need = d + 1
        while have < need and run:
            s = min(have, need - have)
            run &= run >> s
            have += s
        if have == need and run:
            q = (run & -run).bit_length() - 1
            return OverlapWitness(w[q : q + d + 1], q, q + d)
    return None


@dataclass(frozen=True)
class ParityWitness:
    """A non-exempt factor occurring at both parities."""

    factor: str
    even_occurrence: int
    odd_occurrence: int


def factor_parity_violation(w: str) -> Optional[ParityWitness]:
    """First factor outside PARITY_EXEMPT whose occurrences mix parities.

    "First" means shortest, then lexicographically smallest.  Factors of
    length <= 3 are scanned directly; longer factors are reduced to pairs
    of suffixes of different parity via the suffix array: a mixed-parity
    factor of length k exists iff two suffixes of different parity share
    a common prefix of length >= k.
    """
    check_word(w)
    # short factors first: every length-2/3 string outside the exempt set
    short = []
    for k in (2, 3):
        seen = {}
        for i in range(len(w) - k + 1):
            seen.setdefault(w[i : i + k], set()).add(i % 2)
        for f in sorted(seen):
            if f not in PARITY_EXEMPT and seen[f] == {0, 1}:
                short.append(f)
        if short:
            f = short[0]
            occ = occurrences(w, f).positions
            even = next(q for q in occ if q % 2 == 0)
            odd = next(q for q in occ if q % 2 == 1)
            return ParityWitness(f, even, odd)
    if len(w) < 4:
        return None
    sa, lcp = sa_and_lcp(w)
    best = None  # (length-4 factor, even occ, odd occ), lexicographically smallest
    last = {0: None, 1: None}  # most recent suffix of each parity, with running min lcp
    run_min = {0: 0, 1: 0}
    for r, suf in enumerate(sa):
        if r > 0:
            for par in (0, 1):
                if last[par] is not None:
                    run_min[par] = min(run_min[par], lcp[r])
        other = 1 - (suf % 2)
        if last[other] is not None and run_min[other] >= 4:
            i, j = sorted((suf, last[other]))
            f = w[i : i + 4]
            even, odd = (i, j) if i % 2 == 0 else (j, i)
            cand = (f, even, odd)
            if best is None or cand < best:
                best = cand
        last[suf % 2] = suf
        run_min[suf % 2] = len(w)  # reset: min over an empty gap
    if best is None:
        return None
    return ParityWitness(*best)


def check_parity_lemma(n: int, max_length: int = DEFAULT_MAX_LENGTH) -> Optional[ParityWitness]:
    """Parity-uniformity oracle on the n-th Thue-Morse word.

    Returns None (pass) or the first violating factor; must return None
    for every n.
    """
    return factor_parity_violation(thue_morse(n, max_length))


def check_double_letter_positions(w: str) -> Optional[OccurrenceSet]:
    """Check that aa and bb occur only at odd positions; None on pass,
    else the offending occurrence set."""
    for p in ("aa", "bb"):
        occ = occurrences(w, p) if p in w else None
        if occ and 0 in occ.parities:
            return occ
    return None


def check_alternating_quad_positions(w: str) -> Optional[OccurrenceSet]:
    """Check that abab and baba occur only at even positions; None on
    pass, else the offending occurrence set."""
    for p in ("abab", "baba"):
        occ = occurrences(w, p) if p in w else None
        if occ and 1 in occ.parities:
            return occ
    return None


def read_word_file(path) -> str:
    """Read a word file: one line of a/b letters ending in one newline.

    Any other byte, a missing final newline, or extra lines are rejected.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    if not data.endswith(b"\n"):
        raise ParseError("word file must end with a newline", line=1)
    body = data[:-1]
    if b"\n" in body or b"\r" in body:
        raise ParseError("word file must contain exactly one line", line=2)
    for i, byte in enumerate(body):
        if byte not in (ord("a"), ord("b")):
            raise ParseError(f"byte {byte:#04x} at column {i} is not 'a' or 'b'", line=1)
    return body.decode("ascii")


def write_word_file(path, w: str) -> None:
    check_word(w)
    with open(path, "wb") as fh:
        fh.write(w.encode("ascii") + b"\n")
