"""Inductive construction of a size-(n+2) valid scheme for the n-th
Thue-Morse word.

Starting from the all-ground parsing of t_2 = abba, each lift step maps a
scheme for t_n to one for t_{n+1} by doubling: every copy (len, s)
becomes (2*len, 2*s); every ground letter other than a designated 'a'
and a designated 'b' becomes a length-2 copy of the designated pair's
image; the designated 'b' becomes two fresh ground letters; and the
designated 'a' becomes the single copy ("ab", 3).  Each lift adds exactly
one phrase, so n - 2 lifts give n + 2 phrases.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import UsageError
from .schemes import Copy, Ground, MacroScheme, Phrase
from .words import DEFAULT_MAX_LENGTH, thue_morse


@dataclass(frozen=True)
class LiftState:
    """A scheme plus the phrase indices of the designated ground pair."""

    scheme: MacroScheme
    index_a: int
    index_b: int

    def __post_init__(self):
        pa = self.scheme.phrases[self.index_a]
        pb = self.scheme.phrases[self.index_b]
        if not (isinstance(pa, Ground) and pa.literal == "a"):
            raise UsageError(f"phrase {self.index_a} is not a ground 'a'")
        if not (isinstance(pb, Ground) and pb.literal == "b"):
            raise UsageError(f"phrase {self.index_b} is not a ground 'b'")


def base_scheme_t2() -> LiftState:
    """The all-ground scheme a|b|b|a for t_2, designated grounds leftmost."""
    scheme = MacroScheme(4, (Ground("a"), Ground("b"), Ground("b"), Ground("a")))
    return LiftState(scheme, index_a=0, index_b=1)


def lift(state: LiftState) -> LiftState:
    """One induction step: scheme for t_n -> scheme for t_{n+1}, size +1."""
    scheme = state.scheme
    if scheme.text_length < 4:
        raise UsageError("lift requires a scheme for t_n with n >= 2")
    starts = scheme.starts
    pa2 = 2 * starts[state.index_a]  # image of the designated 'a'
    pb2 = 2 * starts[state.index_b]  # image of the designated 'b'
    phrases: list[Phrase] = []
    new_index_a = new_index_b = -1
    for i, ph in enumerate(scheme.phrases):
        if i == state.index_a:
            # merged phrase ("ab", 3) replacing the two grounds of mu(a)
            phrases.append(Copy(2, 3))
        elif i == state.index_b:
            # mu(b) = ba kept as two fresh ground letters
            new_index_b = len(phrases)
            phrases.append(Ground("b"))
            new_index_a = len(phrases)
            phrases.append(Ground("a"))
        elif isinstance(ph, Ground):
            # other grounds: image is ab or ba, copied from the designated pair
            phrases.append(Copy(2, pa2 if ph.literal == "a" else pb2))
        else:
            phrases.append(Copy(2 * ph.length, 2 * ph.source))
    lifted = MacroScheme(2 * scheme.text_length, tuple(phrases))
    return LiftState(lifted, index_a=new_index_a, index_b=new_index_b)


def upper_bound_scheme(n: int, max_length: int = DEFAULT_MAX_LENGTH) -> MacroScheme:
    """A valid scheme for t_n with exactly n + 2 phrases (n >= 2)."""
    if n < 2:
        raise UsageError(f"construction starts at n = 2, got {n}")
    thue_morse(n, max_length)  # enforce the length budget up front
    state = base_scheme_t2()
    for _ in range(n - 2):
        state = lift(state)
    return state.scheme
