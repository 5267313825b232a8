"""Bidirectional macro schemes: phrases, the source function, validity,
decoding, and the scheme file format.

A scheme is an ordered parsing of a text of known length into phrases;
each phrase is either a single stored letter (a ground phrase) or a
(length, source) copy of another range of the text.  The induced source
function f maps every position inside a copy phrase to the corresponding
position inside its source, and ground positions to None.  A scheme is
valid for a word when every copy matches its source content and f has no
cycles, which is exactly when the word can be rebuilt by repeated
copying from the ground letters outward.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Union

from .errors import ParseError, UsageError
from .words import check_word


@dataclass(frozen=True)
class Ground:
    """Length-1 phrase stored literally."""

    literal: str

    def __post_init__(self):
        if self.literal not in ("a", "b"):
            raise UsageError(f"ground literal must be 'a' or 'b', got {self.literal!r}")

    @property
    def length(self) -> int:
        return 1


@dataclass(frozen=True)
class Copy:
    """Phrase of length >= 2 copied from another position of the text."""

    length: int
    source: int

    def __post_init__(self):
        if self.length < 2:
            raise UsageError(f"copy phrase must have length >= 2, got {self.length}")
        if self.source < 0:
            raise UsageError(f"copy source must be non-negative, got {self.source}")


Phrase = Union[Ground, Copy]


@dataclass(frozen=True)
class MacroScheme:
    """An ordered sequence of phrases parsing a text of length ``text_length``."""

    text_length: int
    phrases: tuple[Phrase, ...]

    def __post_init__(self):
        object.__setattr__(self, "phrases", tuple(self.phrases))
        total = 0
        for i, ph in enumerate(self.phrases):
            if isinstance(ph, Copy) and ph.source + ph.length > self.text_length:
                raise UsageError(
                    f"phrase {i}: source range [{ph.source}, {ph.source + ph.length}) "
                    f"exceeds text length {self.text_length}"
                )
            total += ph.length
        if total != self.text_length:
            raise UsageError(
                f"phrase lengths sum to {total}, expected text length {self.text_length}"
            )

    @cached_property
    def starts(self) -> tuple[int, ...]:
        out = []
        pos = 0
        for ph in self.phrases:
            out.append(pos)
            pos += ph.length
        return tuple(out)

    @property
    def size(self) -> int:
        return len(self.phrases)

    def __len__(self) -> int:
        return len(self.phrases)


def ground_count(scheme: MacroScheme) -> int:
    """Number of ground phrases."""
    return sum(1 for ph in scheme.phrases if isinstance(ph, Ground))


def source_function(scheme: MacroScheme) -> list[Optional[int]]:
    """Per-position source map: None on ground positions, otherwise the
    matching position inside the phrase's source range."""
    f: list[Optional[int]] = [None] * scheme.text_length
    for ph, start in zip(scheme.phrases, scheme.starts):
        if isinstance(ph, Copy):
            for off in range(ph.length):
                f[start + off] = ph.source + off
    return f


@dataclass(frozen=True)
class ContentMismatch:
    phrase_index: int
    offset: int


@dataclass(frozen=True)
class Cycle:
    positions: tuple[int, ...]


@dataclass(frozen=True)
class Unresolvable:
    positions: frozenset[int]


@dataclass(frozen=True)
class ValidityVerdict:
    valid: bool
    reason: Union[ContentMismatch, Cycle, Unresolvable, None] = None

    def __bool__(self) -> bool:
        return self.valid


def _resolution_order(n: int, f: list[Optional[int]]) -> tuple[list[int], set[int]]:
    """Fixpoint resolution of the source map.

    Positions whose source is None resolve immediately; a position
    resolves once its source has resolved.  Implemented as a worklist
    over the reverse dependency lists so each position is touched once.
    Returns the resolution order and the set of stuck positions.
    """
    dependents: list[list[int]] = [[] for _ in range(n)]
    order = []
    for x in range(n):
        if f[x] is None:
            order.append(x)
        else:
            dependents[f[x]].append(x)
    resolved = [False] * n
    for x in order:
        resolved[x] = True
    head = 0
    while head < len(order):
        x = order[head]
        head += 1
        for y in dependents[x]:
            if not resolved[y]:
                resolved[y] = True
                order.append(y)
    stuck = {x for x in range(n) if not resolved[x]}
    return order, stuck


def _extract_cycle(f: list[Optional[int]], stuck: set[int]) -> Cycle:
    """Walk the source map inside a stuck set until a position repeats."""
    x = min(stuck)
    seen: dict[int, int] = {}
    path = []
    while x not in seen:
        seen[x] = len(path)
        path.append(x)
        x = f[x]
    return Cycle(tuple(path[seen[x] :]))


def validate(scheme: MacroScheme, w: str) -> ValidityVerdict:
    """Check that ``scheme`` is a valid bidirectional scheme for ``w``."""
    check_word(w)
    if len(w) != scheme.text_length:
        raise UsageError(
            f"word length {len(w)} does not match scheme text length {scheme.text_length}"
        )
    for i, (ph, start) in enumerate(zip(scheme.phrases, scheme.starts)):
        if isinstance(ph, Ground):
            if w[start] != ph.literal:
                return ValidityVerdict(False, ContentMismatch(i, 0))
        else:
            src = w[ph.source : ph.source + ph.length]
            dst = w[start : start + ph.length]
            if src != dst:
                off = next(k for k in range(ph.length) if src[k] != dst[k])
                return ValidityVerdict(False, ContentMismatch(i, off))
    f = source_function(scheme)
    _, stuck = _resolution_order(scheme.text_length, f)
    if stuck:
        return ValidityVerdict(False, _extract_cycle(f, stuck))
    return ValidityVerdict(True)


class SchemeUnresolvable(UsageError):
    """Decoding stalled: the remaining positions feed or form a cycle."""

    def __init__(self, positions: frozenset[int]):
        self.positions = positions
        super().__init__(f"{len(positions)} positions cannot be resolved: "
                         f"{sorted(positions)[:10]}{'...' if len(positions) > 10 else ''}")


def decode(scheme: MacroScheme) -> str:
    """Rebuild the unique word a valid scheme describes.

    Ground positions are known immediately; every copy position becomes
    known once its source position is known.  Raises SchemeUnresolvable
    with the stuck position set when no progress is possible.
    """
    n = scheme.text_length
    f = source_function(scheme)
    order, stuck = _resolution_order(n, f)
    if stuck:
        raise SchemeUnresolvable(frozenset(stuck))
    out = [""] * n
    for ph, start in zip(scheme.phrases, scheme.starts):
        if isinstance(ph, Ground):
            out[start] = ph.literal
    for x in order:
        if f[x] is not None:
            out[x] = out[f[x]]
    return "".join(out)


# --- scheme file format -------------------------------------------------
#
# header line:  v1 <text_length> <phrase_count>
# then one line per phrase:  "G <letter>"  or  "C <length> <source>"
# single spaces, no trailing whitespace, newline-terminated lines.

_HEADER_RE = re.compile(r"\Av1 (0|[1-9][0-9]*) (0|[1-9][0-9]*)\Z")
_GROUND_RE = re.compile(r"\AG ([ab])\Z")
_COPY_RE = re.compile(r"\AC ([1-9][0-9]*) (0|[1-9][0-9]*)\Z")


def serialize(scheme: MacroScheme) -> bytes:
    lines = [f"v1 {scheme.text_length} {scheme.size}"]
    for ph in scheme.phrases:
        if isinstance(ph, Ground):
            lines.append(f"G {ph.literal}")
        else:
            lines.append(f"C {ph.length} {ph.source}")
    return ("\n".join(lines) + "\n").encode("ascii")


def parse(data: bytes) -> MacroScheme:
    try:
        text = data.decode("ascii")
    except UnicodeDecodeError as exc:
        raise ParseError(f"scheme file is not ASCII: {exc}") from None
    if not text.endswith("\n"):
        raise ParseError("scheme file must end with a newline")
    lines = text[:-1].split("\n")
    m = _HEADER_RE.match(lines[0])
    if not m:
        raise ParseError(f"bad header {lines[0]!r}", line=1)
    n, k = int(m.group(1)), int(m.group(2))
    if len(lines) - 1 != k:
        raise ParseError(
            f"header promises {k} phrases but file has {len(lines) - 1}", line=1
        )
    phrases: list[Phrase] = []
    total = 0
    for idx, raw in enumerate(lines[1:], start=2):
        gm = _GROUND_RE.match(raw)
        if gm:
            phrases.append(Ground(gm.group(1)))
            total += 1
            continue
        cm = _COPY_RE.match(raw)
        if cm:
            length, source = int(cm.group(1)), int(cm.group(2))
            if length < 2:
                raise ParseError(f"copy phrase must have length >= 2, got {length}", line=idx)
            if source + length > n:
                raise ParseError(
                    f"source range [{source}, {source + length}) exceeds text length {n}",
                    line=idx,
                )
            phrases.append(Copy(length, source))
            total += length
            continue
        raise ParseError(f"unrecognized phrase line {raw!r}", line=idx)
    if total != n:
        raise ParseError(f"phrase lengths sum to {total}, header says {n}", line=1)
    return MacroScheme(n, tuple(phrases))


def read_scheme_file(path) -> MacroScheme:
    with open(path, "rb") as fh:
        return parse(fh.read())


def write_scheme_file(path, scheme: MacroScheme) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize(scheme))
