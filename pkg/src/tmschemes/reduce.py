"""Scheme reduction for Thue-Morse words: turn a valid scheme for t_n
into one for t_{n-1} in three steps.

Step 1 removes every length-1 ground phrase by merging it into the phrase
on the other side of its two-position block and repairing the source
chain of the merge until both chain members land together inside a
"relaxed ground": a length-2 phrase starting at an even position, which
carries no source obligation.  Step 2 removes the length-3 aba/bab
phrases the same way, then shifts every boundary at an odd position one
step right, leaving all phrases even-start and even-length.  Step 3
halves every phrase and source through the inverse doubling morphism.

The chain repair walks the source function from the block's surviving
position.  While the source keeps the position's parity, the partner
letter at the source side is forced by the block structure, so the
absorbed partner can copy from next to the source.  The walk stops when
the source parity flips; the parity-uniformity of factors then forces
the current phrase to be one of aba, bab, ab, ba (or a lone ground /
relaxed ground), and a per-shape surgery places the current block into a
relaxed ground.  Step-1 surgeries may split off a new length-1 ground,
which is queued and eliminated in turn; step-2 surgeries instead grow a
four-letter phrase sourced at the elimination's starting block, or
recurse on the neighbouring block, so the phrase count never grows.

The number of phrase boundaries sitting at odd positions never increases
and every elimination consumes one, which bounds the whole process.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil
from typing import Optional

from .errors import InternalError, UsageError
from .schemes import Copy, Ground, MacroScheme, Phrase, validate
from .words import check_word, thue_morse


@dataclass(frozen=True)
class RelaxedPhrase:
    start: int
    length: int
    source: Optional[int]  # None for grounds and relaxed grounds

    @property
    def is_ground(self) -> bool:
        return self.length == 1

    @property
    def is_relaxed_ground(self) -> bool:
        return self.length == 2 and self.start % 2 == 0


@dataclass(frozen=True)
class RelaxedScheme:
    """Snapshot of a scheme under the relaxed ground convention."""

    text_length: int
    phrases: tuple[RelaxedPhrase, ...]

    @property
    def size(self) -> int:
        return len(self.phrases)

    def partner_boundary_count(self) -> int:
        return sum(1 for ph in self.phrases if ph.start % 2 == 1)


@dataclass
class TraceEvent:
    step: int
    label: str
    position: int
    partner_boundaries: int

    def line(self) -> str:
        return (
            f"step={self.step} case={self.label} pos={self.position} "
            f"odd_boundaries={self.partner_boundaries}"
        )


def relax(scheme: MacroScheme) -> RelaxedScheme:
    """Strict scheme -> relaxed convention: length-2 copies at even
    positions lose their source obligation, everything else carries over."""
    phrases = []
    for ph, start in zip(scheme.phrases, scheme.starts):
        if isinstance(ph, Ground):
            phrases.append(RelaxedPhrase(start, 1, None))
        elif ph.length == 2 and start % 2 == 0:
            phrases.append(RelaxedPhrase(start, 2, None))
        else:
            phrases.append(RelaxedPhrase(start, ph.length, ph.source))
    return RelaxedScheme(scheme.text_length, tuple(phrases))


def validate_relaxed(rs: RelaxedScheme, w: str) -> None:
    """Raise InternalError unless ``rs`` is a valid relaxed scheme for w:
    contiguous cover, sources only on phrases that owe content, content
    matching, and an acyclic source function."""
    if rs.text_length != len(w):
        raise InternalError("relaxed scheme length mismatch")
    pos = 0
    f: list[Optional[int]] = [None] * len(w)
    for ph in rs.phrases:
        if ph.start != pos:
            raise InternalError(f"phrase gap at {pos}: next phrase starts {ph.start}")
        pos += ph.length
        if ph.is_ground or ph.is_relaxed_ground:
            if ph.source is not None:
                raise InternalError(f"ground-like phrase at {ph.start} carries a source")
            continue
        if ph.source is None:
            raise InternalError(f"phrase at {ph.start} (len {ph.length}) lacks a source")
        if ph.source < 0 or ph.source + ph.length > len(w):
            raise InternalError(f"source range out of bounds at {ph.start}")
        if w[ph.source : ph.source + ph.length] != w[ph.start : ph.start + ph.length]:
            raise InternalError(f"content mismatch at phrase {ph.start}")
        for off in range(ph.length):
            f[ph.start + off] = ph.source + off
    if pos != len(w):
        raise InternalError("phrases do not cover the text")
    resolved = [x for x in range(len(w)) if f[x] is None]
    dependents: list[list[int]] = [[] for _ in range(len(w))]
    for x in range(len(w)):
        if f[x] is not None:
            dependents[f[x]].append(x)
    done = [False] * len(w)
    for x in resolved:
        done[x] = True
    head = 0
    while head < len(resolved):
        for y in dependents[resolved[head]]:
            if not done[y]:
                done[y] = True
                resolved.append(y)
        head += 1
    if not all(done):
        stuck = [x for x in range(len(w)) if not done[x]][:8]
        raise InternalError(f"source function has a cycle (stuck at {stuck}...)")


class _Editor:
    """Mutable phrase structure over a fixed word, with the primitive
    boundary edits the elimination engine uses.  Every mutation keeps two
    normalization rules: a phrase shrunk to one letter becomes a ground
    (reported to the caller for the worklist), and a length-2 phrase at an
    even position becomes a relaxed ground, dropping its source."""

    def __init__(self, word: str, rs: RelaxedScheme, paranoid: bool = False,
                 trace: Optional[list[TraceEvent]] = None):
        self.word = word
        self.n = len(word)
        self.len_of: dict[int, int] = {}
        self.src_of: dict[int, Optional[int]] = {}
        self.owner = [0] * self.n
        for ph in rs.phrases:
            self.len_of[ph.start] = ph.length
            self.src_of[ph.start] = ph.source
            for x in range(ph.start, ph.start + ph.length):
                self.owner[x] = ph.start
        self.paranoid = paranoid
        self.trace = trace
        self.step = 1

    # -- queries ---------------------------------------------------------

    def snapshot(self) -> RelaxedScheme:
        phrases = tuple(
            RelaxedPhrase(s, self.len_of[s], self.src_of[s])
            for s in sorted(self.len_of)
        )
        return RelaxedScheme(self.n, phrases)

    def phrase_at(self, pos: int) -> int:
        return self.owner[pos]

    def is_ground_at(self, pos: int) -> bool:
        return self.owner[pos] == pos and self.len_of[pos] == 1

    def is_relaxed(self, start: int) -> bool:
        return self.len_of[start] == 2 and start % 2 == 0

    def odd_boundaries(self) -> int:
        return sum(1 for s in self.len_of if s % 2 == 1)

    def note(self, label: str, pos: int) -> None:
        if self.trace is not None:
            self.trace.append(TraceEvent(self.step, label, pos, self.odd_boundaries()))

    def _check(self) -> None:
        if self.paranoid:
            validate_relaxed(self.snapshot(), self.word)

    # -- primitives ------------------------------------------------------

    def _normalize(self, start: int) -> list[int]:
        """Apply the ground / relaxed-ground conventions after an edit."""
        length = self.len_of[start]
        if length == 1:
            self.src_of[start] = None
            return [start]
        if length == 2 and start % 2 == 0:
            self.src_of[start] = None
        return []

    def set_source(self, start: int, src: int) -> None:
        length = self.len_of[start]
        if self.word[src : src + length] != self.word[start : start + length]:
            raise InternalError(f"set_source content mismatch at {start} -> {src}")
        self.src_of[start] = src
        self._check()

    def cut(self, start: int, at: int) -> list[int]:
        """Split the phrase at absolute position ``at``; both parts are
        normalized.  Returns the starts of any new length-1 grounds."""
        length = self.len_of[start]
        src = self.src_of[start]
        if not (start < at < start + length):
            raise InternalError(f"cut point {at} outside phrase [{start}, {start + length})")
        self.len_of[start] = at - start
        self.len_of[at] = start + length - at
        self.src_of[at] = None if src is None else src + (at - start)
        for x in range(at, start + length):
            self.owner[x] = at
        spawned = self._normalize(start) + self._normalize(at)
        self._check()
        return spawned

    def absorb_right(self, start: int) -> list[int]:
        """Extend the phrase one position rightward, taking the first
        position of its right neighbour (which shrinks or disappears)."""
        q = start + self.len_of[start]
        if q >= self.n or self.owner[q] != q:
            raise InternalError(f"absorb_right at {start}: no neighbour boundary at {q}")
        spawned = []
        nlen, nsrc = self.len_of[q], self.src_of[q]
        del self.len_of[q], self.src_of[q]
        if nlen > 1:
            self.len_of[q + 1] = nlen - 1
            self.src_of[q + 1] = None if nsrc is None else nsrc + 1
            for x in range(q + 1, q + nlen):
                self.owner[x] = q + 1
            spawned += self._normalize(q + 1)
        self.owner[q] = start
        self.len_of[start] += 1
        spawned += self._normalize(start)
        self._check()
        return spawned

    def absorb_left(self, start: int) -> list[int]:
        """Extend the phrase one position leftward, taking the last
        position of its left neighbour; the phrase is rekeyed and its
        source, if any, shifts with it."""
        p0 = start - 1
        if p0 < 0:
            raise InternalError("absorb_left at the text start")
        left = self.owner[p0]
        spawned = []
        if left == p0 and self.len_of[p0] == 1:
            del self.len_of[p0], self.src_of[p0]
        else:
            self.len_of[left] -= 1
            spawned += self._normalize(left)
        length = self.len_of.pop(start)
        src = self.src_of.pop(start)
        self.len_of[p0] = length + 1
        self.src_of[p0] = None if src is None else src - 1
        for x in range(p0, p0 + length + 1):
            self.owner[x] = p0
        spawned += self._normalize(p0)
        self._check()
        return spawned

    def find_adjacent_relaxed_pair(self, block: str) -> Optional[int]:
        """Leftmost start z of two adjacent relaxed grounds both reading
        ``block`` (the source used when a four-letter copy replaces a
        would-be third relaxed pair)."""
        for z in sorted(self.len_of):
            if (
                self.is_relaxed(z)
                and self.len_of.get(z + 2) == 2
                and self.is_relaxed(z + 2)
                and self.word[z : z + 2] == block
                and self.word[z + 2 : z + 4] == block
            ):
                return z
        return None


def _eliminate(ed: _Editor, e: int, rightward: bool, expand_at: Optional[int],
               worklist: list[int]) -> None:
    """Merge the follower of the block (e, e+1) into the anchor's phrase
    and repair the source chain.

    rightward: anchor e (even), follower e+1 -- used for grounds at odd
    positions and length-3 phrases starting at odd positions; the mirror
    handles the even cases.  expand_at is None for step-1 surgeries
    (which may spawn new grounds) and carries the starting block position
    for step-2 surgeries (which grow a sourced four-letter phrase).
    """
    word = ed.word
    steps = 0
    while True:
        steps += 1
        if steps > 4 * ed.n:
            raise InternalError("elimination chain failed to terminate")
        anchor = e if rightward else e + 1
        p = ed.phrase_at(anchor)
        plen = ed.len_of[p]
        # the block is already a relaxed ground: nothing to do
        if p == e and plen == 2 and ed.is_relaxed(p):
            ed.note("case5", e)
            return
        # lone ground at the anchor: grow it over the follower
        if plen == 1:
            spawned = ed.absorb_right(p) if rightward else ed.absorb_left(p)
            worklist.extend(spawned)
            ed.note("case6", e)
            return
        src = ed.src_of[p]
        if src is None:
            raise InternalError(f"sourceless phrase at {p} of length {plen}")
        fa = src + (anchor - p)
        if fa % 2 == anchor % 2:
            # same parity: the partner of the source position carries the
            # follower's letter, so the follower can join this phrase
            follower = e + 1 if rightward else e
            if not (p <= follower < p + plen):
                spawned = ed.absorb_right(p) if rightward else ed.absorb_left(p)
                worklist.extend(spawned)
                ed.note("extend", anchor)
            e = fa if rightward else fa - 1
            continue
        _terminal(ed, e, rightward, p, plen, expand_at, worklist)
        return


def _terminal(ed: _Editor, e: int, rightward: bool, p: int, plen: int,
              expand_at: Optional[int], worklist: list[int]) -> None:
    """Parity flipped: the anchor's phrase is a short exempt factor.
    Re-cut so the block (e, e+1) lands in a relaxed ground."""
    word = ed.word
    y = e if rightward else e + 1
    off = y - p
    if word[p : p + plen] not in ("ab", "ba", "aba", "bab"):
        raise InternalError(
            f"parity flip inside non-exempt phrase {word[p:p + plen]!r} at {p}"
        )
    if expand_at is None:
        _terminal_step1(ed, e, rightward, p, plen, off, y, worklist)
    else:
        _terminal_step2(ed, e, rightward, p, plen, off, y, expand_at, worklist)


def _terminal_step1(ed, e, rightward, p, plen, off, y, worklist):
    word = ed.word
    if rightward:
        if plen == 2 and off == 1:
            # phrase (y-1, y): split off a fresh ground, relax (y, y+1)
            spawned = [s for s in ed.cut(p, y) if s != y]
            spawned += ed.absorb_right(y)
            worklist.extend(spawned)
            ed.note("case4", y)
        elif plen == 3 and off == 1:
            # phrase (y-1 .. y+1): fresh ground at y-1, (y, y+1) relaxes
            worklist.extend(ed.cut(p, y))
            ed.note("case1", y)
        elif plen == 3 and off == 0:
            # phrase (y .. y+2): (y, y+1) relaxes, fresh ground at y+2
            worklist.extend(ed.cut(p, y + 2))
            ed.note("case2", y)
        elif plen == 3 and off == 2:
            # phrase (y-2 .. y): two relaxed blocks, or a 4-copy onto an
            # existing adjacent pair of identical relaxed blocks
            pair = ed.find_adjacent_relaxed_pair(word[y : y + 2])
            if pair is None:
                spawned = [s for s in ed.cut(p, y) if s != y]
                spawned += ed.absorb_right(y)
                worklist.extend(spawned)
                ed.note("case3-1", y)
            else:
                ed.set_source(p, pair)
                worklist.extend(ed.absorb_right(p))
                ed.note("case3-2", y)
        else:
            raise InternalError(f"unexpected step-1 flip shape len={plen} off={off}")
    else:
        if plen == 2 and off == 0:
            # phrase (y, y+1): fresh ground at y+1, (y-1, y) relaxes
            spawned = [s for s in ed.cut(p, y + 1) if s != y]
            spawned += ed.absorb_left(y)
            worklist.extend(spawned)
            ed.note("case4'", y)
        elif plen == 3 and off == 2:
            worklist.extend(ed.cut(p, y - 1))
            ed.note("case1'", y)
        elif plen == 3 and off == 1:
            worklist.extend(ed.cut(p, y + 1))
            ed.note("case2'", y)
        elif plen == 3 and off == 0:
            pair = ed.find_adjacent_relaxed_pair(word[y - 1 : y + 1])
            if pair is None:
                spawned = [s for s in ed.cut(p, y + 1) if s != y]
                spawned += ed.absorb_left(y)
                worklist.extend(spawned)
                ed.note("case3-1'", y)
            else:
                ed.set_source(p, pair + 1)
                worklist.extend(ed.absorb_left(p))
                ed.note("case3-2'", y)
        else:
            raise InternalError(f"unexpected step-1 flip shape len={plen} off={off}")


def _terminal_step2(ed, e, rightward, p, plen, off, y, E, worklist):
    """Step-2 terminals: either recurse on the neighbouring block, or
    grow the phrase to the four letters (pair block + partner block) and
    source it at the elimination's starting block, whose right (left)
    half is the relaxed ground made at the start."""
    if rightward:
        if plen == 3 and off == 0:
            # leftover letter at y+2 joins the right neighbour: mirrored
            # sub-elimination with its own starting block at y+2
            spawned = [s for s in ed.cut(p, y + 2) if s != y + 2]
            worklist.extend(spawned)
            ed.note("shrink-right", y)
            _eliminate(ed, y + 2, False, y + 2, worklist)
        elif plen == 2 and off == 1:
            ed.set_source(p, E + 1)
            worklist.extend(ed.absorb_left(p))
            worklist.extend(ed.absorb_right(y - 2))
            ed.note("expand", y)
        elif plen == 3 and off == 1:
            ed.set_source(p, E + 1)
            worklist.extend(ed.absorb_left(p))
            ed.note("expand", y)
        elif plen == 3 and off == 2:
            ed.set_source(p, E)
            worklist.extend(ed.absorb_right(p))
            ed.note("expand", y)
        else:
            raise InternalError(f"unexpected step-2 flip shape len={plen} off={off}")
    else:
        if plen == 3 and off == 2:
            spawned = [s for s in ed.cut(p, y - 1) if s != y - 2]
            worklist.extend(spawned)
            ed.note("shrink-left", y)
            _eliminate(ed, y - 3, True, y - 3, worklist)
        elif plen == 2 and off == 0:
            ed.set_source(p, E - 1)
            worklist.extend(ed.absorb_left(p))
            worklist.extend(ed.absorb_right(y - 1))
            ed.note("expand'", y)
        elif plen == 3 and off == 0:
            ed.set_source(p, E - 1)
            worklist.extend(ed.absorb_left(p))
            ed.note("expand'", y)
        elif plen == 3 and off == 1:
            ed.set_source(p, E - 2)
            worklist.extend(ed.absorb_right(p))
            ed.note("expand'", y)
        else:
            raise InternalError(f"unexpected step-2 flip shape len={plen} off={off}")


def _drain_grounds(ed: _Editor, worklist: list[int]) -> None:
    guard = 0
    while worklist:
        guard += 1
        if guard > 8 * ed.n:
            raise InternalError("ground worklist failed to drain")
        q = worklist.pop()
        if not ed.is_ground_at(q):
            continue
        ed.note("start-ground", q)
        if q % 2 == 1:
            _eliminate(ed, q - 1, True, None, worklist)
        else:
            _eliminate(ed, q, False, None, worklist)


def eliminate_ground_phrases(rs: RelaxedScheme, w: str, paranoid: bool = False,
                             trace: Optional[list[TraceEvent]] = None) -> RelaxedScheme:
    """Step 1: remove every length-1 ground phrase.  Initial grounds are
    processed leftmost first; grounds spawned by the surgeries are
    processed before moving on."""
    check_word(w)
    validate_relaxed(rs, w)
    ed = _Editor(w, rs, paranoid, trace)
    ed.step = 1
    initial = sorted((ph.start for ph in rs.phrases if ph.is_ground), reverse=True)
    _drain_grounds(ed, list(initial))
    out = ed.snapshot()
    if any(ph.is_ground for ph in out.phrases):
        raise InternalError("length-1 grounds survived step 1")
    validate_relaxed(out, w)
    return out


def eliminate_odd_phrases(rs: RelaxedScheme, w: str, paranoid: bool = False,
                          trace: Optional[list[TraceEvent]] = None) -> RelaxedScheme:
    """Step 2: remove length-3 aba/bab phrases, then move every boundary
    at an odd position one step right; afterwards all phrases start even,
    have even length, and every length-2 phrase is a relaxed ground."""
    check_word(w)
    validate_relaxed(rs, w)
    if any(ph.is_ground for ph in rs.phrases):
        raise UsageError("step 2 requires a scheme without length-1 grounds")
    ed = _Editor(w, rs, paranoid, trace)
    ed.step = 2
    guard = 0
    while True:
        guard += 1
        if guard > 4 * ed.n:
            raise InternalError("length-3 elimination failed to terminate")
        triple = None
        for s in sorted(ed.len_of):
            if ed.len_of[s] == 3 and w[s : s + 3] in ("aba", "bab"):
                triple = s
                break
        if triple is None:
            break
        ed.note("start-triple", triple)
        worklist: list[int] = []
        if triple % 2 == 1:
            _eliminate(ed, triple - 1, True, triple - 1, worklist)
        else:
            _eliminate(ed, triple + 2, False, triple + 2, worklist)
        _drain_grounds(ed, worklist)
    mid = ed.snapshot()
    validate_relaxed(mid, w)
    return _align(mid, w, trace)


def _align(rs: RelaxedScheme, w: str, trace: Optional[list[TraceEvent]]) -> RelaxedScheme:
    """Move every odd boundary one position right and shift the sources
    accordingly; length-2 results become relaxed grounds.  Safe because
    every surviving sourced phrase occurs at a single parity."""
    phrases = []
    for ph in rs.phrases:
        q = ph.start + ph.length
        p2 = ph.start + (ph.start & 1)
        q2 = q + (q & 1)
        length2 = q2 - p2
        if length2 < 2:
            raise InternalError(f"alignment shrank phrase at {ph.start} to {length2}")
        if length2 == 2:
            phrases.append(RelaxedPhrase(p2, 2, None))
            continue
        if ph.source is None or (ph.source - ph.start) % 2 != 0:
            raise InternalError(
                f"alignment needs a same-parity source at {ph.start} "
                f"(source {ph.source})"
            )
        phrases.append(RelaxedPhrase(p2, length2, ph.source + (p2 - ph.start)))
    out = RelaxedScheme(rs.text_length, tuple(phrases))
    validate_relaxed(out, w)
    if any(ph.start % 2 or ph.length % 2 for ph in out.phrases):
        raise InternalError("alignment left an odd start or odd length")
    if trace is not None:
        trace.append(TraceEvent(2, "align", 0, out.partner_boundary_count()))
    return out


def halve(rs: RelaxedScheme, w: str) -> MacroScheme:
    """Step 3: inverse morphism.  Relaxed grounds become single stored
    letters (the first letter of their block is its own preimage); longer
    phrases halve their length and source."""
    check_word(w)
    validate_relaxed(rs, w)
    phrases: list[Phrase] = []
    for ph in rs.phrases:
        if ph.start % 2 or ph.length % 2:
            raise InternalError(f"halve needs even phrases, got {ph.start}+{ph.length}")
        if ph.is_relaxed_ground:
            phrases.append(Ground(w[ph.start]))
            continue
        if ph.source is None or ph.source % 2:
            raise InternalError(f"halve needs an even source at {ph.start}")
        phrases.append(Copy(ph.length // 2, ph.source // 2))
    return MacroScheme(rs.text_length // 2, tuple(phrases))


def reduce_once(scheme: MacroScheme, n: int, paranoid: bool = False,
                trace: Optional[list[TraceEvent]] = None) -> MacroScheme:
    """One full reduction: a valid scheme for t_n becomes a valid scheme
    for t_{n-1} whose size drops by at least ceil((g - 2) / 2) phrases,
    where g counts the input's ground phrases."""
    if n < 3:
        raise UsageError(f"reduction needs n >= 3, got {n}")
    w = thue_morse(n)
    verdict = validate(scheme, w)
    if not verdict.valid:
        raise UsageError(f"input scheme is not valid for t_{n}: {verdict.reason}")
    grounds = sum(1 for ph in scheme.phrases if isinstance(ph, Ground))
    rs = relax(scheme)
    rs = eliminate_ground_phrases(rs, w, paranoid, trace)
    rs = eliminate_odd_phrases(rs, w, paranoid, trace)
    out = halve(rs, w)
    prev = thue_morse(n - 1)
    verdict = validate(out, prev)
    if not verdict.valid:
        raise InternalError(f"reduced scheme invalid for t_{n - 1}: {verdict.reason}")
    allowed = scheme.size - ceil(max(grounds - 2, 0) / 2)
    if out.size > allowed:
        raise InternalError(
            f"size accounting violated: {scheme.size} -> {out.size}, "
            f"allowed {allowed} with {grounds} grounds"
        )
    return out


def reduce_to_bound(scheme: MacroScheme, n: int, paranoid: bool = False,
                    trace: Optional[list[TraceEvent]] = None) -> tuple[int, MacroScheme]:
    """Apply the reduction up to three times and return the first level i
    where the scheme for t_{n-i} has at most (input size - i) phrases.
    The amortized ground-count argument guarantees such i <= 3 whenever
    n >= 5; failure to find one is reported as a hard error."""
    if n < 5:
        raise UsageError(f"the three-level bound needs n >= 5, got {n}")
    k = scheme.size
    current = scheme
    for i in range(1, 4):
        current = reduce_once(current, n - i + 1, paranoid, trace)
        if current.size <= k - i:
            return i, current
    raise InternalError(
        f"no level i <= 3 reached size <= {k} - i: counterexample to the "
        f"three-level reduction guarantee"
    )
