"""Per-face clause generation by run elimination.

A face folds under an assignment iff the assignment survives repeated
elimination of minimal runs (maximal blocks of equal-length edges shorter
than both flanking edges).  Instead of checking one assignment, this
module emits the elimination steps as exact-count clauses over the face's
angle variables: an odd run pins a tie among its incident angles and fuses
the run with both flanks into one edge; an even run pins a one-sided
majority, recorded through two fresh variables, and vanishes leaving one
surviving angle between the flanks.  When only equal lengths remain a
single closing clause fixes the mountain surplus of the whole cycle.

The run structure lives in a cyclic doubly-linked list so each step costs
amortized constant time; total work is linear in the face's angle count up
to the usual logarithmic factor from merging angle queues by size.
"""

from __future__ import annotations

import gc
import math
from collections import deque
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from .errors import InternalDegeneracy
from .model import FaceCycle

RED = "red"
BLUE = "blue"


class Clause(NamedTuple):
    """Exactly ``target`` of ``vars`` must be true.

    ``vars`` is ordered (boundary order for face clauses, rotation order
    for vertex clauses) so that constraint dumps are byte-stable.  A tuple
    subclass keeps construction cheap; faces with a million angles emit a
    clause per elimination step.
    """

    color: str
    vars: tuple[int, ...]
    target: int

    def validate(self) -> None:
        if self.color not in (RED, BLUE):
            raise InternalDegeneracy(f"clause color {self.color!r}")
        if not 0 <= self.target <= len(self.vars):
            raise InternalDegeneracy(
                f"clause target {self.target} outside 0..{len(self.vars)}"
            )
        if len(set(self.vars)) != len(self.vars):
            raise InternalDegeneracy("clause lists a variable twice")


class _Run:
    """A maximal block of equal-length edges on the shrinking cycle.

    ``inner`` holds the angle ids strictly inside the block, in boundary
    order; ``right_angle`` is the angle between this block and the next.
    Together the runs partition the cycle's angles.
    """

    __slots__ = ("length", "count", "inner", "right_angle", "prev", "next", "alive")

    def __init__(self, length, count: int, inner: deque, right_angle: int):
        self.length = length
        self.count = count
        self.inner = inner
        self.right_angle = right_angle
        self.prev: "_Run" = self
        self.next: "_Run" = self
        self.alive = True

    def angles(self) -> tuple[int, ...]:
        return tuple(self.inner) + (self.right_angle,)

    def is_minimal(self) -> bool:
        return (
            self.prev is not self
            and self.prev.length > self.length
            and self.next.length > self.length
        )


class RunList:
    """Cyclic run decomposition of a face cycle plus its work queue.

    ``runs()`` walks the list in boundary order.  The queue seeded at build
    time holds exactly the runs shorter than both neighbors; runs touched
    by later splices are re-enqueued as candidates and re-validated when
    popped, so stale entries are harmless.
    """

    def __init__(self) -> None:
        self.head: _Run | None = None
        self.size = 0
        self.queue: deque[_Run] = deque()

    @classmethod
    def from_entries(cls, entries: Sequence[tuple]) -> "RunList":
        rl = cls()
        n = len(entries)
        if n == 0:
            return rl
        start = 0
        prev_length = entries[-1][0]
        for i in range(n):
            if entries[i][0] != prev_length:
                start = i
                break
            prev_length = entries[i][0]
        else:
            # All lengths equal: one run carrying every angle.
            inner = deque(entries[i][1] for i in range(n - 1))
            rl._append(_Run(entries[0][0], n, inner, entries[n - 1][1]))
            return rl

        rot = list(entries[start:]) + list(entries[:start])
        runs: list[_Run] = []
        i = 0
        while i < n:
            length = rot[i][0]
            j = i + 1
            while j < n and rot[j][0] == length:
                j += 1
            if j - i == 1:
                inner = deque()
            else:
                inner = deque(rot[t][1] for t in range(i, j - 1))
            runs.append(_Run(length, j - i, inner, rot[j - 1][1]))
            i = j
        m = len(runs)
        for idx in range(m):
            run = runs[idx]
            run.prev = runs[idx - 1]
            run.next = runs[idx + 1 - m]
        rl.head = runs[0]
        rl.size = m
        queue = rl.queue
        for run in runs:
            if run.prev.length > run.length < run.next.length:
                queue.append(run)
        return rl

    def _append(self, run: _Run) -> None:
        if self.head is None:
            self.head = run
        else:
            tail = self.head.prev
            tail.next = run
            run.prev = tail
            run.next = self.head
            self.head.prev = run
        self.size += 1

    def _unlink(self, run: _Run) -> None:
        run.alive = False
        run.prev.next = run.next
        run.next.prev = run.prev
        if self.head is run:
            self.head = run.next if run.next is not run else None
        self.size -= 1

    def _insert_after(self, anchor: _Run, run: _Run) -> None:
        run.prev = anchor
        run.next = anchor.next
        anchor.next.prev = run
        anchor.next = run
        self.size += 1

    def runs(self) -> Iterable[_Run]:
        if self.head is None:
            return
        run = self.head
        while True:
            yield run
            run = run.next
            if run is self.head:
                break

    def as_pairs(self) -> list[tuple]:
        return [(r.length, r.count) for r in self.runs()]

    def enqueue_around(self, run: _Run) -> None:
        # Only the spliced-in run and its direct neighbors can have gained
        # minimality; anything still non-minimal here is re-examined when a
        # later splice touches it again.
        for c in (run, run.prev, run.next):
            if (
                c.alive
                and c.prev is not c
                and c.prev.length > c.length < c.next.length
            ):
                self.queue.append(c)

    def _absorb_next(self, left: _Run) -> None:
        """Fuse ``left.next`` into ``left``; lengths must already match."""
        right = left.next
        joint = left.right_angle
        if len(left.inner) >= len(right.inner):
            left.inner.append(joint)
            left.inner.extend(right.inner)
            merged = left.inner
        else:
            right.inner.appendleft(joint)
            right.inner.extendleft(reversed(left.inner))
            merged = right.inner
        left.inner = merged
        left.right_angle = right.right_angle
        left.count += right.count
        self._unlink(right)

    def splice(self, run: _Run, z_var: int | None = None) -> tuple[tuple[int, ...], _Run]:
        """Eliminate a minimal run; return its incident angles and the
        run now occupying the splice site.

        For an odd run (``z_var`` None) the run and one edge of each flank
        fuse into a single longer edge.  For an even run the block vanishes
        and ``z_var`` becomes the angle between the flanks.  In both cases
        at most two equal-length adjacency checks fire, so the step is
        amortized constant time.
        """
        left, right = run.prev, run.next
        incident = (left.right_angle, *run.inner, run.right_angle)
        if (z_var is None) != (run.count % 2 == 1):
            raise InternalDegeneracy("fresh angle variable on the wrong parity")

        if z_var is not None:
            # Even block: flanks become adjacent across the surviving angle.
            left.right_angle = z_var
            self._unlink(run)
            if left is not right and left.length == right.length:
                self._absorb_next(left)
            self.enqueue_around(left)
            return incident, left

        if left is right:
            # One flanking run lends both its first and last edge.
            if left.count < 3:
                raise InternalDegeneracy(
                    "odd run wraps onto a shared flank with too few edges; "
                    "closure cannot have held"
                )
            merged = _Run(
                left.length - run.length + left.length, 1, deque(), left.inner.popleft()
            )
            left.right_angle = left.inner.pop()
            left.count -= 2
            self._unlink(run)
            self._insert_after(left, merged)
            self.enqueue_around(merged)
            return incident, merged

        new_right_angle = right.inner.popleft() if right.count > 1 else right.right_angle
        merged = _Run(
            left.length - run.length + right.length, 1, deque(), new_right_angle
        )
        self._unlink(run)
        if left.count > 1:
            left.right_angle = left.inner.pop()
            left.count -= 1
            anchor = left
        else:
            anchor = left.prev
            self._unlink(left)
        if right.count > 1:
            right.count -= 1
        else:
            if anchor is right:
                anchor = right.prev
            self._unlink(right)

        if self.size == 0:
            # Both flanks were single edges and nothing else remained; only
            # possible when closure never held, but keep the list coherent.
            merged.prev = merged.next = merged
            self.head = merged
            self.size = 1
            self.enqueue_around(merged)
            return incident, merged
        self._insert_after(anchor, merged)

        if anchor.alive and anchor.length == merged.length:
            self._absorb_next(anchor)
            merged = anchor
        follower = merged.next
        if follower is not merged and follower.length == merged.length:
            self._absorb_next(merged)
        self.enqueue_around(merged)
        return incident, merged


def runlist_build(cycle: FaceCycle) -> RunList:
    """Run decomposition of a face cycle, queue seeded with minimal runs."""
    return RunList.from_entries(cycle.entries)


def runlist_splice(rl: RunList, run: _Run, z_var: int | None = None):
    """Eliminate ``run`` from ``rl``; see :meth:`RunList.splice`."""
    return rl.splice(run, z_var)


def _normalized_entries(entries: Sequence[tuple]) -> Sequence[tuple]:
    """Rescale lengths to integers; comparisons in the hot loop stay cheap."""
    if all(type(length) is int for length, _ in entries):
        return entries
    scale = 1
    for length, _ in entries:
        if isinstance(length, Fraction) and length.denominator != 1:
            scale = math.lcm(scale, length.denominator)
    if scale == 1:
        return [(int(length), angle) for length, angle in entries]
    return [(int(length * scale), angle) for length, angle in entries]


def generate_face_constraints(
    cycle: FaceCycle, fresh_start: int = 0
) -> tuple[list[Clause], int]:
    """Clause set equivalent to flat-foldability of one face cycle.

    Returns the clauses in emission order and the number of fresh variables
    minted (ids ``fresh_start`` onward).  Requires a closing cycle: even
    entry count and zero alternating length sum.  An assignment of the
    cycle's angles folds iff it extends to the fresh variables satisfying
    every clause; each original angle lands in exactly one red clause and
    each fresh variable in one red and one blue.
    """
    entries = cycle.entries
    if not entries:
        return [], 0
    n = len(entries)
    if n % 2 != 0:
        raise InternalDegeneracy(f"face cycle of odd length {n} cannot close")
    normalized = _normalized_entries(entries)
    total = 0
    sign = 1
    for length, _ in normalized:
        total = total + length if sign > 0 else total - length
        sign = -sign
    if total != 0:
        # report the unscaled sum; the scale factor is positive so only
        # zero-ness carries over from the normalized form
        exact = sum(
            length if i % 2 == 0 else -length
            for i, (length, _) in enumerate(entries)
        )
        raise InternalDegeneracy(
            f"face cycle alternating sum is {exact}, not zero; closure must "
            "be checked before constraint generation"
        )

    # The reduction allocates one linked node per run plus merge deques;
    # refcounting reclaims them all, so cycle-collection passes over the
    # live list are pure overhead.  Suspend them for large faces.
    suspend_gc = n >= 50_000 and gc.isenabled()
    if suspend_gc:
        gc.disable()
    try:
        rl = RunList.from_entries(normalized)
        clauses: list[Clause] = []
        append = clauses.append
        queue = rl.queue
        popleft = queue.popleft
        fresh = fresh_start

        while rl.size > 1:
            if queue:
                run = popleft()
                if not run.alive:
                    continue
                length = run.length
                if not (run.prev.length > length < run.next.length):
                    continue
            else:
                # The queue discipline should never leave a minimal run
                # behind; rescan as a safeguard since a shortest run always
                # exists.
                run = next((r for r in rl.runs() if r.is_minimal()), None)
                if run is None:
                    raise InternalDegeneracy(
                        "no minimal run in a multi-run cycle"
                    )
            k = run.count
            if k % 2 == 1:
                incident, _ = rl.splice(run)
                append(Clause(RED, incident, (k + 1) // 2))
            else:
                y = fresh
                z = fresh + 1
                fresh += 2
                incident, _ = rl.splice(run, z)
                append(Clause(RED, (y,) + incident, (k + 2) // 2))
                append(Clause(BLUE, (y, z), 1))
    finally:
        if suspend_gc:
            gc.enable()

    last = rl.head
    if last is None or last.count % 2 != 0:
        raise InternalDegeneracy("terminal run has odd edge count despite closure")
    bias = 2 if cycle.is_exterior else -2
    clauses.append(Clause(RED, last.angles(), (last.count + bias) // 2))
    return clauses, fresh - fresh_start
