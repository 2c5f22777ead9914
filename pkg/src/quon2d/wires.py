"""Worldline tracing for Majorana diagrams.

Strand positions are ephemeral (caps and cups shift them); most structural
reasoning needs the worldline a position belongs to.  Braids and scatterings
are treated as position-preserving here: any worldline they touch is recorded
as "touched", which is all the quietness predicates (boundary tracking,
string-genus loops) ever ask.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .diagram import Cap, Cup, Dot, DotPair, Element, MajoranaDiagram

LEFT = 0
RIGHT = 1


@dataclass
class Turn:
    kind: str  # "cap" | "cup"
    elem_index: int
    arms: tuple[int, int]  # (left segment, right segment)

    def other(self, sid: int) -> int:
        a, b = self.arms
        return b if sid == a else a

    def side_of(self, sid: int) -> int:
        return LEFT if self.arms[0] == sid else RIGHT


@dataclass
class Segment:
    sid: int
    birth_turn: int | None = None  # turn id, None when entering at the top
    death_turn: int | None = None  # turn id, None when leaving at the bottom
    birth_index: int = 0  # element index where the segment appears
    death_index: int = -1  # element index where it is consumed (-1: open)
    top_position: int | None = None
    bottom_position: int | None = None
    touches: list[tuple[int, Element]] = field(default_factory=list)


class WireTrace:
    """Segments, turns, and per-slice position maps of a diagram."""

    def __init__(self, diag: MajoranaDiagram):
        self.diagram = diag
        self.segments: list[Segment] = []
        self.turns: list[Turn] = []
        # slices[t] = tuple of segment ids at the slice before element t
        self.slices: list[tuple[int, ...]] = []

        cur: list[int] = []
        for pos in range(diag.width_in):
            cur.append(self._new_segment(birth_index=0, top_position=pos))
        self.slices.append(tuple(cur))

        for t, el in enumerate(diag.elements):
            if isinstance(el, Cap):
                a = self._new_segment(birth_index=t + 1)
                b = self._new_segment(birth_index=t + 1)
                tid = len(self.turns)
                self.turns.append(Turn("cap", t, (a, b)))
                self.segments[a].birth_turn = tid
                self.segments[b].birth_turn = tid
                cur[el.j:el.j] = [a, b]
            elif isinstance(el, Cup):
                a, b = cur[el.j], cur[el.j + 1]
                tid = len(self.turns)
                self.turns.append(Turn("cup", t, (a, b)))
                for sid in (a, b):
                    self.segments[sid].death_turn = tid
                    self.segments[sid].death_index = t
                del cur[el.j:el.j + 2]
            elif isinstance(el, Dot):
                self.segments[cur[el.j]].touches.append((t, el))
            elif isinstance(el, DotPair):
                self.segments[cur[el.j]].touches.append((t, el))
                self.segments[cur[el.k]].touches.append((t, el))
            else:
                self.segments[cur[el.j]].touches.append((t, el))
                self.segments[cur[el.j + 1]].touches.append((t, el))
            self.slices.append(tuple(cur))

        for pos, sid in enumerate(cur):
            self.segments[sid].bottom_position = pos

    def _new_segment(self, birth_index: int, top_position: int | None = None) -> int:
        sid = len(self.segments)
        self.segments.append(Segment(sid, birth_index=birth_index, top_position=top_position))
        return sid

    # -- worldlines ------------------------------------------------------

    def worldlines(self) -> list[list[int]]:
        """Connected components of segments linked through turns."""
        parent = list(range(len(self.segments)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for turn in self.turns:
            a, b = (find(s) for s in turn.arms)
            if a != b:
                parent[a] = b
        groups: dict[int, list[int]] = {}
        for s in range(len(self.segments)):
            groups.setdefault(find(s), []).append(s)
        return list(groups.values())

    def worldline_of(self, sid: int) -> list[int]:
        for group in self.worldlines():
            if sid in group:
                return group
        raise KeyError(sid)

    def is_closed_worldline(self, group: list[int]) -> bool:
        return all(
            self.segments[s].top_position is None
            and self.segments[s].bottom_position is None
            for s in group
        )

    def is_quiet(self, group: list[int]) -> bool:
        """No dots, braids, or scatterings touch any segment of the worldline."""
        return all(not self.segments[s].touches for s in group)

    def segment_at(self, elem_index: int, position: int) -> int:
        """Segment occupying `position` on the slice before element `elem_index`."""
        return self.slices[elem_index][position]

    def closed_quiet_loops(self) -> list[list[int]]:
        return [
            g
            for g in self.worldlines()
            if self.is_closed_worldline(g) and self.is_quiet(g)
        ]
