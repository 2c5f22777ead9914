"""Tractability-controlled network generation: stretch, insert, switch.

Moves are pure QuonDiagram -> QuonDiagram functions; the ledger logs every
move and tracks n_S, the number of braids switched into generic scatterings.
Component evaluation expands each transformed scattering into its two braid
terms (Table-style A/B weights), a sum of exactly 2^{n_S} tractable
evaluations.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from typing import Literal, Optional

from . import diagram as dg
from .diagram import (
    BraidNeg,
    BraidPos,
    Cap,
    Cup,
    DotPair,
    Element,
    MajoranaDiagram,
    Scattering,
    is_generic_angle,
    offset_elements,
)
from .errors import (
    InvalidRegion,
    InvalidSegment,
    ParityMismatch,
    PathCrossesHole,
    PatternMismatch,
    RegionOccupied,
    TooManyTransformed,
)
from .gaussian import evaluate_closed_fast
from .quon import (
    BOTTOM,
    BasisAssignment,
    OpenInterval,
    ParityCut,
    QuonDiagram,
    encode_basis,
    evaluate_closed_quon,
)
from .rewrite import braid_expansion_weights

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class Stretch:
    """Poke a strand finger sideways at a slice; bulk fingers return in place
    (value-preserving), encoder targets terminate on an interval."""

    time_index: int
    position: int  # strand to stretch
    reach: int  # how many strands to cross (to the right)
    target: Literal["bulk", "existing_encoder", "new_encoder"] = "bulk"
    interval: Optional[int] = None  # for existing_encoder


@dataclass(frozen=True)
class Insert:
    time_index: int
    position: int
    payload: Literal["closed_diagram", "string_hole_pair", "double_string_hole_pair"] = (
        "closed_diagram"
    )
    diagram: Optional[MajoranaDiagram] = None  # for closed_diagram


@dataclass(frozen=True)
class Switch:
    site: int  # element index
    change: Literal["flip_braid", "braid_to_scattering", "set_angle", "add_dot_pair"]
    theta: Optional[complex] = None
    position: Optional[int] = None  # for add_dot_pair (inserted before `site`)


Move = Stretch | Insert | Switch


@dataclass
class FactoryLedger:
    """Ordered move log plus the transformed-scattering sites."""

    seed: QuonDiagram
    moves: list[Move] = field(default_factory=list)
    transformed_scatterings: list[int] = field(default_factory=list)

    @property
    def n_s(self) -> int:
        return len(self.transformed_scatterings)

    def replay(self) -> QuonDiagram:
        """Re-apply the logged moves to the seed."""
        q = self.seed
        ledger = FactoryLedger(self.seed)
        for move in self.moves:
            if isinstance(move, Stretch):
                q, ledger = stretch(q, move, ledger)
            elif isinstance(move, Insert):
                q, ledger = insert_move(q, move, ledger)
            else:
                q, ledger = switch_move(q, move, ledger)
        return q


def _shift_cuts(cuts, t0: int, dt: int, pos0: int | None = None, dp: int = 0):
    out = []
    for c in cuts:
        t = c.time_index + (dt if c.time_index >= t0 else 0)
        strands = c.strands
        if pos0 is not None and c.time_index >= t0:
            strands = tuple(s + dp if s >= pos0 else s for s in strands)
        out.append(ParityCut(t, strands))
    return tuple(out)


def _shift_marks(marks, t0: int, dt: int):
    return frozenset((t + dt, p) if t >= t0 else (t, p) for (t, p) in marks)


def stretch(q: QuonDiagram, move: Stretch, ledger: FactoryLedger):
    """Insert the stretch braids; a bulk stretch leaves every component
    unchanged (outbound positive-over crossings cancel the inbound ones)."""
    widths = q.core.widths()
    t, p, reach = move.time_index, move.position, move.reach
    if not 0 <= t <= len(q.core.elements):
        raise InvalidSegment(f"time {t} out of range")
    w = widths[t]
    if not 0 <= p < w:
        raise InvalidSegment(f"strand {p} not alive at slice {t}")
    if move.target == "bulk" and (reach < 0 or p + reach >= w):
        raise InvalidSegment(f"reach {reach} runs past the slice (width {w})")
    for cut in q.parity_cuts:
        if cut.time_index == t:
            raise PathCrossesHole("stretch path crosses a hole at this slice")

    if move.target == "bulk":
        out = tuple(BraidPos(p + k) for k in range(reach))
        back = tuple(BraidNeg(p + reach - 1 - k) for k in range(reach))
        els = q.core.elements[:t] + out + back + q.core.elements[t:]
        core = q.core.with_elements(els)
        cuts = _shift_cuts(q.parity_cuts, t, 2 * reach)
        notches = _shift_cuts(q.notches, t, 2 * reach)
        marks = _shift_marks(q.boundary_tracking, t, 2 * reach)
        new_q = QuonDiagram(core, cuts, q.open_intervals, marks, notches)
        new_ledger = replace_ledger(ledger, move)
        return new_q, new_ledger

    if move.target == "new_encoder":
        # the finger terminates on a fresh 2-strand bottom interval placed at
        # the right edge; crossings carry it there
        if q.core.width_out == 0:
            raise InvalidSegment("no bottom boundary to grow an encoder on")
        end_w = q.core.width_out
        # pull a cap pair out of the strand: cap at p, route its right strand
        # to the right edge through positive braids
        els = list(q.core.elements)
        els.append(Cap(p))
        for j in range(p + 1, end_w + 1):
            els.append(BraidPos(j))
        for j in range(p, end_w):
            els.append(BraidPos(j))
        core = MajoranaDiagram(q.core.width_in, end_w + 2, tuple(els), q.core.amplitude)
        intervals = list(q.open_intervals)
        intervals.append(OpenInterval(BOTTOM, end_w, 2))
        new_q = QuonDiagram(core, q.parity_cuts, tuple(intervals),
                            q.boundary_tracking, q.notches)
        return new_q, replace_ledger(ledger, move)

    if move.target == "existing_encoder":
        if move.interval is None or not 0 <= move.interval < len(q.open_intervals):
            raise InvalidSegment("existing_encoder needs a valid interval id")
        iv = q.open_intervals[move.interval]
        if iv.side != BOTTOM:
            raise InvalidSegment("only bottom encoders can be stretched into")
        end = iv.start + iv.size
        if p >= end:
            raise InvalidSegment("stretch into an encoder from its left side")
        els = list(q.core.elements)
        els.append(Cap(p))
        for j in range(p + 1, end + 1):
            els.append(BraidPos(j))
        for j in range(p, end):
            els.append(BraidPos(j))
        core = MajoranaDiagram(q.core.width_in, q.core.width_out + 2,
                               tuple(els), q.core.amplitude)
        # the two new strands join the interval at its right edge; the
        # pairing data gains the corresponding fresh pair
        new_pairing = dg.tensor_product(iv.pairing_data, dg.MajoranaDiagram(0, 2, (Cap(0),)))
        new_iv = OpenInterval(BOTTOM, iv.start, iv.size + 2, new_pairing)
        intervals = []
        for k, other in enumerate(q.open_intervals):
            if k == move.interval:
                intervals.append(new_iv)
            elif other.side == BOTTOM and other.start >= end:
                intervals.append(replace(other, start=other.start + 2))
            else:
                intervals.append(other)
        new_q = QuonDiagram(core, q.parity_cuts, tuple(intervals),
                            q.boundary_tracking, q.notches)
        return new_q, replace_ledger(ledger, move)

    raise InvalidSegment(f"unknown stretch target {move.target!r}")


def replace_ledger(ledger: FactoryLedger, move: Move, transformed: int | None = None):
    new = FactoryLedger(ledger.seed, list(ledger.moves) + [move],
                        list(ledger.transformed_scatterings))
    if transformed is not None:
        new.transformed_scatterings.append(transformed)
    return new


def insert_move(q: QuonDiagram, move: Insert, ledger: FactoryLedger):
    """Insert a closed payload at an element-free slice, normalized so all
    tensor components are unchanged."""
    t, p = move.time_index, move.position
    widths = q.core.widths()
    if not 0 <= t <= len(q.core.elements):
        raise InvalidRegion(f"time {t} out of range")
    if not 0 <= p <= widths[t]:
        raise RegionOccupied(f"position {p} not inside slice {t} (width {widths[t]})")

    if move.payload == "closed_diagram":
        payload = move.diagram if move.diagram is not None else MajoranaDiagram.loop()
        if not payload.is_closed:
            raise InvalidRegion("payload must be a closed diagram")
        value = evaluate_closed_fast(payload)
        if abs(value) < 1e-12:
            raise InvalidRegion("payload evaluates to zero; cannot normalize")
        els = (
            q.core.elements[:t]
            + offset_elements(payload.elements, p)
            + q.core.elements[t:]
        )
        core = q.core.with_elements(els).scaled(payload.amplitude / value)
        cuts = _shift_cuts(q.parity_cuts, t, len(payload.elements))
        notches = _shift_cuts(q.notches, t, len(payload.elements))
        marks = _shift_marks(q.boundary_tracking, t, len(payload.elements))
        return (
            QuonDiagram(core, cuts, q.open_intervals, marks, notches),
            replace_ledger(ledger, move),
        )

    if move.payload == "string_hole_pair":
        if (p + 1) % 2:
            raise ParityMismatch(
                "string-hole pair needs an odd strand count to its left; "
                "use the double variant here"
            )
        els = q.core.elements[:t] + (Cap(p), Cup(p)) + q.core.elements[t:]
        core = q.core.with_elements(els).scaled(_SQRT2)
        cuts = list(_shift_cuts(q.parity_cuts, t, 2))
        cuts.append(ParityCut(t + 1, tuple(range(p)) + (p,)))
        notches = _shift_cuts(q.notches, t, 2)
        # the fresh ring is a boundary-tracking line around the new hole
        marks = _shift_marks(q.boundary_tracking, t, 2) | {(t + 1, p), (t + 1, p + 1)}
        return (
            QuonDiagram(core, tuple(cuts), q.open_intervals, marks, notches),
            replace_ledger(ledger, move),
        )

    if move.payload == "double_string_hole_pair":
        if p % 2:
            raise ParityMismatch("double string-hole pair needs an even left count")
        els = q.core.elements[:t] + (Cap(p), Cap(p + 1), Cup(p + 1), Cup(p)) + q.core.elements[t:]
        core = q.core.with_elements(els)
        cuts = list(_shift_cuts(q.parity_cuts, t, 4))
        cuts.append(ParityCut(t + 2, tuple(range(p)) + (p, p + 1)))
        notches = _shift_cuts(q.notches, t, 4)
        marks = _shift_marks(q.boundary_tracking, t, 4) | {
            (t + 2, p), (t + 2, p + 1), (t + 2, p + 2), (t + 2, p + 3)
        }
        return (
            QuonDiagram(core, tuple(cuts), q.open_intervals, marks, notches),
            replace_ledger(ledger, move),
        )
    raise InvalidRegion(f"unknown payload {move.payload!r}")


def switch_move(q: QuonDiagram, move: Switch, ledger: FactoryLedger):
    """Local replacement; n_S grows only for braid -> generic scattering."""
    els = q.core.elements
    if move.change == "add_dot_pair":
        t = move.site
        if not 0 <= t <= len(els):
            raise PatternMismatch(f"site {t} out of range")
        p = move.position or 0
        w = q.core.widths()[t]
        if not 0 <= p <= w - 2:
            raise PatternMismatch(f"no strand pair at {p}")
        new_els = els[:t] + (DotPair(p, p + 1),) + els[t:]
        core = q.core.with_elements(new_els)
        cuts = _shift_cuts(q.parity_cuts, t, 1)
        notches = _shift_cuts(q.notches, t, 1)
        marks = _shift_marks(q.boundary_tracking, t, 1)
        return (
            QuonDiagram(core, cuts, q.open_intervals, marks, notches),
            replace_ledger(ledger, move),
        )

    if not 0 <= move.site < len(els):
        raise PatternMismatch(f"site {move.site} out of range")
    el = els[move.site]
    if move.change == "flip_braid":
        if isinstance(el, BraidPos):
            new = BraidNeg(el.j)
        elif isinstance(el, BraidNeg):
            new = BraidPos(el.j)
        else:
            raise PatternMismatch(f"element {move.site} is not a braid")
        core = q.core.with_elements(els[:move.site] + (new,) + els[move.site + 1:])
        return (
            QuonDiagram(core, q.parity_cuts, q.open_intervals, q.boundary_tracking,
                        q.notches),
            replace_ledger(ledger, move),
        )
    if move.change == "braid_to_scattering":
        if not isinstance(el, (BraidPos, BraidNeg)):
            raise PatternMismatch(f"element {move.site} is not a braid")
        theta = complex(move.theta if move.theta is not None else 0.0)
        # keep the braid's own normalization so non-generic angles are no-ops
        amp = (
            cmath.exp(1j * math.pi / 8)
            if isinstance(el, BraidPos)
            else cmath.exp(-1j * math.pi / 8)
        )
        new = Scattering(el.j, theta)
        core = q.core.with_elements(els[:move.site] + (new,) + els[move.site + 1:])
        core = core.scaled(amp)
        transformed = move.site if is_generic_angle(theta) else None
        return (
            QuonDiagram(core, q.parity_cuts, q.open_intervals, q.boundary_tracking,
                        q.notches),
            replace_ledger(ledger, move, transformed=transformed),
        )
    if move.change == "set_angle":
        if not isinstance(el, Scattering):
            raise PatternMismatch(f"element {move.site} is not a scattering")
        new = Scattering(el.j, complex(move.theta), el.orientation)
        core = q.core.with_elements(els[:move.site] + (new,) + els[move.site + 1:])
        return (
            QuonDiagram(core, q.parity_cuts, q.open_intervals, q.boundary_tracking,
                        q.notches),
            replace_ledger(ledger, move),
        )
    raise PatternMismatch(f"unknown switch change {move.change!r}")


def evaluate_component_expanded(q: QuonDiagram, ledger: FactoryLedger, bits,
                                limit: int = 16) -> complex:
    """Component evaluation as the weighted sum of exactly 2^{n_S} braid-only
    variants of the transformed scatterings (plus the per-variant hole
    expansion)."""
    n_s = ledger.n_s
    if n_s > limit:
        raise TooManyTransformed(f"n_S = {n_s} exceeds the limit {limit}")
    closed = encode_basis(q, bits if isinstance(bits, BasisAssignment) else BasisAssignment(tuple(bits)))
    # sites index the core elements; encode_basis prepends the top encoders
    from .quon import TOP, encoder_ket

    assignment = bits if isinstance(bits, BasisAssignment) else BasisAssignment(tuple(bits))
    top_len = sum(
        len(encoder_ket(iv, assignment.bits[k]).elements)
        for k, iv in enumerate(q.open_intervals)
        if iv.side == TOP
    )
    sites = [s + top_len for s in ledger.transformed_scatterings]

    total = 0.0 + 0.0j
    for mask in range(1 << n_s):
        els = list(closed.core.elements)
        weight = 1.0 + 0.0j
        for bit, site in enumerate(sites):
            el = els[site]
            a_term, b_term = braid_expansion_weights(el)
            if mask >> bit & 1:
                els[site] = BraidNeg(el.j)
                weight *= b_term
            else:
                els[site] = BraidPos(el.j)
                weight *= a_term
        variant = QuonDiagram(
            closed.core.with_elements(els), closed.parity_cuts,
            notches=closed.notches,
        )
        total += weight * evaluate_closed_quon(variant)
    return total


def parse_move_script(text: str) -> list[Move]:
    """Line-oriented move script: one move per line, `#` comments.

    stretch <time> <position> <reach> [bulk|new_encoder|existing_encoder <k>]
    insert  <time> <position> [loop|string_hole_pair|double_string_hole_pair]
    switch  <site> flip_braid | braid_to_scattering <theta> | set_angle <theta>
    switch  <time> add_dot_pair <position>
    """
    moves: list[Move] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0].lower()
        try:
            if kind == "stretch":
                t, p, reach = int(parts[1]), int(parts[2]), int(parts[3])
                target = parts[4] if len(parts) > 4 else "bulk"
                interval = int(parts[5]) if len(parts) > 5 else None
                moves.append(Stretch(t, p, reach, target, interval))
            elif kind == "insert":
                t, p = int(parts[1]), int(parts[2])
                payload = parts[3] if len(parts) > 3 else "loop"
                if payload == "loop":
                    moves.append(Insert(t, p, "closed_diagram"))
                else:
                    moves.append(Insert(t, p, payload))
            elif kind == "switch":
                site = int(parts[1])
                change = parts[2]
                if change in ("braid_to_scattering", "set_angle"):
                    moves.append(Switch(site, change, theta=complex(parts[3])))
                elif change == "add_dot_pair":
                    moves.append(Switch(site, change, position=int(parts[3])))
                else:
                    moves.append(Switch(site, change))
            else:
                raise ValueError(f"unknown move {kind!r}")
        except (IndexError, ValueError) as exc:
            raise ValueError(f"move script line {lineno}: {exc}") from exc
    return moves
