"""
Front Kernel
Generic front projections stored as one-event-per-column Morse words:
parsing, validation, component tracing, classical invariants, Legendrian
Reidemeister rewrites and far-commutation normalization.
"""

import re
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from kirby.errors import FrontSyntaxError, FrontValidationError, PatternMismatch
from kirby.utils import get_logger

LOG = get_logger(__name__)

LEFT_CUSP, RIGHT_CUSP, CROSSING = "L", "R", "X"
BLOCK_SIZES = {LEFT_CUSP: (0, 2), RIGHT_CUSP: (2, 0), CROSSING: (2, 2)}

# Front of ker(dz + x dy): the strand of more negative slope is in front, so a
# crossing carries no over/under bit. Its sign is +1 when both strands point
# the same horizontal direction and -1 otherwise.
CROSSING_SIGN_CONVENTION = "same-direction-positive"

Orientation = Tuple[int, ...]

_EVENT_RE = re.compile(r"^([LRX])\s*(\d+)$")


# --- Events ---
@dataclass(frozen=True)
class Event:
    kind: str
    level: int

    def __post_init__(self):
        if self.kind not in BLOCK_SIZES:
            raise FrontValidationError(f"unknown event kind {self.kind!r}")
        if not isinstance(self.level, int) or self.level < 1:
            raise FrontValidationError(f"event level must be a positive integer, got {self.level!r}")

    @property
    def inputs(self) -> int:
        return BLOCK_SIZES[self.kind][0]

    @property
    def outputs(self) -> int:
        return BLOCK_SIZES[self.kind][1]

    def shifted(self, offset: int) -> "Event":
        return Event(self.kind, self.level + offset)

    def __str__(self) -> str:
        return f"{self.kind} {self.level}"


def L(level: int) -> Event:
    return Event(LEFT_CUSP, level)


def R(level: int) -> Event:
    return Event(RIGHT_CUSP, level)


def X(level: int) -> Event:
    return Event(CROSSING, level)


def parse_event(token: str) -> Event:
    match = _EVENT_RE.match(token.strip())
    if not match:
        raise FrontSyntaxError(f"malformed event {token.strip()!r}")
    return Event(match.group(1), int(match.group(2)))


def parse_events(text: str) -> List[Event]:
    """Events separated by newlines, '/' or ','."""
    tokens = [t for t in re.split(r"[/\n,;]", text) if t.strip()]
    return [parse_event(t) for t in tokens]


def format_events(events: Iterable[Event], sep: str = " / ") -> str:
    return sep.join(str(e) for e in events)


def strand_counts(events: Sequence[Event], start: int = 0) -> List[int]:
    """Strand count at every slice; slice c sits just before column c."""
    counts = [start]
    s = start
    for col, e in enumerate(events):
        if e.kind == LEFT_CUSP:
            if e.level > s + 1:
                raise FrontValidationError(f"column {col}: L {e.level} needs level <= {s + 1}")
            s += 2
        else:
            if e.level > s - 1:
                raise FrontValidationError(f"column {col}: {e} needs level <= {s - 1} ({s} strands)")
            if e.kind == RIGHT_CUSP:
                s -= 2
        counts.append(s)
    return counts


# --- Diagrams ---
@dataclass(frozen=True)
class FrontDiagram:
    events: Tuple[Event, ...] = ()
    name: str = ""
    orient: Optional[Orientation] = None

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        counts = strand_counts(self.events)
        if counts[-1] != 0:
            raise FrontValidationError(f"diagram does not close: {counts[-1]} strands remain")
        if self.orient is not None:
            orient = tuple(int(s) for s in self.orient)
            if any(s not in (1, -1) for s in orient):
                raise FrontValidationError("orientation signs must be +1 or -1")
            count = trace_components(self).count
            if len(orient) != count:
                raise FrontValidationError(f"orientation has {len(orient)} signs for {count} components")
            object.__setattr__(self, "orient", orient)

    @classmethod
    def from_word(cls, text: str, name: str = "", orient: Optional[Sequence[int]] = None) -> "FrontDiagram":
        return cls(tuple(parse_events(text)), name, None if orient is None else tuple(orient))

    def __len__(self) -> int:
        return len(self.events)

    def word(self) -> str:
        return format_events(self.events)

    def counts(self) -> List[int]:
        return strand_counts(self.events)

    def with_orient(self, orient: Optional[Sequence[int]]) -> "FrontDiagram":
        return FrontDiagram(self.events, self.name, None if orient is None else tuple(orient))


# --- File format ---
def _parse_keyed(body: str, line_no: int) -> Dict[int, str]:
    entries = {}
    for item in body.split():
        key, sep, value = item.partition("=")
        if not sep or not re.fullmatch(r"c\d+", key):
            raise FrontSyntaxError(f"line {line_no}: expected c<k>=<value>, got {item!r}")
        index = int(key[1:])
        if index < 1:
            raise FrontSyntaxError(f"line {line_no}: component keys start at c1")
        entries[index - 1] = value
    return entries


def parse_orientation_tokens(entries: Dict[int, str], count: int) -> Orientation:
    signs = []
    for k in range(count):
        token = entries.get(k)
        if token not in ("+", "-"):
            raise FrontValidationError(f"orientation for c{k + 1} missing or not +/-")
        signs.append(1 if token == "+" else -1)
    extra = [k for k in entries if k >= count]
    if extra:
        raise FrontValidationError(f"orientation given for unknown component c{extra[0] + 1}")
    return tuple(signs)


def read_front_text(text: str, blocks: Sequence[str] = ("orient",)) -> Tuple[str, List[Event], Dict[str, Tuple[str, int]]]:
    """Split a front-like file into its name, events and keyed trailing blocks."""
    name = ""
    events: List[Event] = []
    found: Dict[str, Tuple[str, int]] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("front ") or line == "front":
            name = line[5:].strip()
            continue
        head, sep, body = line.partition(":")
        if sep and head.strip() in blocks:
            found[head.strip()] = (body.strip(), line_no)
            continue
        try:
            events.extend(parse_events(line))
        except FrontSyntaxError as e:
            raise FrontSyntaxError(f"line {line_no}: {e}")
    return name, events, found


def parse_front(text: str) -> FrontDiagram:
    name, events, found = read_front_text(text)
    d = FrontDiagram(tuple(events), name)
    if "orient" in found:
        body, line_no = found["orient"]
        count = trace_components(d).count
        d = d.with_orient(parse_orientation_tokens(_parse_keyed(body, line_no), count))
    return d


def parse_keyed_block(body: str, line_no: int = 0) -> Dict[int, str]:
    return _parse_keyed(body, line_no)


def format_keyed(values: Sequence, render) -> str:
    return " ".join(f"c{k + 1}={render(v)}" for k, v in enumerate(values))


def serialize_front(d: FrontDiagram, name: Optional[str] = None) -> str:
    lines = [f"front {name if name is not None else (d.name or 'diagram')}"]
    lines.extend(str(e) for e in d.events)
    if d.orient is not None:
        lines.append("orient: " + format_keyed(d.orient, lambda s: "+" if s > 0 else "-"))
    return "\n".join(lines) + "\n"


# --- Component tracing ---
@dataclass(frozen=True)
class ComponentMap:
    """
    Arcs are strand pieces running from a left cusp (or a left boundary slot)
    to a right cusp (or the right boundary); crossings do not cut arcs.
    """
    count: int
    slices: Tuple[Tuple[int, ...], ...]
    event_arcs: Tuple[Tuple[int, int], ...]
    arc_component: Tuple[int, ...]
    anchors: Tuple[Optional[int], ...]
    kinds: Tuple[str, ...]
    start_strands: int = 0

    def component_at(self, slice_index: int, position: int) -> int:
        return self.arc_component[self.slices[slice_index][position - 1]]

    def event_components(self, column: int) -> Tuple[int, int]:
        lo, hi = self.event_arcs[column]
        return self.arc_component[lo], self.arc_component[hi]

    def closed_components(self) -> List[int]:
        return [k for k, a in enumerate(self.anchors) if a is not None]


@lru_cache(maxsize=512)
def _trace(events: Tuple[Event, ...], start: int) -> ComponentMap:
    strand_counts(events, start)
    parent = list(range(start))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    current = list(range(start))
    next_id = start
    slices = [tuple(current)]
    event_arcs = []
    for e in events:
        p = e.level - 1
        if e.kind == LEFT_CUSP:
            lo, hi = next_id, next_id + 1
            next_id += 2
            parent.extend([lo, lo])
            current[p:p] = [lo, hi]
        elif e.kind == RIGHT_CUSP:
            lo, hi = current[p], current[p + 1]
            parent[find(hi)] = find(lo)
            del current[p:p + 2]
        else:
            lo, hi = current[p], current[p + 1]
            current[p], current[p + 1] = hi, lo
        event_arcs.append((lo, hi))
        slices.append(tuple(current))

    # Canonical order: first left cusp column; open classes follow by slot.
    first_cusp: Dict[int, int] = {}
    for col, e in enumerate(events):
        if e.kind == LEFT_CUSP:
            first_cusp.setdefault(find(event_arcs[col][0]), col)
    roots = sorted(first_cusp, key=first_cusp.get)
    open_roots = []
    for slot in range(start):
        r = find(slot)
        if r not in first_cusp and r not in open_roots:
            open_roots.append(r)
    # A class holding a boundary slot is open even when it also has cusps.
    slot_roots = {find(slot) for slot in range(start)}
    closed = [r for r in roots if r not in slot_roots]
    opened = [r for r in roots if r in slot_roots] + [r for r in open_roots if r not in roots]
    order = {r: k for k, r in enumerate(closed + opened)}
    arc_component = tuple(order[find(a)] for a in range(next_id))
    anchors = tuple([first_cusp[r] for r in closed] + [None] * len(opened))
    return ComponentMap(
        count=len(order),
        slices=tuple(slices),
        event_arcs=tuple(event_arcs),
        arc_component=arc_component,
        anchors=anchors,
        kinds=tuple(e.kind for e in events),
        start_strands=start,
    )


def trace_components(d) -> ComponentMap:
    events = d.events if isinstance(d, FrontDiagram) else tuple(d)
    return _trace(tuple(events), 0)


def trace_fragment(events: Sequence[Event], start_strands: int = 0) -> ComponentMap:
    return _trace(tuple(events), start_strands)


def close_fragment(events: Sequence[Event], passes: int, orient: Optional[Sequence[int]] = None) -> "FrontDiagram":
    """
    Close every pass slot of a fragment with a nested cusp pair above it. The
    closing components come first and are oriented so their slot arcs point
    right; `orient` covers the fragment's own closed components.
    """
    opening = tuple(L(j) for j in range(1, passes + 1))
    closing = tuple(R(j) for j in range(passes, 0, -1))
    signs = None if orient is None else (-1,) * passes + tuple(orient)
    return FrontDiagram(opening + tuple(events) + closing, "", signs)


def _resolve_orientation(cmap: ComponentMap, o: Optional[Sequence[int]]) -> Tuple[int, ...]:
    if o is None:
        return tuple([1] * cmap.count)
    if len(o) != cmap.count:
        raise FrontValidationError(f"orientation has {len(o)} signs for {cmap.count} components")
    return tuple(o)


def arc_directions(cmap: ComponentMap, o: Optional[Sequence[int]] = None) -> Tuple[int, ...]:
    """+1 for arcs traversed rightwards, -1 for leftwards."""
    signs = _resolve_orientation(cmap, o)
    n_arcs = len(cmap.arc_component)
    partners: List[List[int]] = [[] for _ in range(n_arcs)]
    for kind, (lo, hi) in zip(cmap.kinds, cmap.event_arcs):
        if kind != CROSSING:
            partners[lo].append(hi)
            partners[hi].append(lo)
    direction = [0] * n_arcs
    queue = deque()
    for comp, column in enumerate(cmap.anchors):
        if column is None:
            continue
        lo, hi = cmap.event_arcs[column]
        direction[hi], direction[lo] = signs[comp], -signs[comp]
        queue.extend([lo, hi])
    for slot in range(cmap.start_strands):
        if direction[slot] == 0 and cmap.anchors[cmap.arc_component[slot]] is None:
            direction[slot] = 1
            queue.append(slot)
    while queue:
        a = queue.popleft()
        for b in partners[a]:
            if direction[b] == 0:
                direction[b] = -direction[a]
                queue.append(b)
    return tuple(d if d else 1 for d in direction)


# --- Classical invariants ---
@dataclass(frozen=True)
class ClassicalInvariants:
    tb: int
    rot: int
    writhe: int
    cusps_up: int
    cusps_down: int
    cusps_right: int


def crossing_sign(dir_lo: int, dir_hi: int) -> int:
    return 1 if dir_lo == dir_hi else -1


def classical_invariants(d: FrontDiagram, c: int, o: Optional[Sequence[int]] = None) -> ClassicalInvariants:
    cmap = trace_components(d)
    if not 0 <= c < cmap.count:
        raise IndexError(f"component {c} out of range 0..{cmap.count - 1}")
    dirs = arc_directions(cmap, o if o is not None else d.orient)
    writhe = up = down = right = 0
    for kind, (lo, hi) in zip(cmap.kinds, cmap.event_arcs):
        if cmap.arc_component[lo] != c:
            continue
        if kind == CROSSING:
            if cmap.arc_component[hi] == c:
                writhe += crossing_sign(dirs[lo], dirs[hi])
        elif kind == LEFT_CUSP:
            if dirs[lo] < 0:
                up += 1
            else:
                down += 1
        else:
            right += 1
            if dirs[lo] > 0:
                up += 1
            else:
                down += 1
    return ClassicalInvariants(
        tb=writhe - right,
        rot=(down - up) // 2,
        writhe=writhe,
        cusps_up=up,
        cusps_down=down,
        cusps_right=right,
    )


def linking_number(d: FrontDiagram, i: int, j: int, o: Optional[Sequence[int]] = None) -> int:
    if i == j:
        raise ValueError("linking_number needs two distinct components")
    cmap = trace_components(d)
    dirs = arc_directions(cmap, o if o is not None else d.orient)
    total = 0
    for kind, (lo, hi) in zip(cmap.kinds, cmap.event_arcs):
        if kind != CROSSING:
            continue
        if {cmap.arc_component[lo], cmap.arc_component[hi]} == {i, j}:
            total += crossing_sign(dirs[lo], dirs[hi])
    if total % 2:
        raise FrontValidationError("odd inter-component crossing count")
    return total // 2


# --- Component correspondence across local rewrites ---
def local_reference_points(counts: Sequence[int], start: int, stop_before: int, stop_after: int):
    """Strand positions outside a rewritten column range, paired before/after."""
    delta = stop_after - stop_before
    for s in range(0, start + 1):
        for pos in range(1, counts[s] + 1):
            yield (s, pos), (s, pos)
    for s in range(stop_before, len(counts)):
        for pos in range(1, counts[s] + 1):
            yield (s, pos), (s + delta, pos)


def correspond_components(before: FrontDiagram, before_orient: Optional[Sequence[int]],
                          after: FrontDiagram, points) -> Dict[int, Tuple[int, int]]:
    """
    Map before components to (after component, after orientation sign) through
    paired strand positions. The sign keeps each strand's direction unchanged.
    """
    cmap_b, cmap_a = trace_components(before), trace_components(after)
    dirs_b = arc_directions(cmap_b, before_orient)
    dirs_a = arc_directions(cmap_a, None)
    mapping: Dict[int, Tuple[int, int]] = {}
    for (sb, pb), (sa, pa) in points:
        arc_b = cmap_b.slices[sb][pb - 1]
        arc_a = cmap_a.slices[sa][pa - 1]
        comp_b = cmap_b.arc_component[arc_b]
        if comp_b in mapping:
            continue
        mapping[comp_b] = (cmap_a.arc_component[arc_a], dirs_b[arc_b] * dirs_a[arc_a])
    return mapping


def carry_orientation(before: FrontDiagram, after_events: Sequence[Event], points,
                      default: int = 1) -> FrontDiagram:
    after = FrontDiagram(tuple(after_events), before.name)
    if before.orient is None:
        return after
    mapping = correspond_components(before, before.orient, after, points)
    signs = [default] * trace_components(after).count
    for comp_a, sign in mapping.values():
        signs[comp_a] = sign
    return after.with_orient(signs)


# --- Legendrian Reidemeister moves ---
# Each variant maps a level p to (source, target) fragments; forward is
# source -> target. The type I source is empty.
REIDEMEISTER_VARIANTS = {
    "I-above": lambda p: ((), (L(p + 1), X(p), R(p + 1))),
    "I-below": lambda p: ((), (L(p), X(p + 1), R(p))),
    "II-L-above": lambda p: ((L(p + 1),), (L(p), X(p + 1), X(p))),
    "II-L-below": lambda p: ((L(p),), (L(p + 1), X(p), X(p + 1))),
    "II-R-above": lambda p: ((R(p + 1),), (X(p), X(p + 1), R(p))),
    "II-R-below": lambda p: ((R(p),), (X(p + 1), X(p), R(p + 1))),
    "III": lambda p: ((X(p), X(p + 1), X(p)), (X(p + 1), X(p), X(p + 1))),
}


def reidemeister_fragments(variant: str, level: int, direction: str = "forward"):
    if variant not in REIDEMEISTER_VARIANTS:
        raise PatternMismatch(f"unknown Reidemeister variant {variant!r}")
    if direction not in ("forward", "backward"):
        raise PatternMismatch(f"direction must be forward or backward, got {direction!r}")
    src, tgt = REIDEMEISTER_VARIANTS[variant](level)
    return (src, tgt) if direction == "forward" else (tgt, src)


def _rewrite_reidemeister(events: Tuple[Event, ...], variant: str, column: int, level: int,
                          direction: str) -> Tuple[Event, ...]:
    src, tgt = reidemeister_fragments(variant, level, direction)
    if not 0 <= column <= len(events):
        raise PatternMismatch(f"column {column} outside 0..{len(events)}")
    if tuple(events[column:column + len(src)]) != tuple(src):
        raise PatternMismatch(
            f"{variant} {direction} at ({column}, {level}) expects [{format_events(src)}], "
            f"found [{format_events(events[column:column + len(src)])}]"
        )
    if not src and strand_counts(events)[column] < level:
        raise PatternMismatch(f"{variant} needs a strand at level {level} before column {column}")
    new_events = events[:column] + tuple(tgt) + events[column + len(src):]
    try:
        strand_counts(new_events)
    except FrontValidationError as e:
        raise PatternMismatch(f"{variant} {direction} at ({column}, {level}) leaves an invalid word: {e}")
    return new_events


def apply_reidemeister(d: FrontDiagram, move: str, location: Tuple[int, int],
                       direction: str = "forward") -> FrontDiagram:
    column, level = location
    src, tgt = reidemeister_fragments(move, level, direction)
    new_events = _rewrite_reidemeister(d.events, move, column, level, direction)
    points = list(local_reference_points(d.counts(), column, column + len(src), column + len(tgt)))
    LOG.debug("reidemeister %s %s at (%d, %d)", move, direction, column, level)
    return carry_orientation(d, new_events, points)


def reidemeister_component_map(d: FrontDiagram, move: str, location: Tuple[int, int],
                               direction: str = "forward") -> Dict[int, Tuple[int, int]]:
    column, level = location
    src, tgt = reidemeister_fragments(move, level, direction)
    after = FrontDiagram(_rewrite_reidemeister(d.events, move, column, level, direction))
    points = local_reference_points(d.counts(), column, column + len(src), column + len(tgt))
    return correspond_components(d, d.orient, after, points)


def applicable_reidemeister(d: FrontDiagram) -> List[Tuple[str, int, int, str]]:
    """Every (variant, column, level, direction) that applies to d."""
    counts = d.counts()
    top = max(counts) + 1 if counts else 1
    found = []
    for variant in REIDEMEISTER_VARIANTS:
        for direction in ("forward", "backward"):
            for column in range(len(d.events) + 1):
                for level in range(1, top + 1):
                    try:
                        _rewrite_reidemeister(d.events, variant, column, level, direction)
                    except PatternMismatch:
                        continue
                    found.append((variant, column, level, direction))
    return found


# --- Far commutation ---
def _lies_below(e1: Event, e2: Event) -> bool:
    """True when e2's input block sits wholly below e1's output block."""
    if e2.inputs == 0 and e1.outputs == 0 and e2.level == e1.level:
        return False
    return e2.level + e2.inputs <= e1.level


def _lies_above(e1: Event, e2: Event) -> bool:
    if e2.inputs == 0 and e1.outputs == 0 and e2.level == e1.level:
        return False
    return e2.level >= e1.level + e1.outputs


def commute(e1: Event, e2: Event) -> Optional[Tuple[Event, Event]]:
    """Swap adjacent events with disjoint strand supports; None if they touch."""
    if _lies_below(e1, e2):
        return e2, e1.shifted(e2.outputs - e2.inputs)
    if _lies_above(e1, e2):
        return e2.shifted(e1.inputs - e1.outputs), e1
    return None


def far_normalize_tracked(events: Sequence[Event]) -> Tuple[Tuple[Event, ...], Tuple[int, ...]]:
    """Normal form with lower events first, plus the original column of each event."""
    ev = list(events)
    perm = list(range(len(ev)))
    n = len(ev)
    for _ in range(n * n + 1):
        changed = False
        for c in range(n - 1):
            if _lies_below(ev[c], ev[c + 1]):
                ev[c], ev[c + 1] = commute(ev[c], ev[c + 1])
                perm[c], perm[c + 1] = perm[c + 1], perm[c]
                changed = True
        if not changed:
            break
    else:
        LOG.warning("far normalization did not settle after %d passes", n * n + 1)
    return tuple(ev), tuple(perm)


def far_normalize(events: Sequence[Event]) -> Tuple[Event, ...]:
    return far_normalize_tracked(events)[0]


def normalize_diagram(d: FrontDiagram) -> FrontDiagram:
    new_events, perm = far_normalize_tracked(d.events)
    if d.orient is None:
        return FrontDiagram(new_events, d.name)
    points = []
    for new_col, old_col in enumerate(perm):
        e_old, e_new = d.events[old_col], new_events[new_col]
        if e_old.kind == LEFT_CUSP:
            points.append(((old_col + 1, e_old.level), (new_col + 1, e_new.level)))
    return carry_orientation(d, new_events, points)


def normalize_component_map(d: FrontDiagram) -> Dict[int, Tuple[int, int]]:
    new_events, perm = far_normalize_tracked(d.events)
    points = []
    for new_col, old_col in enumerate(perm):
        e_old, e_new = d.events[old_col], new_events[new_col]
        if e_old.kind == LEFT_CUSP:
            points.append(((old_col + 1, e_old.level), (new_col + 1, e_new.level)))
    return correspond_components(d, d.orient, FrontDiagram(new_events), points)


# --- Derived fronts ---
def sublink(d: FrontDiagram, components: Iterable[int]) -> FrontDiagram:
    """Front of the chosen components; other strands and their crossings are dropped."""
    keep = set(components)
    cmap = trace_components(d)
    kept_events = []
    for col, e in enumerate(d.events):
        lo, hi = cmap.event_arcs[col]
        if cmap.arc_component[lo] not in keep:
            continue
        if e.kind == CROSSING and cmap.arc_component[hi] not in keep:
            continue
        below = sum(1 for a in cmap.slices[col][:e.level - 1] if cmap.arc_component[a] in keep)
        kept_events.append(Event(e.kind, below + 1))
    orient = None
    if d.orient is not None:
        orient = tuple(d.orient[k] for k in sorted(keep))
    return FrontDiagram(tuple(kept_events), d.name, orient)


def pushoff_pair(knot: FrontDiagram) -> FrontDiagram:
    """A one-component front together with its vertical Legendrian push-off."""
    if trace_components(knot).count != 1:
        raise FrontValidationError("push-off pair needs a one-component front")
    doubled: List[Event] = []
    for e in knot.events:
        l2 = 2 * e.level
        if e.kind == LEFT_CUSP:
            doubled += [L(l2 - 1), L(l2 + 1), X(l2)]
        elif e.kind == RIGHT_CUSP:
            doubled += [X(l2), R(l2 - 1), R(l2 - 1)]
        else:
            doubled += [X(l2), X(l2 - 1), X(l2 + 1), X(l2)]
    orient = None if knot.orient is None else (knot.orient[0], knot.orient[0])
    return FrontDiagram(tuple(doubled), knot.name, orient)


def stabilize(d: FrontDiagram, component: int, rot_change: int) -> FrontDiagram:
    """Add one zigzag to a component: tb drops by one and rot moves by rot_change."""
    if rot_change not in (1, -1):
        raise ValueError("rot_change must be +1 or -1")
    cmap = trace_components(d)
    column = cmap.anchors[component]
    lo, hi = cmap.event_arcs[column]
    dirs = arc_directions(cmap, d.orient)
    p = d.events[column].level + 1
    # Up-zigzag on a rightward strand lowers rot by one.
    up = (rot_change == -1) == (dirs[hi] > 0)
    zigzag = (L(p + 1), R(p)) if up else (L(p), R(p + 1))
    events = d.events[:column + 1] + zigzag + d.events[column + 1:]
    return FrontDiagram(events, d.name, d.orient)


def link_invariants(d: FrontDiagram, o: Optional[Sequence[int]] = None):
    """Classical invariants of every component and the full linking matrix in one pass."""
    cmap = trace_components(d)
    dirs = arc_directions(cmap, o if o is not None else d.orient)
    n = cmap.count
    writhe, up, down, right = [0] * n, [0] * n, [0] * n, [0] * n
    crossings = [[0] * n for _ in range(n)]
    for kind, (lo, hi) in zip(cmap.kinds, cmap.event_arcs):
        c = cmap.arc_component[lo]
        if kind == CROSSING:
            c2 = cmap.arc_component[hi]
            sign = crossing_sign(dirs[lo], dirs[hi])
            if c == c2:
                writhe[c] += sign
            else:
                crossings[c][c2] += sign
                crossings[c2][c] += sign
        elif kind == LEFT_CUSP:
            if dirs[lo] < 0:
                up[c] += 1
            else:
                down[c] += 1
        else:
            right[c] += 1
            if dirs[lo] > 0:
                up[c] += 1
            else:
                down[c] += 1
    table = [
        ClassicalInvariants(writhe[c] - right[c], (down[c] - up[c]) // 2, writhe[c], up[c], down[c], right[c])
        for c in range(n)
    ]
    lk = [[crossings[i][j] // 2 if i != j else 0 for j in range(n)] for i in range(n)]
    return table, lk
