"""
Moves
The standard contact Kirby moves at two coupled levels: exact transforms of
linking data built from the published local blocks, and template rewrites of
event words whose recomputed linking data must agree with the matrix level.
"""

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from kirby import blocks, linalg
from kirby import front as fr
from kirby.descriptors import MoveDescriptor, MoveTag, Window
from kirby.errors import (
    BlockMismatch,
    CoefficientMismatch,
    CoherenceError,
    KirbyError,
    MissingOrientation,
    MoveIndexError,
    PatternMismatch,
    SupportViolation,
)
from kirby.front import Event, FrontDiagram
from kirby.invariants import ChangeVector, d3_surg, delta
from kirby.reports import MoveCheck
from kirby.surgery import LinkingData, SurgeryDiagram, carry_decorations, linking_data, permute, reorient
from kirby.templates import Template, TemplateSide, template_for
from kirby.utils import format_rational, get_logger

LOG = get_logger(__name__)

# Change vectors (dn, dsigma, dq, dc2) of the moves on isolated local data.
P_VECTOR = ChangeVector(Fraction(2), Fraction(0), Fraction(1), Fraction(0))
L_VECTOR = ChangeVector(Fraction(1), Fraction(-1), Fraction(0), Fraction(-1))
C_VECTOR = ChangeVector(Fraction(-10), Fraction(6), Fraction(0), Fraction(-2))


@dataclass(frozen=True)
class IndexMap:
    """Surviving components old -> new, plus created (new) and deleted (old) indices."""
    survivors: Dict[int, int] = field(default_factory=dict)
    created: Tuple[int, ...] = ()
    deleted: Tuple[int, ...] = ()

    @classmethod
    def identity(cls, n: int) -> "IndexMap":
        return cls({k: k for k in range(n)})

    @property
    def size_change(self) -> int:
        return len(self.created) - len(self.deleted)

    def as_dict(self) -> Dict:
        return {
            "survivors": {str(k): v for k, v in sorted(self.survivors.items())},
            "created": list(self.created),
            "deleted": list(self.deleted),
        }


# --- Matrix level ---
def _block_indices(data: LinkingData, m: MoveDescriptor, size: int) -> Tuple[int, ...]:
    """Descriptor indices, defaulting to the trailing block."""
    indices = m.indices if m.indices is not None else tuple(range(data.n - size, data.n))
    if len(indices) != size:
        raise MoveIndexError(f"{m.tag.value} needs {size} component indices, got {len(indices)}")
    if len(set(indices)) != size:
        raise MoveIndexError("moved component indices must be distinct")
    if any(not 0 <= i < data.n for i in indices):
        raise MoveIndexError(f"component index out of range 0..{data.n - 1}")
    return tuple(indices)


def _externals(n: int, indices: Iterable[int]) -> List[int]:
    moved = set(indices)
    return [k for k in range(n) if k not in moved]


def _columns(data: LinkingData, indices: Sequence[int], externals: Sequence[int]) -> List[Tuple[int, ...]]:
    return [tuple(data.Q[e][i] for e in externals) for i in indices]


def _check_block(data: LinkingData, indices, A, a, columns, label: str) -> None:
    externals = _externals(data.n, indices)
    found = tuple(tuple(data.Q[i][j] for j in indices) for i in indices)
    if found != tuple(map(tuple, A)):
        raise BlockMismatch(f"{label}: local linking block {found} is not {tuple(map(tuple, A))}")
    rot = tuple(data.r[i] for i in indices)
    if rot != tuple(a):
        raise BlockMismatch(f"{label}: local rotations {rot} are not {tuple(a)}")
    found_cols = _columns(data, indices, externals)
    if [tuple(c) for c in columns] != found_cols:
        raise BlockMismatch(f"{label}: external linking columns {found_cols} do not match the descriptor vectors")


def _replace_block(data: LinkingData, indices: Sequence[int], A_new, a_new, columns_new,
                   dq: int) -> Tuple[LinkingData, IndexMap]:
    """Delete the moved rows, keep the externals in order and append the new block."""
    externals = _externals(data.n, indices)
    m, k = len(externals), len(A_new)
    size = m + k
    Q = [[0] * size for _ in range(size)]
    for x, e in enumerate(externals):
        for y, f in enumerate(externals):
            Q[x][y] = data.Q[e][f]
    for i in range(k):
        for x in range(m):
            Q[x][m + i] = Q[m + i][x] = columns_new[i][x]
        for j in range(k):
            Q[m + i][m + j] = A_new[i][j]
    r = [data.r[e] for e in externals] + list(a_new)
    imap = IndexMap({e: x for x, e in enumerate(externals)}, tuple(range(m, size)), tuple(indices))
    return LinkingData(tuple(map(tuple, Q)), tuple(r), size, data.q + dq), imap


def _vector(value: Optional[Sequence[int]], length: int, name: str) -> Tuple[int, ...]:
    if value is None:
        return (0,) * length
    if len(value) != length:
        raise MoveIndexError(f"{name} has {len(value)} entries for {length} external components")
    return tuple(value)


def _group(m: MoveDescriptor, names: Sequence[str], length: int) -> List[Tuple[int, ...]]:
    values = [getattr(m, name) for name in names]
    if any(v is None for v in values) and not all(v is None for v in values):
        raise MoveIndexError(f"{m.tag.value} needs all of {', '.join(names)} or none")
    return [_vector(v, length, name) for v, name in zip(values, names)]


def _first_coeff(order: str) -> int:
    return 1 if order == "+-" else -1


def _cancel_insert(data: LinkingData, m: MoveDescriptor) -> Tuple[LinkingData, IndexMap]:
    if m.t is None or m.rho is None:
        raise BlockMismatch("inserting a cancelling pair needs t and rho")
    if (m.t + m.rho) % 2 == 0:
        raise BlockMismatch(f"t = {m.t} and rho = {m.rho} must have opposite parity")
    ell = _vector(m.ell, data.n, "ell")
    A = blocks.cancel_block(m.t, _first_coeff(m.order))
    return _replace_block(data, (), A, (m.rho, m.rho), [ell, ell], 1)


def _cancel_remove(data: LinkingData, m: MoveDescriptor) -> Tuple[LinkingData, IndexMap]:
    i, j = _block_indices(data, m, 2)
    t = m.t if m.t is not None else data.Q[i][j]
    A = blocks.cancel_block(t, _first_coeff(m.order))
    rho = m.rho if m.rho is not None else data.r[i]
    externals = _externals(data.n, (i, j))
    ell = m.ell if m.ell is not None else _columns(data, (i,), externals)[0]
    _check_block(data, (i, j), A, (rho, rho), [ell, ell], "CancelRemove")
    if data.q < 1:
        raise BlockMismatch("no +1 component to cancel")
    return _replace_block(data, (i, j), (), (), [], -1)


def _handle_slide(data: LinkingData, m: MoveDescriptor) -> Tuple[LinkingData, IndexMap]:
    if m.rider is None or m.over is None or m.sign is None:
        raise MoveIndexError("HandleSlide needs rider, over and sign")
    i, j = m.rider, m.over
    if i == j or not (0 <= i < data.n and 0 <= j < data.n):
        raise MoveIndexError(f"rider {i} and over {j} must be distinct indices in 0..{data.n - 1}")
    eps = -m.sign if m.backward else m.sign
    P = linalg.identity(data.n)
    P[j][i] = Fraction(eps)
    Q = linalg.congruence(data.Q, P)
    r = linalg.mat_vec(linalg.transpose(P), data.r)
    return LinkingData(tuple(tuple(int(v) for v in row) for row in Q), tuple(int(v) for v in r),
                       data.n, data.q), IndexMap.identity(data.n)


def _lantern(data: LinkingData, m: MoveDescriptor) -> Tuple[LinkingData, IndexMap]:
    size = 4 if m.backward else 3
    indices = _block_indices(data, m, size)
    w = _group(m, ("w2l", "w2r", "w3l", "w3r"), data.n - size)
    old = (blocks.LANTERN_A, blocks.LANTERN_ROT, blocks.lantern_columns(*w))
    new = (blocks.LANTERN_A_PRIME, blocks.LANTERN_ROT_PRIME, blocks.lantern_columns_prime(*w))
    if m.backward:
        old, new = new, old
    _check_block(data, indices, *old, label="Lantern")
    return _replace_block(data, indices, *new, dq=0)


def _chain(data: LinkingData, m: MoveDescriptor) -> Tuple[LinkingData, IndexMap]:
    size = 2 if m.backward else 12
    indices = _block_indices(data, m, size)
    ell = _group(m, ("ell1", "ell2", "ell3"), data.n - size)
    old = (blocks.chain_A(), blocks.CHAIN_ROT, blocks.chain_columns(*ell))
    new = (blocks.CHAIN_A_PRIME, blocks.CHAIN_ROT_PRIME, blocks.chain_columns_prime(*ell))
    if m.backward:
        old, new = new, old
    _check_block(data, indices, *old, label="Chain")
    return _replace_block(data, indices, *new, dq=0)


def _inserts_pair(m: MoveDescriptor) -> bool:
    return (m.tag == MoveTag.CANCEL_INSERT) != m.backward


def matrix_transform(data: LinkingData, m: MoveDescriptor) -> Tuple[LinkingData, IndexMap]:
    """Replace (A, a, B) by (A', a', B'); externals keep their order, new rows are appended."""
    if m.tag in (MoveTag.CANCEL_INSERT, MoveTag.CANCEL_REMOVE):
        result = _cancel_insert(data, m) if _inserts_pair(m) else _cancel_remove(data, m)
    elif m.tag == MoveTag.HANDLE_SLIDE:
        result = _handle_slide(data, m)
    elif m.tag == MoveTag.LANTERN:
        result = _lantern(data, m)
    elif m.tag == MoveTag.CHAIN:
        result = _chain(data, m)
    else:
        # Unframed riders are not rows of Q.
        result = data, IndexMap.identity(data.n)
    LOG.debug("matrix %s: n %d -> %d", m.summary(), data.n, result[0].n)
    return result


def independence_rank(vectors: Iterable[Sequence]) -> int:
    rows = [list(v) for v in vectors]
    return linalg.rank(rows) if rows else 0


# --- Random ambient data ---
def _random_symmetric(rng, n: int) -> List[List[int]]:
    Q = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            Q[i][j] = Q[j][i] = int(rng.integers(-3, 4))
    return Q


def random_ambient(tag: MoveTag, rng, externals: Optional[int] = None) -> Tuple[LinkingData, MoveDescriptor]:
    """
    Random ambient linking data around the tag's local block together with a
    descriptor that applies to it. Externals come first; Q is invertible.
    """
    if externals is None:
        externals = int(rng.integers(0, 4))
    while True:
        C = _random_symmetric(rng, externals)
        b = [C[i][i] % 2 + 2 * int(rng.integers(-1, 2)) for i in range(externals)]
        q = int(rng.integers(0, externals + 1))
        dq = 0
        if tag == MoveTag.CANCEL_INSERT:
            t, rho = blocks.random_cancel_params(rng)
            ell = tuple(int(v) for v in rng.integers(-2, 3, size=externals))
            local = ([], [], [])
            m = MoveDescriptor(tag=tag, t=t, rho=rho, ell=ell, order=str(rng.choice(["+-", "-+"])))
        elif tag == MoveTag.CANCEL_REMOVE:
            t, rho = blocks.random_cancel_params(rng)
            ell = tuple(int(v) for v in rng.integers(-2, 3, size=externals))
            order = str(rng.choice(["+-", "-+"]))
            A = blocks.cancel_block(t, _first_coeff(order))
            local = (A, (rho, rho), [ell, ell])
            dq = 1
            m = MoveDescriptor(tag=tag, indices=(externals, externals + 1), order=order)
        elif tag == MoveTag.LANTERN:
            w = blocks.random_lantern_vectors(rng, externals)
            local = (blocks.LANTERN_A, blocks.LANTERN_ROT, blocks.lantern_columns(*w))
            m = MoveDescriptor(tag=tag, w2l=w[0], w2r=w[1], w3l=w[2], w3r=w[3])
        elif tag == MoveTag.CHAIN:
            ell = [tuple(int(v) for v in rng.integers(-2, 3, size=externals)) for _ in range(3)]
            local = (blocks.chain_A(), blocks.CHAIN_ROT, blocks.chain_columns(*ell))
            m = MoveDescriptor(tag=tag, ell1=ell[0], ell2=ell[1], ell3=ell[2])
        else:
            A, a = blocks.random_slide_block(rng)
            cols = [tuple(int(v) for v in rng.integers(-2, 3, size=externals)) for _ in range(2)]
            local = (A, a, cols)
            m = MoveDescriptor(tag=tag, rider=externals, over=externals + 1, sign=int(rng.choice([-1, 1])))
        ambient = LinkingData(tuple(map(tuple, C)), tuple(b), externals, q)
        if local[0]:
            data, _ = _replace_block(ambient, (), *local, dq=dq)
        else:
            data = ambient
        if linalg.determinant(data.Q) != 0 or data.n == 0:
            return data, m


# --- Diagram level ---
@dataclass(frozen=True)
class Pattern:
    """One side of a move as it is matched or spliced."""
    events: Tuple[Event, ...]
    orient: Tuple[int, ...]
    roles: Dict[str, int]
    coeffs: Tuple[Optional[int], ...]
    passes: int = 0

    @classmethod
    def from_side(cls, side: TemplateSide) -> "Pattern":
        return cls(side.events, side.orient, dict(side.roles), side.coeffs, side.width)

    @property
    def component_map(self) -> fr.ComponentMap:
        return fr.trace_fragment(self.events, self.passes)

    @property
    def closed_count(self) -> int:
        return len(self.component_map.closed_components())

    @property
    def exits(self) -> Tuple[int, ...]:
        final = self.component_map.slices[-1]
        return tuple(final.index(j) for j in range(self.passes))

    def closure(self) -> FrontDiagram:
        return fr.close_fragment(self.events, self.passes, self.orient[: self.closed_count])

    def slot_links(self) -> List[List[int]]:
        """lk of each closed component with each pass slot run left to right."""
        _, lk = fr.link_invariants(self.closure())
        w = self.passes
        return [[lk[w + c][j] for j in range(w)] for c in range(self.closed_count)]


@dataclass(frozen=True)
class MoveResult:
    diagram: SurgeryDiagram
    index_map: IndexMap
    descriptor: MoveDescriptor
    before: LinkingData
    after: LinkingData
    target_columns: Tuple[int, int]


def _sides(m: MoveDescriptor) -> Tuple[str, str]:
    if m.tag == MoveTag.CANCEL_INSERT:
        pair = ("right", "left")
    else:
        pair = ("left", "right")
    return (pair[1], pair[0]) if m.backward else pair


def window_fragment(d: SurgeryDiagram, window: Window) -> Tuple[Event, ...]:
    """Window events relative to the band above `base`; raises when a foreign strand is touched."""
    events = d.front.events
    if window.stop > len(events):
        raise SupportViolation(f"window {window} runs past the last column {len(events)}")
    counts = d.front.counts()
    if counts[window.start] < window.base + window.passes:
        raise SupportViolation(f"window {window} needs {window.base + window.passes} strands at column "
                               f"{window.start}, found {counts[window.start]}")
    width = window.passes
    local = []
    for col in range(window.start, window.stop):
        e = events[col]
        rel = e.level - window.base
        inside = rel >= 1 and (rel <= width + 1 if e.kind == fr.LEFT_CUSP else rel + 1 <= width)
        if not inside:
            raise SupportViolation(f"column {col}: {e} touches a strand outside the window band")
        width += e.outputs - e.inputs
        local.append(Event(e.kind, rel))
    if width != window.passes:
        raise SupportViolation(f"window {window} leaves {width - window.passes} strands of its components open")
    return tuple(local)


def _match(fragment: Tuple[Event, ...], pattern: Pattern, label: str):
    got, got_perm = fr.far_normalize_tracked(fragment)
    want, want_perm = fr.far_normalize_tracked(pattern.events)
    if got != want:
        raise PatternMismatch(f"{label}: window holds [{fr.format_events(got)}], "
                              f"expected [{fr.format_events(want)}] after normalization")
    return got_perm, want_perm


def _source_roles(d: SurgeryDiagram, window: Window, fragment, pattern: Pattern,
                  got_perm, want_perm) -> Tuple[Dict[str, int], Dict[str, int]]:
    """Before-diagram component and relative orientation of every source role."""
    cmap_d = fr.trace_components(d.front)
    dirs_d = fr.arc_directions(cmap_d, d.orient)
    cmap_p = pattern.component_map
    dirs_p = fr.arc_directions(cmap_p, pattern.orient or None)
    components, relative = {}, {}
    for role, c in pattern.roles.items():
        anchor = cmap_p.anchors[c]
        k = want_perm.index(anchor)
        column = window.start + got_perm[k]
        components[role] = cmap_d.event_components(column)[0]
        hi_d = cmap_d.event_arcs[column][1]
        hi_p = cmap_p.event_arcs[anchor][1]
        relative[role] = dirs_d[hi_d] * dirs_p[hi_p]
    return components, relative


def _check_coefficients(d: SurgeryDiagram, m: MoveDescriptor, pattern: Pattern, components: Dict[str, int]) -> None:
    for role, comp in components.items():
        framed = comp not in d.unframed
        if m.tag == MoveTag.UNFRAMED_SLIDE and role == "rider":
            if framed:
                raise CoefficientMismatch(f"c{comp + 1} is framed; unframed-slide needs an unframed rider")
            continue
        if not framed:
            raise CoefficientMismatch(f"c{comp + 1} ({role}) is unframed")
        want = pattern.coeffs[pattern.roles[role]]
        got = d.coeffs[comp]
        if want is not None and got != want:
            raise CoefficientMismatch(f"c{comp + 1} ({role}) carries {got}, the move needs {want:+d}")
    if m.tag in (MoveTag.CANCEL_INSERT, MoveTag.CANCEL_REMOVE) and components:
        a, b = d.coeffs[components["knot"]], d.coeffs[components["pushoff"]]
        if a is None or b is None or a != -b:
            raise CoefficientMismatch(f"a cancelling pair needs opposite coefficients, found {a} and {b}")


def _check_named(m: MoveDescriptor, components: Dict[str, int], roles: Sequence[str]) -> None:
    """Indices a descriptor names at the diagram level must be the matched components."""
    named = []
    if m.rider is not None:
        named.append(("rider", m.rider))
    if m.over is not None:
        named.append(("over", m.over))
    if m.indices is not None:
        if len(m.indices) != len(roles):
            raise PatternMismatch(f"descriptor names {len(m.indices)} components, the window moves {len(roles)}")
        named.extend(zip(roles, m.indices))
    for role, index in named:
        if components.get(role) != index:
            raise PatternMismatch(f"descriptor names c{index + 1} as {role}, the window matched "
                                  f"c{components.get(role, -1) + 1}")


def _cancel_patterns(m: MoveDescriptor, template: Template, fragment) -> Tuple[Pattern, Pattern]:
    """Source and target patterns of a cancelling-pair move."""
    empty = Pattern.from_side(template.right)
    if _inserts_pair(m):
        if m.knot is None:
            pair = Pattern.from_side(template.left)
        elif template.left.width:
            raise PatternMismatch("a pair built on a given knot cannot thread pass-through strands")
        else:
            knot = FrontDiagram.from_word(m.knot)
            doubled = fr.pushoff_pair(knot.with_orient((1,)))
            pair = Pattern(doubled.events, (1, 1), {"knot": 0, "pushoff": 1},
                           (_first_coeff(m.order), -_first_coeff(m.order)))
        return empty, pair
    if template.left.width:
        side = template.left
        return Pattern(side.events, side.orient, dict(side.roles), (None,) * side.count, side.width), empty
    cmap = fr.trace_fragment(fragment, 0)
    if cmap.count != 2 or None in cmap.anchors:
        raise PatternMismatch(f"a cancelling pair has two closed components, the window holds {cmap.count}")
    knot = fr.sublink(FrontDiagram(fragment), [0]).with_orient((1,))
    doubled = fr.pushoff_pair(knot)
    return Pattern(doubled.events, (1, 1), {"knot": 0, "pushoff": 1}, (None, None)), empty


def _knot_of(pattern: Pattern) -> FrontDiagram:
    return fr.sublink(pattern.closure(), [pattern.passes + pattern.roles["knot"]])


def _bind_slots(d: SurgeryDiagram, window: Window, exits: Sequence[int]) -> List[Tuple[int, int]]:
    """Component and direction of the diagram strand bound to each pass slot."""
    cmap = fr.trace_components(d.front)
    dirs = fr.arc_directions(cmap, d.orient)
    bound = []
    for j, exit_pos in enumerate(exits):
        arc_in = cmap.slices[window.start][window.base + j]
        arc_out = cmap.slices[window.stop][window.base + exit_pos]
        if arc_in != arc_out:
            raise PatternMismatch(f"the strand in slot {j + 1} of {window} does not leave at position {exit_pos + 1}")
        bound.append((cmap.arc_component[arc_in], dirs[arc_in]))
    return bound


def _bound_column(pattern: Pattern, role: str, bound: Sequence[Tuple[int, int]],
                  framed: Sequence[int]) -> Tuple[int, ...]:
    """Linking of a pattern component with the framed components threading its slots."""
    links = pattern.slot_links()[pattern.roles[role]]
    totals: Dict[int, int] = {}
    for lk, (comp, direction) in zip(links, bound):
        totals[comp] = totals.get(comp, 0) + lk * direction
    return tuple(totals.get(c, 0) for c in framed)


def _external_vectors(m: MoveDescriptor, data: LinkingData, moved: Sequence[int]) -> Dict[str, Tuple[int, ...]]:
    """Lantern w-vectors or chain ell-vectors: from the descriptor, else read off the moved columns."""
    externals = _externals(data.n, moved)
    columns = _columns(data, moved, externals)
    if m.tag == MoveTag.LANTERN:
        names, derived = ("w2l", "w2r", "w3l", "w3r"), None
    else:
        names = ("ell1", "ell2", "ell3")
        derived = None if m.backward else columns[:3]
    given = [getattr(m, name) for name in names]
    if all(v is not None for v in given):
        return dict(zip(names, (tuple(v) for v in given)))
    if derived is None:
        if any(any(col) for col in columns):
            raise PatternMismatch(f"{m.tag.value}: the moved components link the rest of the diagram; "
                                  f"give {', '.join(names)}")
        derived = [(0,) * len(externals)] * len(names)
    return dict(zip(names, derived))


def _slide_sign(m: MoveDescriptor, template: Template, before: LinkingData, d: SurgeryDiagram,
                components, relative) -> int:
    """Forward band sign in the user's orientation."""
    rider, over = components["rider"], components["over"]
    if template.sign is not None:
        eps = template.sign * relative["rider"] * relative["over"]
    elif m.backward:
        # The clasp already records the band: lk(rider, over) = eps * Q(over, over).
        o = d.framed_position(over)
        if rider in d.unframed:
            _, lk = fr.link_invariants(d.front, d.orient)
            link = lk[rider][over]
        else:
            link = before.Q[d.framed_position(rider)][o]
        diag = before.Q[o][o]
        if diag == 0 or link not in (diag, -diag):
            raise PatternMismatch(f"the clasp links rider and over {link} times, not +-Q(over, over) = +-{diag}")
        eps = link // diag
    elif m.sign is None:
        raise PatternMismatch(f"{template.name} needs a band sign")
    else:
        eps = m.sign
    if m.sign is not None and m.sign != eps:
        raise PatternMismatch(f"the window realizes band sign {eps:+d}, descriptor says {m.sign:+d}")
    return eps


def _solve_signs(actual: LinkingData, expected: LinkingData, free: Set[int]) -> List[int]:
    """Orientation signs for the free rows so that actual matches expected, by propagation."""
    signs = [1] * actual.n
    known = set(range(actual.n)) - free
    queue = deque(sorted(known))
    for k in sorted(free):
        if actual.r[k] != 0:
            signs[k] = 1 if actual.r[k] == expected.r[k] else -1
            known.add(k)
            queue.append(k)
    while queue:
        k = queue.popleft()
        for j in sorted(free - known):
            if actual.Q[k][j] != 0:
                signs[j] = signs[k] * (1 if actual.Q[k][j] == expected.Q[k][j] else -1)
                known.add(j)
                queue.append(j)
    return signs


def _flip(d: SurgeryDiagram, components: Iterable[int]) -> SurgeryDiagram:
    orient = list(d.orient)
    for c in components:
        orient[c] = -orient[c]
    return d.with_front(d.front.with_orient(orient))


def _describe_difference(expected: LinkingData, actual: LinkingData) -> str:
    if expected.n != actual.n:
        return f"n = {actual.n}, expected {expected.n}"
    if expected.r != actual.r:
        return f"r = {actual.r}, expected {expected.r}"
    if expected.q != actual.q:
        return f"q = {actual.q}, expected {expected.q}"
    return f"Q = {actual.Q}, expected {expected.Q}"


def apply_template_move_detailed(d: SurgeryDiagram, m: MoveDescriptor, window: Window,
                                 templates_dir=None) -> MoveResult:
    if d.orient is None:
        if d.count:
            raise MissingOrientation("template moves need an oriented diagram")
        d = d.with_front(d.front.with_orient(()))
    template = template_for(m.tag, m.variant, templates_dir, window.passes)
    source_side, target_side = _sides(m)
    fragment = window_fragment(d, window)
    cancel = m.tag in (MoveTag.CANCEL_INSERT, MoveTag.CANCEL_REMOVE)
    if window.passes != template.side(source_side).width:
        raise PatternMismatch(f"window has {window.passes} pass-through strands, "
                              f"{template.name} {source_side} has {template.side(source_side).width}")

    if cancel:
        source, target = _cancel_patterns(m, template, fragment)
        if fragment != () and not source.events:
            raise PatternMismatch(f"a cancelling pair is inserted into an empty window, {window} holds "
                                  f"{len(fragment)} events")
    else:
        source = Pattern.from_side(template.side(source_side))
        target = Pattern.from_side(template.side(target_side))

    got_perm, want_perm = _match(fragment, source, f"{template.name} {source_side}")
    components, relative = _source_roles(d, window, fragment, source, got_perm, want_perm)
    bound = _bind_slots(d, window, source.exits)
    source_roles = tuple(source.roles)
    _check_coefficients(d, m, source, components)
    if cancel and not _inserts_pair(m):
        _check_named(m, components, ("knot", "pushoff"))
    elif not cancel:
        _check_named(m, components, template.roles(source_side))

    # Matrix-level counterpart in the user's orientation.
    before = linking_data(d)
    framed = d.framed_indices()
    signs = [1] * before.n
    preserved = [r for r in source.roles if r in target.roles]
    for role in source_roles:
        if role not in preserved and components[role] not in d.unframed:
            signs[d.framed_position(components[role])] = relative[role]
    matrix_before = reorient(before, signs)
    if m.tag in (MoveTag.HANDLE_SLIDE, MoveTag.UNFRAMED_SLIDE):
        eps = _slide_sign(m, template, before, d, components, relative)
        rider = components["rider"]
        mdesc = MoveDescriptor(
            tag=m.tag, direction=m.direction, sign=eps, variant=m.variant,
            rider=None if rider in d.unframed else d.framed_position(rider),
            over=d.framed_position(components["over"]),
        )
    elif cancel and _inserts_pair(m):
        knot = _knot_of(target)
        inv = fr.classical_invariants(knot, 0, (1,))
        t, rho, flip = inv.tb, inv.rot, 1
        if m.rho is not None and rho != 0 and m.rho == -rho:
            rho, flip = -rho, -1
        if m.t is not None and m.t != t:
            raise PatternMismatch(f"the inserted knot has tb {t}, descriptor says {m.t}")
        if m.rho is not None and m.rho != rho:
            raise PatternMismatch(f"the inserted knot has rot +-{abs(rho)}, descriptor says {m.rho}")
        target = Pattern(target.events, tuple(flip * s for s in target.orient), target.roles,
                         (_first_coeff(m.order), -_first_coeff(m.order)), target.passes)
        ell = _bound_column(target, "knot", bound, framed)
        if _bound_column(target, "pushoff", bound, framed) != ell:
            raise PatternMismatch("the pass-through strands link the knot and its push-off differently")
        if m.ell is not None and tuple(m.ell) != ell:
            raise PatternMismatch(f"the threading strands give ell = {ell}, descriptor says {tuple(m.ell)}")
        mdesc = MoveDescriptor(tag=MoveTag.CANCEL_INSERT, t=t, rho=rho, ell=ell, order=m.order)
    elif cancel:
        knot_coeff = d.coeffs[components["knot"]]
        t = fr.classical_invariants(_knot_of(source), 0, (1,)).tb
        if m.t is not None and m.t != t:
            raise PatternMismatch(f"the pair is built on a knot with tb {t}, descriptor says {m.t}")
        mdesc = MoveDescriptor(
            tag=MoveTag.CANCEL_REMOVE, t=t, order="+-" if knot_coeff == 1 else "-+",
            indices=(d.framed_position(components["knot"]), d.framed_position(components["pushoff"])),
        )
    else:
        moved = tuple(d.framed_position(components[r]) for r in template.roles(source_side))
        mdesc = MoveDescriptor(tag=m.tag, direction=m.direction, indices=moved,
                               **_external_vectors(m, matrix_before, moved))
    expected, mimap = matrix_transform(matrix_before, mdesc)

    # Splice the target and carry decorations.
    shifted = tuple(e.shifted(window.base) for e in target.events)
    events = d.front.events
    new_events = events[:window.start] + shifted + events[window.stop:]
    points = list(fr.local_reference_points(d.front.counts(), window.start, window.stop,
                                            window.start + len(shifted)))
    after_front = FrontDiagram(new_events)
    cmap_a = fr.trace_components(after_front)
    cmap_t = target.component_map
    target_comp: Dict[str, int] = {}
    for role, c in target.roles.items():
        target_comp[role] = cmap_a.event_components(window.start + cmap_t.anchors[c])[0]
    internal = {}
    for role, c in target.roles.items():
        sign = target.orient[c] if target.orient else 1
        if role in preserved:
            b = components[role]
            internal[target_comp[role]] = (d.coeffs[b], b in d.unframed, sign * relative[role])
        else:
            internal[target_comp[role]] = (target.coeffs[c], False, sign)
    after = carry_decorations(d, new_events, points, internal)

    # Diagram-level index map.
    carried = fr.correspond_components(d.front, d.orient, after_front, points)
    survivors = {b: a for b, (a, _) in carried.items()}
    for role in preserved:
        survivors[components[role]] = target_comp[role]
    created_roles = [r for r in _target_role_order(m, template, target_side, target) if r not in preserved]
    deleted_roles = [r for r in _target_role_order(m, template, source_side, source) if r not in preserved]
    index_map = IndexMap(survivors, tuple(target_comp[r] for r in created_roles),
                         tuple(components[r] for r in deleted_roles))

    # Align the matrix-level rows with the new diagram's framed components.
    order = [0] * expected.n
    for fb, ka in mimap.survivors.items():
        order[ka] = after.framed_position(survivors[framed[fb]])
    for role, ka in zip(created_roles, mimap.created):
        order[ka] = after.framed_position(target_comp[role])
    free = {mimap.created[k] for k in range(len(mimap.created))}
    if template.sign is None and not m.backward and "rider" in preserved and components["rider"] not in d.unframed:
        free.add(mimap.survivors[d.framed_position(components["rider"])])
    actual = permute(linking_data(after), order)
    flips = _solve_signs(actual, expected, free)
    after = _flip(after, [after.framed_indices()[order[k]] for k in range(expected.n) if flips[k] < 0])
    actual = permute(linking_data(after), order)
    if m.tag == MoveTag.UNFRAMED_SLIDE:
        after = _check_unframed_rider(d, after, components, target_comp, survivors, mdesc, template, before)
    if actual != expected:
        raise CoherenceError(f"{m.tag.value}: diagram and matrix levels disagree: "
                             f"{_describe_difference(expected, actual)}")
    LOG.debug("applied %s at %s: %d -> %d events", m.summary(), window, len(events), len(new_events))
    return MoveResult(after, index_map, mdesc, before, linking_data(after),
                      (window.start, window.start + len(shifted)))


def _target_role_order(m: MoveDescriptor, template: Template, side: str, pattern: Pattern) -> Tuple[str, ...]:
    if m.tag in (MoveTag.CANCEL_INSERT, MoveTag.CANCEL_REMOVE):
        return tuple(r for r in ("knot", "pushoff") if r in pattern.roles)
    return template.roles(side)


def _check_unframed_rider(d: SurgeryDiagram, after: SurgeryDiagram, components, target_comp, survivors,
                          mdesc: MoveDescriptor, template: Template, before: LinkingData) -> SurgeryDiagram:
    """The rider's linking with each framed component moves by eps times the over column."""
    rider_b, rider_a = components["rider"], target_comp["rider"]
    over = mdesc.over
    eps = -mdesc.sign if mdesc.backward else mdesc.sign
    _, lk_b = fr.link_invariants(d.front, d.orient)
    framed_b = d.framed_indices()
    expected = [lk_b[rider_b][c] + eps * before.Q[over][k] for k, c in enumerate(framed_b)]

    def actual_links(diagram):
        _, lk_a = fr.link_invariants(diagram.front, diagram.orient)
        return [lk_a[rider_a][survivors[c]] for c in framed_b]

    got = actual_links(after)
    if template.sign is None and not mdesc.backward and got[over] == -expected[over] != 0:
        after = _flip(after, [rider_a])
        got = actual_links(after)
    if got != expected:
        raise CoherenceError(f"unframed rider links {got}, expected {expected}")
    return after


def apply_template_move(d: SurgeryDiagram, m: MoveDescriptor, window: Window, templates_dir=None) -> SurgeryDiagram:
    return apply_template_move_detailed(d, m, window, templates_dir).diagram


def slide_unframed(d: SurgeryDiagram, rider: int, over: int, window: Window, sign: Optional[int] = None,
                   variant: str = "a", direction: str = "forward", templates_dir=None) -> SurgeryDiagram:
    """Band an unframed component over a framed (-1) component; framed linking data is unchanged."""
    m = MoveDescriptor(tag=MoveTag.UNFRAMED_SLIDE, rider=rider, over=over, sign=sign, variant=variant,
                       direction=direction)
    return apply_template_move(d, m, window, templates_dir)


# --- Verification ---
def _invariant_pair(data: LinkingData) -> Tuple[str, str]:
    return format_rational(d3_surg(data)), format_rational(delta(data))


def _internal_alignment(result: MoveResult, after: SurgeryDiagram, window: Window,
                        stop_after: int) -> Dict[int, Tuple[int, int]]:
    """Match result components with the given after-diagram's, with relative orientation."""
    mine, theirs = result.diagram.front, after.front
    lo, hi = result.target_columns
    points = list(fr.local_reference_points(mine.counts(), lo, hi, stop_after))
    match = fr.correspond_components(mine, mine.orient, theirs.with_orient(None), points)
    a_perm = fr.far_normalize_tracked(tuple(mine.events[lo:hi]))[1]
    b_perm = fr.far_normalize_tracked(tuple(theirs.events[lo:stop_after]))[1]
    cmap_m, cmap_t = fr.trace_components(mine), fr.trace_components(theirs)
    dirs_m = fr.arc_directions(cmap_m, mine.orient)
    dirs_t = fr.arc_directions(cmap_t, None)
    for k, col in enumerate(a_perm):
        column_m = lo + col
        if cmap_m.kinds[column_m] != fr.LEFT_CUSP:
            continue
        comp = cmap_m.event_components(column_m)[0]
        if comp in match:
            continue
        column_t = lo + b_perm[k]
        sign = dirs_m[cmap_m.event_arcs[column_m][1]] * dirs_t[cmap_t.event_arcs[column_t][1]]
        match[comp] = (cmap_t.event_components(column_t)[0], sign)
    return match


def assert_diagram_move(before: SurgeryDiagram, after: SurgeryDiagram, m: Optional[MoveDescriptor],
                        window: Window, templates_dir=None) -> MoveCheck:
    """Check that `after` is `before` with the move applied at `window`; failures are reported, not raised."""
    if m is None:
        return MoveCheck(ok=False, failures=["no move tag given"])
    failures: List[str] = []
    try:
        result = apply_template_move_detailed(before, m, window, templates_dir)
    except KirbyError as e:
        return MoveCheck(ok=False, failures=[f"{type(e).__name__}: {e}"])

    old, new = before.front.events, after.front.events
    stop_after = len(new) - (len(old) - window.stop)
    if stop_after < window.start or new[:window.start] != old[:window.start] or new[stop_after:] != old[window.stop:]:
        failures.append("events outside the window differ")
    else:
        try:
            want = fr.far_normalize(result.diagram.front.events[slice(*result.target_columns)])
            got = fr.far_normalize(window_fragment(after, Window(window.start, stop_after, window.base,
                                                                 window.passes)))
            if tuple(e.shifted(-window.base) for e in want) != got:
                failures.append("window contents do not match the target side of the move")
        except KirbyError as e:
            failures.append(f"window contents: {e}")

    d3_before = d3_after = delta_before = delta_after = None
    if not failures:
        try:
            match = _internal_alignment(result, after, window, stop_after)
            mine = result.diagram
            created = set(result.index_map.created)
            after_orient = after.orient or (1,) * after.count
            signs = [1] * after.count
            if len(match) != mine.count or mine.count != after.count:
                failures.append(f"components do not correspond: {after.count} given, {mine.count} expected")
            for comp, (theirs, sign) in match.items():
                if mine.coeffs[comp] != after.coeffs[theirs] or (comp in mine.unframed) != (theirs in after.unframed):
                    failures.append(f"c{theirs + 1} carries the wrong coefficient")
                # Only components the move creates may come back reoriented.
                signs[theirs] = sign * after_orient[theirs]
                if signs[theirs] < 0 and comp not in created:
                    failures.append(f"c{theirs + 1} changed orientation")
            if not failures:
                data = linking_data(after)
                framed_after = after.framed_indices()
                order = [after.framed_position(match[c][0]) for c in mine.framed_indices()]
                aligned = permute(reorient(data, [signs[c] for c in framed_after]), order)
                if aligned != result.after:
                    failures.append("linking data does not transform as the move requires: "
                                    + _describe_difference(result.after, aligned))
                d3_before, delta_before = _invariant_pair(result.before)
                d3_after, delta_after = _invariant_pair(data)
                if (d3_before, delta_before) != (d3_after, delta_after):
                    failures.append(f"d3/delta changed: {d3_before}/{delta_before} -> {d3_after}/{delta_after}")
        except KirbyError as e:
            failures.append(f"{type(e).__name__}: {e}")
    if failures:
        LOG.warning("move %s rejected: %s", m.summary(), "; ".join(failures))
    return MoveCheck(ok=not failures, failures=failures, d3_before=d3_before, d3_after=d3_after,
                     delta_before=delta_before, delta_after=delta_after)


# --- Template self-checks ---
def side_data(side: TemplateSide, roles: Sequence[str]) -> LinkingData:
    """Linking data of a template side in role order, pass slots closed off and unframed; '*' reads as -1."""
    w = side.width
    coeffs = (None,) * w + tuple(-1 if c is None else c for c in side.coeffs[: side.closed_count])
    data = linking_data(SurgeryDiagram(side.closure(), coeffs, frozenset(range(w))))
    return permute(data, side.role_components(roles))


def side_slot_columns(side: TemplateSide, roles: Sequence[str]) -> List[Tuple[int, ...]]:
    """Linking of each role component with the closed-off pass slots."""
    pattern = Pattern(side.events, side.orient, dict(side.roles), side.coeffs, side.width)
    links = pattern.slot_links()
    return [tuple(links[side.roles[r]]) for r in roles]


def template_block_failures(t: Template) -> List[str]:
    """Compare the linking data each side realizes with the published local blocks."""
    failures = []
    left = side_data(t.left, t.roles("left"))
    right = side_data(t.right, t.roles("right"))
    if t.tag == MoveTag.CANCEL_REMOVE:
        lk = left.Q[0][1]
        coeff = t.left.coeffs[t.left.roles["knot"]]
        if left.Q != blocks.cancel_block(lk, coeff) or left.r[0] != left.r[1]:
            failures.append(f"left side is not a push-off pair: Q = {left.Q}, r = {left.r}")
        if right.n:
            failures.append("right side must be empty")
        knot_col, pushoff_col = side_slot_columns(t.left, ("knot", "pushoff"))
        if knot_col != pushoff_col:
            failures.append(f"pass slots link the knot {knot_col} and the push-off {pushoff_col} differently")
    elif t.tag == MoveTag.HANDLE_SLIDE:
        eps = t.sign
        if eps is None:
            diag = left.Q[1][1]
            eps = (right.Q[0][1] - left.Q[0][1]) // diag if diag else 0
        P = [[1, 0], [eps, 1]]
        want_Q = tuple(tuple(int(v) for v in row) for row in linalg.congruence(left.Q, P))
        want_r = tuple(int(v) for v in linalg.mat_vec(linalg.transpose(P), left.r))
        if eps not in (1, -1) or right.Q != want_Q or right.r != want_r:
            failures.append(f"sides are not related by a band of sign {eps}: {right.Q} vs {want_Q}")
    else:
        if t.tag == MoveTag.LANTERN:
            published = ((blocks.LANTERN_A, blocks.LANTERN_ROT), (blocks.LANTERN_A_PRIME, blocks.LANTERN_ROT_PRIME))
        else:
            published = ((blocks.chain_A(), blocks.CHAIN_ROT), (blocks.CHAIN_A_PRIME, blocks.CHAIN_ROT_PRIME))
        for which, data, (A, a) in (("left", left, published[0]), ("right", right, published[1])):
            if data.Q != tuple(map(tuple, A)) or data.r != tuple(a):
                failures.append(f"{which} side realizes Q = {data.Q}, r = {data.r}")
    return failures
