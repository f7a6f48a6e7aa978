"""
Surgery Core
Contact (+-1)-surgery diagrams and their linking data (Q, r, n, q)
"""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from kirby import front as fr
from kirby.errors import (
    DimensionMismatch,
    FrontSyntaxError,
    FrontValidationError,
    MissingCoefficient,
    MissingOrientation,
    ParityViolation,
)
from kirby.front import FrontDiagram
from kirby.linalg import determinant


# --- Surgery diagram ---
@dataclass(frozen=True)
class SurgeryDiagram:
    front: FrontDiagram
    coeffs: Tuple[Optional[int], ...]
    unframed: FrozenSet[int] = field(default_factory=frozenset)
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        object.__setattr__(self, "unframed", frozenset(self.unframed))
        count = fr.trace_components(self.front).count
        if len(self.coeffs) != count:
            raise FrontValidationError(f"{len(self.coeffs)} coefficients for {count} components")
        for k, c in enumerate(self.coeffs):
            if c not in (None, 1, -1):
                raise FrontValidationError(f"c{k + 1}: contact surgery coefficient must be +1 or -1, got {c}")
            if k in self.unframed and c is not None:
                raise FrontValidationError(f"c{k + 1} is unframed but carries coefficient {c}")
        if any(not 0 <= k < count for k in self.unframed):
            raise FrontValidationError("unframed index out of range")

    @classmethod
    def empty(cls) -> "SurgeryDiagram":
        return cls(FrontDiagram((), "empty", ()), ())

    @property
    def orient(self) -> Optional[Tuple[int, ...]]:
        return self.front.orient

    @property
    def count(self) -> int:
        return len(self.coeffs)

    def framed_indices(self) -> List[int]:
        return [k for k in range(self.count) if k not in self.unframed]

    def framed_position(self, component: int) -> int:
        """Row of a framed component in Q."""
        framed = self.framed_indices()
        if component not in framed:
            raise IndexError(f"component {component} is not framed")
        return framed.index(component)

    def with_front(self, front: FrontDiagram) -> "SurgeryDiagram":
        return SurgeryDiagram(front, self.coeffs, self.unframed, self.name)


# --- Linking data ---
@dataclass(frozen=True)
class LinkingData:
    Q: Tuple[Tuple[int, ...], ...]
    r: Tuple[int, ...]
    n: int
    q: int

    def __post_init__(self):
        Q = tuple(tuple(int(v) for v in row) for row in self.Q)
        r = tuple(int(v) for v in self.r)
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "r", r)
        if len(Q) != self.n or len(r) != self.n or any(len(row) != self.n for row in Q):
            raise DimensionMismatch(f"Q is {len(Q)}x?, r has {len(r)} entries, n = {self.n}")
        if any(Q[i][j] != Q[j][i] for i in range(self.n) for j in range(i + 1, self.n)):
            raise DimensionMismatch("linking matrix must be symmetric")
        for i in range(self.n):
            if (Q[i][i] - r[i]) % 2:
                raise ParityViolation(f"Q({i},{i}) = {Q[i][i]} and r({i}) = {r[i]} differ mod 2")
        if not 0 <= self.q <= self.n:
            raise DimensionMismatch(f"q = {self.q} outside 0..{self.n}")

    @classmethod
    def empty(cls) -> "LinkingData":
        return cls((), (), 0, 0)

    def as_dict(self) -> Dict:
        return {"Q": [list(row) for row in self.Q], "r": list(self.r), "n": self.n, "q": self.q}


def linking_data(d: SurgeryDiagram) -> LinkingData:
    framed = d.framed_indices()
    missing = [k for k in framed if d.coeffs[k] is None]
    if missing:
        raise MissingCoefficient(f"component c{missing[0] + 1} has no surgery coefficient")
    if not framed:
        return LinkingData.empty()
    if d.orient is None:
        raise MissingOrientation("framed components need an orientation")
    table, lk = fr.link_invariants(d.front, d.orient)
    Q = [[table[i].tb + d.coeffs[i] if i == j else lk[i][j] for j in framed] for i in framed]
    r = [table[i].rot for i in framed]
    q = sum(1 for i in framed if d.coeffs[i] == 1)
    return LinkingData(tuple(map(tuple, Q)), tuple(r), len(framed), q)


def reorient(data: LinkingData, signs: Sequence[int]) -> LinkingData:
    """P^T Q P and P^T r for P = diag(signs)."""
    if len(signs) != data.n:
        raise DimensionMismatch(f"{len(signs)} signs for {data.n} components")
    if any(s not in (1, -1) for s in signs):
        raise DimensionMismatch("reorientation signs must be +1 or -1")
    Q = tuple(tuple(signs[i] * signs[j] * data.Q[i][j] for j in range(data.n)) for i in range(data.n))
    r = tuple(s * v for s, v in zip(signs, data.r))
    return LinkingData(Q, r, data.n, data.q)


def reorient_diagram(d: SurgeryDiagram, signs: Sequence[int]) -> SurgeryDiagram:
    if d.orient is None:
        raise MissingOrientation("cannot reorient an unoriented diagram")
    orient = tuple(s * o for s, o in zip(signs, d.orient))
    return d.with_front(d.front.with_orient(orient))


def permute(data: LinkingData, order: Sequence[int]) -> LinkingData:
    """Reorder rows: new index k holds old index order[k]."""
    Q = tuple(tuple(data.Q[i][j] for j in order) for i in order)
    return LinkingData(Q, tuple(data.r[i] for i in order), data.n, data.q)


def is_integral_homology_sphere(data: LinkingData) -> bool:
    return abs(determinant(data.Q)) == 1


def linking_table(d: SurgeryDiagram) -> List[Dict]:
    """Per-component tb, rot, coefficient and linking with every other component."""
    table, lk = fr.link_invariants(d.front, d.orient)
    rows = []
    for k, inv in enumerate(table):
        if k in d.unframed:
            coeff = "unframed"
        elif d.coeffs[k] is None:
            coeff = "?"
        else:
            coeff = f"{d.coeffs[k]:+d}"
        row = {"component": f"c{k + 1}", "tb": inv.tb, "rot": inv.rot, "coeff": coeff}
        for j in range(len(table)):
            row[f"lk c{j + 1}"] = "" if j == k else lk[k][j]
        rows.append(row)
    return rows


# --- Carrying decorations across rewrites ---
def carry_decorations(d: SurgeryDiagram, after_events, points,
                      internal: Optional[Dict[int, Tuple[Optional[int], bool, int]]] = None) -> SurgeryDiagram:
    """
    Rebuild decorations on a rewritten front. Components reached by the
    reference points keep coefficient, framing status and strand direction;
    `internal` supplies (coefficient, unframed, orientation sign) for the rest.
    """
    after = FrontDiagram(tuple(after_events), d.front.name)
    mapping = fr.correspond_components(d.front, d.orient, after, points)
    count = fr.trace_components(after).count
    coeffs: List[Optional[int]] = [None] * count
    unframed = set()
    orient = [1] * count
    for before_comp, (after_comp, sign) in mapping.items():
        coeffs[after_comp] = d.coeffs[before_comp]
        if before_comp in d.unframed:
            unframed.add(after_comp)
        orient[after_comp] = sign
    for after_comp, (coeff, is_unframed, sign) in (internal or {}).items():
        coeffs[after_comp] = coeff
        if is_unframed:
            unframed.add(after_comp)
        orient[after_comp] = sign
    front = after.with_orient(orient if d.orient is not None else None)
    return SurgeryDiagram(front, tuple(coeffs), frozenset(unframed), d.name)


def surgery_component_map(d: SurgeryDiagram, after_events, points) -> Dict[int, int]:
    after = FrontDiagram(tuple(after_events))
    return {b: a for b, (a, _) in fr.correspond_components(d.front, d.orient, after, points).items()}


def apply_reidemeister(d: SurgeryDiagram, move: str, location: Tuple[int, int],
                       direction: str = "forward") -> SurgeryDiagram:
    column, level = location
    src, tgt = fr.reidemeister_fragments(move, level, direction)
    new_events = fr._rewrite_reidemeister(d.front.events, move, column, level, direction)
    points = list(fr.local_reference_points(d.front.counts(), column, column + len(src), column + len(tgt)))
    return carry_decorations(d, new_events, points)


def normalize(d: SurgeryDiagram) -> SurgeryDiagram:
    new_events, perm = fr.far_normalize_tracked(d.front.events)
    points = []
    for new_col, old_col in enumerate(perm):
        e_old, e_new = d.front.events[old_col], new_events[new_col]
        if e_old.kind == fr.LEFT_CUSP:
            points.append(((old_col + 1, e_old.level), (new_col + 1, e_new.level)))
    return carry_decorations(d, new_events, points)


# --- File format ---
def _coeff_token(token: str, key: str) -> int:
    if token in ("+1", "1"):
        return 1
    if token == "-1":
        return -1
    raise FrontSyntaxError(f"{key}: coefficient must be +1 or -1, got {token!r}")


def parse_surgery(text: str) -> SurgeryDiagram:
    """A .front file plus 'coeffs: c1=-1 ...' and optional 'unframed: c3 ...'."""
    name, events, blocks = fr.read_front_text(text, ("orient", "coeffs", "unframed"))
    front = FrontDiagram(tuple(events), name)
    count = fr.trace_components(front).count
    if "orient" in blocks:
        body, line_no = blocks["orient"]
        front = front.with_orient(fr.parse_orientation_tokens(fr.parse_keyed_block(body, line_no), count))
    unframed = set()
    if "unframed" in blocks:
        body, line_no = blocks["unframed"]
        for token in body.split():
            if not token.startswith("c") or not token[1:].isdigit():
                raise FrontSyntaxError(f"line {line_no}: expected c<k>, got {token!r}")
            unframed.add(int(token[1:]) - 1)
    coeffs: List[Optional[int]] = [None] * count
    if "coeffs" in blocks:
        body, line_no = blocks["coeffs"]
        for k, token in fr.parse_keyed_block(body, line_no).items():
            if k >= count:
                raise FrontValidationError(f"line {line_no}: coefficient for unknown component c{k + 1}")
            coeffs[k] = _coeff_token(token, f"c{k + 1}")
    return SurgeryDiagram(front, tuple(coeffs), frozenset(unframed), name)


def serialize_surgery(d: SurgeryDiagram, name: Optional[str] = None) -> str:
    text = fr.serialize_front(d.front, name if name is not None else (d.name or None))
    framed = [k for k in d.framed_indices() if d.coeffs[k] is not None]
    if framed:
        text += "coeffs: " + " ".join(f"c{k + 1}={d.coeffs[k]:+d}" for k in framed) + "\n"
    if d.unframed:
        text += "unframed: " + " ".join(f"c{k + 1}" for k in sorted(d.unframed)) + "\n"
    return text


def surgery_from_word(word: str, coeffs: Sequence[Optional[int]], orient: Optional[Sequence[int]] = None,
                      unframed: Sequence[int] = (), name: str = "") -> SurgeryDiagram:
    front = FrontDiagram.from_word(word, name)
    if orient is None:
        orient = [1] * fr.trace_components(front).count
    return SurgeryDiagram(front.with_orient(orient), tuple(coeffs), frozenset(unframed), name)
