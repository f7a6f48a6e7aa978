"""
Move Templates
Loader and validator for the .frag assets holding both sides of every
standard move as open event-word fragments.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from kirby import config
from kirby import front as fr
from kirby.descriptors import MoveTag
from kirby.errors import FrontSyntaxError, FrontValidationError, KirbyError
from kirby.front import Event
from kirby.utils import get_logger

LOG = get_logger(__name__)

TEMPLATE_NAMES = ("cancel", "cancel_through", "slide_a", "slide_b", "slide_split", "lantern", "chain")
SLIDE_TEMPLATES = {"a": "slide_a", "b": "slide_b", "split": "slide_split"}

# Roles in the order the matrix level lists the moved components.
SIDE_ROLES = {
    (MoveTag.CANCEL_REMOVE, "left"): ("knot", "pushoff"),
    (MoveTag.CANCEL_REMOVE, "right"): (),
    (MoveTag.HANDLE_SLIDE, "left"): ("rider", "over"),
    (MoveTag.HANDLE_SLIDE, "right"): ("rider", "over"),
    (MoveTag.LANTERN, "left"): ("L1", "L2", "L3"),
    (MoveTag.LANTERN, "right"): ("L1'", "L2'", "L3'", "L4'"),
    (MoveTag.CHAIN, "left"): tuple(f"L{i}" for i in range(1, 13)),
    (MoveTag.CHAIN, "right"): ("L1'", "L2'"),
}


@dataclass(frozen=True)
class TemplateSide:
    events: Tuple[Event, ...]
    passes: Tuple[str, ...] = ()
    coeffs: Tuple[Optional[int], ...] = ()
    orient: Tuple[int, ...] = ()
    roles: Dict[str, int] = field(default_factory=dict)
    slot_map: Dict[str, str] = field(default_factory=dict)

    @property
    def width(self) -> int:
        return len(self.passes)

    @property
    def component_map(self) -> fr.ComponentMap:
        return fr.trace_fragment(self.events, self.width)

    @property
    def count(self) -> int:
        return self.component_map.count

    @property
    def closed_count(self) -> int:
        return len(self.component_map.closed_components())

    @property
    def exits(self) -> Tuple[int, ...]:
        """Right-boundary position of the strand entering at each pass slot."""
        final = self.component_map.slices[-1]
        return tuple(final.index(j) for j in range(self.width))

    def role_components(self, roles) -> List[int]:
        return [self.roles[r] for r in roles]

    def diagram(self) -> fr.FrontDiagram:
        """The side as a closed front; only for sides without pass-through slots."""
        if self.passes:
            raise FrontValidationError("a side with pass-through slots is not a closed front")
        return fr.FrontDiagram(self.events, "", self.orient or None)

    def closure(self) -> fr.FrontDiagram:
        """The side with every pass slot closed off; template component k becomes k + width."""
        return fr.close_fragment(self.events, self.width, self.orient[: self.closed_count])


@dataclass(frozen=True)
class Template:
    name: str
    tag: MoveTag
    sign: Optional[int]
    left: TemplateSide
    right: TemplateSide

    def side(self, which: str) -> TemplateSide:
        return self.left if which == "left" else self.right

    def roles(self, which: str) -> Tuple[str, ...]:
        tag = MoveTag.HANDLE_SLIDE if self.tag == MoveTag.UNFRAMED_SLIDE else self.tag
        return SIDE_ROLES[(tag, which)]


# --- Parsing ---
def _coeff(token: str, line_no: int) -> Optional[int]:
    if token == "*":
        return None
    if token in ("+1", "1"):
        return 1
    if token == "-1":
        return -1
    raise FrontSyntaxError(f"line {line_no}: template coefficient must be +1, -1 or *, got {token!r}")


def _parse_side(lines: List[Tuple[int, str]]) -> TemplateSide:
    passes: List[str] = []
    events: List[Event] = []
    blocks: Dict[str, Tuple[str, int]] = {}
    for line_no, line in lines:
        if line.startswith("pass "):
            if events:
                raise FrontSyntaxError(f"line {line_no}: pass slots must precede the events")
            passes.append(line[5:].strip())
            continue
        head, sep, body = line.partition(":")
        if sep and head.strip() in ("coeffs", "orient", "roles", "map"):
            blocks[head.strip()] = (body.strip(), line_no)
            continue
        try:
            events.extend(fr.parse_events(line))
        except FrontSyntaxError as e:
            raise FrontSyntaxError(f"line {line_no}: {e}")

    counts = fr.strand_counts(events, len(passes))
    if counts[-1] != len(passes):
        raise FrontValidationError(f"fragment ends with {counts[-1]} strands, expected {len(passes)}")
    cmap = fr.trace_fragment(events, len(passes))
    count = cmap.count
    closed = len(cmap.closed_components())

    # Slot components are numbered after the closed ones; they carry no
    # coefficient and always run left to right.
    coeffs: List[Optional[int]] = [None] * count
    if "coeffs" in blocks:
        body, line_no = blocks["coeffs"]
        for k, token in fr.parse_keyed_block(body, line_no).items():
            if k >= closed:
                raise FrontValidationError(f"line {line_no}: coefficient for unknown component c{k + 1}")
            coeffs[k] = _coeff(token, line_no)
    orient: Tuple[int, ...] = ()
    if "orient" in blocks:
        body, line_no = blocks["orient"]
        orient = fr.parse_orientation_tokens(fr.parse_keyed_block(body, line_no), closed)
        orient += (1,) * (count - closed)
    roles: Dict[str, int] = {}
    if "roles" in blocks:
        body, line_no = blocks["roles"]
        for item in body.split():
            role, sep, key = item.partition("=")
            if not sep or not key.startswith("c") or not key[1:].isdigit():
                raise FrontSyntaxError(f"line {line_no}: expected <role>=c<k>, got {item!r}")
            k = int(key[1:]) - 1
            if not 0 <= k < closed:
                raise FrontValidationError(f"line {line_no}: role {role} names unknown component {key}")
            roles[role] = k
    slot_map: Dict[str, str] = {}
    if "map" in blocks:
        body, line_no = blocks["map"]
        for item in body.split():
            a, sep, b = item.partition("=")
            if not sep:
                raise FrontSyntaxError(f"line {line_no}: expected <slot>=<slot>, got {item!r}")
            if a not in passes or b not in passes:
                raise FrontValidationError(f"line {line_no}: map names an unknown pass slot in {item!r}")
            slot_map[a] = b
    return TemplateSide(tuple(events), tuple(passes), tuple(coeffs), orient, roles, slot_map)


def parse_template(text: str) -> Template:
    name, tag, sign = "", None, None
    sides: Dict[str, List[Tuple[int, str]]] = {}
    current: Optional[str] = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        word, _, rest = line.partition(" ")
        if word == "template":
            name = rest.strip()
        elif word == "tag":
            try:
                tag = MoveTag(rest.strip())
            except ValueError:
                raise FrontSyntaxError(f"line {line_no}: unknown move tag {rest.strip()!r}")
        elif word == "sign":
            token = rest.strip()
            if token not in ("+1", "-1", "any"):
                raise FrontSyntaxError(f"line {line_no}: sign must be +1, -1 or any")
            sign = None if token == "any" else int(token)
        elif word == "side":
            current = rest.strip()
            if current not in ("left", "right"):
                raise FrontSyntaxError(f"line {line_no}: side must be left or right")
            sides[current] = []
        elif current is None:
            raise FrontSyntaxError(f"line {line_no}: {line!r} before the first side")
        else:
            sides[current].append((line_no, line))
    if tag is None:
        raise FrontSyntaxError("template has no tag line")
    if set(sides) != {"left", "right"}:
        raise FrontSyntaxError(f"template {name!r} needs both a left and a right side")
    template = Template(name, tag, sign, _parse_side(sides["left"]), _parse_side(sides["right"]))
    _validate(template)
    return template


def _validate_routing(name: str, which: str, side: TemplateSide) -> None:
    """Every slot strand runs straight through and leaves where the map says."""
    final = side.component_map.slices[-1]
    for j, slot in enumerate(side.passes):
        if j not in final:
            raise FrontValidationError(f"{name} {which}: slot {slot} does not run through the fragment")
    mapping = side.slot_map or {s: s for s in side.passes}
    for j, slot in enumerate(side.passes):
        if side.exits[j] != side.passes.index(mapping[slot]):
            raise FrontValidationError(f"{name} {which}: slot {slot} leaves at position {side.exits[j] + 1}, map says {mapping[slot]}")


def _validate(t: Template) -> None:
    for which in ("left", "right"):
        side = t.side(which)
        missing = [r for r in t.roles(which) if r not in side.roles]
        if missing:
            raise FrontValidationError(f"{t.name} {which}: role {missing[0]} is not assigned")
        if side.closed_count and len(side.orient) != side.count:
            raise FrontValidationError(f"{t.name} {which}: every component needs an orientation")
        if set(side.slot_map) != set(side.passes) and side.slot_map:
            raise FrontValidationError(f"{t.name} {which}: map must cover every pass slot")
        _validate_routing(t.name, which, side)
    if t.left.width != t.right.width:
        raise FrontValidationError(f"{t.name}: sides have {t.left.width} and {t.right.width} pass slots")
    if t.left.passes != t.right.passes or t.left.exits != t.right.exits:
        raise FrontValidationError(f"{t.name}: the sides route their pass slots differently")
    if t.tag in (MoveTag.LANTERN, MoveTag.CHAIN):
        for which in ("left", "right"):
            side = t.side(which)
            if any(c != -1 for c in side.coeffs[: side.closed_count]):
                raise FrontValidationError(f"{t.name} {which}: every component must carry -1")
    if t.tag == MoveTag.HANDLE_SLIDE:
        for which in ("left", "right"):
            side = t.side(which)
            if side.coeffs[side.roles["over"]] != -1:
                raise FrontValidationError(f"{t.name} {which}: the over component must carry -1")
    if t.tag == MoveTag.CANCEL_REMOVE:
        side = t.left
        if sorted(side.coeffs[: side.closed_count]) != [-1, 1]:
            raise FrontValidationError(f"{t.name}: a cancelling pair carries +1 and -1")


# --- Loading ---
@lru_cache(maxsize=32)
def _load(path: str) -> Template:
    text = Path(path).read_text()
    template = parse_template(text)
    LOG.debug("loaded template %s from %s", template.name, path)
    return template


def template_path(name: str, directory: Optional[Path] = None) -> Path:
    return Path(directory or config.TEMPLATES_DIR) / f"{name}.frag"


def load_template(name: str, directory: Optional[Path] = None) -> Template:
    path = template_path(name, directory)
    if not path.exists():
        raise FileNotFoundError(f"template asset {path} not found")
    return _load(str(path))


def template_for(tag: MoveTag, variant: str = "a", directory: Optional[Path] = None, passes: int = 0) -> Template:
    if tag in (MoveTag.CANCEL_INSERT, MoveTag.CANCEL_REMOVE):
        return load_template("cancel_through" if passes else "cancel", directory)
    if tag in (MoveTag.HANDLE_SLIDE, MoveTag.UNFRAMED_SLIDE):
        return load_template(SLIDE_TEMPLATES[variant], directory)
    return load_template(tag.value.lower(), directory)


@dataclass(frozen=True)
class TemplateCheck:
    name: str
    ok: bool
    detail: str = ""


def check_templates(directory: Optional[Path] = None) -> List[TemplateCheck]:
    """Re-validate every shipped asset, including the block data each side realizes."""
    from kirby.moves import template_block_failures

    results = []
    for name in TEMPLATE_NAMES:
        try:
            template = load_template(name, directory)
            failures = template_block_failures(template)
        except (KirbyError, OSError) as e:
            results.append(TemplateCheck(name, False, str(e)))
            continue
        results.append(TemplateCheck(name, not failures, "; ".join(failures) or "ok"))
    return results
