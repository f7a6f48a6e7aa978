"""
Move Descriptors
Tagged descriptions of one standard contact Kirby move and the
descriptor-string / window-string syntax shared by scripts, CLI and API.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Tuple

from pydantic import BaseModel, ConfigDict, field_validator

from kirby.errors import ScriptError


class MoveTag(str, Enum):
    CANCEL_INSERT = "CancelInsert"
    CANCEL_REMOVE = "CancelRemove"
    HANDLE_SLIDE = "HandleSlide"
    LANTERN = "Lantern"
    CHAIN = "Chain"
    UNFRAMED_SLIDE = "UnframedSlide"


TAG_ALIASES = {
    "cancel-insert": MoveTag.CANCEL_INSERT,
    "cancel-remove": MoveTag.CANCEL_REMOVE,
    "cancel": MoveTag.CANCEL_INSERT,
    "slide": MoveTag.HANDLE_SLIDE,
    "handle-slide": MoveTag.HANDLE_SLIDE,
    "handleslide": MoveTag.HANDLE_SLIDE,
    "lantern": MoveTag.LANTERN,
    "chain": MoveTag.CHAIN,
    "unframed-slide": MoveTag.UNFRAMED_SLIDE,
}
for _tag in MoveTag:
    TAG_ALIASES[_tag.value.lower()] = _tag

VECTOR_FIELDS = ("ell", "indices", "w2l", "w2r", "w3l", "w3r", "ell1", "ell2", "ell3")
INT_FIELDS = ("t", "rho", "rider", "over", "sign")


# --- Descriptor ---
class MoveDescriptor(BaseModel):
    model_config = ConfigDict(frozen=True)

    tag: MoveTag
    direction: str = "forward"
    # CancelInsert / CancelRemove
    t: Optional[int] = None
    rho: Optional[int] = None
    ell: Optional[Tuple[int, ...]] = None
    order: str = "+-"
    knot: Optional[str] = None
    # CancelRemove pair, Lantern L1..L3 (or L1'..L4'), Chain L1..L12 (or L1', L2')
    indices: Optional[Tuple[int, ...]] = None
    # HandleSlide / UnframedSlide
    rider: Optional[int] = None
    over: Optional[int] = None
    sign: Optional[int] = None
    variant: str = "a"
    # Lantern
    w2l: Optional[Tuple[int, ...]] = None
    w2r: Optional[Tuple[int, ...]] = None
    w3l: Optional[Tuple[int, ...]] = None
    w3r: Optional[Tuple[int, ...]] = None
    # Chain
    ell1: Optional[Tuple[int, ...]] = None
    ell2: Optional[Tuple[int, ...]] = None
    ell3: Optional[Tuple[int, ...]] = None

    @field_validator("direction")
    @classmethod
    def _check_direction(cls, v: str) -> str:
        if v not in ("forward", "backward"):
            raise ValueError("direction must be forward or backward")
        return v

    @field_validator("order")
    @classmethod
    def _check_order(cls, v: str) -> str:
        if v not in ("+-", "-+"):
            raise ValueError("order must be +- or -+")
        return v

    @field_validator("sign")
    @classmethod
    def _check_sign(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and v not in (1, -1):
            raise ValueError("band sign must be +1 or -1")
        return v

    @field_validator("variant")
    @classmethod
    def _check_variant(cls, v: str) -> str:
        if v not in ("a", "b", "split"):
            raise ValueError("slide variant must be a, b or split")
        return v

    @property
    def backward(self) -> bool:
        return self.direction == "backward"

    def with_updates(self, **changes) -> "MoveDescriptor":
        return self.model_copy(update=changes)

    def summary(self) -> str:
        parts = [self.tag.value] + (["backward"] if self.backward else [])
        for name, value in self.model_dump(exclude={"tag", "direction", "order", "variant"}, exclude_none=True).items():
            parts.append(f"{name}={_render(value)}")
        return " ".join(parts)


def _render(value) -> str:
    if isinstance(value, (tuple, list)):
        return ",".join(str(v) for v in value)
    return str(value)


def _int_vector(text: str) -> Tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    return tuple(int(part) for part in text.split(","))


def parse_descriptor(text: str) -> MoveDescriptor:
    """'<tag> [forward|backward] key=value ...', e.g. 'lantern w2l=1,0 w2r=1,2 w3l=0,0 w3r=0,2'."""
    tokens = text.split()
    if not tokens:
        raise ScriptError("empty move descriptor")
    tag = TAG_ALIASES.get(tokens[0].lower())
    if tag is None:
        raise ScriptError(f"unknown move tag {tokens[0]!r}")
    fields: Dict[str, object] = {"tag": tag}
    for token in tokens[1:]:
        if token in ("forward", "backward"):
            fields["direction"] = token
            continue
        key, sep, value = token.partition("=")
        if not sep:
            raise ScriptError(f"expected key=value in descriptor, got {token!r}")
        try:
            if key in VECTOR_FIELDS:
                fields[key] = _int_vector(value)
            elif key in INT_FIELDS:
                fields[key] = int(value)
            elif key in ("order", "knot", "variant"):
                fields[key] = value
            else:
                raise ScriptError(f"unknown descriptor key {key!r}")
        except ValueError as e:
            raise ScriptError(f"bad value for {key}: {value!r}") from e
    try:
        return MoveDescriptor(**fields)
    except ValueError as e:
        raise ScriptError(f"invalid descriptor {text!r}: {e}") from e


# --- Windows ---
@dataclass(frozen=True)
class Window:
    """Columns [start, stop) over strands base+1 .. base+width; `passes` strands cross the boundary."""
    start: int
    stop: int
    base: int = 0
    passes: int = 0

    def __post_init__(self):
        if not 0 <= self.start <= self.stop:
            raise ScriptError(f"window columns {self.start}:{self.stop} are not increasing")
        if self.base < 0 or self.passes < 0:
            raise ScriptError("window base and pass count must be nonnegative")

    def __str__(self) -> str:
        text = f"{self.start}:{self.stop}@{self.base}"
        return text + (f"+{self.passes}" if self.passes else "")


def parse_window(text: str) -> Window:
    """'<start>:<stop>[@<base>][+<passes>]'."""
    text = text.strip()
    try:
        passes = 0
        if "+" in text:
            text, _, tail = text.partition("+")
            passes = int(tail)
        base = 0
        if "@" in text:
            text, _, tail = text.partition("@")
            base = int(tail)
        start, _, stop = text.partition(":")
        return Window(int(start), int(stop), base, passes)
    except ValueError as e:
        raise ScriptError(f"malformed window {text!r}; expected start:stop@base") from e
