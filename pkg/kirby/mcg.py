"""
Twist Words
Words in Dehn twists over a declared curve system, the relations of the
mapping class group presentation as rewrite rules, and replayable
certificates for the derived handle slides and the lantern destabilization.
"""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

from kirby.errors import RuleMismatch, ScriptError, UndeclaredFact
from kirby.surgery import SurgeryDiagram
from kirby.utils import get_logger

LOG = get_logger(__name__)

RULES = ("cancel", "commute", "braid", "lantern", "chain")


# --- Letters and words ---
@dataclass(frozen=True)
class Letter:
    curve: str
    sign: int

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError(f"twist exponent must be +1 or -1, got {self.sign}")

    def inverse(self) -> "Letter":
        return Letter(self.curve, -self.sign)

    def __str__(self) -> str:
        return f"{self.curve}{'+' if self.sign > 0 else '-'}"


def parse_letter(token: str) -> Letter:
    token = token.strip()
    if len(token) < 2 or token[-1] not in "+-":
        raise ScriptError(f"a twist letter is <curve>+ or <curve>-, got {token!r}")
    return Letter(token[:-1], 1 if token[-1] == "+" else -1)


@dataclass(frozen=True)
class TwistWord:
    letters: Tuple[Letter, ...] = ()

    @classmethod
    def parse(cls, text: str) -> "TwistWord":
        tokens = text.split()
        if tokens == ["1"]:
            return cls()
        return cls(tuple(parse_letter(t) for t in tokens))

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __str__(self) -> str:
        return " ".join(str(x) for x in self.letters) or "1"

    def splice(self, position: int, length: int, replacement: Sequence[Letter]) -> "TwistWord":
        return TwistWord(self.letters[:position] + tuple(replacement) + self.letters[position + length:])


def word(text: str) -> TwistWord:
    return TwistWord.parse(text)


# --- Curve systems ---
class LanternConfig(NamedTuple):
    a: str
    b: str
    ab: str
    d1: str
    d2: str
    d3: str
    d4: str


class ChainConfig(NamedTuple):
    a: str
    b: str
    c: str
    d1: str
    d2: str


@dataclass(frozen=True)
class CurveSystem:
    """A registry of declared curves and facts; nothing is checked geometrically."""
    curves: Tuple[str, ...]
    disjoint: FrozenSet[FrozenSet[str]] = frozenset()
    intersect: Dict[Tuple[str, str], str] = field(default_factory=dict)
    lanterns: Tuple[LanternConfig, ...] = ()
    chains: Tuple[ChainConfig, ...] = ()
    words: Dict[str, TwistWord] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        declared = set(self.curves)
        referenced = [c for pair in self.disjoint for c in pair]
        for (a, b), ab in self.intersect.items():
            referenced += [a, b, ab]
            if ab in (a, b):
                raise ScriptError(f"product of {a} and {b} must be a new curve, got {ab}")
        for config in self.lanterns + self.chains:
            referenced += list(config)
        for w in self.words.values():
            referenced += [x.curve for x in w]
        unknown = [c for c in referenced if c not in declared]
        if unknown:
            raise UndeclaredFact(f"curve {unknown[0]!r} is not declared")

    def require(self, curve: str) -> None:
        if curve not in self.curves:
            raise UndeclaredFact(f"curve {curve!r} is not declared")

    def are_disjoint(self, a: str, b: str) -> bool:
        return a == b or frozenset((a, b)) in self.disjoint

    def product(self, a: str, b: str) -> str:
        """The curve ab with tau_a(b) = ab."""
        if (a, b) not in self.intersect:
            raise UndeclaredFact(f"no declared single intersection of {a} and {b}")
        return self.intersect[(a, b)]

    def factor(self, a: str, ab: str) -> str:
        """The unique b with tau_a(b) = ab."""
        found = [y for (x, y), z in self.intersect.items() if x == a and z == ab]
        if not found:
            raise UndeclaredFact(f"no declared curve b with {a} * b = {ab}")
        if len(found) > 1:
            raise RuleMismatch(f"{a} * b = {ab} is ambiguous: {', '.join(found)}")
        return found[0]


def parse_mcg(text: str) -> CurveSystem:
    """
    Parse a .mcg file: 'curves: a b ...', 'disjoint a c', 'intersect a b -> ab',
    'lantern a b ab d1 d2 d3 d4', 'chain a b c d1 d2' and 'word <name>: a+ b-'.
    """
    curves: List[str] = []
    disjoint = set()
    intersect: Dict[Tuple[str, str], str] = {}
    lanterns, chains = [], []
    words: Dict[str, TwistWord] = {}
    name = ""
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        try:
            if line.startswith("curves:"):
                curves.extend(line[len("curves:"):].split())
            elif head == "system":
                name = rest.strip()
            elif head == "disjoint":
                a, b = rest.split()
                disjoint.add(frozenset((a, b)))
            elif head == "intersect":
                left, arrow, ab = rest.partition("->")
                a, b = left.split()
                if not arrow:
                    raise ValueError
                if (a, b) in intersect:
                    raise ScriptError(f"line {line_no}: product of {a} and {b} declared twice")
                intersect[(a, b)] = ab.strip()
            elif head == "lantern":
                lanterns.append(LanternConfig(*rest.split()))
            elif head == "chain":
                chains.append(ChainConfig(*rest.split()))
            elif head == "word":
                label, sep, body = rest.partition(":")
                if not sep:
                    raise ValueError
                words[label.strip()] = TwistWord.parse(body)
            else:
                raise ScriptError(f"line {line_no}: unknown statement {head!r}")
        except (ValueError, TypeError):
            raise ScriptError(f"line {line_no}: malformed {head!r} statement")
    return CurveSystem(tuple(curves), frozenset(disjoint), intersect, tuple(lanterns), tuple(chains), words, name)


# --- Rewriting ---
def _expect(w: TwistWord, position: int, length: int) -> Tuple[Letter, ...]:
    if position < 0 or position + length > len(w):
        raise RuleMismatch(f"no {length}-letter subword at position {position} of a {len(w)}-letter word")
    return w.letters[position:position + length]


def _all_positive(letters: Sequence[Letter], rule: str) -> None:
    if any(x.sign < 0 for x in letters):
        raise RuleMismatch(f"{rule} relates positive twists only, found {' '.join(map(str, letters))}")


def _find_config(configs, side: Sequence[str], fields: Sequence[str], rule: str):
    found = [c for c in configs if tuple(getattr(c, f) for f in fields) == tuple(side)]
    if not found:
        raise UndeclaredFact(f"no declared {rule} configuration on {' '.join(side)}")
    if len(found) > 1:
        raise RuleMismatch(f"{rule} configuration on {' '.join(side)} is ambiguous")
    return found[0]


def rewrite(system: CurveSystem, w: TwistWord, rule: str, position: int, direction: str = "forward",
            insert: Optional[Letter] = None) -> TwistWord:
    """Apply one relation at `position`; the cancel rule backward inserts `insert` and its inverse."""
    if rule not in RULES:
        raise RuleMismatch(f"unknown rule {rule!r}")
    if direction not in ("forward", "backward"):
        raise RuleMismatch(f"direction must be forward or backward, got {direction!r}")
    forward = direction == "forward"

    if rule == "cancel":
        if not forward:
            if insert is None:
                raise RuleMismatch("inserting a cancelling pair needs the first letter")
            system.require(insert.curve)
            if not 0 <= position <= len(w):
                raise RuleMismatch(f"insertion point {position} outside 0..{len(w)}")
            return w.splice(position, 0, (insert, insert.inverse()))
        x, y = _expect(w, position, 2)
        if x.curve != y.curve or x.sign != -y.sign:
            raise RuleMismatch(f"{x} {y} is not a cancelling pair")
        return w.splice(position, 2, ())

    if rule == "commute":
        x, y = _expect(w, position, 2)
        if not system.are_disjoint(x.curve, y.curve):
            raise UndeclaredFact(f"{x.curve} and {y.curve} are not declared disjoint")
        return w.splice(position, 2, (y, x))

    if rule == "braid":
        x, y = _expect(w, position, 2)
        _all_positive((x, y), "braid")
        if forward:
            # tau_u tau_v = tau_{u v} tau_u
            return w.splice(position, 2, (Letter(system.product(x.curve, y.curve), 1), x))
        return w.splice(position, 2, (y, Letter(system.factor(y.curve, x.curve), 1)))

    if rule == "lantern":
        size = 3 if forward else 4
        letters = _expect(w, position, size)
        _all_positive(letters, "lantern")
        curves = [x.curve for x in letters]
        if forward:
            c = _find_config(system.lanterns, curves, ("a", "b", "ab"), "lantern")
            out = (c.d4, c.d3, c.d2, c.d1)
        else:
            c = _find_config(system.lanterns, curves, ("d4", "d3", "d2", "d1"), "lantern")
            out = (c.a, c.b, c.ab)
        return w.splice(position, size, tuple(Letter(x, 1) for x in out))

    size = 12 if forward else 2
    letters = _expect(w, position, size)
    _all_positive(letters, "chain")
    curves = [x.curve for x in letters]
    if forward:
        if curves[3:] != curves[:9]:
            raise RuleMismatch("chain source is (a b c)^4")
        c = _find_config(system.chains, curves[:3], ("a", "b", "c"), "chain")
        out = (c.d2, c.d1)
    else:
        c = _find_config(system.chains, curves, ("d2", "d1"), "chain")
        out = (c.a, c.b, c.c) * 4
    return w.splice(position, size, tuple(Letter(x, 1) for x in out))


def word_length_change(rule: str, direction: str = "forward") -> int:
    change = {"cancel": -2, "commute": 0, "braid": 0, "lantern": 1, "chain": -10}[rule]
    return change if direction == "forward" else -change


# --- Surgery links ---
def word_of_surgery_link(d: SurgeryDiagram, labels: Union[Mapping[int, str], Sequence[str]]) -> TwistWord:
    """tau_{L_n}^{-c_n} ... tau_{L_1}^{-c_1} over the framed components."""
    if not isinstance(labels, Mapping):
        labels = dict(enumerate(labels))
    letters = []
    for k in reversed(d.framed_indices()):
        if k not in labels:
            raise UndeclaredFact(f"component c{k + 1} has no curve label")
        letters.append(Letter(labels[k], -d.coeffs[k]))
    return TwistWord(tuple(letters))


# --- Certificates ---
@dataclass(frozen=True)
class Step:
    rule: str
    position: int
    direction: str = "forward"
    insert: Optional[Letter] = None

    def __str__(self) -> str:
        text = f"{self.rule} {self.direction} @{self.position}"
        if self.insert is not None:
            text += f" insert {self.insert} {self.insert.inverse()}"
        return text


@dataclass(frozen=True)
class Certificate:
    name: str
    system: str
    start: TwistWord
    target: TwistWord
    steps: Tuple[Step, ...]


@dataclass(frozen=True)
class Replay:
    certificate: Certificate
    direction: str
    steps: Tuple[Step, ...]
    words: Tuple[TwistWord, ...]

    @property
    def ok(self) -> bool:
        end = self.certificate.target if self.direction == "forward" else self.certificate.start
        return self.words[-1] == end


HANDLESLIDE_SYSTEM = """
system handleslide
curves: a b ab ba
intersect a b -> ab
intersect b ab -> a
intersect b a -> ba
"""

DESTABILIZATION_SYSTEM = """
system destabilization
curves: d1 d2 d3 d4 ab c e
lantern d3 c ab d4 d2 d1 e
intersect d3 c -> e
"""

_SYSTEMS = {"handleslide": HANDLESLIDE_SYSTEM, "destabilization": DESTABILIZATION_SYSTEM}


def builtin_system(name: str) -> CurveSystem:
    if name not in _SYSTEMS:
        raise UndeclaredFact(f"no built-in curve system {name!r}")
    return parse_mcg(_SYSTEMS[name])


def _ins(position: int, letter: str) -> Step:
    return Step("cancel", position, "backward", parse_letter(letter))


def _cert(name: str, system: str, start: str, target: str, *steps: Step) -> Certificate:
    return Certificate(name, system, word(start), word(target), tuple(steps))


def _sign_label(s: int) -> str:
    return "p" if s > 0 else "m"


# Slide relations in the form of both standard slides, for every pair of exponents.
_HANDLESLIDES = {
    ("left", 1, 1): ("a+ b+", "ab+ a+", (Step("braid", 0),)),
    ("left", 1, -1): ("a+ b-", "ab- a+", (_ins(0, "ab-"), Step("braid", 1, "backward"), Step("cancel", 2))),
    ("left", -1, 1): ("a- ab+", "b+ a-", (_ins(2, "a+"), Step("braid", 1, "backward"), Step("cancel", 0))),
    ("left", -1, -1): ("a- ab-", "b- a-", (_ins(0, "b-"), _ins(1, "a-"), Step("braid", 2), Step("cancel", 3),
                                           Step("cancel", 2))),
    ("right", 1, 1): ("a+ b+", "b+ ab+", (Step("braid", 0, "backward"),)),
    ("right", 1, -1): ("a- b+", "b+ ab-", (_ins(2, "ab+"), Step("braid", 1), Step("cancel", 0))),
    ("right", -1, 1): ("a+ b-", "b- ba+", (_ins(0, "b-"), Step("braid", 1), Step("cancel", 2))),
    ("right", -1, -1): ("a- b-", "b- ba-", (_ins(0, "b-"), _ins(1, "ba-"), Step("braid", 2, "backward"),
                                            Step("cancel", 3), Step("cancel", 2))),
}


def handleslide_variant(eps: int, delta: int, side: str = "left") -> Certificate:
    if (side, eps, delta) not in _HANDLESLIDES:
        raise RuleMismatch(f"no handle-slide variant ({eps}, {delta}, {side})")
    start, target, steps = _HANDLESLIDES[(side, eps, delta)]
    name = f"handleslide_{side}_{_sign_label(eps)}{_sign_label(delta)}"
    return _cert(name, "handleslide", start, target, *steps)


def lantern_destabilization() -> Certificate:
    return _cert(
        "lantern_destabilization", "destabilization", "d1+ d2+ d4+ ab-", "d3+",
        _ins(0, "e-"),
        Step("lantern", 1, "backward"),
        Step("cancel", 3),
        Step("braid", 1),
        Step("cancel", 0),
    )


def certificates() -> Dict[str, Certificate]:
    found = {}
    for side, eps, delta in _HANDLESLIDES:
        cert = handleslide_variant(eps, delta, side)
        found[cert.name] = cert
    cert = lantern_destabilization()
    found[cert.name] = cert
    return found


def _inverse_steps(system: CurveSystem, cert: Certificate) -> Tuple[Step, ...]:
    """Steps that walk the certificate from its target back to its start."""
    w = cert.start
    inverses = []
    for step in cert.steps:
        if step.rule == "cancel" and step.direction == "forward":
            inverses.append(Step("cancel", step.position, "backward", w.letters[step.position]))
        elif step.rule == "cancel":
            inverses.append(Step("cancel", step.position, "forward"))
        elif step.rule == "commute":
            inverses.append(step)
        else:
            back = "backward" if step.direction == "forward" else "forward"
            inverses.append(Step(step.rule, step.position, back))
        w = rewrite(system, w, step.rule, step.position, step.direction, step.insert)
    return tuple(reversed(inverses))


def replay(cert: Certificate, direction: str = "forward") -> Replay:
    """Re-verify every step; raises RuleMismatch when the end word differs from the declared one."""
    system = builtin_system(cert.system)
    steps = cert.steps if direction == "forward" else _inverse_steps(system, cert)
    w = cert.start if direction == "forward" else cert.target
    words = [w]
    for step in steps:
        w = rewrite(system, w, step.rule, step.position, step.direction, step.insert)
        LOG.debug("%s: %s -> %s", cert.name, step, w)
        words.append(w)
    result = Replay(cert, direction, tuple(steps), tuple(words))
    if not result.ok:
        raise RuleMismatch(f"{cert.name} ends at {words[-1]}, not the declared word")
    return result


def replay_derivation(name: str, direction: str = "forward") -> Replay:
    found = certificates()
    if name not in found:
        raise RuleMismatch(f"unknown certificate {name!r}; known: {', '.join(sorted(found))}")
    return replay(found[name], direction)
