"""
Proof Scripts
Parser and verifier for .kirby scripts: line-oriented sequences of
Reidemeister moves, normalization passes, standard moves and checks, each
with an explicit window.

    script lantern_demo
    let start = file lantern_left.surg
    load start
    move lantern window 0:14@0
    expect sigma = -4
"""

import re
import shlex
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from kirby import invariants as inv
from kirby import linalg
from kirby import moves
from kirby.descriptors import MoveDescriptor, Window, parse_descriptor, parse_window
from kirby.errors import KirbyError, NotSolvable, ScriptError
from kirby.reports import ScriptReport, StepReport
from kirby.surgery import (
    LinkingData,
    SurgeryDiagram,
    apply_reidemeister,
    linking_data,
    normalize,
    parse_surgery,
    surgery_from_word,
)
from kirby.utils import format_rational, get_logger, parse_int_list, parse_rational

LOG = get_logger(__name__)

REIDEMEISTER_ALIASES = {"I-up": "I-above", "I-down": "I-below"}
EXPECTABLE = ("d3", "delta", "n", "q", "sigma", "c2")


@dataclass(frozen=True)
class ScriptStep:
    line: int
    kind: str
    name: str = ""
    other: str = ""
    diagram: Optional[SurgeryDiagram] = None
    variant: str = ""
    location: Tuple[int, int] = (0, 0)
    direction: str = "forward"
    descriptor: Optional[MoveDescriptor] = None
    window: Optional[Window] = None
    invariant: str = ""
    value: Optional[Fraction] = None


@dataclass(frozen=True)
class ProofScript:
    name: str
    steps: Tuple[ScriptStep, ...]
    bindings: Tuple[str, ...] = field(default=())


# --- Parsing ---
def _inline_diagram(tokens: List[str], line_no: int) -> SurgeryDiagram:
    word = re.sub(r"\s+(?=[LRX])", "/", tokens[0].strip())
    options = {}
    for token in tokens[1:]:
        key, sep, value = token.partition("=")
        if not sep or key not in ("coeffs", "orient", "unframed"):
            raise ScriptError(f"line {line_no}: unknown inline option {token!r}")
        options[key] = value
    coeffs = [None if c == "*" else int(c) for c in options.get("coeffs", "").split(",") if c]
    orient = None
    if "orient" in options:
        orient = [1 if s == "+" else -1 for s in options["orient"].split(",") if s]
    unframed = parse_int_list(options.get("unframed", ""))
    return surgery_from_word(word, coeffs, orient, unframed)


def _split_window(rest: str, line_no: int) -> Tuple[str, Window]:
    head, sep, tail = rest.rpartition(" window ")
    if not sep:
        raise ScriptError(f"line {line_no}: missing 'window <start>:<stop>@<base>'")
    return head.strip(), parse_window(tail)


def _parse_line(line: str, line_no: int, base_dir: Path, defined: set) -> Optional[ScriptStep]:
    keyword, _, rest = line.partition(" ")
    rest = rest.strip()

    def need(name: str) -> str:
        if name not in defined:
            raise ScriptError(f"line {line_no}: binding {name!r} used before it is defined")
        return name

    if keyword == "let":
        name, eq, source = rest.partition("=")
        name, source = name.strip(), source.strip()
        if not eq or not name:
            raise ScriptError(f"line {line_no}: expected 'let <name> = ...'")
        kind, _, arg = source.partition(" ")
        if kind == "file":
            path = base_dir / arg.strip()
            if not path.exists():
                raise ScriptError(f"line {line_no}: no such diagram file {path}")
            diagram = parse_surgery(path.read_text())
        elif kind == "inline":
            diagram = _inline_diagram(shlex.split(arg), line_no)
        elif kind == "empty":
            diagram = SurgeryDiagram.empty()
        else:
            raise ScriptError(f"line {line_no}: a binding is 'file <path>', 'inline \"<events>\"' or 'empty'")
        defined.add(name)
        return ScriptStep(line_no, "let", name=name, diagram=diagram)
    if keyword == "load":
        return ScriptStep(line_no, "load", name=need(rest))
    if keyword == "save":
        defined.add(rest)
        return ScriptStep(line_no, "save", name=rest)
    if keyword == "normalize":
        return ScriptStep(line_no, "normalize")
    if keyword == "reidemeister":
        parts = rest.split()
        if len(parts) not in (4, 5) or parts[1] != "at" or (len(parts) == 5 and parts[4] != "backward"):
            raise ScriptError(f"line {line_no}: expected 'reidemeister <variant> at <column> <level> [backward]'")
        variant = REIDEMEISTER_ALIASES.get(parts[0], parts[0])
        direction = "backward" if len(parts) == 5 else "forward"
        return ScriptStep(line_no, "reidemeister", variant=variant, location=(int(parts[2]), int(parts[3])),
                          direction=direction)
    if keyword == "move":
        text, window = _split_window(rest, line_no)
        return ScriptStep(line_no, "move", descriptor=parse_descriptor(text), window=window)
    if keyword == "slide_unframed":
        text, window = _split_window(rest, line_no)
        return ScriptStep(line_no, "slide_unframed", descriptor=parse_descriptor("unframed-slide " + text),
                          window=window)
    if keyword == "expect":
        what, eq, value = rest.partition("=")
        what = what.strip()
        if not eq or what not in EXPECTABLE:
            raise ScriptError(f"line {line_no}: expected 'expect <{'|'.join(EXPECTABLE)}> = <value>'")
        return ScriptStep(line_no, "expect", invariant=what, value=parse_rational(value))
    if keyword == "assert_move":
        text, window = _split_window(rest, line_no)
        parts = text.split(None, 2)
        if len(parts) != 3:
            raise ScriptError(f"line {line_no}: expected 'assert_move <before> <after> <descriptor> window <w>'")
        return ScriptStep(line_no, "assert_move", name=need(parts[0]), other=need(parts[1]),
                          descriptor=parse_descriptor(parts[2]), window=window)
    raise ScriptError(f"line {line_no}: unknown step {keyword!r}")


def parse_script(text: str, base_dir: Optional[Path] = None) -> ProofScript:
    """Parse a .kirby script; file bindings are resolved against `base_dir`."""
    base_dir = Path(base_dir or ".")
    name = ""
    steps: List[ScriptStep] = []
    defined: set = set()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("script "):
            name = line[len("script "):].strip()
            continue
        try:
            steps.append(_parse_line(line, line_no, base_dir, defined))
        except (ValueError, KirbyError) as e:
            if isinstance(e, ScriptError):
                raise
            raise ScriptError(f"line {line_no}: {e}") from e
    return ProofScript(name, tuple(steps), tuple(sorted(defined)))


# --- Verification ---
def _values(d: SurgeryDiagram) -> Tuple[Optional[LinkingData], Optional[str], Optional[str]]:
    data = linking_data(d)
    try:
        return data, format_rational(inv.d3_surg(data)), format_rational(inv.delta(data))
    except NotSolvable:
        return data, None, None


def _expected_value(data: LinkingData, what: str) -> Fraction:
    if what == "d3":
        return inv.d3_surg(data)
    if what == "delta":
        return inv.delta(data)
    if what == "sigma":
        return Fraction(linalg.signature(data.Q))
    if what == "c2":
        return inv.c_squared(data)
    return Fraction(getattr(data, what))


def _render(data: LinkingData) -> str:
    return f"Q={[list(row) for row in data.Q]} r={list(data.r)} n={data.n} q={data.q}"


class _Runner:
    def __init__(self, templates_dir=None):
        self.templates_dir = templates_dir
        self.bindings: Dict[str, SurgeryDiagram] = {}
        self.current: Optional[SurgeryDiagram] = None

    def diagram(self) -> SurgeryDiagram:
        if self.current is None:
            raise ScriptError("no diagram loaded")
        return self.current

    def run(self, index: int, step: ScriptStep) -> StepReport:
        report = StepReport(step=index, kind=step.kind, status="pass")
        if step.kind == "let":
            self.bindings[step.name] = step.diagram
            return report
        if step.kind == "save":
            self.bindings[step.name] = self.diagram()
            return report
        if step.kind == "load":
            self.current = self.bindings[step.name]
            _, d3, dl = _values(self.current)
            return report.model_copy(update={"d3_after": d3, "delta_after": dl})
        if step.kind == "expect":
            data = linking_data(self.diagram())
            got = _expected_value(data, step.invariant)
            want = step.value % inv.DELTA_MODULUS if step.invariant == "delta" else step.value
            detail = f"{step.invariant} = {format_rational(got)}"
            if got != want:
                return report.model_copy(update={"status": "fail",
                                                 "detail": f"{detail}, expected {format_rational(want)}"})
            return report.model_copy(update={"detail": detail})
        if step.kind == "assert_move":
            check = moves.assert_diagram_move(self.bindings[step.name], self.bindings[step.other],
                                              step.descriptor, step.window, self.templates_dir)
            return report.model_copy(update={
                "status": "pass" if check.ok else "fail",
                "d3_before": check.d3_before, "d3_after": check.d3_after,
                "delta_before": check.delta_before, "delta_after": check.delta_after,
                "detail": "; ".join(check.failures),
            })

        before = self.diagram()
        data_before, d3_before, delta_before = _values(before)
        if step.kind == "normalize":
            after = normalize(before)
        elif step.kind == "reidemeister":
            after = apply_reidemeister(before, step.variant, step.location, step.direction)
        else:
            after = moves.apply_template_move(before, step.descriptor, step.window, self.templates_dir)
        data_after, d3_after, delta_after = _values(after)
        self.current = after
        update = {"d3_before": d3_before, "d3_after": d3_after,
                  "delta_before": delta_before, "delta_after": delta_after}
        if step.kind in ("move", "slide_unframed"):
            update["detail"] = f"{step.descriptor.summary()} at {step.window}: " \
                               f"{_render(data_before)} -> {_render(data_after)}"
        if (d3_before, delta_before) != (d3_after, delta_after):
            update["status"] = "fail"
            update["detail"] = f"d3/delta changed: {d3_before}/{delta_before} -> {d3_after}/{delta_after}"
        return report.model_copy(update=update)


def verify_script(script: ProofScript, templates_dir=None) -> ScriptReport:
    """Run every step in order; failures are recorded and the run continues on the last good diagram."""
    runner = _Runner(templates_dir)
    reports = []
    for index, step in enumerate(script.steps, start=1):
        try:
            report = runner.run(index, step)
        except KirbyError as e:
            report = StepReport(step=index, kind=step.kind, status="fail", detail=f"{type(e).__name__}: {e}")
        if report.status != "pass":
            LOG.warning("script %s step %d (line %d) failed: %s", script.name, index, step.line, report.detail)
        reports.append(report)
    return ScriptReport(name=script.name, steps=reports)


def verify_script_file(path, templates_dir=None) -> ScriptReport:
    path = Path(path)
    return verify_script(parse_script(path.read_text(), path.parent), templates_dir)
