"""
Moves API
Schur complement checks, template moves on diagrams and the independence rank
"""

from typing import Dict, List

from fastapi import APIRouter
from pydantic import BaseModel

from kirby import config
from kirby.blocks import verify_schur_conditions
from kirby.descriptors import parse_descriptor, parse_window
from kirby.errors import KirbyError
from kirby.invariants import d3_surg, delta
from kirby.moves import C_VECTOR, L_VECTOR, P_VECTOR, apply_template_move_detailed, independence_rank
from kirby.reports import IdentityCheck
from kirby.surgery import linking_data, parse_surgery, serialize_surgery
from kirby.utils import format_rational

router = APIRouter(prefix="/moves", tags=["moves"])


# --- Request / Response Models ---
class SchurInput(BaseModel):
    move: str
    seed: int = config.DEFAULT_SEED
    samples: int = config.DEFAULT_SAMPLES


class SchurOutput(BaseModel):
    move: str
    success: bool
    error: str | None = None
    samples: int = 0
    passed: int = 0
    checks: List[IdentityCheck] = []
    failures: List[str] = []


class ApplyInput(BaseModel):
    text: str
    move: str
    window: str


class ApplyOutput(BaseModel):
    success: bool
    error: str | None = None
    text: str | None = None
    index_map: Dict | None = None
    d3_before: str | None = None
    d3_after: str | None = None
    delta_before: str | None = None
    delta_after: str | None = None


class IndependenceOutput(BaseModel):
    vectors: Dict[str, List[str]]
    rank: int


# --- API Endpoints ---
@router.post("/schur", response_model=SchurOutput)
async def schur(body: SchurInput):
    try:
        m = parse_descriptor(body.move)
        report = verify_schur_conditions(m, seed=body.seed, samples=body.samples)
    except KirbyError as e:
        return SchurOutput(move=body.move, success=False, error=f"{type(e).__name__}: {e}")
    return SchurOutput(
        move=m.summary(),
        success=report.ok,
        error=None if report.ok else "; ".join(report.failures) or "identity failed",
        samples=report.samples,
        passed=report.passed,
        checks=report.checks,
        failures=report.failures,
    )


@router.post("/apply", response_model=ApplyOutput)
async def apply(body: ApplyInput):
    try:
        d = parse_surgery(body.text)
        result = apply_template_move_detailed(d, parse_descriptor(body.move), parse_window(body.window))
        before, after = linking_data(d), linking_data(result.diagram)
        return ApplyOutput(
            success=True,
            text=serialize_surgery(result.diagram),
            index_map=result.index_map.as_dict(),
            d3_before=format_rational(d3_surg(before)),
            d3_after=format_rational(d3_surg(after)),
            delta_before=format_rational(delta(before)),
            delta_after=format_rational(delta(after)),
        )
    except KirbyError as e:
        return ApplyOutput(success=False, error=f"{type(e).__name__}: {e}")


@router.get("/indep", response_model=IndependenceOutput)
async def independence():
    vectors = {"P": P_VECTOR, "L": L_VECTOR, "C": C_VECTOR}
    return IndependenceOutput(
        vectors={name: v.as_strings() for name, v in vectors.items()},
        rank=independence_rank(vectors.values()),
    )
