"""
Invariants API
Linking data, d3 and delta of a contact surgery diagram
"""

from typing import Dict, List

from fastapi import APIRouter
from pydantic import BaseModel

from kirby.errors import KirbyError
from kirby.invariants import c_squared, d3_surg, delta
from kirby.linalg import signature
from kirby.surgery import linking_data, linking_table, parse_surgery
from kirby.utils import format_rational

router = APIRouter(prefix="/invariants", tags=["invariants"])


# --- Request / Response Models ---
class DiagramInput(BaseModel):
    text: str


class InvariantsOutput(BaseModel):
    success: bool
    error: str | None = None
    components: List[Dict] = []
    Q: List[List[int]] = []
    r: List[int] = []
    n: int = 0
    q: int = 0
    sigma: int = 0
    c2: str | None = None
    d3: str | None = None
    delta: str | None = None


# --- API Endpoint ---
@router.post("/", response_model=InvariantsOutput)
async def compute_invariants(body: DiagramInput):
    if not body.text.strip():
        # The empty text is the empty diagram.
        return InvariantsOutput(success=True, c2="0", d3="0", delta="0")
    try:
        d = parse_surgery(body.text)
        data = linking_data(d)
        return InvariantsOutput(
            success=True,
            components=linking_table(d),
            Q=[list(row) for row in data.Q],
            r=list(data.r),
            n=data.n,
            q=data.q,
            sigma=signature(data.Q),
            c2=format_rational(c_squared(data)),
            d3=format_rational(d3_surg(data)),
            delta=format_rational(delta(data)),
        )
    except KirbyError as e:
        return InvariantsOutput(success=False, error=f"{type(e).__name__}: {e}")
