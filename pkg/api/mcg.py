"""
Twist Word API
Replay of the shipped word-level certificates
"""

from typing import List

from fastapi import APIRouter, HTTPException
from pydantic import BaseModel

from kirby.errors import KirbyError
from kirby.mcg import certificates, replay_derivation

router = APIRouter(prefix="/mcg", tags=["mcg"])


class ReplayOutput(BaseModel):
    name: str
    direction: str
    success: bool
    error: str | None = None
    steps: List[str] = []
    words: List[str] = []


@router.get("/certificates")
async def list_certificates():
    return {"certificates": sorted(certificates())}


@router.get("/replay/{name}", response_model=ReplayOutput)
async def replay(name: str, backward: bool = False):
    if name not in certificates():
        raise HTTPException(status_code=404, detail=f"Unknown certificate: {name}")
    direction = "backward" if backward else "forward"
    try:
        result = replay_derivation(name, direction)
    except KirbyError as e:
        return ReplayOutput(name=name, direction=direction, success=False, error=str(e))
    return ReplayOutput(
        name=name,
        direction=direction,
        success=result.ok,
        steps=[str(s) for s in result.steps],
        words=[str(w) for w in result.words],
    )
