"""
Report Models
Structured results returned by the verifiers, the CLI and the API
"""

from typing import List, Optional

from pydantic import BaseModel


class IdentityCheck(BaseModel):
    name: str
    lhs: str
    rhs: str
    holds: bool


class SchurReport(BaseModel):
    tag: str
    direction: str
    samples: int
    passed: int
    checks: List[IdentityCheck]
    failures: List[str] = []

    @property
    def ok(self) -> bool:
        return self.passed == self.samples and not self.failures


class MoveCheck(BaseModel):
    ok: bool
    failures: List[str] = []
    d3_before: Optional[str] = None
    d3_after: Optional[str] = None
    delta_before: Optional[str] = None
    delta_after: Optional[str] = None


class StepReport(BaseModel):
    step: int
    kind: str
    status: str
    d3_before: Optional[str] = None
    d3_after: Optional[str] = None
    delta_before: Optional[str] = None
    delta_after: Optional[str] = None
    detail: str = ""


class ScriptReport(BaseModel):
    name: str
    steps: List[StepReport]

    @property
    def ok(self) -> bool:
        return all(s.status == "pass" for s in self.steps)

    @property
    def exit_status(self) -> int:
        return 0 if self.ok else 1
