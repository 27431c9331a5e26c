"""Check-result record shared by the identity catalog and the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field

PASS = "PASS"
FAIL = "FAIL"
BRANCH_ERROR = "BRANCH_ERROR"
SKIPPED = "SKIPPED"
CONJECTURAL_PASS = "CONJECTURAL-PASS"
CONJECTURAL_FAIL = "CONJECTURAL-FAIL"


@dataclass
class CheckResult:
    """Outcome of one catalog check (possibly aggregated over sample points).

    abs_residual / rel_residual refer to the worst sampled point; lhs and rhs
    are the side values at that point.  verdict is one of PASS, FAIL,
    BRANCH_ERROR, SKIPPED, CONJECTURAL-PASS, CONJECTURAL-FAIL.
    """

    id: str
    params: object
    lhs: object
    rhs: object
    abs_residual: object
    rel_residual: object
    verdict: str
    precision_bits: int
    elapsed_ms: float
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.verdict in (PASS, CONJECTURAL_PASS)
