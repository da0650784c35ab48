from __future__ import annotations

import enum
from dataclasses import dataclass


class Verdict(str, enum.Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class StabilityVerdict:
    verdict: Verdict
    dominant: complex | None
    method: str

    @classmethod
    def from_real_part(cls, re: float, dominant, method: str, tol: float = 1e-8):
        if re < -tol:
            v = Verdict.STABLE
        elif re > tol:
            v = Verdict.UNSTABLE
        else:
            v = Verdict.INCONCLUSIVE
        return cls(v, dominant, method)
