"""Numerical certificates: named values, residuals and a verdict."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field


def _round(v):
    if isinstance(v, bool) or isinstance(v, int):
        return v
    if isinstance(v, float):
        if not math.isfinite(v):
            return repr(v)
        return float(f"{v:.12g}")
    if isinstance(v, (list, tuple)):
        return [_round(u) for u in v]
    if isinstance(v, dict):
        return {str(k): _round(u) for k, u in v.items()}
    return v


@dataclass
class Certificate:
    """Outcome of a numerical check.

    Each residual must be at most ``tolerance`` in absolute value.  Boolean
    checks are encoded as indicator residuals (0 when satisfied, 1 otherwise).
    """

    claim_id: str
    values: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    tolerance: float = 1e-9
    caveats: list = field(default_factory=list)

    @property
    def failures(self) -> list:
        return sorted(k for k, r in self.residuals.items()
                      if not (math.isfinite(r) and abs(r) <= self.tolerance))

    @property
    def verdict(self) -> str:
        if self.failures:
            return "fail"
        return "caveat" if self.caveats else "pass"

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "claim_id": self.claim_id,
            "values": _round(self.values),
            "residuals": _round(self.residuals),
            "tolerance": self.tolerance,
            "verdict": self.verdict,
            "caveats": list(self.caveats),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def summary(self) -> str:
        worst = max((abs(r) for r in self.residuals.values()), default=0.0)
        return f"{self.claim_id}: {self.verdict} (max residual {worst:.3e})"
