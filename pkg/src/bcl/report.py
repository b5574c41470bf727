"""Audit reports and lossless JSON encoding of library values."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .numerics import IntervalScalar

SCHEMA = "bcl/1"


def rational_str(q: Fraction | int) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def jsonify(obj: Any) -> Any:
    """Convert to plain JSON types; rationals become "p/q", intervals dyadic strings."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, Fraction):
        return rational_str(obj)
    if isinstance(obj, float):
        raise TypeError("floats are not serialised; convert to an interval or rational")
    if isinstance(obj, IntervalScalar):
        return obj.to_json()
    if hasattr(obj, "to_json"):
        return jsonify(obj.to_json())
    if isinstance(obj, dict):
        return {str(k): jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonify(v) for v in obj]
    if hasattr(obj, "format"):
        return obj.format()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(jsonify(obj), sort_keys=True, indent=2, ensure_ascii=True)


@dataclass
class AuditReport:
    """Outcome of an audit: a verdict plus per-check details and failure witnesses.

    ``verdict`` is None when the audit only reports observations.
    """

    name: str
    params: dict
    verdict: bool | None
    asserted: bool = True
    summary: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (self.verdict is not False or not self.asserted) and not self.failures

    def to_json(self) -> dict:
        return {
            "audit": self.name,
            "params": self.params,
            "verdict": self.verdict,
            "asserted": self.asserted,
            "summary": self.summary,
            "checks": self.checks,
            "failures": self.failures,
        }
