"""Report containers with deterministic serialization.

Identical inputs must produce identical bytes, so serialization here is
canonical: sorted keys, fixed separators, two-space indent, trailing
newline, and every number carried as a decimal string.  Wall-clock
timing is the one field that legitimately varies between runs; it is
opt-in and absent by default so that the default artifact is diffable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

__all__ = [
    "RunReport",
    "canonical_json",
    "tau_csv",
    "covering_csv",
]


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, separators=(",", ": ")) + "\n"


@dataclass(frozen=True)
class RunReport:
    """One CLI run: the spec as parsed, ordered per-t results, summary."""

    spec_echo: dict
    mode: str
    results: Tuple[dict, ...]
    summary: dict
    tool_version: str
    warnings: Tuple[str, ...] = ()
    wall_clock_seconds: Optional[str] = None

    def to_json_dict(self) -> dict:
        data = {
            "spec": self.spec_echo,
            "mode": self.mode,
            "results": list(self.results),
            "summary": self.summary,
            "tool_version": self.tool_version,
            "warnings": list(self.warnings),
        }
        if self.wall_clock_seconds is not None:
            data["wall_clock_seconds"] = self.wall_clock_seconds
        return data

    def to_json(self) -> str:
        return canonical_json(self.to_json_dict())

    @classmethod
    def from_json_dict(cls, data: dict) -> "RunReport":
        return cls(
            spec_echo=data["spec"],
            mode=data["mode"],
            results=tuple(data["results"]),
            summary=data["summary"],
            tool_version=data["tool_version"],
            warnings=tuple(data.get("warnings", ())),
            wall_clock_seconds=data.get("wall_clock_seconds"),
        )

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls.from_json_dict(json.loads(text))


def tau_csv(rows: Sequence[Tuple[str, str, str]]) -> str:
    """Rows of (t, upper, certified_lower) as decimal strings."""
    lines = ["t,upper,certified_lower"]
    lines.extend(f"{t},{u},{lo}" for t, u, lo in rows)
    return "\n".join(lines) + "\n"


def covering_csv(rows: Sequence[Tuple[str, str]]) -> str:
    """Rows of (eps, L) as decimal strings; L empty when not covered."""
    lines = ["eps,L"]
    lines.extend(f"{e},{l}" for e, l in rows)
    return "\n".join(lines) + "\n"
