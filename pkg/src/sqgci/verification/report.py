"""Verification report: named measurements with thresholds and provenance.

Serialised as JSON with the schema

    {"schema": SCHEMA, "items": {id: entry}, "diagnostics": {id: entry},
     "environment": {...}, "timestamp": str}

where every entry is ``{measured, threshold, pass, tolerance, operation}``.
Non-finite numbers are written as the strings ``"nan"``, ``"inf"``, ``"-inf"``.
"""
from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

SCHEMA = "sqgci-report/1"
ENTRY_KEYS = ("measured", "threshold", "pass", "tolerance", "operation")


def _enc(x):
    if isinstance(x, float) and not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(x, (list, tuple)):
        return [_enc(v) for v in x]
    if hasattr(x, "item") and not isinstance(x, (list, tuple, dict, str)):
        return _enc(x.item())
    return x


def _dec(x):
    if x in ("nan", "inf", "-inf"):
        return float(x)
    if isinstance(x, list):
        return [_dec(v) for v in x]
    return x


@dataclass(frozen=True)
class Entry:
    """One measurement; ``passed`` is ``None`` for informational values."""

    measured: object
    threshold: object
    passed: object
    tolerance: object
    operation: str

    def to_json(self) -> dict:
        return {"measured": _enc(self.measured), "threshold": _enc(self.threshold),
                "pass": None if self.passed is None else bool(self.passed),
                "tolerance": _enc(self.tolerance), "operation": self.operation}

    @classmethod
    def from_json(cls, d: dict) -> "Entry":
        if set(d) != set(ENTRY_KEYS):
            raise ValueError(f"report entry has keys {sorted(d)}, expected {sorted(ENTRY_KEYS)}")
        return cls(_dec(d["measured"]), _dec(d["threshold"]), d["pass"], _dec(d["tolerance"]), d["operation"])


@dataclass
class VerificationReport:
    items: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)
    environment: dict = field(default_factory=dict)
    timestamp: str = ""

    def add(self, key: str, measured, threshold, passed, tolerance, operation: str):
        self.items[key] = Entry(measured, threshold, passed, tolerance, operation)

    def note(self, key: str, measured, operation: str, threshold=None, passed=None, tolerance=None):
        self.diagnostics[key] = Entry(measured, threshold, passed, tolerance, operation)

    @property
    def failures(self) -> list:
        return sorted(k for k, e in {**self.items, **self.diagnostics}.items() if e.passed is False)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self, timestamp: bool = True) -> dict:
        out = {
            "schema": SCHEMA,
            "items": {k: self.items[k].to_json() for k in sorted(self.items)},
            "diagnostics": {k: self.diagnostics[k].to_json() for k in sorted(self.diagnostics)},
            "environment": _enc_tree(self.environment),
            "summary": {"pass": self.passed, "failures": self.failures},
        }
        if timestamp:
            out["timestamp"] = self.timestamp or time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
        return out

    def dumps(self, timestamp: bool = True) -> str:
        return json.dumps(self.to_json(timestamp), indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, d: dict) -> "VerificationReport":
        allowed = {"schema", "items", "diagnostics", "environment", "summary", "timestamp"}
        extra = set(d) - allowed
        if extra:
            raise ValueError(f"unknown report fields {sorted(extra)}")
        if d.get("schema") != SCHEMA:
            raise ValueError(f"unsupported report schema {d.get('schema')!r}")
        return cls({k: Entry.from_json(v) for k, v in d["items"].items()},
                   {k: Entry.from_json(v) for k, v in d["diagnostics"].items()},
                   d.get("environment", {}), d.get("timestamp", ""))


def _enc_tree(x):
    if isinstance(x, dict):
        return {str(k): _enc_tree(v) for k, v in x.items()}
    return _enc(x)
