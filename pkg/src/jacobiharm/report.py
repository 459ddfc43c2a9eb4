"""Diagnostic reports shared by the inequality checks and the CLI."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"
EXIT_CODES = {PASS: 0, FAIL: 1, INCONCLUSIVE: 4}


def _clean(x):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_clean(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    return x


@dataclass(frozen=True)
class DiagnosticReport:
    """Outcome of one numerical check.

    ``ratio`` defaults to ``empirical / bound`` when the bound is positive.
    ``samples`` holds plot-ready ``(x, y)`` pairs and ``details`` any named
    auxiliary numbers (fitted exponents, attaining regimes, ...).
    """

    bound: float
    empirical: float
    verdict: str
    ratio: Optional[float] = None
    samples: tuple = ()
    notes: str = ""
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict not in EXIT_CODES:
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.ratio is None:
            b, e = self.bound, self.empirical
            r = e / b if (b is not None and e is not None and b > 0 and math.isfinite(b)) else math.nan
            object.__setattr__(self, "ratio", r)
        object.__setattr__(self, "samples", tuple((float(x), float(y)) for x, y in self.samples))

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.verdict]

    def to_dict(self) -> dict:
        return _clean({
            "bound": self.bound,
            "empirical": self.empirical,
            "ratio": self.ratio,
            "verdict": self.verdict,
            "samples": [list(s) for s in self.samples],
            "notes": self.notes,
            "details": self.details,
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=False) + "\n"


def verdict_from(ok: bool) -> str:
    return PASS if ok else FAIL
