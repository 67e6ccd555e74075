"""Check reports and the tally used to build them."""

import math
from dataclasses import dataclass, field

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"
EXPECTED_FAIL = "expected-fail-confirmed"
ERROR = "error"


@dataclass
class CheckReport:
    """Outcome of one property check on one instance.

    ``worst_residual`` is the largest amount by which any trial exceeded its
    bound, clipped below at zero; ``+inf`` when a finite bound was violated by
    an infinite value.
    """

    check: str
    instance: str
    trials: int
    violations: int
    worst_residual: float
    seed: int
    status: str
    expect: str = "pass"
    details: dict = field(default_factory=dict)

    @property
    def verdict(self):
        """Raw outcome ignoring the expectation: ``"pass"``, ``"fail"`` or the
        status itself when the check did not run to completion."""
        if self.status in (PASS, FAIL, INCONCLUSIVE, ERROR):
            return self.status
        return FAIL

    @property
    def matches_expectation(self):
        if self.expect == "fail":
            return self.status == EXPECTED_FAIL
        return self.status == PASS

    def to_dict(self):
        return {
            "check": self.check,
            "instance": self.instance,
            "trials": int(self.trials),
            "violations": int(self.violations),
            "worst_residual": encode_float(self.worst_residual),
            "seed": self.seed,
            "status": self.status,
            "expect": self.expect,
            "details": encode_tree(self.details),
        }

    def line(self):
        return (f"{self.status:<24} {self.check:<22} {self.instance:<28} "
                f"trials={self.trials} violations={self.violations} "
                f"worst={self.worst_residual:.3g}")


def encode_float(v):
    if v is None:
        return None
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if math.isnan(v):
        return "nan"
    return v


def encode_tree(obj):
    """Make nested containers JSON-safe (infinities as strings, numpy scalars as Python)."""
    if isinstance(obj, dict):
        return {str(k): encode_tree(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode_tree(v) for v in obj]
    if hasattr(obj, "tolist"):
        return encode_tree(obj.tolist())
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return encode_float(obj)
    return obj


class Tally:
    """Accumulates signed excesses (value minus bound) for one check."""

    def __init__(self, tol):
        self.tol = tol
        self.trials = 0
        self.violations = 0
        self.worst = -math.inf
        self.worst_at = None
        self.notes = {}

    def add(self, excess, tol=None, where=None):
        tol = self.tol if tol is None else tol
        self.trials += 1
        if excess > tol:
            self.violations += 1
        if excess > self.worst:
            self.worst = excess
            self.worst_at = where

    def add_many(self, excesses, tols=None):
        for i, e in enumerate(excesses):
            self.add(float(e), None if tols is None else float(tols[i]))

    def report(self, check, instance, seed, expect="pass", min_trials=1, details=None):
        det = dict(self.notes)
        if details:
            det.update(details)
        if self.worst_at is not None and self.violations:
            det["worst_at"] = self.worst_at
        worst = max(0.0, self.worst) if self.trials else 0.0
        if self.trials < min_trials and not self.violations:
            status = INCONCLUSIVE
        elif self.violations:
            status = EXPECTED_FAIL if expect == "fail" else FAIL
        else:
            status = PASS if expect != "fail" else FAIL
            if expect == "fail":
                det["mismatch"] = "expected a violation, none found"
        return CheckReport(check, instance, self.trials, self.violations, worst, seed, status,
                           expect, det)


def error_report(check, instance, seed, exc, expect="pass"):
    return CheckReport(check, instance, 0, 0, 0.0, seed, ERROR, expect,
                       {"error": f"{type(exc).__name__}: {exc}"})
