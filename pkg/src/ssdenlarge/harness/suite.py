"""Check registry and the suite runner."""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .. import additivity, enlargements as enl, representative as rep
from ..additivity import calibration
from ..errors import ConfigError
from ..oracle import grid_oracle_report
from ..reports import ERROR, CheckReport, Tally, error_report
from ..sets import AffineGraph, maximality_refute, q_positivity_report
from ..spaces import calculus_identity_report, product, space_from_spec, space_properties_report
from .config import SuiteConfig, match_ids

EXIT_OK, EXIT_MISMATCH, EXIT_CONFIG, EXIT_ERROR = 0, 1, 2, 3


@dataclass(frozen=True)
class CheckSpec:
    target: str  # space | set | fn | enlargement | set_fn | none
    run: Callable
    defaults: dict = field(default_factory=dict)


def _maximality(A, p, seed, expect, name):
    w = maximality_refute(A, budget=p["budget"], seed=seed)
    t = Tally(0.0)
    t.add(0.0 if w is None else 1.0)
    if w is not None:
        t.notes["witness"] = w.tolist()
    return t.report("maximality", name, seed, expect)


def _designated_pair(_, p, seed, expect, name):
    """The identity-graph pair that attains the square-root bound."""
    sp = product(1)
    E = enl.make_ea(AffineGraph(sp, [[1.0]], [0.0]))
    b1, b2 = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    e1, e2 = E.lam(b1), E.lam(b2)
    gap = sp.q(b1 - b2)
    bound = -(math.sqrt(e1) + math.sqrt(e2)) ** 2
    t = Tally(1e-12)
    t.add(abs(gap - bound))
    return t.report("designated_pair", name, seed, expect,
                    details={"eps1": e1, "eps2": e2, "q_gap": gap, "bound": bound})


def _equivalence(E, p, seed, expect, name):
    combined, _, _ = additivity.equivalence_report(E, p["trials"], p["samples"], seed, name, expect)
    return combined


def _npt(E, p, seed, expect, name):
    out = []
    for n in p["n"]:
        r = enl.transportation_report_npt(E, n, p["trials"], seed, name, expect)
        r.check = f"transportation_npt[{n}]"
        out.append(r)
    return out


CHECKS: dict[str, CheckSpec] = {
    "calculus_identity": CheckSpec("space", lambda S, p, s, e, n: calculus_identity_report(S, p["trials"], s, n, e), {"trials": 1000}),
    "space_properties": CheckSpec("space", lambda S, p, s, e, n: space_properties_report(S, p["trials"], s, n, e), {"trials": 1000}),
    "q_positivity": CheckSpec("set", lambda A, p, s, e, n: q_positivity_report(A, p["trials"], s, n, e), {"trials": 1000}),
    "maximality": CheckSpec("set", _maximality, {"budget": 2000}),
    "fitzpatrick_chain": CheckSpec("set", lambda A, p, s, e, n: rep.fitzpatrick_chain_report(A, p["samples"], s, n, e), {"samples": 500}),
    "cross_validation": CheckSpec("set", lambda A, p, s, e, n: rep.cross_validation_report(A, p["samples"], s, n, e), {"samples": 200}),
    "ebar_additive": CheckSpec("set", lambda A, p, s, e, n: additivity.ebar_additive_report(A, p["trials"], p["samples"], s, n, e), {"trials": 1000, "samples": 300}),
    "repr_membership": CheckSpec("set_fn", lambda Ah, p, s, e, n: rep.repr_membership_report(*Ah, p["samples"], s, n, e), {"samples": 500}),
    "sandwich": CheckSpec("set_fn", lambda Ah, p, s, e, n: rep.sandwich_report(*Ah, p["samples"], s, n, e), {"samples": 500}),
    "h_at_membership": CheckSpec("set_fn", lambda Ah, p, s, e, n: rep.h_at_membership_report(*Ah, p["samples"], s, n, e), {"samples": 200}),
    "coincidence": CheckSpec("set_fn", lambda Ah, p, s, e, n: rep.coincidence_report(*Ah, p["samples"], s, n, e), {"samples": 500}),
    "lambda_axioms": CheckSpec("enlargement", lambda E, p, s, e, n: enl.lambda_axioms_report(E, p["samples"], s, n, e), {"samples": 500}),
    "transportation_2pt": CheckSpec("enlargement", lambda E, p, s, e, n: enl.transportation_report_2pt(E, p["trials"], s, n, e), {"trials": 1000}),
    "transportation_npt": CheckSpec("enlargement", _npt, {"trials": 200, "n": [3, 5, 8]}),
    "psi_convexity": CheckSpec("enlargement", lambda E, p, s, e, n: enl.psi_convexity_report(E, p["trials"], s, n, e), {"trials": 1000}),
    "roundtrip": CheckSpec("enlargement", lambda E, p, s, e, n: enl.roundtrip_report(E.A, E.Lambda, E, p["samples"], s, n, e), {"samples": 500}),
    "ordering": CheckSpec("enlargement", lambda E, p, s, e, n: enl.ordering_report(E.A, E, p["samples"], s, n, e), {"samples": 500}),
    "e_zero": CheckSpec("enlargement", lambda E, p, s, e, n: enl.e_zero_report(E.A, E, p["samples"], s, n, e), {"samples": 500}),
    "zero_level_positivity": CheckSpec("enlargement", lambda E, p, s, e, n: enl.zero_level_positivity_report(E, p["trials"], s, n, e), {"trials": 1000}),
    "additivity_pair": CheckSpec("enlargement", lambda E, p, s, e, n: additivity.additivity_pair_report(E, p["trials"], s, n, e), {"trials": 1000}),
    "additivity_conjugate": CheckSpec("enlargement", lambda E, p, s, e, n: additivity.additivity_conjugate_report(E, p["samples"], s, n, e), {"samples": 500}),
    "additivity_equivalence": CheckSpec("enlargement", _equivalence, {"trials": 1000, "samples": 500}),
    "sqrt_bound": CheckSpec("enlargement", lambda E, p, s, e, n: additivity.sqrt_bound_report(E.A, E, p["trials"], s, n, e), {"trials": 1000}),
    "grid_oracle": CheckSpec("fn", lambda f, p, s, e, n: grid_oracle_report(f, n, s, p["points"], p["step"], expect=e), {"points": 8, "step": 0.01}),
    "designated_pair": CheckSpec("none", _designated_pair),
}


def resolve_targets(cfg: SuiteConfig, entry: dict) -> list[tuple[str, object]]:
    """Return ``(instance name, object)`` pairs for one check entry."""
    spec = CHECKS[entry["check"]]
    on = entry.get("on", [])
    if spec.target == "none":
        return [(entry.get("name", "identity-graph"), None)]
    if spec.target == "space":
        out = []
        for ref in ([on] if isinstance(on, str) else on):
            if ref in cfg.spaces:
                out.append((ref, cfg.spaces[ref]))
            elif any(ch in ref for ch in "*?["):
                out.extend((k, cfg.spaces[k]) for k in match_ids(ref, cfg.spaces, "space"))
            else:
                try:
                    out.append((ref, space_from_spec(ref)))
                except Exception as exc:
                    raise ConfigError(f"unresolved space reference {ref!r}") from exc
        return out
    pools = {"set": (cfg.sets, "set"), "fn": (cfg.functions, "function"),
             "enlargement": (cfg.enlargements, "enlargement")}
    if spec.target in pools:
        pool, what = pools[spec.target]
        return [(k, pool[k]) for k in match_ids(on, pool, what)]
    # set_fn: "set-pattern/fn" where fn is "<set>.fn" when that exists
    out = []
    for ref in ([on] if isinstance(on, str) else on):
        if "/" not in ref:
            raise ConfigError(f"{entry['check']} targets are 'set/function' pairs, got {ref!r}")
        sref, fref = ref.split("/", 1)
        for sid in match_ids(sref, cfg.sets, "set"):
            fid = f"{sid}.{fref}" if f"{sid}.{fref}" in cfg.functions else fref
            if fid not in cfg.functions:
                raise ConfigError(f"unresolved function reference {fref!r} for set {sid!r}")
            out.append((f"{sid}/{fid}", (cfg.sets[sid], cfg.functions[fid])))
    return out


@dataclass
class SuiteResult:
    header: dict
    reports: list[CheckReport]
    timing: list[dict]

    @property
    def exit_code(self) -> int:
        if any(r.status == ERROR for r in self.reports):
            return EXIT_ERROR
        if any(not r.matches_expectation for r in self.reports):
            return EXIT_MISMATCH
        if self.header.get("calibration") and not self.header["calibration"]["agree"]:
            return EXIT_MISMATCH
        return EXIT_OK

    def summary(self) -> dict:
        return {
            "total": len(self.reports),
            "matched": sum(r.matches_expectation for r in self.reports),
            "mismatched": sum(not r.matches_expectation and r.status != ERROR for r in self.reports),
            "errors": sum(r.status == ERROR for r in self.reports),
            "exit_code": self.exit_code,
        }

    def canonical(self) -> dict:
        from ..reports import encode_tree
        return encode_tree({"schema": 1, "header": self.header,
                            "reports": [r.to_dict() for r in self.reports],
                            "summary": self.summary()})

    def to_json(self) -> str:
        return json.dumps(self.canonical(), sort_keys=True, indent=2, allow_nan=False) + "\n"

    def to_text(self) -> str:
        lines = []
        cal = self.header.get("calibration")
        if cal:
            lines.append(f"calibration: pair={cal['pair_verdict']} conjugate={cal['conjugate_verdict']} "
                         f"agree={cal['agree']}")
            lines.append(f"  reading: {cal['reading']}")
        lines.extend(r.line() for r in self.reports)
        s = self.summary()
        lines.append(f"total={s['total']} matched={s['matched']} mismatched={s['mismatched']} "
                     f"errors={s['errors']} exit={s['exit_code']}")
        return "\n".join(lines) + "\n"


def run_suite(cfg: SuiteConfig, only=None, seed_override=None) -> SuiteResult:
    """Execute the checks of ``cfg`` in config order.

    Exceptions raised inside a check become ``error`` reports; the suite keeps
    going. ``seed_override`` replaces the base seed and the seed of every
    entry (entry ``i`` gets ``seed_override + i``).
    """
    base = cfg.seed if seed_override is None else seed_override
    header = {"seed": base}
    if cfg.calibration:
        header["calibration"] = calibration(seed=base)
    reports, timing = [], []
    only = set([only] if isinstance(only, str) else only or [])
    for i, entry in enumerate(cfg.checks):
        name = entry["check"]
        if only and name not in only:
            continue
        spec = CHECKS[name]
        params = dict(spec.defaults)
        params.update({k: entry[k] for k in spec.defaults if k in entry})
        seed = entry["seed"] if seed_override is None else seed_override + i
        expect = entry.get("expect", "pass")
        for inst, obj in entry["targets"]:
            t0 = time.perf_counter()
            try:
                got = spec.run(obj, params, seed, expect, inst)
            except Exception as exc:  # surfaced per check, never aborts the suite
                got = error_report(name, inst, seed, exc, expect)
            got = got if isinstance(got, list) else [got]
            reports.extend(got)
            timing.append({"index": i, "check": name, "instance": inst,
                           "seconds": round(time.perf_counter() - t0, 4)})
    return SuiteResult(header, reports, timing)
