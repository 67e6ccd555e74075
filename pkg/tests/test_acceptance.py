"""Acceptance criteria 1-10 at their stated tolerances and runtime limits.

Each test records a one-line verdict in ``RESULTS``; the terminal summary
(see ``conftest.py``) prints one PASS/FAIL line per criterion.
"""

import math
import time

import numpy as np
import pytest

import ssdenlarge as s
from ssdenlarge.errors import SsdError
from ssdenlarge.functions import PointwiseFn, WeightedSum
from ssdenlarge.harness import load_config, run_suite
from ssdenlarge.harness.cli import default_suite_path
from ssdenlarge.harness.config import is_maximal_kind

RESULTS = {}


def record(n, ok, msg):
    RESULTS[n] = (ok, msg)
    assert ok, msg


@pytest.fixture(scope="module")
def cfg():
    return load_config(default_suite_path())


@pytest.fixture(scope="module")
def runs(cfg):
    first = run_suite(cfg)
    second = run_suite(load_config(default_suite_path()))
    return first, second


def maximal_generated(cfg):
    return [k for k in cfg.sets if k.startswith(("ga", "gs"))]


def test_criterion_01_calculus_identity():
    presets = [s.hilbert(3), s.anti_hilbert(3), s.r3(), s.product(1), s.product(2)]
    t0 = time.perf_counter()
    reps = [s.calculus_identity_report(sp, 1000, seed=k) for k, sp in enumerate(presets)]
    dt = time.perf_counter() - t0
    ok = all(r.status == "pass" and r.trials == 1000 for r in reps) and dt < 1.0
    worst = max(r.worst_residual for r in reps)
    record(1, ok, f"5 presets x 1000 trials, worst excess {worst:.2e}, {dt:.2f}s (< 1 s)")


def test_criterion_02_transportation(cfg):
    ids = maximal_generated(cfg)
    t0 = time.perf_counter()
    bad, count = [], 0
    for sid in ids:
        for tag in ("ea", "ebar", "h1", "h2"):
            E = cfg.enlargements[f"{sid}.{tag}"]
            r = s.transportation_report_2pt(E, 1000, seed=count)
            count += 1
            if r.status != "pass" or r.trials < 1000:
                bad.append(f"{sid}.{tag}:{r.status}")
    ctrl = []
    for cid in ("ga0.corrupted", "gs10.corrupted"):
        E = cfg.enlargements[cid]
        ctrl.append(s.transportation_report_2pt(E, 1000, seed=1).status == "fail"
                    and s.psi_convexity_report(E, 1000, seed=1).status == "fail")
    dt = time.perf_counter() - t0
    ok = len(ids) >= 10 and not bad and all(ctrl) and dt < 30.0
    record(2, ok, f"{len(ids)} instances, {count} enlargements x 1000 trials, failures {bad}, "
                  f"controls fail both ways {all(ctrl)}, {dt:.1f}s (< 30 s)")


def test_criterion_03_npt(cfg):
    ids = ["idg", "ga0", "ga3", "gs10", "gs20"]
    bad = []
    for sid in ids:
        E = cfg.enlargements[f"{sid}.ea"]
        for n in (3, 5, 8):
            r = s.transportation_report_npt(E, n, 200, seed=n)
            if r.status != "pass":
                bad.append(f"{sid}[{n}]")
    rng = np.random.default_rng(3)
    worst = 0.0
    for sid in ids:
        A = cfg.sets[sid]
        sp = A.space
        for _ in range(200):
            n = int(rng.integers(2, 9))
            B = rng.normal(size=(n, A.dim))
            a = rng.dirichlet(np.ones(n))
            bbar = a @ B
            lhs = sum(ai * sp.q(bi - bbar) for ai, bi in zip(a, B))
            rhs = sum(ai * sp.q(bi) for ai, bi in zip(a, B)) - sp.q(bbar)
            worst = max(worst, abs(lhs - rhs))
    ok = not bad and worst <= 1e-10
    record(3, ok, f"5 instances x n in (3,5,8) x 200 trials, failures {bad}, proof identity worst {worst:.1e}")


def test_criterion_04_bijection(cfg):
    bad, pairs = [], 0
    for sid, A in cfg.sets.items():
        if not is_maximal_kind(A):
            continue
        for tag in ("phi", "theta_star", "h1", "h2"):
            fid = f"{sid}.{tag}"
            if fid not in cfg.functions:
                continue
            h = cfg.functions[fid]
            E = s.make_from_repr(A, h, check=False)
            pairs += 1
            if s.roundtrip_report(A, h, E, 500, seed=pairs).status != "pass":
                bad.append(f"{fid}:roundtrip")
            if s.coincidence_report(A, h, 500, seed=pairs).status != "pass":
                bad.append(f"{fid}:P(h)=A")
    record(4, not bad, f"{pairs} (A, h) pairs, failures {bad}")


def test_criterion_05_sandwich(cfg):
    bad, n = [], 0
    for sid, A in cfg.sets.items():
        if not is_maximal_kind(A):
            continue
        for tag in ("phi", "theta_star", "h1", "h2"):
            fid = f"{sid}.{tag}"
            if fid in cfg.functions:
                n += 1
                if s.sandwich_report(A, cfg.functions[fid], 500, seed=n).status != "pass":
                    bad.append(fid)
        for eid, E in cfg.enlargements.items():
            if E.A is A and not eid.endswith("corrupted"):
                n += 1
                if s.ordering_report(A, E, 500, seed=n).status != "pass":
                    bad.append(eid)
    for eid in ("abs.eps", "f8.eps"):
        E = cfg.enlargements[eid]
        n += 1
        if s.ordering_report(E.A, E, 500, seed=n).status != "pass":
            bad.append(eid)
    record(5, not bad, f"{n} sandwich/ordering reports incl. eps-subdiff of |.| and 8-piece f, failures {bad}")


def test_criterion_06_cross_validation(cfg):
    finite = [k for k, A in cfg.sets.items() if isinstance(A, s.FiniteSet)]
    bad = [k for i, k in enumerate(finite)
           if s.cross_validation_report(cfg.sets[k], 200, seed=i, tol=1e-8).status != "pass"]
    record(6, bool(finite) and not bad, f"{len(finite)} finite instances x 200 points at 1e-8, failures {bad}")


def test_criterion_07_sqrt_bound(cfg):
    bad, n = [], 0
    for eid, E in cfg.enlargements.items():
        if eid.endswith("corrupted") or not is_maximal_kind(E.A):
            continue
        n += 1
        if s.sqrt_bound_report(E.A, E, 1000, seed=n).status != "pass":
            bad.append(eid)
    E = cfg.enlargements["idg.ea"]
    b1, b2 = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    e1, e2 = E.lam(b1), E.lam(b2)
    gap = abs(E.space.q(b1 - b2) + (math.sqrt(e1) + math.sqrt(e2)) ** 2)
    ok = not bad and e1 == e2 == 0.25 and gap <= 1e-12
    record(7, ok, f"{n} enlargements x 1000 pairs, failures {bad}; designated pair |gap| = {gap:.1e}")


def test_criterion_08_additivity(cfg, runs):
    res = runs[0]
    cal = res.header.get("calibration", {})
    eq = [r for r in res.reports if r.check == "additivity_equivalence"]
    disagree = [r.instance for r in eq if "mismatch" in r.details]
    unmatched = [r.instance for r in eq if not r.matches_expectation]
    ebar = [r for r in res.reports if r.check == "ebar_additive"]
    maximal = [k for k, A in cfg.sets.items() if is_maximal_kind(A)]
    ebar_ok = {r.instance for r in ebar if r.status == "pass"} >= set(maximal)
    covered = {r.instance for r in eq} >= {k for k in cfg.enlargements if not k.endswith("corrupted")}
    ok = (cal.get("agree") is True and "reading" in cal and not disagree and not unmatched
          and ebar_ok and covered)
    record(8, ok, f"calibration agree={cal.get('agree')}, {len(eq)} enlargements, "
                  f"disagreements {disagree}, Ebar additive on {len(maximal)} maximal sets: {ebar_ok}")


def test_criterion_09_grid_oracle(cfg):
    t0 = time.perf_counter()
    bad, done, skipped = [], 0, []
    for i, (fid, f) in enumerate(cfg.functions.items()):
        if isinstance(f, (WeightedSum, PointwiseFn)):
            skipped.append(fid)
            continue
        _, N = f.affine_hull()
        if N.shape[1] > 2:
            skipped.append(fid)
            continue
        try:
            r = s.grid_oracle_report(f, fid, seed=i)
        except SsdError as exc:
            bad.append(f"{fid}:{type(exc).__name__}")
            continue
        done += 1
        if r.status != "pass":
            bad.append(fid)
    dt = time.perf_counter() - t0
    ok = done > 0 and not bad and dt < 60.0
    record(9, ok, f"{done} functions with d <= 2 checked, failures {bad}, "
                  f"{len(skipped)} with domain dimension > 2 skipped, {dt:.1f}s (< 60 s)")


def test_criterion_10_determinism(runs):
    a, b = runs[0].to_json(), runs[1].to_json()
    ok = a == b and runs[0].exit_code == 0
    record(10, ok, f"two full-suite runs byte-identical: {a == b} ({len(a)} bytes), "
                   f"exit code {runs[0].exit_code}")
