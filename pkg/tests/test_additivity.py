import math

import numpy as np
import pytest

import ssdenlarge as s
from ssdenlarge.sampling import candidate_points, convex_combos


def phi_equals_theta_star(A, seed=0, count=300):
    """Independent reading of E^A additivity: Phi_A = *Theta_A on samples.

    Samples include convex combinations of A (the domain of *Theta_A) and
    points projected onto the affine hull of dom Phi_A.
    """
    rng = np.random.default_rng(seed)
    P = np.vstack([convex_combos(A.sample(40, rng), count, rng), candidate_points(A, count, rng)])
    b0, N = A.phi().affine_hull()
    P = np.vstack([P, b0 + (P - b0) @ N @ N.T])
    phi, ts = A.phi().values(P), A.theta_star().values(P)
    both_inf = np.isinf(phi) & np.isinf(ts)
    gap = np.where(both_inf, 0.0, ts - np.where(both_inf, 0.0, phi))
    return bool(np.max(gap) <= 1e-8)


def sets_under_test():
    p1, p2 = s.product(1), s.product(2)
    out = {
        "identity": s.AffineGraph(p1, [[1.0]]),
        "singular": s.AffineGraph(p2, [[1.0, 0.0], [0.0, 0.0]]),
        "skew": s.AffineGraph(p2, [[0.0, 1.0], [-1.0, 0.0]], [0.5, -1.0]),
        "abs": s.SubdiffGraph(p1, s.MaxAffine([[1.0], [-1.0]], [0.0, 0.0])),
    }
    for k, spec in enumerate(s.gen_random_instances("subdiff", 3, 1, seed=12)):
        out[f"sub1_{k}"] = s.set_from_spec(p1, spec)
    for k, spec in enumerate(s.gen_random_instances("affine", 2, 2, seed=11)):
        out[f"aff{k}"] = s.set_from_spec(p2, spec)
    return out


SETS = sets_under_test()


def test_calibration_identity_graph():
    cal = s.calibration()
    assert cal["pair_verdict"] == cal["conjugate_verdict"] == "not additive"
    assert cal["agree"]
    dp = cal["designated_pair"]
    assert dp["q_gap"] == -1.0 and dp["additive_bound"] == -0.5 and dp["sqrt_bound"] == -1.0


def test_designated_pair_sqrt_bound_is_tight(identity_graph):
    E = s.make_ea(identity_graph)
    b1, b2 = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    e1, e2 = E.lam(b1), E.lam(b2)
    assert (e1, e2) == (0.25, 0.25)
    bound = -(math.sqrt(e1) + math.sqrt(e2)) ** 2
    assert abs(E.space.q(b1 - b2) - bound) <= 1e-12


@pytest.mark.parametrize("name", sorted(SETS))
def test_ea_verdict_matches_phi_equals_theta_star(name):
    A = SETS[name]
    E = s.make_ea(A)
    combined, pair, conj = s.equivalence_report(E, 600, 300, seed=1)
    additive = phi_equals_theta_star(A)
    assert (pair.violations == 0) == additive
    assert (conj.violations == 0) == additive
    assert combined.status == ("pass" if additive else "fail")


def test_affine_rule():
    # for affine graphs E^A is additive exactly when the symmetric part vanishes
    for name, A in SETS.items():
        if isinstance(A, s.AffineGraph):
            S = (A.M + A.M.T) / 2
            assert phi_equals_theta_star(A) == bool(np.allclose(S, 0))


@pytest.mark.parametrize("name", sorted(SETS))
def test_ebar_additive(name):
    A = SETS[name]
    assert s.ebar_additive_report(A, 400, 150, seed=2).status == "pass"


def test_pair_witness_is_genuine():
    A = SETS["singular"]
    E = s.make_ea(A)
    r = s.additivity_pair_report(E, 500, seed=0)
    assert r.status == "fail"
    b1, b2 = map(np.array, r.details["worst_at"])
    assert A.space.q(b1 - b2) < -(E.lam(b1) + E.lam(b2))


def test_sqrt_bound_holds_everywhere():
    for A in SETS.values():
        for E in (s.make_ea(A), s.make_ebar(A)):
            assert s.sqrt_bound_report(A, E, 400, seed=3).status == "pass"


def test_eps_subdiff_additive(abs_fn):
    E = s.make_eps_subdiff(abs_fn)
    assert s.additivity_pair_report(E, 1000, seed=0).status == "pass"
    assert s.additivity_conjugate_report(E, 300, seed=0).status == "pass"


def test_nonmaximal_negative_control():
    A = s.FiniteSet(s.product(1), [[0.0, 0.0], [1.0, 1.0]])
    E = s.make_ea(A, force=True)
    combined, pair, conj = s.equivalence_report(E, 600, 300, seed=0, expect="fail")
    assert pair.violations > 0 and conj.violations > 0
    assert combined.status == "expected-fail-confirmed"
