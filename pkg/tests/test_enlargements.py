import numpy as np
import pytest
from hypothesis import given, strategies as st

import ssdenlarge as s
from ssdenlarge.errors import ContractError

pt = st.tuples(st.floats(-3, 3), st.floats(-3, 3)).map(np.array)


def affine_instances():
    sp = s.product(2)
    return [s.set_from_spec(sp, spec) for spec in s.gen_random_instances("affine", 3, 2, seed=21)]


def subdiff_instances():
    sp = s.product(1)
    return [s.set_from_spec(sp, spec) for spec in s.gen_random_instances("subdiff", 2, 1, seed=22)]


def enlargements_of(A):
    out = [s.make_ea(A), s.make_ebar(A)]
    out += [s.make_from_repr(A, h) for h in s.standard_reprs(A).values()]
    return out


def test_membership_examples(identity_graph):
    EA = s.make_ea(identity_graph)
    assert EA.lam([1.0, 0.0]) == pytest.approx(0.25)
    assert s.membership(EA, 0.25, [1.0, 0.0])
    assert not s.membership(EA, 0.2, [1.0, 0.0])
    assert s.membership(EA, 0.0, [2.0, 2.0])
    EB = s.make_ebar(identity_graph)
    assert EB.lam([1.0, 0.0]) == np.inf
    assert not s.membership(EB, 1e6, [1.0, 0.0])
    assert s.membership(EB, 0.0, [-1.5, -1.5])


def test_psi_examples(p1):
    eps, b = s.psi_map(p1, 1.0, [1.0, 2.0])
    assert eps == 3.0
    np.testing.assert_array_equal(b, [1.0, 2.0])
    assert s.psi_inverse(p1, 3.0, [1.0, 2.0])[0] == 1.0
    assert s.psi_map(p1, 0.7, [1.0, 0.0])[0] == 0.7  # q = 0


def test_from_repr_matches_extremes(identity_graph):
    A = identity_graph
    pts = np.random.default_rng(0).normal(size=(30, 2)) * 2
    ea, from_phi = s.make_ea(A), s.make_from_repr(A, A.phi())
    eb, from_ts = s.make_ebar(A), s.make_from_repr(A, A.theta_star())
    for b in pts:
        assert from_phi.lam(b) == pytest.approx(ea.lam(b))
        assert from_ts.lam(b) == eb.lam(b)


def test_from_repr_rejects_non_representative(identity_graph):
    with pytest.raises(ContractError):
        s.make_from_repr(identity_graph, s.Quadratic(np.zeros((2, 2))))


def test_eps_subdiff_level(abs_fn):
    E = s.make_eps_subdiff(abs_fn)
    assert E.lam([0.0, 0.5]) == pytest.approx(0.0)
    assert E.lam([1.0, 1.0]) == pytest.approx(0.0)
    assert E.lam([1.0, 0.0]) == pytest.approx(1.0)
    assert E.lam([0.0, 2.0]) == np.inf


@given(pt)
def test_eps_subdiff_membership_agrees(b):
    f = s.MaxAffine([[1.0], [-1.0], [0.3]], [0.0, 0.0, -0.5])
    E = s.make_eps_subdiff(f)
    lam = E.lam(b)
    if np.isfinite(lam):
        assert s.subdiff_membership(f, b[:1], b[1:], lam + 1e-9)
        if lam > 1e-6:
            assert not s.subdiff_membership(f, b[:1], b[1:], lam - 1e-6)


@given(st.lists(pt, min_size=2, max_size=6), st.integers(0, 1000))
def test_npt_proof_identity(points, seed):
    sp = s.product(1)
    B = np.array(points)
    a = np.random.default_rng(seed).dirichlet(np.ones(len(B)))
    bbar = a @ B
    lhs = sum(ai * sp.q(bi - bbar) for ai, bi in zip(a, B))
    rhs = sum(ai * sp.q(bi) for ai, bi in zip(a, B)) - sp.q(bbar)
    assert lhs == pytest.approx(rhs, abs=1e-10 * (1 + np.abs(B).max() ** 2))


@given(pt, pt, st.floats(0, 1))
def test_transportation_identity_graph(b1, b2, a):
    E = s.make_ea(s.AffineGraph(s.product(1), [[1.0]]))
    sp = E.space
    bbar = a * b1 + (1 - a) * b2
    bound = a * E.lam(b1) + (1 - a) * E.lam(b2) + a * (1 - a) * sp.q(b1 - b2)
    assert E.lam(bbar) <= bound + 1e-9 * (1 + abs(bound))


@pytest.mark.parametrize("A", affine_instances() + subdiff_instances(), ids=repr)
def test_reports_pass_on_generated(A):
    for E in enlargements_of(A):
        assert s.lambda_axioms_report(E, 100, seed=1).status == "pass"
        assert s.transportation_report_2pt(E, 150, seed=2).status == "pass"
        assert s.psi_convexity_report(E, 150, seed=3).status == "pass"
        assert s.ordering_report(A, E, 100, seed=4).status == "pass"
        assert s.e_zero_report(A, E, 100, seed=5).status == "pass"
        assert s.zero_level_positivity_report(E, 150, seed=6).status == "pass"


@pytest.mark.parametrize("n", [3, 5, 8])
def test_npt_report(identity_graph, n):
    r = s.transportation_report_npt(s.make_ea(identity_graph), n, 100, seed=n)
    assert r.status == "pass" and r.trials >= 100


def test_roundtrip(identity_graph, abs_graph):
    for A in (identity_graph, abs_graph):
        for h in s.standard_reprs(A).values():
            E = s.make_from_repr(A, h)
            assert s.roundtrip_report(A, h, E, 200, seed=0).status == "pass"


def test_corrupted_control_fails_both_ways(identity_graph):
    E = s.make_corrupted(identity_graph, seed=0)
    t = s.transportation_report_2pt(E, 1000, seed=0)
    p = s.psi_convexity_report(E, 1000, seed=0)
    assert t.status == "fail" and p.status == "fail"
    assert s.psi_convexity_report(E, 1000, seed=0, expect="fail").status == "expected-fail-confirmed"
