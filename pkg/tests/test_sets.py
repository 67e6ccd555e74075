import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

import ssdenlarge as s
from ssdenlarge.errors import InputError


def test_finite_positivity_and_witness(p1):
    A = s.FiniteSet(p1, [[0, 0], [1, 1]])
    r = s.q_positivity_report(A)
    assert r.status == "pass" and r.worst_residual == 0.0
    w = s.maximality_refute(A)
    np.testing.assert_allclose(w, [1.0, 0.0])
    # the witness is q-positive against A and new
    assert all(p1.q(w - a) >= 0 for a in A.points)


def test_singletons_of_anti_hilbert():
    A = s.FiniteSet(s.anti_hilbert(2), [[1.0, -2.0]])
    assert s.q_positivity_report(A).status == "pass"
    assert s.maximality_refute(A) is None


def test_skew_affine_graph_positive():
    A = s.AffineGraph(s.product(2), [[0.0, 1.0], [-1.0, 0.0]])
    assert s.q_positivity_report(A).status == "pass"


def test_non_monotone_affine_rejected_or_fails():
    try:
        A = s.AffineGraph(s.product(1), [[-1.0]])
    except InputError:
        return
    assert s.q_positivity_report(A).status == "fail"


def test_identity_graph_maximal(identity_graph):
    assert s.maximality_refute(identity_graph) is None


def test_empty_finite_set(p1):
    with pytest.raises(InputError):
        s.FiniteSet(p1, np.zeros((0, 2)))


def test_inf_q_examples(p1, identity_graph):
    assert s.inf_q_over_set(identity_graph, [1.0, 0.0]) == pytest.approx(-0.25)
    assert s.inf_q_over_set(s.AffineGraph(p1, [[0.0]]), [0.0, 1.0]) == -np.inf
    assert s.inf_q_over_set(identity_graph, [2.0, 2.0]) == pytest.approx(0.0)


@given(st.floats(-3, 3), st.floats(-3, 3))
def test_inf_q_identity_closed_form(x, xs):
    A = s.AffineGraph(s.product(1), [[1.0]])
    # min_y (x - y)(xs - y) = -(x - xs)^2 / 4
    assert A.inf_q([x, xs]) == pytest.approx(-(x - xs) ** 2 / 4, abs=1e-12)


@given(st.integers(0, 2000), st.floats(-3, 3), st.floats(-3, 3))
def test_inf_q_affine_matches_grid(seed, x, xs):
    rng = np.random.default_rng(seed)
    m = rng.uniform(0.2, 2.0)
    p = rng.uniform(-1, 1)
    A = s.AffineGraph(s.product(1), [[m]], [p])
    y = np.linspace(-40, 40, 200001)
    brute = np.min((x - y) * (xs - (m * y + p)))
    assert A.inf_q([x, xs]) <= brute + 1e-12
    assert A.inf_q([x, xs]) >= brute - 1e-4


def test_abs_graph_distance(abs_graph):
    assert abs_graph.distance([0.0, 0.3]) == pytest.approx(0.0, abs=1e-12)
    assert abs_graph.distance([2.0, 1.0]) == pytest.approx(0.0, abs=1e-12)
    assert abs_graph.distance([2.0, 0.0]) == pytest.approx(1.0)
    assert abs_graph.distance([0.0, 3.0]) == pytest.approx(2.0)


@given(st.integers(0, 10_000))
def test_subdiff_samples_are_members(seed):
    f = s.MaxAffine(*(lambda r: (r.normal(size=(5, 2)), r.normal(size=5)))(np.random.default_rng(seed)))
    A = s.SubdiffGraph(s.product(2), f)
    B = A.sample(10, np.random.default_rng(seed + 1))
    for b in B:
        assert A.distance(b) <= 1e-9
        x, xs = b[:2], b[2:]
        assert s.subdiff_membership(f, x, xs, 1e-9)


def test_subdiff_membership_examples(abs_fn):
    assert s.subdiff_membership(abs_fn, [0.0], [0.5], 0.0)
    assert s.subdiff_membership(abs_fn, [1.0], [1.0], 0.0)
    assert not s.subdiff_membership(abs_fn, [1.0], [0.0], 0.99)
    assert s.subdiff_membership(abs_fn, [1.0], [0.0], 1.0)


@pytest.mark.parametrize("kind,dim", [("finite", 1), ("finite", 2), ("affine", 2), ("subdiff", 1), ("subdiff", 2)])
def test_generated_instances_positive(kind, dim):
    specs = s.gen_random_instances(kind, 3, dim, seed=4)
    assert len(specs) == 3
    sp = s.product(dim)
    for spec in specs:
        A = s.set_from_spec(sp, spec)
        assert s.q_positivity_report(A, 300, seed=1).status == "pass"


def test_generator_determinism_and_empty():
    assert s.gen_random_instances("affine", 0, 2, seed=1) == []
    assert s.gen_random_instances("subdiff", 2, 2, seed=9) == s.gen_random_instances("subdiff", 2, 2, seed=9)


def test_generated_finite_pairs():
    sp = s.product(1)
    (spec,) = s.gen_random_instances("finite", 1, 1, seed=2, points=5)
    P = np.array(spec["finite"])
    assert len(P) == 5
    for a, b in itertools.combinations(P, 2):
        assert sp.q(a - b) >= 0
