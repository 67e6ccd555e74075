import numpy as np
import pytest
from hypothesis import given, strategies as st

import ssdenlarge as s
from ssdenlarge.functions import MaxAffine

coords = st.floats(-4, 4, allow_nan=False)


def random_max_affine(seed, dim, pieces=6):
    rng = np.random.default_rng(seed)
    return s.MaxAffine(rng.normal(size=(pieces, dim)), rng.normal(size=pieces))


def test_eval_examples(p1, abs_fn):
    assert abs_fn([-2.0]) == 2.0
    g = s.quad_on_graph(p1, [[1.0]], [0.0])
    assert g([2.0, 2.0]) == 4.0
    assert g([2.0, 1.0]) == np.inf
    assert s.PolyhedralHull([[0, 0], [1, 1]], [0, 1])([0.5, 0.5]) == pytest.approx(0.5)


def test_conjugate_examples(abs_fn):
    assert s.conjugate_eval(abs_fn, [0.5]) == 0.0
    assert s.conjugate_eval(abs_fn, [1.0]) == 0.0
    assert s.conjugate_eval(abs_fn, [2.0]) == np.inf
    aff = s.MaxAffine([[2.0, -1.0]], [3.0])  # <g, x> - 3
    assert aff.conjugate([2.0, -1.0]) == pytest.approx(3.0)
    assert aff.conjugate([2.0, 0.0]) == np.inf


def test_quadratic_conjugate_closed_form():
    f = s.Quadratic(np.diag([2.0, 4.0]))  # x^2 + 2 y^2
    y = np.array([1.0, -2.0])
    assert f.conjugate(y) == pytest.approx(y[0] ** 2 / 4 + y[1] ** 2 / 8)


def test_singular_quadratic_conjugate():
    f = s.Quadratic(np.diag([2.0, 0.0]))  # x^2, flat in the second coordinate
    assert f.conjugate([2.0, 0.0]) == pytest.approx(1.0)
    assert f.conjugate([2.0, 1e-3]) == np.inf


def test_hull_conjugate_is_max_over_points():
    P = np.array([[0.0, 0.0], [1.0, 2.0], [-1.0, 0.5]])
    v = np.array([0.0, 1.0, -0.5])
    H = s.PolyhedralHull(P, v)
    for y in ([1.0, 0.0], [-2.0, 3.0], [0.0, 0.0]):
        assert H.conjugate(y) == pytest.approx(np.max(P @ y - v))


def test_separable_sum(abs_fn):
    f = s.SeparableSum(abs_fn, s.Quadratic(np.array([[1.0]])))
    assert f([-2.0, 2.0]) == pytest.approx(4.0)
    assert f.conjugate([0.5, 2.0]) == pytest.approx(2.0)
    assert f.conjugate([3.0, 0.0]) == np.inf


def test_max_affine_sum_matches_pointwise():
    f, g = random_max_affine(1, 2), random_max_affine(2, 2)
    h = s.max_affine_sum([(0.5, f), (0.5, g)])
    for b in np.random.default_rng(0).normal(size=(20, 2)) * 3:
        assert h(b) == pytest.approx(0.5 * f(b) + 0.5 * g(b))


@given(st.integers(0, 5000), st.lists(coords, min_size=2, max_size=2), st.lists(coords, min_size=2, max_size=2))
def test_fenchel_young(seed, x, y):
    f = random_max_affine(seed, 2)
    x = np.array(x)
    fy = f.conjugate(np.array(y))
    assert f(x) + fy >= float(np.dot(x, y)) - 1e-9
    g = f.subgradient(x)
    assert f(x) + f.conjugate(g) == pytest.approx(float(np.dot(x, g)), abs=1e-8)


@given(st.integers(0, 5000), st.lists(coords, min_size=2, max_size=2))
def test_hull_biconjugate(seed, b):
    rng = np.random.default_rng(seed)
    P = rng.normal(size=(5, 2)) * 2
    H = s.PolyhedralHull(P, rng.normal(size=5))
    back = H.conjugate_fn()  # max-affine, its conjugate is H again
    for y in (np.array(b), rng.normal(size=2)):
        assert back(y) == pytest.approx(H.conjugate(y), abs=1e-8)


def test_grid_oracle_accepts_exact_conjugates(abs_fn):
    assert s.grid_oracle_report(abs_fn, "abs", seed=0).status == "pass"
    assert s.grid_oracle_report(random_max_affine(3, 2), "f", seed=1).status == "pass"


class _OffByHalf(MaxAffine):
    def conjugate(self, y):
        return super().conjugate(y) + 0.5


def test_grid_oracle_catches_wrong_conjugate():
    f = _OffByHalf([[1.0], [-1.0], [0.5]], [0.0, 0.0, 1.0])
    r = s.grid_oracle_report(f, "wrong", seed=0)
    assert r.status == "fail" and r.violations > 0
    assert s.grid_oracle_report(f, "wrong", seed=0, expect="fail").matches_expectation
