import numpy as np
import pytest
from hypothesis import given, strategies as st

import ssdenlarge as s
from ssdenlarge.errors import InputError

SPACES = [s.hilbert(3), s.anti_hilbert(3), s.r3(), s.product(1), s.product(2)]
floats = st.floats(-50, 50, allow_nan=False)


def test_bracket_examples():
    assert s.bracket(s.r3(), [1, 0, 0], [0, 1, 0]) == 1.0
    assert s.bracket(s.product(1), [1, 2], [3, 4]) == 10.0
    assert s.bracket(s.hilbert(2), [3.0, -1.0], [0, 0]) == 0.0


def test_q_examples():
    assert s.q_eval(s.r3(), [1, 1, 0]) == 1.0
    assert s.q_eval(s.product(1), [1, 2]) == 2.0
    assert s.q_eval(s.anti_hilbert(2), [0, 0]) == 0.0


def test_calculus_examples():
    assert s.calculus_residual(s.hilbert(2), 1, 1, [1, 0], [0, 1]) == 0.0
    sp = s.r3()
    b = np.array([0.3, -2.0, 1.5])
    assert s.calculus_residual(sp, 1.0, 0.0, b, [7.0, 1.0, 2.0]) == 0.0


def test_iota_examples():
    np.testing.assert_array_equal(s.iota_apply(s.product(1), [1, 2]), [2, 1])
    np.testing.assert_array_equal(s.iota_apply(s.anti_hilbert(2), [1, 2]), [-1, -2])


def test_banach_margin():
    assert s.banach_ssd_margin(s.hilbert(4)) == pytest.approx(2.0)
    assert s.banach_ssd_margin(s.anti_hilbert(4)) == pytest.approx(0.0)
    # -2I: 1 + lambda_min = -1, not a Banach SSD space
    assert s.banach_ssd_margin(s.SsdSpace(-2 * np.eye(2))) == pytest.approx(-1.0)


def test_dimension_mismatch():
    with pytest.raises(InputError):
        s.q_eval(s.product(1), [1, 2, 3])


@pytest.mark.parametrize("sp", SPACES, ids=lambda sp: repr(sp))
def test_identity_report_passes(sp):
    r = s.calculus_identity_report(sp, trials=300, seed=5)
    assert r.status == "pass" and r.trials == 300


@pytest.mark.parametrize("sp", SPACES, ids=lambda sp: repr(sp))
def test_properties_report_passes(sp):
    assert s.space_properties_report(sp, trials=200, seed=2).status == "pass"


@given(st.sampled_from(SPACES), st.data())
def test_bracket_symmetric_and_q_consistent(sp, data):
    n = sp.dim
    b = np.array(data.draw(st.lists(floats, min_size=n, max_size=n)))
    c = np.array(data.draw(st.lists(floats, min_size=n, max_size=n)))
    assert sp.bracket(b, c) == pytest.approx(sp.bracket(c, b), rel=1e-12, abs=1e-9)
    assert sp.q(b + c) == pytest.approx(sp.q(b) + sp.q(c) + sp.bracket(b, c), rel=1e-9, abs=1e-7)
    assert sp.bracket(b, c) == pytest.approx(float(np.dot(sp.iota(c), b)), rel=1e-12, abs=1e-9)


@given(st.sampled_from(SPACES), floats, floats, st.data())
def test_calculus_rule_any_inputs(sp, alpha, gamma, data):
    n = sp.dim
    b = np.array(data.draw(st.lists(floats, min_size=n, max_size=n)))
    c = np.array(data.draw(st.lists(floats, min_size=n, max_size=n)))
    terms = abs(alpha) ** 2 * abs(sp.q(b)) + gamma ** 2 * abs(sp.q(c)) + abs(alpha * gamma * sp.q(b - c))
    assert abs(sp.calculus_residual(alpha, gamma, b, c)) <= 1e-9 * (1 + terms) + 1e-9
