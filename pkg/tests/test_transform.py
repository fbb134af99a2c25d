import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tgkriging.errors import DomainError
from tgkriging.transform import (
    TransformFamily, boxcox_eval, c_deriv, c_eval, c_inverse, c_log_deriv, transform_obs,
)

mpmath.mp.dps = 50


def mp_c(alpha, t):
    alpha, t = mpmath.mpf(alpha), mpmath.mpf(t)
    return mpmath.sinh(alpha * mpmath.log(t)) / alpha if alpha else mpmath.log(t)


def test_c_eval_examples():
    assert c_eval(0, 1) == 0.0
    assert c_eval(1, math.e) == pytest.approx((math.e - 1 / math.e) / 2, rel=1e-15)
    assert c_eval(1, math.e) == pytest.approx(1.17520, abs=1e-5)
    assert c_eval(0.32, 2.0) == pytest.approx(float(mp_c("0.32", 2)), rel=1e-14)


def test_c_deriv_examples():
    assert c_deriv(0, 4) == 0.25
    for alpha in (0.0, 0.3, 1.0, 2.5):
        assert c_deriv(alpha, 1) == 1.0
    assert c_deriv(1, 2) == pytest.approx(0.625, rel=1e-15)


def test_c_inverse_examples():
    for alpha in (0.0, 0.3, 1.0):
        assert c_inverse(alpha, 0) == 1.0
    assert c_inverse(0, 1) == pytest.approx(math.e, rel=1e-15)
    assert abs(c_eval(0.5, c_inverse(0.5, 3.0)) - 3.0) < 1e-10


def test_boxcox_examples():
    assert boxcox_eval(1, 5) == pytest.approx(4.0)
    assert boxcox_eval(0, math.e) == pytest.approx(1.0)
    assert boxcox_eval(0.5, 4) == pytest.approx(2.0)


def test_transform_obs_examples():
    y, lj = transform_obs(0, [1, 1, 1])
    assert np.array_equal(y, np.zeros(3)) and lj == 0.0
    y, lj = transform_obs(0.7, [1, 1])
    assert np.array_equal(y, np.zeros(2)) and lj == 0.0


def test_transform_obs_log_jacobian_high_precision():
    z = np.exp(np.random.default_rng(0).normal(3.0, 1.5, 100))
    _, lj = transform_obs(0.32, z)
    a = mpmath.mpf("0.32")
    ref = mpmath.fsum(
        mpmath.log(mpmath.cosh(a * mpmath.log(mpmath.mpf(t))) / mpmath.mpf(t)) for t in z
    )
    assert lj == pytest.approx(float(ref), rel=1e-13)


@pytest.mark.parametrize("func", [c_eval, c_deriv, boxcox_eval])
def test_domain_errors(func):
    with pytest.raises(DomainError):
        func(0.5, 0.0)
    with pytest.raises(DomainError):
        func(0.5, -1.0)
    with pytest.raises(DomainError):
        func(-0.1, 2.0)
    with pytest.raises(DomainError):
        c_inverse(-1.0, 2.0)


def test_transform_obs_reports_index():
    with pytest.raises(DomainError, match="entry 2"):
        transform_obs(0.3, [1.0, 2.0, -3.0, 4.0])


@settings(max_examples=200, deadline=None)
@given(
    alpha=st.floats(0, 3),
    t1=st.floats(1e-6, 1e6),
    t2=st.floats(1e-6, 1e6),
)
def test_monotone(alpha, t1, t2):
    if t1 == t2:
        return
    lo, hi = sorted((t1, t2))
    if hi / lo - 1 < 1e-12:
        return
    assert c_eval(alpha, lo) < c_eval(alpha, hi)


def test_inverse_round_trip_grid():
    t = np.geomspace(1e-2, 1e2, 401)
    for alpha in np.round(np.arange(0, 1.001, 0.01), 2):
        back = c_inverse(alpha, c_eval(alpha, t))
        assert np.max(np.abs(back - t) / t) < 1e-10


def test_derivative_matches_finite_difference():
    t = np.geomspace(0.05, 50, 97)
    for alpha in (0.0, 1e-6, 0.2, 0.5, 1.0, 1.7):
        h = 1e-6 * t
        fd = (c_eval(alpha, t + h) - c_eval(alpha, t - h)) / (2 * h)
        assert np.max(np.abs(fd / c_deriv(alpha, t) - 1)) < 1e-6


def test_log_deriv_consistent():
    t = np.geomspace(1e-3, 1e3, 50)
    for alpha in (0.0, 0.32, 1.0):
        assert np.allclose(c_log_deriv(alpha, t), np.log(c_deriv(alpha, t)), rtol=0, atol=1e-12)
    # no overflow where cosh itself would
    assert np.isfinite(c_log_deriv(3.0, 1e250))


def test_continuity_in_alpha():
    t = np.geomspace(1e-3, 1e3, 61)
    lt = np.log(t)
    assert np.all(np.abs(c_eval(1e-8, t) - lt) < 1e-8 * (1 + np.abs(lt) ** 3))
    # across the series / closed-form seam
    for tt in (0.5, 3.0, 40.0):
        a_seam = 1e-4 / abs(math.log(tt))
        below, above = c_eval(a_seam * (1 - 1e-9), tt), c_eval(a_seam * (1 + 1e-9), tt)
        assert abs(below - above) < 1e-12 * max(1, abs(below))
        assert c_eval(a_seam * 0.999, tt) == pytest.approx(float(mp_c(a_seam * 0.999, tt)), rel=1e-14)


def test_asymptotic_linearity():
    assert abs(c_eval(1, 1e4) / (0.5 * 1e4) - 1) < 1e-4


def test_transform_family_object():
    f = TransformFamily(0.4)
    t = np.array([0.1, 1.0, 7.0])
    assert np.allclose(f.inverse(f(t)), t)
    assert np.allclose(f.deriv(t), c_deriv(0.4, t))
    b = TransformFamily(0.5, "boxcox")
    assert np.allclose(b.inverse(b(t)), t)
    assert np.allclose(b(t), boxcox_eval(0.5, t))
    with pytest.raises(DomainError):
        b.inverse(-3.0)
    with pytest.raises(DomainError):
        TransformFamily(0.1, "yeo-johnson")
