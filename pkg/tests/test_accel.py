import math

import pytest

from tableverify.accel import DEFAULT_TERMS, cvz_error_scale, cvz_sum


def test_log2():
    assert abs(cvz_sum(lambda k: 1.0 / (k + 1)) - math.log(2)) <= 1e-15


def test_leibniz():
    assert abs(cvz_sum(lambda k: 1.0 / (2 * k + 1)) - math.pi / 4) <= 1e-15


def test_error_decays_like_the_scale():
    exact = math.pi**2 / 12
    for n in (5, 10, 15):
        err = abs(cvz_sum(lambda k: 1.0 / (k + 1) ** 2, n) - exact)
        assert err <= 3 * cvz_error_scale(n)


def test_scale_is_tiny_at_default():
    assert cvz_error_scale(DEFAULT_TERMS) < 1e-29


def test_rejects_zero_terms():
    with pytest.raises(ValueError):
        cvz_sum(lambda k: 1.0, 0)
