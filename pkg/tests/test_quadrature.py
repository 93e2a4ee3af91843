import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mixhypo.errors import AccuracyError
from mixhypo.quadrature import quad_integral


def test_exponential_density_normalizes():
    assert quad_integral(lambda t: 2 * np.exp(-2 * t), 0, math.inf) == pytest.approx(1.0, rel=1e-13)


def test_hypoexponential_mean():
    # first moment of the density 2e^{-t} - 2e^{-2t}: 1 + 1/2
    f = lambda t: t * (2 * np.exp(-t) - 2 * np.exp(-2 * t))
    assert quad_integral(f, 0, math.inf) == pytest.approx(1.5, rel=1e-12)


def test_gaussian_over_real_line():
    f = lambda t: np.exp(-((t - 3.0) ** 2) / 2) / math.sqrt(2 * math.pi)
    assert quad_integral(f, -math.inf, math.inf, center=3.0) == pytest.approx(1.0, rel=1e-12)


def test_lower_infinite_range():
    assert quad_integral(np.exp, -math.inf, 0.0) == pytest.approx(1.0, rel=1e-13)


def test_integrable_singularity():
    assert quad_integral(lambda t: t**-0.5, 0.0, 1.0) == pytest.approx(2.0, rel=1e-9)


def test_forced_failure_reports_best_estimate():
    with pytest.raises(AccuracyError) as info:
        quad_integral(lambda t: t**-0.999, 0.0, 1.0, rel_tol=1e-14)
    assert math.isfinite(info.value.estimate)


def test_reversed_and_empty_ranges():
    assert quad_integral(np.cos, 1.0, 0.0) == pytest.approx(-math.sin(1.0), rel=1e-14)
    assert quad_integral(np.cos, 2.0, 2.0) == 0.0


def test_nonfinite_integrand_raises():
    with pytest.raises(AccuracyError):
        quad_integral(lambda t: np.where(t > 0.5, np.nan, 1.0), 0.0, 1.0)


@given(a=st.floats(-5, 5), w=st.floats(0.01, 10), p=st.integers(0, 8))
def test_polynomials_exact(a, w, p):
    b = a + w
    exact = (b ** (p + 1) - a ** (p + 1)) / (p + 1)
    got = quad_integral(lambda t: t**p, a, b, abs_tol=1e-13)
    assert got == pytest.approx(exact, rel=1e-11, abs=1e-12)


@given(rate=st.floats(0.05, 50.0))
def test_exponential_tail_scale_invariance(rate):
    got = quad_integral(lambda t: rate * np.exp(-rate * t), 0.0, math.inf, scale=1 / rate)
    assert got == pytest.approx(1.0, rel=1e-10)
