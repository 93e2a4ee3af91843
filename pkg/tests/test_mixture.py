import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mixhypo.base import BaseDistribution as B
from mixhypo.errors import ConstructionError, DomainError, MomentDoesNotExist
from mixhypo.mixture import SignedMixture, compensated_sum, validate_mixture


@pytest.fixture
def hypo12():
    # density 2e^{-t} - 2e^{-2t}
    return SignedMixture((B.exponential(1.0), B.exponential(2.0)), (2.0, -1.0))


def test_hypoexponential_pair_values(hypo12):
    t = math.log(2)
    assert hypo12.pdf(t) == pytest.approx(0.5, rel=1e-15)
    assert hypo12.cdf(t) == pytest.approx(0.25, rel=1e-15)
    assert hypo12.sf(t) == pytest.approx(0.75, rel=1e-15)
    assert hypo12.hazard(t) == pytest.approx(2 / 3, rel=1e-14)
    assert hypo12.pdf(0.0) == 0.0


def test_mgf_and_moments(hypo12):
    assert hypo12.mgf(0.5) == pytest.approx(8 / 3, rel=1e-9)
    assert hypo12.moment(1) == pytest.approx(1.5, rel=1e-15)
    assert hypo12.moment(2) == pytest.approx(2 * 2 - 2 / 4, rel=1e-15)
    with pytest.raises(DomainError):
        hypo12.mgf(1.0)


def test_mgf_outside_component_domain_raises():
    m = SignedMixture((B.pareto(1.0, 3.0), B.pareto(1.0, 4.0)), (4.0, -3.0))
    with pytest.raises(DomainError):
        m.mgf(0.1)
    assert m.mgf(-0.5) > 0


def test_moment_beyond_tail_index_raises():
    m = SignedMixture((B.pareto(1.0, 2.5), B.pareto(1.0, 5.0)), (2.0, -1.0))
    assert math.isfinite(m.moment(2))
    with pytest.raises(MomentDoesNotExist):
        m.moment(3)


def test_weights_must_sum_to_one():
    comps = (B.exponential(1.0), B.exponential(2.0))
    with pytest.raises(ConstructionError):
        SignedMixture(comps, (0.5, 0.4))
    report = validate_mixture(SignedMixture(comps, (0.5, 0.4), strict=False))
    assert not report["weight_sum"].passed
    assert not report.passed


def test_negative_density_is_detected():
    m = SignedMixture((B.exponential(1.0), B.exponential(2.0)), (-1.0, 2.0))
    report = validate_mixture(m)
    assert report["weight_sum"].passed
    assert not report["nonnegativity"].passed
    assert report["nonnegativity"].worst_value < 0


def test_valid_mixture_passes_all_checks(hypo12):
    report = validate_mixture(hypo12)
    assert report.passed
    assert report["normalization"].worst_value == pytest.approx(1.0, abs=1e-10)


def test_mismatched_supports_rejected():
    with pytest.raises(ConstructionError):
        SignedMixture((B.pareto(1.0, 2.0), B.pareto(2.0, 3.0)), (2.0, -1.0))


def test_hazard_raises_where_reliability_vanishes():
    m = SignedMixture((B.power(1.0, 2.0), B.power(1.0, 3.0)), (3.0, -2.0))
    with pytest.raises(DomainError):
        m.hazard(1.0)


def test_quantile_inverts_cdf(hypo12):
    u = np.array([1e-6, 0.1, 0.5, 0.9, 1 - 1e-9])
    np.testing.assert_allclose(hypo12.cdf(hypo12.quantile(u)), u, rtol=1e-12, atol=1e-15)
    assert hypo12.quantile(0.25) == pytest.approx(math.log(2), rel=1e-13)


def test_compensated_sum_beats_naive():
    terms = np.array([1e16, 1.0, -1e16, 1.0])
    assert compensated_sum(terms) == 2.0


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=12))
def test_compensated_sum_matches_fsum(xs):
    assert compensated_sum(np.array(xs)) == pytest.approx(math.fsum(xs), abs=1e-9)


@given(
    r1=st.floats(0.1, 10.0),
    ratio=st.floats(1.05, 20.0),
    t=st.floats(0.0, 30.0),
)
def test_cdf_plus_sf_is_one(r1, ratio, t):
    r2 = r1 * ratio
    w1 = 1.0 / (1.0 - r1 / r2)
    m = SignedMixture((B.exponential(r1), B.exponential(r2)), (w1, 1.0 - w1))
    assert abs(m.cdf(t) + m.sf(t) - 1.0) <= 1e-12 * m.weight_scale
