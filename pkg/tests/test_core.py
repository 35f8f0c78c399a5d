import math

import numpy as np
import pytest

from qtoa import (
    HBAR_SI,
    DomainError,
    FreeFallParams,
    Regime,
    classical_time,
    classify_regime,
    sigma_dot_of_t,
    sigma_of_t,
)
from conftest import params_from_dimensionless


def test_hbar_si_value():
    assert HBAR_SI == pytest.approx(1.05457181764615639e-34, rel=1e-15)


def test_params_validation():
    with pytest.raises(DomainError):
        FreeFallParams(m=0.0, g=9.8, sigma=1e-5)
    with pytest.raises(DomainError):
        FreeFallParams(m=1.0, g=-9.8, sigma=1e-5)
    with pytest.raises(DomainError):
        FreeFallParams(m=1.0, g=9.8, sigma=0.0)
    with pytest.raises(DomainError):
        FreeFallParams(m=1.0, g=9.8, sigma=1e-5, hbar=math.nan)


def test_tau_and_gravitational_length():
    p = FreeFallParams(m=1.0, g=200.0, sigma=3.0, hbar=1.0)
    assert p.tau == pytest.approx(18.0, rel=1e-15)
    hydrogen = FreeFallParams(m=1.67e-27, g=9.8, sigma=1e-5)
    assert hydrogen.tau == pytest.approx(3.16716220186407457e-3, rel=1e-14)
    # definition check: x0^3 * 2 m^2 g = hbar^2
    x0 = hydrogen.x0_grav
    assert x0**3 * 2.0 * hydrogen.m**2 * hydrogen.g == pytest.approx(
        hydrogen.hbar**2, rel=1e-12
    )


def test_classical_time_hydrogen():
    p = FreeFallParams(m=1.67e-27, g=9.8, sigma=1e-5)
    assert classical_time(1e-5, p) == pytest.approx(1.42857142857142857e-3, rel=1e-15)
    with pytest.raises(DomainError):
        classical_time(-1.0, p)


def test_sigma_of_t_against_closed_form():
    p = FreeFallParams(m=1.0, g=200.0, sigma=3.0, hbar=1.0)
    assert sigma_of_t(9.0, p) == pytest.approx(3.35410196624968454, rel=1e-15)
    assert sigma_of_t(0.0, p) == 3.0
    with pytest.raises(DomainError):
        sigma_of_t(-0.1, p)


def test_sigma_dot_matches_derivative():
    p = FreeFallParams(m=1.0, g=200.0, sigma=3.0, hbar=1.0)
    for t in (0.0, 0.3, 9.0, 100.0):
        h = 1e-6 * max(t, 1.0)
        fd = (sigma_of_t(t + h, p) - sigma_of_t(max(t - h, 0.0), p)) / (
            h if t == 0.0 else 2 * h
        )
        assert sigma_dot_of_t(t, p) == pytest.approx(fd, abs=1e-7)


def test_sigma_of_t_vectorizes():
    p = FreeFallParams(m=1.0, g=200.0, sigma=3.0, hbar=1.0)
    t = np.array([0.0, 18.0, 36.0])
    out = sigma_of_t(t, p)
    assert out.shape == (3,)
    assert out[1] == pytest.approx(3.0 * math.sqrt(2.0), rel=1e-15)
    assert isinstance(sigma_of_t(1.0, p), float)


@pytest.mark.parametrize(
    "q,sigma_over_x,expected",
    [
        (0.01, 10.0, Regime.NEAR_FIELD),
        (0.05, 1e-4, Regime.FAR_FIELD_SEMICLASSICAL),
        (15.0, 0.1, Regime.FAR_FIELD_QUANTUM),
        (1.0, 1.0, Regime.INTERMEDIATE),
    ],
)
def test_classify_regime(q, sigma_over_x, expected):
    p = params_from_dimensionless(q, sigma_over_x)
    report = classify_regime(1.0, p)
    assert report.regime is expected
    assert report.q == pytest.approx(q, rel=1e-12)
    assert report.t_c == pytest.approx(1.0, rel=1e-15)
    assert report.beta == pytest.approx(sigma_over_x / q, rel=1e-12)


def test_regime_tags_are_stable():
    assert Regime.NEAR_FIELD.value == "NearField"
    assert Regime.FAR_FIELD_SEMICLASSICAL.value == "FarFieldSemiClassical"
    assert Regime.FAR_FIELD_QUANTUM.value == "FarFieldQuantum"
    assert Regime.INTERMEDIATE.value == "Intermediate"
