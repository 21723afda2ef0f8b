import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crit_cycle.errors import DomainError
from crit_cycle.protocols import (ProtocolSpec, accumulated_phase, breakpoints, classify_phase,
                                  eval_g, eval_rate, gap, local_expansion_exponent, power_law,
                                  predicted_arg_b, trigonometric)

exponents = st.floats(0.2, 8.0)
taus = st.floats(0.5, 50.0)


def test_power_law_values():
    for r in (0.5, 1, 2, 4):
        sp = power_law(r, 3.0)
        assert eval_g(sp, 0.0) == 0.0
        assert eval_g(sp, 3.0) == pytest.approx(1.0, abs=1e-15)
        assert eval_g(sp, 6.0) == pytest.approx(0.0, abs=1e-15)
    assert eval_g(power_law(1.0, 1.0), 0.5) == pytest.approx(0.5)


def test_trigonometric_peak():
    sp = trigonometric(3.0, 2.0)
    assert eval_g(sp, 2.0) == pytest.approx(1.0)
    assert eval_g(sp, 0.0) == 0.0
    assert eval_g(sp, 4.0) == pytest.approx(0.0, abs=1e-15)


def test_periodicity_and_vectorized():
    sp = power_law(2.0, 1.5, cycles=3)
    t = np.linspace(0, 3.0, 41)
    g = eval_g(sp, t)
    for m in (1, 2):
        np.testing.assert_allclose(eval_g(sp, t + 3.0 * m), g, atol=1e-14)
    # right end of the last cycle is allowed
    assert eval_g(sp, sp.duration) == pytest.approx(0.0, abs=1e-14)


def test_domain_errors():
    sp = power_law(2.0, 1.0)
    with pytest.raises(DomainError):
        eval_g(sp, -0.1)
    with pytest.raises(DomainError):
        eval_g(sp, 2.5)
    with pytest.raises(DomainError):
        ProtocolSpec("power_law", 2.0, 1.0, cycles=0)
    with pytest.raises(DomainError):
        ProtocolSpec("power_law", -1.0, 1.0)
    with pytest.raises(DomainError):
        ProtocolSpec("cubic", 1.0, 1.0)
    with pytest.raises(DomainError):
        ProtocolSpec("power_law", 1.0, 1.0, g_c=1.5)


def test_rate():
    sp = power_law(1.0, 4.0)
    for t in (0.3, 1.0, 3.9):
        assert eval_rate(sp, t) == pytest.approx(0.25)
    assert eval_rate(power_law(2.0, 4.0), 4.0) == 0.0
    assert math.isinf(eval_rate(power_law(0.5, 4.0), 4.0))


def test_rate_matches_finite_difference():
    for sp in (power_law(2.5, 3.0), trigonometric(0.7, 3.0), trigonometric(3.0, 3.0)):
        for t in (0.4, 1.7, 3.6, 5.2):
            h = 1e-6
            fd = abs(eval_g(sp, t + h) - eval_g(sp, t - h)) / (2 * h)
            assert eval_rate(sp, t) == pytest.approx(fd, rel=1e-6)


def test_breakpoints():
    np.testing.assert_allclose(breakpoints(power_law(1, 2.0, cycles=2)), [0, 2, 4, 6, 8])


def test_local_expansion_exponent():
    assert local_expansion_exponent(power_law(4.0, 1.0)) == 4.0
    assert local_expansion_exponent(trigonometric(0.5, 1.0)) == 2.0
    assert local_expansion_exponent(trigonometric(3.0, 1.0)) == 2.0


@pytest.mark.parametrize("p", [0.5, 1.0, 3.0])
def test_trigonometric_is_quadratic_near_peak(p):
    sp = trigonometric(p, 1.0)
    u = np.logspace(-4, -2.5, 8)
    slope = np.polyfit(np.log(u), np.log(1.0 - eval_g(sp, 1.0 - u)), 1)[0]
    assert slope == pytest.approx(2.0, abs=1e-3)


def test_accumulated_phase_closed_forms():
    assert accumulated_phase(power_law(1.0, 10.0)) == pytest.approx(math.pi * 10 / 2, rel=1e-10)
    r2 = 2 * (2 * math.sqrt(2) - 1) * 7.0 / 3
    assert accumulated_phase(power_law(2.0, 7.0)) == pytest.approx(r2, rel=1e-10)


def test_predicted_arg_b_examples():
    p10 = predicted_arg_b(power_law(1.0, 10.0))
    assert p10.theta == pytest.approx(math.pi / 2, abs=1e-9)
    assert p10.interference == "constructive"
    p11 = predicted_arg_b(power_law(1.0, 11.0))
    assert min(p11.theta, 2 * math.pi - p11.theta) < 1e-9
    assert p11.interference == "destructive"
    p12 = predicted_arg_b(power_law(1.0, 12.0))
    assert p12.theta == pytest.approx(3 * math.pi / 2, abs=1e-9)
    assert p12.interference == "constructive"


def test_classify_phase_tolerance():
    assert classify_phase(math.pi / 2 + 0.05) == "constructive"
    assert classify_phase(math.pi / 2 + 0.2) == "intermediate"
    assert classify_phase(math.pi / 2 + 0.2, tolerance=0.3) == "constructive"
    assert classify_phase(2 * math.pi - 0.01) == "destructive"


def test_gap():
    assert gap(0.0) == 1.0
    assert gap(1.0) == 0.0
    assert gap(0.6, omega=2.0) == pytest.approx(1.6)


@settings(max_examples=40, deadline=None)
@given(exponents, taus, st.floats(0.0, 1.0))
def test_symmetry_and_bounds(r, tau, x):
    for sp in (power_law(r, tau), trigonometric(r, tau)):
        u = x * tau
        a, b = eval_g(sp, tau - u), eval_g(sp, tau + u)
        assert a == pytest.approx(b, abs=1e-12)
        assert -1e-15 <= a <= 1.0 + 1e-15


@settings(max_examples=25, deadline=None)
@given(exponents, taus)
def test_phase_linear_in_tau(r, tau):
    a = accumulated_phase(power_law(r, tau))
    b = accumulated_phase(power_law(r, 2 * tau))
    assert b == pytest.approx(2 * a, rel=1e-9)
