import math

import numpy as np
import pytest

from sublap.errors import ValidationError
from sublap.measures import RadonMeasure, dirac, lebesgue, power_measure
from sublap.params import envelope_constant
from sublap.trace import HatFunction, rayleigh_lower, trace_bracket
from sublap.weights import constant_weight

W1 = constant_weight()
D0 = dirac(0.0)


def test_bracket_collapses_at_q_zero_dirac():
    # both display constants equal 1 at q = 0, so lower = upper = E^(1/2)
    # with E = u(0) = 1/2; the true constant (Green extremal) is sqrt(1/2)
    tb = trace_bracket(2.0, W1, D0, 0.0)
    exact = math.sqrt(0.5)
    assert tb.lower == pytest.approx(exact, abs=1e-9)
    assert tb.upper == pytest.approx(exact, abs=1e-9)
    assert tb.energy_value == pytest.approx(0.5, rel=1e-12)


def test_bracket_zero_measure():
    tb = trace_bracket(2.0, W1, RadonMeasure(), 0.5)
    assert tb.lower == tb.upper == 0.0


def test_bracket_ratio_closed_form():
    # upper/lower = [(1+q)^((1+q)/(p-1-q)) c_V^(1+q)]^(-(p-1-q)/((1+q)p))
    p, q = 2.0, 0.5
    tb = trace_bracket(p, W1, lebesgue(), q)
    c_v = envelope_constant(p, q)
    theta = (1 + q) * p / (p - 1 - q)
    expected = ((1 + q) ** ((1 + q) / (p - 1 - q)) * c_v ** (1 + q)) ** (-1.0 / theta)
    assert tb.upper / tb.lower == pytest.approx(expected, rel=1e-12)
    assert tb.lower <= tb.upper


def test_bracket_rejects_divergent_energy():
    with pytest.raises(ValidationError):
        trace_bracket(2.0, W1, power_measure(1.9), 0.5)


def test_bracket_scaling_exponent():
    # C_T(a sigma) = a^(1/(1+q)) C_T(sigma): both bracket ends carry it
    p, q, a = 2.0, 0.5, 3.0
    t1 = trace_bracket(p, W1, lebesgue(0.4), q)
    t2 = trace_bracket(p, W1, lebesgue(0.4).scale(a), q)
    assert t2.upper / t1.upper == pytest.approx(a ** (1.0 / (1.0 + q)), rel=1e-9)
    assert t2.lower / t1.lower == pytest.approx(a ** (1.0 / (1.0 + q)), rel=1e-9)


def test_rayleigh_hat_achieves_dirac_constant():
    # the optimally scaled hat at the atom attains C_T = sqrt(1/2) for q = 0
    rep = rayleigh_lower(2.0, W1, D0, 0.0)
    assert rep["value"] == pytest.approx(math.sqrt(0.5), rel=1e-6)


def test_rayleigh_inside_bracket_q_half():
    tb = trace_bracket(2.0, W1, D0, 0.5)
    rep = rayleigh_lower(2.0, W1, D0, 0.5)
    assert rep["value"] <= tb.upper * (1.0 + 1e-6)
    assert tb.lower <= tb.upper * (1.0 + 1e-9)


def test_rayleigh_potential_power_member_for_density():
    tb = trace_bracket(2.0, W1, lebesgue(), 0.5)
    rep = rayleigh_lower(2.0, W1, lebesgue(), 0.5)
    assert 0.0 < rep["value"] <= tb.upper * (1.0 + 1e-6)


def test_rayleigh_rejects_all_zero_family():
    zero = (lambda x: np.zeros_like(np.asarray(x, dtype=float)),
            lambda x: np.zeros_like(np.asarray(x, dtype=float)))
    with pytest.raises(ValidationError):
        rayleigh_lower(2.0, W1, lebesgue(), 0.5, family=(zero,), levels=())


def test_rayleigh_user_member():
    # f = 1 - x^2 with f' = -2x: the quotient is computable and valid
    member = (lambda x: 1.0 - np.asarray(x) ** 2, lambda x: -2.0 * np.asarray(x))
    tb = trace_bracket(2.0, W1, lebesgue(), 0.0)
    rep = rayleigh_lower(2.0, W1, lebesgue(), 0.0, family=(member,))
    assert rep["value"] <= tb.upper * (1.0 + 1e-6)


def test_hat_function_norms():
    hat = HatFunction(0.0, 1.0)
    assert hat(np.asarray([0.0]))[0] == 1.0
    assert hat(np.asarray([1.0]))[0] == 0.0
    # |hat'|_2 = sqrt(2) on the unit-halfwidth hat with w = 1
    assert hat.grad_norm_p(2.0, W1) == pytest.approx(math.sqrt(2.0), rel=1e-12)


def test_trace_bracket_rejects_bad_q():
    with pytest.raises(ValidationError):
        trace_bracket(2.0, W1, D0, -1.0)
    with pytest.raises(ValidationError):
        trace_bracket(2.0, W1, D0, 1.0)
