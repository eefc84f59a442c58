import math

import numpy as np
import pytest

from sublap.errors import QuadratureError, ValidationError
from sublap.measures import (
    CallableFactor,
    CumulativeMass,
    CustomDensity,
    RadonMeasure,
    TabulatedDensity,
    add,
    ball_mass,
    cdf,
    dirac,
    lebesgue,
    manufactured_measure,
    power_measure,
    scale,
    truncate,
    weighted_pushforward,
)

# -- cdf -------------------------------------------------------------------

def test_cdf_single_atom():
    mu = dirac(0.0)
    assert cdf(mu, -0.5) == 0.0
    assert cdf(mu, 0.0) == 1.0  # right-continuous: the atom counts at its location
    assert cdf(mu, 0.5) == 1.0


def test_cdf_lebesgue():
    assert cdf(lebesgue(), 0.0) == pytest.approx(1.0, rel=1e-14)


def test_cdf_power_density_hand_integrated():
    # density (1-|x|)^(-1.5): non-integrable at both endpoints, so the
    # full CDF from -1 is +inf, while the anchored mass of (0, 0.9] has the
    # hand-integrated closed form  int_0^0.9 (1-t)^(-1.5) dt
    #   = [2 (1-t)^(-1/2)]_0^0.9 = 2 (0.1^(-1/2) - 1).
    mu = power_measure(1.5)
    oracle = 2.0 * (0.1 ** -0.5 - 1.0)
    assert mu.cum_center(0.9) == pytest.approx(oracle, rel=1e-12)
    assert cdf(mu, 0.9) == math.inf


def test_cdf_matches_quadrature_for_custom_density():
    # same power density without its closed form goes through quadrature
    closed = power_measure(0.5, 0.7)
    quad = RadonMeasure(density=CustomDensity(
        func=lambda x: 0.7 * (1.0 - np.abs(x)) ** -0.5,
        sing_left=0.5, sing_right=0.5))
    for x in (-0.7, -0.2, 0.4, 0.95):
        assert quad.cdf(x) == pytest.approx(closed.cdf(x), rel=1e-9)


def test_cdf_rejects_out_of_domain():
    with pytest.raises(ValidationError):
        cdf(dirac(0.0), 1.0)


def test_cdf_signals_quadrature_failure():
    # an undeclared interior near-singularity defeats the double-rule check
    nasty = RadonMeasure(density=CustomDensity(
        func=lambda x: np.abs(x - 0.3123) ** -0.97,
        sing_left=0.0, sing_right=0.0))
    with pytest.raises(QuadratureError):
        nasty.cdf(0.9)


def test_cumulative_mass_wrapper():
    M = CumulativeMass(dirac(0.25, 2.0))
    assert M.right_continuous
    assert M(0.25) == 2.0
    assert M(0.2) == 0.0


# -- truncate ----------------------------------------------------------------

def test_truncate_keeps_interior_atom():
    mu = dirac(0.0)
    for k in (1, 3, 10):
        nu = truncate(mu, k)
        assert nu.atoms == mu.atoms
        assert nu.total_mass() == 1.0


def test_truncate_makes_power_density_finite():
    mu = power_measure(1.5)
    assert mu.total_mass() == math.inf
    for k in (1, 2, 5, 20):
        assert math.isfinite(truncate(mu, k).total_mass())


def test_truncate_lebesgue_level_one():
    nu = truncate(lebesgue(), 1)  # restriction to [-0.5, 0.5]
    assert nu.total_mass() == pytest.approx(1.0, rel=1e-14)


def test_truncate_rejects_bad_level():
    with pytest.raises(ValidationError):
        truncate(dirac(0.0), 0)


def test_truncations_increase_setwise():
    rng = np.random.default_rng(7)
    mu = power_measure(0.8, 0.9).add(dirac(0.3, 0.5))
    for x in rng.uniform(-0.95, 0.95, size=8):
        vals = [truncate(mu, k).cdf(float(x)) for k in (1, 2, 4, 8, 16)]
        vals.append(mu.cdf(float(x)))
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


# -- ball_mass ---------------------------------------------------------------

def test_ball_mass_atom_cases():
    mu = dirac(0.0)
    assert ball_mass(mu, 0.0, 0.1) == 1.0
    assert ball_mass(mu, 0.5, 0.1) == 0.0


def test_ball_mass_lebesgue():
    assert ball_mass(lebesgue(), 0.0, 0.25) == pytest.approx(0.5, rel=1e-14)


def test_ball_mass_open_ball_excludes_boundary_atom():
    mu = dirac(0.5)
    # the open ball B(0.3, 0.2) = (0.1, 0.5) does not contain the atom at 0.5
    assert ball_mass(mu, 0.3, 0.2) == 0.0
    assert ball_mass(mu, 0.31, 0.2) == 1.0


def test_ball_masses_vectorized_matches_scalar():
    mu = power_measure(0.5, 0.8).add(dirac(-0.2, 0.6))
    rs = np.asarray([0.05, 0.3, 0.9, 1.7])
    vec = mu.ball_masses(0.1, rs)
    for r, v in zip(rs, vec):
        assert v == pytest.approx(ball_mass(mu, 0.1, float(r)), rel=1e-12)


# -- scale / add --------------------------------------------------------------

def test_scale_atom():
    assert scale(dirac(0.0), 2.0).atoms == ((0.0, 2.0),)


def test_add_atom_and_density():
    mu = add(dirac(0.0), lebesgue())
    assert len(mu.atoms) == 1
    assert mu.total_mass() == pytest.approx(3.0, rel=1e-14)


def test_scale_to_zero_measure():
    assert scale(dirac(0.0), 0.0).is_zero


def test_cdf_linearity_under_scale_and_add():
    rng = np.random.default_rng(11)
    mu = power_measure(0.4, 0.5).add(dirac(0.1, 0.9))
    nu = lebesgue(0.3).add(dirac(-0.4, 0.2))
    for x in rng.uniform(-0.9, 0.9, size=6):
        lhs = add(scale(mu, 2.0), scale(nu, 3.0)).cdf(float(x))
        rhs = 2.0 * mu.cdf(float(x)) + 3.0 * nu.cdf(float(x))
        assert lhs == pytest.approx(rhs, rel=1e-11)


def test_cdf_monotone_random_pairs():
    rng = np.random.default_rng(13)
    mu = manufactured_measure(3.0, 0.5).add(dirac(0.6, 0.1))
    xs = np.sort(rng.uniform(-0.99, 0.99, size=10))
    vals = [mu.cdf(float(x)) for x in xs]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


# -- pushforward ---------------------------------------------------------------

def test_pushforward_scales_atom_by_factor_value():
    g = CallableFactor(lambda x: np.full_like(np.asarray(x, dtype=float), 3.0))
    nu = weighted_pushforward(dirac(0.0), g)
    assert nu.atoms == ((0.0, 3.0),)


def test_pushforward_density_hand_integrated():
    # g = u^q with u = (1 - x^2)/2, q = 1 against Lebesgue: the pushforward
    # density is (1 - x^2)/2 and its total mass is the hand integral
    # int_{-1}^{1} (1 - x^2)/2 dx = 2/3.
    g = CallableFactor(lambda x: (1.0 - np.asarray(x) ** 2) / 2.0,
                       exp_left=1.0, exp_right=1.0)
    nu = weighted_pushforward(lebesgue(), g)
    assert nu.total_mass() == pytest.approx(2.0 / 3.0, rel=1e-10)


def test_pushforward_zero_factor_gives_zero_mass():
    g = CallableFactor(lambda x: np.zeros_like(np.asarray(x, dtype=float)))
    nu = weighted_pushforward(lebesgue(), g)
    assert nu.total_mass() == pytest.approx(0.0, abs=1e-15)


def test_pushforward_rejects_factor_blowing_up_at_atom():
    def blow_up(x):
        with np.errstate(divide="ignore"):
            return 1.0 / np.abs(np.asarray(x, dtype=float))

    g = CallableFactor(blow_up)
    with pytest.raises(ValidationError):
        weighted_pushforward(dirac(0.0), g)


# -- construction validation -----------------------------------------------------

def test_atom_validation():
    with pytest.raises(ValidationError):
        RadonMeasure(atoms=((1.0, 1.0),))  # on the boundary
    with pytest.raises(ValidationError):
        RadonMeasure(atoms=((0.0, -1.0),))
    # duplicate locations merge
    mu = RadonMeasure(atoms=((0.2, 1.0), (0.2, 0.5)))
    assert mu.atoms == ((0.2, 1.5),)


def test_tabulated_density_closed_cumulative():
    # trapezoid of a piecewise-linear density is exact
    dens = TabulatedDensity(xs=(-0.5, 0.0, 0.5), vals=(0.0, 2.0, 0.0))
    mu = RadonMeasure(density=dens)
    assert mu.total_mass() == pytest.approx(1.0, rel=1e-14)
    assert mu.cdf(0.0) == pytest.approx(0.5, rel=1e-14)
