"""Problem exponents and the explicit sharp constants.

All admissibility windows are validated here so the numerical modules can
assume their inputs are in range.  The sub-natural growth window is
0 <= q < p - 1 with 1 < p < infinity; the exponent ``gamma`` is either a
positive real or ``math.inf``, and the infinite state is rejected explicitly
by every operation that needs a finite value (it is not treated as a large
number).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ValidationError

INF = math.inf


@dataclass(frozen=True)
class ProblemParams:
    """Exponent triple (p, q, gamma) of the sublinear problem."""

    p: float
    q: float = 0.0
    gamma: float = 1.0

    def __post_init__(self):
        if not (1.0 < self.p < INF):
            raise ValidationError(f"params.ProblemParams: need 1 < p < inf, got p={self.p}")
        if not (0.0 <= self.q < self.p - 1.0):
            raise ValidationError(
                f"params.ProblemParams: need 0 <= q < p - 1, got q={self.q}, p={self.p}"
            )
        if not (self.gamma > 0.0):
            raise ValidationError(f"params.ProblemParams: need gamma > 0, got {self.gamma}")

    @property
    def gamma_is_infinite(self) -> bool:
        return math.isinf(self.gamma)


@dataclass(frozen=True)
class SharpConstants:
    """The two explicit constants of the equivalence chain.

    c_E = ((p - 1 + gamma)/p)^p / gamma   (equals 1 at gamma = 1)
    c_V = ((p - 1 - q)/(p - 1))^((p - 1)/(p - 1 - q)),  in (0, 1]
    """

    c_E: float
    c_V: float

    def __post_init__(self):
        if not (self.c_E > 0.0):
            raise ValidationError(f"params.SharpConstants: c_E must be positive, got {self.c_E}")
        if not (0.0 < self.c_V <= 1.0):
            raise ValidationError(f"params.SharpConstants: c_V must lie in (0, 1], got {self.c_V}")


def energy_constant(p: float, gamma: float) -> float:
    """c_E as a bare function of (p, gamma); gamma must be finite."""
    if math.isinf(gamma):
        raise ValidationError("params.energy_constant: c_E is undefined at gamma = inf")
    return ((p - 1.0 + gamma) / p) ** p / gamma


def envelope_constant(p: float, q: float) -> float:
    """c_V as a bare function of (p, q).

    Valid for the extended window -1 < q < p - 1 used by the trace bracket;
    the value exceeds 1 for q < 0, which is why the SharpConstants container
    (whose invariant is c_V <= 1) only accepts the q >= 0 window.
    """
    return ((p - 1.0 - q) / (p - 1.0)) ** ((p - 1.0) / (p - 1.0 - q))


def constants(params: ProblemParams) -> SharpConstants:
    """Evaluate the two closed-form constants for a finite-gamma problem."""
    if params.gamma_is_infinite:
        raise ValidationError("params.constants: gamma = inf has no finite c_E; use the sup-norm criterion")
    return SharpConstants(
        c_E=energy_constant(params.p, params.gamma),
        c_V=envelope_constant(params.p, params.q),
    )


def lorentz_exponents(n: int, params: ProblemParams) -> tuple[float, float, float, float]:
    """Lorentz-scale exponents (s, t, r, rho) for L^{s,t} coefficient data in dimension n.

    Requires 1 < p < n.  gamma may be infinite here only if the caller wants
    the limiting exponents; the closed forms below need a finite gamma, so
    inf is rejected for uniformity with ``constants``.
    """
    p, q, gamma = params.p, params.q, params.gamma
    if math.isinf(gamma):
        raise ValidationError("params.lorentz_exponents: gamma = inf not supported")
    if not (isinstance(n, int) and n >= 2):
        raise ValidationError(f"params.lorentz_exponents: n must be an integer >= 2, got {n!r}")
    if not (p < n):
        raise ValidationError(f"params.lorentz_exponents: need p < n, got p={p}, n={n}")
    s = n * (p - 1.0 + gamma) / (n * (p - 1.0 - q) + p * (gamma + q))
    t = (p - 1.0 + gamma) / (p - 1.0 - q)
    r = n * (p - 1.0 + gamma) / (n - p)
    rho = p - 1.0 + gamma
    return s, t, r, rho


def hardy_threshold(p: float, q: float, beta: float) -> float:
    """Critical coefficient-singularity exponent alpha* for finite-energy solvability.

    alpha* = 1 + (1 + q)(1 - 1/p)(1 - beta/(p - 1)); for the power weight
    (1 - |x|)^beta and coefficient (1 - |x|)^{-alpha}, finite-energy solutions
    exist exactly for alpha < alpha*.
    """
    if not (1.0 < p < INF):
        raise ValidationError(f"params.hardy_threshold: need 1 < p < inf, got {p}")
    if not (0.0 <= q < p - 1.0):
        raise ValidationError(f"params.hardy_threshold: need 0 <= q < p - 1, got q={q}")
    if not (-1.0 < beta < p - 1.0):
        raise ValidationError(
            f"params.hardy_threshold: beta must lie in (-1, p - 1) = (-1, {p - 1}), got {beta}"
        )
    return 1.0 + (1.0 + q) * (1.0 - 1.0 / p) * (1.0 - beta / (p - 1.0))
