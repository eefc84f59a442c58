"""Positive weights on (-1, 1): evaluation, ball integrals, flux-inversion admissibility.

The verified family is the power weight (1 - |x|)^beta with beta in the window
(-1, p - 1); constant weights are a special case.  Custom weights must declare
their endpoint behavior (w ~ C * dist^b near each endpoint) because the
quadrature grading and the conjugate-integrability test rely on the exponents,
not on numerical probing.  p-admissibility (doubling/Poincare) of custom
weights is the caller's responsibility.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import QuadratureError, ValidationError
from .quadrature import Points, integrate_graded, points_from_x


@dataclass(frozen=True)
class Weight:
    """Weight on (-1, 1).

    family: "constant" | "power" | "custom"
    beta:   exponent for the power family (w = (1 - |x|)^beta)
    value:  constant value for the constant family
    func:   vectorized evaluator for the custom family
    edge_exponent_left/right: declared b with w ~ C * dist^b at the endpoint
    """

    family: str = "constant"
    beta: float = 0.0
    value: float = 1.0
    func: Callable[[np.ndarray], np.ndarray] | None = None
    edge_exponent_left: float = 0.0
    edge_exponent_right: float = 0.0

    def __post_init__(self):
        if self.family not in ("constant", "power", "custom"):
            raise ValidationError(f"weights.Weight: unknown family {self.family!r}")
        if self.family == "constant" and not (self.value > 0.0):
            raise ValidationError("weights.Weight: constant weight must be positive")
        if self.family == "custom" and self.func is None:
            raise ValidationError("weights.Weight: custom family needs an evaluator")

    # -- evaluation -----------------------------------------------------

    def values(self, pts: Points) -> np.ndarray:
        if self.family == "constant":
            return np.full(len(pts), self.value)
        if self.family == "power":
            if self.beta == 0.0:
                return np.ones(len(pts))
            return pts.y ** self.beta
        vals = np.asarray(self.func(pts.x), dtype=float)
        # positivity is required on the open interval only; a custom weight
        # may vanish at the endpoints themselves (like the power family)
        if np.any(vals[pts.y > 1e-15] <= 0.0):
            raise ValidationError("weights.Weight: custom weight evaluated non-positive")
        return vals

    def __call__(self, x) -> np.ndarray:
        return self.values(points_from_x(np.atleast_1d(np.asarray(x, dtype=float))))

    def edge_exponent(self, side: int) -> float:
        if self.family == "constant":
            return 0.0
        if self.family == "power":
            return self.beta
        return self.edge_exponent_left if side < 0 else self.edge_exponent_right

    # -- admissibility ---------------------------------------------------

    def validate_window(self, p: float) -> None:
        """Power-family admissibility window beta in (-1, p - 1)."""
        if self.family == "power" and not (-1.0 < self.beta < p - 1.0):
            raise ValidationError(
                f"weights.Weight: beta={self.beta} outside (-1, {p - 1.0}) for p={p}"
            )

    def conjugate_integrable(self, p: float) -> bool:
        """True iff the flux inversion integrand w^(-1/(p-1)) is integrable.

        Closed condition b/(p - 1) < 1 at each endpoint, with b the (declared)
        endpoint exponent of w.
        """
        if p <= 1.0:
            raise ValidationError(f"weights.conjugate_integrable: need p > 1, got {p}")
        if self.family == "constant":
            return True
        for side in (-1, 1):
            if self.edge_exponent(side) / (p - 1.0) >= 1.0:
                return False
        return True

    def conjugate_singularity(self, p: float, side: int) -> float:
        """Exponent s with w^(-1/(p-1)) ~ dist^(-s) at the given endpoint (s=0 if regular)."""
        return max(0.0, self.edge_exponent(side) / (p - 1.0))

    # -- ball integrals ---------------------------------------------------

    def _cum_power(self, x: np.ndarray) -> np.ndarray:
        """Antiderivative of (1 - |t|)^beta from 0, evaluated at x."""
        b1 = self.beta + 1.0
        ax = np.abs(x)
        mag = (1.0 - (1.0 - ax) ** b1) / b1
        return np.sign(x) * mag

    def ball_weight(self, x: float, r: float, rel_tol: float = 1e-10) -> float:
        """w(B(x, r) cap (-1, 1))."""
        if not (r > 0.0):
            raise ValidationError("weights.ball_weight: need r > 0")
        a = max(x - r, -1.0)
        b = min(x + r, 1.0)
        if b <= a:
            return 0.0
        if self.family == "constant":
            return self.value * (b - a)
        if self.family == "power":
            ca, cb = self._cum_power(np.asarray([a, b]))
            return float(cb - ca)
        # the integrand behaves like dist^b at the endpoints, i.e. exponent -b
        # in the ladder's dist^(-s) convention; vanishing fractional powers
        # (b > 0) need the grading as much as genuine singularities
        val = integrate_graded(
            lambda pts: self.values(pts), a, b,
            sing_a=-self.edge_exponent_left,
            sing_b=-self.edge_exponent_right,
            breakpoints=(0.0,),
        )
        check = integrate_graded(
            lambda pts: self.values(pts), a, b,
            sing_a=-self.edge_exponent_left,
            sing_b=-self.edge_exponent_right,
            n_gauss=24,
            breakpoints=(0.0,),
        )
        if abs(val - check) > rel_tol * max(abs(check), 1e-300):
            raise QuadratureError(
                f"weights.ball_weight: quadrature disagreement {abs(val - check):.3e}"
            )
        return check


def constant_weight(value: float = 1.0) -> Weight:
    return Weight(family="constant", value=value)


def power_weight(beta: float) -> Weight:
    return Weight(family="power", beta=beta,
                  edge_exponent_left=beta, edge_exponent_right=beta)
