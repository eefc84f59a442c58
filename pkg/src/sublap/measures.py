"""Nonnegative Radon measures on (-1, 1): atoms plus densities.

Densities carry *declared* endpoint singularity exponents (density ~
C * dist^(-a) near an endpoint) instead of probing them numerically: the
quadrature grading and all finiteness decisions need them a priori.  Measures
with non-integrable endpoint densities are first-class citizens; their total
mass is reported as +inf and solvers reach them through the truncation ladder
``truncate(mu, k)`` which restricts to [-1 + 2^-k, 1 - 2^-k].

All cumulative bookkeeping is anchored at the center: S(x) = mu((0, x]) for
x >= 0 and -mu((x, 0]) for x < 0 (right-continuous in x).  The anchored form
avoids catastrophic cancellation for deeply truncated measures whose one-sided
masses dwarf interior fluxes.  The classical CDF M(x) = mu([-1, x]) is exposed
on top of it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import QuadratureError, ValidationError
from .quadrature import Points, integrate_graded, points_from_edge, points_from_x

INF = math.inf


# ---------------------------------------------------------------------------
# density models
# ---------------------------------------------------------------------------

class Density:
    """Common interface; subclasses override what they can do in closed form."""

    def values(self, pts: Points) -> np.ndarray:
        raise NotImplementedError

    def sing(self, side: int) -> float:
        """Declared exponent a with density ~ C * dist^(-a) at the endpoint."""
        return 0.0

    def cum0_many(self, pts: Points) -> np.ndarray | None:
        """Closed-form signed integral from 0 to each point, or None."""
        return None

    def side_mass(self, side: int) -> float:
        """Mass of the density on (0, 1) or (-1, 0); may be +inf."""
        if self.sing(side) >= 1.0:
            return INF
        if side > 0:
            return integrate_graded(self.values, 0.0, 1.0, sing_b=self.sing(1),
                                    breakpoints=self.interior_breaks())
        return integrate_graded(self.values, -1.0, 0.0, sing_a=self.sing(-1),
                                breakpoints=self.interior_breaks())

    def scaled(self, a: float) -> "Density":
        if a == 0.0:
            return ZeroDensity()
        return _ScaledDensity(self, a)

    def breakpoints_y(self, side: int) -> tuple[float, ...]:
        """Distances from the endpoint at which the density changes regime."""
        return ()

    def interior_breaks(self) -> tuple[float, ...]:
        return ()

    @property
    def is_zero(self) -> bool:
        return False

    @property
    def y_resolved(self) -> bool:
        """True when the evaluator resolves endpoint distances exactly
        (family forms in the y coordinate); x-based evaluators lose the
        distance below float spacing and must not be sampled there."""
        return True


class ZeroDensity(Density):
    def values(self, pts: Points) -> np.ndarray:
        return np.zeros(len(pts))

    def cum0_many(self, pts: Points) -> np.ndarray:
        return np.zeros(len(pts))

    def side_mass(self, side: int) -> float:
        return 0.0

    def scaled(self, a: float) -> Density:
        return self

    @property
    def is_zero(self) -> bool:
        return True


@dataclass(frozen=True)
class ConstantDensity(Density):
    c: float = 1.0

    def __post_init__(self):
        if self.c < 0.0:
            raise ValidationError("measures.ConstantDensity: density must be nonnegative")

    def values(self, pts: Points) -> np.ndarray:
        return np.full(len(pts), self.c)

    def cum0_many(self, pts: Points) -> np.ndarray:
        return self.c * pts.side * (1.0 - pts.y)

    def side_mass(self, side: int) -> float:
        return self.c

    def scaled(self, a: float) -> Density:
        return ConstantDensity(self.c * a)


@dataclass(frozen=True)
class PowerDensity(Density):
    """coef * (1 - |x|)^(-alpha); non-integrable (infinite mass) when alpha >= 1."""

    alpha: float
    coef: float = 1.0

    def __post_init__(self):
        if self.coef < 0.0:
            raise ValidationError("measures.PowerDensity: coefficient must be nonnegative")

    def values(self, pts: Points) -> np.ndarray:
        return self.coef * pts.y ** (-self.alpha)

    def sing(self, side: int) -> float:
        return self.alpha

    def _cum_mag(self, y: np.ndarray) -> np.ndarray:
        """integral of (1 - t)^(-alpha) over (0, x], x = 1 - y >= 0."""
        if self.alpha == 1.0:
            return -np.log(y)
        return (y ** (1.0 - self.alpha) - 1.0) / (self.alpha - 1.0)

    def cum0_many(self, pts: Points) -> np.ndarray:
        return self.coef * pts.side * self._cum_mag(pts.y)

    def side_mass(self, side: int) -> float:
        if self.alpha >= 1.0:
            return INF if self.coef > 0.0 else 0.0
        return self.coef / (1.0 - self.alpha)

    def scaled(self, a: float) -> Density:
        return PowerDensity(self.alpha, self.coef * a)


@dataclass(frozen=True)
class ManufacturedDensity(Density):
    """Coefficient density of the manufactured instance u* = 1 - x^2.

    density = 2^(p-1) (p-1) |x|^(p-2) (1 - x^2)^(-q), built so that
    -(|u*'|^(p-2) u*')' = density * u*^q for the unweighted problem.
    Needs p >= 2 (so |x|^(p-2) stays bounded) and 0 <= q < 1.
    """

    p: float = 3.0
    q: float = 0.5

    def __post_init__(self):
        if not (self.p >= 2.0):
            raise ValidationError("measures.ManufacturedDensity: needs p >= 2")
        if not (0.0 <= self.q < 1.0):
            raise ValidationError("measures.ManufacturedDensity: needs 0 <= q < 1")

    def values(self, pts: Points) -> np.ndarray:
        c = 2.0 ** (self.p - 1.0) * (self.p - 1.0)
        ax = 1.0 - pts.y  # |x|, exact near the edges
        return c * ax ** (self.p - 2.0) * (pts.y * (2.0 - pts.y)) ** (-self.q)

    def sing(self, side: int) -> float:
        return self.q

    def interior_breaks(self) -> tuple[float, ...]:
        return (0.0,)


@dataclass(frozen=True)
class TabulatedDensity(Density):
    """Piecewise-linear density from (x, value) samples; zero outside the samples."""

    xs: tuple[float, ...]
    vals: tuple[float, ...]
    _cum: tuple[float, ...] = field(init=False, repr=False)

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        vs = np.asarray(self.vals, dtype=float)
        if xs.size < 2 or np.any(np.diff(xs) <= 0.0):
            raise ValidationError("measures.TabulatedDensity: need >= 2 strictly increasing abscissae")
        if np.any(vs < 0.0):
            raise ValidationError("measures.TabulatedDensity: values must be nonnegative")
        if xs[0] < -1.0 or xs[-1] > 1.0:
            raise ValidationError("measures.TabulatedDensity: abscissae must lie in [-1, 1]")
        cum = np.concatenate([[0.0], np.cumsum(0.5 * (vs[1:] + vs[:-1]) * np.diff(xs))])
        object.__setattr__(self, "_cum", tuple(cum))

    def values(self, pts: Points) -> np.ndarray:
        xs = np.asarray(self.xs)
        vs = np.asarray(self.vals)
        out = np.interp(pts.x, xs, vs)
        out[(pts.x < xs[0]) | (pts.x > xs[-1])] = 0.0
        return out

    def _cum_at(self, x: np.ndarray) -> np.ndarray:
        xs = np.asarray(self.xs)
        vs = np.asarray(self.vals)
        cum = np.asarray(self._cum)
        xc = np.clip(x, xs[0], xs[-1])
        idx = np.clip(np.searchsorted(xs, xc, side="right") - 1, 0, xs.size - 2)
        x0 = xs[idx]
        t = xc - x0
        slope = (vs[idx + 1] - vs[idx]) / (xs[idx + 1] - xs[idx])
        return cum[idx] + vs[idx] * t + 0.5 * slope * t * t

    def cum0_many(self, pts: Points) -> np.ndarray:
        return self._cum_at(pts.x) - self._cum_at(np.zeros(1))[0]

    def side_mass(self, side: int) -> float:
        edge = np.asarray([1.0 if side > 0 else -1.0])
        v = self._cum_at(edge)[0] - self._cum_at(np.zeros(1))[0]
        return abs(v)

    def interior_breaks(self) -> tuple[float, ...]:
        if len(self.xs) <= 64:
            return tuple(self.xs)
        return (self.xs[0], self.xs[-1])

    @property
    def y_resolved(self) -> bool:
        return False


@dataclass(frozen=True)
class CustomDensity(Density):
    """User density: vectorized evaluator plus declared endpoint exponents.

    ``cum0`` (signed integral from 0, a scalar-or-array callable) may be
    supplied when the caller knows a closed cumulative form.
    """

    func: Callable[[np.ndarray], np.ndarray]
    sing_left: float = 0.0
    sing_right: float = 0.0
    cum0: Callable[[np.ndarray], np.ndarray] | None = None
    breaks: tuple[float, ...] = ()

    def values(self, pts: Points) -> np.ndarray:
        return np.asarray(self.func(pts.x), dtype=float)

    def sing(self, side: int) -> float:
        return self.sing_left if side < 0 else self.sing_right

    def cum0_many(self, pts: Points) -> np.ndarray | None:
        if self.cum0 is None:
            return None
        return np.asarray(self.cum0(pts.x), dtype=float)

    def interior_breaks(self) -> tuple[float, ...]:
        return self.breaks

    @property
    def y_resolved(self) -> bool:
        return False


@dataclass(frozen=True)
class _ScaledDensity(Density):
    base: Density
    factor: float

    def values(self, pts: Points) -> np.ndarray:
        return self.factor * self.base.values(pts)

    def sing(self, side: int) -> float:
        return self.base.sing(side)

    def cum0_many(self, pts: Points) -> np.ndarray | None:
        c = self.base.cum0_many(pts)
        return None if c is None else self.factor * c

    def side_mass(self, side: int) -> float:
        return self.factor * self.base.side_mass(side)

    def scaled(self, a: float) -> Density:
        return self.base.scaled(self.factor * a)

    def breakpoints_y(self, side: int) -> tuple[float, ...]:
        return self.base.breakpoints_y(side)

    def interior_breaks(self) -> tuple[float, ...]:
        return self.base.interior_breaks()

    @property
    def y_resolved(self) -> bool:
        return self.base.y_resolved


@dataclass(frozen=True)
class WindowedDensity(Density):
    """Restriction of a density to [-1 + y_left, 1 - y_right].

    The window edges are stored as distances to the endpoints so dyadic
    truncations remain exact arbitrarily deep.
    """

    base: Density
    y_left: float = 0.0
    y_right: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.y_left < 1.0 and 0.0 <= self.y_right < 1.0):
            raise ValidationError("measures.WindowedDensity: window edges must lie in [0, 1)")

    def _mask_outside(self, pts: Points) -> np.ndarray:
        return ((pts.side < 0) & (pts.y < self.y_left)) | ((pts.side > 0) & (pts.y < self.y_right))

    def _clip(self, pts: Points) -> Points:
        out = self._mask_outside(pts)
        if not np.any(out):
            return pts
        y = pts.y.copy()
        left = (pts.side < 0) & (pts.y < self.y_left)
        right = (pts.side > 0) & (pts.y < self.y_right)
        y[left] = self.y_left
        y[right] = self.y_right
        x = pts.x.copy()
        x[left] = -1.0 + self.y_left
        x[right] = 1.0 - self.y_right
        return Points(x=x, side=pts.side, y=y)

    def values(self, pts: Points) -> np.ndarray:
        vals = self.base.values(pts)
        vals = np.where(self._mask_outside(pts), 0.0, vals)
        return vals

    def sing(self, side: int) -> float:
        edge = self.y_left if side < 0 else self.y_right
        return 0.0 if edge > 0.0 else self.base.sing(side)

    def cum0_many(self, pts: Points) -> np.ndarray | None:
        return self.base.cum0_many(self._clip(pts))

    def side_mass(self, side: int) -> float:
        edge = self.y_left if side < 0 else self.y_right
        if edge == 0.0:
            return self.base.side_mass(side)
        pts = points_from_edge(side, np.asarray([edge]))
        c = self.base.cum0_many(pts)
        if c is not None:
            return abs(float(c[0]))
        lo, hi = (0.0, 1.0 - edge) if side > 0 else (-1.0 + edge, 0.0)
        return integrate_graded(self.base.values, lo, hi,
                                breakpoints=self.base.interior_breaks())

    def scaled(self, a: float) -> Density:
        return WindowedDensity(self.base.scaled(a), self.y_left, self.y_right)

    def breakpoints_y(self, side: int) -> tuple[float, ...]:
        edge = self.y_left if side < 0 else self.y_right
        extra = (edge,) if edge > 0.0 else ()
        return extra + self.base.breakpoints_y(side)

    def interior_breaks(self) -> tuple[float, ...]:
        ib = [b for b in self.base.interior_breaks()
              if -1.0 + self.y_left <= b <= 1.0 - self.y_right]
        if self.y_left >= 1e-12:
            ib.append(-1.0 + self.y_left)
        if self.y_right >= 1e-12:
            ib.append(1.0 - self.y_right)
        return tuple(ib)

    @property
    def is_zero(self) -> bool:
        return self.base.is_zero

    @property
    def y_resolved(self) -> bool:
        return self.base.y_resolved


@dataclass(frozen=True)
class SumDensity(Density):
    parts: tuple[Density, ...]

    def values(self, pts: Points) -> np.ndarray:
        out = np.zeros(len(pts))
        for p in self.parts:
            out += p.values(pts)
        return out

    def sing(self, side: int) -> float:
        return max(p.sing(side) for p in self.parts)

    def cum0_many(self, pts: Points) -> np.ndarray | None:
        out = np.zeros(len(pts))
        for p in self.parts:
            c = p.cum0_many(pts)
            if c is None:
                return None
            out += c
        return out

    def side_mass(self, side: int) -> float:
        return sum(p.side_mass(side) for p in self.parts)

    def scaled(self, a: float) -> Density:
        return SumDensity(tuple(p.scaled(a) for p in self.parts))

    def breakpoints_y(self, side: int) -> tuple[float, ...]:
        out: tuple[float, ...] = ()
        for p in self.parts:
            out += p.breakpoints_y(side)
        return out

    def interior_breaks(self) -> tuple[float, ...]:
        out: tuple[float, ...] = ()
        for p in self.parts:
            out += p.interior_breaks()
        return out

    @property
    def is_zero(self) -> bool:
        return all(p.is_zero for p in self.parts)

    @property
    def y_resolved(self) -> bool:
        return all(p.y_resolved for p in self.parts)


@dataclass(frozen=True)
class ProductDensity(Density):
    """base density multiplied by a nonnegative factor (e.g. u^q for iteration).

    The factor object provides ``values(pts)`` and ``edge_exponent(side)``
    (factor ~ C * dist^kappa near the endpoint); the product's declared
    singularity is base.sing - kappa.
    """

    base: Density
    factor: object

    def values(self, pts: Points) -> np.ndarray:
        return self.base.values(pts) * np.asarray(self.factor.values(pts), dtype=float)

    def sing(self, side: int) -> float:
        return self.base.sing(side) - float(self.factor.edge_exponent(side))

    def breakpoints_y(self, side: int) -> tuple[float, ...]:
        return self.base.breakpoints_y(side)

    def interior_breaks(self) -> tuple[float, ...]:
        return self.base.interior_breaks()

    @property
    def is_zero(self) -> bool:
        return self.base.is_zero

    @property
    def y_resolved(self) -> bool:
        return self.base.y_resolved


# ---------------------------------------------------------------------------
# the measure itself
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RadonMeasure:
    """Atoms plus a density on (-1, 1); immutable."""

    atoms: tuple[tuple[float, float], ...] = ()
    density: Density = field(default_factory=ZeroDensity)

    def __post_init__(self):
        atoms = tuple(sorted((float(x), float(m)) for x, m in self.atoms))
        locs = [x for x, _ in atoms]
        if any(not (-1.0 < x < 1.0) for x in locs):
            raise ValidationError("measures.RadonMeasure: atom locations must lie in (-1, 1)")
        if any(m <= 0.0 for _, m in atoms):
            raise ValidationError("measures.RadonMeasure: atom masses must be positive")
        if len(set(locs)) != len(locs):
            merged: dict[float, float] = {}
            for x, m in atoms:
                merged[x] = merged.get(x, 0.0) + m
            atoms = tuple(sorted(merged.items()))
        object.__setattr__(self, "atoms", atoms)

    # -- basic structure -------------------------------------------------

    @property
    def atom_locations(self) -> np.ndarray:
        return np.asarray([x for x, _ in self.atoms])

    @property
    def atom_masses(self) -> np.ndarray:
        return np.asarray([m for _, m in self.atoms])

    @property
    def is_zero(self) -> bool:
        return len(self.atoms) == 0 and self.density.is_zero

    def sing(self, side: int) -> float:
        return self.density.sing(side)

    def density_side_mass(self, side: int) -> float:
        return self.density.side_mass(side)

    def side_mass(self, side: int) -> float:
        """mu((0, 1)) or mu((-1, 0]), atoms included (atom at 0 counts left)."""
        locs = self.atom_locations
        masses = self.atom_masses
        if side > 0:
            atom = float(masses[locs > 0.0].sum())
        else:
            atom = float(masses[locs <= 0.0].sum())
        return self.density_side_mass(side) + atom

    def total_mass(self) -> float:
        return self.side_mass(1) + self.side_mass(-1)

    # -- anchored cumulative ----------------------------------------------

    def atom_cum_center(self, x: np.ndarray) -> np.ndarray:
        """Signed atom count-mass of (0, x] (x>0) / -(x, 0] (x<0), right-continuous."""
        locs = self.atom_locations
        if locs.size == 0:
            return np.zeros(np.shape(x))
        masses = self.atom_masses
        cum = np.concatenate([[0.0], np.cumsum(masses)])
        upto = cum[np.searchsorted(locs, x, side="right")]
        upto0 = cum[np.searchsorted(locs, 0.0, side="right")]
        return upto - upto0

    def density_cum_center_closed(self, pts: Points) -> np.ndarray | None:
        return self.density.cum0_many(pts)

    def density_cum_center_many(self, pts: Points, n_gauss: int = 10) -> np.ndarray:
        """Density part of S at many points; composite cumulative quadrature
        over the sorted point set when no closed form exists."""
        closed = self.density.cum0_many(pts)
        if closed is not None:
            return closed
        from .quadrature import gauss_rule  # local import to avoid cycle noise

        order = np.lexsort((-pts.side * pts.y, pts.x))
        xs = pts.x[order]
        ys = pts.y[order]
        sides = pts.side[order]
        n = xs.size
        if n == 1:
            xs0 = float(xs[0])
            lo, hi = (xs0, 0.0) if xs0 < 0.0 else (0.0, xs0)
            t, tw = gauss_rule(n_gauss)
            seg = lo + t * (hi - lo)
            v = self.density.values(points_from_x(seg))
            val = (hi - lo) * float(tw @ v)
            return np.asarray([val if xs0 >= 0.0 else -val])
        t, tw = gauss_rule(n_gauss)
        same = sides[:-1] == sides[1:]
        y_l, y_r = ys[:-1], ys[1:]
        x_l, x_r = xs[:-1], xs[1:]
        inc = np.zeros(n - 1)
        if np.any(same):
            dy = (y_r - y_l)[same]
            nodes = y_l[same][None, :] + t[:, None] * dy[None, :]
            side_arr = np.broadcast_to(sides[:-1][same], nodes.shape)
            gp = Points(x=(side_arr * (1.0 - nodes)).ravel(),
                        side=side_arr.ravel(), y=nodes.ravel())
            vals = self.density.values(gp).reshape(nodes.shape)
            inc[same] = np.abs(dy) * (tw @ vals)
        diff = ~same
        if np.any(diff):
            dx = (x_r - x_l)[diff]
            nodes = x_l[diff][None, :] + t[:, None] * dx[None, :]
            gp = points_from_x(nodes.ravel())
            vals = self.density.values(gp).reshape(nodes.shape)
            inc[diff] = np.abs(dx) * (tw @ vals)
        prefix = np.concatenate([[0.0], np.cumsum(inc)])
        i0 = int(np.argmin(np.abs(xs)))
        x0 = float(xs[i0])
        anchor = prefix[i0]
        if x0 != 0.0:
            lo, hi = (x0, 0.0) if x0 < 0.0 else (0.0, x0)
            seg = lo + t * (hi - lo)
            v = self.density.values(points_from_x(seg))
            off = (hi - lo) * float(tw @ v)
            anchor += off if x0 < 0.0 else -off
        S_sorted = prefix - anchor
        out = np.empty(n)
        out[order] = S_sorted
        return out

    def cum_center_many(self, pts: Points, n_gauss: int = 10) -> np.ndarray:
        return self.density_cum_center_many(pts, n_gauss) + self.atom_cum_center(pts.x)

    def _density_cum_quad(self, x: float) -> float:
        sl, sr = self.sing(-1), self.sing(1)
        if x >= 0.0:
            if sr >= 1.0 and x >= 1.0:
                return INF
            v = integrate_graded(self.density.values, 0.0, min(x, 1.0),
                                 sing_b=sr if x >= 1.0 else 0.0,
                                 breakpoints=self.density.interior_breaks())
            chk = integrate_graded(self.density.values, 0.0, min(x, 1.0),
                                   sing_b=sr if x >= 1.0 else 0.0, n_gauss=24,
                                   breakpoints=self.density.interior_breaks())
        else:
            if sl >= 1.0 and x <= -1.0:
                return -INF
            v = -integrate_graded(self.density.values, max(x, -1.0), 0.0,
                                  sing_a=sl if x <= -1.0 else 0.0,
                                  breakpoints=self.density.interior_breaks())
            chk = -integrate_graded(self.density.values, max(x, -1.0), 0.0,
                                    sing_a=sl if x <= -1.0 else 0.0, n_gauss=24,
                                    breakpoints=self.density.interior_breaks())
        if abs(v - chk) > 1e-9 * max(1.0, abs(chk)):
            raise QuadratureError(
                f"measures.cdf: density quadrature disagreement {abs(v - chk):.3e}"
            )
        return chk

    def cum_center(self, x: float) -> float:
        """S(x) = signed mass from the center anchor (scalar; may be +-inf)."""
        pts = points_from_x(np.asarray([x]))
        closed = self.density_cum_center_closed(pts)
        dens = float(closed[0]) if closed is not None else self._density_cum_quad(x)
        return dens + float(self.atom_cum_center(np.asarray([x]))[0])

    # -- public operations --------------------------------------------------

    def cdf(self, x: float) -> float:
        """M(x) = mu([-1, x]), right-continuous; +inf allowed."""
        if not (-1.0 <= x < 1.0):
            raise ValidationError(f"measures.cdf: x must lie in [-1, 1), got {x}")
        if x == -1.0:
            return 0.0
        left = self.side_mass(-1)
        if math.isinf(left):
            return INF
        return left + self.cum_center(x)

    def ball_mass(self, x: float, r: float) -> float:
        """mu(B(x, r) cap (-1, 1)) for the open ball B(x, r).

        Both endpoints of the ball are excluded: an atom sitting exactly at
        x - r or x + r does not contribute.
        """
        if not (r > 0.0):
            raise ValidationError("measures.ball_mass: need r > 0")
        a = max(x - r, -1.0)
        b = min(x + r, 1.0)
        if b <= a:
            return 0.0
        if b >= 1.0:
            sb = self.side_mass(1)
            atom_b = 0.0
        else:
            sb = self.cum_center(b)
            locs = self.atom_locations
            atom_b = float(self.atom_masses[locs == b].sum()) if locs.size else 0.0
        if a <= -1.0:
            sa = -self.side_mass(-1)
        else:
            sa = self.cum_center(a)
        return sb - sa - atom_b

    def ball_masses(self, x: float, rs: np.ndarray, n_gauss: int = 10) -> np.ndarray:
        """mu(B(x, r) cap (-1, 1)) for an array of radii; +inf where the ball
        reaches an endpoint carrying non-integrable density."""
        rs = np.asarray(rs, dtype=float)
        a = np.maximum(x - rs, -1.0)
        b = np.minimum(x + rs, 1.0)
        hit_r = b >= 1.0
        hit_l = a <= -1.0
        interior = np.concatenate([a[~hit_l], b[~hit_r]])
        S_int = self.cum_center_many(points_from_x(interior), n_gauss) if interior.size \
            else np.asarray([])
        n_l = int(np.sum(~hit_l))
        Sa = np.empty(rs.size)
        Sb = np.empty(rs.size)
        Sa[~hit_l] = S_int[:n_l]
        Sb[~hit_r] = S_int[n_l:]
        Sa[hit_l] = -self.side_mass(-1)
        Sb[hit_r] = self.side_mass(1)
        locs = self.atom_locations
        atom_b = np.zeros(rs.size)
        if locs.size:
            masses = self.atom_masses
            for i, bb in enumerate(b):
                if not hit_r[i]:
                    atom_b[i] = float(masses[locs == bb].sum())
        out = Sb - Sa - atom_b
        out[b <= a] = 0.0
        return out

    def truncate(self, k: int) -> "RadonMeasure":
        """Restriction to F_k = [-1 + 2^-k, 1 - 2^-k]."""
        if not (isinstance(k, (int, np.integer)) and k >= 1):
            raise ValidationError(f"measures.truncate: k must be a positive integer, got {k!r}")
        edge = 2.0 ** (-int(k))
        return self.window(edge, edge)

    def window(self, y_left: float, y_right: float) -> "RadonMeasure":
        if isinstance(self.density, WindowedDensity):
            dens = WindowedDensity(self.density.base,
                                   max(self.density.y_left, y_left),
                                   max(self.density.y_right, y_right))
        elif self.density.is_zero:
            dens = self.density
        else:
            dens = WindowedDensity(self.density, y_left, y_right)
        atoms = tuple((x, m) for x, m in self.atoms
                      if -1.0 + y_left <= x <= 1.0 - y_right)
        return RadonMeasure(atoms=atoms, density=dens)

    def scale(self, a: float) -> "RadonMeasure":
        if a < 0.0:
            raise ValidationError("measures.scale: factor must be nonnegative")
        if a == 0.0:
            return RadonMeasure()
        return RadonMeasure(atoms=tuple((x, a * m) for x, m in self.atoms),
                            density=self.density.scaled(a))

    def add(self, other: "RadonMeasure") -> "RadonMeasure":
        if self.density.is_zero:
            dens = other.density
        elif other.density.is_zero:
            dens = self.density
        else:
            dens = SumDensity((self.density, other.density))
        return RadonMeasure(atoms=self.atoms + other.atoms, density=dens)

    def pushforward(self, factor) -> "RadonMeasure":
        """g * mu for a nonnegative factor g (``values``/``edge_exponent`` duck type).

        Atom masses are multiplied by g at the atom; g must be finite there.
        """
        locs = self.atom_locations
        new_atoms = []
        if locs.size:
            gvals = np.asarray(factor.values(points_from_x(locs)), dtype=float)
            if np.any(~np.isfinite(gvals)):
                raise ValidationError("measures.pushforward: factor is not finite at an atom")
            if np.any(gvals < 0.0):
                raise ValidationError("measures.pushforward: factor must be nonnegative")
            for (x, m), g in zip(self.atoms, gvals):
                if g > 0.0:
                    new_atoms.append((x, m * g))
        dens = self.density if self.density.is_zero else ProductDensity(self.density, factor)
        return RadonMeasure(atoms=tuple(new_atoms), density=dens)

    # -- quadrature metadata -------------------------------------------------

    def breakpoints_y(self, side: int) -> tuple[float, ...]:
        return self.density.breakpoints_y(side)

    def interior_breaks(self) -> tuple[float, ...]:
        return self.density.interior_breaks()

    def has_closed_cum(self) -> bool:
        probe = points_from_x(np.asarray([0.25]))
        return self.density.cum0_many(probe) is not None


@dataclass(frozen=True)
class CumulativeMass:
    """M(x) = mu([-1, x]) as an evaluable object (right-continuous by convention:
    an atom at x contributes to M(x))."""

    measure: RadonMeasure
    right_continuous: bool = True

    def __call__(self, x: float) -> float:
        return self.measure.cdf(x)


# ---------------------------------------------------------------------------
# constructors and module-level operation wrappers
# ---------------------------------------------------------------------------

def dirac(x: float = 0.0, mass: float = 1.0) -> RadonMeasure:
    return RadonMeasure(atoms=((x, mass),))


def lebesgue(c: float = 1.0) -> RadonMeasure:
    return RadonMeasure(density=ConstantDensity(c))


def power_measure(alpha: float, coef: float = 1.0) -> RadonMeasure:
    return RadonMeasure(density=PowerDensity(alpha, coef))


def manufactured_measure(p: float = 3.0, q: float = 0.5) -> RadonMeasure:
    return RadonMeasure(density=ManufacturedDensity(p, q))


def cdf(mu: RadonMeasure, x: float) -> float:
    return mu.cdf(x)


def truncate(mu: RadonMeasure, k: int) -> RadonMeasure:
    return mu.truncate(k)


def ball_mass(mu: RadonMeasure, x: float, r: float) -> float:
    return mu.ball_mass(x, r)


def scale(mu: RadonMeasure, a: float) -> RadonMeasure:
    return mu.scale(a)


def add(mu: RadonMeasure, nu: RadonMeasure) -> RadonMeasure:
    return mu.add(nu)


def weighted_pushforward(mu: RadonMeasure, g) -> RadonMeasure:
    return mu.pushforward(g)


@dataclass(frozen=True)
class CallableFactor:
    """Adapter turning a plain callable into a pushforward factor."""

    func: Callable[[np.ndarray], np.ndarray]
    exp_left: float = 0.0
    exp_right: float = 0.0

    def values(self, pts: Points) -> np.ndarray:
        return np.asarray(self.func(pts.x), dtype=float)

    def edge_exponent(self, side: int) -> float:
        return self.exp_left if side < 0 else self.exp_right
