"""Generalized energies of measures and their sharp-constant identities.

E_gamma(mu) = integral of (W mu)^gamma against mu, evaluated as a monotone
limit over the truncation ladder (each level is one exact Dirichlet solve).
On each finite level the measure-side integral, the gradient energy
gamma * integral |u'|^p u^(gamma-1) w dx and the transformed-gradient energy
integral |v'|^p w dx with v = u^((p-1+gamma)/p) are tied together by the
integration-by-parts identity with the explicit constant c_E; the module
computes the first two by independent quadratures (measure side vs weighted
gradient side) and reports the relative identity gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InternalInvariantError, ValidationError
from .measures import RadonMeasure
from .params import energy_constant
from .quadrature import increments_stagnant, points_from_x
from .solver import (
    DEFAULT_OPTIONS,
    PotentialResult,
    SolverOptions,
    measure_quadrature,
    solve_dirichlet,
)
from .weights import Weight

INF = math.inf


@dataclass
class EnergyReport:
    e_gamma: float              # may be +inf
    grad_energy: float          # integral |u'|^p u^(gamma-1) w dx (last ladder level)
    v_energy: float             # integral |v'|^p w dx, v = u^((p-1+gamma)/p)
    sandwich_pass: bool         # e_gamma <= v_energy <= c_E * e_gamma
    identity_gap: float         # relative deviation across the identity
    diverged: bool
    levels_used: int
    ladder_converged: bool
    solution: PotentialResult | None = None


def _ladder_schedule(options: SolverOptions, schedule=None) -> tuple[int, ...]:
    if schedule is None:
        return tuple(range(1, options.max_trunc_level + 1))
    return tuple(schedule)


def _level_energy(res: PotentialResult, mu_k: RadonMeasure, gamma: float) -> float:
    """E_gamma of a solved finite level, from the solve's own quadrature."""
    quad = res.quad
    total = 0.0
    if quad is not None:
        with np.errstate(invalid="ignore"):
            vals = np.where(quad.u > 0.0, quad.u ** gamma, 0.0 if gamma > 0.0 else 1.0)
        total += float(np.dot(quad.w_quad, vals * quad.dens_vals))
    locs = mu_k.atom_locations
    if locs.size:
        u_at = res.u.values_at(points_from_x(locs))
        total += float(np.dot(mu_k.atom_masses, u_at ** gamma))
    return total


def energy_ladder(p: float, w: Weight, mu: RadonMeasure, gamma: float,
                  options: SolverOptions = DEFAULT_OPTIONS,
                  schedule=None, cap: float | None = None,
                  tol: float = 1e-9, return_levels: bool = False):
    """Monotone truncation limit of E_gamma(mu).

    Returns (value, last_level_solution, levels, converged, diverged)
    [plus the per-level energy list when ``return_levels``]; the value is
    +inf when the ladder exceeds the cap or its increments stagnate.
    """
    if mu.is_zero:
        return (0.0, None, 0, True, False, []) if return_levels else (0.0, None, 0, True, False)
    cap = options.divergence_cap if cap is None else cap
    schedule = _ladder_schedule(options, schedule)
    prev = None
    last_res = None
    increments: list[float] = []
    level_values: list[float] = []
    levels = 0
    converged = diverged = False
    value = 0.0
    for k in schedule:
        mu_k = mu.truncate(k)
        res = solve_dirichlet(p, w, mu_k, options)
        e_k = _level_energy(res, mu_k, gamma)
        levels += 1
        level_values.append(e_k)
        if prev is not None:
            if e_k < prev - 1e-9 * (1.0 + abs(prev)):
                raise InternalInvariantError(
                    f"energy.energy_ladder: level {k} decreased the energy "
                    f"({prev:.6e} -> {e_k:.6e}); the ladder must be monotone"
                )
            increments.append(e_k - prev)
        prev = e_k
        value = e_k
        last_res = res
        if e_k > cap:
            diverged = True
            break
        scale = max(abs(e_k), 1e-300)
        if len(increments) >= 2 and increments[-1] <= tol * scale and increments[-2] <= tol * scale:
            converged = True
            break
        if increments_stagnant(increments, tol * scale, require_growth=True):
            diverged = True
            break
    if diverged:
        value = INF
        converged = False
    if return_levels:
        return value, last_res, levels, converged, diverged, level_values
    return value, last_res, levels, converged, diverged


def _gradient_energy(res: PotentialResult, gamma: float) -> float:
    """integral |u'|^p u^(gamma-1) w dx from the flux representation."""
    quad = res.quad
    if quad is None:
        return 0.0
    p = res.p
    pp = p / (p - 1.0)
    e = 1.0 / (p - 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        integrand = np.abs(quad.flux) ** pp * quad.w_vals ** (-e)
        factor = np.where(quad.u > 0.0, quad.u ** (gamma - 1.0), 0.0)
    return float(np.dot(quad.w_quad, integrand * factor))


def energy(p: float, w: Weight, mu: RadonMeasure, gamma: float,
           options: SolverOptions = DEFAULT_OPTIONS, schedule=None,
           tol: float = 1e-5) -> EnergyReport:
    """Full energy report with the identity and sandwich checks."""
    if not (0.0 < gamma < INF):
        raise ValidationError(f"energy.energy: need finite gamma > 0, got {gamma}")
    c_E = energy_constant(p, gamma)
    e_val, last_res, levels, conv, div = energy_ladder(p, w, mu, gamma, options, schedule)
    if div or last_res is None:
        return EnergyReport(
            e_gamma=INF if div else 0.0, grad_energy=INF if div else 0.0,
            v_energy=INF if div else 0.0, sandwich_pass=not div,
            identity_gap=0.0, diverged=div, levels_used=levels,
            ladder_converged=conv, solution=last_res,
        )
    grad = _gradient_energy(last_res, gamma)
    v_energy = c_E * gamma * grad
    # measure side of the identity on the same (deepest) level
    mu_k = last_res.measure
    e_level = _level_energy(last_res, mu_k, gamma)
    scale = max(e_level, gamma * grad, 1e-300)
    gap = abs(e_level - gamma * grad) / scale
    sandwich = (e_val <= v_energy * (1.0 + tol)) and (v_energy <= c_E * e_val * (1.0 + tol))
    return EnergyReport(
        e_gamma=e_val, grad_energy=grad, v_energy=v_energy,
        sandwich_pass=bool(sandwich), identity_gap=gap, diverged=False,
        levels_used=levels, ladder_converged=conv, solution=last_res,
    )


def triple_norm(p: float, w: Weight, mu: RadonMeasure, gamma: float,
                options: SolverOptions = DEFAULT_OPTIONS, schedule=None) -> float:
    """|||mu|||_gamma = E_gamma(mu)^((p-1)/(p-1+gamma))."""
    if not (0.0 < gamma < INF):
        raise ValidationError("energy.triple_norm: need finite gamma > 0")
    e_val, _, _, _, div = energy_ladder(p, w, mu, gamma, options, schedule)
    if div:
        return INF
    return e_val ** ((p - 1.0) / (p - 1.0 + gamma))


def sup_norm_energy(p: float, w: Weight, mu: RadonMeasure,
                    options: SolverOptions = DEFAULT_OPTIONS,
                    schedule=None, rel_tol: float = 1e-6) -> dict:
    """ess-sup of the potential over the support of mu, with the check that it
    agrees with the global sup (the weak-maximum-principle identity)."""
    from .solver import potential

    if mu.is_zero:
        return {"value": 0.0, "sup_support": 0.0, "sup_global": 0.0,
                "gap": 0.0, "agree": True, "diverged": False}
    res = potential(p, w, mu, options, schedule=schedule)
    if res.diverged:
        return {"value": INF, "sup_support": INF, "sup_global": INF,
                "gap": 0.0, "agree": True, "diverged": True}
    sup_global = res.u.sup()
    cands = []
    locs = mu.atom_locations
    if locs.size:
        cands.append(float(np.max(res.u.values_at(points_from_x(locs)))))
    quad = res.quad
    if quad is not None:
        mask = quad.dens_vals > 0.0
        if np.any(mask):
            cands.append(float(np.max(quad.u[mask])))
    sup_support = max(cands) if cands else 0.0
    gap = abs(sup_global - sup_support) / max(sup_global, 1e-300)
    return {
        "value": sup_support,
        "sup_support": sup_support,
        "sup_global": sup_global,
        "gap": gap,
        "agree": bool(gap <= rel_tol),
        "diverged": False,
    }


def measure_integral(fn, mu: RadonMeasure, options: SolverOptions = DEFAULT_OPTIONS,
                     schedule=None, cap: float | None = None,
                     tol: float = 1e-9) -> tuple[float, bool, bool]:
    """Ladder integral of fn (vectorized over Points) against mu.

    Same monotone-limit semantics as the energy ladder but without solves;
    fn must be nonnegative.  Returns (value, converged, diverged).
    """
    if mu.is_zero:
        return 0.0, True, False
    cap = options.divergence_cap if cap is None else cap
    schedule = _ladder_schedule(options, schedule)
    prev = None
    increments: list[float] = []
    converged = diverged = False
    value = 0.0
    for k in schedule:
        mu_k = mu.truncate(k)
        pts, wq, dens = measure_quadrature(mu_k, options)
        total = float(np.dot(wq, np.asarray(fn(pts)) * dens))
        locs = mu_k.atom_locations
        if locs.size:
            total += float(np.dot(mu_k.atom_masses, np.asarray(fn(points_from_x(locs)))))
        if prev is not None:
            increments.append(total - prev)
        prev = total
        value = total
        if total > cap:
            diverged = True
            break
        scale = max(abs(total), 1e-300)
        if len(increments) >= 2 and abs(increments[-1]) <= tol * scale \
                and abs(increments[-2]) <= tol * scale:
            converged = True
            break
        if increments_stagnant(increments, tol * scale, require_growth=True):
            diverged = True
            break
    return (INF if diverged else value), converged, diverged


def mee_bound(p: float, w: Weight, mu: RadonMeasure, nu: RadonMeasure,
              gamma: float, q: float, options: SolverOptions = DEFAULT_OPTIONS,
              schedule=None, tol: float = 1e-6) -> dict:
    """Cross-energy bound: integral (W mu)^(gamma+q) d nu against the
    sharp-constant product of E_gamma(mu) and the conjugate energy of nu."""
    from .solver import potential

    if not (-gamma < q < p - 1.0):
        raise ValidationError("energy.mee_bound: need -gamma < q < p - 1")
    c_E = energy_constant(p, gamma)
    ghat = (gamma + q) * (p - 1.0) / (p - 1.0 - q)
    if mu.is_zero:
        return {"lhs": 0.0, "rhs": 0.0, "pass": True, "margin": 0.0}
    e_mu, _, _, _, div_mu = energy_ladder(p, w, mu, gamma, options, schedule)
    e_nu, _, _, _, div_nu = energy_ladder(p, w, nu, ghat, options, schedule)
    res_mu = potential(p, w, mu, options, schedule=schedule)
    if res_mu.diverged or div_mu or div_nu:
        return {"lhs": INF, "rhs": INF, "pass": True, "margin": 0.0,
                "diverged": True}
    u_mu = res_mu.u
    lhs, _, lhs_div = measure_integral(
        lambda pts: u_mu.values_at(pts) ** (gamma + q), nu, options, schedule)
    rhs = (c_E * e_mu) ** ((gamma + q) / (p - 1.0 + gamma)) \
        * e_nu ** ((p - 1.0 - q) / (p - 1.0 + gamma))
    ok = bool(lhs <= rhs * (1.0 + tol)) if not lhs_div else False
    margin = (rhs - lhs) / max(rhs, 1e-300) if np.isfinite(rhs) else 0.0
    return {"lhs": lhs, "rhs": rhs, "pass": ok, "margin": margin,
            "e_mu": e_mu, "e_nu": e_nu, "diverged": False}


def quasi_additivity_check(p: float, w: Weight, mu: RadonMeasure, nu: RadonMeasure,
                           gamma: float, options: SolverOptions = DEFAULT_OPTIONS,
                           schedule=None, tol: float = 1e-9) -> dict:
    """|||mu + nu||| <= c_E^gamma (|||mu||| + |||nu|||): the convex-cone bound."""
    c_E = energy_constant(p, gamma)
    t_sum = triple_norm(p, w, mu.add(nu), gamma, options, schedule)
    t_mu = triple_norm(p, w, mu, gamma, options, schedule)
    t_nu = triple_norm(p, w, nu, gamma, options, schedule)
    rhs = c_E ** gamma * (t_mu + t_nu)
    if math.isinf(t_sum):
        ok = math.isinf(rhs)
    else:
        ok = t_sum <= rhs * (1.0 + tol)
    return {"lhs": t_sum, "rhs": rhs, "pass": bool(ok),
            "t_mu": t_mu, "t_nu": t_nu}
