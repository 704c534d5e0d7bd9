"""Discrete L2, H1_0 and H^-1 norms, the zeta functional and the energy
identities built on them.

H^-1 is operator-based: solve -Lap v = f on interior nodes with the same
discrete Laplacian the solver marches with, then take sqrt<f, v>.  Because
the interior quadrature weight is constant on uniform grids, this duality
is spectrally exact: eigenfunction norms, the interpolation inequality
||u||_2^2 <= ||u||_{H1_0} ||u||_{H-1} and the Rayleigh bounds on zeta all
hold to rounding, leaving only time-discretization error in the identities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateNorm, IndexOutOfRange
from .mesh import (
    Grid,
    _check_dirichlet,
    _check_field,
    apply_gradient,
    apply_laplacian,
    dirichlet_solve,
    weighted_inner_product,
)
from .solver import SolutionTrajectory, pde_residual

_EPS = 1e-300


@dataclass(eq=False)
class NormTrace:
    """Per-level norms of a trajectory and zeta = l2^2 / hm1^2."""

    times: np.ndarray
    l2: np.ndarray
    h10: np.ndarray
    hm1: np.ndarray
    zeta: np.ndarray


def l2_norm(grid: Grid, fld) -> float:
    fld = _check_field(grid, fld)
    return float(np.sqrt(weighted_inner_product(grid, fld, fld)))


def h10_norm(grid: Grid, fld) -> float:
    """Dirichlet-form norm sqrt<-Lap u, u>; requires a Dirichlet field."""
    fld = _check_field(grid, fld)
    _check_dirichlet(grid, fld)
    q = -weighted_inner_product(grid, apply_laplacian(grid, fld), fld)
    return float(np.sqrt(max(q, 0.0)))


def hminus1_norm(grid: Grid, fld) -> float:
    """sqrt<f, v> with -Lap v = f (Dirichlet); only interior values of f
    enter, so fields with boundary support (derivatives of Dirichlet data,
    multiplier products) are accepted."""
    fld = _check_field(grid, fld)
    v = dirichlet_solve(grid, fld)
    q = weighted_inner_product(grid, fld, v)
    return float(np.sqrt(max(q, 0.0)))


def compute_norm_trace(traj: SolutionTrajectory) -> NormTrace:
    """l2/h10/hm1/zeta per time level; DegenerateNorm if hm1 underflows."""
    n_lvl = traj.time.steps + 1
    l2 = np.empty(n_lvl)
    h10 = np.empty(n_lvl)
    hm1 = np.empty(n_lvl)
    for j in range(n_lvl):
        uj = traj.u[j]
        l2[j] = l2_norm(traj.grid, uj)
        h10[j] = h10_norm(traj.grid, uj)
        hm1[j] = hminus1_norm(traj.grid, uj)
    if np.any(hm1 * hm1 < _EPS):
        raise DegenerateNorm("||u||_{H^-1} underflows at some level")
    zeta = (l2 / hm1) ** 2
    return NormTrace(times=traj.time.times, l2=l2, h10=h10, hm1=hm1, zeta=zeta)


def check_energy_identities(traj: SolutionTrajectory, level: int) -> tuple[float, float]:
    """Relative residuals of the two balance laws at an interior level:

        (1/2) d/dt ||u||_2^2   + ||u||_{H1_0}^2 = <f, u>
        (1/2) d/dt ||u||_H-1^2 + ||u||_2^2      = <f, (-Lap)^{-1} u>
    """
    if not 1 <= level <= traj.time.steps - 1:
        raise IndexOutOfRange(f"level {level} not interior in time")
    g, dt = traj.grid, traj.time.dt
    um, u0, up = traj.u[level - 1], traj.u[level], traj.u[level + 1]
    f = pde_residual(traj, level).f

    dE = (weighted_inner_product(g, up, up) - weighted_inner_product(g, um, um)) / (2 * dt)
    diss = h10_norm(g, u0) ** 2
    work = weighted_inner_product(g, f, u0)
    r1 = abs(0.5 * dE + diss - work) / (abs(0.5 * dE) + abs(diss) + abs(work) + 1e-300)

    vm, v0, vp = (dirichlet_solve(g, w) for w in (um, u0, up))
    dEm = (weighted_inner_product(g, up, vp) - weighted_inner_product(g, um, vm)) / (2 * dt)
    l2sq = weighted_inner_product(g, u0, u0)
    work2 = weighted_inner_product(g, f, v0)
    r2 = abs(0.5 * dEm + l2sq - work2) / (abs(0.5 * dEm) + abs(l2sq) + abs(work2) + 1e-300)
    return r1, r2


def check_zeta_growth(trace: NormTrace, M: float, T: float) -> float:
    """M > 0: smallest rate c with zeta(t) <= e^{c M^2 t} zeta(0) for all t.
    M = 0: max positive increment of zeta (0 when nonincreasing)."""
    z = trace.zeta
    if np.any(~np.isfinite(z)) or z[0] <= 0:
        raise DegenerateNorm("zeta undefined at some level")
    if M == 0.0:
        return float(np.max(np.diff(z), initial=0.0))
    t = trace.times[1:]
    with np.errstate(divide="ignore"):
        rates = np.log(np.maximum(z[1:] / z[0], 1.0)) / (M * M * t)
    return float(np.max(rates, initial=0.0))


def check_backward_estimate(
    trace: NormTrace, M: float, T: float, rate: float = 1.0
) -> float:
    """Log-scale margin of

        ||u(0)||_{H-1}^2 <= exp(2 e^{c M^2 T}(zeta(0) + c M sqrt(zeta(0))) T)
                            ||u(T)||_{H-1}^2

    with the generic constant c = `rate` in both positions.  Positive margin
    means the bound holds."""
    h0, hT = trace.hm1[0], trace.hm1[-1]
    if h0 <= 0 or hT <= 0:
        raise DegenerateNorm("H^-1 norm vanishes at an endpoint")
    z0 = trace.zeta[0]
    expo = 2.0 * np.exp(rate * M * M * T) * (z0 + rate * M * np.sqrt(z0)) * T
    return float(expo + 2 * np.log(hT) - 2 * np.log(h0))


def check_multiplier_bound(grid: Grid, h_field, g_field, axis: int) -> float:
    """Ratio ||h * d_i g||_{H^-1} / (||h||_inf ||g||_2)."""
    h_field = _check_field(grid, h_field)
    g_field = _check_field(grid, g_field)
    _check_dirichlet(grid, g_field)
    if not 0 <= axis < grid.dim:
        raise IndexOutOfRange(f"axis {axis} out of range for dim {grid.dim}")
    gn = l2_norm(grid, g_field)
    if gn == 0.0:
        raise DegenerateNorm("multiplier ratio undefined for g = 0")
    hsup = float(np.max(np.abs(h_field)))
    if hsup == 0.0:
        return 0.0
    prod = h_field * apply_gradient(grid, g_field)[:, axis]
    return hminus1_norm(grid, prod) / (hsup * gn)
