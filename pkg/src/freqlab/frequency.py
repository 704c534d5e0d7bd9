"""Weighted frequency function of a trajectory and the estimates built on it.

With G the backward caloric weight,

    H(t) = int u^2 G dx,   D(t) = int |grad u|^2 G dx,   N = 2 D / H,

theta collects the boundary terms of D', Phi(t) = (T - t + lam)
e^{-c0 M^2 t} N(t) is the almost-monotone quantity, and K_T aggregates the
log decay ratio with geometry and coefficient terms.  Generic constants are
never inputs of truth here: c0, c1, c2 and the monotonicity constant are
fitted on calibration runs and asserted on held-out ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .caloric import CaloricWeight, eval_weight, eval_weight_gradient
from .errors import (
    DegenerateH,
    DegenerateNorm,
    IndexOutOfRange,
    InvalidGeometry,
    NotApplicable,
)
from .mesh import (
    Grid,
    ObservationBall,
    _check_dirichlet,
    _check_field,
    apply_gradient,
    boundary_flux,
    weighted_inner_product,
)
from .solver import SolutionTrajectory, pde_residual

_H_FLOOR = 1e-300


@dataclass(eq=False)
class FrequencyTrace:
    """Per-level H, D, N = 2D/H, boundary term theta and Phi."""

    weight: CaloricWeight
    rate_c0: float
    times: np.ndarray
    H: np.ndarray
    D: np.ndarray
    N: np.ndarray
    theta: np.ndarray
    Phi: np.ndarray


@dataclass(frozen=True)
class KTConstant:
    """K_T = 4 ln(||u0||^2/||u(T)||^2) + 2m/T + (c1 M^2 T^2 + c2 M T) + n/2."""

    value: float
    ratio_term: float
    geometry_term: float
    coeff_terms: float
    dim_term: float
    c1: float
    c2: float

    def __post_init__(self):
        total = self.ratio_term + self.geometry_term + self.coeff_terms + self.dim_term
        if abs(self.value - total) > 1e-12 * max(1.0, abs(total)):
            raise InvalidGeometry("K_T value is not the sum of its terms")


def _require_matching(traj: SolutionTrajectory, w: CaloricWeight):
    if w.dim != traj.grid.dim:
        raise InvalidGeometry("weight and trajectory dimension mismatch")
    if abs(w.horizon - traj.time.T) > 1e-14 * traj.time.T:
        raise InvalidGeometry("weight horizon differs from trajectory T")


def _level_hd(traj: SolutionTrajectory, w: CaloricWeight, j: int):
    g = traj.grid
    t = traj.time.times[j]
    uj = traj.u[j]
    gw = eval_weight(w, g.nodes, t)
    H = weighted_inner_product(g, uj, uj, gw)
    grad = apply_gradient(g, uj)
    D = float(np.dot(np.sum(grad * grad, axis=1) * gw, g.cell_measure))
    return H, D


def compute_theta(
    traj: SolutionTrajectory, w: CaloricWeight, level: int, reduced: bool = False
) -> float:
    """Boundary term of D': full two-integral form, or the Dirichlet-reduced
    -int (d_nu u)^2 d_nu G dsigma when reduced=True."""
    g = traj.grid
    t = traj.time.times[level]
    uj = traj.u[level]
    bidx = g.boundary_idx
    nrm = g.outward_normals
    gw_grad = eval_weight_gradient(w, g.nodes[bidx], t)
    dnu_g = np.einsum("ij,ij->i", gw_grad, nrm)
    dnu_u = boundary_flux(g, uj)
    if reduced:
        integrand = -(dnu_u**2) * dnu_g
    else:
        grad_u = apply_gradient(g, uj)[bidx]
        term1 = np.sum(grad_u * grad_u, axis=1) * dnu_g
        term2 = -2.0 * dnu_u * np.einsum("ij,ij->i", grad_u, gw_grad)
        integrand = term1 + term2
    return float(np.dot(integrand, g.surface_measure))


def compute_trace(
    traj: SolutionTrajectory,
    w: CaloricWeight,
    M: float,
    rate_c0: float = 1.0,
) -> FrequencyTrace:
    """All per-level frequency quantities; DegenerateH on underflowing H."""
    _require_matching(traj, w)
    n_lvl = traj.time.steps + 1
    times = traj.time.times
    H = np.empty(n_lvl)
    D = np.empty(n_lvl)
    theta = np.empty(n_lvl)
    for j in range(n_lvl):
        H[j], D[j] = _level_hd(traj, w, j)
        theta[j] = compute_theta(traj, w, j)
    if np.any(H < _H_FLOOR):
        raise DegenerateH("H underflows at some level (u vanishes there)")
    N = 2.0 * D / H
    s = w.horizon - times + w.shift
    Phi = s * np.exp(-rate_c0 * M * M * times) * N
    return FrequencyTrace(
        weight=w, rate_c0=rate_c0, times=times, H=H, D=D, N=N, theta=theta, Phi=Phi
    )


def check_dH_identity(
    traj: SolutionTrajectory, w: CaloricWeight, level: int
) -> float:
    """Relative residual of dH/dt = -2D + 2 int u f G at an interior level."""
    _require_matching(traj, w)
    if not 1 <= level <= traj.time.steps - 1:
        raise IndexOutOfRange(f"level {level} not interior in time")
    g = traj.grid
    dt = traj.time.dt
    Hm, _ = _level_hd(traj, w, level - 1)
    Hp, _ = _level_hd(traj, w, level + 1)
    H0, D0 = _level_hd(traj, w, level)
    if min(Hm, H0, Hp) < _H_FLOOR:
        raise DegenerateH("H underflows near the requested level")
    dHdt = (Hp - Hm) / (2 * dt)
    f = pde_residual(traj, level).f
    gw = eval_weight(w, g.nodes, traj.time.times[level])
    work = 2.0 * weighted_inner_product(g, traj.u[level], f, gw)
    rhs = -2.0 * D0 + work
    return abs(dHdt - rhs) / (abs(dHdt) + 2.0 * D0 + abs(work) + 1e-300)


def fit_monotonicity_constant(
    trace: FrequencyTrace, M: float, lam: float, T: float
) -> tuple[float, float]:
    """(rate_c0, C*) with Phi(t_{k+1}) - Phi(t_k) <= C* M^2 (T + lam) dt.

    For M = 0 the second entry is the max positive increment of
    (T - t + lam) N(t) itself (continuum statement: nonincreasing).
    """
    if trace.Phi.size < 3:
        raise NotApplicable("need at least 3 levels to fit increments")
    inc = np.diff(trace.Phi)
    if M == 0.0:
        return trace.rate_c0, float(np.max(inc, initial=0.0))
    dt = trace.times[1] - trace.times[0]
    cap = M * M * (T + lam) * dt
    return trace.rate_c0, float(np.max(inc / cap, initial=0.0))


def compute_KT(
    traj: SolutionTrajectory,
    m: float,
    M: float,
    T: float,
    c1: float = 1.0,
    c2: float = 1.0,
) -> KTConstant:
    """Aggregate constant; rates c1, c2 weight the coefficient terms."""
    sq0 = traj.l2_norm(0) ** 2
    sqT = traj.l2_norm(traj.time.steps) ** 2
    if sqT <= 0.0 or sq0 <= 0.0:
        raise DegenerateNorm("K_T needs nonzero endpoint norms")
    ratio_term = 4.0 * float(np.log(sq0 / sqT))
    geometry_term = 2.0 * m / T
    coeff_terms = c1 * M * M * T * T + c2 * M * T
    dim_term = traj.grid.dim / 2.0
    return KTConstant(
        value=ratio_term + geometry_term + coeff_terms + dim_term,
        ratio_term=ratio_term,
        geometry_term=geometry_term,
        coeff_terms=coeff_terms,
        dim_term=dim_term,
        c1=c1,
        c2=c2,
    )


def check_terminal_frequency_bound(
    trace: FrequencyTrace, K_T: KTConstant, lam: float, T: float, M: float
) -> float:
    """Margin of lam e^{-M^2 T} N(T) + n/2 <= (lam/T + 1) K_T."""
    n = trace.weight.dim
    NT = trace.N[-1]
    return float(
        (lam / T + 1.0) * K_T.value - lam * np.exp(-M * M * T) * NT - n / 2.0
    )


class HardySides(NamedTuple):
    lhs: float
    rhs: float


def check_hardy(grid: Grid, fld, lam: float, x0) -> HardySides:
    """Both sides of

        int |x-x0|^2/(8 lam) f^2 e^{-|x-x0|^2/(4 lam)}
            <= 2 lam int |grad f|^2 e^{...} + n/2 int f^2 e^{...}
    """
    fld = _check_field(grid, fld)
    _check_dirichlet(grid, fld)
    if lam <= 0:
        raise InvalidGeometry("lam must be positive")
    x0 = np.asarray(x0, dtype=float)
    d = grid.nodes - x0
    r2 = np.sum(d * d, axis=1)
    e = np.exp(-r2 / (4.0 * lam))
    lhs = float(np.dot(r2 / (8.0 * lam) * fld * fld * e, grid.cell_measure))
    grad = apply_gradient(grid, fld)
    g2 = np.sum(grad * grad, axis=1)
    rhs = float(
        2.0 * lam * np.dot(g2 * e, grid.cell_measure)
        + (grid.dim / 2.0) * np.dot(fld * fld * e, grid.cell_measure)
    )
    return HardySides(lhs=lhs, rhs=rhs)


class BallEstimate(NamedTuple):
    lhs: float        # prefactor * weighted second-moment integral
    rhs: float        # 8 e^{M^2 T} lam (lam/T + 1) K_T * ball integral
    prefactor: float
    moment: float     # int |x-x0|^2 |u|^2 e^{-|x-x0|^2/(4 lam)}
    ball: float       # int_{B_r} |u|^2 e^{-|x-x0|^2/(4 lam)}


def check_ball_estimate(
    grid: Grid,
    u_terminal,
    ball: ObservationBall,
    K_T: KTConstant,
    lam: float,
    M: float,
    T: float,
) -> BallEstimate:
    """Terminal-time ball estimate with the squared observation integrand;
    NotApplicable when the prefactor is negative."""
    u_terminal = _check_field(grid, u_terminal)
    x0 = np.asarray(ball.center)
    d = grid.nodes - x0
    r2 = np.sum(d * d, axis=1)
    e = np.exp(-r2 / (4.0 * lam))
    usq = u_terminal * u_terminal
    moment = float(np.dot(r2 * usq * e, grid.cell_measure))
    inside = r2 < ball.radius**2
    ball_int = float(np.dot(usq * e * inside, grid.cell_measure))
    coef = 8.0 * np.exp(M * M * T) * lam * (lam / T + 1.0) * K_T.value
    prefactor = 1.0 - coef / ball.radius**2
    if prefactor < 0:
        raise NotApplicable(
            f"prefactor {prefactor:.3e} negative; estimate carries no content"
        )
    return BallEstimate(
        lhs=prefactor * moment,
        rhs=coef * ball_int,
        prefactor=prefactor,
        moment=moment,
        ball=ball_int,
    )
