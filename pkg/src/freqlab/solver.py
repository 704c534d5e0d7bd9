"""Crank-Nicolson solver for the drift-reaction heat equation

    du/dt = Lap u - b . grad u - c u,   u = 0 on the boundary,

whose solutions satisfy |du/dt - Lap u| <= M (|grad u| + |u|) with
M = max of the sup norms of the b_i and c.  Coefficients are sampled at
half-step times (semi-implicit trapezoidal treatment); advection uses
second-order central differences to preserve the adjoint structure the
frequency identities rely on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import LinearOperator, bicgstab, splu

from .errors import (
    DegenerateNorm,
    IndexOutOfRange,
    Instability,
    InvalidGeometry,
    LinearSolveFailure,
    NotApplicable,
    ShapeMismatch,
)
from .mesh import (
    Grid,
    _check_dirichlet,
    _check_field,
    apply_gradient,
    apply_laplacian,
    weighted_inner_product,
)

_BLOWUP_FACTOR = 1e6


@dataclass(frozen=True)
class TimeGrid:
    """Uniform partition of [0, T] into `steps` intervals."""

    T: float
    steps: int

    def __post_init__(self):
        if not (self.T > 0 and np.isfinite(self.T)):
            raise InvalidGeometry("final time T must be positive")
        if self.steps < 1:
            raise InvalidGeometry("need at least one time step")

    @property
    def dt(self) -> float:
        return self.T / self.steps

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.T, self.steps + 1)

    @property
    def half_times(self) -> np.ndarray:
        return (np.arange(self.steps) + 0.5) * self.dt


@dataclass(eq=False)
class CoefficientField:
    """Sampled drift b and potential c with their exact sup bound M.

    b has shape (S, N, dim) and c has shape (S, N), where the leading axis
    runs over half-step times and either axis may be 1 for fields constant
    in that direction (broadcast storage).  M is the max absolute sample,
    so |b_i|, |c| <= M holds exactly on the sample set.
    """

    kind: str
    b: np.ndarray
    c: np.ndarray
    M: float
    seed: int | None = None
    amplitude: float | None = None

    def __post_init__(self):
        if not (np.all(np.isfinite(self.b)) and np.all(np.isfinite(self.c))):
            raise InvalidGeometry("coefficient samples must be finite")
        sampled = max(
            float(np.max(np.abs(self.b), initial=0.0)),
            float(np.max(np.abs(self.c), initial=0.0)),
        )
        if abs(self.M - sampled) > 1e-12 * max(1.0, sampled):
            raise InvalidGeometry(
                f"declared M={self.M} does not match max sample {sampled}"
            )

    @property
    def stationary(self) -> bool:
        return self.b.shape[0] == 1 and self.c.shape[0] == 1

    def b_at(self, j: int, n_nodes: int, dim: int) -> np.ndarray:
        step = self.b[j if self.b.shape[0] > 1 else 0]
        return np.broadcast_to(step, (n_nodes, dim))

    def c_at(self, j: int, n_nodes: int) -> np.ndarray:
        step = self.c[j if self.c.shape[0] > 1 else 0]
        return np.broadcast_to(step, (n_nodes,))


def zero_coefficients(dim: int) -> CoefficientField:
    return CoefficientField(
        kind="zero",
        b=np.zeros((1, 1, dim)),
        c=np.zeros((1, 1)),
        M=0.0,
    )


def constant_coefficients(b, c: float) -> CoefficientField:
    b = np.asarray(b, dtype=float).reshape(1, 1, -1)
    M = max(float(np.max(np.abs(b))), abs(float(c)))
    return CoefficientField(
        kind="constant", b=b, c=np.full((1, 1), float(c)), M=M
    )


def fourier_coefficients(
    grid: Grid,
    time: TimeGrid,
    seed: int,
    amplitude: float,
    n_modes: int = 3,
) -> CoefficientField:
    """Seeded truncated-Fourier drift/potential, sup-bounded by amplitude.

    Each scalar field is amplitude * sum_k a_k prod_axis sin/cos * cos(w_k t
    + phase) with the a_k normalized in l1, so every sample is within
    [-amplitude, amplitude]; M is then measured exactly on the samples.
    """
    if amplitude < 0:
        raise InvalidGeometry("amplitude must be nonnegative")
    rng = np.random.default_rng(seed)
    th = time.half_times
    x = grid.nodes
    dim = grid.dim

    def scalar_field():
        out = np.zeros((time.steps, grid.n_nodes))
        a = rng.uniform(-1.0, 1.0, size=n_modes)
        a /= max(np.sum(np.abs(a)), 1e-30)
        for k in range(n_modes):
            spatial = np.ones(grid.n_nodes)
            for ax, (lo, hi) in enumerate(grid.domain.bounds):
                kk = rng.integers(1, 4)
                phase = rng.uniform(0, 2 * np.pi)
                spatial *= np.sin(
                    kk * np.pi * (x[:, ax] - lo) / (hi - lo) + phase
                )
            w = rng.uniform(0, 2 * np.pi / max(time.T, 1e-30))
            tphase = rng.uniform(0, 2 * np.pi)
            out += a[k] * spatial[None, :] * np.cos(w * th + tphase)[:, None]
        return amplitude * out

    b = np.stack([scalar_field() for _ in range(dim)], axis=2)
    c = scalar_field()
    M = max(
        float(np.max(np.abs(b), initial=0.0)),
        float(np.max(np.abs(c), initial=0.0)),
    )
    return CoefficientField(
        kind="fourier-random", b=b, c=c, M=M, seed=seed, amplitude=amplitude
    )


@dataclass(eq=False)
class SolutionTrajectory:
    """Time-indexed discrete solution; u[j] is the field at level j."""

    grid: Grid
    time: TimeGrid
    u: np.ndarray  # (steps + 1, n_nodes)
    coefficients: CoefficientField

    def level(self, j: int) -> np.ndarray:
        if not 0 <= j <= self.time.steps:
            raise IndexOutOfRange(f"level {j} outside 0..{self.time.steps}")
        return self.u[j]

    def l2_norm(self, j: int) -> float:
        uj = self.level(j)
        return float(np.sqrt(weighted_inner_product(self.grid, uj, uj)))

    def scaled(self, alpha: float) -> "SolutionTrajectory":
        return SolutionTrajectory(
            self.grid, self.time, alpha * self.u, self.coefficients
        )


def _gradient_matrices(grid: Grid) -> list[sparse.csr_matrix]:
    """Central-difference first-derivative matrices, full size; rows at
    axis ends are one-sided but never used on interior rows."""
    mats = []
    for a, (n, ha) in enumerate(zip(grid.points_per_axis, grid.h)):
        d1 = sparse.lil_matrix((n, n))
        for i in range(1, n - 1):
            d1[i, i - 1] = -1.0
            d1[i, i + 1] = 1.0
        d1[0, :3] = [-3.0, 4.0, -1.0]
        d1[n - 1, n - 3:] = [1.0, -4.0, 3.0]
        d1 = (d1 / (2 * ha)).tocsr()
        eyes = [sparse.identity(m, format="csr") for m in grid.points_per_axis]
        eyes[a] = d1
        term = eyes[0]
        for m in eyes[1:]:
            term = sparse.kron(term, m, format="csr")
        mats.append(term.tocsr())
    return mats


def _interior_operator(grid: Grid, coeff: CoefficientField, j: int,
                       grad_mats) -> sparse.csr_matrix:
    """Lap - b.grad - c restricted to interior nodes at half-step j."""
    ii = grid.interior_idx
    P = grid.laplacian[ii][:, ii].tocsr()
    b = coeff.b_at(j, grid.n_nodes, grid.dim)
    c = coeff.c_at(j, grid.n_nodes)
    for a, Ga in enumerate(grad_mats):
        ba = b[ii, a]
        if np.any(ba):
            P = P - sparse.diags(ba) @ Ga[ii][:, ii]
    if np.any(c[ii]):
        P = P - sparse.diags(c[ii])
    return P.tocsr()


def _solve_step_direct(lhs, rhs_vec, factor_cache):
    key = id(lhs)
    if factor_cache.get("key") != key:
        factor_cache["key"] = key
        factor_cache["lu"] = splu(lhs.tocsc())
    return factor_cache["lu"].solve(rhs_vec)


def _solve_step_iterative(lhs, rhs_vec):
    if not np.any(rhs_vec):
        return np.zeros_like(rhs_vec)
    d = lhs.diagonal()
    pre = LinearOperator(lhs.shape, matvec=lambda v: v / d)
    x, info = bicgstab(lhs, rhs_vec, rtol=1e-12, atol=0.0, maxiter=2000, M=pre)
    if info != 0:
        raise LinearSolveFailure(f"bicgstab failed to reach 1e-12 (info={info})")
    return x


def solve_trajectory(
    grid: Grid,
    time: TimeGrid,
    coefficients: CoefficientField,
    u0,
) -> SolutionTrajectory:
    """Crank-Nicolson march; one sparse solve per step.

    Raises Instability if any level's L2 norm exceeds 1e6 times the
    initial one, LinearSolveFailure on a nonconverged step.
    """
    u0 = _check_field(grid, u0)
    _check_dirichlet(grid, u0)
    if coefficients.b.shape[-1] != grid.dim:
        raise ShapeMismatch("coefficient drift dimension does not match grid")

    ii = grid.interior_idx
    dt = time.dt
    n_int = ii.size
    eye = sparse.identity(n_int, format="csr")
    # drift-free runs never touch the gradient matrices
    grad_mats = (
        _gradient_matrices(grid)
        if np.any(coefficients.b)
        else [None] * grid.dim
    )

    u = np.zeros((time.steps + 1, grid.n_nodes))
    u[0] = u0
    norm0 = float(np.sqrt(weighted_inner_product(grid, u0, u0)))
    direct = grid.dim == 1
    cache: dict = {}
    lhs = rhs_mat = None
    for j in range(time.steps):
        if j == 0 or not coefficients.stationary:
            P = _interior_operator(grid, coefficients, j, grad_mats)
            lhs = (eye - (dt / 2.0) * P).tocsr()
            rhs_mat = (eye + (dt / 2.0) * P).tocsr()
        rhs_vec = rhs_mat @ u[j, ii]
        if direct:
            x = _solve_step_direct(lhs, rhs_vec, cache)
        else:
            x = _solve_step_iterative(lhs, rhs_vec)
        u[j + 1, ii] = x
        if norm0 > 0:
            nj = float(
                np.sqrt(weighted_inner_product(grid, u[j + 1], u[j + 1]))
            )
            if nj > _BLOWUP_FACTOR * norm0:
                raise Instability(
                    f"L2 norm grew past {_BLOWUP_FACTOR:g} x initial at step {j+1}"
                )
    if not np.all(np.isfinite(u)):
        raise Instability("non-finite values in trajectory")
    return SolutionTrajectory(grid=grid, time=time, u=u, coefficients=coefficients)


class PDEResidual(NamedTuple):
    """f = du/dt - Lap u as a node field, plus the pointwise inequality
    slack M(|grad u| + |u|) - |f| at interior nodes."""

    f: np.ndarray
    slack: np.ndarray


def pde_residual(traj: SolutionTrajectory, level: int) -> PDEResidual:
    """Discrete f at an interior time level (central difference in time)."""
    if not 1 <= level <= traj.time.steps - 1:
        raise IndexOutOfRange(
            f"level {level} has no central time difference (1..{traj.time.steps - 1})"
        )
    g, dt = traj.grid, traj.time.dt
    ul = traj.u[level]
    dudt = (traj.u[level + 1] - traj.u[level - 1]) / (2 * dt)
    f = dudt - apply_laplacian(g, ul)
    grad = apply_gradient(g, ul)
    gn = np.sqrt(np.sum(grad * grad, axis=1))
    M = traj.coefficients.M
    slack = (M * (gn + np.abs(ul)) - np.abs(f))[g.interior_idx]
    return PDEResidual(f=f, slack=slack)


def restrict_to_coarse(grid_f: Grid, grid_c: Grid, fld) -> np.ndarray:
    """Sample a fine-grid field at the nodes of a 2:1 coarser grid."""
    fld = _check_field(grid_f, fld)
    for nf, nc in zip(grid_f.points_per_axis, grid_c.points_per_axis):
        if nf != 2 * nc - 1:
            raise InvalidGeometry("grids are not in 2:1 node correspondence")
    uf = fld.reshape(grid_f.points_per_axis, order="C")
    sl = tuple(slice(0, None, 2) for _ in grid_f.points_per_axis)
    return uf[sl].reshape(-1, order="C")


def richardson_pde_tolerance(
    traj_fine: SolutionTrajectory,
    traj_coarse: SolutionTrajectory,
    levels_coarse=None,
    safety: float = 2.0,
) -> float:
    """Estimate the discretization error of f by comparing fine and 2:1
    coarse residuals at coincident nodes and times (order-2 Richardson)."""
    tf, tc = traj_fine.time, traj_coarse.time
    if tf.steps != 2 * tc.steps or abs(tf.T - tc.T) > 1e-14 * tc.T:
        raise InvalidGeometry("time grids are not in 2:1 correspondence")
    if levels_coarse is None:
        q = max(tc.steps // 4, 1)
        levels_coarse = sorted({q, tc.steps // 2, tc.steps - q, 1, tc.steps - 1})
    worst = 0.0
    for lc in levels_coarse:
        if not 1 <= lc <= tc.steps - 1:
            continue
        ff = pde_residual(traj_fine, 2 * lc).f
        fc = pde_residual(traj_coarse, lc).f
        ff_c = restrict_to_coarse(traj_fine.grid, traj_coarse.grid, ff)
        worst = max(worst, float(np.max(np.abs(ff_c - fc))))
    scale = float(np.max(np.abs(traj_fine.u), initial=0.0))
    return safety * worst / 3.0 + 1e-12 * max(1.0, scale)


def check_growth_assumption(traj: SolutionTrajectory) -> float:
    """Fitted rate c_hat with ||u(T)||^2 <= e^{c_hat M (T-t)} ||u(t)||^2.

    Returns 0 for M = 0 (the bound degenerates to monotone decay) and for
    trajectories whose squared norm never grows toward T.
    """
    sq = np.array(
        [weighted_inner_product(traj.grid, uj, uj) for uj in traj.u]
    )
    if sq[-1] == 0.0:
        return 0.0
    if np.any(sq[:-1] == 0.0):
        raise DegenerateNorm("||u(t)|| = 0 at an earlier level while ||u(T)|| > 0")
    M = traj.coefficients.M
    if M == 0.0:
        return 0.0
    times = traj.time.times
    ratios = sq[-1] / sq[:-1]
    gaps = traj.time.T - times[:-1]
    with np.errstate(divide="ignore"):
        rates = np.log(np.maximum(ratios, 1.0)) / (M * gaps)
    return float(np.max(rates, initial=0.0))


def check_assumption3(traj: SolutionTrajectory, level: int) -> float:
    """Ratio ||f||_{H^-1} / (M ||u||_2) at an interior time level."""
    from .norms import hminus1_norm

    M = traj.coefficients.M
    if M == 0.0:
        raise NotApplicable("ratio undefined for M = 0")
    f = pde_residual(traj, level).f
    ul = traj.u[level]
    un = float(np.sqrt(weighted_inner_product(traj.grid, ul, ul)))
    fn = hminus1_norm(traj.grid, f)
    if un == 0.0:
        if fn == 0.0:
            return 0.0
        raise DegenerateNorm("||u|| = 0 with nonzero residual")
    return fn / (M * un)


# initial-data factories ----------------------------------------------------

def eigenfunction_data(grid: Grid, k) -> np.ndarray:
    """Product of per-axis Dirichlet eigenfunctions sin(k pi (x-lo)/L)."""
    k = np.atleast_1d(k).astype(int)
    if k.size != grid.dim or np.any(k < 1):
        raise InvalidGeometry("need one positive mode number per axis")
    out = np.ones(grid.n_nodes)
    for ka, (lo, hi), xa in zip(k, grid.domain.bounds, grid.nodes.T):
        out *= np.sin(ka * np.pi * (xa - lo) / (hi - lo))
    # exact zeros on the boundary, immune to sin() rounding
    out[grid.boundary_idx] = 0.0
    return out


def bump_data(grid: Grid, center, width: float) -> np.ndarray:
    """Smooth compactly supported bump exp(1 - 1/(1 - rho^2)), rho = |x-c|/width."""
    center = np.asarray(center, dtype=float)
    if center.size != grid.dim:
        raise InvalidGeometry("bump center dimension mismatch")
    if width <= 0:
        raise InvalidGeometry("bump width must be positive")
    for cc, (lo, hi) in zip(center, grid.domain.bounds):
        if not (lo < cc - width and cc + width < hi):
            raise InvalidGeometry("bump support touches the boundary")
    rho2 = np.sum((grid.nodes - center) ** 2, axis=1) / width**2
    out = np.zeros(grid.n_nodes)
    inside = rho2 < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - rho2[inside]))
    return out


def fourier_data(
    grid: Grid, seed: int, n_modes: int = 8, decay: float = 2.0
) -> np.ndarray:
    """Seeded random smooth Dirichlet field, unit L2 norm."""
    rng = np.random.default_rng(seed)
    out = np.zeros(grid.n_nodes)
    for k in range(1, n_modes + 1):
        amp = rng.standard_normal() / k**decay
        mode = np.ones(grid.n_nodes)
        for (lo, hi), xa in zip(grid.domain.bounds, grid.nodes.T):
            mode *= np.sin(k * np.pi * (xa - lo) / (hi - lo))
        out += amp * mode
    out[grid.boundary_idx] = 0.0
    nrm = np.sqrt(weighted_inner_product(grid, out, out))
    if nrm == 0.0:
        raise DegenerateNorm("random field degenerated to zero")
    return out / nrm
