"""Scenario runner: solve one configured trajectory and evaluate every
registered check against it.

Each check is isolated: a module error downgrades that check to
not-applicable or error without aborting the rest.  Records are plain
dicts-of-builtins once serialized, so repeated runs of the same config
are byte-identical apart from wall time.
"""

from __future__ import annotations

import time as _time
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import caloric, frequency, mesh, norms, solver, uc
from .config import ExperimentConfig, canonical_json
from .errors import (
    DegenerateH,
    DegenerateNorm,
    FreqlabError,
    InsufficientFamily,
    NotApplicable,
    ZeroInitialData,
    ZeroObservation,
)

_NOT_APPLICABLE = (
    NotApplicable,
    DegenerateH,
    DegenerateNorm,
    ZeroInitialData,
    ZeroObservation,
    InsufficientFamily,
)

REGISTRY_NAMES = (
    "caloric_identities",
    "pde_inequality",
    "growth_assumption",
    "assumption3_ratio",
    "multiplier_assumption",
    "energy_identity_l2",
    "energy_identity_hm1",
    "zeta_growth",
    "backward_estimate",
    "dh_identity",
    "theta_sign",
    "theta_dirichlet_reduction",
    "frequency_monotonicity",
    "terminal_frequency_bound",
    "hardy_inequality",
    "ball_estimate",
    "theorem_1_1",
    "theorem_1_3",
)


@dataclass
class CheckResult:
    name: str
    status: str  # pass | fail | not-applicable | error
    margin: float | None = None
    fitted_constant: float | None = None
    note: str = ""
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "margin": _jsonable(self.margin),
            "fitted_constant": _jsonable(self.fitted_constant),
            "note": self.note,
            "extras": {k: _jsonable(v) for k, v in self.extras.items()},
        }


def _jsonable(v):
    if v is None:
        return None
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if np.isfinite(v) else None
    if isinstance(v, (np.integer, int)):
        return int(v)
    return v


@dataclass
class ResultRecord:
    scenario_id: str
    label: str
    tag: str
    config_digest: str
    params: dict
    checks: list
    traces: dict
    wall_time: float

    def to_dict(self, include_wall_time: bool = True) -> dict:
        out = {
            "scenario_id": self.scenario_id,
            "label": self.label,
            "tag": self.tag,
            "config_digest": self.config_digest,
            "params": {k: _jsonable(v) for k, v in self.params.items()},
            "checks": [c.to_dict() for c in self.checks],
            "traces": self.traces,
        }
        if include_wall_time:
            out["wall_time"] = self.wall_time
        return out

    def canonical_json(self) -> str:
        """Deterministic serialization, wall time excluded."""
        return canonical_json(self.to_dict(include_wall_time=False))

    def check(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


class ScenarioContext:
    """Shared lazily computed quantities for the checks of one scenario."""

    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.domain = mesh.Domain(
            cfg.domain.kind,
            tuple(tuple(map(float, b)) for b in cfg.domain.bounds),
        )
        self.ball = mesh.observation_ball(
            self.domain, cfg.ball.center, cfg.ball.radius
        )
        self.seed_base = int(cfg.digest()[:8], 16)

    @cached_property
    def grid(self) -> mesh.Grid:
        return mesh.build_grid(self.domain, self.cfg.grid.sizes[0])

    @cached_property
    def timegrid(self) -> solver.TimeGrid:
        return solver.TimeGrid(self.cfg.time.T, self.cfg.time.steps)

    def _coefficients(self, grid, timegrid) -> solver.CoefficientField:
        co = self.cfg.coefficients
        if co.kind == "zero":
            return solver.zero_coefficients(grid.dim)
        if co.kind == "constant":
            return solver.constant_coefficients(co.b, co.c)
        return solver.fourier_coefficients(
            grid, timegrid, co.seed, co.amplitude, n_modes=co.modes
        )

    def _initial(self, grid) -> np.ndarray:
        ini = self.cfg.initial
        if ini.kind == "zero":
            return np.zeros(grid.n_nodes)
        if ini.kind == "eigenfunction":
            u0 = solver.eigenfunction_data(grid, ini.k)
        elif ini.kind == "bump":
            u0 = solver.bump_data(grid, ini.center, ini.width)
        else:
            u0 = solver.fourier_data(
                grid, ini.seed, n_modes=ini.modes, decay=ini.decay
            )
        return ini.scale * u0

    @cached_property
    def coefficients(self) -> solver.CoefficientField:
        return self._coefficients(self.grid, self.timegrid)

    @cached_property
    def traj(self) -> solver.SolutionTrajectory:
        return solver.solve_trajectory(
            self.grid, self.timegrid, self.coefficients, self._initial(self.grid)
        )

    @cached_property
    def coarse_traj(self) -> solver.SolutionTrajectory:
        """Half-resolution companion in 2:1 node and step correspondence."""
        sizes = self.cfg.grid.sizes[0]
        halved = [(int(n) - 1) // 2 + 1 for n in sizes]
        if any((int(n) - 1) % 2 for n in sizes) or any(n < 3 for n in halved):
            raise NotApplicable("primary grid is not 2:1 halvable")
        if self.cfg.time.steps % 2 or self.cfg.time.steps < 4:
            raise NotApplicable("step count is not 2:1 halvable")
        grid_c = mesh.build_grid(self.domain, halved)
        time_c = solver.TimeGrid(self.cfg.time.T, self.cfg.time.steps // 2)
        return solver.solve_trajectory(
            grid_c, time_c, self._coefficients(grid_c, time_c), self._initial(grid_c)
        )

    @cached_property
    def norm_trace(self) -> norms.NormTrace:
        return norms.compute_norm_trace(self.traj)

    @cached_property
    def kt(self) -> frequency.KTConstant:
        return frequency.compute_KT(
            self.traj,
            self.ball.m,
            self.coefficients.M,
            self.cfg.time.T,
            c1=self.cfg.rates.c1,
            c2=self.cfg.rates.c2,
        )

    @cached_property
    def constants(self) -> uc.UCConstants:
        return uc.compute_constants(
            self.ball.m,
            self.ball.radius,
            self.coefficients.M,
            self.cfg.time.T,
            self.kt,
        )

    @cached_property
    def lam(self) -> float:
        if self.cfg.weight.policy == "fixed":
            return float(self.cfg.weight.lam)
        return self.constants.lambda_star

    @cached_property
    def weight(self) -> caloric.CaloricWeight:
        return caloric.CaloricWeight(
            center=self.ball.center, horizon=self.cfg.time.T, shift=self.lam
        )

    @cached_property
    def freq_trace(self) -> frequency.FrequencyTrace:
        return frequency.compute_trace(
            self.traj, self.weight, self.coefficients.M, rate_c0=self.cfg.rates.c0
        )

    def interior_levels(self, k: int = 9) -> list:
        steps = self.cfg.time.steps
        lv = np.unique(np.linspace(1, steps - 1, min(k, steps - 1)).round().astype(int))
        return [int(j) for j in lv]


# check implementations ------------------------------------------------------

def _check_caloric(ctx: ScenarioContext) -> CheckResult:
    tol = ctx.cfg.tolerances.caloric
    rng = np.random.default_rng(ctx.seed_base)
    bounds = np.asarray(ctx.domain.bounds)
    worst = 0.0
    for _ in range(10):
        pts = bounds[:, 0] + rng.random((100, ctx.domain.dim)) * (
            bounds[:, 1] - bounds[:, 0]
        )
        t = float(rng.random() * ctx.cfg.time.T)
        worst = max(worst, caloric.check_heat_identity(ctx.weight, pts, t))
    ok = worst <= tol
    return CheckResult(
        "caloric_identities",
        "pass" if ok else "fail",
        margin=tol - worst,
        note=f"max relative residual {worst:.3e} over 1000 samples",
    )


def _check_pde_inequality(ctx: ScenarioContext) -> CheckResult:
    tol = solver.richardson_pde_tolerance(
        ctx.traj, ctx.coarse_traj, safety=ctx.cfg.tolerances.pde_slack_safety
    )
    worst = np.inf
    for lv in ctx.interior_levels():
        worst = min(worst, float(np.min(solver.pde_residual(ctx.traj, lv).slack)))
    ok = worst >= -tol
    return CheckResult(
        "pde_inequality",
        "pass" if ok else "fail",
        margin=worst + tol,
        note=f"min slack {worst:.3e}, discretization tolerance {tol:.3e}",
        extras={"min_slack": worst, "tolerance": tol},
    )


def _check_growth(ctx: ScenarioContext) -> CheckResult:
    c_hat = solver.check_growth_assumption(ctx.traj)
    cap = ctx.cfg.tolerances.growth_cap
    ok = np.isfinite(c_hat) and c_hat <= cap
    return CheckResult(
        "growth_assumption",
        "pass" if ok else "fail",
        margin=cap - c_hat,
        fitted_constant=c_hat,
        extras={"required_rate": c_hat},
    )


def _check_assumption3(ctx: ScenarioContext) -> CheckResult:
    cap = ctx.cfg.tolerances.assumption3_cap
    worst = 0.0
    for lv in ctx.interior_levels(5):
        worst = max(worst, solver.check_assumption3(ctx.traj, lv))
    ok = worst <= cap
    return CheckResult(
        "assumption3_ratio",
        "pass" if ok else "fail",
        margin=cap - worst,
        fitted_constant=worst,
    )


def _random_bounded_field(grid: mesh.Grid, rng) -> np.ndarray:
    out = np.zeros(grid.n_nodes)
    for _ in range(3):
        mode = np.full(grid.n_nodes, rng.uniform(-1, 1))
        for (lo, hi), xa in zip(grid.domain.bounds, grid.nodes.T):
            kk = rng.integers(1, 5)
            ph = rng.uniform(0, 2 * np.pi)
            mode = mode * np.cos(kk * np.pi * (xa - lo) / (hi - lo) + ph)
        out += mode
    return out


def _check_multiplier(ctx: ScenarioContext) -> CheckResult:
    cap = ctx.cfg.tolerances.multiplier_cap
    rng = np.random.default_rng(ctx.seed_base + 1)
    grid = ctx.grid
    worst = 0.0
    for i in range(12):
        h = _random_bounded_field(grid, rng)
        g = solver.fourier_data(grid, ctx.seed_base + 100 + i)
        for ax in range(grid.dim):
            worst = max(worst, norms.check_multiplier_bound(grid, h, g, ax))
    ok = worst <= cap
    return CheckResult(
        "multiplier_assumption",
        "pass" if ok else "fail",
        margin=cap - worst,
        fitted_constant=worst,
        note="max ratio over 12 seeded field pairs",
    )


def _energy_check(ctx: ScenarioContext, which: int, name: str) -> CheckResult:
    tol = ctx.cfg.tolerances.energy
    worst = 0.0
    for lv in ctx.interior_levels(7):
        worst = max(worst, norms.check_energy_identities(ctx.traj, lv)[which])
    ok = worst <= tol
    return CheckResult(
        name,
        "pass" if ok else "fail",
        margin=tol - worst,
        note=f"max relative residual {worst:.3e}",
    )


def _check_energy_l2(ctx):
    return _energy_check(ctx, 0, "energy_identity_l2")


def _check_energy_hm1(ctx):
    return _energy_check(ctx, 1, "energy_identity_hm1")


def _check_zeta(ctx: ScenarioContext) -> CheckResult:
    M, T = ctx.coefficients.M, ctx.cfg.time.T
    val = norms.check_zeta_growth(ctx.norm_trace, M, T)
    z0 = float(ctx.norm_trace.zeta[0])
    if M == 0.0:
        tol = ctx.cfg.tolerances.zeta_m0 * z0
        ok = val <= tol
        return CheckResult(
            "zeta_growth",
            "pass" if ok else "fail",
            margin=tol - val,
            note=f"max positive increment {val:.3e} against scale {z0:.3e}",
            extras={"zeta0": z0},
        )
    rate = ctx.cfg.rates.zeta
    ok = np.isfinite(val) and val <= rate
    return CheckResult(
        "zeta_growth",
        "pass" if ok else "fail",
        margin=rate - val,
        fitted_constant=val,
        extras={"required_rate": val, "zeta0": z0},
    )


def _backward_required_rate(trace, M, T) -> float:
    """Smallest generic rate closing the backward estimate (0 if rate-free)."""
    if norms.check_backward_estimate(trace, M, T, rate=0.0) >= 0.0:
        return 0.0
    lo, hi = 0.0, 1.0
    while norms.check_backward_estimate(trace, M, T, rate=hi) < 0.0:
        hi *= 2.0
        if hi > 1e6:
            return float("inf")
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if norms.check_backward_estimate(trace, M, T, rate=mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return hi


def _check_backward(ctx: ScenarioContext) -> CheckResult:
    M, T = ctx.coefficients.M, ctx.cfg.time.T
    rate = ctx.cfg.rates.backward
    margin = norms.check_backward_estimate(ctx.norm_trace, M, T, rate=rate)
    z0 = float(ctx.norm_trace.zeta[0])
    scale = 2.0 * np.exp(rate * M * M * T) * (z0 + rate * M * np.sqrt(z0)) * T
    tol = ctx.cfg.tolerances.backward_m0 * scale
    ok = margin >= -tol
    extras = {"zeta0": z0}
    fitted = None
    if M > 0.0:
        fitted = _backward_required_rate(ctx.norm_trace, M, T)
        extras["required_rate"] = fitted
    return CheckResult(
        "backward_estimate",
        "pass" if ok else "fail",
        margin=float(margin),
        fitted_constant=fitted,
        note=f"log-scale margin {margin:.3e}, tolerance {tol:.3e}",
        extras=extras,
    )


def _check_dh(ctx: ScenarioContext) -> CheckResult:
    tol = ctx.cfg.tolerances.dh_identity
    worst = 0.0
    for lv in ctx.interior_levels(7):
        worst = max(worst, frequency.check_dH_identity(ctx.traj, ctx.weight, lv))
    ok = worst <= tol
    return CheckResult(
        "dh_identity",
        "pass" if ok else "fail",
        margin=tol - worst,
        note=f"max relative residual {worst:.3e}",
    )


def _theta_levels(ctx: ScenarioContext) -> list:
    steps = ctx.cfg.time.steps
    lv = np.unique(np.linspace(0, steps, min(7, steps + 1)).round().astype(int))
    return [int(j) for j in lv]


def _theta_scale(ctx: ScenarioContext, level: int) -> float:
    g = ctx.grid
    t = ctx.timegrid.times[level]
    bidx = g.boundary_idx
    gw = caloric.eval_weight_gradient(ctx.weight, g.nodes[bidx], t)
    dnu_g = np.einsum("ij,ij->i", gw, g.outward_normals)
    dnu_u = mesh.boundary_flux(g, ctx.traj.u[level])
    return float(np.dot(dnu_u**2 * np.abs(dnu_g), g.surface_measure))


def _check_theta_sign(ctx: ScenarioContext) -> CheckResult:
    tol = ctx.cfg.tolerances.theta_sign
    worst = np.inf
    for lv in _theta_levels(ctx):
        th = frequency.compute_theta(ctx.traj, ctx.weight, lv, reduced=True)
        scale = max(_theta_scale(ctx, lv), 1e-300)
        worst = min(worst, th / scale)
    ok = worst >= -tol
    return CheckResult(
        "theta_sign",
        "pass" if ok else "fail",
        margin=float(worst + tol),
        note=f"min normalized reduced boundary term {worst:.3e}",
    )


def _check_theta_reduction(ctx: ScenarioContext) -> CheckResult:
    tol = ctx.cfg.tolerances.theta_reduction
    worst = 0.0
    for lv in _theta_levels(ctx):
        full = frequency.compute_theta(ctx.traj, ctx.weight, lv, reduced=False)
        red = frequency.compute_theta(ctx.traj, ctx.weight, lv, reduced=True)
        scale = max(abs(full), abs(red), 1e-300)
        worst = max(worst, abs(full - red) / scale)
    ok = worst <= tol
    return CheckResult(
        "theta_dirichlet_reduction",
        "pass" if ok else "fail",
        margin=tol - worst,
        note=f"max relative gap {worst:.3e} between full and reduced forms",
    )


def _check_monotonicity(ctx: ScenarioContext) -> CheckResult:
    M, T = ctx.coefficients.M, ctx.cfg.time.T
    _, cstar = frequency.fit_monotonicity_constant(ctx.freq_trace, M, ctx.lam, T)
    if M == 0.0:
        scale = max(float(ctx.freq_trace.Phi[0]), 1e-300)
        tol = ctx.cfg.tolerances.monotonicity_m0 * scale
        ok = cstar <= tol
        return CheckResult(
            "frequency_monotonicity",
            "pass" if ok else "fail",
            margin=tol - cstar,
            note=f"max Phi increment {cstar:.3e} against Phi(0) {scale:.3e}",
        )
    cap = ctx.cfg.tolerances.monotonicity_cap
    ok = np.isfinite(cstar) and cstar <= cap
    return CheckResult(
        "frequency_monotonicity",
        "pass" if ok else "fail",
        margin=cap - cstar,
        fitted_constant=cstar,
        extras={"required_rate": cstar},
    )


def _terminal_required_rate(ctx: ScenarioContext) -> float | None:
    """Common scale on the two coefficient rates that zeroes the margin."""
    M, T = ctx.coefficients.M, ctx.cfg.time.T
    if M == 0.0:
        return None
    base = ctx.kt.value - ctx.kt.coeff_terms
    lam = ctx.lam
    NT = float(ctx.freq_trace.N[-1])
    need = lam * np.exp(-M * M * T) * NT + ctx.grid.dim / 2.0
    denom = (lam / T + 1.0) * (M * M * T * T + M * T)
    return max(0.0, (need - (lam / T + 1.0) * base) / denom)


def _check_terminal(ctx: ScenarioContext) -> CheckResult:
    M, T = ctx.coefficients.M, ctx.cfg.time.T
    margin = frequency.check_terminal_frequency_bound(
        ctx.freq_trace, ctx.kt, ctx.lam, T, M
    )
    tol = ctx.cfg.tolerances.terminal_margin
    ok = margin >= -tol
    req = _terminal_required_rate(ctx)
    extras = {} if req is None else {"required_rate": req}
    return CheckResult(
        "terminal_frequency_bound",
        "pass" if ok else "fail",
        margin=float(margin),
        fitted_constant=req,
        extras=extras,
    )


def _check_hardy(ctx: ScenarioContext) -> CheckResult:
    uT = ctx.traj.u[-1]
    sides = frequency.check_hardy(ctx.grid, uT, ctx.lam, ctx.ball.center)
    scale = max(sides.rhs, 1e-300)
    margin = (sides.rhs - sides.lhs) / scale
    ok = sides.lhs <= sides.rhs * (1.0 + 1e-12) + 1e-300
    return CheckResult(
        "hardy_inequality",
        "pass" if ok else "fail",
        margin=float(margin),
        fitted_constant=float(sides.lhs / scale),
    )


def _check_ball(ctx: ScenarioContext) -> CheckResult:
    M, T = ctx.coefficients.M, ctx.cfg.time.T
    be = frequency.check_ball_estimate(
        ctx.grid, ctx.traj.u[-1], ctx.ball, ctx.kt, ctx.lam, M, T
    )
    scale = max(be.rhs, 1e-300)
    ok = be.lhs <= be.rhs + 1e-12 * max(be.rhs, be.moment)
    return CheckResult(
        "ball_estimate",
        "pass" if ok else "fail",
        margin=float((be.rhs - be.lhs) / scale),
        fitted_constant=float(be.lhs / scale),
        extras={"prefactor": be.prefactor},
    )


def _theorem_result(ctx: ScenarioContext, name: str, rep: uc.UCReport,
                    log_ref: float) -> CheckResult:
    cap = ctx.cfg.tolerances.theorem_cap
    log_cap = np.log(cap) + log_ref
    margin = log_cap - rep.log_fitted_C
    ok = bool(margin >= 0.0) or rep.lhs == 0.0
    extras = {
        "lhs": rep.lhs,
        "global0": rep.global0,
        "obs": rep.obs,
        "gamma": rep.gamma,
        "log_bound": rep.log_bound,
        "log_margin": rep.log_margin,
        "log_fitted_C": rep.log_fitted_C,
        "printed_exponent_argument": rep.printed_exponent_argument,
    }
    return CheckResult(
        name,
        "pass" if ok else "fail",
        margin=float(margin),
        fitted_constant=rep.fitted_C,
        note=f"log fitted constant {rep.log_fitted_C:.6e}, log cap {log_cap:.6e}",
        extras=extras,
    )


def _check_theorem_1_1(ctx: ScenarioContext) -> CheckResult:
    rep = uc.verify_theorem_1_1(ctx.traj, ctx.ball, ctx.constants)
    return _theorem_result(
        ctx, "theorem_1_1", rep, ctx.cfg.tolerances.theorem11_log_ref
    )


def _check_theorem_1_3(ctx: ScenarioContext) -> CheckResult:
    z0 = float(ctx.norm_trace.zeta[0])
    rep = uc.verify_theorem_1_3(
        ctx.traj, ctx.ball, ctx.constants, z0, bw_rate=ctx.cfg.rates.backward
    )
    return _theorem_result(
        ctx, "theorem_1_3", rep, ctx.cfg.tolerances.theorem13_log_ref
    )


_REGISTRY = {
    "caloric_identities": _check_caloric,
    "pde_inequality": _check_pde_inequality,
    "growth_assumption": _check_growth,
    "assumption3_ratio": _check_assumption3,
    "multiplier_assumption": _check_multiplier,
    "energy_identity_l2": _check_energy_l2,
    "energy_identity_hm1": _check_energy_hm1,
    "zeta_growth": _check_zeta,
    "backward_estimate": _check_backward,
    "dh_identity": _check_dh,
    "theta_sign": _check_theta_sign,
    "theta_dirichlet_reduction": _check_theta_reduction,
    "frequency_monotonicity": _check_monotonicity,
    "terminal_frequency_bound": _check_terminal,
    "hardy_inequality": _check_hardy,
    "ball_estimate": _check_ball,
    "theorem_1_1": _check_theorem_1_1,
    "theorem_1_3": _check_theorem_1_3,
}

if tuple(_REGISTRY) != REGISTRY_NAMES:  # registry self-audit
    raise RuntimeError("check registry does not match the declared name list")


def registry_names() -> tuple:
    return REGISTRY_NAMES


def _downsample(arr, idx) -> list:
    return [float(arr[i]) for i in idx]


def _collect_traces(ctx: ScenarioContext) -> dict:
    steps = ctx.cfg.time.steps
    idx = np.unique(np.linspace(0, steps, min(steps + 1, 65)).round().astype(int))
    out = {"times": [float(ctx.timegrid.times[i]) for i in idx]}
    try:
        ft = ctx.freq_trace
        for key in ("H", "D", "N", "theta", "Phi"):
            out[key] = _downsample(getattr(ft, key), idx)
    except FreqlabError:
        pass
    try:
        nt = ctx.norm_trace
        for key in ("l2", "h10", "hm1", "zeta"):
            out[key] = _downsample(getattr(nt, key), idx)
    except FreqlabError:
        pass
    return out


def run_scenario(
    cfg: ExperimentConfig, tag: str = "single", checks=None
) -> ResultRecord:
    """Solve the configured scenario and evaluate the requested checks
    (all registered ones by default), isolating failures per check."""
    t0 = _time.perf_counter()
    names = REGISTRY_NAMES if checks is None else tuple(checks)
    for nm in names:
        if nm not in _REGISTRY:
            raise NotApplicable(f"unknown check {nm!r}")
    ctx = ScenarioContext(cfg)
    results = []
    for nm in names:
        try:
            results.append(_REGISTRY[nm](ctx))
        except _NOT_APPLICABLE as exc:
            results.append(CheckResult(nm, "not-applicable", note=str(exc)))
        except FreqlabError as exc:
            results.append(
                CheckResult(nm, "error", note=f"{type(exc).__name__}: {exc}")
            )
    try:
        lam = ctx.lam
    except FreqlabError:
        lam = None
    try:
        gamma = ctx.constants.gamma
    except FreqlabError:
        gamma = None
    params = {
        "grid": "x".join(str(int(n)) for n in cfg.grid.sizes[0]),
        "dt": ctx.timegrid.dt,
        "M": ctx.coefficients.M,
        "T": cfg.time.T,
        "lambda": lam,
        "gamma": gamma,
        "steps": cfg.time.steps,
        "dim": ctx.domain.dim,
    }
    record = ResultRecord(
        scenario_id=cfg.scenario_id,
        label=cfg.label,
        tag=tag,
        config_digest=cfg.digest(),
        params=params,
        checks=results,
        traces=_collect_traces(ctx),
        wall_time=_time.perf_counter() - t0,
    )
    return record


def worst_status(records) -> str:
    """Aggregate exit status over records: error > fail > pass."""
    seen = set()
    for rec in records:
        for c in rec.checks:
            seen.add(c.status)
    if "error" in seen:
        return "error"
    if "fail" in seen:
        return "fail"
    return "pass"
