"""Parameter sweeps with a calibration / hold-out split.

Members are the cartesian product of the sweep axes, enumerated
deterministically; even indices calibrate the generic constants, odd
indices are held out and judged against the calibrated values.  Fitted
rates get a factor-2 headroom before the hold-out assertion; the theorem
closing constants get a factor-10 cap relative to the calibration
maximum.
"""

from __future__ import annotations

import copy
import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from types import SimpleNamespace

import numpy as np

from . import uc
from .config import ExperimentConfig, canonical_json, config_from_dict
from .errors import InsufficientFamily, ValidationError
from .runner import CheckResult, REGISTRY_NAMES, ResultRecord, run_scenario

RATE_HEADROOM = 2.0


@dataclass
class SweepResult:
    records: list
    summary: dict = field(default_factory=dict)


def _set_path(raw: dict, path: str, value) -> None:
    keys = path.split(".")
    node = raw
    for k in keys[:-1]:
        node = node.setdefault(k, {})
        if not isinstance(node, dict):
            raise ValidationError(f"axis path {path!r} does not name a table entry")
    node[keys[-1]] = value


def build_members(template: ExperimentConfig, axes: dict) -> list:
    """Cartesian product of the axes applied to the template, in axis
    declaration order with the first axis slowest."""
    if not axes:
        raise InsufficientFamily("sweep needs at least one axis")
    for key, values in axes.items():
        if not values:
            raise InsufficientFamily(f"axis {key!r} has no values")
    keys = list(axes)
    members = []
    for combo in itertools.product(*(axes[k] for k in keys)):
        raw = copy.deepcopy(template.to_dict())
        for key, value in zip(keys, combo):
            _set_path(raw, key, value)
        cfg = config_from_dict(raw)
        suffix = "-".join(_axis_token(v) for v in combo)
        cfg.label = f"{template.label}-{suffix}"
        members.append(cfg)
    return members


def _axis_token(value) -> str:
    if isinstance(value, (list, tuple)):
        return "x".join(_axis_token(v) for v in value)
    return str(value).replace(".", "p")


def _error_record(cfg: ExperimentConfig, tag: str, exc: Exception) -> ResultRecord:
    note = f"{type(exc).__name__}: {exc}"
    return ResultRecord(
        scenario_id=cfg.scenario_id,
        label=cfg.label,
        tag=tag,
        config_digest=cfg.digest(),
        params={
            "grid": "x".join(str(int(n)) for n in cfg.grid.sizes[0]),
            "dt": cfg.time.T / cfg.time.steps,
            "M": None,
            "T": cfg.time.T,
            "lambda": None,
            "gamma": None,
            "steps": cfg.time.steps,
            "dim": len(cfg.domain.bounds),
        },
        checks=[CheckResult(nm, "error", note=note) for nm in REGISTRY_NAMES],
        traces={"times": []},
        wall_time=0.0,
    )


def _run_batch(jobs, workers, on_complete=None) -> list:
    """Run (index, cfg, tag) jobs concurrently; results come back in job
    order, with a completion hook for incremental persistence."""

    def one(job):
        idx, cfg, tag = job
        try:
            return idx, run_scenario(cfg, tag=tag)
        except Exception as exc:  # member isolation: keep partial results
            return idx, _error_record(cfg, tag, exc)

    out = []
    if workers <= 1 or len(jobs) <= 1:
        for idx, rec in map(one, jobs):
            out.append(rec)
            if on_complete:
                on_complete(idx, rec)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for idx, rec in pool.map(one, jobs):
                out.append(rec)
                if on_complete:
                    on_complete(idx, rec)
    return out


def _max_extra(records, check_name: str, key: str):
    vals = []
    for rec in records:
        try:
            c = rec.check(check_name)
        except KeyError:
            continue
        v = c.extras.get(key)
        if v is not None and np.isfinite(v):
            vals.append(float(v))
    return max(vals) if vals else None


def calibrate(records, template: ExperimentConfig) -> dict:
    """Fitted generic constants from calibration records: rate fits with
    factor-2 headroom, theorem references at the calibration maximum."""
    tol = template.tolerances
    fitted = {}
    req = _max_extra(records, "zeta_growth", "required_rate")
    if req is not None:
        fitted["zeta"] = max(RATE_HEADROOM * req, template.rates.zeta)
    req = _max_extra(records, "backward_estimate", "required_rate")
    if req is not None:
        fitted["backward"] = max(RATE_HEADROOM * req, template.rates.backward)
    req = _max_extra(records, "terminal_frequency_bound", "required_rate")
    if req is not None:
        scale = max(RATE_HEADROOM * req, 1.0)
        fitted["c1"] = scale * template.rates.c1
        fitted["c2"] = scale * template.rates.c2
    req = _max_extra(records, "frequency_monotonicity", "required_rate")
    if req is not None:
        fitted["monotonicity_cap"] = max(
            RATE_HEADROOM * req, tol.monotonicity_cap
        )
    req = _max_extra(records, "growth_assumption", "required_rate")
    if req is not None:
        fitted["growth_cap"] = max(RATE_HEADROOM * req, tol.growth_cap)
    for name, fld in (
        ("assumption3_ratio", "assumption3_cap"),
        ("multiplier_assumption", "multiplier_cap"),
    ):
        vals = [
            float(rec.check(name).fitted_constant)
            for rec in records
            if _has_finite_fit(rec, name)
        ]
        if vals:
            fitted[fld] = max(RATE_HEADROOM * max(vals), getattr(tol, fld))
    for name, fld in (
        ("theorem_1_1", "theorem11_log_ref"),
        ("theorem_1_3", "theorem13_log_ref"),
    ):
        ref = _max_extra(records, name, "log_fitted_C")
        fitted[fld] = ref if ref is not None else 0.0
    return fitted


def _has_finite_fit(rec, name) -> bool:
    try:
        c = rec.check(name)
    except KeyError:
        return False
    return c.fitted_constant is not None and np.isfinite(c.fitted_constant)


def apply_calibration(cfg: ExperimentConfig, fitted: dict) -> ExperimentConfig:
    rates = replace(
        cfg.rates,
        zeta=fitted.get("zeta", cfg.rates.zeta),
        backward=fitted.get("backward", cfg.rates.backward),
        c1=fitted.get("c1", cfg.rates.c1),
        c2=fitted.get("c2", cfg.rates.c2),
    )
    tol = replace(
        cfg.tolerances,
        monotonicity_cap=fitted.get(
            "monotonicity_cap", cfg.tolerances.monotonicity_cap
        ),
        growth_cap=fitted.get("growth_cap", cfg.tolerances.growth_cap),
        assumption3_cap=fitted.get(
            "assumption3_cap", cfg.tolerances.assumption3_cap
        ),
        multiplier_cap=fitted.get(
            "multiplier_cap", cfg.tolerances.multiplier_cap
        ),
        theorem11_log_ref=fitted.get("theorem11_log_ref", 0.0),
        theorem13_log_ref=fitted.get("theorem13_log_ref", 0.0),
    )
    return replace(cfg, rates=rates, tolerances=tol)


def _gamma_fit(records):
    reps = []
    for rec in records:
        try:
            c = rec.check("theorem_1_1")
        except KeyError:
            continue
        ex = c.extras
        if all(ex.get(k) for k in ("lhs", "obs", "global0")):
            reps.append(
                SimpleNamespace(
                    lhs=ex["lhs"], obs=ex["obs"], global0=ex["global0"]
                )
            )
    try:
        return uc.empirical_gamma_fit(reps)
    except InsufficientFamily:
        return None


def _refinement_spreads(members, records) -> dict:
    """Spread of the theorem closing constant across members identical up
    to the grid; computed on the exact log scale."""
    groups = {}
    for cfg, rec in zip(members, records):
        raw = cfg.to_dict()
        grid = raw.pop("grid")
        raw.pop("label", None)
        key = canonical_json(raw)
        groups.setdefault(key, []).append((grid["sizes"][0], rec))
    out = {}
    for key, entries in groups.items():
        if len({tuple(g) for g, _ in entries}) < 2:
            continue
        logs = []
        for _, rec in entries:
            try:
                v = rec.check("theorem_1_1").extras.get("log_fitted_C")
            except KeyError:
                continue
            if v is not None and np.isfinite(v):
                logs.append(float(v))
        if len(logs) >= 2:
            label = entries[0][1].label
            out[label] = float(np.exp(max(logs) - min(logs)))
    return out


def run_sweep(
    template: ExperimentConfig,
    axes: dict,
    workers: int = 4,
    persist=None,
) -> SweepResult:
    """Two-phase sweep: calibrate generic constants on even-indexed
    members, assert them (with headroom) on odd-indexed hold-outs."""
    members = build_members(template, axes)
    tags = ["calibration" if i % 2 == 0 else "holdout" for i in range(len(members))]

    cal_jobs = [
        (i, cfg, tags[i]) for i, cfg in enumerate(members) if tags[i] == "calibration"
    ]
    hold_jobs = [
        (i, cfg, tags[i]) for i, cfg in enumerate(members) if tags[i] == "holdout"
    ]

    records_by_idx = {}

    def on_complete(idx, rec):
        records_by_idx[idx] = rec
        if persist:
            persist([records_by_idx[j] for j in sorted(records_by_idx)], None)

    cal_records = _run_batch(cal_jobs, workers, on_complete)
    fitted = calibrate(cal_records, template)

    hold_jobs = [
        (i, apply_calibration(cfg, fitted), tag) for i, cfg, tag in hold_jobs
    ]
    _run_batch(hold_jobs, workers, on_complete)

    records = [records_by_idx[i] for i in sorted(records_by_idx)]
    gamma = _gamma_fit(records)
    summary = {
        "axes": {k: list(v) for k, v in axes.items()},
        "members": len(members),
        "calibrated": fitted,
        "gamma_fit": gamma,
        "refinement_spread": _refinement_spreads(members, records),
    }
    if persist:
        persist(records, summary)
    return SweepResult(records=records, summary=summary)
