"""Experiment configuration: TOML/JSON ingestion, validation against the
geometry it describes, canonical serialization and a stable digest.

Configs are plain nested tables so they stay diffable; load -> serialize ->
load is idempotent on the canonical form.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import mesh
from .errors import FreqlabError, ParseError, ValidationError

_COEFF_KINDS = ("zero", "constant", "fourier-random")
_INIT_KINDS = ("zero", "eigenfunction", "bump", "fourier-random")
_WEIGHT_POLICIES = ("fixed", "lambda_star")


@dataclass
class DomainSpec:
    kind: str = "interval"
    bounds: list = field(default_factory=lambda: [[0.0, 1.0]])


@dataclass
class GridSpec:
    # list of per-axis point counts; the first entry is the primary grid,
    # the rest drive refinement diagnostics
    sizes: list = field(default_factory=lambda: [[257]])


@dataclass
class TimeSpec:
    T: float = 0.05
    steps: int = 200


@dataclass
class CoefficientSpec:
    kind: str = "zero"
    b: list = field(default_factory=list)
    c: float = 0.0
    seed: int = 0
    amplitude: float = 0.0
    modes: int = 3

    def __post_init__(self):
        # sweep axes may supply scalars for 1-D runs
        if isinstance(self.b, (int, float)):
            self.b = [float(self.b)]


@dataclass
class InitialSpec:
    kind: str = "eigenfunction"
    k: list = field(default_factory=lambda: [1])
    center: list = field(default_factory=list)
    width: float = 0.0
    seed: int = 0
    modes: int = 8
    decay: float = 2.0
    scale: float = 1.0

    def __post_init__(self):
        if isinstance(self.k, int):
            self.k = [self.k]
        if isinstance(self.center, (int, float)):
            self.center = [float(self.center)]


@dataclass
class BallSpec:
    center: list = field(default_factory=lambda: [0.5])
    radius: float = 0.1


@dataclass
class WeightSpec:
    policy: str = "fixed"
    lam: float = 0.05


@dataclass
class RateSpec:
    """Generic-constant rates; 1.0 unless a calibration pass overrides."""

    c0: float = 1.0
    c1: float = 1.0
    c2: float = 1.0
    zeta: float = 1.0
    backward: float = 1.0


@dataclass
class ToleranceSpec:
    caloric: float = 1e-12
    pde_slack_safety: float = 2.0
    dh_identity: float = 1e-2
    theta_sign: float = 1e-8
    theta_reduction: float = 1e-10
    monotonicity_m0: float = 1e-3
    monotonicity_cap: float = 100.0
    terminal_margin: float = 0.0
    energy: float = 1e-2
    zeta_m0: float = 1e-6
    backward_m0: float = 1e-3
    growth_cap: float = 10.0
    multiplier_cap: float = 10.0
    assumption3_cap: float = 10.0
    theorem_cap: float = 10.0
    # log-scale reference for the theorem caps: pass iff
    # log_fitted_C <= log(theorem_cap) + log_ref (0 = compare against 1)
    theorem11_log_ref: float = 0.0
    theorem13_log_ref: float = 0.0


@dataclass
class OutputSpec:
    dir: str = "results"


@dataclass
class ExperimentConfig:
    label: str = "scenario"
    domain: DomainSpec = field(default_factory=DomainSpec)
    grid: GridSpec = field(default_factory=GridSpec)
    time: TimeSpec = field(default_factory=TimeSpec)
    coefficients: CoefficientSpec = field(default_factory=CoefficientSpec)
    initial: InitialSpec = field(default_factory=InitialSpec)
    ball: BallSpec = field(default_factory=BallSpec)
    weight: WeightSpec = field(default_factory=WeightSpec)
    rates: RateSpec = field(default_factory=RateSpec)
    tolerances: ToleranceSpec = field(default_factory=ToleranceSpec)
    output: OutputSpec = field(default_factory=OutputSpec)

    def to_dict(self) -> dict:
        return asdict(self)

    def digest(self) -> str:
        return hashlib.sha256(
            canonical_json(self.to_dict()).encode("utf-8")
        ).hexdigest()

    @property
    def scenario_id(self) -> str:
        return f"{self.label}-{self.digest()[:12]}"


def format_real(x: float) -> str:
    """17 significant digits, '.' decimal separator, no locale surprises."""
    return format(float(x), ".17g")


def _canon(value):
    if isinstance(value, dict):
        return "{" + ",".join(
            f"{json.dumps(k, ensure_ascii=False)}:{_canon(value[k])}"
            for k in sorted(value)
        ) + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(_canon(v) for v in value) + "]"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            return "null"
        return format_real(value)
    if value is None:
        return "null"
    return json.dumps(value, ensure_ascii=False)


def canonical_json(obj) -> str:
    """Deterministic JSON: sorted keys, 17-significant-digit reals, LF-free
    single line, non-finite reals mapped to null."""
    return _canon(obj)


_SECTION_TYPES = {
    "domain": DomainSpec,
    "grid": GridSpec,
    "time": TimeSpec,
    "coefficients": CoefficientSpec,
    "initial": InitialSpec,
    "ball": BallSpec,
    "weight": WeightSpec,
    "rates": RateSpec,
    "tolerances": ToleranceSpec,
    "output": OutputSpec,
}


def config_from_dict(raw: dict) -> ExperimentConfig:
    """Build a config from a nested table, filling defaults and rejecting
    unknown keys, then validate."""
    if not isinstance(raw, dict):
        raise ValidationError("config root must be a table")
    kwargs = {}
    for key, value in raw.items():
        if key == "label":
            kwargs["label"] = str(value)
            continue
        cls = _SECTION_TYPES.get(key)
        if cls is None:
            raise ValidationError(f"unknown config section {key!r}")
        if not isinstance(value, dict):
            raise ValidationError(f"section {key!r} must be a table")
        allowed = set(cls.__dataclass_fields__)
        unknown = set(value) - allowed
        if unknown:
            raise ValidationError(
                f"unknown key {sorted(unknown)[0]!r} in section {key!r}"
            )
        kwargs[key] = cls(**value)
    cfg = ExperimentConfig(**kwargs)
    validate_config(cfg)
    return cfg


def validate_config(cfg: ExperimentConfig) -> None:
    """Raise ValidationError naming the violated invariant."""
    try:
        domain = mesh.Domain(cfg.domain.kind, tuple(
            tuple(map(float, b)) for b in cfg.domain.bounds
        ))
    except FreqlabError as exc:
        raise ValidationError(str(exc)) from exc

    if not cfg.grid.sizes:
        raise ValidationError("grid.sizes must be nonempty")
    for size in cfg.grid.sizes:
        if len(size) != domain.dim:
            raise ValidationError(
                f"grid size {size} does not match domain dimension {domain.dim}"
            )
        if any(int(n) < 3 for n in size):
            raise ValidationError("grid sizes must be at least 3 per axis")

    if cfg.time.T <= 0:
        raise ValidationError("time.T must be positive")
    if cfg.time.steps < 2:
        raise ValidationError("time.steps must be at least 2")

    co = cfg.coefficients
    if co.kind not in _COEFF_KINDS:
        raise ValidationError(f"coefficients.kind must be one of {_COEFF_KINDS}")
    if co.kind == "constant" and len(co.b) != domain.dim:
        raise ValidationError("constant coefficients need one b entry per axis")
    if co.kind == "fourier-random" and co.amplitude < 0:
        raise ValidationError("coefficients.amplitude must be nonnegative")

    ini = cfg.initial
    if ini.kind not in _INIT_KINDS:
        raise ValidationError(f"initial.kind must be one of {_INIT_KINDS}")
    if not (ini.scale != 0 and abs(ini.scale) < float("inf")):
        raise ValidationError("initial.scale must be nonzero and finite")
    if ini.kind == "eigenfunction":
        if len(ini.k) != domain.dim or any(int(k) < 1 for k in ini.k):
            raise ValidationError("initial.k needs one positive mode per axis")
    if ini.kind == "bump":
        if len(ini.center) != domain.dim or ini.width <= 0:
            raise ValidationError("bump initial data needs center and width")
        for c, (lo, hi) in zip(ini.center, domain.bounds):
            if not (lo < c - ini.width and c + ini.width < hi):
                raise ValidationError("bump support touches the boundary")

    try:
        mesh.observation_ball(domain, cfg.ball.center, cfg.ball.radius)
    except FreqlabError as exc:
        raise ValidationError("observation ball not inside domain") from exc

    if cfg.weight.policy not in _WEIGHT_POLICIES:
        raise ValidationError(f"weight.policy must be one of {_WEIGHT_POLICIES}")
    if cfg.weight.policy == "fixed" and cfg.weight.lam <= 0:
        raise ValidationError("weight.lam must be positive")

    for name in ("c0", "c1", "c2", "zeta", "backward"):
        if getattr(cfg.rates, name) < 0:
            raise ValidationError(f"rates.{name} must be nonnegative")


def load_config(path) -> ExperimentConfig:
    """Load a TOML (default) or JSON config file."""
    path = Path(path)
    if not path.exists():
        raise ParseError(f"config file {path} does not exist")
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    else:
        import tomli

        try:
            raw = tomli.loads(text)
        except tomli.TOMLDecodeError as exc:
            raise ParseError(f"{path}: {exc}") from exc
    return config_from_dict(raw)


def save_config(cfg: ExperimentConfig, path) -> None:
    Path(path).write_text(canonical_json(cfg.to_dict()) + "\n", encoding="utf-8")
