"""Analysis configuration: a JSON document describing the pair and its tails.

Schema (all keys except ``c1``/``c2`` optional)::

    {
      "name": "example2_t0_0.5",
      "c1": {"expr": "0.5/(x^2+1)",
             "tails": {"-inf": {"limit": 0, "monotone_beyond": {"threshold": 0, "direction": "increasing"},
                                "critical_set_unbounded": false, "sign_vs_limit": "strictly_above"},
                       "+inf": {...}}},
      "c2": {...},
      "m": 3,
      "window": [-10, 10],                 # numbers or constant expressions such as "3*pi"
      "tolerances": {"root_tol": 1e-10, "level_merge_tol": 1e-8, "isolation_tol": 1e-10},
      "manifold": {"samples": 10000, "seed": 0},
      "oracle": {"enabled": false, "nx": 4096},
      "outputs": ["json", "dot", "svg"]
    }

Limits are numbers or the strings ``"+inf"``/``"-inf"``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, Union

from . import expr as ex
from .errors import ConfigError, ExprError
from .expr import Interval
from .funcspec import (
    DEFAULT_WINDOW,
    ISOLATION_TOL,
    LEVEL_MERGE_TOL,
    ROOT_TOL,
    FunctionSpec,
    Side,
    TailDeclaration,
)

OUTPUT_KINDS = ("json", "dot", "svg")


@dataclass(frozen=True)
class FunctionConfig:
    expr: str
    tails: tuple[TailDeclaration, TailDeclaration]

    def to_dict(self) -> dict:
        return {"expr": self.expr, "tails": {t.side.value: _tail_echo(t) for t in self.tails}}


def _tail_echo(t: TailDeclaration) -> dict:
    d = t.to_dict()
    d.pop("side")
    return d


@dataclass(frozen=True)
class AnalysisConfig:
    c1: FunctionConfig
    c2: FunctionConfig
    name: str = "analysis"
    m: int = 3
    window: tuple[float, float] = DEFAULT_WINDOW
    root_tol: float = ROOT_TOL
    level_merge_tol: float = LEVEL_MERGE_TOL
    isolation_tol: float = ISOLATION_TOL
    manifold_samples: int = 10_000
    seed: int = 0
    oracle_enabled: bool = False
    oracle_nx: int = 4096
    outputs: tuple[str, ...] = OUTPUT_KINDS
    description: str = field(default="", compare=False)

    def __post_init__(self):
        if self.m < 2:
            raise ConfigError(f"m must be at least 2, got {self.m}")
        lo, hi = self.window
        if not lo < hi:
            raise ConfigError(f"window must satisfy a < b, got {list(self.window)}")
        for name in ("root_tol", "level_merge_tol", "isolation_tol"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.manifold_samples < 1:
            raise ConfigError("manifold samples must be positive")
        if self.oracle_nx < 2048:
            raise ConfigError("oracle nx must be at least 2048")
        bad = [o for o in self.outputs if o not in OUTPUT_KINDS]
        if bad:
            raise ConfigError(f"unknown output kinds {bad}")

    @property
    def interval(self) -> Interval:
        return Interval(*self.window)

    def with_overrides(self, window=None, m=None) -> "AnalysisConfig":
        d = self.to_dict()
        if window is not None:
            d["window"] = list(window)
        if m is not None:
            d["m"] = m
        return AnalysisConfig.from_dict(d)

    def to_dict(self) -> dict:
        """Full echo with every default filled in."""
        return {
            "name": self.name,
            "description": self.description,
            "c1": self.c1.to_dict(),
            "c2": self.c2.to_dict(),
            "m": self.m,
            "window": list(self.window),
            "tolerances": {
                "root_tol": self.root_tol,
                "level_merge_tol": self.level_merge_tol,
                "isolation_tol": self.isolation_tol,
            },
            "manifold": {"samples": self.manifold_samples, "seed": self.seed},
            "oracle": {"enabled": self.oracle_enabled, "nx": self.oracle_nx},
            "outputs": list(self.outputs),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AnalysisConfig":
        try:
            c1 = _function(data["c1"], "c1")
            c2 = _function(data["c2"], "c2")
        except KeyError as exc:
            raise ConfigError(f"missing key {exc.args[0]!r}") from None
        tol = data.get("tolerances", {})
        man = data.get("manifold", {})
        orc = data.get("oracle", {})
        window = data.get("window", list(DEFAULT_WINDOW))
        if len(window) != 2:
            raise ConfigError("window needs exactly two entries")
        try:
            return cls(
                c1=c1,
                c2=c2,
                name=str(data.get("name", "analysis")),
                m=int(data.get("m", 3)),
                window=(_number(window[0]), _number(window[1])),
                root_tol=float(tol.get("root_tol", ROOT_TOL)),
                level_merge_tol=float(tol.get("level_merge_tol", LEVEL_MERGE_TOL)),
                isolation_tol=float(tol.get("isolation_tol", ISOLATION_TOL)),
                manifold_samples=int(man.get("samples", 10_000)),
                seed=int(man.get("seed", 0)),
                oracle_enabled=bool(orc.get("enabled", False)),
                oracle_nx=int(orc.get("nx", 4096)),
                outputs=tuple(data.get("outputs", OUTPUT_KINDS)),
                description=str(data.get("description", "")),
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from None

    def build_specs(self) -> tuple[FunctionSpec, FunctionSpec]:
        c1 = FunctionSpec.build("c1", self.c1.expr, self.c1.tails, self.window, self.isolation_tol)
        c2 = FunctionSpec.build("c2", self.c2.expr, self.c2.tails, self.window, self.isolation_tol)
        return c1, c2


def _number(value) -> float:
    if isinstance(value, (int, float)):
        return float(value)
    try:
        e = ex.parse(str(value))
        return ex.evaluate(e, 0.0) if not _mentions_x(e) else _reject(value)
    except ExprError as exc:
        raise ConfigError(f"bad window bound {value!r}: {exc}") from None


def _reject(value):
    raise ConfigError(f"window bound {value!r} must not depend on x")


def _mentions_x(e) -> bool:
    return ex.differentiate(e) != ex.Const(0.0)


def _function(data: dict, name: str) -> FunctionConfig:
    if isinstance(data, str):
        data = {"expr": data}
    if "expr" not in data:
        raise ConfigError(f"{name} needs an 'expr'")
    try:
        ex.parse(data["expr"])
    except ExprError as exc:
        raise ConfigError(f"{name}: {exc}") from exc
    tails = data.get("tails", {})
    unknown = set(tails) - {"-inf", "+inf"}
    if unknown:
        raise ConfigError(f"{name}: unknown tail sides {sorted(unknown)}")
    try:
        decl = tuple(TailDeclaration.from_dict(side, tails.get(side.value, {})) for side in (Side.NEG, Side.POS))
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"{name}: bad tail declaration: {exc}") from None
    return FunctionConfig(str(data["expr"]), decl)


def load_config(path: Union[str, Path]) -> AnalysisConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise exc.__class__(f"cannot read config {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    return AnalysisConfig.from_dict(data)


def fixture_names() -> list[str]:
    root = resources.files("reeb_sandwich") / "fixtures"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_fixture(name: str) -> AnalysisConfig:
    root = resources.files("reeb_sandwich") / "fixtures"
    target = root / f"{name}.json"
    if not target.is_file():
        raise ConfigError(f"unknown fixture {name!r}; available: {', '.join(fixture_names())}")
    return AnalysisConfig.from_dict(json.loads(target.read_text()))


def resolve(config: Optional[str] = None, fixture: Optional[str] = None) -> AnalysisConfig:
    if (config is None) == (fixture is None):
        raise ConfigError("give exactly one of --config or --fixture")
    return load_config(config) if config is not None else load_fixture(fixture)
